//! Distance and incidence predicates in double precision.
//!
//! Callers compare the returned distances against their own guard band
//! (`eps_geom`); nothing here decides incidence on its own.

use super::{Vec2, Vec3};

/// Unsigned angle between two vectors, `atan2(|a x b|, a . b)`.
#[inline]
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Unsigned angle between two planar vectors.
#[inline]
pub fn angle_between_2d(a: &Vec2, b: &Vec2) -> f64 {
    cross2(a, b).abs().atan2(a.dot(b))
}

/// Signed angle turning `a` into `b`, in `(-pi, pi]`.
#[inline]
pub fn signed_angle_2d(a: &Vec2, b: &Vec2) -> f64 {
    cross2(a, b).atan2(a.dot(b))
}

#[inline]
pub fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Closest points between segments `[p1, q1]` and `[p2, q2]`.
///
/// Returns `(distance, s, t)` with the closest points at `p1 + s (q1 - p1)`
/// and `p2 + t (q2 - p2)`.
pub fn segment_segment(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> (f64, f64, f64) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let tiny = f64::MIN_POSITIVE;

    let (s, t) = if a <= tiny && e <= tiny {
        (0.0, 0.0)
    } else if a <= tiny {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= tiny {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            // Parallel segments: any s works, start from the endpoint.
            let mut s = if denom > 1e-14 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    ((c1 - c2).norm(), s, t)
}

/// Distance from `p` to segment `[a, b]` and the parameter of the foot point.
pub fn point_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + ab * t - p).norm(), t)
}

/// Closest point of the solid triangle `abc` to `p`.
pub fn closest_point_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom.abs() <= f64::MIN_POSITIVE {
        // Collinear corners: fall back to the nearest edge.
        let candidates = [
            point_segment(p, a, b),
            point_segment(p, b, c),
            point_segment(p, a, c),
        ];
        let (i, _) = candidates
            .iter()
            .enumerate()
            .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .unwrap();
        let (s, e) = [(a, b), (b, c), (a, c)][i];
        return s + (e - s) * candidates[i].1;
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

pub fn point_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (closest_point_triangle(p, a, b, c) - p).norm()
}

/// Distance between segment `[p, q]` and the solid triangle `abc`.
pub fn segment_triangle(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let mut best = point_triangle(p, a, b, c).min(point_triangle(q, a, b, c));
    for (s, e) in [(a, b), (b, c), (c, a)] {
        best = best.min(segment_segment(p, q, s, e).0);
    }
    let n = (b - a).cross(&(c - a));
    let dp = n.dot(&(p - a));
    let dq = n.dot(&(q - a));
    if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
        let x = p + (q - p) * (dp / (dp - dq));
        best = best.min(point_triangle(&x, a, b, c));
    }
    best
}

/// Proper crossing of planar segments `[a0, a1]` and `[b0, b1]`.
///
/// Returns the parameters `(s, t)` of the crossing point when the supporting
/// lines are not parallel and both parameters lie in `[0, 1]`.
pub fn segment_intersection_2d(a0: &Vec2, a1: &Vec2, b0: &Vec2, b1: &Vec2) -> Option<(f64, f64)> {
    let da = a1 - a0;
    let db = b1 - b0;
    let denom = cross2(&da, &db);
    if denom == 0.0 {
        return None;
    }
    let r = b0 - a0;
    let s = cross2(&r, &db) / denom;
    let t = cross2(&r, &da) / denom;
    if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
        Some((s, t))
    } else {
        None
    }
}

/// Distance from planar point `p` to segment `[a, b]`.
pub fn point_segment_2d(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - p).norm()
}
