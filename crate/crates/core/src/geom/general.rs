use serde::{Deserialize, Serialize};

use super::predicates::{angle_between_2d, point_segment_2d, segment_intersection_2d};
use super::{orthonormal_frame, Direction, PolygonalKnot, Vec2, Vec3};
use crate::error::{KnotError, Result};

/// Minimum crossing angle of a generic projection, in radians.
pub const MIN_CROSSING_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositionMode {
    /// All vertex heights along `u` pairwise distinct.
    DistinctHeights,
    /// No four vertices on a common plane.
    NoFourCoplanar,
    /// Projection to the plane perpendicular to `u` has only transversal
    /// double points and no degenerate edge images.
    GenericProjection,
}

impl PositionMode {
    pub fn name(&self) -> &'static str {
        match self {
            PositionMode::DistinctHeights => "distinct-heights",
            PositionMode::NoFourCoplanar => "no-four-coplanar",
            PositionMode::GenericProjection => "generic-projection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub mode: PositionMode,
    pub pass: bool,
    /// Vertex tuples for heights and coplanarity; edge tuples (or
    /// `[vertex, edge]` for incidences) for projections.
    pub violations: Vec<Vec<usize>>,
}

impl GeneralPositionReport {
    fn from_violations(mode: PositionMode, violations: Vec<Vec<usize>>) -> Self {
        Self { mode, pass: violations.is_empty(), violations }
    }
}

pub fn check_general_position(
    knot: &PolygonalKnot,
    mode: PositionMode,
    u: Option<&Direction>,
) -> Result<GeneralPositionReport> {
    let eps = knot.eps();
    let violations = match mode {
        PositionMode::DistinctHeights => {
            let u = u.ok_or(KnotError::MissingDirection(mode.name()))?;
            tied_heights(knot.vertices(), u, eps)
        }
        PositionMode::NoFourCoplanar => coplanar_quadruples(knot.vertices(), eps),
        PositionMode::GenericProjection => {
            let u = u.ok_or(KnotError::MissingDirection(mode.name()))?;
            projection_violations(knot, u, eps)
        }
    };
    Ok(GeneralPositionReport::from_violations(mode, violations))
}

fn tied_heights(vertices: &[Vec3], u: &Direction, eps: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<(f64, usize)> = vertices.iter().enumerate().map(|(i, p)| (u.dot(p), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    // Every pair within a run of near-equal heights.
    for (k, &(h, i)) in order.iter().enumerate() {
        for &(h2, j) in &order[k + 1..] {
            if h2 - h > eps {
                break;
            }
            out.push(vec![i.min(j), i.max(j)]);
        }
    }
    out.sort();
    out
}

/// Height of the lowest vertex of tetrahedron `abcd` over its opposite face.
pub(crate) fn tetra_min_height(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let det = (b - a).cross(&(c - a)).dot(&(d - a)).abs();
    let faces = [
        (b - a).cross(&(c - a)).norm(),
        (b - a).cross(&(d - a)).norm(),
        (c - a).cross(&(d - a)).norm(),
        (c - b).cross(&(d - b)).norm(),
    ];
    let largest = faces.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        0.0
    } else {
        det / largest
    }
}

fn coplanar_quadruples(vertices: &[Vec3], eps: f64) -> Vec<Vec<usize>> {
    let n = vertices.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if tetra_min_height(&vertices[a], &vertices[b], &vertices[c], &vertices[d]) <= eps {
                        out.push(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Coordinates of the knot's vertices in an orthonormal frame of `u`'s
/// perpendicular plane, together with the depths `<u, p>`.
pub fn project(knot: &PolygonalKnot, u: &Direction) -> (Vec<Vec2>, Vec<f64>) {
    let (e1, e2) = orthonormal_frame(u);
    let pts = knot.vertices().iter().map(|p| Vec2::new(e1.dot(p), e2.dot(p))).collect();
    let depth = knot.vertices().iter().map(|p| u.dot(p)).collect();
    (pts, depth)
}

fn projection_violations(knot: &PolygonalKnot, u: &Direction, eps: f64) -> Vec<Vec<usize>> {
    let n = knot.len();
    let (pts, depth) = project(knot, u);
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let mut out = Vec::new();

    for i in 0..n {
        let (a, b) = seg(i);
        if (b - a).norm() <= eps {
            out.push(vec![i]);
        }
    }
    for v in 0..n {
        for e in 0..n {
            if e == v || (e + 1) % n == v {
                continue;
            }
            let (a, b) = seg(e);
            if point_segment_2d(&pts[v], &a, &b) <= eps {
                out.push(vec![v, e]);
            }
        }
    }
    let mut crossings = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a0, a1) = seg(i);
            let (b0, b1) = seg(j);
            if let Some((s, t)) = segment_intersection_2d(&a0, &a1, &b0, &b1) {
                let angle = angle_between_2d(&(a1 - a0), &(b1 - b0));
                let transversal = angle.min(std::f64::consts::PI - angle);
                let di = depth[i] + (depth[(i + 1) % n] - depth[i]) * s;
                let dj = depth[j] + (depth[(j + 1) % n] - depth[j]) * t;
                if transversal <= MIN_CROSSING_ANGLE || (di - dj).abs() <= eps {
                    out.push(vec![i, j]);
                }
                crossings.push((i, j, a0 + (a1 - a0) * s));
            }
        }
    }
    for &(i, j, x) in &crossings {
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            let (a, b) = seg(k);
            if point_segment_2d(&x, &a, &b) <= eps {
                let mut triple = vec![i, j, k];
                triple.sort();
                if !out.contains(&triple) {
                    out.push(triple);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knot(pts: &[[f64; 3]]) -> PolygonalKnot {
        PolygonalKnot::new(pts.iter().map(|p| Vec3::from(*p)).collect()).unwrap()
    }

    #[test]
    fn flat_square_has_tied_heights() {
        let sq = knot(&[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let up = Direction::new(Vec3::z()).unwrap();
        let report = check_general_position(&sq, PositionMode::DistinctHeights, Some(&up)).unwrap();
        assert!(!report.pass);
        assert_eq!(report.violations.len(), 6);
    }

    #[test]
    fn cube_face_quadruple_is_reported() {
        let k = knot(&[
            [0., 0., 0.],
            [1., 0., 0.],
            [1., 1., 0.],
            [0., 1., 0.],
            [0.3, 1.4, 0.9],
            [-0.4, 0.2, 1.7],
        ]);
        let report = check_general_position(&k, PositionMode::NoFourCoplanar, None).unwrap();
        assert!(!report.pass);
        assert!(report.violations.contains(&vec![0, 1, 2, 3]));
    }

    #[test]
    fn missing_direction() {
        let sq = knot(&[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        assert_eq!(
            check_general_position(&sq, PositionMode::GenericProjection, None),
            Err(KnotError::MissingDirection("generic-projection"))
        );
    }

    #[test]
    fn edge_on_view_projection_is_degenerate() {
        let sq = knot(&[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let along_edge = Direction::new(Vec3::x()).unwrap();
        let report = check_general_position(&sq, PositionMode::GenericProjection, Some(&along_edge)).unwrap();
        assert!(report.violations.contains(&vec![0]));
        let normal = Direction::new(Vec3::z()).unwrap();
        assert!(check_general_position(&sq, PositionMode::GenericProjection, Some(&normal)).unwrap().pass);
    }
}
