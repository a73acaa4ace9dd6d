//! Total curvature, angular length, radial projection, inscribed polygons
//! and the cone-area ratio around a base point.

use serde::{Deserialize, Serialize};

use crate::error::{KnotError, Result};
use crate::geom::predicates::angle_between;
use crate::geom::{PolygonalKnot, Vec3};

/// External angles of a polygonal curve.
///
/// `angles[i]` is the external angle at vertex `i`, in `[0, pi]`; for open
/// curves the two endpoints carry `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleProfile {
    pub angles: Vec<f64>,
    pub total: f64,
}

/// External angles `pi - angle(p[i-1], p[i], p[i+1])`, computed as the angle
/// between consecutive edge vectors.
pub fn turning_angles(points: &[Vec3], closed: bool) -> Result<AngleProfile> {
    let n = points.len();
    let min = if closed { 3 } else { 2 };
    if n < min {
        return Err(KnotError::TooFewVertices(n));
    }
    let edges = if closed { n } else { n - 1 };
    let dirs: Vec<Vec3> = (0..edges).map(|i| points[(i + 1) % n] - points[i]).collect();
    if let Some(i) = dirs.iter().position(|d| d.norm_squared() == 0.0) {
        return Err(KnotError::DegenerateEdge(i));
    }
    let angles: Vec<f64> = (0..n)
        .map(|i| {
            if !closed && (i == 0 || i == n - 1) {
                0.0
            } else {
                let incoming = &dirs[(i + edges - 1) % edges];
                let outgoing = &dirs[i % edges];
                angle_between(incoming, outgoing)
            }
        })
        .collect();
    let total = angles.iter().sum();
    Ok(AngleProfile { angles, total })
}

pub fn total_curvature(knot: &PolygonalKnot) -> AngleProfile {
    turning_angles(knot.vertices(), true).expect("validated knot has no degenerate edges")
}

fn ensure_off_curve(knot: &PolygonalKnot, o: &Vec3) -> Result<()> {
    let (dist, edge) = knot.distance_to(o);
    if dist <= knot.eps() {
        return Err(KnotError::PointOnCurve(dist, edge));
    }
    Ok(())
}

/// Sum of the angles `p[i] o p[i+1]` subtended at `o`.
pub fn angular_length(knot: &PolygonalKnot, o: &Vec3) -> Result<f64> {
    ensure_off_curve(knot, o)?;
    let n = knot.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = knot.edge(i);
            angle_between(&(a - o), &(b - o))
        })
        .sum())
}

/// A chain of minor great-circle arcs on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalPolyline {
    vertices: Vec<Vec3>,
    closed: bool,
}

impl SphericalPolyline {
    /// Validates unit norms and rejects antipodal consecutive vertices.
    pub fn new(vertices: Vec<Vec3>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(KnotError::TooFewVertices(vertices.len()));
        }
        if let Some(v) = vertices.iter().find(|v| (v.norm() - 1.0).abs() > 1e-12) {
            return Err(KnotError::InvalidParameter(format!("vertex {v:?} is not on the unit sphere")));
        }
        let line = Self { vertices, closed };
        for i in 0..line.edge_count() {
            let (a, b) = line.arc(i);
            if (a + b).norm() <= 1e-9 {
                return Err(KnotError::AntipodalEdge(i));
            }
        }
        Ok(line)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn arc(&self, i: usize) -> (Vec3, Vec3) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn length(&self) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.arc(i);
                angle_between(&a, &b)
            })
            .sum()
    }
}

/// Radial projection of the knot onto the unit sphere centered at `o`.
pub fn radial_projection(knot: &PolygonalKnot, o: &Vec3) -> Result<SphericalPolyline> {
    ensure_off_curve(knot, o)?;
    let pts = knot.vertices().iter().map(|p| (p - o).normalize()).collect();
    SphericalPolyline::new(pts, true)
}

/// A point on the knot: edge index and position `t` in `[0, 1]` along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub edge: usize,
    pub t: f64,
}

impl Mark {
    pub fn new(edge: usize, t: f64) -> Self {
        Self { edge, t }
    }
}

/// Closed polygon through the marked points, in the order given.
///
/// The marks must visit the knot once around in its own direction, starting
/// anywhere.
pub fn inscribe(knot: &PolygonalKnot, marks: &[Mark]) -> Result<Vec<Vec3>> {
    let n = knot.len();
    if marks.len() < 3 {
        return Err(KnotError::TooFewMarks(marks.len()));
    }
    let mut positions = Vec::with_capacity(marks.len());
    for m in marks {
        if m.edge >= n || !(0.0..=1.0).contains(&m.t) {
            return Err(KnotError::InvalidParameter(format!("mark {m:?} outside the knot")));
        }
        let pos = if m.t == 1.0 { ((m.edge + 1) % n) as f64 } else { m.edge as f64 + m.t };
        positions.push(pos);
    }
    let k = positions.len();
    let descents = (0..k).filter(|&i| positions[(i + 1) % k] <= positions[i]).count();
    if descents != 1 {
        return Err(KnotError::MarksOutOfOrder);
    }
    Ok(marks.iter().map(|m| knot.point_on_edge(m.edge, m.t)).collect())
}

/// Largest angular width of one radial strip in the cone triangulation.
const CONE_STRIP_ANGLE: f64 = 2.4e-4;

/// Area of the cone over the knot with tip `o`, inside the ball of radius
/// `r` around `o`, divided by `r^2`.
///
/// Each cone panel (the sector spanned by one edge) is split into radial
/// strips no wider than `CONE_STRIP_ANGLE`, and the exact areas of the strip
/// triangles `o, o + r d_j, o + r d_{j+1}` are summed.
pub fn cone_ball_area_ratio(knot: &PolygonalKnot, o: &Vec3, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(KnotError::InvalidParameter(format!("radius {r}")));
    }
    ensure_off_curve(knot, o)?;
    let mut area = 0.0;
    for i in 0..knot.len() {
        let (a, b) = knot.edge(i);
        let wa = (a - o).normalize();
        let wb = (b - o).normalize();
        let theta = angle_between(&wa, &wb);
        if theta == 0.0 {
            continue;
        }
        let e2 = (wb - wa * wa.dot(&wb)).normalize();
        let strips = (theta / CONE_STRIP_ANGLE).ceil().max(1.0) as usize;
        let step = theta / strips as f64;
        let ray = |j: usize| {
            let phi = step * j as f64;
            (wa * phi.cos() + e2 * phi.sin()) * r
        };
        let mut prev = ray(0);
        for j in 1..=strips {
            let next = ray(j);
            area += 0.5 * prev.cross(&next).norm();
            prev = next;
        }
    }
    Ok(area / (r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{generate, KnotKind};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn regular_polygons_turn_once() {
        for n in [3, 10, 100] {
            let k = generate(KnotKind::ConvexNgon { n, radius: 1.0 }, 0).unwrap();
            assert!((total_curvature(&k).total - TAU).abs() < 1e-9);
        }
    }

    #[test]
    fn collinear_vertex_contributes_zero() {
        let pts = [Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(2., 0., 0.), Vec3::new(1., 1., 0.)];
        let prof = turning_angles(&pts, true).unwrap();
        assert_eq!(prof.angles[1], 0.0);
    }

    #[test]
    fn open_polyline_skips_endpoints() {
        let pts = [Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(1., 1., 0.)];
        let prof = turning_angles(&pts, false).unwrap();
        assert_eq!(prof.angles, vec![0.0, PI / 2.0, 0.0]);
    }

    #[test]
    fn collinear_quadrangle_turns_twice() {
        // Four collinear points on the line visited in the order a, c, b, d.
        let (a, b, c, d) = (0.0, 1.0, 2.5, 4.0);
        let pts = [a, c, b, d].map(|x| Vec3::new(x, 2.0 * x, -x));
        assert!((turning_angles(&pts, true).unwrap().total - 2.0 * TAU).abs() < 1e-9);
    }

    #[test]
    fn hexagon_seen_from_center() {
        let k = generate(KnotKind::ConvexNgon { n: 6, radius: 1.0 }, 0).unwrap();
        assert!((angular_length(&k, &Vec3::zeros()).unwrap() - TAU).abs() < 1e-9);
        let far = Vec3::new(0., 0., -2e6);
        assert!(angular_length(&k, &far).unwrap() < 1e-3);
    }

    #[test]
    fn point_on_curve_is_rejected() {
        let k = generate(KnotKind::ConvexNgon { n: 4, radius: 1.0 }, 0).unwrap();
        assert!(matches!(angular_length(&k, &Vec3::new(1., 0., 0.)), Err(KnotError::PointOnCurve(..))));
    }

    #[test]
    fn projection_from_interior_point_lies_on_equator() {
        let k = generate(KnotKind::ConvexNgon { n: 7, radius: 2.0 }, 0).unwrap();
        let o = Vec3::new(0.1, -0.2, 0.0);
        let proj = radial_projection(&k, &o).unwrap();
        assert!(proj.vertices().iter().all(|v| v.z.abs() < 1e-15));
        assert!((proj.length() - TAU).abs() < 1e-9);
        assert!((proj.length() - angular_length(&k, &o).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn inscribing_all_vertices_is_identity() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        let marks: Vec<Mark> = (0..k.len()).map(|i| Mark::new(i, 0.0)).collect();
        let beta = inscribe(&k, &marks).unwrap();
        assert_eq!(beta, k.vertices());
        // Rotated start is still cyclic order.
        let rotated: Vec<Mark> = (5..k.len() + 5).map(|i| Mark::new(i % k.len(), 0.0)).collect();
        assert!(inscribe(&k, &rotated).is_ok());
    }

    #[test]
    fn inscribe_rejects_bad_marks() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        assert_eq!(inscribe(&k, &[Mark::new(0, 0.5), Mark::new(3, 0.1)]), Err(KnotError::TooFewMarks(2)));
        assert_eq!(
            inscribe(&k, &[Mark::new(0, 0.5), Mark::new(9, 0.1), Mark::new(3, 0.1), Mark::new(20, 0.0)]),
            Err(KnotError::MarksOutOfOrder)
        );
    }

    #[test]
    fn flat_cone_over_square() {
        let k = generate(KnotKind::ConvexNgon { n: 4, radius: 1.0 }, 0).unwrap();
        let ratio = cone_ball_area_ratio(&k, &Vec3::zeros(), 1e3 * k.diameter()).unwrap();
        assert!((ratio - PI).abs() < 1e-6);
    }
}
