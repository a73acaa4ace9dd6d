use serde::{Deserialize, Serialize};

use super::predicates::{point_segment, segment_segment};
use super::{bbox_diagonal, Vec3};
use crate::error::{KnotError, Result};

/// Incidence guard band relative to the bounding-box diagonal.
pub const DEFAULT_REL_EPS: f64 = 1e-9;

/// A simple closed polygonal curve in 3-space.
///
/// Vertex `i` connects to vertex `i + 1 (mod n)`. Construction through
/// [`PolygonalKnot::new`] rejects fewer than three vertices, repeated
/// consecutive vertices and self-intersections. Adjacent edges may be
/// collinear.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalKnot {
    vertices: Vec<Vec3>,
    rel_eps: f64,
}

impl PolygonalKnot {
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        Self::with_rel_eps(vertices, DEFAULT_REL_EPS)
    }

    /// Builds a knot whose incidence tolerance is `rel_eps` times its
    /// bounding-box diagonal.
    pub fn with_rel_eps(vertices: Vec<Vec3>, rel_eps: f64) -> Result<Self> {
        if !(rel_eps >= 0.0 && rel_eps.is_finite()) {
            return Err(KnotError::InvalidParameter(format!("relative epsilon {rel_eps}")));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(KnotError::InvalidParameter("non-finite coordinate".into()));
        }
        let eps = rel_eps * bbox_diagonal(&vertices);
        let check = is_simple(&vertices, Some(eps))?;
        if let Some(v) = check.violation {
            return Err(KnotError::NotSimple(v.to_string()));
        }
        Ok(Self { vertices, rel_eps })
    }

    /// Same geometry with a different relative tolerance, re-validated.
    pub fn rescaled_eps(&self, rel_eps: f64) -> Result<Self> {
        Self::with_rel_eps(self.vertices.clone(), rel_eps)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec3> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex with cyclic indexing.
    pub fn vertex(&self, i: isize) -> Vec3 {
        let n = self.vertices.len() as isize;
        self.vertices[i.rem_euclid(n) as usize]
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Vec3, Vec3) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn rel_eps(&self) -> f64 {
        self.rel_eps
    }

    /// Absolute incidence tolerance `eps_geom`.
    pub fn eps(&self) -> f64 {
        self.rel_eps * self.bbox_diagonal()
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(&self.vertices)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Smallest distance from `p` to the curve, with the index of the closest edge.
    pub fn distance_to(&self, p: &Vec3) -> (f64, usize) {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                (point_segment(p, &a, &b).0, i)
            })
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .unwrap()
    }

    /// Point at position `t` along edge `i`.
    pub fn point_on_edge(&self, i: usize, t: f64) -> Vec3 {
        let (a, b) = self.edge(i);
        a + (b - a) * t
    }
}

impl Serialize for PolygonalKnot {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        super::io::KnotFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolygonalKnot {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = super::io::KnotFile::deserialize(deserializer)?;
        PolygonalKnot::new(file.vertices.into_iter().map(Vec3::from).collect()).map_err(serde::de::Error::custom)
    }
}

/// A unit vector in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction(Vec3);

impl Direction {
    /// Normalizes `v`; fails on (near) zero vectors.
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(KnotError::InvalidParameter("zero direction".into()));
        }
        Ok(Self(v / norm))
    }

    pub(crate) fn from_unit(v: Vec3) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-12);
        Self(v)
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_inner(self) -> Vec3 {
        self.0
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = KnotError;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(Vec3::from(v))
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        d.0.into()
    }
}

impl std::ops::Deref for Direction {
    type Target = Vec3;

    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

/// The plane `{x : <normal, x> = offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Direction,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Direction, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Plane with the given normal through point `p`.
    pub fn through(normal: Direction, p: &Vec3) -> Self {
        let offset = normal.dot(p);
        Self { normal, offset }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// A witness of non-simplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// Two non-adjacent edges meet.
    Edges(usize, usize),
    /// A vertex touches an edge it does not belong to.
    VertexOnEdge { vertex: usize, edge: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Edges(i, j) => write!(f, "edges {i} and {j} intersect"),
            Violation::VertexOnEdge { vertex, edge } => write!(f, "vertex {vertex} lies on edge {edge}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityCheck {
    pub simple: bool,
    pub violation: Option<Violation>,
}

/// Checks that a closed vertex sequence has no self-intersections.
///
/// `eps` defaults to [`DEFAULT_REL_EPS`] times the bounding-box diagonal.
/// Non-adjacent edge pairs are scanned first in lexicographic order, then
/// vertices against the edges that do not contain them (which catches
/// adjacent edges folding back onto each other).
pub fn is_simple(vertices: &[Vec3], eps: Option<f64>) -> Result<SimplicityCheck> {
    let n = vertices.len();
    if n < 3 {
        return Err(KnotError::TooFewVertices(n));
    }
    for i in 0..n {
        if vertices[i] == vertices[(i + 1) % n] {
            return Err(KnotError::DegenerateEdge(i));
        }
    }
    let eps = eps.unwrap_or_else(|| DEFAULT_REL_EPS * bbox_diagonal(vertices));
    let edge = |i: usize| (&vertices[i], &vertices[(i + 1) % n]);

    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            if segment_segment(a, b, c, d).0 <= eps {
                return Ok(SimplicityCheck { simple: false, violation: Some(Violation::Edges(i, j)) });
            }
        }
    }
    for v in 0..n {
        for e in 0..n {
            if e == v || (e + 1) % n == v {
                continue;
            }
            let (a, b) = edge(e);
            if point_segment(&vertices[v], a, b).0 <= eps {
                return Ok(SimplicityCheck {
                    simple: false,
                    violation: Some(Violation::VertexOnEdge { vertex: v, edge: e }),
                });
            }
        }
    }
    Ok(SimplicityCheck { simple: true, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec3> {
        vec![
            Vec3::new(0., 0., 0.),
            Vec3::new(1., 0., 0.),
            Vec3::new(1., 1., 0.),
            Vec3::new(0., 1., 0.),
        ]
    }

    #[test]
    fn square_is_simple() {
        let check = is_simple(&square(), None).unwrap();
        assert!(check.simple);
        assert!(check.violation.is_none());
    }

    #[test]
    fn bowtie_reports_first_crossing_pair() {
        let bowtie = vec![
            Vec3::new(0., 0., 0.),
            Vec3::new(1., 1., 0.),
            Vec3::new(1., 0., 0.),
            Vec3::new(0., 1., 0.),
        ];
        let check = is_simple(&bowtie, None).unwrap();
        assert!(!check.simple);
        assert_eq!(check.violation, Some(Violation::Edges(0, 2)));
    }

    #[test]
    fn too_few_and_degenerate() {
        assert_eq!(is_simple(&square()[..2], None), Err(KnotError::TooFewVertices(2)));
        let mut pts = square();
        pts[2] = pts[1];
        assert_eq!(is_simple(&pts, None), Err(KnotError::DegenerateEdge(1)));
    }

    #[test]
    fn fold_back_is_not_simple() {
        let pts = vec![
            Vec3::new(0., 0., 0.),
            Vec3::new(2., 0., 0.),
            Vec3::new(1., 0., 0.),
            Vec3::new(1., 1., 0.),
        ];
        assert!(!is_simple(&pts, None).unwrap().simple);
    }

    #[test]
    fn collinear_adjacent_edges_are_allowed() {
        let pts = vec![
            Vec3::new(0., 0., 0.),
            Vec3::new(0.5, 0., 0.),
            Vec3::new(1., 0., 0.),
            Vec3::new(1., 1., 0.),
        ];
        assert!(PolygonalKnot::new(pts).is_ok());
    }

    #[test]
    fn direction_normalizes() {
        let d = Direction::new(Vec3::new(3., 0., 4.)).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-12);
        assert!(Direction::new(Vec3::zeros()).is_err());
    }
}
