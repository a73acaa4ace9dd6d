//! Generic planar projections: crossings with over/under information, the
//! face arrangement with its chessboard coloring, and arcs for coloring.

mod svg;
mod tricolor;

use serde::{Deserialize, Serialize};

pub use svg::{render_svg, SvgStyle};
pub use tricolor::{coloring_space, tricolorable, Tricoloring};

use crate::error::{KnotError, Result};
use crate::geom::predicates::{angle_between_2d, cross2, point_segment_2d, segment_intersection_2d};
use crate::geom::{check_general_position, orthonormal_frame, Direction, PolygonalKnot, PositionMode, Vec2};
use crate::rng::{stream, uniform_direction};

/// Random directions tried when no projection direction is given.
pub const DIRECTION_RETRIES: usize = 64;

/// A transversal double point of the projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// The two edges, smaller index first.
    pub edges: [usize; 2],
    /// Crossing position along each edge.
    pub params: [f64; 2],
    pub point: Vec2,
    /// Depth `<u, x>` of each preimage.
    pub depths: [f64; 2],
    /// The edge passing over (the larger depth).
    pub over: usize,
    pub over_arc: usize,
    /// Arc ending at this crossing and arc starting at it.
    pub under_arcs: [usize; 2],
}

impl Crossing {
    /// Position of the over and under preimages along the knot, as
    /// `edge + t`.
    pub fn positions(&self) -> (f64, f64) {
        let a = self.edges[0] as f64 + self.params[0];
        let b = self.edges[1] as f64 + self.params[1];
        if self.over == self.edges[0] {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// A maximal over-strand: the stretch of the knot between two consecutive
/// undercrossings, given by positions `edge + t` (wrapping when `end <
/// start`). Without crossings the single arc is the whole knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceColor {
    White,
    Black,
}

/// A face of the projected arrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    /// Boundary corners, counter-clockwise for bounded faces.
    pub polygon: Vec<Vec2>,
    pub signed_area: f64,
    pub bounded: bool,
    pub color: FaceColor,
    pub neighbors: Vec<usize>,
}

/// One piece of a projected edge between consecutive arrangement nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    /// Faces on the left and right of `from -> to`.
    pub faces: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotDiagram {
    pub direction: Direction,
    /// Projected vertices in the frame `(e1, e2)` of `u^perp`.
    pub points: Vec<Vec2>,
    pub depths: Vec<f64>,
    pub crossings: Vec<Crossing>,
    pub arcs: Vec<Arc>,
    pub faces: Vec<Face>,
    /// Arrangement nodes: projected vertices first, then crossings.
    pub nodes: Vec<Vec2>,
    pub segments: Vec<Segment>,
    pub unbounded_face: usize,
}

/// Projects along `u`, or along the first generic random direction from
/// `seed` when `u` is `None`.
pub fn build_diagram(knot: &PolygonalKnot, u: Option<&Direction>, seed: u64) -> Result<KnotDiagram> {
    if let Some(u) = u {
        let report = check_general_position(knot, PositionMode::GenericProjection, Some(u))?;
        if let Some(v) = report.violations.first() {
            let what = match v.len() {
                1 => format!("edge {} projects to a point", v[0]),
                2 if report_is_incidence(knot, u, v) => format!("vertex {} projects onto edge {}", v[0], v[1]),
                2 => format!("edges {} and {} cross non-transversally or at equal depth", v[0], v[1]),
                _ => format!("edges {v:?} meet in a triple point"),
            };
            return Err(KnotError::NonGenericDirection(what));
        }
        return assemble(knot, *u);
    }
    for attempt in 0..DIRECTION_RETRIES {
        let mut rng = stream(seed, attempt as u64);
        let u = Direction::from_unit(uniform_direction(&mut rng));
        if check_general_position(knot, PositionMode::GenericProjection, Some(&u))?.pass {
            return assemble(knot, u);
        }
    }
    Err(KnotError::NoGenericDirection(DIRECTION_RETRIES))
}

/// Projects along the z axis when that direction is generic, otherwise
/// searches from `seed`.
pub fn axis_or_generic_diagram(knot: &PolygonalKnot, seed: u64) -> Result<KnotDiagram> {
    let z = Direction::from_unit(crate::geom::Vec3::z());
    match build_diagram(knot, Some(&z), seed) {
        Err(KnotError::NonGenericDirection(_)) => build_diagram(knot, None, seed),
        other => other,
    }
}

fn report_is_incidence(knot: &PolygonalKnot, u: &Direction, v: &[usize]) -> bool {
    let (pts, _) = crate::geom::project(knot, u);
    let n = pts.len();
    let (vertex, edge) = (v[0], v[1]);
    vertex != edge
        && (edge + 1) % n != vertex
        && point_segment_2d(&pts[vertex], &pts[edge], &pts[(edge + 1) % n]) <= knot.eps()
}

fn assemble(knot: &PolygonalKnot, u: Direction) -> Result<KnotDiagram> {
    let n = knot.len();
    let (e1, e2) = orthonormal_frame(&u);
    let points: Vec<Vec2> = knot.vertices().iter().map(|p| Vec2::new(e1.dot(p), e2.dot(p))).collect();
    let depths: Vec<f64> = knot.vertices().iter().map(|p| u.dot(p)).collect();

    let mut crossings = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a0, a1) = (points[i], points[(i + 1) % n]);
            let (b0, b1) = (points[j], points[(j + 1) % n]);
            if let Some((s, t)) = segment_intersection_2d(&a0, &a1, &b0, &b1) {
                let di = depths[i] + (depths[(i + 1) % n] - depths[i]) * s;
                let dj = depths[j] + (depths[(j + 1) % n] - depths[j]) * t;
                crossings.push(Crossing {
                    edges: [i, j],
                    params: [s, t],
                    point: a0 + (a1 - a0) * s,
                    depths: [di, dj],
                    over: if di > dj { i } else { j },
                    over_arc: 0,
                    under_arcs: [0, 0],
                });
            }
        }
    }
    let arcs = assign_arcs(n, &mut crossings);
    let mut diagram = KnotDiagram {
        direction: u,
        points,
        depths,
        crossings,
        arcs,
        faces: Vec::new(),
        nodes: Vec::new(),
        segments: Vec::new(),
        unbounded_face: 0,
    };
    build_faces(&mut diagram)?;
    Ok(diagram)
}

/// Splits the knot at its undercrossings into arcs and records which arcs
/// meet at each crossing.
fn assign_arcs(n: usize, crossings: &mut [Crossing]) -> Vec<Arc> {
    let mut unders: Vec<(f64, usize)> = crossings.iter().enumerate().map(|(k, c)| (c.positions().1, k)).collect();
    unders.sort_by(|a, b| a.0.total_cmp(&b.0));
    let c = unders.len();
    if c == 0 {
        return vec![Arc { start: 0.0, end: n as f64 }];
    }
    let arcs: Vec<Arc> = (0..c).map(|k| Arc { start: unders[k].0, end: unders[(k + 1) % c].0 }).collect();
    // Arc k starts at the k-th undercrossing, so the arc containing position
    // p is the last one starting at or before p (cyclically).
    let arc_of = |p: f64| {
        let k = unders.partition_point(|&(s, _)| s <= p);
        (k + c - 1) % c
    };
    for (k, &(_, idx)) in unders.iter().enumerate() {
        crossings[idx].under_arcs = [(k + c - 1) % c, k];
    }
    for cr in crossings.iter_mut() {
        cr.over_arc = arc_of(cr.positions().0);
    }
    arcs
}

fn build_faces(d: &mut KnotDiagram) -> Result<()> {
    let n = d.points.len();
    let mut nodes = d.points.clone();
    nodes.extend(d.crossings.iter().map(|c| c.point));

    // Crossing nodes on each edge, ordered along it.
    let mut along: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for (k, c) in d.crossings.iter().enumerate() {
        along[c.edges[0]].push((c.params[0], n + k));
        along[c.edges[1]].push((c.params[1], n + k));
    }
    let mut segs: Vec<(usize, usize, usize)> = Vec::new();
    for (e, list) in along.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prev = e;
        for &(_, node) in list.iter() {
            segs.push((e, prev, node));
            prev = node;
        }
        segs.push((e, prev, (e + 1) % n));
    }

    // Half-edge 2k runs along segment k, 2k + 1 against it.
    let hcount = 2 * segs.len();
    let ends = |h: usize| {
        let (_, a, b) = segs[h / 2];
        if h % 2 == 0 {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for h in 0..hcount {
        outgoing[ends(h).0].push(h);
    }
    let mut rank = vec![0; hcount];
    for list in outgoing.iter_mut() {
        list.sort_by(|&a, &b| {
            let da = nodes[ends(a).1] - nodes[ends(a).0];
            let db = nodes[ends(b).1] - nodes[ends(b).0];
            da.y.atan2(da.x).total_cmp(&db.y.atan2(db.x))
        });
        for (r, &h) in list.iter().enumerate() {
            rank[h] = r;
        }
    }
    // The face to the left of h continues with the first outgoing half-edge
    // clockwise from h's twin.
    let next = |h: usize| {
        let b = ends(h).1;
        let list = &outgoing[b];
        list[(rank[h ^ 1] + list.len() - 1) % list.len()]
    };

    let mut face_of = vec![usize::MAX; hcount];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..hcount {
        if face_of[start] != usize::MAX {
            continue;
        }
        let f = cycles.len();
        let mut cycle = Vec::new();
        let mut h = start;
        while face_of[h] == usize::MAX {
            face_of[h] = f;
            cycle.push(h);
            h = next(h);
        }
        if h != start {
            return Err(KnotError::ColoringFailed("face boundary does not close".into()));
        }
        cycles.push(cycle);
    }

    let c = d.crossings.len();
    if cycles.len() != c + 2 {
        return Err(KnotError::ColoringFailed(format!("{} faces for {} crossings", cycles.len(), c)));
    }
    let polygons: Vec<Vec<Vec2>> = cycles.iter().map(|cy| cy.iter().map(|&h| nodes[ends(h).0]).collect()).collect();
    let areas: Vec<f64> = polygons.iter().map(|p| signed_area(p)).collect();
    let unbounded = (0..areas.len()).min_by(|&a, &b| areas[a].total_cmp(&areas[b])).unwrap();
    if let Some(f) = (0..areas.len()).find(|&f| f != unbounded && areas[f] <= 0.0) {
        return Err(KnotError::ColoringFailed(format!("bounded face {f} has non-positive area")));
    }

    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); cycles.len()];
    let mut segments = Vec::with_capacity(segs.len());
    for (k, &(edge, from, to)) in segs.iter().enumerate() {
        let (l, r) = (face_of[2 * k], face_of[2 * k + 1]);
        if l == r {
            return Err(KnotError::ColoringFailed(format!("segment {k} has the same face on both sides")));
        }
        neighbors[l].push(r);
        neighbors[r].push(l);
        segments.push(Segment { edge, from, to, faces: [l, r] });
    }
    for list in neighbors.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let mut colors: Vec<Option<FaceColor>> = vec![None; cycles.len()];
    colors[unbounded] = Some(FaceColor::White);
    let mut queue = std::collections::VecDeque::from([unbounded]);
    while let Some(f) = queue.pop_front() {
        let other = match colors[f] {
            Some(FaceColor::White) => FaceColor::Black,
            _ => FaceColor::White,
        };
        for &g in &neighbors[f] {
            match colors[g] {
                None => {
                    colors[g] = Some(other);
                    queue.push_back(g);
                }
                Some(col) if col != other => {
                    return Err(KnotError::ColoringFailed(format!("faces {f} and {g} share a color")));
                }
                _ => {}
            }
        }
    }

    d.faces = (0..cycles.len())
        .map(|f| {
            Ok(Face {
                polygon: polygons[f].clone(),
                signed_area: areas[f],
                bounded: f != unbounded,
                color: colors[f].ok_or_else(|| KnotError::ColoringFailed(format!("face {f} unreachable")))?,
                neighbors: neighbors[f].clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    d.nodes = nodes;
    d.segments = segments;
    d.unbounded_face = unbounded;
    Ok(())
}

fn signed_area(poly: &[Vec2]) -> f64 {
    let m = poly.len();
    0.5 * (0..m).map(|i| cross2(&poly[i], &poly[(i + 1) % m])).sum::<f64>()
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: &Vec2, poly: &[Vec2]) -> bool {
    let m = poly.len();
    let mut inside = false;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn boundary_distance(p: &Vec2, poly: &[Vec2]) -> f64 {
    let m = poly.len();
    (0..m).map(|i| point_segment_2d(p, &poly[i], &poly[(i + 1) % m])).fold(f64::INFINITY, f64::min)
}

/// A point inside a bounded face, away from its boundary.
///
/// Candidates are the centroids of the ear triangles at convex corners and
/// points along each convex corner's bisector; the candidate inside the face
/// with the largest distance to the boundary wins.
pub fn face_interior_point(poly: &[Vec2]) -> Option<Vec2> {
    let m = poly.len();
    let mut best: Option<(f64, Vec2)> = None;
    let mut consider = |p: Vec2| {
        if point_in_polygon(&p, poly) {
            let d = boundary_distance(&p, poly);
            if d > 0.0 && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, p));
            }
        }
    };
    for i in 0..m {
        let a = poly[(i + m - 1) % m];
        let b = poly[i];
        let c = poly[(i + 1) % m];
        if cross2(&(b - a), &(c - b)) <= 0.0 {
            continue;
        }
        consider((a + b + c) / 3.0);
        let bis = ((a - b).normalize() + (c - b).normalize()).normalize();
        let reach = (a - b).norm().min((c - b).norm());
        for f in [0.5, 0.25, 0.1, 0.01] {
            consider(b + bis * reach * f);
        }
    }
    best.map(|(_, p)| p)
}

/// Chessboard coloring with the representative points of bounded white faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceColoring {
    pub colors: Vec<FaceColor>,
    pub white_faces: Vec<usize>,
    pub white_points: Vec<Vec2>,
    /// No bounded white face exists.
    pub trivial_candidate: bool,
}

/// Re-checks the coloring across every segment and picks a point inside
/// each bounded white face.
pub fn color_faces(d: &KnotDiagram) -> Result<FaceColoring> {
    if d.faces[d.unbounded_face].color != FaceColor::White {
        return Err(KnotError::ColoringFailed("unbounded face is not white".into()));
    }
    for (k, s) in d.segments.iter().enumerate() {
        if d.faces[s.faces[0]].color == d.faces[s.faces[1]].color {
            return Err(KnotError::ColoringFailed(format!("faces across segment {k} share a color")));
        }
    }
    let mut white_faces = Vec::new();
    let mut white_points = Vec::new();
    for (f, face) in d.faces.iter().enumerate() {
        if face.bounded && face.color == FaceColor::White {
            let p = face_interior_point(&face.polygon)
                .ok_or_else(|| KnotError::ColoringFailed(format!("no interior point found for face {f}")))?;
            white_faces.push(f);
            white_points.push(p);
        }
    }
    Ok(FaceColoring {
        colors: d.faces.iter().map(|f| f.color).collect(),
        trivial_candidate: white_faces.is_empty(),
        white_faces,
        white_points,
    })
}

impl KnotDiagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Total curvature of the projected closed polyline.
    pub fn planar_total_curvature(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i] - self.points[(i + n - 1) % n];
                let b = self.points[(i + 1) % n] - self.points[i];
                angle_between_2d(&a, &b)
            })
            .sum()
    }

    /// Angular length of the projected curve seen from the planar point `o`.
    pub fn planar_angular_length(&self, o: &Vec2) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| angle_between_2d(&(self.points[i] - o), &(self.points[(i + 1) % n] - o))).sum()
    }

    /// Lifts a planar point to 3-space at depth `depth` along the direction.
    pub fn lift(&self, p: &Vec2, depth: f64) -> crate::geom::Vec3 {
        let (e1, e2) = orthonormal_frame(&self.direction);
        e1 * p.x + e2 * p.y + *self.direction * depth
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{generate, KnotKind, Vec3};
    use std::f64::consts::TAU;

    fn square() -> PolygonalKnot {
        generate(KnotKind::ConvexNgon { n: 4, radius: 1.0 }, 0).unwrap()
    }

    fn trefoil_diagram() -> KnotDiagram {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        build_diagram(&k, Some(&Direction::new(Vec3::z()).unwrap()), 0).unwrap()
    }

    #[test]
    fn square_from_above() {
        let d = build_diagram(&square(), Some(&Direction::new(Vec3::z()).unwrap()), 0).unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.faces.len(), 2);
        assert_eq!(d.arcs.len(), 1);
        let col = color_faces(&d).unwrap();
        assert!(col.trivial_candidate);
        assert!(col.white_points.is_empty());
        let bounded = d.faces.iter().find(|f| f.bounded).unwrap();
        assert_eq!(bounded.color, FaceColor::Black);
    }

    #[test]
    fn trefoil_from_above() {
        let d = trefoil_diagram();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.faces.len(), 5);
        assert_eq!(d.arcs.len(), 3);
        let col = color_faces(&d).unwrap();
        assert_eq!(col.white_points.len(), 1);
        let o = col.white_points[0];
        assert!(d.planar_angular_length(&o) >= 2.0 * TAU - 1e-9);
        assert!(d.planar_angular_length(&o) <= d.planar_total_curvature() + 1e-9);
    }

    #[test]
    fn over_strand_is_higher() {
        let d = trefoil_diagram();
        for c in &d.crossings {
            let (hi, lo) = if c.over == c.edges[0] { (c.depths[0], c.depths[1]) } else { (c.depths[1], c.depths[0]) };
            assert!(hi > lo);
        }
    }

    #[test]
    fn edge_parallel_direction_is_rejected() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        let (a, b) = k.edge(0);
        let u = Direction::new(b - a).unwrap();
        assert!(matches!(build_diagram(&k, Some(&u), 0), Err(KnotError::NonGenericDirection(_))));
    }

    #[test]
    fn random_direction_search_is_deterministic() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        let a = build_diagram(&k, None, 4).unwrap();
        let b = build_diagram(&k, None, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.faces.len(), a.crossing_count() + 2);
    }

    #[test]
    fn interior_point_of_concave_face() {
        let l_shape = [
            Vec2::new(0., 0.),
            Vec2::new(2., 0.),
            Vec2::new(2., 0.2),
            Vec2::new(0.2, 0.2),
            Vec2::new(0.2, 2.),
            Vec2::new(0., 2.),
        ];
        let p = face_interior_point(&l_shape).unwrap();
        assert!(point_in_polygon(&p, &l_shape));
    }

    #[test]
    fn axis_preferred_then_random() {
        let t = generate(KnotKind::TREFOIL, 0).unwrap();
        assert_eq!(axis_or_generic_diagram(&t, 0).unwrap().crossing_count(), 3);
        // Viewed edge-on along z a vertical square is not generic.
        let v = PolygonalKnot::new(vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        ])
        .unwrap();
        let d = axis_or_generic_diagram(&v, 0).unwrap();
        assert!(d.direction.z.abs() < 1.0);
        assert_eq!(d.crossing_count(), 0);
    }
}
