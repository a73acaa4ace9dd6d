//! Triangular isotopies and the procedures built from them.
//!
//! A move either replaces an edge `[p, q]` by `[p, x], [x, q]` (add) or does
//! the inverse (remove). It is legal only when the solid triangle `pqx`
//! meets the knot in nothing but the edges it replaces. Contacts inside the
//! `eps_geom` guard band count as blocking.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::crofton::local_maxima_count;
use crate::error::{KnotError, Result};
use crate::geom::predicates::{angle_between, point_segment, segment_triangle};
use crate::geom::{check_general_position, Direction, PolygonalKnot, PositionMode, Vec3};
use crate::rng::{stream, uniform_in_ball};

/// Angular slack when deciding whether an edge leaves a triangle corner
/// through the triangle's own wedge.
const WEDGE_GUARD: f64 = 1e-9;
const SCRAMBLE_RETRIES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Add,
    Remove,
}

/// One triangular isotopy with its evidence triangle.
///
/// For `Add`, `index` is the position of the new vertex in the resulting
/// knot, so the split edge runs between input vertices `index - 1` and
/// `index` (cyclically). For `Remove`, `index` is the removed vertex.
/// `evidence` is `[p, q, x]` for adds and `[p, x, q]` for removes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotopyMove {
    pub kind: MoveKind,
    pub index: usize,
    pub point: Vec3,
    pub evidence: [Vec3; 3],
}

impl IsotopyMove {
    /// Insert `apex` as vertex `index` of the result.
    pub fn add(knot: &PolygonalKnot, index: usize, apex: Vec3) -> Result<Self> {
        let n = knot.len();
        if index > n {
            return Err(KnotError::InvalidMove(format!("insert position {index} beyond {n}")));
        }
        let p = knot.vertex(index as isize - 1);
        let q = knot.vertex(index as isize);
        Ok(Self { kind: MoveKind::Add, index, point: apex, evidence: [p, q, apex] })
    }

    /// Remove vertex `index`.
    pub fn remove(knot: &PolygonalKnot, index: usize) -> Result<Self> {
        let n = knot.len();
        if index >= n {
            return Err(KnotError::InvalidMove(format!("vertex {index} out of range")));
        }
        let x = knot.vertices()[index];
        let p = knot.vertex(index as isize - 1);
        let q = knot.vertex(index as isize + 1);
        Ok(Self { kind: MoveKind::Remove, index, point: x, evidence: [p, x, q] })
    }

    /// The move that undoes this one.
    pub fn inverse(&self) -> Self {
        let [a, b, c] = self.evidence;
        match self.kind {
            MoveKind::Add => Self { kind: MoveKind::Remove, index: self.index, point: self.point, evidence: [a, c, b] },
            MoveKind::Remove => Self { kind: MoveKind::Add, index: self.index, point: self.point, evidence: [a, c, b] },
        }
    }
}

/// Height of the lowest corner over the opposite side.
fn triangle_min_height(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let twice_area = (b - a).cross(&(c - a)).norm();
    let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
    twice_area / longest
}

/// Whether the segment leaving triangle corner `corner` towards `far`
/// enters the solid triangle `corner, s1, s2` beyond the corner itself.
fn leaves_through_wedge(corner: &Vec3, s1: &Vec3, s2: &Vec3, far: &Vec3, eps: f64) -> bool {
    let normal = (s1 - corner).cross(&(s2 - corner)).normalize();
    let d = far - corner;
    if d.dot(&normal).abs() > eps {
        return false;
    }
    let in_plane = d - normal * d.dot(&normal);
    let a = s1 - corner;
    let b = s2 - corner;
    angle_between(&a, &in_plane) + angle_between(&in_plane, &b) <= angle_between(&a, &b) + WEDGE_GUARD
}

/// Checks the solid triangle `tri` against every edge of `knot` except the
/// `allowed` ones. `touching` lists edges that share exactly one triangle
/// corner: `(edge, corner index in tri, other endpoint)`.
fn first_blocker(
    knot: &PolygonalKnot,
    tri: &[Vec3; 3],
    allowed: &[usize],
    touching: &[(usize, usize, Vec3)],
) -> Option<usize> {
    let eps = knot.eps();
    let n = knot.len();
    for e in 0..n {
        if allowed.contains(&e) {
            continue;
        }
        if let Some(&(_, corner, far)) = touching.iter().find(|t| t.0 == e) {
            let c = tri[corner];
            let s1 = tri[(corner + 1) % 3];
            let s2 = tri[(corner + 2) % 3];
            if leaves_through_wedge(&c, &s1, &s2, &far, eps) {
                return Some(e);
            }
            continue;
        }
        let (a, b) = knot.edge(e);
        if segment_triangle(&a, &b, &tri[0], &tri[1], &tri[2]) <= eps {
            return Some(e);
        }
    }
    None
}

/// Strictly interior point of `[p, q]` within the guard band.
fn on_open_segment(x: &Vec3, p: &Vec3, q: &Vec3, eps: f64) -> bool {
    let (d, _) = point_segment(x, p, q);
    d <= eps && (x - p).norm() > eps && (x - q).norm() > eps
}

/// Validates `mv` against `knot` and returns the knot after the move.
pub fn apply_move(knot: &PolygonalKnot, mv: &IsotopyMove) -> Result<PolygonalKnot> {
    let n = knot.len();
    let eps = knot.eps();
    let mut verts = knot.vertices().to_vec();
    match mv.kind {
        MoveKind::Add => {
            let expected = IsotopyMove::add(knot, mv.index, mv.point)?;
            if expected.evidence != mv.evidence {
                return Err(KnotError::InvalidMove("evidence does not match the split edge".into()));
            }
            let [p, q, x] = mv.evidence;
            let split = (mv.index + n - 1) % n;
            if triangle_min_height(&p, &q, &x) <= eps {
                if !on_open_segment(&x, &p, &q, eps) {
                    return Err(KnotError::DegenerateTriangle);
                }
            } else {
                let touching = [(split.wrapping_add(n - 1) % n, 0, knot.vertex(split as isize - 1)), ((split + 1) % n, 1, knot.vertex(split as isize + 2))];
                if let Some(e) = first_blocker(knot, &[p, q, x], &[split], &touching) {
                    return Err(KnotError::BlockedTriangle(e));
                }
            }
            verts.insert(mv.index, x);
        }
        MoveKind::Remove => {
            if n <= 3 {
                return Err(KnotError::InvalidMove("cannot remove a vertex of a triangle".into()));
            }
            let expected = IsotopyMove::remove(knot, mv.index)?;
            if expected.evidence != mv.evidence {
                return Err(KnotError::InvalidMove("evidence does not match the knot".into()));
            }
            let [p, x, q] = mv.evidence;
            let k = mv.index;
            if triangle_min_height(&p, &x, &q) <= eps {
                if !on_open_segment(&x, &p, &q, eps) {
                    return Err(KnotError::DegenerateTriangle);
                }
            } else {
                let before = (k + n - 2) % n;
                let after = (k + 1) % n;
                let touching = [(before, 0, knot.vertex(k as isize - 2)), (after, 2, knot.vertex(k as isize + 2))];
                if let Some(e) = first_blocker(knot, &[p, x, q], &[(k + n - 1) % n, k], &touching) {
                    return Err(KnotError::BlockedTriangle(e));
                }
            }
            verts.remove(k);
        }
    }
    PolygonalKnot::with_rel_eps(verts, knot.rel_eps())
        .map_err(|e| KnotError::InvalidMove(format!("result is not a valid knot: {e}")))
}

/// A replayable chain of moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveSequence {
    pub initial: PolygonalKnot,
    pub moves: Vec<IsotopyMove>,
    #[serde(rename = "final")]
    pub final_knot: PolygonalKnot,
}

impl MoveSequence {
    pub fn empty(knot: &PolygonalKnot) -> Self {
        Self { initial: knot.clone(), moves: Vec::new(), final_knot: knot.clone() }
    }

    /// Replays every move from the initial knot, re-checking legality, and
    /// confirms the final knot is reproduced.
    pub fn replay(&self) -> Result<PolygonalKnot> {
        let mut cur = self.initial.clone();
        for mv in &self.moves {
            cur = apply_move(&cur, mv)?;
        }
        if cur.vertices() != self.final_knot.vertices() {
            return Err(KnotError::InvalidMove("replay does not reproduce the final knot".into()));
        }
        Ok(cur)
    }

    /// The sequence run backwards, from the final knot to the initial one.
    pub fn inverse(&self) -> Self {
        Self {
            initial: self.final_knot.clone(),
            moves: self.moves.iter().rev().map(IsotopyMove::inverse).collect(),
            final_knot: self.initial.clone(),
        }
    }

    pub fn reaches_triangle(&self) -> bool {
        self.final_knot.len() == 3
    }
}

/// Reduces a knot with a single local maximum along `u` to a triangle by
/// repeatedly removing the middle one of the three highest vertices.
pub fn unknot_by_height(knot: &PolygonalKnot, u: &Direction) -> Result<MoveSequence> {
    let report = check_general_position(knot, PositionMode::DistinctHeights, Some(u))?;
    if let Some(pair) = report.violations.first() {
        return Err(KnotError::TiedHeights(pair[0], pair[1]));
    }
    let maxima = local_maxima_count(knot, u)?;
    if maxima != 1 {
        return Err(KnotError::MultipleLocalMaxima(maxima));
    }
    let mut cur = knot.clone();
    let mut moves = Vec::with_capacity(knot.len().saturating_sub(3));
    while cur.len() > 3 {
        let n = cur.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| u.dot(&cur.vertices()[b]).total_cmp(&u.dot(&cur.vertices()[a])));
        let top = &order[..3];
        let middle = *top
            .iter()
            .find(|&&i| top.contains(&((i + 1) % n)) && top.contains(&((i + n - 1) % n)))
            .ok_or_else(|| KnotError::InvalidMove("three highest vertices are not consecutive".into()))?;
        let mv = IsotopyMove::remove(&cur, middle)?;
        cur = apply_move(&cur, &mv)?;
        moves.push(mv);
    }
    Ok(MoveSequence { initial: knot.clone(), moves, final_knot: cur })
}

/// Removes empty-triangle vertices, scanning cyclically from the position of
/// the previous removal, until a triangle is reached, nothing is removable,
/// or `budget` moves were made.
pub fn greedy_simplify(knot: &PolygonalKnot, budget: usize) -> (PolygonalKnot, MoveSequence) {
    let mut cur = knot.clone();
    let mut moves = Vec::new();
    let mut start = 0;
    'outer: while moves.len() < budget && cur.len() > 3 {
        let n = cur.len();
        for off in 0..n {
            let i = (start + off) % n;
            let mv = IsotopyMove::remove(&cur, i).expect("index in range");
            if let Ok(next) = apply_move(&cur, &mv) {
                cur = next;
                moves.push(mv);
                start = i % cur.len();
                continue 'outer;
            }
        }
        break;
    }
    let seq = MoveSequence { initial: knot.clone(), moves, final_knot: cur.clone() };
    (cur, seq)
}

/// Applies `steps` random legal moves.
///
/// Adds put an apex inside the ball of radius equal to the edge length
/// around the edge midpoint. Removes only ever take out vertices that an
/// earlier add of this scramble introduced, so the first step is always an
/// add and the original vertices survive.
pub fn scramble(knot: &PolygonalKnot, steps: usize, seed: u64) -> Result<(PolygonalKnot, MoveSequence)> {
    let mut rng = stream(seed, 0);
    let mut cur = knot.clone();
    let mut added = vec![false; cur.len()];
    let mut moves = Vec::with_capacity(steps);
    for step in 0..steps {
        let mut done = false;
        for _ in 0..SCRAMBLE_RETRIES {
            let removable: Vec<usize> = (0..cur.len()).filter(|&i| added[i]).collect();
            let mv = if !removable.is_empty() && cur.len() > 3 && rng.random_bool(0.5) {
                let i = removable[rng.random_range(0..removable.len())];
                IsotopyMove::remove(&cur, i)?
            } else {
                let e = rng.random_range(0..cur.len());
                let (a, b) = cur.edge(e);
                let apex = (a + b) * 0.5 + uniform_in_ball(&mut rng) * (b - a).norm();
                IsotopyMove::add(&cur, e + 1, apex)?
            };
            if let Ok(next) = apply_move(&cur, &mv) {
                match mv.kind {
                    MoveKind::Add => added.insert(mv.index, true),
                    MoveKind::Remove => {
                        added.remove(mv.index);
                    }
                }
                cur = next;
                moves.push(mv);
                done = true;
                break;
            }
        }
        if !done {
            return Err(KnotError::GenerationFailed(format!("no legal random move at step {step}")));
        }
    }
    let seq = MoveSequence { initial: knot.clone(), moves, final_knot: cur.clone() };
    Ok((cur, seq))
}
