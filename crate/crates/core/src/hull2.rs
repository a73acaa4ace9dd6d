//! Plane crossing numbers, second-hull membership and witness search, and
//! the spherical Crofton formula.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crofton::{mean_stderr, SAMPLE_RETRIES};
use crate::curvature::SphericalPolyline;
use crate::error::{KnotError, Result};
use crate::geom::{bbox, Direction, Plane, PolygonalKnot, Vec3};
use crate::rng::{stream, uniform_direction};

/// Offset shift, in units of `eps_geom`, used to move a plane off vertices.
pub const OFFSET_SHIFT: f64 = 10.0;
/// Relative tilt applied to critical candidate planes.
const CANDIDATE_TILT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingQuery {
    pub plane: Plane,
    pub count: usize,
    /// Some vertex was within `eps_geom` of the plane and the count is the
    /// larger of the two counts with the offset shifted to either side.
    pub perturbed: bool,
}

fn sign_changes(knot: &PolygonalKnot, normal: &Vec3, offset: f64) -> usize {
    let n = knot.len();
    let side: Vec<bool> = knot.vertices().iter().map(|p| normal.dot(p) > offset).collect();
    (0..n).filter(|&i| side[i] != side[(i + 1) % n]).count()
}

pub fn plane_crossing_number(knot: &PolygonalKnot, plane: &Plane) -> CrossingQuery {
    let eps = knot.eps();
    let touching = knot.vertices().iter().any(|p| plane.signed_distance(p).abs() <= eps);
    if !touching {
        let count = sign_changes(knot, &plane.normal, plane.offset);
        return CrossingQuery { plane: *plane, count, perturbed: false };
    }
    let shift = OFFSET_SHIFT * eps;
    let up = sign_changes(knot, &plane.normal, plane.offset + shift);
    let down = sign_changes(knot, &plane.normal, plane.offset - shift);
    CrossingQuery { plane: *plane, count: up.max(down), perturbed: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullVerdict {
    /// Every tested plane through the point met the knot often enough.
    /// Evidence, not proof.
    InsideSampled,
    /// A plane through the point meets the knot too rarely.
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullWitness {
    pub point: Vec3,
    pub verdict: HullVerdict,
    /// Crossing threshold: 4 for the second hull, 2 for the convex hull.
    pub threshold: usize,
    pub witness_plane: Option<Plane>,
    pub witness_count: Option<usize>,
    pub planes_tested: usize,
    pub min_count: usize,
    pub seed: u64,
}

/// Planes through `x` and two vertices, tilted so that the two vertices
/// fall on each of the four combinations of sides.
fn candidate_normals(knot: &PolygonalKnot, x: &Vec3) -> Vec<Vec3> {
    let verts = knot.vertices();
    let n = verts.len();
    let mut out = Vec::new();
    for i in 0..n {
        let ri = verts[i] - x;
        for j in i + 1..n {
            let rj = verts[j] - x;
            let normal = ri.cross(&rj);
            let nn = normal.norm();
            if nn <= 1e-12 * ri.norm() * rj.norm() {
                continue;
            }
            let normal = normal / nn;
            // w in span(ri, rj) with <w, ri> = si |ri| and <w, rj> = sj |rj|.
            let (g11, g12, g22) = (ri.dot(&ri), ri.dot(&rj), rj.dot(&rj));
            let det = g11 * g22 - g12 * g12;
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let bi = si * ri.norm();
                let bj = sj * rj.norm();
                let ci = (bi * g22 - bj * g12) / det;
                let cj = (bj * g11 - bi * g12) / det;
                let w = ri * ci + rj * cj;
                out.push((normal + w * CANDIDATE_TILT).normalize());
            }
        }
    }
    out
}

/// Tests planes through `x` for fewer than `threshold` crossings.
///
/// All critical candidate planes are evaluated first; if none falls below
/// the threshold, `budget` random planes through `x` follow. An outside
/// verdict reports the first plane attaining the smallest count.
pub fn hull_membership(knot: &PolygonalKnot, x: &Vec3, threshold: usize, budget: usize, seed: u64) -> HullWitness {
    let count_for = |normal: &Vec3| {
        let plane = Plane::through(Direction::from_unit(*normal), x);
        plane_crossing_number(knot, &plane)
    };
    let mut queries: Vec<CrossingQuery> = candidate_normals(knot, x).par_iter().map(count_for).collect();
    if queries.iter().all(|q| q.count >= threshold) {
        let random: Vec<CrossingQuery> = (0..budget)
            .into_par_iter()
            .map(|k| count_for(&uniform_direction(&mut stream(seed, k as u64))))
            .collect();
        queries.extend(random);
    }
    let tested = queries.len();
    let min_count = queries.iter().map(|q| q.count).min().unwrap_or(usize::MAX);
    let best = queries.iter().find(|q| q.count == min_count && q.count < threshold);
    match best {
        Some(q) => HullWitness {
            point: *x,
            verdict: HullVerdict::Outside,
            threshold,
            witness_plane: Some(q.plane),
            witness_count: Some(q.count),
            planes_tested: tested,
            min_count,
            seed,
        },
        None => HullWitness {
            point: *x,
            verdict: HullVerdict::InsideSampled,
            threshold,
            witness_plane: None,
            witness_count: None,
            planes_tested: tested,
            min_count,
            seed,
        },
    }
}

pub fn in_second_hull(knot: &PolygonalKnot, x: &Vec3, budget: usize, seed: u64) -> HullWitness {
    hull_membership(knot, x, 4, budget, seed)
}

/// Grid points over the bounding box (cell centers), nearest to the box
/// center first.
pub fn grid_points(knot: &PolygonalKnot, resolution: usize) -> Vec<Vec3> {
    let (lo, hi) = bbox(knot.vertices());
    let center = (lo + hi) * 0.5;
    let r = resolution as f64;
    let mut pts: Vec<(f64, usize, Vec3)> = Vec::with_capacity(resolution.pow(3));
    for a in 0..resolution {
        for b in 0..resolution {
            for c in 0..resolution {
                let f = Vec3::new((a as f64 + 0.5) / r, (b as f64 + 0.5) / r, (c as f64 + 0.5) / r);
                let p = lo + (hi - lo).component_mul(&f);
                pts.push(((p - center).norm(), pts.len(), p));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    pts.into_iter().map(|(_, _, p)| p).collect()
}

/// First grid point, scanning from the center outwards, that no tested
/// plane certifies to lie outside the second hull.
pub fn second_hull_witness(
    knot: &PolygonalKnot,
    resolution: usize,
    budget: usize,
    seed: u64,
) -> Result<Option<(Vec3, HullWitness)>> {
    if resolution < 2 {
        return Err(KnotError::InvalidParameter(format!("grid resolution {resolution} below 2")));
    }
    let eps = knot.eps();
    for x in grid_points(knot, resolution) {
        if knot.distance_to(&x).0 <= eps {
            continue;
        }
        let w = in_second_hull(knot, &x, budget, seed);
        if w.verdict == HullVerdict::InsideSampled {
            return Ok(Some((x, w)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCrofton {
    pub length: f64,
    /// `pi` times the mean number of equator crossings.
    pub crofton: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    pub redraws: usize,
}

/// Compares the spherical length of `curve` with `pi` times the average
/// number of its crossings with random great circles.
pub fn spherical_crofton_check(curve: &SphericalPolyline, samples: usize, seed: u64) -> Result<SphericalCrofton> {
    if samples < 100 {
        return Err(KnotError::InvalidParameter(format!("need at least 100 samples, got {samples}")));
    }
    let verts = curve.vertices();
    let arcs = curve.edge_count();
    let results: Vec<Result<(f64, usize)>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            for redraws in 0..SAMPLE_RETRIES {
                let u = uniform_direction(&mut rng);
                let h: Vec<f64> = verts.iter().map(|v| u.dot(v)).collect();
                if h.iter().any(|x| x.abs() <= 1e-12) {
                    continue;
                }
                let count = (0..arcs).filter(|&i| (h[i] > 0.0) != (h[(i + 1) % verts.len()] > 0.0)).count();
                return Ok((std::f64::consts::PI * count as f64, redraws));
            }
            Err(KnotError::RetryBudgetExhausted(SAMPLE_RETRIES))
        })
        .collect();
    let mut values = Vec::with_capacity(samples);
    let mut redraws = 0;
    for r in results {
        let (v, d) = r?;
        values.push(v);
        redraws += d;
    }
    let (crofton, stderr) = mean_stderr(&values);
    Ok(SphericalCrofton { length: curve.length(), crofton, stderr, samples, seed, redraws })
}
