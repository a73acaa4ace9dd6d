//! Height functions, slice areas, Monte Carlo projection averages and the
//! single-maximum triviality certificate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KnotError, Result};
use crate::geom::predicates::angle_between_2d;
use crate::geom::{orthonormal_frame, Direction, PolygonalKnot, Vec2, Vec3};
use crate::isotopy::{unknot_by_height, MoveSequence};
use crate::rng::{fibonacci_sphere, stream, uniform_direction};

/// Redraws allowed per Monte Carlo sample before giving up.
pub const SAMPLE_RETRIES: usize = 64;

pub fn heights(knot: &PolygonalKnot, u: &Direction) -> Vec<f64> {
    knot.vertices().iter().map(|p| u.dot(p)).collect()
}

/// First pair of vertices whose heights agree within `eps`.
fn tied_pair(h: &[f64], eps: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| h[a].total_cmp(&h[b]));
    order.windows(2).find(|w| h[w[1]] - h[w[0]] <= eps).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

fn count_extrema(h: &[f64]) -> (usize, usize) {
    let n = h.len();
    let mut maxima = 0;
    let mut minima = 0;
    for i in 0..n {
        let prev = h[(i + n - 1) % n];
        let next = h[(i + 1) % n];
        if h[i] > prev && h[i] > next {
            maxima += 1;
        } else if h[i] < prev && h[i] < next {
            minima += 1;
        }
    }
    (maxima, minima)
}

/// Number of strict local maxima of `p -> <u, p>` over the vertices.
pub fn local_maxima_count(knot: &PolygonalKnot, u: &Direction) -> Result<usize> {
    let h = heights(knot, u);
    if let Some((i, j)) = tied_pair(&h, knot.eps()) {
        return Err(KnotError::TiedHeights(i, j));
    }
    Ok(count_extrema(&h).0)
}

/// The lune of directions `u` for which vertex `index` is a local maximum
/// of the height: `<u, v_prev> >= 0 >= <u, v_next>`, where `v_prev` and
/// `v_next` are the unit directions of the incoming and outgoing edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceRegion {
    pub index: usize,
    pub v_prev: Direction,
    pub v_next: Direction,
    pub angle: f64,
    pub area: f64,
}

impl SliceRegion {
    pub fn contains(&self, u: &Vec3) -> bool {
        u.dot(&self.v_prev) >= 0.0 && u.dot(&self.v_next) <= 0.0
    }
}

pub fn slice_area(knot: &PolygonalKnot, index: usize) -> Result<SliceRegion> {
    let n = knot.len();
    if index >= n {
        return Err(KnotError::InvalidParameter(format!("vertex {index} out of range")));
    }
    let p = knot.vertex(index as isize - 1);
    let x = knot.vertices()[index];
    let q = knot.vertex(index as isize + 1);
    let v_prev = Direction::new(x - p).map_err(|_| KnotError::DegenerateEdge((index + n - 1) % n))?;
    let v_next = Direction::new(q - x).map_err(|_| KnotError::DegenerateEdge(index))?;
    let angle = crate::geom::predicates::angle_between(&v_prev, &v_next);
    Ok(SliceRegion { index, v_prev, v_next, angle, area: 2.0 * angle })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CroftonMode {
    /// Total curvature of the projection onto the plane `u^perp`.
    PlaneProjection,
    /// `pi` times the number of strict height extrema along `u`.
    LineProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate {
    pub mode: CroftonMode,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub redraws: usize,
}

/// Mean and standard error of the mean.
pub(crate) fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    // Shifting by the first value keeps constant samples exact.
    let shift = values[0];
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn planar_total_curvature(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let a = pts[i] - pts[(i + n - 1) % n];
            let b = pts[(i + 1) % n] - pts[i];
            angle_between_2d(&a, &b)
        })
        .sum()
}

/// Projection-side value for one direction, or `None` when `u` is degenerate.
fn sample_value(knot: &PolygonalKnot, mode: CroftonMode, u: &Vec3, eps: f64) -> Option<f64> {
    match mode {
        CroftonMode::PlaneProjection => {
            let (e1, e2) = orthonormal_frame(u);
            let pts: Vec<Vec2> = knot.vertices().iter().map(|p| Vec2::new(e1.dot(p), e2.dot(p))).collect();
            let n = pts.len();
            if (0..n).any(|i| (pts[(i + 1) % n] - pts[i]).norm() <= eps) {
                return None;
            }
            Some(planar_total_curvature(&pts))
        }
        CroftonMode::LineProjection => {
            let h: Vec<f64> = knot.vertices().iter().map(|p| u.dot(p)).collect();
            if tied_pair(&h, eps).is_some() {
                return None;
            }
            let (max, min) = count_extrema(&h);
            Some(std::f64::consts::PI * (max + min) as f64)
        }
    }
}

/// Runs `f` on `samples` uniform directions, one stream per sample index,
/// redrawing within that stream while `f` reports a degenerate direction.
fn monte_carlo<F>(samples: usize, seed: u64, f: F) -> Result<(Vec<f64>, usize)>
where
    F: Fn(&Vec3) -> Option<f64> + Sync,
{
    let results: Vec<Result<(f64, usize)>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            for redraws in 0..SAMPLE_RETRIES {
                let u = uniform_direction(&mut rng);
                if let Some(v) = f(&u) {
                    return Ok((v, redraws));
                }
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
    Ok((values, redraws))
}

/// Monte Carlo average of the projected total curvature over uniform
/// directions. Its expectation is the total curvature of the knot.
pub fn crofton_estimate(knot: &PolygonalKnot, mode: CroftonMode, samples: usize, seed: u64) -> Result<CroftonEstimate> {
    if samples < 100 {
        return Err(KnotError::InvalidParameter(format!("need at least 100 samples, got {samples}")));
    }
    let eps = knot.eps();
    let (values, redraws) = monte_carlo(samples, seed, |u| sample_value(knot, mode, u, eps))?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(CroftonEstimate { mode, samples, seed, mean, stderr, redraws })
}

/// Sampled mean of the local maxima count over uniform directions. Each
/// direction lies in as many slices as there are maxima, so the mean is
/// the total curvature over `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximaAverage {
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub redraws: usize,
}

pub fn maxima_average(knot: &PolygonalKnot, samples: usize, seed: u64) -> Result<MaximaAverage> {
    if samples < 1 {
        return Err(KnotError::InvalidParameter("need at least one sample".into()));
    }
    let eps = knot.eps();
    let (values, redraws) = monte_carlo(samples, seed, |u| {
        let h: Vec<f64> = knot.vertices().iter().map(|p| u.dot(p)).collect();
        if tied_pair(&h, eps).is_some() {
            return None;
        }
        Some(count_extrema(&h).0 as f64)
    })?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(MaximaAverage { samples, seed, mean, stderr, redraws })
}

/// Smallest local maxima count over a Fibonacci lattice of `count`
/// directions, with the direction attaining it. Tied directions are skipped.
pub fn min_maxima_scan(knot: &PolygonalKnot, count: usize) -> Option<(usize, Direction)> {
    fibonacci_sphere(count)
        .into_par_iter()
        .filter_map(|u| {
            let d = Direction::from_unit(u);
            local_maxima_count(knot, &d).ok().map(|m| (m, d))
        })
        .min_by(|a, b| a.0.cmp(&b.0))
}

/// A direction with a single height maximum and the unknotting moves it
/// yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeCertificate {
    pub direction: Direction,
    pub moves: MoveSequence,
}

fn try_direction(knot: &PolygonalKnot, u: &Vec3) -> Option<BridgeCertificate> {
    let d = Direction::new(*u).ok()?;
    if local_maxima_count(knot, &d).ok()? != 1 {
        return None;
    }
    let moves = unknot_by_height(knot, &d).ok()?;
    Some(BridgeCertificate { direction: d, moves })
}

/// Looks for a direction along which the height has one local maximum.
///
/// Half the budget goes to a Fibonacci lattice, a quarter to small random
/// tilts of the lattice directions with the fewest maxima, and the rest to
/// uniform random directions. Returning `None` proves nothing.
pub fn bridge_certificate(knot: &PolygonalKnot, budget: usize, seed: u64) -> Option<BridgeCertificate> {
    if budget == 0 {
        return None;
    }
    let lattice_n = budget.div_ceil(2);
    let lattice = fibonacci_sphere(lattice_n);
    let scored: Vec<(usize, usize)> = lattice
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let h: Vec<f64> = knot.vertices().iter().map(|p| u.dot(p)).collect();
            let m = if tied_pair(&h, knot.eps()).is_some() { usize::MAX } else { count_extrema(&h).0 };
            (m, i)
        })
        .collect();
    if let Some(cert) = scored
        .par_iter()
        .filter(|(m, _)| *m == 1)
        .find_map_first(|&(_, i)| try_direction(knot, &lattice[i]))
    {
        return Some(cert);
    }

    let refine_n = (budget - lattice_n) / 2;
    let mut best = scored.clone();
    best.sort();
    let anchors: Vec<Vec3> = best.iter().take(refine_n.div_ceil(16).max(1)).map(|&(_, i)| lattice[i]).collect();
    let spacing = (4.0 * std::f64::consts::PI / lattice_n as f64).sqrt();
    let refined = (0..refine_n).into_par_iter().find_map_first(|k| {
        let mut rng = stream(seed, k as u64);
        let anchor = anchors[k % anchors.len()];
        let u = anchor + uniform_direction(&mut rng) * spacing;
        try_direction(knot, &u)
    });
    if refined.is_some() {
        return refined;
    }

    let random_n = budget - lattice_n - refine_n;
    (0..random_n).into_par_iter().find_map_first(|k| {
        let mut rng = stream(seed, (refine_n + k) as u64);
        try_direction(knot, &uniform_direction(&mut rng))
    })
}

/// Sum of all slice areas; equals twice the total curvature.
pub fn total_slice_area(knot: &PolygonalKnot) -> Result<f64> {
    (0..knot.len()).map(|i| slice_area(knot, i).map(|s| s.area)).sum()
}
