use rand::Rng;

use super::predicates::{point_segment, segment_segment};
use super::{check_general_position, Direction, PolygonalKnot, PositionMode};
use crate::error::{KnotError, Result};
use crate::rng::stream;

/// Relative magnitude used when a caller asks for a generic copy of a knot.
pub const GENERIC_REL_MAGNITUDE: f64 = 1e-6;
/// Fresh sub-seeds tried by [`make_generic`].
pub const GENERIC_RETRIES: u64 = 32;

/// Minimum distance between non-adjacent edges, and between each vertex and
/// the edges not incident to it.
///
/// Moving every vertex by less than half of this keeps the polygon simple and
/// isotopic to the original.
pub fn clearance(knot: &PolygonalKnot) -> f64 {
    let n = knot.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = knot.edge(i);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = knot.edge(j);
            best = best.min(segment_segment(&a, &b, &c, &d).0);
        }
    }
    for v in 0..n {
        let p = knot.vertices()[v];
        for e in 0..n {
            if e == v || (e + 1) % n == v {
                continue;
            }
            let (a, b) = knot.edge(e);
            best = best.min(point_segment(&p, &a, &b).0);
        }
    }
    best
}

/// Moves every vertex by at most `magnitude` (Euclidean).
///
/// Each coordinate offset is uniform in `[-m/sqrt(3), m/sqrt(3)]`, drawn from
/// the stream keyed by `(seed, 3 * vertex + coordinate)`.
pub fn perturb(knot: &PolygonalKnot, magnitude: f64, seed: u64) -> Result<PolygonalKnot> {
    if magnitude == 0.0 {
        return Ok(knot.clone());
    }
    if !(magnitude > 0.0) {
        return Err(KnotError::InvalidParameter(format!("magnitude {magnitude}")));
    }
    let clearance = clearance(knot);
    if !(magnitude < 0.5 * clearance) {
        return Err(KnotError::MagnitudeTooLarge { magnitude, clearance });
    }
    let half_width = magnitude / 3f64.sqrt();
    let moved = knot
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut q = *p;
            for c in 0..3 {
                let mut rng = stream(seed, (3 * i + c) as u64);
                q[c] += rng.random_range(-half_width..=half_width);
            }
            q
        })
        .collect();
    PolygonalKnot::with_rel_eps(moved, knot.rel_eps()).map_err(|_| KnotError::SimplicityLost)
}

/// Perturbs `knot` until it passes `mode`, trying up to 32 sub-seeds.
///
/// The magnitude is `1e-6` of the bounding-box diagonal, capped just below
/// half the clearance.
pub fn make_generic(
    knot: &PolygonalKnot,
    mode: PositionMode,
    u: Option<&Direction>,
    seed: u64,
) -> Result<PolygonalKnot> {
    let magnitude = (GENERIC_REL_MAGNITUDE * knot.bbox_diagonal()).min(0.49 * clearance(knot));
    for attempt in 0..GENERIC_RETRIES {
        let sub_seed: u64 = stream(seed, attempt).random();
        let candidate = match perturb(knot, magnitude, sub_seed) {
            Ok(k) => k,
            Err(KnotError::SimplicityLost) => continue,
            Err(e) => return Err(e),
        };
        if check_general_position(&candidate, mode, u)?.pass {
            return Ok(candidate);
        }
    }
    Err(KnotError::GenerationFailed(format!(
        "no generic perturbation for {} in {GENERIC_RETRIES} attempts",
        mode.name()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;

    fn square() -> PolygonalKnot {
        PolygonalKnot::new(vec![
            Vec3::new(0., 0., 0.),
            Vec3::new(1., 0., 0.),
            Vec3::new(1., 1., 0.),
            Vec3::new(0., 1., 0.),
        ])
        .unwrap()
    }

    #[test]
    fn zero_magnitude_is_identity() {
        let sq = square();
        assert_eq!(perturb(&sq, 0.0, 99).unwrap(), sq);
    }

    #[test]
    fn small_perturbation_stays_close_and_generic() {
        let sq = square();
        let p = perturb(&sq, 1e-6, 1).unwrap();
        let max_move = sq
            .vertices()
            .iter()
            .zip(p.vertices())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_move <= 1e-6);
        assert!(max_move > 0.0);
        assert!(check_general_position(&p, PositionMode::NoFourCoplanar, None).unwrap().pass);
    }

    #[test]
    fn deterministic_per_seed() {
        let sq = square();
        assert_eq!(perturb(&sq, 1e-3, 5).unwrap(), perturb(&sq, 1e-3, 5).unwrap());
        assert_ne!(perturb(&sq, 1e-3, 5).unwrap(), perturb(&sq, 1e-3, 6).unwrap());
    }

    #[test]
    fn magnitude_above_half_clearance_is_rejected() {
        assert!(matches!(perturb(&square(), 10.0, 1), Err(KnotError::MagnitudeTooLarge { .. })));
        assert!((clearance(&square()) - 1.0).abs() < 1e-15);
    }
}
