use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{PolygonalKnot, Vec3};
use crate::error::{KnotError, Result};
use crate::isotopy::scramble;
use crate::rng::stream;

const RANDOM_RETRIES: u64 = 1000;

/// Fixture families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KnotKind {
    /// Regular planar polygon in the `z = 0` plane.
    ConvexNgon { n: usize, radius: f64 },
    /// `((R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt)` sampled at
    /// `samples` equally spaced parameters, offset by half a step.
    TorusKnot { p: u32, q: u32, samples: usize, major: f64, minor: f64 },
    /// Closed Gaussian random walk.
    RandomClosed { n: usize },
    /// A triangle pushed through `steps` random triangular isotopies.
    ScrambledUnknot { steps: usize },
}

impl KnotKind {
    /// The trefoil used throughout the test suites.
    pub const TREFOIL: KnotKind = KnotKind::TorusKnot { p: 2, q: 3, samples: 60, major: 2.0, minor: 1.0 };
}

/// Generates a fixture knot; deterministic given `seed`.
pub fn generate(kind: KnotKind, seed: u64) -> Result<PolygonalKnot> {
    match kind {
        KnotKind::ConvexNgon { n, radius } => {
            if n < 3 || !(radius > 0.0) {
                return Err(KnotError::InvalidParameter(format!("convex_ngon(n={n}, radius={radius})")));
            }
            let pts = (0..n)
                .map(|k| {
                    let t = TAU * k as f64 / n as f64;
                    Vec3::new(radius * t.cos(), radius * t.sin(), 0.0)
                })
                .collect();
            PolygonalKnot::new(pts)
        }
        KnotKind::TorusKnot { p, q, samples, major, minor } => {
            if p == 0 || q == 0 || samples < 3 || !(major > 0.0) || !(minor > 0.0) {
                return Err(KnotError::InvalidParameter(format!(
                    "torus_knot(p={p}, q={q}, samples={samples}, R={major}, r={minor})"
                )));
            }
            let (p, q) = (p as f64, q as f64);
            let pts = (0..samples)
                .map(|k| {
                    // Half-step offset keeps vertex images off the axial crossings.
                    let t = TAU * (k as f64 + 0.5) / samples as f64;
                    let rho = major + minor * (q * t).cos();
                    Vec3::new(rho * (p * t).cos(), rho * (p * t).sin(), minor * (q * t).sin())
                })
                .collect();
            PolygonalKnot::new(pts).map_err(|e| KnotError::GenerationFailed(format!("torus knot: {e}")))
        }
        KnotKind::RandomClosed { n } => {
            if n < 3 {
                return Err(KnotError::InvalidParameter(format!("random_closed(n={n})")));
            }
            for attempt in 0..RANDOM_RETRIES {
                let mut rng = stream(seed, attempt);
                let steps: Vec<Vec3> = (0..n)
                    .map(|_| {
                        Vec3::new(
                            rng.sample(StandardNormal),
                            rng.sample(StandardNormal),
                            rng.sample(StandardNormal),
                        )
                    })
                    .collect();
                let mean = steps.iter().sum::<Vec3>() / n as f64;
                let mut pos = Vec3::zeros();
                let pts: Vec<Vec3> = steps
                    .iter()
                    .map(|s| {
                        let here = pos;
                        pos += s - mean;
                        here
                    })
                    .collect();
                if let Ok(k) = PolygonalKnot::new(pts) {
                    return Ok(k);
                }
            }
            Err(KnotError::GenerationFailed(format!("random_closed(n={n}) exhausted {RANDOM_RETRIES} retries")))
        }
        KnotKind::ScrambledUnknot { steps } => {
            let triangle = PolygonalKnot::new(vec![
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(-0.5, 0.75f64.sqrt(), 0.0),
                Vec3::new(-0.5, -(0.75f64.sqrt()), 0.0),
            ])?;
            Ok(scramble(&triangle, steps, seed)?.0)
        }
    }
}
