//! The end-to-end certificate suite.
//!
//! Every check records its inputs, computed values, tolerance, seed and a
//! verdict. Triviality is only ever asserted from a replayed move sequence
//! and nontriviality only from a valid tricoloring.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::crofton::{bridge_certificate, crofton_estimate, maxima_average, total_slice_area, CroftonMode};
use crate::curvature::{angular_length, cone_ball_area_ratio, inscribe, radial_projection, total_curvature, turning_angles};
use crate::diagram::{axis_or_generic_diagram, color_faces, tricolorable, KnotDiagram};
use crate::error::KnotError;
use crate::geom::{io, PolygonalKnot};
use crate::hull2::{second_hull_witness, spherical_crofton_check};
use crate::isotopy::{greedy_simplify, MoveSequence};
use crate::quadrisecant::{find_quadrisecants, OrderType, QuadFilter, MAX_EDGES, RESIDUAL_REL};

/// Absolute tolerance for exact identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Width of statistical agreement bands, in standard errors.
pub const SIGMA_BAND: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotStatus {
    /// A replayed move sequence reaches a triangle.
    Trivial,
    /// A diagram admits a valid non-monochromatic tricoloring.
    Nontrivial,
    Unknown,
    /// Both certificates were produced, which indicates a bug.
    Contradictory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The statement being checked.
    pub anchor: String,
    pub inputs: Value,
    pub values: Value,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub input_digest: String,
    pub version: String,
    pub seed: u64,
    pub rel_eps: f64,
    pub status: KnotStatus,
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub crofton_samples: usize,
    pub maxima_samples: usize,
    pub bridge_budget: usize,
    pub greedy_budget: usize,
    pub hull_grid: usize,
    pub hull_budget: usize,
    pub sphere_samples: usize,
    /// Record wall-clock time per check (makes reports non-reproducible).
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            crofton_samples: 200_000,
            maxima_samples: 10_000,
            bridge_budget: 10_000,
            greedy_budget: 10_000,
            hull_grid: 9,
            hull_budget: 10_000,
            sphere_samples: 100_000,
            timings: false,
        }
    }
}

/// SHA-256 of the knot's canonical JSON serialization.
pub fn input_digest(knot: &PolygonalKnot) -> String {
    hex::encode(Sha256::digest(io::to_json(knot).as_bytes()))
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

struct Suite {
    checks: Vec<CheckRecord>,
    timings: bool,
}

impl Suite {
    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        name: &str,
        anchor: &str,
        inputs: Value,
        values: Value,
        tolerance: Option<f64>,
        seed: Option<u64>,
        verdict: Verdict,
        started: Instant,
    ) {
        let runtime_ms = self.timings.then(|| started.elapsed().as_secs_f64() * 1e3);
        self.checks.push(CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            inputs,
            values,
            tolerance,
            seed,
            verdict,
            runtime_ms,
        });
    }

    fn error(&mut self, name: &str, anchor: &str, err: &KnotError, started: Instant) {
        let v = match err {
            KnotError::RetryBudgetExhausted(_) | KnotError::NoGenericDirection(_) | KnotError::TooManyEdges(..) => {
                Verdict::Inconclusive
            }
            _ => Verdict::Fail,
        };
        self.record(name, anchor, Value::Null, json!({ "error": err.to_string() }), None, None, v, started);
    }
}

/// Triviality certificate found by the verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivialityCertificate {
    pub method: &'static str,
    pub moves: MoveSequence,
}

/// Runs every check on `knot`.
pub fn verify(knot: &PolygonalKnot, opts: &VerifyOptions) -> CertificateReport {
    let seed = opts.seed;
    let mut suite = Suite { checks: Vec::new(), timings: opts.timings };
    let phi = total_curvature(knot).total;

    // Certificates first; the inequality checks depend on them.
    let t = Instant::now();
    let triviality = bridge_certificate(knot, opts.bridge_budget, seed)
        .map(|c| TrivialityCertificate { method: "single-maximum", moves: c.moves })
        .or_else(|| {
            let (_, seq) = greedy_simplify(knot, opts.greedy_budget);
            seq.reaches_triangle().then_some(TrivialityCertificate { method: "greedy", moves: seq })
        });
    let replay_ok = triviality.as_ref().map(|c| c.moves.replay().is_ok() && c.moves.reaches_triangle());
    let trivial = replay_ok == Some(true);

    let t_diag = Instant::now();
    let diagram = axis_or_generic_diagram(knot, seed);
    let coloring = diagram.as_ref().ok().and_then(tricolorable);
    let nontrivial = coloring.as_ref().is_some_and(|c| c.valid && c.non_monochromatic);
    let status = match (trivial, nontrivial) {
        (true, true) => KnotStatus::Contradictory,
        (true, false) => KnotStatus::Trivial,
        (false, true) => KnotStatus::Nontrivial,
        (false, false) => KnotStatus::Unknown,
    };

    suite.record(
        "total_curvature",
        "total curvature is the sum of external angles and is at least 2*pi",
        json!({ "vertices": knot.len() }),
        json!({ "phi": phi, "phi_over_pi": phi / PI }),
        Some(IDENTITY_TOL),
        None,
        verdict(phi >= TAU - IDENTITY_TOL),
        t,
    );

    let bound_ok = phi >= 2.0 * TAU - IDENTITY_TOL;
    suite.record(
        "nontrivial_curvature_bound",
        "a nontrivial knot has total curvature at least 4*pi",
        json!({ "status": status }),
        json!({ "phi": phi, "four_pi": 2.0 * TAU, "margin": phi - 2.0 * TAU }),
        Some(IDENTITY_TOL),
        None,
        match status {
            KnotStatus::Nontrivial => verdict(bound_ok),
            KnotStatus::Trivial => Verdict::Pass,
            KnotStatus::Unknown if bound_ok => Verdict::Pass,
            KnotStatus::Unknown => Verdict::Inconclusive,
            KnotStatus::Contradictory => Verdict::Fail,
        },
        t,
    );

    let t = Instant::now();
    let mut estimates = Vec::new();
    for mode in [CroftonMode::PlaneProjection, CroftonMode::LineProjection] {
        let name = match mode {
            CroftonMode::PlaneProjection => "crofton_plane",
            CroftonMode::LineProjection => "crofton_line",
        };
        let anchor = "the average over directions of the projected total curvature equals the total curvature";
        match crofton_estimate(knot, mode, opts.crofton_samples, seed) {
            Ok(est) => {
                let dev = (est.mean - phi).abs();
                let ok = dev <= SIGMA_BAND * est.stderr + IDENTITY_TOL;
                suite.record(
                    name,
                    anchor,
                    json!({ "N": est.samples }),
                    json!({ "estimate": est, "phi": phi, "deviation": dev }),
                    Some(SIGMA_BAND),
                    Some(seed),
                    verdict(ok),
                    t,
                );
                estimates.push(est);
            }
            Err(e) => suite.error(name, anchor, &e, t),
        }
    }
    if let [a, b] = estimates.as_slice() {
        let dev = (a.mean - b.mean).abs();
        let band = SIGMA_BAND * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() + IDENTITY_TOL;
        suite.record(
            "crofton_modes_agree",
            "plane and line projection averages agree",
            json!({ "N": a.samples }),
            json!({ "plane": a.mean, "line": b.mean, "deviation": dev, "band": band }),
            Some(SIGMA_BAND),
            Some(seed),
            verdict(dev <= band),
            t,
        );
    }

    let t = Instant::now();
    let anchor = "the slice of directions maximal at a vertex has area twice its external angle";
    match total_slice_area(knot) {
        Ok(area) => suite.record(
            "slice_area_identity",
            anchor,
            json!({ "vertices": knot.len() }),
            json!({ "total_area": area, "two_phi": 2.0 * phi }),
            Some(IDENTITY_TOL),
            None,
            verdict((area - 2.0 * phi).abs() <= IDENTITY_TOL),
            t,
        ),
        Err(e) => suite.error("slice_area_identity", anchor, &e, t),
    }

    let t = Instant::now();
    let anchor = "slices cover the sphere on average total_curvature / (2*pi) times";
    match maxima_average(knot, opts.maxima_samples, seed) {
        Ok(avg) => {
            let dev = (TAU * avg.mean - phi).abs();
            suite.record(
                "double_cover",
                anchor,
                json!({ "N": avg.samples }),
                json!({ "average": avg, "expected": phi / TAU, "deviation": dev / TAU }),
                Some(SIGMA_BAND),
                Some(seed),
                verdict(dev <= SIGMA_BAND * TAU * avg.stderr + IDENTITY_TOL),
                t,
            );
        }
        Err(e) => suite.error("double_cover", anchor, &e, t),
    }

    let tri_values = match &triviality {
        Some(c) => json!({
            "found": true,
            "method": c.method,
            "moves": c.moves.moves.len(),
            "replayed": replay_ok,
            "final_vertices": c.moves.final_knot.len(),
        }),
        None => json!({ "found": false }),
    };
    suite.record(
        "triviality_certificate",
        "a knot reduced to a triangle by triangular moves is trivial",
        json!({ "bridge_budget": opts.bridge_budget, "greedy_budget": opts.greedy_budget }),
        tri_values,
        None,
        Some(seed),
        match (&triviality, status) {
            (_, KnotStatus::Contradictory) => Verdict::Fail,
            (Some(_), _) => verdict(trivial),
            (None, KnotStatus::Nontrivial) => Verdict::Pass,
            (None, _) => Verdict::Inconclusive,
        },
        t,
    );

    let anchor_diag = "a generic diagram has crossings + 2 faces with a proper chessboard coloring";
    match &diagram {
        Ok(d) => diagram_checks(&mut suite, d, status, seed, t_diag),
        Err(e) => suite.error("diagram", anchor_diag, e, t_diag),
    }
    if let Ok(d) = &diagram {
        let t = Instant::now();
        let (valid, colors) = match &coloring {
            Some(c) => (c.valid, Some(c.colors_used())),
            None => (true, None),
        };
        suite.record(
            "tricolorability",
            "a valid non-monochromatic tricoloring certifies a nontrivial knot",
            json!({ "crossings": d.crossing_count(), "arcs": d.arcs.len() }),
            json!({ "tricolorable": coloring.is_some(), "colors_used": colors, "coloring": coloring }),
            None,
            Some(seed),
            if status == KnotStatus::Contradictory { Verdict::Fail } else { verdict(valid) },
            t,
        );
    }

    quadrisecant_check(&mut suite, knot, phi, status);
    hull_checks(&mut suite, knot, phi, status, opts);

    let overall = if suite.checks.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if suite.checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    CertificateReport {
        input_digest: input_digest(knot),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        rel_eps: knot.rel_eps(),
        status,
        checks: suite.checks,
        overall,
    }
}

fn diagram_checks(suite: &mut Suite, d: &KnotDiagram, status: KnotStatus, seed: u64, t: Instant) {
    let anchor = "a generic diagram has crossings + 2 faces with a proper chessboard coloring";
    let coloring = match color_faces(d) {
        Ok(c) => c,
        Err(e) => return suite.error("diagram", anchor, &e, t),
    };
    let c = d.crossing_count();
    suite.record(
        "diagram",
        anchor,
        json!({ "direction": d.direction }),
        json!({
            "crossings": c,
            "faces": d.faces.len(),
            "bounded_white_faces": coloring.white_faces.len(),
            "trivial_candidate": coloring.trivial_candidate,
        }),
        None,
        Some(seed),
        verdict(d.faces.len() == c + 2),
        t,
    );

    let t = Instant::now();
    let planar_phi = d.planar_total_curvature();
    let psis: Vec<f64> = coloring.white_points.iter().map(|o| d.planar_angular_length(o)).collect();
    let ok = psis.iter().all(|&p| p >= 2.0 * TAU - IDENTITY_TOL && p <= planar_phi + IDENTITY_TOL);
    suite.record(
        "white_face_angular_length",
        "seen from a bounded white face the projection has angular length between 4*pi and its total curvature",
        json!({ "points": coloring.white_points }),
        json!({ "angular_lengths": psis, "planar_phi": planar_phi, "trivial_candidate": coloring.trivial_candidate }),
        Some(IDENTITY_TOL),
        Some(seed),
        if coloring.trivial_candidate && status == KnotStatus::Nontrivial { Verdict::Fail } else { verdict(ok) },
        t,
    );
}

fn quadrisecant_check(suite: &mut Suite, knot: &PolygonalKnot, phi: f64, status: KnotStatus) {
    let t = Instant::now();
    let name = "alternating_quadrisecant";
    let anchor = "the quadrangle inscribed along an alternating quadrisecant has total curvature 4*pi";
    let scan = match find_quadrisecants(knot, QuadFilter::All) {
        Ok(s) => s,
        Err(e) => return suite.error(name, anchor, &e, t),
    };
    let bound = RESIDUAL_REL * knot.bbox_diagonal();
    let mut ok = scan.records.iter().all(|r| r.residual <= bound && r.hits.iter().all(|h| h.t > 0.0 && h.t < 1.0));
    let mut quad_phis = Vec::new();
    for r in scan.records.iter().filter(|r| r.order == OrderType::Alternating) {
        match inscribe(knot, &r.marks_in_knot_order()).and_then(|q| turning_angles(&q, true)) {
            Ok(p) => {
                ok &= (p.total - 2.0 * TAU).abs() <= IDENTITY_TOL && p.total <= phi + IDENTITY_TOL;
                quad_phis.push(p.total);
            }
            Err(_) => ok = false,
        }
    }
    let found = !quad_phis.is_empty();
    suite.record(
        name,
        anchor,
        json!({ "max_edges": MAX_EDGES, "tuples": scan.tuples }),
        json!({
            "records": scan.records.len(),
            "alternating": quad_phis.len(),
            "quadrangle_phis": quad_phis,
            "skipped_degenerate": scan.skipped_degenerate,
            "skipped_endpoint": scan.skipped_endpoint,
        }),
        Some(IDENTITY_TOL),
        None,
        match (ok, found, status) {
            (false, _, _) => Verdict::Fail,
            (true, false, KnotStatus::Nontrivial) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        },
        t,
    );
}

fn hull_checks(suite: &mut Suite, knot: &PolygonalKnot, phi: f64, status: KnotStatus, opts: &VerifyOptions) {
    let t = Instant::now();
    let name = "second_hull";
    let anchor = "the second hull of a nontrivial knot has nonempty interior";
    let seed = opts.seed;
    let witness = match second_hull_witness(knot, opts.hull_grid, opts.hull_budget, seed) {
        Ok(w) => w,
        Err(e) => return suite.error(name, anchor, &e, t),
    };
    let inputs = json!({ "grid": opts.hull_grid, "budget": opts.hull_budget });
    let Some((o, w)) = witness else {
        let v = if status == KnotStatus::Nontrivial { Verdict::Inconclusive } else { Verdict::Pass };
        suite.record(name, anchor, inputs, json!({ "found": false }), None, Some(seed), v, t);
        return;
    };
    let psi = angular_length(knot, &o);
    let sphere = radial_projection(knot, &o);
    let (psi, sphere) = match (psi, sphere) {
        (Ok(p), Ok(s)) => (p, s),
        (Err(e), _) | (_, Err(e)) => return suite.error(name, anchor, &e, t),
    };
    let length = sphere.length();
    let ok = w.min_count >= 4
        && psi >= 2.0 * TAU - 1e-6
        && psi <= phi + IDENTITY_TOL
        && (length - psi).abs() <= IDENTITY_TOL;
    suite.record(
        name,
        anchor,
        inputs,
        json!({ "found": true, "witness": w, "psi": psi, "projection_length": length, "phi": phi }),
        Some(1e-6),
        Some(seed),
        verdict(ok),
        t,
    );

    let t = Instant::now();
    let anchor = "spherical length equals pi times the mean number of great-circle crossings";
    match spherical_crofton_check(&sphere, opts.sphere_samples, seed) {
        Ok(c) => suite.record(
            "spherical_crofton",
            anchor,
            json!({ "N": c.samples, "point": o }),
            json!(c),
            Some(SIGMA_BAND),
            Some(seed),
            verdict((c.length - c.crofton).abs() <= SIGMA_BAND * c.stderr + IDENTITY_TOL),
            t,
        ),
        Err(e) => suite.error("spherical_crofton", anchor, &e, t),
    }

    let t = Instant::now();
    let anchor = "the cone area in a ball of radius r, over r^2, increases to half the angular length";
    let diameter = knot.diameter();
    let ratios: Result<Vec<f64>, KnotError> =
        (-4..=12).map(|k| cone_ball_area_ratio(knot, &o, 2f64.powi(k) * diameter)).collect();
    let far = cone_ball_area_ratio(knot, &o, 1e3 * diameter);
    match (ratios, far) {
        (Ok(rs), Ok(far)) => {
            let monotone = rs.windows(2).all(|w| w[1] >= w[0] - 1e-6);
            let rel = (far - psi / 2.0).abs() / (psi / 2.0);
            suite.record(
                "cone_area_limit",
                anchor,
                json!({ "point": o, "radius": 1e3 * diameter }),
                json!({ "ratio": far, "half_psi": psi / 2.0, "relative_error": rel, "monotone": monotone }),
                Some(1e-3),
                None,
                verdict(monotone && rel <= 1e-3),
                t,
            );
        }
        (Err(e), _) | (_, Err(e)) => suite.error("cone_area_limit", anchor, &e, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{generate, KnotKind};

    fn quick() -> VerifyOptions {
        VerifyOptions {
            crofton_samples: 2000,
            maxima_samples: 2000,
            bridge_budget: 500,
            hull_budget: 500,
            sphere_samples: 2000,
            hull_grid: 5,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn square_is_certified_trivial() {
        let k = generate(KnotKind::ConvexNgon { n: 4, radius: 1.0 }, 0).unwrap();
        let r = verify(&k, &quick());
        assert_eq!(r.status, KnotStatus::Trivial);
        assert_eq!(r.overall, Verdict::Pass, "{}", r.to_json());
        assert!(r.check("spherical_crofton").is_none());
    }

    #[test]
    fn trefoil_is_certified_nontrivial() {
        let k = generate(KnotKind::TREFOIL, 0).unwrap();
        let r = verify(&k, &quick());
        assert_eq!(r.status, KnotStatus::Nontrivial);
        assert_eq!(r.overall, Verdict::Pass, "{}", r.to_json());
        assert_eq!(r.check("triviality_certificate").unwrap().values["found"], json!(false));
    }

    #[test]
    fn reports_are_reproducible() {
        let k = generate(KnotKind::ConvexNgon { n: 5, radius: 2.0 }, 0).unwrap();
        assert_eq!(verify(&k, &quick()).to_json(), verify(&k, &quick()).to_json());
    }
}
