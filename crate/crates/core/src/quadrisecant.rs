//! Common transversals of four lines and the exhaustive quadrisecant search.

use nalgebra::{Matrix6, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::Mark;
use crate::error::{KnotError, Result};
use crate::geom::predicates::angle_between;
use crate::geom::{Direction, PolygonalKnot, Vec3};

/// Largest knot the O(n^4) search accepts.
pub const MAX_EDGES: usize = 200;
/// Ratio of the fourth to the first singular value below which the
/// incidence system is treated as rank deficient.
const RANK_TOL: f64 = 1e-9;
const DEDUP_ANGLE: f64 = 1e-8;
const DEDUP_REL_DISTANCE: f64 = 1e-8;
/// Incidence residual bound relative to the bounding-box diagonal.
pub const RESIDUAL_REL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Vec3,
    pub direction: Direction,
}

impl Line {
    pub fn new(point: Vec3, direction: Vec3) -> Result<Self> {
        Ok(Self { point, direction: Direction::new(direction)? })
    }

    pub fn through(a: &Vec3, b: &Vec3) -> Result<Self> {
        Self::new(*a, b - a)
    }

    pub fn at(&self, s: f64) -> Vec3 {
        self.point + *self.direction * s
    }

    pub fn distance_to_point(&self, p: &Vec3) -> f64 {
        let w = p - self.point;
        (w - *self.direction * w.dot(&self.direction)).norm()
    }

    pub fn distance_to_line(&self, other: &Line) -> f64 {
        let n = self.direction.cross(&other.direction);
        let nn = n.norm();
        if nn < 1e-12 {
            return self.distance_to_point(&other.point);
        }
        (other.point - self.point).dot(&n).abs() / nn
    }

    fn plucker(&self) -> Vector6<f64> {
        let d = *self.direction;
        let m = self.point.cross(&d);
        Vector6::new(d.x, d.y, d.z, m.x, m.y, m.z)
    }
}

/// Transversals found for one quadruple of lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transversals {
    /// Each line with its largest distance to the four inputs.
    pub lines: Vec<(Line, f64)>,
    /// The quadruple admits infinitely many transversals (or the system is
    /// numerically rank deficient); no lines are returned.
    pub degenerate: bool,
}

fn split(z: &Vector6<f64>) -> (Vec3, Vec3) {
    (Vec3::new(z[0], z[1], z[2]), Vec3::new(z[3], z[4], z[5]))
}

/// The Klein quadric `<d, m>` and its polarization.
fn klein(z: &Vector6<f64>) -> f64 {
    let (d, m) = split(z);
    d.dot(&m)
}

fn klein_bilinear(x: &Vector6<f64>, y: &Vector6<f64>) -> f64 {
    let (dx, mx) = split(x);
    let (dy, my) = split(y);
    dx.dot(&my) + dy.dot(&mx)
}

/// Roots `(mu, lambda)` on the unit circle of `c mu^2 + b mu lambda + a lambda^2`.
fn homogeneous_roots(a: f64, b: f64, c: f64) -> Vec<(f64, f64)> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    let disc = b * b - 4.0 * a * c;
    let disc_tol = 1e-12 * (b * b + 4.0 * (a * c).abs());
    if disc < -disc_tol {
        return Vec::new();
    }
    let disc = disc.max(0.0);
    let double = disc <= disc_tol;
    let roots_of = |p: f64, q: f64, r: f64| -> Vec<f64> {
        // p x^2 + q x + r with |p| the larger end coefficient.
        let sq = disc.sqrt();
        let big = -0.5 * (q + q.signum() * sq);
        if double {
            vec![-q / (2.0 * p)]
        } else if big == 0.0 {
            vec![0.0]
        } else {
            vec![big / p, r / big]
        }
    };
    let mut out = Vec::new();
    if scale == 0.0 {
        return out;
    }
    if a.abs() >= c.abs() {
        // mu = 1, solve for lambda.
        for l in roots_of(a, b, c) {
            let norm = (1.0 + l * l).sqrt();
            out.push((1.0 / norm, l / norm));
        }
    } else {
        for m in roots_of(c, b, a) {
            let norm = (1.0 + m * m).sqrt();
            out.push((m / norm, 1.0 / norm));
        }
    }
    out
}

/// All lines meeting each of the four given lines.
pub fn transversals_of_4_lines(lines: &[Line; 4]) -> Transversals {
    // Work in coordinates centered on the input points and scaled to unit size.
    let center = lines.iter().map(|l| l.point).sum::<Vec3>() / 4.0;
    let scale = lines.iter().map(|l| (l.point - center).norm()).fold(0.0, f64::max).max(1e-300);
    let local: Vec<Line> =
        lines.iter().map(|l| Line { point: (l.point - center) / scale, direction: l.direction }).collect();

    let mut a = Matrix6::<f64>::zeros();
    for (i, l) in local.iter().enumerate() {
        let z = l.plucker();
        // Reciprocal product with X = (d, m): <d, m_i> + <m, d_i>.
        for c in 0..3 {
            a[(i, c)] = z[3 + c];
            a[(i, 3 + c)] = z[c];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = |k: usize| svd.singular_values[order[k]];
    if sv(3) <= RANK_TOL * sv(0) {
        return Transversals { lines: Vec::new(), degenerate: true };
    }
    let x: Vector6<f64> = v_t.row(order[4]).transpose();
    let y: Vector6<f64> = v_t.row(order[5]).transpose();
    let qa = klein(&y);
    let qb = klein_bilinear(&x, &y);
    let qc = klein(&x);
    if qa.abs().max(qb.abs()).max(qc.abs()) <= 1e-12 {
        return Transversals { lines: Vec::new(), degenerate: true };
    }

    let mut found = Vec::new();
    for (mu, lambda) in homogeneous_roots(qa, qb, qc) {
        // Polish the angle on the pencil with Newton steps.
        let mut theta = lambda.atan2(mu);
        for _ in 0..3 {
            let (s, c) = theta.sin_cos();
            let f = qc * c * c + qb * c * s + qa * s * s;
            let df = 2.0 * (qa - qc) * s * c + qb * (c * c - s * s);
            if df.abs() < 1e-300 {
                break;
            }
            theta -= f / df;
        }
        let z = x * theta.cos() + y * theta.sin();
        let (d, m) = split(&z);
        let dd = d.norm_squared();
        if dd < 1e-20 {
            continue;
        }
        let point = d.cross(&m) / dd;
        let Ok(dir) = Direction::new(d) else { continue };
        let line = Line { point: center + point * scale, direction: dir };
        let residual = lines.iter().map(|l| line.distance_to_line(l)).fold(0.0, f64::max);
        found.push((line, residual));
    }
    Transversals { lines: found, degenerate: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderType {
    /// Line order a, b, c, d is the knot's cyclic order a, c, b, d.
    Alternating,
    /// Same cyclic order on the line and on the knot.
    Simple,
    /// Knot cyclic order a, b, d, c.
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub edge: usize,
    pub t: f64,
    pub point: Vec3,
    /// Parameter along the record's line.
    pub s: f64,
}

impl Hit {
    pub fn position(&self) -> f64 {
        self.edge as f64 + self.t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantRecord {
    pub line: Line,
    /// Sorted by `s`.
    pub hits: [Hit; 4],
    pub order: OrderType,
    pub residual: f64,
}

/// Order type from positions along the knot of hits listed in line order.
pub fn classify_order(positions: &[f64; 4]) -> OrderType {
    let mut cyclic: Vec<usize> = (0..4).collect();
    cyclic.sort_by(|&i, &j| positions[i].total_cmp(&positions[j]));
    let at = cyclic.iter().position(|&i| i == 0).unwrap();
    match cyclic[(at + 2) % 4] {
        1 => OrderType::Alternating,
        2 => OrderType::Simple,
        _ => OrderType::Flipped,
    }
}

impl QuadrisecantRecord {
    /// Marks of the four hits in the knot's own order.
    pub fn marks_in_knot_order(&self) -> Vec<Mark> {
        let mut hits = self.hits.to_vec();
        hits.sort_by(|a, b| a.position().total_cmp(&b.position()));
        hits.iter().map(|h| Mark::new(h.edge, h.t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadFilter {
    All,
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantScan {
    pub records: Vec<QuadrisecantRecord>,
    pub tuples: usize,
    /// Quadruples whose supporting lines admit a transversal family.
    pub skipped_degenerate: usize,
    /// Candidate lines discarded for hitting an edge within the guard band
    /// of one of its endpoints.
    pub skipped_endpoint: usize,
}

enum Candidate {
    Record(QuadrisecantRecord),
    Endpoint,
}

fn examine(knot: &PolygonalKnot, edges: [usize; 4], line: &Line, eps: f64) -> Option<Candidate> {
    let diag = knot.bbox_diagonal();
    let mut hits = Vec::with_capacity(4);
    let mut endpoint = false;
    for &e in &edges {
        let (a, b) = knot.edge(e);
        let len = (b - a).norm();
        let d = (b - a) / len;
        // Closest points between the line and the edge's supporting line.
        let w = a - line.point;
        let u = *line.direction;
        let bb = u.dot(&d);
        let denom = 1.0 - bb * bb;
        if denom < 1e-24 {
            return None;
        }
        let du = u.dot(&w);
        let dd = d.dot(&w);
        let s = (du - bb * dd) / denom;
        let r = (bb * du - dd) / denom;
        let t = r / len;
        let margin = eps / len;
        if t < -margin || t > 1.0 + margin {
            return None;
        }
        if t <= margin || t >= 1.0 - margin {
            endpoint = true;
        }
        let point = a + (b - a) * t;
        if line.distance_to_point(&point) > RESIDUAL_REL * diag {
            return None;
        }
        hits.push(Hit { edge: e, t, point, s });
    }
    if endpoint {
        return Some(Candidate::Endpoint);
    }
    hits.sort_by(|a, b| a.s.total_cmp(&b.s));
    let residual = hits.iter().map(|h| line.distance_to_point(&h.point)).fold(0.0, f64::max);
    let positions = [hits[0].position(), hits[1].position(), hits[2].position(), hits[3].position()];
    Some(Candidate::Record(QuadrisecantRecord {
        line: *line,
        hits: [hits[0], hits[1], hits[2], hits[3]],
        order: classify_order(&positions),
        residual,
    }))
}

fn same_line(a: &Line, b: &Line, tol: f64) -> bool {
    let ang = angle_between(&a.direction, &b.direction);
    let ang = ang.min(std::f64::consts::PI - ang);
    ang < DEDUP_ANGLE && a.distance_to_point(&b.point) < tol
}

/// Searches every 4-subset of edges for lines meeting all four edges at
/// interior points.
pub fn find_quadrisecants(knot: &PolygonalKnot, filter: QuadFilter) -> Result<QuadrisecantScan> {
    let n = knot.len();
    if n > MAX_EDGES {
        return Err(KnotError::TooManyEdges(n, MAX_EDGES));
    }
    let eps = knot.eps();
    let lines: Vec<Line> = (0..n)
        .map(|i| {
            let (a, b) = knot.edge(i);
            Line::through(&a, &b).expect("validated knot has no degenerate edges")
        })
        .collect();

    struct Partial {
        candidates: Vec<QuadrisecantRecord>,
        tuples: usize,
        degenerate: usize,
        endpoint: usize,
    }
    let partials: Vec<Partial> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut p = Partial { candidates: Vec::new(), tuples: 0, degenerate: 0, endpoint: 0 };
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        p.tuples += 1;
                        let quad = [lines[i], lines[j], lines[k], lines[l]];
                        let tr = transversals_of_4_lines(&quad);
                        if tr.degenerate {
                            p.degenerate += 1;
                            continue;
                        }
                        for (line, _) in &tr.lines {
                            match examine(knot, [i, j, k, l], line, eps) {
                                Some(Candidate::Record(r)) => p.candidates.push(r),
                                Some(Candidate::Endpoint) => p.endpoint += 1,
                                None => {}
                            }
                        }
                    }
                }
            }
            p
        })
        .collect();

    let tol = DEDUP_REL_DISTANCE * knot.bbox_diagonal();
    let mut scan = QuadrisecantScan { records: Vec::new(), tuples: 0, skipped_degenerate: 0, skipped_endpoint: 0 };
    for p in partials {
        scan.tuples += p.tuples;
        scan.skipped_degenerate += p.degenerate;
        scan.skipped_endpoint += p.endpoint;
        for r in p.candidates {
            if !scan.records.iter().any(|q| same_line(&q.line, &r.line, tol)) {
                scan.records.push(r);
            }
        }
    }
    if filter == QuadFilter::Alternating {
        scan.records.retain(|r| r.order == OrderType::Alternating);
    }
    Ok(scan)
}
