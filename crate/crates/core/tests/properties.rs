use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use knotcert::crofton::{bridge_certificate, total_slice_area};
use knotcert::curvature::{angular_length, cone_ball_area_ratio, inscribe, radial_projection, total_curvature, Mark};
use knotcert::diagram::{build_diagram, color_faces, FaceColor};
use knotcert::geom::{check_general_position, generate, is_simple, perturb, KnotKind, PositionMode};
use knotcert::hull2::{hull_membership, plane_crossing_number};
use knotcert::isotopy::{apply_move, greedy_simplify, scramble, unknot_by_height, MoveSequence};
use knotcert::quadrisecant::{find_quadrisecants, OrderType, QuadFilter};
use knotcert::{Direction, Plane, PolygonalKnot, Vec3};

fn external_angle(a: &Vec3, b: &Vec3) -> f64 {
    let (a, b) = (a.normalize(), b.normalize());
    if a.dot(&b) >= 0.0 {
        2.0 * ((a - b).norm() / 2.0).min(1.0).asin()
    } else {
        PI - 2.0 * ((a + b).norm() / 2.0).min(1.0).asin()
    }
}

fn angle_sum(points: &[Vec3]) -> f64 {
    let n = points.len();
    (0..n).map(|i| external_angle(&(points[i] - points[(i + n - 1) % n]), &(points[(i + 1) % n] - points[i]))).sum()
}

fn point_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

/// Minimum of the convex distance function: interior critical point if
/// admissible, else the best of the four boundary restrictions.
fn segment_distance(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let (u, v, w) = (b - a, d - c, a - c);
    let (uu, uv, vv, uw, vw) = (u.dot(&u), u.dot(&v), v.dot(&v), u.dot(&w), v.dot(&w));
    let det = uu * vv - uv * uv;
    let mut best = point_segment(a, c, d).min(point_segment(b, c, d)).min(point_segment(c, a, b)).min(point_segment(d, a, b));
    if det > 1e-14 * uu * vv {
        let s = (uv * vw - vv * uw) / det;
        let t = (uu * vw - uv * uw) / det;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            best = best.min((a + u * s - (c + v * t)).norm());
        }
    }
    best
}

fn simple_oracle(v: &[Vec3], eps: f64) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segment_distance(&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]) <= eps {
                return false;
            }
        }
    }
    (0..n).all(|k| (0..n).filter(|&e| e != k && (e + 1) % n != k).all(|e| point_segment(&v[k], &v[e], &v[(e + 1) % n]) > eps))
}

fn coords() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn knot(min: usize, max: usize) -> impl Strategy<Value = PolygonalKnot> {
    prop::collection::vec(coords(), min..=max).prop_filter_map("not simple", |v| PolygonalKnot::new(v).ok())
}

fn unit() -> impl Strategy<Value = Direction> {
    coords().prop_filter_map("zero", |v| (v.norm() > 0.1).then(|| Direction::new(v).unwrap()))
}

fn fixture(index: usize, seed: u64) -> PolygonalKnot {
    match index % 4 {
        0 => generate(KnotKind::TREFOIL, 0).unwrap(),
        1 => generate(KnotKind::ConvexNgon { n: 3 + (seed % 8) as usize, radius: 1.0 }, 0).unwrap(),
        2 => generate(KnotKind::RandomClosed { n: 5 + (seed % 12) as usize }, seed).unwrap(),
        _ => generate(KnotKind::ScrambledUnknot { steps: 10 + (seed % 20) as usize }, seed).unwrap(),
    }
}

fn marks(n: usize, raw: &[f64]) -> Vec<Mark> {
    let mut pos: Vec<f64> = raw.iter().map(|r| r * n as f64).collect();
    pos.sort_by(f64::total_cmp);
    pos.iter().map(|&p| Mark::new(p.floor() as usize, p - p.floor())).collect()
}

fn replay_checked(seq: &MoveSequence) -> PolygonalKnot {
    let mut k = seq.initial.clone();
    for mv in &seq.moves {
        k = apply_move(&k, mv).unwrap();
        assert!(is_simple(k.vertices(), Some(k.eps())).unwrap().simple);
    }
    k
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn simplicity_matches_all_pairs_oracle(
        pts in prop::collection::vec(coords(), 4..10),
        planar in any::<bool>(),
    ) {
        // Planar inputs usually self-intersect; spatial ones usually do not.
        let pts: Vec<Vec3> = pts.into_iter().map(|p| if planar { Vec3::new(p.x, p.y, 0.0) } else { p }).collect();
        prop_assume!((0..pts.len()).all(|i| pts[i] != pts[(i + 1) % pts.len()]));
        let eps = 1e-9 * knotcert::geom::bbox_diagonal(&pts);
        prop_assert_eq!(is_simple(&pts, Some(eps)).unwrap().simple, simple_oracle(&pts, eps));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn generated_knots_are_simple(index in 0usize..4, seed in 0u64..1000) {
        let k = fixture(index, seed);
        prop_assert!(is_simple(k.vertices(), Some(k.eps())).unwrap().simple);
    }

    #[test]
    fn perturbation_is_deterministic(k in knot(4, 10), seed in any::<u64>(), frac in 0.01..0.4f64) {
        prop_assert_eq!(perturb(&k, 0.0, seed).unwrap(), k.clone());
        let m = frac * knotcert::geom::clearance(&k);
        let a = perturb(&k, m, seed).unwrap();
        let b = perturb(&k, m, seed).unwrap();
        prop_assert_eq!(a.vertices(), b.vertices());
        for (p, q) in a.vertices().iter().zip(k.vertices()) {
            prop_assert!((p - q).norm() <= m * (1.0 + 1e-12));
        }
    }

    #[test]
    fn total_curvature_matches_independent_sum(k in knot(3, 16)) {
        let phi = total_curvature(&k).total;
        prop_assert!((phi - angle_sum(k.vertices())).abs() <= 1e-12 * phi.max(1.0));
        prop_assert!(phi >= TAU - 1e-9);
    }

    #[test]
    fn angular_length_bounds_and_radial_identity(k in knot(3, 14), o in coords()) {
        let o = o * 2.0;
        prop_assume!(k.distance_to(&o).0 > 1e-6);
        let psi = angular_length(&k, &o).unwrap();
        prop_assert!(psi <= total_curvature(&k).total + 1e-9);
        if let Ok(sphere) = radial_projection(&k, &o) {
            prop_assert!((sphere.length() - psi).abs() <= 1e-9);
        }
    }

    #[test]
    fn inscription_never_adds_curvature(k in knot(4, 14), raw in prop::collection::vec(0.0..1.0f64, 3..10)) {
        let m = marks(k.len(), &raw);
        if let Ok(beta) = inscribe(&k, &m) {
            let n = beta.len();
            prop_assume!((0..n).all(|i| beta[i] != beta[(i + 1) % n]));
            prop_assert!(angle_sum(&beta) <= total_curvature(&k).total + 1e-9);
        }
    }

    #[test]
    fn cone_ratio_is_nondecreasing(k in knot(3, 10), o in coords()) {
        prop_assume!(k.distance_to(&o).0 > 1e-3);
        let diameter = k.diameter();
        let mut prev = 0.0;
        for e in -4..=12 {
            let r = cone_ball_area_ratio(&k, &o, 2f64.powi(e) * diameter).unwrap();
            prop_assert!(r >= prev - 1e-6, "2^{}: {} < {}", e, r, prev);
            prev = r;
        }
    }

    #[test]
    fn slices_cover_twice(k in knot(3, 16)) {
        if let Ok(area) = total_slice_area(&k) {
            prop_assert!((area - 2.0 * total_curvature(&k).total).abs() <= 1e-9);
        }
    }

    #[test]
    fn scramble_replays_and_inverts(index in 0usize..3, seed in 0u64..500, steps in 0usize..25) {
        let k = fixture(index, seed);
        let (end, seq) = scramble(&k, steps, seed).unwrap();
        prop_assert_eq!(&replay_checked(&seq), &end);
        let back = seq.inverse();
        prop_assert_eq!(&back.initial, &end);
        let restored = back.replay().unwrap();
        prop_assert_eq!(restored.vertices(), k.vertices());
    }

    #[test]
    fn greedy_moves_are_legal(index in 0usize..4, seed in 0u64..500) {
        let k = fixture(index, seed);
        let (end, seq) = greedy_simplify(&k, 2000);
        prop_assert!(end.len() <= k.len());
        let mut sizes = vec![k.len()];
        let replayed = replay_checked(&seq);
        prop_assert_eq!(&replayed, &end);
        let mut cur = k.clone();
        for mv in &seq.moves {
            cur = apply_move(&cur, mv).unwrap();
            sizes.push(cur.len());
        }
        prop_assert!(sizes.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn height_reduction_takes_n_minus_3_moves(
        n in 4usize..40,
        wave in 1u32..5,
        amp in 0.0..0.6f64,
        tilt in (-0.2..0.2f64, -0.2..0.2f64),
    ) {
        let pts = (0..n)
            .map(|i| {
                let t = TAU * (i as f64 + 0.5) / n as f64;
                Vec3::new(t.cos(), t.sin(), amp * (wave as f64 * t).sin())
            })
            .collect();
        let k = PolygonalKnot::new(pts).unwrap();
        let u = Direction::new(Vec3::new(1.0, tilt.0, tilt.1)).unwrap();
        prop_assume!(knotcert::crofton::local_maxima_count(&k, &u).ok() == Some(1));
        let seq = unknot_by_height(&k, &u).unwrap();
        prop_assert_eq!(seq.moves.len(), n - 3);
        prop_assert_eq!(replay_checked(&seq).len(), 3);
    }

    #[test]
    fn bridge_certificates_replay(index in 1usize..4, seed in 0u64..200) {
        let k = fixture(index, seed);
        if let Some(cert) = bridge_certificate(&k, 200, seed) {
            prop_assert_eq!(cert.moves.initial.vertices(), k.vertices());
            prop_assert_eq!(replay_checked(&cert.moves).len(), 3);
        }
    }

    #[test]
    fn diagrams_satisfy_euler_and_chessboard(k in knot(4, 14), seed in 0u64..1000) {
        let Ok(d) = build_diagram(&k, None, seed) else { return Ok(()) };
        prop_assert_eq!(d.faces.len(), d.crossing_count() + 2);
        let coloring = color_faces(&d).unwrap();
        prop_assert_eq!(coloring.colors[d.unbounded_face], FaceColor::White);
        for s in &d.segments {
            prop_assert_ne!(coloring.colors[s.faces[0]], coloring.colors[s.faces[1]]);
        }
        for c in &d.crossings {
            let (hi, lo) = if c.over == c.edges[0] { (c.depths[0], c.depths[1]) } else { (c.depths[1], c.depths[0]) };
            prop_assert!(hi - lo > k.eps());
        }
        let planar_phi = d.planar_total_curvature();
        for o in &coloring.white_points {
            prop_assert!(d.planar_angular_length(o) <= planar_phi + 1e-9);
        }
    }

    #[test]
    fn plane_crossings_are_even(index in 0usize..4, seed in 0u64..500, u in unit(), offset in -1.5..1.5f64) {
        let k = fixture(index, seed);
        let c = k.centroid();
        let plane = Plane::new(u, u.dot(&c) + offset * k.diameter() / 2.0);
        prop_assert_eq!(plane_crossing_number(&k, &plane).count % 2, 0);
    }

    #[test]
    fn second_hull_lies_in_convex_hull(index in 0usize..4, seed in 0u64..200, x in coords()) {
        let k = fixture(index, seed);
        let c = k.centroid();
        let x = c + x * k.diameter() * 0.5;
        prop_assume!(k.distance_to(&x).0 > 1e-6);
        let second = hull_membership(&k, &x, 4, 100, seed);
        if second.min_count >= 4 {
            prop_assert!(hull_membership(&k, &x, 2, 100, seed).min_count >= 2);
        }
    }
}

/// Brute-force order type: which pairing of the line-ordered hits
/// interleaves along the knot.
fn order_oracle(positions: [f64; 4]) -> OrderType {
    let between = |x: f64, a: f64, b: f64| (a.min(b) < x) && (x < a.max(b));
    let interleave = |i: usize, j: usize, k: usize, l: usize| {
        between(positions[k], positions[i], positions[j]) != between(positions[l], positions[i], positions[j])
    };
    if interleave(0, 1, 2, 3) {
        OrderType::Alternating
    } else if interleave(0, 2, 1, 3) {
        OrderType::Simple
    } else {
        assert!(interleave(0, 3, 1, 2));
        OrderType::Flipped
    }
}

#[test]
fn quadrisecant_records_reverify() {
    let mut knots = vec![generate(KnotKind::TREFOIL, 0).unwrap()];
    knots.extend((0..6).map(|s| generate(KnotKind::RandomClosed { n: 14 }, s).unwrap()));
    let mut seen = 0;
    for k in &knots {
        let bound = 1e-7 * k.bbox_diagonal();
        let phi = total_curvature(k).total;
        for r in find_quadrisecants(k, QuadFilter::All).unwrap().records {
            seen += 1;
            assert!(r.hits.windows(2).all(|w| w[0].s <= w[1].s));
            for h in &r.hits {
                assert!(h.t >= 0.0 && h.t <= 1.0);
                assert!((k.point_on_edge(h.edge, h.t) - h.point).norm() <= bound);
                assert!((h.point - r.line.point).cross(&r.line.direction).norm() <= bound);
            }
            let pos = [0, 1, 2, 3].map(|i| r.hits[i].edge as f64 + r.hits[i].t);
            assert_eq!(order_oracle(pos), r.order);
            if r.order == OrderType::Alternating {
                let q = inscribe(k, &r.marks_in_knot_order()).unwrap();
                let quad = angle_sum(&q);
                assert!((quad - 2.0 * TAU).abs() <= 1e-9 && quad <= phi + 1e-9);
            }
        }
    }
    assert!(seen > 3, "only {seen} records");
}

#[test]
fn perturbed_fixtures_are_in_general_position() {
    for k in [generate(KnotKind::TREFOIL, 0).unwrap(), generate(KnotKind::ConvexNgon { n: 6, radius: 1.0 }, 0).unwrap()] {
        let m = 0.25 * knotcert::geom::clearance(&k);
        let passing = (0..100)
            .filter(|&s| {
                let p = perturb(&k, m, s).unwrap();
                check_general_position(&p, PositionMode::NoFourCoplanar, None).unwrap().pass
            })
            .count();
        assert!(passing >= 99, "{passing} of 100");
    }
}

#[test]
fn inscribed_second_hull_is_nested() {
    let k = generate(KnotKind::TREFOIL, 0).unwrap();
    let n = k.len();
    let c = k.centroid();
    for (i, stride) in [2usize, 3, 4].into_iter().enumerate() {
        let m: Vec<Mark> = (0..n).step_by(stride).map(|e| Mark::new(e, 0.25)).collect();
        let beta = PolygonalKnot::new(inscribe(&k, &m).unwrap()).unwrap();
        for j in 0..6 {
            let t = j as f64 / 6.0 * TAU;
            let x = c + Vec3::new(0.3 * t.cos(), 0.3 * t.sin(), 0.1 * (i as f64 - 1.0));
            let inner = hull_membership(&beta, &x, 4, 500, 7);
            if inner.min_count >= 4 {
                assert!(hull_membership(&k, &x, 4, 500, 7).min_count >= 4, "point {x:?} stride {stride}");
            }
        }
    }
}
