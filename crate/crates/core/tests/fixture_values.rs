//! Fixture examples checked against oracles written here, with frozen values.

use std::f64::consts::{PI, TAU};

use knotcert::crofton::{bridge_certificate, crofton_estimate, min_maxima_scan, CroftonMode};
use knotcert::curvature::{angular_length, radial_projection, total_curvature};
use knotcert::diagram::{build_diagram, color_faces, point_in_polygon, tricolorable, FaceColor};
use knotcert::geom::{check_general_position, generate, is_simple, make_generic, perturb, KnotKind, PositionMode};
use knotcert::hull2::{in_second_hull, plane_crossing_number, second_hull_witness, spherical_crofton_check, HullVerdict};
use knotcert::isotopy::{apply_move, greedy_simplify, scramble, IsotopyMove};
use knotcert::{Direction, KnotError, Plane, PolygonalKnot, Vec2, Vec3};

/// Total curvature of the trefoil fixture, from the half-chord oracle below.
const TREFOIL_PHI: f64 = 17.655709902299968;

fn trefoil() -> PolygonalKnot {
    generate(KnotKind::TREFOIL, 0).unwrap()
}

fn half_chord_sum(v: &[Vec3]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = (v[i] - v[(i + n - 1) % n]).normalize();
            let b = (v[(i + 1) % n] - v[i]).normalize();
            if a.dot(&b) >= 0.0 {
                2.0 * ((a - b).norm() / 2.0).asin()
            } else {
                PI - 2.0 * ((a + b).norm() / 2.0).min(1.0).asin()
            }
        })
        .sum()
}

/// Lower bound on the distance between two segments: the minimum over a
/// parameter grid minus the Lipschitz bound on the grid error.
fn separation_lower_bound(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let steps = 200;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let (s, t) = (i as f64 / steps as f64, j as f64 / steps as f64);
            best = best.min((a + (b - a) * s - (c + (d - c) * t)).norm());
        }
    }
    best - ((b - a).norm() + (d - c).norm()) / (2.0 * steps as f64)
}

/// Möller–Trumbore: does the open segment `[p, q]` pass through the triangle?
fn segment_pierces(p: &Vec3, q: &Vec3, tri: &[Vec3; 3]) -> bool {
    let dir = q - p;
    let (e1, e2) = (tri[1] - tri[0], tri[2] - tri[0]);
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-15 {
        return false;
    }
    let s = p - tri[0];
    let u = s.dot(&h) / det;
    let qv = s.cross(&e1);
    let v = dir.dot(&qv) / det;
    let t = e2.dot(&qv) / det;
    u > 0.0 && v > 0.0 && u + v < 1.0 && t > 0.0 && t < 1.0
}

/// Quadruples with some vertex within `eps` of the plane of the other three.
fn coplanar_oracle(v: &[Vec3], eps: f64) -> Vec<Vec<usize>> {
    let n = v.len();
    let off_plane = |p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3| {
        let normal = (b - a).cross(&(c - a));
        (p - a).dot(&normal).abs() / normal.norm()
    };
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let q = [v[a], v[b], v[c], v[d]];
                    let lowest = (0..4)
                        .map(|i| {
                            let rest: Vec<&Vec3> = (0..4).filter(|&j| j != i).map(|j| &q[j]).collect();
                            off_plane(&q[i], rest[0], rest[1], rest[2])
                        })
                        .fold(f64::INFINITY, f64::min);
                    if lowest <= eps {
                        out.push(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn trefoil_curvature_constant() {
    let k = trefoil();
    let phi = total_curvature(&k).total;
    assert!((half_chord_sum(k.vertices()) - TREFOIL_PHI).abs() <= 1e-12);
    assert!((phi - TREFOIL_PHI).abs() <= 1e-12);
    assert!(phi >= 2.0 * TAU);
    let est = crofton_estimate(&k, CroftonMode::PlaneProjection, 20_000, 3).unwrap();
    assert!((est.mean - TREFOIL_PHI).abs() <= 3.0 * est.stderr);
}

#[test]
fn trefoil_is_simple_by_pairwise_oracle() {
    let k = trefoil();
    let v = k.vertices();
    let n = v.len();
    assert!(is_simple(v, None).unwrap().simple);
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            assert!(separation_lower_bound(&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]) > k.eps(), "edges {i} {j}");
        }
    }
}

#[test]
fn perturbation_breaks_coplanarity() {
    let t = trefoil();
    let exact = coplanar_oracle(t.vertices(), t.eps());
    assert_eq!(check_general_position(&t, PositionMode::NoFourCoplanar, None).unwrap().violations, exact);
    assert_eq!(exact.len(), 255);

    // An absolute magnitude of 1e-6 leaves a few of the symmetric
    // quadruples within eps_geom of a plane.
    let p = perturb(&t, 1e-6, 7).unwrap();
    let left = coplanar_oracle(p.vertices(), p.eps());
    assert_eq!(check_general_position(&p, PositionMode::NoFourCoplanar, None).unwrap().violations, left);
    assert!(!left.is_empty() && left.len() < 10);
    assert!(left.iter().all(|q| exact.contains(q)));

    let g = make_generic(&t, PositionMode::NoFourCoplanar, None, 7).unwrap();
    assert!(coplanar_oracle(g.vertices(), g.eps()).is_empty());

    let square = generate(KnotKind::ConvexNgon { n: 4, radius: 1.0 }, 0).unwrap();
    assert_eq!(coplanar_oracle(square.vertices(), square.eps()).len(), 1);
    let s = perturb(&square, 1e-6, 1).unwrap();
    for (p, q) in s.vertices().iter().zip(square.vertices()) {
        assert!((p - q).norm() <= 1e-6);
    }
    assert!(check_general_position(&s, PositionMode::NoFourCoplanar, None).unwrap().pass);
    assert!(coplanar_oracle(s.vertices(), s.eps()).is_empty());
}

#[test]
fn scrambled_unknot_42_is_certified() {
    let k = generate(KnotKind::ScrambledUnknot { steps: 100 }, 42).unwrap();
    let (end, seq) = greedy_simplify(&k, 10_000);
    assert_eq!(end.len(), 3);
    assert_eq!(seq.replay().unwrap(), end);
    // The bridge search is randomized; accept any of three seeds.
    let cert = (0..3).find_map(|s| bridge_certificate(&k, 10_000, s)).expect("certificate");
    let mut cur = k.clone();
    for mv in &cert.moves.moves {
        cur = apply_move(&cur, mv).unwrap();
        assert!(is_simple(cur.vertices(), None).unwrap().simple);
    }
    assert_eq!(cert.moves.moves.len(), k.len() - 3);
    assert_eq!(cur.len(), 3);
}

#[test]
fn trefoil_resists_simplification() {
    let k = trefoil();
    assert_eq!(min_maxima_scan(&k, 10_000).unwrap().0, 2);
    assert!(bridge_certificate(&k, 10_000, 0).is_none());
    let (end, seq) = greedy_simplify(&k, 10_000);
    assert!(!seq.reaches_triangle());
    assert!(end.len() >= 6);
}

#[test]
fn stalled_trefoil_reports_piercing_edges() {
    let (stalled, _) = greedy_simplify(&trefoil(), 10_000);
    let n = stalled.len();
    let mut confirmed = 0;
    for k in 0..n {
        let mv = IsotopyMove::remove(&stalled, k).unwrap();
        let e = match apply_move(&stalled, &mv) {
            Err(KnotError::BlockedTriangle(e)) => e,
            other => panic!("vertex {k}: {other:?}"),
        };
        let tri = [stalled.vertex(k as isize - 1), stalled.vertex(k as isize), stalled.vertex(k as isize + 1)];
        let piercing: Vec<usize> = (0..n)
            .filter(|&j| ![(k + n - 2) % n, (k + n - 1) % n, k, (k + 1) % n].contains(&j))
            .filter(|&j| {
                let (p, q) = stalled.edge(j);
                segment_pierces(&p, &q, &tri)
            })
            .collect();
        let adjacent = [(k + n - 2) % n, (k + 1) % n];
        assert!(piercing.contains(&e) || adjacent.contains(&e) || piercing.is_empty(), "vertex {k}: {e} vs {piercing:?}");
        if piercing.contains(&e) {
            confirmed += 1;
        }
    }
    assert!(confirmed > 0);
}

#[test]
fn scrambled_triangle_reverses() {
    let tri = generate(KnotKind::ConvexNgon { n: 3, radius: 1.0 }, 0).unwrap();
    let (end, seq) = scramble(&tri, 100, 7).unwrap();
    assert!(is_simple(end.vertices(), None).unwrap().simple);
    assert_eq!(seq.inverse().replay().unwrap().vertices(), tri.vertices());
}

#[test]
fn trefoil_center_face_is_white() {
    let d = build_diagram(&trefoil(), Some(&Direction::new(Vec3::z()).unwrap()), 0).unwrap();
    let c = color_faces(&d).unwrap();
    assert_eq!(c.white_faces.len(), 1);
    let face = &d.faces[c.white_faces[0]];
    assert!(face.bounded && face.color == FaceColor::White);
    // The white face of the standard picture is the central one.
    assert!(point_in_polygon(&Vec2::zeros(), &face.polygon));
    assert!(point_in_polygon(&c.white_points[0], &face.polygon));
    assert_eq!(tricolorable(&d).unwrap().colors_used(), 3);
}

#[test]
fn eight_crossing_unknot_coloring_checks_out() {
    let k = generate(KnotKind::ScrambledUnknot { steps: 100 }, 116).unwrap();
    let d = build_diagram(&k, None, 0).unwrap();
    assert_eq!(d.crossing_count(), 8);
    assert_eq!(d.faces.len(), 10);
    let colors = color_faces(&d).unwrap().colors;
    // Each face boundary segment separates faces of opposite colors.
    for s in &d.segments {
        assert_ne!(colors[s.faces[0]], colors[s.faces[1]]);
    }
    assert!(tricolorable(&d).is_none());
}

#[test]
fn trefoil_meets_horizontal_plane_evenly() {
    let k = trefoil();
    let count = plane_crossing_number(&k, &Plane::new(Direction::new(Vec3::z()).unwrap(), 0.0)).count;
    let n = k.len();
    let oracle = (0..n).filter(|&i| (k.vertices()[i].z > 0.0) != (k.vertices()[(i + 1) % n].z > 0.0)).count();
    assert_eq!(count, oracle);
    assert!(count >= 2 && count % 2 == 0);
}

#[test]
fn trefoil_axis_point_is_inside() {
    let k = trefoil();
    let w = in_second_hull(&k, &k.centroid(), 10_000, 0);
    assert_eq!(w.verdict, HullVerdict::InsideSampled);
    assert_eq!(w.min_count, 4);
    assert!(w.planes_tested > 10_000);
}

#[test]
fn trefoil_witness_chain() {
    let k = trefoil();
    let (o, _) = second_hull_witness(&k, 9, 10_000, 0).unwrap().unwrap();
    let psi = angular_length(&k, &o).unwrap();
    let sphere = radial_projection(&k, &o).unwrap();
    assert!(psi >= 2.0 * TAU - 1e-6 && psi <= TREFOIL_PHI);
    assert!((sphere.length() - psi).abs() <= 1e-9);
    let c = spherical_crofton_check(&sphere, 100_000, 0).unwrap();
    assert!((c.crofton - c.length).abs() <= 3.0 * c.stderr);
    assert!(c.crofton >= 2.0 * TAU - 3.0 * c.stderr);
}
