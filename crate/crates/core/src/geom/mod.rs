//! Validated polygonal knots, general-position checks, perturbation and
//! fixture generators.

mod general;
mod generate;
pub mod io;
mod knot;
mod perturb;
pub mod predicates;

pub use general::{check_general_position, project, GeneralPositionReport, PositionMode, MIN_CROSSING_ANGLE};
pub use generate::{generate, KnotKind};
pub use knot::{is_simple, Direction, Plane, PolygonalKnot, SimplicityCheck, Violation, DEFAULT_REL_EPS};
pub use perturb::{clearance, make_generic, perturb, GENERIC_REL_MAGNITUDE, GENERIC_RETRIES};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;

/// Axis-aligned bounding box diagonal of a point set.
pub fn bbox_diagonal(points: &[Vec3]) -> f64 {
    let (lo, hi) = bbox(points);
    (hi - lo).norm()
}

pub fn bbox(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Orthonormal pair spanning the plane perpendicular to `u`.
pub fn orthonormal_frame(u: &Vec3) -> (Vec3, Vec3) {
    let helper = if u.x.abs() < 0.6 {
        Vec3::x()
    } else if u.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = u.cross(&helper).normalize();
    let e2 = u.cross(&e1);
    (e1, e2)
}
