//! Total curvature, integral geometry and certificate checks for polygonal
//! knots.
//!
//! A [`PolygonalKnot`] is validated on construction. The modules compute
//! curvature quantities, Crofton-type averages, triangular isotopies, planar
//! diagrams with tricolorings, quadrisecants and second-hull witnesses, and
//! [`verify`] chains them into a [`verify::CertificateReport`].

pub mod crofton;
pub mod curvature;
pub mod diagram;
pub mod error;
pub mod geom;
pub mod hull2;
pub mod isotopy;
pub mod quadrisecant;
pub mod rng;
pub mod verify;

pub use error::{KnotError, Result};
pub use geom::{Direction, Plane, PolygonalKnot, Vec2, Vec3};
