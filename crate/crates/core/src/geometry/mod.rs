//! Boundary curves, planar domains and nearest-point queries.

mod curve;
mod domain;
mod spec;

use thiserror::Error;

pub(crate) use curve::{polyline_self_intersects, polyline_separation};
pub use curve::{winding_number, BoundaryCurve, CurveFrame, CurveShape, FourierCurve};
pub use domain::{BoundaryFoot, Location, PlanarDomain};
pub use spec::{CurveSpec, DomainSpec};

use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate tangent at s = {s}")]
    Irregular { s: f64 },
    #[error("curve does not close up")]
    NotClosed,
    #[error("curve intersects itself")]
    SelfIntersecting,
    #[error("hole {0} is not strictly inside the outer curve")]
    HoleOutside(usize),
    #[error("holes {0} and {1} overlap")]
    HolesOverlap(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse domain spec: {0}")]
    Parse(String),
}

/// Signed curvature of `curve` at parameter `s`.
pub fn curvature(curve: &BoundaryCurve, s: f64) -> Result<f64, GeometryError> {
    curve.curvature(s)
}

/// Nearest boundary point of `domain` to `p`.
pub fn project_to_boundary(domain: &PlanarDomain, p: Point) -> BoundaryFoot {
    domain.project(p)
}

/// Whether `p` lies strictly inside `domain`.
pub fn contains(domain: &PlanarDomain, p: Point) -> bool {
    domain.contains(p)
}

pub fn perimeter(curve: &BoundaryCurve) -> f64 {
    curve.perimeter()
}
