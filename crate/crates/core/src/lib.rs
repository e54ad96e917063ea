//! Numerical laboratory for complete hyperbolic metrics on bounded planar
//! domains.
//!
//! The metric `v^{-2}|dz|^2` has Gauss curvature `-1` exactly when the
//! defining function `v` satisfies `v Δv = |∇v|^2 - 1` with `v = 0` on the
//! boundary. Near a smooth boundary curve
//!
//! ```text
//! v = d - κ d²/2 + c₃ d³ + O(d^{3+α})
//! ```
//!
//! where `d` is the distance to the boundary and `κ` its curvature. The
//! coefficient `c₃` is global: it depends on the whole domain. This crate
//! computes `v` (closed forms, conformal transport, or a finite-difference
//! Newton solve), extracts `c₃` along boundary curves, and checks the
//! integral identities and inequalities satisfied by `∫ c₃ dl`.
//!
//! Module map:
//! - [`geometry`]: boundary curves, domains, projection, curvature.
//! - [`models`]: exact solutions with analytic jets.
//! - [`conformal`]: holomorphic maps, Schwarzian, transport of solutions.
//! - [`solver`]: embedded-boundary grid and damped Newton solve.
//! - [`expansion`]: extraction of `c₃` and boundary integrals.
//! - [`verify`]: identity and inequality checks with verdicts.

pub mod conformal;
pub mod expansion;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod point;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use jet::{EvalError, Jet, Solution};
pub use point::Point;

/// The sharp upper bound `-2π²/3` for the normalized boundary integral on
/// every boundary curve of a multiply connected domain.
pub const GAP_CONSTANT: f64 = -2.0 * std::f64::consts::PI * std::f64::consts::PI / 3.0;
