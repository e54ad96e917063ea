//! Holomorphic maps, the Schwarzian derivative and transport of solutions.
//!
//! If `f: Ω₁ → Ω₂` is univalent and `v₂` solves the equation on `Ω₂`, then
//! `v₁ = v₂(f) / |f'|` solves it on `Ω₁`. Second derivatives transform
//! with a Schwarzian correction, which is what makes the global
//! coefficient computable from data on `Ω₁` alone.

mod map;
mod transport;

use thiserror::Error;

pub use map::{ComplexSpec, HolomorphicMap, InverseConfig, MapSpec, CRITICAL_TOL};
pub use transport::{
    check_univalent, kelvin_transport, Direction, KelvinSolution, TransportedSolution,
    UnivalenceReport,
};

use crate::geometry::GeometryError;
use crate::jet::{EvalError, Solution};
use crate::point::Point;
use crate::quadrature::{integrate_polar, PolarRegion, Refined};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("map derivative vanishes at ({x}, {y})")]
    CriticalPoint { x: f64, y: f64 },
    #[error("map is not univalent: {0}")]
    NotUnivalent(String),
    #[error("quadrature did not converge: last change {change:e} exceeds {tol:e}")]
    Accuracy { value: f64, change: f64, tol: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cannot parse map spec: {0}")]
    Parse(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `v_k(x) = k v(x / k)`, the solution on `kΩ`.
pub fn rescale<S: Solution>(base: S, k: f64) -> Result<TransportedSolution<S>, ConformalError> {
    check_scale(k)?;
    let map = HolomorphicMap::affine((1.0 / k).into(), 0.0.into())?;
    Ok(TransportedSolution::pullback(base, map))
}

/// `c₃` on `kΩ` at the point corresponding to a point with coefficient `c3`.
pub fn c3_rescale(c3: f64, k: f64) -> Result<f64, ConformalError> {
    check_scale(k)?;
    Ok(c3 / (k * k))
}

fn check_scale(k: f64) -> Result<(), ConformalError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ConformalError::InvalidParameter(format!(
            "scale factor must be positive, got {k}"
        )))
    }
}

/// Quadrature settings for [`global_term_transform_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Stop when successive refinements differ by less than this.
    pub tol: f64,
    /// Initial radial and angular node counts.
    pub start: (usize, usize),
    /// Maximum number of doublings.
    pub max_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            start: (16, 32),
            max_levels: 6,
        }
    }
}

/// `∫_{∂f(Ω₁)} c₃ dl` computed on `Ω₁`:
///
/// ```text
/// -∫_{Ω₁} 8 |∂²_z v₁ + ½ v₁ S(f)|² / (3 v₁ |f'|) dA
/// ```
///
/// where `v₁` is the solution on `Ω₁` and `Ω₁` is the polar region.
pub fn global_term_transform_integral<S: Solution>(
    v1: &S,
    map: &HolomorphicMap,
    region: &PolarRegion,
    spec: &QuadratureSpec,
) -> Result<Refined, ConformalError> {
    let integrand = |p: Point| -> Result<f64, EvalError> {
        let z = p.to_complex();
        let fj = map.jet(z)?;
        if fj.d1.norm() < CRITICAL_TOL {
            return Err(EvalError::CriticalPoint { x: p.x, y: p.y });
        }
        let jet = v1.jet(p)?;
        let w = jet.d2z() + 0.5 * jet.value * fj.schwarzian();
        Ok(-8.0 * w.norm_sqr() / (3.0 * jet.value * fj.d1.norm()))
    };
    let res = integrate_polar(region, integrand, spec.tol, spec.start, spec.max_levels)?;
    if !res.converged {
        return Err(ConformalError::Accuracy {
            value: res.value,
            change: res.change,
            tol: spec.tol,
        });
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ClosedFormSolution, Side};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rescale_examples() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let big = rescale(disc, 2.0).unwrap();
        assert!((big.value(Point::ORIGIN).unwrap() - 1.0).abs() < 1e-15);
        let c3 = ClosedFormSolution::annulus(0.5)
            .unwrap()
            .model_c3(Side::Inner)
            .unwrap();
        assert!((c3_rescale(c3, 3.0).unwrap() - (-0.45448682324488557)).abs() < 1e-12);
        assert!(rescale(disc, 0.0).is_err());
        assert!(c3_rescale(1.0, -1.0).is_err());
    }

    #[test]
    fn mobius_global_term_vanishes() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let m = HolomorphicMap::mobius(c(1.0, 0.2), c(0.1, 0.0), c(0.2, 0.1), c(2.0, 0.0)).unwrap();
        let region = PolarRegion::disc(Point::ORIGIN, 1.0);
        let res =
            global_term_transform_integral(&disc, &m, &region, &QuadratureSpec::default()).unwrap();
        assert!(res.value.abs() < 1e-12);
    }

    #[test]
    fn corollary_values_match_oracle() {
        // polar quadrature oracle of -∫(1-|z|²)|S|²/(3|f'|), computed
        // independently at high precision
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let region = PolarRegion::disc(Point::ORIGIN, 1.0);
        for (a, oracle) in [(0.1, -0.0020522034136468057), (0.2, -0.043340169998254953)] {
            let f = HolomorphicMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(a, 0.0)]).unwrap();
            let res =
                global_term_transform_integral(&disc, &f, &region, &QuadratureSpec::default())
                    .unwrap();
            assert!((res.value - oracle).abs() < 1e-8, "a = {a}: {}", res.value);
        }
    }
}
