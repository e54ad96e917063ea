//! Second-order jets of scalar fields and the chain rule used to transport
//! them through conformal and anti-conformal maps.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point ({x}, {y}) is outside the domain of validity")]
    OutsideDomain { x: f64, y: f64 },
    #[error("point ({x}, {y}) is at a puncture or on the boundary")]
    Singular { x: f64, y: f64 },
    #[error("point ({x}, {y}) is too close to the grid boundary for interpolation")]
    OutsideGrid { x: f64, y: f64 },
    #[error("map derivative vanishes at ({x}, {y})")]
    CriticalPoint { x: f64, y: f64 },
    #[error("no preimage found for ({x}, {y})")]
    NoPreimage { x: f64, y: f64 },
    #[error("{0} is not available for this solution")]
    Unsupported(&'static str),
}

impl EvalError {
    pub(crate) fn outside(p: Point) -> Self {
        EvalError::OutsideDomain { x: p.x, y: p.y }
    }

    pub(crate) fn singular(p: Point) -> Self {
        EvalError::Singular { x: p.x, y: p.y }
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl Jet {
    pub fn new(value: f64, grad: [f64; 2], hess: [[f64; 2]; 2]) -> Self {
        Self { value, grad, hess }
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }

    pub fn grad_norm_sqr(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }

    /// `v Δv - |∇v|² + 1`, zero for an exact solution.
    pub fn residual(&self) -> f64 {
        self.value * self.laplacian() - self.grad_norm_sqr() + 1.0
    }

    /// Residual scaled by the size of its terms.
    pub fn relative_residual(&self) -> f64 {
        let scale = 1.0 + (self.value * self.laplacian()).abs() + self.grad_norm_sqr();
        self.residual().abs() / scale
    }

    /// `(v_xx - v_yy)² + 4 v_xy²`: the squared eigenvalue gap of the Hessian.
    pub fn hessian_gap_sqr(&self) -> f64 {
        let a = self.hess[0][0] - self.hess[1][1];
        let b = self.hess[0][1];
        a * a + 4.0 * b * b
    }

    /// `∂²v/∂z² = (v_xx - v_yy - 2i v_xy) / 4`.
    pub fn d2z(&self) -> Complex64 {
        Complex64::new(
            0.25 * (self.hess[0][0] - self.hess[1][1]),
            -0.5 * self.hess[0][1],
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        let h = self.hess;
        Jet::new(
            k * self.value,
            [k * self.grad[0], k * self.grad[1]],
            [[k * h[0][0], k * h[0][1]], [k * h[1][0], k * h[1][1]]],
        )
    }

    pub fn add(&self, other: &Jet) -> Self {
        let mut out = *self;
        out.value += other.value;
        for i in 0..2 {
            out.grad[i] += other.grad[i];
            for j in 0..2 {
                out.hess[i][j] += other.hess[i][j];
            }
        }
        out
    }

    /// Jet of the pointwise product.
    pub fn mul(&self, other: &Jet) -> Self {
        let (f, g) = (self, other);
        let mut out = Jet::new(f.value * g.value, [0.0; 2], [[0.0; 2]; 2]);
        for i in 0..2 {
            out.grad[i] = f.grad[i] * g.value + f.value * g.grad[i];
            for j in 0..2 {
                out.hess[i][j] = f.hess[i][j] * g.value
                    + f.grad[i] * g.grad[j]
                    + f.grad[j] * g.grad[i]
                    + f.value * g.hess[i][j];
            }
        }
        out
    }

    /// Jet of a radial profile `φ(|p - c|)` given `φ, φ', φ''` at `r > 0`.
    pub fn radial(p: Point, center: Point, phi: [f64; 3]) -> Self {
        let d = p - center;
        let r = d.norm();
        let (ux, uy) = (d.x / r, d.y / r);
        let [f, f1, f2] = phi;
        let t = f1 / r;
        Jet::new(
            f,
            [f1 * ux, f1 * uy],
            [
                [f2 * ux * ux + t * uy * uy, (f2 - t) * ux * uy],
                [(f2 - t) * ux * uy, f2 * uy * uy + t * ux * ux],
            ],
        )
    }
}

/// Values of a holomorphic map and its first three complex derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoloJet {
    pub f: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl HoloJet {
    pub fn new(f: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Self { f, d1, d2, d3 }
    }

    /// `g ∘ self` by Faà di Bruno, where `outer` is the jet of `g` at `self.f`.
    pub fn then(&self, outer: &HoloJet) -> HoloJet {
        let (f1, f2, f3) = (self.d1, self.d2, self.d3);
        let (g1, g2, g3) = (outer.d1, outer.d2, outer.d3);
        HoloJet {
            f: outer.f,
            d1: g1 * f1,
            d2: g2 * f1 * f1 + g1 * f2,
            d3: g3 * f1 * f1 * f1 + 3.0 * g2 * f1 * f2 + g1 * f3,
        }
    }

    /// Jet of the local inverse at `self.f`; its value is the preimage `z`
    /// which the caller supplies.
    pub fn inverse(&self, z: Complex64) -> HoloJet {
        let i1 = self.d1.inv();
        let i2 = -self.d2 * i1 * i1 * i1;
        let i3 = -self.d3 * i1.powi(4) + 3.0 * self.d2 * self.d2 * i1.powi(5);
        HoloJet::new(z, i1, i2, i3)
    }

    /// `f''' / f' - 3/2 (f'' / f')²`.
    pub fn schwarzian(&self) -> Complex64 {
        let q = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * q * q
    }
}

/// Jet at `z` of `v₁(z) = v₂(F(z)) / |h'(z)|` where `F = h` (or `F = conj h`
/// when `anti` is set) and `base` is the jet of `v₂` at `F(z)`.
///
/// With `anti = false` this is the conformal transport law; with
/// `anti = true` and `h(z) = conj(z₀) + 1/(z - z₀)` it is the Kelvin
/// inversion `v₂(z₀ + (z - z₀)/|z - z₀|²) |z - z₀|²`.
pub fn transport(base: &Jet, map: &HoloJet, anti: bool) -> Jet {
    let a = map.d1.re;
    let b = map.d1.im;
    let c = map.d2.re;
    let d = map.d2.im;
    let sgn = if anti { -1.0 } else { 1.0 };
    // jac[k][i] = ∂F_k/∂x_i
    let jac = [[a, -b], [sgn * b, sgn * a]];
    // sec[k] = Hessian of F_k
    let sec = [
        [[c, -d], [-d, -c]],
        [[sgn * d, sgn * c], [sgn * c, -sgn * d]],
    ];

    let mut grad_u = [0.0; 2];
    let mut hess_u = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            grad_u[i] += jac[k][i] * base.grad[k];
        }
        for j in 0..2 {
            let mut s = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    s += jac[k][i] * jac[l][j] * base.hess[k][l];
                }
                s += base.grad[k] * sec[k][i][j];
            }
            hess_u[i][j] = s;
        }
    }

    // λ = 1/|h'| = exp(ψ), ψ = -Re log h'
    let g1 = map.d2 / map.d1;
    let g2 = map.d3 / map.d1 - g1 * g1;
    let lam = map.d1.norm().recip();
    let dpsi = [-g1.re, g1.im];
    let hpsi = [[-g2.re, g2.im], [g2.im, g2.re]];
    let dlam = [lam * dpsi[0], lam * dpsi[1]];
    let mut hlam = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            hlam[i][j] = lam * (dpsi[i] * dpsi[j] + hpsi[i][j]);
        }
    }

    let u = base.value;
    let mut grad = [0.0; 2];
    let mut hess = [[0.0; 2]; 2];
    for i in 0..2 {
        grad[i] = lam * grad_u[i] + u * dlam[i];
        for j in 0..2 {
            hess[i][j] =
                lam * hess_u[i][j] + dlam[i] * grad_u[j] + grad_u[i] * dlam[j] + u * hlam[i][j];
        }
    }
    Jet::new(lam * u, grad, hess)
}

/// A function `v` defined on (part of) the plane with evaluable jets.
pub trait Solution: Send + Sync {
    fn jet(&self, p: Point) -> Result<Jet, EvalError>;

    fn value(&self, p: Point) -> Result<f64, EvalError> {
        Ok(self.jet(p)?.value)
    }

    /// `Δv` at `p`. Grid-based solutions override this with an interpolated
    /// discrete Laplacian.
    fn laplacian(&self, p: Point) -> Result<f64, EvalError> {
        Ok(self.jet(p)?.laplacian())
    }

    /// Grid spacing for discrete solutions, `None` for analytic ones.
    fn grid_spacing(&self) -> Option<f64> {
        None
    }
}

impl<S: Solution + ?Sized> Solution for Arc<S> {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        (**self).jet(p)
    }
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        (**self).value(p)
    }
    fn laplacian(&self, p: Point) -> Result<f64, EvalError> {
        (**self).laplacian(p)
    }
    fn grid_spacing(&self) -> Option<f64> {
        (**self).grid_spacing()
    }
}

impl<S: Solution + ?Sized> Solution for &S {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        (**self).jet(p)
    }
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        (**self).value(p)
    }
    fn laplacian(&self, p: Point) -> Result<f64, EvalError> {
        (**self).laplacian(p)
    }
    fn grid_spacing(&self) -> Option<f64> {
        (**self).grid_spacing()
    }
}

impl<S: Solution + ?Sized> Solution for Box<S> {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        (**self).jet(p)
    }
    fn value(&self, p: Point) -> Result<f64, EvalError> {
        (**self).value(p)
    }
    fn laplacian(&self, p: Point) -> Result<f64, EvalError> {
        (**self).laplacian(p)
    }
    fn grid_spacing(&self) -> Option<f64> {
        (**self).grid_spacing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_jet_composes_to_identity() {
        let f = HoloJet::new(c(0.3, 0.1), c(1.2, -0.4), c(0.5, 0.7), c(-0.2, 0.9));
        let g = f.inverse(c(0.0, 0.0));
        let id = f.then(&g);
        assert!((id.d1 - 1.0).norm() < 1e-14);
        assert!(id.d2.norm() < 1e-14);
        assert!(id.d3.norm() < 1e-13);
    }

    #[test]
    fn radial_jet_matches_quadratic() {
        // φ(r) = r² has Hessian 2I everywhere
        let p = Point::new(0.3, -0.7);
        let r = p.norm();
        let jet = Jet::radial(p, Point::ORIGIN, [r * r, 2.0 * r, 2.0]);
        assert!((jet.hess[0][0] - 2.0).abs() < 1e-14);
        assert!((jet.hess[1][1] - 2.0).abs() < 1e-14);
        assert!(jet.hess[0][1].abs() < 1e-14);
        assert!((jet.grad[0] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn transport_by_identity_is_identity() {
        let base = Jet::new(0.4, [0.1, -0.2], [[1.0, 0.3], [0.3, -2.0]]);
        let id = HoloJet::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let out = transport(&base, &id, false);
        assert_eq!(out, base);
    }
}
