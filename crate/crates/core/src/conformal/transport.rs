use num_complex::Complex64;
use serde::Serialize;

use crate::geometry::{polyline_self_intersects, polyline_separation, PlanarDomain};
use crate::jet::{transport, EvalError, HoloJet, Jet, Solution};
use crate::point::Point;

use super::map::{HolomorphicMap, InverseConfig, CRITICAL_TOL};
use super::ConformalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `v₁(z) = v₂(f(z)) / |f'(z)|` on the source of `f`.
    Pullback,
    /// `v₂(w) = v₁(f⁻¹(w)) |f'(f⁻¹(w))|` on the image of `f`.
    Pushforward,
}

/// A solution carried through a holomorphic map.
#[derive(Debug, Clone)]
pub struct TransportedSolution<S> {
    base: S,
    map: HolomorphicMap,
    direction: Direction,
    inverse: Option<InverseConfig>,
}

impl<S: Solution> TransportedSolution<S> {
    /// Pullback of `base` (a solution on `f(Ω₁)`) to `Ω₁`.
    pub fn pullback(base: S, map: HolomorphicMap) -> Self {
        Self {
            base,
            map,
            direction: Direction::Pullback,
            inverse: None,
        }
    }

    /// Pushforward of `base` (a solution on `Ω₁`) to `f(Ω₁)`. Maps without
    /// a closed-form inverse need `inverse` to locate preimages.
    pub fn pushforward(base: S, map: HolomorphicMap, inverse: Option<InverseConfig>) -> Self {
        Self {
            base,
            map,
            direction: Direction::Pushforward,
            inverse,
        }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn map(&self) -> &HolomorphicMap {
        &self.map
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    fn pullback_jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        let fj = self.map.jet(z)?;
        if fj.d1.norm() < CRITICAL_TOL {
            return Err(EvalError::CriticalPoint { x: z.re, y: z.im });
        }
        let base = self.base.jet(Point::from_complex(fj.f))?;
        Ok(transport(&base, &fj, false))
    }

    fn pushforward_jet(&self, w: Complex64) -> Result<Jet, EvalError> {
        let z = match self.map.inverse_closed_form(w) {
            Some(z) if z.is_finite() => z,
            Some(_) => return Err(EvalError::NoPreimage { x: w.re, y: w.im }),
            None => {
                let cfg = self.inverse.as_ref().ok_or(EvalError::Unsupported(
                    "numeric inverse without a search box",
                ))?;
                self.map.inverse(w, cfg)?
            }
        };
        let fj = self.map.jet(z)?;
        if fj.d1.norm() < CRITICAL_TOL {
            return Err(EvalError::CriticalPoint { x: z.re, y: z.im });
        }
        let gj = fj.inverse(z);
        let base = self.base.jet(Point::from_complex(z))?;
        Ok(transport(&base, &gj, false))
    }
}

impl<S: Solution> Solution for TransportedSolution<S> {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        match self.direction {
            Direction::Pullback => self.pullback_jet(p.to_complex()),
            Direction::Pushforward => self.pushforward_jet(p.to_complex()),
        }
    }
}

/// `v̂(z) = v(z₀ + (z - z₀)/|z - z₀|²) |z - z₀|²`.
#[derive(Debug, Clone)]
pub struct KelvinSolution<S> {
    base: S,
    center: Point,
}

/// Kelvin inversion of `base` about `center`.
pub fn kelvin_transport<S: Solution>(base: S, center: Point) -> KelvinSolution<S> {
    KelvinSolution { base, center }
}

impl<S> KelvinSolution<S> {
    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn center(&self) -> Point {
        self.center
    }
}

impl<S: Solution> Solution for KelvinSolution<S> {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        let q = p - self.center;
        if q.norm() < CRITICAL_TOL {
            return Err(EvalError::singular(p));
        }
        // F = conj(h) with h(z) = conj(z₀) + 1/(z - z₀)
        let u = q.to_complex().inv();
        let h = HoloJet::new(
            self.center.to_complex().conj() + u,
            -u * u,
            2.0 * u * u * u,
            -6.0 * u * u * u * u,
        );
        let image = Point::from_complex(h.f.conj());
        let base = self.base.jet(image)?;
        Ok(transport(&base, &h, true))
    }
}

/// Evidence from a sampled univalence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnivalenceReport {
    /// Interior lattice points examined.
    pub samples: usize,
    /// Smallest `|f'|` over interior samples.
    pub min_derivative: f64,
    /// Smallest `|f'|` over the sampled boundary curves.
    pub min_boundary_derivative: f64,
}

/// Samples per boundary curve in the univalence check.
const BOUNDARY_SAMPLES: usize = 1024;

/// Sampled univalence test of `map` on `domain`: `f'` nonzero on an
/// `n × n` lattice and on the boundary, images of distinct lattice points
/// distinct, and the image of each boundary curve a simple closed polyline
/// disjoint from the others.
pub fn check_univalent(
    map: &HolomorphicMap,
    domain: &PlanarDomain,
    n: usize,
) -> Result<UnivalenceReport, ConformalError> {
    let (lo, hi) = domain.bounding_box();
    let mut images = Vec::new();
    let mut min_derivative = f64::INFINITY;
    for j in 0..n {
        for i in 0..n {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64,
                lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64,
            );
            if !domain.contains(p) {
                continue;
            }
            let jet = map.jet(p.to_complex())?;
            let d = jet.d1.norm();
            if d < CRITICAL_TOL {
                return Err(ConformalError::CriticalPoint { x: p.x, y: p.y });
            }
            min_derivative = min_derivative.min(d);
            images.push(Point::from_complex(jet.f));
        }
    }
    // pairwise distinctness via sorting on x
    let scale = images.iter().fold(0.0f64, |m, q| m.max(q.norm())).max(1.0);
    let tol = 1e-12 * scale;
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| images[a].x.total_cmp(&images[b].x));
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if images[b].x - images[a].x > tol {
                break;
            }
            if images[a].distance(images[b]) <= tol {
                return Err(ConformalError::NotUnivalent(
                    "two lattice points share an image".into(),
                ));
            }
        }
    }
    let mut min_boundary_derivative = f64::INFINITY;
    let mut polylines = Vec::new();
    for curve in domain.curves() {
        let mut poly = Vec::with_capacity(BOUNDARY_SAMPLES);
        for k in 0..BOUNDARY_SAMPLES {
            let s = std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64;
            let p = curve.position(s);
            let jet = map.jet(p.to_complex())?;
            min_boundary_derivative = min_boundary_derivative.min(jet.d1.norm());
            poly.push(Point::from_complex(jet.f));
        }
        if polyline_self_intersects(&poly, 1e-9 * scale) {
            return Err(ConformalError::NotUnivalent(
                "image of a boundary curve intersects itself".into(),
            ));
        }
        polylines.push(poly);
    }
    if min_boundary_derivative < CRITICAL_TOL {
        return Err(ConformalError::NotUnivalent(
            "derivative vanishes on the boundary".into(),
        ));
    }
    for i in 0..polylines.len() {
        for j in 0..i {
            if polyline_separation(&polylines[i], &polylines[j]) <= 1e-9 * scale {
                return Err(ConformalError::NotUnivalent(
                    "images of two boundary curves meet".into(),
                ));
            }
        }
    }
    Ok(UnivalenceReport {
        samples: images.len(),
        min_derivative,
        min_boundary_derivative,
    })
}
