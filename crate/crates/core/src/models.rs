//! Exact solutions of `v Δv = |∇v|² - 1` with analytic jets.
//!
//! Radial families are written as `φ(r) = r g(ln r)`, which turns the
//! equation into `g g'' - g'² + 1 = 0` and makes all radial derivatives
//! simple combinations of the derivatives of `g`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BoundaryCurve;
use crate::jet::{EvalError, Jet, Solution};
use crate::point::Point;

/// Points within this distance of a puncture or boundary are refused.
const SINGULAR_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Unsupported(String),
}

/// The catalogue of exact solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `(R² - r²) / 2R` on the disc of radius `R`.
    Disc { radius: f64 },
    /// `(r² - R²) / 2R` outside the disc of radius `R`.
    ExteriorDisc { radius: f64 },
    /// `r A sin((ln r - ln R) / A)` on `R < r < 1/R`, `A = (2/π) ln(1/R)`.
    Annulus { r: f64 },
    /// `r B sin((ln r - ln R) / B)` on `R < r < 1`, `B = (1/π) ln(1/R)`.
    SubAnnulus { r: f64 },
    /// `r ln(1/r)` on the punctured unit disc.
    PuncturedDisc,
    /// The unit disc punctured at `z0`.
    DiscMinusPoint { z0: [f64; 2] },
    /// `r ln r` outside the unit disc.
    ExteriorLog,
    /// `(2L/π) cos(πy / 2L)` on the strip `|y| < L`.
    Strip { half_width: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Disc { .. } => "disc",
            Family::ExteriorDisc { .. } => "exterior_disc",
            Family::Annulus { .. } => "annulus",
            Family::SubAnnulus { .. } => "sub_annulus",
            Family::PuncturedDisc => "punctured_disc",
            Family::DiscMinusPoint { .. } => "disc_minus_point",
            Family::ExteriorLog => "exterior_log",
            Family::Strip { .. } => "strip",
        }
    }
}

/// Which boundary circle of a radial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Outer,
    Inner,
}

/// An exact solution with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSolution {
    family: Family,
}

/// `φ, φ', φ'', φ''', φ''''` of a radial profile.
type Profile = [f64; 5];

/// Radial profile of `r g(ln r)` from `g` and its first four derivatives.
fn log_profile(r: f64, g: [f64; 5]) -> Profile {
    let [g0, g1, g2, g3, g4] = g;
    [
        r * g0,
        g0 + g1,
        (g1 + g2) / r,
        (g3 - g1) / (r * r),
        ((g4 - g2) - 2.0 * (g3 - g1)) / (r * r * r),
    ]
}

/// `g = a sin((t - c)/a)` and its derivatives.
fn sine_log(t: f64, a: f64, c: f64) -> [f64; 5] {
    let th = (t - c) / a;
    let (s, co) = th.sin_cos();
    [a * s, co, -s / a, -co / (a * a), s / (a * a * a)]
}

fn radial_bilaplacian(r: f64, p: &Profile) -> f64 {
    p[4] + 2.0 * p[3] / r - p[2] / (r * r) + p[1] / (r * r * r)
}

fn positive(name: &str, x: f64) -> Result<(), ModelError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn modulus(x: f64) -> Result<(), ModelError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!(
            "R must lie in (0, 1), got {x}"
        )))
    }
}

/// `A = (2/π) ln(1/R)` for the annulus `B_{1/R} \ B_R`.
fn annulus_a(r: f64) -> f64 {
    2.0 / PI * (1.0 / r).ln()
}

impl ClosedFormSolution {
    pub fn new(family: Family) -> Result<Self, ModelError> {
        match family {
            Family::Disc { radius } | Family::ExteriorDisc { radius } => {
                positive("radius", radius)?
            }
            Family::Annulus { r } | Family::SubAnnulus { r } => modulus(r)?,
            Family::PuncturedDisc | Family::ExteriorLog => {}
            Family::DiscMinusPoint { z0 } => {
                let n = Point::from(z0).norm();
                if !(n < 1.0) {
                    return Err(ModelError::InvalidParameter(format!(
                        "z0 must lie in the unit disc, |z0| = {n}"
                    )));
                }
            }
            Family::Strip { half_width } => positive("half width", half_width)?,
        }
        Ok(Self { family })
    }

    pub fn disc(radius: f64) -> Result<Self, ModelError> {
        Self::new(Family::Disc { radius })
    }

    pub fn exterior_disc(radius: f64) -> Result<Self, ModelError> {
        Self::new(Family::ExteriorDisc { radius })
    }

    pub fn annulus(r: f64) -> Result<Self, ModelError> {
        Self::new(Family::Annulus { r })
    }

    pub fn sub_annulus(r: f64) -> Result<Self, ModelError> {
        Self::new(Family::SubAnnulus { r })
    }

    pub fn punctured_disc() -> Self {
        Self {
            family: Family::PuncturedDisc,
        }
    }

    pub fn disc_minus_point(z0: Point) -> Result<Self, ModelError> {
        Self::new(Family::DiscMinusPoint { z0: z0.into() })
    }

    pub fn exterior_log() -> Self {
        Self {
            family: Family::ExteriorLog,
        }
    }

    pub fn strip(half_width: f64) -> Result<Self, ModelError> {
        Self::new(Family::Strip { half_width })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Open radial interval of validity for the radial families.
    fn radial_range(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Disc { radius } => Some((0.0, radius)),
            Family::ExteriorDisc { radius } => Some((radius, f64::INFINITY)),
            Family::Annulus { r } => Some((r, 1.0 / r)),
            Family::SubAnnulus { r } => Some((r, 1.0)),
            Family::PuncturedDisc => Some((0.0, 1.0)),
            Family::ExteriorLog => Some((1.0, f64::INFINITY)),
            Family::DiscMinusPoint { .. } | Family::Strip { .. } => None,
        }
    }

    fn check_radius(&self, p: Point, r: f64, lo: f64, hi: f64) -> Result<(), EvalError> {
        let puncture = matches!(self.family, Family::PuncturedDisc);
        if r < lo - SINGULAR_MARGIN || r > hi + SINGULAR_MARGIN * hi.max(1.0) {
            return Err(EvalError::outside(p));
        }
        let near_lo = (r - lo).abs() <= SINGULAR_MARGIN * lo.max(1.0);
        let near_hi = hi.is_finite() && (r - hi).abs() <= SINGULAR_MARGIN * hi.max(1.0);
        if near_hi || (near_lo && (lo > 0.0 || puncture)) {
            return Err(EvalError::singular(p));
        }
        Ok(())
    }

    /// Radial profile with derivatives through fourth order.
    fn profile(&self, r: f64) -> Profile {
        let t = r.ln();
        match self.family {
            Family::Disc { radius } => [
                (radius * radius - r * r) / (2.0 * radius),
                -r / radius,
                -1.0 / radius,
                0.0,
                0.0,
            ],
            Family::ExteriorDisc { radius } => [
                (r * r - radius * radius) / (2.0 * radius),
                r / radius,
                1.0 / radius,
                0.0,
                0.0,
            ],
            Family::Annulus { r: rr } => log_profile(r, sine_log(t, annulus_a(rr), rr.ln())),
            Family::SubAnnulus { r: rr } => {
                log_profile(r, sine_log(t, (1.0 / rr).ln() / PI, rr.ln()))
            }
            Family::PuncturedDisc => log_profile(r, [-t, -1.0, 0.0, 0.0, 0.0]),
            Family::ExteriorLog => log_profile(r, [t, 1.0, 0.0, 0.0, 0.0]),
            Family::DiscMinusPoint { .. } | Family::Strip { .. } => {
                unreachable!("not a radial family")
            }
        }
    }

    /// Analytic jet; errors outside the open domain of validity.
    pub fn evaluate_jet(&self, p: Point) -> Result<Jet, EvalError> {
        if !p.is_finite() {
            return Err(EvalError::outside(p));
        }
        if let Some((lo, hi)) = self.radial_range() {
            let r = p.norm();
            self.check_radius(p, r, lo, hi)?;
            if r == 0.0 {
                // only the disc reaches the origin
                let Family::Disc { radius } = self.family else {
                    return Err(EvalError::singular(p));
                };
                let k = -1.0 / radius;
                return Ok(Jet::new(radius / 2.0, [0.0, 0.0], [[k, 0.0], [0.0, k]]));
            }
            let f = self.profile(r);
            return Ok(Jet::radial(p, Point::ORIGIN, [f[0], f[1], f[2]]));
        }
        match self.family {
            Family::Strip { half_width: l } => {
                if p.y.abs() > l + SINGULAR_MARGIN * l.max(1.0) {
                    return Err(EvalError::outside(p));
                }
                if (p.y.abs() - l).abs() <= SINGULAR_MARGIN * l.max(1.0) {
                    return Err(EvalError::singular(p));
                }
                let k = PI / (2.0 * l);
                let (s, c) = (k * p.y).sin_cos();
                Ok(Jet::new(c / k, [0.0, -s], [[0.0, 0.0], [0.0, -k * c]]))
            }
            Family::DiscMinusPoint { z0 } => disc_minus_point_jet(p, Point::from(z0)),
            _ => unreachable!("radial families handled above"),
        }
    }

    /// `Δ(Δv)` from analytic fourth derivatives.
    pub fn bilaplacian(&self, p: Point) -> Result<f64, EvalError> {
        let jet = self.evaluate_jet(p)?;
        if self.radial_range().is_some() {
            let r = p.norm();
            if r == 0.0 {
                return Ok(0.0);
            }
            return Ok(radial_bilaplacian(r, &self.profile(r)));
        }
        match self.family {
            Family::Strip { half_width: l } => {
                let k = PI / (2.0 * l);
                Ok(k.powi(4) * jet.value)
            }
            _ => Err(EvalError::Unsupported("analytic bilaplacian")),
        }
    }

    /// Printed `c₃` on the named boundary circle. Families without a
    /// printed expansion are rejected.
    pub fn model_c3(&self, side: Side) -> Result<f64, ModelError> {
        match (self.family, side) {
            (Family::Disc { .. }, Side::Outer) => Ok(0.0),
            (Family::ExteriorDisc { .. }, Side::Inner) => Ok(0.0),
            (Family::Annulus { r }, Side::Inner) => {
                let a = annulus_a(r);
                Ok(-1.0 / (6.0 * r * r) - 1.0 / (6.0 * (a * r).powi(2)))
            }
            (Family::Annulus { r }, Side::Outer) => {
                let a = annulus_a(r);
                Ok(-r * r / 6.0 - r * r / (6.0 * a * a))
            }
            (f, s) => Err(ModelError::Unsupported(format!(
                "no printed c3 for {} on the {} boundary",
                f.name(),
                match s {
                    Side::Outer => "outer",
                    Side::Inner => "inner",
                }
            ))),
        }
    }

    /// Boundary circles of the radial families, oriented with the domain on
    /// the left (outer first). Punctures are not curves and are omitted.
    pub fn boundary_curves(&self) -> Vec<(Side, BoundaryCurve)> {
        let circle = |r: f64| BoundaryCurve::circle(Point::ORIGIN, r).expect("positive radius");
        let hole = |r: f64| (Side::Inner, circle(r).reversed());
        match self.family {
            Family::Disc { radius } => vec![(Side::Outer, circle(radius))],
            Family::ExteriorDisc { radius } => vec![hole(radius)],
            Family::Annulus { r } => vec![(Side::Outer, circle(1.0 / r)), hole(r)],
            Family::SubAnnulus { r } => vec![(Side::Outer, circle(1.0)), hole(r)],
            Family::PuncturedDisc | Family::DiscMinusPoint { .. } => {
                vec![(Side::Outer, circle(1.0))]
            }
            Family::ExteriorLog => vec![hole(1.0)],
            Family::Strip { .. } => Vec::new(),
        }
    }

    /// Maps `(u, w) ∈ [0, 1)²` to a point of the domain of validity, kept a
    /// relative distance 1e-3 away from boundaries and punctures. Unbounded
    /// families are sampled out to five times the boundary radius.
    pub fn sample_interior(&self, u: f64, w: f64) -> Point {
        let s = 1e-3 + (1.0 - 2e-3) * u;
        let th = 2.0 * PI * w;
        let polar = |r: f64| Point::new(r * th.cos(), r * th.sin());
        let geometric = |lo: f64, hi: f64| polar((lo.ln() + s * (hi / lo).ln()).exp());
        match self.family {
            Family::Disc { radius } => polar(radius * s),
            Family::ExteriorDisc { radius } => polar(radius * (1.0 + 4.0 * s)),
            Family::Annulus { r } => geometric(r, 1.0 / r),
            Family::SubAnnulus { r } => geometric(r, 1.0),
            Family::PuncturedDisc => polar(s),
            Family::ExteriorLog => polar(1.0 + 4.0 * s),
            Family::DiscMinusPoint { z0 } => {
                // image of a punctured-disc sample under the automorphism
                // taking 0 to z0
                let z0 = Point::from(z0).to_complex();
                let q = polar(s).to_complex();
                Point::from_complex((q + z0) / (1.0 + z0.conj() * q))
            }
            Family::Strip { half_width } => {
                Point::new(10.0 * (w - 0.5), half_width * (2.0 * s - 1.0))
            }
        }
    }
}

impl Solution for ClosedFormSolution {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        self.evaluate_jet(p)
    }
}

/// `|z - z0| |1 - z̄0 z| / (1 - |z0|²) · ln(|1 - z̄0 z| / |z - z0|)`.
///
/// For `z0 ≠ 0`, `|1 - z̄0 z| = |z0| |z - z0*|` with `z0* = z0/|z0|²`, so
/// the value is a product of distance jets and their logarithms.
fn disc_minus_point_jet(p: Point, z0: Point) -> Result<Jet, EvalError> {
    let rho = p.distance(z0);
    if p.norm() > 1.0 + SINGULAR_MARGIN {
        return Err(EvalError::outside(p));
    }
    if rho <= SINGULAR_MARGIN || (p.norm() - 1.0).abs() <= SINGULAR_MARGIN {
        return Err(EvalError::singular(p));
    }
    let dist = Jet::radial(p, z0, [rho, 1.0, 0.0]);
    let log_dist = Jet::radial(p, z0, [rho.ln(), 1.0 / rho, -1.0 / (rho * rho)]);
    let m = z0.norm_sqr();
    if m == 0.0 {
        return Ok(dist.mul(&log_dist).scale(-1.0));
    }
    let star = z0 * (1.0 / m);
    let sigma = p.distance(star);
    let q = Jet::radial(p, star, [sigma, 1.0, 0.0]);
    let log_q = Jet::radial(p, star, [sigma.ln(), 1.0 / sigma, -1.0 / (sigma * sigma)]);
    let mut log_ratio = log_q.add(&log_dist.scale(-1.0));
    log_ratio.value += 0.5 * m.ln();
    let k = m.sqrt() / (1.0 - m);
    Ok(dist.mul(&q).mul(&log_ratio).scale(k))
}

/// Normalized integral `∫dl · ∫c₃ dl` on either boundary circle of the
/// annulus `B_{1/R} \ B_R`: `-2π²/3 - 2π²/(3A²)` with `A = (2/π) ln(1/R)`.
pub fn gap_value(r: f64) -> Result<f64, ModelError> {
    modulus(r)?;
    let a = annulus_a(r);
    Ok(-2.0 * PI * PI / 3.0 - 2.0 * PI * PI / (3.0 * a * a))
}

/// The same quantity assembled from the inner coefficient and the inner
/// perimeter `2πR`.
pub fn gap_value_from_c3(r: f64) -> Result<f64, ModelError> {
    let c3 = ClosedFormSolution::annulus(r)?.model_c3(Side::Inner)?;
    let len = 2.0 * PI * r;
    Ok(len * len * c3)
}

/// One sampled value of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub v: f64,
}

/// Samples `sol` on an `n × n` lattice over the box `[lo, hi]`, keeping
/// only valid points.
pub fn sample_field<S: Solution>(sol: &S, lo: Point, hi: Point, n: usize) -> Vec<FieldSample> {
    let mut out = Vec::new();
    let step = |a: f64, b: f64, i: usize| {
        if n == 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    };
    for j in 0..n {
        for i in 0..n {
            let p = Point::new(step(lo.x, hi.x, i), step(lo.y, hi.y, j));
            if let Ok(v) = sol.value(p) {
                out.push(FieldSample { x: p.x, y: p.y, v });
            }
        }
    }
    out
}

/// Writes `x,y,v` rows with a header.
pub fn write_field_csv<W: Write>(mut w: W, samples: &[FieldSample]) -> std::io::Result<()> {
    writeln!(w, "x,y,v")?;
    for s in samples {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", s.x, s.y, s.v)?;
    }
    Ok(())
}
