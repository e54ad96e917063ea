//! Extraction of the boundary coefficient `c₃` from a solution.
//!
//! Along the inward normal from a boundary point `y`,
//! `v(y + t n) = t - κ t²/2 + c₃ t³ + …`. Two estimators are provided:
//! a least-squares fit of `v - t + κt²/2` with `κ` taken from the geometry,
//! and the slope of `Δv = -2κ + 6 c₃ d + …` in the distance `d`. For
//! analytic jets the slope is extrapolated to `d = 0` from a halving
//! sequence of distances, which adapts to the local length scale of the
//! solution.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BoundaryCurve, GeometryError, PlanarDomain};
use crate::jet::{EvalError, Solution};
use crate::linalg::power_fit;
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("window leaves the domain at curve {curve}, s = {s}")]
    WindowOutside { curve: usize, s: f64 },
    #[error("ill-conditioned fit (condition {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("invalid extraction settings: {0}")]
    InvalidConfig(String),
    #[error("{failed} of {total} samples failed; first error: {first}")]
    Rejected {
        failed: usize,
        total: usize,
        first: String,
    },
}

/// Largest acceptable condition number of a scaled design matrix.
pub const MAX_CONDITION: f64 = 1e8;
/// Smallest number of samples per trace.
pub const MIN_TRACE_SAMPLES: usize = 64;
/// Largest tolerated fraction of failed samples in a trace.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

/// A boundary point with its inward unit normal and curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    pub curve: usize,
    pub s: f64,
    pub point: Point,
    pub normal: Point,
    pub kappa: f64,
}

impl Anchor {
    /// Anchor on a curve oriented with the domain on its left.
    pub fn on_curve(curve: &BoundaryCurve, index: usize, s: f64) -> Result<Self, GeometryError> {
        Ok(Self {
            curve: index,
            s,
            point: curve.position(s),
            normal: curve.left_normal(s),
            kappa: curve.curvature(s)?,
        })
    }

    fn at(&self, t: f64) -> Point {
        self.point + self.normal * t
    }
}

/// Sample points and basis for the direct fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
    /// Powers of `t` in the basis; must contain 3.
    pub powers: Vec<i32>,
}

/// Probe distances for the Laplacian estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianConfig {
    pub probes: Vec<f64>,
    /// Pin the intercept to `-2κ` and fit `d, d², d³`; otherwise fit
    /// `1, d, d²`.
    pub constrained: bool,
    /// Treat the probes as a halving sequence and extrapolate
    /// `(Δv + 2κ)/6d` to `d = 0` instead of fitting.
    pub extrapolate: bool,
}

/// Which estimate of `c₃` a trace integrates as its primary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Fit,
    Laplacian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionConfig {
    pub fit: FitConfig,
    pub laplacian: LaplacianConfig,
    pub primary: Estimator,
}

impl ExtractionConfig {
    /// Settings for analytic jets near a boundary of length scale `scale`
    /// (a circle's radius): window `[1e-2, 1e-1]·scale`, 16 points, basis
    /// `t³ … t⁸`; Laplacian probes `1e-2·scale·2⁻ᵏ`, `k = 0 … 12`,
    /// extrapolated. The Laplacian estimate is primary.
    ///
    /// Narrower windows amplify the rounding error of `v` through the
    /// division by `t³`; fewer basis terms leave a truncation bias. The
    /// Laplacian loses only one power of `d` to the division and so
    /// tolerates much smaller distances.
    pub fn closed_form(scale: f64) -> Self {
        Self {
            fit: FitConfig {
                t_min: 1e-2 * scale,
                t_max: 1e-1 * scale,
                n_points: 16,
                powers: vec![3, 4, 5, 6, 7, 8],
            },
            laplacian: LaplacianConfig {
                probes: (0..13).map(|k| 1e-2 * scale / (1u32 << k) as f64).collect(),
                constrained: true,
                extrapolate: true,
            },
            primary: Estimator::Laplacian,
        }
    }

    /// Settings for grid solutions of spacing `h`: window `[3h, 12h]` with
    /// 10 points and basis `t, t³, t⁴`, where the linear term absorbs the
    /// normal slope of the discretization error; the Laplacian is probed at
    /// the same distances.
    pub fn discrete(h: f64) -> Self {
        let ts = linspace(3.0 * h, 12.0 * h, 10);
        Self {
            fit: FitConfig {
                t_min: 3.0 * h,
                t_max: 12.0 * h,
                n_points: 10,
                powers: vec![1, 3, 4],
            },
            laplacian: LaplacianConfig {
                probes: ts,
                constrained: false,
                extrapolate: false,
            },
            primary: Estimator::Fit,
        }
    }

    /// Discrete settings for grid solutions, closed-form settings scaled to
    /// the curve's equivalent radius otherwise.
    pub fn for_curve<S: Solution + ?Sized>(sol: &S, curve: &BoundaryCurve) -> Self {
        match sol.grid_spacing() {
            Some(h) => Self::discrete(h),
            None => Self::closed_form(curve.perimeter() / TAU),
        }
    }

    fn validate(&self) -> Result<(), ExpansionError> {
        let f = &self.fit;
        if !(f.t_min > 0.0 && f.t_max > f.t_min) {
            return Err(ExpansionError::InvalidConfig(format!(
                "window [{}, {}] must satisfy 0 < t_min < t_max",
                f.t_min, f.t_max
            )));
        }
        if !f.powers.contains(&3) || f.n_points < f.powers.len() + 1 {
            return Err(ExpansionError::InvalidConfig(
                "fit basis must contain t³ and be smaller than the sample count".into(),
            ));
        }
        let p = &self.laplacian.probes;
        if p.len() < 3 || p.iter().any(|&d| !(d > 0.0)) {
            return Err(ExpansionError::InvalidConfig(
                "at least three positive Laplacian probes are required".into(),
            ));
        }
        if self.laplacian.extrapolate && p.windows(2).any(|w| w[1] != 0.5 * w[0]) {
            return Err(ExpansionError::InvalidConfig(
                "extrapolation needs probes that halve at every step".into(),
            ));
        }
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Both estimates of `c₃` at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionSample {
    pub curve: usize,
    pub s: f64,
    pub point: Point,
    pub kappa: f64,
    pub c3_fit: f64,
    pub c3_laplacian: f64,
    /// RMS residual of the direct fit.
    pub residual: f64,
    pub window: [f64; 2],
    /// Fitted `Δv` at `d = 0`.
    pub intercept: f64,
    /// `|intercept + 2κ|` within 10% of `|2κ|`.
    pub consistent: bool,
    /// Error estimate of an extrapolated Laplacian slope, `NaN` for fits.
    pub extrapolation_error: f64,
}

impl ExpansionSample {
    fn empty(anchor: &Anchor) -> Self {
        Self {
            curve: anchor.curve,
            s: anchor.s,
            point: anchor.point,
            kappa: anchor.kappa,
            c3_fit: f64::NAN,
            c3_laplacian: f64::NAN,
            residual: f64::NAN,
            window: [f64::NAN; 2],
            intercept: f64::NAN,
            consistent: false,
            extrapolation_error: f64::NAN,
        }
    }

    /// The estimate selected by `which`.
    pub fn c3(&self, which: Estimator) -> f64 {
        match which {
            Estimator::Fit => self.c3_fit,
            Estimator::Laplacian => self.c3_laplacian,
        }
    }

    /// `|c₃_fit - c₃_laplacian|`.
    pub fn method_gap(&self) -> f64 {
        (self.c3_fit - self.c3_laplacian).abs()
    }
}

fn fit_samples<S: Solution + ?Sized>(
    sol: &S,
    anchor: &Anchor,
    cfg: &FitConfig,
    kappa: Option<f64>,
) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let ts = linspace(cfg.t_min, cfg.t_max, cfg.n_points);
    let mut ys = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = sol.value(anchor.at(t))?;
        ys.push(match kappa {
            Some(k) => v - t + 0.5 * k * t * t,
            None => v - t,
        });
    }
    Ok((ts, ys))
}

/// Fits `v(y + tn) - t + κt²/2` on the window and returns the `t³`
/// coefficient in `c3_fit`.
pub fn extract_c3_fit<S: Solution + ?Sized>(
    sol: &S,
    anchor: &Anchor,
    cfg: &FitConfig,
) -> Result<ExpansionSample, ExpansionError> {
    let (ts, ys) = fit_samples(sol, anchor, cfg, Some(anchor.kappa))?;
    let fit = power_fit(&ts, &ys, &cfg.powers, cfg.t_max);
    if !(fit.condition <= MAX_CONDITION) {
        return Err(ExpansionError::IllConditioned {
            condition: fit.condition,
        });
    }
    let k3 = cfg
        .powers
        .iter()
        .position(|&p| p == 3)
        .expect("validated basis");
    let mut out = ExpansionSample::empty(anchor);
    out.c3_fit = fit.coefficients[k3];
    out.residual = fit.rms_residual;
    out.window = [cfg.t_min, cfg.t_max];
    Ok(out)
}

/// `c₃` from the slope of `Δv` in the distance; fills `c3_laplacian`,
/// `intercept` and `consistent`.
pub fn extract_c3_laplacian<S: Solution + ?Sized>(
    sol: &S,
    anchor: &Anchor,
    cfg: &LaplacianConfig,
) -> Result<ExpansionSample, ExpansionError> {
    let lap: Vec<f64> = cfg
        .probes
        .iter()
        .map(|&d| sol.laplacian(anchor.at(d)))
        .collect::<Result<_, _>>()?;
    let mut out = ExpansionSample::empty(anchor);
    if cfg.extrapolate {
        let q: Vec<f64> = lap
            .iter()
            .zip(&cfg.probes)
            .map(|(l, d)| (l + 2.0 * anchor.kappa) / (6.0 * d))
            .collect();
        let (slope, err) = richardson(&q);
        let (intercept, _) = richardson(&lap);
        out.c3_laplacian = slope;
        out.extrapolation_error = err;
        out.intercept = intercept;
        out.consistent =
            (intercept + 2.0 * anchor.kappa).abs() <= 0.1 * (2.0 * anchor.kappa).abs() + 1e-8;
        return Ok(out);
    }
    let scale = cfg.probes.iter().fold(0.0f64, |m, &d| m.max(d));
    let free = power_fit(&cfg.probes, &lap, &[0, 1, 2], scale);
    let intercept = free.coefficients[0];
    let slope = if cfg.constrained {
        let shifted: Vec<f64> = lap.iter().map(|l| l + 2.0 * anchor.kappa).collect();
        power_fit(&cfg.probes, &shifted, &[1, 2, 3], scale).coefficients[0]
    } else {
        free.coefficients[1]
    };
    out.c3_laplacian = slope / 6.0;
    out.intercept = intercept;
    out.consistent =
        (intercept + 2.0 * anchor.kappa).abs() <= 0.1 * (2.0 * anchor.kappa).abs() + 1e-8;
    Ok(out)
}

/// Both estimators at one anchor.
pub fn extract<S: Solution + ?Sized>(
    sol: &S,
    anchor: &Anchor,
    cfg: &ExtractionConfig,
) -> Result<ExpansionSample, ExpansionError> {
    cfg.validate()?;
    let mut out = extract_c3_fit(sol, anchor, &cfg.fit)?;
    let lap = extract_c3_laplacian(sol, anchor, &cfg.laplacian)?;
    out.c3_laplacian = lap.c3_laplacian;
    out.intercept = lap.intercept;
    out.consistent = lap.consistent;
    out.extrapolation_error = lap.extrapolation_error;
    Ok(out)
}

/// Stop extrapolating once the error grows past this multiple of the best.
const RICHARDSON_SAFE: f64 = 2.0;

/// Limit at `h → 0` of values sampled at `h₀ 2⁻ᵏ` whose error expands in
/// integer powers of `h`, by a Neville tableau that keeps the entry with
/// the smallest error estimate. Returns `(limit, error estimate)`.
pub fn richardson(values: &[f64]) -> (f64, f64) {
    let mut prev = vec![values[0]];
    let mut best = (values[0], f64::INFINITY);
    for (i, &v) in values.iter().enumerate().skip(1) {
        let mut row = vec![v];
        let mut factor = 1.0;
        for j in 1..=i {
            factor *= 2.0;
            let next = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            let err = (next - row[j - 1]).abs().max((next - prev[j - 1]).abs());
            if err <= best.1 {
                best = (next, err);
            }
            row.push(next);
        }
        if (row[i] - prev[i - 1]).abs() >= RICHARDSON_SAFE * best.1 {
            break;
        }
        prev = row;
    }
    best
}

/// The `t²` coefficient of `v - t` from an unconstrained fit with basis
/// `t², t³, t⁴`; it should equal `-κ/2`.
pub fn fitted_curvature_term<S: Solution + ?Sized>(
    sol: &S,
    anchor: &Anchor,
    cfg: &FitConfig,
) -> Result<f64, ExpansionError> {
    let (ts, ys) = fit_samples(sol, anchor, cfg, None)?;
    let fit = power_fit(&ts, &ys, &[2, 3, 4], cfg.t_max);
    if !(fit.condition <= MAX_CONDITION) {
        return Err(ExpansionError::IllConditioned {
            condition: fit.condition,
        });
    }
    Ok(fit.coefficients[0])
}

/// Samples of `c₃` along one boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTrace {
    pub curve: usize,
    pub samples: Vec<ExpansionSample>,
    /// Number of samples whose extraction failed; their values are filled
    /// by periodic linear interpolation from the neighbouring samples.
    pub failed: usize,
    pub perimeter: f64,
    pub primary: Estimator,
    /// `∫ c₃ dl` from the primary estimator.
    pub integral: f64,
    /// `∫ c₃ dl` from the direct fit.
    pub integral_fit: f64,
    /// `∫ c₃ dl` from the Laplacian estimator.
    pub integral_laplacian: f64,
    /// `∫ dl · ∫ c₃ dl`.
    pub normalized: f64,
}

impl CoefficientTrace {
    pub fn mean_c3(&self) -> f64 {
        self.integral / self.perimeter
    }

    /// Primary estimates in sample order.
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.c3(self.primary)).collect()
    }

    /// `|∫c₃_fit - ∫c₃_laplacian|`, the disagreement of the estimators.
    pub fn method_disagreement(&self) -> f64 {
        (self.integral_fit - self.integral_laplacian).abs()
    }

    /// RMS deviation of each primary `c₃` from the mean of its two
    /// neighbours, relative to the mean `|c₃|`. Smooth variation along the
    /// curve contributes only at second order in the sample spacing.
    pub fn jitter(&self) -> f64 {
        let values = self.values();
        let n = values.len();
        let c = |k: usize| values[k % n];
        let mean_abs = values.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
        let sq: f64 = (0..n)
            .map(|k| (c(k + 1) - 0.5 * (c(k) + c(k + 2))).powi(2))
            .sum();
        (sq / n as f64).sqrt() / mean_abs
    }

    /// Largest `|c₃_fit - c₃_laplacian|` over the trace.
    pub fn max_method_gap(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0f64, |m, s| m.max(s.method_gap()))
    }

    /// Standard deviation of the primary `c₃` over `|mean|`.
    pub fn relative_spread(&self) -> f64 {
        let values = self.values();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        var.sqrt() / mean.abs()
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            curve: self.curve,
            samples: self.samples.len(),
            failed: self.failed,
            perimeter: self.perimeter,
            primary: self.primary,
            integral: self.integral,
            integral_fit: self.integral_fit,
            integral_laplacian: self.integral_laplacian,
            normalized: self.normalized,
        }
    }
}

/// Integrals of one trace, as written to JSON summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSummary {
    pub curve: usize,
    pub samples: usize,
    pub failed: usize,
    pub perimeter: f64,
    pub primary: Estimator,
    pub integral: f64,
    pub integral_fit: f64,
    pub integral_laplacian: f64,
    pub normalized: f64,
}

/// Extracts `c₃` at `n` parameter values `s_k = 2πk/n` along `curve`
/// (oriented with the domain on its left) and integrates by the periodic
/// trapezoid rule. When `domain` is given, each window must stay in the
/// normal neighbourhood of its anchor.
pub fn trace_curve<S: Solution + ?Sized>(
    sol: &S,
    curve: &BoundaryCurve,
    index: usize,
    n: usize,
    cfg: &ExtractionConfig,
    domain: Option<&PlanarDomain>,
) -> Result<CoefficientTrace, ExpansionError> {
    if n < MIN_TRACE_SAMPLES {
        return Err(ExpansionError::InvalidConfig(format!(
            "a trace needs at least {MIN_TRACE_SAMPLES} samples, got {n}"
        )));
    }
    cfg.validate()?;
    let ds = TAU / n as f64;
    let results: Vec<(Result<ExpansionSample, ExpansionError>, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * ds;
            let speed = curve.frame(s).d1.norm();
            let sample = Anchor::on_curve(curve, index, s)
                .map_err(ExpansionError::from)
                .and_then(|anchor| {
                    if let Some(d) = domain {
                        check_window(d, &anchor, cfg)?;
                    }
                    extract(sol, &anchor, cfg)
                });
            (sample, speed)
        })
        .collect();
    let failed = results.iter().filter(|(r, _)| r.is_err()).count();
    if failed as f64 > MAX_FAILED_FRACTION * n as f64 || failed == n {
        let first = results
            .iter()
            .find_map(|(r, _)| r.as_ref().err())
            .map(ToString::to_string)
            .unwrap_or_default();
        return Err(ExpansionError::Rejected {
            failed,
            total: n,
            first,
        });
    }
    let ok: Vec<Option<ExpansionSample>> = results.iter().map(|(r, _)| r.clone().ok()).collect();
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        samples.push(match ok[k] {
            Some(s) => s,
            None => fill_gap(&ok, k, curve, index)?,
        });
    }
    let speeds: Vec<f64> = results.iter().map(|(_, v)| *v).collect();
    let perimeter = speeds.iter().sum::<f64>() * ds;
    let integrate = |which: Estimator| {
        samples
            .iter()
            .zip(&speeds)
            .map(|(s, v)| s.c3(which) * v)
            .sum::<f64>()
            * ds
    };
    let integral = integrate(cfg.primary);
    Ok(CoefficientTrace {
        curve: index,
        integral_fit: integrate(Estimator::Fit),
        integral_laplacian: integrate(Estimator::Laplacian),
        samples,
        failed,
        perimeter,
        primary: cfg.primary,
        integral,
        normalized: perimeter * integral,
    })
}

/// Traces every boundary curve of `domain`.
pub fn trace_domain<S: Solution + ?Sized>(
    sol: &S,
    domain: &PlanarDomain,
    n: usize,
    cfg: Option<&ExtractionConfig>,
) -> Result<Vec<CoefficientTrace>, ExpansionError> {
    domain
        .curves()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let own;
            let cfg = match cfg {
                Some(c) => c,
                None => {
                    own = ExtractionConfig::for_curve(sol, c);
                    &own
                }
            };
            trace_curve(sol, c, i, n, cfg, Some(domain))
        })
        .collect()
}

/// The far end of both windows must lie inside `domain` with `anchor` as
/// its nearest boundary point.
fn check_window(
    domain: &PlanarDomain,
    anchor: &Anchor,
    cfg: &ExtractionConfig,
) -> Result<(), ExpansionError> {
    let reach = cfg
        .laplacian
        .probes
        .iter()
        .fold(cfg.fit.t_max, |m, &d| m.max(d));
    let far = anchor.at(reach);
    let foot = domain.project(far);
    let outside = ExpansionError::WindowOutside {
        curve: anchor.curve,
        s: anchor.s,
    };
    if !domain.contains(far) || foot.curve != anchor.curve {
        return Err(outside);
    }
    if (foot.distance - reach).abs() > 1e-6 * reach {
        return Err(outside);
    }
    Ok(())
}

/// Linear interpolation between the nearest successful samples on either
/// side of `k`, periodically.
fn fill_gap(
    ok: &[Option<ExpansionSample>],
    k: usize,
    curve: &BoundaryCurve,
    index: usize,
) -> Result<ExpansionSample, ExpansionError> {
    let n = ok.len();
    let (mut back, mut fwd) = (1, 1);
    while ok[(k + n - back) % n].is_none() {
        back += 1;
    }
    while ok[(k + fwd) % n].is_none() {
        fwd += 1;
    }
    let a = ok[(k + n - back) % n].expect("found above");
    let b = ok[(k + fwd) % n].expect("found above");
    let w = back as f64 / (back + fwd) as f64;
    let mix = |x: f64, y: f64| (1.0 - w) * x + w * y;
    let anchor = Anchor::on_curve(curve, index, k as f64 * TAU / n as f64)?;
    let mut out = ExpansionSample::empty(&anchor);
    out.c3_fit = mix(a.c3_fit, b.c3_fit);
    out.c3_laplacian = mix(a.c3_laplacian, b.c3_laplacian);
    out.window = a.window;
    Ok(out)
}

/// CSV with columns `curve,s,x,y,kappa,c3_fit,c3_laplacian,residual`.
pub fn write_trace_csv<W: Write>(mut w: W, traces: &[CoefficientTrace]) -> std::io::Result<()> {
    writeln!(w, "curve,s,x,y,kappa,c3_fit,c3_laplacian,residual")?;
    for t in traces {
        for s in &t.samples {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.curve, s.s, s.point.x, s.point.y, s.kappa, s.c3_fit, s.c3_laplacian, s.residual
            )?;
        }
    }
    Ok(())
}
