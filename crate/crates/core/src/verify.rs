//! Checks of the integral identity and inequalities satisfied by `c₃`.
//!
//! Every check produces a [`VerificationReport`] with a signed margin and a
//! verdict. Identity checks pass when both sides agree within tolerance.
//! Strict inequality checks pass only when the margin exceeds the
//! tolerance and are inconclusive when it does not.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::conformal::{
    check_univalent, global_term_transform_integral, rescale, ConformalError, HolomorphicMap,
    InverseConfig, QuadratureSpec, TransportedSolution,
};
use crate::expansion::{trace_curve, CoefficientTrace, ExpansionError, ExtractionConfig};
use crate::geometry::{BoundaryCurve, PlanarDomain};
use crate::jet::{EvalError, Solution};
use crate::models::{ClosedFormSolution, Family, ModelError};
use crate::point::Point;
use crate::quadrature::{gauss_legendre_on, PolarRegion};
use crate::solver::{DiscreteSolution, SolverConfig};
use crate::GAP_CONSTANT;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckId {
    Lemma21,
    Sign,
    Gap,
    Rigidity,
    Count,
    Comparison,
    Scaling,
    Corollary22,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

/// Where the inputs of a check came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the domain spec, when the domain is a spec.
    pub domain_hash: Option<String>,
    /// Closed-form family, when the solution is a model.
    pub model: Option<Family>,
    pub solver: Option<serde_json::Value>,
}

impl Provenance {
    pub fn domain(domain: &PlanarDomain) -> Self {
        Self {
            domain_hash: Some(domain.to_spec().content_hash()),
            ..Self::default()
        }
    }

    pub fn model(model: &ClosedFormSolution) -> Self {
        Self {
            model: Some(model.family()),
            ..Self::default()
        }
    }

    pub fn with_solver(mut self, config: &SolverConfig) -> Self {
        self.solver = Some(serde_json::to_value(config).expect("solver config serializes"));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: CheckId,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed margin; positive means the asserted relation holds.
    pub margin: f64,
    /// Absolute tolerance the margin is compared with.
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Named intermediate quantities such as per-curve margins.
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl VerificationReport {
    fn new(check: CheckId, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        Self {
            check,
            lhs,
            rhs,
            margin,
            tolerance,
            verdict: Verdict::Inconclusive,
            details: BTreeMap::new(),
            notes: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    /// Identity: `margin = tolerance - |lhs - rhs|`, pass when non-negative.
    fn identity(check: CheckId, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = (lhs - rhs).abs();
        let mut r = Self::new(check, lhs, rhs, tolerance - gap, tolerance);
        r.verdict = if gap <= tolerance {
            Verdict::Pass
        } else if gap.is_nan() {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        r
    }

    /// Strict inequality with signed `margin`.
    fn strict(check: CheckId, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        let mut r = Self::new(check, lhs, rhs, margin, tolerance);
        r.verdict = if margin > tolerance {
            Verdict::Pass
        } else if margin < -tolerance {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        r
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    fn detail(&mut self, key: impl Into<String>, value: f64) {
        self.details.insert(key.into(), value);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `0` when every report passes, `2` when any fails, `3` otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    match reports.iter().map(|r| r.verdict).max() {
        None | Some(Verdict::Pass) => 0,
        Some(Verdict::Fail) => 2,
        Some(Verdict::Inconclusive) => 3,
    }
}

/// `rel · max(|lhs|, |rhs|) + abs`.
fn identity_tolerance(rel: f64, abs: f64, lhs: f64, rhs: f64) -> f64 {
    rel * lhs.abs().max(rhs.abs()) + abs
}

fn total_integral(traces: &[CoefficientTrace]) -> f64 {
    traces.iter().map(|t| t.integral).sum()
}

fn total_perimeter(traces: &[CoefficientTrace]) -> f64 {
    traces.iter().map(|t| t.perimeter).sum()
}

/// Composite Gauss–Legendre panels used by the radial quadrature.
const RADIAL_PANELS: usize = 100;
const RADIAL_NODES: usize = 100;

/// `∫_Ω ((v_xx - v_yy)² + 4v_xy²)/(6v) dA` for a radial solution on
/// `lo < r < hi`, integrating along the positive `x` axis.
fn radial_gap_integral<S: Solution>(
    sol: &S,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Result<f64, EvalError> {
    let width = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = lo + k as f64 * width;
        for (r, w) in gauss_legendre_on(RADIAL_NODES, a, a + width) {
            let jet = sol.jet(Point::new(r, 0.0))?;
            total += w * 2.0 * PI * r * jet.hessian_gap_sqr() / (6.0 * jet.value);
        }
    }
    Ok(total)
}

/// Boundary-domain identity for the bounded radial families (disc, annulus,
/// sub-annulus): `Σ ∫ c₃ dl` from `traces` against radial quadrature of the
/// domain integral. Quadrature that changes by more than a tenth of the tolerance
/// under halving the panel count makes the report inconclusive.
pub fn check_lemma21_radial(
    model: &ClosedFormSolution,
    traces: &[CoefficientTrace],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let (lo, hi) = match model.family() {
        Family::Disc { radius } => (0.0, radius),
        Family::Annulus { r } => (r, 1.0 / r),
        Family::SubAnnulus { r } => (r, 1.0),
        f => {
            return Err(VerifyError::Precondition(format!(
                "radial quadrature needs a bounded smooth radial family, got {}",
                f.name()
            )))
        }
    };
    let fine = radial_gap_integral(model, lo, hi, RADIAL_PANELS)?;
    let coarse = radial_gap_integral(model, lo, hi, RADIAL_PANELS / 2)?;
    let lhs = total_integral(traces);
    let rhs = -fine;
    let tol = identity_tolerance(rel_tol, abs_tol, lhs, rhs);
    let mut r = VerificationReport::identity(CheckId::Lemma21, lhs, rhs, tol);
    r.detail("quadrature_change", (fine - coarse).abs());
    if (fine - coarse).abs() > 0.1 * tol && r.verdict == Verdict::Pass {
        r.verdict = Verdict::Inconclusive;
        r.notes.push("radial quadrature not converged".into());
    }
    Ok(r.with_provenance(Provenance::model(model)))
}

/// Boundary-domain identity on a grid solution. The domain integral is a nodal sum over
/// nodes at distance at least `δ = 3h` from the boundary. Near the
/// boundary the Hessian eigenvalue gap is `6c₃d + O(d²)`, so the omitted
/// layer contributes `-3δ² ∫ c₃² dl + O(δ³)`; that estimate is added to
/// the right-hand side and reported as `tail`.
pub fn check_lemma21_grid(
    sol: &DiscreteSolution,
    domain: &PlanarDomain,
    traces: &[CoefficientTrace],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let grid = sol.grid();
    let h = grid.h();
    let delta = 3.0 * h;
    let mut sum = 0.0;
    for &node in grid.unknown_nodes() {
        let p = grid.node_position(node);
        if domain.project(p).distance < delta {
            continue;
        }
        let jet = sol.jet(p)?;
        sum += jet.hessian_gap_sqr() / (6.0 * jet.value);
    }
    let bulk = -sum * h * h;
    let c3_sqr: f64 = traces
        .iter()
        .map(|t| {
            let values = t.values();
            values.iter().map(|c| c * c).sum::<f64>() / values.len() as f64 * t.perimeter
        })
        .sum();
    let tail = -3.0 * delta * delta * c3_sqr;
    let lhs = total_integral(traces);
    let rhs = bulk + tail;
    let tol = identity_tolerance(rel_tol, abs_tol, lhs, rhs);
    let mut r = VerificationReport::identity(CheckId::Lemma21, lhs, rhs, tol);
    r.detail("bulk", bulk);
    r.detail("tail", tail);
    r.detail("delta", delta);
    Ok(r.with_provenance(Provenance::domain(domain)))
}

/// Sign check: every `∫_σ c₃ dl ≤ tolerance`.
pub fn check_sign(traces: &[CoefficientTrace], tolerance: f64) -> VerificationReport {
    let worst = traces
        .iter()
        .map(|t| t.integral)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = -worst;
    let mut r = VerificationReport::new(CheckId::Sign, worst, 0.0, margin, tolerance);
    r.verdict = if worst <= tolerance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    for t in traces {
        r.detail(format!("integral_{}", t.curve), t.integral);
    }
    r
}

/// Rigidity: an integral within `zero_tol` of zero is only
/// allowed when the domain is a single circle, and on a circle every
/// integral must be zero.
pub fn check_rigidity(
    traces: &[CoefficientTrace],
    is_circle: bool,
    zero_tol: f64,
) -> VerificationReport {
    let closest = traces
        .iter()
        .map(|t| t.integral)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(f64::NAN);
    let zero = closest.abs() <= zero_tol;
    let mut r = VerificationReport::new(
        CheckId::Rigidity,
        closest,
        0.0,
        closest.abs() - zero_tol,
        zero_tol,
    );
    r.verdict = match (zero, is_circle) {
        (true, true) => Verdict::Pass,
        (false, false) => Verdict::Pass,
        (false, true) => Verdict::Fail,
        (true, false) => Verdict::Inconclusive,
    };
    r.detail("is_circle", if is_circle { 1.0 } else { 0.0 });
    r.notes.push(match (zero, is_circle) {
        (true, true) => "integral vanishes on a disc".to_string(),
        (false, false) => "all integrals strictly negative".to_string(),
        (false, true) => "nonzero integral on a disc".to_string(),
        (true, false) => "integral indistinguishable from zero on a non-disc".to_string(),
    });
    r
}

/// Default "numerical zero" for a trace: ten times the disagreement of the
/// two estimators, floored at `floor`.
pub fn zero_tolerance(traces: &[CoefficientTrace], floor: f64) -> f64 {
    traces
        .iter()
        .map(|t| 10.0 * t.method_disagreement())
        .fold(floor, f64::max)
}

/// Gap check: every normalized product below `-2π²/3` by more than the
/// tolerance. Simply connected domains are outside the hypothesis.
pub fn check_gap(
    traces: &[CoefficientTrace],
    connectivity: usize,
    tolerance: f64,
) -> VerificationReport {
    if connectivity < 2 {
        let mut r =
            VerificationReport::new(CheckId::Gap, f64::NAN, GAP_CONSTANT, f64::NAN, tolerance);
        r.notes
            .push("not applicable: the gap requires at least two boundary curves".into());
        return r;
    }
    let worst = traces
        .iter()
        .map(|t| t.normalized)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut r = VerificationReport::strict(
        CheckId::Gap,
        worst,
        GAP_CONSTANT,
        GAP_CONSTANT - worst,
        tolerance,
    );
    for t in traces {
        r.detail(format!("margin_{}", t.curve), GAP_CONSTANT - t.normalized);
        r.detail(format!("normalized_{}", t.curve), t.normalized);
    }
    r
}

/// `T = (3/2π²) ∫_{∂Ω} dl ∫_{∂Ω} c₃ dl`.
pub fn count_statistic(traces: &[CoefficientTrace]) -> f64 {
    1.5 / (PI * PI) * total_perimeter(traces) * total_integral(traces)
}

/// Smallest `l ≥ 2` with `T ≥ -l²`, which bounds the connectivity by `k < l`.
pub fn inferred_connectivity_bound(t: f64) -> u64 {
    let mut l = 2u64;
    while t < -((l * l) as f64) {
        l += 1;
    }
    l
}

/// Connectivity bound. For `k ≥ 2` asserts `T < -k²`; for a simply connected
/// domain asserts `T ≥ -l²`, i.e. the inferred bound `k < l` is consistent.
pub fn check_count_bound(
    traces: &[CoefficientTrace],
    connectivity: usize,
    l: u64,
    tolerance: f64,
) -> Result<VerificationReport, VerifyError> {
    if l < 2 {
        return Err(VerifyError::Precondition(format!(
            "l must be at least 2, got {l}"
        )));
    }
    let t = count_statistic(traces);
    let mut r = if connectivity >= 2 {
        let bound = -((connectivity * connectivity) as f64);
        VerificationReport::strict(CheckId::Count, t, bound, bound - t, tolerance)
    } else {
        let bound = -((l * l) as f64);
        let mut r = VerificationReport::new(CheckId::Count, t, bound, t - bound, tolerance);
        r.verdict = if t >= bound - tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        r
    };
    let inferred = inferred_connectivity_bound(t);
    r.detail("inferred_bound", inferred as f64);
    r.detail("connectivity", connectivity as f64);
    r.notes.push(if inferred == 2 {
        "T ≥ -4: the domain is simply connected".to_string()
    } else {
        format!("connectivity below {inferred}")
    });
    Ok(r)
}

/// Comparison principle for `Ω₁ ⊆ Ω₂`: `v₁ ≤ v₂` at the sample points and
/// `c₃¹ ≤ c₃²` along a shared curve (traces sampled at the same
/// parameters). Points where either solution cannot be evaluated are
/// skipped and counted.
pub fn check_comparison<A: Solution, B: Solution>(
    v1: &A,
    v2: &B,
    domains: Option<(&PlanarDomain, &PlanarDomain)>,
    points: &[Point],
    shared: Option<(&CoefficientTrace, &CoefficientTrace)>,
    tolerance: f64,
) -> Result<VerificationReport, VerifyError> {
    if let Some((d1, d2)) = domains {
        if !d1.is_subset_of(d2, 128) {
            return Err(VerifyError::Precondition(
                "Ω₁ is not contained in Ω₂".into(),
            ));
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut used = 0usize;
    for &p in points {
        if let (Ok(a), Ok(b)) = (v1.value(p), v2.value(p)) {
            worst = worst.max(a - b);
            used += 1;
        }
    }
    if used == 0 {
        return Err(VerifyError::Precondition(
            "no sample point lies in both domains".into(),
        ));
    }
    let mut c3_worst = f64::NEG_INFINITY;
    if let Some((t1, t2)) = shared {
        if t1.samples.len() != t2.samples.len() {
            return Err(VerifyError::Precondition(
                "shared-curve traces must use the same samples".into(),
            ));
        }
        for (a, b) in t1.samples.iter().zip(&t2.samples) {
            c3_worst = c3_worst.max(a.c3(t1.primary) - b.c3(t2.primary));
        }
    }
    let lhs = worst.max(c3_worst);
    let mut r = VerificationReport::new(CheckId::Comparison, lhs, 0.0, -lhs, tolerance);
    r.verdict = if lhs <= tolerance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    r.detail("max_value_excess", worst);
    r.detail("points", used as f64);
    if shared.is_some() {
        r.detail("max_c3_excess", c3_worst);
    }
    Ok(r)
}

/// Scaling invariance: the normalized product on `curve` is unchanged when the
/// solution and the curve are rescaled by each `k`.
pub fn check_scaling<S: Solution + Clone>(
    sol: &S,
    curve: &BoundaryCurve,
    index: usize,
    factors: &[f64],
    n: usize,
    rel_tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let base_cfg = ExtractionConfig::for_curve(sol, curve);
    let base = trace_curve(sol, curve, index, n, &base_cfg, None)?.normalized;
    let mut worst = base;
    let mut details = BTreeMap::new();
    for &k in factors {
        let scaled = rescale(sol.clone(), k)?;
        let c = curve.scaled(k);
        let cfg = ExtractionConfig::for_curve(&scaled, &c);
        let value = trace_curve(&scaled, &c, index, n, &cfg, None)?.normalized;
        details.insert(format!("normalized_k{k}"), value);
        if (value - base).abs() > (worst - base).abs() {
            worst = value;
        }
    }
    let tol = rel_tol * base.abs().max(1e-300);
    let mut r = VerificationReport::identity(CheckId::Scaling, base, worst, tol);
    r.details = details;
    Ok(r)
}

/// Lattice points per side in the sampled univalence check.
const UNIVALENCE_LATTICE: usize = 64;

/// Conformal cross-check on `f(Ω₁)` where `Ω₁` is a polar region and
/// `v1` solves the equation on it. The left side is `Σ ∫ c₃ dl` extracted
/// from the pushforward of `v1` along the image curves; the right side is
/// the Schwarzian domain integral over `Ω₁`.
pub fn check_corollary22<S: Solution + Clone>(
    v1: &S,
    map: &HolomorphicMap,
    region: &PolarRegion,
    spec: &QuadratureSpec,
    n: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let domain = if region.r_inner > 0.0 {
        PlanarDomain::annulus(region.center, region.r_inner, region.r_outer)
    } else {
        PlanarDomain::disc(region.center, region.r_outer)
    }
    .map_err(ExpansionError::from)?;
    let univalence = check_univalent(map, &domain, UNIVALENCE_LATTICE)?;
    let rhs = match global_term_transform_integral(v1, map, region, spec) {
        Ok(q) => q.value,
        Err(ConformalError::Accuracy { value, change, tol }) => {
            let mut r =
                VerificationReport::new(CheckId::Corollary22, f64::NAN, value, f64::NAN, tol);
            r.detail("quadrature_change", change);
            r.notes.push("quadrature did not converge".into());
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let pad = 1.05 * region.r_outer;
    let inverse = InverseConfig::new(
        region.center - Point::new(pad, pad),
        region.center + Point::new(pad, pad),
    );
    let pushed = TransportedSolution::pushforward(v1.clone(), map.clone(), Some(inverse));
    let mut details = BTreeMap::new();
    details.insert("min_derivative".to_string(), univalence.min_derivative);
    let mut lhs = 0.0;
    for (i, c) in domain.curves().iter().enumerate() {
        let image = map.image_curve(c)?;
        let cfg = ExtractionConfig::for_curve(&pushed, &image);
        let t = trace_curve(&pushed, &image, i, n, &cfg, None)?;
        details.insert(format!("integral_{i}"), t.integral);
        lhs += t.integral;
    }
    let tol = identity_tolerance(rel_tol, abs_tol, lhs, rhs);
    let mut r = VerificationReport::identity(CheckId::Corollary22, lhs, rhs, tol);
    r.details = details;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{trace_curve, Estimator};
    use crate::models::{gap_value, Side};
    use num_complex::Complex64;

    fn model_traces(model: &ClosedFormSolution, n: usize) -> Vec<CoefficientTrace> {
        model
            .boundary_curves()
            .iter()
            .enumerate()
            .map(|(i, (_, c))| {
                let cfg = ExtractionConfig::for_curve(model, c);
                trace_curve(model, c, i, n, &cfg, None).unwrap()
            })
            .collect()
    }

    /// A trace with constant `c₃` on a circle of radius `r`.
    fn synthetic(curve: usize, r: f64, integral: f64) -> CoefficientTrace {
        let perimeter = 2.0 * PI * r;
        CoefficientTrace {
            curve,
            samples: Vec::new(),
            failed: 0,
            perimeter,
            primary: Estimator::Laplacian,
            integral,
            integral_fit: integral,
            integral_laplacian: integral,
            normalized: perimeter * integral,
        }
    }

    #[test]
    fn lemma21_closed_forms() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let r = check_lemma21_radial(&disc, &model_traces(&disc, 64), 1e-6, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.lhs.abs() < 1e-8 && r.rhs.abs() < 1e-12);

        let ann = ClosedFormSolution::annulus(0.5).unwrap();
        let traces = model_traces(&ann, 64);
        let r = check_lemma21_radial(&ann, &traces, 1e-6, 1e-8).unwrap();
        let printed =
            PI * ann.model_c3(Side::Inner).unwrap() + 4.0 * PI * ann.model_c3(Side::Outer).unwrap();
        assert!((r.lhs - printed).abs() < 1e-6);
        assert!((r.lhs + 16.06).abs() < 0.01);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(
            check_lemma21_radial(&ClosedFormSolution::punctured_disc(), &[], 1e-6, 1e-8).is_err()
        );
    }

    #[test]
    fn sign_rigidity_and_gap() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let dt = model_traces(&disc, 64);
        assert_eq!(check_sign(&dt, 1e-9).verdict, Verdict::Pass);
        assert_eq!(check_rigidity(&dt, true, 1e-9).verdict, Verdict::Pass);
        assert_eq!(check_gap(&dt, 1, 1e-9).verdict, Verdict::Inconclusive);

        let ann = ClosedFormSolution::annulus(0.5).unwrap();
        let at = model_traces(&ann, 64);
        assert!((at[0].integral + 3.21).abs() < 0.01 && (at[1].integral + 12.85).abs() < 0.01);
        assert_eq!(check_sign(&at, 1e-9).verdict, Verdict::Pass);
        assert_eq!(check_rigidity(&at, false, 1e-9).verdict, Verdict::Pass);
        let g = check_gap(&at, 2, 1e-8);
        assert_eq!(g.verdict, Verdict::Pass);
        assert!((g.details["margin_1"] - (GAP_CONSTANT - gap_value(0.5).unwrap())).abs() < 1e-6);

        let bad = [synthetic(0, 1.0, 0.1)];
        assert_eq!(check_sign(&bad, 1e-9).verdict, Verdict::Fail);
        assert_eq!(
            check_rigidity(&[synthetic(0, 1.0, 0.0)], false, 1e-9).verdict,
            Verdict::Inconclusive
        );
        assert_eq!(
            check_rigidity(&[synthetic(0, 1.0, -0.5)], true, 1e-9).verdict,
            Verdict::Fail
        );
        // a normalized product above the gap constant contradicts the theorem
        let above = [synthetic(0, 1.0, -0.5), synthetic(1, 0.5, -1.0)];
        assert_eq!(check_gap(&above, 2, 1e-9).verdict, Verdict::Fail);
        let on = [synthetic(0, 1.0, GAP_CONSTANT / (2.0 * PI))];
        assert_eq!(check_gap(&on, 2, 1e-9).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn gap_margins_shrink_with_modulus() {
        let mut last = f64::INFINITY;
        for r in [0.8, 0.5, 0.2, 0.05] {
            let ann = ClosedFormSolution::annulus(r).unwrap();
            let rep = check_gap(&model_traces(&ann, 64), 2, 1e-8);
            assert_eq!(rep.verdict, Verdict::Pass);
            assert!(rep.margin < last);
            last = rep.margin;
        }
    }

    #[test]
    fn count_bound_examples() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let r = check_count_bound(&model_traces(&disc, 64), 1, 2, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.details["inferred_bound"], 2.0);
        let ann = ClosedFormSolution::annulus(0.5).unwrap();
        let traces = model_traces(&ann, 64);
        let r = check_count_bound(&traces, 2, 2, 1e-9).unwrap();
        let expected = 1.5 / (PI * PI) * (5.0 * PI) * total_integral(&traces);
        assert!((r.lhs - expected).abs() < 1e-9);
        assert!(r.lhs < -4.0);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(check_count_bound(&traces, 2, 1, 1e-9).is_err());
        assert_eq!(inferred_connectivity_bound(-4.0), 2);
        assert_eq!(inferred_connectivity_bound(-4.5), 3);
    }

    #[test]
    fn comparison_examples() {
        let b1 = ClosedFormSolution::disc(1.0).unwrap();
        let b2 = ClosedFormSolution::disc(2.0).unwrap();
        let d1 = PlanarDomain::disc(Point::ORIGIN, 1.0).unwrap();
        let d2 = PlanarDomain::disc(Point::ORIGIN, 2.0).unwrap();
        let pts = [Point::ORIGIN, Point::new(0.3, 0.4)];
        let r = check_comparison(&b1, &b2, Some((&d1, &d2)), &pts, None, 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.lhs <= -0.5 + 1e-12);
        assert!(check_comparison(&b2, &b1, Some((&d2, &d1)), &pts, None, 1e-12).is_err());

        // annulus B₂ \ B̄₁ against B₂, shared outer circle
        let ann = rescale(
            ClosedFormSolution::annulus(0.5f64.sqrt()).unwrap(),
            2.0f64.sqrt(),
        )
        .unwrap();
        let outer = BoundaryCurve::circle(Point::ORIGIN, 2.0).unwrap();
        let cfg = ExtractionConfig::closed_form(2.0);
        let ta = trace_curve(&ann, &outer, 0, 64, &cfg, None).unwrap();
        let td = trace_curve(&b2, &outer, 0, 64, &cfg, None).unwrap();
        assert!(ta.integral < 0.0 && td.integral.abs() < 1e-8);
        let da = PlanarDomain::annulus(Point::ORIGIN, 1.0, 2.0).unwrap();
        let pts: Vec<Point> = (0..50)
            .map(|k| Point::new(1.0 + k as f64 * 0.02, 0.1))
            .collect();
        let r =
            check_comparison(&ann, &b2, Some((&da, &d2)), &pts, Some((&ta, &td)), 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.details["max_c3_excess"] < 0.0);

        // the unit disc punctured at z0 against the unit disc
        let punct = ClosedFormSolution::disc_minus_point(Point::new(0.3, -0.2)).unwrap();
        let pts: Vec<Point> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.731;
                let r = 0.98 * ((k as f64 + 0.5) / 200.0).sqrt();
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let r = check_comparison(&punct, &b1, None, &pts, None, 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn scaling_invariance() {
        let ann = ClosedFormSolution::annulus(0.5).unwrap();
        for (i, (_, c)) in ann.boundary_curves().iter().enumerate() {
            let r = check_scaling(&ann, c, i, &[0.1, 3.0, 10.0], 64, 1e-10).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        }
    }

    #[test]
    fn corollary_paths_agree() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let region = PolarRegion::disc(Point::ORIGIN, 1.0);
        let spec = QuadratureSpec::default();
        let f = HolomorphicMap::polynomial(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.2, 0.0),
        ])
        .unwrap();
        let r = check_corollary22(&disc, &f, &region, &spec, 128, 0.02, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!((r.rhs + 0.043340169998254953).abs() < 1e-8);
        let m = HolomorphicMap::mobius(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.2, 0.1),
            Complex64::new(0.1, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let r = check_corollary22(&disc, &m, &region, &spec, 128, 0.02, 1e-8).unwrap();
        assert!(r.lhs.abs() < 1e-8 && r.rhs.abs() < 1e-10, "{r:?}");
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn corollary_needs_a_univalent_map() {
        let disc = ClosedFormSolution::disc(1.0).unwrap();
        let region = PolarRegion::disc(Point::ORIGIN, 1.0);
        // z + z²: derivative vanishes at -1/2
        let f = HolomorphicMap::polynomial(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let r = check_corollary22(
            &disc,
            &f,
            &region,
            &QuadratureSpec::default(),
            128,
            0.02,
            1e-8,
        );
        assert!(matches!(r, Err(VerifyError::Conformal(_))), "{r:?}");
    }

    #[test]
    fn exit_codes() {
        let pass = check_sign(&[synthetic(0, 1.0, -1.0)], 1e-9);
        let fail = check_sign(&[synthetic(0, 1.0, 1.0)], 1e-9);
        let inc = check_gap(&[], 1, 1e-9);
        assert_eq!(exit_code(std::slice::from_ref(&pass)), 0);
        assert_eq!(exit_code(&[pass.clone(), inc.clone()]), 3);
        assert_eq!(exit_code(&[pass, inc, fail]), 2);
    }

    #[test]
    fn reports_serialize() {
        let r = check_sign(&[synthetic(0, 1.0, -1.0)], 1e-9);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["check"], "sign");
        assert_eq!(v["verdict"], "pass");
        assert!(v.get("provenance").is_some());
    }
}
