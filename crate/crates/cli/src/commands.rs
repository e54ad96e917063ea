//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use llab_core::conformal::{MapSpec, QuadratureSpec};
use llab_core::expansion::{write_trace_csv, CoefficientTrace};
use llab_core::models::ClosedFormSolution;
use llab_core::models::{
    gap_value, sample_field, write_field_csv as write_samples_csv, Family, Side,
};
use llab_core::point::Point;
use llab_core::quadrature::PolarRegion;
use llab_core::solver::{residual_norm, solve, write_field, write_field_csv, SolverError};
use llab_core::verify::{
    check_comparison, check_corollary22, check_count_bound, check_gap, check_lemma21_grid,
    check_lemma21_radial, check_rigidity, check_scaling, check_sign, count_statistic, exit_code,
    zero_tolerance, VerificationReport,
};

use crate::manifest::{emit_csv, emit_json, validate_reports, write_binary, RunManifest};
use crate::source::{parse_length, read_domain, solver_config, ModelArgs, Source, SourceArgs};
use crate::CliError;

#[derive(Debug, Args)]
pub struct ModelsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write sampled values (x, y, v) to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Lattice points per side for --csv.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Domain spec (JSON).
    #[arg(long)]
    pub domain: PathBuf,
    /// Grid spacing, e.g. 1/128.
    #[arg(long, value_parser = parse_length)]
    pub h: f64,
    /// Newton tolerance on the residual ∞-norm.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Newton iteration cap.
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Binary field dump.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON solve log; stdout when omitted.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Interior nodal values as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Samples per boundary curve.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Per-sample trace CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON summary; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Lemma,
    Sign,
    Gap,
    Count,
    Comparison,
    Scaling,
    Corollary,
}

/// The larger domain of a comparison.
#[derive(Debug, Args)]
pub struct OuterArgs {
    /// Family of the larger domain.
    #[arg(long)]
    pub family2: Option<String>,
    /// Radius or modulus of --family2.
    #[arg(long = "R2", value_name = "R2", allow_hyphen_values = true)]
    pub r2: Option<f64>,
    /// Domain spec of the larger domain, solved at the same --h.
    #[arg(long, conflicts_with = "family2")]
    pub domain2: Option<PathBuf>,
    /// Field dump for --domain2.
    #[arg(long, requires = "domain2")]
    pub field2: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Map spec (JSON) applied to the disc of radius --radius.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub check: CheckKind,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub outer: OuterArgs,
    #[command(flatten)]
    pub map: MapArgs,
    /// Tolerance of the check; the default depends on the check and on
    /// whether the solution is closed form or discrete.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Absolute tolerance floor for identity checks.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Connectivity bound to test with --check count.
    #[arg(long, default_value_t = 2)]
    pub l: u64,
    /// Scale factors for --check scaling.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 3.0, 10.0])]
    pub k: Vec<f64>,
    /// Samples per boundary curve.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorollaryArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Relative tolerance between the two sides.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub abs_tol: f64,
    /// Samples per image curve.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status of a command that ran to completion.
pub type Status = i32;

pub fn models(args: &ModelsArgs) -> Result<Status, CliError> {
    let mut manifest = RunManifest::new("models");
    let model = args.model.model()?;
    manifest.set("model", model.family());
    if args.csv.is_some() {
        if args.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        manifest.set("samples", args.samples);
    }
    manifest.output(args.csv.as_ref());
    manifest.output(args.out.as_ref());
    let hash = manifest.hash();

    let mut c3 = serde_json::Map::new();
    let mut curves = Vec::new();
    for (side, curve) in model.boundary_curves() {
        let name = match side {
            Side::Outer => "outer",
            Side::Inner => "inner",
        };
        let value = model.model_c3(side).ok();
        if let Some(v) = value {
            c3.insert(name.to_string(), json!(v));
        }
        let length = curve.perimeter();
        curves.push(json!({
            "side": name,
            "perimeter": length,
            "model_c3": value,
            "normalized": value.map(|v| v * length * length),
        }));
    }
    let gap = match model.family() {
        Family::Annulus { r } => Some(gap_value(r).map_err(|e| CliError::Usage(e.to_string()))?),
        _ => None,
    };
    let summary = json!({
        "family": model.family().name(),
        "parameters": model.family(),
        "model_c3": c3,
        "gap_value": gap,
        "curves": curves,
    });

    if let Some(path) = &args.csv {
        let (lo, hi) = sample_box(&model);
        let samples = sample_field(&model, lo, hi, args.samples);
        emit_csv(path, &hash, |w| write_samples_csv(w, &samples))?;
    }
    emit_json(args.out.as_ref(), &manifest.wrap("summary", summary))?;
    Ok(0)
}

/// Box sampled by `models --csv`.
fn sample_box(model: &ClosedFormSolution) -> (Point, Point) {
    let square = |r: f64| (Point::new(-r, -r), Point::new(r, r));
    match model.family() {
        Family::Disc { radius } => square(radius),
        Family::ExteriorDisc { radius } => square(3.0 * radius),
        Family::Annulus { r } => square(1.0 / r),
        Family::SubAnnulus { .. } | Family::PuncturedDisc | Family::DiscMinusPoint { .. } => {
            square(1.0)
        }
        Family::ExteriorLog => square(3.0),
        Family::Strip { half_width } => (
            Point::new(-2.0 * half_width, -half_width),
            Point::new(2.0 * half_width, half_width),
        ),
    }
}

pub fn solve_cmd(args: &SolveArgs) -> Result<Status, CliError> {
    let mut manifest = RunManifest::new("solve");
    let domain = read_domain(&mut manifest, &args.domain)?;
    let config = solver_config(args.h, args.tol, args.max_iter);
    manifest.set("solver", &config);
    manifest.output(Some(&args.out));
    manifest.output(args.log.as_ref());
    manifest.output(args.csv.as_ref());
    let hash = manifest.hash();

    let (status, log) = match solve(&domain, &config) {
        Ok(sol) => {
            let mut bytes = Vec::new();
            write_field(&mut bytes, &sol).map_err(|e| CliError::Output(e.to_string()))?;
            write_binary(&args.out, &bytes)?;
            if let Some(path) = &args.csv {
                emit_csv(path, &hash, |w| write_field_csv(w, &sol))?;
            }
            let g = sol.grid();
            let log = json!({
                "converged": true,
                "iterations": sol.iterations(),
                "residual_log": sol.log(),
                "residual_norm": residual_norm(&sol),
                "h": g.h(),
                "nx": g.nx(),
                "ny": g.ny(),
                "origin": [g.origin().x, g.origin().y],
                "unknowns": g.unknown_count(),
                "field_sha256": crate::manifest::sha256_hex(&bytes),
            });
            (0, log)
        }
        Err(SolverError::Divergence { log }) | Err(SolverError::Positivity { log }) => {
            let log = json!({
                "converged": false,
                "iterations": log.len().saturating_sub(1),
                "residual_log": log,
            });
            (2, log)
        }
        Err(e) => return Err(CliError::from_solver(e)),
    };
    emit_json(args.log.as_ref(), &manifest.wrap("log", log))?;
    Ok(status)
}

fn trace_summaries(traces: &[CoefficientTrace]) -> Value {
    json!(traces.iter().map(|t| t.summary()).collect::<Vec<_>>())
}

pub fn extract(args: &ExtractArgs) -> Result<Status, CliError> {
    let mut manifest = RunManifest::new("extract");
    check_samples(args.samples)?;
    manifest.set("samples", args.samples);
    manifest.output(args.csv.as_ref());
    manifest.output(args.out.as_ref());
    let source = args.source.load(&mut manifest, "source")?;
    let traces = source.traces(args.samples)?;
    let hash = manifest.hash();
    if let Some(path) = &args.csv {
        emit_csv(path, &hash, |w| write_trace_csv(w, &traces))?;
    }
    let total: f64 = traces.iter().map(|t| t.integral).sum();
    let summary = json!({
        "source": source.describe(),
        "traces": trace_summaries(&traces),
        "total_integral": total,
        "count_statistic": count_statistic(&traces),
    });
    emit_json(args.out.as_ref(), &manifest.wrap("summary", summary))?;
    Ok(0)
}

fn check_samples(n: usize) -> Result<(), CliError> {
    if n < 64 {
        Err(CliError::Usage(format!(
            "at least 64 samples per curve are needed, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Default tolerance per check and solution kind.
fn default_tol(check: CheckKind, grid: Option<f64>) -> f64 {
    match (check, grid) {
        (CheckKind::Lemma, None) => 1e-6,
        (CheckKind::Lemma, Some(_)) => 0.02,
        (CheckKind::Sign, None) => 1e-9,
        (CheckKind::Sign, Some(h)) => 10.0 * h * h,
        (CheckKind::Gap | CheckKind::Count, None) => 1e-8,
        (CheckKind::Gap | CheckKind::Count, Some(_)) => 1e-2,
        (CheckKind::Comparison, _) => 1e-8,
        (CheckKind::Scaling, _) => 1e-10,
        (CheckKind::Corollary, _) => 0.02,
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Status, CliError> {
    let mut manifest = RunManifest::new("verify");
    manifest.set("check", args.check);
    check_samples(args.samples)?;
    manifest.set("samples", args.samples);
    manifest.output(args.out.as_ref());

    if args.check == CheckKind::Corollary {
        let tol = args.tol.unwrap_or(default_tol(CheckKind::Corollary, None));
        let abs_tol = args.abs_tol.unwrap_or(1e-8);
        let report = corollary_report(&mut manifest, &args.map, tol, abs_tol, args.samples)?;
        return emit_reports(&manifest, args.out.as_ref(), vec![report]);
    }

    let source = args.source.load(&mut manifest, "source")?;
    let h = source.grid_spacing();
    let tol = args.tol.unwrap_or(default_tol(args.check, h));
    manifest.set("tol", tol);
    let provenance = source.provenance();
    let reports = match args.check {
        CheckKind::Lemma => {
            let abs_tol = args.abs_tol.unwrap_or(1e-8);
            manifest.set("abs_tol", abs_tol);
            let traces = source.traces(args.samples)?;
            let report = match &source {
                Source::Model(m) => check_lemma21_radial(m, &traces, tol, abs_tol),
                Source::Grid { sol, domain, .. } => {
                    check_lemma21_grid(sol, domain, &traces, tol, abs_tol)
                }
            }
            .map_err(CliError::from_verify)?;
            vec![report]
        }
        CheckKind::Sign => {
            let traces = source.traces(args.samples)?;
            let zero = zero_tolerance(&traces, tol);
            manifest.set("zero_tol", zero);
            vec![
                check_sign(&traces, tol),
                check_rigidity(&traces, source.is_circle(), zero),
            ]
        }
        CheckKind::Gap => {
            let traces = source.traces(args.samples)?;
            vec![check_gap(&traces, source.connectivity(), tol)]
        }
        CheckKind::Count => {
            manifest.set("l", args.l);
            let traces = source.traces(args.samples)?;
            vec![
                check_count_bound(&traces, source.connectivity(), args.l, tol)
                    .map_err(CliError::from_verify)?,
            ]
        }
        CheckKind::Comparison => vec![comparison_report(&mut manifest, args, &source, tol)?],
        CheckKind::Scaling => {
            manifest.set("k", &args.k);
            let model = match &source {
                Source::Model(m) => m,
                Source::Grid { .. } => {
                    return Err(CliError::Usage(
                        "--check scaling needs a closed-form --family".into(),
                    ))
                }
            };
            let mut out = Vec::new();
            for (i, c) in source.curves().iter().enumerate() {
                let r = check_scaling(model, c, i, &args.k, args.samples, tol)
                    .map_err(CliError::from_verify)?;
                out.push(r);
            }
            if out.is_empty() {
                return Err(CliError::Usage("the family has no boundary curve".into()));
            }
            out
        }
        CheckKind::Corollary => unreachable!("handled above"),
    };
    let reports = reports
        .into_iter()
        .map(|r| r.with_provenance(provenance.clone()))
        .collect();
    emit_reports(&manifest, args.out.as_ref(), reports)
}

fn comparison_report(
    manifest: &mut RunManifest,
    args: &VerifyArgs,
    inner: &Source,
    tol: f64,
) -> Result<VerificationReport, CliError> {
    let outer_args = SourceArgs {
        model: ModelArgs {
            family: args.outer.family2.clone(),
            r: args.outer.r2,
            z0: None,
        },
        domain: args.outer.domain2.clone(),
        field: args.outer.field2.clone(),
        h: args.source.h,
        newton_tol: args.source.newton_tol,
        max_iter: args.source.max_iter,
    };
    if !outer_args.is_given() {
        return Err(CliError::Usage(
            "comparison needs --family2 or --domain2".into(),
        ));
    }
    let outer = outer_args.load(manifest, "outer")?;
    let points = inner.sample_points();
    let domains = inner.domain().zip(outer.domain());
    let shared = shared_curve(inner, &outer);
    let traces = match shared {
        Some((i, j)) => {
            let a = inner.traces(args.samples)?.swap_remove(i);
            let b = outer.traces(args.samples)?.swap_remove(j);
            Some((a, b))
        }
        None => None,
    };
    let pair = traces.as_ref().map(|(a, b)| (a, b));
    let dom = domains.as_ref().map(|(a, b)| (a, b));
    let result = match (inner, &outer) {
        (Source::Model(a), Source::Model(b)) => check_comparison(a, b, dom, &points, pair, tol),
        (Source::Model(a), Source::Grid { sol: b, .. }) => {
            check_comparison(a, b, dom, &points, pair, tol)
        }
        (Source::Grid { sol: a, .. }, Source::Model(b)) => {
            check_comparison(a, b, dom, &points, pair, tol)
        }
        (Source::Grid { sol: a, .. }, Source::Grid { sol: b, .. }) => {
            check_comparison(a, b, dom, &points, pair, tol)
        }
    };
    let mut report = result.map_err(CliError::from_verify)?;
    if shared.is_none() {
        report
            .notes
            .push("no shared boundary curve; values compared only".into());
    }
    Ok(report)
}

/// Index pair of a boundary curve common to both domains, sampled at
/// matching parameters.
fn shared_curve(a: &Source, b: &Source) -> Option<(usize, usize)> {
    let ca = a.curves();
    let cb = b.curves();
    for (i, x) in ca.iter().enumerate() {
        for (j, y) in cb.iter().enumerate() {
            if x == y {
                return Some((i, j));
            }
        }
    }
    None
}

fn corollary_report(
    manifest: &mut RunManifest,
    args: &MapArgs,
    tol: f64,
    abs_tol: f64,
    samples: usize,
) -> Result<VerificationReport, CliError> {
    let path = args
        .map
        .as_ref()
        .ok_or_else(|| CliError::Usage("the corollary check needs --map".into()))?;
    let text = manifest.read_text(path)?;
    let spec = MapSpec::from_json(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let map = spec
        .to_map()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let disc = ClosedFormSolution::disc(args.radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let region = PolarRegion::disc(Point::ORIGIN, args.radius);
    let quadrature = QuadratureSpec::default();
    manifest.set("radius", args.radius);
    manifest.set("tol", tol);
    manifest.set("abs_tol", abs_tol);
    manifest.set("quadrature_tol", quadrature.tol);
    let mut report = check_corollary22(&disc, &map, &region, &quadrature, samples, tol, abs_tol)
        .map_err(CliError::from_verify)?;
    report.provenance.model = Some(disc.family());
    report
        .details
        .insert("schwarzian_integral".into(), report.rhs);
    report
        .details
        .insert("area".into(), PI * args.radius * args.radius);
    Ok(report)
}

pub fn corollary(args: &CorollaryArgs) -> Result<Status, CliError> {
    let mut manifest = RunManifest::new("corollary");
    check_samples(args.samples)?;
    manifest.set("samples", args.samples);
    manifest.output(args.out.as_ref());
    let report = corollary_report(
        &mut manifest,
        &args.map,
        args.tol,
        args.abs_tol,
        args.samples,
    )?;
    emit_reports(&manifest, args.out.as_ref(), vec![report])
}

fn emit_reports(
    manifest: &RunManifest,
    out: Option<&PathBuf>,
    reports: Vec<VerificationReport>,
) -> Result<Status, CliError> {
    let code = exit_code(&reports);
    let value = serde_json::to_value(&reports).expect("reports serialize");
    validate_reports(&value).map_err(CliError::Internal)?;
    emit_json(out, &manifest.wrap("reports", value))?;
    Ok(code)
}
