//! Where a solution comes from: a closed-form model, a domain solved on
//! the fly, or a domain together with a saved field.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

use llab_core::expansion::{trace_curve, CoefficientTrace, ExtractionConfig};
use llab_core::geometry::{BoundaryCurve, PlanarDomain};
use llab_core::models::{ClosedFormSolution, Family};
use llab_core::point::Point;
use llab_core::solver::{load_field, read_field, solve, DiscreteSolution, SolverConfig};
use llab_core::verify::Provenance;

use crate::manifest::RunManifest;
use crate::CliError;

/// Parses a positive length written as a decimal or a fraction such as
/// `1/128`.
pub fn parse_length(text: &str) -> Result<f64, String> {
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {text}"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {text}"))?;
            a / b
        }
        None => text
            .trim()
            .parse()
            .map_err(|_| format!("not a number: {text}"))?,
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("must be positive and finite: {text}"))
    }
}

fn parse_point(text: &str) -> Result<Point, String> {
    let (x, y) = text.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {text}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {text}"))?;
    Ok(Point::new(x, y))
}

/// Closed-form family selection.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Family name: disc, exterior_disc, annulus, sub_annulus,
    /// punctured_disc, disc_minus_point, exterior_log, strip.
    #[arg(long)]
    pub family: Option<String>,
    /// Radius (disc, exterior_disc), modulus (annulus, sub_annulus) or
    /// half-width (strip).
    #[arg(long = "R", value_name = "R", allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Puncture of disc_minus_point, as x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub z0: Option<Point>,
}

impl ModelArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::Usage("--family is required".into()))?;
        let r = || {
            self.r
                .ok_or_else(|| CliError::Usage(format!("family {name} needs --R")))
        };
        Ok(match name {
            "disc" => Family::Disc { radius: r()? },
            "exterior_disc" => Family::ExteriorDisc { radius: r()? },
            "annulus" => Family::Annulus { r: r()? },
            "sub_annulus" => Family::SubAnnulus { r: r()? },
            "punctured_disc" => Family::PuncturedDisc,
            "disc_minus_point" => {
                let z0 = self
                    .z0
                    .ok_or_else(|| CliError::Usage("disc_minus_point needs --z0".into()))?;
                Family::DiscMinusPoint { z0: [z0.x, z0.y] }
            }
            "exterior_log" => Family::ExteriorLog,
            "strip" => Family::Strip { half_width: r()? },
            other => return Err(CliError::Usage(format!("unknown family {other}"))),
        })
    }

    pub fn model(&self) -> Result<ClosedFormSolution, CliError> {
        ClosedFormSolution::new(self.family()?).map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Solution source shared by `extract` and `verify`.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Domain spec (JSON); solved on the fly unless --field is given.
    #[arg(long, conflicts_with = "family")]
    pub domain: Option<PathBuf>,
    /// Field dump written by `solve` on the same domain.
    #[arg(long, requires = "domain", conflicts_with = "h")]
    pub field: Option<PathBuf>,
    /// Grid spacing for an on-the-fly solve, e.g. 1/128.
    #[arg(long, value_parser = parse_length)]
    pub h: Option<f64>,
    /// Newton tolerance on the residual ∞-norm.
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
    /// Newton iteration cap.
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
}

pub enum Source {
    Model(ClosedFormSolution),
    Grid {
        sol: DiscreteSolution,
        domain: PlanarDomain,
        config: Option<SolverConfig>,
    },
}

pub fn read_domain(manifest: &mut RunManifest, path: &Path) -> Result<PlanarDomain, CliError> {
    let text = manifest.read_text(path)?;
    PlanarDomain::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn solver_config(h: f64, tol: f64, max_iter: usize) -> SolverConfig {
    let mut config = SolverConfig::new(h).with_tol(tol);
    config.max_iter = max_iter;
    config
}

impl SourceArgs {
    pub fn is_given(&self) -> bool {
        self.model.family.is_some() || self.domain.is_some()
    }

    pub fn load(&self, manifest: &mut RunManifest, tag: &str) -> Result<Source, CliError> {
        if self.model.family.is_some() {
            let model = self.model.model()?;
            manifest.set(tag, json!({ "model": model.family() }));
            return Ok(Source::Model(model));
        }
        let path = self
            .domain
            .as_ref()
            .ok_or_else(|| CliError::Usage("give --family or --domain".into()))?;
        let domain = read_domain(manifest, path)?;
        if let Some(field) = &self.field {
            let bytes = manifest.read(field)?;
            let dump = read_field(bytes.as_slice()).map_err(|e| CliError::Data(e.to_string()))?;
            let sol = load_field(&domain, &dump).map_err(|e| CliError::Data(e.to_string()))?;
            manifest.set(tag, json!({ "domain": path, "field": field, "h": dump.h }));
            return Ok(Source::Grid {
                sol,
                domain,
                config: None,
            });
        }
        let h = self
            .h
            .ok_or_else(|| CliError::Usage("a domain source needs --h or --field".into()))?;
        let config = solver_config(h, self.newton_tol, self.max_iter);
        manifest.set(tag, json!({ "domain": path, "solver": &config }));
        let sol = solve(&domain, &config).map_err(CliError::from_solver)?;
        Ok(Source::Grid {
            sol,
            domain,
            config: Some(config),
        })
    }
}

impl Source {
    /// Boundary curves with the domain on their left, outer first.
    pub fn curves(&self) -> Vec<BoundaryCurve> {
        match self {
            Source::Model(m) => m.boundary_curves().into_iter().map(|(_, c)| c).collect(),
            Source::Grid { domain, .. } => domain.curves().to_vec(),
        }
    }

    pub fn connectivity(&self) -> usize {
        match self {
            Source::Model(m) => m.boundary_curves().len(),
            Source::Grid { domain, .. } => domain.connectivity(),
        }
    }

    pub fn is_circle(&self) -> bool {
        match self {
            Source::Model(m) => matches!(m.family(), Family::Disc { .. }),
            Source::Grid { domain, .. } => domain.is_disc(),
        }
    }

    pub fn grid_spacing(&self) -> Option<f64> {
        match self {
            Source::Model(_) => None,
            Source::Grid { sol, .. } => Some(sol.grid().h()),
        }
    }

    /// The domain as a region for window checks, when it is bounded and
    /// has no punctures.
    pub fn domain(&self) -> Option<PlanarDomain> {
        match self {
            Source::Grid { domain, .. } => Some(domain.clone()),
            Source::Model(m) => match m.family() {
                Family::Disc { .. } | Family::Annulus { .. } | Family::SubAnnulus { .. } => {
                    let mut curves = self.curves();
                    let outer = curves.remove(0);
                    PlanarDomain::new(outer, curves).ok()
                }
                _ => None,
            },
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            Source::Model(m) => Provenance::model(m),
            Source::Grid { domain, config, .. } => {
                let p = Provenance::domain(domain);
                match config {
                    Some(c) => p.with_solver(c),
                    None => p,
                }
            }
        }
    }

    pub fn traces(&self, n: usize) -> Result<Vec<CoefficientTrace>, CliError> {
        let region = self.domain();
        self.curves()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let trace = match self {
                    Source::Model(m) => trace_curve(
                        m,
                        c,
                        i,
                        n,
                        &ExtractionConfig::for_curve(m, c),
                        region.as_ref(),
                    ),
                    Source::Grid { sol, .. } => trace_curve(
                        sol,
                        c,
                        i,
                        n,
                        &ExtractionConfig::for_curve(sol, c),
                        region.as_ref(),
                    ),
                };
                trace.map_err(CliError::from_expansion)
            })
            .collect()
    }

    /// Points at which a comparison evaluates both solutions.
    pub fn sample_points(&self) -> Vec<Point> {
        match self {
            Source::Grid { sol, .. } => sol
                .grid()
                .unknown_nodes()
                .iter()
                .map(|&n| sol.grid().node_position(n))
                .collect(),
            Source::Model(m) => {
                let n = 64;
                (0..n * n)
                    .map(|k| {
                        let u = (k / n) as f64 / n as f64;
                        let w = (k % n) as f64 / n as f64;
                        m.sample_interior(u, w)
                    })
                    .collect()
            }
        }
    }

    pub fn describe(&self) -> Value {
        match self {
            Source::Model(m) => json!({ "model": m.family() }),
            Source::Grid { sol, .. } => json!({
                "h": sol.grid().h(),
                "unknowns": sol.grid().unknown_count(),
                "newton_iterations": sol.iterations(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_parse() {
        assert_eq!(parse_length("1/128").unwrap(), 0.0078125);
        assert_eq!(parse_length("0.25").unwrap(), 0.25);
        assert!(parse_length("0").is_err());
        assert!(parse_length("1/0").is_err());
        assert!(parse_length("x").is_err());
    }

    #[test]
    fn families_need_their_parameters() {
        let args = |f: &str, r: Option<f64>| ModelArgs {
            family: Some(f.into()),
            r,
            z0: None,
        };
        assert!(matches!(
            args("annulus", Some(0.5)).family(),
            Ok(Family::Annulus { .. })
        ));
        assert!(args("annulus", None).family().is_err());
        assert!(args("torus", Some(0.5)).family().is_err());
        assert!(args("disc_minus_point", None).family().is_err());
        assert!(args("annulus", Some(1.5)).model().is_err());
        assert!(args("punctured_disc", None).model().is_ok());
    }
}
