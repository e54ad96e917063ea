//! Embedded-boundary finite differences and a damped Newton solve for
//! `v Δv = |∇v|² - 1`, `v = 0` on the boundary.
//!
//! Unknowns sit at lattice nodes strictly inside the domain. Where an axis
//! arm from a node crosses the boundary, the Shortley–Weller stencil uses
//! the exact crossing distance and the boundary value `0`, so the scheme is
//! second order and reproduces quadratic solutions exactly.

mod discrete;
mod grid;
mod io;
mod linear;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geometry::PlanarDomain;
use crate::point::Point;

pub use discrete::DiscreteSolution;
pub use grid::{build_grid, build_grid_window, Grid, NodeKind, EAST, MIN_CUT, NORTH, SOUTH, WEST};
pub use io::{read_field, write_field, write_field_csv, FieldDump, FIELD_MAGIC};

use linear::SparseLu;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("grid too coarse for the domain: {0}")]
    Resolution(String),
    #[error("Newton did not converge in {} iterations (last residual {:e})", .log.len().saturating_sub(1), .log.last().copied().unwrap_or(f64::NAN))]
    Divergence { log: Vec<f64> },
    #[error("damping could not keep v positive after {} iterations", .log.len().saturating_sub(1))]
    Positivity { log: Vec<f64> },
    #[error("sparse linear solve failed: {0}")]
    Linear(String),
    #[error("malformed field file: {0}")]
    Format(String),
}

/// Starting field for the Newton iteration.
#[derive(Clone, Default)]
pub enum InitialGuess {
    /// Distance to the boundary.
    #[default]
    Distance,
    /// A user-supplied field sampled at the unknown nodes.
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl InitialGuess {
    pub fn custom(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        InitialGuess::Custom(Arc::new(f))
    }

    fn name(&self) -> &'static str {
        match self {
            InitialGuess::Distance => "distance",
            InitialGuess::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for InitialGuess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for InitialGuess {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// Lattice spacing.
    pub h: f64,
    /// Absolute tolerance on the residual ∞-norm.
    pub tol: f64,
    pub max_iter: usize,
    pub initial: InitialGuess,
}

impl SolverConfig {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            tol: 1e-10,
            max_iter: 50,
            initial: InitialGuess::Distance,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_initial(mut self, initial: InitialGuess) -> Self {
        self.initial = initial;
        self
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(SolverError::InvalidConfig(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Shortley–Weller weights at one unknown. Arm order is E, W, N, S.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    /// Unknown index of each neighbour, `None` where the arm is cut.
    nb: [Option<usize>; 4],
    /// Laplacian weights: centre, then E, W, N, S.
    lap: [f64; 5],
    /// `∂x` weights: centre, E, W.
    gx: [f64; 3],
    /// `∂y` weights: centre, N, S.
    gy: [f64; 3],
}

/// Weights of the three-point second and first derivatives with arms
/// `a` (forward) and `b` (backward): `(centre, forward, backward)`.
fn three_point(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    let second = [-2.0 / (a * b), 2.0 / (a * (a + b)), 2.0 / (b * (a + b))];
    let first = [(a - b) / (a * b), b / (a * (a + b)), -a / (b * (a + b))];
    (second, first)
}

fn stencils(grid: &Grid) -> Vec<Stencil> {
    let h = grid.h();
    grid.unknown_nodes()
        .iter()
        .map(|&node| {
            let arms = grid.arms(node);
            let mut nb = [None; 4];
            for (dir, slot) in nb.iter_mut().enumerate() {
                if arms[dir] >= 1.0 {
                    *slot = grid.neighbour(node, dir).and_then(|m| grid.unknown(m));
                }
            }
            let (sx, fx) = three_point(arms[EAST] * h, arms[WEST] * h);
            let (sy, fy) = three_point(arms[NORTH] * h, arms[SOUTH] * h);
            Stencil {
                nb,
                lap: [sx[0] + sy[0], sx[1], sx[2], sy[1], sy[2]],
                gx: fx,
                gy: fy,
            }
        })
        .collect()
}

/// Discrete `Δv`, `∂x v`, `∂y v` at one unknown; cut neighbours read `0`.
fn local(st: &Stencil, v: &[f64], k: usize) -> (f64, f64, f64) {
    let n = |d: usize| st.nb[d].map_or(0.0, |m| v[m]);
    let (e, w, no, s) = (n(EAST), n(WEST), n(NORTH), n(SOUTH));
    let lap = st.lap[0] * v[k] + st.lap[1] * e + st.lap[2] * w + st.lap[3] * no + st.lap[4] * s;
    let gx = st.gx[0] * v[k] + st.gx[1] * e + st.gx[2] * w;
    let gy = st.gy[0] * v[k] + st.gy[1] * no + st.gy[2] * s;
    (lap, gx, gy)
}

/// The discrete operator on one grid.
pub(crate) struct Operator {
    stencils: Vec<Stencil>,
}

impl Operator {
    pub(crate) fn new(grid: &Grid) -> Self {
        Self {
            stencils: stencils(grid),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.stencils.len()
    }

    /// `F_i = v_i (Δ_h v)_i - |∇_h v|_i² + 1`.
    pub(crate) fn residual(&self, v: &[f64]) -> Vec<f64> {
        self.stencils
            .par_iter()
            .enumerate()
            .map(|(k, st)| {
                let (lap, gx, gy) = local(st, v, k);
                v[k] * lap - gx * gx - gy * gy + 1.0
            })
            .collect()
    }

    /// Nodal `Δ_h v`.
    pub(crate) fn laplacian(&self, v: &[f64]) -> Vec<f64> {
        self.stencils
            .par_iter()
            .enumerate()
            .map(|(k, st)| local(st, v, k).0)
            .collect()
    }

    /// Jacobian entries `(row, col, value)`. The sparsity pattern depends
    /// only on the grid, so every call yields the same structure.
    pub(crate) fn jacobian(&self, v: &[f64]) -> Vec<(usize, usize, f64)> {
        self.stencils
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, st)| {
                let (lap, gx, gy) = local(st, v, k);
                let diag = lap + v[k] * st.lap[0] - 2.0 * (gx * st.gx[0] + gy * st.gy[0]);
                let off = [
                    v[k] * st.lap[1] - 2.0 * gx * st.gx[1],
                    v[k] * st.lap[2] - 2.0 * gx * st.gx[2],
                    v[k] * st.lap[3] - 2.0 * gy * st.gy[1],
                    v[k] * st.lap[4] - 2.0 * gy * st.gy[2],
                ];
                std::iter::once((k, k, diag))
                    .chain((0..4).filter_map(move |d| st.nb[d].map(|m| (k, m, off[d]))))
            })
            .collect()
    }

    /// Jacobian-vector product, used to check the assembled matrix.
    #[cfg(test)]
    pub(crate) fn jacobian_apply(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (r, c, a) in self.jacobian(v) {
            out[r] += a * w[c];
        }
        out
    }
}

fn max_norm(f: &[f64]) -> f64 {
    f.iter().fold(
        0.0f64,
        |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) },
    )
}

/// Step sizes below this are treated as a failed line search.
const MIN_DAMPING: f64 = 1.0 / (1u64 << 30) as f64;

/// Solves the equation on `domain` by damped Newton iteration.
///
/// Each step halves the Newton update until the trial field is positive
/// at every unknown and the residual ∞-norm decreases.
pub fn solve(
    domain: &PlanarDomain,
    config: &SolverConfig,
) -> Result<DiscreteSolution, SolverError> {
    config.validate()?;
    let grid = build_grid(domain, config.h)?;
    let op = Operator::new(&grid);
    let mut v: Vec<f64> = grid
        .unknown_nodes()
        .par_iter()
        .map(|&node| {
            let p = grid.node_position(node);
            match &config.initial {
                InitialGuess::Distance => domain.project(p).distance,
                InitialGuess::Custom(f) => f(p),
            }
        })
        .collect();
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(SolverError::InvalidConfig(
            "initial guess must be positive at every interior node".into(),
        ));
    }
    let mut f = op.residual(&v);
    let mut norm = max_norm(&f);
    let mut log = vec![norm];
    let mut lu = SparseLu::new(op.len());
    let mut iterations = 0;
    while !(norm <= config.tol) {
        if iterations == config.max_iter || norm.is_nan() {
            return Err(SolverError::Divergence { log });
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta = lu.solve(&op.jacobian(&v), &rhs)?;
        let mut t = 1.0;
        let mut positive_seen = false;
        loop {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            if trial.iter().all(|&x| x > 0.0) {
                positive_seen = true;
                let ft = op.residual(&trial);
                let nt = max_norm(&ft);
                if nt < norm {
                    v = trial;
                    f = ft;
                    norm = nt;
                    break;
                }
            }
            t *= 0.5;
            if t < MIN_DAMPING {
                return Err(if positive_seen {
                    SolverError::Divergence { log }
                } else {
                    SolverError::Positivity { log }
                });
            }
        }
        log.push(norm);
        iterations += 1;
    }
    let laplacian = op.laplacian(&v);
    Ok(DiscreteSolution::new(grid, &v, &laplacian, log, true))
}

/// Rebuilds a solution from a field dump of a solve on `domain`.
///
/// The grid is rebuilt with the dump's origin and spacing; the dump must
/// have finite positive values exactly at its interior nodes.
pub fn load_field(
    domain: &PlanarDomain,
    dump: &FieldDump,
) -> Result<DiscreteSolution, SolverError> {
    let grid = build_grid_window(domain, dump.h, dump.origin, dump.nx, dump.ny)?;
    let mut v = Vec::with_capacity(grid.unknown_count());
    for node in 0..dump.values.len() {
        let x = dump.values[node];
        match (grid.unknown(node), x.is_nan()) {
            (Some(_), false) if x > 0.0 => v.push(x),
            (None, true) => {}
            _ => {
                let (i, j) = grid.coords(node);
                return Err(SolverError::Format(format!(
                    "field does not match the domain at node ({i}, {j})"
                )));
            }
        }
    }
    let laplacian = Operator::new(&grid).laplacian(&v);
    Ok(DiscreteSolution::new(
        grid,
        &v,
        &laplacian,
        Vec::new(),
        true,
    ))
}

/// Recomputes the residual ∞-norm from the stored nodal values.
pub fn residual_norm(sol: &DiscreteSolution) -> f64 {
    let v = sol.unknown_values();
    max_norm(&Operator::new(sol.grid()).residual(&v))
}

#[cfg(test)]
mod tests;
