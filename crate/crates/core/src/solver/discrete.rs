use crate::jet::{EvalError, Jet, Solution};
use crate::point::Point;

use super::grid::Grid;

/// A converged grid field with its Newton history.
///
/// Off-node values and derivatives come from bicubic Lagrange
/// interpolation on the 4×4 block of nodes around the containing cell;
/// every node of the block must be inside the domain.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    grid: Grid,
    /// Nodal values, `NaN` at exterior nodes.
    values: Vec<f64>,
    /// Nodal discrete Laplacian, `NaN` at exterior nodes.
    laplacian: Vec<f64>,
    log: Vec<f64>,
    converged: bool,
}

impl DiscreteSolution {
    /// Builds a solution from per-unknown values and Laplacians.
    pub(crate) fn new(
        grid: Grid,
        unknowns: &[f64],
        laplacian: &[f64],
        log: Vec<f64>,
        converged: bool,
    ) -> Self {
        let n = grid.nx() * grid.ny();
        let mut values = vec![f64::NAN; n];
        let mut lap = vec![f64::NAN; n];
        for (k, &node) in grid.unknown_nodes().iter().enumerate() {
            values[node] = unknowns[k];
            lap[node] = laplacian[k];
        }
        Self {
            grid,
            values,
            laplacian: lap,
            log,
            converged,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Row-major nodal values, `NaN` outside the domain.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values at the unknowns in solve order.
    pub fn unknown_values(&self) -> Vec<f64> {
        self.grid
            .unknown_nodes()
            .iter()
            .map(|&n| self.values[n])
            .collect()
    }

    /// Residual ∞-norm before the first and after every Newton step.
    pub fn log(&self) -> &[f64] {
        &self.log
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.log.len().saturating_sub(1)
    }

    /// Largest nodal deviation from `reference` over the unknowns.
    pub fn max_error<S: Solution>(&self, reference: &S) -> Result<f64, EvalError> {
        let mut err = 0.0f64;
        for &node in self.grid.unknown_nodes() {
            let exact = reference.value(self.grid.node_position(node))?;
            err = err.max((self.values[node] - exact).abs());
        }
        Ok(err)
    }

    /// The 4×4 block around `p`: lower-left node and local coordinates.
    fn block(&self, p: Point) -> Result<(usize, usize, f64, f64), EvalError> {
        let outside = || EvalError::OutsideGrid { x: p.x, y: p.y };
        let (i, j) = self.grid.cell_of(p).ok_or_else(outside)?;
        if i == 0 || j == 0 || i + 2 >= self.grid.nx() || j + 2 >= self.grid.ny() {
            return Err(outside());
        }
        let h = self.grid.h();
        let base = self.grid.position(i, j);
        let u = (p.x - base.x) / h;
        let w = (p.y - base.y) / h;
        for b in 0..4 {
            for a in 0..4 {
                if !self.grid.is_inside(self.grid.index(i + a - 1, j + b - 1)) {
                    return Err(outside());
                }
            }
        }
        Ok((i - 1, j - 1, u, w))
    }

    fn interpolate(&self, field: &[f64], p: Point, order: usize) -> Result<Jet, EvalError> {
        let (i0, j0, u, w) = self.block(p)?;
        let h = self.grid.h();
        let wx = lagrange4(u, order);
        let wy = lagrange4(w, order);
        let mut jet = Jet::new(0.0, [0.0; 2], [[0.0; 2]; 2]);
        for b in 0..4 {
            for a in 0..4 {
                let f = field[self.grid.index(i0 + a, j0 + b)];
                jet.value += wx[0][a] * wy[0][b] * f;
                if order >= 1 {
                    jet.grad[0] += wx[1][a] * wy[0][b] * f / h;
                    jet.grad[1] += wx[0][a] * wy[1][b] * f / h;
                }
                if order >= 2 {
                    let xy = wx[1][a] * wy[1][b] * f / (h * h);
                    jet.hess[0][0] += wx[2][a] * wy[0][b] * f / (h * h);
                    jet.hess[1][1] += wx[0][a] * wy[2][b] * f / (h * h);
                    jet.hess[0][1] += xy;
                    jet.hess[1][0] += xy;
                }
            }
        }
        Ok(jet)
    }
}

/// Lagrange weights and their first two derivatives at `u` for the nodes
/// `-1, 0, 1, 2`. Derivatives above `order` are left at zero.
fn lagrange4(u: f64, order: usize) -> [[f64; 4]; 3] {
    const X: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];
    let mut out = [[0.0; 4]; 3];
    for k in 0..4 {
        let denom: f64 = (0..4).filter(|&m| m != k).map(|m| X[k] - X[m]).product();
        let others: Vec<f64> = (0..4).filter(|&m| m != k).map(|m| u - X[m]).collect();
        let [a, b, c] = [others[0], others[1], others[2]];
        out[0][k] = a * b * c / denom;
        if order >= 1 {
            out[1][k] = (b * c + a * c + a * b) / denom;
        }
        if order >= 2 {
            out[2][k] = 2.0 * (a + b + c) / denom;
        }
    }
    out
}

impl Solution for DiscreteSolution {
    fn jet(&self, p: Point) -> Result<Jet, EvalError> {
        self.interpolate(&self.values, p, 2)
    }

    fn value(&self, p: Point) -> Result<f64, EvalError> {
        Ok(self.interpolate(&self.values, p, 0)?.value)
    }

    /// Bicubic interpolation of the nodal discrete Laplacian.
    fn laplacian(&self, p: Point) -> Result<f64, EvalError> {
        Ok(self.interpolate(&self.laplacian, p, 0)?.value)
    }

    fn grid_spacing(&self) -> Option<f64> {
        Some(self.grid.h())
    }
}
