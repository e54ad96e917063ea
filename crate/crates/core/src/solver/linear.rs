use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::SolverError;

/// Required relative residual of each linear solve.
const LINEAR_TOL: f64 = 1e-12;
/// Rounds of iterative refinement before giving up.
const REFINE_STEPS: usize = 3;

/// Sparse LU with the symbolic factorization kept across Newton steps.
pub(crate) struct SparseLu {
    n: usize,
    symbolic: Option<SymbolicLu<usize>>,
}

impl SparseLu {
    pub(crate) fn new(n: usize) -> Self {
        Self { n, symbolic: None }
    }

    /// Solves `A x = b` for `A` given as `(row, col, value)` entries.
    pub(crate) fn solve(
        &mut self,
        entries: &[(usize, usize, f64)],
        rhs: &[f64],
    ) -> Result<Vec<f64>, SolverError> {
        let n = self.n;
        let triplets: Vec<Triplet<usize, usize, f64>> = entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| SolverError::Linear(format!("{e:?}")))?;
        let symbolic = match &self.symbolic {
            Some(s) => s.clone(),
            None => {
                let s = SymbolicLu::try_new(a.symbolic())
                    .map_err(|e| SolverError::Linear(format!("{e:?}")))?;
                self.symbolic = Some(s.clone());
                s
            }
        };
        let lu = Lu::try_new_with_symbolic(symbolic, a.as_ref())
            .map_err(|e| SolverError::Linear(format!("{e:?}")))?;
        let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let b_norm = norm(rhs).max(f64::MIN_POSITIVE);
        let mut x = lu.solve(&b);
        for _ in 0..=REFINE_STEPS {
            let mut r = rhs.to_vec();
            for &(i, j, v) in entries {
                r[i] -= v * x[(j, 0)];
            }
            let rel = norm(&r) / b_norm;
            if !rel.is_finite() {
                return Err(SolverError::Linear("non-finite solution".into()));
            }
            if rel <= LINEAR_TOL {
                return Ok((0..n).map(|i| x[(i, 0)]).collect());
            }
            let dx = lu.solve(&Mat::from_fn(n, 1, |i, _| r[i]));
            x += dx;
        }
        Err(SolverError::Linear(format!(
            "relative residual above {LINEAR_TOL:e} after refinement"
        )))
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
