//! Small dense least-squares fits used by the coefficient extraction.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// 2-norm condition number of the design matrix.
    pub condition: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

/// Solves `min ‖A c - b‖₂` for a row-major design matrix with `cols` columns.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> LeastSquares {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    assert_eq!(m, rhs.len());
    assert!(m >= n && n > 0, "need at least as many rows as columns");
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    let c = svd
        .solve(&b, smax * f64::EPSILON * m as f64)
        .expect("SVD computed with U and V");
    let r = &a * &c - &b;
    LeastSquares {
        coefficients: c.iter().copied().collect(),
        condition,
        rms_residual: r.norm() / (m as f64).sqrt(),
    }
}

/// Fits `y ≈ Σ_k c_k (x / scale)^{p_k}` for the given powers and returns the
/// coefficients in unscaled form, i.e. for `x^{p_k}`.
pub fn power_fit(xs: &[f64], ys: &[f64], powers: &[i32], scale: f64) -> LeastSquares {
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| powers.iter().map(|&p| (x / scale).powi(p)).collect())
        .collect();
    let mut fit = least_squares(&rows, ys);
    for (c, &p) in fit.coefficients.iter_mut().zip(powers) {
        *c /= scale.powi(p);
    }
    fit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 3.0 * x.powi(3) - 7.0 * x.powi(4))
            .collect();
        let fit = power_fit(&xs, &ys, &[3, 4], 0.1);
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-9);
        assert!((fit.coefficients[1] + 7.0).abs() < 1e-7);
        assert!(fit.condition < 1e3);
    }

    #[test]
    fn rank_deficient_has_infinite_or_huge_condition() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        let fit = least_squares(&rows, &[1.0, 2.0, 3.0]);
        assert!(fit.condition > 1e12);
    }
}
