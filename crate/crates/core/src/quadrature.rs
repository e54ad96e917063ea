//! Gauss–Legendre rules and polar tensor-product quadrature.

use std::f64::consts::PI;

use crate::point::Point;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.into_iter()
        .zip(w)
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// An annular region `r_inner < |z - center| < r_outer` (a disc when
/// `r_inner = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarRegion {
    pub center: Point,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl PolarRegion {
    pub fn disc(center: Point, radius: f64) -> Self {
        Self {
            center,
            r_inner: 0.0,
            r_outer: radius,
        }
    }

    pub fn annulus(center: Point, r_inner: f64, r_outer: f64) -> Self {
        Self {
            center,
            r_inner,
            r_outer,
        }
    }

    /// Tensor rule: Gauss in radius, trapezoid in angle. Returns points with
    /// area weights (the Jacobian `r` included).
    pub fn rule(&self, n_radial: usize, n_angular: usize) -> Vec<(Point, f64)> {
        let radial = gauss_legendre_on(n_radial, self.r_inner, self.r_outer);
        let dtheta = 2.0 * PI / n_angular as f64;
        let mut out = Vec::with_capacity(n_radial * n_angular);
        for &(r, w) in &radial {
            for k in 0..n_angular {
                let th = (k as f64 + 0.5) * dtheta;
                let p = self.center + Point::new(r * th.cos(), r * th.sin());
                out.push((p, w * r * dtheta));
            }
        }
        out
    }
}

/// Outcome of a refinement loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub value: f64,
    /// |last - previous|.
    pub change: f64,
    pub converged: bool,
    pub n_radial: usize,
    pub n_angular: usize,
}

/// Integrates `f` over the region, doubling both resolutions until two
/// successive values differ by less than `tol`.
pub fn integrate_polar<F, E>(
    region: &PolarRegion,
    f: F,
    tol: f64,
    start: (usize, usize),
    max_levels: usize,
) -> Result<Refined, E>
where
    F: Fn(Point) -> Result<f64, E> + Sync,
    E: Send,
{
    use rayon::prelude::*;
    let eval = |nr: usize, nt: usize| -> Result<f64, E> {
        let rule = region.rule(nr, nt);
        let parts: Result<Vec<f64>, E> = rule.par_iter().map(|&(p, w)| Ok(w * f(p)?)).collect();
        Ok(parts?.iter().sum())
    };
    let (mut nr, mut nt) = start;
    let mut prev = eval(nr, nt)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_levels {
        nr *= 2;
        nt *= 2;
        let next = eval(nr, nt)?;
        change = (next - prev).abs();
        prev = next;
        if change < tol {
            return Ok(Refined {
                value: prev,
                change,
                converged: true,
                n_radial: nr,
                n_angular: nt,
            });
        }
    }
    Ok(Refined {
        value: prev,
        change,
        converged: false,
        n_radial: nr,
        n_angular: nt,
    })
}
