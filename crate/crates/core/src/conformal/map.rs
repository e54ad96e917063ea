use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryCurve, CurveShape, FourierCurve};
use crate::jet::{EvalError, HoloJet};
use crate::point::Point;

use super::ConformalError;

/// Derivatives smaller than this count as critical points.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Numeric inversion settings for maps without a closed-form inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseConfig {
    /// Box containing the preimages; seeds are searched on a grid over it.
    pub lo: Point,
    pub hi: Point,
    /// Seed grid is `seeds × seeds`.
    pub seeds: usize,
    /// Newton stops when `|f(z) - w| ≤ tol · max(1, |w|)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl InverseConfig {
    pub fn new(lo: Point, hi: Point) -> Self {
        Self {
            lo,
            hi,
            seeds: 64,
            tol: 1e-12,
            max_iter: 60,
        }
    }
}

/// A holomorphic map given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum HolomorphicMap {
    /// `a z + b`.
    Affine { a: Complex64, b: Complex64 },
    /// `(a z + b) / (c z + d)`.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `Σ c_k z^k`.
    Polynomial(Vec<Complex64>),
    /// Maps applied in order: `[f, g]` is `g ∘ f`.
    Compose(Vec<HolomorphicMap>),
}

impl HolomorphicMap {
    pub fn identity() -> Self {
        HolomorphicMap::Affine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn affine(a: Complex64, b: Complex64) -> Result<Self, ConformalError> {
        if !(a.norm() > CRITICAL_TOL) || !b.is_finite() {
            return Err(ConformalError::InvalidMap(format!(
                "affine map needs a finite nonzero slope, got a = {a}"
            )));
        }
        Ok(HolomorphicMap::Affine { a, b })
    }

    pub fn mobius(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, ConformalError> {
        let det = a * d - b * c;
        if !(det.norm() > CRITICAL_TOL) {
            return Err(ConformalError::InvalidMap(format!(
                "Möbius determinant |ad - bc| = {} is too small",
                det.norm()
            )));
        }
        Ok(HolomorphicMap::Mobius { a, b, c, d })
    }

    /// The disc automorphism `(z - z0) / (1 - z̄0 z)` taking `z0` to 0.
    pub fn disc_automorphism(z0: Complex64) -> Result<Self, ConformalError> {
        if !(z0.norm() < 1.0) {
            return Err(ConformalError::InvalidMap(format!(
                "disc automorphism needs |z0| < 1, got {}",
                z0.norm()
            )));
        }
        let one = Complex64::new(1.0, 0.0);
        Self::mobius(one, -z0, -z0.conj(), one)
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self, ConformalError> {
        if coeffs.len() < 2
            || coeffs
                .iter()
                .skip(1)
                .all(|c| *c == Complex64::new(0.0, 0.0))
        {
            return Err(ConformalError::InvalidMap(
                "polynomial map must be non-constant".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ConformalError::InvalidMap("non-finite coefficient".into()));
        }
        Ok(HolomorphicMap::Polynomial(coeffs))
    }

    pub fn compose(maps: Vec<HolomorphicMap>) -> Result<Self, ConformalError> {
        if maps.is_empty() {
            return Err(ConformalError::InvalidMap("empty composition".into()));
        }
        Ok(HolomorphicMap::Compose(maps))
    }

    /// `f`, `f'`, `f''`, `f'''` at `z`.
    pub fn jet(&self, z: Complex64) -> Result<HoloJet, EvalError> {
        match self {
            HolomorphicMap::Affine { a, b } => {
                let zero = Complex64::new(0.0, 0.0);
                Ok(HoloJet::new(a * z + b, *a, zero, zero))
            }
            HolomorphicMap::Mobius { a, b, c, d } => {
                let den = c * z + d;
                if den.norm() <= CRITICAL_TOL * (c.norm() + d.norm()) {
                    return Err(EvalError::singular(Point::from_complex(z)));
                }
                let det = a * d - b * c;
                let inv = den.inv();
                let d1 = det * inv * inv;
                Ok(HoloJet::new(
                    (a * z + b) * inv,
                    d1,
                    -2.0 * c * d1 * inv,
                    6.0 * c * c * d1 * inv * inv,
                ))
            }
            HolomorphicMap::Polynomial(coeffs) => {
                // Horner for the value and first three derivatives
                let zero = Complex64::new(0.0, 0.0);
                let (mut p0, mut p1, mut p2, mut p3) = (zero, zero, zero, zero);
                for &c in coeffs.iter().rev() {
                    p3 = p3 * z + p2;
                    p2 = p2 * z + p1;
                    p1 = p1 * z + p0;
                    p0 = p0 * z + c;
                }
                Ok(HoloJet::new(p0, p1, 2.0 * p2, 6.0 * p3))
            }
            HolomorphicMap::Compose(maps) => {
                let mut jet = maps[0].jet(z)?;
                for m in &maps[1..] {
                    jet = jet.then(&m.jet(jet.f)?);
                }
                Ok(jet)
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        Ok(self.jet(z)?.f)
    }

    /// `S(f) = f'''/f' - 3/2 (f''/f')²`.
    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let jet = self.jet(z)?;
        if jet.d1.norm() < CRITICAL_TOL {
            return Err(EvalError::CriticalPoint { x: z.re, y: z.im });
        }
        Ok(jet.schwarzian())
    }

    /// Closed-form inverse where one exists.
    pub fn inverse_closed_form(&self, w: Complex64) -> Option<Complex64> {
        match self {
            HolomorphicMap::Affine { a, b } => Some((w - b) / a),
            HolomorphicMap::Mobius { a, b, c, d } => {
                let den = a - c * w;
                (den.norm() > 0.0).then(|| (d * w - b) / den)
            }
            HolomorphicMap::Polynomial(c) if c.len() == 2 => Some((w - c[0]) / c[1]),
            HolomorphicMap::Polynomial(_) => None,
            HolomorphicMap::Compose(maps) => maps
                .iter()
                .rev()
                .try_fold(w, |acc, m| m.inverse_closed_form(acc)),
        }
    }

    /// Preimage of `w` inside the configured box: closed form when
    /// available, otherwise Newton from the best grid seed.
    pub fn inverse(&self, w: Complex64, config: &InverseConfig) -> Result<Complex64, EvalError> {
        let no_preimage = || EvalError::NoPreimage { x: w.re, y: w.im };
        if let Some(z) = self.inverse_closed_form(w) {
            return if z.is_finite() {
                Ok(z)
            } else {
                Err(no_preimage())
            };
        }
        let n = config.seeds.max(2);
        let (lo, hi) = (config.lo, config.hi);
        let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
        for j in 0..n {
            for i in 0..n {
                let z = Complex64::new(
                    lo.x + (hi.x - lo.x) * i as f64 / (n - 1) as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / (n - 1) as f64,
                );
                if let Ok(fz) = self.eval(z) {
                    let r = (fz - w).norm();
                    if r < best.0 {
                        best = (r, z);
                    }
                }
            }
        }
        let mut z = best.1;
        let scale = w.norm().max(1.0);
        for _ in 0..config.max_iter {
            let jet = self.jet(z)?;
            let r = jet.f - w;
            if r.norm() <= config.tol * scale {
                let margin = 0.1 * (hi.x - lo.x).max(hi.y - lo.y);
                let inside = z.re >= lo.x - margin
                    && z.re <= hi.x + margin
                    && z.im >= lo.y - margin
                    && z.im <= hi.y + margin;
                return if inside { Ok(z) } else { Err(no_preimage()) };
            }
            if jet.d1.norm() < CRITICAL_TOL {
                return Err(EvalError::CriticalPoint { x: z.re, y: z.im });
            }
            // halve the Newton step until the residual decreases
            let step = r / jet.d1;
            let mut t = 1.0;
            loop {
                let trial = z - step * t;
                if let Ok(ft) = self.eval(trial) {
                    if (ft - w).norm() < r.norm() || t < 1e-6 {
                        z = trial;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-6 {
                    z = trial;
                    break;
                }
            }
        }
        Err(no_preimage())
    }

    /// Image of a boundary curve when it has an exact representation:
    /// circles under Möbius maps, and circles or Fourier curves under
    /// affine and polynomial maps (as Fourier curves).
    pub fn image_curve(&self, curve: &BoundaryCurve) -> Result<BoundaryCurve, ConformalError> {
        match self {
            HolomorphicMap::Mobius { .. } => {
                if curve.as_circle().is_none() {
                    return Err(ConformalError::Unsupported(
                        "Möbius image of a non-circular curve".into(),
                    ));
                }
                mobius_image_circle(self, curve)
            }
            HolomorphicMap::Affine { a, b } => {
                HolomorphicMap::Polynomial(vec![*b, *a]).image_curve(curve)
            }
            HolomorphicMap::Polynomial(coeffs) => {
                let z = laurent_of(curve);
                // Horner on coefficient sequences
                let mut acc = vec![*coeffs.last().expect("non-empty")];
                let mut offset = 0i64;
                for &c in coeffs.iter().rev().skip(1) {
                    let (prod, off) = convolve(&acc, offset, &z.0, z.1);
                    acc = prod;
                    offset = off;
                    add_at(&mut acc, &mut offset, 0, c);
                }
                let f = fourier_of(&acc, offset);
                Ok(BoundaryCurve::fourier(f.ax, f.bx, f.ay, f.by)?)
            }
            HolomorphicMap::Compose(maps) => {
                let mut c = curve.clone();
                for m in maps {
                    c = m.image_curve(&c)?;
                }
                Ok(c)
            }
        }
    }
}

fn mobius_image_circle(
    map: &HolomorphicMap,
    curve: &BoundaryCurve,
) -> Result<BoundaryCurve, ConformalError> {
    let pts: Vec<Complex64> = [0.0, 2.0, 4.0]
        .iter()
        .map(|&s| map.eval(curve.position(s).to_complex()))
        .collect::<Result<_, _>>()
        .map_err(|_| ConformalError::Unsupported("circle passes through the pole".into()))?;
    let (a, b, c) = (pts[0], pts[1], pts[2]);
    // circumcenter of the three image points
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-12 * (a.norm_sqr() + b.norm_sqr() + c.norm_sqr()).max(1e-300) {
        return Err(ConformalError::Unsupported(
            "image of the circle is a line".into(),
        ));
    }
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    let u = Point::new(ux, uy);
    Ok(BoundaryCurve::circle(
        u,
        u.distance(Point::from_complex(a)),
    )?)
}

/// Complex coefficients `z(s) = Σ_m c_m e^{ims}`, with the index of the
/// first entry.
fn laurent_of(curve: &BoundaryCurve) -> (Vec<Complex64>, i64) {
    let f = match curve.shape() {
        CurveShape::Circle {
            center,
            radius,
            orientation,
        } => {
            let r = Complex64::new(*radius, 0.0);
            let c = center.to_complex();
            return if *orientation > 0.0 {
                (vec![c, r], 0)
            } else {
                (vec![r, c], -1)
            };
        }
        CurveShape::Fourier(f) => f,
    };
    let get = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
    let m = [f.ax.len(), f.bx.len(), f.ay.len(), f.by.len()]
        .into_iter()
        .max()
        .unwrap_or(1)
        .max(1);
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * m - 1];
    let mid = m - 1;
    out[mid] = Complex64::new(get(&f.ax, 0), get(&f.ay, 0));
    for k in 1..m {
        let (ax, bx, ay, by) = (get(&f.ax, k), get(&f.bx, k), get(&f.ay, k), get(&f.by, k));
        out[mid + k] = Complex64::new(0.5 * (ax + by), 0.5 * (ay - bx));
        out[mid - k] = Complex64::new(0.5 * (ax - by), 0.5 * (ay + bx));
    }
    (out, -(mid as i64))
}

fn fourier_of(c: &[Complex64], offset: i64) -> FourierCurve {
    let get = |m: i64| {
        let i = m - offset;
        if i >= 0 && (i as usize) < c.len() {
            c[i as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let top = (offset.abs()).max(offset + c.len() as i64 - 1).max(0) as usize;
    let mut f = FourierCurve {
        ax: vec![0.0; top + 1],
        bx: vec![0.0; top + 1],
        ay: vec![0.0; top + 1],
        by: vec![0.0; top + 1],
    };
    let c0 = get(0);
    f.ax[0] = c0.re;
    f.ay[0] = c0.im;
    for k in 1..=top {
        let (p, q) = (get(k as i64), get(-(k as i64)));
        f.ax[k] = p.re + q.re;
        f.bx[k] = q.im - p.im;
        f.ay[k] = p.im + q.im;
        f.by[k] = p.re - q.re;
    }
    f
}

fn convolve(a: &[Complex64], oa: i64, b: &[Complex64], ob: i64) -> (Vec<Complex64>, i64) {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    (out, oa + ob)
}

fn add_at(c: &mut Vec<Complex64>, offset: &mut i64, m: i64, value: Complex64) {
    while m < *offset {
        c.insert(0, Complex64::new(0.0, 0.0));
        *offset -= 1;
    }
    while m - *offset >= c.len() as i64 {
        c.push(Complex64::new(0.0, 0.0));
    }
    c[(m - *offset) as usize] += value;
}

/// A complex number in JSON: either a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        match c {
            ComplexSpec::Real(x) => Complex64::new(x, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexSpec {
    fn from(c: Complex64) -> Self {
        ComplexSpec::Pair([c.re, c.im])
    }
}

/// JSON description of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Affine {
        a: ComplexSpec,
        b: ComplexSpec,
    },
    Mobius {
        a: ComplexSpec,
        b: ComplexSpec,
        c: ComplexSpec,
        d: ComplexSpec,
    },
    Polynomial {
        coeffs: Vec<ComplexSpec>,
    },
    Compose {
        maps: Vec<MapSpec>,
    },
}

impl MapSpec {
    pub fn from_json(text: &str) -> Result<Self, ConformalError> {
        serde_json::from_str(text).map_err(|e| ConformalError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map spec serializes")
    }

    pub fn to_map(&self) -> Result<HolomorphicMap, ConformalError> {
        match self {
            MapSpec::Affine { a, b } => HolomorphicMap::affine((*a).into(), (*b).into()),
            MapSpec::Mobius { a, b, c, d } => {
                HolomorphicMap::mobius((*a).into(), (*b).into(), (*c).into(), (*d).into())
            }
            MapSpec::Polynomial { coeffs } => {
                HolomorphicMap::polynomial(coeffs.iter().map(|&c| c.into()).collect())
            }
            MapSpec::Compose { maps } => {
                HolomorphicMap::compose(maps.iter().map(MapSpec::to_map).collect::<Result<_, _>>()?)
            }
        }
    }

    pub fn from_map(map: &HolomorphicMap) -> Self {
        match map {
            HolomorphicMap::Affine { a, b } => MapSpec::Affine {
                a: (*a).into(),
                b: (*b).into(),
            },
            HolomorphicMap::Mobius { a, b, c, d } => MapSpec::Mobius {
                a: (*a).into(),
                b: (*b).into(),
                c: (*c).into(),
                d: (*d).into(),
            },
            HolomorphicMap::Polynomial(c) => MapSpec::Polynomial {
                coeffs: c.iter().map(|&c| c.into()).collect(),
            },
            HolomorphicMap::Compose(maps) => MapSpec::Compose {
                maps: maps.iter().map(MapSpec::from_map).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn samples() -> Vec<HolomorphicMap> {
        vec![
            HolomorphicMap::affine(c(2.0, -1.0), c(0.3, 0.2)).unwrap(),
            HolomorphicMap::mobius(c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(2.0, 0.0)).unwrap(),
            HolomorphicMap::polynomial(vec![c(0.1, 0.0), c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.05)])
                .unwrap(),
            HolomorphicMap::compose(vec![
                HolomorphicMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)]).unwrap(),
                HolomorphicMap::disc_automorphism(c(0.2, 0.3)).unwrap(),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        let z = c(0.31, -0.22);
        for m in samples() {
            let j = m.jet(z).unwrap();
            let fd = (m.eval(z + h).unwrap() - m.eval(z - h).unwrap()) / (2.0 * h);
            assert!((fd - j.d1).norm() < 1e-8, "{m:?}");
            let d1 = |z| m.jet(z).unwrap().d1;
            let d2 = |z| m.jet(z).unwrap().d2;
            assert!(((d1(z + h) - d1(z - h)) / (2.0 * h) - j.d2).norm() < 1e-8);
            assert!(((d2(z + h) - d2(z - h)) / (2.0 * h) - j.d3).norm() < 1e-8);
        }
    }

    #[test]
    fn schwarzian_examples() {
        let m = samples().remove(1);
        assert!(m.schwarzian(c(0.4, 0.7)).unwrap().norm() < 1e-13);
        for a in [0.1, 0.2, -0.35] {
            let f = HolomorphicMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(a, 0.0)]).unwrap();
            let s = f.schwarzian(c(0.0, 0.0)).unwrap();
            assert!((s - c(-6.0 * a * a, 0.0)).norm() < 1e-15);
        }
        let sq = HolomorphicMap::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            sq.schwarzian(c(0.0, 0.0)),
            Err(EvalError::CriticalPoint { .. })
        ));
    }

    #[test]
    fn schwarzian_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let maps = samples();
        let f = &maps[2];
        let g = &maps[3];
        let gf = HolomorphicMap::compose(vec![f.clone(), g.clone()]).unwrap();
        for _ in 0..100 {
            let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let fj = f.jet(z).unwrap();
            let lhs = gf.schwarzian(z).unwrap();
            let rhs = g.schwarzian(fj.f).unwrap() * fj.d1 * fj.d1 + fj.schwarzian();
            assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
            // Möbius post-composition leaves S unchanged
            let mf = HolomorphicMap::compose(vec![f.clone(), maps[1].clone()]).unwrap();
            assert!((mf.schwarzian(z).unwrap() - fj.schwarzian()).norm() < 1e-9);
        }
    }

    #[test]
    fn inverses() {
        let cfg = InverseConfig::new(Point::new(-1.0, -1.0), Point::new(1.0, 1.0));
        for m in samples() {
            for z in [c(0.1, 0.2), c(-0.5, 0.4), c(0.7, -0.6)] {
                let w = m.eval(z).unwrap();
                let back = m.inverse(w, &cfg).unwrap();
                assert!((back - z).norm() < 1e-11, "{m:?}");
            }
        }
    }

    #[test]
    fn invalid_maps() {
        assert!(
            HolomorphicMap::mobius(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).is_err()
        );
        assert!(HolomorphicMap::polynomial(vec![c(1.0, 0.0)]).is_err());
        assert!(HolomorphicMap::affine(c(0.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(HolomorphicMap::compose(vec![]).is_err());
    }

    #[test]
    fn polynomial_image_of_unit_circle() {
        let f = HolomorphicMap::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.1)]).unwrap();
        let circle = BoundaryCurve::circle(Point::ORIGIN, 1.0).unwrap();
        let image = f.image_curve(&circle).unwrap();
        for k in 0..20 {
            let s = k as f64 * 0.31;
            let w = f.eval(Complex64::from_polar(1.0, s)).unwrap();
            assert!(image.position(s).distance(Point::from_complex(w)) < 1e-14);
        }
        // and of a shifted, reversed circle
        let hole = BoundaryCurve::circle(Point::new(0.1, -0.2), 0.3)
            .unwrap()
            .reversed();
        let image = f.image_curve(&hole).unwrap();
        for k in 0..20 {
            let s = k as f64 * 0.31;
            let w = f.eval(hole.position(s).to_complex()).unwrap();
            assert!(image.position(s).distance(Point::from_complex(w)) < 1e-14);
        }
    }

    #[test]
    fn polynomial_image_of_fourier_curve() {
        let e = BoundaryCurve::fourier(
            vec![0.1, 2.0],
            vec![0.0, 0.3],
            vec![0.0, 0.1],
            vec![-0.2, 1.0],
        )
        .unwrap();
        let f =
            HolomorphicMap::polynomial(vec![c(0.0, 1.0), c(1.0, 0.0), c(0.05, 0.02), c(0.01, 0.0)])
                .unwrap();
        let image = f.image_curve(&e).unwrap();
        for k in 0..20 {
            let s = k as f64 * 0.29;
            let w = f.eval(e.position(s).to_complex()).unwrap();
            assert!(image.position(s).distance(Point::from_complex(w)) < 1e-13);
        }
    }

    #[test]
    fn mobius_image_of_circle() {
        let m = samples().remove(1);
        let circle = BoundaryCurve::circle(Point::new(0.2, 0.1), 0.5).unwrap();
        let image = m.image_curve(&circle).unwrap();
        let (center, radius) = image.as_circle().unwrap();
        for k in 0..20 {
            let w = m
                .eval(circle.position(k as f64 * 0.3).to_complex())
                .unwrap();
            assert!((Point::from_complex(w).distance(center) - radius).abs() < 1e-13);
        }
    }

    #[test]
    fn spec_round_trip() {
        let text = r#"{"type": "compose", "maps": [
            {"type": "polynomial", "coeffs": [0, 1, [0.2, 0.1]]},
            {"type": "mobius", "a": 1, "b": [-0.1, 0], "c": [-0.1, 0], "d": 1}]}"#;
        let spec = MapSpec::from_json(text).unwrap();
        let map = spec.to_map().unwrap();
        let again = MapSpec::from_json(&MapSpec::from_map(&map).to_json()).unwrap();
        assert_eq!(again.to_map().unwrap(), map);
        assert!(matches!(
            MapSpec::from_json(r#"{"type": "mobius", "a": 1}"#),
            Err(ConformalError::Parse(_))
        ));
        assert!(matches!(
            MapSpec::from_json(r#"{"type": "mobius", "a": 1, "b": 2, "c": 1, "d": 2}"#)
                .unwrap()
                .to_map(),
            Err(ConformalError::InvalidMap(_))
        ));
    }
}
