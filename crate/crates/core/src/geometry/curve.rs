use std::f64::consts::TAU;

use crate::point::Point;

use super::GeometryError;

/// Number of samples used to seed projections.
const PROJECTION_SEEDS: usize = 256;
/// Number of samples used for regularity checks.
const REGULARITY_SAMPLES: usize = 1024;
/// Minimum number of samples for arclength quadrature.
const PERIMETER_SAMPLES: usize = 4096;
/// Samples used to bracket axis-line crossings of Fourier curves.
const CROSSING_SAMPLES: usize = 2048;

/// Position and first three derivatives of a curve at a parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
    pub d3: Point,
}

/// Truncated Fourier series `x(s) = Σ ax[k] cos ks + bx[k] sin ks`, same for `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    pub ax: Vec<f64>,
    pub bx: Vec<f64>,
    pub ay: Vec<f64>,
    pub by: Vec<f64>,
}

impl FourierCurve {
    fn modes(&self) -> usize {
        self.ax
            .len()
            .max(self.bx.len())
            .max(self.ay.len())
            .max(self.by.len())
    }

    fn frame(&self, s: f64) -> CurveFrame {
        let coef = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let mut f = CurveFrame {
            pos: Point::ORIGIN,
            d1: Point::ORIGIN,
            d2: Point::ORIGIN,
            d3: Point::ORIGIN,
        };
        for k in 0..self.modes() {
            let kf = k as f64;
            let (sn, cs) = (kf * s).sin_cos();
            let (ax, bx, ay, by) = (
                coef(&self.ax, k),
                coef(&self.bx, k),
                coef(&self.ay, k),
                coef(&self.by, k),
            );
            // c(s) = a cos ks + b sin ks and its derivatives
            let d = |a: f64, b: f64| {
                [
                    a * cs + b * sn,
                    kf * (-a * sn + b * cs),
                    -kf * kf * (a * cs + b * sn),
                    kf * kf * kf * (a * sn - b * cs),
                ]
            };
            let dx = d(ax, bx);
            let dy = d(ay, by);
            f.pos += Point::new(dx[0], dy[0]);
            f.d1 += Point::new(dx[1], dy[1]);
            f.d2 += Point::new(dx[2], dy[2]);
            f.d3 += Point::new(dx[3], dy[3]);
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    /// `center + radius (cos(σs), sin(σs))` with `σ = orientation = ±1`.
    Circle {
        center: Point,
        radius: f64,
        orientation: f64,
    },
    Fourier(FourierCurve),
}

/// A smooth simple closed curve parametrized over `[0, 2π)`.
///
/// Inside a [`super::PlanarDomain`] curves are oriented so that the domain
/// lies to the left of the direction of traversal; curvature is signed
/// accordingly (positive on the outer boundary of a convex domain, negative
/// on circular holes).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    shape: CurveShape,
}

impl BoundaryCurve {
    /// Counter-clockwise circle.
    pub fn circle(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            shape: CurveShape::Circle {
                center,
                radius,
                orientation: 1.0,
            },
        })
    }

    pub fn fourier(
        ax: Vec<f64>,
        bx: Vec<f64>,
        ay: Vec<f64>,
        by: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        if ax
            .iter()
            .chain(&bx)
            .chain(&ay)
            .chain(&by)
            .any(|c| !c.is_finite())
        {
            return Err(GeometryError::InvalidParameter(
                "fourier coefficients must be finite".into(),
            ));
        }
        let curve = Self {
            shape: CurveShape::Fourier(FourierCurve { ax, bx, ay, by }),
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    /// `Some((center, radius))` if the curve is a circle.
    pub fn as_circle(&self) -> Option<(Point, f64)> {
        match self.shape {
            CurveShape::Circle { center, radius, .. } => Some((center, radius)),
            CurveShape::Fourier(_) => None,
        }
    }

    /// Same point set traversed in the opposite direction (`s → -s`).
    pub fn reversed(&self) -> Self {
        let shape = match &self.shape {
            CurveShape::Circle {
                center,
                radius,
                orientation,
            } => CurveShape::Circle {
                center: *center,
                radius: *radius,
                orientation: -orientation,
            },
            CurveShape::Fourier(f) => CurveShape::Fourier(FourierCurve {
                ax: f.ax.clone(),
                bx: f.bx.iter().map(|b| -b).collect(),
                ay: f.ay.clone(),
                by: f.by.iter().map(|b| -b).collect(),
            }),
        };
        Self { shape }
    }

    /// Image under `p ↦ k p`.
    pub fn scaled(&self, k: f64) -> Self {
        let shape = match &self.shape {
            CurveShape::Circle {
                center,
                radius,
                orientation,
            } => CurveShape::Circle {
                center: *center * k,
                radius: radius * k,
                orientation: *orientation,
            },
            CurveShape::Fourier(f) => {
                let sc = |v: &[f64]| v.iter().map(|c| c * k).collect();
                CurveShape::Fourier(FourierCurve {
                    ax: sc(&f.ax),
                    bx: sc(&f.bx),
                    ay: sc(&f.ay),
                    by: sc(&f.by),
                })
            }
        };
        Self { shape }
    }

    pub fn frame(&self, s: f64) -> CurveFrame {
        match &self.shape {
            CurveShape::Circle {
                center,
                radius,
                orientation,
            } => {
                let o = *orientation;
                let (sn, cs) = (o * s).sin_cos();
                let r = *radius;
                CurveFrame {
                    pos: *center + Point::new(r * cs, r * sn),
                    d1: Point::new(-r * o * sn, r * o * cs),
                    d2: Point::new(-r * cs, -r * sn),
                    d3: Point::new(r * o * sn, -r * o * cs),
                }
            }
            CurveShape::Fourier(f) => f.frame(s),
        }
    }

    pub fn position(&self, s: f64) -> Point {
        self.frame(s).pos
    }

    /// Signed curvature `(x'y'' - y'x'') / |γ'|³`.
    pub fn curvature(&self, s: f64) -> Result<f64, GeometryError> {
        let f = self.frame(s);
        let speed = f.d1.norm();
        if speed < 1e-12 {
            return Err(GeometryError::Irregular { s });
        }
        Ok(f.d1.cross(f.d2) / speed.powi(3))
    }

    /// Unit normal pointing to the left of the direction of traversal.
    pub fn left_normal(&self, s: f64) -> Point {
        let t = self.frame(s).d1;
        t.perp() * t.norm().recip()
    }

    /// Arclength by the periodic trapezoid rule.
    pub fn perimeter(&self) -> f64 {
        if let CurveShape::Circle { radius, .. } = self.shape {
            return TAU * radius;
        }
        let n = PERIMETER_SAMPLES;
        let ds = TAU / n as f64;
        (0..n)
            .map(|i| self.frame(i as f64 * ds).d1.norm())
            .sum::<f64>()
            * ds
    }

    /// `½ ∮ (x y' - y x') ds`; positive for counter-clockwise traversal.
    pub fn signed_area(&self) -> f64 {
        let n = PERIMETER_SAMPLES;
        let ds = TAU / n as f64;
        0.5 * ds
            * (0..n)
                .map(|i| {
                    let f = self.frame(i as f64 * ds);
                    f.pos.cross(f.d1)
                })
                .sum::<f64>()
    }

    /// `n` equally spaced samples over one period.
    pub fn polyline(&self, n: usize) -> Vec<Point> {
        let ds = TAU / n as f64;
        (0..n).map(|i| self.position(i as f64 * ds)).collect()
    }

    /// Axis-aligned bounding box `(min, max)` of the curve.
    pub fn bounding_box(&self) -> (Point, Point) {
        if let CurveShape::Circle { center, radius, .. } = self.shape {
            let r = Point::new(radius, radius);
            return (center - r, center + r);
        }
        let pts = self.polyline(PERIMETER_SAMPLES);
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        // polyline sag bound
        let pad = 1e-6 * (hi - lo).norm();
        (lo - Point::new(pad, pad), hi + Point::new(pad, pad))
    }

    /// Nearest point on the curve: `(s, foot, distance)`, ties resolved
    /// towards the lowest `s`.
    pub fn project(&self, p: Point) -> (f64, Point, f64) {
        match self.shape {
            CurveShape::Circle {
                center,
                radius,
                orientation,
            } => {
                let d = p - center;
                let r = d.norm();
                if r == 0.0 {
                    let foot = self.position(0.0);
                    return (0.0, foot, radius);
                }
                let theta = d.y.atan2(d.x);
                let s = (orientation * theta).rem_euclid(TAU);
                let foot = center + d * (radius / r);
                (s, foot, p.distance(foot))
            }
            CurveShape::Fourier(_) => self.project_numeric(p),
        }
    }

    fn project_numeric(&self, p: Point) -> (f64, Point, f64) {
        let n = PROJECTION_SEEDS;
        let ds = TAU / n as f64;
        let mut best = (0usize, f64::INFINITY);
        for i in 0..n {
            let d2 = (self.position(i as f64 * ds) - p).norm_sqr();
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        let s0 = best.0 as f64 * ds;
        // g(s) = (γ - p)·γ', zero at a critical point of the distance.
        let g = |s: f64| {
            let f = self.frame(s);
            let r = f.pos - p;
            (r.dot(f.d1), f.d1.norm_sqr() + r.dot(f.d2))
        };
        let s = minimize_bracketed(g, s0 - ds, s0 + ds, s0);
        let s = s.rem_euclid(TAU);
        let foot = self.position(s);
        let (s, foot) = if p.distance(foot) <= best.1.sqrt() {
            (s, foot)
        } else {
            (s0, self.position(s0))
        };
        (s, foot, p.distance(foot))
    }

    /// Coordinates where the curve crosses an axis-parallel line.
    ///
    /// For `horizontal = true` the line is `y = level` and the returned
    /// values are `x` coordinates; otherwise the line is `x = level` and the
    /// values are `y` coordinates. Tangential contacts are not reported.
    pub fn axis_crossings(&self, horizontal: bool, level: f64) -> Vec<f64> {
        if let CurveShape::Circle { center, radius, .. } = self.shape {
            let (c_along, c_across) = along_across(center, horizontal);
            let off = level - c_across;
            let disc = radius * radius - off * off;
            if disc <= 0.0 {
                return Vec::new();
            }
            let w = disc.sqrt();
            return vec![c_along - w, c_along + w];
        }
        let n = CROSSING_SAMPLES;
        let ds = TAU / n as f64;
        let h = |s: f64| along_across(self.position(s), horizontal).1 - level;
        let mut out = Vec::new();
        let mut s_prev = 0.0;
        let mut h_prev = h(0.0);
        for i in 1..=n {
            let s = i as f64 * ds;
            let hs = h(s);
            if (h_prev > 0.0) != (hs > 0.0) {
                let f = |t: f64| {
                    let fr = self.frame(t);
                    let (_, v) = along_across(fr.pos, horizontal);
                    let (_, dv) = along_across(fr.d1, horizontal);
                    (v - level, dv)
                };
                let root = root_bracketed(f, s_prev, s, h_prev, hs);
                out.push(along_across(self.position(root), horizontal).0);
            }
            s_prev = s;
            h_prev = hs;
        }
        out
    }

    /// Winding number of the sampled polyline around `p`.
    pub fn winding_number(&self, p: Point, samples: usize) -> i32 {
        if let CurveShape::Circle {
            center,
            radius,
            orientation,
        } = self.shape
        {
            return if p.distance(center) < radius {
                orientation as i32
            } else {
                0
            };
        }
        winding_number(&self.polyline(samples), p)
    }

    /// Upper bound on the gap between the curve and its `samples`-polyline.
    pub fn sag_bound(&self, samples: usize) -> f64 {
        if matches!(self.shape, CurveShape::Circle { .. }) {
            return 0.0;
        }
        let ds = TAU / samples as f64;
        let max_d2 = (0..samples)
            .map(|i| self.frame(i as f64 * ds).d2.norm())
            .fold(0.0, f64::max);
        // chord sag ≤ max|γ''| Δs² / 8, with slack for the sampled max
        max_d2 * ds * ds / 8.0 * 4.0
    }

    /// Regularity, closure and simplicity checks on sampled points.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = REGULARITY_SAMPLES;
        let ds = TAU / n as f64;
        for i in 0..n {
            let s = i as f64 * ds;
            if self.frame(s).d1.norm() < 1e-12 {
                return Err(GeometryError::Irregular { s });
            }
        }
        if self.position(0.0).distance(self.position(TAU)) > 1e-12 {
            return Err(GeometryError::NotClosed);
        }
        if matches!(self.shape, CurveShape::Circle { .. }) {
            return Ok(());
        }
        let poly = self.polyline(n);
        if polyline_self_intersects(&poly, 1e-9) {
            return Err(GeometryError::SelfIntersecting);
        }
        Ok(())
    }
}

fn along_across(q: Point, horizontal: bool) -> (f64, f64) {
    if horizontal {
        (q.x, q.y)
    } else {
        (q.y, q.x)
    }
}

/// Safeguarded Newton for a minimum of a function whose derivative and
/// second derivative are given by `g`; falls back to golden section when
/// the bracket holds no sign change of the derivative.
fn minimize_bracketed<G>(g: G, lo: f64, hi: f64, start: f64) -> f64
where
    G: Fn(f64) -> (f64, f64),
{
    let (ga, _) = g(lo);
    let (gb, _) = g(hi);
    if ga < 0.0 && gb > 0.0 {
        let (mut a, mut b) = (lo, hi);
        let mut s = start;
        for _ in 0..100 {
            let (gs, dgs) = g(s);
            if gs == 0.0 {
                return s;
            }
            if gs < 0.0 {
                a = s;
            } else {
                b = s;
            }
            let newton = s - gs / dgs;
            let next = if dgs > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - s).abs() < 1e-15 * (1.0 + s.abs()) || (b - a) < 1e-15 {
                return next;
            }
            s = next;
        }
        return s;
    }
    // golden section on |γ - p|², through the derivative sign
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let (gm, _) = g(m);
        if gm > 0.0 {
            b = m;
        } else {
            a = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Root of `f` in `[a, b]` given `f(a)`, `f(b)` of opposite sign; `f`
/// returns the value and derivative.
pub(crate) fn root_bracketed<F>(f: F, a: f64, b: f64, fa: f64, fb: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    debug_assert!((fa > 0.0) != (fb > 0.0));
    let (mut lo, mut hi) = if fa <= 0.0 { (a, b) } else { (b, a) };
    let mut s = 0.5 * (a + b);
    for _ in 0..200 {
        let (fs, dfs) = f(s);
        if fs == 0.0 {
            return s;
        }
        if fs < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let (l, h) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let newton = s - fs / dfs;
        let next = if dfs != 0.0 && newton > l && newton < h {
            newton
        } else {
            0.5 * (l + h)
        };
        if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) || (h - l) <= 1e-15 {
            return next;
        }
        s = next;
    }
    s
}

/// Winding number of a closed polyline around `p` (crossing rule).
pub fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let side = (b - a).cross(p - a);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    (o1 > 0.0) != (o2 > 0.0) && (o3 > 0.0) != (o4 > 0.0) && o1 != 0.0 && o3 != 0.0
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sqr()).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn bbox(a: Point, b: Point) -> (Point, Point) {
    (
        Point::new(a.x.min(b.x), a.y.min(b.y)),
        Point::new(a.x.max(b.x), a.y.max(b.y)),
    )
}

fn boxes_near(p: (Point, Point), q: (Point, Point), tol: f64) -> bool {
    p.0.x - tol <= q.1.x && q.0.x - tol <= p.1.x && p.0.y - tol <= q.1.y && q.0.y - tol <= p.1.y
}

pub(crate) fn polyline_self_intersects(poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
    let boxes: Vec<_> = (0..n).map(|i| bbox(seg(i).0, seg(i).1)).collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if !boxes_near(boxes[i], boxes[j], tol) {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segment_distance(a, b, c, d) <= tol {
                return true;
            }
        }
    }
    false
}

/// Minimum distance between two closed polylines.
pub(crate) fn polyline_separation(p: &[Point], q: &[Point]) -> f64 {
    let (n, m) = (p.len(), q.len());
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (p[i], p[(i + 1) % n]);
        let bi = bbox(a, b);
        for j in 0..m {
            let (c, d) = (q[j], q[(j + 1) % m]);
            if best.is_finite() && !boxes_near(bi, bbox(c, d), best) {
                continue;
            }
            best = best.min(segment_distance(a, b, c, d));
        }
    }
    best
}
