use crate::point::Point;

use super::curve::{polyline_separation, winding_number};
use super::{BoundaryCurve, CurveSpec, DomainSpec, GeometryError};

/// Samples used for containment and separation checks.
const POLY_SAMPLES: usize = 1024;
/// Points closer than this to a curve are classified as boundary points.
const BOUNDARY_TOL: f64 = 1e-10;

/// Nearest boundary point of a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFoot {
    /// Index into [`PlanarDomain::curves`]: 0 is the outer curve.
    pub curve: usize,
    pub s: f64,
    pub point: Point,
    pub distance: f64,
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// A bounded domain: the region inside `outer` and outside every hole.
///
/// Curves are stored oriented with the domain on their left, so the outer
/// curve runs counter-clockwise and holes run clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDomain {
    curves: Vec<BoundaryCurve>,
    polylines: Vec<Vec<Point>>,
    sags: Vec<f64>,
}

impl PlanarDomain {
    pub fn new(outer: BoundaryCurve, holes: Vec<BoundaryCurve>) -> Result<Self, GeometryError> {
        let outer = if outer.signed_area() < 0.0 {
            outer.reversed()
        } else {
            outer
        };
        let mut curves = vec![outer];
        for h in holes {
            curves.push(if h.signed_area() > 0.0 {
                h.reversed()
            } else {
                h
            });
        }
        for c in &curves {
            c.validate()?;
        }
        let polylines: Vec<Vec<Point>> = curves.iter().map(|c| c.polyline(POLY_SAMPLES)).collect();
        let sags = curves.iter().map(|c| c.sag_bound(POLY_SAMPLES)).collect();
        let domain = Self {
            curves,
            polylines,
            sags,
        };
        domain.validate_holes()?;
        Ok(domain)
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self, GeometryError> {
        let outer = spec.outer.to_curve()?;
        let holes = spec
            .holes
            .iter()
            .map(CurveSpec::to_curve)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(outer, holes)
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        Self::from_spec(&DomainSpec::from_json(text)?)
    }

    /// The disc `|p - center| < radius`.
    pub fn disc(center: Point, radius: f64) -> Result<Self, GeometryError> {
        Self::new(BoundaryCurve::circle(center, radius)?, Vec::new())
    }

    /// The annulus `r_inner < |p - center| < r_outer`.
    pub fn annulus(center: Point, r_inner: f64, r_outer: f64) -> Result<Self, GeometryError> {
        Self::new(
            BoundaryCurve::circle(center, r_outer)?,
            vec![BoundaryCurve::circle(center, r_inner)?],
        )
    }

    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            outer: CurveSpec::from_curve(&self.curves[0]),
            holes: self.curves[1..].iter().map(CurveSpec::from_curve).collect(),
        }
    }

    fn validate_holes(&self) -> Result<(), GeometryError> {
        let outer = &self.polylines[0];
        for i in 1..self.curves.len() {
            let p = self.polylines[i][0];
            if winding_number(outer, p) == 0
                || polyline_separation(outer, &self.polylines[i]) <= 1e-9
            {
                return Err(GeometryError::HoleOutside(i - 1));
            }
            for j in 1..i {
                let nested = winding_number(&self.polylines[j], p) != 0
                    || winding_number(&self.polylines[i], self.polylines[j][0]) != 0;
                if nested || polyline_separation(&self.polylines[i], &self.polylines[j]) <= 1e-9 {
                    return Err(GeometryError::HolesOverlap(j - 1, i - 1));
                }
            }
        }
        Ok(())
    }

    /// All boundary curves, outer first.
    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn outer(&self) -> &BoundaryCurve {
        &self.curves[0]
    }

    pub fn holes(&self) -> &[BoundaryCurve] {
        &self.curves[1..]
    }

    /// Number of boundary components.
    pub fn connectivity(&self) -> usize {
        self.curves.len()
    }

    /// True when the domain is a single round disc.
    pub fn is_disc(&self) -> bool {
        self.curves.len() == 1 && self.curves[0].as_circle().is_some()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        self.curves[0].bounding_box()
    }

    /// Image under `p ↦ k p`.
    pub fn scaled(&self, k: f64) -> Result<Self, GeometryError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "scale factor must be positive, got {k}"
            )));
        }
        Self::new(
            self.curves[0].scaled(k),
            self.curves[1..].iter().map(|c| c.scaled(k)).collect(),
        )
    }

    /// Inward unit normal (into the domain) on curve `i` at `s`.
    pub fn inward_normal(&self, curve: usize, s: f64) -> Point {
        self.curves[curve].left_normal(s)
    }

    /// Nearest boundary point over all curves. Ties go to the lowest curve
    /// index, then the lowest parameter.
    pub fn project(&self, p: Point) -> BoundaryFoot {
        let mut best: Option<BoundaryFoot> = None;
        for (i, c) in self.curves.iter().enumerate() {
            let (s, point, distance) = c.project(p);
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(BoundaryFoot {
                    curve: i,
                    s,
                    point,
                    distance,
                    curvature: 0.0,
                });
            }
        }
        let mut foot = best.expect("domain has at least one curve");
        foot.curvature = self.curves[foot.curve]
            .curvature(foot.s)
            .expect("validated curves are regular");
        foot
    }

    /// Classifies `p` by winding numbers, deciding near-boundary points by
    /// the side of the nearest boundary point.
    pub fn locate(&self, p: Point) -> Location {
        let foot = self.project(p);
        if foot.distance < BOUNDARY_TOL {
            return Location::Boundary;
        }
        if foot.distance <= self.sags[foot.curve] {
            let n = self.inward_normal(foot.curve, foot.s);
            return if (p - foot.point).dot(n) > 0.0 {
                Location::Inside
            } else {
                Location::Outside
            };
        }
        let inside_outer = self.curves[0].winding_number(p, POLY_SAMPLES) != 0;
        let in_hole = self.curves[1..]
            .iter()
            .any(|h| h.winding_number(p, POLY_SAMPLES) != 0);
        if inside_outer && !in_hole {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.locate(p) == Location::Inside
    }

    /// Sampled check that every sampled point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &PlanarDomain, n: usize) -> bool {
        let (lo, hi) = self.bounding_box();
        for j in 0..n {
            for i in 0..n {
                let p = Point::new(
                    lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64,
                    lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64,
                );
                if self.contains(p) && other.locate(p) == Location::Outside {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus() -> PlanarDomain {
        PlanarDomain::annulus(Point::ORIGIN, 1.0, 2.0).unwrap()
    }

    #[test]
    fn center_of_unit_disc() {
        let d = PlanarDomain::disc(Point::ORIGIN, 1.0).unwrap();
        let f = d.project(Point::ORIGIN);
        assert_eq!(f.curve, 0);
        assert_eq!(f.s, 0.0);
        assert!((f.distance - 1.0).abs() < 1e-15);
        assert!((f.curvature - 1.0).abs() < 1e-15);
        assert!(d.contains(Point::ORIGIN));
    }

    #[test]
    fn annulus_projection_to_hole() {
        let d = annulus();
        let f = d.project(Point::new(1.25, 0.0));
        assert_eq!(f.curve, 1);
        assert!((f.distance - 0.25).abs() < 1e-15);
        assert!((f.curvature + 1.0).abs() < 1e-15);
        assert!(!d.contains(Point::ORIGIN));
        assert!(d.contains(Point::new(1.5, 0.0)));
    }

    #[test]
    fn exterior_point_projects_to_outer() {
        let d = annulus();
        let p = Point::new(0.0, 3.0);
        let f = d.project(p);
        assert_eq!(f.curve, 0);
        assert!((f.distance - p.distance(f.point)).abs() < 1e-15);
        assert!((f.distance - 1.0).abs() < 1e-15);
        assert_eq!(d.locate(p), Location::Outside);
    }

    #[test]
    fn tie_goes_to_lowest_curve() {
        // midway between outer r=3 and hole r=1: distance 1 to both
        let d = PlanarDomain::annulus(Point::ORIGIN, 1.0, 3.0).unwrap();
        let f = d.project(Point::new(2.0, 0.0));
        assert_eq!(f.curve, 0);
    }

    #[test]
    fn boundary_points_are_flagged() {
        let d = annulus();
        assert_eq!(d.locate(Point::new(2.0, 0.0)), Location::Boundary);
        assert_eq!(d.locate(Point::new(0.0, -1.0)), Location::Boundary);
    }

    #[test]
    fn orientation_is_normalized() {
        let d = annulus();
        assert!(d.outer().signed_area() > 0.0);
        assert!(d.holes()[0].signed_area() < 0.0);
        // inward normal on the hole points away from the center
        let n = d.inward_normal(1, 0.0);
        let p = d.curves()[1].position(0.0);
        assert!(n.dot(p) > 0.0);
    }

    #[test]
    fn clockwise_fourier_outer_is_reversed() {
        // clockwise unit circle
        let c =
            BoundaryCurve::fourier(vec![0.0, 1.0], vec![0.0], vec![0.0], vec![0.0, -1.0]).unwrap();
        let d = PlanarDomain::new(c, vec![]).unwrap();
        assert!((d.outer().curvature(0.4).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_holes() {
        let outer = BoundaryCurve::circle(Point::ORIGIN, 1.0).unwrap();
        let far = BoundaryCurve::circle(Point::new(3.0, 0.0), 0.1).unwrap();
        assert_eq!(
            PlanarDomain::new(outer.clone(), vec![far]).unwrap_err(),
            GeometryError::HoleOutside(0)
        );
        let a = BoundaryCurve::circle(Point::new(0.1, 0.0), 0.3).unwrap();
        let b = BoundaryCurve::circle(Point::new(-0.1, 0.0), 0.3).unwrap();
        assert_eq!(
            PlanarDomain::new(outer, vec![a, b]).unwrap_err(),
            GeometryError::HolesOverlap(0, 1)
        );
    }

    #[test]
    fn fourier_domain_contains_matches_radius() {
        // r(θ) = 1 + 0.1 cos 3θ
        let c = BoundaryCurve::fourier(
            vec![0.0, 1.0, 0.05, 0.0, 0.05],
            vec![0.0],
            vec![0.0],
            vec![0.0, 1.0, -0.05, 0.0, 0.05],
        )
        .unwrap();
        let d = PlanarDomain::new(c, vec![]).unwrap();
        for k in 0..50 {
            let th = k as f64 * 0.37;
            let r = 1.0 + 0.1 * (3.0 * th).cos();
            let dir = Point::new(th.cos(), th.sin());
            assert!(d.contains(dir * (r - 1e-6)));
            assert!(!d.contains(dir * (r + 1e-6)));
            assert_eq!(d.locate(dir * r), Location::Boundary);
        }
    }
}
