use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::point::Point;

use super::{BoundaryCurve, CurveShape, GeometryError};

/// JSON description of a boundary curve.
///
/// Fourier coefficient lists are indexed by mode, starting at `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Fourier {
        ax: Vec<f64>,
        #[serde(default)]
        bx: Vec<f64>,
        #[serde(default)]
        ay: Vec<f64>,
        by: Vec<f64>,
    },
}

impl CurveSpec {
    pub fn to_curve(&self) -> Result<BoundaryCurve, GeometryError> {
        match self {
            CurveSpec::Circle { center, radius } => {
                BoundaryCurve::circle(Point::from(*center), *radius)
            }
            CurveSpec::Fourier { ax, bx, ay, by } => {
                BoundaryCurve::fourier(ax.clone(), bx.clone(), ay.clone(), by.clone())
            }
        }
    }

    pub fn from_curve(curve: &BoundaryCurve) -> Self {
        match curve.shape() {
            CurveShape::Circle { center, radius, .. } => CurveSpec::Circle {
                center: [center.x, center.y],
                radius: *radius,
            },
            CurveShape::Fourier(f) => CurveSpec::Fourier {
                ax: f.ax.clone(),
                bx: f.bx.clone(),
                ay: f.ay.clone(),
                by: f.by.clone(),
            },
        }
    }
}

/// `{"outer": CURVE, "holes": [CURVE, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub outer: CurveSpec,
    #[serde(default)]
    pub holes: Vec<CurveSpec>,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain spec serializes")
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        hex_digest(self.to_json().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
