use std::io::{Read, Write};

use crate::point::Point;

use super::discrete::DiscreteSolution;
use super::SolverError;

/// Leading bytes of a binary field dump.
pub const FIELD_MAGIC: &[u8; 4] = b"LVF1";

/// Contents of a binary field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub origin: Point,
    pub h: f64,
    /// Row-major nodal values, `NaN` at exterior nodes.
    pub values: Vec<f64>,
}

/// Writes `"LVF1"`, `nx`, `ny` (u64), origin and `h` (f64), then the
/// row-major nodal values (f64), all little-endian.
pub fn write_field<W: Write>(mut w: W, sol: &DiscreteSolution) -> std::io::Result<()> {
    let g = sol.grid();
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(g.nx() as u64).to_le_bytes())?;
    w.write_all(&(g.ny() as u64).to_le_bytes())?;
    for x in [g.origin().x, g.origin().y, g.h()] {
        w.write_all(&x.to_le_bytes())?;
    }
    for v in sol.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<FieldDump, SolverError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| SolverError::Format(e.to_string()))?;
    if bytes.len() < 44 || &bytes[..4] != FIELD_MAGIC {
        return Err(SolverError::Format("missing LVF1 header".into()));
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("8-byte slice") };
    let nx = u64::from_le_bytes(word(4)) as usize;
    let ny = u64::from_le_bytes(word(12)) as usize;
    let origin = Point::new(f64::from_le_bytes(word(20)), f64::from_le_bytes(word(28)));
    let h = f64::from_le_bytes(word(36));
    let count = nx
        .checked_mul(ny)
        .filter(|&c| c.checked_mul(8).map(|b| b + 44) == Some(bytes.len()))
        .ok_or_else(|| SolverError::Format("payload length does not match nx × ny".into()))?;
    let values = (0..count)
        .map(|k| f64::from_le_bytes(word(44 + 8 * k)))
        .collect();
    Ok(FieldDump {
        nx,
        ny,
        origin,
        h,
        values,
    })
}

/// CSV with header `x,y,v`, one row per interior node.
pub fn write_field_csv<W: Write>(mut w: W, sol: &DiscreteSolution) -> std::io::Result<()> {
    writeln!(w, "x,y,v")?;
    let g = sol.grid();
    for &node in g.unknown_nodes() {
        let p = g.node_position(node);
        writeln!(w, "{:.16e},{:.16e},{:.16e}", p.x, p.y, sol.values()[node])?;
    }
    Ok(())
}
