use serde::Serialize;

use crate::geometry::PlanarDomain;
use crate::point::Point;

use super::SolverError;

/// Nodes closer than this fraction of `h` to the boundary are treated as
/// boundary points (value 0) rather than unknowns; a smaller cut would make
/// the Shortley–Weller coefficients arbitrarily large.
pub const MIN_CUT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Inside, with all four neighbours inside.
    Interior,
    /// Inside, with at least one arm cut by the boundary.
    BoundaryAdjacent,
    Exterior,
}

/// Arm order in [`Grid::arms`].
pub const EAST: usize = 0;
pub const WEST: usize = 1;
pub const NORTH: usize = 2;
pub const SOUTH: usize = 3;

/// A uniform lattice with embedded-boundary metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    kind: Vec<NodeKind>,
    /// Arm lengths as fractions of `h` in the order E, W, N, S; `1.0` for
    /// an uncut arm. Meaningful for inside nodes only.
    arms: Vec<[f64; 4]>,
    /// Unknown index of each inside node.
    unknown: Vec<Option<usize>>,
    /// Node index of each unknown, row-major.
    nodes: Vec<usize>,
}

impl Grid {
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node % self.nx, node / self.nx)
    }

    pub fn position(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.h,
            self.origin.y + j as f64 * self.h,
        )
    }

    pub fn node_position(&self, node: usize) -> Point {
        let (i, j) = self.coords(node);
        self.position(i, j)
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kind[node]
    }

    pub fn is_inside(&self, node: usize) -> bool {
        self.kind[node] != NodeKind::Exterior
    }

    pub fn arms(&self, node: usize) -> [f64; 4] {
        self.arms[node]
    }

    pub fn unknown(&self, node: usize) -> Option<usize> {
        self.unknown[node]
    }

    /// Node indices of the unknowns in solve order.
    pub fn unknown_nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn unknown_count(&self) -> usize {
        self.nodes.len()
    }

    /// Neighbour node in arm direction `dir`, if it lies on the lattice.
    pub fn neighbour(&self, node: usize, dir: usize) -> Option<usize> {
        let (i, j) = self.coords(node);
        match dir {
            EAST if i + 1 < self.nx => Some(node + 1),
            WEST if i > 0 => Some(node - 1),
            NORTH if j + 1 < self.ny => Some(node + self.nx),
            SOUTH if j > 0 => Some(node - self.nx),
            _ => None,
        }
    }

    /// Lattice cell `(i, j)` containing `p` (lower-left corner), if any.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        (i + 1 < self.nx && j + 1 < self.ny).then_some((i, j))
    }

    /// Counts of interior, boundary-adjacent and exterior nodes.
    pub fn census(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for k in &self.kind {
            match k {
                NodeKind::Interior => c.0 += 1,
                NodeKind::BoundaryAdjacent => c.1 += 1,
                NodeKind::Exterior => c.2 += 1,
            }
        }
        c
    }
}

/// Builds the lattice of spacing `h` aligned with integer multiples of `h`
/// and covering the domain's bounding box with one spare cell per side.
pub fn build_grid(domain: &PlanarDomain, h: f64) -> Result<Grid, SolverError> {
    check_spacing(h)?;
    let (lo, hi) = domain.bounding_box();
    let i0 = (lo.x / h).floor() as i64 - 1;
    let j0 = (lo.y / h).floor() as i64 - 1;
    let i1 = (hi.x / h).ceil() as i64 + 1;
    let j1 = (hi.y / h).ceil() as i64 + 1;
    build_grid_window(
        domain,
        h,
        Point::new(i0 as f64 * h, j0 as f64 * h),
        (i1 - i0 + 1) as usize,
        (j1 - j0 + 1) as usize,
    )
}

fn check_spacing(h: f64) -> Result<(), SolverError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(SolverError::InvalidConfig(format!(
            "grid spacing must be positive, got {h}"
        )))
    }
}

/// Sorted crossings of the whole boundary with a horizontal (`x` values)
/// or vertical (`y` values) lattice line.
fn crossings(domain: &PlanarDomain, horizontal: bool, level: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = domain
        .curves()
        .iter()
        .flat_map(|c| c.axis_crossings(horizontal, level))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Classification of the points `start + k h` along one lattice line:
/// inside flags by crossing parity, plus the fractional distance to the
/// first crossing in the forward and backward directions (capped at 1).
struct LineScan {
    inside: Vec<bool>,
    forward: Vec<f64>,
    backward: Vec<f64>,
}

fn scan_line(xs: &[f64], start: f64, h: f64, n: usize) -> LineScan {
    let mut inside = vec![false; n];
    let mut forward = vec![1.0; n];
    let mut backward = vec![1.0; n];
    let mut k = 0;
    for (i, flag) in inside.iter_mut().enumerate() {
        let x = start + i as f64 * h;
        while k < xs.len() && xs[k] < x - MIN_CUT * h {
            k += 1;
        }
        // crossings within MIN_CUT·h of the node put it on the boundary
        let on_boundary = k < xs.len() && xs[k] <= x + MIN_CUT * h;
        *flag = !on_boundary && k % 2 == 1;
        if k < xs.len() {
            forward[i] = ((xs[k] - x) / h).min(1.0);
        }
        if k > 0 {
            backward[i] = ((x - xs[k - 1]) / h).min(1.0);
        }
    }
    LineScan {
        inside,
        forward,
        backward,
    }
}

/// Builds a grid on an explicit `nx × ny` lattice with lower-left node
/// `origin`.
pub fn build_grid_window(
    domain: &PlanarDomain,
    h: f64,
    origin: Point,
    nx: usize,
    ny: usize,
) -> Result<Grid, SolverError> {
    check_spacing(h)?;
    let n = nx * ny;
    let mut inside = vec![false; n];
    let mut arms = vec![[1.0; 4]; n];
    for j in 0..ny {
        let y = origin.y + j as f64 * h;
        let row = scan_line(&crossings(domain, true, y), origin.x, h, nx);
        for i in 0..nx {
            let node = j * nx + i;
            inside[node] = row.inside[i];
            arms[node][EAST] = row.forward[i];
            arms[node][WEST] = row.backward[i];
        }
    }
    for i in 0..nx {
        let x = origin.x + i as f64 * h;
        let col = scan_line(&crossings(domain, false, x), origin.y, h, ny);
        for j in 0..ny {
            let node = j * nx + i;
            arms[node][NORTH] = col.forward[j];
            arms[node][SOUTH] = col.backward[j];
        }
    }

    // near a horizontal tangency the row scan can miss a boundary that is
    // vertically within MIN_CUT·h of the node
    for node in 0..n {
        if inside[node] && arms[node].iter().any(|&a| a < MIN_CUT) {
            inside[node] = false;
        }
    }

    let mut kind = vec![NodeKind::Exterior; n];
    let mut unknown = vec![None; n];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let node = j * nx + i;
            if !inside[node] {
                continue;
            }
            let nbrs = [
                (i + 1 < nx).then(|| node + 1),
                (i > 0).then(|| node - 1),
                (j + 1 < ny).then(|| node + nx),
                (j > 0).then(|| node - nx),
            ];
            let mut cut = 0;
            for (dir, nb) in nbrs.into_iter().enumerate() {
                let Some(m) = nb else {
                    return Err(SolverError::Resolution(
                        "domain reaches the edge of the lattice window".into(),
                    ));
                };
                // an outside neighbour with no crossing in between means
                // the boundary passes through the neighbour itself (arm 1)
                if arms[node][dir] < 1.0 || !inside[m] {
                    cut += 1;
                }
            }
            if cut >= 3 {
                let p = Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h);
                return Err(SolverError::Resolution(format!(
                    "node ({:.6}, {:.6}) has {cut} cut arms; refine h",
                    p.x, p.y
                )));
            }
            kind[node] = if cut > 0 {
                NodeKind::BoundaryAdjacent
            } else {
                NodeKind::Interior
            };
            unknown[node] = Some(nodes.len());
            nodes.push(node);
        }
    }
    if nodes.is_empty() {
        return Err(SolverError::Resolution(
            "no lattice node lies inside the domain".into(),
        ));
    }
    Ok(Grid {
        origin,
        h,
        nx,
        ny,
        kind,
        arms,
        unknown,
        nodes,
    })
}
