use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inner::InnerFunction;

/// Radius of the central disc left over by the depth-2 boxes.
pub const CENTRAL_RADIUS: f64 = 1.0 - PI / 4.0;

/// One cell of the level-set grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelCell {
    /// Ring `ring` of the central disc; ring 0 is a single cell, the others have `4s` sectors.
    Central { ring: u32, sector: u32 },
    /// Sub-cell `(row, col)` of the top half of the dyadic box `(depth, index)`; row 0 is innermost.
    Whitney { depth: u32, index: u64, row: u32, col: u32 },
}

/// Connected components of `{|Θ| < ε}` on a Whitney grid.
#[derive(Debug, Clone)]
pub struct LevelSetAnalysis {
    pub epsilon: f64,
    pub depth: u32,
    pub subdivisions: u32,
    pub central_rings: u32,
    pub component_count: usize,
    /// Count on the same grid truncated one depth earlier.
    pub previous_count: usize,
    pub stabilized: bool,
    /// Marked cells with 1-based component labels, in grid order.
    pub labels: Vec<(LevelCell, u32)>,
}

impl LevelSetAnalysis {
    pub fn label_of(&self, cell: &LevelCell) -> Option<u32> {
        self.labels
            .binary_search_by(|(c, _)| c.cmp(cell))
            .ok()
            .map(|i| self.labels[i].1)
    }
}

/// Grid geometry and flattened cell numbering.
struct Grid {
    depth: u32,
    s: u32,
    rings: u32,
    /// Offset of the first cell of each depth, indexed by depth.
    offsets: Vec<usize>,
    total: usize,
}

impl Grid {
    fn new(depth: u32, s: u32) -> Self {
        let rings = (s / 2).max(2);
        let central = 1 + (rings as usize - 1) * 4 * s as usize;
        let mut offsets = vec![0; depth as usize + 1];
        let mut at = central;
        for n in 2..=depth {
            offsets[n as usize] = at;
            at += (1usize << n) * (s * s) as usize;
        }
        Grid {
            depth,
            s,
            rings,
            offsets,
            total: at,
        }
    }

    fn central_id(&self, ring: u32, sector: u32) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring as usize - 1) * 4 * self.s as usize + sector as usize
        }
    }

    fn whitney_id(&self, depth: u32, index: u64, row: u32, col: u32) -> usize {
        let s = self.s as usize;
        self.offsets[depth as usize] + index as usize * s * s + row as usize * s + col as usize
    }

    fn cell(&self, id: usize) -> LevelCell {
        let s = self.s as usize;
        if id < self.offsets.get(2).copied().unwrap_or(self.total) {
            if id == 0 {
                return LevelCell::Central { ring: 0, sector: 0 };
            }
            let j = id - 1;
            return LevelCell::Central {
                ring: (j / (4 * s)) as u32 + 1,
                sector: (j % (4 * s)) as u32,
            };
        }
        let n = (2..=self.depth)
            .rev()
            .find(|&n| self.offsets[n as usize] <= id)
            .expect("id inside grid");
        let j = id - self.offsets[n as usize];
        LevelCell::Whitney {
            depth: n,
            index: (j / (s * s)) as u64,
            row: ((j % (s * s)) / s) as u32,
            col: (j % s) as u32,
        }
    }

    fn center(&self, cell: LevelCell) -> Complex64 {
        match cell {
            LevelCell::Central { ring: 0, .. } => Complex64::new(0.0, 0.0),
            LevelCell::Central { ring, sector } => {
                let dr = CENTRAL_RADIUS / self.rings as f64;
                let r = (ring as f64 + 0.5) * dr;
                let t = (sector as f64 + 0.5) * TAU / (4 * self.s) as f64;
                Complex64::from_polar(r, t)
            }
            LevelCell::Whitney { depth, index, row, col } => {
                let scale = (-(depth as f64)).exp2();
                let inner = 1.0 - PI * scale;
                let dr = 0.5 * PI * scale / self.s as f64;
                let width = TAU * scale;
                let r = inner + (row as f64 + 0.5) * dr;
                let t = width * (index as f64 + (col as f64 + 0.5) / self.s as f64);
                Complex64::from_polar(r, t)
            }
        }
    }

    /// Edge-adjacent pairs, each listed once.
    fn edges(&self, mut f: impl FnMut(usize, usize)) {
        let s = self.s;
        let sectors = 4 * s;
        for ring in 1..self.rings {
            for sector in 0..sectors {
                let id = self.central_id(ring, sector);
                f(id, self.central_id(ring, (sector + 1) % sectors));
                let below = if ring == 1 { 0 } else { self.central_id(ring - 1, sector) };
                f(id, below);
            }
        }
        for n in 2..=self.depth {
            let boxes = 1u64 << n;
            for k in 0..boxes {
                for row in 0..s {
                    for col in 0..s {
                        let id = self.whitney_id(n, k, row, col);
                        let right = if col + 1 < s {
                            self.whitney_id(n, k, row, col + 1)
                        } else {
                            self.whitney_id(n, (k + 1) % boxes, row, 0)
                        };
                        f(id, right);
                        if row + 1 < s {
                            f(id, self.whitney_id(n, k, row + 1, col));
                        }
                    }
                }
                if n == 2 {
                    // inner row of the depth-2 boxes meets the outer central ring sector by sector
                    for col in 0..s {
                        let sector = k as u32 * s + col;
                        f(self.whitney_id(2, k, 0, col), self.central_id(self.rings - 1, sector));
                    }
                }
                if n < self.depth {
                    // outer row column j meets combined child inner-row columns 2j, 2j+1
                    for col in 0..s {
                        let parent = self.whitney_id(n, k, s - 1, col);
                        for c in [2 * col, 2 * col + 1] {
                            let child = 2 * k + (c / s) as u64;
                            f(parent, self.whitney_id(n + 1, child, 0, c % s));
                        }
                    }
                }
            }
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components among marked cells whose id is below `limit`; returns labels per cell (0 = unmarked).
fn components(grid: &Grid, marked: &[bool], limit: usize) -> (usize, Vec<u32>) {
    let mut parent: Vec<usize> = (0..limit).collect();
    grid.edges(|a, b| {
        if a < limit && b < limit && marked[a] && marked[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    });
    let mut labels = vec![0u32; limit];
    let mut root_label = vec![0u32; limit];
    let mut count = 0u32;
    for id in 0..limit {
        if !marked[id] {
            continue;
        }
        let r = find(&mut parent, id);
        if root_label[r] == 0 {
            count += 1;
            root_label[r] = count;
        }
        labels[id] = root_label[r];
    }
    (count as usize, labels)
}

/// Default polar sub-division of each top half.
pub const DEFAULT_SUBDIVISIONS: u32 = 16;

/// Components of `{|Θ| < ε}` on the Whitney grid through `depth`.
pub fn level_set_components(theta: &InnerFunction, epsilon: f64, depth: u32) -> Result<LevelSetAnalysis> {
    level_set_components_with(theta, epsilon, depth, DEFAULT_SUBDIVISIONS, 1e-9)
}

/// As [`level_set_components`] with an explicit sub-grid size and evaluation tolerance.
pub fn level_set_components_with(
    theta: &InnerFunction,
    epsilon: f64,
    depth: u32,
    subdivisions: u32,
    eval_tol: f64,
) -> Result<LevelSetAnalysis> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!("ε = {epsilon} outside (0, 1)")));
    }
    if !(3..=16).contains(&depth) {
        return Err(Error::InvalidInput(format!("level-set depth {depth} outside 3..=16")));
    }
    if !(2..=64).contains(&subdivisions) {
        return Err(Error::InvalidInput(format!("subdivisions {subdivisions} outside 2..=64")));
    }
    let grid = Grid::new(depth, subdivisions);
    let marked = (0..grid.total)
        .into_par_iter()
        .map(|id| {
            let z = grid.center(grid.cell(id));
            Ok(theta.modulus_bounds(z, eval_tol)?.hi < epsilon)
        })
        .collect::<Result<Vec<bool>>>()?;
    let (count, labels) = components(&grid, &marked, grid.total);
    let (previous_count, _) = components(&grid, &marked, grid.offsets[depth as usize]);
    let labels = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(id, &l)| (grid.cell(id), l))
        .collect();
    Ok(LevelSetAnalysis {
        epsilon,
        depth,
        subdivisions,
        central_rings: grid.rings,
        component_count: count,
        previous_count,
        stabilized: count == previous_count,
        labels,
    })
}

/// Cell of the analysis grid containing `z`, if the grid reaches it.
pub fn locate_cell(analysis: &LevelSetAnalysis, z: Complex64) -> Option<LevelCell> {
    let r = z.norm();
    if r >= 1.0 {
        return None;
    }
    let s = analysis.subdivisions;
    let t = crate::geometry::wrap_positive(z.im.atan2(z.re));
    if r < CENTRAL_RADIUS {
        let ring = ((r / CENTRAL_RADIUS * analysis.central_rings as f64) as u32)
            .min(analysis.central_rings - 1);
        let sector = if ring == 0 {
            0
        } else {
            ((t / TAU * (4 * s) as f64) as u32).min(4 * s - 1)
        };
        return Some(LevelCell::Central { ring, sector });
    }
    // the top half of depth n covers 1 - π2^{-n} ≤ r < 1 - π2^{-n-1}
    let n = ((PI / (1.0 - r)).log2().floor() as u32).max(2);
    if n > analysis.depth {
        return None;
    }
    let scale = (-(n as f64)).exp2();
    let inner = 1.0 - PI * scale;
    let row = (((r - inner) / (0.5 * PI * scale) * s as f64) as u32).min(s - 1);
    let pos = t / (TAU * scale);
    let index = (pos.floor() as u64).min((1u64 << n) - 1);
    let col = (((pos - index as f64) * s as f64) as u32).min(s - 1);
    Some(LevelCell::Whitney { depth: n, index, row, col })
}

/// 8-bit polar raster: one row per radial sub-row (centre outwards), `width` angular columns;
/// unmarked cells are white, components get distinct grey levels.
pub fn render_pgm(analysis: &LevelSetAnalysis, width: usize) -> Vec<u8> {
    let s = analysis.subdivisions;
    let mut rows: Vec<f64> = Vec::new();
    let rings = analysis.central_rings;
    for ring in 0..rings {
        rows.push((ring as f64 + 0.5) * CENTRAL_RADIUS / rings as f64);
    }
    for n in 2..=analysis.depth {
        let scale = (-(n as f64)).exp2();
        for row in 0..s {
            rows.push(1.0 - PI * scale + (row as f64 + 0.5) * 0.5 * PI * scale / s as f64);
        }
    }
    let header = format!("P5\n{} {}\n255\n", width, rows.len());
    let mut out = header.into_bytes();
    for &r in rows.iter().rev() {
        for x in 0..width {
            let t = (x as f64 + 0.5) * TAU / width as f64;
            let label = locate_cell(analysis, Complex64::from_polar(r, t))
                .and_then(|c| analysis.label_of(&c))
                .unwrap_or(0);
            out.push(if label == 0 {
                255
            } else {
                (label as u64 * 67 % 200) as u8
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cell_numbering_round_trips() {
        let g = Grid::new(5, 4);
        for id in 0..g.total {
            let cell = g.cell(id);
            let back = match cell {
                LevelCell::Central { ring, sector } => g.central_id(ring, sector),
                LevelCell::Whitney { depth, index, row, col } => g.whitney_id(depth, index, row, col),
            };
            assert_eq!(back, id);
        }
    }

    #[test]
    fn edges_join_geometric_neighbors() {
        // adjacent cells have centres at small hyperbolic distance
        let g = Grid::new(6, 4);
        let mut n = 0;
        g.edges(|a, b| {
            n += 1;
            let (za, zb) = (g.center(g.cell(a)), g.center(g.cell(b)));
            assert!(crate::geometry::rho(za, zb) < 0.75, "{:?} {:?}", g.cell(a), g.cell(b));
        });
        assert!(n > g.total);
    }

    #[test]
    fn full_grid_is_connected() {
        let g = Grid::new(6, 4);
        let marked = vec![true; g.total];
        assert_eq!(components(&g, &marked, g.total).0, 1);
    }

    #[test]
    fn locate_matches_centres() {
        let th = InnerFunction::finite_blaschke(vec![c(0.0, 0.0)]).unwrap();
        let a = level_set_components_with(&th, 0.99, 6, 4, 1e-9).unwrap();
        let g = Grid::new(6, 4);
        for id in (0..g.total).step_by(7) {
            let cell = g.cell(id);
            assert_eq!(locate_cell(&a, g.center(cell)), Some(cell));
        }
    }

    #[test]
    fn mobius_level_set_is_connected() {
        let th = InnerFunction::finite_blaschke(vec![c(0.5, 0.0)]).unwrap();
        for eps in [0.1, 0.5, 0.9] {
            let a = level_set_components(&th, eps, 8).unwrap();
            assert_eq!(a.component_count, 1);
            assert!(a.stabilized);
        }
    }

    #[test]
    fn z_squared_disc() {
        let th = InnerFunction::finite_blaschke(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let a = level_set_components(&th, 0.25, 6).unwrap();
        assert_eq!(a.component_count, 1);
        let inside = locate_cell(&a, c(0.1, 0.2)).unwrap();
        assert_eq!(a.label_of(&inside), Some(1));
        assert_eq!(a.label_of(&locate_cell(&a, c(0.6, 0.0)).unwrap()), None);
    }
}
