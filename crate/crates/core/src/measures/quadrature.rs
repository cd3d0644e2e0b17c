//! Adaptive cell refinement for integrals against a singular measure.
//!
//! Every cell carries a certified bracket `[mass·k_min, mass·k_max]`; the widest
//! cell is split until the brackets sum to less than the requested width.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::cantor::TwoSum;
use crate::bounds::Enclosure;
use crate::error::{Error, Result};

pub(crate) const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Cell {
    /// Generation-`n` Cantor interval starting at `start`.
    Cantor { n: usize, start: TwoSum },
    /// Plain angular interval `[a, b]` reached after `depth` bisections.
    Span { a: f64, b: f64, depth: u32 },
}

impl Cell {
    pub fn start(&self) -> f64 {
        match self {
            Cell::Cantor { start, .. } => start.hi,
            Cell::Span { a, .. } => *a,
        }
    }
}

/// Measure-side behavior the integrator needs.
pub(crate) trait CellMeasure {
    fn roots(&self) -> Vec<Cell>;
    fn mass(&self, cell: &Cell) -> f64;
    fn length(&self, cell: &Cell) -> f64;
    fn split(&self, cell: &Cell) -> Option<[Cell; 2]>;
}

struct Entry {
    width: f64,
    cell: Cell,
    bracket: (f64, f64, f64),
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.width.total_cmp(&other.width) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.total_cmp(&other.width)
    }
}

/// Integrate using `bracket(start, len, mass) -> (lo, estimate, hi)` per cell until the total
/// bracket is narrower than `tol`.
pub(crate) fn integrate<M, F>(measure: &M, tol: f64, bracket: F) -> Result<Enclosure>
where
    M: CellMeasure + ?Sized,
    F: Fn(f64, f64, f64) -> (f64, f64, f64),
{
    integrate_until(measure, bracket, |lo, hi| {
        hi - lo <= tol * (1.0 + 1e-9) + 4.0 * f64::EPSILON * hi.abs()
    })
}

/// Refine the widest cell until `accept(lo, hi)` holds for the summed bracket.
pub(crate) fn integrate_until<M, F, A>(measure: &M, bracket: F, accept: A) -> Result<Enclosure>
where
    M: CellMeasure + ?Sized,
    F: Fn(f64, f64, f64) -> (f64, f64, f64),
    A: Fn(f64, f64) -> bool,
{
    let eval = |cell: Cell| -> Entry {
        let m = measure.mass(&cell);
        let b = if m == 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            bracket(cell.start(), measure.length(&cell), m)
        };
        Entry {
            width: b.2 - b.0,
            cell,
            bracket: b,
        }
    };
    let mut heap: BinaryHeap<Entry> = measure.roots().into_iter().map(eval).collect();
    let mut frozen: Vec<Entry> = Vec::new();
    let sums = |heap: &BinaryHeap<Entry>, frozen: &[Entry]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0), |acc, e| {
                (acc.0 + e.bracket.0, acc.1 + e.bracket.1, acc.2 + e.bracket.2)
            })
    };
    let (mut lo, _, mut hi) = sums(&heap, &frozen);
    let mut refinements = 0usize;
    while !accept(lo, hi) {
        let Some(top) = heap.pop() else { break };
        if top.width == 0.0 {
            heap.push(top);
            break;
        }
        lo -= top.bracket.0;
        hi -= top.bracket.2;
        match measure.split(&top.cell) {
            Some(children) => {
                for c in children {
                    let e = eval(c);
                    lo += e.bracket.0;
                    hi += e.bracket.2;
                    heap.push(e);
                }
            }
            None => {
                lo += top.bracket.0;
                hi += top.bracket.2;
                frozen.push(top);
            }
        }
        refinements += 1;
        if heap.len() + frozen.len() > MAX_CELLS {
            break;
        }
        // resynchronize the running sums against accumulated rounding
        if refinements % 4096 == 0 {
            let s = sums(&heap, &frozen);
            lo = s.0;
            hi = s.2;
        }
    }
    let (lo, est, hi) = sums(&heap, &frozen);
    if !accept(lo, hi) {
        return Err(Error::PrecisionExhausted { lo, hi });
    }
    Ok(Enclosure::new(lo, est, hi))
}
