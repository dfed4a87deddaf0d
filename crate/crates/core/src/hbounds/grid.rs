//! Lazy branch-and-bound over a uniform grid of boxes.
//!
//! Each problem supplies a per-box upper bound (cheap and exact variants) and
//! a lower witness value at concrete points. The uniform maximum over the base
//! grid is reported exactly as defined; optional refinement then bisects the
//! boxes that attain the current maximum until it is within `gap` of the best
//! witness.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

pub const MAXD: usize = 4;
const BATCH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub lo: [f64; MAXD],
    pub hi: [f64; MAXD],
    pub depth: u32,
}

impl Cell {
    pub fn center(&self, dims: usize) -> Vec<f64> {
        (0..dims).map(|i| 0.5 * (self.lo[i] + self.hi[i])).collect()
    }
}

/// Refinement settings: stop once `upper - lower <= gap`, or when a box has
/// been bisected `max_depth` times, or after `max_splits` bisections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement {
    pub gap: f64,
    pub max_depth: u32,
    pub max_splits: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            gap: 5e-4,
            max_depth: 96,
            max_splits: 2_000_000,
        }
    }
}

pub trait CellProblem: Sync {
    fn dims(&self) -> usize;

    /// Leading dimensions enumerated by the base grid; the rest are split
    /// only when a base box is evaluated exactly.
    fn outer_dims(&self) -> usize {
        self.dims()
    }

    fn domain(&self) -> Cell;

    fn divisions(&self) -> [usize; MAXD];

    fn admissible(&self, _cell: &Cell) -> bool {
        true
    }

    /// An upper bound valid for every point of the box and every inner split,
    /// and whether it already equals the exact box bound.
    fn cheap_bound(&self, cell: &Cell) -> (f64, bool);

    fn exact_bound(&self, cell: &Cell) -> f64;

    /// Exact bounds for the uniform inner split of a base box.
    fn exact_uniform(&self, outer: &Cell) -> Vec<(Cell, f64)> {
        let d = self.dims();
        let od = self.outer_dims();
        if d == od {
            return vec![(*outer, self.exact_bound(outer))];
        }
        let dom = self.domain();
        let div = self.divisions();
        let inner: usize = (od..d).map(|i| div[i]).product();
        (0..inner)
            .map(|mut idx| {
                let mut c = *outer;
                for i in od..d {
                    let j = idx % div[i];
                    idx /= div[i];
                    c.lo[i] = node(dom.lo[i], dom.hi[i], j, div[i]);
                    c.hi[i] = node(dom.lo[i], dom.hi[i], j + 1, div[i]);
                }
                let v = self.exact_bound(&c);
                (c, v)
            })
            .collect()
    }

    /// Value of the objective at a concrete feasible point, if feasible.
    fn witness(&self, point: &[f64]) -> Option<f64>;
}

/// Grid node `j` of `n` on `[lo, hi]`; nested exactly when `n` doubles.
pub fn node(lo: f64, hi: f64, j: usize, n: usize) -> f64 {
    if j == n {
        return hi;
    }
    lo + (hi - lo) * (j as f64) / (n as f64)
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub value: f64,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    /// Maximum of the exact box bound over the base grid.
    pub uniform: f64,
    pub uniform_cell: Option<Cell>,
    /// Certified upper bound after refinement (equals `uniform` without it).
    pub upper: f64,
    pub upper_cell: Option<Cell>,
    pub lower: Option<Witness>,
    pub converged: bool,
    pub base_cells: usize,
    pub exact_evaluations: usize,
    pub splits: usize,
}

struct Node {
    bound: f64,
    seq: u64,
    cell: Cell,
    exact: bool,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn base_cell<P: CellProblem + ?Sized>(p: &P, mut idx: usize) -> Cell {
    let dom = p.domain();
    let div = p.divisions();
    let mut c = dom;
    for i in 0..p.outer_dims() {
        let j = idx % div[i];
        idx /= div[i];
        c.lo[i] = node(dom.lo[i], dom.hi[i], j, div[i]);
        c.hi[i] = node(dom.lo[i], dom.hi[i], j + 1, div[i]);
    }
    c.depth = 0;
    c
}

fn better(best: &mut Option<Witness>, cand: Option<Witness>) {
    if let Some(c) = cand {
        if best.as_ref().is_none_or(|b| c.value > b.value) {
            *best = Some(c);
        }
    }
}

fn probe<P: CellProblem + ?Sized>(p: &P, cell: &Cell) -> Option<Witness> {
    let d = p.dims();
    let mut pts = vec![cell.center(d)];
    for mask in 0..(1usize << d) {
        pts.push(
            (0..d)
                .map(|i| if mask & (1 << i) != 0 { cell.hi[i] } else { cell.lo[i] })
                .collect(),
        );
    }
    let mut best = None;
    for pt in pts {
        better(
            &mut best,
            p.witness(&pt).map(|value| Witness { value, point: pt }),
        );
    }
    best
}

pub fn run<P: CellProblem + ?Sized>(p: &P, refine: Option<Refinement>) -> GridOutcome {
    let div = p.divisions();
    let od = p.outer_dims();
    let total: usize = (0..od).map(|i| div[i]).product();

    let mut pending: Vec<(f64, bool, usize)> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let c = base_cell(p, idx);
            if !p.admissible(&c) {
                return None;
            }
            let (b, exact) = p.cheap_bound(&c);
            (b > f64::NEG_INFINITY).then_some((b, exact, idx))
        })
        .collect();
    pending.par_sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
    let base_cells = pending.len();

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut ptr = 0usize;
    let mut out = GridOutcome {
        uniform: f64::NEG_INFINITY,
        uniform_cell: None,
        upper: f64::NEG_INFINITY,
        upper_cell: None,
        lower: None,
        converged: refine.is_none(),
        base_cells,
        exact_evaluations: 0,
        splits: 0,
    };
    let mut uniform_done = false;

    loop {
        let list_top = pending.get(ptr).map(|e| e.0);
        let heap_top = heap.peek().map(|n: &Node| n.bound);
        let take_list = match (list_top, heap_top) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(l), Some(h)) => l > h,
        };
        if take_list {
            let mut end = ptr + 1;
            while end < pending.len() && end - ptr < BATCH && heap_top.is_none_or(|h| pending[end].0 > h) {
                end += 1;
            }
            let evaluated: Vec<Vec<(Cell, f64)>> = pending[ptr..end]
                .par_iter()
                .map(|&(cheap, exact, idx)| {
                    let c = base_cell(p, idx);
                    if exact && od == p.dims() {
                        vec![(c, cheap)]
                    } else {
                        p.exact_uniform(&c)
                            .into_iter()
                            .map(|(cc, v)| (cc, v.min(cheap)))
                            .collect()
                    }
                })
                .collect();
            out.exact_evaluations += end - ptr;
            for (cell, bound) in evaluated.into_iter().flatten() {
                if bound > f64::NEG_INFINITY {
                    seq += 1;
                    heap.push(Node { bound, seq, cell, exact: true });
                }
            }
            ptr = end;
            continue;
        }

        let node = heap.pop().expect("heap top checked");
        if !node.exact {
            let mut batch = vec![node];
            while batch.len() < BATCH && heap.peek().is_some_and(|n| !n.exact) {
                batch.push(heap.pop().expect("peeked"));
            }
            let evaluated: Vec<(Cell, f64)> = batch
                .par_iter()
                .map(|n| (n.cell, p.exact_bound(&n.cell).min(n.bound)))
                .collect();
            out.exact_evaluations += evaluated.len();
            for (cell, bound) in evaluated {
                if bound > f64::NEG_INFINITY {
                    seq += 1;
                    heap.push(Node { bound, seq, cell, exact: true });
                }
            }
            continue;
        }

        if !uniform_done {
            uniform_done = true;
            out.uniform = node.bound;
            out.uniform_cell = Some(node.cell);
        }
        better(&mut out.lower, probe(p, &node.cell));
        let Some(r) = refine else {
            out.upper = node.bound;
            out.upper_cell = Some(node.cell);
            break;
        };
        let lower = out.lower.as_ref().map_or(f64::NEG_INFINITY, |w| w.value);
        if node.bound <= lower + r.gap || node.cell.depth >= r.max_depth || out.splits >= r.max_splits {
            out.converged = node.bound <= lower + r.gap;
            out.upper = node.bound;
            out.upper_cell = Some(node.cell);
            break;
        }
        out.splits += 1;
        let d = p.dims();
        let widest = (0..d)
            .max_by(|&a, &b| (node.cell.hi[a] - node.cell.lo[a]).total_cmp(&(node.cell.hi[b] - node.cell.lo[b])))
            .expect("at least one dimension");
        let mid = 0.5 * (node.cell.lo[widest] + node.cell.hi[widest]);
        for upper_half in [false, true] {
            let mut c = node.cell;
            c.depth += 1;
            if upper_half {
                c.lo[widest] = mid;
            } else {
                c.hi[widest] = mid;
            }
            if !p.admissible(&c) {
                continue;
            }
            let (b, exact) = p.cheap_bound(&c);
            let b = b.min(node.bound);
            if b > f64::NEG_INFINITY {
                seq += 1;
                heap.push(Node { bound: b, seq, cell: c, exact });
            }
        }
    }
    if out.upper == f64::NEG_INFINITY {
        out.converged = true;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maximise `-(x - 0.3)^2 - (y - 0.7)^2` on the unit square with a
    /// Lipschitz box bound.
    struct Bowl;

    impl CellProblem for Bowl {
        fn dims(&self) -> usize {
            2
        }
        fn domain(&self) -> Cell {
            Cell { lo: [0.0; MAXD], hi: [1.0, 1.0, 0.0, 0.0], depth: 0 }
        }
        fn divisions(&self) -> [usize; MAXD] {
            [16, 16, 1, 1]
        }
        fn cheap_bound(&self, c: &Cell) -> (f64, bool) {
            let d = |lo: f64, hi: f64, t: f64| if t < lo { lo - t } else if t > hi { t - hi } else { 0.0 };
            let v = -d(c.lo[0], c.hi[0], 0.3).powi(2) - d(c.lo[1], c.hi[1], 0.7).powi(2);
            (v, true)
        }
        fn exact_bound(&self, c: &Cell) -> f64 {
            self.cheap_bound(c).0
        }
        fn witness(&self, p: &[f64]) -> Option<f64> {
            Some(-(p[0] - 0.3).powi(2) - (p[1] - 0.7).powi(2))
        }
    }

    #[test]
    fn refines_to_the_maximum() {
        let u = run(&Bowl, None);
        assert_eq!(u.uniform, 0.0);
        let r = run(&Bowl, Some(Refinement { gap: 1e-8, ..Default::default() }));
        assert!(r.converged);
        assert!(r.upper >= 0.0 && r.lower.unwrap().value > -1e-8);
    }

    #[test]
    fn nodes_nest_when_doubling() {
        for j in 0..=100 {
            assert_eq!(node(0.1, 0.9, j, 100), node(0.1, 0.9, 2 * j, 200));
        }
    }
}
