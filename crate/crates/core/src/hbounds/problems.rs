//! Box bounds for the local sums `h_m`: the two-point case, regular simplices,
//! and one-parameter families (the five-point `P5(alpha)` in `S^3` and the
//! rhomb in `S^2`).

use nalgebra::DMatrix;

use super::grid::{node, Cell, CellProblem, MAXD};
use super::FTilde;
use crate::error::Result;
use crate::geometry::{CapCell, CapSolver, CapTarget, GramConfiguration, MAX_FACET};

fn empty_cell() -> Cell {
    Cell { lo: [0.0; MAXD], hi: [0.0; MAXD], depth: 0 }
}

/// Smallest distance to the target over points whose facet distances lie in
/// the box: the better of the cap-intersection and shell bounds.
fn min_theta(solver: &CapSolver, cell: &CapCell, c: &Cell, d: usize, t: &CapTarget) -> Option<f64> {
    let a = solver.max_cos(cell, t)?;
    let b = solver.shell_max_cos(&c.lo[..d], &c.hi[..d], t)?;
    Some(a.min(b).clamp(-1.0, 1.0).acos())
}

#[derive(Clone, Copy, Debug)]
struct Iv {
    lo: f64,
    hi: f64,
}

impl Iv {
    fn new(a: f64, b: f64) -> Self {
        Iv { lo: a.min(b), hi: a.max(b) }
    }
    fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }
    fn add(self, o: Iv) -> Iv {
        Iv { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }
    fn mul(self, o: Iv) -> Iv {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Iv {
            lo: p.iter().copied().fold(f64::INFINITY, f64::min),
            hi: p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
    fn scale(self, k: f64) -> Iv {
        Iv::new(self.lo * k, self.hi * k)
    }
    fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

fn horner(coeffs: &[f64], t: Iv) -> Iv {
    coeffs.iter().rev().fold(Iv::point(0.0), |acc, &c| acc.mul(t).add(Iv::point(c)))
}

/// A target for [`taylor_bound`]: `G^-1 g`, the normal component `gamma`, and
/// a box bound on its term used when `Theta` may pass `theta0` in the box.
type TaylorTarget<'t> = (&'t [f64; MAX_FACET], f64, f64);

/// Mean-value bound on `f(1) + sum_i f~(theta_i) + sum_k f~(Theta_k)` over the
/// box, where `Theta_k` is the distance from the point at exactly the facet
/// distances `theta` to target `k`.
///
/// Targets that may cross the cutoff `theta0` inside the box contribute their
/// box bound instead. `None` if the point may reach the facet hyperplane.
fn taylor_bound(ft: &FTilde, inv: &[[f64; MAX_FACET]; MAX_FACET], s: usize, c: &Cell, targets: &[TaylorTarget]) -> Option<f64> {
    let mut cs = [Iv::point(0.0); MAX_FACET];
    let mut sn = [Iv::point(0.0); MAX_FACET];
    let mut cm = [0.0; MAX_FACET];
    let mut half = [0.0; MAX_FACET];
    for i in 0..s {
        let (a, b) = (c.lo[i], c.hi[i]);
        cs[i] = Iv::new(b.cos(), a.cos());
        sn[i] = Iv::new(a.sin(), b.sin());
        cm[i] = (0.5 * (a + b)).cos();
        half[i] = 0.5 * (b - a);
    }
    let quad = |x: &[f64; MAX_FACET]| -> f64 { (0..s).map(|i| x[i] * (0..s).map(|j| inv[i][j] * x[j]).sum::<f64>()).sum() };
    let mut qmax = f64::NEG_INFINITY;
    for mask in 0..(1usize << s) {
        let mut x = [0.0; MAX_FACET];
        for i in 0..s {
            x[i] = if mask & (1 << i) != 0 { cs[i].hi } else { cs[i].lo };
        }
        qmax = qmax.max(quad(&x));
    }
    if qmax >= 1.0 - 1e-9 {
        return None;
    }
    let mut ac = [Iv::point(0.0); MAX_FACET];
    let mut qmin = 0.0;
    let cmid: [f64; MAX_FACET] = std::array::from_fn(|i| if i < s { 0.5 * (cs[i].lo + cs[i].hi) } else { 0.0 });
    let mut slack = 0.0;
    for i in 0..s {
        ac[i] = (0..s).fold(Iv::point(0.0), |acc, j| acc.add(cs[j].scale(inv[i][j])));
        let row: f64 = (0..s).map(|j| inv[i][j] * cmid[j]).sum();
        qmin += cmid[i] * row;
        slack += row.abs() * (cs[i].hi - cs[i].lo);
    }
    let qmin = (qmin - slack).max(0.0);
    let beta = Iv::new((1.0 - qmax).sqrt(), (1.0 - qmin.min(qmax)).sqrt());
    let inv_beta = Iv::new(1.0 / beta.hi, 1.0 / beta.lo);
    let cos_theta0 = ft.theta0().cos();
    let dcoef = ft.derivative_coeffs();

    let qc = quad(&cm);
    let beta_c = (1.0 - qc).max(0.0).sqrt();
    let mut value = ft.f_one() + (0..s).map(|i| ft.poly(-cm[i])).sum::<f64>();
    let mut grad = [Iv::point(0.0); MAX_FACET];
    for i in 0..s {
        grad[i] = horner(dcoef, cs[i].scale(-1.0));
    }
    for &(w, gamma, fallback) in targets {
        let mut u = beta.scale(gamma);
        for i in 0..s {
            u = u.add(cs[i].scale(w[i]));
        }
        if u.lo < cos_theta0 {
            value += fallback;
            continue;
        }
        let uc = (0..s).map(|i| w[i] * cm[i]).sum::<f64>() + gamma * beta_c;
        value += ft.poly(-uc);
        let dfu = horner(dcoef, u.scale(-1.0));
        for i in 0..s {
            let du = Iv::point(w[i]).add(ac[i].mul(inv_beta).scale(-gamma));
            grad[i] = grad[i].add(dfu.mul(du));
        }
    }
    Some(value + (0..s).map(|i| half[i] * grad[i].mul(sn[i]).mag()).sum::<f64>())
}

/// Some point of the box with `lower <= t_1 <= ... <= t_d` exists.
fn ordered_point_exists(c: &Cell, d: usize, lower: f64) -> bool {
    let mut t = lower;
    for i in 0..d {
        t = t.max(c.lo[i]);
        if t > c.hi[i] {
            return false;
        }
    }
    true
}

/// `h_2`: two points at distance `psi`, with `theta_1 + theta_2 = psi` at the
/// optimum and `theta_1 <= psi / 2` by symmetry.
pub(crate) struct TwoPoint<'a> {
    pub ft: &'a FTilde,
    pub psi: f64,
    pub n: usize,
}

impl CellProblem for TwoPoint<'_> {
    fn dims(&self) -> usize {
        1
    }
    fn domain(&self) -> Cell {
        let mut c = empty_cell();
        c.lo[0] = self.psi - self.ft.theta0();
        c.hi[0] = self.psi / 2.0;
        c
    }
    fn divisions(&self) -> [usize; MAXD] {
        [self.n, 1, 1, 1]
    }
    fn cheap_bound(&self, c: &Cell) -> (f64, bool) {
        let v = self.ft.f_one() + self.ft.eval(c.lo[0]) + self.ft.eval(self.psi - c.hi[0]);
        (v, true)
    }
    fn exact_bound(&self, c: &Cell) -> f64 {
        self.cheap_bound(c).0
    }
    fn witness(&self, p: &[f64]) -> Option<f64> {
        let v = self.ft.f_one() + self.ft.eval(p[0]) + self.ft.eval(self.psi - p[0]);
        v.is_finite().then_some(v)
    }
}

/// `h_m` for a regular simplex of `m` points at mutual distance `psi`, viewed
/// in `S^(m-1)` with the first `m - 1` points as facet.
pub(crate) struct Simplex<'a> {
    pub ft: &'a FTilde,
    pub psi: f64,
    pub m: usize,
    pub n: usize,
    config: GramConfiguration,
    target: CapTarget,
}

impl<'a> Simplex<'a> {
    pub fn new(ft: &'a FTilde, psi: f64, m: usize, n: usize) -> Result<Self> {
        let config = GramConfiguration::regular_simplex(m, psi.cos())?;
        let target = config.target(m - 1);
        Ok(Simplex { ft, psi, m, n, config, target })
    }

    fn facet_sum(&self, c: &Cell) -> f64 {
        self.ft.f_one() + (0..self.m - 1).map(|i| self.ft.eval(c.lo[i])).sum::<f64>()
    }
}

impl CellProblem for Simplex<'_> {
    fn dims(&self) -> usize {
        self.m - 1
    }
    fn domain(&self) -> Cell {
        let mut c = empty_cell();
        for i in 0..self.m - 1 {
            c.hi[i] = self.ft.theta0();
        }
        c
    }
    fn divisions(&self) -> [usize; MAXD] {
        let mut d = [1; MAXD];
        for x in d.iter_mut().take(self.m - 1) {
            *x = self.n;
        }
        d
    }
    fn admissible(&self, c: &Cell) -> bool {
        ordered_point_exists(c, self.m - 1, self.psi - self.ft.theta0())
    }
    fn cheap_bound(&self, c: &Cell) -> (f64, bool) {
        // triangle inequality: dist(y, y_m) >= psi - dist(y, y_i)
        let amin = (0..self.m - 1).map(|i| c.hi[i]).fold(f64::INFINITY, f64::min);
        (self.facet_sum(c) + self.ft.eval(self.psi - amin), false)
    }
    fn exact_bound(&self, c: &Cell) -> f64 {
        let d = self.m - 1;
        let solver = self.config.cap_solver();
        let cell = solver.cell(&c.hi[..d]);
        let plain = match min_theta(solver, &cell, c, d, &self.target) {
            Some(t) => self.facet_sum(c) + self.ft.eval(t),
            None => f64::NEG_INFINITY,
        };
        if c.depth == 0 || plain == f64::NEG_INFINITY {
            return plain;
        }
        let term = plain - self.facet_sum(c);
        let t = [(self.target.facet_coords(), self.target.normal_length(), term)];
        match taylor_bound(self.ft, solver.facet_inverse(), d, c, &t) {
            Some(v) => plain.min(v),
            None => plain,
        }
    }
    fn witness(&self, p: &[f64]) -> Option<f64> {
        let last = self.config.solve_theta(p, self.m - 1)?;
        let v = self.ft.f_one() + p.iter().map(|&t| self.ft.eval(t)).sum::<f64>() + self.ft.eval(last);
        v.is_finite().then_some(v)
    }
}

/// Gram matrix of a one-parameter family as a function of its diagonal angle.
pub(crate) type FamilyGram = fn(f64, f64) -> Result<(DMatrix<f64>, f64)>;

/// A configuration whose facet is fixed and whose remaining points move with
/// one angle `alpha`; the box has the facet distances followed by `alpha`.
///
/// Within an `alpha` interval each target distance is bounded below by its
/// smaller endpoint value, which is valid whenever the distance is monotone
/// in `alpha` on the domain.
pub(crate) struct Family<'a> {
    pub ft: &'a FTilde,
    pub psi: f64,
    pub z: f64,
    pub n_theta: usize,
    pub n_alpha: usize,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    facet: Vec<usize>,
    targets: Vec<usize>,
    dim: usize,
    gram: FamilyGram,
    solver: CapSolver,
    /// Targets at the `alpha` grid nodes, `node_targets[i][k]`.
    node_targets: Vec<Vec<CapTarget>>,
}

impl<'a> Family<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ft: &'a FTilde,
        z: f64,
        n_theta: usize,
        n_alpha: usize,
        (alpha_lo, alpha_hi): (f64, f64),
        facet: Vec<usize>,
        targets: Vec<usize>,
        dim: usize,
        gram: FamilyGram,
    ) -> Result<Self> {
        let (g0, _) = gram(alpha_lo, z)?;
        let fg = DMatrix::from_fn(facet.len(), facet.len(), |i, j| g0[(facet[i], facet[j])]);
        let solver = CapSolver::new(&fg)?;
        let mut fam = Family {
            ft,
            psi: z.acos(),
            z,
            n_theta,
            n_alpha,
            alpha_lo,
            alpha_hi,
            facet,
            targets,
            dim,
            gram,
            solver,
            node_targets: Vec::new(),
        };
        fam.node_targets = (0..=n_alpha)
            .map(|i| fam.targets_at(node(alpha_lo, alpha_hi, i, n_alpha)))
            .collect::<Result<_>>()?;
        Ok(fam)
    }

    fn targets_at(&self, alpha: f64) -> Result<Vec<CapTarget>> {
        let (g, _) = (self.gram)(alpha, self.z)?;
        Ok(self
            .targets
            .iter()
            .map(|&k| {
                let inner: Vec<f64> = self.facet.iter().map(|&i| g[(k, i)]).collect();
                self.solver.target(&inner)
            })
            .collect())
    }

    fn s(&self) -> usize {
        self.facet.len()
    }

    fn facet_sum(&self, c: &Cell) -> f64 {
        self.ft.f_one() + (0..self.s()).map(|i| self.ft.eval(c.lo[i])).sum::<f64>()
    }

    fn min_theta(&self, cell: &CapCell, c: &Cell, t: &CapTarget) -> Option<f64> {
        min_theta(&self.solver, cell, c, self.s(), t)
    }

    /// Box bound on each target's term, or `None` if some target cannot be
    /// reached within `theta0`.
    fn target_terms(&self, c: &Cell, cell: &CapCell, lo: &[CapTarget], hi: &[CapTarget]) -> Option<Vec<f64>> {
        (0..self.targets.len())
            .map(|k| {
                let a = self.min_theta(cell, c, &lo[k])?;
                let b = self.min_theta(cell, c, &hi[k])?;
                let v = self.ft.eval(a.min(b));
                (v > f64::NEG_INFINITY).then_some(v)
            })
            .collect()
    }

    fn interval_bound(&self, c: &Cell, cell: &CapCell, lo: &[CapTarget], hi: &[CapTarget]) -> f64 {
        match self.target_terms(c, cell, lo, hi) {
            Some(t) => self.facet_sum(c) + t.iter().sum::<f64>(),
            None => f64::NEG_INFINITY,
        }
    }

    /// Each target is at least as far as at the nearer `alpha` endpoint, so
    /// the maximum over every choice of endpoints bounds the box.
    fn taylor_over_endpoints(&self, c: &Cell, lo: &[CapTarget], hi: &[CapTarget], terms: &[f64]) -> Option<f64> {
        let nk = self.targets.len();
        let inv = self.solver.facet_inverse();
        let mut best = f64::NEG_INFINITY;
        for mask in 0..(1usize << nk) {
            let t: Vec<TaylorTarget> = (0..nk)
                .map(|k| {
                    let tk = if mask & (1 << k) != 0 { &hi[k] } else { &lo[k] };
                    (tk.facet_coords(), tk.normal_length(), terms[k])
                })
                .collect();
            best = best.max(taylor_bound(self.ft, inv, self.s(), c, &t)?);
        }
        Some(best)
    }

    fn alpha_targets(&self, alpha: f64) -> Option<Vec<CapTarget>> {
        self.targets_at(alpha.clamp(self.alpha_lo, self.alpha_hi)).ok()
    }
}

impl CellProblem for Family<'_> {
    fn dims(&self) -> usize {
        self.s() + 1
    }
    fn outer_dims(&self) -> usize {
        self.s()
    }
    fn domain(&self) -> Cell {
        let mut c = empty_cell();
        for i in 0..self.s() {
            c.hi[i] = self.ft.theta0();
        }
        c.lo[self.s()] = self.alpha_lo;
        c.hi[self.s()] = self.alpha_hi;
        c
    }
    fn divisions(&self) -> [usize; MAXD] {
        let mut d = [1; MAXD];
        for x in d.iter_mut().take(self.s()) {
            *x = self.n_theta;
        }
        d[self.s()] = self.n_alpha;
        d
    }
    fn admissible(&self, c: &Cell) -> bool {
        let lower = self.psi - self.ft.theta0();
        (0..self.s()).all(|i| c.hi[i] >= lower)
    }
    fn cheap_bound(&self, c: &Cell) -> (f64, bool) {
        // every target is at distance >= psi from every facet point
        let amin = (0..self.s()).map(|i| c.hi[i]).fold(f64::INFINITY, f64::min);
        if self.psi - amin > self.ft.theta0() {
            return (f64::NEG_INFINITY, true);
        }
        let s = self.s();
        let cell = self.solver.cell(&c.hi[..s]);
        let bound = if c.depth == 0 {
            self.interval_bound(c, &cell, &self.node_targets[0], &self.node_targets[self.n_alpha])
        } else {
            match (self.alpha_targets(c.lo[s]), self.alpha_targets(c.hi[s])) {
                (Some(lo), Some(hi)) => match self.target_terms(c, &cell, &lo, &hi) {
                    None => f64::NEG_INFINITY,
                    Some(terms) => {
                        let plain = self.facet_sum(c) + terms.iter().sum::<f64>();
                        self.taylor_over_endpoints(c, &lo, &hi, &terms).map_or(plain, |v| plain.min(v))
                    }
                },
                _ => f64::INFINITY,
            }
        };
        (bound, c.depth > 0)
    }
    fn exact_bound(&self, c: &Cell) -> f64 {
        self.cheap_bound(&Cell { depth: c.depth.max(1), ..*c }).0
    }
    fn exact_uniform(&self, outer: &Cell) -> Vec<(Cell, f64)> {
        let s = self.s();
        let cell = self.solver.cell(&outer.hi[..s]);
        let base = self.facet_sum(outer);
        let nk = self.targets.len();
        // per-node minimal distances for each target
        let mins: Vec<Vec<Option<f64>>> = self
            .node_targets
            .iter()
            .map(|ts| ts.iter().map(|t| self.min_theta(&cell, outer, t)).collect())
            .collect();
        (0..self.n_alpha)
            .map(|i| {
                let mut c = *outer;
                c.lo[s] = node(self.alpha_lo, self.alpha_hi, i, self.n_alpha);
                c.hi[s] = node(self.alpha_lo, self.alpha_hi, i + 1, self.n_alpha);
                let mut v = base;
                for k in 0..nk {
                    match (mins[i][k], mins[i + 1][k]) {
                        (Some(a), Some(b)) => v += self.ft.eval(a.min(b)),
                        _ => v = f64::NEG_INFINITY,
                    }
                }
                (c, v)
            })
            .collect()
    }
    fn witness(&self, p: &[f64]) -> Option<f64> {
        let s = self.s();
        let (g, _) = (self.gram)(p[s], self.z).ok()?;
        let cfg = GramConfiguration::new(g, self.facet.clone(), self.dim).ok()?;
        let mut v = self.ft.f_one() + p[..s].iter().map(|&t| self.ft.eval(t)).sum::<f64>();
        for &k in &self.targets {
            v += self.ft.eval(cfg.solve_theta(&p[..s], k)?);
        }
        v.is_finite().then_some(v)
    }
}
