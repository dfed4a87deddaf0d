//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are stated as `min c.x` subject to rows `a.x (<=|>=|=) b` with
//! nonnegative or free variables. Duals are shadow prices
//! `d(optimal value) / d b_i`. Tall problems are best solved through their
//! dual, see [`solve`].

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    /// Minimised.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, bounds: Vec<VarBound>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
            bounds,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(Row { coeffs, relation, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::invalid("one bound per variable required"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("objective has non-finite entries"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(Error::invalid(format!("row {i} has {} coefficients, expected {n}", r.coeffs.len())));
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("row {i} has non-finite entries")));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| {
            let lhs = dot(&r.coeffs, x);
            match r.relation {
                Relation::Le => (lhs - r.rhs).max(0.0),
                Relation::Ge => (r.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - r.rhs).abs(),
            }
        });
        let bounds = self.bounds.iter().zip(x).map(|(b, &v)| match b {
            VarBound::NonNegative => (-v).max(0.0),
            VarBound::Free => 0.0,
        });
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// The dual program, itself written as a minimisation: variables are the
    /// row multipliers (negated for `<=` rows), rows are the columns of this
    /// program. Its optimal value is minus ours.
    pub fn dual(&self) -> LinearProgram {
        let m = self.rows.len();
        let sign: Vec<f64> = self
            .rows
            .iter()
            .map(|r| if r.relation == Relation::Le { -1.0 } else { 1.0 })
            .collect();
        let objective = (0..m).map(|i| -self.rows[i].rhs * sign[i]).collect();
        let bounds = self
            .rows
            .iter()
            .map(|r| if r.relation == Relation::Eq { VarBound::Free } else { VarBound::NonNegative })
            .collect();
        let mut d = LinearProgram::new(objective, bounds);
        for j in 0..self.num_vars() {
            let coeffs = (0..m).map(|i| self.rows[i].coeffs[j] * sign[i]).collect();
            let rel = match self.bounds[j] {
                VarBound::NonNegative => Relation::Le,
                VarBound::Free => Relation::Eq,
            };
            d.add_row(coeffs, rel, self.objective[j]);
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Primal,
    Dual,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Shadow prices, one per row.
    pub duals: Vec<f64>,
    /// Dual objective `b . y` at the reported duals.
    pub dual_objective: f64,
    pub method: Method,
    pub phase1_pivots: usize,
    pub pivots: usize,
    /// Objective value after each phase-two pivot.
    pub trace: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, right-hand side last.
    a: Vec<f64>,
    /// Reduced costs, objective value (negated) last.
    obj: Vec<f64>,
    basis: Vec<usize>,
    forbidden: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn set_costs(&mut self, c: &[f64]) {
        let w = self.cols + 1;
        self.obj = c.to_vec();
        self.obj.push(0.0);
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.obj[j] -= cb * self.a[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + col];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let prow: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + col];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * prow[j];
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for j in 0..w {
                self.obj[j] -= f * prow[j];
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Runs Bland's rule to optimality. `Err` on unboundedness.
    fn optimise(&mut self, trace: &mut Option<&mut Vec<f64>>) -> std::result::Result<(), ()> {
        let scale = 1.0 + self.obj[..self.cols].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        loop {
            let Some(col) = (0..self.cols).find(|&j| !self.forbidden[j] && self.obj[j] < -COST_TOL * scale) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.rows {
                let aij = self.at(i, col);
                if aij > PIVOT_TOL {
                    let ratio = self.rhs(i) / aij;
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - 1e-12 || (ratio <= r + 1e-12 && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return Err(());
            };
            self.pivot(r, col);
            if let Some(t) = trace.as_deref_mut() {
                t.push(-self.obj[self.cols]);
            }
        }
    }
}

/// Solves the program directly with the two-phase method.
pub fn solve_primal(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.rows.len();

    // columns: x+ for every variable, x- for free ones, one slack per
    // inequality, then artificials where no slack gives a unit column
    let mut col_of = Vec::with_capacity(n);
    let mut cols = 0usize;
    for b in &lp.bounds {
        let neg = (*b == VarBound::Free).then(|| cols + 1);
        col_of.push((cols, neg));
        cols += if neg.is_some() { 2 } else { 1 };
    }
    let mut flip = vec![1.0; m];
    let mut slack = vec![None; m];
    for (i, r) in lp.rows.iter().enumerate() {
        if r.rhs < 0.0 {
            flip[i] = -1.0;
        }
        if r.relation != Relation::Eq {
            slack[i] = Some(cols);
            cols += 1;
        }
    }
    let mut unit_col = vec![0usize; m];
    let mut artificial = vec![false; cols];
    for (i, r) in lp.rows.iter().enumerate() {
        let slack_sign = match r.relation {
            Relation::Le => flip[i],
            Relation::Ge => -flip[i],
            Relation::Eq => 0.0,
        };
        if slack_sign > 0.0 {
            unit_col[i] = slack[i].expect("inequality has a slack");
        } else {
            unit_col[i] = cols;
            cols += 1;
            artificial.push(true);
        }
    }
    artificial.resize(cols, false);

    let w = cols + 1;
    let mut a = vec![0.0; m * w];
    for (i, r) in lp.rows.iter().enumerate() {
        for (j, &(p, neg)) in col_of.iter().enumerate() {
            a[i * w + p] = flip[i] * r.coeffs[j];
            if let Some(q) = neg {
                a[i * w + q] = -flip[i] * r.coeffs[j];
            }
        }
        if let Some(s) = slack[i] {
            a[i * w + s] = match r.relation {
                Relation::Le => flip[i],
                _ => -flip[i],
            };
        }
        if artificial[unit_col[i]] {
            a[i * w + unit_col[i]] = 1.0;
        }
        a[i * w + cols] = flip[i] * r.rhs;
    }
    let mut t = Tableau {
        rows: m,
        cols,
        a,
        obj: Vec::new(),
        basis: unit_col.clone(),
        forbidden: vec![false; cols],
        pivots: 0,
    };

    let phase1: Vec<f64> = artificial.iter().map(|&x| if x { 1.0 } else { 0.0 }).collect();
    let phase1_pivots = if artificial.iter().any(|&x| x) {
        t.set_costs(&phase1);
        t.optimise(&mut None).map_err(|_| Error::invalid("phase one cannot be unbounded"))?;
        let infeas = -t.obj[cols];
        let bscale = 1.0 + lp.rows.iter().fold(0.0f64, |mx, r| mx.max(r.rhs.abs()));
        if infeas > FEAS_TOL * bscale {
            return Err(Error::LpInfeasible);
        }
        // drive artificials out of the basis where possible
        for i in 0..m {
            if artificial[t.basis[i]] {
                if let Some(j) = (0..cols).find(|&j| !artificial[j] && t.at(i, j).abs() > 1e-9) {
                    t.pivot(i, j);
                }
            }
        }
        t.pivots
    } else {
        0
    };
    t.forbidden = artificial.clone();

    let mut c = vec![0.0; cols];
    for (j, &(p, neg)) in col_of.iter().enumerate() {
        c[p] = lp.objective[j];
        if let Some(q) = neg {
            c[q] = -lp.objective[j];
        }
    }
    t.set_costs(&c);
    let mut trace = Vec::new();
    t.optimise(&mut Some(&mut trace)).map_err(|_| Error::LpUnbounded)?;

    let mut val = vec![0.0; cols];
    for i in 0..m {
        val[t.basis[i]] = t.rhs(i);
    }
    let x: Vec<f64> = col_of
        .iter()
        .map(|&(p, neg)| val[p] - neg.map_or(0.0, |q| val[q]))
        .collect();
    // reduced cost of the initial unit column of row i is -y_i
    let duals: Vec<f64> = (0..m).map(|i| -t.obj[unit_col[i]] * flip[i]).collect();
    let dual_objective = lp.rows.iter().zip(&duals).map(|(r, y)| r.rhs * y).sum();
    Ok(LpSolution {
        objective: lp.objective_at(&x),
        x,
        duals,
        dual_objective,
        method: Method::Primal,
        phase1_pivots,
        pivots: t.pivots,
        trace,
    })
}

/// Solves through the dual program, which for tall programs (many rows,
/// few variables) has a far smaller tableau. The primal solution is read
/// off the dual's shadow prices. Falls back to the direct method when the
/// dual is infeasible, to tell an unbounded program from an infeasible one.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let d = lp.dual();
    match solve_primal(&d) {
        Ok(ds) => {
            let x: Vec<f64> = ds.duals.iter().map(|s| -s).collect();
            let duals: Vec<f64> = lp
                .rows
                .iter()
                .zip(&ds.x)
                .map(|(r, &y)| if r.relation == Relation::Le { -y } else { y })
                .collect();
            Ok(LpSolution {
                objective: lp.objective_at(&x),
                dual_objective: -ds.objective,
                x,
                duals,
                method: Method::Dual,
                phase1_pivots: ds.phase1_pivots,
                pivots: ds.pivots,
                trace: ds.trace.iter().map(|v| -v).collect(),
            })
        }
        Err(Error::LpUnbounded) => Err(Error::LpInfeasible),
        Err(Error::LpInfeasible) => solve_primal(lp),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    /// Brute force: every vertex of `{A x <= b, x >= 0}` in two or three
    /// variables, via all square subsystems.
    fn vertex_oracle(c: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<f64> {
        let n = c.len();
        let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            all.push((e, 0.0));
        }
        let k = all.len();
        let mut best: Option<f64> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a = DMatrix::from_fn(n, n, |i, j| all[idx[i]].0[j]);
            let b = DVector::from_iterator(n, idx.iter().map(|&i| all[i].1));
            if let Some(x) = a.lu().solve(&b) {
                if all.iter().all(|(r, rhs)| r.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-7) {
                    let v: f64 = c.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
                    best = Some(best.map_or(v, |bv: f64| bv.min(v)));
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < k - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0], vec![VarBound::NonNegative]);
        lp.add_row(vec![1.0], Relation::Le, -1.0);
        assert!(matches!(solve_primal(&lp), Err(Error::LpInfeasible)));
        assert!(matches!(solve(&lp), Err(Error::LpInfeasible)));
        let mut lp = LinearProgram::new(vec![-1.0, 0.0], vec![VarBound::NonNegative, VarBound::Free]);
        lp.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
        assert!(matches!(solve_primal(&lp), Err(Error::LpUnbounded)));
        assert!(matches!(solve(&lp), Err(Error::LpUnbounded)));
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y, x - y = 1, y >= -2 (free y), x free: optimum at y = -2
        let mut lp = LinearProgram::new(vec![1.0, 1.0], vec![VarBound::Free, VarBound::Free]);
        lp.add_row(vec![1.0, -1.0], Relation::Eq, 1.0);
        lp.add_row(vec![0.0, 1.0], Relation::Ge, -2.0);
        for s in [solve_primal(&lp).unwrap(), solve(&lp).unwrap()] {
            assert!((s.x[0] + 1.0).abs() < 1e-9 && (s.x[1] + 2.0).abs() < 1e-9, "{:?}", s.x);
            assert!((s.objective - s.dual_objective).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_vertex_enumeration(
            n in 2usize..4,
            seed in prop::collection::vec(-5i32..6, 40),
        ) {
            let mut it = seed.iter().map(|&v| v as f64);
            let c: Vec<f64> = (0..n).map(|_| it.next().unwrap()).collect();
            let mut rows: Vec<(Vec<f64>, f64)> = (0..4)
                .map(|_| ((0..n).map(|_| it.next().unwrap()).collect(), it.next().unwrap() + 3.0))
                .collect();
            // keep the region bounded
            rows.push((vec![1.0; n], 10.0));
            let mut lp = LinearProgram::new(c.clone(), vec![VarBound::NonNegative; n]);
            for (r, b) in &rows {
                lp.add_row(r.clone(), Relation::Le, *b);
            }
            let oracle = vertex_oracle(&c, &rows);
            for res in [solve_primal(&lp), solve(&lp)] {
                match (oracle, res) {
                    (Some(v), Ok(s)) => {
                        prop_assert!((s.objective - v).abs() < 1e-7, "{} vs {}", s.objective, v);
                        prop_assert!(lp.max_violation(&s.x) < 1e-8);
                        prop_assert!((s.objective - s.dual_objective).abs() < 1e-7);
                        for (r, y) in lp.rows.iter().zip(&s.duals) {
                            prop_assert!(*y <= 1e-9, "Le rows have nonpositive shadow prices");
                            let slackness = (r.rhs - r.coeffs.iter().zip(&s.x).map(|(a, b)| a * b).sum::<f64>()) * y;
                            prop_assert!(slackness.abs() < 1e-7);
                        }
                    }
                    (None, Err(Error::LpInfeasible)) => {}
                    (o, r) => prop_assert!(false, "oracle {:?}, solver {:?}", o, r.map(|s| s.objective)),
                }
            }
        }
    }
}
