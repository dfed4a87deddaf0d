//! Searching for good polynomials by linear programming over Gegenbauer
//! coefficients.
//!
//! With `f = 1 + sum_k c_k G_k` the program minimises `E = F0 + f(1)` under
//! `c_k >= 0`, `f` decreasing on `[-1, -t0]`, `f <= 0` on `[-t0, z]`, and
//! `m f(b_m) <= F0` for the cap radii `b_m`, all imposed on a grid of `[-1, z]`.
//! `E` estimates `h_max` from below.

pub mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gegenbauer::{certify_gnplus, certify_phi_star, expand, gegenbauer_basis, gegenbauer_values, GegenbauerExpansion, PhiStarCertificate};
use crate::hbounds::{certify_code_bound, CertifyOptions, HBoundsReport};
use crate::polyalg::{from_f64, int, to_f64, Polynomial, Rational};
use crate::report::{num, Report, TOOL_VERSION};
pub use simplex::{LinearProgram, LpSolution, Method, Relation, VarBound};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub n: usize,
    pub z: Rational,
    pub t0: Rational,
    pub d: usize,
    /// Number of grid steps on `[-1, z]`.
    pub grid: usize,
}

impl SearchParams {
    pub fn new(n: usize, z: Rational, t0: Rational, d: usize, grid: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("dimension must be at least 2, got {n}")));
        }
        if z.is_negative() || t0 <= z || t0 >= Rational::one() {
            return Err(Error::invalid(format!("need 0 <= z < t0 < 1, got z = {z}, t0 = {t0}")));
        }
        if grid == 0 || grid < d {
            return Err(Error::invalid(format!("grid size {grid} must be at least max(d, 1) = {}", d.max(1))));
        }
        Ok(SearchParams { n, z, t0, d, grid })
    }

    /// Grid step `(1 + z) / N`.
    pub fn step(&self) -> f64 {
        (1.0 + to_f64(&self.z)) / self.grid as f64
    }

    pub fn grid_points(&self) -> Vec<f64> {
        let eps = self.step();
        let z = to_f64(&self.z);
        (0..=self.grid)
            .map(|j| if j == self.grid { z } else { -1.0 + eps * j as f64 })
            .collect()
    }

    pub fn write_report(&self, r: &mut Report) {
        r.push("n", self.n)
            .push("z", &self.z)
            .push("t0", &self.t0)
            .push("d", self.d)
            .push("grid", self.grid);
    }
}

/// Cap points `b_m = -cos rho_m` for `m` in `1..=n` and `m = 2n - 2`:
/// `m` points at mutual inner product `z` fit in a cap of radius `rho_m`
/// around their centroid, and `2n - 2` points of a cross-polytope-like
/// arrangement need `cos rho = sqrt z`.
pub fn cap_points(n: usize, z: f64) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = (1..=n)
        .map(|m| (m, -((1.0 + (m as f64 - 1.0) * z) / m as f64).sqrt()))
        .collect();
    let m = 2 * n - 2;
    if m > n {
        out.push((m, -z.sqrt()));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    /// `f(a_j) >= f(a_{j+1})`.
    Monotone(usize),
    /// `f(a_j) <= 0`.
    Nonpositive(usize),
    /// `m f(b_m) <= F0`.
    Cap(usize),
}

#[derive(Clone, Debug)]
pub struct AssembledLp {
    pub lp: LinearProgram,
    pub kinds: Vec<RowKind>,
    pub grid: Vec<f64>,
    /// Last grid index with `a_j <= -t0`. Its monotone row reaches the
    /// first point past `-t0`; the sign rows start at `a_j >= -t0`.
    pub boundary: usize,
}

/// Variables `c_1 .. c_d, F0`; objective `F0 + sum c_k`.
pub fn assemble_lp(p: &SearchParams) -> AssembledLp {
    let d = p.d;
    let grid = p.grid_points();
    let g: Vec<Vec<f64>> = grid.iter().map(|&t| gegenbauer_values(p.n, d, t)).collect();
    // membership in [-1, -t0] and [-t0, z] decided exactly: a_j = -1 + j (1 + z) / N
    let exact_a = |j: usize| -Rational::one() + (Rational::one() + &p.z) * Rational::new(BigInt::from(j), BigInt::from(p.grid));
    let neg_t0 = -p.t0.clone();
    let boundary = (0..=p.grid).rev().find(|&j| exact_a(j) <= neg_t0).unwrap_or(0);
    let first_nonpos = (0..=p.grid).find(|&j| exact_a(j) >= neg_t0).unwrap_or(p.grid);

    let objective = vec![1.0; d + 1];
    let mut bounds = vec![VarBound::NonNegative; d];
    bounds.push(VarBound::Free);
    let mut lp = LinearProgram::new(objective, bounds);
    let mut kinds = Vec::new();

    for j in 0..=boundary.min(p.grid - 1) {
        let mut row: Vec<f64> = (1..=d).map(|k| g[j][k] - g[j + 1][k]).collect();
        row.push(0.0);
        lp.add_row(row, Relation::Ge, 0.0);
        kinds.push(RowKind::Monotone(j));
    }
    for (j, gj) in g.iter().enumerate().skip(first_nonpos) {
        let mut row: Vec<f64> = gj[1..].to_vec();
        row.push(0.0);
        lp.add_row(row, Relation::Le, -1.0);
        kinds.push(RowKind::Nonpositive(j));
    }
    for (m, b) in cap_points(p.n, to_f64(&p.z)) {
        let gb = gegenbauer_values(p.n, d, b);
        let mf = m as f64;
        let mut row: Vec<f64> = gb[1..].iter().map(|v| mf * v).collect();
        row.push(-1.0);
        lp.add_row(row, Relation::Le, -mf);
        kinds.push(RowKind::Cap(m));
    }
    AssembledLp { lp, kinds, grid, boundary }
}

#[derive(Clone, Debug)]
pub struct SearchLog {
    pub rows: usize,
    pub variables: usize,
    pub method: Method,
    pub phase1_pivots: usize,
    pub pivots: usize,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub params: SearchParams,
    /// `c_1 .. c_d`.
    pub c: Vec<f64>,
    pub f0: f64,
    /// `F0 + f(1)`.
    pub e: f64,
    pub dual_bound: f64,
    pub max_violation: f64,
    pub log: SearchLog,
}

impl SearchResult {
    /// `1 + sum c_k G_k` with the floating-point coefficients taken exactly.
    pub fn polynomial(&self) -> Result<Polynomial> {
        let mut c = vec![int(1)];
        for &x in &self.c {
            c.push(from_f64(x).ok_or_else(|| Error::invalid("non-finite coefficient"))?);
        }
        from_gegenbauer(self.params.n, &c)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("polynomial search");
        r.push("tool", TOOL_VERSION);
        self.params.write_report(&mut r);
        for (k, c) in self.c.iter().enumerate() {
            r.push(format!("c.{}", k + 1), num(*c));
        }
        r.push("F0", num(self.f0))
            .push("E", num(self.e))
            .push("dual_bound", num(self.dual_bound))
            .push("max_violation", format!("{:.3e}", self.max_violation))
            .push("lp.rows", self.log.rows)
            .push("lp.variables", self.log.variables)
            .push(
                "lp.method",
                match self.log.method {
                    Method::Dual => "dual",
                    Method::Primal => "primal",
                },
            )
            .push("lp.phase1_pivots", self.log.phase1_pivots)
            .push("lp.pivots", self.log.pivots);
        r
    }

    /// Objective after each pivot, one line per entry.
    pub fn trace_text(&self) -> String {
        self.log
            .trace
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{} {}\n", i + 1, num(*v + 1.0)))
            .collect()
    }
}

fn from_gegenbauer(n: usize, c: &[Rational]) -> Result<Polynomial> {
    let e = GegenbauerExpansion {
        n,
        coeffs: c.to_vec(),
    };
    let _ = gegenbauer_basis(n, c.len().saturating_sub(1))?;
    Ok(e.reconstruct())
}

pub fn solve_lp(p: &SearchParams) -> Result<SearchResult> {
    let a = assemble_lp(p);
    let s = simplex::solve(&a.lp)?;
    let d = p.d;
    let c = s.x[..d].to_vec();
    let f0 = s.x[d];
    Ok(SearchResult {
        params: p.clone(),
        e: f0 + 1.0 + c.iter().sum::<f64>(),
        dual_bound: s.dual_objective + 1.0,
        max_violation: a.lp.max_violation(&s.x),
        c,
        f0,
        log: SearchLog {
            rows: a.lp.rows.len(),
            variables: a.lp.num_vars(),
            method: s.method,
            phase1_pivots: s.phase1_pivots,
            pivots: s.pivots,
            trace: s.trace,
        },
    })
}

/// `E(t0)` over a list of `t0` values; failures are reported per entry.
pub fn scan_t0(base: &SearchParams, t0s: &[Rational]) -> Vec<(Rational, Result<f64>)> {
    t0s.iter()
        .map(|t0| {
            let r = SearchParams::new(base.n, base.z.clone(), t0.clone(), base.d, base.grid).and_then(|p| solve_lp(&p).map(|s| s.e));
            (t0.clone(), r)
        })
        .collect()
}

/// Evenly spaced values `lo, lo + step, ..` up to `hi` (inclusive).
pub fn t0_range(lo: &Rational, hi: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() || hi < lo {
        return Err(Error::invalid("scan range needs lo <= hi and a positive step"));
    }
    let mut out = Vec::new();
    let mut t = lo.clone();
    while t <= *hi {
        out.push(t.clone());
        t += step;
    }
    Ok(out)
}

/// The classical program: minimise `f(1)` for `f = 1 + sum c_k G_k` with
/// `c_k >= 0` and `f <= 0` on the grid of `[-1, z]`.
#[derive(Clone, Debug)]
pub struct DelsarteLp {
    pub c: Vec<f64>,
    pub bound: f64,
}

pub fn delsarte_lp(n: usize, z: &Rational, d: usize, grid: usize) -> Result<DelsarteLp> {
    if grid == 0 || d == 0 {
        return Err(Error::invalid("degree and grid size must be positive"));
    }
    let zf = to_f64(z);
    let mut lp = LinearProgram::new(vec![1.0; d], vec![VarBound::NonNegative; d]);
    for j in 0..=grid {
        let t = -1.0 + (1.0 + zf) * j as f64 / grid as f64;
        lp.add_row(gegenbauer_values(n, d, t)[1..].to_vec(), Relation::Le, -1.0);
    }
    let s = simplex::solve(&lp)?;
    Ok(DelsarteLp {
        bound: 1.0 + s.x.iter().sum::<f64>(),
        c: s.x,
    })
}

/// Best rational approximation with denominator at most `cap`.
pub fn round_rational(x: f64, cap: u64) -> Option<Rational> {
    let exact = from_f64(x)?;
    if cap == 0 {
        return None;
    }
    let cap = BigInt::from(cap);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut r = exact.clone();
    loop {
        let a = r.floor().to_integer();
        let q2 = &a * &q1 + &q0;
        if q2 > cap {
            // semiconvergent check
            let k = (&cap - &q0) / &q1;
            let semi = Rational::new(&k * &p1 + &p0, &k * &q1 + &q0);
            let conv = Rational::new(p1.clone(), q1.clone());
            let better = (&semi - &exact).abs() < (&conv - &exact).abs();
            return Some(if better && k > BigInt::zero() { semi } else { conv });
        }
        let p2 = &a * &p1 + &p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = &r - Rational::from_integer(a);
        if frac.is_zero() {
            return Some(Rational::new(p1, q1));
        }
        r = frac.recip();
    }
}

#[derive(Clone, Debug, Default)]
pub struct RoundingOptions {
    /// `None` keeps the coefficients exactly.
    pub denominator_cap: Option<u64>,
    /// Subtracted from the constant term of both the rounded and the
    /// unrounded candidate.
    pub shift: Option<Rational>,
    /// Grid settings for recomputing `h_max` (dimensions 3 and 4 only).
    pub hbounds: Option<CertifyOptions>,
}

#[derive(Clone, Debug)]
pub struct Refined {
    pub polynomial: Polynomial,
    pub expansion: GegenbauerExpansion,
    pub phi_star: PhiStarCertificate,
    pub rounded: bool,
    pub warning: Option<String>,
    pub e_before: f64,
    /// `max_m m f(b_m) + f(1)`, divided by `c_0`.
    pub e_after: f64,
    pub hbounds: Option<HBoundsReport>,
}

/// `max(m f(b_m)) + f(1)` over `c_0`, the search objective for an exact `f`.
pub fn objective_value(f: &Polynomial, p: &SearchParams) -> Result<f64> {
    let c0 = to_f64(expand(f, p.n)?.c0());
    let f0 = cap_points(p.n, to_f64(&p.z))
        .into_iter()
        .map(|(m, b)| m as f64 * f.eval_f64(b))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((f0 + f.eval_f64(1.0)) / c0)
}

fn certify_candidate(f: &Polynomial, p: &SearchParams) -> Result<(GegenbauerExpansion, PhiStarCertificate)> {
    let e = expand(f, p.n)?;
    certify_gnplus(&e).map_err(|v| Error::failed("certify_gnplus", v.to_string()))?;
    let cert = certify_phi_star(f, &p.z).map_err(|w| Error::failed("certify_phi_star", w.to_string()))?;
    Ok((e, cert))
}

/// Rounds the coefficients, re-certifies the class conditions exactly and
/// recomputes `h_max` when requested. If rounding breaks a certificate the
/// unrounded polynomial is certified instead and a warning is attached.
pub fn refine_and_certify(r: &SearchResult, opts: &RoundingOptions) -> Result<Refined> {
    let p = &r.params;
    let exact = r.polynomial()?;
    let candidate = match opts.denominator_cap {
        None => exact.clone(),
        Some(cap) => {
            let mut c = vec![int(1)];
            for &x in &r.c {
                let q = round_rational(x.max(0.0), cap).ok_or_else(|| Error::invalid("cannot round coefficient"))?;
                c.push(q);
            }
            from_gegenbauer(p.n, &c)?
        }
    };
    let shifted = |f: Polynomial| match &opts.shift {
        Some(s) => &f - &Polynomial::constant(s.clone()),
        None => f,
    };
    let candidate = shifted(candidate);
    let exact = shifted(exact);
    let rounded = opts.denominator_cap.is_some();
    let (polynomial, expansion, phi_star, warning, was_rounded) = match certify_candidate(&candidate, p) {
        Ok((e, c)) => (candidate, e, c, None, rounded),
        Err(err) if rounded => {
            let (e, c) = certify_candidate(&exact, p)?;
            (exact, e, c, Some(format!("rounding broke the certificate ({err}); keeping the unrounded polynomial")), false)
        }
        Err(err) => return Err(err),
    };
    let hbounds = match &opts.hbounds {
        Some(o) if p.n == 3 || p.n == 4 => Some(certify_code_bound(&polynomial, p.n, &p.z, o)?),
        _ => None,
    };
    Ok(Refined {
        e_after: objective_value(&polynomial, p)?,
        polynomial,
        expansion,
        phi_star,
        rounded: was_rounded,
        warning,
        e_before: r.e,
        hbounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::f4;
    use crate::polyalg::rat;

    #[test]
    fn cap_points_examples() {
        let b = cap_points(4, 0.5);
        assert_eq!(b[0], (1, -1.0));
        assert_eq!(b.last().unwrap().0, 6);
        assert!((b.last().unwrap().1 + 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(cap_points(2, 0.5).len(), 2);
    }

    #[test]
    fn row_count_follows_partition() {
        let p = SearchParams::new(4, rat(1, 2), rat(6058, 10000), 9, 2000).unwrap();
        let a = assemble_lp(&p);
        let grid = p.grid_points();
        let mono = grid.iter().filter(|&&x| x <= -0.6058).count();
        let nonpos = grid.iter().filter(|&&x| x >= -0.6058).count();
        assert_eq!(a.lp.num_vars(), 10);
        assert_eq!(a.lp.rows.len(), mono + nonpos + 5);
        assert_eq!(a.boundary + 1, mono);
    }

    #[test]
    fn invalid_params() {
        assert!(SearchParams::new(4, rat(1, 2), rat(1, 2), 9, 100).is_err());
        assert!(SearchParams::new(4, rat(1, 2), rat(3, 5), 9, 5).is_err());
        let p = SearchParams::new(4, rat(1, 2), rat(3, 5), 0, 100).unwrap();
        assert!(matches!(solve_lp(&p), Err(Error::LpInfeasible)));
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(round_rational(0.3333333333, 10), Some(rat(1, 3)));
        assert_eq!(round_rational(std::f64::consts::PI, 1000), Some(rat(355, 113)));
        assert_eq!(round_rational(2.6, 1), Some(int(3)));
        assert_eq!(round_rational(0.5, 1 << 40), Some(rat(1, 2)));
    }

    #[test]
    fn solution_is_grid_feasible() {
        let p = SearchParams::new(4, rat(1, 2), rat(6058, 10000), 9, 400).unwrap();
        let r = solve_lp(&p).unwrap();
        assert!(r.max_violation < 1e-8);
        assert!((r.e - r.dual_bound).abs() < 1e-8);
        assert!(r.c.iter().all(|&c| c >= -1e-12));
    }

    #[test]
    fn rounding_recovers_published_coefficients() {
        // nudge the published expansion and round it back
        let e = expand(&f4(), 4).unwrap();
        let p = SearchParams::new(4, rat(1, 2), rat(6058, 10000), 9, 2000).unwrap();
        let c: Vec<f64> = e.coeffs[1..].iter().map(|q| to_f64(q) * (1.0 + 1e-7)).collect();
        let fake = SearchResult {
            params: p,
            c,
            f0: 0.0,
            e: 0.0,
            dual_bound: 0.0,
            max_violation: 0.0,
            log: SearchLog {
                rows: 0,
                variables: 0,
                method: Method::Dual,
                phase1_pivots: 0,
                pivots: 0,
                trace: vec![],
            },
        };
        let out = refine_and_certify(&fake, &RoundingOptions { denominator_cap: Some(250), ..Default::default() }).unwrap();
        assert!(out.rounded && out.warning.is_none());
        assert_eq!(out.polynomial, f4());
        // identity rounding keeps the input
        let same = refine_and_certify(&fake, &RoundingOptions::default()).unwrap();
        assert_eq!(same.polynomial, fake.polynomial().unwrap());
        // integers only breaks the certificate and falls back
        let coarse = refine_and_certify(&fake, &RoundingOptions { denominator_cap: Some(1), ..Default::default() }).unwrap();
        assert!(!coarse.rounded && coarse.warning.is_some());
    }
}
