//! Grid-certified upper bounds on the local sums `h_m` and the resulting
//! bound on code size.
//!
//! For `f` in the class certified by [`certify_phi_star`], a code point `y0`
//! sees at most `mu` other code points inside the cap of radius `theta0`
//! around `-y0`. The contribution of those points is at most `h_m`, and every
//! code satisfies `|C| <= max_m h_m / c_0`.

pub mod grid;
mod problems;

use std::f64::consts::PI;

use num_traits::{One, Zero};

pub use grid::{Cell, GridOutcome, Refinement, Witness};

use crate::error::{Error, Result};
use crate::gegenbauer::{certify_gnplus, certify_phi_star, expand, PhiStarCertificate};
use crate::geometry::{mu_bound, p5_alpha_max, p5_gram, rhomb_alpha_max, rhomb_gram};
use crate::geometry::FEAS_TOL;
use crate::polyalg::{certify_sign, default_isolation_width, int, to_f64, Polynomial, Rational, SignClaim};
use crate::report::{num, Report, TOOL_VERSION};
use problems::{Family, Simplex, TwoPoint};

/// `f~(theta) = f(-cos theta)` on `[0, theta0]`, `-inf` beyond.
#[derive(Clone, Debug)]
pub struct FTilde {
    coeffs: Vec<f64>,
    dcoeffs: Vec<f64>,
    theta0: f64,
    f_one: f64,
}

impl FTilde {
    pub fn new(f: &Polynomial, theta0: f64) -> Self {
        let coeffs = f.to_f64_coeffs();
        let f_one = coeffs.iter().sum();
        let dcoeffs = f.derivative().to_f64_coeffs();
        FTilde { coeffs, dcoeffs, theta0, f_one }
    }

    pub fn with_theta0(&self, theta0: f64) -> Self {
        FTilde { theta0, ..self.clone() }
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn f_one(&self) -> f64 {
        self.f_one
    }

    pub fn poly(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub(crate) fn derivative_coeffs(&self) -> &[f64] {
        &self.dcoeffs
    }

    pub fn eval(&self, theta: f64) -> f64 {
        if theta > self.theta0 || theta.is_nan() {
            return f64::NEG_INFINITY;
        }
        self.poly(-theta.cos())
    }
}

/// Grid sizes per `m` and refinement settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub n5: usize,
    pub alpha: usize,
    pub refine: Option<Refinement>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n2: 1000,
            n3: 512,
            n4: 256,
            n5: 128,
            alpha: 128,
            refine: Some(Refinement::default()),
        }
    }
}

impl GridSpec {
    /// Same `N` on every axis, uniform grid only.
    pub fn uniform(n: usize) -> Self {
        GridSpec {
            n2: n,
            n3: n,
            n4: n,
            n5: n,
            alpha: n,
            refine: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.n2, self.n3, self.n4, self.n5, self.alpha].contains(&0) {
            return Err(Error::invalid("grid sizes must be positive"));
        }
        if let Some(r) = self.refine {
            if !(r.gap > 0.0) {
                return Err(Error::invalid("refinement gap must be positive"));
            }
        }
        Ok(())
    }
}

/// `(h_0, h_1) = (f(1), f(1) + f(-1))`.
pub fn h0_h1(f: &Polynomial) -> (Rational, Rational) {
    let h0 = f.eval(&Rational::one());
    let h1 = &h0 + f.eval(&-Rational::one());
    (h0, h1)
}

pub fn lambda2(ft: &FTilde, psi: f64, n: usize, refine: Option<Refinement>) -> GridOutcome {
    if ft.theta0() < psi / 2.0 {
        return empty_outcome();
    }
    grid::run(&TwoPoint { ft, psi, n }, refine)
}

/// `h_m` bound for `m` points forming a regular simplex with edge `psi`.
pub fn lambda_simplex(ft: &FTilde, psi: f64, m: usize, n: usize, refine: Option<Refinement>) -> Result<GridOutcome> {
    if !(3..=5).contains(&m) {
        return Err(Error::invalid(format!("simplex grid needs 3 <= m <= 5, got {m}")));
    }
    if ft.theta0() < psi / 2.0 {
        return Ok(empty_outcome());
    }
    Ok(grid::run(&Simplex::new(ft, psi, m, n)?, refine))
}

/// `h_5` bound in `S^3` over the five-point family with diagonal `alpha` in
/// `[psi, arccos(2z - 1)]`.
pub fn lambda5(ft: &FTilde, z: f64, n: usize, n_alpha: usize, refine: Option<Refinement>) -> Result<GridOutcome> {
    let psi = z.acos();
    if ft.theta0() < psi / 2.0 {
        return Ok(empty_outcome());
    }
    let fam = Family::new(ft, z, n, n_alpha, (psi, p5_alpha_max(z)), vec![0, 1, 2], vec![3, 4], 4, p5_gram)?;
    Ok(grid::run(&fam, refine))
}

/// `h_4` bound in `S^2` over rhombs with shorter diagonal `alpha`.
pub fn lambda_rhomb(ft: &FTilde, z: f64, n: usize, n_alpha: usize, refine: Option<Refinement>) -> Result<GridOutcome> {
    let psi = z.acos();
    if ft.theta0() < psi / 2.0 {
        return Ok(empty_outcome());
    }
    let fam = Family::new(ft, z, n, n_alpha, (psi, rhomb_alpha_max(z)), vec![0, 1], vec![2, 3], 3, rhomb_gram)?;
    Ok(grid::run(&fam, refine))
}

fn empty_outcome() -> GridOutcome {
    GridOutcome {
        uniform: f64::NEG_INFINITY,
        uniform_cell: None,
        upper: f64::NEG_INFINITY,
        upper_cell: None,
        lower: None,
        converged: true,
        base_cells: 0,
        exact_evaluations: 0,
        splits: 0,
    }
}

#[derive(Clone, Debug)]
pub struct H6Bound {
    pub value: f64,
    /// `f~(theta0') + lambda5(psi, theta0)`.
    pub outer: f64,
    /// `f(-sqrt z) + lambda5(psi, theta0')`.
    pub inner: f64,
    pub lambda5_prime: GridOutcome,
}

/// Bound on `h_6` from splitting the cap at radius `theta0'`: either the sixth
/// point lies beyond `theta0'`, or all six lie within it and one of them sits
/// at distance at least `arccos sqrt z`.
pub fn h6_bound(ft: &FTilde, z: f64, theta0_prime: f64, lambda5_full: f64, grid: &GridSpec) -> Result<H6Bound> {
    let lo = z.sqrt().acos();
    if !(theta0_prime >= lo - 1e-12 && theta0_prime <= ft.theta0()) {
        return Err(Error::invalid(format!(
            "theta0' = {:.4} deg must lie in [{:.4}, {:.4}] deg",
            theta0_prime.to_degrees(),
            lo.to_degrees(),
            ft.theta0().to_degrees()
        )));
    }
    let ftp = ft.with_theta0(theta0_prime);
    let l5p = lambda5(&ftp, z, grid.n5, grid.alpha, grid.refine)?;
    let outer = ft.eval(theta0_prime) + lambda5_full;
    let inner = ft.poly(-z.sqrt()) + l5p.upper;
    Ok(H6Bound {
        value: outer.max(inner),
        outer,
        inner,
        lambda5_prime: l5p,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HMethod {
    Exact,
    TwoPoint,
    Simplex,
    FivePoint,
    Rhomb,
    SplitCap,
}

impl HMethod {
    pub fn name(self) -> &'static str {
        match self {
            HMethod::Exact => "exact",
            HMethod::TwoPoint => "two-point-grid",
            HMethod::Simplex => "simplex-grid",
            HMethod::FivePoint => "five-point-family-grid",
            HMethod::Rhomb => "rhomb-family-grid",
            HMethod::SplitCap => "split-cap",
        }
    }
}

/// Upper bound on one `h_m`, with the uniform-grid value, the best value of
/// `H` found at a concrete configuration, and where it was found.
#[derive(Clone, Debug)]
pub struct HValue {
    pub m: usize,
    pub method: HMethod,
    pub value: f64,
    pub uniform: Option<f64>,
    pub lower: Option<f64>,
    /// Named coordinates of the witness configuration, angles in degrees.
    pub maximizer: Vec<(String, f64)>,
    pub converged: bool,
    pub detail: Vec<(String, String)>,
}

impl HValue {
    fn exact(m: usize, v: &Rational) -> Self {
        let x = to_f64(v);
        HValue {
            m,
            method: HMethod::Exact,
            value: x,
            uniform: None,
            lower: Some(x),
            maximizer: Vec::new(),
            converged: true,
            detail: vec![("exact".into(), v.to_string())],
        }
    }

    fn from_grid(m: usize, method: HMethod, out: &GridOutcome, labels: &[&str]) -> Self {
        let maximizer = out
            .lower
            .as_ref()
            .map(|w| {
                labels
                    .iter()
                    .zip(&w.point)
                    .map(|(l, x)| (l.to_string(), x.to_degrees()))
                    .collect()
            })
            .unwrap_or_default();
        HValue {
            m,
            method,
            value: out.upper,
            uniform: Some(out.uniform),
            lower: out.lower.as_ref().map(|w| w.value),
            maximizer,
            converged: out.converged,
            detail: vec![
                ("base_cells".into(), out.base_cells.to_string()),
                ("exact_evaluations".into(), out.exact_evaluations.to_string()),
                ("splits".into(), out.splits.to_string()),
            ],
        }
    }
}

/// Compute one `h_m` for dimension `n` given a certified cap radius.
pub fn h_value(
    ft: &FTilde,
    n: usize,
    z: f64,
    m: usize,
    grid: &GridSpec,
    h5_for_h6: Option<f64>,
    theta0_prime: Option<f64>,
) -> Result<HValue> {
    let psi = z.acos();
    let thetas = ["theta1", "theta2", "theta3"];
    match (n, m) {
        (_, 2) => Ok(HValue::from_grid(2, HMethod::TwoPoint, &lambda2(ft, psi, grid.n2, grid.refine), &thetas[..1])),
        (3 | 4, 3) => Ok(HValue::from_grid(
            3,
            HMethod::Simplex,
            &lambda_simplex(ft, psi, 3, grid.n3, grid.refine)?,
            &thetas[..2],
        )),
        (4, 4) => Ok(HValue::from_grid(
            4,
            HMethod::Simplex,
            &lambda_simplex(ft, psi, 4, grid.n4, grid.refine)?,
            &thetas[..3],
        )),
        (4, 5) => Ok(HValue::from_grid(
            5,
            HMethod::FivePoint,
            &lambda5(ft, z, grid.n5, grid.alpha, grid.refine)?,
            &["theta1", "theta2", "theta3", "alpha"],
        )),
        (3, 4) => Ok(HValue::from_grid(
            4,
            HMethod::Rhomb,
            &lambda_rhomb(ft, z, grid.n3, grid.alpha, grid.refine)?,
            &["theta1", "theta2", "alpha"],
        )),
        (4, 6) => {
            let l5 = match h5_for_h6 {
                Some(v) => v,
                None => lambda5(ft, z, grid.n5, grid.alpha, grid.refine)?.upper,
            };
            let tp = theta0_prime.unwrap_or_else(|| default_theta0_prime(z, ft.theta0()));
            let b = h6_bound(ft, z, tp, l5, grid)?;
            let mut v = HValue::from_grid(6, HMethod::SplitCap, &b.lambda5_prime, &["theta1", "theta2", "theta3", "alpha"]);
            v.value = b.value;
            v.uniform = None;
            v.lower = None;
            v.detail.push(("theta0_prime_deg".into(), format!("{:.6}", tp.to_degrees())));
            v.detail.push(("outer".into(), format!("{:.6}", b.outer)));
            v.detail.push(("inner".into(), format!("{:.6}", b.inner)));
            v.detail.push(("lambda5_prime".into(), format!("{:.6}", b.lambda5_prime.upper)));
            Ok(v)
        }
        _ => Err(Error::Unsupported(format!("no bound for h_{m} in dimension {n}"))),
    }
}

/// 50 degrees when admissible, else the midpoint of `[arccos sqrt z, theta0]`.
pub fn default_theta0_prime(z: f64, theta0: f64) -> f64 {
    let lo = z.sqrt().acos();
    let fifty = 50f64.to_radians();
    if (lo..=theta0).contains(&fifty) {
        fifty
    } else {
        0.5 * (lo + theta0)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub grid: GridSpec,
    pub theta0_prime: Option<f64>,
}

/// Safety margin between the floating-point bound and the next integer.
pub const CERT_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `f <= 0` on all of `[-1, z]`: the classical bound applies directly.
    Delsarte,
    CapRefined,
}

#[derive(Clone, Debug)]
pub struct HBoundsReport {
    pub n: usize,
    pub z: Rational,
    pub regime: Regime,
    pub c0: Rational,
    pub f_one: Rational,
    pub phi_star: Option<PhiStarCertificate>,
    pub mu: usize,
    pub mu_delta_deg: Option<f64>,
    pub values: Vec<HValue>,
    pub h_max: f64,
    pub argmax_m: usize,
    pub bound: f64,
    pub code_bound: u64,
    pub grid: GridSpec,
}

/// Full certificate: `G_n^+` membership, class certificate, `mu`, every
/// `h_m` up to `mu`, and the resulting integer bound.
pub fn certify_code_bound(f: &Polynomial, n: usize, z: &Rational, opts: &CertifyOptions) -> Result<HBoundsReport> {
    if !(n == 3 || n == 4) {
        return Err(Error::Unsupported(format!("certification is available for n = 3, 4, got {n}")));
    }
    opts.grid.validate()?;
    let zf = to_f64(z);
    let e = expand(f, n)?;
    let gn = certify_gnplus(&e).map_err(|v| Error::failed("certify_gnplus", v.to_string()))?;
    let c0 = gn.c0().clone();
    let (h0, h1) = h0_h1(f);

    if certify_sign(f, &-int(1), z, SignClaim::Nonpositive).is_ok() {
        let values = vec![HValue::exact(0, &h0)];
        return Ok(finish(n, z, Regime::Delsarte, c0, h0, None, 0, None, values, opts.grid));
    }

    let cert = certify_phi_star(f, z).map_err(|w| Error::failed("certify_phi_star", w.to_string()))?;
    let mu = mu_bound(n, z, &cert.tau0)?;
    let ft = FTilde::new(f, cert.theta0_upper());
    let mut values = vec![HValue::exact(0, &h0)];
    if mu.mu_star >= 1 {
        values.push(HValue::exact(1, &h1));
    }
    let mut h5 = None;
    for m in 2..=mu.mu_star {
        if n == 3 && m >= 5 {
            return Err(Error::Unsupported("h_5 in dimension 3 (equilateral pentagon) is not implemented".into()));
        }
        if n == 4 && m >= 7 {
            return Err(Error::Unsupported(format!("h_{m} in dimension 4")));
        }
        if m == 6 {
            // needs z < t0 < sqrt z
            let t0_hi2 = &cert.t0_hi * &cert.t0_hi;
            if !(t0_hi2 < *z && cert.tau0 > *z) {
                return Err(Error::Unsupported("h_6 bound needs z < t0 < sqrt(z)".into()));
            }
        }
        let v = h_value(&ft, n, zf, m, &opts.grid, h5, opts.theta0_prime)?;
        if m == 5 {
            h5 = Some(v.value);
        }
        values.push(v);
    }
    let delta = mu.delta.map(f64::to_degrees);
    Ok(finish(n, z, Regime::CapRefined, c0, h0, Some(cert), mu.mu_star, delta, values, opts.grid))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: usize,
    z: &Rational,
    regime: Regime,
    c0: Rational,
    f_one: Rational,
    phi_star: Option<PhiStarCertificate>,
    mu: usize,
    mu_delta_deg: Option<f64>,
    values: Vec<HValue>,
    grid: GridSpec,
) -> HBoundsReport {
    let (argmax_m, h_max) = values
        .iter()
        .map(|v| (v.m, v.value))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let bound = h_max / to_f64(&c0);
    let code_bound = if c0.is_zero() { u64::MAX } else { (bound + CERT_MARGIN).floor().max(0.0) as u64 };
    HBoundsReport {
        n,
        z: z.clone(),
        regime,
        c0,
        f_one,
        phi_star,
        mu,
        mu_delta_deg,
        values,
        h_max,
        argmax_m,
        bound,
        code_bound,
        grid,
    }
}

impl GridSpec {
    pub fn write_report(&self, r: &mut Report) {
        r.push("grid.n2", self.n2)
            .push("grid.n3", self.n3)
            .push("grid.n4", self.n4)
            .push("grid.n5", self.n5)
            .push("grid.alpha", self.alpha);
        match self.refine {
            Some(x) => {
                r.push("grid.refine", "on")
                    .push("grid.refine.gap", num(x.gap))
                    .push("grid.refine.max_depth", x.max_depth)
                    .push("grid.refine.max_splits", x.max_splits);
            }
            None => {
                r.push("grid.refine", "off");
            }
        }
    }
}

impl HValue {
    pub fn write_report(&self, r: &mut Report) {
        let p = format!("h.{}", self.m);
        r.push(format!("{p}.method"), self.method.name()).push(format!("{p}.value"), num(self.value));
        if let Some(u) = self.uniform {
            r.push(format!("{p}.uniform"), num(u));
        }
        if let Some(l) = self.lower {
            r.push(format!("{p}.witness"), num(l));
        }
        for (k, v) in &self.maximizer {
            r.push(format!("{p}.maximizer.{k}_deg"), num(*v));
        }
        if self.method != HMethod::Exact {
            r.push(format!("{p}.converged"), self.converged);
        }
        for (k, v) in &self.detail {
            r.push(format!("{p}.{k}"), v);
        }
    }
}

/// Tolerances echoed into every report.
pub fn write_tolerances(r: &mut Report) {
    r.push("tol.root_isolation", default_isolation_width())
        .push("tol.cap_feasibility", num(FEAS_TOL))
        .push("tol.certificate_margin", num(CERT_MARGIN));
}

impl HBoundsReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("code size certificate");
        r.push("tool", TOOL_VERSION)
            .push("n", self.n)
            .push("z", &self.z)
            .push("psi_deg", num(self.psi_deg()));
        self.grid.write_report(&mut r);
        write_tolerances(&mut r);
        r.push(
            "regime",
            match self.regime {
                Regime::Delsarte => "delsarte",
                Regime::CapRefined => "cap-refined",
            },
        )
        .push("c0", &self.c0)
        .push("f_one", &self.f_one);
        if let Some(c) = &self.phi_star {
            r.push("t0.lo", &c.t0_lo)
                .push("t0.hi", &c.t0_hi)
                .push("tau0", &c.tau0)
                .push("theta0_deg", num(c.theta0_upper().to_degrees()));
        }
        r.push("mu", self.mu);
        if let Some(d) = self.mu_delta_deg {
            r.push("mu.delta_deg", num(d));
        }
        for v in &self.values {
            v.write_report(&mut r);
        }
        r.push("h_max", num(self.h_max))
            .push("h_max.m", self.argmax_m)
            .push("bound", num(self.bound))
            .push("code_bound", self.code_bound);
        r
    }

    pub fn value(&self, m: usize) -> Option<&HValue> {
        self.values.iter().find(|v| v.m == m)
    }

    pub fn theta0_deg(&self) -> Option<f64> {
        self.phi_star.as_ref().map(|c| c.theta0_upper().to_degrees())
    }

    pub fn psi_deg(&self) -> f64 {
        to_f64(&self.z).acos() * 180.0 / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{f4, k3};
    use crate::polyalg::rat;

    fn f4_tilde() -> FTilde {
        let c = certify_phi_star(&f4(), &rat(1, 2)).unwrap();
        FTilde::new(&f4(), c.theta0_upper())
    }

    #[test]
    fn h0_h1_examples() {
        let (h0, h1) = h0_h1(&f4());
        assert_eq!(h0, rat(9387, 500));
        assert_eq!(h1, rat(2448, 100));
        let (h0, h1) = h0_h1(&k3());
        assert!((to_f64(&h0) - 10.11).abs() < 1e-9 && (to_f64(&h1) - 12.88).abs() < 1e-9);
    }

    #[test]
    fn ftilde_values() {
        let ft = f4_tilde();
        assert!((ft.eval(50f64.to_radians()) - 0.0906).abs() < 1e-4);
        assert!((ft.eval(45f64.to_radians()) - 0.4533).abs() < 1e-4);
        assert_eq!(ft.eval(60f64.to_radians()), f64::NEG_INFINITY);
    }

    #[test]
    fn lambda2_uniform_and_refined() {
        let ft = f4_tilde();
        let psi = PI / 3.0;
        let coarse = lambda2(&ft, psi, 1, None);
        let fine = lambda2(&ft, psi, 1000, None);
        assert!(coarse.uniform >= fine.uniform);
        let refined = lambda2(&ft, psi, 1000, Some(Refinement::default()));
        assert!((refined.upper - 24.8644).abs() < 1e-3, "{}", refined.upper);
        assert!(refined.lower.unwrap().value <= refined.upper);
        let tight = ft.with_theta0(0.4);
        assert_eq!(lambda2(&tight, psi, 10, None).upper, f64::NEG_INFINITY);
    }
}
