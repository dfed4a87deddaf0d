//! Command-line front end. Argument types are clap-derived so the binary only
//! has to parse and call [`run`]; every command returns a [`Report`] and an
//! exit code instead of printing, which keeps it testable.
//!
//! Exit codes: 0 success, 2 certification failed, 3 invalid input,
//! 4 LP infeasible, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::builtins;
use crate::error::{Error, Result};
use crate::gegenbauer::{certify_phi_star, expand};
use crate::hbounds::{certify_code_bound, h_value, write_tolerances, CertifyOptions, FTilde, GridSpec, Refinement};
use crate::polyalg::{parse_rational, rat, to_f64, Polynomial, Rational};
use crate::polysearch::{refine_and_certify, scan_t0, solve_lp, t0_range, RoundingOptions, SearchParams};
use crate::report::{num, Report, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CERT_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_LP_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "kissing", version, about = "Linear-programming bounds for spherical codes and kissing numbers")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a code-size bound for a polynomial.
    Certify(CertifyArgs),
    /// Search for a polynomial by linear programming.
    Search(SearchArgs),
    /// Compute a single h_m.
    Hbound(HboundArgs),
    /// Print the Gegenbauer expansion of a polynomial.
    Expand(ExpandArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PolySource {
    /// Built-in polynomial: f4 or k3.
    #[arg(long, conflicts_with = "poly")]
    pub builtin: Option<String>,
    /// Polynomial file: degree, then coefficients lowest first.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Dimension; defaults to the builtin's dimension.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Grid size for h_2.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub grid3: Option<usize>,
    #[arg(long)]
    pub grid4: Option<usize>,
    #[arg(long)]
    pub grid5: Option<usize>,
    /// Number of steps in the P5 / rhomb family parameter.
    #[arg(long)]
    pub alpha_grid: Option<usize>,
    /// Only the uniform grid, no branch-and-bound refinement.
    #[arg(long)]
    pub no_refine: bool,
    /// Refinement stops once upper - witness <= gap.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Split cap radius for h_6, degrees.
    #[arg(long)]
    pub theta0_prime: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: PolySource,
    /// Cosine of the minimal angle, an exact rational.
    #[arg(long, default_value = "1/2")]
    pub z: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HboundArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[arg(long, default_value = "1/2")]
    pub z: String,
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    /// Defaults to 1/2 (kissing configurations).
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long, default_value = "0.6058")]
    pub t0: String,
    #[arg(long, short)]
    pub d: usize,
    /// Number of grid steps on [-1, z].
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Tabulate E over lo:hi:step instead of a single solve.
    #[arg(long)]
    pub scan_t0: Option<String>,
    /// Round Gegenbauer coefficients to denominators at most this.
    #[arg(long)]
    pub round: Option<u64>,
    /// Subtracted from the constant term before exact certification; the LP
    /// optimum is tight at t = z.
    #[arg(long, default_value = "1/1000000")]
    pub shift: String,
    /// Recompute h_max for the result (n = 3, 4).
    #[arg(long)]
    pub certify: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Where to write the polynomial file.
    #[arg(long)]
    pub poly_out: Option<PathBuf>,
    /// Where to write the pivot trace.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// What a command produced: the report and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Report,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CertificationFailed { .. } => EXIT_CERT_FAILED,
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Unsupported(_) | Error::Io(_) => EXIT_INVALID,
        Error::LpInfeasible => EXIT_LP_INFEASIBLE,
        _ => EXIT_OTHER,
    }
}

fn error_report(title: &str, e: &Error) -> Report {
    let mut r = Report::new(title);
    r.push("tool", TOOL_VERSION).push("status", "error");
    if let Error::CertificationFailed { stage, .. } = e {
        r.push("failed_stage", stage);
    }
    r.push("error", e);
    r
}

pub fn run(config: &RunConfig) -> Outcome {
    let (title, out, res) = match &config.command {
        Command::Certify(a) => ("code size certificate", &a.output, cmd_certify(a)),
        Command::Search(a) => ("polynomial search", &a.output, cmd_search(a)),
        Command::Hbound(a) => ("h bound", &a.output, cmd_hbound(a)),
        Command::Expand(a) => ("gegenbauer expansion", &a.output, cmd_expand(a)),
    };
    let (code, report) = match res {
        Ok(r) => (EXIT_OK, r),
        Err(e) => (exit_code(&e), error_report(title, &e)),
    };
    if let Some(path) = out {
        if let Err(e) = fs::write(path, report.to_string()) {
            let e = Error::from(e);
            return Outcome {
                code: exit_code(&e),
                report: error_report(title, &e),
            };
        }
    }
    Outcome { code, report }
}

fn parse_z(s: &str) -> Result<Rational> {
    let z = parse_rational(s).ok_or_else(|| Error::invalid(format!("z `{s}` is not a rational")))?;
    if z < rat(0, 1) || z >= rat(1, 1) {
        return Err(Error::invalid(format!("z must lie in [0, 1), got {z}")));
    }
    Ok(z)
}

fn load_polynomial(src: &PolySource) -> Result<(usize, Polynomial)> {
    let (dim, p) = match (&src.builtin, &src.poly) {
        (Some(name), _) => {
            let (d, p) = builtins::lookup(name).ok_or_else(|| {
                Error::invalid(format!("unknown builtin `{name}`, expected one of {}", builtins::NAMES.join(", ")))
            })?;
            (Some(d), p)
        }
        (None, Some(path)) => (None, read_polynomial(path)?),
        (None, None) => return Err(Error::invalid("give --builtin or --poly")),
    };
    let n = src
        .n
        .or(dim)
        .ok_or_else(|| Error::invalid("--n is required with --poly"))?;
    Ok((n, p))
}

pub fn read_polynomial(path: &Path) -> Result<Polynomial> {
    Polynomial::parse_text(&fs::read_to_string(path)?)
}

fn echo_source(r: &mut Report, src: &PolySource) {
    if let Some(b) = &src.builtin {
        r.push("config.builtin", b);
    }
    if let Some(p) = &src.poly {
        r.push("config.poly", p.display());
    }
    if let Some(n) = src.n {
        r.push("config.n", n);
    }
}

impl GridArgs {
    pub fn spec(&self) -> Result<GridSpec> {
        let mut g = GridSpec::default();
        g.n2 = self.grid.unwrap_or(g.n2);
        g.n3 = self.grid3.unwrap_or(g.n3);
        g.n4 = self.grid4.unwrap_or(g.n4);
        g.n5 = self.grid5.unwrap_or(g.n5);
        g.alpha = self.alpha_grid.unwrap_or(g.alpha);
        if self.no_refine {
            g.refine = None;
        } else if let Some(gap) = self.gap {
            g.refine = Some(Refinement {
                gap,
                ..Refinement::default()
            });
        }
        g.validate()?;
        Ok(g)
    }

    pub fn theta0_prime_rad(&self) -> Result<Option<f64>> {
        match self.theta0_prime {
            Some(d) if !(d > 0.0 && d < 180.0) => Err(Error::invalid(format!("theta0' must be in (0, 180) degrees, got {d}"))),
            Some(d) => Ok(Some(d.to_radians())),
            None => Ok(None),
        }
    }

    fn echo(&self, r: &mut Report) {
        let opt = |r: &mut Report, k: &str, v: Option<usize>| {
            if let Some(v) = v {
                r.push(format!("config.{k}"), v);
            }
        };
        opt(r, "grid", self.grid);
        opt(r, "grid3", self.grid3);
        opt(r, "grid4", self.grid4);
        opt(r, "grid5", self.grid5);
        opt(r, "alpha_grid", self.alpha_grid);
        if self.no_refine {
            r.push("config.no_refine", true);
        }
        if let Some(g) = self.gap {
            r.push("config.gap", g);
        }
        if let Some(t) = self.theta0_prime {
            r.push("config.theta0_prime_deg", t);
        }
    }
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<Report> {
    let (n, f) = load_polynomial(&a.source)?;
    let z = parse_z(&a.z)?;
    let opts = CertifyOptions {
        grid: a.grid.spec()?,
        theta0_prime: a.grid.theta0_prime_rad()?,
    };
    let cert = certify_code_bound(&f, n, &z, &opts)?;
    let mut r = cert.to_report();
    echo_source(&mut r, &a.source);
    r.push("config.z", &a.z);
    a.grid.echo(&mut r);
    r.push("status", "certified");
    Ok(r)
}

pub fn cmd_hbound(a: &HboundArgs) -> Result<Report> {
    let (n, f) = load_polynomial(&a.source)?;
    let z = parse_z(&a.z)?;
    let grid = a.grid.spec()?;
    let tp = a.grid.theta0_prime_rad()?;
    if a.m > 6 {
        return Err(Error::Unsupported(format!("h_{} is not available", a.m)));
    }
    let mut r = Report::new("h bound");
    r.push("tool", TOOL_VERSION).push("n", n).push("z", &z).push("m", a.m);
    grid.write_report(&mut r);
    write_tolerances(&mut r);
    echo_source(&mut r, &a.source);
    r.push("config.z", &a.z).push("config.m", a.m);
    a.grid.echo(&mut r);

    let (h0, h1) = crate::hbounds::h0_h1(&f);
    match a.m {
        0 => {
            r.push("h.0.value", num(to_f64(&h0))).push("h.0.exact", &h0);
            return Ok(r);
        }
        1 => {
            r.push("h.1.value", num(to_f64(&h1))).push("h.1.exact", &h1);
            return Ok(r);
        }
        _ => {}
    }
    let cert = certify_phi_star(&f, &z).map_err(|w| Error::failed("certify_phi_star", w.to_string()))?;
    r.push("t0.lo", &cert.t0_lo)
        .push("t0.hi", &cert.t0_hi)
        .push("theta0_deg", num(cert.theta0_upper().to_degrees()));
    let ft = FTilde::new(&f, cert.theta0_upper());
    let v = h_value(&ft, n, to_f64(&z), a.m, &grid, None, tp)?;
    v.write_report(&mut r);
    Ok(r)
}

pub fn cmd_expand(a: &ExpandArgs) -> Result<Report> {
    let (n, f) = load_polynomial(&a.source)?;
    let e = expand(&f, n)?;
    let mut r = Report::new("gegenbauer expansion");
    r.push("tool", TOOL_VERSION).push("n", n);
    echo_source(&mut r, &a.source);
    r.push("degree", e.degree());
    for (k, c) in e.coeffs.iter().enumerate() {
        r.push(format!("c.{k}"), c).push(format!("c.{k}.approx"), num(to_f64(c)));
    }
    Ok(r)
}

fn parse_scan(s: &str) -> Result<Vec<Rational>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid(format!("scan range `{s}` must be lo:hi:step")));
    }
    let q = |t: &str| parse_rational(t).ok_or_else(|| Error::invalid(format!("`{t}` is not a number")));
    t0_range(&q(parts[0])?, &q(parts[1])?, &q(parts[2])?)
}

pub fn cmd_search(a: &SearchArgs) -> Result<Report> {
    let z = match &a.z {
        Some(s) => parse_z(s)?,
        None => rat(1, 2),
    };
    let t0 = parse_rational(&a.t0).ok_or_else(|| Error::invalid(format!("t0 `{}` is not a number", a.t0)))?;
    let params = SearchParams::new(a.n, z, t0, a.d, a.grid)?;

    let echo = |r: &mut Report| {
        r.push("config.n", a.n);
        match &a.z {
            Some(s) => r.push("config.z", s),
            None => r.push("config.z", "default").push("assumption.z", "1/2 (minimal angle 60 degrees)"),
        };
        r.push("config.t0", &a.t0).push("config.d", a.d).push("config.grid", a.grid);
        if let Some(s) = &a.scan_t0 {
            r.push("config.scan_t0", s);
        }
        if let Some(c) = a.round {
            r.push("config.round", c);
        }
        r.push("config.shift", &a.shift);
        if a.certify {
            r.push("config.certify", true);
        }
    };

    if let Some(scan) = &a.scan_t0 {
        let t0s = parse_scan(scan)?;
        let mut r = Report::new("t0 scan");
        r.push("tool", TOOL_VERSION);
        params.write_report(&mut r);
        echo(&mut r);
        for (t0, e) in scan_t0(&params, &t0s) {
            let v = match e {
                Ok(e) => num(e),
                Err(err) => format!("error: {err}"),
            };
            r.push(format!("E.{}", num(to_f64(&t0))), v);
        }
        return Ok(r);
    }

    let res = solve_lp(&params)?;
    let mut r = res.to_report();
    echo(&mut r);
    if let Some(path) = &a.log {
        fs::write(path, res.trace_text())?;
    }

    let shift = parse_rational(&a.shift).ok_or_else(|| Error::invalid(format!("shift `{}` is not a number", a.shift)))?;
    let opts = RoundingOptions {
        denominator_cap: a.round,
        shift: (shift != rat(0, 1)).then_some(shift),
        hbounds: a.certify.then(CertifyOptions::default),
    };
    match refine_and_certify(&res, &opts) {
        Ok(refined) => {
            r.push("refined.rounded", refined.rounded)
                .push("refined.E", num(refined.e_after))
                .push("refined.t0.lo", &refined.phi_star.t0_lo)
                .push("refined.t0.hi", &refined.phi_star.t0_hi);
            if let Some(w) = &refined.warning {
                r.push("refined.warning", w);
            }
            if let Some(h) = &refined.hbounds {
                r.push("refined.h_max", num(h.h_max))
                    .push("refined.h_max.m", h.argmax_m)
                    .push("refined.code_bound", h.code_bound);
            }
            if let Some(path) = &a.poly_out {
                fs::write(path, refined.polynomial.to_text())?;
            }
        }
        Err(e @ Error::CertificationFailed { .. }) => {
            r.push("refined.error", e);
            if let Some(path) = &a.poly_out {
                fs::write(path, res.polynomial()?.to_text())?;
            }
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}
