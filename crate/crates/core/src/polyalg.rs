//! Exact univariate polynomials over the rationals, Sturm-sequence root
//! isolation and sign certificates on intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Width below which isolating intervals stop being bisected.
pub fn default_isolation_width() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `a/b`, an integer, or a plain decimal such as `-0.6058`.
pub fn parse_rational(token: &str) -> Option<Rational> {
    let s = token.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", if whole.is_empty() { "0" } else { whole }, frac);
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Polynomial with rational coefficients stored lowest degree first.
///
/// The coefficient vector is kept trimmed: the leading coefficient is nonzero
/// unless the polynomial is identically zero, which is stored as `[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().expect("trimmed polynomial is never empty")
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64_coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Polynomial long division; panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree();
        let lead = divisor.leading().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// Divides by the absolute value of the leading coefficient.
    fn normalize_abs(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading().abs();
        Self::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.normalize_abs();
        let mut b = other.normalize_abs();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.normalize_abs();
        }
        a
    }

    /// Same distinct real roots, all simple.
    pub fn squarefree(&self) -> Polynomial {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    /// Reads `degree` followed by `degree + 1` coefficients, lowest first.
    /// Lines starting with `#` are ignored.
    pub fn parse_text(text: &str) -> Result<Polynomial> {
        let tokens = tokens(text);
        let (pos, first) = tokens
            .first()
            .ok_or_else(|| Error::parse(0, "empty polynomial file"))?;
        let degree: usize = first
            .parse()
            .map_err(|_| Error::parse(*pos, format!("degree `{first}` is not a nonnegative integer")))?;
        if tokens.len() != degree + 2 {
            return Err(Error::parse(
                tokens.len(),
                format!(
                    "expected {} coefficients for degree {degree}, found {}",
                    degree + 1,
                    tokens.len() - 1
                ),
            ));
        }
        let coeffs = tokens[1..]
            .iter()
            .map(|(p, t)| {
                parse_rational(t).ok_or_else(|| Error::parse(*p, format!("bad rational `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if degree > 0 && coeffs[degree].is_zero() {
            return Err(Error::parse(degree + 1, "leading coefficient is zero"));
        }
        Ok(Polynomial::new(coeffs))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.degree());
        for c in &self.coeffs {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

/// Whitespace tokens with their index, skipping `#` comment lines.
pub(crate) fn tokens(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .enumerate()
        .map(|(i, t)| (i, t.to_string()))
        .collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(self.is_zero() && k == 0) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a} t")?,
                _ => write!(f, "{a} t^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let q = p.squarefree().normalize_abs();
        let mut chain = vec![q.clone()];
        let mut prev = q.clone();
        let mut cur = q.derivative().normalize_abs();
        while !cur.is_zero() {
            chain.push(cur.clone());
            let (_, r) = prev.div_rem(&cur);
            prev = cur;
            cur = (-&r).normalize_abs();
        }
        SturmChain { chain }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Sign changes along the chain at `x`, zeros dropped.
    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let v = p.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// An isolating interval for one real root.
///
/// Either a point `[r, r]` with `p(r) = 0`, or an open interval `(lo, hi)`
/// where `p(lo)` and `p(hi)` are nonzero and exactly one root lies inside.
/// `variations` holds the Sturm sign-change counts at the two endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub variations: (usize, usize),
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / int(2)))
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Isolates every distinct real root of `p` in `[lo, hi]` to intervals of
/// width at most `width`, returned in increasing order.
pub fn isolate_roots(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot isolate roots of the zero polynomial"));
    }
    if lo > hi {
        return Err(Error::invalid("interval lower end exceeds upper end"));
    }
    if !width.is_positive() {
        return Err(Error::invalid("isolation width must be positive"));
    }
    let chain = SturmChain::new(p);
    let q = chain.polynomial().clone();
    let mut out = Vec::new();
    if q.eval(lo).is_zero() {
        let v = chain.variations(lo);
        out.push(RootInterval {
            lo: lo.clone(),
            hi: lo.clone(),
            variations: (v, v),
        });
    }
    if lo == hi {
        return Ok(out);
    }
    let k = chain.count(lo, hi);
    if k > 0 {
        split(&chain, &q, lo.clone(), hi.clone(), k, width, &mut out);
    }
    Ok(out)
}

fn split(
    chain: &SturmChain,
    q: &Polynomial,
    a: Rational,
    b: Rational,
    k: usize,
    width: &Rational,
    out: &mut Vec<RootInterval>,
) {
    if k == 1 {
        out.push(refine(chain, q, a, b, width));
        return;
    }
    let m = (&a + &b) / int(2);
    let kl = chain.count(&a, &m);
    if kl > 0 {
        split(chain, q, a, m.clone(), kl, width, out);
    }
    if k > kl {
        split(chain, q, m, b, k - kl, width, out);
    }
}

/// Shrinks `(a, b]` holding exactly one root.
fn refine(chain: &SturmChain, q: &Polynomial, mut a: Rational, mut b: Rational, width: &Rational) -> RootInterval {
    let point = |r: Rational| {
        let v = chain.variations(&r);
        RootInterval {
            lo: r.clone(),
            hi: r,
            variations: (v, v),
        }
    };
    if q.eval(&b).is_zero() {
        return point(b);
    }
    loop {
        // `a` can only be a root when it is the left end of the search range
        if &b - &a <= *width && !q.eval(&a).is_zero() {
            let va = chain.variations(&a);
            let vb = chain.variations(&b);
            return RootInterval {
                lo: a,
                hi: b,
                variations: (va, vb),
            };
        }
        let m = (&a + &b) / int(2);
        if q.eval(&m).is_zero() {
            return point(m);
        }
        if chain.count(&a, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClaim {
    Nonpositive,
    Nonnegative,
    StrictlyDecreasing,
}

impl fmt::Display for SignClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignClaim::Nonpositive => "nonpositive",
            SignClaim::Nonnegative => "nonnegative",
            SignClaim::StrictlyDecreasing => "strictly-decreasing",
        })
    }
}

/// Proof that a polynomial has a given sign behaviour on `[lo, hi]`.
///
/// For sign claims the polynomial examined is `p` itself; for monotonicity it
/// is `p'`. Between consecutive isolated roots the examined polynomial has
/// constant sign, so checking one sample point per gap suffices.
#[derive(Clone, Debug)]
pub struct SignCertificate {
    pub lo: Rational,
    pub hi: Rational,
    pub claim: SignClaim,
    pub roots: Vec<RootInterval>,
    pub samples: Vec<Rational>,
}

/// Counterexample to a sign claim.
#[derive(Clone, Debug)]
pub struct SignFailure {
    pub claim: SignClaim,
    pub witness: Rational,
    /// Value at the witness of the polynomial that was examined.
    pub value: Rational,
}

impl fmt::Display for SignFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.claim {
            SignClaim::StrictlyDecreasing => "derivative",
            _ => "value",
        };
        write!(
            f,
            "{} claim fails at t = {:.12} ({what} {:.6e})",
            self.claim,
            to_f64(&self.witness),
            to_f64(&self.value)
        )
    }
}

fn gap_samples(lo: &Rational, hi: &Rational, roots: &[RootInterval]) -> Vec<Rational> {
    let mut samples = vec![lo.clone(), hi.clone()];
    let mut left = lo.clone();
    for r in roots {
        if r.lo > left {
            samples.push((&left + &r.lo) / int(2));
        }
        left = r.hi.clone();
    }
    if *hi > left {
        samples.push((&left + hi) / int(2));
    }
    samples
}

/// Checks `claim` for `p` on `[lo, hi]`, returning a certificate or a witness
/// point where it fails.
pub fn certify_sign(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
    claim: SignClaim,
) -> std::result::Result<SignCertificate, SignFailure> {
    assert!(lo <= hi, "certify_sign needs lo <= hi");
    let (target, want_nonpositive) = match claim {
        SignClaim::Nonpositive => (p.clone(), true),
        SignClaim::Nonnegative => (p.clone(), false),
        SignClaim::StrictlyDecreasing => {
            let d = p.derivative();
            if d.is_zero() {
                return Err(SignFailure {
                    claim,
                    witness: lo.clone(),
                    value: Rational::zero(),
                });
            }
            (d, true)
        }
    };
    let roots = if target.is_zero() {
        Vec::new()
    } else {
        isolate_roots(&target, lo, hi, &default_isolation_width())
            .expect("validated interval and nonzero polynomial")
    };
    let samples = gap_samples(lo, hi, &roots);
    for s in &samples {
        let v = target.eval(s);
        let bad = if want_nonpositive { v.is_positive() } else { v.is_negative() };
        if bad {
            return Err(SignFailure {
                claim,
                witness: s.clone(),
                value: v,
            });
        }
    }
    Ok(SignCertificate {
        lo: lo.clone(),
        hi: hi.clone(),
        claim,
        roots,
        samples,
    })
}

impl SignCertificate {
    /// Re-derives the certificate's facts independently of how it was built.
    pub fn verify(&self, p: &Polynomial) -> bool {
        let target = match self.claim {
            SignClaim::StrictlyDecreasing => p.derivative(),
            _ => p.clone(),
        };
        if target.is_zero() {
            return self.claim != SignClaim::StrictlyDecreasing;
        }
        let chain = SturmChain::new(&target);
        let q = chain.polynomial();
        let mut total = chain.count(&self.lo, &self.hi);
        if q.eval(&self.lo).is_zero() {
            total += 1;
        }
        if total != self.roots.len() {
            return false;
        }
        for r in &self.roots {
            if r.lo < self.lo || r.hi > self.hi {
                return false;
            }
            if r.is_exact() {
                if !q.eval(&r.lo).is_zero() {
                    return false;
                }
            } else if q.eval(&r.lo).is_zero() || q.eval(&r.hi).is_zero() || chain.count(&r.lo, &r.hi) != 1 {
                return false;
            }
        }
        let expected = gap_samples(&self.lo, &self.hi, &self.roots);
        if expected != self.samples {
            return false;
        }
        let nonpositive = self.claim != SignClaim::Nonnegative;
        self.samples.iter().all(|s| {
            let v = target.eval(s);
            if nonpositive {
                !v.is_positive()
            } else {
                !v.is_negative()
            }
        })
    }
}
