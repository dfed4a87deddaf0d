//! Gegenbauer polynomials `G_k^(n)` normalised by `G_k(1) = 1`, exact
//! expansion in that basis, the positive-definite class `G_n^+`, and the
//! certificate for the class of polynomials usable in the cap-refined bound.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyalg::{
    certify_sign, default_isolation_width, int, isolate_roots, parse_rational, rat, to_f64, tokens,
    Polynomial, Rational, RootInterval, SignCertificate, SignClaim, SignFailure,
};

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {n}")));
    }
    Ok(())
}

/// `G_0, ..., G_d` for dimension `n` via the three-term recurrence.
pub fn gegenbauer_basis(n: usize, d: usize) -> Result<Vec<Polynomial>> {
    check_dim(n)?;
    let mut out = vec![Polynomial::from_i64(&[1])];
    if d >= 1 {
        out.push(Polynomial::x());
    }
    let t = Polynomial::x();
    for k in 2..=d {
        let a = int((2 * k + n - 4) as i64);
        let b = int((k - 1) as i64);
        let denom = int((k + n - 3) as i64);
        let next = &(&t * &out[k - 1]).scale(&a) - &out[k - 2].scale(&b);
        out.push(next.scale(&(Rational::one() / denom)));
    }
    Ok(out)
}

pub fn gegenbauer_poly(n: usize, k: usize) -> Result<Polynomial> {
    Ok(gegenbauer_basis(n, k)?.pop().expect("basis is nonempty"))
}

/// Floating-point values `G_0(t), ..., G_d(t)` by the same recurrence.
pub fn gegenbauer_values(n: usize, d: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(1.0);
    if d >= 1 {
        out.push(t);
    }
    for k in 2..=d {
        let a = (2 * k + n - 4) as f64;
        let b = (k - 1) as f64;
        let denom = (k + n - 3) as f64;
        out.push((a * t * out[k - 1] - b * out[k - 2]) / denom);
    }
    out
}

/// `f = sum_k c_k G_k^(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GegenbauerExpansion {
    pub n: usize,
    pub coeffs: Vec<Rational>,
}

impl GegenbauerExpansion {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn c0(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// `f(1) = sum_k c_k` because every `G_k(1) = 1`.
    pub fn value_at_one(&self) -> Rational {
        self.coeffs.iter().sum()
    }

    pub fn reconstruct(&self) -> Polynomial {
        let basis = gegenbauer_basis(self.n, self.degree()).expect("validated dimension");
        basis
            .iter()
            .zip(&self.coeffs)
            .fold(Polynomial::zero(), |acc, (g, c)| &acc + &g.scale(c))
    }

    /// `n`, then the degree, then coefficients `c_0 .. c_d`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n{}\n", self.n, self.degree());
        for c in &self.coeffs {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let toks = tokens(text);
        let get_usize = |i: usize, what: &str| -> Result<usize> {
            let (p, t) = toks
                .get(i)
                .ok_or_else(|| Error::parse(i, format!("missing {what}")))?;
            t.parse()
                .map_err(|_| Error::parse(*p, format!("{what} `{t}` is not a nonnegative integer")))
        };
        let n = get_usize(0, "dimension")?;
        check_dim(n)?;
        let d = get_usize(1, "degree")?;
        if toks.len() != d + 3 {
            return Err(Error::parse(
                toks.len(),
                format!("expected {} coefficients, found {}", d + 1, toks.len().saturating_sub(2)),
            ));
        }
        let coeffs = toks[2..]
            .iter()
            .map(|(p, t)| parse_rational(t).ok_or_else(|| Error::parse(*p, format!("bad rational `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GegenbauerExpansion { n, coeffs })
    }
}

/// Exact expansion of `p` in the `G_k^(n)` basis by back-substitution from the
/// top degree.
pub fn expand(p: &Polynomial, n: usize) -> Result<GegenbauerExpansion> {
    let d = p.degree();
    let basis = gegenbauer_basis(n, d)?;
    let mut rem = p.clone();
    let mut coeffs = vec![Rational::zero(); d + 1];
    for k in (0..=d).rev() {
        let c = rem.coeff(k) / basis[k].leading();
        if !c.is_zero() {
            rem = &rem - &basis[k].scale(&c);
        }
        coeffs[k] = c;
    }
    debug_assert!(rem.is_zero());
    Ok(GegenbauerExpansion { n, coeffs })
}

/// Membership in `G_n^+`: `c_0 > 0` and `c_k >= 0` for every `k >= 1`.
#[derive(Clone, Debug)]
pub struct GnPlusCertificate {
    pub expansion: GegenbauerExpansion,
}

impl GnPlusCertificate {
    pub fn c0(&self) -> &Rational {
        self.expansion.c0()
    }
}

#[derive(Clone, Debug)]
pub struct GnPlusViolation {
    pub index: usize,
    pub value: Rational,
}

impl fmt::Display for GnPlusViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "c_0 = {} is not positive", self.value)
        } else {
            write!(f, "c_{} = {} is negative", self.index, self.value)
        }
    }
}

pub fn certify_gnplus(e: &GegenbauerExpansion) -> std::result::Result<GnPlusCertificate, GnPlusViolation> {
    if !e.c0().is_positive() {
        return Err(GnPlusViolation {
            index: 0,
            value: e.c0().clone(),
        });
    }
    if let Some((k, c)) = e.coeffs.iter().enumerate().skip(1).find(|(_, c)| c.is_negative()) {
        return Err(GnPlusViolation {
            index: k,
            value: c.clone(),
        });
    }
    Ok(GnPlusCertificate { expansion: e.clone() })
}

/// Certificate that `f` belongs to the class used by the cap-refined bound:
/// `f(t) <= 0` on `[-t0, z]` and `f` strictly decreasing on `[-1, -t0]`.
///
/// `t0` is the root of `f(-t)` closest to `-1`; it is known to lie in
/// `[t0_lo, t0_hi]`. `tau0` is a rational with `z < tau0 <= t0` and
/// `f(-tau0) < 0`; sign and monotonicity are certified around `-tau0`.
#[derive(Clone, Debug)]
pub struct PhiStarCertificate {
    pub z: Rational,
    pub t0_lo: Rational,
    pub t0_hi: Rational,
    pub tau0: Rational,
    pub f_at_minus_one: Rational,
    pub f_at_minus_tau0: Rational,
    pub nonpositive: SignCertificate,
    pub decreasing: SignCertificate,
}

impl PhiStarCertificate {
    pub fn t0_f64(&self) -> f64 {
        to_f64(&((&self.t0_lo + &self.t0_hi) / int(2)))
    }

    /// Upper bound for `theta0 = arccos t0`, in radians.
    pub fn theta0_upper(&self) -> f64 {
        to_f64(&self.tau0).clamp(-1.0, 1.0).acos() + 1e-12
    }
}

#[derive(Clone, Debug)]
pub enum PhiStarFailure {
    BadZ,
    NotPositiveAtMinusOne(Rational),
    NoRootBelowMinusZ,
    NotNonpositive(SignFailure),
    NotDecreasing(SignFailure),
}

impl fmt::Display for PhiStarFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiStarFailure::BadZ => write!(f, "z must satisfy 0 <= z < 1"),
            PhiStarFailure::NotPositiveAtMinusOne(v) => write!(f, "f(-1) = {} is not positive", v),
            PhiStarFailure::NoRootBelowMinusZ => write!(f, "f has no sign change on [-1, -z]"),
            PhiStarFailure::NotNonpositive(e) => write!(f, "f(t) <= 0 on [-t0, z]: {e}"),
            PhiStarFailure::NotDecreasing(e) => write!(f, "f decreasing on [-1, -t0]: {e}"),
        }
    }
}

pub fn certify_phi_star(p: &Polynomial, z: &Rational) -> std::result::Result<PhiStarCertificate, PhiStarFailure> {
    if z.is_negative() || *z >= Rational::one() {
        return Err(PhiStarFailure::BadZ);
    }
    let minus_one = -Rational::one();
    let f_m1 = p.eval(&minus_one);
    if !f_m1.is_positive() {
        return Err(PhiStarFailure::NotPositiveAtMinusOne(f_m1));
    }
    let neg_z = -z.clone();
    let roots = isolate_roots(p, &minus_one, &neg_z, &default_isolation_width())
        .map_err(|_| PhiStarFailure::NoRootBelowMinusZ)?;
    let first: &RootInterval = roots.first().ok_or(PhiStarFailure::NoRootBelowMinusZ)?;
    let (t0_lo, t0_hi) = (-first.hi.clone(), -first.lo.clone());

    // a point just right of the first root where f is already negative
    let minus_tau0 = if first.is_exact() {
        let next = roots.get(1).map(|r| r.lo.clone()).unwrap_or_else(|| neg_z.clone());
        let mut step = default_isolation_width();
        loop {
            let cand = &first.hi + &step;
            if cand < next && !p.eval(&cand).is_zero() {
                break cand;
            }
            step /= int(2);
        }
    } else {
        first.hi.clone()
    };
    let f_tau = p.eval(&minus_tau0);
    if !f_tau.is_negative() || minus_tau0 >= neg_z {
        return Err(PhiStarFailure::NotNonpositive(SignFailure {
            claim: SignClaim::Nonpositive,
            witness: minus_tau0.clone(),
            value: f_tau,
        }));
    }
    let nonpositive =
        certify_sign(p, &minus_tau0, z, SignClaim::Nonpositive).map_err(PhiStarFailure::NotNonpositive)?;
    let decreasing = certify_sign(p, &minus_one, &minus_tau0, SignClaim::StrictlyDecreasing)
        .map_err(PhiStarFailure::NotDecreasing)?;
    Ok(PhiStarCertificate {
        z: z.clone(),
        t0_lo,
        t0_hi,
        tau0: -minus_tau0,
        f_at_minus_one: f_m1,
        f_at_minus_tau0: f_tau,
        nonpositive,
        decreasing,
    })
}

/// Moment `∫ t^j (1 - t^2)^((n-3)/2) dt`, normalised so the zeroth is 1.
pub fn weight_moment(n: usize, j: usize) -> Rational {
    if j % 2 == 1 {
        return Rational::zero();
    }
    let mut m = Rational::one();
    for i in 0..j / 2 {
        m *= rat((2 * i + 1) as i64, (2 * i + n) as i64);
    }
    m
}

/// Inner product of two polynomials against the normalised weight.
pub fn weighted_inner(n: usize, p: &Polynomial, q: &Polynomial) -> Rational {
    let prod = p * q;
    prod.coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c * weight_moment(n, j))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_degree_examples() {
        // n = 3 gives Legendre polynomials
        let p2 = gegenbauer_poly(3, 2).unwrap();
        assert_eq!(p2, Polynomial::new(vec![rat(-1, 2), int(0), rat(3, 2)]));
        // n = 4: G_2 = (4t^2 - 1)/3
        let g2 = gegenbauer_poly(4, 2).unwrap();
        assert_eq!(g2, Polynomial::new(vec![rat(-1, 3), int(0), rat(4, 3)]));
        // n = 2: Chebyshev, G_3 = 4t^3 - 3t
        assert_eq!(gegenbauer_poly(2, 3).unwrap(), Polynomial::from_i64(&[0, -3, 0, 4]));
        assert!(gegenbauer_poly(1, 2).is_err());
    }

    #[test]
    fn numeric_values_match_exact() {
        for n in 2..8 {
            let basis = gegenbauer_basis(n, 10).unwrap();
            let vals = gegenbauer_values(n, 10, 0.3);
            for (g, v) in basis.iter().zip(&vals) {
                assert!((g.eval_f64(0.3) - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthogonality_with_exact_moments() {
        for n in 2..7 {
            let basis = gegenbauer_basis(n, 8).unwrap();
            for j in 0..basis.len() {
                for k in 0..j {
                    assert!(weighted_inner(n, &basis[j], &basis[k]).is_zero(), "n={n} j={j} k={k}");
                }
                assert!(weighted_inner(n, &basis[j], &basis[j]).is_positive());
            }
        }
    }

    #[test]
    fn gnplus_violations() {
        let e = GegenbauerExpansion { n: 4, coeffs: vec![int(1), int(2), rat(-1, 5)] };
        let v = certify_gnplus(&e).unwrap_err();
        assert_eq!(v.index, 2);
        let e0 = GegenbauerExpansion { n: 4, coeffs: vec![int(0), int(1)] };
        assert_eq!(certify_gnplus(&e0).unwrap_err().index, 0);
    }

    #[test]
    fn phi_star_rejects_increasing() {
        let p = Polynomial::x();
        assert!(matches!(
            certify_phi_star(&p, &rat(1, 2)),
            Err(PhiStarFailure::NotPositiveAtMinusOne(_))
        ));
    }

    #[test]
    fn phi_star_simple_quadratic() {
        // (t + 3/5)(t - 1/2): positive at -1, zero at -3/5, nonpositive up to 1/2
        let p = &Polynomial::new(vec![rat(3, 5), int(1)]) * &Polynomial::new(vec![rat(-1, 2), int(1)]);
        let cert = certify_phi_star(&p, &rat(1, 2)).unwrap();
        assert!(cert.t0_lo <= rat(3, 5) && rat(3, 5) <= cert.t0_hi);
        assert!(cert.tau0 <= rat(3, 5) && cert.tau0 > rat(1, 2));
        assert!(cert.nonpositive.verify(&p));
        assert!(cert.decreasing.verify(&p));
    }

    fn coeff_strategy() -> impl Strategy<Value = Rational> {
        (-30i64..=30, 1i64..=9).prop_map(|(a, b)| rat(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn expansion_round_trips(n in 2usize..9, cs in proptest::collection::vec(coeff_strategy(), 1..11)) {
            let p = Polynomial::new(cs);
            let e = expand(&p, n).unwrap();
            prop_assert_eq!(e.reconstruct(), p.clone());
            prop_assert_eq!(e.value_at_one(), p.eval(&int(1)));
            let back = GegenbauerExpansion::parse_text(&e.to_text()).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
