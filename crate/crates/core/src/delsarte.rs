//! The classical Delsarte bound, the sum functional `S(X)`, point sets as
//! Gram matrices and a couple of well-known codes as fixtures.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::gegenbauer::{certify_gnplus, expand, GnPlusCertificate};
use crate::polyalg::{certify_sign, int, to_f64, tokens, Polynomial, Rational, SignCertificate, SignClaim};

/// Spherical codes in `S^(n-1)` with pairwise inner products at most `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeProblem {
    pub n: usize,
    pub z: Rational,
}

impl CodeProblem {
    pub fn new(n: usize, z: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("dimension must be at least 2, got {n}")));
        }
        if z.is_negative() || z >= Rational::one() {
            return Err(Error::invalid(format!("z must lie in [0, 1), got {z}")));
        }
        Ok(CodeProblem { n, z })
    }

    /// Kissing configurations: minimal angular separation 60 degrees.
    pub fn kissing(n: usize) -> Result<Self> {
        Self::new(n, Rational::new(1.into(), 2.into()))
    }

    pub fn z_f64(&self) -> f64 {
        to_f64(&self.z)
    }

    /// Minimal angular distance `psi = arccos z`.
    pub fn psi(&self) -> f64 {
        self.z_f64().acos()
    }
}

const GRAM_TOL: f64 = 1e-9;

/// Finite set of unit vectors described by its Gram matrix.
#[derive(Clone, Debug)]
pub struct PointSet {
    gram: DMatrix<f64>,
    dim: usize,
}

impl PointSet {
    /// Validates symmetry, unit diagonal, positive semidefiniteness and rank
    /// at most `dim`.
    pub fn new(gram: DMatrix<f64>, dim: usize) -> Result<Self> {
        let m = gram.nrows();
        if gram.ncols() != m {
            return Err(Error::invalid("Gram matrix is not square"));
        }
        for i in 0..m {
            if (gram[(i, i)] - 1.0).abs() > GRAM_TOL {
                return Err(Error::invalid(format!("diagonal entry {i} is {}, not 1", gram[(i, i)])));
            }
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > GRAM_TOL {
                    return Err(Error::invalid(format!("Gram matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if m > 0 {
            let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
            let scale = m as f64;
            if eig.iter().any(|&l| l < -GRAM_TOL * scale) {
                return Err(Error::invalid("Gram matrix is not positive semidefinite"));
            }
            let rank = eig.iter().filter(|&&l| l > GRAM_TOL * scale).count();
            if rank > dim {
                return Err(Error::invalid(format!("Gram matrix has rank {rank} > {dim}")));
            }
        }
        Ok(PointSet { gram, dim })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points have different dimensions"));
        }
        let m = points.len();
        let gram = DMatrix::from_fn(m, m, |i, j| points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum());
        Self::new(gram, dim)
    }

    pub fn len(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Largest inner product between distinct points.
    pub fn max_inner(&self) -> f64 {
        let m = self.len();
        (0..m)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| self.gram[(i, j)])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_code(&self, z: f64) -> bool {
        self.max_inner() <= z + GRAM_TOL
    }

    /// `M n` followed by `M` rows of `n` coordinates; rows are normalised.
    pub fn parse_text(text: &str) -> Result<Self> {
        let toks = tokens(text);
        let head = |i: usize| -> Result<usize> {
            let (p, t) = toks.get(i).ok_or_else(|| Error::parse(i, "missing point-set header"))?;
            t.parse().map_err(|_| Error::parse(*p, format!("`{t}` is not a count")))
        };
        let (m, n) = (head(0)?, head(1)?);
        if toks.len() != 2 + m * n {
            return Err(Error::parse(toks.len(), format!("expected {} coordinates, found {}", m * n, toks.len() - 2)));
        }
        let vals = toks[2..]
            .iter()
            .map(|(p, t)| t.parse::<f64>().map_err(|_| Error::parse(*p, format!("bad coordinate `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let mut points = Vec::with_capacity(m);
        for row in vals.chunks(n.max(1)).take(m) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::invalid("zero vector in point set"));
            }
            points.push(row.iter().map(|x| x / norm).collect::<Vec<_>>());
        }
        Self::from_points(&points)
    }
}

/// `S(X) = sum_{i,j} f(<x_i, x_j>)`, diagonal included.
pub fn sum_functional(f: &Polynomial, x: &PointSet) -> f64 {
    let c = f.to_f64_coeffs();
    let eval = |t: f64| c.iter().rev().fold(0.0, |acc, a| acc * t + a);
    x.gram.iter().map(|&t| eval(t)).sum()
}

#[derive(Clone, Debug)]
pub struct DelsarteBound {
    /// `f(1) / c_0`.
    pub exact: Rational,
    pub gnplus: GnPlusCertificate,
    pub nonpositive: SignCertificate,
}

impl DelsarteBound {
    pub fn value(&self) -> f64 {
        to_f64(&self.exact)
    }
}

/// Classical bound `|C| <= f(1)/c_0` for `f` in `G_n^+` with `f <= 0` on `[-1, z]`.
pub fn delsarte_bound(f: &Polynomial, problem: &CodeProblem) -> Result<DelsarteBound> {
    let e = expand(f, problem.n)?;
    let gnplus = certify_gnplus(&e).map_err(|v| Error::failed("certify_gnplus", v.to_string()))?;
    let nonpositive = certify_sign(f, &-int(1), &problem.z, SignClaim::Nonpositive)
        .map_err(|w| Error::failed("certify_sign", w.to_string()))?;
    Ok(DelsarteBound {
        exact: f.eval(&int(1)) / gnplus.c0(),
        gnplus,
        nonpositive,
    })
}

pub mod fixtures {
    use super::*;

    /// Minimal vectors of the D4 lattice: all permutations of `(±1, ±1, 0, 0)`,
    /// normalised. Every pair is at angle at least 60 degrees.
    pub fn twenty_four_cell() -> PointSet {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut pts = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                for (a, b) in [(s, s), (s, -s), (-s, s), (-s, -s)] {
                    let mut v = vec![0.0; 4];
                    v[i] = a;
                    v[j] = b;
                    pts.push(v);
                }
            }
        }
        PointSet::from_points(&pts).expect("valid fixture")
    }

    /// Vertices of the regular icosahedron, a 12-point kissing configuration in 3D.
    pub fn icosahedron() -> PointSet {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let norm = (1.0 + phi * phi).sqrt();
        let mut pts = Vec::new();
        for a in [1.0, -1.0] {
            for b in [phi, -phi] {
                pts.push(vec![0.0, a / norm, b / norm]);
                pts.push(vec![a / norm, b / norm, 0.0]);
                pts.push(vec![b / norm, 0.0, a / norm]);
            }
        }
        PointSet::from_points(&pts).expect("valid fixture")
    }
}
