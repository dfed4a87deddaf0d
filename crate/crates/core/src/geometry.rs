//! Spherical configurations described by Gram matrices, distance solvers
//! relative to a facet, minimisation of distances over intersections of caps,
//! and projection bounds on the number of code points in a cap.
//!
//! Nothing here uses coordinates: every quantity is derived from inner
//! products, so a configuration in `S^(n-1)` is a Gram matrix of rank at most
//! `n` together with `n - 1` facet points spanning a hyperplane `H`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::polyalg::{to_f64, Rational};

/// Largest facet handled by the fixed-size cap solver (configurations in `S^4`).
pub const MAX_FACET: usize = 4;
const MAX_SUBSETS: usize = 1 << MAX_FACET;

pub const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_TOL: f64 = 1e-12;

/// Points of `S^(n-1)` given by their Gram matrix, with a distinguished facet.
///
/// The facet points span a hyperplane through the origin. Every other point
/// `y_k` decomposes as `sum_i w_ki y_i + gamma_k nu` with `nu` the unit normal;
/// the normal is oriented so that the first point off the hyperplane has
/// `gamma > 0`, which defines the half-space `H_+`.
#[derive(Clone, Debug)]
pub struct GramConfiguration {
    gram: DMatrix<f64>,
    facet: Vec<usize>,
    n: usize,
    facet_inv: DMatrix<f64>,
    gamma: Vec<f64>,
    solver: CapSolver,
}

impl GramConfiguration {
    pub fn new(gram: DMatrix<f64>, facet: Vec<usize>, n: usize) -> Result<Self> {
        let m = gram.nrows();
        if gram.ncols() != m {
            return Err(Error::invalid("Gram matrix is not square"));
        }
        if n < 2 || facet.len() != n - 1 || facet.len() > MAX_FACET {
            return Err(Error::invalid(format!(
                "facet must have n - 1 points with n - 1 <= {MAX_FACET}, got {} for n = {n}",
                facet.len()
            )));
        }
        let mut seen = vec![false; m];
        for &i in &facet {
            if i >= m || seen[i] {
                return Err(Error::invalid("facet indices must be distinct and in range"));
            }
            seen[i] = true;
        }
        for i in 0..m {
            if (gram[(i, i)] - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-9 {
                    return Err(Error::invalid("Gram matrix is not symmetric"));
                }
            }
        }
        let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
        if eig.iter().any(|&l| l < -1e-8) {
            return Err(Error::invalid("Gram matrix is not positive semidefinite"));
        }
        if eig.iter().filter(|&&l| l > 1e-8).count() > n {
            return Err(Error::invalid(format!("Gram matrix has rank above {n}")));
        }
        let f = DMatrix::from_fn(n - 1, n - 1, |i, j| gram[(facet[i], facet[j])]);
        let solver = CapSolver::new(&f)?;
        let facet_inv = f.clone().try_inverse().ok_or_else(|| Error::DegenerateFacet("singular facet Gram".into()))?;
        let inner = |k: usize| nalgebra::DVector::from_fn(n - 1, |i, _| gram[(k, facet[i])]);
        let mut gamma = vec![0.0; m];
        let mut reference: Option<(usize, f64)> = None;
        for k in 0..m {
            if seen[k] {
                continue;
            }
            let g = inner(k);
            let w = &facet_inv * &g;
            let g2 = 1.0 - g.dot(&w);
            gamma[k] = match reference {
                None if g2 > DEGENERATE_TOL => {
                    let r = g2.sqrt();
                    reference = Some((k, r));
                    r
                }
                None => 0.0,
                Some((r, gr)) => {
                    let wr = &facet_inv * inner(r);
                    (gram[(k, r)] - g.dot(&wr)) / gr
                }
            };
        }
        Ok(GramConfiguration {
            gram,
            facet,
            n,
            facet_inv,
            gamma,
            solver,
        })
    }

    /// `m` points with all pairwise inner products `z`, the first `m - 1` as
    /// facet, viewed in `S^(m-1)`.
    pub fn regular_simplex(m: usize, z: f64) -> Result<Self> {
        let gram = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { z });
        Self::new(gram, (0..m - 1).collect(), m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn facet(&self) -> &[usize] {
        &self.facet
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.gram[(i, j)]
    }

    /// Signed normal component of point `k`; positive means `H_+`.
    pub fn normal_component(&self, k: usize) -> f64 {
        self.gamma[k]
    }

    fn facet_inner(&self, k: usize) -> Vec<f64> {
        self.facet.iter().map(|&i| self.gram[(k, i)]).collect()
    }

    /// The point of `H_+` at distances `thetas` from the facet points, as
    /// facet coefficients and normal component; `None` when no such point exists.
    pub fn vertex(&self, thetas: &[f64]) -> Option<(Vec<f64>, f64)> {
        assert_eq!(thetas.len(), self.n - 1);
        let c = nalgebra::DVector::from_iterator(self.n - 1, thetas.iter().map(|t| t.cos()));
        let lambda = &self.facet_inv * &c;
        let beta2 = 1.0 - c.dot(&lambda);
        if beta2 < -1e-12 {
            return None;
        }
        Some((lambda.iter().copied().collect(), beta2.max(0.0).sqrt()))
    }

    /// Distance from the `H_+` point at distances `thetas` from the facet to
    /// point `k`, or `None` if those distances are not realisable.
    pub fn solve_theta(&self, thetas: &[f64], k: usize) -> Option<f64> {
        let (lambda, beta) = self.vertex(thetas)?;
        let g = self.facet_inner(k);
        let cos = lambda.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() + beta * self.gamma[k];
        Some(cos.clamp(-1.0, 1.0).acos())
    }

    pub fn cap_solver(&self) -> &CapSolver {
        &self.solver
    }

    pub fn target(&self, k: usize) -> CapTarget {
        self.solver.target(&self.facet_inner(k))
    }
}

/// Radii `a_i` of closed caps around the facet points.
#[derive(Clone, Debug, PartialEq)]
pub struct CapDomain {
    pub a: Vec<f64>,
}

impl CapDomain {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite() || *x <= 0.0 || *x >= PI) {
            return Err(Error::EmptyDomain);
        }
        Ok(CapDomain { a })
    }
}

/// `min dist(y, y_k)` over `y` in the intersection of the caps `Cap(y_i, a_i)`.
///
/// The intersection is taken on both sides of the facet hyperplane. Reflecting
/// through the hyperplane keeps facet distances and brings points closer to
/// `y_k`, so this equals the minimum over the half on the side of `y_k`.
pub fn min_theta_on_domain(config: &GramConfiguration, a: &CapDomain, k: usize) -> Result<f64> {
    if a.a.len() != config.n - 1 {
        return Err(Error::invalid("cap domain needs one radius per facet point"));
    }
    let cell = config.solver.cell(&a.a);
    let target = config.target(k);
    config
        .solver
        .max_cos(&cell, &target)
        .map(|c| c.clamp(-1.0, 1.0).acos())
        .ok_or(Error::EmptyDomain)
}

/// Precomputed inverse Gram matrices of all subsets of the facet.
///
/// For an active set `sigma`, points with `y . y_i = c_i` (`i` in `sigma`) lying
/// in the span of those facet points and the target `q` form a round sphere;
/// the linear function `y . q` is maximised on it at a single point, which is
/// the only candidate for a local minimiser of the distance to `q` on that face.
#[derive(Clone, Debug)]
pub struct CapSolver {
    s: usize,
    gram: [[f64; MAX_FACET]; MAX_FACET],
    subsets: Vec<Subset>,
}

#[derive(Clone, Debug)]
struct Subset {
    members: Vec<usize>,
    outside: Vec<usize>,
    /// Row-major inverse of the members' Gram matrix.
    inv: [[f64; MAX_FACET]; MAX_FACET],
}

/// Target-dependent data: `v = G_sigma^-1 g_sigma` and friends for each subset.
#[derive(Clone, Debug)]
pub struct CapTarget {
    g: [f64; MAX_FACET],
    v: Vec<[f64; MAX_FACET]>,
    residual: Vec<f64>,
    /// `G_{sigma,j} . v` for each outside index `j`.
    cross_v: Vec<[f64; MAX_FACET]>,
}

/// Radius-dependent data: `u = G_sigma^-1 c_sigma` and friends for each subset.
#[derive(Clone, Debug)]
pub struct CapCell {
    c: [f64; MAX_FACET],
    u: [[f64; MAX_FACET]; MAX_SUBSETS],
    cu: [f64; MAX_SUBSETS],
    cross_u: [[f64; MAX_FACET]; MAX_SUBSETS],
}

impl CapSolver {
    pub fn new(facet_gram: &DMatrix<f64>) -> Result<Self> {
        let s = facet_gram.nrows();
        if s == 0 || s > MAX_FACET {
            return Err(Error::invalid(format!("facet size must be in 1..={MAX_FACET}")));
        }
        let eig = SymmetricEigen::new(facet_gram.clone()).eigenvalues;
        if eig.iter().any(|&l| l < 1e-10) {
            return Err(Error::DegenerateFacet(format!(
                "facet Gram matrix has eigenvalue {:.3e}",
                eig.iter().copied().fold(f64::INFINITY, f64::min)
            )));
        }
        let mut gram = [[0.0; MAX_FACET]; MAX_FACET];
        for i in 0..s {
            for j in 0..s {
                gram[i][j] = facet_gram[(i, j)];
            }
        }
        let mut subsets = Vec::new();
        for mask in 1u32..(1 << s) {
            let members: Vec<usize> = (0..s).filter(|i| mask & (1 << i) != 0).collect();
            let outside: Vec<usize> = (0..s).filter(|i| mask & (1 << i) == 0).collect();
            let sub = DMatrix::from_fn(members.len(), members.len(), |a, b| gram[members[a]][members[b]]);
            let inv_m = sub.try_inverse().ok_or_else(|| Error::DegenerateFacet("singular facet subset".into()))?;
            let mut inv = [[0.0; MAX_FACET]; MAX_FACET];
            for a in 0..members.len() {
                for b in 0..members.len() {
                    inv[a][b] = inv_m[(a, b)];
                }
            }
            subsets.push(Subset { members, outside, inv });
        }
        Ok(CapSolver { s, gram, subsets })
    }

    pub fn facet_size(&self) -> usize {
        self.s
    }

    /// Target given by its inner products with the facet points (assumed unit).
    pub fn target(&self, g_in: &[f64]) -> CapTarget {
        let mut g = [0.0; MAX_FACET];
        g[..self.s].copy_from_slice(&g_in[..self.s]);
        let mut v = Vec::with_capacity(self.subsets.len());
        let mut residual = Vec::with_capacity(self.subsets.len());
        let mut cross_v = Vec::with_capacity(self.subsets.len());
        for sub in &self.subsets {
            let k = sub.members.len();
            let mut vs = [0.0; MAX_FACET];
            for a in 0..k {
                vs[a] = (0..k).map(|b| sub.inv[a][b] * g[sub.members[b]]).sum();
            }
            let gv: f64 = (0..k).map(|a| g[sub.members[a]] * vs[a]).sum();
            let mut cv = [0.0; MAX_FACET];
            for (slot, &j) in sub.outside.iter().enumerate() {
                cv[slot] = (0..k).map(|a| self.gram[sub.members[a]][j] * vs[a]).sum();
            }
            v.push(vs);
            residual.push(1.0 - gv);
            cross_v.push(cv);
        }
        CapTarget {
            g,
            v,
            residual,
            cross_v,
        }
    }

    pub fn cell(&self, a: &[f64]) -> CapCell {
        let mut c = [0.0; MAX_FACET];
        for i in 0..self.s {
            c[i] = a[i].cos();
        }
        let mut u = [[0.0; MAX_FACET]; MAX_SUBSETS];
        let mut cu = [0.0; MAX_SUBSETS];
        let mut cross_u = [[0.0; MAX_FACET]; MAX_SUBSETS];
        for (idx, sub) in self.subsets.iter().enumerate() {
            let k = sub.members.len();
            for r in 0..k {
                u[idx][r] = (0..k).map(|b| sub.inv[r][b] * c[sub.members[b]]).sum();
            }
            cu[idx] = (0..k).map(|r| c[sub.members[r]] * u[idx][r]).sum();
            for (slot, &j) in sub.outside.iter().enumerate() {
                cross_u[idx][slot] = (0..k).map(|r| self.gram[sub.members[r]][j] * u[idx][r]).sum();
            }
        }
        CapCell { c, u, cu, cross_u }
    }

    /// Largest `y . q` over the cap intersection, or `None` if it is empty.
    pub fn max_cos(&self, cell: &CapCell, target: &CapTarget) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut keep = |x: f64| best = Some(best.map_or(x, |b: f64| b.max(x)));
        // the target itself, if it lies in every cap
        if (0..self.s).all(|i| target.g[i] >= cell.c[i] - FEAS_TOL) {
            return Some(1.0);
        }
        for (idx, sub) in self.subsets.iter().enumerate() {
            let rhs = 1.0 - cell.cu[idx];
            if rhs < -FEAS_TOL {
                continue;
            }
            let k = sub.members.len();
            let cv: f64 = (0..k).map(|r| cell.c[sub.members[r]] * target.v[idx][r]).sum();
            let den = target.residual[idx];
            if den <= DEGENERATE_TOL {
                keep(cv);
                continue;
            }
            let t = (rhs.max(0.0) / den).sqrt();
            let full = k == self.s;
            for sign in [1.0, -1.0] {
                let ts = sign * t;
                let feasible = sub.outside.iter().enumerate().all(|(slot, &j)| {
                    let yj = cell.cross_u[idx][slot] - ts * target.cross_v[idx][slot] + ts * target.g[j];
                    yj >= cell.c[j] - FEAS_TOL
                });
                if feasible {
                    keep(cv + ts * den);
                }
                // on a zero-dimensional sphere both points are candidates
                if !full {
                    break;
                }
            }
        }
        best
    }

    /// Inverse of the full facet Gram matrix.
    pub fn facet_inverse(&self) -> &[[f64; MAX_FACET]; MAX_FACET] {
        &self.subsets[self.subsets.len() - 1].inv
    }

    /// Largest `y . q` over unit `y` with `y . y_i` between `cos hi_i` and
    /// `cos lo_i`, on either side of the facet hyperplane.
    ///
    /// Writing `y = sum c_j (G^-1)_ji y_i + beta nu`, `y . q = w . c + beta gamma`
    /// with `|beta| <= sqrt(1 - c^T G^-1 c)`. The linear part is maximised at a
    /// corner and the quadratic form bounded below by its tangent plane at the
    /// box centre.
    pub fn shell_max_cos(&self, lo: &[f64], hi: &[f64], target: &CapTarget) -> Option<f64> {
        let full = self.subsets.len() - 1;
        let inv = &self.subsets[full].inv;
        let w = &target.v[full];
        let gamma = target.residual[full].max(0.0).sqrt();
        let s = self.s;
        let mut mid = [0.0; MAX_FACET];
        let mut half = [0.0; MAX_FACET];
        let mut lin = 0.0;
        for i in 0..s {
            let (a, b) = (hi[i].cos(), lo[i].cos());
            mid[i] = 0.5 * (a + b);
            half[i] = 0.5 * (b - a).abs();
            lin += (w[i] * a).max(w[i] * b);
        }
        let mut q = 0.0;
        let mut slack = 0.0;
        for i in 0..s {
            let row: f64 = (0..s).map(|j| inv[i][j] * mid[j]).sum();
            q += mid[i] * row;
            slack += 2.0 * row.abs() * half[i];
        }
        let qmin = q - slack;
        if qmin > 1.0 + FEAS_TOL {
            return None;
        }
        Some(lin + gamma * (1.0 - qmin).max(0.0).sqrt())
    }
}

impl CapTarget {
    /// `G^-1 g`: coordinates of the target's projection onto the facet span
    /// in the facet basis.
    pub fn facet_coords(&self) -> &[f64; MAX_FACET] {
        self.v.last().expect("at least one subset")
    }

    /// Length of the target's component orthogonal to the facet span.
    pub fn normal_length(&self) -> f64 {
        self.residual.last().expect("at least one subset").max(0.0).sqrt()
    }
}

impl CapCell {
    pub fn u(&self, subset: usize) -> &[f64] {
        &self.u[subset]
    }
}

/// `cos Theta_3` for the regular triangle of edge `pi/3`, from the closed form.
pub fn theta3_explicit(t1: f64, t2: f64) -> Result<f64> {
    let (c1, c2) = (t1.cos(), t2.cos());
    let rad = 6.0 - 8.0 * (c1 * c2 + (c2 - c1).powi(2));
    if rad < -1e-12 {
        return Err(Error::InfeasibleDistances);
    }
    let c = (c1 + c2 + rad.max(0.0).sqrt()) / 3.0;
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// `Theta_4` for the regular tetrahedron of edge `pi/3`, from the closed form.
pub fn theta4_explicit(t1: f64, t2: f64, t3: f64) -> Result<f64> {
    let (c1, c2, c3) = (t1.cos(), t2.cos(), t3.cos());
    let rad = 1.0 + c1 * c2 + c1 * c3 + c2 * c3 - 1.5 * (c1 * c1 + c2 * c2 + c3 * c3);
    if rad < -1e-12 {
        return Err(Error::InfeasibleDistances);
    }
    let c = (c1 + c2 + c3 + 10f64.sqrt() * rad.max(0.0).sqrt()) / 4.0;
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Roots of the quadratic `det(x)` through its values at `-1, 0, 1`.
fn quadratic_roots(d_m1: f64, d_0: f64, d_1: f64) -> Option<(f64, f64)> {
    let a = (d_1 + d_m1) / 2.0 - d_0;
    let b = (d_1 - d_m1) / 2.0;
    let c = d_0;
    if a.abs() < 1e-15 {
        if b.abs() < 1e-15 {
            return None;
        }
        let r = -c / b;
        return Some((r, r));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 {
        return None;
    }
    let s = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let (r1, r2) = if q.abs() < 1e-300 { (0.0, 0.0) } else { (q / a, c / q) };
    Some((r1.min(r2), r1.max(r2)))
}

fn det_with(mut g: DMatrix<f64>, (i, j): (usize, usize), x: f64) -> f64 {
    g[(i, j)] = x;
    g[(j, i)] = x;
    g.determinant()
}

/// Fills the free entry `(i, j)` so that the Gram matrix is singular, picking
/// the root that is not the degenerate `y_i = y_j` solution and is at most `cap`.
fn close_gram(g: DMatrix<f64>, pair: (usize, usize), cap: f64) -> Result<(DMatrix<f64>, f64)> {
    let (r1, r2) = quadratic_roots(
        det_with(g.clone(), pair, -1.0),
        det_with(g.clone(), pair, 0.0),
        det_with(g.clone(), pair, 1.0),
    )
    .ok_or(Error::InfeasibleDistances)?;
    let x = [r1, r2]
        .into_iter()
        .filter(|r| *r <= cap + 1e-12 && *r >= -1.0 - 1e-12 && (1.0 - r).abs() > 1e-9)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
        .ok_or(Error::InfeasibleDistances)?;
    let x = x.clamp(-1.0, 1.0);
    let mut out = g;
    out[(pair.0, pair.1)] = x;
    out[(pair.1, pair.0)] = x;
    Ok((out, x))
}

/// `psi' = arccos(2z - 1)`, the largest diagonal of the five-point family.
pub fn p5_alpha_max(z: f64) -> f64 {
    (2.0 * z - 1.0).clamp(-1.0, 1.0).acos()
}

/// Five points in `S^3` with the edge pattern 12, 13, 14, 15, 23, 25, 34, 45 at
/// inner product `z` and `y2 . y4 = cos alpha`; `y3 . y5` closes the Gram
/// matrix to rank 4. Facet is `{y1, y2, y3}`; indices are zero-based.
pub fn build_p5(alpha: f64, z: &Rational) -> Result<GramConfiguration> {
    let zf = to_f64(z);
    check_z(z)?;
    let psi = zf.acos();
    let amax = p5_alpha_max(zf);
    if !(alpha >= psi - 1e-12 && alpha <= amax + 1e-12) {
        return Err(Error::invalid(format!(
            "alpha = {:.6} deg outside [{:.6}, {:.6}] deg",
            alpha.to_degrees(),
            psi.to_degrees(),
            amax.to_degrees()
        )));
    }
    let (g, _) = p5_gram(alpha, zf)?;
    GramConfiguration::new(g, vec![0, 1, 2], 4)
}

pub(crate) fn p5_gram(alpha: f64, z: f64) -> Result<(DMatrix<f64>, f64)> {
    let mut g = DMatrix::<f64>::identity(5, 5);
    for (i, j) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3), (3, 4)] {
        g[(i, j)] = z;
        g[(j, i)] = z;
    }
    g[(1, 3)] = alpha.cos();
    g[(3, 1)] = alpha.cos();
    close_gram(g, (2, 4), alpha.cos())
}

/// Rhomb in `S^2` with sides at inner product `z`, diagonal `y2 . y4 = cos alpha`
/// and `y1 . y3` closing the Gram matrix to rank 3. Facet is `{y1, y2}`.
pub fn build_rhomb(alpha: f64, z: &Rational) -> Result<GramConfiguration> {
    check_z(z)?;
    let zf = to_f64(z);
    let (lo, hi) = (zf.acos(), rhomb_alpha_max(zf));
    if !(alpha >= lo - 1e-12 && alpha <= hi + 1e-9) {
        return Err(Error::invalid(format!(
            "alpha = {:.6} deg outside [{:.6}, {:.6}] deg",
            alpha.to_degrees(),
            lo.to_degrees(),
            hi.to_degrees()
        )));
    }
    let (g, _) = rhomb_gram(alpha, zf)?;
    GramConfiguration::new(g, vec![0, 1], 3)
}

pub(crate) fn rhomb_gram(alpha: f64, z: f64) -> Result<(DMatrix<f64>, f64)> {
    let mut g = DMatrix::<f64>::identity(4, 4);
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        g[(i, j)] = z;
        g[(j, i)] = z;
    }
    g[(1, 3)] = alpha.cos();
    g[(3, 1)] = alpha.cos();
    close_gram(g, (0, 2), 1.0 - 1e-9)
}

/// Diagonal at which the rhomb is a square: both diagonals equal.
pub fn rhomb_alpha_max(z: f64) -> f64 {
    let f = |a: f64| rhomb_gram(a, z).map(|(_, x)| x - a.cos()).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (z.acos(), PI - 1e-9);
    // f(lo) < 0: the other diagonal is longer at the equilateral end
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.is_nan() || v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn check_z(z: &Rational) -> Result<()> {
    if z.is_negative() || *z >= Rational::one() {
        return Err(Error::invalid("z must lie in [0, 1)"));
    }
    Ok(())
}

/// Minimal angular separation `phi_3(M)` of `M` points on `S^2` for `M <= 7`.
fn phi3_cos(m: usize) -> f64 {
    match m {
        2 => -1.0,
        3 => -0.5,
        4 => -1.0 / 3.0,
        5 | 6 => 0.0,
        7 => (1.0 / 40f64.to_radians().tan()) * (1.0 / 80f64.to_radians().tan()),
        _ => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuBound {
    pub n: usize,
    pub z: Rational,
    pub t0: Rational,
    /// `None` when at most one point fits and no projection is needed.
    pub delta: Option<f64>,
    pub mu_star: usize,
}

/// Upper bound on the size of a `psi`-code inside `Cap(e0, theta0)`.
pub fn mu_bound(n: usize, z: &Rational, t0: &Rational) -> Result<MuBound> {
    check_z(z)?;
    if !(t0 > z && *t0 < Rational::one()) {
        return Err(Error::invalid("need z < t0 < 1"));
    }
    let one = Rational::one();
    let two = &one + &one;
    let t2 = t0 * t0;
    if &two * &t2 > z + &one {
        return Ok(MuBound { n, z: z.clone(), t0: t0.clone(), delta: None, mu_star: 1 });
    }
    let cos_delta = (z - &t2) / (&one - &t2);
    let cd = to_f64(&cos_delta);
    let delta = cd.clamp(-1.0, 1.0).acos();
    let mu_star = match n {
        2 => 2,
        3 => ((2.0 * PI) / delta).floor() as usize,
        4 => (2..=7)
            .find(|&m| {
                let c = phi3_cos(m);
                // exact comparison where the table value is rational
                match m {
                    2 => cos_delta <= -Rational::one(),
                    3 => cos_delta <= Rational::new((-1).into(), 2.into()),
                    4 => cos_delta <= Rational::new((-1).into(), 3.into()),
                    5 | 6 => !cos_delta.is_positive(),
                    _ => cd <= c,
                }
            })
            .map(|m| m - 1)
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "projection angle {:.4} deg is below the tabulated range for S^2",
                    delta.to_degrees()
                ))
            })?,
        _ => {
            return Err(Error::Unsupported(format!(
                "no spherical-code table for S^{} (dimension {n})",
                n - 1
            )))
        }
    };
    Ok(MuBound { n, z: z.clone(), t0: t0.clone(), delta: Some(delta), mu_star })
}

/// Angle between the apexes of `k`-point regular simplices hinged on a common
/// facet: `cos alpha = (2 k z^2 - (k - 1) z - 1) / (1 + (k - 1) z)`.
pub fn cross_arc_angle(k: usize, z: f64) -> f64 {
    let kf = k as f64;
    let c = (2.0 * kf * z * z - (kf - 1.0) * z - 1.0) / (1.0 + (kf - 1.0) * z);
    c.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const THIRD_PI: f64 = PI / 3.0;

    #[test]
    fn solve_theta_vertex_cases() {
        let tet = GramConfiguration::regular_simplex(4, 0.5).unwrap();
        let t = tet.solve_theta(&[0.0, THIRD_PI, THIRD_PI], 3).unwrap();
        assert!((t - THIRD_PI).abs() < 1e-7);
        let tri = GramConfiguration::regular_simplex(3, 0.5).unwrap();
        let t = tri.solve_theta(&[0.0, THIRD_PI], 2).unwrap();
        assert!((t - THIRD_PI).abs() < 1e-7);
        let rho4 = ((1.0 + 3.0 * 0.5) / 4.0f64).sqrt().acos();
        let t = tet.solve_theta(&[rho4; 3], 3).unwrap();
        assert!((t - rho4).abs() < 1e-10);
        assert!(tet.solve_theta(&[0.1, 0.1, 0.1], 3).is_none());
    }

    #[test]
    fn explicit_formula_examples() {
        assert!((theta3_explicit(0.0, THIRD_PI).unwrap() - THIRD_PI).abs() < 1e-7);
        let rho3 = (2.0f64 / 3.0).sqrt().acos();
        assert!((theta3_explicit(rho3, rho3).unwrap() - rho3).abs() < 1e-12);
        let t = theta4_explicit(30.2310f64.to_radians(), 30.2310f64.to_radians(), 51.6765f64.to_radians()).unwrap();
        assert!(t <= 52.5588f64.to_radians() + 1e-3, "{}", t.to_degrees());
        assert!(theta3_explicit(0.05, 0.05).is_err());
    }

    #[test]
    fn explicit_formulas_match_solver() {
        let tri = GramConfiguration::regular_simplex(3, 0.5).unwrap();
        let tet = GramConfiguration::regular_simplex(4, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let t: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            if let (Some(a), Ok(b)) = (tri.solve_theta(&t[..2], 2), theta3_explicit(t[0], t[1])) {
                assert!((a.cos() - b.cos()).abs() < 1e-10);
            }
            if let (Some(a), Ok(b)) = (tet.solve_theta(&t, 3), theta4_explicit(t[0], t[1], t[2])) {
                assert!((a.cos() - b.cos()).abs() < 1e-10);
                checked += 1;
            }
        }
    }

    #[test]
    fn degenerate_facet_rejected() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 0.5, 0.5, 1.0]);
        assert!(matches!(GramConfiguration::new(g, vec![0, 1], 3), Err(Error::DegenerateFacet(_))));
    }

    #[test]
    fn p5_edges_and_rank() {
        let z = rat(1, 2);
        for alpha_deg in [60.0, 70.0, 80.0, 90.0] {
            let cfg = build_p5(f64::to_radians(alpha_deg), &z).unwrap();
            let g = cfg.gram();
            for (i, j) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3), (3, 4)] {
                assert!((g[(i, j)] - 0.5).abs() < 1e-15);
            }
            let mut eig: Vec<f64> = SymmetricEigen::new(g.clone()).eigenvalues.iter().copied().collect();
            eig.sort_by(f64::total_cmp);
            assert!(eig[0].abs() < 1e-9 && eig[1] > 1e-6);
            // the other diagonal is never shorter than alpha
            assert!(g[(2, 4)] <= f64::to_radians(alpha_deg).cos() + 1e-12);
        }
        let at_min = build_p5(THIRD_PI, &z).unwrap();
        assert!((at_min.inner(2, 4) + 0.25).abs() < 1e-9);
        let at_max = build_p5(PI / 2.0, &z).unwrap();
        assert!(at_max.inner(2, 4).abs() < 1e-9);
        assert!(build_p5(1.0, &z).is_err());
    }

    #[test]
    fn rhomb_family() {
        let z = rat(1, 2);
        let amax = rhomb_alpha_max(0.5);
        assert!(amax > THIRD_PI && amax < PI / 2.0 + 0.5);
        for a in [THIRD_PI, 0.5 * (THIRD_PI + amax), amax] {
            let cfg = build_rhomb(a, &z).unwrap();
            assert!(cfg.inner(0, 2) <= a.cos() + 1e-7);
        }
        // at the square both diagonals agree
        let sq = build_rhomb(amax, &z).unwrap();
        assert!((sq.inner(0, 2) - sq.inner(1, 3)).abs() < 1e-7);
    }

    #[test]
    fn cross_arc_examples() {
        assert!((cross_arc_angle(2, 0.5).cos() + 1.0 / 3.0).abs() < 1e-12);
        assert!((cross_arc_angle(1, 0.5).cos() + 0.5).abs() < 1e-12);
        for k in 1..8 {
            for z in [0.0, 0.2, 0.5, 0.9] {
                assert!(cross_arc_angle(k, z).cos() < z);
            }
        }
    }

    #[test]
    fn mu_bound_examples() {
        let z = rat(1, 2);
        assert_eq!(mu_bound(4, &z, &rat(6058, 10000)).unwrap().mu_star, 6);
        assert_eq!(mu_bound(4, &z, &rat(72, 100)).unwrap().mu_star, 4);
        assert_eq!(mu_bound(3, &z, &rat(5907, 10000)).unwrap().mu_star, 4);
        assert_eq!(mu_bound(3, &z, &rat(9, 10)).unwrap().mu_star, 1);
        assert!(matches!(mu_bound(6, &z, &rat(6, 10)), Err(Error::Unsupported(_))));
        assert!(mu_bound(4, &z, &rat(4, 10)).is_err());
    }

    #[test]
    fn min_theta_vertex_and_bounds() {
        let tet = GramConfiguration::regular_simplex(4, 0.5).unwrap();
        let theta0 = 52.5588f64.to_radians();
        let a = CapDomain::new(vec![theta0; 3]).unwrap();
        let m = min_theta_on_domain(&tet, &a, 3).unwrap();
        let v = tet.solve_theta(&a.a, 3).unwrap();
        assert!(m <= v + 1e-12);
        assert!(CapDomain::new(vec![0.0, 0.3, 0.3]).is_err());
        let small = CapDomain::new(vec![0.1; 3]).unwrap();
        assert!(matches!(min_theta_on_domain(&tet, &small, 3), Err(Error::EmptyDomain)));
    }
}
