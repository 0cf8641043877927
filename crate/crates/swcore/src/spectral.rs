//! Hessian operators, the gauge slice, and lowest-eigenvalue solvers.
//!
//! Every operator is presented to the solvers as a real symmetric matrix
//! in Euclidean coordinates. Weighted inner products are absorbed by the
//! similarity `x = W^{1/2} v`, so the spectrum is unchanged.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::functional::{hessian_apply, Configuration, Tangent};
use crate::gauge::U1Connection;
use crate::lattice::{self, FormField, LatticeManifold, ValueType};
use crate::linalg::{self, dot, norm, DenseMatrix, SolveInfo};
use crate::real::sqrt;
use crate::spin::{Chirality, SpinGeometry, SpinorField};
use crate::{Complex64, Error, Result};

/// Largest dimension for which the dense path is offered.
pub const DENSE_LIMIT: usize = 4096;
/// Largest dimension `SolverChoice::Auto` sends to the dense path; above
/// this the iterative solver is much faster.
pub const AUTO_DENSE_LIMIT: usize = 512;

/// A linear map symmetric in the Euclidean inner product.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

/// Approximate inverse used to accelerate the iterative solver.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Iterative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Dense when `dim <= AUTO_DENSE_LIMIT`, iterative otherwise.
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub block: usize,
    pub seed: u64,
    pub choice: SolverChoice,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-8, max_iter: 5000, block: 4, seed: 0x5eed, choice: SolverChoice::Iterative }
    }
}

/// Lowest eigenpair. The eigenvector is unit length in operator coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

/// Largest relative defect `|⟨x,Ay⟩ - ⟨Ax,y⟩|` over five random pairs.
pub fn check_symmetry(op: &dyn SymmetricOperator, seed: u64) -> Result<f64> {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut ax = vec![0.0; n];
    let mut ay = vec![0.0; n];
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        op.apply(&x, &mut ax)?;
        op.apply(&y, &mut ay)?;
        let scale = (norm(&ax) * norm(&y)).max(norm(&ay) * norm(&x)).max(f64::MIN_POSITIVE);
        worst = worst.max((dot(&x, &ay) - dot(&ax, &y)).abs() / scale);
    }
    if worst > 1e-8 {
        return Err(Error::NotSymmetric { defect: worst });
    }
    Ok(worst)
}

pub fn assemble(op: &dyn SymmetricOperator) -> Result<DenseMatrix> {
    let n = op.dim();
    let mut a = DenseMatrix::zeros(n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col)?;
        for i in 0..n {
            a.set(i, j, col[i]);
        }
        e[j] = 0.0;
    }
    a.symmetrize();
    Ok(a)
}

/// Full ascending spectrum by dense eigendecomposition.
pub fn dense_spectrum(op: &dyn SymmetricOperator) -> Result<Vec<f64>> {
    let a = assemble(op)?;
    Ok(linalg::symmetric_eigen(&a, false)?.0)
}

pub fn dense_lowest(op: &dyn SymmetricOperator) -> Result<SpectralResult> {
    let n = op.dim();
    let a = assemble(op)?;
    let (vals, _) = linalg::symmetric_eigen(&a, false)?;
    let scale = vals.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let v = linalg::eigenvector_for(&a, vals[0], scale)?;
    let mut av = vec![0.0; n];
    op.apply(&v, &mut av)?;
    linalg::axpy(-vals[0], &v, &mut av);
    Ok(SpectralResult { eigenvalue: vals[0], eigenvector: v, residual: norm(&av), iterations: 0, method: Method::Dense })
}

/// Lowest eigenpair after the symmetry pre-check.
pub fn lowest_eigenvalue(
    op: &dyn SymmetricOperator,
    opts: &EigenOptions,
    pc: Option<&dyn Preconditioner>,
) -> Result<SpectralResult> {
    check_symmetry(op, opts.seed)?;
    let dense = match opts.choice {
        SolverChoice::Dense => true,
        SolverChoice::Iterative => false,
        SolverChoice::Auto => op.dim() <= AUTO_DENSE_LIMIT,
    };
    if dense {
        if op.dim() > DENSE_LIMIT {
            return Err(Error::Precondition("dense path limited to dimension 4096".into()));
        }
        dense_lowest(op)
    } else {
        lobpcg(op, opts, pc.unwrap_or(&IdentityPreconditioner))
    }
}

fn apply_col(op: &dyn SymmetricOperator, x: &[f64]) -> Result<Vec<f64>> {
    let mut y = vec![0.0; x.len()];
    op.apply(x, &mut y)?;
    Ok(y)
}

fn combine(cols: &[Vec<f64>], c: &DenseMatrix, j: usize, from: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols[0].len()];
    for (i, col) in cols.iter().enumerate().skip(from) {
        linalg::axpy(c.get(i, j), col, &mut out);
    }
    out
}

/// Block preconditioned conjugate gradient (LOBPCG) for the lowest pair.
fn lobpcg(op: &dyn SymmetricOperator, opts: &EigenOptions, pc: &dyn Preconditioner) -> Result<SpectralResult> {
    let n = op.dim();
    let k = opts.block.clamp(1, n);
    if 3 * k > n {
        return dense_lowest(op);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    linalg::orthonormalize(&mut x, 1e-12);
    if x.len() < k {
        return Err(Error::Precondition("degenerate starting block".into()));
    }
    let mut ax: Vec<Vec<f64>> = x.iter().map(|c| apply_col(op, c)).collect::<Result<_>>()?;
    let mut p: Vec<Vec<f64>> = Vec::new();
    let mut lam = vec![0.0; k];
    // initial Rayleigh-Ritz on X alone
    {
        let (c, vals) = ritz(&x, &ax, k)?;
        x = (0..k).map(|j| combine(&x, &c, j, 0)).collect();
        ax = (0..k).map(|j| combine(&ax, &c, j, 0)).collect();
        lam.copy_from_slice(&vals[..k]);
    }
    let mut last_res = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let mut w = Vec::with_capacity(k);
        let mut res0 = 0.0;
        for j in 0..k {
            let mut r = ax[j].clone();
            linalg::axpy(-lam[j], &x[j], &mut r);
            if j == 0 {
                res0 = norm(&r);
            }
            let mut z = vec![0.0; n];
            pc.apply(&r, &mut z);
            w.push(z);
        }
        last_res = res0;
        if !res0.is_finite() || !lam[0].is_finite() {
            return Err(Error::NonFinite("eigensolver iterate"));
        }
        if res0 <= opts.tol {
            return Ok(SpectralResult {
                eigenvalue: lam[0],
                eigenvector: x.swap_remove(0),
                residual: res0,
                iterations: it - 1,
                method: Method::Iterative,
            });
        }
        let mut s: Vec<Vec<f64>> = x.clone();
        s.extend(w);
        s.append(&mut p);
        linalg::orthonormalize(&mut s, 1e-10);
        if s.len() <= k {
            break;
        }
        let mut a_s = ax.clone();
        for col in s.iter().skip(k) {
            a_s.push(apply_col(op, col)?);
        }
        let (c, vals) = ritz(&s, &a_s, s.len())?;
        let xn: Vec<Vec<f64>> = (0..k).map(|j| combine(&s, &c, j, 0)).collect();
        ax = (0..k).map(|j| combine(&a_s, &c, j, 0)).collect();
        p = (0..k).map(|j| combine(&s, &c, j, k)).collect();
        x = xn;
        lam.copy_from_slice(&vals[..k]);
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: last_res })
}

/// Rayleigh-Ritz on an orthonormal basis with known images.
fn ritz(s: &[Vec<f64>], a_s: &[Vec<f64>], m: usize) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut g = DenseMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v = 0.5 * (dot(&s[i], &a_s[j]) + dot(&s[j], &a_s[i]));
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    let (vals, vecs) = linalg::symmetric_eigen(&g, true)?;
    Ok((vecs.ok_or_else(|| Error::Precondition("eigenvectors missing".into()))?, vals))
}

// --- concrete operators ----------------------------------------------------

/// `Δ_g + k/4` on functions.
pub struct ScalarOperator<'a> {
    pub m: &'a LatticeManifold,
    sqrt_w: Vec<f64>,
}

impl<'a> ScalarOperator<'a> {
    pub fn new(m: &'a LatticeManifold) -> Self {
        ScalarOperator { m, sqrt_w: m.volume_weight.iter().map(|w| sqrt(*w)).collect() }
    }

    pub fn to_function(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.sqrt_w).map(|(a, w)| a / w).collect()
    }
}

impl SymmetricOperator for ScalarOperator<'_> {
    fn dim(&self) -> usize {
        self.m.n_sites()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let f = self.to_function(x);
        lattice::scalar_stiffness(self.m, &f, y);
        for s in 0..self.dim() {
            y[s] = y[s] / self.sqrt_w[s] + 0.25 * self.m.scalar_curvature[s] * x[s];
        }
        Ok(())
    }
}

/// `L_A = Δ_A + k/4` on positive spinors, real dimension `4 N⁴`.
pub struct LaOperator<'a> {
    pub g: &'a SpinGeometry<'a>,
    pub conn: &'a U1Connection,
    sqrt_w: Vec<f64>,
}

impl<'a> LaOperator<'a> {
    pub fn new(g: &'a SpinGeometry<'a>, conn: &'a U1Connection) -> Self {
        LaOperator { g, conn, sqrt_w: g.m.volume_weight.iter().map(|w| sqrt(*w)).collect() }
    }

    pub fn to_field(&self, x: &[f64]) -> SpinorField {
        let mut f = SpinorField::from_real(Chirality::Plus, x);
        for (i, z) in f.values.iter_mut().enumerate() {
            *z /= self.sqrt_w[i / 2];
        }
        f
    }

    pub fn from_field(&self, v: &SpinorField) -> Vec<f64> {
        let mut x = v.to_real();
        for (i, a) in x.iter_mut().enumerate() {
            *a *= self.sqrt_w[i / 4];
        }
        x
    }
}

impl SymmetricOperator for LaOperator<'_> {
    fn dim(&self) -> usize {
        self.g.m.n_sites() * 4
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let v = self.to_field(x);
        let out = self.from_field(&self.g.l_a_apply(self.conn, &v)?);
        y.copy_from_slice(&out);
        Ok(())
    }
}

/// Second variation at a configuration, optionally compressed to the slice.
pub struct HessianOperator<'a> {
    pub g: &'a SpinGeometry<'a>,
    pub base: &'a Configuration,
    pub slice: bool,
    link_w: Vec<f64>,
    site_w: Vec<f64>,
}

impl<'a> HessianOperator<'a> {
    pub fn new(g: &'a SpinGeometry<'a>, base: &'a Configuration, slice: bool) -> Self {
        let link_w = g.m.link_weight.iter().map(|w| sqrt(4.0 * w)).collect();
        let site_w = g.m.volume_weight.iter().map(|w| sqrt(2.0 * w)).collect();
        HessianOperator { g, base, slice, link_w, site_w }
    }

    pub fn to_tangent(&self, x: &[f64]) -> Tangent {
        let links = self.link_w.len();
        let mut t = Tangent::from_real(links, x);
        t.theta.iter_mut().zip(&self.link_w).for_each(|(a, w)| *a /= w);
        for (i, z) in t.v.values.iter_mut().enumerate() {
            *z /= self.site_w[i / 2];
        }
        t
    }

    pub fn from_tangent(&self, t: &Tangent) -> Vec<f64> {
        let links = self.link_w.len();
        let mut x = t.to_real();
        for (i, a) in x.iter_mut().enumerate() {
            *a *= if i < links { self.link_w[i] } else { self.site_w[(i - links) / 4] };
        }
        x
    }
}

impl SymmetricOperator for HessianOperator<'_> {
    fn dim(&self) -> usize {
        self.link_w.len() + 4 * self.site_w.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let m = self.g.m;
        let mut t = self.to_tangent(x);
        if self.slice {
            t = slice_project(m, &self.base.phi, &t)?.0;
        }
        let mut h = hessian_apply(self.g, self.base, &t)?;
        if self.slice {
            h = slice_project(m, &self.base.phi, &h)?.0;
        }
        y.copy_from_slice(&self.from_tangent(&h));
        Ok(())
    }
}

/// The four blocks of the Hessian applied to `(θ, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianBlocks {
    pub h11: Vec<f64>,
    pub h12: Vec<f64>,
    pub h21: SpinorField,
    pub h22: SpinorField,
}

/// `h11 θ`, `h12 V` (link part of `H(0,V)`), `h21 θ` and `h22 V`.
pub fn hessian_blocks(g: &SpinGeometry, c: &Configuration, theta: &[f64], v: &SpinorField) -> Result<HessianBlocks> {
    let m = g.m;
    let a = hessian_apply(g, c, &Tangent { theta: theta.to_vec(), v: SpinorField::plus_zero(m) })?;
    let b = hessian_apply(g, c, &Tangent { theta: vec![0.0; m.n_sites() * 4], v: v.clone() })?;
    Ok(HessianBlocks { h11: a.theta, h21: a.v, h12: b.theta, h22: b.v })
}

// --- gauge slice ----------------------------------------------------------

/// Module-metric adjoint of the infinitesimal gauge action,
/// `T*(θ, V) = d*θ + ½ Im⟨V, φ⟩`.
pub fn slice_operator(m: &LatticeManifold, phi: &SpinorField, xi: &Tangent) -> Result<Vec<f64>> {
    let th = FormField::from_data(1, ValueType::Imaginary, xi.theta.clone());
    let mut out = lattice::codifferential(m, &th)?.data;
    for (s, o) in out.iter_mut().enumerate() {
        let v = xi.v.at2(s);
        let p = phi.at2(s);
        *o += 0.5 * (v[0] * p[0].conj() + v[1] * p[1].conj()).im;
    }
    Ok(out)
}

/// Orthogonal projection onto `ker T*`: subtract the orbit direction
/// `(df, i f φ)` with `(Δ + ½|φ|²) f = T* ξ`.
pub fn slice_project(m: &LatticeManifold, phi: &SpinorField, xi: &Tangent) -> Result<(Tangent, SolveInfo)> {
    let r = slice_operator(m, phi, xi)?;
    let sites = m.n_sites();
    let pot: Vec<f64> = (0..sites).map(|s| 0.5 * m.volume_weight[s] * phi.norm_at(s) * phi.norm_at(s)).collect();
    let reducible = pot.iter().all(|p| *p == 0.0);
    let b: Vec<f64> = r.iter().zip(&m.volume_weight).map(|(a, w)| a * w).collect();
    let mut f = vec![0.0; sites];
    let bn = norm(&b);
    let info = if bn == 0.0 {
        SolveInfo { iterations: 0, relative_residual: 0.0 }
    } else {
        linalg::conjugate_gradient(
            |x, y| {
                lattice::scalar_stiffness(m, x, y);
                for s in 0..sites {
                    y[s] += pot[s] * x[s];
                }
            },
            &b,
            &mut f,
            1e-13,
            20 * sites,
            reducible,
        )?
    };
    let df = lattice::d(m, &FormField::from_data(0, ValueType::Real, f.clone()))?;
    let mut out = xi.clone();
    linalg::axpy(-1.0, &df.data, &mut out.theta);
    for s in 0..sites {
        let z = Complex64::new(0.0, f[s]);
        let p = phi.at2(s);
        out.v.values[2 * s] -= z * p[0];
        out.v.values[2 * s + 1] -= z * p[1];
    }
    Ok((out, info))
}

// --- headline eigenvalues ----------------------------------------------------

/// Lowest eigenvalue of `Δ_g + k/4` on functions.
pub fn lambda_g(m: &LatticeManifold, opts: &EigenOptions, pc: Option<&dyn Preconditioner>) -> Result<SpectralResult> {
    lowest_eigenvalue(&ScalarOperator::new(m), opts, pc)
}

/// Lowest eigenvalue of `L_A` on positive spinors.
pub fn lambda_c(g: &SpinGeometry, conn: &U1Connection, opts: &EigenOptions, pc: Option<&dyn Preconditioner>) -> Result<SpectralResult> {
    lowest_eigenvalue(&LaOperator::new(g, conn), opts, pc)
}

#[cfg(test)]
mod tests;
