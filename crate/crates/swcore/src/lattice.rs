//! Periodic N⁴ lattice carrying a conformally flat metric `g = e^{2u} δ`.
//!
//! Sites are indexed with the last axis fastest. Geometry (Christoffels,
//! curvature) uses central differences; the exterior derivative uses forward
//! differences so that `d∘d = 0` holds exactly and `d*` is its exact adjoint
//! for the weighted inner products
//!
//! * 0-forms: `Σ_x e^{4u} h⁴ f g`
//! * 1-forms: `Σ_(x,i) e^{2ū} h⁴ α_i β_i` with `ū` the link-midpoint average
//! * 2-forms: `Σ_(x,i<j) h⁴ F_ij G_ij` (conformally invariant in dimension 4)
//!
//! Imaginary-valued forms store the real coefficient of `i`. The induced
//! pairing on them carries the extra minus sign of the iℝ-valued star, which
//! cancels `i·i = -1`, so the same positive weighted sums apply.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::clifford::PAIRS;
use crate::linalg::{self, SolveInfo};
use crate::real::{exp, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Real,
    Imaginary,
}

/// A p-form with `p ∈ {0, 1, 2}`, stored site-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    pub degree: u8,
    pub value_type: ValueType,
    pub data: Vec<f64>,
}

pub fn components(degree: u8) -> usize {
    match degree {
        0 => 1,
        1 => 4,
        _ => 6,
    }
}

impl FormField {
    pub fn zeros(m: &LatticeManifold, degree: u8, value_type: ValueType) -> Self {
        FormField { degree, value_type, data: vec![0.0; m.n_sites() * components(degree)] }
    }

    pub fn from_data(degree: u8, value_type: ValueType, data: Vec<f64>) -> Self {
        FormField { degree, value_type, data }
    }

    pub fn ncomp(&self) -> usize {
        components(self.degree)
    }

    #[inline]
    pub fn at(&self, site: usize, c: usize) -> f64 {
        self.data[site * self.ncomp() + c]
    }

    pub fn scaled(&self, s: f64) -> Self {
        FormField { data: self.data.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        FormField { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FormField { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(), ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.data)
    }
}

/// Periodic lattice with conformal factor and precomputed weights.
#[derive(Debug, Clone)]
pub struct LatticeManifold {
    pub n: usize,
    pub lengths: [f64; 4],
    pub spacing: [f64; 4],
    pub u: Vec<f64>,
    /// `e^{4u} Πh` per site.
    pub volume_weight: Vec<f64>,
    /// `e^{2ū} Πh` per link, index `site * 4 + axis`.
    pub link_weight: Vec<f64>,
    /// `Πh`, the plaquette weight.
    pub plaquette_weight: f64,
    /// Scalar curvature per site.
    pub scalar_curvature: Vec<f64>,
    /// Orthonormal-frame connection: `frame_connection[site][i]` is the
    /// antisymmetric matrix `ω_i` with `∇_i e_b = Σ_k ω_i[k][b] e_k`.
    pub frame_connection: Vec<[[[f64; 4]; 4]; 4]>,
    fwd: Vec<[usize; 4]>,
    bwd: Vec<[usize; 4]>,
}

impl LatticeManifold {
    #[inline]
    pub fn n_sites(&self) -> usize {
        self.u.len()
    }

    #[inline]
    pub fn fwd(&self, site: usize, axis: usize) -> usize {
        self.fwd[site][axis]
    }

    #[inline]
    pub fn bwd(&self, site: usize, axis: usize) -> usize {
        self.bwd[site][axis]
    }

    pub fn coords(&self, site: usize) -> [usize; 4] {
        let n = self.n;
        [site / (n * n * n), (site / (n * n)) % n, (site / n) % n, site % n]
    }

    pub fn site(&self, c: [usize; 4]) -> usize {
        let n = self.n;
        ((c[0] % n * n + c[1] % n) * n + c[2] % n) * n + c[3] % n
    }

    pub fn position(&self, site: usize) -> [f64; 4] {
        let c = self.coords(site);
        [0, 1, 2, 3].map(|i| c[i] as f64 * self.spacing[i])
    }

    pub fn cell_volume(&self) -> f64 {
        self.plaquette_weight
    }

    pub fn total_volume(&self) -> f64 {
        self.volume_weight.iter().sum()
    }

    /// Conformal factor `e^{-ū}` on a link, converting coordinate to frame
    /// components of a 1-form.
    #[inline]
    pub fn link_frame_factor(&self, site: usize, axis: usize) -> f64 {
        exp(-0.5 * (self.u[site] + self.u[self.fwd(site, axis)]))
    }

    /// Weighted inner product of two forms of the same degree.
    pub fn inner(&self, a: &FormField, b: &FormField) -> f64 {
        match a.degree {
            0 => a.data.iter().zip(&b.data).zip(&self.volume_weight).map(|((x, y), w)| x * y * w).sum(),
            1 => a.data.iter().zip(&b.data).zip(&self.link_weight).map(|((x, y), w)| x * y * w).sum(),
            _ => self.plaquette_weight * linalg::dot(&a.data, &b.data),
        }
    }

    pub fn norm(&self, a: &FormField) -> f64 {
        sqrt(self.inner(a, a))
    }
}

/// Build the lattice from a closed-form conformal factor `u(x)`.
pub fn build_torus<F: Fn([f64; 4]) -> f64>(n: usize, lengths: [f64; 4], u: F) -> Result<LatticeManifold> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::LatticeTooSmall(n));
    }
    let spacing = lengths.map(|l| l / n as f64);
    let sites = n * n * n * n;
    let mut field = Vec::with_capacity(sites);
    for s in 0..sites {
        let c = [s / (n * n * n), (s / (n * n)) % n, (s / n) % n, s % n];
        field.push(u([0, 1, 2, 3].map(|i| c[i] as f64 * spacing[i])));
    }
    build_torus_from_field(n, lengths, field)
}

/// Build the lattice from sampled conformal factor values in site order.
pub fn build_torus_from_field(n: usize, lengths: [f64; 4], u: Vec<f64>) -> Result<LatticeManifold> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::LatticeTooSmall(n));
    }
    let sites = n * n * n * n;
    if u.len() != sites {
        return Err(Error::Shape(alloc::format!("u has {} values, expected {}", u.len(), sites)));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("conformal factor"));
    }
    if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Precondition("edge lengths must be positive".into()));
    }
    let spacing = lengths.map(|l| l / n as f64);
    let mut fwd = vec![[0usize; 4]; sites];
    let mut bwd = vec![[0usize; 4]; sites];
    let strides = [n * n * n, n * n, n, 1];
    for s in 0..sites {
        for a in 0..4 {
            let c = (s / strides[a]) % n;
            let base = s - c * strides[a];
            fwd[s][a] = base + ((c + 1) % n) * strides[a];
            bwd[s][a] = base + ((c + n - 1) % n) * strides[a];
        }
    }
    let cell = spacing.iter().product::<f64>();
    let volume_weight: Vec<f64> = u.iter().map(|x| exp(4.0 * x) * cell).collect();
    let mut link_weight = vec![0.0; sites * 4];
    for s in 0..sites {
        for a in 0..4 {
            link_weight[s * 4 + a] = exp(u[s] + u[fwd[s][a]]) * cell;
        }
    }
    let mut m = LatticeManifold {
        n,
        lengths,
        spacing,
        u,
        volume_weight,
        link_weight,
        plaquette_weight: cell,
        scalar_curvature: Vec::new(),
        frame_connection: Vec::new(),
        fwd,
        bwd,
    };
    let gam = christoffel_field(&m);
    m.scalar_curvature = (0..sites)
        .map(|s| {
            let r = riemann_at(&m, &gam, s);
            let ric = ricci_from(&r);
            exp(-2.0 * m.u[s]) * (0..4).map(|j| ric[j * 4 + j]).sum::<f64>()
        })
        .collect();
    m.frame_connection = (0..sites).map(|s| frame_connection_at(&m, s)).collect();
    Ok(m)
}

// ℓ_i = ½ g⁻¹ ∂_i g with g = e^{2u} and central differences.
fn log_gradient(m: &LatticeManifold, s: usize) -> [f64; 4] {
    let g0 = exp(2.0 * m.u[s]);
    [0, 1, 2, 3].map(|i| {
        let gp = exp(2.0 * m.u[m.fwd(s, i)]);
        let gm = exp(2.0 * m.u[m.bwd(s, i)]);
        0.5 * (gp - gm) / (2.0 * m.spacing[i]) / g0
    })
}

fn frame_connection_at(m: &LatticeManifold, s: usize) -> [[[f64; 4]; 4]; 4] {
    // ω^k_{ib} = Γ^k_{ib} - δ_kb ℓ_i = δ_ki ℓ_b - δ_ib ℓ_k
    let l = log_gradient(m, s);
    let mut w = [[[0.0; 4]; 4]; 4];
    for (i, wi) in w.iter_mut().enumerate() {
        for b in 0..4 {
            wi[i][b] += l[b];
            wi[b][i] -= l[b];
        }
        for k in 0..4 {
            wi[k][k] = 0.0;
        }
    }
    w
}

/// `Γ^k_{ij}` per site, flattened as `k*16 + i*4 + j`.
fn christoffel_field(m: &LatticeManifold) -> Vec<[f64; 64]> {
    (0..m.n_sites())
        .map(|s| {
            let l = log_gradient(m, s);
            let mut g = [0.0; 64];
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        let mut v = 0.0;
                        if k == j {
                            v += l[i];
                        }
                        if k == i {
                            v += l[j];
                        }
                        if i == j {
                            v -= l[k];
                        }
                        g[k * 16 + i * 4 + j] = v;
                    }
                }
            }
            g
        })
        .collect()
}

/// `R^l_{ijk}` at one site, flattened as `l*64 + i*16 + j*4 + k`.
fn riemann_at(m: &LatticeManifold, gam: &[[f64; 64]], s: usize) -> [f64; 256] {
    let mut dg = [[0.0; 64]; 4];
    for (a, d) in dg.iter_mut().enumerate() {
        let p = &gam[m.fwd(s, a)];
        let q = &gam[m.bwd(s, a)];
        let inv = 1.0 / (2.0 * m.spacing[a]);
        for t in 0..64 {
            d[t] = (p[t] - q[t]) * inv;
        }
    }
    let g = &gam[s];
    let mut r = [0.0; 256];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut v = dg[i][l * 16 + j * 4 + k] - dg[j][l * 16 + i * 4 + k];
                    for q in 0..4 {
                        v += g[l * 16 + i * 4 + q] * g[q * 16 + j * 4 + k] - g[l * 16 + j * 4 + q] * g[q * 16 + i * 4 + k];
                    }
                    r[l * 64 + i * 16 + j * 4 + k] = v;
                }
            }
        }
    }
    r
}

fn ricci_from(r: &[f64; 256]) -> [f64; 16] {
    let mut ric = [0.0; 16];
    for j in 0..4 {
        for k in 0..4 {
            ric[j * 4 + k] = (0..4).map(|i| r[i * 64 + i * 16 + j * 4 + k]).sum();
        }
    }
    ric
}

/// Finite-difference curvature of the Levi-Civita connection.
///
/// Ricci is `Ric_jk = R^i_{ijk}`, positive on round spheres.
#[derive(Debug, Clone)]
pub struct CurvatureTables {
    /// `Γ^k_{ij}` flattened `k*16 + i*4 + j`.
    pub christoffel: Vec<[f64; 64]>,
    /// `R^l_{ijk}` flattened `l*64 + i*16 + j*4 + k` (coordinate components).
    pub riemann: Vec<[f64; 256]>,
    pub ricci: Vec<[f64; 16]>,
    pub scalar: Vec<f64>,
    /// Ricci endomorphism in the orthonormal frame, `e^{-2u} Ric`.
    pub ricci_operator: Vec<[[f64; 4]; 4]>,
}

impl CurvatureTables {
    #[inline]
    pub fn riemann(&self, site: usize, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.riemann[site][l * 64 + i * 16 + j * 4 + k]
    }

    /// Max over sites of the first Bianchi sum.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.riemann {
            for l in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        for k in 0..4 {
                            let v = r[l * 64 + i * 16 + j * 4 + k] + r[l * 64 + j * 16 + k * 4 + i] + r[l * 64 + k * 16 + i * 4 + j];
                            worst = worst.max(v.abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// `R^l_{ijk} + R^l_{jik}`.
    pub fn antisymmetry_residual(&self) -> f64 {
        self.max_over(|r, l, i, j, k| r[l * 64 + i * 16 + j * 4 + k] + r[l * 64 + j * 16 + i * 4 + k])
    }

    /// Frame-index antisymmetry `R_{lijk} + R_{kijl}` (lowered with the
    /// conformal metric, whose common factor is dropped).
    pub fn frame_antisymmetry_residual(&self) -> f64 {
        self.max_over(|r, l, i, j, k| r[l * 64 + i * 16 + j * 4 + k] + r[k * 64 + i * 16 + j * 4 + l])
    }

    /// Pair symmetry `⟨R(e_i,e_j)e_k, e_l⟩ = ⟨R(e_k,e_l)e_i, e_j⟩`.
    pub fn pair_symmetry_residual(&self) -> f64 {
        self.max_over(|r, l, i, j, k| r[l * 64 + i * 16 + j * 4 + k] - r[j * 64 + k * 16 + l * 4 + i])
    }

    pub fn ricci_symmetry_residual(&self) -> f64 {
        let mut w: f64 = 0.0;
        for ric in &self.ricci {
            for j in 0..4 {
                for k in 0..4 {
                    w = w.max((ric[j * 4 + k] - ric[k * 4 + j]).abs());
                }
            }
        }
        w
    }

    pub fn max_riemann(&self) -> f64 {
        self.riemann.iter().flat_map(|r| r.iter()).fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    fn max_over<F: Fn(&[f64; 256], usize, usize, usize, usize) -> f64>(&self, f: F) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.riemann {
            for l in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        for k in 0..4 {
                            worst = worst.max(f(r, l, i, j, k).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

pub fn curvature_tables(m: &LatticeManifold) -> CurvatureTables {
    let christoffel = christoffel_field(m);
    let riemann: Vec<[f64; 256]> = (0..m.n_sites()).map(|s| riemann_at(m, &christoffel, s)).collect();
    let ricci: Vec<[f64; 16]> = riemann.iter().map(ricci_from).collect();
    let scalar: Vec<f64> = ricci
        .iter()
        .zip(&m.u)
        .map(|(ric, u)| exp(-2.0 * u) * (0..4).map(|j| ric[j * 4 + j]).sum::<f64>())
        .collect();
    let ricci_operator = ricci
        .iter()
        .zip(&m.u)
        .map(|(ric, u)| {
            let f = exp(-2.0 * u);
            let mut op = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    op[a][b] = f * ric[a * 4 + b];
                }
            }
            op
        })
        .collect();
    CurvatureTables { christoffel, riemann, ricci, scalar, ricci_operator }
}

/// Forward-difference exterior derivative.
pub fn d(m: &LatticeManifold, w: &FormField) -> Result<FormField> {
    let sites = m.n_sites();
    match w.degree {
        0 => {
            let mut out = vec![0.0; sites * 4];
            for s in 0..sites {
                for a in 0..4 {
                    out[s * 4 + a] = (w.data[m.fwd(s, a)] - w.data[s]) / m.spacing[a];
                }
            }
            Ok(FormField::from_data(1, w.value_type, out))
        }
        1 => {
            let mut out = vec![0.0; sites * 6];
            for s in 0..sites {
                for (p, &(i, j)) in PAIRS.iter().enumerate() {
                    let di = (w.data[m.fwd(s, i) * 4 + j] - w.data[s * 4 + j]) / m.spacing[i];
                    let dj = (w.data[m.fwd(s, j) * 4 + i] - w.data[s * 4 + i]) / m.spacing[j];
                    out[s * 6 + p] = di - dj;
                }
            }
            Ok(FormField::from_data(2, w.value_type, out))
        }
        p => Err(Error::Degree(p)),
    }
}

/// Weighted adjoint of [`d`].
pub fn codifferential(m: &LatticeManifold, w: &FormField) -> Result<FormField> {
    let sites = m.n_sites();
    match w.degree {
        1 => {
            let mut out = vec![0.0; sites];
            for s in 0..sites {
                let mut acc = 0.0;
                for a in 0..4 {
                    let b = m.bwd(s, a);
                    acc += (m.link_weight[b * 4 + a] * w.data[b * 4 + a] - m.link_weight[s * 4 + a] * w.data[s * 4 + a]) / m.spacing[a];
                }
                out[s] = acc / m.volume_weight[s];
            }
            Ok(FormField::from_data(0, w.value_type, out))
        }
        2 => {
            let mut out = vec![0.0; sites * 4];
            let pw = m.plaquette_weight;
            for s in 0..sites {
                for (p, &(i, j)) in PAIRS.iter().enumerate() {
                    let g = w.data[s * 6 + p];
                    // α_j D_i + ... : transpose of D_i is (g(x - e_i) - g(x)) / h_i
                    let gi = (w.data[m.bwd(s, i) * 6 + p] - g) / m.spacing[i];
                    let gj = (w.data[m.bwd(s, j) * 6 + p] - g) / m.spacing[j];
                    out[s * 4 + j] += pw * gi;
                    out[s * 4 + i] -= pw * gj;
                }
            }
            for (v, w1) in out.iter_mut().zip(&m.link_weight) {
                *v /= w1;
            }
            Ok(FormField::from_data(1, w.value_type, out))
        }
        p => Err(Error::Degree(p)),
    }
}

/// `Δ_g f = d* d f`.
pub fn laplace_beltrami(m: &LatticeManifold, f: &FormField) -> Result<FormField> {
    if f.degree != 0 {
        return Err(Error::Degree(f.degree));
    }
    codifferential(m, &d(m, f)?)
}

/// Apply the symmetric form `dᵀ W₁ d` of the scalar Laplacian.
pub(crate) fn scalar_stiffness(m: &LatticeManifold, f: &[f64], out: &mut [f64]) {
    let sites = m.n_sites();
    out.iter_mut().for_each(|v| *v = 0.0);
    for s in 0..sites {
        for a in 0..4 {
            let t = m.fwd(s, a);
            let h = m.spacing[a];
            let flux = m.link_weight[s * 4 + a] * (f[t] - f[s]) / (h * h);
            out[t] += flux;
            out[s] -= flux;
        }
    }
}

/// Solve `Δ_g f = r` for mean-free `f` (with `r` orthogonal to constants).
pub fn solve_scalar_poisson(m: &LatticeManifold, r: &[f64]) -> Result<(Vec<f64>, SolveInfo)> {
    let sites = m.n_sites();
    let b: Vec<f64> = r.iter().zip(&m.volume_weight).map(|(x, w)| x * w).collect();
    let mut x = vec![0.0; sites];
    let max_iter = 10 * sites;
    let info = linalg::conjugate_gradient(|v, out| scalar_stiffness(m, v, out), &b, &mut x, 1e-10, max_iter, true)?;
    Ok((x, info))
}

/// Output of [`hodge_decompose`].
#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub exact: FormField,
    pub coexact: FormField,
    pub harmonic: FormField,
    /// Potential `f` with `exact = d f`.
    pub potential: Vec<f64>,
    /// Coefficients of the harmonic part in the basis `dx_a + dψ_a`.
    pub harmonic_coefficients: [f64; 4],
    pub solver: SolveInfo,
}

/// Harmonic 1-forms `dx_a + dψ_a` with `d*(dx_a + dψ_a) = 0`.
pub fn harmonic_basis(m: &LatticeManifold) -> Result<[FormField; 4]> {
    let sites = m.n_sites();
    let mut out: Vec<FormField> = Vec::with_capacity(4);
    for a in 0..4 {
        let mut dx = FormField::zeros(m, 1, ValueType::Real);
        for s in 0..sites {
            dx.data[s * 4 + a] = 1.0;
        }
        let r = codifferential(m, &dx)?;
        let neg: Vec<f64> = r.data.iter().map(|x| -x).collect();
        let (psi, _) = solve_scalar_poisson(m, &neg)?;
        let dpsi = d(m, &FormField::from_data(0, ValueType::Real, psi))?;
        out.push(dx.add(&dpsi));
    }
    let mut it = out.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

pub fn hodge_decompose(m: &LatticeManifold, w: &FormField) -> Result<HodgeDecomposition> {
    if w.degree != 1 {
        return Err(Error::Degree(w.degree));
    }
    let dw = codifferential(m, w)?;
    let (f, solver) = solve_scalar_poisson(m, &dw.data)?;
    let mut exact = d(m, &FormField::from_data(0, w.value_type, f.clone()))?;
    exact.value_type = w.value_type;
    let basis = harmonic_basis(m)?;
    let mut gram = [[0.0; 4]; 4];
    let mut rhs = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            gram[a][b] = m.inner(&basis[a], &basis[b]);
        }
        rhs[a] = m.inner(w, &basis[a]);
    }
    let coef = solve4(gram, rhs)?;
    let mut harmonic = FormField::zeros(m, 1, w.value_type);
    for a in 0..4 {
        linalg::axpy(coef[a], &basis[a].data, &mut harmonic.data);
    }
    let coexact = w.sub(&exact).sub(&harmonic);
    Ok(HodgeDecomposition { exact, coexact, harmonic, potential: f, harmonic_coefficients: coef, solver })
}

// Gaussian elimination with partial pivoting on a 4×4 system.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4]> {
    for c in 0..4 {
        let p = (c..4).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[p][c].abs() < 1e-300 {
            return Err(Error::Precondition("singular harmonic Gram matrix".into()));
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 4];
    for c in (0..4).rev() {
        let mut s = b[c];
        for k in c + 1..4 {
            s -= a[c][k] * x[k];
        }
        x[c] = s / a[c][c];
    }
    Ok(x)
}

/// Closed-form helpers for `u = ε cos(2π k x_1 / L_1)`-type fields used as
/// oracles and presets.
pub fn cosine_profile(eps: f64, axis: usize, length: f64) -> impl Fn([f64; 4]) -> f64 {
    move |x| eps * crate::real::cos(2.0 * PI * x[axis] / length)
}

/// Two smooth periodic bumps of height `eps`, centred at `(¼, ¼)` and
/// `(¾, ¾)` of the first two periods.
pub fn two_bump_profile(eps: f64, lengths: [f64; 4]) -> impl Fn([f64; 4]) -> f64 {
    let bump = |t: f64| crate::real::exp(2.0 * (crate::real::cos(2.0 * PI * t) - 1.0));
    move |x| {
        let (s, t) = (x[0] / lengths[0], x[1] / lengths[1]);
        eps * (bump(s - 0.25) * bump(t - 0.25) + bump(s - 0.75) * bump(t - 0.75))
    }
}
