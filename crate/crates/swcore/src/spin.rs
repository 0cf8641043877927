//! Spinor fields, the spin connection and spin^c operators on the lattice.
//!
//! The forward link derivative of a spinor is
//!
//! `∇_i ψ(x) = [(I + hΓ/2) U ψ(x+e_i) - (I - hΓ/2) ψ(x)] / h`,
//!
//! with `U = e^{-i h a_i(x)}` and `Γ` the spin connection averaged over the
//! two ends of the link. The Cayley form keeps Kato's inequality exact on the
//! lattice. The connection Laplacian is `Δ_A = W₀⁻¹ ∇ᴴ W₁ ∇`; the Dirac
//! operator averages the two link derivatives adjacent to a site.

use alloc::vec;
use alloc::vec::Vec;

use crate::clifford::{self, mat2_apply, CliffordBivector, GammaSet, Mat2, Mat4, PAIRS};
use crate::gauge::{self, U1Connection};
use crate::lattice::{CurvatureTables, FormField, LatticeManifold};
use crate::real::{cis, exp, sqrt};
use crate::{Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
    Full,
}

impl Chirality {
    pub fn name(self) -> &'static str {
        match self {
            Chirality::Plus => "plus",
            Chirality::Minus => "minus",
            Chirality::Full => "full",
        }
    }

    pub fn comps(self) -> usize {
        match self {
            Chirality::Full => 4,
            _ => 2,
        }
    }
}

/// Chirality-tagged spinor field, components contiguous per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub chirality: Chirality,
    pub values: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(m: &LatticeManifold, chirality: Chirality) -> Self {
        SpinorField { chirality, values: vec![ZERO; m.n_sites() * chirality.comps()] }
    }

    pub fn plus_zero(m: &LatticeManifold) -> Self {
        Self::zeros(m, Chirality::Plus)
    }

    /// Same 2-spinor at every site.
    pub fn constant(m: &LatticeManifold, chirality: Chirality, v: &[Complex64]) -> Self {
        let mut values = Vec::with_capacity(m.n_sites() * v.len());
        for _ in 0..m.n_sites() {
            values.extend_from_slice(v);
        }
        SpinorField { chirality, values }
    }

    #[inline]
    pub fn comps(&self) -> usize {
        self.chirality.comps()
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.values.len() / self.comps()
    }

    #[inline]
    pub fn at2(&self, site: usize) -> [Complex64; 2] {
        [self.values[2 * site], self.values[2 * site + 1]]
    }

    #[inline]
    pub fn set2(&mut self, site: usize, v: [Complex64; 2]) {
        self.values[2 * site] = v[0];
        self.values[2 * site + 1] = v[1];
    }

    pub fn norm_at(&self, site: usize) -> f64 {
        let c = self.comps();
        sqrt(self.values[site * c..site * c + c].iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.sites()).fold(0.0, |m, s| f64::max(m, self.norm_at(s)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpinorField { chirality: self.chirality, values: self.values.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        SpinorField { chirality: self.chirality, values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SpinorField { chirality: self.chirality, values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Interleaved real view `[re₀, im₀, re₁, im₁, ...]`.
    pub fn to_real(&self) -> Vec<f64> {
        self.values.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(chirality: Chirality, v: &[f64]) -> Self {
        SpinorField { chirality, values: v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect() }
    }
}

/// `Re Σ_x W₀ ⟨a, b⟩`.
pub fn spinor_inner(m: &LatticeManifold, a: &SpinorField, b: &SpinorField) -> f64 {
    let c = a.comps();
    let mut acc = 0.0;
    for s in 0..m.n_sites() {
        let mut loc = 0.0;
        for k in 0..c {
            let (x, y) = (a.values[s * c + k], b.values[s * c + k]);
            loc += x.re * y.re + x.im * y.im;
        }
        acc += m.volume_weight[s] * loc;
    }
    acc
}

pub fn spinor_norm(m: &LatticeManifold, a: &SpinorField) -> f64 {
    sqrt(spinor_inner(m, a, a))
}

/// Spin connection `Γ^S_i = Θ(ω_i)` per site and axis (4×4 matrices).
#[derive(Debug, Clone)]
pub struct SpinConnection {
    pub gamma: Vec<[Mat4; 4]>,
}

pub fn spin_connection(m: &LatticeManifold, gs: &GammaSet) -> SpinConnection {
    let gamma = m
        .frame_connection
        .iter()
        .map(|w| [0, 1, 2, 3].map(|i| clifford::theta_iso(gs, &CliffordBivector::from_matrix(&w[i]))))
        .collect();
    SpinConnection { gamma }
}

/// Manifold-dependent spinor data shared by all operators.
#[derive(Debug, Clone)]
pub struct SpinGeometry<'a> {
    pub m: &'a LatticeManifold,
    pub gs: GammaSet,
    pub connection: SpinConnection,
    // per link (site*4 + axis): (I + hΓ/2, I - hΓ/2) on S⁺ and on S⁻
    plus_fwd: Vec<Mat2>,
    plus_back: Vec<Mat2>,
    minus_fwd: Vec<Mat2>,
    minus_back: Vec<Mat2>,
    frame: Vec<f64>,
    gamma_pm: [Mat2; 4],
}

fn id2_plus(x: &Mat2, s: f64) -> Mat2 {
    [
        [Complex64::new(1.0, 0.0) + x[0][0] * s, x[0][1] * s],
        [x[1][0] * s, Complex64::new(1.0, 0.0) + x[1][1] * s],
    ]
}

fn adj2(x: &Mat2) -> Mat2 {
    [[x[0][0].conj(), x[1][0].conj()], [x[0][1].conj(), x[1][1].conj()]]
}

impl<'a> SpinGeometry<'a> {
    pub fn new(m: &'a LatticeManifold) -> Self {
        let gs = GammaSet::new();
        let connection = spin_connection(m, &gs);
        let links = m.n_sites() * 4;
        let mut plus_fwd = Vec::with_capacity(links);
        let mut plus_back = Vec::with_capacity(links);
        let mut minus_fwd = Vec::with_capacity(links);
        let mut minus_back = Vec::with_capacity(links);
        for s in 0..m.n_sites() {
            for a in 0..4 {
                let t = m.fwd(s, a);
                let mid = clifford::mat_scale(
                    &clifford::mat_add(&connection.gamma[s][a], &connection.gamma[t][a]),
                    Complex64::new(0.5, 0.0),
                );
                let h2 = 0.5 * m.spacing[a];
                let p = clifford::block(&mid, 1, 1);
                let q = clifford::block(&mid, 0, 0);
                plus_fwd.push(id2_plus(&p, h2));
                plus_back.push(id2_plus(&p, -h2));
                minus_fwd.push(id2_plus(&q, h2));
                minus_back.push(id2_plus(&q, -h2));
            }
        }
        let frame = m.u.iter().map(|u| exp(-u)).collect();
        let gamma_pm = [0, 1, 2, 3].map(|a| gs.plus_to_minus(a));
        SpinGeometry { m, gs, connection, plus_fwd, plus_back, minus_fwd, minus_back, frame, gamma_pm }
    }

    fn blocks(&self, chirality: Chirality) -> Result<(&[Mat2], &[Mat2])> {
        match chirality {
            Chirality::Plus => Ok((&self.plus_fwd, &self.plus_back)),
            Chirality::Minus => Ok((&self.minus_fwd, &self.minus_back)),
            Chirality::Full => Err(Error::Chirality { expected: "plus or minus", got: "full" }),
        }
    }

    /// Link matrices `(I + hΓ/2, I - hΓ/2)` on positive spinors.
    pub fn plus_link(&self, site: usize, axis: usize) -> (Mat2, Mat2) {
        (self.plus_fwd[site * 4 + axis], self.plus_back[site * 4 + axis])
    }

    /// Forward link derivatives, flattened `[(site*4 + axis)*2 + comp]`.
    pub fn link_derivative(&self, conn: &U1Connection, psi: &SpinorField) -> Result<Vec<Complex64>> {
        let (fw, bk) = self.blocks(psi.chirality)?;
        let m = self.m;
        let mut out = vec![ZERO; m.n_sites() * 8];
        for s in 0..m.n_sites() {
            let v = psi.at2(s);
            for a in 0..4 {
                let t = m.fwd(s, a);
                let l = s * 4 + a;
                let h = m.spacing[a];
                let u = cis(-h * conn.a[l]);
                let w = psi.at2(t);
                let p = mat2_apply(&fw[l], &[w[0] * u, w[1] * u]);
                let q = mat2_apply(&bk[l], &v);
                out[l * 2] = (p[0] - q[0]) / h;
                out[l * 2 + 1] = (p[1] - q[1]) / h;
            }
        }
        Ok(out)
    }

    /// Conjugate transpose of [`Self::link_derivative`] (flat Euclidean pairing).
    pub fn link_derivative_adjoint(&self, conn: &U1Connection, xi: &[Complex64], chirality: Chirality) -> Result<SpinorField> {
        let (fw, bk) = self.blocks(chirality)?;
        let m = self.m;
        let mut out = SpinorField::zeros(m, chirality);
        for s in 0..m.n_sites() {
            for a in 0..4 {
                let t = m.fwd(s, a);
                let l = s * 4 + a;
                let h = m.spacing[a];
                let x = [xi[l * 2], xi[l * 2 + 1]];
                let q = mat2_apply(&adj2(&bk[l]), &x);
                out.values[2 * s] -= q[0] / h;
                out.values[2 * s + 1] -= q[1] / h;
                let uc = cis(h * conn.a[l]);
                let p = mat2_apply(&adj2(&fw[l]), &x);
                out.values[2 * t] += p[0] * uc / h;
                out.values[2 * t + 1] += p[1] * uc / h;
            }
        }
        Ok(out)
    }

    /// `Δ_A ψ = W₀⁻¹ ∇ᴴ W₁ ∇ ψ`.
    pub fn connection_laplacian(&self, conn: &U1Connection, psi: &SpinorField) -> Result<SpinorField> {
        let mut xi = self.link_derivative(conn, psi)?;
        for (l, w) in self.m.link_weight.iter().enumerate() {
            xi[2 * l] *= *w;
            xi[2 * l + 1] *= *w;
        }
        let mut out = self.link_derivative_adjoint(conn, &xi, psi.chirality)?;
        for s in 0..self.m.n_sites() {
            let w = 1.0 / self.m.volume_weight[s];
            out.values[2 * s] *= w;
            out.values[2 * s + 1] *= w;
        }
        Ok(out)
    }

    /// `L_A V = Δ_A V + (k/4) V`.
    pub fn l_a_apply(&self, conn: &U1Connection, v: &SpinorField) -> Result<SpinorField> {
        check_chirality(v, Chirality::Plus)?;
        let mut out = self.connection_laplacian(conn, v)?;
        for s in 0..self.m.n_sites() {
            let k = 0.25 * self.m.scalar_curvature[s];
            out.values[2 * s] += v.values[2 * s] * k;
            out.values[2 * s + 1] += v.values[2 * s + 1] * k;
        }
        Ok(out)
    }

    /// Site-centred combination of link derivatives into `S⁻`.
    fn dirac_gather(&self, conn: &U1Connection, xi: &[Complex64]) -> SpinorField {
        let m = self.m;
        let mut out = SpinorField::zeros(m, Chirality::Minus);
        for s in 0..m.n_sites() {
            let mut acc = [ZERO; 2];
            for a in 0..4 {
                let b = m.bwd(s, a);
                let lb = b * 4 + a;
                let v = cis(m.spacing[a] * conn.a[lb]);
                let l = s * 4 + a;
                let w = [
                    0.5 * (xi[2 * l] + v * xi[2 * lb]),
                    0.5 * (xi[2 * l + 1] + v * xi[2 * lb + 1]),
                ];
                let g = mat2_apply(&self.gamma_pm[a], &w);
                acc[0] += g[0];
                acc[1] += g[1];
            }
            out.values[2 * s] = acc[0] * self.frame[s];
            out.values[2 * s + 1] = acc[1] * self.frame[s];
        }
        out
    }

    fn dirac_gather_adjoint(&self, conn: &U1Connection, eta: &SpinorField) -> Vec<Complex64> {
        let m = self.m;
        let mut xi = vec![ZERO; m.n_sites() * 8];
        for s in 0..m.n_sites() {
            for a in 0..4 {
                let t = m.fwd(s, a);
                let l = s * 4 + a;
                let vc = cis(-m.spacing[a] * conn.a[l]);
                let e0 = eta.at2(s);
                let e1 = eta.at2(t);
                let w = [
                    0.5 * (e0[0] * self.frame[s] + vc * e1[0] * self.frame[t]),
                    0.5 * (e0[1] * self.frame[s] + vc * e1[1] * self.frame[t]),
                ];
                let g = mat2_apply(&adj2(&self.gamma_pm[a]), &w);
                xi[2 * l] = g[0];
                xi[2 * l + 1] = g[1];
            }
        }
        xi
    }

    /// `D⁺_A φ = Σ_a γ_a ∇_a φ` in the orthonormal frame.
    pub fn dirac_plus(&self, conn: &U1Connection, phi: &SpinorField) -> Result<SpinorField> {
        check_chirality(phi, Chirality::Plus)?;
        let xi = self.link_derivative(conn, phi)?;
        Ok(self.dirac_gather(conn, &xi))
    }

    /// `D⁻_A`, the weighted adjoint of [`Self::dirac_plus`].
    pub fn dirac_minus(&self, conn: &U1Connection, chi: &SpinorField) -> Result<SpinorField> {
        check_chirality(chi, Chirality::Minus)?;
        let m = self.m;
        let mut w = chi.clone();
        for s in 0..m.n_sites() {
            w.values[2 * s] *= m.volume_weight[s];
            w.values[2 * s + 1] *= m.volume_weight[s];
        }
        let xi = self.dirac_gather_adjoint(conn, &w);
        let mut out = self.link_derivative_adjoint(conn, &xi, Chirality::Plus)?;
        for s in 0..m.n_sites() {
            out.values[2 * s] /= m.volume_weight[s];
            out.values[2 * s + 1] /= m.volume_weight[s];
        }
        Ok(out)
    }

    /// Self-dual part of `F_A` at sites, frame components (coefficients of `i`).
    pub fn self_dual_frame(&self, conn: &U1Connection) -> Vec<[f64; 6]> {
        let f = gauge::curvature(self.m, conn);
        let fp = gauge::self_dual_part(&f).expect("degree 2");
        let avg = gauge::site_average(self.m, &fp);
        avg.into_iter()
            .zip(&self.m.u)
            .map(|(v, u)| {
                let c = exp(-2.0 * u);
                v.map(|x| x * c)
            })
            .collect()
    }

    /// `Δ_A φ + (k/4) φ + ½ F⁺_A · φ`.
    pub fn weitzenbock_rhs(&self, conn: &U1Connection, phi: &SpinorField) -> Result<SpinorField> {
        let mut out = self.l_a_apply(conn, phi)?;
        let fp = self.self_dual_frame(conn);
        for s in 0..self.m.n_sites() {
            let w = clifford::two_form_action_plus(&self.gs, &fp[s], &phi.at2(s));
            out.values[2 * s] += w[0] * 0.5;
            out.values[2 * s + 1] += w[1] * 0.5;
        }
        Ok(out)
    }
}

fn check_chirality(v: &SpinorField, expected: Chirality) -> Result<()> {
    if v.chirality != expected {
        return Err(Error::Chirality { expected: expected.name(), got: v.chirality.name() });
    }
    Ok(())
}

/// Forward covariant derivative along each axis, as four spinor fields.
pub fn covariant_derivative(g: &SpinGeometry, conn: &U1Connection, psi: &SpinorField) -> Result<[SpinorField; 4]> {
    let xi = g.link_derivative(conn, psi)?;
    let sites = g.m.n_sites();
    Ok([0, 1, 2, 3].map(|a| {
        let mut f = SpinorField::zeros(g.m, psi.chirality);
        for s in 0..sites {
            f.values[2 * s] = xi[(s * 4 + a) * 2];
            f.values[2 * s + 1] = xi[(s * 4 + a) * 2 + 1];
        }
        f
    }))
}

pub fn dirac_plus(g: &SpinGeometry, conn: &U1Connection, phi: &SpinorField) -> Result<SpinorField> {
    g.dirac_plus(conn, phi)
}

pub fn dirac_minus(g: &SpinGeometry, conn: &U1Connection, chi: &SpinorField) -> Result<SpinorField> {
    g.dirac_minus(conn, chi)
}

/// `‖D⁻D⁺φ - [Δ_A + k/4 + ½F⁺·]φ‖ / ‖φ‖` with volume weights.
pub fn weitzenbock_residual(g: &SpinGeometry, conn: &U1Connection, phi: &SpinorField) -> Result<f64> {
    let lhs = g.dirac_minus(conn, &g.dirac_plus(conn, phi)?)?;
    let rhs = g.weitzenbock_rhs(conn, phi)?;
    let n = spinor_norm(g.m, phi);
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(spinor_norm(g.m, &lhs.sub(&rhs)) / n)
}

/// Spin^c curvature split `F = R^S + i f_A·Id` at sites (coordinate
/// components over [`PAIRS`]).
#[derive(Debug, Clone)]
pub struct CurvatureDecomposition {
    /// Trace-free part on `S⁺`.
    pub spin: Vec<[Mat2; 6]>,
    /// `f_A` with `2i f_A` the curvature of the determinant line.
    pub f_a: Vec<[f64; 6]>,
    /// Total curvature on `S⁺`.
    pub total: Vec<[Mat2; 6]>,
}

/// Curvature of the full positive-spinor connection `Γ^S_i - i a_i`, built
/// from site-centred connection coefficients with central differences.
pub fn curvature_decomposition(g: &SpinGeometry, conn: &U1Connection) -> CurvatureDecomposition {
    let m = g.m;
    let sites = m.n_sites();
    // site-centred connection 2×2 blocks on S⁺
    let omega: Vec<[Mat2; 4]> = (0..sites)
        .map(|s| {
            [0, 1, 2, 3].map(|a| {
                let mut w = clifford::block(&g.connection.gamma[s][a], 1, 1);
                let ab = 0.5 * (conn.a[s * 4 + a] + conn.a[m.bwd(s, a) * 4 + a]);
                w[0][0] -= I * ab;
                w[1][1] -= I * ab;
                w
            })
        })
        .collect();
    let mut spin = Vec::with_capacity(sites);
    let mut f_a = Vec::with_capacity(sites);
    let mut total = Vec::with_capacity(sites);
    for s in 0..sites {
        let mut sp = [[[ZERO; 2]; 2]; 6];
        let mut fa = [0.0; 6];
        let mut tot = [[[ZERO; 2]; 2]; 6];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let di = |a: usize, r: usize, c: usize| {
                (omega[m.fwd(s, i)][a][r][c] - omega[m.bwd(s, i)][a][r][c]) / (2.0 * m.spacing[i])
            };
            let dj = |a: usize, r: usize, c: usize| {
                (omega[m.fwd(s, j)][a][r][c] - omega[m.bwd(s, j)][a][r][c]) / (2.0 * m.spacing[j])
            };
            let (wi, wj) = (&omega[s][i], &omega[s][j]);
            let mut f = [[ZERO; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    let mut comm = ZERO;
                    for k in 0..2 {
                        comm += wi[r][k] * wj[k][c] - wj[r][k] * wi[k][c];
                    }
                    f[r][c] = di(j, r, c) - dj(i, r, c) + comm;
                }
            }
            let tr = 0.5 * (f[0][0] + f[1][1]);
            fa[p] = tr.im;
            let mut r_s = f;
            r_s[0][0] -= tr;
            r_s[1][1] -= tr;
            sp[p] = r_s;
            tot[p] = f;
        }
        spin.push(sp);
        f_a.push(fa);
        total.push(tot);
    }
    CurvatureDecomposition { spin, f_a, total }
}

/// Spin lift of the Riemann tables: `Θ(R(∂_i, ∂_j))` on `S⁺`.
pub fn spin_curvature_from_tables(g: &SpinGeometry, t: &CurvatureTables, site: usize) -> [Mat2; 6] {
    PAIRS.map(|(i, j)| {
        let mut r = [[0.0; 4]; 4];
        for (l, row) in r.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = t.riemann(site, l, i, j, k);
            }
        }
        clifford::block(&clifford::theta_iso(&g.gs, &CliffordBivector::from_matrix(&r)), 1, 1)
    })
}

/// Pointwise sides of Kato's inequality and the worst margin.
#[derive(Debug, Clone)]
pub struct KatoReport {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: f64,
    pub scale: f64,
}

pub fn kato_check(g: &SpinGeometry, conn: &U1Connection, v: &SpinorField) -> Result<KatoReport> {
    let m = g.m;
    let xi = g.link_derivative(conn, v)?;
    let sites = m.n_sites();
    let mut lhs = vec![0.0; sites];
    let mut rhs = vec![0.0; sites];
    for s in 0..sites {
        let n0 = v.norm_at(s);
        for a in 0..4 {
            let t = m.fwd(s, a);
            let l = s * 4 + a;
            let f = m.link_frame_factor(s, a);
            let dn = (v.norm_at(t) - n0) / m.spacing[a] * f;
            lhs[s] += dn * dn;
            rhs[s] += (xi[2 * l].norm_sqr() + xi[2 * l + 1].norm_sqr()) * f * f;
        }
    }
    let mut margin = f64::INFINITY;
    for s in 0..sites {
        if v.norm_at(s) > 1e-8 {
            margin = margin.min(rhs[s] - lhs[s]);
        }
    }
    let scale = rhs.iter().fold(0.0, |a: f64, b| a.max(*b));
    Ok(KatoReport { lhs, rhs, margin, scale })
}

/// Result of trying to integrate `df = f ω`.
#[derive(Debug, Clone)]
pub struct IntegratingFactor {
    pub f: Option<Vec<f64>>,
    pub periods: [f64; 4],
}

pub fn integrating_factor(m: &LatticeManifold, w: &FormField) -> Result<IntegratingFactor> {
    if w.degree != 1 {
        return Err(Error::Degree(w.degree));
    }
    let dw = crate::lattice::d(m, w)?;
    let closed = dw.max_abs();
    if closed > 1e-8 {
        return Err(Error::Precondition(alloc::format!("form is not closed (|dω| = {closed:e})")));
    }
    let n = m.n;
    let periods = [0, 1, 2, 3].map(|a| {
        let mut acc = 0.0;
        let mut s = 0;
        for _ in 0..n {
            acc += w.at(s, a) * m.spacing[a];
            s = m.fwd(s, a);
        }
        acc
    });
    if periods.iter().any(|p| p.abs() >= 1e-8) {
        return Ok(IntegratingFactor { f: None, periods });
    }
    let sites = m.n_sites();
    let mut gpot = vec![0.0; sites];
    for s in 1..sites {
        let c = m.coords(s);
        let a = (0..4).rev().find(|&a| c[a] > 0).unwrap();
        let b = m.bwd(s, a);
        gpot[s] = gpot[b] + w.at(b, a) * m.spacing[a];
    }
    Ok(IntegratingFactor { f: Some(gpot.into_iter().map(exp).collect()), periods })
}

/// `max |D_a f - f̄ ω_a|` with `f̄` the link average, the O(h²) defect of `df = f ω`.
pub fn integrating_factor_defect(m: &LatticeManifold, f: &[f64], w: &FormField) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..m.n_sites() {
        for a in 0..4 {
            let t = m.fwd(s, a);
            let df = (f[t] - f[s]) / m.spacing[a];
            worst = worst.max((df - 0.5 * (f[s] + f[t]) * w.at(s, a)).abs());
        }
    }
    worst
}

/// `‖∇^A V‖_∞ / ‖V‖_∞` with frame-normalized link derivatives.
pub fn verify_parallel(g: &SpinGeometry, conn: &U1Connection, v: &SpinorField) -> Result<f64> {
    let vmax = v.max_norm();
    if vmax == 0.0 {
        return Err(Error::ZeroField);
    }
    let xi = g.link_derivative(conn, v)?;
    let mut worst: f64 = 0.0;
    for s in 0..g.m.n_sites() {
        for a in 0..4 {
            let l = s * 4 + a;
            let n = sqrt(xi[2 * l].norm_sqr() + xi[2 * l + 1].norm_sqr()) * g.m.link_frame_factor(s, a);
            worst = worst.max(n);
        }
    }
    Ok(worst / vmax)
}

/// `f_A` at sites in frame components, from the plaquette curvature.
pub fn f_a_frame(g: &SpinGeometry, conn: &U1Connection) -> Vec<[f64; 6]> {
    let f = gauge::curvature(g.m, conn);
    gauge::site_average(g.m, &f)
        .into_iter()
        .zip(&g.m.u)
        .map(|(v, u)| {
            let c = 0.5 * exp(-2.0 * u);
            v.map(|x| x * c)
        })
        .collect()
}

/// Matrix of `I_A` at one site: `(I_A)_{αβ} = 2i f_{βα}`, returned as the
/// real coefficient of `i`.
pub fn i_a_matrix(f: &[f64; 6]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        // f_{ij} = f[p], f_{ji} = -f[p]
        out[j][i] = 2.0 * f[p];
        out[i][j] = -2.0 * f[p];
    }
    out
}

/// `I_A(X)` per site (coefficients of `i`).
pub fn i_a_operator(g: &SpinGeometry, conn: &U1Connection, x: &[[f64; 4]]) -> Vec<[f64; 4]> {
    let f = f_a_frame(g, conn);
    f.iter()
        .zip(x)
        .map(|(fs, xs)| {
            let mat = i_a_matrix(fs);
            let mut out = [0.0; 4];
            for a in 0..4 {
                for b in 0..4 {
                    out[a] += mat[a][b] * xs[b];
                }
            }
            out
        })
        .collect()
}

/// `H_A(X, ψ) = -½ Σ_α γ_α F(e_α, X) ψ` with `F` the total spin^c curvature.
pub fn h_a_operator(g: &SpinGeometry, conn: &U1Connection, x: &[[f64; 4]], psi: &SpinorField) -> Result<SpinorField> {
    check_chirality(psi, Chirality::Plus)?;
    let dec = curvature_decomposition(g, conn);
    let m = g.m;
    let mut out = SpinorField::zeros(m, Chirality::Minus);
    for s in 0..m.n_sites() {
        let c = exp(-2.0 * m.u[s]);
        let v = psi.at2(s);
        let mut acc = [ZERO; 2];
        for al in 0..4 {
            let mut fx = [[ZERO; 2]; 2];
            for b in 0..4 {
                if let Some((p, sign)) = clifford::pair_index(al, b) {
                    for r in 0..2 {
                        for k in 0..2 {
                            fx[r][k] += dec.total[s][p][r][k] * (sign * x[s][b] * c);
                        }
                    }
                }
            }
            let w = mat2_apply(&g.gamma_pm[al], &mat2_apply(&fx, &v));
            acc[0] -= w[0] * 0.5;
            acc[1] -= w[1] * 0.5;
        }
        out.set2(s, acc);
    }
    Ok(out)
}
