//! Seiberg-Witten energy, monopole residuals, exact gradient and descent.
//!
//! The energy is
//!
//! `E = ∫ ¼|F_A|² + |∇^A φ|² + ⅛(|φ|² + k)² - k²/8 + 2π² N`
//!
//! with `|F|²` the tensor norm. Tangent vectors `(θ, V)` are measured in
//! the module metric `Σ 4 W₁ θ·θ' + Σ 2 W₀ Re⟨V, V'⟩` (the factor 4 turns
//! link units into determinant-line units). In this metric the Riesz
//! gradient reads `(d*F-part + current, Δ_A φ + ¼(|φ|² + k) φ)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::clifford::{self, mat2_apply};
use crate::gauge::{self, U1Connection};
use crate::lattice::{self, FormField, LatticeManifold, ValueType};
use crate::real::{cis, sqrt};
use crate::spin::{spinor_norm, Chirality, SpinGeometry, SpinorField};
use crate::{Complex64, Error, Result};

/// A point `(A, φ)` of the configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub conn: U1Connection,
    pub phi: SpinorField,
}

impl Configuration {
    pub fn reducible(m: &LatticeManifold, conn: U1Connection) -> Self {
        Configuration { conn, phi: SpinorField::plus_zero(m) }
    }

    pub fn check(&self, m: &LatticeManifold) -> Result<()> {
        self.conn.check(m)?;
        if self.phi.chirality != Chirality::Plus {
            return Err(Error::Chirality { expected: "plus", got: self.phi.chirality.name() });
        }
        if self.phi.sites() != m.n_sites() {
            return Err(Error::Shape("spinor and manifold disagree in size".into()));
        }
        if !self.phi.is_finite() {
            return Err(Error::NonFinite("spinor"));
        }
        Ok(())
    }

    pub fn step(&self, t: &Tangent, s: f64) -> Self {
        let mut c = self.clone();
        crate::linalg::axpy(s, &t.theta, &mut c.conn.a);
        for (z, w) in c.phi.values.iter_mut().zip(&t.v.values) {
            *z += w * s;
        }
        c
    }
}

/// Tangent vector `(θ, V)`: link field and positive spinor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub theta: Vec<f64>,
    pub v: SpinorField,
}

impl Tangent {
    pub fn zero(m: &LatticeManifold) -> Self {
        Tangent { theta: vec![0.0; m.n_sites() * 4], v: SpinorField::plus_zero(m) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Tangent { theta: self.theta.iter().map(|x| x * s).collect(), v: self.v.scaled(s) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Tangent { theta: self.theta.iter().zip(&o.theta).map(|(a, b)| a + b).collect(), v: self.v.add(&o.v) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scaled(-1.0))
    }

    /// Real coordinates `[θ..., re/im of V...]`.
    pub fn to_real(&self) -> Vec<f64> {
        let mut out = self.theta.clone();
        out.extend(self.v.to_real());
        out
    }

    pub fn from_real(links: usize, x: &[f64]) -> Self {
        Tangent { theta: x[..links].to_vec(), v: SpinorField::from_real(Chirality::Plus, &x[links..]) }
    }
}

/// Module metric `Σ 4 W₁ θθ' + Σ 2 W₀ Re⟨V, V'⟩`.
pub fn module_inner(m: &LatticeManifold, a: &Tangent, b: &Tangent) -> f64 {
    let conn: f64 = a.theta.iter().zip(&b.theta).zip(&m.link_weight).map(|((x, y), w)| 4.0 * w * x * y).sum();
    conn + 2.0 * crate::spin::spinor_inner(m, &a.v, &b.v)
}

pub fn module_norm(m: &LatticeManifold, a: &Tangent) -> f64 {
    sqrt(module_inner(m, a, a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub curvature_term: f64,
    pub dirichlet_term: f64,
    pub potential_term: f64,
    pub k2_term: f64,
    pub topological_term: f64,
    pub total: f64,
}

pub fn sw_energy(g: &SpinGeometry, c: &Configuration) -> Result<EnergyBreakdown> {
    let m = g.m;
    c.check(m)?;
    let f = gauge::curvature(m, &c.conn);
    let curvature_term = 0.25 * 2.0 * m.plaquette_weight * f.data.iter().map(|x| x * x).sum::<f64>();
    let xi = g.link_derivative(&c.conn, &c.phi)?;
    let dirichlet_term: f64 = m.link_weight.iter().enumerate().map(|(l, w)| w * (xi[2 * l].norm_sqr() + xi[2 * l + 1].norm_sqr())).sum();
    let mut potential_term = 0.0;
    let mut k2_term = 0.0;
    for s in 0..m.n_sites() {
        let p = c.phi.values[2 * s].norm_sqr() + c.phi.values[2 * s + 1].norm_sqr();
        let k = m.scalar_curvature[s];
        potential_term += m.volume_weight[s] * (p + k) * (p + k) / 8.0;
        k2_term -= m.volume_weight[s] * k * k / 8.0;
    }
    let topological_term = 2.0 * PI * PI * gauge::topological_number(m, &f);
    let total = curvature_term + dirichlet_term + potential_term + k2_term + topological_term;
    if !total.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    Ok(EnergyBreakdown { curvature_term, dirichlet_term, potential_term, k2_term, topological_term, total })
}

/// First-order monopole residuals.
#[derive(Debug, Clone)]
pub struct MonopoleResidual {
    /// `D⁺_A φ`.
    pub r1: SpinorField,
    /// `F⁺_A - σ(φ)` at sites, frame components (coefficients of `i`).
    pub r2: FormField,
    /// `‖r1‖² + ‖r2‖²`, the 2-form part in the form norm.
    pub norm: f64,
}

pub fn monopole_residual(g: &SpinGeometry, c: &Configuration) -> Result<MonopoleResidual> {
    let m = g.m;
    c.check(m)?;
    let r1 = g.dirac_plus(&c.conn, &c.phi)?;
    let fp = g.self_dual_frame(&c.conn);
    let mut r2 = FormField::zeros(m, 2, ValueType::Imaginary);
    let mut n2 = 0.0;
    for s in 0..m.n_sites() {
        let sig = clifford::sigma_map(&g.gs, &c.phi.at2(s));
        let mut loc = 0.0;
        for p in 0..6 {
            let v = fp[s][p] - sig[p];
            r2.data[s * 6 + p] = v;
            loc += v * v;
        }
        n2 += m.volume_weight[s] * loc;
    }
    let n1 = spinor_norm(m, &r1);
    Ok(MonopoleResidual { r1, r2, norm: n1 * n1 + n2 })
}

/// Riesz gradient in the module metric.
pub fn sw_gradient(g: &SpinGeometry, c: &Configuration) -> Result<Tangent> {
    let m = g.m;
    c.check(m)?;
    let f = lattice::d(m, &c.conn.as_form())?;
    let ddf = lattice::codifferential(m, &f)?;
    let mut theta = ddf.data;
    let sites = m.n_sites();
    for s in 0..sites {
        let v = c.phi.at2(s);
        for a in 0..4 {
            let t = m.fwd(s, a);
            let l = s * 4 + a;
            let h = m.spacing[a];
            let (fw, bk) = g.plus_link(s, a);
            let u = cis(-h * c.conn.a[l]);
            let w = c.phi.at2(t);
            let q = mat2_apply(&fw, &[w[0] * u, w[1] * u]);
            let p = mat2_apply(&bk, &v);
            let ip = p[0] * q[0].conj() + p[1] * q[1].conj();
            theta[l] += ip.im / (2.0 * h);
        }
    }
    let mut gphi = g.connection_laplacian(&c.conn, &c.phi)?;
    for s in 0..sites {
        let v = c.phi.at2(s);
        let coef = 0.25 * (v[0].norm_sqr() + v[1].norm_sqr() + m.scalar_curvature[s]);
        gphi.values[2 * s] += v[0] * coef;
        gphi.values[2 * s + 1] += v[1] * coef;
    }
    Ok(Tangent { theta, v: gphi })
}

/// Directional derivative of [`sw_gradient`] at `c` along `xi`.
pub fn hessian_apply(g: &SpinGeometry, c: &Configuration, xi: &Tangent) -> Result<Tangent> {
    let m = g.m;
    c.check(m)?;
    let sites = m.n_sites();
    let dth = lattice::d(m, &FormField::from_data(1, ValueType::Imaginary, xi.theta.clone()))?;
    let mut theta = lattice::codifferential(m, &dth)?.data;
    // link data: Q = M⁺ U φ(t), δQ, and the perturbation of ∇φ
    let mut dgrad = vec![Complex64::new(0.0, 0.0); sites * 8];
    let phi_grad = g.link_derivative(&c.conn, &c.phi)?;
    for s in 0..sites {
        let v = c.phi.at2(s);
        let dv = xi.v.at2(s);
        for a in 0..4 {
            let t = m.fwd(s, a);
            let l = s * 4 + a;
            let h = m.spacing[a];
            let (fw, bk) = g.plus_link(s, a);
            let u = cis(-h * c.conn.a[l]);
            let w = c.phi.at2(t);
            let dw = xi.v.at2(t);
            let q = mat2_apply(&fw, &[w[0] * u, w[1] * u]);
            let th = xi.theta[l];
            let ih = Complex64::new(0.0, -h * th);
            let dq = mat2_apply(&fw, &[(dw[0] + ih * w[0]) * u, (dw[1] + ih * w[1]) * u]);
            let p = mat2_apply(&bk, &v);
            let dp = mat2_apply(&bk, &dv);
            let ip = dp[0] * q[0].conj() + dp[1] * q[1].conj() + p[0] * dq[0].conj() + p[1] * dq[1].conj();
            theta[l] += ip.im / (2.0 * h);
            // δ(∇φ) from θ only: -iθ Q
            let mi = Complex64::new(0.0, -th);
            dgrad[2 * l] = mi * q[0];
            dgrad[2 * l + 1] = mi * q[1];
        }
    }
    // δΔ_A φ = W₀⁻¹ [δ∇ᴴ W₁ ∇φ + ∇ᴴ W₁ δ∇ φ]
    for (l, w) in m.link_weight.iter().enumerate() {
        dgrad[2 * l] *= *w;
        dgrad[2 * l + 1] *= *w;
    }
    let mut dlap = g.link_derivative_adjoint(&c.conn, &dgrad, Chirality::Plus)?;
    for s in 0..sites {
        for a in 0..4 {
            let t = m.fwd(s, a);
            let l = s * 4 + a;
            let h = m.spacing[a];
            let (fw, _) = g.plus_link(s, a);
            let w1 = m.link_weight[l];
            let x = [phi_grad[2 * l] * w1, phi_grad[2 * l + 1] * w1];
            let fwh = [[fw[0][0].conj(), fw[1][0].conj()], [fw[0][1].conj(), fw[1][1].conj()]];
            let pz = mat2_apply(&fwh, &x);
            let z = cis(h * c.conn.a[l]) * Complex64::new(0.0, xi.theta[l]);
            dlap.values[2 * t] += pz[0] * z;
            dlap.values[2 * t + 1] += pz[1] * z;
        }
    }
    let lap_v = g.connection_laplacian(&c.conn, &xi.v)?;
    let mut v = lap_v;
    for s in 0..sites {
        let p = c.phi.at2(s);
        let dv = xi.v.at2(s);
        let inv = 1.0 / m.volume_weight[s];
        let n2 = p[0].norm_sqr() + p[1].norm_sqr();
        let coef = 0.25 * (n2 + m.scalar_curvature[s]);
        let re = (p[0] * dv[0].conj() + p[1] * dv[1].conj()).re;
        for k in 0..2 {
            v.values[2 * s + k] += dlap.values[2 * s + k] * inv + dv[k] * coef + p[k] * (0.5 * re);
        }
    }
    Ok(Tangent { theta, v })
}

/// `k̄ = max(0, sup(-k))`.
pub fn k_bar(m: &LatticeManifold) -> f64 {
    m.scalar_curvature.iter().fold(0.0, |a: f64, k| a.max(-k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Fixed(f64),
    /// Backtracking from the given initial step, halving until the Armijo
    /// condition with constant `1e-4` holds.
    Backtracking(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub phi_inf: f64,
    pub residual: f64,
    pub step_size: f64,
    /// `‖φ‖_∞ ≥ √k̄`: excluded from monopole candidacy.
    pub excluded: bool,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub trace: Vec<FlowRecord>,
    pub accepted: usize,
    pub final_config: Configuration,
    pub converged: bool,
}

pub const ARMIJO: f64 = 1e-4;
pub const MIN_STEP: f64 = 1e-14;

/// Steepest descent in the module metric.
pub fn gradient_flow(g: &SpinGeometry, c0: &Configuration, steps: usize, rule: StepRule, grad_tol: f64) -> Result<FlowResult> {
    let m = g.m;
    let kb = sqrt(k_bar(m));
    let mut c = c0.clone();
    let mut e = sw_energy(g, &c)?.total;
    let mut trace = Vec::new();
    let mut accepted = 0;
    let mut eta = match rule {
        StepRule::Fixed(s) | StepRule::Backtracking(s) => s,
    };
    let record = |k: usize, c: &Configuration, e: f64, gn: f64, eta: f64| -> Result<FlowRecord> {
        let phi_inf = c.phi.max_norm();
        Ok(FlowRecord {
            step: k,
            energy: e,
            grad_norm: gn,
            phi_inf,
            residual: monopole_residual(g, c)?.norm,
            step_size: eta,
            excluded: phi_inf > 0.0 && phi_inf >= kb,
        })
    };
    let mut converged = false;
    for k in 0..steps {
        let grad = sw_gradient(g, &c)?;
        let gn2 = module_inner(m, &grad, &grad);
        trace.push(record(k, &c, e, sqrt(gn2), eta)?);
        if sqrt(gn2) <= grad_tol {
            converged = true;
            break;
        }
        match rule {
            StepRule::Fixed(s) => {
                let trial = c.step(&grad, -s);
                let et = sw_energy(g, &trial)?.total;
                if et > e {
                    return Err(Error::EnergyIncrease { iteration: k, step: s });
                }
                c = trial;
                e = et;
            }
            StepRule::Backtracking(_) => {
                loop {
                    if eta < MIN_STEP {
                        return Err(Error::StepUnderflow { iteration: k, min_step: MIN_STEP });
                    }
                    let trial = c.step(&grad, -eta);
                    let et = match sw_energy(g, &trial) {
                        Ok(b) => b.total,
                        Err(Error::NonFinite(_)) => f64::INFINITY,
                        Err(err) => return Err(err),
                    };
                    if et <= e - ARMIJO * eta * gn2 {
                        c = trial;
                        e = et;
                        break;
                    }
                    eta *= 0.5;
                }
                eta *= 2.0;
            }
        }
        accepted += 1;
    }
    if !converged {
        let grad = sw_gradient(g, &c)?;
        let gn = module_norm(m, &grad);
        trace.push(record(trace.len(), &c, e, gn, eta)?);
        converged = gn <= grad_tol;
    }
    Ok(FlowResult { trace, accepted, final_config: c, converged })
}

/// The identity defect `E - ‖r‖² - 2π²N`.
pub fn energy_identity_defect(g: &SpinGeometry, c: &Configuration) -> Result<f64> {
    let e = sw_energy(g, c)?;
    let r = monopole_residual(g, c)?;
    Ok(e.total - r.norm - e.topological_term)
}
