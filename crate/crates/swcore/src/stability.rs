//! Scale-invariant spectral quantities, sampled suprema over metrics and
//! the Jacobian torus, the Cauchy-Schwarz certificate, Chern numbers.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::functional::{module_norm, sw_gradient, Configuration};
use crate::gauge;
use crate::lattice::{self, build_torus_from_field, LatticeManifold};
use crate::real::sqrt;
use crate::spectral::{lambda_c, lambda_g, EigenOptions, Preconditioner};
use crate::spin::{spinor_inner, SpinGeometry, SpinorField};
use crate::{Error, Result};

/// Builds a preconditioner for a manifold and a number of channels per site.
pub type PreconditionerFactory = dyn Fn(&LatticeManifold, usize) -> Box<dyn Preconditioner> + Sync;

/// `λ_g · vol^{1/2}` for one metric.
pub fn perelman_quantity(m: &LatticeManifold, opts: &EigenOptions, pc: Option<&dyn Preconditioner>) -> Result<f64> {
    Ok(lambda_g(m, opts, pc)?.eigenvalue * sqrt(m.total_volume()))
}

/// `∫ k dv / vol^{1/2}`.
pub fn yamabe_quotient(m: &LatticeManifold) -> f64 {
    let total: f64 = m.scalar_curvature.iter().zip(&m.volume_weight).map(|(k, w)| k * w).sum();
    total / sqrt(m.total_volume())
}

/// A conformal factor sampled on the grid, with a label for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub label: String,
    pub u: Vec<f64>,
}

impl MetricSample {
    pub fn from_fn<F: Fn([f64; 4]) -> f64>(label: &str, n: usize, lengths: [f64; 4], f: F) -> Result<Self> {
        let m = lattice::build_torus(n, lengths, f)?;
        Ok(MetricSample { label: label.into(), u: m.u })
    }
}

/// `ε cos(2πx₁/L₁)` and the two-bump profile for `ε ∈ {0.1, 0.3, 0.5}`.
pub fn default_family(n: usize, lengths: [f64; 4]) -> Result<Vec<MetricSample>> {
    let mut out = Vec::new();
    for eps in [0.1, 0.3, 0.5] {
        out.push(MetricSample::from_fn(&format!("cos:{eps}"), n, lengths, lattice::cosine_profile(eps, 0, lengths[0]))?);
    }
    for eps in [0.1, 0.3, 0.5] {
        out.push(MetricSample::from_fn(&format!("two-bump:{eps}"), n, lengths, lattice::two_bump_profile(eps, lengths))?);
    }
    Ok(out)
}

/// Eight points along the first Jacobian axis.
pub fn default_jacobian_sweep() -> Vec<[f64; 4]> {
    (0..8).map(|j| [j as f64 / 8.0, 0.0, 0.0, 0.0]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySample {
    pub label: String,
    pub jacobian_coord: [f64; 4],
    pub lambda_g: f64,
    pub lambda_c: f64,
    pub volume: f64,
    pub lambda_g_product: f64,
    pub lambda_c_product: f64,
    pub residual: f64,
    /// Set when an eigensolve failed; the numbers are then NaN.
    pub error: Option<String>,
}

impl StabilitySample {
    pub fn valid(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unstable,
    NotDecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Unstable => "unstable",
            Verdict::NotDecided => "not-decided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub samples: Vec<StabilitySample>,
    /// Sampled maxima; lower bounds of the true suprema.
    pub max_lambda_g_product: f64,
    pub max_lambda_c_product: f64,
    pub unstable_threshold: f64,
    pub verdict: Verdict,
}

/// Threshold below which a sampled `λ^c` counts as negative.
pub fn unstable_threshold(eig_tol: f64) -> f64 {
    -(10.0 * eig_tol).max(1e-6)
}

/// Rebuild the report aggregates from the samples.
pub fn summarize(samples: Vec<StabilitySample>, eig_tol: f64) -> StabilityReport {
    let thr = unstable_threshold(eig_tol);
    let valid = || samples.iter().filter(|s| s.valid());
    let max_g = valid().map(|s| s.lambda_g_product).fold(f64::NEG_INFINITY, f64::max);
    let max_c = valid().map(|s| s.lambda_c_product).fold(f64::NEG_INFINITY, f64::max);
    let unstable = valid().any(|s| s.lambda_c < thr && s.residual <= eig_tol);
    StabilityReport {
        max_lambda_g_product: max_g,
        max_lambda_c_product: max_c,
        unstable_threshold: thr,
        verdict: if unstable { Verdict::Unstable } else { Verdict::NotDecided },
        samples,
    }
}

/// Evaluate `λ_g` and `λ^c_g(A)` on every (metric, Jacobian point) pair.
///
/// For each metric the connection is rebuilt from the harmonic basis of
/// that metric, so `A` stays in harmonic gauge. `pc`, when given, builds a
/// preconditioner for a manifold and a channel count (1 for functions, 4
/// for real components of positive spinors).
pub fn lambda_bar_c_estimate(
    family: &[MetricSample],
    jac: &[[f64; 4]],
    n: usize,
    lengths: [f64; 4],
    opts: &EigenOptions,
    pc: Option<&PreconditionerFactory>,
) -> Result<StabilityReport> {
    if family.is_empty() || jac.is_empty() {
        return Err(Error::Precondition("empty sample family".into()));
    }
    let mut samples = Vec::new();
    for f in family {
        let m = build_torus_from_field(n, lengths, f.u.clone())?;
        let vol = m.total_volume();
        let rv = sqrt(vol);
        let pc_g = pc.map(|f| f(&m, 1));
        let pc_c = pc.map(|f| f(&m, 4));
        let lg = lambda_g(&m, opts, pc_g.as_deref());
        let g = SpinGeometry::new(&m);
        for &coord in jac {
            let lc = gauge::connection_at(&m, coord).and_then(|a| lambda_c(&g, &a, opts, pc_c.as_deref()));
            let s = match (lg.as_ref(), lc.as_ref()) {
                (Ok(lg), Ok(lc)) => StabilitySample {
                    label: f.label.clone(),
                    jacobian_coord: coord,
                    lambda_g: lg.eigenvalue,
                    lambda_c: lc.eigenvalue,
                    volume: vol,
                    lambda_g_product: lg.eigenvalue * rv,
                    lambda_c_product: lc.eigenvalue * rv,
                    residual: lc.residual.max(lg.residual),
                    error: None,
                },
                (Err(e), _) | (_, Err(e)) => StabilitySample {
                    label: f.label.clone(),
                    jacobian_coord: coord,
                    lambda_g: f64::NAN,
                    lambda_c: f64::NAN,
                    volume: vol,
                    lambda_g_product: f64::NAN,
                    lambda_c_product: f64::NAN,
                    residual: f64::NAN,
                    error: Some(format!("{e}")),
                },
            };
            samples.push(s);
        }
    }
    Ok(summarize(samples, opts.tol))
}

/// The integral chain behind the instability argument, evaluated on a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// `∫ |∇^A φ|² + (k/4)|φ|²`.
    pub lhs: f64,
    /// `-¼ ∫ |φ|⁴`.
    pub rhs: f64,
    /// `∫ |φ|²`.
    pub l2: f64,
    /// `∫ |φ|⁴`.
    pub l4: f64,
    pub volume: f64,
    /// `lhs / ∫|φ|²`, an upper bound for `λ^c` that needs no balance.
    pub rayleigh: f64,
    /// `-¼ (∫|φ|⁴)^{1/2} / vol^{1/2}`, implied when `lhs = rhs`.
    pub bound_on_lambda: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)`.
    pub balance_defect: f64,
    /// Module norm of the full gradient divided by that of `φ`.
    pub el_residual: f64,
}

/// `(∫|φ|², vol^{1/2} (∫|φ|⁴)^{1/2})`; the first never exceeds the second.
pub fn cauchy_schwarz(m: &LatticeManifold, phi: &SpinorField) -> (f64, f64) {
    let (l2, l4) = moments(m, phi);
    (l2, sqrt(m.total_volume()) * sqrt(l4))
}

fn moments(m: &LatticeManifold, phi: &SpinorField) -> (f64, f64) {
    let mut l2 = 0.0;
    let mut l4 = 0.0;
    for (s, w) in m.volume_weight.iter().enumerate() {
        let p = phi.norm_at(s);
        l2 += w * p * p;
        l4 += w * p * p * p * p;
    }
    (l2, l4)
}

pub fn instability_certificate(g: &SpinGeometry, c: &Configuration) -> Result<Certificate> {
    let m = g.m;
    c.check(m)?;
    if c.phi.values.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return Err(Error::ZeroField);
    }
    let lphi = g.l_a_apply(&c.conn, &c.phi)?;
    let lhs = spinor_inner(m, &c.phi, &lphi);
    let (l2, l4) = moments(m, &c.phi);
    let rhs = -0.25 * l4;
    let volume = m.total_volume();
    let grad = sw_gradient(g, c)?;
    let el_residual = module_norm(m, &grad) / sqrt(2.0 * l2);
    Ok(Certificate {
        lhs,
        rhs,
        l2,
        l4,
        volume,
        rayleigh: lhs / l2,
        bound_on_lambda: -0.25 * sqrt(l4) / sqrt(volume),
        balance_defect: (lhs - rhs).abs() / lhs.abs().max(rhs.abs()),
        el_residual,
    })
}

/// Second Chern numbers of the half-spinor bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChernData {
    pub c2_plus: Ratio<i128>,
    pub c2_minus: Ratio<i128>,
    /// False when either value is non-integral, which obstructs the data.
    pub integral: bool,
}

/// `c₂(S±) = ¼[c₁² ∓ 2χ - 3σ]`.
pub fn chern_data(c1_sq: i64, euler: i64, signature: i64) -> ChernData {
    let (c, x, s) = (c1_sq as i128, euler as i128, signature as i128);
    let c2_plus = Ratio::new(c - 2 * x - 3 * s, 4);
    let c2_minus = Ratio::new(c + 2 * x - 3 * s, 4);
    ChernData { c2_plus, c2_minus, integral: c2_plus.is_integer() && c2_minus.is_integer() }
}

#[cfg(test)]
mod tests;
