//! JSON report shapes. Field order is fixed by the struct definitions, so
//! identical inputs serialize to identical bytes.

use serde::Serialize;
use swcore::spectral::SpectralResult;
use swcore::stability::{Certificate, StabilityReport, StabilitySample};

use crate::config::ExperimentConfig;

#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub threads: usize,
    pub manifold: ManifoldSummary,
    pub tolerances: ToleranceSummary,
    pub result: T,
}

#[derive(Debug, Serialize)]
pub struct ManifoldSummary {
    pub n: usize,
    pub lengths: [f64; 4],
    pub u: String,
    pub volume: f64,
}

/// Tolerances the operations actually ran with.
#[derive(Debug, Serialize)]
pub struct ToleranceSummary {
    pub eig_tol: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub solver: &'static str,
    pub precondition: bool,
    pub symmetry_check: f64,
    pub cg_tol: f64,
    pub armijo: f64,
    pub min_step: f64,
    pub unstable_threshold: f64,
}

impl ToleranceSummary {
    pub fn from_config(c: &ExperimentConfig) -> Self {
        let t = &c.tolerances;
        ToleranceSummary {
            eig_tol: t.eig_tol,
            max_iter: t.max_iter,
            grad_tol: t.grad_tol,
            solver: match t.solver {
                crate::config::Solver::Auto => "auto",
                crate::config::Solver::Dense => "dense",
                crate::config::Solver::Iterative => "iterative",
            },
            precondition: t.precondition,
            symmetry_check: 1e-8,
            cg_tol: 1e-10,
            armijo: swcore::functional::ARMIJO,
            min_step: swcore::functional::MIN_STEP,
            unstable_threshold: swcore::stability::unstable_threshold(t.eig_tol),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectralSummary {
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: &'static str,
}

impl From<&SpectralResult> for SpectralSummary {
    fn from(r: &SpectralResult) -> Self {
        SpectralSummary { eigenvalue: r.eigenvalue, residual: r.residual, iterations: r.iterations, method: r.method.name() }
    }
}

#[derive(Debug, Serialize)]
pub struct SampleRecord {
    pub label: String,
    pub jacobian_coord: [f64; 4],
    pub lambda_g: Option<f64>,
    pub lambda_c: Option<f64>,
    pub volume: f64,
    pub lambda_g_vol_half: Option<f64>,
    pub lambda_c_vol_half: Option<f64>,
    pub residual: Option<f64>,
    pub valid: bool,
    pub error: Option<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&StabilitySample> for SampleRecord {
    fn from(s: &StabilitySample) -> Self {
        SampleRecord {
            label: s.label.clone(),
            jacobian_coord: s.jacobian_coord,
            lambda_g: finite(s.lambda_g),
            lambda_c: finite(s.lambda_c),
            volume: s.volume,
            lambda_g_vol_half: finite(s.lambda_g_product),
            lambda_c_vol_half: finite(s.lambda_c_product),
            residual: finite(s.residual),
            valid: s.valid(),
            error: s.error.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StabilitySummary {
    pub samples: Vec<SampleRecord>,
    /// Sampled maxima, reported as lower bounds of the suprema.
    pub estimate_kind: &'static str,
    pub max_lambda_g_vol_half: Option<f64>,
    pub max_lambda_c_vol_half: Option<f64>,
    pub unstable_threshold: f64,
    pub verdict: &'static str,
    pub yamabe_quotients: Vec<(String, f64)>,
}

impl StabilitySummary {
    pub fn new(r: &StabilityReport, yamabe: Vec<(String, f64)>) -> Self {
        StabilitySummary {
            samples: r.samples.iter().map(SampleRecord::from).collect(),
            estimate_kind: "estimate (lower bound of sup)",
            max_lambda_g_vol_half: finite(r.max_lambda_g_product),
            max_lambda_c_vol_half: finite(r.max_lambda_c_product),
            unstable_threshold: r.unstable_threshold,
            verdict: r.verdict.name(),
            yamabe_quotients: yamabe,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CertificateSummary {
    pub lhs: f64,
    pub rhs: f64,
    pub l2: f64,
    pub l4: f64,
    pub rayleigh: f64,
    pub bound_on_lambda: f64,
    pub balance_defect: f64,
    pub el_residual: f64,
}

impl From<&Certificate> for CertificateSummary {
    fn from(c: &Certificate) -> Self {
        CertificateSummary {
            lhs: c.lhs,
            rhs: c.rhs,
            l2: c.l2,
            l4: c.l4,
            rayleigh: c.rayleigh,
            bound_on_lambda: c.bound_on_lambda,
            balance_defect: c.balance_defect,
            el_residual: c.el_residual,
        }
    }
}
