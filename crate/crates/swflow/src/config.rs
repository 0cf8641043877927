//! Experiment configuration (TOML) and its validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::uspec::USpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Curvature,
    Kato,
    Spectrum,
    Flow,
    Stability,
    Certify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Curvature => "curvature",
            Task::Kato => "kato",
            Task::Spectrum => "spectrum",
            Task::Flow => "flow",
            Task::Stability => "stability",
            Task::Certify => "certify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub n: usize,
    #[serde(default = "unit_lengths")]
    pub lengths: [f64; 4],
    #[serde(default = "flat_u")]
    pub u: String,
}

fn unit_lengths() -> [f64; 4] {
    [1.0; 4]
}

fn flat_u() -> String {
    "flat".into()
}

/// Either a point of the Jacobian torus or a seeded random connection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConnectionConfig {
    #[serde(default)]
    pub jacobian: [f64; 4],
    /// Amplitude of an added seeded random link field; zero keeps `A` flat.
    #[serde(default)]
    pub random_amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_eig_tol")]
    pub eig_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "yes")]
    pub precondition: bool,
}

fn default_eig_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    5000
}
fn default_grad_tol() -> f64 {
    1e-8
}
fn yes() -> bool {
    true
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eig_tol: default_eig_tol(), max_iter: default_max_iter(), grad_tol: default_grad_tol(), solver: Solver::Auto, precondition: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    #[default]
    Backtracking,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub rule: Rule,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Amplitude of the seeded random initial spinor.
    #[serde(default = "default_phi_amp")]
    pub phi_amplitude: f64,
}

fn default_steps() -> usize {
    200
}
fn default_step() -> f64 {
    1e-2
}
fn default_phi_amp() -> f64 {
    0.1
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { steps: default_steps(), rule: Rule::Backtracking, step: default_step(), phi_amplitude: default_phi_amp() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    /// u-specs; empty selects the default family.
    #[serde(default)]
    pub family: Vec<String>,
    #[serde(default = "default_jac_points")]
    pub jacobian_points: usize,
}

fn default_jac_points() -> usize {
    8
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { family: Vec::new(), jacobian_points: default_jac_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatoConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    20
}

impl Default for KatoConfig {
    fn default() -> Self {
        KatoConfig { samples: default_samples() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "one")]
    pub threads: usize,
    pub manifold: ManifoldConfig,
    #[serde(default)]
    pub connection: ConnectionConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub kato: KatoConfig,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Read a config; a relative `output` is resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut c = Self::from_toml(&text)?;
        if c.output.is_relative() {
            if let Some(dir) = path.parent() {
                c.output = dir.join(&c.output);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        let n = self.manifold.n;
        if n < 4 || !n.is_multiple_of(2) {
            return bad(format!("manifold.n must be even and at least 4, got {n}"));
        }
        if self.manifold.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return bad("manifold.lengths must be positive".into());
        }
        self.u_spec()?;
        for f in &self.stability.family {
            USpec::parse(f).map_err(|e| CliError::Validation(format!("stability.family: {e}")))?;
        }
        let t = &self.tolerances;
        let positive = t.eig_tol > 0.0 && t.eig_tol.is_finite() && t.grad_tol >= 0.0;
        if !positive || t.max_iter == 0 {
            return bad("tolerances must be positive".into());
        }
        if self.threads == 0 {
            return bad("threads must be at least 1".into());
        }
        if !(self.flow.step > 0.0 && self.flow.step.is_finite()) || !self.flow.phi_amplitude.is_finite() {
            return bad("flow.step must be positive and finite".into());
        }
        if self.connection.jacobian.iter().any(|x| !x.is_finite()) || !self.connection.random_amplitude.is_finite() {
            return bad("connection values must be finite".into());
        }
        if self.stability.jacobian_points == 0 || self.kato.samples == 0 {
            return bad("sample counts must be positive".into());
        }
        if matches!(t.solver, Solver::Dense) && self.task != Task::Curvature {
            let dim = match self.task {
                Task::Spectrum | Task::Stability | Task::Certify => 4 * n.pow(4),
                _ => 0,
            };
            if dim > swcore::spectral::DENSE_LIMIT {
                return bad(format!("dense solver limited to dimension {}, problem has {dim}", swcore::spectral::DENSE_LIMIT));
            }
        }
        Ok(())
    }

    pub fn u_spec(&self) -> Result<USpec, CliError> {
        USpec::parse(&self.manifold.u).map_err(|e| CliError::Validation(format!("manifold.u: {e}")))
    }

    /// SHA-256 of the canonical JSON form of the parsed config.
    ///
    /// The output directory is excluded so relocating a run keeps its hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        let canon = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&canon))
    }
}
