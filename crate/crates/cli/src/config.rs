//! Run configuration, one JSON document per run.

use std::path::{Path, PathBuf};

use mcmc_certify::bounds::{C0Variant, GeometricDriftParams, MomentInputs, PolynomialDriftParams};
use mcmc_certify::models::{
    ContractingNormalsParams, HierTParams, MomentPolicy, PumpHyper, ToyPolyParams,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Bound,
    Simulate,
    Constants,
    Confidence,
    Sweep,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    /// Which `phi_i` is the target.
    #[serde(default)]
    pub component: usize,
    #[serde(default)]
    pub hyper: PumpHyper,
}

/// Keyed by model name, e.g. `{"hier_t": {"t": 50, "a": 4.3}}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    HierT(HierTParams),
    ContractingNormals(ContractingNormalsParams),
    Pump(PumpSpec),
    ToyPoly(ToyPolyParams),
    /// A user chain known only through its geometric drift constants.
    Geometric(GeometricDriftParams),
    /// A user chain known only through its polynomial drift constants.
    Polynomial(PolynomialDriftParams),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceSpec {
    pub epsilon: f64,
    pub alpha: f64,
    #[serde(default)]
    pub ceiling: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    SigmaBoundKnownPiV,
    SigmaBoundDriftOnly,
    NMinKnownPiV,
    NMinDriftOnly,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    pub objective: Objective,
}

fn default_points() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the subcommand when present.
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    /// Moments for `geometric` / `polynomial` chains.
    #[serde(default)]
    pub moments: Option<MomentInputs>,
    #[serde(default)]
    pub policy: Option<MomentPolicy>,
    #[serde(default)]
    pub c0_variant: Option<C0Variant>,
    /// Horizons for RMSE bounds, simulation length and RMSE estimates.
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default)]
    pub replicates: Option<usize>,
    #[serde(default)]
    pub tours: Option<usize>,
    #[serde(default)]
    pub chains: Option<usize>,
    #[serde(default)]
    pub n_for_c2: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Starting state for scalar chains.
    #[serde(default)]
    pub x0: Option<f64>,
    #[serde(default)]
    pub confidence: Option<ConfidenceSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub table: Option<u8>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn model(&self) -> Result<&ModelSpec, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("`model` is required for this task".into()))
    }
}
