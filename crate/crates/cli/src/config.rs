//! Run configuration: built-in defaults, optionally overridden by a TOML file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bellman_riesz::estimates::{WeightFamily, TRUNCATION_LADDER};
use bellman_riesz::gauss::{FlowGrid, WeightSpec};
use bellman_riesz::quadrature::DEFAULT_SUBORDINATION_NODES;
use bellman_riesz::verify::SuiteConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    /// Only available for `sweep`.
    Csv,
}

/// Every parameter of every subcommand. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Report path; standard output when absent.
    pub out: Option<PathBuf>,
    pub format: Format,
    pub grid: GridConfig,
    pub verify_bellman: SuiteConfig,
    pub aux_bounds: AuxConfig,
    pub a2: WeightConfig,
    pub riesz_norm: NormConfig,
    pub embedding: EmbeddingConfig,
    pub repr_check: ReprConfig,
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Space-time grid for `sup_{(x,t)}`: symmetric `x` nodes and log-spaced `t` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub x_max: f64,
    pub x_step: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub subordination_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_max: 8.0,
            x_step: 0.25,
            t_min: 1e-3,
            t_max: 32.0,
            t_count: 40,
            subordination_nodes: DEFAULT_SUBORDINATION_NODES,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<FlowGrid> {
        Ok(FlowGrid::regular(self.x_max, self.x_step, self.t_min, self.t_max, self.t_count, self.subordination_nodes)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuxConfig {
    pub q_list: Vec<f64>,
    /// Side length of the `(rs, r/s)` grid.
    pub grid: usize,
    pub fd_step: f64,
}

impl Default for AuxConfig {
    fn default() -> Self {
        Self { q_list: vec![1.0, 2.0, 10.0, 100.0], grid: 200, fd_step: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightConfig {
    pub weight: WeightSpec,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self { weight: WeightSpec::ExpLinear(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormConfig {
    pub weight: WeightSpec,
    /// Dimension of the test subspace `span{ĥ_1..ĥ_N}`.
    pub n: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self { weight: WeightSpec::ExpLinear(1.0), n: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddingConfig {
    /// Hermite coefficients of `f`; the constant term must vanish.
    pub f: Vec<f64>,
    /// Hermite coefficients of the one-form `g`.
    pub g: Vec<f64>,
    pub weight: WeightSpec,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self { f: vec![0.0, 1.0], g: vec![1.0], weight: WeightSpec::Constant(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReprConfig {
    pub n_list: Vec<usize>,
    /// Largest accepted `||lhs| − |rhs||`.
    pub tol: f64,
}

impl Default for ReprConfig {
    fn default() -> Self {
        Self { n_list: vec![1, 2, 4, 9], tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub family: WeightFamily,
    pub params: Vec<f64>,
    pub n: usize,
    pub ladder: Vec<u32>,
    pub ladder_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            family: WeightFamily::ExpLinear,
            params: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            n: 32,
            ladder: TRUNCATION_LADDER.to_vec(),
            ladder_tol: 1e-3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg: RunConfig = toml::from_str(
            "format = \"csv\"\n[a2]\nweight = \"trunc:n=4:exp:a=1\"\n[verify_bellman]\nq_list = [3.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.a2.weight.to_string(), "trunc:n=4:exp:a=1");
        assert_eq!(cfg.verify_bellman.q_list, vec![3.0]);
        assert_eq!(cfg.verify_bellman.samples_per_q, SuiteConfig::default().samples_per_q);
        assert_eq!(cfg.sweep, SweepConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<RunConfig>("[grid]\nx_mx = 1.0").is_err());
        assert!(toml::from_str::<RunConfig>("[verify_bellman]\nsample = 3").is_err());
    }

    #[test]
    fn default_grid_matches_library() {
        assert_eq!(GridConfig::default().build().unwrap(), FlowGrid::default());
    }
}
