//! Run configuration: one TOML file, every section optional.
//!
//! Precedence, lowest first: built-in defaults, the config file, command
//! line flags. Relative paths in the file resolve against the file's
//! directory. Every output carries [`config_hash`] of the final config.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dataset::DatasetConfig;
use crate::error::{Error, Result};
use crate::evaluator::{CostModel, TrainConfig};
use crate::planner::{GanConfig, PlannerConfig, SamplerToggles};
use crate::raster::RasterConfig;
use crate::samplers::ExpertDbConfig;
use crate::simulator::{builtin_scenario, SimConfig};
use crate::time::{DT, HISTORY_STEPS, HORIZON_STEPS};
use crate::types::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub latent_dim: usize,
    pub modes: usize,
    pub latent_scale: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { latent_dim: 4, modes: 8, latent_scale: 0.5, seed: 3 }
    }
}

/// The fixed time base. Present in the file only so that a config written
/// for a different clock is rejected instead of silently reinterpreted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeBase {
    pub dt: f64,
    pub horizon_steps: usize,
    pub history_steps: usize,
}

impl Default for TimeBase {
    fn default() -> Self {
        Self { dt: DT, horizon_steps: HORIZON_STEPS, history_steps: HISTORY_STEPS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub time: TimeBase,
    /// Grid used by `export-raster` and by scenarios that leave theirs unset.
    pub grid: GridSpec,
    pub raster: RasterConfig,
    pub planner: PlannerConfig,
    /// Initial or fixed cost model (alpha, beta and weights).
    pub model: CostModel,
    pub train: TrainConfig,
    pub gan: GanConfig,
    pub generator: GeneratorConfig,
    pub dataset: DatasetConfig,
    pub expert_db: ExpertDbConfig,
    pub sim: SimConfig,
    /// Sampler combinations compared by `metrics`, e.g. `"lattice+curve"`.
    pub sweeps: Vec<String>,
    /// Built-in scenario names or paths to scenario files.
    pub scenarios: Vec<String>,
    /// Trained model file to load instead of `model`.
    pub model_path: Option<PathBuf>,
    /// Expert database file enabling the retrieval sampler.
    pub expert_db_path: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            time: TimeBase::default(),
            grid: GridSpec::default(),
            raster: RasterConfig::default(),
            planner: PlannerConfig::default(),
            model: CostModel::default(),
            train: TrainConfig::default(),
            gan: GanConfig::default(),
            generator: GeneratorConfig::default(),
            dataset: DatasetConfig::default(),
            expert_db: ExpertDbConfig::default(),
            sim: SimConfig::default(),
            sweeps: ["curve", "lattice", "lattice+curve"].map(String::from).to_vec(),
            scenarios: crate::simulator::SCENARIO_NAMES.map(String::from).to_vec(),
            model_path: None,
            expert_db_path: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Loads a TOML file, resolves its relative paths and validates it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.resolve(path.parent().unwrap_or(Path::new(".")));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("malformed config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(format!("cannot write config: {e}")))
    }

    /// Rebases relative paths onto `base`. Built-in scenario names are kept.
    pub fn resolve(&mut self, base: &Path) {
        let rebase = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        for s in &mut self.scenarios {
            if builtin_scenario(s).is_none() {
                *s = rebase(Path::new(s)).to_string_lossy().into_owned();
            }
        }
        self.model_path = self.model_path.as_deref().map(rebase);
        self.expert_db_path = self.expert_db_path.as_deref().map(rebase);
        self.output_dir = rebase(&self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let t = self.time;
        if t.dt != DT || t.horizon_steps != HORIZON_STEPS || t.history_steps != HISTORY_STEPS {
            errs.push(format!(
                "time base must be dt={DT}, horizon_steps={HORIZON_STEPS}, history_steps={HISTORY_STEPS}"
            ));
        }
        errs.extend(self.grid.violations());
        if !self.model.is_valid() {
            errs.push("model: weights must be finite and alpha, beta non-negative".into());
        }
        for s in &self.sweeps {
            if SamplerToggles::parse(s).is_none() {
                errs.push(format!("sweeps: unknown sampler combination {s:?}"));
            }
        }
        for s in &self.scenarios {
            if builtin_scenario(s).is_none() && !Path::new(s).is_file() {
                errs.push(format!("scenarios: {s:?} is neither a built-in scenario nor a file"));
            }
        }
        for p in [&self.model_path, &self.expert_db_path].into_iter().flatten() {
            if !p.is_file() {
                errs.push(format!("missing file {}", p.display()));
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(Error::Validation(errs)) }
    }
}

/// First 16 hex digits of the SHA-256 of the config's canonical JSON.
/// `output_dir` is left out: where results go does not change them.
pub fn config_hash(config: &RunConfig) -> String {
    let keyed = RunConfig { output_dir: PathBuf::new(), ..config.clone() };
    let json = serde_json::to_string(&keyed).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig { model_path: Some("m.json".into()), ..RunConfig::default() };
        assert_eq!(RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn partial_sections_override() {
        let cfg = RunConfig::from_toml("[model]\nalpha = 2.5\n[planner.safety]\nlambda = 0.3\n").unwrap();
        assert_eq!(cfg.model.alpha, 2.5);
        assert_eq!(cfg.model.beta, CostModel::default().beta);
        assert_eq!(cfg.planner.safety.lambda, 0.3);
    }

    #[test]
    fn wrong_time_base_is_rejected() {
        let cfg = RunConfig::from_toml("[time]\nhorizon_steps = 20\n").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_malformed() {
        assert!(matches!(RunConfig::from_toml("grid = 3"), Err(Error::Format(_))));
        assert!(matches!(RunConfig::from_toml("scenaros = []"), Err(Error::Format(_))));
    }

    #[test]
    fn relative_paths_resolve_against_the_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("scene.json"), "{}").unwrap();
        fs::write(dir.path().join("run.toml"), "scenarios = [\"lead_brake\", \"scene.json\"]\noutput_dir = \"o\"\n").unwrap();
        let cfg = RunConfig::load(&dir.path().join("run.toml")).unwrap();
        assert_eq!(cfg.scenarios[0], "lead_brake");
        assert_eq!(Path::new(&cfg.scenarios[1]), dir.path().join("scene.json"));
        assert_eq!(cfg.output_dir, dir.path().join("o"));
    }

    #[test]
    fn missing_scenario_file_fails_at_load() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("run.toml"), "scenarios = [\"nope.json\"]\n").unwrap();
        let err = RunConfig::load(&dir.path().join("run.toml")).unwrap_err();
        assert!(err.to_string().contains("nope.json"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.planner.seed += 1;
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 16);
        let moved = RunConfig { output_dir: "elsewhere".into(), ..a.clone() };
        assert_eq!(config_hash(&a), config_hash(&moved));
    }
}
