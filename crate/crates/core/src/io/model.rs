use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{CostModel, FEATURE_COUNT, FEATURE_NAMES};
use crate::planner::ToyGenerator;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// On-disk form of a cost model and, optionally, a trained generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    /// Plane names in weight order.
    pub features: Vec<String>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<ToyGenerator>,
    /// Hash of the configuration that produced the file.
    #[serde(default)]
    pub config_hash: String,
}

impl ModelFile {
    pub fn new(model: &CostModel, generator: Option<ToyGenerator>, config_hash: &str) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            weights: model.weights.to_vec(),
            alpha: model.alpha,
            beta: model.beta,
            generator,
            config_hash: config_hash.into(),
        }
    }

    pub fn cost_model(&self) -> Result<CostModel> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("model format_version {} is not supported", self.format_version)));
        }
        if self.features.len() != FEATURE_COUNT || self.features.iter().zip(FEATURE_NAMES).any(|(a, b)| a != b) {
            return Err(Error::Format(format!("model features {:?} do not match {:?}", self.features, FEATURE_NAMES)));
        }
        let weights: [f64; FEATURE_COUNT] = self
            .weights
            .as_slice()
            .try_into()
            .map_err(|_| Error::Format(format!("expected {FEATURE_COUNT} weights, found {}", self.weights.len())))?;
        let model = CostModel { weights, alpha: self.alpha, beta: self.beta };
        if !model.is_valid() {
            return Err(Error::Format("weights must be finite and alpha, beta non-negative".into()));
        }
        if let Some(g) = &self.generator {
            g.validate()?;
        }
        Ok(model)
    }
}

pub fn save_model(file: &ModelFile, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read model {}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    file.cost_model()?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_generator() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = CostModel { weights: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0], alpha: 0.5, beta: 2.0 };
        let file = ModelFile::new(&model, Some(ToyGenerator::new(4, 8, 0.5, 1)), "abc");
        save_model(&file, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.cost_model().unwrap(), model);
    }

    #[test]
    fn renamed_features_are_rejected() {
        let mut file = ModelFile::new(&CostModel::default(), None, "");
        file.features.swap(0, 1);
        assert!(matches!(file.cost_model(), Err(Error::Format(_))));
    }
}
