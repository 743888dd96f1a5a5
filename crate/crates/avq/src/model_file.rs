//! Versioned JSON model documents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use avq_core::fusion::Scaler;
use avq_core::neural::{
    Activation, AutoencoderConfig, DeepModel, DenseLayer, StageConfig, TrainConfig, MODEL_FORMAT_VERSION,
};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file version {0} is not supported (expected {MODEL_FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error("model file: {0}")]
    Invalid(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct ScalerDoc {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerDoc {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct AutoencoderDoc {
    hidden_size: usize,
    l2_weight: f64,
    sparsity_weight: f64,
    sparsity_target: f64,
    epochs: usize,
    learning_rate: f64,
    batch_size: usize,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct StageDoc {
    epochs: usize,
    learning_rate: f64,
    batch_size: usize,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfigDoc {
    autoencoder1: AutoencoderDoc,
    autoencoder2: AutoencoderDoc,
    softmax: StageDoc,
    finetune: StageDoc,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    version: u32,
    scaler: ScalerDoc,
    layers: Vec<LayerDoc>,
    config: ConfigDoc,
}

fn layer_doc(l: &DenseLayer) -> LayerDoc {
    LayerDoc {
        rows: l.outputs,
        cols: l.inputs,
        weights: l.weights.clone(),
        biases: l.biases.clone(),
        activation: l.activation.name().to_string(),
    }
}

fn layer_from(d: LayerDoc) -> Result<DenseLayer, ModelFileError> {
    let activation = Activation::from_name(&d.activation)
        .ok_or_else(|| ModelFileError::Invalid(format!("unknown activation `{}`", d.activation)))?;
    if d.weights.len() != d.rows * d.cols || d.biases.len() != d.rows {
        return Err(ModelFileError::Invalid(format!(
            "layer {}x{} has {} weights and {} biases",
            d.rows,
            d.cols,
            d.weights.len(),
            d.biases.len()
        )));
    }
    Ok(DenseLayer {
        outputs: d.rows,
        inputs: d.cols,
        weights: d.weights,
        biases: d.biases,
        activation,
    })
}

fn ae_doc(c: &AutoencoderConfig) -> AutoencoderDoc {
    AutoencoderDoc {
        hidden_size: c.hidden_size,
        l2_weight: c.l2_weight,
        sparsity_weight: c.sparsity_weight,
        sparsity_target: c.sparsity_target,
        epochs: c.epochs,
        learning_rate: c.learning_rate,
        batch_size: c.batch_size,
        seed: c.seed,
    }
}

fn ae_from(d: AutoencoderDoc) -> AutoencoderConfig {
    AutoencoderConfig {
        hidden_size: d.hidden_size,
        l2_weight: d.l2_weight,
        sparsity_weight: d.sparsity_weight,
        sparsity_target: d.sparsity_target,
        epochs: d.epochs,
        learning_rate: d.learning_rate,
        batch_size: d.batch_size,
        seed: d.seed,
    }
}

fn stage_doc(s: &StageConfig) -> StageDoc {
    StageDoc {
        epochs: s.epochs,
        learning_rate: s.learning_rate,
        batch_size: s.batch_size,
        seed: s.seed,
    }
}

fn stage_from(d: StageDoc) -> StageConfig {
    StageConfig {
        epochs: d.epochs,
        learning_rate: d.learning_rate,
        batch_size: d.batch_size,
        seed: d.seed,
    }
}

/// Serializes the full training recipe (for provenance in other outputs).
pub fn config_json(cfg: &TrainConfig) -> serde_json::Value {
    serde_json::to_value(config_doc(cfg)).expect("config is serializable")
}

fn config_doc(cfg: &TrainConfig) -> ConfigDoc {
    ConfigDoc {
        autoencoder1: ae_doc(&cfg.autoencoder1),
        autoencoder2: ae_doc(&cfg.autoencoder2),
        softmax: stage_doc(&cfg.softmax),
        finetune: stage_doc(&cfg.finetune),
    }
}

pub fn model_to_json(model: &DeepModel) -> String {
    let doc = ModelDoc {
        version: model.version,
        scaler: ScalerDoc {
            min: model.scaler.min.clone(),
            max: model.scaler.max.clone(),
        },
        layers: [&model.encoder1, &model.encoder2, &model.head].into_iter().map(layer_doc).collect(),
        config: config_doc(&model.config),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model is serializable");
    s.push('\n');
    s
}

pub fn model_from_json(text: &str) -> Result<DeepModel, ModelFileError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| ModelFileError::Invalid("missing `version`".into()))?;
    if version != u64::from(MODEL_FORMAT_VERSION) {
        return Err(ModelFileError::UnsupportedVersion(version));
    }
    let doc: ModelDoc = serde_json::from_value(value)?;
    let [l1, l2, l3]: [LayerDoc; 3] = doc
        .layers
        .try_into()
        .map_err(|v: Vec<LayerDoc>| ModelFileError::Invalid(format!("expected 3 layers, found {}", v.len())))?;
    let scaler = Scaler {
        min: doc.scaler.min,
        max: doc.scaler.max,
    };
    if scaler.min.len() != scaler.max.len() {
        return Err(ModelFileError::Invalid("scaler min/max lengths differ".into()));
    }
    let config = TrainConfig {
        autoencoder1: ae_from(doc.config.autoencoder1),
        autoencoder2: ae_from(doc.config.autoencoder2),
        softmax: stage_from(doc.config.softmax),
        finetune: stage_from(doc.config.finetune),
    };
    DeepModel::new(scaler, layer_from(l1)?, layer_from(l2)?, layer_from(l3)?, config)
        .map_err(|e| ModelFileError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(outputs: usize, inputs: usize, activation: Activation) -> DenseLayer {
        let mut l = DenseLayer::zeros(outputs, inputs, activation);
        l.weights.iter_mut().enumerate().for_each(|(i, w)| *w = (i as f64 - 2.5) / 7.0);
        l.biases.iter_mut().enumerate().for_each(|(i, b)| *b = 0.1 * i as f64 + 1e-17);
        l
    }

    fn model() -> DeepModel {
        let scaler = Scaler {
            min: vec![0.0, -1.0, 0.1],
            max: vec![1.0, 2.0, 1.0 / 3.0],
        };
        DeepModel::new(
            scaler,
            layer(4, 3, Activation::Sigmoid),
            layer(2, 4, Activation::Sigmoid),
            layer(4, 2, Activation::Softmax),
            TrainConfig::seeded(9),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let text = model_to_json(&m);
        assert_eq!(model_from_json(&text).unwrap(), m);
    }

    #[test]
    fn rejects_unknown_versions_and_bad_layers() {
        let text = model_to_json(&model()).replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(model_from_json(&text), Err(ModelFileError::UnsupportedVersion(2))));
        let text = model_to_json(&model()).replacen("\"sigmoid\"", "\"tanh\"", 1);
        assert!(matches!(model_from_json(&text), Err(ModelFileError::Invalid(_))));
        assert!(matches!(model_from_json("{"), Err(ModelFileError::Json(_))));
    }
}
