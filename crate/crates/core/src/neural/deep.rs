//! The stacked network: scaler → sigmoid encoder 1 → sigmoid encoder 2 →
//! softmax head.

use alloc::format;
use alloc::vec::Vec;

use super::autoencoder::train_autoencoder;
use super::config::TrainConfig;
use super::layer::{cross_entropy, forward_chain, Activation, DenseLayer};
use super::softmax::{predict_chain, train_classifier, train_softmax};
use crate::fusion::{GlobalTrainingSet, Scaler, QUALITY_GROUPS};
use crate::{Error, Matrix, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trained quality model.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepModel {
    pub scaler: Scaler,
    pub encoder1: DenseLayer,
    pub encoder2: DenseLayer,
    pub head: DenseLayer,
    pub config: TrainConfig,
    pub version: u32,
}

impl DeepModel {
    /// Validates the dimension chain `inputs → h1 → h2 → 4` and activations.
    pub fn new(
        scaler: Scaler,
        encoder1: DenseLayer,
        encoder2: DenseLayer,
        head: DenseLayer,
        config: TrainConfig,
    ) -> Result<Self> {
        check_chain(&scaler, &encoder1, &encoder2, &head)?;
        Ok(Self {
            scaler,
            encoder1,
            encoder2,
            head,
            config,
            version: MODEL_FORMAT_VERSION,
        })
    }

    pub fn inputs(&self) -> usize {
        self.scaler.dims()
    }

    fn layers(&self) -> [DenseLayer; 3] {
        [self.encoder1.clone(), self.encoder2.clone(), self.head.clone()]
    }

    /// Class probabilities for raw (unscaled) features, `inputs x k` in,
    /// `4 x k` out.
    pub fn forward(&self, x_raw: &Matrix) -> Result<Matrix> {
        let scaled = self.scaler.apply(x_raw)?;
        Ok(predict_chain(&self.layers(), &scaled))
    }

    /// Mean cross-entropy of the model on raw features and one-hot targets.
    pub fn cross_entropy(&self, x_raw: &Matrix, targets: &Matrix) -> Result<f64> {
        let scaled = self.scaler.apply(x_raw)?.transpose();
        let acts = forward_chain(&self.layers(), scaled.as_slice(), x_raw.cols());
        let t = targets.transpose();
        Ok(cross_entropy(acts.last().unwrap(), t.as_slice(), x_raw.cols()))
    }
}

fn check_chain(scaler: &Scaler, e1: &DenseLayer, e2: &DenseLayer, head: &DenseLayer) -> Result<()> {
    let mismatch = |what: &str| Err(Error::DimensionMismatch(what.into()));
    if e1.inputs != scaler.dims() {
        return mismatch(&format!("encoder 1 takes {} inputs, scaler has {}", e1.inputs, scaler.dims()));
    }
    if e2.inputs != e1.outputs {
        return mismatch(&format!("encoder 2 takes {} inputs, encoder 1 emits {}", e2.inputs, e1.outputs));
    }
    if head.inputs != e2.outputs {
        return mismatch(&format!("head takes {} inputs, encoder 2 emits {}", head.inputs, e2.outputs));
    }
    if head.outputs != QUALITY_GROUPS {
        return mismatch(&format!("head has {} outputs, expected {QUALITY_GROUPS}", head.outputs));
    }
    if e1.activation != Activation::Sigmoid || e2.activation != Activation::Sigmoid {
        return mismatch("encoders must use sigmoid activations");
    }
    if head.activation != Activation::Softmax {
        return mismatch("head must use softmax activation");
    }
    Ok(())
}

/// Stacks pretrained layers and fine-tunes all three end to end with
/// cross-entropy on raw features `x_raw` (`inputs x M`). Returns the model
/// and the per-epoch fine-tuning loss.
pub fn stack_and_finetune(
    scaler: Scaler,
    encoder1: DenseLayer,
    encoder2: DenseLayer,
    head: DenseLayer,
    x_raw: &Matrix,
    targets: &Matrix,
    cfg: &TrainConfig,
) -> Result<(DeepModel, Vec<f64>)> {
    check_chain(&scaler, &encoder1, &encoder2, &head)?;
    let scaled = scaler.apply(x_raw)?;
    let mut layers = [encoder1, encoder2, head];
    let history = train_classifier(&mut layers, &scaled, targets, &cfg.finetune, "fine-tune")?;
    let [encoder1, encoder2, head] = layers;
    Ok((DeepModel::new(scaler, encoder1, encoder2, head, *cfg)?, history))
}

/// Diagnostics collected while training a [`DeepModel`].
#[derive(Debug, Clone, Default)]
pub struct TrainingReport {
    pub autoencoder1_loss: Vec<f64>,
    pub autoencoder2_loss: Vec<f64>,
    pub softmax_loss: Vec<f64>,
    pub finetune_loss: Vec<f64>,
    /// Mean hidden activation of the first autoencoder on its training data.
    pub autoencoder1_mean_activation: f64,
    /// Cross-entropy of the stacked network before and after fine-tuning.
    pub stacked_cross_entropy: f64,
    pub finetuned_cross_entropy: f64,
}

/// Full training pipeline on a global set: fit the scaler, pretrain both
/// autoencoders and the softmax head, stack, fine-tune.
pub fn train_deep_model(set: &GlobalTrainingSet, cfg: &TrainConfig) -> Result<(DeepModel, TrainingReport)> {
    let scaler = Scaler::fit(&set.features)?;
    let x = scaler.apply(&set.features)?;
    let ae1 = train_autoencoder(&x, &cfg.autoencoder1)?;
    let ae2 = train_autoencoder(&ae1.encoded, &cfg.autoencoder2)?;
    let soft = train_softmax(&ae2.encoded, &set.targets, &cfg.softmax)?;

    let stacked = DeepModel::new(
        scaler.clone(),
        ae1.autoencoder.encoder.clone(),
        ae2.autoencoder.encoder.clone(),
        soft.head.clone(),
        *cfg,
    )?;
    let stacked_cross_entropy = stacked.cross_entropy(&set.features, &set.targets)?;
    let (model, finetune_loss) = stack_and_finetune(
        scaler,
        ae1.autoencoder.encoder.clone(),
        ae2.autoencoder.encoder,
        soft.head,
        &set.features,
        &set.targets,
        cfg,
    )?;
    let finetuned_cross_entropy = model.cross_entropy(&set.features, &set.targets)?;
    let report = TrainingReport {
        autoencoder1_mean_activation: crate::stats::mean(ae1.encoded.as_slice()),
        autoencoder1_loss: ae1.loss_history,
        autoencoder2_loss: ae2.loss_history,
        softmax_loss: soft.loss_history,
        finetune_loss,
        stacked_cross_entropy,
        finetuned_cross_entropy,
    };
    Ok((model, report))
}
