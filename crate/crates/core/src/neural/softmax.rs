//! Softmax classification head trained with categorical cross-entropy.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::StageConfig;
use super::layer::{backward_chain, cross_entropy, forward_chain, Activation, DenseLayer, LayerGrad};
use super::trainer::{gather_rows, train_minibatch, Schedule};
use crate::{Error, Matrix, Result};

/// Cross-entropy and gradients of a chain ending in a softmax layer, on a
/// sample-major batch.
pub(crate) fn ce_loss_and_grad(
    layers: &[DenseLayer],
    x: &[f64],
    targets: &[f64],
    batch: usize,
) -> (f64, Vec<LayerGrad>) {
    let acts = forward_chain(layers, x, batch);
    let probs = acts.last().unwrap();
    let loss = cross_entropy(probs, targets, batch);
    let inv_b = 1.0 / batch as f64;
    let delta = probs.iter().zip(targets).map(|(p, t)| (p - t) * inv_b).collect();
    let grads = backward_chain(layers, &acts, batch, delta, |_, _| {});
    (loss, grads)
}

pub(crate) fn check_one_hot(targets: &Matrix) -> Result<()> {
    for j in 0..targets.cols() {
        let col = targets.column(j);
        let ones = col.iter().filter(|&&v| v == 1.0).count();
        let zeros = col.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != col.len() {
            return Err(Error::DimensionMismatch(alloc::format!("target column {j} is not one-hot")));
        }
    }
    Ok(())
}

/// Supervised training of a chain whose last layer is softmax; `x` is
/// `inputs x M`, `targets` is `classes x M`.
pub(crate) fn train_classifier(
    layers: &mut [DenseLayer],
    x: &Matrix,
    targets: &Matrix,
    cfg: &StageConfig,
    stage: &'static str,
) -> Result<Vec<f64>> {
    if x.cols() != targets.cols() {
        return Err(Error::ColumnCountMismatch {
            left: x.cols(),
            right: targets.cols(),
        });
    }
    check_one_hot(targets)?;
    let (dim, classes) = (x.rows(), targets.rows());
    let xs = x.transpose();
    let ts = targets.transpose();
    let schedule = Schedule {
        stage,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        learning_rate: cfg.learning_rate,
        seed: cfg.seed,
    };
    train_minibatch(layers, x.cols(), &schedule, |layers, idx| {
        let bx = gather_rows(xs.as_slice(), dim, idx);
        let bt = gather_rows(ts.as_slice(), classes, idx);
        ce_loss_and_grad(layers, &bx, &bt, idx.len())
    })
}

/// Trained classification head.
#[derive(Debug, Clone)]
pub struct TrainedSoftmax {
    pub head: DenseLayer,
    pub loss_history: Vec<f64>,
}

/// Trains a `classes x inputs` softmax layer on `features` (`inputs x M`)
/// against one-hot `targets` (`classes x M`).
pub fn train_softmax(features: &Matrix, targets: &Matrix, cfg: &StageConfig) -> Result<TrainedSoftmax> {
    if features.cols() == 0 {
        return Err(Error::EmptyInput("softmax training data"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut layers = [DenseLayer::glorot(
        targets.rows(),
        features.rows(),
        Activation::Softmax,
        &mut rng,
    )];
    let loss_history = train_classifier(&mut layers, features, targets, cfg, "softmax")?;
    let [head] = layers;
    Ok(TrainedSoftmax { head, loss_history })
}

/// Class probabilities of a layer chain ending in softmax, `classes x k`.
pub(crate) fn predict_chain(layers: &[DenseLayer], x: &Matrix) -> Matrix {
    let xt = x.transpose();
    let acts = forward_chain(layers, xt.as_slice(), x.cols());
    let classes = layers.last().map_or(0, |l| l.outputs);
    Matrix::from_vec(x.cols(), classes, acts.into_iter().last().unwrap())
        .expect("classifier output shape")
        .transpose()
}
