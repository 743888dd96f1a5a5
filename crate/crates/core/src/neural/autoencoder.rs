//! Sparse autoencoder with a sigmoid encoder and a linear decoder.
//!
//! Loss per mini-batch of `B` samples:
//!
//! ```text
//! L = (1/B) Σ_b ‖x_b − x̂_b‖²  +  λ (‖W_enc‖² + ‖W_dec‖²)  +  β Σ_j KL(ρ ‖ ρ̂_j)
//! ```
//!
//! where `ρ̂_j` is the batch mean activation of hidden unit `j`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::AutoencoderConfig;
use super::layer::{backward_chain, forward_chain, Activation, DenseLayer, LayerGrad};
use super::sparse::{kl_sparsity, kl_sparsity_grad};
use super::trainer::{gather_rows, train_minibatch, Schedule};
use crate::{Error, Matrix, Result};

/// Loss terms of an autoencoder evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoencoderLoss {
    pub reconstruction: f64,
    pub l2: f64,
    pub sparsity: f64,
    pub total: f64,
}

/// Encoder and decoder of one sparse autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    pub encoder: DenseLayer,
    pub decoder: DenseLayer,
}

impl Autoencoder {
    /// Seeded initialization for `inputs`-dimensional data.
    pub fn init(inputs: usize, cfg: &AutoencoderConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let encoder = DenseLayer::glorot(cfg.hidden_size, inputs, Activation::Sigmoid, &mut rng);
        let decoder = DenseLayer::glorot(inputs, cfg.hidden_size, Activation::Linear, &mut rng);
        Self { encoder, decoder }
    }

    fn layers(&self) -> [DenseLayer; 2] {
        [self.encoder.clone(), self.decoder.clone()]
    }

    /// Loss and gradients on a sample-major batch (`batch x inputs`).
    pub fn loss_and_grad(&self, x: &[f64], batch: usize, cfg: &AutoencoderConfig) -> (AutoencoderLoss, Vec<LayerGrad>) {
        loss_and_grad(&self.layers(), x, batch, cfg)
    }

    /// Full-data loss for a feature-major `inputs x M` matrix.
    pub fn loss(&self, x: &Matrix, cfg: &AutoencoderConfig) -> AutoencoderLoss {
        let xt = x.transpose();
        loss_and_grad(&self.layers(), xt.as_slice(), x.cols(), cfg).0
    }

    /// Mean over samples of the summed squared reconstruction error.
    pub fn reconstruction_error(&self, x: &Matrix) -> f64 {
        let xt = x.transpose();
        let acts = forward_chain(&self.layers(), xt.as_slice(), x.cols());
        let se: f64 = acts[2].iter().zip(xt.as_slice()).map(|(y, t)| (y - t) * (y - t)).sum();
        se / x.cols() as f64
    }

    /// Hidden representation, `hidden x M`.
    pub fn encode(&self, x: &Matrix) -> Matrix {
        let xt = x.transpose();
        let h = self.encoder.forward_batch(xt.as_slice(), x.cols());
        Matrix::from_vec(x.cols(), self.encoder.outputs, h)
            .expect("encoder output shape")
            .transpose()
    }

    /// Mean activation of each hidden unit over all columns of `x`.
    pub fn mean_activation(&self, x: &Matrix) -> Vec<f64> {
        let h = self.encode(x);
        (0..h.rows()).map(|r| crate::stats::mean(h.row(r))).collect()
    }
}

pub(crate) fn loss_and_grad(
    layers: &[DenseLayer],
    x: &[f64],
    batch: usize,
    cfg: &AutoencoderConfig,
) -> (AutoencoderLoss, Vec<LayerGrad>) {
    let acts = forward_chain(layers, x, batch);
    let (hidden, recon) = (&acts[1], &acts[2]);
    let h = layers[0].outputs;
    let inv_b = 1.0 / batch as f64;

    let mut delta = Vec::with_capacity(recon.len());
    let mut se = 0.0;
    for (y, t) in recon.iter().zip(x) {
        let e = y - t;
        se += e * e;
        delta.push(2.0 * e * inv_b);
    }
    let reconstruction = se * inv_b;

    let mut rho_hat = vec![0.0; h];
    for row in hidden.chunks_exact(h) {
        rho_hat.iter_mut().zip(row).for_each(|(r, a)| *r += a);
    }
    rho_hat.iter_mut().for_each(|r| *r *= inv_b);
    let sparsity = kl_sparsity(&rho_hat, cfg.sparsity_target);
    let kl_grad: Vec<f64> = kl_sparsity_grad(&rho_hat, cfg.sparsity_target)
        .map(|g| cfg.sparsity_weight * g * inv_b)
        .collect();

    let mut grads = backward_chain(layers, &acts, batch, delta, |_, d_hidden| {
        if cfg.sparsity_weight != 0.0 {
            for row in d_hidden.chunks_exact_mut(h) {
                row.iter_mut().zip(&kl_grad).for_each(|(d, g)| *d += g);
            }
        }
    });

    let mut l2 = 0.0;
    for (layer, grad) in layers.iter().zip(&mut grads) {
        l2 += layer.weight_sq_norm();
        grad.weights
            .iter_mut()
            .zip(&layer.weights)
            .for_each(|(g, w)| *g += 2.0 * cfg.l2_weight * w);
    }
    l2 *= cfg.l2_weight;

    let loss = AutoencoderLoss {
        reconstruction,
        l2,
        sparsity,
        total: reconstruction + l2 + cfg.sparsity_weight * sparsity,
    };
    (loss, grads)
}

/// Result of training one autoencoder.
#[derive(Debug, Clone)]
pub struct TrainedAutoencoder {
    pub autoencoder: Autoencoder,
    /// Hidden representation of the training data, `hidden x M`.
    pub encoded: Matrix,
    /// Mean mini-batch loss per epoch.
    pub loss_history: Vec<f64>,
}

/// Trains a sparse autoencoder on the columns of `x` (`inputs x M`).
pub fn train_autoencoder(x: &Matrix, cfg: &AutoencoderConfig) -> Result<TrainedAutoencoder> {
    if x.cols() == 0 || x.rows() == 0 {
        return Err(Error::EmptyInput("autoencoder training data"));
    }
    if !(cfg.sparsity_target > 0.0 && cfg.sparsity_target < 1.0) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "sparsity target {} outside (0, 1)",
            cfg.sparsity_target
        )));
    }
    let dim = x.rows();
    let samples = x.transpose();
    let init = Autoencoder::init(dim, cfg);
    let mut layers = [init.encoder, init.decoder];
    let schedule = Schedule {
        stage: "autoencoder",
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        learning_rate: cfg.learning_rate,
        seed: cfg.seed,
    };
    let loss_history = train_minibatch(&mut layers, x.cols(), &schedule, |layers, idx| {
        let batch = gather_rows(samples.as_slice(), dim, idx);
        let (loss, grads) = loss_and_grad(layers, &batch, idx.len(), cfg);
        (loss.total, grads)
    })?;
    let [encoder, decoder] = layers;
    let autoencoder = Autoencoder { encoder, decoder };
    let encoded = autoencoder.encode(x);
    Ok(TrainedAutoencoder {
        autoencoder,
        encoded,
        loss_history,
    })
}
