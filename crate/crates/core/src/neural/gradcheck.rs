//! Finite-difference verification of the analytic training gradients.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::autoencoder::loss_and_grad;
use super::config::AutoencoderConfig;
use super::layer::{Activation, DenseLayer, LayerGrad};
use super::softmax::ce_loss_and_grad;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Which training loss to verify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientCheckLoss {
    /// Sparse-autoencoder loss on an 8 → 5 → 8 network; the configuration
    /// supplies the penalty weights and sparsity target.
    Autoencoder(AutoencoderConfig),
    /// Cross-entropy of a 6 → 5 → 4 → 4 sigmoid/sigmoid/softmax chain.
    CrossEntropy,
}

/// Relative discrepancy between an analytic and a numeric derivative.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = (libm::fabs(analytic) + libm::fabs(numeric)).max(1e-8);
    libm::fabs(analytic - numeric) / scale
}

/// Largest relative error between `grads` and central differences of
/// `loss` over every weight and bias of `layers`.
pub fn max_relative_error(
    layers: &[DenseLayer],
    grads: &[LayerGrad],
    mut loss: impl FnMut(&[DenseLayer]) -> f64,
) -> f64 {
    let mut work = layers.to_vec();
    let mut worst: f64 = 0.0;
    for (li, grad) in grads.iter().enumerate() {
        for (pi, &analytic) in grad.weights.iter().chain(&grad.biases).enumerate() {
            let numeric = {
                let orig = param(&mut work[li], pi);
                *param_mut(&mut work[li], pi) = orig + FD_STEP;
                let up = loss(&work);
                *param_mut(&mut work[li], pi) = orig - FD_STEP;
                let down = loss(&work);
                *param_mut(&mut work[li], pi) = orig;
                (up - down) / (2.0 * FD_STEP)
            };
            worst = worst.max(relative_error(analytic, numeric));
        }
    }
    worst
}

fn param(layer: &mut DenseLayer, i: usize) -> f64 {
    *param_mut(layer, i)
}

fn param_mut(layer: &mut DenseLayer, i: usize) -> &mut f64 {
    let nw = layer.weights.len();
    if i < nw {
        &mut layer.weights[i]
    } else {
        &mut layer.biases[i - nw]
    }
}

fn random_batch(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random::<f64>()).collect()
}

/// Builds a small seeded network and returns the maximum relative error of
/// its analytic gradient for the chosen loss.
pub fn gradient_check(loss: GradientCheckLoss, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match loss {
        GradientCheckLoss::Autoencoder(cfg) => {
            let (inputs, hidden, batch) = (8, 5, 6);
            let layers = [
                DenseLayer::glorot(hidden, inputs, Activation::Sigmoid, &mut rng),
                DenseLayer::glorot(inputs, hidden, Activation::Linear, &mut rng),
            ];
            let x = random_batch(&mut rng, batch * inputs);
            let (_, grads) = loss_and_grad(&layers, &x, batch, &cfg);
            max_relative_error(&layers, &grads, |l| loss_and_grad(l, &x, batch, &cfg).0.total)
        }
        GradientCheckLoss::CrossEntropy => {
            let (inputs, batch, classes) = (6, 5, 4);
            let layers = [
                DenseLayer::glorot(5, inputs, Activation::Sigmoid, &mut rng),
                DenseLayer::glorot(4, 5, Activation::Sigmoid, &mut rng),
                DenseLayer::glorot(classes, 4, Activation::Softmax, &mut rng),
            ];
            let x = random_batch(&mut rng, batch * inputs);
            let mut t = alloc::vec![0.0; batch * classes];
            for b in 0..batch {
                t[b * classes + rng.random_range(0..classes)] = 1.0;
            }
            let (_, grads) = ce_loss_and_grad(&layers, &x, &t, batch);
            max_relative_error(&layers, &grads, |l| ce_loss_and_grad(l, &x, &t, batch).0)
        }
    }
}
