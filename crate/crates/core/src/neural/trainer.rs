//! Shuffled mini-batch loop shared by every training stage.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::Adam;
use super::layer::{DenseLayer, LayerGrad};
use crate::{Error, Result};

pub(crate) struct Schedule {
    pub stage: &'static str,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Copies the listed rows of a row-major `? x dim` buffer.
pub(crate) fn gather_rows(data: &[f64], dim: usize, rows: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows.len() * dim);
    for &r in rows {
        out.extend_from_slice(&data[r * dim..(r + 1) * dim]);
    }
    out
}

/// Runs `epochs` passes of shuffled mini-batches over `samples` samples.
/// `loss_grad(layers, batch_indices)` returns the batch loss and parameter
/// gradients. Returns the size-weighted mean batch loss of each epoch.
pub(crate) fn train_minibatch(
    layers: &mut [DenseLayer],
    samples: usize,
    schedule: &Schedule,
    mut loss_grad: impl FnMut(&[DenseLayer], &[usize]) -> (f64, Vec<LayerGrad>),
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut order: Vec<usize> = (0..samples).collect();
    let batch = schedule.batch_size.clamp(1, samples.max(1));
    let mut adam = Adam::new(&layers.iter().collect::<Vec<_>>(), schedule.learning_rate);
    let mut history = Vec::with_capacity(schedule.epochs);
    for epoch in 0..schedule.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for idx in order.chunks(batch) {
            let (loss, grads) = loss_grad(layers, idx);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    stage: schedule.stage,
                    epoch,
                });
            }
            total += loss * idx.len() as f64;
            adam.step(&mut layers.iter_mut().collect::<Vec<_>>(), &grads);
        }
        history.push(total / samples as f64);
    }
    if layers.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFiniteLoss {
            stage: schedule.stage,
            epoch: schedule.epochs,
        });
    }
    Ok(history)
}
