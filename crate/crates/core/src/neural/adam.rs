//! Adaptive-moment optimizer state.

use alloc::vec;
use alloc::vec::Vec;

use super::layer::{DenseLayer, LayerGrad};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone)]
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    fn update(&mut self, params: &mut [f64], grads: &[f64], lr_t: f64) {
        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr_t * *m / (libm::sqrt(*v) + EPSILON);
        }
    }
}

/// Adam over a fixed list of layers.
#[derive(Debug, Clone)]
pub struct Adam {
    learning_rate: f64,
    step: i32,
    state: Vec<(Moments, Moments)>,
}

impl Adam {
    pub fn new(layers: &[&DenseLayer], learning_rate: f64) -> Self {
        Self {
            learning_rate,
            step: 0,
            state: layers
                .iter()
                .map(|l| (Moments::new(l.weights.len()), Moments::new(l.biases.len())))
                .collect(),
        }
    }

    pub fn step(&mut self, layers: &mut [&mut DenseLayer], grads: &[LayerGrad]) {
        self.step += 1;
        let bc1 = 1.0 - libm::pow(BETA1, self.step as f64);
        let bc2 = 1.0 - libm::pow(BETA2, self.step as f64);
        let lr_t = self.learning_rate * libm::sqrt(bc2) / bc1;
        for ((layer, grad), (mw, mb)) in layers.iter_mut().zip(grads).zip(&mut self.state) {
            mw.update(&mut layer.weights, &grad.weights, lr_t);
            mb.update(&mut layer.biases, &grad.biases, lr_t);
        }
    }
}
