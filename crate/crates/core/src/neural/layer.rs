use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::matrix::gemm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
    Linear,
    Softmax,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
            Activation::Softmax => "softmax",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sigmoid" => Some(Activation::Sigmoid),
            "linear" => Some(Activation::Linear),
            "softmax" => Some(Activation::Softmax),
            _ => None,
        }
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}

/// Fully connected layer `y = act(W x + b)` with `W` stored `out x in`,
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub outputs: usize,
    pub inputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(outputs: usize, inputs: usize, activation: Activation) -> Self {
        Self {
            outputs,
            inputs,
            weights: vec![0.0; outputs * inputs],
            biases: vec![0.0; outputs],
            activation,
        }
    }

    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn glorot<R: Rng + ?Sized>(outputs: usize, inputs: usize, activation: Activation, rng: &mut R) -> Self {
        let limit = libm::sqrt(6.0 / (inputs + outputs) as f64);
        let weights = (0..outputs * inputs).map(|_| rng.random_range(-limit..limit)).collect();
        Self {
            outputs,
            inputs,
            weights,
            biases: vec![0.0; outputs],
            activation,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.biases).all(|v| v.is_finite())
    }

    pub fn weight_sq_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Pre-activations for a sample-major batch (`batch x inputs` in,
    /// `batch x outputs` out).
    pub(crate) fn affine(&self, x: &[f64], batch: usize) -> Vec<f64> {
        let mut z = Vec::with_capacity(batch * self.outputs);
        for _ in 0..batch {
            z.extend_from_slice(&self.biases);
        }
        gemm(batch, self.inputs, self.outputs, 1.0, x, false, &self.weights, true, 1.0, &mut z);
        z
    }

    pub(crate) fn activate(&self, z: &mut [f64]) {
        match self.activation {
            Activation::Linear => {}
            Activation::Sigmoid => z.iter_mut().for_each(|v| *v = sigmoid(*v)),
            Activation::Softmax => z.chunks_exact_mut(self.outputs).for_each(softmax_inplace),
        }
    }

    pub(crate) fn forward_batch(&self, x: &[f64], batch: usize) -> Vec<f64> {
        let mut z = self.affine(x, batch);
        self.activate(&mut z);
        z
    }
}

pub(crate) fn softmax_inplace(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = libm::exp(*v - max);
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

/// Gradient of a loss with respect to one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Runs a chain of layers, keeping every activation: `acts[0]` is the
/// input and `acts[i + 1]` the output of layer `i`.
pub(crate) fn forward_chain(layers: &[DenseLayer], x: &[f64], batch: usize) -> Vec<Vec<f64>> {
    let mut acts = Vec::with_capacity(layers.len() + 1);
    acts.push(x.to_vec());
    for layer in layers {
        let next = layer.forward_batch(acts.last().unwrap(), batch);
        acts.push(next);
    }
    acts
}

/// Backpropagates `delta`, the loss gradient with respect to the last
/// layer's pre-activation. `hidden_hook(i, grad)` may add extra terms to
/// the gradient with respect to the output of hidden layer `i` before it is
/// pushed through that layer's activation.
pub(crate) fn backward_chain(
    layers: &[DenseLayer],
    acts: &[Vec<f64>],
    batch: usize,
    mut delta: Vec<f64>,
    mut hidden_hook: impl FnMut(usize, &mut [f64]),
) -> Vec<LayerGrad> {
    let mut grads: Vec<LayerGrad> = Vec::with_capacity(layers.len());
    for i in (0..layers.len()).rev() {
        let layer = &layers[i];
        let input = &acts[i];
        let mut gw = vec![0.0; layer.outputs * layer.inputs];
        gemm(layer.outputs, batch, layer.inputs, 1.0, &delta, true, input, false, 0.0, &mut gw);
        let mut gb = vec![0.0; layer.outputs];
        for row in delta.chunks_exact(layer.outputs) {
            gb.iter_mut().zip(row).for_each(|(g, d)| *g += d);
        }
        grads.push(LayerGrad { weights: gw, biases: gb });

        if i > 0 {
            let mut d_input = vec![0.0; batch * layer.inputs];
            gemm(batch, layer.outputs, layer.inputs, 1.0, &delta, false, &layer.weights, false, 0.0, &mut d_input);
            hidden_hook(i - 1, &mut d_input);
            match layers[i - 1].activation {
                Activation::Linear => {}
                Activation::Sigmoid => {
                    for (d, a) in d_input.iter_mut().zip(input) {
                        *d *= a * (1.0 - a);
                    }
                }
                Activation::Softmax => unreachable!("softmax is only supported as the output layer"),
            }
            delta = d_input;
        }
    }
    grads.reverse();
    grads
}

/// Mean categorical cross-entropy of softmax outputs `probs` against
/// one-hot `targets` (both sample-major).
pub(crate) fn cross_entropy(probs: &[f64], targets: &[f64], batch: usize) -> f64 {
    let mut loss = 0.0;
    for (p, t) in probs.iter().zip(targets) {
        if *t != 0.0 {
            loss -= t * libm::log(p.max(f64::MIN_POSITIVE));
        }
    }
    loss / batch as f64
}
