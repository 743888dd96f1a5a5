//! Stacked sparse autoencoders with a softmax head, trained layer-wise and
//! then fine-tuned end to end.

mod adam;
mod autoencoder;
mod config;
mod deep;
mod gradcheck;
mod layer;
mod softmax;
mod sparse;
mod trainer;

pub use adam::Adam;
pub use autoencoder::{train_autoencoder, Autoencoder, AutoencoderLoss, TrainedAutoencoder};
pub use config::*;
pub use deep::{stack_and_finetune, train_deep_model, DeepModel, TrainingReport, MODEL_FORMAT_VERSION};
pub use gradcheck::{gradient_check, max_relative_error, relative_error, GradientCheckLoss, FD_STEP};
pub use layer::{Activation, DenseLayer, LayerGrad};
pub use softmax::{train_softmax, TrainedSoftmax};
pub use sparse::{kl_sparsity, RHO_HAT_EPS};
