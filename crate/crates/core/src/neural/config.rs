/// Hyperparameters of one sparse autoencoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoencoderConfig {
    pub hidden_size: usize,
    /// Coefficient of the squared-weight penalty (biases excluded).
    pub l2_weight: f64,
    /// Coefficient of the KL sparsity penalty.
    pub sparsity_weight: f64,
    /// Target mean activation of each hidden unit.
    pub sparsity_target: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

pub const DEFAULT_L2_WEIGHT: f64 = 0.001;
pub const DEFAULT_SPARSITY_WEIGHT: f64 = 4.0;
pub const DEFAULT_SPARSITY_TARGET: f64 = 0.05;
pub const DEFAULT_HIDDEN_1: usize = 60;
pub const DEFAULT_HIDDEN_2: usize = 25;
pub const DEFAULT_PRETRAIN_EPOCHS: usize = 400;
pub const DEFAULT_FINETUNE_EPOCHS: usize = 200;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;
pub const DEFAULT_BATCH_SIZE: usize = 64;

impl AutoencoderConfig {
    pub fn with_hidden(hidden_size: usize) -> Self {
        Self {
            hidden_size,
            l2_weight: DEFAULT_L2_WEIGHT,
            sparsity_weight: DEFAULT_SPARSITY_WEIGHT,
            sparsity_target: DEFAULT_SPARSITY_TARGET,
            epochs: DEFAULT_PRETRAIN_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: 0,
        }
    }
}

/// Hyperparameters of a supervised (cross-entropy) stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

/// Full training recipe: two autoencoders, the softmax head, and
/// end-to-end fine-tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub autoencoder1: AutoencoderConfig,
    pub autoencoder2: AutoencoderConfig,
    pub softmax: StageConfig,
    pub finetune: StageConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::seeded(0)
    }
}

impl TrainConfig {
    /// Default recipe with per-stage seeds derived from `seed`.
    pub fn seeded(seed: u64) -> Self {
        let mut cfg = Self {
            autoencoder1: AutoencoderConfig::with_hidden(DEFAULT_HIDDEN_1),
            autoencoder2: AutoencoderConfig::with_hidden(DEFAULT_HIDDEN_2),
            softmax: StageConfig {
                epochs: DEFAULT_PRETRAIN_EPOCHS,
                learning_rate: DEFAULT_LEARNING_RATE,
                batch_size: DEFAULT_BATCH_SIZE,
                seed: 0,
            },
            finetune: StageConfig {
                epochs: DEFAULT_FINETUNE_EPOCHS,
                learning_rate: DEFAULT_LEARNING_RATE,
                batch_size: DEFAULT_BATCH_SIZE,
                seed: 0,
            },
        };
        cfg.set_seed(seed);
        cfg
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.autoencoder1.seed = seed;
        self.autoencoder2.seed = seed.wrapping_add(1);
        self.softmax.seed = seed.wrapping_add(2);
        self.finetune.seed = seed.wrapping_add(3);
    }

    /// Sets the epoch count of both autoencoders and the softmax head.
    pub fn set_pretrain_epochs(&mut self, epochs: usize) {
        self.autoencoder1.epochs = epochs;
        self.autoencoder2.epochs = epochs;
        self.softmax.epochs = epochs;
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.autoencoder1.learning_rate = lr;
        self.autoencoder2.learning_rate = lr;
        self.softmax.learning_rate = lr;
        self.finetune.learning_rate = lr;
    }

    pub fn set_batch_size(&mut self, batch: usize) {
        self.autoencoder1.batch_size = batch;
        self.autoencoder2.batch_size = batch;
        self.softmax.batch_size = batch;
        self.finetune.batch_size = batch;
    }
}
