//! Run settings with `flag > config file > default` precedence.
//!
//! Config files hold one `key = value` pair per line; blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use avq_core::cv::FoldGrouping;
use avq_core::neural::{TrainConfig, DEFAULT_BATCH_SIZE, DEFAULT_FINETUNE_EPOCHS, DEFAULT_LEARNING_RATE, DEFAULT_PRETRAIN_EPOCHS};

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 8] = [
    "seed",
    "k",
    "grouping",
    "pretrain_epochs",
    "finetune_epochs",
    "learning_rate",
    "batch_size",
    "jobs",
];

/// Parsed key=value file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("config line {}: unknown key `{k}`", n + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("config key `{key}` = `{v}`: {e}")))
            })
            .transpose()
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub grouping: Option<FoldGrouping>,
    pub pretrain_epochs: Option<usize>,
    pub finetune_epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub jobs: Option<usize>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub k: usize,
    pub grouping: FoldGrouping,
    pub pretrain_epochs: usize,
    pub finetune_epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 0,
            k: 10,
            grouping: FoldGrouping::Clip,
            pretrain_epochs: DEFAULT_PRETRAIN_EPOCHS,
            finetune_epochs: DEFAULT_FINETUNE_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            batch_size: DEFAULT_BATCH_SIZE,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl Settings {
    pub fn resolve(flags: &Overrides, file: Option<&ConfigFile>) -> CliResult<Self> {
        let empty = ConfigFile::default();
        let file = file.unwrap_or(&empty);
        let d = Self::default();
        let grouping = match flags.grouping {
            Some(g) => g,
            None => match file.get::<String>("grouping")? {
                Some(s) => s.parse().map_err(|_| CliError::Config(format!("unknown grouping `{s}`")))?,
                None => d.grouping,
            },
        };
        let s = Self {
            seed: flags.seed.or(file.get("seed")?).unwrap_or(d.seed),
            k: flags.k.or(file.get("k")?).unwrap_or(d.k),
            grouping,
            pretrain_epochs: flags.pretrain_epochs.or(file.get("pretrain_epochs")?).unwrap_or(d.pretrain_epochs),
            finetune_epochs: flags.finetune_epochs.or(file.get("finetune_epochs")?).unwrap_or(d.finetune_epochs),
            learning_rate: flags.learning_rate.or(file.get("learning_rate")?).unwrap_or(d.learning_rate),
            batch_size: flags.batch_size.or(file.get("batch_size")?).unwrap_or(d.batch_size),
            jobs: flags.jobs.or(file.get("jobs")?).unwrap_or(d.jobs),
        };
        if s.batch_size == 0 || s.jobs == 0 || !(s.learning_rate > 0.0) {
            return Err(CliError::Config("batch_size, jobs and learning_rate must be positive".into()));
        }
        Ok(s)
    }

    /// Training recipe: fixed architecture and penalties, with the
    /// optimizer schedule taken from these settings.
    pub fn train_config(&self) -> TrainConfig {
        let mut cfg = TrainConfig::seeded(self.seed);
        cfg.set_pretrain_epochs(self.pretrain_epochs);
        cfg.finetune.epochs = self.finetune_epochs;
        cfg.set_learning_rate(self.learning_rate);
        cfg.set_batch_size(self.batch_size);
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigFile::parse("# comment\nseed = 5\nk=4\n\npretrain_epochs = 12\ngrouping = source\n").unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let s = Settings::resolve(&flags, Some(&file)).unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.k, 4);
        assert_eq!(s.pretrain_epochs, 12);
        assert_eq!(s.grouping, FoldGrouping::Source);
        assert_eq!(s.finetune_epochs, DEFAULT_FINETUNE_EPOCHS);
        let cfg = s.train_config();
        assert_eq!(cfg.autoencoder1.epochs, 12);
        assert_eq!(cfg.autoencoder1.hidden_size, 60);
        assert_eq!(cfg.autoencoder2.hidden_size, 25);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ConfigFile::parse("seed 5").is_err());
        assert!(ConfigFile::parse("hidden = 3").is_err());
        let f = ConfigFile::parse("k = many").unwrap();
        assert!(Settings::resolve(&Overrides::default(), Some(&f)).is_err());
    }
}
