//! Declarative pipeline configuration read from TOML.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{FailurePolicy, LangCode, PivotSet};
use crate::corpus::Language;
use crate::encoder::EncoderConfig;
use crate::eval::Grid;
use crate::normalize::NormalizationConfig;
use crate::train::TrainConfig;
use crate::weaklabel::WeakLabelConfig;

use super::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub train: Option<PathBuf>,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub scored: Option<PathBuf>,
    /// Weakly labeled English corpus for the second encoder.
    pub weak: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Stored translations for the `file` provider.
    pub translations: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeSection {
    /// Defaults to on for English only.
    pub enabled: Option<bool>,
    #[serde(flatten)]
    pub config: NormalizationConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    #[default]
    Mock,
    Identity,
    File,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    /// Defaults to on for every language except English.
    pub enabled: Option<bool>,
    pub pivots: Option<Vec<String>>,
    pub provider: ProviderKind,
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
    pub policy: FailurePolicy,
}

impl Default for AugmentSection {
    fn default() -> Self {
        AugmentSection {
            enabled: None,
            pivots: None,
            provider: ProviderKind::Mock,
            endpoint: None,
            timeout_secs: 30,
            max_in_flight: 4,
            policy: FailurePolicy::SkipOnError,
        }
    }
}

/// Overrides on top of the per-language training defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub freeze_encoders: bool,
    pub dual_joint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub language: Option<Language>,
    /// Drives every seeded stage: holdout split, weak sampling, encoder
    /// initialisation and training.
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Read inputs from the bundled mini-corpus of `language`.
    pub bundled: bool,
    pub holdout_fraction: f64,
    pub paths: Paths,
    pub normalize: NormalizeSection,
    pub weaklabel: WeakLabelConfig,
    pub augment: AugmentSection,
    pub encoder: EncoderConfig,
    pub train: TrainSection,
    pub grid: Grid,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            language: None,
            seed: 0,
            out_dir: None,
            bundled: false,
            holdout_fraction: 0.2,
            paths: Paths::default(),
            normalize: NormalizeSection::default(),
            weaklabel: WeakLabelConfig::default(),
            augment: AugmentSection::default(),
            encoder: EncoderConfig::default(),
            train: TrainSection::default(),
            grid: Grid {
                learning_rates: vec![1e-5, 2e-5, 3e-5],
                batch_sizes: vec![8, 16, 24, 32],
            },
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        PipelineConfig::parse(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn language_or(&self, default: Language) -> Language {
        self.language.unwrap_or(default)
    }

    pub fn normalize_enabled(&self, language: Language) -> bool {
        self.normalize.enabled.unwrap_or(language == Language::En)
    }

    pub fn augment_enabled(&self, language: Language) -> bool {
        self.augment.enabled.unwrap_or(language != Language::En)
    }

    pub fn pivots(&self, language: Language) -> Result<PivotSet, CliError> {
        let source = LangCode::from(language);
        match &self.augment.pivots {
            Some(list) => PivotSet::parse(&list.join(","), &source)
                .map_err(|e| CliError::Config(format!("augment.pivots: {e}"))),
            None => Ok(PivotSet::default_for(language)),
        }
    }

    pub fn train_config(&self, language: Language) -> TrainConfig {
        let mut c = TrainConfig::for_language(language);
        if let Some(e) = self.train.epochs {
            c.epochs = e;
        }
        if let Some(b) = self.train.batch_size {
            c.batch_size = b;
        }
        if let Some(lr) = self.train.learning_rate {
            c.learning_rate = lr;
        }
        c.seed = self.seed;
        c.freeze_encoders = self.train.freeze_encoders;
        c.dual_joint = self.train.dual_joint;
        c
    }

    pub fn encoder_config(&self) -> EncoderConfig {
        EncoderConfig {
            seed: self.seed,
            ..self.encoder.clone()
        }
    }

    pub fn weaklabel_config(&self) -> WeakLabelConfig {
        WeakLabelConfig {
            seed: self.seed,
            ..self.weaklabel.clone()
        }
    }

    /// Checks every value that can be checked before any work starts.
    pub fn validate(&self, language: Language) -> Result<(), CliError> {
        let bad = |what: &str, e: &dyn std::fmt::Display| CliError::Config(format!("{what}: {e}"));
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "holdout_fraction {} must lie strictly between 0 and 1",
                self.holdout_fraction
            )));
        }
        self.encoder_config().validate().map_err(|e| bad("encoder", &e))?;
        self.train_config(language).validate().map_err(|e| bad("train", &e))?;
        self.weaklabel_config().validate().map_err(|e| bad("weaklabel", &e))?;
        if self.augment.max_in_flight == 0 {
            return Err(CliError::Config("augment.max_in_flight must be at least 1".into()));
        }
        if self.augment.provider == ProviderKind::Http && self.augment.endpoint.is_none() {
            return Err(CliError::Config("augment.endpoint is required for the http provider".into()));
        }
        if self.augment.provider == ProviderKind::File && self.paths.translations.is_none() {
            return Err(CliError::Config("paths.translations is required for the file provider".into()));
        }
        let p = &self.paths;
        for (name, path) in [
            ("paths.train", &p.train),
            ("paths.validation", &p.validation),
            ("paths.test", &p.test),
            ("paths.scored", &p.scored),
            ("paths.weak", &p.weak),
            ("paths.checkpoint", &p.checkpoint),
            ("paths.translations", &p.translations),
            ("normalize.emoji_map_path", &self.normalize.config.emoji_map_path),
            ("normalize.slang_map_path", &self.normalize.config.slang_map_path),
            ("normalize.lexicon_path", &self.normalize.config.lexicon_path),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(CliError::Config(format!("{name}: {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    /// Fingerprint of everything that affects results; output location and
    /// checkpoint location are left out so reruns elsewhere match.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.out_dir = None;
        c.paths.checkpoint = None;
        c.paths.cache = None;
        crate::eval::config_fingerprint(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c = PipelineConfig::parse(
            r#"
language = "el"
seed = 7

[train]
learning_rate = 0.001

[augment]
pivots = ["en", "fr"]
provider = "identity"

[encoder]
hidden_size = 32
"#,
        )
        .unwrap();
        assert_eq!(c.language, Some(Language::El));
        let t = c.train_config(Language::El);
        assert_eq!((t.batch_size, t.learning_rate, t.seed), (32, 1e-3, 7));
        assert_eq!(c.encoder_config().hidden_size, 32);
        assert_eq!(c.encoder_config().seed, 7);
        assert_eq!(c.pivots(Language::El).unwrap().len(), 2);
        assert!(c.validate(Language::El).is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(PipelineConfig::parse("langauge = \"en\"").is_err());
        assert!(PipelineConfig::parse("[train]\nepoch = 3").is_err());
    }

    #[test]
    fn missing_path_is_a_config_error() {
        let c = PipelineConfig::parse("[paths]\ntrain = \"/definitely/not/here.tsv\"").unwrap();
        let err = c.validate(Language::En).unwrap_err();
        assert!(err.to_string().contains("/definitely/not/here.tsv"));
    }

    #[test]
    fn fingerprint_ignores_output_location() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            out_dir: Some("elsewhere".into()),
            ..a.clone()
        };
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = PipelineConfig { seed: 1, ..a.clone() };
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
