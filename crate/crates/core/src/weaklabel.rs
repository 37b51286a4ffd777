//! Turns confidence-scored sentences into a balanced weakly labeled corpus.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Label, LabeledExample, Language, ScoredExample, Split};

#[derive(Debug, Error)]
pub enum WeakLabelError {
    #[error("thresholds must satisfy 0 <= lo < hi <= 1 (got lo={lo}, hi={hi})")]
    InvalidThresholds { lo: f64, hi: f64 },
    #[error("per-class count must be positive")]
    ZeroCount,
    #[error("only {available} {class} examples pass the threshold, {requested} requested")]
    InsufficientClassSamples {
        class: Label,
        available: usize,
        requested: usize,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeakLabelConfig {
    pub hi_threshold: f64,
    pub lo_threshold: f64,
    pub per_class_count: usize,
    pub seed: u64,
}

impl Default for WeakLabelConfig {
    fn default() -> Self {
        WeakLabelConfig {
            hi_threshold: 0.8,
            lo_threshold: 0.2,
            per_class_count: 300_000,
            seed: 0,
        }
    }
}

impl WeakLabelConfig {
    pub fn validate(&self) -> Result<(), WeakLabelError> {
        let (lo, hi) = (self.lo_threshold, self.hi_threshold);
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(WeakLabelError::InvalidThresholds { lo, hi });
        }
        if self.per_class_count == 0 {
            return Err(WeakLabelError::ZeroCount);
        }
        Ok(())
    }
}

/// OFF above `hi`, NOT below `lo`, nothing in between. Both bounds are strict.
pub fn weak_label(example: &ScoredExample, config: &WeakLabelConfig) -> Option<Label> {
    if example.confidence > config.hi_threshold {
        Some(Label::Off)
    } else if example.confidence < config.lo_threshold {
        Some(Label::Not)
    } else {
        None
    }
}

/// Samples exactly `per_class_count` examples of each class without
/// replacement. One generator drives the OFF draw, then the NOT draw, then
/// the final shuffle.
pub fn build_weak_corpus(
    scored: &[ScoredExample],
    config: &WeakLabelConfig,
) -> Result<Corpus, WeakLabelError> {
    config.validate()?;
    let k = config.per_class_count;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut picked = Vec::with_capacity(2 * k);
    for class in Label::ALL {
        let pool: Vec<&ScoredExample> = scored
            .iter()
            .filter(|e| weak_label(e, config) == Some(class))
            .collect();
        if pool.len() < k {
            return Err(WeakLabelError::InsufficientClassSamples {
                class,
                available: pool.len(),
                requested: k,
            });
        }
        let mut chosen = index::sample(&mut rng, pool.len(), k).into_vec();
        chosen.sort_unstable();
        for i in chosen {
            let e = pool[i];
            picked.push(LabeledExample::new(e.id.clone(), e.text.clone(), class)?);
        }
    }
    picked.shuffle(&mut rng);
    Ok(Corpus::new(Language::En, Split::Train, picked)?)
}
