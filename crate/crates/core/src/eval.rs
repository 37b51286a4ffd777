//! Metrics, the majority baseline, grid search and the two ablation
//! protocols.

use std::collections::HashSet;
use std::thread;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::augment::{augment_corpus, AugmentError, AugmentOptions, PivotSet, Translator};
use crate::corpus::{Corpus, CorpusStats, Label};
use crate::encoder::{build_vocab, EncoderConfig, EncoderError, EncoderModel, Vocabulary};
use crate::train::{fit, train_dual, train_single, TrainConfig, TrainError, TrainOutcome};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("predictions ({predictions}) and gold labels ({gold}) differ in length")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("training statistics are empty")]
    DegenerateStats,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("train and validation share example id {0:?}")]
    Overlap(String),
    #[error("every grid cell diverged")]
    AllDiverged,
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
}

/// `counts[predicted][gold]`, indexed by [`Label::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_labels(predictions: &[Label], gold: &[Label]) -> Self {
        let mut m = ConfusionMatrix::default();
        for (p, g) in predictions.iter().zip(gold) {
            m.counts[p.index()][g.index()] += 1;
        }
        m
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn is_diagonal(&self) -> bool {
        self.counts[0][1] == 0 && self.counts[1][0] == 0
    }

    pub fn class_metrics(&self, label: Label) -> ClassMetrics {
        let c = label.index();
        let o = 1 - c;
        let tp = self.counts[c][c] as f64;
        let fp = self.counts[c][o] as f64;
        let fn_ = self.counts[o][c] as f64;
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        ClassMetrics {
            precision,
            recall,
            f1: ratio(2.0 * precision * recall, precision + recall),
            support: (tp + fn_) as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold examples of this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub macro_f1: f64,
    pub accuracy: f64,
    pub off: ClassMetrics,
    pub not: ClassMetrics,
    pub confusion: ConfusionMatrix,
    pub config_fingerprint: String,
    pub seed: u64,
}

impl EvalReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let off = confusion.class_metrics(Label::Off);
        let not = confusion.class_metrics(Label::Not);
        EvalReport {
            macro_f1: (off.f1 + not.f1) / 2.0,
            accuracy: confusion.correct() as f64 / confusion.total() as f64,
            off,
            not,
            confusion,
            config_fingerprint: String::new(),
            seed: 0,
        }
    }

    pub fn with_provenance(mut self, fingerprint: impl Into<String>, seed: u64) -> Self {
        self.config_fingerprint = fingerprint.into();
        self.seed = seed;
        self
    }

    pub fn class(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Off => &self.off,
            Label::Not => &self.not,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Rounds to the four decimals used in report tables.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Hex SHA-256 of the JSON form of a config value.
pub fn config_fingerprint<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

pub fn evaluate(predictions: &[Label], gold: &[Label]) -> Result<EvalReport, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(EvalReport::from_confusion(ConfusionMatrix::from_labels(predictions, gold)))
}

/// The more frequent training class; a tie goes to NOT.
pub fn majority_label(train_stats: &CorpusStats) -> Result<Label, EvalError> {
    if train_stats.off_count + train_stats.not_count == 0 {
        return Err(EvalError::DegenerateStats);
    }
    Ok(if train_stats.off_count > train_stats.not_count {
        Label::Off
    } else {
        Label::Not
    })
}

pub fn majority_baseline(train_stats: &CorpusStats, gold: &[Label]) -> Result<EvalReport, EvalError> {
    let label = majority_label(train_stats)?;
    evaluate(&vec![label; gold.len()], gold)
}

/// Builds a vocabulary on `train`, fine-tunes a fresh encoder and scores it
/// on `validation`.
pub fn train_and_evaluate(
    train: &Corpus,
    validation: &Corpus,
    encoder_config: &EncoderConfig,
    train_config: &TrainConfig,
) -> Result<(TrainOutcome, EvalReport), EvalError> {
    let vocab = build_vocab(train, encoder_config.vocab_cap)?;
    let encoder = EncoderModel::new(encoder_config.clone(), vocab.len())?;
    let outcome = train_single(train, &encoder, &vocab, train_config)?;
    let predictions = outcome.classifier.predict_corpus(validation)?;
    let report = evaluate(&predictions, &validation.labels())?.with_provenance(
        config_fingerprint(&(encoder_config, train_config)),
        train_config.seed,
    );
    Ok((outcome, report))
}

fn check_disjoint(train: &Corpus, validation: &Corpus) -> Result<(), EvalError> {
    let ids: HashSet<&str> = train.examples().iter().map(|e| e.id.as_str()).collect();
    match validation.examples().iter().find(|e| ids.contains(e.id.as_str())) {
        Some(e) => Err(EvalError::Overlap(e.id.clone())),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub learning_rates: Vec<f64>,
    pub batch_sizes: Vec<usize>,
}

impl Grid {
    /// Cells in declared order, learning rate outermost.
    pub fn cells(&self) -> Vec<(f64, usize)> {
        self.learning_rates
            .iter()
            .flat_map(|&lr| self.batch_sizes.iter().map(move |&b| (lr, b)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub learning_rate: f64,
    pub batch_size: usize,
    /// `None` when the cell diverged.
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub best: TrainConfig,
    pub best_index: usize,
    pub cells: Vec<GridCell>,
}

/// Trains one model per cell with the shared seed and keeps the best
/// validation macro-F1. The earliest cell wins ties; diverged cells are
/// recorded and skipped.
pub fn grid_search(
    grid: &Grid,
    train: &Corpus,
    validation: &Corpus,
    encoder_config: &EncoderConfig,
    base_config: &TrainConfig,
) -> Result<GridSearchResult, EvalError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    check_disjoint(train, validation)?;
    let configs: Vec<TrainConfig> = cells
        .iter()
        .map(|&(learning_rate, batch_size)| TrainConfig {
            learning_rate,
            batch_size,
            ..base_config.clone()
        })
        .collect();
    let results: Vec<Result<EvalReport, EvalError>> = thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    train_and_evaluate(train, validation, encoder_config, c).map(|(_, r)| r)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("grid cell panicked"))
            .collect()
    });

    let mut out = Vec::with_capacity(cells.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, (res, &(learning_rate, batch_size))) in results.into_iter().zip(&cells).enumerate() {
        let (report, error) = match res {
            Ok(r) => (Some(r), None),
            Err(EvalError::Train(e @ (TrainError::Diverged { .. } | TrainError::NonFiniteLogits))) => {
                log::warn!("grid cell lr={learning_rate} batch={batch_size}: {e}");
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        if let Some(r) = &report {
            if best.is_none_or(|(_, f)| r.macro_f1 > f) {
                best = Some((i, r.macro_f1));
            }
        }
        out.push(GridCell {
            learning_rate,
            batch_size,
            report,
            error,
        });
    }
    let (best_index, _) = best.ok_or(EvalError::AllDiverged)?;
    Ok(GridSearchResult {
        best: configs[best_index].clone(),
        best_index,
        cells: out,
    })
}

pub const WITHOUT_AUGMENTATION: &str = "\u{2212}Augmentation";
pub const WITH_AUGMENTATION: &str = "+Augmentation";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledReport {
    pub label: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentationAblation {
    pub without: EvalReport,
    pub with: EvalReport,
}

impl AugmentationAblation {
    pub fn rows(&self) -> Vec<LabeledReport> {
        vec![
            LabeledReport {
                label: WITHOUT_AUGMENTATION.into(),
                report: self.without.clone(),
            },
            LabeledReport {
                label: WITH_AUGMENTATION.into(),
                report: self.with.clone(),
            },
        ]
    }
}

/// Trains twice from scratch with identical configs, once on `train` and
/// once on its augmented form, and scores both on the same `validation`.
pub fn ablation_augmentation(
    train: &Corpus,
    validation: &Corpus,
    pivots: &PivotSet,
    translator: &Translator<'_>,
    options: &AugmentOptions,
    encoder_config: &EncoderConfig,
    train_config: &TrainConfig,
) -> Result<AugmentationAblation, EvalError> {
    check_disjoint(train, validation)?;
    let augmented = augment_corpus(train, pivots, translator, *options)?;
    let (_, without) = train_and_evaluate(train, validation, encoder_config, train_config)?;
    let (_, with) = train_and_evaluate(&augmented, validation, encoder_config, train_config)?;
    Ok(AugmentationAblation { without, with })
}

pub const WITHOUT_CLEAN: &str = "\u{2212}OLID";
pub const WITHOUT_WEAK: &str = "\u{2212}Weak";
pub const DUAL: &str = "Dual";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnglishAblation {
    /// Encoder fine-tuned on the gold corpus, with its own head.
    pub clean_only: EvalReport,
    /// Encoder fine-tuned on the weakly labeled corpus, with its own head.
    pub weak_only: EvalReport,
    /// Fresh head over both frozen encoders.
    pub dual: EvalReport,
    pub dual_input_dim: usize,
}

impl EnglishAblation {
    /// Rows in table order: weak-only, clean-only, dual.
    pub fn rows(&self) -> Vec<LabeledReport> {
        [
            (WITHOUT_CLEAN, &self.weak_only),
            (WITHOUT_WEAK, &self.clean_only),
            (DUAL, &self.dual),
        ]
        .into_iter()
        .map(|(label, r)| LabeledReport {
            label: label.into(),
            report: r.clone(),
        })
        .collect()
    }
}

/// Fine-tunes encoder A on the gold corpus and encoder B on the weak
/// corpus over a shared vocabulary, then trains a head over both on the
/// gold corpus. All runs share the seeds in the configs.
pub fn ablation_english(
    clean: &Corpus,
    weak: &Corpus,
    test: &Corpus,
    encoder_config: &EncoderConfig,
    train_config: &TrainConfig,
) -> Result<EnglishAblation, EvalError> {
    if clean.is_empty() || weak.is_empty() {
        return Err(EvalError::Empty);
    }
    let both = Corpus::new(
        clean.language,
        clean.split,
        clean
            .examples()
            .iter()
            .cloned()
            .chain(weak.examples().iter().cloned().enumerate().map(|(i, mut e)| {
                e.id = format!("weak-{i}");
                e
            }))
            .collect(),
    )
    .map_err(|e| EvalError::Encoder(EncoderError::InvalidVocabulary(e.to_string())))?;
    let vocab: Vocabulary = build_vocab(&both, encoder_config.vocab_cap)?;
    let fresh = EncoderModel::new(encoder_config.clone(), vocab.len())?;
    let fingerprint = config_fingerprint(&(encoder_config, train_config));
    let gold = test.labels();
    let score = |outcome: &TrainOutcome| -> Result<EvalReport, EvalError> {
        let predictions = outcome.classifier.predict_corpus(test)?;
        Ok(evaluate(&predictions, &gold)?.with_provenance(fingerprint.clone(), train_config.seed))
    };

    let a = train_single(clean, &fresh, &vocab, train_config)?;
    let b = train_single(weak, &fresh, &vocab, train_config)?;
    let dual_config = TrainConfig {
        dual_joint: false,
        ..train_config.clone()
    };
    let dual = train_dual(
        clean,
        &a.classifier.encoders[0],
        &b.classifier.encoders[0],
        &vocab,
        &dual_config,
    )?;
    Ok(EnglishAblation {
        clean_only: score(&a)?,
        weak_only: score(&b)?,
        dual_input_dim: dual.classifier.feature_dim(),
        dual: score(&dual)?,
    })
}

/// Head-only training on frozen encoders, for callers that already hold
/// fine-tuned encoders.
pub fn train_head(
    corpus: &Corpus,
    encoders: Vec<EncoderModel>,
    vocabulary: &Vocabulary,
    config: &TrainConfig,
) -> Result<TrainOutcome, EvalError> {
    Ok(fit(vocabulary, encoders, corpus, config, false)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Not, Off};

    #[test]
    fn hand_computed_macro_f1() {
        let r = evaluate(&[Off, Not, Not, Not], &[Off, Off, Not, Not]).unwrap();
        assert!((r.off.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.not.f1 - 0.8).abs() < 1e-12);
        assert!((r.macro_f1 - 0.7333333333333333).abs() < 1e-12);
        assert_eq!(r.accuracy, 0.75);
        assert_eq!(r.confusion.counts, [[1, 0], [1, 2]]);
    }

    #[test]
    fn perfect_predictions() {
        let gold = [Off, Not, Not, Off, Not];
        let r = evaluate(&gold, &gold).unwrap();
        assert_eq!((r.macro_f1, r.accuracy), (1.0, 1.0));
        assert!(r.confusion.is_diagonal());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(evaluate(&[], &[]), Err(EvalError::Empty)));
        assert!(matches!(
            evaluate(&[Off], &[Off, Not]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn english_majority_row() {
        let mut gold = vec![Off; 1080];
        gold.extend(vec![Not; 2807]);
        let r = majority_baseline(&CorpusStats::new(300_000, 300_000), &gold).unwrap();
        let p = 2807.0 / 3887.0;
        assert!((r.macro_f1 - p / (1.0 + p)).abs() < 1e-12);
        assert_eq!(round4(r.macro_f1), 0.4193);
    }

    #[test]
    fn majority_on_single_class_gold() {
        let r = majority_baseline(&CorpusStats::new(10, 3), &[Off, Off]).unwrap();
        assert_eq!(r.macro_f1, 0.5);
        assert!(majority_baseline(&CorpusStats::new(0, 0), &[Off]).is_err());
    }

    #[test]
    fn grid_cells_are_lr_major() {
        let g = Grid {
            learning_rates: vec![1e-3, 1e-4],
            batch_sizes: vec![8, 16],
        };
        assert_eq!(g.cells(), vec![(1e-3, 8), (1e-3, 16), (1e-4, 8), (1e-4, 16)]);
    }

    #[test]
    fn fingerprint_is_stable() {
        let c = TrainConfig::default();
        assert_eq!(config_fingerprint(&c), config_fingerprint(&c.clone()));
        assert_eq!(config_fingerprint(&c).len(), 64);
        let other = TrainConfig { seed: 9, ..c.clone() };
        assert_ne!(config_fingerprint(&c), config_fingerprint(&other));
    }
}
