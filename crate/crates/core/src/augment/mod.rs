//! Cross-lingual training-set augmentation.
//!
//! Every training sentence is translated into each pivot language and the
//! pair is rendered as `original [SEP] translation` under the original label.
//! The augmented set holds the originals followed, per original, by one
//! sample per pivot.

mod cache;
mod provider;

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::TranslationCache;
pub use provider::{
    FileProvider, HttpProvider, IdentityProvider, LangCode, MockProvider, TranslateError,
    TranslationProvider,
};

use crate::corpus::{Corpus, CorpusError, Label, LabeledExample, Language, Split};
use crate::encoder::SEP_TOKEN;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("pivot set is empty")]
    EmptyPivots,
    #[error("invalid pivot language: {0}")]
    InvalidPivot(String),
    #[error("pivot {0} listed twice")]
    DuplicatePivot(LangCode),
    #[error("pivot {0} equals the source language")]
    PivotIsSource(LangCode),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("only training splits are augmented, got {0}")]
    NotTrainingSplit(Split),
    #[error("translation of {id:?} into {pivot} failed: {source}")]
    Translation {
        id: String,
        pivot: LangCode,
        #[source]
        source: TranslateError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Ordered, duplicate-free pivot languages, none equal to the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotSet {
    pivots: Vec<LangCode>,
}

impl PivotSet {
    pub fn new(pivots: Vec<LangCode>, source: &LangCode) -> Result<Self, AugmentError> {
        if pivots.is_empty() {
            return Err(AugmentError::EmptyPivots);
        }
        for (i, p) in pivots.iter().enumerate() {
            if p == source {
                return Err(AugmentError::PivotIsSource(p.clone()));
            }
            if pivots[..i].contains(p) {
                return Err(AugmentError::DuplicatePivot(p.clone()));
            }
        }
        Ok(PivotSet { pivots })
    }

    pub fn parse(list: &str, source: &LangCode) -> Result<Self, AugmentError> {
        let pivots = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| LangCode::new(s).map_err(AugmentError::InvalidPivot))
            .collect::<Result<Vec<_>, _>>()?;
        PivotSet::new(pivots, source)
    }

    /// `[en, fr, de]`; English sources get `[fr, de, es]` instead.
    pub fn default_for(source: Language) -> Self {
        let codes: &[&str] = if source == Language::En {
            warn!("english source corpus: using pivots fr,de,es instead of en,fr,de");
            &["fr", "de", "es"]
        } else {
            &["en", "fr", "de"]
        };
        PivotSet {
            pivots: codes.iter().map(|c| LangCode::new(c).expect("static code")).collect(),
        }
    }

    pub fn pivots(&self) -> &[LangCode] {
        &self.pivots
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    FailFast,
    #[default]
    SkipOnError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(200),
        }
    }
}

/// A provider plus optional cache and retry policy.
pub struct Translator<'a> {
    provider: &'a dyn TranslationProvider,
    cache: Option<&'a TranslationCache>,
    retry: RetryPolicy,
}

impl<'a> Translator<'a> {
    pub fn new(provider: &'a dyn TranslationProvider) -> Self {
        Translator {
            provider,
            cache: None,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_cache(mut self, cache: &'a TranslationCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Cache lookup, then the provider with exponential backoff on retryable
    /// failures. Successful results are written back to the cache.
    pub fn translate(
        &self,
        text: &str,
        source: &LangCode,
        target: &LangCode,
    ) -> Result<String, TranslateError> {
        if !self.provider.supports(source, target) {
            return Err(TranslateError::UnsupportedPair {
                from: source.clone(),
                to: target.clone(),
            });
        }
        if let Some(hit) = self.cache.and_then(|c| c.get(text, source, target)) {
            return Ok(hit);
        }
        let attempts = self.retry.max_attempts.max(1);
        let mut attempt = 0;
        let translation = loop {
            match self.provider.translate(text, source, target) {
                Ok(t) => break t,
                Err(e) if e.is_retryable() && attempt + 1 < attempts => {
                    let delay = self.retry.base_delay * 2u32.saturating_pow(attempt);
                    warn!("{} provider: {e}; retrying in {delay:?}", self.provider.name());
                    thread::sleep(delay);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        };
        if translation.trim().is_empty() {
            return Err(TranslateError::EmptyTranslation);
        }
        if let Some(cache) = self.cache {
            cache.insert(text, source, target, &translation)?;
        }
        Ok(translation)
    }
}

pub fn translate(
    provider: &dyn TranslationProvider,
    text: &str,
    source: &LangCode,
    target: &LangCode,
) -> Result<String, TranslateError> {
    Translator::new(provider).translate(text, source, target)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub id: String,
    pub original_text: String,
    pub translated_text: String,
    pub pivot: LangCode,
    pub label: Label,
    pub rendered_text: String,
}

impl AugmentedExample {
    pub fn new(original: &LabeledExample, pivot: &LangCode, translated_text: String) -> Self {
        AugmentedExample {
            id: format!("{}-{pivot}", original.id),
            rendered_text: render_pair(&original.text, &translated_text),
            original_text: original.text.clone(),
            translated_text,
            pivot: pivot.clone(),
            label: original.label,
        }
    }

    pub fn to_labeled(&self) -> LabeledExample {
        LabeledExample {
            id: self.id.clone(),
            text: self.rendered_text.clone(),
            label: self.label,
        }
    }
}

pub fn render_pair(original: &str, translation: &str) -> String {
    format!("{original} {SEP_TOKEN} {translation}")
}

/// One sample per pivot, in pivot order. Under `SkipOnError` failed pivots
/// are logged and left out.
pub fn augment_example(
    example: &LabeledExample,
    source: &LangCode,
    pivots: &PivotSet,
    translator: &Translator<'_>,
    policy: FailurePolicy,
) -> Result<Vec<AugmentedExample>, AugmentError> {
    if pivots.is_empty() {
        return Err(AugmentError::EmptyPivots);
    }
    let mut out = Vec::with_capacity(pivots.len());
    for pivot in pivots.pivots() {
        match translator.translate(&example.text, source, pivot) {
            Ok(t) => out.push(AugmentedExample::new(example, pivot, t)),
            Err(e) => {
                let err = AugmentError::Translation {
                    id: example.id.clone(),
                    pivot: pivot.clone(),
                    source: e,
                };
                match policy {
                    FailurePolicy::FailFast => return Err(err),
                    FailurePolicy::SkipOnError => warn!("skipping: {err}"),
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentOptions {
    pub policy: FailurePolicy,
    /// Upper bound on concurrent provider calls.
    pub max_in_flight: usize,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        AugmentOptions {
            policy: FailurePolicy::SkipOnError,
            max_in_flight: 4,
        }
    }
}

/// Builds the augmented training set: each original followed by its pivot
/// samples, ordered by (original index, pivot index) whatever the order in
/// which translations complete.
pub fn augment_corpus(
    corpus: &Corpus,
    pivots: &PivotSet,
    translator: &Translator<'_>,
    options: AugmentOptions,
) -> Result<Corpus, AugmentError> {
    if corpus.is_empty() {
        return Err(AugmentError::EmptyCorpus);
    }
    if corpus.split != Split::Train {
        return Err(AugmentError::NotTrainingSplit(corpus.split));
    }
    let source = LangCode::from(corpus.language);
    let examples = corpus.examples();
    let p = pivots.len();
    let jobs = examples.len() * p;
    let results: Vec<Mutex<Option<Result<String, TranslateError>>>> =
        (0..jobs).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);

    thread::scope(|scope| {
        for _ in 0..options.max_in_flight.clamp(1, jobs) {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= jobs {
                    break;
                }
                let (ex, pivot) = (&examples[job / p], &pivots.pivots()[job % p]);
                let r = translator.translate(&ex.text, &source, pivot);
                if r.is_err() && options.policy == FailurePolicy::FailFast {
                    abort.store(true, Ordering::Relaxed);
                }
                *results[job].lock().expect("result slot poisoned") = Some(r);
            });
        }
    });

    let mut out = Vec::with_capacity(examples.len() * (p + 1));
    for (i, ex) in examples.iter().enumerate() {
        out.push(ex.clone());
        for (j, pivot) in pivots.pivots().iter().enumerate() {
            let slot = results[i * p + j].lock().expect("result slot poisoned").take();
            match slot {
                Some(Ok(t)) => out.push(AugmentedExample::new(ex, pivot, t).to_labeled()),
                Some(Err(e)) => {
                    let err = AugmentError::Translation {
                        id: ex.id.clone(),
                        pivot: pivot.clone(),
                        source: e,
                    };
                    match options.policy {
                        FailurePolicy::FailFast => return Err(err),
                        FailurePolicy::SkipOnError => warn!("skipping: {err}"),
                    }
                }
                // not attempted because an earlier job failed under FailFast
                None => {}
            }
        }
    }
    Ok(Corpus::new(corpus.language, Split::Train, out)?)
}
