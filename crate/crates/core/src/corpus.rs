//! Labeled and scored sentence corpora: data model, TSV ingestion, class
//! statistics and stratified holdout splitting.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("unknown label {token:?} at line {line}")]
    UnknownLabel { line: usize, token: String },
    #[error("duplicate id {id:?} at line {line}")]
    DuplicateId { line: usize, id: String },
    #[error("confidence {value} at line {line} is outside [0, 1]")]
    OutOfRangeConfidence { line: usize, value: f64 },
    #[error("empty text for id {0:?}")]
    EmptyText(String),
    #[error("text for id {0:?} contains a tab or line break")]
    UnencodableText(String),
    #[error("holdout fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Binary offensiveness label. `OFF` is class index 0, `NOT` is index 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "OFF")]
    Off,
    #[serde(rename = "NOT")]
    Not,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Off, Label::Not];

    pub fn index(self) -> usize {
        match self {
            Label::Off => 0,
            Label::Not => 1,
        }
    }

    pub fn from_index(index: usize) -> Label {
        if index == 0 {
            Label::Off
        } else {
            Label::Not
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Off => Label::Not,
            Label::Not => Label::Off,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Off => "OFF",
            Label::Not => "NOT",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    /// Case-insensitive; anything other than `off`/`not` is rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let token = s.trim();
        if token.eq_ignore_ascii_case("off") {
            Ok(Label::Off)
        } else if token.eq_ignore_ascii_case("not") {
            Ok(Label::Not)
        } else {
            Err(token.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Da,
    Tr,
    Ar,
    El,
}

impl Language {
    pub const ALL: [Language; 5] = [
        Language::En,
        Language::Da,
        Language::Tr,
        Language::Ar,
        Language::El,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Da => "da",
            Language::Tr => "tr",
            Language::Ar => "ar",
            Language::El => "el",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::ALL
            .into_iter()
            .find(|l| l.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown language code {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        label: Label,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyText(id));
        }
        Ok(LabeledExample { id, text, label })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredExample {
    pub id: String,
    pub text: String,
    /// Averaged probability of the offensive class, in `[0, 1]`.
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub off_count: usize,
    pub not_count: usize,
    pub total: usize,
}

impl CorpusStats {
    pub fn new(off_count: usize, not_count: usize) -> Self {
        CorpusStats {
            off_count,
            not_count,
            total: off_count + not_count,
        }
    }

    pub fn count(&self, label: Label) -> usize {
        match label {
            Label::Off => self.off_count,
            Label::Not => self.not_count,
        }
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{off={}, not={}, total={}}}",
            self.off_count, self.not_count, self.total
        )
    }
}

/// Published class distributions of the shared-task datasets, as
/// `(language, train, test)`. English train is the weakly labeled sample.
pub const REPORTED_STATS: [(Language, CorpusStats, CorpusStats); 5] = [
    (
        Language::En,
        CorpusStats { off_count: 300_000, not_count: 300_000, total: 600_000 },
        CorpusStats { off_count: 1080, not_count: 2807, total: 3887 },
    ),
    (
        Language::Da,
        CorpusStats { off_count: 307, not_count: 2061, total: 2368 },
        CorpusStats { off_count: 41, not_count: 288, total: 329 },
    ),
    (
        Language::Tr,
        CorpusStats { off_count: 4837, not_count: 20184, total: 25021 },
        CorpusStats { off_count: 716, not_count: 2812, total: 3528 },
    ),
    (
        Language::Ar,
        CorpusStats { off_count: 1371, not_count: 5468, total: 6839 },
        CorpusStats { off_count: 402, not_count: 1598, total: 2000 },
    ),
    (
        Language::El,
        CorpusStats { off_count: 1989, not_count: 5005, total: 6994 },
        CorpusStats { off_count: 242, not_count: 1302, total: 1544 },
    ),
];

pub fn reported_stats(language: Language, split: Split) -> Option<CorpusStats> {
    let (_, train, test) = REPORTED_STATS.iter().find(|(l, _, _)| *l == language)?;
    match split {
        Split::Train => Some(*train),
        Split::Test => Some(*test),
        Split::Validation => None,
    }
}

/// An ordered collection of labeled examples with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub language: Language,
    pub split: Split,
    examples: Vec<LabeledExample>,
}

impl Corpus {
    pub fn empty(language: Language, split: Split) -> Self {
        Corpus {
            language,
            split,
            examples: Vec::new(),
        }
    }

    pub fn new(
        language: Language,
        split: Split,
        examples: Vec<LabeledExample>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(examples.len());
        for (i, ex) in examples.iter().enumerate() {
            if !seen.insert(ex.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    line: i + 1,
                    id: ex.id.clone(),
                });
            }
        }
        Ok(Corpus {
            language,
            split,
            examples,
        })
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.examples.iter().map(|e| e.label).collect()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.examples.iter().map(|e| e.text.as_str())
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    /// Returns a copy with every text rewritten by `f`; ids and labels are kept.
    pub fn map_texts(&self, mut f: impl FnMut(&str) -> String) -> Result<Corpus, CorpusError> {
        let examples = self
            .examples
            .iter()
            .map(|e| LabeledExample::new(e.id.clone(), f(&e.text), e.label))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus {
            language: self.language,
            split: self.split,
            examples,
        })
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let off = corpus
        .examples
        .iter()
        .filter(|e| e.label == Label::Off)
        .count();
    CorpusStats::new(off, corpus.len() - off)
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Yields `(line_number, fields)` for every data row. Line numbers are
/// 1-based and count the header. A first row whose first field is `id` is
/// treated as the header.
fn data_rows(content: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.is_empty())
        .enumerate()
        .filter(|(row, (_, line))| !(*row == 0 && line.split('\t').next() == Some("id")))
        .map(|(_, (n, line))| (n, line.split('\t').collect()))
}

pub fn parse_labeled_tsv(
    content: &str,
    language: Language,
    split: Split,
) -> Result<Corpus, CorpusError> {
    let mut examples = Vec::new();
    let mut seen = HashSet::new();
    for (line, fields) in data_rows(content) {
        if fields.len() < 3 {
            return Err(CorpusError::MalformedRow {
                line,
                reason: format!("expected at least 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let label = fields[2]
            .parse::<Label>()
            .map_err(|token| CorpusError::UnknownLabel { line, token })?;
        let id = fields[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { line, id });
        }
        let example = LabeledExample::new(id, fields[1], label).map_err(|_| {
            CorpusError::MalformedRow {
                line,
                reason: "empty text".into(),
            }
        })?;
        examples.push(example);
    }
    Ok(Corpus {
        language,
        split,
        examples,
    })
}

pub fn load_labeled_tsv(
    path: impl AsRef<Path>,
    language: Language,
    split: Split,
) -> Result<Corpus, CorpusError> {
    parse_labeled_tsv(&read_file(path.as_ref())?, language, split)
}

pub fn parse_scored_tsv(content: &str) -> Result<Vec<ScoredExample>, CorpusError> {
    let mut out = Vec::new();
    for (line, fields) in data_rows(content) {
        if fields.len() < 3 {
            return Err(CorpusError::MalformedRow {
                line,
                reason: format!("expected at least 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let raw = fields[2].trim();
        let confidence = raw
            .parse::<f64>()
            .ok()
            .filter(|c| c.is_finite())
            .ok_or_else(|| CorpusError::MalformedRow {
                line,
                reason: format!("confidence {raw:?} is not a finite number"),
            })?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(CorpusError::OutOfRangeConfidence {
                line,
                value: confidence,
            });
        }
        out.push(ScoredExample {
            id: fields[0].to_string(),
            text: fields[1].to_string(),
            confidence,
        });
    }
    Ok(out)
}

pub fn load_scored_tsv(path: impl AsRef<Path>) -> Result<Vec<ScoredExample>, CorpusError> {
    parse_scored_tsv(&read_file(path.as_ref())?)
}

fn check_field(id: &str, field: &str) -> Result<(), CorpusError> {
    if field.contains(['\t', '\n', '\r']) {
        Err(CorpusError::UnencodableText(id.to_string()))
    } else {
        Ok(())
    }
}

pub fn labeled_to_tsv(corpus: &Corpus) -> Result<String, CorpusError> {
    let mut out = String::from("id\ttext\tlabel\n");
    for e in &corpus.examples {
        check_field(&e.id, &e.id)?;
        check_field(&e.id, &e.text)?;
        out.push_str(&format!("{}\t{}\t{}\n", e.id, e.text, e.label));
    }
    Ok(out)
}

pub fn scored_to_tsv(scored: &[ScoredExample]) -> Result<String, CorpusError> {
    let mut out = String::from("id\ttext\tconfidence\n");
    for e in scored {
        check_field(&e.id, &e.id)?;
        check_field(&e.id, &e.text)?;
        out.push_str(&format!("{}\t{}\t{}\n", e.id, e.text, e.confidence));
    }
    Ok(out)
}

pub fn write_labeled_tsv(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, labeled_to_tsv(corpus)?).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Stratified holdout: from each class, `round(fraction * class_count)`
/// examples (half rounds up) go to validation, the rest stay in train.
/// Classes are shuffled in the order OFF then NOT from one seeded stream;
/// both outputs keep the input order.
pub fn split_holdout(
    corpus: &Corpus,
    holdout_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(holdout_fraction));
    }
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_validation = vec![false; corpus.len()];
    for label in Label::ALL {
        let mut members: Vec<usize> = corpus
            .examples
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == label)
            .map(|(i, _)| i)
            .collect();
        let take = round_half_up(holdout_fraction * members.len() as f64).min(members.len());
        members.shuffle(&mut rng);
        for &i in &members[..take] {
            in_validation[i] = true;
        }
    }
    let (mut train, mut validation) = (Vec::new(), Vec::new());
    for (e, &held) in corpus.examples.iter().zip(&in_validation) {
        if held {
            validation.push(e.clone());
        } else {
            train.push(e.clone());
        }
    }
    Ok((
        Corpus {
            language: corpus.language,
            split: Split::Train,
            examples: train,
        },
        Corpus {
            language: corpus.language,
            split: Split::Validation,
            examples: validation,
        },
    ))
}
