//! Seeded generators for synthetic corpora used in tests, demos and the
//! bundled offline assets.
//!
//! Every generator draws from a single `ChaCha8Rng` seeded by the caller,
//! so output is a pure function of the arguments.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{FileProvider, LangCode};
use crate::corpus::{split_holdout, Corpus, CorpusError, CorpusStats, Label, LabeledExample, Language, ScoredExample, Split};
use crate::encoder::EncoderConfig;

/// Encoder size used for the synthetic tasks: small enough that a full
/// training run takes well under a second.
pub fn toy_encoder_config(seed: u64) -> EncoderConfig {
    EncoderConfig {
        hidden_size: 32,
        layers: 2,
        heads: 2,
        ff_size: 64,
        max_len: 48,
        vocab_cap: 2000,
        dropout: 0.1,
        seed,
    }
}

fn syllable_words(rng: &mut ChaCha8Rng, onsets: &[&str], vowels: &[&str], count: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=3);
        let w: String = (0..n)
            .map(|_| format!("{}{}", onsets.choose(rng).unwrap(), vowels.choose(rng).unwrap()))
            .collect();
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Pseudo-word inventory of one language: offensive cues, neutral cues and
/// fillers, disjoint from each other.
#[derive(Debug, Clone)]
pub struct WordBank {
    pub offensive: Vec<String>,
    pub friendly: Vec<String>,
    pub filler: Vec<String>,
}

impl WordBank {
    pub fn for_language(language: Language) -> WordBank {
        if language == Language::En {
            let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
            return WordBank {
                offensive: v(&[
                    "idiot", "stupid", "trash", "loser", "moron", "pathetic", "disgusting", "dumb",
                    "worthless", "clown", "liar", "creep",
                ]),
                friendly: v(&[
                    "thanks", "great", "love", "happy", "friend", "welcome", "nice", "agree",
                    "support", "wonderful", "kind", "proud",
                ]),
                filler: v(&[
                    "the", "this", "is", "so", "you", "we", "they", "really", "today", "game",
                    "people", "that", "are", "just", "what", "about", "think", "again", "time",
                    "here", "news", "vote", "world", "day",
                ]),
            };
        }
        let (onsets, vowels): (&[&str], &[&str]) = match language {
            Language::Da => (
                &["b", "d", "f", "g", "h", "k", "l", "m", "n", "r", "s", "t", "v", "sk", "st"],
                &["a", "e", "i", "o", "u", "y", "æ", "ø", "å"],
            ),
            Language::Tr => (
                &["b", "c", "ç", "d", "g", "ğ", "k", "l", "m", "n", "s", "ş", "t", "y", "z"],
                &["a", "e", "ı", "i", "o", "ö", "u", "ü"],
            ),
            Language::Ar => (
                &["ب", "ت", "ج", "د", "ر", "س", "ش", "ع", "ف", "ق", "ك", "ل", "م", "ن", "ه"],
                &["ا", "و", "ي", ""],
            ),
            Language::El => (
                &["β", "γ", "δ", "θ", "κ", "λ", "μ", "ν", "π", "ρ", "σ", "τ", "φ", "χ"],
                &["α", "ε", "η", "ι", "ο", "υ", "ω"],
            ),
            Language::En => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(language as u64 + 1);
        let mut taken = BTreeSet::new();
        WordBank {
            offensive: syllable_words(&mut rng, onsets, vowels, 12, &mut taken),
            friendly: syllable_words(&mut rng, onsets, vowels, 12, &mut taken),
            filler: syllable_words(&mut rng, onsets, vowels, 24, &mut taken),
        }
    }
}

fn shuffled_corpus(
    language: Language,
    split: Split,
    mut rows: Vec<(String, Label)>,
    id_prefix: &str,
    rng: &mut ChaCha8Rng,
) -> Corpus {
    rows.shuffle(rng);
    let examples = rows
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| LabeledExample {
            id: format!("{id_prefix}{i:05}"),
            text,
            label,
        })
        .collect();
    Corpus::new(language, split, examples).expect("generated ids are unique")
}

/// Linearly separable task: each class draws every token from its own
/// disjoint set of 15 words. Half the examples are OFF.
pub fn separable_corpus(n: usize, seed: u64, id_prefix: &str) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = BTreeSet::new();
    // fixed inventory, independent of the sampling seed
    let mut words_rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let onsets = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
    let vowels = ["a", "e", "i", "o", "u"];
    let sets = [
        syllable_words(&mut words_rng, &onsets, &vowels, 15, &mut taken),
        syllable_words(&mut words_rng, &onsets, &vowels, 15, &mut taken),
    ];
    let rows = (0..n)
        .map(|i| {
            let label = if i < n / 2 { Label::Off } else { Label::Not };
            let len = rng.gen_range(4..=8);
            let words: Vec<&str> = (0..len)
                .map(|_| sets[label.index()].choose(&mut rng).unwrap().as_str())
                .collect();
            (words.join(" "), label)
        })
        .collect();
    shuffled_corpus(Language::En, Split::Train, rows, id_prefix, &mut rng)
}

/// The 200-example separable training corpus.
pub fn toy_corpus(seed: u64) -> Corpus {
    separable_corpus(200, seed, "toy-")
}

/// Copy of `corpus` with exactly `round(fraction * n)` labels flipped,
/// chosen uniformly.
pub fn flip_labels(corpus: &Corpus, fraction: f64, seed: u64) -> Result<Corpus, CorpusError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(CorpusError::InvalidFraction(fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = corpus.len();
    let k = (fraction * n as f64).round() as usize;
    let flip: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, k).into_iter().collect();
    let examples = corpus
        .examples()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut e = e.clone();
            if flip.contains(&i) {
                e.label = e.label.flipped();
            }
            e
        })
        .collect();
    Corpus::new(corpus.language, corpus.split, examples)
}

/// Disambiguation task. Source sentences are fillers plus one cue word
/// whose class is only learnable from the few sentences that contain it.
/// Each pivot translation renders the sentence word by word and spells the
/// cue as one of a handful of class words shared across pivots.
#[derive(Debug, Clone)]
pub struct DisambiguationTask {
    pub train: Corpus,
    pub validation: Corpus,
    pub translations: FileProvider,
    pub pivots: Vec<LangCode>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisambiguationSpec {
    pub train_size: usize,
    pub validation_size: usize,
    pub cues_per_class: usize,
    pub fillers: usize,
    pub sentence_len: (usize, usize),
}

impl Default for DisambiguationSpec {
    fn default() -> Self {
        DisambiguationSpec {
            train_size: 120,
            validation_size: 200,
            cues_per_class: 20,
            fillers: 30,
            sentence_len: (5, 9),
        }
    }
}

pub const DISAMBIGUATION_SOURCE: Language = Language::Da;

pub fn disambiguation_task(spec: &DisambiguationSpec, seed: u64) -> DisambiguationTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = |prefix: &str, i: usize| format!("{prefix}{}{}", char::from(b'a' + (i % 26) as u8), i / 26);
    let cues: [Vec<String>; 2] = [
        (0..spec.cues_per_class).map(|i| word("ko", i)).collect(),
        (0..spec.cues_per_class).map(|i| word("ve", i)).collect(),
    ];
    let fillers: Vec<String> = (0..spec.fillers).map(|i| word("fi", i)).collect();
    let class_words = [["vile", "rude", "nasty"], ["warm", "calm", "gentle"]];
    let pivots: Vec<LangCode> = ["en", "fr", "de"].iter().map(|c| LangCode::new(c).unwrap()).collect();
    let source = LangCode::from(DISAMBIGUATION_SOURCE);

    let sentence = |rng: &mut ChaCha8Rng, label: Label| -> String {
        let len = rng.gen_range(spec.sentence_len.0..=spec.sentence_len.1);
        let mut words: Vec<String> = (0..len - 1).map(|_| fillers.choose(rng).unwrap().clone()).collect();
        let at = rng.gen_range(0..len);
        words.insert(at, cues[label.index()].choose(rng).unwrap().clone());
        words.join(" ")
    };
    let rows = |n: usize, rng: &mut ChaCha8Rng| -> Vec<(String, Label)> {
        (0..n)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Off } else { Label::Not };
                (sentence(rng, label), label)
            })
            .collect()
    };
    let train_rows = rows(spec.train_size, &mut rng);
    let validation_rows = rows(spec.validation_size, &mut rng);

    let translate = |text: &str, pivot: &LangCode| -> String {
        text.split(' ')
            .map(|w| {
                let class = cues.iter().position(|c| c.iter().any(|x| x == w));
                match class {
                    Some(c) => {
                        let i = cues[c].iter().position(|x| x == w).unwrap();
                        class_words[c][i % 3].to_string()
                    }
                    None => format!("{}{w}", pivot.as_str()),
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut entries = Vec::new();
    for (text, _) in &train_rows {
        for p in &pivots {
            entries.push((text.clone(), source.clone(), p.clone(), translate(text, p)));
        }
    }
    let train = shuffled_corpus(DISAMBIGUATION_SOURCE, Split::Train, train_rows, "dt-", &mut rng);
    let validation = shuffled_corpus(DISAMBIGUATION_SOURCE, Split::Validation, validation_rows, "dv-", &mut rng);
    DisambiguationTask {
        train,
        validation,
        translations: FileProvider::from_entries(entries),
        pivots,
    }
}

/// `n` scored tweets with uniform confidences. Every tenth row sits exactly
/// on a threshold (0.2 or 0.8).
pub fn scored_examples(n: usize, seed: u64) -> Vec<ScoredExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bank = WordBank::for_language(Language::En);
    (0..n)
        .map(|i| {
            let confidence = match i % 10 {
                3 => 0.8,
                7 => 0.2,
                _ => (rng.gen_range(0..=1_000_000) as f64) / 1e6,
            };
            let words: Vec<&str> = (0..rng.gen_range(3..=7))
                .map(|_| bank.filler.choose(&mut rng).unwrap().as_str())
                .collect();
            ScoredExample {
                id: format!("s{i:06}"),
                text: words.join(" "),
                confidence,
            }
        })
        .collect()
}

/// Class counts of the bundled mini-corpus, roughly the imbalance of the
/// shared-task data.
pub const MINI_CORPUS_SIZE: usize = 200;
pub const MINI_CORPUS_OFF: usize = 60;
pub const MINI_CORPUS_SEED: u64 = 2020;
pub const MINI_CORPUS_TEST_FRACTION: f64 = 0.2;

const EMOJI: [&str; 6] = ["😂", "👍", "😡", "❤", "🙏", "😭"];

/// Tweet-like sentences in `language`: optional `@USER` mention, fillers
/// with one or two class cues, and occasional hashtag, emoji, number or URL.
pub fn tweet_corpus(language: Language, off: usize, not: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bank = WordBank::for_language(language);
    let mut rows = Vec::with_capacity(off + not);
    for i in 0..off + not {
        let label = if i < off { Label::Off } else { Label::Not };
        let cues = match label {
            Label::Off => &bank.offensive,
            Label::Not => &bank.friendly,
        };
        let mut words: Vec<String> = (0..rng.gen_range(3..=7))
            .map(|_| bank.filler.choose(&mut rng).unwrap().clone())
            .collect();
        for _ in 0..rng.gen_range(1..=2) {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, cues.choose(&mut rng).unwrap().clone());
        }
        if rng.gen_bool(0.4) {
            words.insert(0, "@USER".into());
        }
        if rng.gen_bool(0.2) {
            let a = bank.filler.choose(&mut rng).unwrap();
            let b = cues.choose(&mut rng).unwrap();
            words.push(format!("#{a}{b}"));
        }
        if rng.gen_bool(0.1) {
            words.push(rng.gen_range(1..=2020).to_string());
        }
        if rng.gen_bool(0.25) {
            words.push(EMOJI.choose(&mut rng).unwrap().to_string());
        }
        if rng.gen_bool(0.15) {
            words.push("URL".into());
        }
        rows.push((words.join(" "), label));
    }
    shuffled_corpus(language, Split::Train, rows, &format!("{}-", language.code()), &mut rng)
}

/// Bundled mini-corpus of one language as (train, test).
pub fn mini_corpus(language: Language) -> (Corpus, Corpus) {
    let all = tweet_corpus(
        language,
        MINI_CORPUS_OFF,
        MINI_CORPUS_SIZE - MINI_CORPUS_OFF,
        MINI_CORPUS_SEED + language as u64,
    );
    let (train, test) = split_holdout(&all, MINI_CORPUS_TEST_FRACTION, MINI_CORPUS_SEED)
        .expect("fraction is valid and corpus non-empty");
    (train, test.with_split(Split::Test))
}

/// Corpus with exactly the given class counts, for statistics fixtures.
pub fn corpus_with_stats(language: Language, split: Split, stats: CorpusStats, seed: u64) -> Corpus {
    tweet_corpus(language, stats.off_count, stats.not_count, seed).with_split(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_stats;
    use crate::encoder::tokenize;
    use std::collections::HashSet;

    #[test]
    fn toy_corpus_is_balanced_and_separable() {
        let c = toy_corpus(1);
        assert_eq!(c.len(), 200);
        assert_eq!(corpus_stats(&c), CorpusStats::new(100, 100));
        let mut vocab: [HashSet<String>; 2] = Default::default();
        for e in c.examples() {
            vocab[e.label.index()].extend(tokenize(&e.text));
        }
        assert!(vocab[0].is_disjoint(&vocab[1]));
        assert_eq!(toy_corpus(1), c);
        assert_ne!(toy_corpus(2), c);
    }

    #[test]
    fn flips_exact_count() {
        let c = toy_corpus(3);
        let noisy = flip_labels(&c, 0.2, 9).unwrap();
        let changed = c
            .examples()
            .iter()
            .zip(noisy.examples())
            .filter(|(a, b)| a.label != b.label)
            .count();
        assert_eq!(changed, 40);
    }

    #[test]
    fn disambiguation_translations_cover_train() {
        let spec = DisambiguationSpec::default();
        let t = disambiguation_task(&spec, 4);
        assert_eq!(t.train.len(), spec.train_size);
        assert_eq!(t.validation.len(), spec.validation_size);
        assert!(t.translations.len() >= spec.train_size * 3 - 3);
    }

    #[test]
    fn scored_has_boundaries() {
        let s = scored_examples(100, 1);
        assert_eq!(s.iter().filter(|e| e.confidence == 0.8).count(), 10);
        assert_eq!(s.iter().filter(|e| e.confidence == 0.2).count(), 10);
    }

    #[test]
    fn stats_fixture_matches() {
        let stats = CorpusStats::new(30, 70);
        let c = corpus_with_stats(Language::El, Split::Train, stats, 0);
        assert_eq!(corpus_stats(&c), stats);
    }

    #[test]
    fn mini_corpus_split() {
        let (train, test) = mini_corpus(Language::Tr);
        assert_eq!(train.len() + test.len(), MINI_CORPUS_SIZE);
        assert_eq!(test.len(), 40);
        assert_eq!(corpus_stats(&test).off_count, 12);
    }
}
