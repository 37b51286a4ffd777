//! Unigram word segmentation for hashtags.

use std::collections::HashMap;
use std::path::Path;

use super::{read_pairs, NormalizeError};

/// Longest candidate word considered by the segmenter.
pub const MAX_WORD_LEN: usize = 24;

/// Unigram frequency table. Words are stored lowercase.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    counts: HashMap<String, u64>,
    total: u64,
}

impl Lexicon {
    pub fn from_counts<I, S>(entries: I) -> Result<Self, NormalizeError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for (word, count) in entries {
            let word = word.as_ref().trim().to_lowercase();
            if word.is_empty() || count == 0 {
                return Err(NormalizeError::InvalidEntry(format!(
                    "lexicon entry {word:?} needs a non-empty word and a positive count"
                )));
            }
            *counts.entry(word).or_default() += count;
        }
        let total = counts.values().sum();
        if total == 0 {
            return Err(NormalizeError::InvalidEntry("lexicon is empty".into()));
        }
        Ok(Lexicon { counts, total })
    }

    pub fn parse_tsv(content: &str) -> Result<Self, NormalizeError> {
        let mut entries = Vec::new();
        for (line, word, count) in read_pairs(content)? {
            let count = count.trim().parse::<u64>().map_err(|_| NormalizeError::Malformed {
                line,
                reason: format!("count {count:?} is not a positive integer"),
            })?;
            entries.push((word, count));
        }
        Lexicon::from_counts(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        Lexicon::parse_tsv(&super::read_file(path.as_ref())?)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    /// `ln P(word)`: relative frequency for known words, otherwise a floor of
    /// `eps / (total * 10^len)` with `eps = 1 / total`.
    pub fn log_prob(&self, word: &str) -> f64 {
        let total = self.total as f64;
        match self.counts.get(word) {
            Some(&c) => (c as f64 / total).ln(),
            None => {
                let len = word.chars().count() as f64;
                -2.0 * total.ln() - len * std::f64::consts::LN_10
            }
        }
    }
}

/// Splits a hashtag body into the word sequence with the highest unigram
/// log-probability. The unsplit tag is kept unless a split scores strictly
/// higher.
pub fn segment_hashtag(tag: &str, lexicon: &Lexicon) -> String {
    let chars: Vec<char> = tag.chars().collect();
    let n = chars.len();
    if n == 0 {
        return String::new();
    }
    let word = |i: usize, j: usize| chars[i..j].iter().collect::<String>();

    // best[j]: score of the best segmentation of chars[..j]; back[j]: start
    // of its final word.
    let mut best = vec![f64::NEG_INFINITY; n + 1];
    let mut back = vec![0usize; n + 1];
    best[0] = 0.0;
    for j in 1..=n {
        for i in j.saturating_sub(MAX_WORD_LEN)..j {
            if best[i] == f64::NEG_INFINITY {
                continue;
            }
            let score = best[i] + lexicon.log_prob(&word(i, j));
            if score > best[j] {
                best[j] = score;
                back[j] = i;
            }
        }
    }

    let whole = lexicon.log_prob(tag);
    if best[n] <= whole {
        return tag.to_string();
    }
    let mut words = Vec::new();
    let mut j = n;
    while j > 0 {
        let i = back[j];
        words.push(word(i, j));
        j = i;
    }
    words.reverse();
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Lexicon {
        Lexicon::from_counts([("now", 1000), ("playing", 500), ("nowp", 1), ("laying", 400)])
            .unwrap()
    }

    #[test]
    fn splits_nowplaying() {
        assert_eq!(segment_hashtag("nowplaying", &toy()), "now playing");
    }

    #[test]
    fn single_character() {
        let lex = Lexicon::from_counts([("a", 10), ("b", 3)]).unwrap();
        assert_eq!(segment_hashtag("a", &lex), "a");
    }

    #[test]
    fn unknown_tag_falls_back_to_whole() {
        assert_eq!(segment_hashtag("xqzt", &toy()), "xqzt");
    }

    #[test]
    fn out_of_lexicon_floor_is_length_penalized() {
        let lex = toy();
        assert!(lex.log_prob("ab") > lex.log_prob("abc"));
        assert!(lex.log_prob("nowp") > lex.log_prob("zz"));
        let expected = -2.0 * (1901f64).ln() - 3.0 * 10f64.ln();
        assert!((lex.log_prob("zzz") - expected).abs() < 1e-12);
    }

    #[test]
    fn lexicon_lowercases_and_sums() {
        let lex = Lexicon::parse_tsv("Now\t3\nnow\t2\nplay\t5\n").unwrap();
        assert_eq!(lex.count("now"), Some(5));
        assert_eq!(lex.total(), 10);
        assert!(Lexicon::parse_tsv("now\tmany\n").is_err());
        assert!(Lexicon::parse_tsv("now\t0\n").is_err());
    }
}
