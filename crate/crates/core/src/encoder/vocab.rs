//! Whitespace/punctuation tokenizer and frequency vocabulary.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EncoderError;
use crate::corpus::Corpus;

pub const PAD_TOKEN: &str = "[PAD]";
pub const UNK_TOKEN: &str = "[UNK]";
pub const CLS_TOKEN: &str = "[CLS]";
pub const SEP_TOKEN: &str = "[SEP]";
pub const USER_TOKEN: &str = "<user>";

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const CLS_ID: usize = 2;
pub const SEP_ID: usize = 3;
pub const USER_ID: usize = 4;

pub const RESERVED_TOKENS: [&str; 5] = [PAD_TOKEN, UNK_TOKEN, CLS_TOKEN, SEP_TOKEN, USER_TOKEN];

/// Splits on whitespace, then into alphanumeric runs and single punctuation
/// characters. Reserved tokens are kept whole; everything else is lowercased.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut rest = chunk;
        while let Some(c) = rest.chars().next() {
            if let Some(reserved) = RESERVED_TOKENS.iter().find(|r| rest.starts_with(**r)) {
                out.push(reserved.to_string());
                rest = &rest[reserved.len()..];
            } else if c.is_alphanumeric() {
                let end = rest
                    .char_indices()
                    .find(|(_, c)| !c.is_alphanumeric())
                    .map_or(rest.len(), |(i, _)| i);
                out.push(rest[..end].to_lowercase());
                rest = &rest[end..];
            } else {
                out.push(c.to_lowercase().collect());
                rest = &rest[c.len_utf8()..];
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Reserved tokens must occupy the first five ids, in order.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, EncoderError> {
        if tokens.len() < RESERVED_TOKENS.len()
            || tokens.iter().zip(RESERVED_TOKENS).any(|(t, r)| t != r)
        {
            return Err(EncoderError::InvalidVocabulary(
                "reserved tokens must come first".into(),
            ));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(EncoderError::InvalidVocabulary(format!("duplicate token {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn to_tsv(&self) -> String {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{t}\t{i}\n"))
            .collect()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = EncoderError;
    fn try_from(tokens: Vec<String>) -> Result<Self, Self::Error> {
        Vocabulary::from_tokens(tokens)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

/// Reserved tokens, then corpus tokens by descending frequency with
/// lexicographic tie-break, truncated to `cap` entries in total.
pub fn build_vocab(corpus: &Corpus, cap: usize) -> Result<Vocabulary, EncoderError> {
    if corpus.is_empty() {
        return Err(EncoderError::EmptyCorpus);
    }
    if cap < RESERVED_TOKENS.len() {
        return Err(EncoderError::InvalidConfig(format!(
            "vocabulary cap {cap} is smaller than the {} reserved tokens",
            RESERVED_TOKENS.len()
        )));
    }
    let mut freq: HashMap<String, usize> = HashMap::new();
    for text in corpus.texts() {
        for tok in tokenize(text) {
            if !RESERVED_TOKENS.contains(&tok.as_str()) {
                *freq.entry(tok).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let tokens = RESERVED_TOKENS
        .iter()
        .map(|t| t.to_string())
        .chain(ranked.into_iter().map(|(t, _)| t))
        .take(cap)
        .collect();
    Vocabulary::from_tokens(tokens)
}

/// Fixed-length id sequence with its attention mask (1 = real token).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<usize>,
    pub mask: Vec<u8>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn real_len(&self) -> usize {
        self.mask.iter().filter(|&&m| m == 1).count()
    }
}

/// `[CLS] tokens [SEP]` right-padded to `max_len`. Overlong input keeps its
/// leading `max_len - 2` tokens; the closing `[SEP]` is always present.
pub fn tokenize_encode(text: &str, vocab: &Vocabulary, max_len: usize) -> TokenSequence {
    assert!(max_len >= 2, "max_len must leave room for [CLS] and [SEP]");
    let mut ids = Vec::with_capacity(max_len);
    ids.push(CLS_ID);
    ids.extend(
        tokenize(text)
            .iter()
            .take(max_len - 2)
            .map(|t| vocab.id(t)),
    );
    ids.push(SEP_ID);
    let real = ids.len();
    ids.resize(max_len, PAD_ID);
    let mut mask = vec![1u8; real];
    mask.resize(max_len, 0);
    TokenSequence { ids, mask }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, LabeledExample, Language, Split};

    fn corpus(texts: &[&str]) -> Corpus {
        let ex = texts
            .iter()
            .enumerate()
            .map(|(i, t)| LabeledExample::new(i.to_string(), *t, Label::Not).unwrap())
            .collect();
        Corpus::new(Language::En, Split::Train, ex).unwrap()
    }

    #[test]
    fn tokenizer_splits_punctuation_and_keeps_reserved() {
        assert_eq!(
            tokenize("Hello, <user>! x [SEP] Y's"),
            ["hello", ",", "<user>", "!", "x", "[SEP]", "y", "'", "s"]
        );
        assert_eq!(tokenize("  "), Vec::<String>::new());
    }

    #[test]
    fn frequency_order() {
        let v = build_vocab(&corpus(&["a b", "a c"]), 10).unwrap();
        assert_eq!(&v.tokens()[5..], ["a", "b", "c"]);
        assert_eq!(v.id("a"), 5);
    }

    #[test]
    fn cap_admits_one_token() {
        let v = build_vocab(&corpus(&["a b", "a c"]), 6).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.token(5), Some("a"));
        assert_eq!(v.id("b"), UNK_ID);
    }

    #[test]
    fn empty_corpus_rejected() {
        let empty = Corpus::empty(Language::En, Split::Train);
        assert!(matches!(build_vocab(&empty, 10), Err(EncoderError::EmptyCorpus)));
    }

    #[test]
    fn encode_layout() {
        let v = build_vocab(&corpus(&["a b"]), 10).unwrap();
        let s = tokenize_encode("a b", &v, 8);
        assert_eq!(s.ids, [CLS_ID, 5, 6, SEP_ID, PAD_ID, PAD_ID, PAD_ID, PAD_ID]);
        assert_eq!(s.mask, [1, 1, 1, 1, 0, 0, 0, 0]);
        let e = tokenize_encode("", &v, 4);
        assert_eq!(e.ids, [CLS_ID, SEP_ID, PAD_ID, PAD_ID]);
        assert_eq!(tokenize_encode("zzz", &v, 4).ids[1], UNK_ID);
    }

    #[test]
    fn truncation_keeps_head_and_sep() {
        let text = (0..200).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let v = build_vocab(&corpus(&[&text]), 1000).unwrap();
        let s = tokenize_encode(&text, &v, 128);
        assert_eq!(s.len(), 128);
        assert_eq!(s.real_len(), 128);
        assert_eq!(s.ids[127], SEP_ID);
        assert_eq!(s.ids[126], v.id("w125"));
    }

    #[test]
    fn vocabulary_requires_reserved_prefix() {
        assert!(Vocabulary::from_tokens(vec!["a".into()]).is_err());
        let tsv = build_vocab(&corpus(&["a"]), 10).unwrap().to_tsv();
        assert!(tsv.starts_with("[PAD]\t0\n[UNK]\t1\n"));
    }
}
