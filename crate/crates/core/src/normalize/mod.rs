//! Tweet normalization for English: placeholder substitution, emoji
//! textualization, hashtag segmentation, slang expansion and number removal.
//!
//! Enabled steps always run in the same order:
//! user/url, emoji, hashtag, slang, numbers, whitespace. Text is lowercased
//! right after the user/url step, which is the only case-sensitive one.

mod emoji;
mod segment;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use emoji::{is_emoji_codepoint, map_emoji, EmojiMap};
pub use segment::{segment_hashtag, Lexicon, MAX_WORD_LEN};

pub const BUNDLED_EMOJI_TSV: &str = include_str!("../../assets/emoji.tsv");
pub const BUNDLED_SLANG_TSV: &str = include_str!("../../assets/slang.tsv");
pub const BUNDLED_LEXICON_TSV: &str = include_str!("../../assets/lexicon.tsv");

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed row at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid entry: {0}")]
    InvalidEntry(String),
    #[error("step {0:?} listed more than once")]
    DuplicateStep(Step),
}

fn read_file(path: &Path) -> Result<String, NormalizeError> {
    fs::read_to_string(path).map_err(|source| NormalizeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Two-column TSV rows as `(line, first, second)`; blank lines are skipped.
fn read_pairs(content: &str) -> Result<Vec<(usize, &str, &str)>, NormalizeError> {
    let mut rows = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        match (fields.next(), fields.next()) {
            (Some(a), Some(b)) => rows.push((i + 1, a, b)),
            _ => {
                return Err(NormalizeError::Malformed {
                    line: i + 1,
                    reason: "expected two tab-separated columns".into(),
                })
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    UserUrl,
    Emoji,
    Hashtag,
    Slang,
    Numbers,
    Whitespace,
}

impl Step {
    pub const ALL: [Step; 6] = [
        Step::UserUrl,
        Step::Emoji,
        Step::Hashtag,
        Step::Slang,
        Step::Numbers,
        Step::Whitespace,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub steps: Vec<Step>,
    /// `None` selects the bundled table.
    pub emoji_map_path: Option<PathBuf>,
    pub slang_map_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            steps: Step::ALL.to_vec(),
            emoji_map_path: None,
            slang_map_path: None,
            lexicon_path: None,
        }
    }
}

/// Token-level slang table. No replacement phrase may contain a key, which
/// makes expansion idempotent.
#[derive(Debug, Clone, Default)]
pub struct SlangMap {
    entries: HashMap<String, String>,
}

impl SlangMap {
    pub fn from_entries<I, K, V>(entries: I) -> Result<Self, NormalizeError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (k, v) in entries {
            let key = k.as_ref().trim().to_lowercase();
            let phrase = v.as_ref().split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if key.is_empty() || key.contains(char::is_whitespace) || phrase.is_empty() {
                return Err(NormalizeError::InvalidEntry(format!(
                    "slang entry {key:?} -> {phrase:?} needs a single-token key and a phrase"
                )));
            }
            if phrase.contains(['#', '@']) {
                return Err(NormalizeError::InvalidEntry(format!(
                    "slang phrase {phrase:?} may not contain '#' or '@'"
                )));
            }
            map.insert(key, phrase);
        }
        let keys: HashSet<&str> = map.keys().map(String::as_str).collect();
        for (key, phrase) in &map {
            if let Some(tok) = phrase.split(' ').find(|t| keys.contains(core_of(t).1)) {
                return Err(NormalizeError::InvalidEntry(format!(
                    "slang phrase for {key:?} contains the key {tok:?}"
                )));
            }
        }
        Ok(SlangMap { entries: map })
    }

    pub fn parse_tsv(content: &str) -> Result<Self, NormalizeError> {
        SlangMap::from_entries(read_pairs(content)?.into_iter().map(|(_, k, v)| (k, v)))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        SlangMap::parse_tsv(&read_file(path.as_ref())?)
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Splits a token into leading punctuation, alphanumeric core, trailing
/// punctuation.
fn core_of(token: &str) -> (&str, &str, &str) {
    let start = token
        .char_indices()
        .find(|(_, c)| c.is_alphanumeric())
        .map_or(token.len(), |(i, _)| i);
    let end = token
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .map_or(start, |(i, c)| i + c.len_utf8());
    (&token[..start], &token[start..end.max(start)], &token[end.max(start)..])
}

/// Loaded, immutable normalization resources.
#[derive(Debug, Clone)]
pub struct Normalizer {
    steps: HashSet<Step>,
    emoji: EmojiMap,
    slang: SlangMap,
    lexicon: Lexicon,
}

impl Normalizer {
    pub fn new(
        steps: &[Step],
        emoji: EmojiMap,
        slang: SlangMap,
        lexicon: Lexicon,
    ) -> Result<Self, NormalizeError> {
        let mut set = HashSet::new();
        for &s in steps {
            if !set.insert(s) {
                return Err(NormalizeError::DuplicateStep(s));
            }
        }
        Ok(Normalizer {
            steps: set,
            emoji,
            slang,
            lexicon,
        })
    }

    /// All steps enabled with the bundled tables.
    pub fn bundled() -> Self {
        Normalizer::from_config(&NormalizationConfig::default())
            .expect("bundled normalization tables are valid")
    }

    pub fn from_config(config: &NormalizationConfig) -> Result<Self, NormalizeError> {
        let emoji = match &config.emoji_map_path {
            Some(p) => EmojiMap::load(p)?,
            None => EmojiMap::parse_tsv(BUNDLED_EMOJI_TSV)?,
        };
        let slang = match &config.slang_map_path {
            Some(p) => SlangMap::load(p)?,
            None => SlangMap::parse_tsv(BUNDLED_SLANG_TSV)?,
        };
        let lexicon = match &config.lexicon_path {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::parse_tsv(BUNDLED_LEXICON_TSV)?,
        };
        Normalizer::new(&config.steps, emoji, slang, lexicon)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn emoji_map(&self) -> &EmojiMap {
        &self.emoji
    }

    pub fn slang_map(&self) -> &SlangMap {
        &self.slang
    }

    pub fn is_enabled(&self, step: Step) -> bool {
        self.steps.contains(&step)
    }

    pub fn normalize(&self, text: &str) -> String {
        normalize(text, self)
    }
}

static URL_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)(^|[^\p{L}\p{N}_])(?:https?://|www\.)\S+").expect("valid regex"));
static URL_LITERAL_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"\bURL\b").expect("valid regex"));
static USER_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"@USER\b").expect("valid regex"));
static HASHTAG_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"#([\p{L}\p{N}]+)").expect("valid regex"));

pub fn replace_user_url(text: &str) -> String {
    let t = URL_RE.replace_all(text, "${1}http");
    let t = URL_LITERAL_RE.replace_all(&t, "http");
    USER_RE.replace_all(&t, "<user>").into_owned()
}

/// Replaces each `#tag` by its segmentation; stray `#` characters become
/// spaces.
pub fn expand_hashtags(text: &str, lexicon: &Lexicon) -> String {
    let t = HASHTAG_RE.replace_all(text, |caps: &regex::Captures<'_>| {
        format!(" {} ", segment_hashtag(&caps[1], lexicon))
    });
    t.replace('#', " ")
}

pub fn expand_slang(text: &str, slang: &SlangMap) -> String {
    rewrite_tokens(text, |token| {
        let (lead, core, trail) = core_of(token);
        slang
            .get(core)
            .map(|phrase| format!("{lead}{phrase}{trail}"))
    })
}

/// Drops whitespace-delimited tokens made only of ASCII digits.
pub fn remove_numbers(text: &str) -> String {
    rewrite_tokens(text, |token| {
        token
            .chars()
            .all(|c| c.is_ascii_digit())
            .then(String::new)
    })
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Applies `f` to every maximal non-whitespace run, keeping the original
/// whitespace. `None` leaves the token untouched.
fn rewrite_tokens(text: &str, mut f: impl FnMut(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut token_start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = token_start.take() {
                let tok = &text[s..i];
                out.push_str(&f(tok).unwrap_or_else(|| tok.to_string()));
            }
            out.push(c);
        } else if token_start.is_none() {
            token_start = Some(i);
        }
    }
    if let Some(s) = token_start {
        let tok = &text[s..];
        out.push_str(&f(tok).unwrap_or_else(|| tok.to_string()));
    }
    out
}

pub fn normalize(text: &str, normalizer: &Normalizer) -> String {
    let mut t = if normalizer.is_enabled(Step::UserUrl) {
        replace_user_url(text)
    } else {
        text.to_string()
    };
    t = t.to_lowercase();
    if normalizer.is_enabled(Step::Emoji) {
        t = map_emoji(&t, &normalizer.emoji);
    }
    if normalizer.is_enabled(Step::Hashtag) {
        t = expand_hashtags(&t, &normalizer.lexicon);
    }
    if normalizer.is_enabled(Step::Slang) {
        t = expand_slang(&t, &normalizer.slang);
    }
    if normalizer.is_enabled(Step::Numbers) {
        t = remove_numbers(&t);
    }
    if normalizer.is_enabled(Step::Whitespace) {
        t = collapse_whitespace(&t);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn custom() -> Normalizer {
        Normalizer::new(
            &Step::ALL,
            EmojiMap::from_entries([("😂", "face with tears of joy")]).unwrap(),
            SlangMap::from_entries([("brb", "be right back")]).unwrap(),
            Lexicon::from_counts([("now", 1000), ("playing", 500)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn placeholders() {
        assert_eq!(Normalizer::bundled().normalize("@USER check URL"), "<user> check http");
        assert_eq!(replace_user_url("\u{2764}\u{fe0f}http://t.co/x"), "\u{2764}\u{fe0f}http");
    }

    #[test]
    fn standalone_numbers_removed() {
        assert_eq!(Normalizer::bundled().normalize("meet at 10 pm"), "meet at pm");
        assert_eq!(Normalizer::bundled().normalize("2pac lives"), "2pac lives");
    }

    #[test]
    fn composed_steps() {
        assert_eq!(
            custom().normalize("@USER 😂 #nowplaying brb"),
            "<user> face with tears of joy now playing be right back"
        );
    }

    #[test]
    fn slang_keeps_punctuation() {
        assert_eq!(expand_slang("brb, ok", &custom().slang), "be right back, ok");
    }

    #[test]
    fn slang_closure_enforced() {
        let err = SlangMap::from_entries([("u", "you"), ("ya", "u there")]).unwrap_err();
        assert!(matches!(err, NormalizeError::InvalidEntry(_)));
    }

    #[test]
    fn duplicate_step_rejected() {
        let n = Normalizer::new(
            &[Step::Emoji, Step::Emoji],
            EmojiMap::default(),
            SlangMap::default(),
            Lexicon::from_counts([("a", 1)]).unwrap(),
        );
        assert!(matches!(n, Err(NormalizeError::DuplicateStep(Step::Emoji))));
    }

    #[test]
    fn disabled_steps_are_skipped() {
        let n = Normalizer::new(
            &[Step::Whitespace],
            EmojiMap::default(),
            SlangMap::default(),
            Lexicon::from_counts([("a", 1)]).unwrap(),
        )
        .unwrap();
        assert_eq!(n.normalize("@USER  brb 10"), "@user brb 10");
    }

    #[test]
    fn bundled_tables_load() {
        let n = Normalizer::bundled();
        assert!(n.emoji_map().len() > 50);
        assert!(n.slang_map().len() > 30);
        assert!(n.lexicon().len() > 300);
    }

    #[test]
    fn core_split() {
        assert_eq!(core_of("(brb!)"), ("(", "brb", "!)"));
        assert_eq!(core_of("..."), ("...", "", ""));
    }
}
