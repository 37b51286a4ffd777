//! Emoji to text projection.

use std::collections::HashMap;
use std::path::Path;

use super::{read_pairs, NormalizeError};

/// Codepoint ranges treated as emoji. Codepoints in these ranges that are not
/// covered by a map entry are dropped.
const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x200D, 0x200D), // zero width joiner
    (0x20E3, 0x20E3), // combining keycap
    (0x2300, 0x23FF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
    (0xFE00, 0xFE0F), // variation selectors
    (0x1F000, 0x1FAFF),
    (0xE0020, 0xE007F), // tag sequences
];

pub fn is_emoji_codepoint(c: char) -> bool {
    let c = c as u32;
    EMOJI_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&c))
}

#[derive(Debug, Clone, Default)]
pub struct EmojiMap {
    entries: HashMap<String, String>,
    longest_key: usize,
}

impl EmojiMap {
    /// Phrases are lowercased. Keys must contain at least one non-ASCII
    /// codepoint so ASCII text is never rewritten.
    pub fn from_entries<I, K, V>(entries: I) -> Result<Self, NormalizeError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: AsRef<str>,
    {
        let mut map = EmojiMap::default();
        for (key, phrase) in entries {
            let key = key.into();
            if key.is_empty() || key.is_ascii() {
                return Err(NormalizeError::InvalidEntry(format!(
                    "emoji key {key:?} must contain a non-ASCII codepoint"
                )));
            }
            let phrase = phrase.as_ref().split_whitespace().collect::<Vec<_>>().join(" ");
            let phrase = phrase.to_lowercase();
            if phrase.is_empty() || phrase.chars().any(|c| c == '#' || c == '@' || is_emoji_codepoint(c)) {
                return Err(NormalizeError::InvalidEntry(format!(
                    "emoji phrase {phrase:?} for {key:?} must be plain words"
                )));
            }
            map.longest_key = map.longest_key.max(key.chars().count());
            map.entries.insert(key, phrase);
        }
        Ok(map)
    }

    pub fn parse_tsv(content: &str) -> Result<Self, NormalizeError> {
        EmojiMap::from_entries(
            read_pairs(content)?
                .into_iter()
                .map(|(_, k, v)| (k.to_string(), v.to_string())),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizeError> {
        EmojiMap::parse_tsv(&super::read_file(path.as_ref())?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replaces mapped emoji sequences (longest match first) by their phrase and
/// drops unmapped emoji codepoints. Replacements and removals always leave a
/// single word boundary, so neighbouring tokens are never fused.
pub fn map_emoji(text: &str, map: &EmojiMap) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    // a separator is owed before the next non-whitespace character
    let mut gap = false;
    // an emoji was dropped right after whitespace; swallow one whitespace char
    let mut skip_ws = false;
    let mut i = 0;
    while i < chars.len() {
        let matched = (1..=map.longest_key.min(chars.len() - i))
            .rev()
            .find_map(|len| {
                let key: String = chars[i..i + len].iter().collect();
                map.get(&key).map(|phrase| (len, phrase))
            });
        if let Some((len, phrase)) = matched {
            if !out.is_empty() && !out.ends_with(char::is_whitespace) {
                out.push(' ');
            }
            out.push_str(phrase);
            gap = true;
            skip_ws = false;
            i += len;
            continue;
        }
        let c = chars[i];
        i += 1;
        if is_emoji_codepoint(c) {
            if out.ends_with(char::is_whitespace) {
                skip_ws = true;
            } else if !out.is_empty() {
                gap = true;
            }
        } else if c.is_whitespace() {
            gap = false;
            if std::mem::take(&mut skip_ws) {
                continue;
            }
            out.push(c);
        } else {
            if std::mem::take(&mut gap) {
                out.push(' ');
            }
            skip_ws = false;
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> EmojiMap {
        EmojiMap::from_entries([("👍", "thumbs up"), ("😂", "Face with Tears of Joy")]).unwrap()
    }

    #[test]
    fn mapped_emoji_becomes_phrase() {
        assert_eq!(map_emoji("ok 👍", &map()), "ok thumbs up");
        assert_eq!(map_emoji("a👍b", &map()), "a thumbs up b");
        assert_eq!(map_emoji("😂", &map()), "face with tears of joy");
    }

    #[test]
    fn emoji_free_input_unchanged() {
        assert_eq!(map_emoji("plain text", &map()), "plain text");
        assert_eq!(map_emoji("  tabs\tand  spaces ", &map()), "  tabs\tand  spaces ");
    }

    #[test]
    fn unmapped_emoji_removed() {
        assert_eq!(map_emoji("x 🜚 y", &map()), "x y");
        assert_eq!(map_emoji("ww🜚w", &map()), "ww w");
        assert_eq!(map_emoji("🜚 start", &map()), " start");
    }

    #[test]
    fn longest_match_wins() {
        let m = EmojiMap::from_entries([("❤", "heart"), ("❤\u{FE0F}", "red heart")]).unwrap();
        assert_eq!(map_emoji("i ❤\u{FE0F} it", &m), "i red heart it");
        assert_eq!(map_emoji("i ❤ it", &m), "i heart it");
    }

    #[test]
    fn ascii_keys_rejected() {
        assert!(EmojiMap::from_entries([(":)", "smile")]).is_err());
    }
}
