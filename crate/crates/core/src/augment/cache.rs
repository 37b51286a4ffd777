//! Persistent translation cache backed by an append-only TSV journal.
//!
//! Journal rows are `text<TAB>source<TAB>target<TAB>translation` with
//! backslash escapes for `\\`, `\t`, `\n` and `\r`. A later row for the same
//! key wins.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::provider::{LangCode, TranslateError};

type Key = (String, LangCode, LangCode);

#[derive(Debug, Default)]
pub struct TranslationCache {
    path: Option<PathBuf>,
    entries: Mutex<HashMap<Key, String>>,
    journal: Mutex<Option<File>>,
}

pub(crate) fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

fn cache_err(path: &Path, e: impl std::fmt::Display) -> TranslateError {
    TranslateError::Cache(format!("{}: {e}", path.display()))
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        TranslationCache::default()
    }

    /// Opens (creating if needed) a journal file and replays it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, TranslateError> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let content = fs::read_to_string(&path).map_err(|e| cache_err(&path, e))?;
            for (i, line) in content.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != 4 {
                    return Err(cache_err(&path, format!("line {}: expected 4 fields", i + 1)));
                }
                let s = LangCode::new(f[1]).map_err(|e| cache_err(&path, e))?;
                let t = LangCode::new(f[2]).map_err(|e| cache_err(&path, e))?;
                entries.insert((unescape_field(f[0]), s, t), unescape_field(f[3]));
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| cache_err(&path, e))?;
        Ok(TranslationCache {
            path: Some(path),
            entries: Mutex::new(entries),
            journal: Mutex::new(Some(file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, text: &str, source: &LangCode, target: &LangCode) -> Option<String> {
        let entries = self.entries.lock().expect("cache lock poisoned");
        entries
            .get(&(text.to_string(), source.clone(), target.clone()))
            .cloned()
    }

    pub fn insert(
        &self,
        text: &str,
        source: &LangCode,
        target: &LangCode,
        translation: &str,
    ) -> Result<(), TranslateError> {
        // journal first so a crash never leaves memory ahead of disk
        let mut journal = self.journal.lock().expect("cache lock poisoned");
        if let (Some(file), Some(path)) = (journal.as_mut(), &self.path) {
            let row = format!(
                "{}\t{source}\t{target}\t{}\n",
                escape_field(text),
                escape_field(translation)
            );
            file.write_all(row.as_bytes()).map_err(|e| cache_err(path, e))?;
            file.flush().map_err(|e| cache_err(path, e))?;
        }
        self.entries.lock().expect("cache lock poisoned").insert(
            (text.to_string(), source.clone(), target.clone()),
            translation.to_string(),
        );
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_round_trips() {
        for s in ["plain", "tab\there", "line\nbreak", "back\\slash\\t", "cr\r", "\\"] {
            assert_eq!(unescape_field(&escape_field(s)), s);
            assert!(!escape_field(s).contains(['\t', '\n', '\r']));
        }
    }

    #[test]
    fn survives_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.tsv");
        let (tr, en) = (LangCode::new("tr").unwrap(), LangCode::new("en").unwrap());
        {
            let cache = TranslationCache::open(&path).unwrap();
            cache.insert("iyi\tgünler", &tr, &en, "good day").unwrap();
            assert_eq!(cache.get("iyi\tgünler", &tr, &en).as_deref(), Some("good day"));
        }
        let cache = TranslationCache::open(&path).unwrap();
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.get("iyi\tgünler", &tr, &en).as_deref(), Some("good day"));
        assert_eq!(cache.get("iyi\tgünler", &en, &tr), None);
    }
}
