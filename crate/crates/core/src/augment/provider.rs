//! Translation providers.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cache::{escape_field, unescape_field};

/// Lowercase ISO 639-1 style language code, e.g. `en`, `fr`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LangCode(String);

impl LangCode {
    pub fn new(code: &str) -> Result<Self, String> {
        let code = code.trim().to_ascii_lowercase();
        if (2..=3).contains(&code.len()) && code.chars().all(|c| c.is_ascii_lowercase()) {
            Ok(LangCode(code))
        } else {
            Err(format!("invalid language code {code:?}"))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LangCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LangCode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LangCode::new(s)
    }
}

impl TryFrom<String> for LangCode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        LangCode::new(&s)
    }
}

impl From<LangCode> for String {
    fn from(c: LangCode) -> String {
        c.0
    }
}

impl From<crate::corpus::Language> for LangCode {
    fn from(l: crate::corpus::Language) -> Self {
        LangCode(l.code().to_string())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TranslateError {
    #[error("translation provider unavailable: {message}")]
    ProviderUnavailable { message: String, retryable: bool },
    #[error("unsupported language pair {from}->{to}")]
    UnsupportedPair { from: LangCode, to: LangCode },
    #[error("provider returned an empty translation")]
    EmptyTranslation,
    #[error("translation cache: {0}")]
    Cache(String),
}

impl TranslateError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, TranslateError::ProviderUnavailable { retryable: true, .. })
    }

    fn unavailable(message: impl Into<String>, retryable: bool) -> Self {
        TranslateError::ProviderUnavailable {
            message: message.into(),
            retryable,
        }
    }
}

pub trait TranslationProvider: Send + Sync {
    fn name(&self) -> &str;

    fn supports(&self, source: &LangCode, target: &LangCode) -> bool;

    fn translate(
        &self,
        text: &str,
        source: &LangCode,
        target: &LangCode,
    ) -> Result<String, TranslateError>;
}

/// Offline provider that tags its input as `target⟦text⟧`. Counts calls.
#[derive(Debug, Default)]
pub struct MockProvider {
    calls: AtomicUsize,
}

impl MockProvider {
    pub fn new() -> Self {
        MockProvider::default()
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl TranslationProvider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn supports(&self, source: &LangCode, target: &LangCode) -> bool {
        source != target
    }

    fn translate(&self, text: &str, _: &LangCode, target: &LangCode) -> Result<String, TranslateError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(format!("{target}\u{27E6}{text}\u{27E7}"))
    }
}

/// Returns the input unchanged.
#[derive(Debug, Default)]
pub struct IdentityProvider;

impl TranslationProvider for IdentityProvider {
    fn name(&self) -> &str {
        "identity"
    }

    fn supports(&self, _: &LangCode, _: &LangCode) -> bool {
        true
    }

    fn translate(&self, text: &str, _: &LangCode, _: &LangCode) -> Result<String, TranslateError> {
        Ok(text.to_string())
    }
}

/// Pre-computed translations from a TSV table
/// `source_text<TAB>source<TAB>target<TAB>translation`.
#[derive(Debug, Default, Clone)]
pub struct FileProvider {
    table: HashMap<(String, LangCode, LangCode), String>,
    pairs: HashSet<(LangCode, LangCode)>,
}

impl FileProvider {
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (String, LangCode, LangCode, String)>,
    {
        let mut p = FileProvider::default();
        for (text, s, t, tr) in entries {
            p.pairs.insert((s.clone(), t.clone()));
            p.table.insert((text, s, t), tr);
        }
        p
    }

    pub fn parse_tsv(content: &str) -> Result<Self, TranslateError> {
        let mut entries = Vec::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = |why: String| TranslateError::Cache(format!("line {}: {why}", i + 1));
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", f.len())));
            }
            entries.push((
                unescape_field(f[0]),
                LangCode::new(f[1]).map_err(bad)?,
                LangCode::new(f[2]).map_err(bad)?,
                unescape_field(f[3]),
            ));
        }
        Ok(FileProvider::from_entries(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TranslateError> {
        let path = path.as_ref();
        let content = fs::read_to_string(path)
            .map_err(|e| TranslateError::Cache(format!("{}: {e}", path.display())))?;
        FileProvider::parse_tsv(&content)
    }

    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<_> = self.table.iter().collect();
        rows.sort();
        rows.into_iter()
            .map(|((text, s, t), tr)| {
                format!("{}\t{s}\t{t}\t{}\n", escape_field(text), escape_field(tr))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl TranslationProvider for FileProvider {
    fn name(&self) -> &str {
        "file"
    }

    fn supports(&self, source: &LangCode, target: &LangCode) -> bool {
        self.pairs.contains(&(source.clone(), target.clone()))
    }

    fn translate(&self, text: &str, source: &LangCode, target: &LangCode) -> Result<String, TranslateError> {
        self.table
            .get(&(text.to_string(), source.clone(), target.clone()))
            .cloned()
            .ok_or_else(|| TranslateError::unavailable(format!("no stored translation for {text:?}"), false))
    }
}

#[derive(Serialize)]
struct HttpRequest<'a> {
    q: &'a str,
    source: &'a str,
    target: &'a str,
}

#[derive(Deserialize)]
struct HttpResponse {
    translation: String,
}

/// Remote provider speaking `POST {"q","source","target"} -> {"translation"}`.
pub struct HttpProvider {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpProvider {
            endpoint: endpoint.into(),
            api_key,
            agent,
        }
    }
}

impl TranslationProvider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn supports(&self, source: &LangCode, target: &LangCode) -> bool {
        source != target
    }

    fn translate(&self, text: &str, source: &LangCode, target: &LangCode) -> Result<String, TranslateError> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let body = HttpRequest {
            q: text,
            source: source.as_str(),
            target: target.as_str(),
        };
        let mut resp = req
            .send_json(&body)
            .map_err(|e| TranslateError::unavailable(e.to_string(), true))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            400 | 422 => return Err(TranslateError::UnsupportedPair {
                from: source.clone(),
                to: target.clone(),
            }),
            408 | 429 | 500..=599 => {
                return Err(TranslateError::unavailable(format!("HTTP {status}"), true))
            }
            _ => return Err(TranslateError::unavailable(format!("HTTP {status}"), false)),
        }
        let parsed: HttpResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| TranslateError::unavailable(format!("bad response body: {e}"), false))?;
        Ok(parsed.translation)
    }
}
