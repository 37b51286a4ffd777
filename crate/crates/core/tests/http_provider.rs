use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use offlang::augment::{HttpProvider, LangCode, RetryPolicy, TranslateError, TranslationCache, Translator};

#[derive(Debug, Clone)]
struct Seen {
    authorization: Option<String>,
    body: serde_json::Value,
}

/// Serves one canned (status, body) reply per connection, in order.
fn serve(replies: Vec<(u16, &'static str)>) -> (String, Arc<Mutex<Vec<Seen>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/translate", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut length = 0;
            let mut authorization = None;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let (name, value) = line.split_once(':').unwrap_or((line, ""));
                match name.to_ascii_lowercase().as_str() {
                    "content-length" => length = value.trim().parse().unwrap(),
                    "authorization" => authorization = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            let mut buf = vec![0; length];
            reader.read_exact(&mut buf).unwrap();
            log.lock().unwrap().push(Seen {
                authorization,
                body: serde_json::from_slice(&buf).unwrap(),
            });
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, seen)
}

fn codes() -> (LangCode, LangCode) {
    ("da".parse().unwrap(), "en".parse().unwrap())
}

#[test]
fn posts_json_and_reads_translation() {
    let (url, seen) = serve(vec![(200, r#"{"translation":"hello"}"#)]);
    let provider = HttpProvider::new(url, Some("k3y".into()), Duration::from_secs(5));
    let (da, en) = codes();
    let out = Translator::new(&provider).translate("hej", &da, &en).unwrap();
    assert_eq!(out, "hello");
    let seen = seen.lock().unwrap();
    assert_eq!(seen[0].authorization.as_deref(), Some("Bearer k3y"));
    assert_eq!(seen[0].body, serde_json::json!({"q": "hej", "source": "da", "target": "en"}));
}

#[test]
fn retries_transient_failures_then_caches() {
    let (url, seen) = serve(vec![(503, "{}"), (429, "{}"), (200, r#"{"translation":"thanks"}"#)]);
    let provider = HttpProvider::new(url, None, Duration::from_secs(5));
    let cache = TranslationCache::in_memory();
    let retry = RetryPolicy {
        max_attempts: 3,
        base_delay: Duration::from_millis(1),
    };
    let translator = Translator::new(&provider).with_cache(&cache).with_retry(retry);
    let (da, en) = codes();
    assert_eq!(translator.translate("tak", &da, &en).unwrap(), "thanks");
    // served from cache, the server has no replies left
    assert_eq!(translator.translate("tak", &da, &en).unwrap(), "thanks");
    assert_eq!(seen.lock().unwrap().len(), 3);
    assert_eq!(seen.lock().unwrap()[0].authorization, None);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = serve(vec![(400, "{}")]);
    let provider = HttpProvider::new(url, None, Duration::from_secs(5));
    let (da, en) = codes();
    let err = Translator::new(&provider).translate("hej", &da, &en).unwrap_err();
    assert!(matches!(err, TranslateError::UnsupportedPair { .. }), "{err:?}");
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn unreachable_endpoint_is_an_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/translate", listener.local_addr().unwrap());
    drop(listener);
    let provider = HttpProvider::new(url, None, Duration::from_secs(2));
    let retry = RetryPolicy {
        max_attempts: 1,
        base_delay: Duration::from_millis(1),
    };
    let (da, en) = codes();
    assert!(Translator::new(&provider).with_retry(retry).translate("hej", &da, &en).is_err());
}
