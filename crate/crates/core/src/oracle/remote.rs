//! Optional remote factor-database client.
//!
//! The remote database is an HTTP GET query-by-number API returning a status
//! plus a factor list. This module keeps all endpoint and response-format
//! knowledge behind one adapter ([`parse_response`]) so the rest of the crate
//! only sees verified numbers. Three operational rules:
//!
//! * transport is injected through [`HttpGetter`], so the crate itself never
//!   opens sockets (the CLI supplies a real getter; tests supply mocks),
//! * every response is cached on disk, one JSON file per queried number, so
//!   reruns are network-free,
//! * live requests are throttled by a global minimum interval.
//!
//! Factors returned here are *candidates*: callers must verify primality and
//! divisibility before merging them into any record (the oracle does both).

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Num;
use sha2::{Digest, Sha256};

use super::OracleError;

/// Transport abstraction: fetch a URL, return the body.
pub trait HttpGetter: Send + Sync {
    /// Errors are transport-level failure descriptions (DNS, refused, 5xx...).
    fn get(&self, url: &str) -> Result<String, String>;
}

/// A getter for configurations where the network is not meant to be touched.
/// Any live request is answered with a transport failure, which the pipeline
/// treats as a soft RemoteUnavailable; disk-cached responses still work.
pub struct OfflineGetter;

impl HttpGetter for OfflineGetter {
    fn get(&self, _url: &str) -> Result<String, String> {
        Err("remote lookups disabled in this configuration".into())
    }
}

/// What the remote database said about one number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteAnswer {
    /// Remote status string, e.g. "FF" (fully factored), "CF" (composite,
    /// factors known), "C" (composite, no factors), "P"/"PRP", "U".
    pub status: String,
    /// Factor list exactly as returned. Entries may be composite; callers
    /// must verify before use.
    pub factors: Vec<(BigUint, u32)>,
    /// True when the answer came from the on-disk response cache.
    pub from_disk_cache: bool,
}

/// Rate-limited, disk-caching client for the remote database.
pub struct RemoteClient {
    base_url: String,
    cache_dir: PathBuf,
    min_interval: Duration,
    last_request: Mutex<Option<Instant>>,
    getter: Box<dyn HttpGetter>,
}

impl RemoteClient {
    /// `base_url` like `http://factordb.com`; `cache_dir` is created lazily.
    pub fn new(
        base_url: impl Into<String>,
        cache_dir: impl Into<PathBuf>,
        getter: Box<dyn HttpGetter>,
    ) -> Self {
        RemoteClient {
            base_url: base_url.into(),
            cache_dir: cache_dir.into(),
            min_interval: Duration::from_millis(1000),
            last_request: Mutex::new(None),
            getter,
        }
    }

    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.min_interval = interval;
        self
    }

    /// Query the database for `n`, serving from the disk cache when possible.
    pub fn query(&self, n: &BigUint) -> Result<RemoteAnswer, OracleError> {
        let decimal = n.to_string();
        let cache_file = self.cache_dir.join(format!("{}.json", short_key(&decimal)));

        if let Ok(raw) = std::fs::read_to_string(&cache_file) {
            if let Ok(stored) = serde_json::from_str::<StoredResponse>(&raw) {
                if stored.query == decimal {
                    let (status, factors) = parse_response(&stored.body)?;
                    return Ok(RemoteAnswer { status, factors, from_disk_cache: true });
                }
            }
            // A corrupt or colliding cache file falls through to a live query.
        }

        self.throttle();
        let url = format!("{}/api?query={}", self.base_url, decimal);
        let body = self
            .getter
            .get(&url)
            .map_err(OracleError::RemoteUnavailable)?;
        let (status, factors) = parse_response(&body)?;

        std::fs::create_dir_all(&self.cache_dir).map_err(|e| OracleError::Io {
            path: self.cache_dir.display().to_string(),
            source: e,
        })?;
        let stored = StoredResponse { query: decimal, body };
        std::fs::write(&cache_file, serde_json::to_string(&stored).unwrap()).map_err(|e| {
            OracleError::Io { path: cache_file.display().to_string(), source: e }
        })?;

        Ok(RemoteAnswer { status, factors, from_disk_cache: false })
    }

    /// Block until at least `min_interval` has passed since the last live
    /// request, then claim the slot.
    fn throttle(&self) {
        let mut last = self.last_request.lock().unwrap();
        if let Some(at) = *last {
            let since = at.elapsed();
            if since < self.min_interval {
                std::thread::sleep(self.min_interval - since);
            }
        }
        *last = Some(Instant::now());
    }
}

/// On-disk cache record: the exact query string plus the verbatim body.
#[derive(serde::Serialize, serde::Deserialize)]
struct StoredResponse {
    query: String,
    body: String,
}

/// The single place that understands the remote response format:
/// `{"id": ..., "status": "CF", "factors": [["5", 1], ["525313", 2]]}`.
fn parse_response(body: &str) -> Result<(String, Vec<(BigUint, u32)>), OracleError> {
    #[derive(serde::Deserialize)]
    struct Raw {
        status: String,
        factors: Vec<(serde_json::Value, u32)>,
    }
    let raw: Raw = serde_json::from_str(body)
        .map_err(|e| OracleError::MalformedResponse(e.to_string()))?;
    let mut factors = Vec::with_capacity(raw.factors.len());
    for (v, e) in raw.factors {
        // The database encodes small factors as JSON numbers and large ones
        // as decimal strings; accept both.
        let s = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => {
                return Err(OracleError::MalformedResponse(format!(
                    "factor entry {other} is neither string nor number"
                )))
            }
        };
        let p = BigUint::from_str_radix(&s, 10).map_err(|_| {
            OracleError::MalformedResponse(format!("factor {s:?} is not a decimal integer"))
        })?;
        factors.push((p, e));
    }
    Ok((raw.status, factors))
}

/// Filename-safe key for arbitrarily long decimal strings.
fn short_key(decimal: &str) -> String {
    let mut h = Sha256::new();
    h.update(decimal.as_bytes());
    let out = h.finalize();
    out.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    struct MockGetter {
        body: Result<String, String>,
        calls: Arc<AtomicUsize>,
    }

    impl HttpGetter for MockGetter {
        fn get(&self, _url: &str) -> Result<String, String> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.body.clone()
        }
    }

    fn client_with(
        dir: &std::path::Path,
        body: Result<String, String>,
    ) -> (RemoteClient, Arc<AtomicUsize>) {
        let calls = Arc::new(AtomicUsize::new(0));
        let getter = MockGetter { body, calls: calls.clone() };
        let client = RemoteClient::new("http://example.invalid", dir, Box::new(getter))
            .with_min_interval(Duration::from_millis(0));
        (client, calls)
    }

    #[test]
    fn fully_factored_response_parses() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"{"id":"1","status":"FF","factors":[["5",1],["13",1]]}"#;
        let (client, _) = client_with(dir.path(), Ok(body.into()));
        let ans = client.query(&BigUint::from(65u32)).unwrap();
        assert_eq!(ans.status, "FF");
        assert_eq!(ans.factors.len(), 2);
        assert!(!ans.from_disk_cache);
    }

    #[test]
    fn cf_response_with_numeric_factor_encoding() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"{"id":"2","status":"CF","factors":[[5,1],["812836153",1]]}"#;
        let (client, _) = client_with(dir.path(), Ok(body.into()));
        let ans = client.query(&BigUint::from(12345u32)).unwrap();
        assert_eq!(ans.status, "CF");
        assert_eq!(ans.factors[1].0, BigUint::from(812836153u64));
    }

    #[test]
    fn network_failure_is_remote_unavailable() {
        let dir = tempfile::tempdir().unwrap();
        let (client, _) = client_with(dir.path(), Err("connection refused".into()));
        match client.query(&BigUint::from(65u32)) {
            Err(OracleError::RemoteUnavailable(msg)) => assert!(msg.contains("refused")),
            other => panic!("expected RemoteUnavailable, got {other:?}"),
        }
    }

    #[test]
    fn malformed_body_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let (client, _) = client_with(dir.path(), Ok("<html>busy</html>".into()));
        assert!(matches!(
            client.query(&BigUint::from(65u32)),
            Err(OracleError::MalformedResponse(_))
        ));
    }

    #[test]
    fn disk_cache_makes_reruns_network_free() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"{"id":"1","status":"FF","factors":[["5",1],["13",1]]}"#;
        let (client, calls) = client_with(dir.path(), Ok(body.into()));
        let n = BigUint::from(65u32);
        client.query(&n).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 1);

        // A fresh client over the same directory, wired to a dead network.
        let (client2, calls2) = client_with(dir.path(), Err("down".into()));
        let ans = client2.query(&n).unwrap();
        assert!(ans.from_disk_cache);
        assert_eq!(ans.factors.len(), 2);
        assert_eq!(calls2.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn rate_limiter_spaces_live_requests() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"{"id":"1","status":"FF","factors":[["5",1]]}"#;
        let calls = Arc::new(AtomicUsize::new(0));
        let getter = MockGetter { body: Ok(body.into()), calls: calls.clone() };
        let client = RemoteClient::new("http://example.invalid", dir.path(), Box::new(getter))
            .with_min_interval(Duration::from_millis(60));
        let started = Instant::now();
        client.query(&BigUint::from(5u32)).unwrap();
        client.query(&BigUint::from(7u32)).unwrap();
        assert!(started.elapsed() >= Duration::from_millis(60));
        assert_eq!(calls.load(Ordering::SeqCst), 2);
    }
}
