//! Bundled factor cache for numbers `2^m + 1`.
//!
//! On disk the cache is a single JSON object. Keys are decimal strings of
//! `m`; each value is an object mapping decimal prime strings to integer
//! exponents, plus two optional bookkeeping fields:
//!
//! ```json
//! {
//!   "10": { "5": 2, "41": 1 },
//!   "2426": { "5": 1, "25893760589": 1,
//!             "cofactor": "...", "status": "PartialCompositeCofactor" }
//! }
//! ```
//!
//! Loading validates every entry: every factor key must pass the primality
//! test, and the reconstruction identity `prod p^e * cofactor == 2^m + 1`
//! must hold exactly. Invalid entries are never silently accepted; they are
//! collected into a rejection report with the offending key, and the rest of
//! the cache loads normally. Entries are normalized through
//! [`Factorization::assemble`], so stored exponents are true multiplicities
//! and a prime cofactor is promoted into the factor map.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{Num, One};
use sha2::{Digest, Sha256};

use super::OracleError;
use crate::arith::{FactorStatus, Factorization};
use crate::arith::is_probable_prime;
use crate::arith::MAX_EXPONENT;

/// One cache entry that failed validation, with the reason it was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedEntry {
    /// The top-level JSON key the entry appeared under.
    pub key: String,
    pub reason: String,
}

/// Validated, read-only factor data for `2^m + 1`, keyed by `m`.
#[derive(Debug, Default)]
pub struct FactorCache {
    entries: BTreeMap<u64, Arc<Factorization>>,
    /// Entries dropped during load, with reasons. Never silently discarded.
    pub rejected: Vec<RejectedEntry>,
    /// SHA-256 of the raw cache file, for report provenance.
    pub digest: Option<String>,
    /// Where the cache was loaded from, when it came from disk.
    pub path: Option<PathBuf>,
}

impl FactorCache {
    /// An empty cache (the "no bundled data" configuration).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Load and validate a cache file. I/O and JSON-parse failures are
    /// fatal; per-entry validation failures land in [`FactorCache::rejected`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self, OracleError> {
        let path = path.as_ref();
        let raw = std::fs::read(path).map_err(|e| OracleError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let digest = hex_digest(&raw);
        let parsed: BTreeMap<String, BTreeMap<String, serde_json::Value>> =
            serde_json::from_slice(&raw).map_err(|e| OracleError::Parse(e.to_string()))?;

        let mut cache = FactorCache {
            digest: Some(digest),
            path: Some(path.to_path_buf()),
            ..Self::default()
        };
        for (key, obj) in parsed {
            match validate_entry(&key, &obj) {
                Ok((m, record)) => {
                    cache.entries.insert(m, Arc::new(record));
                }
                Err(reason) => cache.rejected.push(RejectedEntry { key, reason }),
            }
        }
        Ok(cache)
    }

    /// Build a cache directly from validated records (used by generators and
    /// tests). Each record must satisfy `record.n == 2^m + 1`.
    pub fn from_records(
        records: impl IntoIterator<Item = (u64, Factorization)>,
    ) -> Result<Self, OracleError> {
        let mut cache = Self::default();
        for (m, record) in records {
            let expected = (BigUint::one() << m) + BigUint::one();
            if record.n != expected {
                return Err(OracleError::Validation {
                    key: m.to_string(),
                    reason: "record.n != 2^m + 1".into(),
                });
            }
            record
                .check()
                .map_err(|e| OracleError::Validation { key: m.to_string(), reason: e.to_string() })?;
            cache.entries.insert(m, Arc::new(record));
        }
        Ok(cache)
    }

    pub fn get(&self, m: u64) -> Option<Arc<Factorization>> {
        self.entries.get(&m).cloned()
    }

    pub fn contains(&self, m: u64) -> bool {
        self.entries.contains_key(&m)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All m values present, ascending.
    pub fn ms(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    /// Serialize back to the on-disk schema (sorted keys, pretty-printed).
    pub fn to_json(&self) -> serde_json::Value {
        let mut top = serde_json::Map::new();
        for (m, rec) in &self.entries {
            let mut obj = serde_json::Map::new();
            for (p, e) in &rec.factors {
                obj.insert(p.to_string(), serde_json::json!(e));
            }
            if !rec.cofactor.is_one() {
                obj.insert("cofactor".into(), serde_json::json!(rec.cofactor.to_string()));
            }
            obj.insert("status".into(), serde_json::to_value(rec.status).unwrap());
            top.insert(m.to_string(), serde_json::Value::Object(obj));
        }
        serde_json::Value::Object(top)
    }
}

/// Validate one raw entry into a normalized record. Returns a human-readable
/// reason on failure; the caller attaches the offending key.
fn validate_entry(
    key: &str,
    obj: &BTreeMap<String, serde_json::Value>,
) -> Result<(u64, Factorization), String> {
    let m: u64 = key
        .parse()
        .map_err(|_| format!("key {key:?} is not a decimal exponent"))?;
    if m == 0 {
        return Err("m must be >= 1".into());
    }
    let n = (BigUint::one() << m) + BigUint::one();

    let mut primes: Vec<(BigUint, u32)> = Vec::new();
    let mut cofactor = BigUint::one();
    let mut claimed_status: Option<FactorStatus> = None;
    for (field, value) in obj {
        match field.as_str() {
            "cofactor" => {
                let s = value
                    .as_str()
                    .ok_or_else(|| "cofactor must be a decimal string".to_string())?;
                cofactor = BigUint::from_str_radix(s, 10)
                    .map_err(|_| format!("cofactor {s:?} is not a decimal integer"))?;
            }
            "status" => {
                claimed_status = Some(
                    serde_json::from_value(value.clone())
                        .map_err(|e| format!("unrecognized status: {e}"))?,
                );
            }
            prime_str => {
                let p = BigUint::from_str_radix(prime_str, 10)
                    .map_err(|_| format!("factor key {prime_str:?} is not a decimal integer"))?;
                let e = value
                    .as_u64()
                    .filter(|&e| e >= 1 && e <= MAX_EXPONENT as u64)
                    .ok_or_else(|| {
                        format!("exponent for {prime_str} must be an integer in 1..={MAX_EXPONENT}")
                    })?;
                if !is_probable_prime(&p) {
                    return Err(format!("listed factor {p} is composite"));
                }
                primes.push((p, e as u32));
            }
        }
    }

    // Reconstruction identity against the entry exactly as written.
    let mut prod = cofactor.clone();
    for (p, e) in &primes {
        prod *= p.pow(*e);
    }
    if prod != n {
        return Err("reconstruction identity prod p^e * cofactor != 2^m + 1 failed".into());
    }

    let record = Factorization::assemble(n, primes.into_iter().map(|(p, _)| p))
        .map_err(|e| e.to_string())?;
    if let Some(claimed) = claimed_status {
        // assemble may promote a prime cofactor, upgrading Partial -> Complete;
        // a downgrade (claimed Complete, derived Partial) is an entry bug.
        if claimed == FactorStatus::Complete && record.status != FactorStatus::Complete {
            return Err("entry claims Complete but the factor list does not cover 2^m + 1".into());
        }
    }
    Ok((m, record))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_cache(json: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn complete_entry_for_m10() {
        let f = write_cache(r#"{ "10": { "5": 2, "41": 1 } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        assert!(cache.rejected.is_empty());
        let rec = cache.get(10).unwrap();
        assert_eq!(rec.status, FactorStatus::Complete);
        assert_eq!(rec.n, BigUint::from(1025u32));
        assert_eq!(rec.factors.get(&BigUint::from(5u32)), Some(&2));
        assert_eq!(rec.factors.get(&BigUint::from(41u32)), Some(&1));
    }

    #[test]
    fn partial_entry_with_composite_cofactor() {
        // 2^38 + 1 = 274877906945 = 5 * 229 * 457 * 525313. Listing only the 5
        // leaves the composite cofactor 54975581389.
        let f = write_cache(r#"{ "38": { "5": 1, "cofactor": "54975581389" } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        assert!(cache.rejected.is_empty(), "{:?}", cache.rejected);
        let rec = cache.get(38).unwrap();
        assert_eq!(rec.status, FactorStatus::PartialCompositeCofactor);
        assert_eq!(rec.cofactor, BigUint::from(54975581389u64));
    }

    #[test]
    fn prime_cofactor_is_promoted() {
        // 2^14 + 1 = 16385 = 5 * 29 * 113. The entry records 113 only as a
        // cofactor; load promotes the prime cofactor into the factor map.
        let f = write_cache(r#"{ "14": { "5": 1, "29": 1, "cofactor": "113" } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        let rec = cache.get(14).unwrap();
        assert_eq!(rec.status, FactorStatus::Complete);
        assert_eq!(rec.factors.len(), 3);
    }

    #[test]
    fn composite_listed_factor_is_rejected() {
        // 33 divides 2^10+1 = 1025? No; use a genuinely composite "factor" of
        // a correct product: 25 * 41 = 1025, but 25 is not prime.
        let f = write_cache(r#"{ "10": { "25": 1, "41": 1 } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        assert!(cache.get(10).is_none());
        assert_eq!(cache.rejected.len(), 1);
        assert_eq!(cache.rejected[0].key, "10");
        assert!(cache.rejected[0].reason.contains("composite"));
    }

    #[test]
    fn failed_reconstruction_is_rejected_and_good_entries_survive() {
        let f = write_cache(r#"{ "6": { "5": 1, "13": 1 }, "10": { "5": 1, "41": 1 } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        assert!(cache.contains(6));
        assert!(!cache.contains(10), "5^1 * 41 = 205 != 1025 must be rejected");
        assert_eq!(cache.rejected.len(), 1);
    }

    #[test]
    fn parse_error_is_fatal() {
        let f = write_cache("{ not json");
        assert!(matches!(
            FactorCache::load(f.path()),
            Err(OracleError::Parse(_))
        ));
    }

    #[test]
    fn roundtrip_through_json() {
        let f = write_cache(r#"{ "10": { "5": 2, "41": 1 }, "38": { "5": 1, "cofactor": "54975581389" } }"#);
        let cache = FactorCache::load(f.path()).unwrap();
        let json = serde_json::to_string(&cache.to_json()).unwrap();
        let f2 = write_cache(&json);
        let cache2 = FactorCache::load(f2.path()).unwrap();
        assert!(cache2.rejected.is_empty());
        assert_eq!(cache2.len(), 2);
        assert_eq!(cache2.get(38).unwrap().as_ref(), cache.get(38).unwrap().as_ref());
    }

    #[test]
    fn digest_is_stable() {
        let f = write_cache(r#"{ "6": { "5": 1, "13": 1 } }"#);
        let a = FactorCache::load(f.path()).unwrap().digest.unwrap();
        let b = FactorCache::load(f.path()).unwrap().digest.unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
