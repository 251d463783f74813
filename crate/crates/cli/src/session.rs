//! Shared run plumbing: config-file overlay, oracle construction, and
//! report writing.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;
use upn_core::arith::FactorBudget;
use upn_core::higgs::HiggsCache;
use upn_core::oracle::{FactorCache, FactorOracle, RemoteClient};
use upn_core::report::Report;

use crate::http::TcpHttpGetter;

/// Errors that terminate a command, tagged with their exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable config, invalid inputs: exit 3.
    Config(String),
    /// Failed writes of reports or outputs: exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

/// Values read from the optional JSON config file. Flat keys named after
/// the flags (dashes swapped for underscores); explicit flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub threads: Option<usize>,
    pub cache: Option<PathBuf>,
    pub deep_closures: Option<PathBuf>,
    pub k_min: Option<u64>,
    pub k_max: Option<u64>,
    pub deep_secs: Option<f64>,
    pub max_a: Option<u64>,
    pub factor_limit: Option<u64>,
    pub factor_timeout: Option<f64>,
    pub max_rounds: Option<u32>,
    pub max_bases: Option<u32>,
    pub max_exp: Option<u32>,
    pub use_factordb: Option<bool>,
}

impl ConfigOverlay {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigOverlay::default());
        };
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&raw)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Default on-disk locations checked when no flag or config key names one.
const DEFAULT_CACHE: &str = "data/factor_cache.json";
const DEFAULT_DEEP_CLOSURES: &str = "data/deep_closures.json";

pub fn resolve_cache_path(flag: Option<PathBuf>, overlay: &ConfigOverlay) -> Option<PathBuf> {
    flag.or_else(|| overlay.cache.clone()).or_else(|| {
        let p = PathBuf::from(DEFAULT_CACHE);
        p.exists().then_some(p)
    })
}

pub fn resolve_deep_closures_path(
    flag: Option<PathBuf>,
    overlay: &ConfigOverlay,
) -> Option<PathBuf> {
    flag.or_else(|| overlay.deep_closures.clone()).or_else(|| {
        let p = PathBuf::from(DEFAULT_DEEP_CLOSURES);
        p.exists().then_some(p)
    })
}

/// An oracle plus everything the report needs to say about how it was built.
pub struct Session {
    pub oracle: FactorOracle,
    pub higgs: HiggsCache,
    pub cache_path: Option<PathBuf>,
    pub cache_digest: Option<String>,
    pub cache_len: usize,
    pub remote: bool,
    pub remote_url: Option<String>,
}

impl Session {
    pub fn build(
        cache_path: Option<PathBuf>,
        budget: FactorBudget,
        use_factordb: bool,
    ) -> Result<Self, CliError> {
        let (cache, digest, len) = match &cache_path {
            Some(p) => {
                let cache = FactorCache::load(p)
                    .map_err(|e| CliError::Config(format!("cache {}: {e}", p.display())))?;
                for rej in &cache.rejected {
                    eprintln!("warning: cache entry {} dropped: {}", rej.key, rej.reason);
                }
                let digest = cache.digest.clone();
                let len = cache.len();
                (cache, digest, len)
            }
            None => (FactorCache::empty(), None, 0),
        };
        let mut oracle = FactorOracle::new(Arc::new(cache), budget);
        let mut remote_url = None;
        if use_factordb {
            let url = std::env::var("FACTORDB_URL")
                .unwrap_or_else(|_| "http://factordb.com".into());
            let client = RemoteClient::new(
                url.clone(),
                PathBuf::from(".factordb_cache"),
                Box::new(TcpHttpGetter::default()),
            );
            oracle = oracle.with_remote(client);
            remote_url = Some(url);
        }
        Ok(Session {
            oracle,
            higgs: HiggsCache::new(),
            cache_path,
            cache_digest: digest,
            cache_len: len,
            remote: use_factordb,
            remote_url,
        })
    }

    /// The config-echo fields shared by every command's report.
    pub fn config_echo(&self) -> serde_json::Value {
        serde_json::json!({
            "cache_path": self.cache_path.as_ref().map(|p| p.display().to_string()),
            "cache_sha256": self.cache_digest,
            "cache_entries": self.cache_len,
            "use_factordb": self.remote,
            "factordb_url": self.remote_url,
        })
    }
}

/// Budget used by commands that only take a wall budget (`--deep-secs`).
pub fn deep_budget(deep_secs: f64) -> FactorBudget {
    FactorBudget::generous().with_timeout(Duration::from_secs_f64(deep_secs))
}

/// Budget for `impostor-certificate`: `--factor-limit` bounds trial
/// division, `--factor-timeout` wall-clocks each factoring call; the rho and
/// p-1 stages keep their generous defaults under that clock.
pub fn certificate_budget(factor_limit: u64, factor_timeout: f64) -> FactorBudget {
    let generous = FactorBudget::generous();
    FactorBudget {
        trial_limit: factor_limit,
        rho_iterations: generous.rho_iterations,
        pm1_b1: generous.pm1_b1,
        wall_timeout: Some(Duration::from_secs_f64(factor_timeout)),
    }
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), CliError> {
    std::fs::write(path, report.to_pretty_string())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
