//! Layered factorization source for numbers `2^m + 1` and descent values.
//!
//! [`FactorOracle::factor_2m_plus_1`] merges factor knowledge from four
//! stages, in a fixed order:
//!
//! 1. the bundled, validated [`FactorCache`],
//! 2. algebraic pre-splitting: the trivial factors (3 for odd `m`, 5 for
//!    `m ≡ 2 mod 4`), divisor inheritance (`2^d + 1 | 2^m + 1` whenever
//!    `d | m` with `m/d` odd, applied recursively and memoized), and for
//!    `m = 2p` with `p` an odd prime the Aurifeuillean halves, each factored
//!    independently under the local budget,
//! 3. local factoring of the remaining cofactor,
//! 4. an optional remote database lookup (soft-failing: a dead network
//!    degrades to the local result).
//!
//! Merging is by division: a candidate prime enters the record only after
//! passing the primality test and only with its true multiplicity in
//! `2^m + 1`, so the final factor set is independent of stage order and
//! duplicates are harmless. The oracle also serves as a general
//! [`FactorSource`] for Higgs descents (local ladder plus optional remote),
//! memoized separately.

pub mod aurifeuillean;
pub mod cache;
pub mod remote;

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

pub use aurifeuillean::{aurifeuillean_split, AurifeuilleanBranch, AurifeuilleanSplit};
pub use cache::{FactorCache, RejectedEntry};
pub use remote::{HttpGetter, OfflineGetter, RemoteAnswer, RemoteClient};

use crate::arith::{local_factor, FactorBudget, FactorSource, Factorization};
use crate::arith::is_probable_prime;
use crate::arith::{ArithError, MAX_EXPONENT};

/// Errors from cache loading, splitting, and remote lookups.
#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("cache parse error: {0}")]
    Parse(String),
    #[error("invalid cache entry {key}: {reason}")]
    Validation { key: String, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("remote factor database unavailable: {0}")]
    RemoteUnavailable(String),
    #[error("malformed remote response: {0}")]
    MalformedResponse(String),
    #[error("{0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Which pipeline stage contributed factors to a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Cache,
    Aurifeuillean,
    Local,
    Remote,
}

/// A factorization of `2^m + 1` plus the stages that contributed to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationRecord {
    pub m: u64,
    pub factorization: Factorization,
    /// Stages that contributed at least one new prime, in pipeline order.
    pub provenance: Vec<Provenance>,
}

/// The layered oracle. Cheap to share behind an `Arc`; all interior state is
/// concurrent (per-m results are memoized, merges for one m are serialized by
/// recomputation-then-insert, which is idempotent).
pub struct FactorOracle {
    cache: Arc<FactorCache>,
    budget: FactorBudget,
    remote: Option<RemoteClient>,
    memo: DashMap<u64, Arc<FactorizationRecord>>,
    general_memo: DashMap<BigUint, Arc<Factorization>>,
}

impl FactorOracle {
    pub fn new(cache: Arc<FactorCache>, budget: FactorBudget) -> Self {
        FactorOracle {
            cache,
            budget,
            remote: None,
            memo: DashMap::new(),
            general_memo: DashMap::new(),
        }
    }

    /// Attach a remote client; lookups stay opt-in per the configuration
    /// that constructed the client.
    pub fn with_remote(mut self, client: RemoteClient) -> Self {
        self.remote = Some(client);
        self
    }

    pub fn cache(&self) -> &FactorCache {
        &self.cache
    }

    pub fn budget(&self) -> &FactorBudget {
        &self.budget
    }

    pub fn remote_enabled(&self) -> bool {
        self.remote.is_some()
    }

    /// The merged factorization record for `2^m + 1`.
    pub fn factor_2m_plus_1(&self, m: u64) -> Result<Arc<FactorizationRecord>, OracleError> {
        if m == 0 {
            return Err(OracleError::Domain("m must be >= 1".into()));
        }
        if let Some(hit) = self.memo.get(&m) {
            return Ok(hit.clone());
        }

        let n = (BigUint::one() << m) + BigUint::one();
        let mut state = MergeState::new(n.clone());

        // Stage 1: bundled cache.
        if let Some(rec) = self.cache.get(m) {
            state.merge(rec.known_primes().cloned(), Provenance::Cache);
        }

        // Stage 2: algebraic pre-split. Trivial factors first: 3 | 2^m + 1
        // for odd m, and 5 | 2^m + 1 exactly when m ≡ 2 (mod 4).
        if m % 2 == 1 {
            state.merge([BigUint::from(3u32)], Provenance::Aurifeuillean);
        }
        if m % 4 == 2 {
            state.merge([BigUint::from(5u32)], Provenance::Aurifeuillean);
        }
        // Divisor inheritance: 2^d + 1 | 2^m + 1 for every proper d | m with
        // m/d odd; recursion is memoized so ranges pay for each d once.
        for d in odd_quotient_divisors(m) {
            let sub = self.factor_2m_plus_1(d)?;
            state.merge(
                sub.factorization.known_primes().cloned(),
                Provenance::Aurifeuillean,
            );
        }
        // Aurifeuillean halves for m = 2n with n odd, factored independently:
        // factors of a ~m/2-bit half are much cheaper to find than factors of
        // n itself. The identity holds for composite odd n as well, where the
        // halves overlap the inherited divisors merged above; stripping known
        // primes first leaves exactly the interesting residues.
        let mut halves_factored = false;
        if m % 2 == 0 {
            let h = m / 2;
            if h % 2 == 1 && h > 1 {
                let (half_l, half_m) = aurifeuillean::aurifeuillean_halves(h)?;
                for half in [&half_l, &half_m] {
                    if state.complete() {
                        break;
                    }
                    let piece = state.strip_known(half);
                    if !piece.is_one() {
                        let found = local_factor(&piece, &self.budget)?;
                        state.merge(found.known_primes().cloned(), Provenance::Aurifeuillean);
                    }
                }
                halves_factored = true;
            }
        }

        // Stage 3: local factoring of whatever remains. Skipped when both
        // Aurifeuillean halves were already attacked: the remaining cofactor
        // is the product of the halves' residues, and rho on the glued
        // product cannot beat rho on the pieces.
        if !state.complete() && !halves_factored {
            let found = local_factor(&state.cofactor, &self.budget)?;
            state.merge(found.known_primes().cloned(), Provenance::Local);
        }

        // Stage 4: remote lookup, soft-failing.
        if !state.complete() {
            if let Some(client) = &self.remote {
                match client.query(&n) {
                    Ok(answer) => {
                        let primes = answer
                            .factors
                            .into_iter()
                            .map(|(p, _)| p)
                            .filter(is_probable_prime);
                        state.merge(primes, Provenance::Remote);
                    }
                    Err(OracleError::RemoteUnavailable(_)) => {
                        // Degrade to the local result.
                    }
                    Err(other) => return Err(other),
                }
            }
        }

        let record = Arc::new(FactorizationRecord {
            m,
            factorization: state.to_factorization()?,
            provenance: state.tags.clone(),
        });
        self.memo.insert(m, record.clone());
        Ok(record)
    }
}

/// General-purpose factoring for descent values (p - 1 chains etc.):
/// the local ladder, then the remote database if attached, memoized by n.
impl FactorSource for FactorOracle {
    fn factor(&self, n: &BigUint) -> Result<Factorization, ArithError> {
        if let Some(hit) = self.general_memo.get(n) {
            return Ok(hit.as_ref().clone());
        }
        let mut result = local_factor(n, &self.budget)?;
        if !result.is_complete() {
            if let Some(client) = &self.remote {
                if let Ok(answer) = client.query(n) {
                    let mut primes: Vec<BigUint> =
                        result.known_primes().cloned().collect();
                    primes.extend(
                        answer
                            .factors
                            .into_iter()
                            .map(|(p, _)| p)
                            .filter(is_probable_prime),
                    );
                    result = Factorization::assemble(n.clone(), primes)?;
                }
            }
        }
        self.general_memo.insert(n.clone(), Arc::new(result.clone()));
        Ok(result)
    }
}

/// Proper divisors d of m with m/d odd, ascending. For odd m that is every
/// proper divisor; for m = 2k with k odd it is {2d' : d' | k, d' < k}; for
/// v_2(m) >= 2 the same doubling rule applies to the full odd part.
pub(crate) fn odd_quotient_divisors(m: u64) -> Vec<u64> {
    let two_part = m & m.wrapping_neg(); // 2^{v_2(m)}
    let odd_part = m / two_part;
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= odd_part {
        if odd_part % d == 0 {
            out.push(two_part * d);
            let other = odd_part / d;
            if other != d {
                out.push(two_part * other);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out.pop(); // drop d = m itself
    out
}

/// Working state of one merge: confirmed primes with true multiplicities,
/// the remaining cofactor, and the stages that contributed.
struct MergeState {
    n: BigUint,
    factors: BTreeMap<BigUint, u32>,
    cofactor: BigUint,
    tags: Vec<Provenance>,
}

impl MergeState {
    fn new(n: BigUint) -> Self {
        MergeState {
            cofactor: n.clone(),
            n,
            factors: BTreeMap::new(),
            tags: Vec::new(),
        }
    }

    fn complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// Divide out each candidate prime that actually divides the remaining
    /// cofactor; tag the stage if it contributed anything new. A cofactor
    /// that becomes (probable) prime is promoted immediately so later stages
    /// skip needless work.
    fn merge(&mut self, primes: impl IntoIterator<Item = BigUint>, tag: Provenance) {
        let mut contributed = false;
        for p in primes {
            if self.factors.contains_key(&p) || self.complete() {
                continue;
            }
            let mut e = 0u32;
            while (&self.cofactor % &p) == BigUint::ZERO {
                self.cofactor /= &p;
                e += 1;
                if e > MAX_EXPONENT {
                    // Cannot happen for 2^m + 1 at sane m; bail defensively.
                    return;
                }
            }
            if e > 0 {
                self.factors.insert(p, e);
                contributed = true;
            }
        }
        if !self.complete() && is_probable_prime(&self.cofactor) {
            let p = std::mem::replace(&mut self.cofactor, BigUint::one());
            self.factors.insert(p, 1);
            contributed = true;
        }
        if contributed && !self.tags.contains(&tag) {
            self.tags.push(tag);
        }
    }

    /// `x` with every confirmed prime divided out to full multiplicity.
    fn strip_known(&self, x: &BigUint) -> BigUint {
        let mut piece = x.clone();
        for p in self.factors.keys() {
            while !piece.is_one() && (&piece % p) == BigUint::ZERO {
                piece /= p;
            }
        }
        piece
    }

    fn to_factorization(&self) -> Result<Factorization, OracleError> {
        Factorization::assemble(self.n.clone(), self.factors.keys().cloned())
            .map_err(OracleError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FactorStatus;

    fn local_oracle(budget: FactorBudget) -> FactorOracle {
        FactorOracle::new(Arc::new(FactorCache::empty()), budget)
    }

    #[test]
    fn m14_is_5_29_113() {
        let oracle = local_oracle(FactorBudget::desk());
        let rec = oracle.factor_2m_plus_1(14).unwrap();
        assert!(rec.factorization.is_complete());
        let got: Vec<u32> = rec
            .factorization
            .known_primes()
            .map(|p| p.try_into().unwrap())
            .collect();
        assert_eq!(got, vec![5, 29, 113]);
    }

    #[test]
    fn m6_is_5_13() {
        let oracle = local_oracle(FactorBudget::desk());
        let rec = oracle.factor_2m_plus_1(6).unwrap();
        assert!(rec.factorization.is_complete());
        let got: Vec<u32> = rec
            .factorization
            .known_primes()
            .map(|p| p.try_into().unwrap())
            .collect();
        assert_eq!(got, vec![5, 13]);
    }

    #[test]
    fn m10_from_cache_carries_cache_provenance() {
        let n = BigUint::from(1025u32);
        let rec = Factorization::assemble(
            n,
            [BigUint::from(5u32), BigUint::from(41u32)],
        )
        .unwrap();
        let cache = FactorCache::from_records([(10, rec)]).unwrap();
        let oracle = FactorOracle::new(Arc::new(cache), FactorBudget::tiny());
        let out = oracle.factor_2m_plus_1(10).unwrap();
        assert!(out.factorization.is_complete());
        assert_eq!(out.factorization.factors[&BigUint::from(5u32)], 2);
        assert!(out.provenance.contains(&Provenance::Cache));
    }

    #[test]
    fn m18_inherits_from_m6_then_local_closes() {
        let oracle = local_oracle(FactorBudget::desk());
        let rec = oracle.factor_2m_plus_1(18).unwrap();
        assert!(rec.factorization.is_complete());
        let got: Vec<u32> = rec
            .factorization
            .known_primes()
            .map(|p| p.try_into().unwrap())
            .collect();
        assert_eq!(got, vec![5, 13, 37, 109]);
        // 5 and 13 arrive through the m = 6 record, i.e. the algebraic stage.
        assert!(rec.provenance.contains(&Provenance::Aurifeuillean));
    }

    #[test]
    fn inherited_primes_divide_by_modular_reduction() {
        let oracle = local_oracle(FactorBudget::desk());
        for m in 1u64..=60 {
            let n = (BigUint::one() << m) + BigUint::one();
            for d in odd_quotient_divisors(m) {
                let sub = oracle.factor_2m_plus_1(d).unwrap();
                for p in sub.factorization.known_primes() {
                    assert_eq!(&n % p, BigUint::ZERO, "p={p} of d={d} must divide 2^{m}+1");
                }
            }
        }
    }

    #[test]
    fn repeat_calls_hit_the_memo() {
        let oracle = local_oracle(FactorBudget::desk());
        let a = oracle.factor_2m_plus_1(30).unwrap();
        let b = oracle.factor_2m_plus_1(30).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn all_recorded_factors_are_probable_primes() {
        let oracle = local_oracle(FactorBudget::desk());
        for m in 1u64..=40 {
            let rec = oracle.factor_2m_plus_1(m).unwrap();
            for p in rec.factorization.known_primes() {
                assert!(is_probable_prime(p), "m={m} recorded composite {p}");
            }
        }
    }

    #[test]
    fn odd_quotient_divisor_rule() {
        assert_eq!(odd_quotient_divisors(18), vec![2, 6]);
        assert_eq!(odd_quotient_divisors(9), vec![1, 3]);
        assert_eq!(odd_quotient_divisors(12), vec![4]);
        assert_eq!(odd_quotient_divisors(1), Vec::<u64>::new());
        assert_eq!(odd_quotient_divisors(7278), vec![2, 6, 2426]);
    }

    #[test]
    fn composite_odd_half_closes_m186_at_tiny_budget() {
        // 186 = 2 * 93 with 93 composite, so the prime-only split never
        // fires; the primitive part of 2^186 + 1 is a 37-digit wall for any
        // local budget. The general halves for n = 93 change that: after
        // stripping the inherited primes of 2^62 + 1 and 2^6 + 1, both half
        // residues fit in u64 and factor unconditionally.
        let oracle = local_oracle(FactorBudget::tiny());
        let rec = oracle.factor_2m_plus_1(186).unwrap();
        assert!(rec.factorization.is_complete(), "{:?}", rec.factorization);
        let primes: Vec<String> = rec
            .factorization
            .factors
            .keys()
            .map(|p| p.to_string())
            .collect();
        assert!(primes.contains(&"951088215727633".to_string()));
        assert!(primes.contains(&"4611545283086450689".to_string()));
    }

    #[test]
    fn zero_budget_plus_remote_closes_m134() {
        // Numbers that fit in u64 are always factored in full, so a stall
        // needs halves past 64 bits. At m = 134 the trivial 5 divides the
        // L half; after stripping it both residues (2.9e19 and 1.5e20) are
        // composite and out of reach at zero budget. The mock remote then
        // supplies the full factor list.
        struct Mock;
        impl HttpGetter for Mock {
            fn get(&self, _url: &str) -> Result<String, String> {
                Ok(r#"{"id":"x","status":"FF","factors":[["5",1],["269",1],["42875177",1],["2559066073",1],["15152453",1],["9739278030221",1]]}"#.into())
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let zero = FactorBudget {
            trial_limit: 2,
            rho_iterations: 0,
            pm1_b1: 0,
            wall_timeout: None,
        };
        let client = RemoteClient::new("http://example.invalid", dir.path(), Box::new(Mock))
            .with_min_interval(std::time::Duration::from_millis(0));
        let oracle = local_oracle(zero).with_remote(client);
        let rec = oracle.factor_2m_plus_1(134).unwrap();
        assert!(rec.factorization.is_complete(), "{:?}", rec.factorization);
        assert!(rec.provenance.contains(&Provenance::Remote));
    }

    #[test]
    fn dead_remote_degrades_to_partial() {
        let dir = tempfile::tempdir().unwrap();
        let zero = FactorBudget {
            trial_limit: 2,
            rho_iterations: 0,
            pm1_b1: 0,
            wall_timeout: None,
        };
        let client = RemoteClient::new(
            "http://example.invalid",
            dir.path(),
            Box::new(OfflineGetter),
        );
        let oracle = local_oracle(zero).with_remote(client);
        let rec = oracle.factor_2m_plus_1(134).unwrap();
        assert_eq!(rec.factorization.status, FactorStatus::PartialCompositeCofactor);
    }

    #[test]
    fn merge_is_order_insensitive() {
        // Two states fed the same primes in different orders agree.
        let n = (BigUint::one() << 14u32) + BigUint::one();
        let ps = [5u32, 29, 113].map(BigUint::from);
        let mut a = MergeState::new(n.clone());
        a.merge(ps.clone(), Provenance::Local);
        let mut b = MergeState::new(n);
        b.merge(ps.iter().rev().cloned(), Provenance::Cache);
        assert_eq!(a.factors, b.factors);
        assert_eq!(a.cofactor, b.cofactor);
    }

    #[test]
    fn general_factor_source_uses_local_ladder() {
        let oracle = local_oracle(FactorBudget::desk());
        let f = oracle.factor(&BigUint::from(20127042u64)).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.factors[&BigUint::from(3u32)], 4);
    }
}
