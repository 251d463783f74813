//! H_even membership: which even m have every prime factor of 2^m + 1
//! 3-Higgs?
//!
//! The classification pipeline layers cheap structural exclusions over
//! progressively heavier evidence:
//!
//! 1. **Prefilter** — m with v_2(m) ≥ 2 is out (a Fermat-prime obstruction),
//!    and for m = 2k the odd half k must be Higgs-cubefree.
//! 2. **Inheritance** — if d | m with m/d odd and d is already excluded by a
//!    concrete witness prime r | 2^d + 1, then r | 2^m + 1 too.
//! 3. **Deep closures** — a bundled table of large probable primes
//!    p* | 2^m + 1 whose Pratt trees contain a violation; rows are verified,
//!    never discovered, at desk scale.
//! 4. **Fresh factoring** — the oracle factors 2^m + 1 as far as its budget
//!    allows; the smallest non-3-Higgs prime found becomes the witness.
//!
//! Membership is conservative: a Member verdict requires a complete
//! factorization with every prime factor verified 3-Higgs. Anything short of
//! that with no violation found stays Undecided, carrying the digit sizes of
//! the blocking composite cofactors.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, is_probable_prime, ArithError, Factorization};
use crate::filters::{terminal_reason, DescentWitness, FilterContext, FilterError};
use crate::higgs::{higgs_cubefree, is_higgs, CubefreeFailure, CubefreeStatus, HiggsError, HiggsStatus};
use crate::oracle::{aurifeuillean, odd_quotient_divisors, OracleError};

/// The 3-Higgs exponent cap, mirrored from the Higgs recursion.
const CAP: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HevenVerdict {
    Member,
    Excluded,
    Undecided,
}

/// The non-3-Higgs evidence of a deep-closure exclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeepWitness {
    /// A witness prime q | p* − 1 with its own Higgs descent.
    Q {
        #[serde(with = "crate::ser::biguint")]
        q: BigUint,
        descent: DescentWitness,
    },
    /// v_2(p* − 1) alone already violates the cap.
    V2Direct { v2: u64 },
}

/// Why an even m is excluded from H_even.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExclusionReason {
    /// v_2(m) ≥ 2: 2^m + 1 would need a Fermat-prime tower that collapses.
    FermatObstruction,
    /// The odd half k = m/2 is not Higgs-cubefree.
    NotHiggsCubefree {
        k: u64,
        failure: CubefreeFailure,
    },
    /// A non-3-Higgs prime r | 2^m + 1, found by direct factoring.
    WitnessPrime {
        #[serde(with = "crate::ser::biguint")]
        r: BigUint,
        descent: DescentWitness,
    },
    /// Some d | m with m/d odd is already excluded with witness r; then
    /// r | 2^d + 1 | 2^m + 1.
    InheritedFromDivisor {
        d: u64,
        #[serde(with = "crate::ser::biguint")]
        r: BigUint,
    },
    /// A verified deep-closure row: large p* | 2^m + 1 with a violation in
    /// its Pratt tree.
    DeepPrattClosure {
        #[serde(with = "crate::ser::biguint")]
        p_star: BigUint,
        witness: DeepWitness,
    },
}

/// The classification of one even m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HevenClassification {
    pub m: u64,
    pub verdict: HevenVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<ExclusionReason>,
    /// Digit sizes of the unfactored composite cofactors blocking a verdict
    /// (Undecided only), split along the Aurifeuillean halves when possible.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocking_digits: Vec<u64>,
    /// Known prime factors of 2^m + 1 at classification time, ascending.
    #[serde(default, with = "crate::ser::biguint_vec", skip_serializing_if = "Vec::is_empty")]
    pub recorded_factors: Vec<BigUint>,
}

/// One row of the bundled deep-closure table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeepClosureRow {
    pub m: u64,
    /// Probable prime dividing 2^m + 1 (primality APR-CL attested
    /// externally; re-checked here by BPSW only).
    #[serde(with = "crate::ser::biguint")]
    pub p_star: BigUint,
    pub digits: u64,
    #[serde(flatten)]
    pub kind: DeepKind,
}

/// How a deep-closure row certifies its violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeepKind {
    /// q | p* − 1 and q is non-3-Higgs.
    Witness {
        #[serde(with = "crate::ser::biguint")]
        q: BigUint,
    },
    /// v_2(p* − 1) > 3 directly.
    V2Direct,
    /// Closed through d | m with m/d odd; p* is the parent row's prime.
    Inherited { d: u64 },
}

/// Classification knobs: today just the deep-closure table.
#[derive(Debug, Clone, Default)]
pub struct HevenConfig {
    pub deep_rows: Vec<DeepClosureRow>,
}

impl HevenConfig {
    fn deep_row(&self, m: u64) -> Option<&DeepClosureRow> {
        self.deep_rows.iter().find(|r| r.m == m)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HevenError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Higgs(#[from] HiggsError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("deep-closure row for m={m} failed verification at step {step}")]
    ChecksFailed { m: u64, step: &'static str },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Shared memo so inheritance sees divisor verdicts; keyed by m.
pub type HevenMemo = DashMap<u64, Arc<HevenClassification>>;

fn decimal_digits(n: &BigUint) -> u64 {
    n.to_str_radix(10).len() as u64
}

/// Structural prefilter: Fermat obstruction for v_2(m) ≥ 2, then the odd
/// half must be Higgs-cubefree.
pub fn prefilter(m: u64, ctx: &FilterContext) -> Result<Option<ExclusionReason>, HevenError> {
    if m < 2 || m % 2 != 0 {
        return Err(HevenError::Domain(format!("prefilter requires even m >= 2, got {m}")));
    }
    if m % 4 == 0 {
        return Ok(Some(ExclusionReason::FermatObstruction));
    }
    let k = m / 2;
    let verdict = higgs_cubefree(&BigUint::from(k), ctx.oracle, ctx.higgs)?;
    if verdict.status == CubefreeStatus::NotCubefree {
        let failure = verdict.failure.ok_or_else(|| {
            HevenError::Domain("NotCubefree verdict without a failure payload".into())
        })?;
        return Ok(Some(ExclusionReason::NotHiggsCubefree { k, failure }));
    }
    Ok(None)
}

/// Classify one even m. Divisor inheritance is resolved recursively through
/// the memo; pass a shared memo to amortize across a range.
pub fn classify(
    m: u64,
    ctx: &FilterContext,
    config: &HevenConfig,
) -> Result<Arc<HevenClassification>, HevenError> {
    let memo = HevenMemo::new();
    classify_with_memo(m, ctx, config, &memo)
}

pub fn classify_with_memo(
    m: u64,
    ctx: &FilterContext,
    config: &HevenConfig,
    memo: &HevenMemo,
) -> Result<Arc<HevenClassification>, HevenError> {
    if let Some(hit) = memo.get(&m) {
        return Ok(hit.clone());
    }
    let result = Arc::new(classify_inner(m, ctx, config, memo)?);
    memo.insert(m, result.clone());
    Ok(result)
}

fn classify_inner(
    m: u64,
    ctx: &FilterContext,
    config: &HevenConfig,
    memo: &HevenMemo,
) -> Result<HevenClassification, HevenError> {
    if let Some(reason) = prefilter(m, ctx)? {
        return Ok(excluded(m, reason));
    }

    // Inheritance first: the cheapest decisive evidence is a witness that
    // already excluded a proper divisor level.
    for d in odd_quotient_divisors(m) {
        if d < 2 {
            continue;
        }
        let sub = classify_with_memo(d, ctx, config, memo)?;
        if sub.verdict != HevenVerdict::Excluded {
            continue;
        }
        let r = match &sub.reason {
            Some(ExclusionReason::WitnessPrime { r, .. }) => r.clone(),
            Some(ExclusionReason::InheritedFromDivisor { r, .. }) => r.clone(),
            Some(ExclusionReason::DeepPrattClosure { p_star, .. }) => p_star.clone(),
            // Structural exclusions carry no prime dividing 2^d + 1, and in
            // fact cannot occur here: d = 2t with t | k, and k already
            // passed the cubefree prefilter, so t is cubefree too.
            _ => continue,
        };
        debug_assert!(divides_2m_plus_1(m, &r), "inherited witness must divide 2^{m}+1");
        return Ok(excluded(m, ExclusionReason::InheritedFromDivisor { d, r }));
    }

    // A bundled deep-closure row decides m without factoring 2^m + 1.
    if let Some(row) = config.deep_row(m) {
        let reason = verify_deep_closure(row, &config.deep_rows, ctx)?;
        return Ok(excluded(m, reason));
    }

    // Fresh factoring under the oracle's budget.
    let rec = ctx.oracle.factor_2m_plus_1(m)?;
    let fac = &rec.factorization;
    let recorded: Vec<BigUint> = fac.known_primes().cloned().collect();
    let mut saw_undecided = !fac.is_complete();
    for r in &recorded {
        let verdict = is_higgs(r, ctx.oracle, ctx.higgs)?;
        match verdict.status {
            HiggsStatus::NonHiggs => {
                let descent = DescentWitness {
                    path: verdict.witness.clone(),
                    terminal: terminal_reason(&verdict.witness, ctx)?,
                };
                return Ok(HevenClassification {
                    m,
                    verdict: HevenVerdict::Excluded,
                    reason: Some(ExclusionReason::WitnessPrime { r: r.clone(), descent }),
                    blocking_digits: vec![],
                    recorded_factors: recorded.clone(),
                });
            }
            HiggsStatus::Undecided => saw_undecided = true,
            HiggsStatus::Higgs => {}
        }
    }

    if !saw_undecided {
        return Ok(HevenClassification {
            m,
            verdict: HevenVerdict::Member,
            reason: None,
            blocking_digits: vec![],
            recorded_factors: recorded,
        });
    }
    Ok(HevenClassification {
        m,
        verdict: HevenVerdict::Undecided,
        reason: None,
        blocking_digits: blocking_pieces(m, fac),
        recorded_factors: recorded,
    })
}

fn excluded(m: u64, reason: ExclusionReason) -> HevenClassification {
    HevenClassification {
        m,
        verdict: HevenVerdict::Excluded,
        reason: Some(reason),
        blocking_digits: vec![],
        recorded_factors: vec![],
    }
}

/// Digit sizes of the composite cofactors blocking a verdict. The single
/// recorded cofactor is split along the Aurifeuillean halves by gcd when m
/// is twice an odd number, matching how the blockers actually present.
fn blocking_pieces(m: u64, fac: &Factorization) -> Vec<u64> {
    if fac.cofactor.is_one() {
        return vec![];
    }
    let h = m / 2;
    if m % 2 == 0 && h % 2 == 1 && h > 1 {
        if let Ok((l, mm)) = aurifeuillean::aurifeuillean_halves(h) {
            let cl = fac.cofactor.gcd(&l);
            let cm = fac.cofactor.gcd(&mm);
            if &cl * &cm == fac.cofactor {
                let mut out: Vec<u64> = [cl, cm]
                    .iter()
                    .filter(|c| !c.is_one())
                    .map(decimal_digits)
                    .collect();
                out.sort_unstable();
                return out;
            }
        }
    }
    vec![decimal_digits(&fac.cofactor)]
}

fn divides_2m_plus_1(m: u64, r: &BigUint) -> bool {
    if r <= &BigUint::one() {
        return false;
    }
    let pow = BigUint::from(2u32).modpow(&BigUint::from(m), r);
    (pow + 1u32) % r == BigUint::ZERO
}

/// Verify one deep-closure row against its table: BPSW primality of p*,
/// divisibility 2^m ≡ −1 (mod p*), and the recorded violation. Inherited
/// rows additionally verify their parent row.
pub fn verify_deep_closure(
    row: &DeepClosureRow,
    table: &[DeepClosureRow],
    ctx: &FilterContext,
) -> Result<ExclusionReason, HevenError> {
    let fail = |step: &'static str| HevenError::ChecksFailed { m: row.m, step };
    if decimal_digits(&row.p_star) != row.digits {
        return Err(fail("digits"));
    }
    if !is_probable_prime(&row.p_star) {
        return Err(fail("p_star_primality"));
    }
    if !divides_2m_plus_1(row.m, &row.p_star) {
        return Err(fail("modular_reduction"));
    }
    let pm1 = &row.p_star - 1u32;
    match &row.kind {
        DeepKind::Witness { q } => {
            if !(&pm1 % q).is_zero() {
                return Err(fail("witness_divides"));
            }
            if !is_probable_prime(q) {
                return Err(fail("witness_primality"));
            }
            let verdict = is_higgs(q, ctx.oracle, ctx.higgs)?;
            if verdict.status != HiggsStatus::NonHiggs {
                return Err(fail("witness_non_higgs"));
            }
            let descent = DescentWitness {
                path: verdict.witness.clone(),
                terminal: terminal_reason(&verdict.witness, ctx)?,
            };
            Ok(ExclusionReason::DeepPrattClosure {
                p_star: row.p_star.clone(),
                witness: DeepWitness::Q { q: q.clone(), descent },
            })
        }
        DeepKind::V2Direct => {
            let v2 = pm1.trailing_zeros().unwrap_or(0);
            if v2 <= u64::from(CAP) {
                return Err(fail("v2_overflow"));
            }
            Ok(ExclusionReason::DeepPrattClosure {
                p_star: row.p_star.clone(),
                witness: DeepWitness::V2Direct { v2 },
            })
        }
        DeepKind::Inherited { d } => {
            if *d == 0 || row.m % d != 0 || (row.m / d) % 2 == 0 {
                return Err(fail("inherit_level"));
            }
            let parent = table
                .iter()
                .find(|r| r.m == *d && !matches!(r.kind, DeepKind::Inherited { .. }))
                .ok_or(fail("inherit_parent_row"))?;
            verify_deep_closure(parent, table, ctx)?;
            Ok(ExclusionReason::InheritedFromDivisor { d: *d, r: parent.p_star.clone() })
        }
    }
}

/// Load a deep-closure table from its bundled JSON file.
pub fn load_deep_closures(path: &Path) -> Result<Vec<DeepClosureRow>, HevenError> {
    let text = std::fs::read_to_string(path).map_err(|source| HevenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| HevenError::Domain(format!("deep-closure table parse error: {e}")))
}

/// Aggregate counts for a range run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSummary {
    pub m_min: u64,
    pub m_max: u64,
    /// Members ascending.
    pub members: Vec<u64>,
    pub fermat_excluded: u64,
    pub not_cubefree: u64,
    /// Witness-carrying exclusions: fresh, inherited, and deep-closure.
    pub witness_excluded: u64,
    /// Undecided ascending.
    pub undecided: Vec<u64>,
    pub total: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeRun {
    pub summary: RangeSummary,
    pub classifications: Vec<HevenClassification>,
}

/// Classify every even m in [m_min, m_max], ascending so inheritance sees
/// divisor verdicts first.
pub fn classify_range(
    m_min: u64,
    m_max: u64,
    ctx: &FilterContext,
    config: &HevenConfig,
) -> Result<RangeRun, HevenError> {
    if m_min > m_max {
        return Err(HevenError::Domain(format!("empty range: {m_min} > {m_max}")));
    }
    let memo = HevenMemo::new();
    let mut summary = RangeSummary { m_min, m_max, ..RangeSummary::default() };
    let mut classifications = Vec::new();
    let start = if m_min % 2 == 0 { m_min.max(2) } else { m_min + 1 };
    for m in (start..=m_max).step_by(2) {
        let c = classify_with_memo(m, ctx, config, &memo)?;
        summary.total += 1;
        match c.verdict {
            HevenVerdict::Member => summary.members.push(m),
            HevenVerdict::Undecided => summary.undecided.push(m),
            HevenVerdict::Excluded => match c.reason {
                Some(ExclusionReason::FermatObstruction) => summary.fermat_excluded += 1,
                Some(ExclusionReason::NotHiggsCubefree { .. }) => summary.not_cubefree += 1,
                _ => summary.witness_excluded += 1,
            },
        }
        classifications.push((*c).clone());
    }
    Ok(RangeRun { summary, classifications })
}

/// All k = ∏ p_i^{e_i} with e_i ∈ [0, 3], sorted ascending: the 4^N-element
/// candidate grid of the prime-reduction theorem.
pub fn prime_branch_candidates(primes: &[u64]) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for &p in primes {
        let mut next = Vec::with_capacity(out.len() * 4);
        let big = BigUint::from(p);
        for base in &out {
            let mut power = BigUint::one();
            for _ in 0..=CAP {
                next.push(base * &power);
                power *= &big;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Histogram of v_2(q − 1) over the distinct non-trivial recorded prime
/// factors of Undecided classifications. The ubiquitous factor 5 is
/// excluded as trivial; the ≥ 4 bucket is structurally empty because such a
/// prime is non-3-Higgs and would have excluded its candidate.
pub fn v2_histogram(classifications: &[HevenClassification]) -> BTreeMap<u64, u64> {
    let five = BigUint::from(5u32);
    let mut seen: BTreeSet<&BigUint> = BTreeSet::new();
    for c in classifications {
        if c.verdict != HevenVerdict::Undecided {
            continue;
        }
        for q in &c.recorded_factors {
            if *q != five {
                seen.insert(q);
            }
        }
    }
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for q in seen {
        let v2 = (q - 1u32).trailing_zeros().unwrap_or(0);
        *hist.entry(v2).or_insert(0) += 1;
    }
    hist
}

/// Write the frontier TSV: one row per Undecided m with its odd half, its
/// form, factoring progress, and (for composite odd halves) the smallest
/// unresolved doubled prime divisor it inherits its status from.
pub fn export_frontier(
    classifications: &[HevenClassification],
    path: &Path,
) -> Result<(), HevenError> {
    let io_err = |source: std::io::Error| HevenError::Io {
        path: path.display().to_string(),
        source,
    };
    let undecided: BTreeSet<u64> = classifications
        .iter()
        .filter(|c| c.verdict == HevenVerdict::Undecided)
        .map(|c| c.m)
        .collect();
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    writeln!(file, "m\tk\tform\tknown_factors\tlargest_cofactor_digits\tinherited_from")
        .map_err(io_err)?;
    for c in classifications {
        if c.verdict != HevenVerdict::Undecided {
            continue;
        }
        let k = c.m / 2;
        let form = if is_prime_u64(k) { "2p" } else { "composite" };
        let largest = c.blocking_digits.iter().max().copied().unwrap_or(0);
        let inherited = if form == "composite" {
            smallest_unresolved_divisor(k, &undecided)
                .map(|d| d.to_string())
                .unwrap_or_default()
        } else {
            String::new()
        };
        writeln!(
            file,
            "{}\t{}\t{}\t{}\t{}\t{}",
            c.m,
            k,
            form,
            c.recorded_factors.len(),
            largest,
            inherited
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn smallest_unresolved_divisor(k: u64, undecided: &BTreeSet<u64>) -> Option<u64> {
    let mut best: Option<u64> = None;
    let mut rest = k;
    let mut p = 3u64;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            if undecided.contains(&(2 * p)) {
                best = Some(best.map_or(2 * p, |b| b.min(2 * p)));
            }
        }
        p += 2;
    }
    if rest > 1 && rest < k && undecided.contains(&(2 * rest)) {
        best = Some(best.map_or(2 * rest, |b| b.min(2 * rest)));
    }
    best
}

/// Outcome of a residue-class witness sweep for one open candidate m = 2p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub p: u64,
    pub modulus: u64,
    pub bound: u64,
    pub primes_tested: u64,
    /// Primes r ≡ 1 (mod modulus) dividing L_p or M_p — a hit is a
    /// non-3-Higgs witness for m = 2p.
    pub hits: Vec<u64>,
}

fn modpow_u64(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = u128::from(modulus);
    let mut acc: u128 = 1;
    let mut b = u128::from(base % modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Does the prime r divide L_p or M_p, the Aurifeuillean halves of
/// 2^{2p} + 1? Checked by modular reduction only.
fn divides_half(p: u64, r: u64) -> bool {
    let pow_p = modpow_u64(2, p, r);
    let pow_mid = modpow_u64(2, (p + 1) / 2, r);
    let l = (pow_p + r - pow_mid + 1) % r;
    let m = (pow_p + pow_mid + 1) % r;
    l == 0 || m == 0
}

/// Sweep for a 2-adic-type witness: enumerate primes r ≡ 1 (mod 16p) up to
/// the bound and test divisibility of either half. Any such r has
/// v_2(r − 1) ≥ 4, so a hit is an immediate non-3-Higgs witness.
pub fn sweep_v2_witness(p: u64, bound: u64) -> SweepOutcome {
    sweep_class(p, 16 * p, bound)
}

/// Sweep for a small non-Higgs-descendant witness: primes r ≡ 1 (mod 4pq)
/// would place q in r's Pratt tree.
pub fn sweep_descendant_witness(p: u64, q: u64, bound: u64) -> SweepOutcome {
    sweep_class(p, 4 * p * q, bound)
}

fn sweep_class(p: u64, modulus: u64, bound: u64) -> SweepOutcome {
    let mut outcome =
        SweepOutcome { p, modulus, bound, primes_tested: 0, hits: Vec::new() };
    let mut r = modulus + 1;
    while r <= bound {
        if is_prime_u64(r) {
            outcome.primes_tested += 1;
            if divides_half(p, r) {
                outcome.hits.push(r);
            }
        }
        r += modulus;
    }
    outcome
}


#[cfg(test)]
mod desk_scale {
    use super::*;
    use crate::arith::FactorBudget;
    use crate::higgs::HiggsCache;
    use crate::oracle::{FactorCache, FactorOracle};

    #[test]
    #[ignore = "slow: criterion-3 scale, run explicitly"]
    fn desk_range_2_to_300_no_cache() {
        let oracle = FactorOracle::new(
            std::sync::Arc::new(FactorCache::default()),
            FactorBudget::desk(),
        );
        let higgs = HiggsCache::new();
        let ctx = FilterContext { oracle: &oracle, higgs: &higgs };
        let run = classify_range(2, 300, &ctx, &HevenConfig::default()).unwrap();
        assert_eq!(run.summary.members, vec![2, 6, 10, 18, 26, 30, 46, 62, 82, 122]);
        assert_eq!(run.summary.undecided, Vec::<u64>::new());
    }
}
