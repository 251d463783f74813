//! The three elimination filters Z, N, O and the certificate runner.
//!
//! A candidate is a pair (kernel, a): a hypothetical even unitary perfect
//! number n with 2^a exactly dividing n and odd component structure refining
//! the kernel. Each filter, when it fires, yields a self-contained
//! certificate that no such n exists:
//!
//! * **Z** — the seed exponent itself is incompatible: a primitive prime
//!   divisor r of 2^a + 1 satisfies 2a | r - 1, so if 2a is not
//!   Higgs-cubefree, r cannot be 3-Higgs.
//! * **N** — some divisor level m | a with a/m odd exposes a known
//!   non-3-Higgs prime of 2^m + 1, which would divide n.
//! * **O** — the 2-adic closure of the forced odd support overshoots the
//!   budget: the balance ∏(c + 1) = 2^{a+1} · ∏ p^e over the components c
//!   of n caps Σ v_2(p^e + 1) at exactly a + 1, and the monotone cascade
//!   derives a lower bound exceeding it.
//!
//! Filters are applied in the fixed order Z → N → O, so the summary split
//! attributes each candidate to exactly one filter. Every certificate
//! replays with [`verify_certificate`]: divisibility by modular reduction,
//! Higgs descent paths step by step, and the overshoot total from the
//! recorded target set by pure 2-adic arithmetic.
//!
//! ## Cascade accounting
//!
//! For odd q the balance equation reads
//! `e_q = v_q(2^a + 1) + Σ_{odd components} v_q(p^e + 1)`, so the seed
//! valuations — bounded below from cached factorizations of 2^m + 1 over the
//! levels m | a with a/m odd — participate in **every** round's needs ledger,
//! not only at initialization. Rounds are synchronous: all target
//! contributions of round t are collected before any target raises. The
//! round index is 0-based, targets only grow, and a raise jumps straight to
//! the incoming valuation. Incomplete factorization of some p^e + 1 is
//! conservative: v_2 stays exact (closed form: e odd → v_2(p + 1), e even
//! → 1), while the unknown odd part contributes no needs.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_probable_prime, ArithError, FactorSource};
use crate::higgs::{
    higgs_cubefree, is_higgs, CubefreeFailure, CubefreeStatus, FailureReason, HiggsCache,
    HiggsError, HiggsStatus,
};
use crate::kernel::{Kernel, SeedCongruence};
use crate::oracle::{odd_quotient_divisors, FactorOracle, OracleError};

/// Which obstruction eliminated a candidate, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    Z,
    N,
    O,
    Unresolved,
}

/// A Higgs descent path with its terminal violation, replayable without
/// re-factoring: each path element divides its predecessor minus one, and
/// the last element breaks an exponent cap directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentWitness {
    #[serde(with = "crate::ser::biguint_vec")]
    pub path: Vec<BigUint>,
    pub terminal: FailureReason,
}

/// Why filter Z rejected the seed exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ZReason {
    /// v_q(2a) exceeds the 3-Higgs exponent cap.
    ExponentOverflow { v: u32 },
    /// q itself is non-Higgs.
    NonHiggs { descent: DescentWitness },
}

/// One cascade target: the prime and its current forced exponent bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetEntry {
    #[serde(with = "crate::ser::biguint")]
    pub p: BigUint,
    pub e: u32,
}

/// Per-round cascade telemetry kept in O-certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeRound {
    pub round: u32,
    pub v2_total: u64,
    pub bases_active: u32,
    /// New targets inserted after this round's sweep.
    pub added: u32,
    /// Existing targets raised after this round's sweep.
    pub raised: u32,
}

/// The filter-specific witness payload of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "filter")]
pub enum FilterWitness {
    Z {
        /// Offending prime divisor of 2a.
        #[serde(with = "crate::ser::biguint")]
        q: BigUint,
        reason: ZReason,
    },
    N {
        /// Divisor level: m | a with a/m odd.
        m: u64,
        /// The non-3-Higgs prime with r | 2^m + 1.
        #[serde(with = "crate::ser::biguint")]
        r: BigUint,
        descent: DescentWitness,
    },
    O {
        /// 0-based synchronous round at which the overshoot was observed.
        round: u32,
        v2_total: u64,
        /// The 2-adic budget a + 1 that v2_total exceeds.
        budget: u64,
        bases_active: u32,
        /// Seed valuations fed into every round's needs ledger.
        seed: Vec<TargetEntry>,
        /// Final target set; replaying Σ v_2(p^e + 1) over it gives v2_total.
        targets: Vec<TargetEntry>,
        trace: Vec<CascadeRound>,
    },
}

/// The elimination verdict for one candidate (kernel, a).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationCertificate {
    pub kernel_id: String,
    pub a: u64,
    pub filter: FilterKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FilterWitness>,
}

#[derive(Debug, thiserror::Error)]
pub enum FilterError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Higgs(#[from] HiggsError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("filter precondition violated: {0}")]
    Domain(String),
}

/// Shared lookup state threaded through the filters.
pub struct FilterContext<'a> {
    pub oracle: &'a FactorOracle,
    pub higgs: &'a HiggsCache,
}

/// Round, base, and exponent ceilings for the O cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeLimits {
    pub max_rounds: u32,
    pub max_bases: u32,
    /// Largest exponent any single target may be raised to; a need beyond
    /// this halts the cascade without a certificate (conservative).
    pub max_exp: u32,
}

impl Default for CascadeLimits {
    fn default() -> Self {
        // Generous: fixpoints exit early, and the deep certificates in the
        // 10^4 range need a few hundred rounds.
        CascadeLimits { max_rounds: 512, max_bases: 8192, max_exp: 4096 }
    }
}

/// Filter Z: reject a iff 2a is not Higgs-cubefree.
///
/// A primitive prime divisor r of 2^a + 1 has 2a | r - 1, so a non-Higgs
/// prime or an exponent above 3 in 2a forces a non-Higgs r. The one case
/// without a primitive divisor, a = 3 (Zsigmondy's exception for 2^3 + 1 =
/// 9), is passed through explicitly; 2·3 = 6 is Higgs-cubefree anyway.
pub fn filter_z(a: u64, ctx: &FilterContext) -> Result<Option<FilterWitness>, FilterError> {
    if a == 0 {
        return Err(FilterError::Domain("a must be >= 1".into()));
    }
    if a == 3 {
        return Ok(None);
    }
    let k = BigUint::from(a) * 2u32;
    let verdict = higgs_cubefree(&k, ctx.oracle, ctx.higgs)?;
    if verdict.status != CubefreeStatus::NotCubefree {
        // Cubefree passes; Undecided (unreachable for u64-sized 2a) is not
        // a witness.
        return Ok(None);
    }
    let witness = match verdict.failure {
        Some(CubefreeFailure::ExponentOverflow { q, v }) => FilterWitness::Z {
            q,
            reason: ZReason::ExponentOverflow { v },
        },
        Some(CubefreeFailure::NonHiggsPrime { q, witness }) => {
            let terminal = terminal_reason(&witness, ctx)?;
            FilterWitness::Z {
                q,
                reason: ZReason::NonHiggs {
                    descent: DescentWitness { path: witness, terminal },
                },
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(witness))
}

/// Filter N: scan the divisor levels m | a with a/m odd, ascending and
/// including m = a, for a known non-3-Higgs prime of 2^m + 1. Partial
/// factorizations are usable: one known violating prime suffices, and
/// Undecided primes are skipped rather than treated as witnesses.
pub fn filter_n(a: u64, ctx: &FilterContext) -> Result<Option<FilterWitness>, FilterError> {
    if a == 0 {
        return Err(FilterError::Domain("a must be >= 1".into()));
    }
    let mut levels = odd_quotient_divisors(a);
    levels.push(a);
    for m in levels {
        let rec = ctx.oracle.factor_2m_plus_1(m)?;
        for r in rec.factorization.known_primes() {
            let verdict = is_higgs(r, ctx.oracle, ctx.higgs)?;
            if verdict.status == HiggsStatus::NonHiggs {
                debug_assert!(
                    divides_2m_plus_1(m, r),
                    "oracle returned a non-divisor for m={m}"
                );
                let terminal = terminal_reason(&verdict.witness, ctx)?;
                return Ok(Some(FilterWitness::N {
                    m,
                    r: r.clone(),
                    descent: DescentWitness { path: verdict.witness.clone(), terminal },
                }));
            }
        }
    }
    Ok(None)
}

/// The running state of one cascade: current targets, the latest sweep's
/// v_2 total, the 0-based round counter, and the active base count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeState {
    pub targets: BTreeMap<BigUint, u32>,
    pub v2_total: u64,
    pub round: u32,
    pub bases_active: u32,
}

/// Outcome of a cascade run: the certificate payload if the budget was
/// exceeded, plus the final state either way.
#[derive(Debug, Clone)]
pub struct CascadeOutcome {
    pub overshoot: Option<FilterWitness>,
    pub state: CascadeState,
    pub trace: Vec<CascadeRound>,
}

/// Exact 2-adic valuation of p^e + 1 for odd p, without materializing the
/// power: for odd e the cofactor of p + 1 is a sum of e odd terms, and for
/// even e we have p^e ≡ 1 (mod 8).
fn v2_of_pow_plus_1(p: &BigUint, e: u32) -> u64 {
    if e % 2 == 1 {
        (p + 1u32).trailing_zeros().expect("p + 1 > 0")
    } else {
        1
    }
}

/// Beyond this size the cascade stops materializing p^e + 1: local factoring
/// of such values never completes anyway, and the conservative contribution
/// (exact v_2, no odd needs) is available in closed form.
const CASCADE_VALUE_BITS: u64 = 320;

/// Seed valuations: for each odd prime in a cached level factorization,
/// the max of its exponents across levels — a lower bound for v_q(2^a + 1),
/// since 2^{m1} + 1 | 2^{m2} + 1 along the level chain.
fn seed_valuations(a: u64, ctx: &FilterContext) -> BTreeMap<BigUint, u32> {
    let mut levels = odd_quotient_divisors(a);
    levels.push(a);
    let mut seed: BTreeMap<BigUint, u32> = BTreeMap::new();
    for m in levels {
        if let Some(rec) = ctx.oracle.cache().get(m) {
            for (q, e) in &rec.factors {
                let slot = seed.entry(q.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
    }
    seed
}

/// Run the monotone 2-adic closure from the given initial targets and
/// permanent seed valuations. Exposed separately from [`filter_o`] so the
/// monotonicity property (supersets never decrease the final total) is
/// directly testable.
pub fn run_cascade(
    initial: BTreeMap<BigUint, u32>,
    seed: &BTreeMap<BigUint, u32>,
    budget: u64,
    ctx: &FilterContext,
    limits: CascadeLimits,
) -> Result<CascadeOutcome, FilterError> {
    let mut targets = initial;
    let mut trace: Vec<CascadeRound> = Vec::new();
    // (p, e) -> (v_2 contribution, odd needs when completely factored).
    let mut memo: HashMap<(BigUint, u32), (u64, Option<BTreeMap<BigUint, u64>>)> = HashMap::new();

    for round in 0..limits.max_rounds {
        let bases_active = targets.len() as u32;
        let mut v2_total: u64 = 0;
        let mut needs: BTreeMap<BigUint, u64> = BTreeMap::new();
        for (q, e) in seed {
            needs.insert(q.clone(), u64::from(*e));
        }
        for (p, e) in &targets {
            let key = (p.clone(), *e);
            if !memo.contains_key(&key) {
                memo.insert(key.clone(), contribution(p, *e, ctx)?);
            }
            let (v2, odd) = &memo[&key];
            v2_total += v2;
            if let Some(f) = odd {
                for (q, v) in f {
                    *needs.entry(q.clone()).or_insert(0) += v;
                }
            }
        }

        if v2_total > budget {
            trace.push(CascadeRound { round, v2_total, bases_active, added: 0, raised: 0 });
            let state = CascadeState { targets: targets.clone(), v2_total, round, bases_active };
            let witness = FilterWitness::O {
                round,
                v2_total,
                budget,
                bases_active,
                seed: entries(seed),
                targets: entries(&targets),
                trace: trace.clone(),
            };
            return Ok(CascadeOutcome { overshoot: Some(witness), state, trace });
        }

        let mut added = 0u32;
        let mut raised = 0u32;
        let mut capped = false;
        for (q, need) in needs {
            let need32 = u32::try_from(need.min(u64::from(u32::MAX))).expect("clamped");
            // Clamping an oversized need would be unsound (v_2(p^e + 1) is
            // not monotone in e), so it halts growth like a full base table.
            match targets.get(&q) {
                Some(&cur) if u64::from(cur) < need => {
                    if need32 > limits.max_exp {
                        capped = true;
                    } else {
                        targets.insert(q, need32);
                        raised += 1;
                    }
                }
                Some(_) => {}
                None if need32 > limits.max_exp => capped = true,
                None if (targets.len() as u32) < limits.max_bases => {
                    targets.insert(q, need32);
                    added += 1;
                }
                None => capped = true,
            }
        }
        trace.push(CascadeRound { round, v2_total, bases_active, added, raised });
        if (added == 0 && raised == 0) || capped {
            // Fixpoint, or the base budget stopped the closure from growing.
            let state = CascadeState { targets, v2_total, round, bases_active };
            return Ok(CascadeOutcome { overshoot: None, state, trace });
        }
    }

    let round = limits.max_rounds.saturating_sub(1);
    let (v2_total, bases_active) =
        trace.last().map(|r| (r.v2_total, r.bases_active)).unwrap_or((0, 0));
    let state = CascadeState { targets, v2_total, round, bases_active };
    Ok(CascadeOutcome { overshoot: None, state, trace })
}

fn entries(map: &BTreeMap<BigUint, u32>) -> Vec<TargetEntry> {
    map.iter().map(|(p, e)| TargetEntry { p: p.clone(), e: *e }).collect()
}

/// One target's contribution: exact v_2(p^e + 1), and the odd needs when the
/// odd part factors completely under the budget.
fn contribution(
    p: &BigUint,
    e: u32,
    ctx: &FilterContext,
) -> Result<(u64, Option<BTreeMap<BigUint, u64>>), FilterError> {
    let v2 = v2_of_pow_plus_1(p, e);
    if p.bits().saturating_mul(u64::from(e)) + 1 > CASCADE_VALUE_BITS {
        return Ok((v2, None));
    }
    let n = p.pow(e) + 1u32;
    debug_assert_eq!(n.trailing_zeros().unwrap_or(0), v2);
    let odd = &n >> v2;
    if odd.is_one() {
        return Ok((v2, Some(BTreeMap::new())));
    }
    let fac = ctx.oracle.factor(&odd)?;
    if fac.is_complete() {
        let needs = fac
            .factors
            .into_iter()
            .map(|(q, v)| (q, u64::from(v)))
            .collect();
        Ok((v2, Some(needs)))
    } else {
        Ok((v2, None))
    }
}

/// Filter O: the 2-adic budget overshoot cascade. Targets start from the
/// kernel joined with the seed valuations of all cached levels; the closure
/// certifies at the first synchronous round whose v_2 total strictly
/// exceeds a + 1.
pub fn filter_o(
    a: u64,
    kernel: &Kernel,
    ctx: &FilterContext,
    limits: CascadeLimits,
) -> Result<Option<FilterWitness>, FilterError> {
    if a == 0 {
        return Err(FilterError::Domain("a must be >= 1".into()));
    }
    let seed = seed_valuations(a, ctx);
    let mut targets: BTreeMap<BigUint, u32> = kernel
        .components
        .iter()
        .map(|(p, e)| (BigUint::from(*p), *e))
        .collect();
    for (q, e) in &seed {
        let slot = targets.entry(q.clone()).or_insert(0);
        *slot = (*slot).max(*e);
    }
    let outcome = run_cascade(targets, &seed, a + 1, ctx, limits)?;
    Ok(outcome.overshoot)
}

/// Configuration for a certificate run over one kernel's congruence class.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub limits: CascadeLimits,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { limits: CascadeLimits::default() }
    }
}

/// Counts per filter for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummarySplit {
    pub z: u64,
    pub n: u64,
    pub o: u64,
    pub unresolved: u64,
    pub total: u64,
}

impl SummarySplit {
    fn absorb(&mut self, kind: FilterKind) {
        match kind {
            FilterKind::Z => self.z += 1,
            FilterKind::N => self.n += 1,
            FilterKind::O => self.o += 1,
            FilterKind::Unresolved => self.unresolved += 1,
        }
        self.total += 1;
    }

    pub fn merge(&mut self, other: &SummarySplit) {
        self.z += other.z;
        self.n += other.n;
        self.o += other.o;
        self.unresolved += other.unresolved;
        self.total += other.total;
    }
}

/// The full output of [`run_certificate`]: per-candidate certificates plus
/// the attribution split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRun {
    pub kernel_id: String,
    pub residue: u64,
    pub modulus: u64,
    pub a_min: u64,
    pub a_max: u64,
    pub certificates: Vec<EliminationCertificate>,
    pub summary: SummarySplit,
}

/// Certify one candidate: Z, then N, then O, in that order.
pub fn certify(
    kernel: &Kernel,
    a: u64,
    ctx: &FilterContext,
    limits: CascadeLimits,
) -> Result<EliminationCertificate, FilterError> {
    let kernel_id = kernel.id();
    if let Some(w) = filter_z(a, ctx)? {
        return Ok(EliminationCertificate { kernel_id, a, filter: FilterKind::Z, witness: Some(w) });
    }
    if let Some(w) = filter_n(a, ctx)? {
        return Ok(EliminationCertificate { kernel_id, a, filter: FilterKind::N, witness: Some(w) });
    }
    if let Some(w) = filter_o(a, kernel, ctx, limits)? {
        return Ok(EliminationCertificate { kernel_id, a, filter: FilterKind::O, witness: Some(w) });
    }
    Ok(EliminationCertificate { kernel_id, a, filter: FilterKind::Unresolved, witness: None })
}

/// Run the three-filter certificate over every a in the seed congruence
/// class within [a_min, a_max]. Candidates are independent and mapped in
/// parallel over a shared read-mostly oracle and Higgs memo.
pub fn run_certificate(
    kernel: &Kernel,
    seed: &SeedCongruence,
    a_min: u64,
    a_max: u64,
    ctx: &FilterContext,
    config: RunConfig,
) -> Result<CertificateRun, FilterError> {
    let candidates = seed.candidates_in(a_min, a_max);
    let certificates: Result<Vec<EliminationCertificate>, FilterError> = candidates
        .par_iter()
        .map(|&a| certify(kernel, a, ctx, config.limits))
        .collect();
    let certificates = certificates?;
    let mut summary = SummarySplit::default();
    for cert in &certificates {
        summary.absorb(cert.filter);
    }
    Ok(CertificateRun {
        kernel_id: kernel.id(),
        residue: seed.residue,
        modulus: seed.modulus,
        a_min,
        a_max,
        certificates,
        summary,
    })
}

/// Why a certificate failed independent verification.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CertificateInvalid {
    #[error("witness missing for filter {0:?}")]
    MissingWitness(FilterKind),
    #[error("witness present on an Unresolved certificate")]
    UnexpectedWitness,
    #[error("witness variant does not match certificate filter")]
    FilterMismatch,
    #[error("q = {q} does not divide 2a = {k}")]
    NotADivisorOf2a { q: BigUint, k: BigUint },
    #[error("recorded exponent violation does not replay: v_{q}(2a) = {actual}, recorded {recorded}")]
    ExponentMismatch { q: BigUint, actual: u32, recorded: u32 },
    #[error("m = {m} is not a divisor level of a = {a}")]
    BadLevel { m: u64, a: u64 },
    #[error("r = {r} does not divide 2^{m} + 1")]
    NotADivisorOfLevel { r: BigUint, m: u64 },
    #[error("descent path is empty")]
    EmptyPath,
    #[error("descent path does not start at the witness prime")]
    PathRootMismatch,
    #[error("path element {child} does not divide {parent} - 1")]
    BrokenDescent { parent: BigUint, child: BigUint },
    #[error("path element {0} is not prime")]
    CompositePathElement(BigUint),
    #[error("terminal violation does not replay at {p}")]
    TerminalMismatch { p: BigUint },
    #[error("recorded v2_total {recorded} does not replay from the targets (got {actual})")]
    OvershootMismatch { recorded: u64, actual: u64 },
    #[error("recorded v2_total {v2_total} does not exceed the budget {budget}")]
    NoOvershoot { v2_total: u64, budget: u64 },
    #[error("recorded budget {recorded} is not a + 1 = {expected}")]
    BudgetMismatch { recorded: u64, expected: u64 },
}

const CAP: u32 = 3;

/// Replay a certificate's obstruction from its own data: no factoring, no
/// oracle, just modular arithmetic and the recorded paths.
pub fn verify_certificate(cert: &EliminationCertificate) -> Result<(), CertificateInvalid> {
    match (&cert.filter, &cert.witness) {
        (FilterKind::Unresolved, None) => Ok(()),
        (FilterKind::Unresolved, Some(_)) => Err(CertificateInvalid::UnexpectedWitness),
        (_, None) => Err(CertificateInvalid::MissingWitness(cert.filter)),
        (FilterKind::Z, Some(FilterWitness::Z { q, reason })) => {
            let k = BigUint::from(cert.a) * 2u32;
            if !(&k % q).is_zero() {
                return Err(CertificateInvalid::NotADivisorOf2a { q: q.clone(), k });
            }
            match reason {
                ZReason::ExponentOverflow { v } => {
                    let actual = valuation(&k, q);
                    if actual != *v || *v <= CAP {
                        return Err(CertificateInvalid::ExponentMismatch {
                            q: q.clone(),
                            actual,
                            recorded: *v,
                        });
                    }
                    Ok(())
                }
                ZReason::NonHiggs { descent } => verify_descent(q, descent),
            }
        }
        (FilterKind::N, Some(FilterWitness::N { m, r, descent })) => {
            let a = cert.a;
            if *m == 0 || a % *m != 0 || (a / *m) % 2 == 0 {
                return Err(CertificateInvalid::BadLevel { m: *m, a });
            }
            if !divides_2m_plus_1(*m, r) {
                return Err(CertificateInvalid::NotADivisorOfLevel { r: r.clone(), m: *m });
            }
            verify_descent(r, descent)
        }
        (FilterKind::O, Some(FilterWitness::O { v2_total, budget, targets, .. })) => {
            if *budget != cert.a + 1 {
                return Err(CertificateInvalid::BudgetMismatch {
                    recorded: *budget,
                    expected: cert.a + 1,
                });
            }
            if *v2_total <= *budget {
                return Err(CertificateInvalid::NoOvershoot {
                    v2_total: *v2_total,
                    budget: *budget,
                });
            }
            let replayed: u64 = targets.iter().map(|t| v2_of_pow_plus_1(&t.p, t.e)).sum();
            if replayed != *v2_total {
                return Err(CertificateInvalid::OvershootMismatch {
                    recorded: *v2_total,
                    actual: replayed,
                });
            }
            Ok(())
        }
        _ => Err(CertificateInvalid::FilterMismatch),
    }
}

/// Does r divide 2^m + 1? Checked by modular reduction, never by division
/// of the full power.
fn divides_2m_plus_1(m: u64, r: &BigUint) -> bool {
    if r <= &BigUint::one() {
        return false;
    }
    let base = BigUint::from(2u32);
    let pow = base.modpow(&BigUint::from(m), r);
    (pow + 1u32) % r == BigUint::ZERO
}

fn valuation(n: &BigUint, q: &BigUint) -> u32 {
    let mut rest = n.clone();
    let mut v = 0u32;
    while !rest.is_zero() && (&rest % q).is_zero() {
        rest /= q;
        v += 1;
    }
    v
}

fn verify_descent(root: &BigUint, descent: &DescentWitness) -> Result<(), CertificateInvalid> {
    let path = &descent.path;
    if path.is_empty() {
        return Err(CertificateInvalid::EmptyPath);
    }
    if &path[0] != root {
        return Err(CertificateInvalid::PathRootMismatch);
    }
    for p in path {
        if !is_probable_prime(p) {
            return Err(CertificateInvalid::CompositePathElement(p.clone()));
        }
    }
    for pair in path.windows(2) {
        let pm1 = &pair[0] - 1u32;
        if !(&pm1 % &pair[1]).is_zero() {
            return Err(CertificateInvalid::BrokenDescent {
                parent: pair[0].clone(),
                child: pair[1].clone(),
            });
        }
    }
    let last = path.last().expect("nonempty");
    let pm1 = last - 1u32;
    let ok = match &descent.terminal {
        FailureReason::V2Overflow { v2 } => {
            let actual = pm1.trailing_zeros().unwrap_or(0) as u32;
            actual == *v2 && *v2 > CAP
        }
        FailureReason::VqOverflow { q, v } => {
            is_probable_prime(q) && valuation(&pm1, q) == *v && *v > CAP
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(CertificateInvalid::TerminalMismatch { p: last.clone() })
    }
}

/// The terminal overflow at the end of a descent path: read the failing
/// prime's memoized verdict, whose reason is always a direct cap violation.
pub(crate) fn terminal_reason(
    path: &[BigUint],
    ctx: &FilterContext,
) -> Result<FailureReason, FilterError> {
    let last = path.last().ok_or_else(|| {
        FilterError::Domain("non-Higgs verdict carried an empty witness path".into())
    })?;
    let verdict = is_higgs(last, ctx.oracle, ctx.higgs)?;
    match &verdict.reason {
        Some(r @ FailureReason::V2Overflow { .. }) | Some(r @ FailureReason::VqOverflow { .. }) => {
            Ok(r.clone())
        }
        other => Err(FilterError::Domain(format!(
            "descent path ends at {last} whose verdict reason {other:?} is not a cap violation"
        ))),
    }
}
