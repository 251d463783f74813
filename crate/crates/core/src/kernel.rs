//! Odd dependency graph, debt accounting and source-kernel enumeration.
//!
//! A kernel is a set of odd prime powers `p^e` (the forced odd components
//! of a hypothetical unitary perfect number) whose induced dependency
//! graph is strongly connected: for each member p with chosen exponent e,
//! the odd primes of p^e + 1 are the out-neighbours, and every member must
//! be reachable from every other using members only. Primes supplied by
//! the members but not themselves members carry negative debt and are
//! absorbed as extra components.
//!
//! The enumeration walks a bounded box: member primes up to `max_prime`,
//! exponents up to `max_exp` with `p^e ≤ max_prime_power`, at most
//! `max_scc_size` members. Each surviving kernel is paired with the seed
//! congruence its positive-debt primes force on the exponent a of 2 in
//! the candidate number.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factor_u64, mult_order_of_2_u64, primes_below, v_adic_u64};
use crate::higgs::is_higgs_u64;

/// Bounds of the enumeration box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub max_prime: u64,
    pub max_exp: u32,
    pub max_prime_power: u64,
    pub max_scc_size: usize,
    pub max_cycle_len: usize,
}

impl Default for BoxBounds {
    fn default() -> Self {
        BoxBounds {
            max_prime: 2000,
            max_exp: 6,
            max_prime_power: 1_000_000_000,
            max_scc_size: 6,
            max_cycle_len: 6,
        }
    }
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("prime {p} exceeds the box bound {bound}")]
    OutOfBounds { p: u64, bound: u64 },
    #[error("component {p}^{e} is invalid: {reason}")]
    BadComponent { p: u64, e: u32, reason: String },
    #[error("no residue class satisfies the order constraints: {reason}")]
    InfeasibleConstraints { reason: String },
}

/// A kernel: odd primes with forced exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Kernel {
    pub components: BTreeMap<u64, u32>,
}

impl Kernel {
    /// Build a kernel, checking that all primes are odd primes and all
    /// exponents are at least 1.
    pub fn new(components: impl IntoIterator<Item = (u64, u32)>) -> Result<Self, KernelError> {
        let mut map = BTreeMap::new();
        for (p, e) in components {
            if p < 3 || p % 2 == 0 || !crate::arith::is_prime_u64(p) {
                return Err(KernelError::BadComponent {
                    p,
                    e,
                    reason: "component base must be an odd prime".into(),
                });
            }
            if e == 0 {
                return Err(KernelError::BadComponent { p, e, reason: "exponent must be ≥ 1".into() });
            }
            map.insert(p, e);
        }
        Ok(Kernel { components: map })
    }

    /// Canonical display id, e.g. "3^2·5^3" (bare prime when e = 1).
    pub fn id(&self) -> String {
        self.components
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("\u{b7}")
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.components.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Does every component satisfy the box?
    pub fn within(&self, bounds: &BoxBounds) -> bool {
        self.components.len() <= bounds.max_scc_size
            && self.components.iter().all(|(p, e)| {
                *p <= bounds.max_prime
                    && *e <= bounds.max_exp
                    && p.checked_pow(*e).is_some_and(|pe| pe <= bounds.max_prime_power)
            })
    }
}

/// Needs and debt vectors of a kernel.
///
/// `needs[q]` is the total q-adic valuation the members supply through
/// their p^e + 1 factors (2 included). `debt[q]` = target − needs over odd
/// primes, where the target is the member exponent for members and 0
/// otherwise. Non-member primes with positive needs land in `absorbed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebtState {
    pub needs: BTreeMap<u64, u32>,
    pub debt: BTreeMap<u64, i64>,
    pub absorbed: BTreeSet<u64>,
}

impl DebtState {
    /// Is every member's debt non-negative? (Surplus primes outside the
    /// kernel are absorbed and do not count against consistency.)
    pub fn internally_consistent(&self, kernel: &Kernel) -> bool {
        kernel.components.keys().all(|p| self.debt.get(p).is_none_or(|d| *d >= 0))
    }

    /// Odd primes the seed 2^a + 1 must supply, with their residual
    /// exponents.
    pub fn positive(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.debt.iter().filter(|(_, d)| **d > 0).map(|(q, d)| (*q, *d))
    }
}

/// Dependency edge p → `to`, witnessed at exponent `e`: `to` divides p^e + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepEdge {
    pub to: u64,
    pub e: u32,
}

/// Admissible exponents for p inside the box: 1 ≤ e ≤ max_exp with
/// p^e ≤ max_prime_power.
fn admissible_exponents(p: u64, bounds: &BoxBounds) -> Vec<u32> {
    (1..=bounds.max_exp)
        .filter(|e| p.checked_pow(*e).is_some_and(|pe| pe <= bounds.max_prime_power))
        .collect()
}

/// All odd prime divisors of p^e + 1. Magnitudes stay below
/// max_prime_power + 1, so complete factorization is guaranteed.
fn odd_prime_divisors(p: u64, e: u32) -> Vec<u64> {
    factor_u64(p.pow(e) + 1).into_iter().map(|(q, _)| q).filter(|q| *q > 2).collect()
}

/// Out-edges of the odd prime p across all admissible exponents.
pub fn dependency_edges(p: u64, bounds: &BoxBounds) -> Result<BTreeSet<DepEdge>, KernelError> {
    if p > bounds.max_prime {
        return Err(KernelError::OutOfBounds { p, bound: bounds.max_prime });
    }
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(KernelError::BadComponent { p, e: 0, reason: "vertex must be an odd prime".into() });
    }
    let mut edges = BTreeSet::new();
    for e in admissible_exponents(p, bounds) {
        for q in odd_prime_divisors(p, e) {
            edges.insert(DepEdge { to: q, e });
        }
    }
    Ok(edges)
}

/// Needs, debt and absorbed-surplus report for a kernel.
pub fn compute_debt(kernel: &Kernel) -> DebtState {
    let mut needs: BTreeMap<u64, u32> = BTreeMap::new();
    for (p, e) in &kernel.components {
        let pe1 = p.pow(*e) + 1;
        for (q, v) in factor_u64(pe1) {
            *needs.entry(q).or_insert(0) += v;
        }
    }
    let mut debt: BTreeMap<u64, i64> = BTreeMap::new();
    let mut absorbed = BTreeSet::new();
    for (q, v) in needs.iter().filter(|(q, _)| **q > 2) {
        let target = kernel.components.get(q).copied().unwrap_or(0) as i64;
        let d = target - *v as i64;
        debt.insert(*q, d);
        if d < 0 && !kernel.components.contains_key(q) {
            absorbed.insert(*q);
        }
    }
    // Members whose p^e + 1 factors never mention them still owe their
    // full exponent to the seed.
    for (p, e) in &kernel.components {
        debt.entry(*p).or_insert(*e as i64);
    }
    DebtState { needs, debt, absorbed }
}

/// One order constraint: q | 2^a + 1 forces a ≡ ord/2 (mod ord).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderConstraint {
    pub q: u64,
    pub ord: u64,
    pub residue: u64,
}

/// A residue class of seed exponents, with the per-prime constraints that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCongruence {
    pub residue: u64,
    pub modulus: u64,
    pub constraints: Vec<OrderConstraint>,
}

impl SeedCongruence {
    /// The trivial class admitting every a.
    pub fn trivial() -> Self {
        SeedCongruence { residue: 0, modulus: 1, constraints: vec![] }
    }

    pub fn admits(&self, a: u64) -> bool {
        a % self.modulus == self.residue
    }

    /// Verification hook: does every a ≡ residue (mod modulus) satisfy
    /// every stored order constraint? True exactly when each constraint
    /// modulus divides `modulus` and the residues agree. Used to check
    /// externally supplied classes (which may be strictly finer than the
    /// derived one) without re-deriving them.
    pub fn verify_class(&self, residue: u64, modulus: u64) -> bool {
        modulus > 0
            && residue < modulus
            && self
                .constraints
                .iter()
                .all(|c| modulus % c.ord == 0 && residue % c.ord == c.residue)
    }

    /// All a in [a_min, a_max] belonging to the class, ascending.
    pub fn candidates_in(&self, a_min: u64, a_max: u64) -> Vec<u64> {
        if a_max < a_min {
            return vec![];
        }
        let mut first = if self.residue >= a_min {
            self.residue
        } else {
            let k = (a_min - self.residue).div_ceil(self.modulus);
            self.residue + k * self.modulus
        };
        // a = 0 is not a seed exponent.
        if first == 0 {
            first += self.modulus;
        }
        (first..=a_max).step_by(self.modulus as usize).collect()
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Merge a ≡ r1 (mod m1) with a ≡ r2 (mod m2); None when incompatible.
fn crt_merge(r1: u128, m1: u128, r2: u128, m2: u128) -> Option<(u128, u128)> {
    let (g, s, _) = ext_gcd(m1 as i128, m2 as i128);
    let g = g as u128;
    let diff = r2 as i128 - r1 as i128;
    if diff.rem_euclid(g as i128) != 0 {
        return None;
    }
    let lcm = m1 / g * m2;
    let step = diff / g as i128 % (m2 / g) as i128 * s % (m2 / g) as i128;
    let add = (step.rem_euclid((m2 / g) as i128)) as u128 * m1;
    Some(((r1 + add) % lcm, lcm))
}

/// Derive the seed congruence forced by a kernel's positive-debt primes.
///
/// Each debt-positive q must divide 2^a + 1, which happens exactly when a
/// is an odd multiple of ord_q(2)/2; a prime with odd order can never
/// divide 2^a + 1 and makes the kernel infeasible.
pub fn derive_seed_constraints(kernel: &Kernel) -> Result<SeedCongruence, KernelError> {
    let debt = compute_debt(kernel);
    let mut constraints = vec![];
    for (q, _) in debt.positive() {
        let ord = mult_order_of_2_u64(q);
        if ord % 2 != 0 {
            return Err(KernelError::InfeasibleConstraints {
                reason: format!("ord_{q}(2) = {ord} is odd, so {q} never divides 2^a + 1"),
            });
        }
        constraints.push(OrderConstraint { q, ord, residue: ord / 2 });
    }
    let mut residue: u128 = 0;
    let mut modulus: u128 = 1;
    for c in &constraints {
        match crt_merge(residue, modulus, c.residue as u128, c.ord as u128) {
            Some((r, m)) => {
                if m > u64::MAX as u128 {
                    return Err(KernelError::InfeasibleConstraints {
                        reason: format!("combined modulus {m} overflows u64"),
                    });
                }
                residue = r;
                modulus = m;
            }
            None => {
                return Err(KernelError::InfeasibleConstraints {
                    reason: format!(
                        "a ≡ {} (mod {}) conflicts with a ≡ {} (mod {})",
                        c.residue, c.ord, residue, modulus
                    ),
                });
            }
        }
    }
    Ok(SeedCongruence { residue: residue as u64, modulus: modulus as u64, constraints })
}

/// A kernel surviving the enumeration, with its books.
#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedKernel {
    pub kernel: Kernel,
    pub debt: DebtState,
    pub seed: SeedCongruence,
}

impl EnumeratedKernel {
    pub fn id(&self) -> String {
        self.kernel.id()
    }
}

/// The five impostor kernels with their published seed classes
/// (residue, modulus). The classes may be strictly finer than the pure
/// order constraints; `verify_class` confirms they refine them.
pub fn impostor_kernels() -> Vec<(Kernel, u64, u64)> {
    [
        (vec![(3, 2), (5, 3)], 10, 20),
        (vec![(3, 4), (41, 1)], 9, 18),
        (vec![(5, 2), (13, 2)], 6, 12),
        (vec![(5, 4), (157, 2), (313, 1)], 130, 260),
        (vec![(5, 4), (29, 1), (157, 2), (313, 1)], 26, 52),
    ]
    .into_iter()
    .map(|(comps, r, m)| (Kernel::new(comps).expect("table kernels are valid"), r, m))
    .collect()
}

/// The two known kernels realized by existing unitary perfect numbers.
pub fn known_kernels() -> Vec<Kernel> {
    vec![
        Kernel::new([(3, 2)]).expect("valid"),
        Kernel::new([(5, 4)]).expect("valid"),
    ]
}

/// Is the induced digraph on `members` strongly connected when each
/// member p points at the odd primes of p^e(p) + 1? Bitmask reachability;
/// member count is at most max_scc_size.
fn strongly_connected(members: &BTreeMap<u64, u32>, outs: &HashMap<(u64, u32), Vec<u64>>) -> bool {
    let verts: Vec<u64> = members.keys().copied().collect();
    let n = verts.len();
    if n <= 1 {
        return true;
    }
    let index: HashMap<u64, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut reach: Vec<u32> = vec![0; n];
    for (i, v) in verts.iter().enumerate() {
        reach[i] = 1 << i;
        for q in &outs[&(*v, members[v])] {
            if let Some(&j) = index.get(q) {
                reach[i] |= 1 << j;
            }
        }
    }
    // Transitive closure over ≤ 6 vertices.
    for _ in 0..n {
        for i in 0..n {
            let mut acc = reach[i];
            for j in 0..n {
                if reach[i] >> j & 1 == 1 {
                    acc |= reach[j];
                }
            }
            reach[i] = acc;
        }
    }
    let full = (1u32 << n) - 1;
    reach.iter().all(|r| *r == full)
}

struct Enumerator<'b> {
    bounds: &'b BoxBounds,
    outs: HashMap<(u64, u32), Vec<u64>>,
    higgs: HashMap<u64, bool>,
    found: BTreeMap<String, EnumeratedKernel>,
}

impl<'b> Enumerator<'b> {
    fn out_primes(&mut self, p: u64, e: u32) -> Vec<u64> {
        self.outs.entry((p, e)).or_insert_with(|| odd_prime_divisors(p, e)).clone()
    }

    fn is_higgs(&mut self, p: u64) -> bool {
        *self.higgs.entry(p).or_insert_with(|| is_higgs_u64(p))
    }

    /// Needs among members must not already exceed their exponents; needs
    /// are monotone in the member set, so a violation prunes the branch.
    fn members_consistent(&mut self, members: &BTreeMap<u64, u32>) -> bool {
        let mut needs: BTreeMap<u64, u32> = BTreeMap::new();
        for (p, e) in members {
            for q in self.out_primes(*p, *e) {
                // valuation, not just divisibility
                let v = v_adic_u64(q, p.pow(*e) + 1);
                *needs.entry(q).or_insert(0) += v;
            }
        }
        members.iter().all(|(p, e)| needs.get(p).copied().unwrap_or(0) <= *e)
    }

    fn consider(&mut self, members: &BTreeMap<u64, u32>) {
        if !strongly_connected(members, &self.outs) {
            return;
        }
        // Graham: a new unitary perfect number needs a nonsquarefree odd
        // component, so purely squarefree kernels are dropped.
        if members.values().all(|e| *e == 1) {
            return;
        }
        let kernel = Kernel { components: members.clone() };
        let debt = compute_debt(&kernel);
        if !debt.internally_consistent(&kernel) {
            return;
        }
        let Ok(seed) = derive_seed_constraints(&kernel) else { return };
        let id = kernel.id();
        self.found.entry(id).or_insert(EnumeratedKernel { kernel, debt, seed });
    }

    fn grow(&mut self, members: &mut BTreeMap<u64, u32>, p0: u64) {
        self.consider(members);
        if members.len() >= self.bounds.max_scc_size {
            return;
        }
        // Candidate new members: out-neighbours of the current assignment,
        // above the canonical minimum, inside the box, 3-Higgs.
        let mut frontier = BTreeSet::new();
        let snapshot: Vec<(u64, u32)> = members.iter().map(|(p, e)| (*p, *e)).collect();
        for (p, e) in snapshot {
            for q in self.out_primes(p, e) {
                if q > p0 && q <= self.bounds.max_prime && !members.contains_key(&q) {
                    frontier.insert(q);
                }
            }
        }
        for q in frontier {
            if !self.is_higgs(q) {
                continue;
            }
            for e in admissible_exponents(q, self.bounds) {
                members.insert(q, e);
                if self.members_consistent(members) {
                    self.grow(members, p0);
                }
                members.remove(&q);
            }
        }
    }
}

/// Enumerate kernels inside the box: strongly connected under the chosen
/// exponents, all members 3-Higgs, internally consistent (non-member
/// surplus absorbed), nonsquarefree, and with a feasible seed congruence.
/// Output is ordered by canonical id.
pub fn enumerate_source_kernels(bounds: &BoxBounds) -> Vec<EnumeratedKernel> {
    let mut en = Enumerator {
        bounds,
        outs: HashMap::new(),
        higgs: HashMap::new(),
        found: BTreeMap::new(),
    };
    for p0 in primes_below(bounds.max_prime + 1) {
        if p0 < 3 || !en.is_higgs(p0) {
            continue;
        }
        for e in admissible_exponents(p0, bounds) {
            let mut members = BTreeMap::from([(p0, e)]);
            if en.members_consistent(&members) {
                en.grow(&mut members, p0);
            }
        }
    }
    en.found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(parts: &[(u64, u32)]) -> Kernel {
        Kernel::new(parts.iter().copied()).unwrap()
    }

    #[test]
    fn edges_from_3_include_5_at_e2() {
        let edges = dependency_edges(3, &BoxBounds::default()).unwrap();
        assert!(edges.contains(&DepEdge { to: 5, e: 2 }));
    }

    #[test]
    fn edges_from_5_include_3_and_7_at_e3() {
        // 5^3 + 1 = 126 = 2 · 3^2 · 7
        let edges = dependency_edges(5, &BoxBounds::default()).unwrap();
        assert!(edges.contains(&DepEdge { to: 3, e: 3 }));
        assert!(edges.contains(&DepEdge { to: 7, e: 3 }));
    }

    #[test]
    fn edges_from_13_include_5_and_17_at_e2() {
        // 13^2 + 1 = 170 = 2 · 5 · 17
        let edges = dependency_edges(13, &BoxBounds::default()).unwrap();
        assert!(edges.contains(&DepEdge { to: 5, e: 2 }));
        assert!(edges.contains(&DepEdge { to: 17, e: 2 }));
    }

    #[test]
    fn edges_are_stable() {
        let b = BoxBounds::default();
        assert_eq!(dependency_edges(41, &b).unwrap(), dependency_edges(41, &b).unwrap());
    }

    #[test]
    fn edges_reject_out_of_box() {
        assert!(matches!(
            dependency_edges(2003, &BoxBounds::default()),
            Err(KernelError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn debt_of_first_impostor_row() {
        // 3^2+1 = 10 = 2·5 and 5^3+1 = 126 = 2·3^2·7
        let d = compute_debt(&kernel(&[(3, 2), (5, 3)]));
        assert_eq!(d.needs[&3], 2);
        assert_eq!(d.needs[&5], 1);
        assert_eq!(d.needs[&7], 1);
        assert_eq!(d.needs[&2], 2);
        assert_eq!(d.debt[&3], 0);
        assert_eq!(d.debt[&5], 2);
        assert_eq!(d.debt[&7], -1);
        assert_eq!(d.absorbed, BTreeSet::from([7]));
    }

    #[test]
    fn debt_of_empty_kernel_is_zero() {
        let d = compute_debt(&Kernel { components: BTreeMap::new() });
        assert!(d.needs.is_empty());
        assert!(d.debt.is_empty());
        assert!(d.absorbed.is_empty());
    }

    #[test]
    fn debt_of_5_13_kernel() {
        // 26 = 2·13, 170 = 2·5·17
        let d = compute_debt(&kernel(&[(5, 2), (13, 2)]));
        assert_eq!(d.needs[&13], 1);
        assert_eq!(d.needs[&5], 1);
        assert_eq!(d.needs[&17], 1);
        assert_eq!(d.needs[&2], 2);
        assert_eq!(d.debt[&5], 1);
        assert_eq!(d.debt[&13], 1);
        assert_eq!(d.debt[&17], -1);
        assert_eq!(d.absorbed, BTreeSet::from([17]));
    }

    #[test]
    fn debt_is_permutation_invariant() {
        let a = Kernel::new([(5, 4), (157, 2), (313, 1)]).unwrap();
        let b = Kernel::new([(313, 1), (5, 4), (157, 2)]).unwrap();
        assert_eq!(compute_debt(&a), compute_debt(&b));
    }

    #[test]
    fn seed_constraints_for_5_13() {
        let s = derive_seed_constraints(&kernel(&[(5, 2), (13, 2)])).unwrap();
        assert_eq!((s.residue, s.modulus), (6, 12));
        assert!(s.constraints.iter().any(|c| c.q == 13 && c.ord == 12 && c.residue == 6));
    }

    #[test]
    fn seed_constraints_for_3_5() {
        let s = derive_seed_constraints(&kernel(&[(3, 2), (5, 3)])).unwrap();
        assert_eq!((s.residue, s.modulus), (2, 4));
    }

    #[test]
    fn seed_constraints_for_empty_kernel_are_trivial() {
        let s = derive_seed_constraints(&Kernel { components: BTreeMap::new() }).unwrap();
        assert_eq!((s.residue, s.modulus), (0, 1));
        assert!(s.constraints.is_empty());
    }

    #[test]
    fn table_classes_verify_against_derived_constraints() {
        for (k, r, m) in impostor_kernels() {
            let s = derive_seed_constraints(&k).unwrap();
            assert!(s.verify_class(r, m), "kernel {} table class {r} mod {m}", k.id());
            // and a shifted class must fail
            assert!(!s.verify_class((r + 1) % m, m), "kernel {}", k.id());
        }
    }

    #[test]
    fn kernel_ids_match_table() {
        let ids: Vec<String> = impostor_kernels().iter().map(|(k, _, _)| k.id()).collect();
        assert_eq!(
            ids,
            vec!["3^2·5^3", "3^4·41", "5^2·13^2", "5^4·157^2·313", "5^4·29·157^2·313"]
        );
    }

    #[test]
    fn candidate_counts_follow_the_formula() {
        // class a ≡ 10 (mod 20) below 10^4: 500 candidates
        let s = SeedCongruence { residue: 10, modulus: 20, constraints: vec![] };
        assert_eq!(s.candidates_in(1, 10_000).len(), 500);
        assert_eq!(s.candidates_in(1, 10_000).first(), Some(&10));
        // residue 0 classes skip a = 0
        let t = SeedCongruence { residue: 0, modulus: 7, constraints: vec![] };
        assert_eq!(t.candidates_in(1, 21), vec![7, 14, 21]);
        for (s, a_max, want) in [
            (SeedCongruence { residue: 9, modulus: 18, constraints: vec![] }, 10_000u64, 556usize),
            (SeedCongruence { residue: 6, modulus: 12, constraints: vec![] }, 10_000, 833),
            (SeedCongruence { residue: 130, modulus: 260, constraints: vec![] }, 10_000, 38),
            (SeedCongruence { residue: 26, modulus: 52, constraints: vec![] }, 10_000, 192),
        ] {
            assert_eq!(s.candidates_in(1, a_max).len(), want);
        }
    }

    #[test]
    fn enumeration_contains_the_seven_table_kernels() {
        let found = enumerate_source_kernels(&BoxBounds::default());
        let ids: BTreeSet<String> = found.iter().map(|k| k.id()).collect();
        for k in known_kernels() {
            assert!(ids.contains(&k.id()), "missing known kernel {}", k.id());
        }
        for (k, r, m) in impostor_kernels() {
            assert!(ids.contains(&k.id()), "missing impostor {}", k.id());
            let hit = found.iter().find(|e| e.id() == k.id()).unwrap();
            assert!(hit.seed.verify_class(r, m));
        }
    }

    #[test]
    fn enumeration_respects_small_boxes() {
        let noexp = BoxBounds { max_exp: 1, ..BoxBounds::default() };
        for k in enumerate_source_kernels(&noexp) {
            assert!(k.kernel.components.values().all(|e| *e == 1));
        }
        let tiny = BoxBounds { max_prime: 7, ..BoxBounds::default() };
        for k in enumerate_source_kernels(&tiny) {
            for banned in [13u64, 41, 157, 313] {
                assert!(!k.kernel.components.contains_key(&banned));
            }
        }
    }

    #[test]
    fn enumerated_kernels_sit_inside_the_box() {
        let b = BoxBounds::default();
        for k in enumerate_source_kernels(&b) {
            assert!(k.kernel.within(&b), "kernel {} escapes the box", k.id());
            assert!(k.debt.internally_consistent(&k.kernel));
        }
    }

    #[test]
    fn kernel_rejects_bad_components() {
        assert!(Kernel::new([(4, 2)]).is_err());
        assert!(Kernel::new([(2, 1)]).is_err());
        assert!(Kernel::new([(9, 1)]).is_err());
        assert!(Kernel::new([(5, 0)]).is_err());
    }

    #[test]
    fn crt_merge_handles_conflict_and_agreement() {
        assert_eq!(crt_merge(2, 4, 6, 12), Some((6, 12)));
        assert_eq!(crt_merge(1, 2, 2, 4), None);
        assert_eq!(crt_merge(0, 1, 9, 18), Some((9, 18)));
    }
}
