//! Budgeted factoring ladder: trial division, then Brent-cycle Pollard rho,
//! then Pollard p-1 stage 1.
//!
//! The ladder is deterministic for a fixed budget: rho walks the polynomial
//! parameter sequence c = 1, 2, 3, ... from the fixed start x = 2, and the
//! iteration budget is shared across all composite pieces of one call. The
//! optional wall timeout is a safety net; leaving it unset (as every test
//! does) keeps results machine-independent.

use super::{is_probable_prime, prime_power_root, ArithError, MAX_EXPONENT};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// Effort limits for one [`local_factor`] call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial-divide by every prime below this bound.
    pub trial_limit: u64,
    /// Total Brent-rho iterations shared by all composite pieces.
    pub rho_iterations: u64,
    /// Pollard p-1 stage-1 smoothness bound (0 disables the stage).
    pub pm1_b1: u64,
    /// Optional wall-clock cutoff for the whole call.
    pub wall_timeout: Option<Duration>,
}

impl FactorBudget {
    /// Enough to completely factor anything the sigma* and order helpers
    /// see: pieces up to ~26 digits with factors up to ~13 digits.
    pub fn generous() -> Self {
        FactorBudget { trial_limit: 1 << 20, rho_iterations: 1 << 24, pm1_b1: 100_000, wall_timeout: None }
    }

    /// Desk-scale default used by the classification pipeline.
    pub fn desk() -> Self {
        FactorBudget { trial_limit: 1 << 17, rho_iterations: 1 << 22, pm1_b1: 50_000, wall_timeout: None }
    }

    /// Deliberately starved budget for tests exercising partial results.
    pub fn tiny() -> Self {
        FactorBudget { trial_limit: 100, rho_iterations: 64, pm1_b1: 0, wall_timeout: None }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.wall_timeout = Some(timeout);
        self
    }
}

/// How much of n the ladder managed to pin down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FactorStatus {
    /// cofactor == 1: the factor map is the complete factorization.
    Complete,
    /// Some prime factors found; the remaining cofactor is composite.
    PartialCompositeCofactor,
    /// No factor found at all; the cofactor is the (composite) input.
    Unknown,
}

/// Result of a factoring attempt. Invariants, also enforced by
/// [`Factorization::check`]: every map key is (probable) prime, exponents are
/// in 1..=64, and n == cofactor * prod p^e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigUint,
    pub factors: BTreeMap<BigUint, u32>,
    pub cofactor: BigUint,
    pub status: FactorStatus,
}

impl Factorization {
    /// Build a validated record for n from a set of known prime divisors.
    /// Exponents are recomputed from n, duplicates are harmless, and a prime
    /// cofactor left at the end is promoted into the map.
    pub fn assemble(
        n: BigUint,
        primes: impl IntoIterator<Item = BigUint>,
    ) -> Result<Self, ArithError> {
        let mut factors: BTreeMap<BigUint, u32> = BTreeMap::new();
        let mut cofactor = n.clone();
        for p in primes {
            if factors.contains_key(&p) || cofactor.is_one() {
                continue;
            }
            let mut e = 0u32;
            while (&cofactor % &p).is_zero() {
                cofactor /= &p;
                e += 1;
                if e > MAX_EXPONENT {
                    return Err(ArithError::ExponentTooLarge { p });
                }
            }
            if e > 0 {
                factors.insert(p, e);
            }
        }
        if !cofactor.is_one() && is_probable_prime(&cofactor) {
            let p = cofactor.clone();
            factors.insert(p, 1);
            cofactor = BigUint::one();
        }
        let status = if cofactor.is_one() {
            FactorStatus::Complete
        } else if factors.is_empty() {
            FactorStatus::Unknown
        } else {
            FactorStatus::PartialCompositeCofactor
        };
        let rec = Factorization { n, factors, cofactor, status };
        rec.check()?;
        Ok(rec)
    }

    pub fn is_complete(&self) -> bool {
        self.status == FactorStatus::Complete
    }

    /// Every prime currently known to divide n, smallest first.
    pub fn known_primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    /// Validate the record invariants.
    pub fn check(&self) -> Result<(), ArithError> {
        let mut prod = self.cofactor.clone();
        for (p, e) in &self.factors {
            if *e == 0 || *e > MAX_EXPONENT {
                return Err(ArithError::ExponentTooLarge { p: p.clone() });
            }
            prod *= p.pow(*e);
        }
        if prod != self.n {
            return Err(ArithError::Domain(format!(
                "factor record for {} does not reconstruct its input",
                self.n
            )));
        }
        match self.status {
            FactorStatus::Complete if !self.cofactor.is_one() => {
                Err(ArithError::Domain("complete record with cofactor > 1".into()))
            }
            FactorStatus::PartialCompositeCofactor | FactorStatus::Unknown
                if self.cofactor.is_one() =>
            {
                Err(ArithError::Domain("partial record with cofactor 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Trait over "something that can factor a natural number under a budget".
/// The Higgs descent and the 2^m+1 oracle both consume this.
pub trait FactorSource: Sync {
    fn factor(&self, n: &BigUint) -> Result<Factorization, ArithError>;
}

/// Plain local ladder with a fixed budget.
#[derive(Debug, Clone)]
pub struct LocalFactoring {
    pub budget: FactorBudget,
}

impl LocalFactoring {
    pub fn new(budget: FactorBudget) -> Self {
        LocalFactoring { budget }
    }
}

impl FactorSource for LocalFactoring {
    fn factor(&self, n: &BigUint) -> Result<Factorization, ArithError> {
        local_factor(n, &self.budget)
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| super::primes_below(1 << 20))
}

/// Factor n as far as the budget allows.
pub fn local_factor(n: &BigUint, budget: &FactorBudget) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Domain("cannot factor 0".into()));
    }
    if n.is_one() {
        return Ok(Factorization {
            n: n.clone(),
            factors: BTreeMap::new(),
            cofactor: BigUint::one(),
            status: FactorStatus::Complete,
        });
    }
    if let Some(small) = n.to_u64() {
        let primes = factor_u64(small).into_iter().map(|(p, _)| BigUint::from(p));
        return Factorization::assemble(n.clone(), primes);
    }

    let deadline = budget.wall_timeout.map(|t| Instant::now() + t);
    let mut discovered: Vec<BigUint> = Vec::new();
    let mut rest = n.clone();

    // Phase 1: trial division.
    let sieve_limit = budget.trial_limit.max(2);
    let extra; // sieve beyond the precomputed table only when asked to
    let table: &[u64] = if sieve_limit <= (1 << 20) {
        small_primes()
    } else {
        extra = super::primes_below(sieve_limit);
        &extra
    };
    for (i, &p) in table.iter().enumerate() {
        if p >= budget.trial_limit {
            break;
        }
        if (&rest % p).is_zero() {
            let bp = BigUint::from(p);
            while (&rest % p).is_zero() {
                rest /= &bp;
            }
            discovered.push(bp);
            if rest.is_one() {
                break;
            }
        }
        if i % 4096 == 4095 && past(deadline) {
            break;
        }
    }

    // Phase 2: split remaining composite pieces with p-1 / rho.
    let mut pending: Vec<BigUint> = Vec::new();
    if !rest.is_one() {
        pending.push(rest);
    }
    let mut rho_left = budget.rho_iterations;
    while let Some(piece) = pending.pop() {
        if piece.is_one() {
            continue;
        }
        if is_probable_prime(&piece) {
            discovered.push(piece);
            continue;
        }
        if let Some((root, _)) = prime_power_root(&piece) {
            discovered.push(root);
            continue;
        }
        if rho_left == 0 || past(deadline) {
            continue; // budget gone: the piece stays in the cofactor
        }
        let mut split: Option<BigUint> = None;
        if budget.pm1_b1 > 1 {
            split = pollard_pm1(&piece, budget.pm1_b1, deadline);
        }
        if split.is_none() {
            let mut c = BigUint::one();
            while rho_left > 0 && !past(deadline) {
                let (found, used) = brent_rho(&piece, &c, rho_left, deadline);
                let exhausted = used >= rho_left;
                rho_left -= used.min(rho_left);
                if let Some(d) = found {
                    split = Some(d);
                    break;
                }
                if exhausted {
                    break;
                }
                c += 1u32; // degenerate cycle for this c; try the next one
            }
        }
        match split {
            Some(d) if !d.is_one() && d != piece => {
                pending.push(&piece / &d);
                pending.push(d);
            }
            _ => {}
        }
    }

    Factorization::assemble(n.clone(), discovered)
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Brent-cycle Pollard rho on x^2 + c from x = 2, with batched gcds.
/// Returns a nontrivial divisor (not necessarily prime) and the iteration
/// count consumed. Expects odd n with no tiny factors.
pub fn brent_rho(
    n: &BigUint,
    c: &BigUint,
    max_iters: u64,
    deadline: Option<Instant>,
) -> (Option<BigUint>, u64) {
    debug_assert!(n.bit(0), "rho expects odd input");
    let step = |x: &BigUint| (x * x + c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut used: u64 = 0;
    let batch = 128u64;
    loop {
        let x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        used += r;
        let mut k = 0u64;
        while k < r {
            let ys = y.clone();
            let lim = batch.min(r - k);
            for _ in 0..lim {
                y = step(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = q * diff % n;
            }
            used += lim;
            k += lim;
            let g = q.gcd(n);
            if g == *n {
                // Overshot: replay this batch one step at a time.
                let mut z = ys;
                loop {
                    z = step(&z);
                    used += 1;
                    let diff = if x > z { &x - &z } else { &z - &x };
                    let g = diff.gcd(n);
                    if g == *n {
                        return (None, used); // cycle degenerate for this c
                    }
                    if !g.is_one() {
                        return (Some(g), used);
                    }
                }
            }
            if !g.is_one() {
                return (Some(g), used);
            }
            if used >= max_iters || past(deadline) {
                return (None, used);
            }
        }
        r *= 2;
    }
}

/// Pollard p-1 stage 1: catches prime divisors p of n with p-1 B1-smooth.
pub fn pollard_pm1(n: &BigUint, b1: u64, deadline: Option<Instant>) -> Option<BigUint> {
    let one = BigUint::one();
    for base in [2u64, 3] {
        let mut a = BigUint::from(base);
        for (i, &p) in small_primes().iter().take_while(|&&p| p <= b1).enumerate() {
            let mut pe = p;
            while pe <= b1 / p {
                pe *= p;
            }
            a = a.modpow(&BigUint::from(pe), n);
            if i % 512 == 511 {
                if a.is_one() {
                    break; // whole group collapsed; retry with the next base
                }
                let g = (&a - &one).gcd(n);
                if g == *n {
                    break;
                }
                if !g.is_one() {
                    return Some(g);
                }
                if past(deadline) {
                    return None;
                }
            }
        }
        if !a.is_one() {
            let g = (&a - &one).gcd(n);
            if !g.is_one() && g != *n {
                return Some(g);
            }
        }
    }
    None
}

/// Complete factorization for machine words, (prime, exponent) ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 needs n >= 1");
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    for p in [2u64, 3, 5] {
        while n % p == 0 {
            n /= p;
            *out.entry(p).or_insert(0) += 1;
        }
    }
    // Wheel over residues coprime to 30.
    const WHEEL: [u64; 8] = [7, 11, 13, 17, 19, 23, 29, 31];
    let mut base = 0u64;
    'trial: while base <= 65_536 {
        for off in WHEEL {
            let d = base + off;
            if d * d > n {
                break 'trial;
            }
            while n % d == 0 {
                n /= d;
                *out.entry(d).or_insert(0) += 1;
            }
        }
        base += 30;
    }
    let mut pending = Vec::new();
    if n > 1 {
        pending.push(n);
    }
    while let Some(m) = pending.pop() {
        if super::is_prime_u64(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = brent_rho_u64(m);
        pending.push(d);
        pending.push(m / d);
    }
    out.into_iter().collect()
}

/// Brent rho for odd u64 composites with no factor below ~65536.
fn brent_rho_u64(n: u64) -> u64 {
    debug_assert!(n > 1 && !super::is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let step = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let found = 'outer: loop {
            let x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r {
                let ys = y;
                let lim = 128.min(r - k);
                for _ in 0..lim {
                    y = step(y);
                    q = super::mulmod_u64(q, x.abs_diff(y), n);
                }
                k += lim;
                let g = num_integer::gcd(q, n);
                if g == n {
                    let mut z = ys;
                    loop {
                        z = step(z);
                        let g = num_integer::gcd(x.abs_diff(z), n);
                        if g == n {
                            break 'outer None;
                        }
                        if g != 1 {
                            break 'outer Some(g);
                        }
                    }
                }
                if g != 1 {
                    break 'outer Some(g);
                }
            }
            r *= 2;
            if r > 1 << 26 {
                break None; // practically unreachable for 64-bit inputs
            }
        };
        if let Some(g) = found {
            return g;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use std::str::FromStr;

    fn big(s: &str) -> BigUint {
        BigUint::from_str(s).unwrap()
    }

    #[test]
    fn factor_u64_reconstructs_and_is_prime() {
        let mut x: u64 = 0x9E3779B97F4A7C15;
        for _ in 0..2000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let n = (x % (1 << 50)).max(1);
            let fac = factor_u64(n);
            let mut prod = 1u64;
            for &(p, e) in &fac {
                assert!(super::super::is_prime_u64(p), "n={n} p={p}");
                prod *= p.pow(e);
            }
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn factor_u64_examples() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(65), vec![(5, 1), (13, 1)]);
        assert_eq!(factor_u64(16385), vec![(5, 1), (29, 1), (113, 1)]);
        assert_eq!(factor_u64(262145), vec![(5, 1), (13, 1), (37, 1), (109, 1)]);
        assert_eq!(factor_u64(1 << 18), vec![(2, 18)]);
        assert_eq!(factor_u64(1000003 * 9999991), vec![(1000003, 1), (9999991, 1)]);
    }

    #[test]
    fn local_factor_examples_from_oracle() {
        let budget = FactorBudget::generous();
        let f65 = local_factor(&big("65"), &budget).unwrap();
        assert!(f65.is_complete());
        assert_eq!(
            f65.factors,
            [(big("5"), 1), (big("13"), 1)].into_iter().collect()
        );
        let f16385 = local_factor(&big("16385"), &budget).unwrap();
        assert_eq!(
            f16385.factors,
            [(big("5"), 1), (big("29"), 1), (big("113"), 1)].into_iter().collect()
        );
    }

    #[test]
    fn local_factor_bignum_semiprime() {
        // Two 15-digit primes: rho territory, far beyond trial division.
        let p = big("100000000000031");
        let q = big("100000000000067");
        let n = &p * &q;
        let fac = local_factor(&n, &FactorBudget::generous()).unwrap();
        assert!(fac.is_complete(), "status {:?}", fac.status);
        assert_eq!(fac.factors, [(p, 1), (q, 1)].into_iter().collect());
    }

    #[test]
    fn local_factor_perfect_power() {
        let p = big("1000000000000000003");
        let n = &p * &p * &p;
        let fac = local_factor(&n, &FactorBudget::generous()).unwrap();
        assert!(fac.is_complete());
        assert_eq!(fac.factors, [(p, 3)].into_iter().collect());
    }

    #[test]
    fn starved_budget_reports_partial_or_unknown() {
        // 500-bit semiprime: hopeless at tiny budget.
        let p = big("57896044618658097711785492504343953926634992332820282019728792003956564819949");
        let q = big("57896044618658097711785492504343953926634992332820282019728792003956564820063");
        let n = &p * &q;
        let fac = local_factor(&n, &FactorBudget::tiny()).unwrap();
        assert_eq!(fac.status, FactorStatus::Unknown);
        assert_eq!(fac.cofactor, n);
        // With a small prime attached the verdict becomes Partial.
        let n2 = &n * 7u32;
        let fac2 = local_factor(&n2, &FactorBudget::tiny()).unwrap();
        assert_eq!(fac2.status, FactorStatus::PartialCompositeCofactor);
        assert_eq!(fac2.factors, [(big("7"), 1)].into_iter().collect());
        assert_eq!(fac2.cofactor, n);
        fac2.check().unwrap();
    }

    #[test]
    fn pm1_finds_smooth_minus_one_prime() {
        // 232792561 - 1 = 2^4 * 3^2 * 5 * 7 * 11 * 13 * 17 * 19 is 19-smooth.
        let p = 232_792_561u64;
        assert!(super::super::is_prime_u64(p));
        let q = big("100000000000000000039");
        let n = BigUint::from(p) * &q;
        let found = pollard_pm1(&n, 100, None);
        assert_eq!(found, Some(BigUint::from(p)));
    }

    #[test]
    fn exponent_cap_is_enforced() {
        let n = BigUint::from(2u32).pow(65);
        let err = local_factor(&n, &FactorBudget::generous());
        assert!(matches!(err, Err(ArithError::ExponentTooLarge { .. })));
        let ok = local_factor(&BigUint::from(2u32).pow(64), &FactorBudget::generous()).unwrap();
        assert_eq!(ok.factors, [(big("2"), 64)].into_iter().collect());
    }

    #[test]
    fn record_check_catches_corruption() {
        let mut rec = local_factor(&big("65"), &FactorBudget::generous()).unwrap();
        rec.cofactor = big("2");
        assert!(rec.check().is_err());
    }

    #[test]
    fn ladder_is_deterministic() {
        let n = big("340282366920938463463374607431768211457") * 977u32; // 2^128 + 1 times a small prime
        let a = local_factor(&n, &FactorBudget::desk()).unwrap();
        let b = local_factor(&n, &FactorBudget::desk()).unwrap();
        assert_eq!(a, b);
    }
}
