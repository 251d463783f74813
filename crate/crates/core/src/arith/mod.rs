//! Big-integer arithmetic primitives shared by every other module.
//!
//! Everything here is deterministic: the factoring ladder walks a fixed
//! parameter sequence, so two runs with the same budget report the same
//! factors in the same order.

mod factor;
mod primality;

pub use factor::{
    brent_rho, factor_u64, local_factor, pollard_pm1, FactorBudget, FactorSource, FactorStatus,
    Factorization, LocalFactoring,
};
pub use primality::{is_prime_u64, is_probable_prime};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Hard cap on exponents stored in a [`Factorization`]; larger is an error.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum ArithError {
    #[error("factorization of {n} incomplete under the given budget")]
    FactoringIncomplete { n: BigUint },
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("exponent of {p} exceeds the record cap of {MAX_EXPONENT}")]
    ExponentTooLarge { p: BigUint },
    #[error("argument outside supported domain: {0}")]
    Domain(String),
}

/// Simple bit-packed sieve of Eratosthenes; fine up to a few times 10^8.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit <= 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for p in 2..n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q < n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// q-adic valuation v_q(n): the exponent of q in n. Precondition: q >= 2, n >= 1.
pub fn v_adic(q: &BigUint, n: &BigUint) -> u32 {
    assert!(q >= &BigUint::from(2u32), "v_adic needs q >= 2");
    assert!(!n.is_zero(), "v_adic needs n >= 1");
    let mut v = 0u32;
    let mut rest = n.clone();
    loop {
        let (quot, rem) = num_integer::Integer::div_rem(&rest, q);
        if !rem.is_zero() {
            return v;
        }
        rest = quot;
        v += 1;
    }
}

/// u64 fast path of [`v_adic`].
pub fn v_adic_u64(q: u64, mut n: u64) -> u32 {
    assert!(q >= 2 && n >= 1);
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

/// Multiplicative order of 2 modulo an odd prime or odd prime power q.
///
/// Fails with [`ArithError::NotPrime`] when q is neither, and with
/// [`ArithError::FactoringIncomplete`] when the group order cannot be fully
/// factored under a generous internal budget (cannot happen for q < 2^64).
pub fn mult_order_of_2(q: &BigUint) -> Result<BigUint, ArithError> {
    let two = BigUint::from(2u32);
    if q.bit(0) == false || q < &BigUint::from(3u32) {
        return Err(ArithError::Domain(format!("order of 2 needs odd q >= 3, got {q}")));
    }
    // Group order: q - 1 for prime q, p^(k-1) * (p - 1) for q = p^k.
    let group_order = if is_probable_prime(q) {
        q - 1u32
    } else {
        match prime_power_root(q) {
            Some((p, k)) => p.pow(k - 1) * (&p - 1u32),
            None => return Err(ArithError::NotPrime(q.clone())),
        }
    };
    let fac = local_factor(&group_order, &FactorBudget::generous())?;
    if !fac.is_complete() {
        return Err(ArithError::FactoringIncomplete { n: group_order });
    }
    let mut ord = group_order.clone();
    for p in fac.factors.keys() {
        while (&ord % p).is_zero() && two.modpow(&(&ord / p), q).is_one() {
            ord = &ord / p;
        }
    }
    Ok(ord)
}

/// u64 fast path of [`mult_order_of_2`] for odd prime q.
pub fn mult_order_of_2_u64(q: u64) -> u64 {
    debug_assert!(q >= 3 && q % 2 == 1 && is_prime_u64(q));
    let mut ord = q - 1;
    for (p, _) in factor_u64(q - 1) {
        while ord % p == 0 && powmod_u64(2, ord / p, q) == 1 {
            ord /= p;
        }
    }
    ord
}

/// If n = p^k for a prime p and k >= 2, return (p, k).
pub fn prime_power_root(n: &BigUint) -> Option<(BigUint, u32)> {
    let max_k = n.bits() as u32; // p >= 2 so k <= log2(n)
    for k in (2..=max_k).rev() {
        let root = num_integer::Roots::nth_root(n, k);
        if &root.pow(k) == n && is_probable_prime(&root) {
            return Some((root, k));
        }
    }
    None
}

/// x^e mod m over u64 operands.
pub fn powmod_u64(mut x: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    x %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, x, m);
        }
        x = mulmod_u64(x, x, m);
        e >>= 1;
    }
    acc
}

#[inline]
pub fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Sum of unitary divisors sigma*(n) = prod over p^e || n of (p^e + 1).
///
/// Requires a complete factorization of n; errors when the budget cannot
/// deliver one.
pub fn unitary_sigma(n: &BigUint, budget: &FactorBudget) -> Result<BigUint, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Domain("unitary_sigma needs n >= 1".into()));
    }
    if n.is_one() {
        return Ok(BigUint::one());
    }
    let fac = local_factor(n, budget)?;
    if !fac.is_complete() {
        return Err(ArithError::FactoringIncomplete { n: n.clone() });
    }
    let mut sigma = BigUint::one();
    for (p, e) in &fac.factors {
        sigma *= p.pow(*e) + 1u32;
    }
    Ok(sigma)
}

/// sigma*(n) == 2n, i.e. n is unitary perfect.
pub fn is_unitary_perfect(n: &BigUint, budget: &FactorBudget) -> Result<bool, ArithError> {
    Ok(unitary_sigma(n, budget)? == n * 2u32)
}

/// sigma* for a machine-word n whose complete factorization is cheap.
pub fn unitary_sigma_u64(n: u64) -> u128 {
    assert!(n >= 1);
    let mut sigma: u128 = 1;
    for (p, e) in factor_u64(n) {
        sigma *= (p as u128).pow(e) + 1;
    }
    sigma
}

/// Complete factorization as a map, for inputs known to fit in u64.
pub fn factor_u64_map(n: u64) -> BTreeMap<u64, u32> {
    factor_u64(n).into_iter().collect()
}

/// Convenience: BigUint -> u64 when it fits.
pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
