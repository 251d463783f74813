//! Primality testing: deterministic Miller-Rabin below 2^64, BPSW above.
//!
//! BPSW (base-2 strong probable prime + strong Lucas with Selfridge
//! parameters) has no known counterexample; callers treat a passing bignum
//! as prime and record that the verdict is probabilistic.

use super::{mulmod_u64, powmod_u64};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Witness set proving primality for every n < 3.3 * 10^24, so for all u64.
const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'base: for &a in MR_BASES_U64.iter() {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Primality test used everywhere a bignum must be classified:
/// deterministic below 2^64, BPSW above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    // Cheap trial division before the heavy tests.
    for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67] {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !n.bit(0) {
        return false;
    }
    miller_rabin_base(n, &BigUint::from(2u32)) && strong_lucas_prp(n)
}

/// One strong-probable-prime round to the given base.
fn miller_rabin_base(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n odd > 2");
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    debug_assert!(n.bit(0), "jacobi needs odd n");
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int);
    let mut n = n_int;
    let mut t = 1i32;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n_mod_8 = (&n % 8u32).to_u8().unwrap();
            if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u8().unwrap() == 3 && (&n % 4u32).to_u8().unwrap() == 3 {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = num_integer::Roots::sqrt(n);
    &r * &r == *n
}

/// Strong Lucas probable prime test with Selfridge's Method A parameters.
fn strong_lucas_prp(n: &BigUint) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    // Method A: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d: i64 = 5;
    loop {
        match jacobi(&BigInt::from(d), n) {
            -1 => break,
            0 => return false, // shares a factor with n (n > |d| here since n > 2^64)
            _ => {
                d = if d > 0 { -(d + 2) } else { -(d - 2) };
            }
        }
    }
    let q_param: i64 = (1 - d) / 4; // P = 1
    let n_int = BigInt::from(n.clone());
    let d_int = BigInt::from(d);
    let q_int = BigInt::from(q_param).mod_floor(&n_int);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().expect("n odd");
    let dd = &n_plus_1 >> s; // n + 1 = dd * 2^s, dd odd

    // Compute U_dd, V_dd, Q^dd by the binary chain over dd's bits.
    let mut u = BigInt::one();
    let mut v = BigInt::one(); // P = 1
    let mut qk = q_int.clone();
    let two = BigInt::from(2);
    let halve = |x: &BigInt| -> BigInt {
        // x is already reduced mod n; divide by 2 in Z/n (n odd).
        if x.is_even() {
            x >> 1
        } else {
            (x + &n_int) >> 1
        }
    };
    let bits = dd.bits();
    for i in (0..bits - 1).rev() {
        // double: k -> 2k
        let u2 = (&u * &v).mod_floor(&n_int);
        let v2 = (&v * &v - &two * &qk).mod_floor(&n_int);
        let q2 = (&qk * &qk).mod_floor(&n_int);
        u = u2;
        v = v2;
        qk = q2;
        if dd.bit(i) {
            // increment: 2k -> 2k + 1 (P = 1)
            let u_next = halve(&(&u + &v).mod_floor(&n_int));
            let v_next = halve(&(&d_int * &u + &v).mod_floor(&n_int));
            u = u_next;
            v = v_next;
            qk = (&qk * &q_int).mod_floor(&n_int);
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    // Check V_{dd * 2^r} for r = 1 .. s-1.
    for _ in 1..s {
        v = (&v * &v - &two * &qk).mod_floor(&n_int);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&n_int);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_below;
    use num_bigint::BigUint;
    use std::str::FromStr;

    #[test]
    fn u64_primality_matches_sieve() {
        let primes: std::collections::HashSet<u64> = primes_below(100_000).into_iter().collect();
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), primes.contains(&n), "n={n}");
        }
    }

    #[test]
    fn known_strong_pseudoprimes_rejected() {
        // Strong pseudoprimes to base 2 and Carmichael numbers.
        for n in [2047u64, 3277, 4033, 4681, 8321, 15841, 29341, 42799, 49141, 52633, 561, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_prime_u64(n), "n={n} wrongly accepted");
        }
    }

    #[test]
    fn large_mersenne_and_fermat_values() {
        let m127 = (BigUint::one() << 127u32) - 1u32; // Mersenne prime
        assert!(is_probable_prime(&m127));
        let f7 = (BigUint::one() << 128u32) + 1u32; // F_7 is composite
        assert!(!is_probable_prime(&f7));
        let m128 = (BigUint::one() << 128u32) - 1u32;
        assert!(!is_probable_prime(&m128));
    }

    #[test]
    fn hundred_digit_prime_accepted() {
        // 10^99 + 289 is the smallest prime above 10^99 per standard tables.
        let p = BigUint::from_str(&format!("1{}", "0".repeat(99))).unwrap() + 289u32;
        assert!(is_probable_prime(&p));
        assert!(!is_probable_prime(&(p + 2u32)));
    }

    #[test]
    fn bigint_path_agrees_with_u64_path_near_word_boundary() {
        let base = u64::MAX - 600;
        for n in base..=u64::MAX - 560 {
            assert_eq!(
                is_probable_prime(&BigUint::from(n)),
                is_prime_u64(n),
                "n={n}"
            );
        }
    }

    #[test]
    fn lucas_step_squares_rejected() {
        let n = BigUint::from_str("170141183460469231731687303715884105727").unwrap(); // prime
        let sq = &n * &n;
        assert!(!is_probable_prime(&sq));
    }

    #[test]
    fn jacobi_agrees_with_euler_criterion() {
        for &p in primes_below(200).iter().skip(1) {
            for a in 1..p {
                let euler = powmod_u64(a, (p - 1) / 2, p);
                let expect = if euler == 1 { 1 } else { -1 };
                assert_eq!(
                    jacobi(&BigInt::from(a), &BigUint::from(p)),
                    expect,
                    "a={a} p={p}"
                );
            }
        }
        assert_eq!(jacobi(&BigInt::from(15), &BigUint::from(45u32)), 0);
    }
}
