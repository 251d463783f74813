//! Aurifeuillean pre-splitting of `2^{2p} + 1` for odd primes `p`.
//!
//! The classical identity
//!
//! ```text
//! 2^{2p} + 1 = (2^p - 2^{(p+1)/2} + 1) * (2^p + 2^{(p+1)/2} + 1) = L_p * M_p
//! ```
//!
//! cuts the number into two halves of roughly half the bit length. Both
//! halves are quartics in a power of two, which is what makes them natural
//! SNFS targets downstream; here we only need the split itself. The two
//! residue classes of `p` mod 4 give two parameterizations, both of which
//! reduce to the displayed identity; we compute via the branch forms and
//! verify the product identity before returning anything.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::arith::is_prime_u64;

/// Which residue class of `p` mod 4 parameterized the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AurifeuilleanBranch {
    /// `p = 4u + 1`: with `X = 2^u`, `L = 2X^4 - 2X^2 + 1`, `M = 2X^4 + 2X^2 + 1`.
    OneMod4,
    /// `p = 4u + 3`: with `X = 2^u`, `L = 8X^4 - 4X^2 + 1`, `M = 8X^4 + 4X^2 + 1`.
    ThreeMod4,
}

/// The two halves of `2^{2p} + 1 = L * M`, with `1 < L < M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AurifeuilleanSplit {
    pub p: u64,
    #[serde(with = "crate::ser::biguint")]
    pub l: BigUint,
    #[serde(with = "crate::ser::biguint")]
    pub m: BigUint,
    pub branch: AurifeuilleanBranch,
}

/// Split `2^{2p} + 1` into its Aurifeuillean halves.
///
/// `p` must be an odd prime. The product identity `L * M = 2^{2p} + 1` is
/// checked before returning; a failure would indicate a bug, not bad input,
/// and is reported as an internal error rather than panicking.
pub fn aurifeuillean_split(p: u64) -> Result<AurifeuilleanSplit, OracleError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(OracleError::Domain(format!(
            "aurifeuillean_split requires an odd prime, got {p}"
        )));
    }
    let (branch, l, m) = if p % 4 == 1 {
        let u = (p - 1) / 4;
        // 2X^4 = 2^{4u+1} = 2^p, 2X^2 = 2^{2u+1} = 2^{(p+1)/2}.
        let two_x4 = BigUint::one() << (4 * u + 1);
        let two_x2 = BigUint::one() << (2 * u + 1);
        (
            AurifeuilleanBranch::OneMod4,
            &two_x4 - &two_x2 + BigUint::one(),
            &two_x4 + &two_x2 + BigUint::one(),
        )
    } else {
        let u = (p - 3) / 4;
        // 8X^4 = 2^{4u+3} = 2^p, 4X^2 = 2^{2u+2} = 2^{(p+1)/2}.
        let eight_x4 = BigUint::one() << (4 * u + 3);
        let four_x2 = BigUint::one() << (2 * u + 2);
        (
            AurifeuilleanBranch::ThreeMod4,
            &eight_x4 - &four_x2 + BigUint::one(),
            &eight_x4 + &four_x2 + BigUint::one(),
        )
    };
    let product = &l * &m;
    let expected = (BigUint::one() << (2 * p)) + BigUint::one();
    if product != expected {
        return Err(OracleError::Internal(format!(
            "aurifeuillean product identity failed for p={p}"
        )));
    }
    debug_assert!(l > BigUint::one() && l < m);
    Ok(AurifeuilleanSplit { p, l, m, branch })
}

/// Halves of `2^{2n} + 1` for any odd `n >= 1`, prime or not.
///
/// The identity only needs `(n+1)/2` to be an integer:
///
/// ```text
/// (2^n - 2^{(n+1)/2} + 1)(2^n + 2^{(n+1)/2} + 1)
///   = (2^n + 1)^2 - 2^{n+1} = 2^{2n} + 1
/// ```
///
/// The public [`aurifeuillean_split`] keeps its odd-prime contract (the
/// branch forms are stated for primes); internally the factoring pipeline
/// wants the halves for composite odd `n` too, where each half decomposes
/// further across the divisors of `n` but is still the right ~n-bit target
/// once inherited factors are stripped.
pub(crate) fn aurifeuillean_halves(n: u64) -> Result<(BigUint, BigUint), OracleError> {
    if n % 2 == 0 {
        return Err(OracleError::Domain(format!(
            "aurifeuillean_halves requires odd n, got {n}"
        )));
    }
    let pow_n = BigUint::one() << n;
    let pow_mid = BigUint::one() << ((n + 1) / 2);
    let l = &pow_n - &pow_mid + BigUint::one();
    let m = &pow_n + &pow_mid + BigUint::one();
    let product = &l * &m;
    let expected = (BigUint::one() << (2 * n)) + BigUint::one();
    if product != expected {
        return Err(OracleError::Internal(format!(
            "aurifeuillean halves identity failed for n={n}"
        )));
    }
    Ok((l, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_below;

    #[test]
    fn p3_gives_5_and_13() {
        let s = aurifeuillean_split(3).unwrap();
        assert_eq!(s.l, BigUint::from(5u32));
        assert_eq!(s.m, BigUint::from(13u32));
        assert_eq!(s.branch, AurifeuilleanBranch::ThreeMod4);
    }

    #[test]
    fn p5_gives_25_and_41() {
        let s = aurifeuillean_split(5).unwrap();
        assert_eq!(s.l, BigUint::from(25u32));
        assert_eq!(s.m, BigUint::from(41u32));
        assert_eq!(s.branch, AurifeuilleanBranch::OneMod4);
    }

    #[test]
    fn product_identity_all_odd_primes_to_199() {
        // The constructor verifies L*M = 2^{2p}+1 internally; we re-check
        // here independently along with ordering and nontriviality.
        for p in primes_below(200).into_iter().skip(1) {
            let s = aurifeuillean_split(p).unwrap();
            let expected = (BigUint::one() << (2 * p)) + BigUint::one();
            assert_eq!(&s.l * &s.m, expected, "p={p}");
            assert!(s.l > BigUint::one());
            assert!(s.l < s.m, "p={p}");
        }
    }

    #[test]
    fn p1213_halves_are_366_digits_and_25893760589_divides_l_only() {
        let s = aurifeuillean_split(1213).unwrap();
        assert_eq!(s.l.to_string().len(), 366);
        assert_eq!(s.m.to_string().len(), 366);
        let q = BigUint::from(25893760589u64);
        assert_eq!(&s.l % &q, BigUint::ZERO);
        assert_ne!(&s.m % &q, BigUint::ZERO);
    }

    #[test]
    fn rejects_two_and_composites() {
        assert!(aurifeuillean_split(2).is_err());
        assert!(aurifeuillean_split(9).is_err());
        assert!(aurifeuillean_split(1).is_err());
    }

    #[test]
    fn halves_identity_holds_for_all_odd_n() {
        for n in (1u64..400).step_by(2) {
            let (l, m) = aurifeuillean_halves(n).unwrap();
            let expected = (BigUint::one() << (2 * n)) + BigUint::one();
            assert_eq!(&l * &m, expected, "n={n}");
            assert!(l <= m);
        }
        assert!(aurifeuillean_halves(6).is_err());
    }

    #[test]
    fn halves_agree_with_prime_split() {
        for p in primes_below(200).into_iter().skip(1) {
            let s = aurifeuillean_split(p).unwrap();
            let (l, m) = aurifeuillean_halves(p).unwrap();
            assert_eq!((l, m), (s.l, s.m), "p={p}");
        }
    }

    #[test]
    fn composite_n9_halves() {
        // 2^18 + 1 = 262145 = 481 * 545 = (2^9 - 2^5 + 1)(2^9 + 2^5 + 1),
        // with 481 = 13 * 37 and 545 = 5 * 109.
        let (l, m) = aurifeuillean_halves(9).unwrap();
        assert_eq!(l, BigUint::from(481u32));
        assert_eq!(m, BigUint::from(545u32));
        assert_eq!(&l * &m, BigUint::from(262145u32));
    }
}
