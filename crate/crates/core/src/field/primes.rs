//! Primality testing and prime search for 64-bit moduli.

use crate::error::{Error, Result};

/// Largest supported base-field modulus, exclusive: limb products must fit in
/// a 128-bit intermediate with slack for lazy accumulation.
pub const MODULUS_LIMIT: u64 = 1 << 62;

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub(crate) fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % u128::from(m)) as u64
}

pub(crate) fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse in F_m for prime m; `a` must be nonzero mod m.
pub(crate) fn invmod(a: u64, m: u64) -> Option<u64> {
    let a = a % m;
    if a == 0 {
        return None;
    }
    // Extended Euclid over signed 128-bit: m < 2^62 keeps everything in range.
    let (mut r0, mut r1) = (i128::from(m), i128::from(a));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    Some(t0.rem_euclid(i128::from(m)) as u64)
}

/// Witnesses making Miller-Rabin deterministic for all n < 2^64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test, valid for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in WITNESSES.iter() {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `lower_bound`.
///
/// Requires `2 <= lower_bound < 2^61`; the result is then guaranteed to lie
/// below `2 * lower_bound` (Bertrand), and in particular below
/// [`MODULUS_LIMIT`].
pub fn find_prime(lower_bound: u64) -> Result<u64> {
    if !(2..(1u64 << 61)).contains(&lower_bound) {
        return Err(Error::usage(format!(
            "find_prime bound {lower_bound} outside supported range [2, 2^61)"
        )));
    }
    let mut candidate = lower_bound + 1;
    if candidate.is_multiple_of(2) && candidate != 2 {
        candidate += 1;
    }
    loop {
        if is_prime(candidate) {
            debug_assert!(candidate < 2 * lower_bound || lower_bound < 3);
            return Ok(candidate);
        }
        candidate += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Classic sieve, the independent reference for everything here.
    fn sieve(limit: usize) -> Vec<bool> {
        let mut composite = vec![false; limit + 1];
        composite[0] = true;
        if limit >= 1 {
            composite[1] = true;
        }
        let mut p = 2usize;
        while p * p <= limit {
            if !composite[p] {
                let mut m = p * p;
                while m <= limit {
                    composite[m] = true;
                    m += p;
                }
            }
            p += 1;
        }
        composite
    }

    #[test]
    fn is_prime_matches_sieve_below_100k() {
        let composite = sieve(100_000);
        for n in 0..=100_000u64 {
            assert_eq!(is_prime(n), !composite[n as usize], "disagreement at {n}");
        }
    }

    #[test]
    fn is_prime_known_large_cases() {
        assert!(is_prime((1 << 61) - 1)); // Mersenne prime 2^61 - 1
        assert!(!is_prime((1 << 62) - 1));
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(4_179_340_454_199_820_289)); // 29 * 2^57 + 1
    }

    #[test]
    fn find_prime_small_examples() {
        assert_eq!(find_prime(10).unwrap(), 11);
        assert_eq!(find_prime(16).unwrap(), 17);
        assert_eq!(find_prime(2).unwrap(), 3);
        assert_eq!(find_prime(3).unwrap(), 5);
    }

    #[test]
    fn find_prime_above_2_to_20() {
        // Frozen expected value, cross-checked against the sieve oracle.
        let expected = 1_048_583u64;
        assert_eq!(find_prime(1 << 20).unwrap(), expected);
        let composite = sieve(1 << 21);
        let oracle = ((1 << 20) + 1..).find(|&n| !composite[n as usize]).unwrap();
        assert_eq!(oracle as u64, expected);
    }

    #[test]
    fn find_prime_matches_sieve_for_all_small_bounds() {
        let limit = 20_000usize;
        let composite = sieve(2 * limit);
        for bound in 2..=limit {
            let oracle = (bound + 1..).find(|&n| !composite[n]).unwrap() as u64;
            assert_eq!(find_prime(bound as u64).unwrap(), oracle, "bound {bound}");
        }
    }

    #[test]
    fn find_prime_rejects_out_of_range_bounds() {
        assert!(find_prime(0).is_err());
        assert!(find_prime(1).is_err());
        assert!(find_prime(1 << 61).is_err());
    }

    #[test]
    fn find_prime_stays_below_twice_the_bound() {
        for bound in [5u64, 100, 1 << 20, (1 << 61) - 5] {
            let p = find_prime(bound).unwrap();
            assert!(p > bound && p < 2 * bound);
            assert!(p < MODULUS_LIMIT);
        }
    }

    #[test]
    fn invmod_agrees_with_fermat() {
        for &m in &[5u64, 101, 1_048_583, (1 << 61) - 1] {
            for a in (1..50u64).filter(|a| a % m != 0) {
                let inv = invmod(a, m).unwrap();
                assert_eq!(mulmod(a, inv, m), 1);
                assert_eq!(inv, powmod(a, m - 2, m));
            }
        }
        assert_eq!(invmod(0, 7), None);
        assert_eq!(invmod(14, 7), None);
    }
}
