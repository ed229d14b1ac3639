//! Irreducibility testing over F_q and canonical extension moduli.
//!
//! Polynomials over the base field are plain little-endian coefficient
//! vectors here; this small kernel is deliberately self-contained so the
//! main polynomial module can sit on top of finished fields.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::primes::{self, addmod, invmod, mulmod, submod};

/// Degree of a coefficient vector, ignoring trailing zeros.  Empty/zero
/// input reports `None`.
pub(crate) fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Schoolbook product with per-term reduction; sizes here are tiny.
pub(crate) fn base_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = addmod(out[i + j], mulmod(ai, bj, q), q);
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the monic polynomial `f`.
pub(crate) fn base_rem(a: &[u64], f: &[u64], q: u64) -> Vec<u64> {
    let df = degree(f).expect("modulus must be nonzero");
    debug_assert_eq!(f[df], 1, "modulus must be monic");
    let mut r: Vec<u64> = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let lead = r[dr];
        let shift = dr - df;
        for k in 0..=df {
            let sub = mulmod(lead, f[k], q);
            r[shift + k] = submod(r[shift + k], sub, q);
        }
    }
    r.truncate(df.max(1));
    r.resize(df.max(1), 0);
    r
}

pub(crate) fn base_mulmod(a: &[u64], b: &[u64], f: &[u64], q: u64) -> Vec<u64> {
    base_rem(&base_mul(a, b, q), f, q)
}

/// `h^e mod f` by square-and-multiply.
pub(crate) fn base_powmod(h: &[u64], mut e: u64, f: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = base_rem(h, f, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = base_mulmod(&acc, &base, f, q);
        }
        base = base_mulmod(&base, &base, f, q);
        e >>= 1;
    }
    acc
}

/// Monic gcd over F_q[x].
pub(crate) fn base_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    while !r1.is_empty() {
        let f = make_monic(r1.clone(), q);
        let rem = trim(base_rem(&r0, &f, q));
        r0 = f;
        r1 = rem;
    }
    make_monic(r0, q)
}

pub(crate) fn make_monic(p: Vec<u64>, q: u64) -> Vec<u64> {
    let p = trim(p);
    match degree(&p) {
        None => p,
        Some(d) => {
            if p[d] == 1 {
                return p;
            }
            let inv = invmod(p[d], q).expect("leading coefficient nonzero");
            p.iter().map(|&c| mulmod(c, inv, q)).collect()
        }
    }
}

fn validate_modulus_shape(q: u64, f: &[u64]) -> Result<usize> {
    if !primes::is_prime(q) || q >= primes::MODULUS_LIMIT {
        return Err(Error::usage(format!("base modulus {q} is not a supported prime")));
    }
    if f.iter().any(|&c| c >= q) {
        return Err(Error::usage("polynomial coefficient out of range for F_q".to_string()));
    }
    match degree(f) {
        Some(d) if d >= 1 && f[d] == 1 => Ok(d),
        Some(_) => Err(Error::domain("irreducibility is defined for monic polynomials of degree >= 1".to_string())),
        None => Err(Error::domain("the zero polynomial has no irreducibility status".to_string())),
    }
}

/// Rabin's irreducibility test for a monic `f` of degree `k >= 1` over F_q:
/// `x^(q^k) = x (mod f)` and `gcd(x^(q^(k/r)) - x, f) = 1` for every prime
/// `r` dividing `k`.
pub fn is_irreducible(q: u64, f: &[u64]) -> Result<bool> {
    let k = validate_modulus_shape(q, f)?;
    if k == 1 {
        return Ok(true);
    }
    let k_u = k as u64;
    let prime_divisors: Vec<u64> = {
        let mut divs = Vec::new();
        let mut rem = k_u;
        let mut d = 2u64;
        while d * d <= rem {
            if rem.is_multiple_of(d) {
                divs.push(d);
                while rem.is_multiple_of(d) {
                    rem /= d;
                }
            }
            d += 1;
        }
        if rem > 1 {
            divs.push(rem);
        }
        divs
    };

    // frob[i] = x^(q^i) mod f, built by iterating h -> h^q.
    let x = vec![0u64, 1];
    let mut frob = Vec::with_capacity(k + 1);
    frob.push(base_rem(&x, f, q));
    for _ in 0..k {
        let next = base_powmod(frob.last().unwrap(), q, f, q);
        frob.push(next);
    }

    let x_mod = base_rem(&x, f, q);
    if trim(frob[k].clone()) != trim(x_mod.clone()) {
        return Ok(false);
    }
    for &r in &prime_divisors {
        let i = k / (r as usize);
        let mut diff = frob[i].clone();
        diff.resize(diff.len().max(x_mod.len()), 0);
        for (idx, &c) in x_mod.iter().enumerate() {
            diff[idx] = submod(diff[idx], c, q);
        }
        let g = base_gcd(&diff, f, q);
        if degree(&g) != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

type ModulusCache = Mutex<HashMap<(u64, u32), Vec<u64>>>;

fn modulus_cache() -> &'static ModulusCache {
    static CACHE: OnceLock<ModulusCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Canonical modulus for F_{q^ell}: the first monic irreducible of degree
/// `ell` when candidates `x^ell + c_{ell-1} x^{ell-1} + ... + c_0` are
/// ordered by the base-q value of their coefficient tail.  Degree 1 is the
/// identity embedding with modulus `x`.
pub fn canonical_modulus(q: u64, ell: u32) -> Result<Vec<u64>> {
    if !primes::is_prime(q) || q >= primes::MODULUS_LIMIT {
        return Err(Error::usage(format!("base modulus {q} is not a supported prime")));
    }
    if ell == 0 {
        return Err(Error::usage("extension degree must be at least 1".to_string()));
    }
    if ell == 1 {
        return Ok(vec![0, 1]);
    }
    if let Some(f) = modulus_cache().lock().unwrap().get(&(q, ell)).cloned() {
        return Ok(f);
    }
    let ell_us = ell as usize;
    let mut counter: u128 = 0;
    loop {
        let mut f = vec![0u64; ell_us + 1];
        f[ell_us] = 1;
        let mut rest = counter;
        for limb in f.iter_mut().take(ell_us) {
            *limb = (rest % u128::from(q)) as u64;
            rest /= u128::from(q);
        }
        if rest != 0 {
            // Exhausted q^ell candidates without a hit: impossible for a
            // genuine prime q, so flag the inconsistency loudly.
            return Err(Error::domain(format!("no irreducible of degree {ell} over F_{q} found")));
        }
        if is_irreducible(q, &f)? {
            modulus_cache().lock().unwrap().insert((q, ell), f.clone());
            return Ok(f);
        }
        counter += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive factor search: tries every monic divisor of degree
    /// 1..=deg(f)/2.  Only usable for tiny q^deg, which is the point.
    fn oracle_irreducible(q: u64, f: &[u64]) -> bool {
        let k = degree(f).unwrap();
        if k == 1 {
            return true;
        }
        for d in 1..=k / 2 {
            let count = u128::from(q).pow(d as u32);
            for idx in 0..count {
                let mut g = vec![0u64; d + 1];
                g[d] = 1;
                let mut rest = idx;
                for limb in g.iter_mut().take(d) {
                    *limb = (rest % u128::from(q)) as u64;
                    rest /= u128::from(q);
                }
                if trim(base_rem(f, &g, q)).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn known_small_cases() {
        // x^2 + x + 1 irreducible over F_2; x^2 + 1 = (x+1)^2 is not.
        assert!(is_irreducible(2, &[1, 1, 1]).unwrap());
        assert!(!is_irreducible(2, &[1, 0, 1]).unwrap());
        // x^3 + x + 1 over F_2: no roots, degree 3 => irreducible.
        assert!(is_irreducible(2, &[1, 1, 0, 1]).unwrap());
        // x^2 + 1 over F_3: -1 is a non-residue.
        assert!(is_irreducible(3, &[1, 0, 1]).unwrap());
        // x^2 - 2 over F_7: 2 = 3^2 mod 7 is a residue, so reducible.
        assert!(!is_irreducible(7, &[5, 0, 1]).unwrap());
    }

    #[test]
    fn matches_exhaustive_oracle_on_small_fields() {
        for q in [2u64, 3, 5] {
            for deg in 2..=4usize {
                let count = u128::from(q).pow(deg as u32);
                for idx in 0..count {
                    let mut f = vec![0u64; deg + 1];
                    f[deg] = 1;
                    let mut rest = idx;
                    for limb in f.iter_mut().take(deg) {
                        *limb = (rest % u128::from(q)) as u64;
                        rest /= u128::from(q);
                    }
                    assert_eq!(
                        is_irreducible(q, &f).unwrap(),
                        oracle_irreducible(q, &f),
                        "q={q} f={f:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_non_monic_zero_and_constant() {
        assert!(is_irreducible(5, &[0]).is_err());
        assert!(is_irreducible(5, &[3]).is_err());
        assert!(is_irreducible(5, &[1, 2]).is_err()); // 2x + 1 is not monic
        assert!(is_irreducible(5, &[2, 1]).unwrap()); // x + 2, degree 1
    }

    #[test]
    fn canonical_modulus_examples() {
        assert_eq!(canonical_modulus(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(canonical_modulus(7, 1).unwrap(), vec![0, 1]);
        assert_eq!(canonical_modulus(2, 2).unwrap(), vec![1, 1, 1]); // x^2+x+1
        assert_eq!(canonical_modulus(2, 3).unwrap(), vec![1, 1, 0, 1]); // x^3+x+1
    }

    #[test]
    fn canonical_modulus_is_first_in_enumeration_order() {
        for (q, ell) in [(2u64, 4u32), (3, 2), (3, 3), (5, 2), (101, 2)] {
            let f = canonical_modulus(q, ell).unwrap();
            assert!(is_irreducible(q, &f).unwrap());
            let value: u128 = f
                .iter()
                .take(ell as usize)
                .rev()
                .fold(0u128, |acc, &c| acc * u128::from(q) + u128::from(c));
            // every earlier candidate must be reducible
            for idx in 0..value {
                let mut g = vec![0u64; ell as usize + 1];
                g[ell as usize] = 1;
                let mut rest = idx;
                for limb in g.iter_mut().take(ell as usize) {
                    *limb = (rest % u128::from(q)) as u64;
                    rest /= u128::from(q);
                }
                assert!(!is_irreducible(q, &g).unwrap(), "q={q} ell={ell} idx={idx}");
            }
        }
    }

    #[test]
    fn big_binary_extensions_are_found_quickly() {
        for ell in [16u32, 22, 32, 52] {
            let f = canonical_modulus(2, ell).unwrap();
            assert_eq!(degree(&f), Some(ell as usize));
            assert!(is_irreducible(2, &f).unwrap());
        }
    }
}
