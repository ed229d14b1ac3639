//! Number-theoretic transforms for large base-field polynomial products.
//!
//! Products whose result crosses the dispatch threshold run as cyclic
//! convolutions.  When the coefficient prime `q` is odd and `q - 1` carries
//! enough powers of two, the transform runs natively modulo `q`.  Otherwise
//! the exact integer convolution is recovered by CRT from three fixed helper
//! primes of the form `c * 2^45 + 1` (scanned downward from `2^62` and
//! verified at startup) and reduced modulo `q` at the end.
//!
//! Transform butterflies use Montgomery multiplication; the op counter is
//! charged with the number of modular multiplications and additions actually
//! executed, since this path never goes through the per-element field
//! kernels.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::field::{is_prime, powmod};
use crate::ops;

/// Largest transform supported by the helper primes.
const HELPER_TWO_ADICITY: u32 = 45;

// ---------------------------------------------------------------------------
// Montgomery arithmetic on a fixed odd prime below 2^63.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct Mont {
    p: u64,
    /// `-p^{-1} mod 2^64`.
    ninv: u64,
    /// `2^128 mod p`, for converting into the Montgomery domain.
    r2: u64,
}

impl Mont {
    fn new(p: u64) -> Mont {
        debug_assert!(p & 1 == 1 && p < (1 << 63));
        // Newton iteration doubles the number of correct low bits each step.
        let mut x = p;
        for _ in 0..5 {
            x = x.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(x)));
        }
        debug_assert_eq!(p.wrapping_mul(x), 1);
        let r2 = ((u128::MAX % u128::from(p)) + 1) % u128::from(p);
        Mont {
            p,
            ninv: x.wrapping_neg(),
            r2: r2 as u64,
        }
    }

    /// Montgomery reduction of `t < p * 2^64`.
    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let folded = ((t + u128::from(m) * u128::from(self.p)) >> 64) as u64;
        if folded >= self.p {
            folded - self.p
        } else {
            folded
        }
    }

    /// Product of two Montgomery-domain values.
    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(u128::from(a) * u128::from(b))
    }

    fn encode(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    fn decode(&self, a: u64) -> u64 {
        self.redc(u128::from(a))
    }

    #[inline(always)]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
}

// ---------------------------------------------------------------------------
// Transform-ready primes.
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub(super) struct NttPrime {
    p: u64,
    two_adicity: u32,
    /// Element of multiplicative order exactly `2^two_adicity`, plain domain.
    root: u64,
    mont: Mont,
}

/// An element of order exactly `2^a` modulo the prime `p`.
fn two_adic_root(p: u64, a: u32) -> u64 {
    debug_assert!(a >= 1 && (p - 1).is_multiple_of(1u64 << a));
    for g in 2..p {
        let w = powmod(g, (p - 1) >> a, p);
        if powmod(w, 1u64 << (a - 1), p) == p - 1 {
            return w;
        }
    }
    unreachable!("no generator found for a prime modulus");
}

fn make_ntt_prime(p: u64, two_adicity: u32) -> NttPrime {
    NttPrime {
        p,
        two_adicity,
        root: two_adic_root(p, two_adicity),
        mont: Mont::new(p),
    }
}

/// The three CRT helper primes: the largest `c * 2^45 + 1 < 2^62`.
fn helpers() -> &'static [NttPrime; 3] {
    static HELPERS: OnceLock<[NttPrime; 3]> = OnceLock::new();
    HELPERS.get_or_init(|| {
        let mut found: Vec<NttPrime> = Vec::with_capacity(3);
        let mut c: u64 = (1 << 17) - 1;
        while found.len() < 3 {
            let p = (c << HELPER_TWO_ADICITY) | 1;
            if is_prime(p) {
                found.push(make_ntt_prime(p, HELPER_TWO_ADICITY));
            }
            c -= 1;
        }
        found.try_into().unwrap()
    })
}

/// Cached transform data for coefficient primes that support native NTTs.
fn native_prime(q: u64) -> &'static NttPrime {
    static CACHE: OnceLock<Mutex<HashMap<u64, &'static NttPrime>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(q).or_insert_with(|| {
        let adic = (q - 1).trailing_zeros();
        Box::leak(Box::new(make_ntt_prime(q, adic)))
    })
}

/// Whether products over `F_q` of this result length can transform natively.
pub(super) fn native_capable(q: u64, result_len: usize) -> bool {
    q & 1 == 1 && (q - 1).trailing_zeros() >= transform_size(result_len).1
}

/// `(n, log2 n)` for the transform covering `result_len` coefficients.
fn transform_size(result_len: usize) -> (usize, u32) {
    let n = result_len.next_power_of_two();
    (n, n.trailing_zeros())
}

// ---------------------------------------------------------------------------
// The transform itself.
// ---------------------------------------------------------------------------

fn bit_reverse_permute(data: &mut [u64]) {
    let n = data.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
}

/// In-place radix-2 transform.  `wtab[j] = w^j` for `j < n/2` in Montgomery
/// domain, where `w` has order `n`.
fn transform(mont: &Mont, data: &mut [u64], wtab: &[u64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two() && wtab.len() == n / 2 || n == 1);
    bit_reverse_permute(data);
    let mut half = 1;
    while half < n {
        let stride = n / (2 * half);
        let mut start = 0;
        while start < n {
            for j in 0..half {
                let w = wtab[j * stride];
                let u = data[start + j];
                let v = mont.mul(data[start + half + j], w);
                data[start + j] = mont.add(u, v);
                data[start + half + j] = mont.sub(u, v);
            }
            start += 2 * half;
        }
        half *= 2;
    }
}

/// Cyclic convolution of `a` and `b` modulo `pr.p`, truncated to `out_len`.
/// Inputs must already be reduced modulo `pr.p`.
fn convolve(pr: &NttPrime, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    let (n, lg) = transform_size(out_len);
    assert!(
        lg <= pr.two_adicity,
        "transform size 2^{lg} exceeds the 2-adicity of {}",
        pr.p
    );
    let mont = &pr.mont;
    if n == 1 {
        ops::mul(1);
        return vec![((u128::from(a[0]) * u128::from(b[0])) % u128::from(pr.p)) as u64];
    }

    // Twiddle tables for both directions, in the Montgomery domain.
    let w = powmod(pr.root, 1u64 << (pr.two_adicity - lg), pr.p);
    let winv = powmod(w, pr.p - 2, pr.p);
    let mut wtab = vec![0u64; n / 2];
    let mut wtab_inv = vec![0u64; n / 2];
    let wm = mont.encode(w);
    let wim = mont.encode(winv);
    let one = mont.encode(1);
    wtab[0] = one;
    wtab_inv[0] = one;
    for j in 1..n / 2 {
        wtab[j] = mont.mul(wtab[j - 1], wm);
        wtab_inv[j] = mont.mul(wtab_inv[j - 1], wim);
    }

    let mut fa = vec![0u64; n];
    for (slot, &v) in fa.iter_mut().zip(a) {
        *slot = mont.encode(v);
    }
    let mut fb = vec![0u64; n];
    for (slot, &v) in fb.iter_mut().zip(b) {
        *slot = mont.encode(v);
    }
    transform(mont, &mut fa, &wtab);
    transform(mont, &mut fb, &wtab);
    for (x, &y) in fa.iter_mut().zip(fb.iter()) {
        *x = mont.mul(*x, y);
    }
    transform(mont, &mut fa, &wtab_inv);
    let ninv = mont.encode(powmod(n as u64, pr.p - 2, pr.p));
    let mut out = Vec::with_capacity(out_len);
    for &x in fa.iter().take(out_len) {
        out.push(mont.decode(mont.mul(x, ninv)));
    }

    // Charge the counter with the multiplications this convolution ran:
    // table construction, domain conversions, three transforms, the
    // pointwise product, and the final scaling.
    let n64 = n as u64;
    let butterflies = 3 * (n64 / 2) * u64::from(lg);
    ops::mul(n64 + (a.len() + b.len()) as u64 + butterflies + n64 + 2 * out_len as u64);
    ops::add(2 * butterflies);
    out
}

// ---------------------------------------------------------------------------
// Entry point: base-field product via NTT.
// ---------------------------------------------------------------------------

/// Product of two nonempty base-field polynomials modulo `q`, full
/// (untrimmed) length `a.len() + b.len() - 1`.  Chooses the native transform
/// when `q` supports it and CRT over the helper primes otherwise.
pub(super) fn base_mul_ntt(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let out_len = a.len() + b.len() - 1;
    if native_capable(q, out_len) {
        return convolve(native_prime(q), a, b, out_len);
    }

    let hs = helpers();
    let residues: Vec<Vec<u64>> = hs
        .iter()
        .map(|pr| {
            // Inputs are below 2^62 < 2p, so one conditional subtract reduces.
            let ra: Vec<u64> = a.iter().map(|&x| if x >= pr.p { x - pr.p } else { x }).collect();
            let rb: Vec<u64> = b.iter().map(|&x| if x >= pr.p { x - pr.p } else { x }).collect();
            convolve(pr, &ra, &rb, out_len)
        })
        .collect();

    // Garner reconstruction: the true convolution values are below
    // len * (q-1)^2 < 2^{20+124} << p0*p1*p2, so three residues determine
    // them exactly; only the value modulo q is materialized.
    let (p0, p1, p2) = (hs[0].p, hs[1].p, hs[2].p);
    let inv_p0_mod_p1 = powmod(p0 % p1, p1 - 2, p1);
    let p0p1_mod_p2 = ((u128::from(p0) * u128::from(p1)) % u128::from(p2)) as u64;
    let inv_p0p1_mod_p2 = powmod(p0p1_mod_p2, p2 - 2, p2);
    let p0_mod_q = p0 % q;
    let p0p1_mod_q = ((u128::from(p0 % q) * u128::from(p1 % q)) % u128::from(q)) as u64;

    let mut out = Vec::with_capacity(out_len);
    for ((&x0, &x1), &x2) in residues[0]
        .iter()
        .zip(residues[1].iter())
        .zip(residues[2].iter())
    {
        // t1 = (x1 - x0) / p0 mod p1
        let x0r = x0 % p1;
        let d1 = if x1 >= x0r { x1 - x0r } else { x1 + p1 - x0r };
        let t1 = ((u128::from(d1) * u128::from(inv_p0_mod_p1)) % u128::from(p1)) as u64;
        // t2 = (x2 - x0 - p0*t1) / (p0*p1) mod p2
        let part = (u128::from(x0 % p2) + u128::from(p0 % p2) * u128::from(t1 % p2)) % u128::from(p2);
        let d2 = if u128::from(x2) >= part {
            u128::from(x2) - part
        } else {
            u128::from(x2) + u128::from(p2) - part
        };
        let t2 = ((d2 % u128::from(p2)) * u128::from(inv_p0p1_mod_p2) % u128::from(p2)) as u64;
        // value mod q = x0 + p0*t1 + p0*p1*t2 (computed modulo q)
        let mut v = u128::from(x0 % q);
        v += u128::from(p0_mod_q) * u128::from(t1 % q) % u128::from(q);
        v += u128::from(p0p1_mod_q) * u128::from(t2 % q) % u128::from(q);
        out.push((v % u128::from(q)) as u64);
    }
    ops::mul(6 * out_len as u64);
    ops::add(4 * out_len as u64);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schoolbook(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                let t = (u128::from(x) * u128::from(y) + u128::from(out[i + j])) % u128::from(q);
                out[i + j] = t as u64;
            }
        }
        out
    }

    fn pseudorandom_coeffs(q: u64, len: usize, seed: u64) -> Vec<u64> {
        // Simple splitmix stream; good enough to exercise every limb width.
        let mut s = seed;
        (0..len)
            .map(|_| {
                s = s.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = s;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                (z ^ (z >> 31)) % q
            })
            .collect()
    }

    #[test]
    fn helper_primes_are_prime_with_deep_two_adic_subgroups() {
        for pr in helpers() {
            assert!(is_prime(pr.p));
            assert!(pr.p < 1 << 62);
            assert!((pr.p - 1).trailing_zeros() >= HELPER_TWO_ADICITY);
            // root really has order 2^45
            assert_eq!(powmod(pr.root, 1 << HELPER_TWO_ADICITY, pr.p), 1);
            assert_eq!(powmod(pr.root, 1 << (HELPER_TWO_ADICITY - 1), pr.p), pr.p - 1);
        }
        let ps: Vec<u64> = helpers().iter().map(|h| h.p).collect();
        assert_eq!(ps.len(), 3);
        assert!(ps[0] != ps[1] && ps[1] != ps[2] && ps[0] != ps[2]);
    }

    #[test]
    fn montgomery_round_trips() {
        for p in [3u64, 97, (1 << 61) - 1, 29 * (1 << 57) + 1] {
            let m = Mont::new(p);
            for a in [0u64, 1, 2, p - 1, p / 2] {
                assert_eq!(m.decode(m.encode(a)), a);
                for b in [1u64, p - 1, 12345 % p] {
                    let got = m.decode(m.mul(m.encode(a), m.encode(b)));
                    let want = ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64;
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn native_convolution_matches_schoolbook() {
        // 29 * 2^57 + 1 is prime with 2-adicity 57: native transforms.
        let q = 29 * (1 << 57) + 1;
        assert!(is_prime(q));
        for (la, lb) in [(1, 1), (2, 3), (255, 2), (256, 256), (300, 513)] {
            let a = pseudorandom_coeffs(q, la, 7 + la as u64);
            let b = pseudorandom_coeffs(q, lb, 99 + lb as u64);
            assert_eq!(base_mul_ntt(q, &a, &b), schoolbook(q, &a, &b), "sizes {la}x{lb}");
        }
    }

    #[test]
    fn crt_convolution_matches_schoolbook() {
        // 2^61 - 1 has 2-adicity 1 and q = 2 is even: both go through CRT.
        for q in [2u64, 3, 5, (1 << 61) - 1, 1_048_583] {
            assert!(!native_capable(q, 256));
            for (la, lb) in [(1, 1), (300, 300), (513, 64)] {
                let a = pseudorandom_coeffs(q, la, q.wrapping_add(la as u64));
                let b = pseudorandom_coeffs(q, lb, q.wrapping_mul(3).wrapping_add(lb as u64));
                assert_eq!(base_mul_ntt(q, &a, &b), schoolbook(q, &a, &b), "q={q} {la}x{lb}");
            }
        }
    }

    #[test]
    fn worst_case_magnitudes_survive_reconstruction() {
        // All-max coefficients at the largest supported modulus stress the
        // CRT bound: values reach len * (q-1)^2.
        let q = (1 << 61) - 1;
        let a = vec![q - 1; 700];
        let b = vec![q - 1; 700];
        assert_eq!(base_mul_ntt(q, &a, &b), schoolbook(q, &a, &b));
    }
}
