//! Prime fields `F_q` and their extensions `F_{q^ell} = F_q[t]/(f)`.
//!
//! An element is a little-endian vector of `ell` limbs: the coefficients of
//! `1, t, ..., t^(ell-1)` reduced modulo the prime `q`.  Base moduli are
//! capped below 2^62 so that any limb product, plus the slack needed for
//! lazily accumulated schoolbook convolutions, fits in 128 bits.
//!
//! Fields are cheap handles (`Arc` inside); elements carry their handle and
//! refuse arithmetic against a different field.  The canonical enumeration
//! `canonical_element(i)` writes `i` in base q, which gives every field a
//! fixed, portable ordering of its elements — protocol point sets and
//! interpolation nodes are always drawn from that order.

mod irreducible;
mod primes;

pub use irreducible::{canonical_modulus, is_irreducible};
pub use primes::{find_prime, is_prime, MODULUS_LIMIT};

use std::fmt;
use std::sync::Arc;

use crate::coins::CoinSupply;
use crate::error::{Error, Result};
use crate::ops;

pub(crate) use primes::{addmod, invmod, mulmod, powmod, submod};

#[derive(Debug)]
pub(crate) struct FieldRepr {
    q: u64,
    ell: usize,
    modulus: Vec<u64>,
    order: u128,
    /// `red[j]` holds `t^(ell+j) mod f` for `j` in `0..ell-1`.
    red: Vec<Vec<u64>>,
    /// Bits needed to cover `order - 1`: the per-attempt coin cost of a
    /// uniform draw.
    sample_bits: u32,
}

/// A finite field handle: either `F_q` (`ell == 1`, modulus `t`) or an
/// extension `F_{q^ell}` with an explicit irreducible modulus.
#[derive(Clone)]
pub struct Field(Arc<FieldRepr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q && self.0.modulus == other.0.modulus
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.ell == 1 {
            write!(f, "F_{}", self.0.q)
        } else {
            write!(f, "F_{}^{}", self.0.q, self.0.ell)
        }
    }
}

impl Field {
    /// The prime field `F_q`.
    pub fn prime(q: u64) -> Result<Field> {
        Field::from_modulus(q, vec![0, 1])
    }

    /// The extension `F_{q^ell}` with the canonical (enumeration-smallest)
    /// irreducible modulus.  `ell == 1` yields `F_q` itself.
    pub fn extension(q: u64, ell: u32) -> Result<Field> {
        let modulus = canonical_modulus(q, ell)?;
        Field::from_modulus(q, modulus)
    }

    /// A field from an explicitly supplied modulus, e.g. one received from a
    /// prover.  Validates primality of `q`, shape, range, irreducibility,
    /// and that `q^ell` is representable in 128 bits.
    pub fn from_modulus(q: u64, modulus: Vec<u64>) -> Result<Field> {
        if !irreducible::is_irreducible(q, &modulus)? {
            return Err(Error::domain(format!(
                "modulus {modulus:?} is reducible over F_{q}"
            )));
        }
        let ell = modulus.len() - 1;
        if modulus[ell] != 1 {
            return Err(Error::usage("modulus has trailing zero coefficients".to_string()));
        }
        let mut order: u128 = 1;
        for _ in 0..ell {
            order = order.checked_mul(u128::from(q)).ok_or_else(|| {
                Error::capacity(format!(
                    "field order {q}^{ell} exceeds the 128-bit representation budget"
                ))
            })?;
        }
        // Precompute t^(ell+j) mod f by repeated shift-and-reduce, starting
        // from t^ell mod f = -(f_0 + f_1 t + ... + f_{ell-1} t^{ell-1}).
        let mut red: Vec<Vec<u64>> = Vec::with_capacity(ell.saturating_sub(1));
        let mut cur: Vec<u64> = vec![0; ell];
        for (k, c) in cur.iter_mut().enumerate() {
            *c = if modulus[k] == 0 { 0 } else { q - modulus[k] };
        }
        for _ in 0..ell.saturating_sub(1) {
            red.push(cur.clone());
            // multiply cur by t, reduce the overflow limb via t^ell = red[0]
            let top = cur[ell - 1];
            for k in (1..ell).rev() {
                cur[k] = cur[k - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for k in 0..ell {
                    cur[k] = addmod(cur[k], mulmod(top, red[0][k], q), q);
                }
            }
        }
        // Lazy schoolbook accumulation bound: (2*ell - 1) products of size
        // (q-1)^2 must fit in u128.  Guaranteed by the caps above, but keep
        // the check hard in case either cap ever moves.
        let sq = u128::from(q - 1) * u128::from(q - 1);
        if u128::try_from(2 * ell - 1).unwrap().checked_mul(sq).is_none() {
            return Err(Error::capacity(format!(
                "extension degree {ell} over F_{q} overflows lazy accumulation"
            )));
        }
        let sample_bits = 128 - (order - 1).leading_zeros().min(127);
        Ok(Field(Arc::new(FieldRepr {
            q,
            ell,
            modulus,
            order,
            red,
            sample_bits: sample_bits.max(1),
        })))
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Extension degree over the prime base (1 for a prime field).
    pub fn ell(&self) -> usize {
        self.0.ell
    }

    /// Number of elements, `q^ell`.
    pub fn order(&self) -> u128 {
        self.0.order
    }

    /// Modulus coefficients, little-endian, length `ell + 1`, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Bits consumed by each uniform-draw attempt.
    pub fn sample_bits(&self) -> u32 {
        self.0.sample_bits
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), limbs: vec![0; self.0.ell] }
    }

    pub fn one(&self) -> FieldElement {
        let mut limbs = vec![0; self.0.ell];
        limbs[0] = 1 % self.0.q;
        FieldElement { field: self.clone(), limbs }
    }

    /// Image of the base-field residue `a mod q` under the canonical
    /// embedding `F_q -> F_{q^ell}`.
    pub fn embed(&self, a: u64) -> FieldElement {
        let mut limbs = vec![0; self.0.ell];
        limbs[0] = a % self.0.q;
        FieldElement { field: self.clone(), limbs }
    }

    /// Element from explicit limbs; must have length `ell` and every limb
    /// below `q`.
    pub fn from_limbs(&self, limbs: Vec<u64>) -> Result<FieldElement> {
        if limbs.len() != self.0.ell {
            return Err(Error::usage(format!(
                "expected {} limbs for {self}, got {}",
                self.0.ell,
                limbs.len()
            )));
        }
        if let Some(bad) = limbs.iter().find(|&&c| c >= self.0.q) {
            return Err(Error::usage(format!("limb {bad} out of range for {self}")));
        }
        Ok(FieldElement { field: self.clone(), limbs })
    }

    /// The `i`-th element in canonical order: the base-q digits of `i` as
    /// limbs.  `canonical_element(0)` is zero, `canonical_element(q)` is `t`.
    pub fn canonical_element(&self, i: u128) -> Result<FieldElement> {
        if i >= self.0.order {
            return Err(Error::usage(format!(
                "canonical index {i} out of range for {self} of order {}",
                self.0.order
            )));
        }
        let mut limbs = vec![0u64; self.0.ell];
        let mut rest = i;
        for limb in limbs.iter_mut() {
            *limb = (rest % u128::from(self.0.q)) as u64;
            rest /= u128::from(self.0.q);
        }
        Ok(FieldElement { field: self.clone(), limbs })
    }

    /// Position of an element in canonical order; inverse of
    /// [`Field::canonical_element`].
    pub fn canonical_index(&self, e: &FieldElement) -> u128 {
        e.limbs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * u128::from(self.0.q) + u128::from(c))
    }

    /// Uniform element by rejection sampling: each attempt draws exactly
    /// [`Field::sample_bits`] coins and is accepted iff it lands below the
    /// field order.
    pub fn random_element(&self, coins: &mut dyn CoinSupply) -> Result<FieldElement> {
        loop {
            let raw = coins.draw_bits(self.0.sample_bits)?;
            if raw < self.0.order {
                return self.canonical_element(raw);
            }
        }
    }

    pub(crate) fn repr(&self) -> &FieldRepr {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// Raw limb kernels.  These operate on `&[u64]` slices of length `ell` and
// are shared between `FieldElement` arithmetic and the polynomial engine,
// which keeps coefficients in flat limb buffers.
// ---------------------------------------------------------------------------

impl FieldRepr {
    pub(crate) fn q(&self) -> u64 {
        self.q
    }

    pub(crate) fn ell(&self) -> usize {
        self.ell
    }

    pub(crate) fn limb_add(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        ops::add(1);
        for k in 0..self.ell {
            out[k] = addmod(a[k], b[k], self.q);
        }
    }

    pub(crate) fn limb_sub(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        ops::add(1);
        for k in 0..self.ell {
            out[k] = submod(a[k], b[k], self.q);
        }
    }

    pub(crate) fn limb_neg(&self, a: &mut [u64]) {
        ops::add(1);
        for c in a.iter_mut().take(self.ell) {
            if *c != 0 {
                *c = self.q - *c;
            }
        }
    }

    /// Schoolbook product with lazy 128-bit accumulation, reduced via the
    /// precomputed power table.  `out` may not alias the inputs.
    pub(crate) fn limb_mul(&self, a: &[u64], b: &[u64], out: &mut [u64], scratch: &mut Vec<u128>) {
        ops::mul(1);
        let ell = self.ell;
        if ell == 1 {
            out[0] = mulmod(a[0], b[0], self.q);
            return;
        }
        scratch.clear();
        scratch.resize(2 * ell - 1, 0u128);
        for i in 0..ell {
            let ai = a[i];
            if ai == 0 {
                continue;
            }
            let ai = u128::from(ai);
            for j in 0..ell {
                scratch[i + j] += ai * u128::from(b[j]);
            }
        }
        let q128 = u128::from(self.q);
        for j in (ell..2 * ell - 1).rev() {
            let c = (scratch[j] % q128) as u64;
            if c != 0 {
                let row = &self.red[j - ell];
                let c = u128::from(c);
                for k in 0..ell {
                    scratch[k] += c * u128::from(row[k]);
                }
            }
            scratch[j] = 0;
        }
        for k in 0..ell {
            out[k] = (scratch[k] % q128) as u64;
        }
    }

    /// `acc += x`, in place.
    pub(crate) fn limb_acc(&self, acc: &mut [u64], x: &[u64]) {
        ops::add(1);
        for k in 0..self.ell {
            acc[k] = addmod(acc[k], x[k], self.q);
        }
    }

    /// `acc -= x`, in place.
    pub(crate) fn limb_dec(&self, acc: &mut [u64], x: &[u64]) {
        ops::add(1);
        for k in 0..self.ell {
            acc[k] = submod(acc[k], x[k], self.q);
        }
    }

    /// Multiply an element by a base-field scalar.
    pub(crate) fn limb_scale(&self, s: u64, a: &[u64], out: &mut [u64]) {
        ops::mul(1);
        for k in 0..self.ell {
            out[k] = mulmod(a[k], s, self.q);
        }
    }

    /// Reduce a raw product block (up to `2*ell - 1` limbs, each already
    /// `< q`) to an element by folding the high limbs through the power
    /// table.  This is the tail half of `limb_mul`, exposed for unpacking
    /// Kronecker-substitution products; the fold multiplications are tallied
    /// as base-field work.
    pub(crate) fn reduce_product(&self, block: &[u64], out: &mut [u64]) {
        let ell = self.ell;
        debug_assert!(block.len() < 2 * ell || ell == 1);
        if ell == 1 {
            out[0] = block[0] % self.q;
            return;
        }
        let q128 = u128::from(self.q);
        let mut acc: Vec<u128> = vec![0; ell];
        for (k, slot) in acc.iter_mut().enumerate() {
            if k < block.len() {
                *slot = u128::from(block[k]);
            }
        }
        let mut folded = 0u64;
        for j in (ell..block.len()).rev() {
            let c = block[j];
            if c != 0 {
                let row = &self.red[j - ell];
                let c = u128::from(c);
                for k in 0..ell {
                    acc[k] += c * u128::from(row[k]);
                }
                folded += ell as u64;
            }
        }
        ops::mul(folded);
        ops::add(folded);
        for k in 0..ell {
            out[k] = (acc[k] % q128) as u64;
        }
    }

    /// Inverse of a nonzero element by extended Euclid in F_q[t] against the
    /// modulus.
    pub(crate) fn limb_inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        ops::inv(1);
        if a.iter().all(|&c| c == 0) {
            return Err(Error::domain("inverse of zero is undefined".to_string()));
        }
        if self.ell == 1 {
            return Ok(vec![invmod(a[0], self.q).unwrap()]);
        }
        let q = self.q;
        let mut r0 = self.modulus.clone();
        let mut r1 = irreducible::trim(a.to_vec());
        let mut t0: Vec<u64> = vec![];
        let mut t1: Vec<u64> = vec![1];
        while !r1.is_empty() && irreducible::degree(&r1).is_some_and(|d| d > 0) {
            let (quot, rem) = poly_divrem_base(&r0, &r1, q);
            let qt1 = irreducible::base_mul(&quot, &t1, q);
            let tnext = poly_sub_base(&t0, &qt1, q);
            r0 = r1;
            r1 = rem;
            t0 = std::mem::replace(&mut t1, tnext);
        }
        if r1.is_empty() {
            // a shares a factor with the modulus: impossible for an
            // irreducible modulus and nonzero a.
            return Err(Error::domain("element is not invertible".to_string()));
        }
        let c = invmod(r1[0], q).unwrap();
        let mut inv: Vec<u64> = t1.iter().map(|&x| mulmod(x, c, q)).collect();
        inv.resize(self.ell, 0);
        Ok(inv)
    }

    pub(crate) fn limb_pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut acc = vec![0u64; self.ell];
        acc[0] = 1 % self.q;
        let mut base = a.to_vec();
        let mut scratch = Vec::new();
        let mut tmp = vec![0u64; self.ell];
        while e > 0 {
            if e & 1 == 1 {
                self.limb_mul(&acc, &base, &mut tmp, &mut scratch);
                acc.copy_from_slice(&tmp);
            }
            self.limb_mul(&base, &base, &mut tmp, &mut scratch);
            base.copy_from_slice(&tmp);
            e >>= 1;
        }
        acc
    }
}

/// Long division in F_q[t] for the extended-Euclid path; divisor need not be
/// monic.
fn poly_divrem_base(num: &[u64], den: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let dd = irreducible::degree(den).expect("division by zero polynomial");
    let lead_inv = invmod(den[dd], q).unwrap();
    let mut rem = num.to_vec();
    let dn = match irreducible::degree(&rem) {
        Some(d) if d >= dd => d,
        _ => return (vec![], irreducible::trim(rem)),
    };
    let mut quot = vec![0u64; dn - dd + 1];
    for shift in (0..=dn - dd).rev() {
        let dr = shift + dd;
        if rem.len() <= dr || rem[dr] == 0 {
            continue;
        }
        let coef = mulmod(rem[dr], lead_inv, q);
        quot[shift] = coef;
        for k in 0..=dd {
            rem[shift + k] = submod(rem[shift + k], mulmod(coef, den[k], q), q);
        }
    }
    (quot, irreducible::trim(rem))
}

fn poly_sub_base(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|k| {
            let av = a.get(k).copied().unwrap_or(0);
            let bv = b.get(k).copied().unwrap_or(0);
            submod(av, bv, q)
        })
        .collect();
    irreducible::trim(out)
}

/// An element of a [`Field`]: `ell` limbs, always fully reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    limbs: Vec<u64>,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&c| c == 0)
    }

    /// The base-field residue if this element lies in the image of the
    /// embedding `F_q -> F_{q^ell}`, else `None`.
    pub fn project_base(&self) -> Option<u64> {
        if self.limbs[1..].iter().all(|&c| c == 0) {
            Some(self.limbs[0])
        } else {
            None
        }
    }

    fn same_field(&self, other: &FieldElement, op: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::usage(format!(
                "cannot {op} elements of {} and {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other, "add")?;
        let mut limbs = vec![0u64; self.limbs.len()];
        self.field.repr().limb_add(&self.limbs, &other.limbs, &mut limbs);
        Ok(FieldElement { field: self.field.clone(), limbs })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other, "subtract")?;
        let mut limbs = vec![0u64; self.limbs.len()];
        self.field.repr().limb_sub(&self.limbs, &other.limbs, &mut limbs);
        Ok(FieldElement { field: self.field.clone(), limbs })
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other, "multiply")?;
        let mut limbs = vec![0u64; self.limbs.len()];
        let mut scratch = Vec::new();
        self.field.repr().limb_mul(&self.limbs, &other.limbs, &mut limbs, &mut scratch);
        Ok(FieldElement { field: self.field.clone(), limbs })
    }

    pub fn negate(&self) -> FieldElement {
        let mut limbs = self.limbs.clone();
        self.field.repr().limb_neg(&mut limbs);
        FieldElement { field: self.field.clone(), limbs }
    }

    /// Multiplicative inverse; zero is a domain error.
    pub fn invert(&self) -> Result<FieldElement> {
        let limbs = self.field.repr().limb_inv(&self.limbs)?;
        Ok(FieldElement { field: self.field.clone(), limbs })
    }

    pub fn pow(&self, e: u128) -> FieldElement {
        let limbs = self.field.repr().limb_pow(&self.limbs, e);
        FieldElement { field: self.field.clone(), limbs }
    }
}

macro_rules! element_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field mismatch in operator; use checked_* for fallible arithmetic")
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

element_binop!(Add, add, checked_add);
element_binop!(Sub, sub, checked_sub);
element_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.negate()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.ell() == 1 {
            return write!(f, "{}", self.limbs[0]);
        }
        let mut first = true;
        for (k, &c) in self.limbs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "t")?,
                1 => write!(f, "{c}*t")?,
                _ if c == 1 => write!(f, "t^{k}")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::Coins;
    use proptest::prelude::*;

    fn fixture_fields() -> Vec<Field> {
        vec![
            Field::prime(5).unwrap(),
            Field::prime(101).unwrap(),
            Field::prime((1 << 61) - 1).unwrap(),
            Field::extension(2, 4).unwrap(),
            Field::extension(3, 3).unwrap(),
            Field::extension(7, 2).unwrap(),
        ]
    }

    #[test]
    fn prime_field_basics() {
        let f5 = Field::prime(5).unwrap();
        let three = f5.embed(3);
        let four = f5.embed(4);
        assert_eq!(&three + &four, f5.embed(2));
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.embed(3).invert().unwrap(), f7.embed(5));
    }

    #[test]
    fn gf4_multiplication_table_spot() {
        // F_4 = F_2[t]/(t^2 + t + 1): t * t = t + 1.
        let f4 = Field::extension(2, 2).unwrap();
        let t = f4.from_limbs(vec![0, 1]).unwrap();
        assert_eq!(&t * &t, f4.from_limbs(vec![1, 1]).unwrap());
        // and t * (t + 1) = t^2 + t = 1.
        let t1 = f4.from_limbs(vec![1, 1]).unwrap();
        assert_eq!(&t * &t1, f4.one());
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(Field::prime(6).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(1 << 62).is_err());
        assert!(Field::prime((1 << 61) - 1).is_ok());
        assert!(Field::extension(4, 2).is_err()); // base not prime
        assert!(Field::extension(2, 0).is_err());
        // q^ell beyond 128 bits
        assert!(matches!(Field::extension(2, 200), Err(Error::Capacity(_))));
        // reducible explicit modulus
        assert!(Field::from_modulus(2, vec![1, 0, 1]).is_err());
        // trailing zero coefficients
        assert!(Field::from_modulus(2, vec![1, 1, 1, 0]).is_err());
    }

    #[test]
    fn canonical_enumeration_examples() {
        let f4 = Field::extension(2, 2).unwrap();
        assert!(f4.canonical_element(0).unwrap().is_zero());
        assert_eq!(f4.canonical_element(2).unwrap(), f4.from_limbs(vec![0, 1]).unwrap()); // t at index q
        assert_eq!(f4.canonical_element(3).unwrap(), f4.from_limbs(vec![1, 1]).unwrap());
        assert!(f4.canonical_element(4).is_err());
    }

    #[test]
    fn canonical_enumeration_is_a_bijection() {
        for field in [Field::extension(2, 4).unwrap(), Field::extension(5, 2).unwrap()] {
            let order = field.order();
            let mut seen = std::collections::HashSet::new();
            for i in 0..order {
                let e = field.canonical_element(i).unwrap();
                assert_eq!(field.canonical_index(&e), i);
                assert!(seen.insert(e.limbs().to_vec()));
            }
            assert_eq!(seen.len() as u128, order);
        }
    }

    #[test]
    fn mixed_field_arithmetic_is_a_usage_error() {
        let a = Field::prime(5).unwrap().embed(1);
        let b = Field::prime(7).unwrap().embed(1);
        assert!(matches!(a.checked_add(&b), Err(Error::Usage(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::Usage(_))));
        // same (q, ell) but different handles still compare equal
        let c = Field::prime(5).unwrap().embed(4);
        assert_eq!(a.checked_add(&c).unwrap(), Field::prime(5).unwrap().zero());
    }

    #[test]
    fn inverse_of_zero_is_a_domain_error() {
        for field in fixture_fields() {
            assert!(matches!(field.zero().invert(), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let f = Field::extension(7, 2).unwrap();
        for a in 0..7u64 {
            for b in 0..7u64 {
                assert_eq!(&f.embed(a) + &f.embed(b), f.embed((a + b) % 7));
                assert_eq!(&f.embed(a) * &f.embed(b), f.embed((a * b) % 7));
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_base_image() {
        for field in [Field::extension(3, 3).unwrap(), Field::extension(2, 4).unwrap()] {
            let q = u128::from(field.q());
            for i in 0..field.order() {
                let e = field.canonical_element(i).unwrap();
                let fixed = e.pow(q) == e;
                assert_eq!(fixed, e.project_base().is_some(), "element index {i}");
                // full Frobenius orbit returns home
                assert_eq!(e.pow(field.order()), e);
            }
        }
    }

    #[test]
    fn uniform_draws_pass_chi_square() {
        // 10^5 draws over the 16 elements of F_16; chi-square threshold at
        // significance 0.001 with 15 degrees of freedom.
        let field = Field::extension(2, 4).unwrap();
        let mut coins = Coins::from_seed(0xfeed);
        let mut cells = [0u64; 16];
        let n = 100_000;
        for _ in 0..n {
            let e = field.random_element(&mut coins).unwrap();
            cells[field.canonical_index(&e) as usize] += 1;
        }
        let expect = n as f64 / 16.0;
        let chi2: f64 = cells.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 37.697, "chi-square statistic {chi2} exceeds the 0.001 critical value");
        // power-of-two order: every attempt accepted, exactly 4 bits each
        assert_eq!(coins.bits_consumed(), 4 * n);
    }

    #[test]
    fn rejection_sampling_consumes_whole_attempts() {
        let field = Field::prime(5).unwrap();
        let mut coins = Coins::from_seed(9);
        for _ in 0..1000 {
            field.random_element(&mut coins).unwrap();
        }
        assert_eq!(field.sample_bits(), 3);
        assert_eq!(coins.bits_consumed() % 3, 0);
        assert!(coins.bits_consumed() >= 3000);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms_hold(seed in any::<u64>()) {
            for field in fixture_fields() {
                let mut coins = Coins::from_seed(seed);
                let a = field.random_element(&mut coins).unwrap();
                let b = field.random_element(&mut coins).unwrap();
                let c = field.random_element(&mut coins).unwrap();
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a + &field.zero(), a.clone());
                prop_assert_eq!(&a * &field.one(), a.clone());
                prop_assert_eq!(&a + &a.negate(), field.zero());
                if !a.is_zero() {
                    prop_assert_eq!(&a * &a.invert().unwrap(), field.one());
                }
                prop_assert_eq!(&a - &b, &a + &b.negate());
            }
        }

        #[test]
        fn pow_matches_repeated_multiplication(e in 0u32..40, seed in any::<u64>()) {
            let field = Field::extension(3, 3).unwrap();
            let mut coins = Coins::from_seed(seed);
            let a = field.random_element(&mut coins).unwrap();
            let mut slow = field.one();
            for _ in 0..e {
                slow = &slow * &a;
            }
            prop_assert_eq!(a.pow(u128::from(e)), slow);
        }
    }
}
