//! Dense univariate polynomials over a [`Field`].
//!
//! Coefficients live in a flat little-endian limb buffer, `ell` limbs per
//! coefficient, with trailing zero coefficients trimmed; the zero polynomial
//! is the empty buffer and reports degree `None`.
//!
//! Multiplication dispatches on size: schoolbook when the shorter factor is
//! small, Karatsuba in the middle band, and NTT-based convolution (native or
//! three-prime CRT, see [`ntt`]) once the result is large.  Extension-field
//! products beyond the schoolbook band drop to base-field convolutions by
//! Kronecker substitution.  Division switches from long division to a
//! Newton-iteration inverse series at the same scale, and batch evaluation /
//! interpolation run over a shared subproduct tree ([`tree`]).

mod ntt;
mod tree;

pub(crate) use tree::{Interpolator, SubproductTree};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldRepr};

/// Products whose shorter factor has fewer coefficients than this run
/// schoolbook.
const SCHOOLBOOK_MAX: usize = 64;
/// Products with at least this many result coefficients (and both factors
/// beyond the schoolbook band) run as NTT convolutions; between the two
/// bounds, Karatsuba.
const NTT_MIN_RESULT: usize = 256;
/// Extension-field products whose shorter factor reaches this many
/// coefficients are packed into base-field products (Kronecker
/// substitution).
const KRONECKER_MIN: usize = 32;
/// Divisions where both the divisor degree and the quotient length reach
/// this size use the Newton inverse-series path.
const NEWTON_MIN: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct DensePoly {
    field: Field,
    /// `num_coeffs * ell` limbs, trailing zero coefficients trimmed.
    limbs: Vec<u64>,
}

impl DensePoly {
    pub fn zero(field: &Field) -> DensePoly {
        DensePoly {
            field: field.clone(),
            limbs: vec![],
        }
    }

    pub fn constant(c: &FieldElement) -> DensePoly {
        DensePoly::from_coeffs(c.field(), std::slice::from_ref(c))
            .expect("constant coefficient trivially matches its own field")
    }

    /// The monomial `x^k`.
    pub fn monomial(field: &Field, k: usize) -> DensePoly {
        let ell = field.ell();
        let mut limbs = vec![0u64; (k + 1) * ell];
        limbs[k * ell] = 1;
        DensePoly {
            field: field.clone(),
            limbs,
        }
    }

    /// Build from coefficients in ascending order of degree.
    pub fn from_coeffs(field: &Field, coeffs: &[FieldElement]) -> Result<DensePoly> {
        let ell = field.ell();
        let mut limbs = Vec::with_capacity(coeffs.len() * ell);
        for c in coeffs {
            if c.field() != field {
                return Err(Error::usage(format!(
                    "coefficient from {} used in a polynomial over {}",
                    c.field(),
                    field
                )));
            }
            limbs.extend_from_slice(c.limbs());
        }
        trim_raw(ell, &mut limbs);
        Ok(DensePoly {
            field: field.clone(),
            limbs,
        })
    }

    /// Build from base-field residues (reduced modulo `q` here), ascending.
    pub fn from_base_coeffs(field: &Field, coeffs: &[u64]) -> DensePoly {
        let ell = field.ell();
        let q = field.q();
        let mut limbs = vec![0u64; coeffs.len() * ell];
        for (i, &c) in coeffs.iter().enumerate() {
            limbs[i * ell] = c % q;
        }
        trim_raw(ell, &mut limbs);
        DensePoly {
            field: field.clone(),
            limbs,
        }
    }

    pub(crate) fn from_raw(field: Field, mut limbs: Vec<u64>) -> DensePoly {
        trim_raw(field.ell(), &mut limbs);
        DensePoly { field, limbs }
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.limbs
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let n = self.num_coeffs();
        if n == 0 {
            None
        } else {
            Some(n - 1)
        }
    }

    pub fn num_coeffs(&self) -> usize {
        self.limbs.len() / self.field.ell()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        let ell = self.field.ell();
        if i >= self.num_coeffs() {
            return self.field.zero();
        }
        self.field
            .from_limbs(self.limbs[i * ell..(i + 1) * ell].to_vec())
            .expect("stored limbs are always reduced")
    }

    pub fn coeffs(&self) -> Vec<FieldElement> {
        (0..self.num_coeffs()).map(|i| self.coeff(i)).collect()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.field {
            return Err(Error::usage(format!(
                "evaluating a polynomial over {} at a point from {}",
                self.field,
                x.field()
            )));
        }
        let out = raw_eval(self.field.repr(), &self.limbs, x.limbs());
        Ok(self
            .field
            .from_limbs(out)
            .expect("evaluation limbs are always reduced"))
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly> {
        self.check_same_field(other)?;
        let mut out = raw_add(self.field.repr(), &self.limbs, &other.limbs);
        trim_raw(self.field.ell(), &mut out);
        Ok(DensePoly {
            field: self.field.clone(),
            limbs: out,
        })
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly> {
        self.check_same_field(other)?;
        let mut out = raw_sub(self.field.repr(), &self.limbs, &other.limbs);
        trim_raw(self.field.ell(), &mut out);
        Ok(DensePoly {
            field: self.field.clone(),
            limbs: out,
        })
    }

    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        self.check_same_field(other)?;
        let out = raw_mul(self.field.repr(), &self.limbs, &other.limbs);
        Ok(DensePoly {
            field: self.field.clone(),
            limbs: out,
        })
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, den: &DensePoly) -> Result<(DensePoly, DensePoly)> {
        self.check_same_field(den)?;
        let (q, r) = raw_divrem(self.field.repr(), &self.limbs, &den.limbs)?;
        Ok((
            DensePoly {
                field: self.field.clone(),
                limbs: q,
            },
            DensePoly {
                field: self.field.clone(),
                limbs: r,
            },
        ))
    }

    pub fn derivative(&self) -> DensePoly {
        let mut out = raw_derivative(self.field.repr(), &self.limbs);
        trim_raw(self.field.ell(), &mut out);
        DensePoly {
            field: self.field.clone(),
            limbs: out,
        }
    }

    /// Evaluate at many points at once over a subproduct tree.  Duplicate
    /// points are allowed here (unlike interpolation).
    pub fn multipoint_eval(&self, points: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if points.is_empty() {
            return Ok(vec![]);
        }
        let tree = SubproductTree::build(&self.field, points)?;
        tree.eval(&self.limbs)
    }

    /// The unique polynomial of degree `< points.len()` through the given
    /// (point, value) pairs.  Points must be distinct.
    pub fn interpolate(points: &[FieldElement], values: &[FieldElement]) -> Result<DensePoly> {
        if points.is_empty() {
            return Err(Error::usage(
                "interpolation needs at least one node".to_string(),
            ));
        }
        if points.len() != values.len() {
            return Err(Error::usage(format!(
                "interpolation got {} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let field = points[0].field().clone();
        let interp = Interpolator::new(SubproductTree::build(&field, points)?)?;
        interp.interpolate(values)
    }

    fn check_same_field(&self, other: &DensePoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::usage(format!(
                "polynomial arithmetic between {} and {}",
                self.field, other.field
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for DensePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensePoly(deg {:?} over {})", self.degree(), self.field)
    }
}

// ---------------------------------------------------------------------------
// Raw kernels on flat limb buffers.  All lengths are multiples of `ell`;
// outputs are trimmed only where noted.
// ---------------------------------------------------------------------------

pub(crate) fn trim_raw(ell: usize, limbs: &mut Vec<u64>) {
    while !limbs.is_empty() {
        let n = limbs.len();
        if limbs[n - ell..].iter().all(|&c| c == 0) {
            limbs.truncate(n - ell);
        } else {
            break;
        }
    }
}

/// Untrimmed sum, length `max(a, b)`.
pub(crate) fn raw_add(repr: &FieldRepr, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    let ell = repr.ell();
    for i in 0..short.len() / ell {
        repr.limb_acc(&mut out[i * ell..(i + 1) * ell], &short[i * ell..(i + 1) * ell]);
    }
    out
}

/// Untrimmed difference `a - b`, length `max(a, b)`.
pub(crate) fn raw_sub(repr: &FieldRepr, a: &[u64], b: &[u64]) -> Vec<u64> {
    let ell = repr.ell();
    let len = a.len().max(b.len());
    let mut out = a.to_vec();
    out.resize(len, 0);
    for i in 0..b.len() / ell {
        repr.limb_dec(&mut out[i * ell..(i + 1) * ell], &b[i * ell..(i + 1) * ell]);
    }
    out
}

/// Trimmed product.
pub(crate) fn raw_mul(repr: &FieldRepr, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let ell = repr.ell();
    let mut out = if ell == 1 {
        base_poly_mul(repr.q(), a, b)
    } else {
        let (la, lb) = (a.len() / ell, b.len() / ell);
        if la.min(lb) < KRONECKER_MIN {
            schoolbook_ext(repr, a, b)
        } else {
            kronecker_ext(repr, a, b)
        }
    };
    trim_raw(ell, &mut out);
    out
}

/// Base-field product, full (untrimmed) length `a.len() + b.len() - 1`.
/// This is both the `ell == 1` entry point and the backend that Kronecker
/// packing reduces extension products to.
fn base_poly_mul(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let result_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) < SCHOOLBOOK_MAX {
        schoolbook_base(q, a, b)
    } else if result_len >= NTT_MIN_RESULT {
        ntt::base_mul_ntt(q, a, b)
    } else {
        karatsuba_base(q, a, b)
    }
}

/// Quadratic product with lazily reduced 128-bit accumulators.
fn schoolbook_base(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let q128 = u128::from(q);
    let sq = u128::from(q - 1) * u128::from(q - 1);
    // How many term products fit before a reduction is forced.
    let chunk = u128::MAX / sq.max(1);
    let out_len = a.len() + b.len() - 1;
    let mut out = Vec::with_capacity(out_len);
    for k in 0..out_len {
        let lo = (k + 1).saturating_sub(b.len());
        let hi = (k + 1).min(a.len());
        let mut acc = 0u128;
        let mut cnt = 0u128;
        for i in lo..hi {
            acc += u128::from(a[i]) * u128::from(b[k - i]);
            cnt += 1;
            if cnt == chunk {
                acc %= q128;
                cnt = 0;
            }
        }
        out.push((acc % q128) as u64);
    }
    let terms = (a.len() * b.len()) as u64;
    crate::ops::mul(terms);
    crate::ops::add(terms);
    out
}

fn karatsuba_base(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = base_poly_mul(q, a0, b0);
    let z2 = if !a1.is_empty() && !b1.is_empty() {
        base_poly_mul(q, a1, b1)
    } else {
        vec![]
    };
    let sa = add_vec_base(q, a0, a1);
    let sb = add_vec_base(q, b0, b1);
    let mut z1 = base_poly_mul(q, &sa, &sb);
    sub_at_base(q, &mut z1, &z0, 0);
    sub_at_base(q, &mut z1, &z2, 0);
    let mut out = vec![0u64; a.len() + b.len() - 1];
    add_at_base(q, &mut out, &z0, 0);
    add_at_base(q, &mut out, &z1, m);
    add_at_base(q, &mut out, &z2, 2 * m);
    out
}

fn add_vec_base(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (x, &y) in out.iter_mut().zip(short.iter()) {
        let s = *x + y;
        *x = if s >= q { s - q } else { s };
    }
    crate::ops::add(short.len() as u64);
    out
}

fn add_at_base(q: u64, acc: &mut [u64], x: &[u64], offset: usize) {
    debug_assert!(offset + x.len() <= acc.len() || x.is_empty());
    for (slot, &v) in acc[offset..].iter_mut().zip(x.iter()) {
        let s = *slot + v;
        *slot = if s >= q { s - q } else { s };
    }
    crate::ops::add(x.len() as u64);
}

fn sub_at_base(q: u64, acc: &mut [u64], x: &[u64], offset: usize) {
    debug_assert!(offset + x.len() <= acc.len() || x.is_empty());
    for (slot, &v) in acc[offset..].iter_mut().zip(x.iter()) {
        *slot = if *slot >= v { *slot - v } else { *slot + q - v };
    }
    crate::ops::add(x.len() as u64);
}

/// Quadratic extension-field product through the per-element kernels.
fn schoolbook_ext(repr: &FieldRepr, a: &[u64], b: &[u64]) -> Vec<u64> {
    let ell = repr.ell();
    let (la, lb) = (a.len() / ell, b.len() / ell);
    let mut out = vec![0u64; (la + lb - 1) * ell];
    let mut tmp = vec![0u64; ell];
    let mut scratch = Vec::new();
    for i in 0..la {
        let ai = &a[i * ell..(i + 1) * ell];
        if ai.iter().all(|&c| c == 0) {
            continue;
        }
        for j in 0..lb {
            let bj = &b[j * ell..(j + 1) * ell];
            repr.limb_mul(ai, bj, &mut tmp, &mut scratch);
            let k = (i + j) * ell;
            repr.limb_acc(&mut out[k..k + ell], &tmp);
        }
    }
    out
}

/// Extension-field product by packing each coefficient into a block of
/// `2*ell - 1` base slots, convolving over the base field, and folding each
/// result block back through the modulus.
fn kronecker_ext(repr: &FieldRepr, a: &[u64], b: &[u64]) -> Vec<u64> {
    let ell = repr.ell();
    let bsz = 2 * ell - 1;
    let (la, lb) = (a.len() / ell, b.len() / ell);
    let mut pa = vec![0u64; la * bsz];
    for i in 0..la {
        pa[i * bsz..i * bsz + ell].copy_from_slice(&a[i * ell..(i + 1) * ell]);
    }
    let mut pb = vec![0u64; lb * bsz];
    for i in 0..lb {
        pb[i * bsz..i * bsz + ell].copy_from_slice(&b[i * ell..(i + 1) * ell]);
    }
    let prod = base_poly_mul(repr.q(), &pa, &pb);
    let lc = la + lb - 1;
    let mut out = vec![0u64; lc * ell];
    for k in 0..lc {
        let start = k * bsz;
        let end = (start + bsz).min(prod.len());
        repr.reduce_product(&prod[start..end], &mut out[k * ell..(k + 1) * ell]);
    }
    out
}

/// Trimmed `(quotient, remainder)`; errors on a zero divisor.
pub(crate) fn raw_divrem(repr: &FieldRepr, num: &[u64], den: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let ell = repr.ell();
    let mut den_t = den.to_vec();
    trim_raw(ell, &mut den_t);
    if den_t.is_empty() {
        return Err(Error::domain("division by the zero polynomial".to_string()));
    }
    let mut num_t = num.to_vec();
    trim_raw(ell, &mut num_t);
    let dd = den_t.len() / ell - 1;
    if num_t.is_empty() || num_t.len() / ell - 1 < dd {
        return Ok((vec![], num_t));
    }
    let dn = num_t.len() / ell - 1;
    let qlen = dn - dd + 1;
    if dd >= NEWTON_MIN && qlen >= NEWTON_MIN {
        newton_divrem(repr, &num_t, &den_t, dd, dn)
    } else {
        schoolbook_divrem(repr, &num_t, &den_t, dd, dn)
    }
}

fn schoolbook_divrem(
    repr: &FieldRepr,
    num: &[u64],
    den: &[u64],
    dd: usize,
    dn: usize,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let ell = repr.ell();
    let lead = &den[dd * ell..(dd + 1) * ell];
    let monic = lead[0] == 1 && lead[1..].iter().all(|&c| c == 0);
    let lead_inv = if monic { None } else { Some(repr.limb_inv(lead)?) };
    let mut rem = num.to_vec();
    let qlen = dn - dd + 1;
    let mut quot = vec![0u64; qlen * ell];
    let mut tmp = vec![0u64; ell];
    let mut scratch = Vec::new();
    for shift in (0..qlen).rev() {
        let dr = (shift + dd) * ell;
        if rem[dr..dr + ell].iter().all(|&c| c == 0) {
            continue;
        }
        let coef: Vec<u64> = match &lead_inv {
            None => rem[dr..dr + ell].to_vec(),
            Some(li) => {
                let top = rem[dr..dr + ell].to_vec();
                repr.limb_mul(&top, li, &mut tmp, &mut scratch);
                tmp.clone()
            }
        };
        quot[shift * ell..(shift + 1) * ell].copy_from_slice(&coef);
        for k in 0..=dd {
            let dk = &den[k * ell..(k + 1) * ell];
            if dk.iter().all(|&c| c == 0) {
                continue;
            }
            repr.limb_mul(&coef, dk, &mut tmp, &mut scratch);
            let at = (shift + k) * ell;
            repr.limb_dec(&mut rem[at..at + ell], &tmp);
        }
    }
    rem.truncate(dd * ell);
    trim_raw(ell, &mut rem);
    trim_raw(ell, &mut quot);
    Ok((quot, rem))
}

fn newton_divrem(
    repr: &FieldRepr,
    num: &[u64],
    den: &[u64],
    dd: usize,
    dn: usize,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let ell = repr.ell();
    let qlen = dn - dd + 1;
    let rden = reverse_coeffs(ell, den, dd + 1);
    let inv = inverse_series(repr, &rden, qlen)?;
    let rnum = reverse_coeffs(ell, num, dn + 1);
    let mut qr = raw_mul(repr, &rnum, &inv);
    qr.resize(qlen * ell, 0);
    let mut quot = reverse_coeffs(ell, &qr, qlen);
    trim_raw(ell, &mut quot);
    let dq = raw_mul(repr, den, &quot);
    let mut rem = raw_sub(repr, num, &dq);
    debug_assert!(rem[dd * ell..].iter().all(|&c| c == 0));
    rem.truncate(dd * ell);
    trim_raw(ell, &mut rem);
    Ok((quot, rem))
}

/// First `len_coeffs` coefficients in reverse order (missing ones read as
/// zero).
fn reverse_coeffs(ell: usize, limbs: &[u64], len_coeffs: usize) -> Vec<u64> {
    let n = limbs.len() / ell;
    let mut out = vec![0u64; len_coeffs * ell];
    for i in 0..len_coeffs.min(n) {
        let dst = (len_coeffs - 1 - i) * ell;
        out[dst..dst + ell].copy_from_slice(&limbs[i * ell..(i + 1) * ell]);
    }
    out
}

/// Power-series inverse of `f` (constant term invertible) to `t` terms, by
/// Newton iteration `I <- I * (2 - f * I)`.
fn inverse_series(repr: &FieldRepr, f: &[u64], t: usize) -> Result<Vec<u64>> {
    let ell = repr.ell();
    debug_assert!(!f.is_empty());
    let mut cur = repr.limb_inv(&f[..ell])?;
    let two = {
        let mut v = vec![0u64; ell];
        v[0] = 2 % repr.q();
        v
    };
    let mut prec = 1usize;
    while prec < t {
        let p2 = (2 * prec).min(t);
        let ft = &f[..f.len().min(p2 * ell)];
        let mut fi = raw_mul(repr, ft, &cur);
        fi.truncate(p2 * ell);
        // g = 2 - f*I
        let mut g = fi;
        for i in 0..g.len() / ell {
            repr.limb_neg(&mut g[i * ell..(i + 1) * ell]);
        }
        if g.is_empty() {
            g = vec![0u64; ell];
        }
        repr.limb_acc(&mut g[..ell], &two);
        let mut next = raw_mul(repr, &cur, &g);
        next.truncate(p2 * ell);
        cur = next;
        prec = p2;
    }
    cur.resize(t * ell, 0);
    Ok(cur)
}

/// Horner evaluation on raw limbs.
pub(crate) fn raw_eval(repr: &FieldRepr, poly: &[u64], x: &[u64]) -> Vec<u64> {
    let ell = repr.ell();
    let n = poly.len() / ell;
    let mut acc = vec![0u64; ell];
    let mut tmp = vec![0u64; ell];
    let mut scratch = Vec::new();
    for i in (0..n).rev() {
        if acc.iter().any(|&c| c != 0) {
            repr.limb_mul(&acc.clone(), x, &mut tmp, &mut scratch);
            acc.copy_from_slice(&tmp);
        }
        repr.limb_acc(&mut acc, &poly[i * ell..(i + 1) * ell]);
    }
    acc
}

/// Formal derivative, untrimmed.
pub(crate) fn raw_derivative(repr: &FieldRepr, poly: &[u64]) -> Vec<u64> {
    let ell = repr.ell();
    let n = poly.len() / ell;
    if n <= 1 {
        return vec![];
    }
    let q = repr.q();
    let mut out = vec![0u64; (n - 1) * ell];
    for i in 1..n {
        let s = (i as u128 % u128::from(q)) as u64;
        repr.limb_scale(
            s,
            &poly[i * ell..(i + 1) * ell],
            &mut out[(i - 1) * ell..i * ell],
        );
    }
    out
}

/// Invert every element in place with one field inversion plus `3(n-1)`
/// multiplications.  Errors if any element is zero.
pub(crate) fn raw_batch_invert(repr: &FieldRepr, vals: &mut [Vec<u64>]) -> Result<()> {
    let n = vals.len();
    if n == 0 {
        return Ok(());
    }
    let ell = repr.ell();
    let mut prefix: Vec<Vec<u64>> = Vec::with_capacity(n);
    prefix.push(vals[0].clone());
    let mut tmp = vec![0u64; ell];
    let mut scratch = Vec::new();
    for v in vals.iter().skip(1) {
        repr.limb_mul(prefix.last().unwrap(), v, &mut tmp, &mut scratch);
        prefix.push(tmp.clone());
    }
    let mut inv_all = repr.limb_inv(prefix.last().unwrap())?;
    for i in (1..n).rev() {
        repr.limb_mul(&inv_all, &prefix[i - 1], &mut tmp, &mut scratch);
        let elem_inv = tmp.clone();
        repr.limb_mul(&inv_all, &vals[i], &mut tmp, &mut scratch);
        inv_all = tmp.clone();
        vals[i] = elem_inv;
    }
    vals[0] = inv_all;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::ops;

    fn f(q: u64) -> Field {
        Field::prime(q).unwrap()
    }

    fn elems(field: &Field, vals: &[u64]) -> Vec<FieldElement> {
        vals.iter().map(|&v| field.embed(v)).collect()
    }

    fn poly(field: &Field, coeffs: &[u64]) -> DensePoly {
        DensePoly::from_base_coeffs(field, coeffs)
    }

    /// Independent quadratic reference product over any field.
    fn oracle_mul(a: &DensePoly, b: &DensePoly) -> DensePoly {
        let field = a.field().clone();
        let (la, lb) = (a.num_coeffs(), b.num_coeffs());
        if la == 0 || lb == 0 {
            return DensePoly::zero(&field);
        }
        let mut out = vec![field.zero(); la + lb - 1];
        for i in 0..la {
            for j in 0..lb {
                let t = (&a.coeff(i) * &b.coeff(j)).clone();
                out[i + j] = &out[i + j] + &t;
            }
        }
        DensePoly::from_coeffs(&field, &out).unwrap()
    }

    fn pseudorandom_poly(field: &Field, len: usize, seed: u64) -> DensePoly {
        let mut s = seed;
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            let mut limbs = Vec::with_capacity(field.ell());
            for _ in 0..field.ell() {
                s = s.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = s;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                limbs.push((z ^ (z >> 31)) % field.q());
            }
            coeffs.push(field.from_limbs(limbs).unwrap());
        }
        DensePoly::from_coeffs(field, &coeffs).unwrap()
    }

    #[test]
    fn product_of_one_plus_x_and_one_minus_x_over_f5() {
        let f5 = f(5);
        let a = poly(&f5, &[1, 1]);
        let b = poly(&f5, &[1, 4]); // 1 - x
        let c = a.mul(&b).unwrap();
        assert_eq!(c, poly(&f5, &[1, 0, 4])); // 1 - x^2
        assert_eq!(c.degree(), Some(2));
    }

    #[test]
    fn square_function_values_over_f7() {
        let f7 = f(7);
        let p = poly(&f7, &[0, 0, 1]); // x^2
        let pts = elems(&f7, &[0, 1, 2]);
        let vals = p.multipoint_eval(&pts).unwrap();
        assert_eq!(vals, elems(&f7, &[0, 1, 4]));
    }

    #[test]
    fn interpolation_recovers_the_square_function_over_f7() {
        let f7 = f(7);
        let pts = elems(&f7, &[0, 1, 2]);
        let vals = elems(&f7, &[0, 1, 4]);
        let p = DensePoly::interpolate(&pts, &vals).unwrap();
        assert_eq!(p, poly(&f7, &[0, 0, 1]));
    }

    #[test]
    fn horner_cube_at_two_over_f11() {
        let f11 = f(11);
        let p = poly(&f11, &[0, 0, 0, 1]); // x^3
        assert_eq!(p.eval(&f11.embed(2)).unwrap(), f11.embed(8));
    }

    #[test]
    fn zero_polynomial_behaviour() {
        let f7 = f(7);
        let z = DensePoly::zero(&f7);
        assert_eq!(z.degree(), None);
        assert!(z.is_zero());
        assert_eq!(z.eval(&f7.embed(3)).unwrap(), f7.zero());
        let p = poly(&f7, &[1, 2]);
        assert!(p.mul(&z).unwrap().is_zero());
        assert_eq!(p.add(&z).unwrap(), p);
        // adding the negation trims back to zero
        let n = DensePoly::zero(&f7).sub(&p).unwrap();
        assert!(p.add(&n).unwrap().is_zero());
    }

    #[test]
    fn multiplication_matches_oracle_across_dispatch_bands() {
        // Covers schoolbook (<64), Karatsuba (result in 127..256), native
        // NTT, CRT NTT, extension schoolbook (<32) and Kronecker packing.
        let fields = [
            f(5),
            f((1 << 61) - 1),
            f(29 * (1 << 57) + 1),
            Field::extension(2, 4).unwrap(),
            Field::extension(3, 3).unwrap(),
            Field::extension(1_048_583, 2).unwrap(),
        ];
        let lens = [(1usize, 1usize), (2, 7), (63, 63), (65, 64), (70, 100), (150, 150), (200, 513)];
        for field in &fields {
            for &(la, lb) in &lens {
                let a = pseudorandom_poly(field, la, (la * 31 + lb) as u64);
                let b = pseudorandom_poly(field, lb, (lb * 77 + la) as u64);
                let got = a.mul(&b).unwrap();
                let want = oracle_mul(&a, &b);
                assert_eq!(got, want, "field {field} sizes {la}x{lb}");
            }
        }
    }

    #[test]
    fn degrees_add_under_multiplication() {
        let field = f(101);
        for (la, lb) in [(1, 5), (40, 40), (130, 3), (300, 300)] {
            let a = pseudorandom_poly(&field, la, la as u64);
            let b = pseudorandom_poly(&field, lb, lb as u64 + 9);
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                assert_eq!(a.mul(&b).unwrap().degree(), Some(da + db));
            }
        }
    }

    #[test]
    fn division_identity_on_both_paths() {
        let fields = [f(1_048_583), Field::extension(5, 2).unwrap()];
        // (num_len, den_len): first exercises schoolbook, second Newton.
        let shapes = [(50usize, 8usize), (300, 80), (400, 65), (90, 90)];
        for field in &fields {
            for &(ln, ld) in &shapes {
                let num = pseudorandom_poly(field, ln, (ln + ld) as u64);
                let den = pseudorandom_poly(field, ld, ld as u64 * 3 + 1);
                let (q, r) = num.divrem(&den).unwrap();
                let back = q.mul(&den).unwrap().add(&r).unwrap();
                assert_eq!(back, num, "field {field} shape {ln}/{ld}");
                if let Some(dr) = r.degree() {
                    assert!(dr < den.degree().unwrap());
                }
            }
        }
    }

    #[test]
    fn newton_and_schoolbook_division_agree() {
        let field = f(97);
        let num = pseudorandom_poly(&field, 310, 5);
        let den = pseudorandom_poly(&field, 70, 6);
        let fast = raw_divrem(field.repr(), num.raw(), den.raw()).unwrap();
        let slow = schoolbook_divrem(
            field.repr(),
            num.raw(),
            den.raw(),
            den.num_coeffs() - 1,
            num.num_coeffs() - 1,
        )
        .unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let f7 = f(7);
        let p = poly(&f7, &[1, 2, 3]);
        assert!(p.divrem(&DensePoly::zero(&f7)).is_err());
    }

    #[test]
    fn division_by_larger_degree_returns_numerator() {
        let f7 = f(7);
        let p = poly(&f7, &[1, 2]);
        let d = poly(&f7, &[0, 0, 1]);
        let (q, r) = p.divrem(&d).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, p);
    }

    #[test]
    fn inverse_series_multiplies_to_one() {
        for field in [f(101), Field::extension(3, 3).unwrap()] {
            let mut fpoly = pseudorandom_poly(&field, 90, 17);
            // force an invertible constant term
            let mut limbs = fpoly.raw().to_vec();
            limbs[0] = 1;
            fpoly = DensePoly::from_raw(field.clone(), limbs);
            let t = 75;
            let inv = inverse_series(field.repr(), fpoly.raw(), t).unwrap();
            let mut prod = raw_mul(field.repr(), fpoly.raw(), &inv);
            prod.truncate(t * field.ell());
            trim_raw(field.ell(), &mut prod);
            let mut one = vec![0u64; field.ell()];
            one[0] = 1;
            assert_eq!(prod, one, "field {field}");
        }
    }

    #[test]
    fn derivative_drops_degree_and_scales() {
        let f7 = f(7);
        // 3 + 2x + 5x^3 -> 2 + 15x^2 = 2 + x^2
        let p = poly(&f7, &[3, 2, 0, 5]);
        assert_eq!(p.derivative(), poly(&f7, &[2, 0, 1]));
        assert!(poly(&f7, &[4]).derivative().is_zero());
        // char divides the exponent: d/dx x^7 = 7x^6 = 0 over F_7
        assert!(DensePoly::monomial(&f7, 7).derivative().is_zero());
    }

    #[test]
    fn multipoint_agrees_with_individual_evaluation() {
        for field in [f(1_048_583), Field::extension(2, 4).unwrap()] {
            let p = pseudorandom_poly(&field, 40, 3);
            let npts = (field.order().min(14)) as usize;
            let pts: Vec<FieldElement> = (0..npts)
                .map(|i| field.canonical_element(i as u128).unwrap())
                .collect();
            let vals = p.multipoint_eval(&pts).unwrap();
            for (pt, v) in pts.iter().zip(vals.iter()) {
                assert_eq!(p.eval(pt).unwrap(), *v);
            }
        }
    }

    #[test]
    fn multipoint_tolerates_duplicate_points() {
        let f7 = f(7);
        let p = poly(&f7, &[1, 1]);
        let pts = elems(&f7, &[3, 3, 5]);
        let vals = p.multipoint_eval(&pts).unwrap();
        assert_eq!(vals, elems(&f7, &[4, 4, 6]));
    }

    #[test]
    fn interpolation_round_trips_at_scale() {
        // Large enough that the tree's internal products cross the NTT
        // threshold.
        for field in [f(1_048_583), Field::extension(1_048_583, 2).unwrap()] {
            let n = 600usize;
            let p = pseudorandom_poly(&field, n, 11);
            let pts: Vec<FieldElement> = (0..n)
                .map(|i| field.canonical_element(i as u128).unwrap())
                .collect();
            let vals = p.multipoint_eval(&pts).unwrap();
            let back = DensePoly::interpolate(&pts, &vals).unwrap();
            assert_eq!(back, p, "field {field}");
        }
    }

    #[test]
    fn interpolation_rejects_duplicate_abscissae() {
        let f7 = f(7);
        let pts = elems(&f7, &[1, 4, 1]);
        let vals = elems(&f7, &[0, 1, 2]);
        let err = DensePoly::interpolate(&pts, &vals).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("duplicate"), "got: {msg}");
        assert!(msg.contains('1'), "names the offending point: {msg}");
    }

    #[test]
    fn interpolation_input_validation() {
        let f7 = f(7);
        assert!(DensePoly::interpolate(&[], &[]).is_err());
        let pts = elems(&f7, &[1, 2]);
        let vals = elems(&f7, &[1]);
        assert!(DensePoly::interpolate(&pts, &vals).is_err());
    }

    #[test]
    fn cross_field_operations_are_rejected() {
        let a = poly(&f(7), &[1]);
        let b = poly(&f(11), &[1]);
        assert!(a.mul(&b).is_err());
        assert!(a.add(&b).is_err());
        assert!(a.eval(&f(11).embed(3)).is_err());
    }

    #[test]
    fn batch_inversion_matches_single_inversions() {
        let field = Field::extension(7, 2).unwrap();
        let mut vals: Vec<Vec<u64>> = (1..20u128)
            .map(|i| field.canonical_element(i).unwrap().limbs().to_vec())
            .collect();
        let expect: Vec<Vec<u64>> = vals
            .iter()
            .map(|v| field.repr().limb_inv(v).unwrap())
            .collect();
        raw_batch_invert(field.repr(), &mut vals).unwrap();
        assert_eq!(vals, expect);
        // a zero in the batch is an error
        let mut with_zero = vec![vec![1, 0], vec![0, 0]];
        assert!(raw_batch_invert(field.repr(), &mut with_zero).is_err());
    }

    #[test]
    fn operation_counting_covers_the_ntt_path() {
        let field = f(29 * (1 << 57) + 1);
        let a = pseudorandom_poly(&field, 300, 1);
        let b = pseudorandom_poly(&field, 300, 2);
        ops::reset();
        let _ = ops::scoped(ops::Phase::Prover, || a.mul(&b).unwrap());
        let rep = ops::report();
        // NTT work must be visible to the counter: well above the result
        // length, well below schoolbook's 90k products.
        assert!(rep.prover.muls > 5_000, "counted {}", rep.prover.muls);
        assert!(rep.prover.muls < 90_000, "counted {}", rep.prover.muls);
    }

    #[test]
    fn shared_interpolator_reuses_one_tree_for_many_columns() {
        let field = f(101);
        let pts: Vec<FieldElement> = (0..30)
            .map(|i| field.canonical_element(i as u128).unwrap())
            .collect();
        let tree = SubproductTree::build(&field, &pts).unwrap();
        let interp = Interpolator::new(tree).unwrap();
        for seed in [5u64, 6, 7] {
            let p = pseudorandom_poly(&field, 30, seed);
            let vals: Vec<FieldElement> =
                pts.iter().map(|pt| p.eval(pt).unwrap()).collect();
            assert_eq!(interp.interpolate(&vals).unwrap(), p);
        }
    }
}
