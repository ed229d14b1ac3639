//! Binary proof files.
//!
//! Layout (all integers little-endian):
//!
//! | bytes        | field                                            |
//! |--------------|--------------------------------------------------|
//! | 4            | magic `"MAEP"`                                   |
//! | 2            | format version, currently 1                      |
//! | 8            | base prime `q`                                   |
//! | 4            | extension degree `ell`                           |
//! | 8·(ell+1)    | modulus coefficients, ascending power, monic     |
//! | 8            | circuit input count `n`                          |
//! | 8            | point count `K`                                  |
//! | 8            | syntactic degree `d`                             |
//! | 4            | error exponent                                   |
//! | 8            | coefficient count, always exactly `d·(K−1)+1`    |
//! | 8·count·ell  | coefficients of `Q`, each `ell` words, ascending |
//!
//! The writer always emits the full-length coefficient vector, zero-padded
//! past the actual degree, so the file length is determined by the header
//! alone.  The parser validates everything it can locally — magic, version,
//! field usability, coefficient ranges, exact length — and reports each
//! defect class as a distinct [`ProofParseError`] variant; semantic checks
//! against a particular circuit and point list stay with
//! [`crate::ma::verify_eval`].

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ma::{Proof, ProtocolParams};
use crate::poly::DensePoly;

pub const PROOF_MAGIC: [u8; 4] = *b"MAEP";
pub const PROOF_VERSION: u16 = 1;

/// Everything that can be wrong with a proof file as a byte stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofParseError {
    /// The file does not start with `"MAEP"`.
    Magic,
    /// Unsupported format version.
    Version(u16),
    /// The stream ends before the structure is complete.
    Truncated { offset: usize, need: u128 },
    /// A header combination that no proof can have (e.g. `K = 0`).
    Header(String),
    /// The base prime / modulus do not describe a usable field.
    UnusableModulus(String),
    /// A coefficient word is not a reduced residue modulo `q`.
    Range { what: &'static str, index: usize, value: u64, q: u64 },
    /// The declared coefficient count is not `d·(K−1)+1`.
    CountMismatch { declared: u64, expected: u128 },
    /// Bytes remain after the structure is complete.
    TrailingBytes { extra: usize },
}

impl fmt::Display for ProofParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofParseError::Magic => write!(f, "not a proof file (bad magic)"),
            ProofParseError::Version(v) => {
                write!(f, "unsupported proof format version {v} (expected {PROOF_VERSION})")
            }
            ProofParseError::Truncated { offset, need } => {
                write!(f, "truncated at byte {offset}: {need} more bytes required")
            }
            ProofParseError::Header(msg) => write!(f, "impossible header: {msg}"),
            ProofParseError::UnusableModulus(msg) => write!(f, "unusable field description: {msg}"),
            ProofParseError::Range { what, index, value, q } => {
                write!(f, "{what} {index} holds {value}, not a residue modulo {q}")
            }
            ProofParseError::CountMismatch { declared, expected } => write!(
                f,
                "header declares {declared} coefficients, the degree bound fixes {expected}"
            ),
            ProofParseError::TrailingBytes { extra } => {
                write!(f, "{extra} bytes of trailing data after the proof")
            }
        }
    }
}

impl std::error::Error for ProofParseError {}

impl From<ProofParseError> for Error {
    fn from(e: ProofParseError) -> Error {
        Error::domain(format!("proof file: {e}"))
    }
}

/// Serializes a proof, zero-padding the coefficient vector to the canonical
/// `d·(K−1)+1` entries.  Rejects structurally inconsistent proofs (these can
/// only be built by hand) as usage errors.
pub fn serialize_proof(proof: &Proof) -> Result<Vec<u8>> {
    let p = &proof.params;
    let ell = p.ell as usize;
    if proof.modulus.len() != ell + 1 {
        return Err(Error::usage(format!(
            "modulus has {} coefficients, parameters require {}",
            proof.modulus.len(),
            ell + 1
        )));
    }
    let pf = proof.q_poly.field();
    if pf.q() != p.q || pf.modulus() != proof.modulus.as_slice() {
        return Err(Error::usage(
            "polynomial is not over the field described by the proof header".to_string(),
        ));
    }
    let count = u64::try_from(p.num_coeffs())
        .map_err(|_| Error::capacity("coefficient count exceeds the file format".to_string()))?;
    if (proof.q_poly.num_coeffs() as u128) > p.num_coeffs() {
        return Err(Error::usage(format!(
            "polynomial has {} coefficients, the degree bound allows {}",
            proof.q_poly.num_coeffs(),
            p.num_coeffs()
        )));
    }
    let coeff_words = (count as usize)
        .checked_mul(ell)
        .ok_or_else(|| Error::capacity("proof does not fit in memory".to_string()))?;
    let mut out = Vec::with_capacity(50 + 8 * (ell + 1) + 8 * coeff_words);
    out.extend_from_slice(&PROOF_MAGIC);
    out.extend_from_slice(&PROOF_VERSION.to_le_bytes());
    out.extend_from_slice(&p.q.to_le_bytes());
    out.extend_from_slice(&p.ell.to_le_bytes());
    for &m in &proof.modulus {
        out.extend_from_slice(&m.to_le_bytes());
    }
    out.extend_from_slice(&p.n.to_le_bytes());
    out.extend_from_slice(&p.k.to_le_bytes());
    out.extend_from_slice(&p.d.to_le_bytes());
    out.extend_from_slice(&p.eps_exp.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    let limbs = proof.q_poly.raw();
    for &w in limbs {
        out.extend_from_slice(&w.to_le_bytes());
    }
    for _ in limbs.len()..coeff_words {
        out.extend_from_slice(&0u64.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn need(&self, n: u128) -> std::result::Result<(), ProofParseError> {
        let have = (self.buf.len() - self.pos) as u128;
        if have < n {
            Err(ProofParseError::Truncated { offset: self.buf.len(), need: n - have })
        } else {
            Ok(())
        }
    }

    fn bytes(&mut self, n: usize) -> std::result::Result<&'a [u8], ProofParseError> {
        self.need(n as u128)?;
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> std::result::Result<u16, ProofParseError> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> std::result::Result<u32, ProofParseError> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, ProofParseError> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }
}

/// Parses a proof file.  Accepted bytes always round-trip:
/// `serialize_proof(&parse_proof(b)?)? == b`.
pub fn parse_proof(bytes: &[u8]) -> std::result::Result<Proof, ProofParseError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.bytes(4)? != PROOF_MAGIC {
        return Err(ProofParseError::Magic);
    }
    let version = r.u16()?;
    if version != PROOF_VERSION {
        return Err(ProofParseError::Version(version));
    }
    let q = r.u64()?;
    let ell = r.u32()?;
    let n_mod_words = u128::from(ell) + 1;
    r.need(n_mod_words * 8)?;
    let modulus: Vec<u64> = (0..=ell).map(|_| r.u64()).collect::<std::result::Result<_, _>>()?;
    for (i, &m) in modulus.iter().enumerate() {
        if q == 0 || m >= q {
            return Err(ProofParseError::Range { what: "modulus coefficient", index: i, value: m, q });
        }
    }
    let field = Field::from_modulus(q, modulus.clone())
        .map_err(|e| ProofParseError::UnusableModulus(e.to_string()))?;
    let n = r.u64()?;
    let k = r.u64()?;
    let d = r.u64()?;
    let eps_exp = r.u32()?;
    let count = r.u64()?;
    if k == 0 {
        return Err(ProofParseError::Header("a proof certifies at least one point".to_string()));
    }
    let params = ProtocolParams { q, ell, n, k, d, eps_exp };
    if u128::from(count) != params.num_coeffs() {
        return Err(ProofParseError::CountMismatch {
            declared: count,
            expected: params.num_coeffs(),
        });
    }
    let word_count = u128::from(count) * u128::from(ell);
    r.need(word_count * 8)?;
    let word_count = word_count as usize;
    let mut limbs = Vec::with_capacity(word_count);
    for w in 0..word_count {
        let v = r.u64()?;
        if v >= q {
            return Err(ProofParseError::Range {
                what: "coefficient",
                index: w / ell as usize,
                value: v,
                q,
            });
        }
        limbs.push(v);
    }
    if r.pos != bytes.len() {
        return Err(ProofParseError::TrailingBytes { extra: bytes.len() - r.pos });
    }
    let q_poly = DensePoly::from_raw(field, limbs);
    Ok(Proof { params, modulus, q_poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Gate};
    use crate::coins::Coins;
    use crate::ma::{choose_params, prove_eval, verify_eval};

    /// A proof worth shipping: 3 inputs, degree 2, K = 4 over F_7 (ell = 2).
    fn sample_proof() -> (Circuit, Vec<Vec<u64>>, Proof) {
        let c = Circuit::new(
            vec![
                Gate::Input(0),
                Gate::Input(1),
                Gate::Mul(0, 1),
                Gate::Input(2),
                Gate::Add(2, 3),
            ],
            3,
            4,
        )
        .unwrap();
        let points = vec![vec![2, 3, 1], vec![0, 0, 0], vec![6, 6, 6], vec![1, 5, 2]];
        let params = choose_params(&c, 4, 7, 2).unwrap();
        let proof = prove_eval(&c, &points, &params).unwrap();
        (c, points, proof)
    }

    fn layout_len(proof: &Proof) -> usize {
        let ell = proof.params.ell as usize;
        let count = proof.params.num_coeffs() as usize;
        4 + 2 + 8 + 4 + 8 * (ell + 1) + 8 + 8 + 8 + 4 + 8 + 8 * count * ell
    }

    #[test]
    fn round_trip_preserves_the_proof_exactly() {
        let (c, points, proof) = sample_proof();
        let bytes = serialize_proof(&proof).unwrap();
        assert_eq!(bytes.len(), layout_len(&proof));
        let back = parse_proof(&bytes).unwrap();
        assert_eq!(back, proof);
        // and the recovered proof still verifies
        let mut coins = Coins::from_seed(0);
        assert!(verify_eval(&c, &points, &back, &mut coins).unwrap().accepted());
        // byte-exact in the other direction too
        assert_eq!(serialize_proof(&back).unwrap(), bytes);
    }

    #[test]
    fn round_trips_across_field_shapes() {
        // tiny base field, larger extension
        let c = Circuit::new(vec![Gate::Input(0), Gate::Mul(0, 0)], 1, 1).unwrap();
        let points: Vec<Vec<u64>> = (0..8).map(|i| vec![i % 2]).collect();
        let params = choose_params(&c, 8, 2, 1).unwrap();
        let proof = prove_eval(&c, &points, &params).unwrap();
        assert_eq!(parse_proof(&serialize_proof(&proof).unwrap()).unwrap(), proof);

        // constant circuit: a single padded coefficient
        let c = Circuit::new(vec![Gate::Const(5)], 0, 0).unwrap();
        let points = vec![vec![]; 3];
        let params = choose_params(&c, 3, 11, 4).unwrap();
        let proof = prove_eval(&c, &points, &params).unwrap();
        let bytes = serialize_proof(&proof).unwrap();
        assert_eq!(bytes.len(), layout_len(&proof));
        assert_eq!(parse_proof(&bytes).unwrap(), proof);
    }

    #[test]
    fn padding_restores_a_short_polynomial() {
        // Force a proof whose polynomial has low degree relative to the
        // bound: the identity circuit has degree 1 but d·(K−1)+1 = 3 slots.
        let c = Circuit::new(vec![Gate::Input(0)], 1, 0).unwrap();
        let points = vec![vec![4], vec![1], vec![3]];
        let params = choose_params(&c, 3, 5, 1).unwrap();
        let proof = prove_eval(&c, &points, &params).unwrap();
        assert!(proof.q_poly.num_coeffs() < params.num_coeffs() as usize);
        let bytes = serialize_proof(&proof).unwrap();
        assert_eq!(bytes.len(), layout_len(&proof));
        assert_eq!(parse_proof(&bytes).unwrap(), proof);
    }

    #[test]
    fn every_truncation_is_reported_as_truncation() {
        let (_, _, proof) = sample_proof();
        let bytes = serialize_proof(&proof).unwrap();
        for cut in 0..bytes.len() {
            match parse_proof(&bytes[..cut]) {
                Err(ProofParseError::Truncated { .. }) => {}
                other => panic!("cut at {cut}: expected truncation, got {other:?}"),
            }
        }
    }

    #[test]
    fn header_defects_get_distinct_codes() {
        let (_, _, proof) = sample_proof();
        let bytes = serialize_proof(&proof).unwrap();

        let mut b = bytes.clone();
        b[0] = b'X';
        assert_eq!(parse_proof(&b).unwrap_err(), ProofParseError::Magic);

        let mut b = bytes.clone();
        b[4] = 2;
        assert_eq!(parse_proof(&b).unwrap_err(), ProofParseError::Version(2));

        // composite base prime (q -> 6)
        let mut b = bytes.clone();
        b[6] = 6;
        assert!(matches!(parse_proof(&b).unwrap_err(), ProofParseError::UnusableModulus(_)));

        // reducible modulus: t^2 over F_7 (words at 18..42 for ell = 2)
        let mut b = bytes.clone();
        b[18..42].copy_from_slice(&[0u8; 24]);
        b[34] = 1;
        assert!(matches!(parse_proof(&b).unwrap_err(), ProofParseError::UnusableModulus(_)));

        // modulus word out of range: set the constant term to q
        let mut b = bytes.clone();
        b[18..26].copy_from_slice(&7u64.to_le_bytes());
        assert!(matches!(
            parse_proof(&b).unwrap_err(),
            ProofParseError::Range { what: "modulus coefficient", index: 0, value: 7, q: 7 }
        ));

        // K = 0 (bytes 50..58)
        let mut b = bytes.clone();
        b[50..58].copy_from_slice(&0u64.to_le_bytes());
        assert!(matches!(parse_proof(&b).unwrap_err(), ProofParseError::Header(_)));

        // declared count off by one (bytes 70..78): d·(K−1)+1 = 7
        let mut b = bytes.clone();
        b[70..78].copy_from_slice(&8u64.to_le_bytes());
        assert_eq!(
            parse_proof(&b).unwrap_err(),
            ProofParseError::CountMismatch { declared: 8, expected: 7 }
        );
    }

    #[test]
    fn body_defects_get_distinct_codes() {
        let (_, _, proof) = sample_proof();
        let bytes = serialize_proof(&proof).unwrap();

        // first coefficient word set to q
        let mut b = bytes.clone();
        b[78..86].copy_from_slice(&7u64.to_le_bytes());
        assert_eq!(
            parse_proof(&b).unwrap_err(),
            ProofParseError::Range { what: "coefficient", index: 0, value: 7, q: 7 }
        );

        // word 5 belongs to coefficient 2 (ell = 2)
        let mut b = bytes.clone();
        b[78 + 5 * 8..78 + 6 * 8].copy_from_slice(&99u64.to_le_bytes());
        assert_eq!(
            parse_proof(&b).unwrap_err(),
            ProofParseError::Range { what: "coefficient", index: 2, value: 99, q: 7 }
        );

        let mut b = bytes.clone();
        b.extend_from_slice(&[0, 0, 0]);
        assert_eq!(parse_proof(&b).unwrap_err(), ProofParseError::TrailingBytes { extra: 3 });
    }

    #[test]
    fn serializer_rejects_inconsistent_structures() {
        let (_, _, proof) = sample_proof();

        let mut p = proof.clone();
        p.modulus.push(0);
        assert!(matches!(serialize_proof(&p), Err(Error::Usage(_))));

        let mut p = proof.clone();
        p.q_poly = DensePoly::from_base_coeffs(&Field::prime(5).unwrap(), &[1, 2]);
        assert!(matches!(serialize_proof(&p), Err(Error::Usage(_))));

        let mut p = proof.clone();
        let field = p.q_poly.field().clone();
        p.q_poly = DensePoly::monomial(&field, p.params.num_coeffs() as usize);
        assert!(matches!(serialize_proof(&p), Err(Error::Usage(_))));
    }

    #[test]
    fn parse_errors_convert_into_module_errors() {
        let e: Error = ProofParseError::Magic.into();
        match e {
            Error::Domain(msg) => assert!(msg.contains("bad magic")),
            other => panic!("unexpected conversion target {other:?}"),
        }
    }
}
