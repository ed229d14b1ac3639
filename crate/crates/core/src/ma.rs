//! The core proof system: certify the values of an arithmetic circuit at
//! many points with one prover message and one verifier coin.
//!
//! Both parties agree on a circuit `C` over `F_q` (degree `d`, `n` inputs),
//! `K` evaluation points `a_1..a_K` in `F_q^n`, and an error exponent `t`.
//! Parameter selection picks the minimal extension `F_{q^ell}` with
//! `q^ell > d·K·2^t`.  The interpolants `Ψ_j` through `Ψ_j(α_i) = a_i[j]`
//! (abscissae `α_i` = the canonical enumeration of the field) compress the
//! point list into `n` univariate polynomials, so the single composite
//! `R(x) = C(Ψ_1(x),…,Ψ_n(x))` of degree ≤ `d·(K−1)` carries every value
//! `R(α_i) = C(a_i)`.
//!
//! The prover sends `Q` (claimed to be `R`) by coefficients.  The verifier
//! spends its one random element `r` on the spot check `Q(r) = C(Ψ(r))` —
//! any `Q ≠ R` survives for at most `deg(Q − R) ≤ d·K` choices of `r`, i.e.
//! with probability below `2^{−t}` — then reads all `K` certified values out
//! of `Q` by multipoint evaluation.  Structural defects (wrong parameters,
//! reducible modulus, oversize coefficient vector) are rejected before any
//! coin is tossed.
//!
//! Nothing here scopes the operation counters; callers that want cost
//! reports wrap calls in [`crate::ops::scoped`].

use crate::circuit::Circuit;
use crate::coins::CoinSupply;
use crate::error::{Error, Outcome, RejectReason, Result};
use crate::field::{is_prime, Field, FieldElement, MODULUS_LIMIT};
use crate::poly::{raw_eval, raw_batch_invert, DensePoly, Interpolator, SubproductTree};

/// Everything both parties must agree on (or recompute) for one protocol
/// run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolParams {
    /// Base field prime.
    pub q: u64,
    /// Extension degree, minimal with `q^ell > d·K·2^eps_exp`.
    pub ell: u32,
    /// Circuit input count.
    pub n: u64,
    /// Number of certified evaluation points.
    pub k: u64,
    /// Syntactic degree of the circuit.
    pub d: u64,
    /// Error exponent: the soundness target is `2^{-eps_exp}`.
    pub eps_exp: u32,
}

impl ProtocolParams {
    /// Coefficient count of an honest proof, `d·(K−1) + 1`; also the cap on
    /// any acceptable proof.
    pub fn num_coeffs(&self) -> u128 {
        u128::from(self.d) * u128::from(self.k - 1) + 1
    }

    /// `d·K`: the number of spot-check values that can fool the verifier,
    /// so the soundness error is `d·K / q^ell`.
    pub fn soundness_numerator(&self) -> u128 {
        u128::from(self.d) * u128::from(self.k)
    }
}

/// The prover's message: parameter header, the extension modulus it worked
/// under, and the coefficients of `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub params: ProtocolParams,
    /// Irreducible modulus of the extension, little-endian, `ell + 1`
    /// coefficients, monic.
    pub modulus: Vec<u64>,
    /// The univariate polynomial `Q`, degree ≤ `d·(K−1)`.
    pub q_poly: DensePoly,
}

/// Verifier verdict: the `K` certified base-field values on acceptance, a
/// reasoned rejection otherwise, plus the exact coin expenditure (zero for
/// structural rejections, which precede randomness).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutput {
    pub outcome: Outcome<Vec<u64>>,
    pub coins_used: u64,
}

impl EvalOutput {
    pub fn accepted(&self) -> bool {
        self.outcome.is_accepted()
    }

    pub fn values(&self) -> Option<&[u64]> {
        match &self.outcome {
            Outcome::Accepted(v) => Some(v),
            Outcome::Rejected(_) => None,
        }
    }
}

/// Derives the protocol parameters for certifying `C` at `k` points over
/// `F_q` with soundness error below `2^{-eps_exp}`: `d` is the syntactic
/// degree and `ell` the minimal extension degree with `q^ell > d·k·2^t`.
pub fn choose_params(c: &Circuit, k: u64, q: u64, eps_exp: u32) -> Result<ProtocolParams> {
    if k == 0 {
        return Err(Error::usage("at least one evaluation point is required"));
    }
    if q >= MODULUS_LIMIT || !is_prime(q) {
        return Err(Error::usage(format!("base modulus {q} must be a prime below 2^62")));
    }
    let d = c.syntactic_degree();
    let bound = u128::from(d)
        .checked_mul(u128::from(k))
        .and_then(|x| {
            if eps_exp >= 128 {
                None
            } else {
                x.checked_mul(1u128 << eps_exp)
            }
        })
        .ok_or_else(|| {
            Error::capacity(format!(
                "soundness bound d·K·2^t = {d}·{k}·2^{eps_exp} exceeds 128 bits"
            ))
        })?;
    let ell = min_extension_degree(q, bound);
    // q^ell itself must be representable (the field order cap).
    let mut order: u128 = 1;
    for _ in 0..ell {
        order = order.checked_mul(u128::from(q)).ok_or_else(|| {
            Error::capacity(format!(
                "the required extension degree ell = {ell} puts {q}^ell beyond the \
                 128-bit order budget"
            ))
        })?;
    }
    Ok(ProtocolParams { q, ell, n: c.n_inputs() as u64, k, d, eps_exp })
}

/// Smallest `ell ≥ 1` with `q^ell > bound`, computed by repeated division so
/// it never overflows.
fn min_extension_degree(q: u64, bound: u128) -> u32 {
    let mut ell = 0u32;
    let mut cur = bound;
    while cur > 0 {
        cur /= u128::from(q);
        ell += 1;
    }
    ell.max(1)
}

/// The first `count` elements of the canonical enumeration, the shared
/// abscissa convention of the protocol.
fn canonical_points(field: &Field, count: u128) -> Result<Vec<FieldElement>> {
    if count > field.order() {
        return Err(Error::capacity(format!(
            "need {count} distinct abscissae but {field} has only {} elements",
            field.order()
        )));
    }
    (0..count).map(|i| field.canonical_element(i)).collect()
}

/// Interpolator over the `K` anchor abscissae `α_i = canonical_element(i)`.
fn alpha_interpolator(field: &Field, k: usize) -> Result<Interpolator> {
    let pts = canonical_points(field, k as u128)?;
    Interpolator::new(SubproductTree::build(field, &pts)?)
}

fn validate_point_shape(points: &[Vec<u64>], n: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::usage("at least one evaluation point is required"));
    }
    for (i, row) in points.iter().enumerate() {
        if row.len() != n {
            return Err(Error::usage(format!(
                "point {i} has {} coordinates, circuit takes {n}",
                row.len()
            )));
        }
    }
    Ok(())
}

fn validate_point_range(points: &[Vec<u64>], q: u64) -> Result<()> {
    for (i, row) in points.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v >= q {
                return Err(Error::usage(format!(
                    "point {i} coordinate {j} is {v}, not reduced modulo {q}"
                )));
            }
        }
    }
    Ok(())
}

/// Builds the interpolants `Ψ_j` with `Ψ_j(α_i) = a_i[j]`: one polynomial of
/// degree ≤ `K−1` per input variable, over `field`.  `points` are base-field
/// residues, `K` rows of `n` columns.
pub fn build_psi(field: &Field, points: &[Vec<u64>]) -> Result<Vec<DensePoly>> {
    let n = points.first().map(|r| r.len()).unwrap_or(0);
    validate_point_shape(points, n)?;
    validate_point_range(points, field.q())?;
    let alpha = alpha_interpolator(field, points.len())?;
    psi_from_columns(field, &alpha, points, n)
}

fn psi_from_columns(
    field: &Field,
    alpha: &Interpolator,
    points: &[Vec<u64>],
    n: usize,
) -> Result<Vec<DensePoly>> {
    (0..n)
        .map(|j| {
            let col: Vec<FieldElement> = points.iter().map(|row| field.embed(row[j])).collect();
            alpha.interpolate(&col)
        })
        .collect()
}

/// Honest prover: interpolates the `Ψ_j`, evaluates `R(x) =
/// C(Ψ_1(x),…,Ψ_n(x))` at the first `d·(K−1)+1` canonical abscissae, and
/// interpolates those values into `Q = R`.
pub fn prove_eval(c: &Circuit, points: &[Vec<u64>], params: &ProtocolParams) -> Result<Proof> {
    validate_point_shape(points, c.n_inputs())?;
    validate_point_range(points, params.q)?;
    let expect = choose_params(c, points.len() as u64, params.q, params.eps_exp)?;
    if expect != *params {
        return Err(Error::usage(format!(
            "supplied parameters {params:?} do not match the derived {expect:?}"
        )));
    }
    let field = Field::extension(params.q, params.ell)?;
    prove_in_field(c, points, params, &field)
}

/// Prover body over an explicit field handle (any irreducible modulus of
/// the right degree yields a valid proof).
fn prove_in_field(
    c: &Circuit,
    points: &[Vec<u64>],
    params: &ProtocolParams,
    field: &Field,
) -> Result<Proof> {
    let ell = field.ell();
    let b_count = usize::try_from(params.num_coeffs()).map_err(|_| {
        Error::capacity(format!(
            "proof needs {} coefficients, beyond addressable memory",
            params.num_coeffs()
        ))
    })?;
    let nodes = canonical_points(field, b_count as u128)?;
    let beta = Interpolator::new(SubproductTree::build(field, &nodes)?)?;
    let alpha = alpha_interpolator(field, points.len())?;
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(c.n_inputs());
    for j in 0..c.n_inputs() {
        let col: Vec<FieldElement> = points.iter().map(|row| field.embed(row[j])).collect();
        let psi = alpha.interpolate(&col)?;
        let vals = beta.tree().eval(psi.raw())?;
        let mut flat = Vec::with_capacity(b_count * ell);
        for v in &vals {
            flat.extend_from_slice(v.limbs());
        }
        cols.push(flat);
    }
    let out = c.evaluate_columns(field, &cols, b_count)?;
    let values: Vec<FieldElement> = (0..b_count)
        .map(|i| {
            field
                .from_limbs(out[i * ell..(i + 1) * ell].to_vec())
                .expect("circuit outputs stay reduced")
        })
        .collect();
    let q_poly = beta.interpolate(&values)?;
    Ok(Proof { params: *params, modulus: field.modulus().to_vec(), q_poly })
}

/// Verifier.  Structural checks (parameter header against a local
/// recomputation, modulus irreducibility, coefficient budget) happen before
/// any randomness and reject as `Malformed` with zero coins.  Then one
/// uniform `r` funds the spot check `Q(r) = C(Ψ(r))`; on success the `K`
/// values are decoded from `Q` by multipoint evaluation, each of which must
/// project into the base field.
pub fn verify_eval(
    c: &Circuit,
    points: &[Vec<u64>],
    proof: &Proof,
    coins: &mut dyn CoinSupply,
) -> Result<EvalOutput> {
    validate_point_shape(points, c.n_inputs())?;
    let malformed = |msg: String| {
        Ok(EvalOutput { outcome: Outcome::Rejected(RejectReason::Malformed(msg)), coins_used: 0 })
    };

    // -- structural phase: no coins spent ---------------------------------
    let expect = match choose_params(c, points.len() as u64, proof.params.q, proof.params.eps_exp)
    {
        Ok(p) => p,
        Err(e) => return malformed(format!("cannot derive parameters from the header: {e}")),
    };
    if expect != proof.params {
        return malformed(format!(
            "parameter header {:?} does not match the locally derived {:?}",
            proof.params, expect
        ));
    }
    validate_point_range(points, expect.q)?;
    let field = match Field::from_modulus(expect.q, proof.modulus.clone()) {
        Ok(f) => f,
        Err(e) => return malformed(format!("unusable extension modulus: {e}")),
    };
    if field.ell() != expect.ell as usize {
        return malformed(format!(
            "modulus has degree {}, parameters require {}",
            field.ell(),
            expect.ell
        ));
    }
    if proof.q_poly.field() != &field {
        return malformed("coefficients are not over the declared extension".to_string());
    }
    if (proof.q_poly.num_coeffs() as u128) > expect.num_coeffs() {
        return malformed(format!(
            "proof carries {} coefficients, the degree bound allows {}",
            proof.q_poly.num_coeffs(),
            expect.num_coeffs()
        ));
    }

    // -- randomized phase --------------------------------------------------
    let before = coins.bits_consumed();
    let r = field.random_element(coins)?;
    let coins_used = coins.bits_consumed() - before;
    let unsound = |msg: String| {
        Ok(EvalOutput {
            outcome: Outcome::Rejected(RejectReason::Unsound(msg)),
            coins_used,
        })
    };

    let q_at_r = proof.q_poly.eval(&r)?;
    let alpha = alpha_interpolator(&field, points.len())?;
    let psi_r = psi_at(&field, &alpha, points, &r)?;
    let c_at_r = c.evaluate(&field, &psi_r)?;
    if q_at_r != c_at_r {
        return unsound(format!("spot check failed: Q(r) ≠ C(Ψ(r)) at r = {r}"));
    }
    let decoded = alpha.tree().eval(proof.q_poly.raw())?;
    let mut values = Vec::with_capacity(points.len());
    for (i, v) in decoded.iter().enumerate() {
        match v.project_base() {
            Some(x) => values.push(x),
            None => {
                return unsound(format!(
                    "decoded value {i} is {v}, which lies outside F_{}",
                    field.q()
                ))
            }
        }
    }
    Ok(EvalOutput { outcome: Outcome::Accepted(values), coins_used })
}

/// Evaluates every `Ψ_j` at `r` without materializing the interpolants:
/// with `λ_i = M(r)·w_i/(r−α_i)` (the barycentric factors over the anchor
/// tree), `Ψ_j(r) = Σ_i λ_i·a_i[j]`, a base-scalar combination per
/// variable.  Falls back to the stored row when `r` is itself an anchor.
fn psi_at(
    field: &Field,
    alpha: &Interpolator,
    points: &[Vec<u64>],
    r: &FieldElement,
) -> Result<Vec<FieldElement>> {
    let k = points.len();
    let n = points[0].len();
    let idx = field.canonical_index(r);
    if idx < k as u128 {
        let row = &points[idx as usize];
        return Ok(row.iter().map(|&v| field.embed(v)).collect());
    }
    let repr = field.repr();
    let ell = field.ell();
    let m_at_r = raw_eval(repr, alpha.tree().master(), r.limbs());
    let mut diffs: Vec<Vec<u64>> = Vec::with_capacity(k);
    for i in 0..k {
        let a_i = field.canonical_element(i as u128)?;
        let mut d = vec![0u64; ell];
        repr.limb_sub(r.limbs(), a_i.limbs(), &mut d);
        diffs.push(d);
    }
    raw_batch_invert(repr, &mut diffs)?;
    let mut lambda: Vec<Vec<u64>> = Vec::with_capacity(k);
    let mut tmp = vec![0u64; ell];
    let mut scratch = Vec::new();
    for (inv, w) in diffs.iter().zip(alpha.weights()) {
        repr.limb_mul(inv, w, &mut tmp, &mut scratch);
        let mut l = vec![0u64; ell];
        repr.limb_mul(&tmp, &m_at_r, &mut l, &mut scratch);
        lambda.push(l);
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = vec![0u64; ell];
        for (row, l) in points.iter().zip(&lambda) {
            if row[j] == 0 {
                continue;
            }
            repr.limb_scale(row[j], l, &mut tmp);
            repr.limb_acc(&mut acc, &tmp);
        }
        out.push(field.from_limbs(acc).expect("accumulation stays reduced"));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Univariate polynomial identity testing
// ---------------------------------------------------------------------------

fn require_univariate(c: &Circuit, which: &str) -> Result<()> {
    if c.n_inputs() > 1 {
        return Err(Error::usage(format!(
            "{which} circuit has {} inputs; identity testing is univariate",
            c.n_inputs()
        )));
    }
    Ok(())
}

/// Field over the same prime as `base` whose size exceeds `degree`,
/// extending minimally when `base` itself is too small.
fn identity_test_field(base: &Field, degree: u64) -> Result<Field> {
    if base.order() > u128::from(degree) {
        return Ok(base.clone());
    }
    let ell = min_extension_degree(base.q(), u128::from(degree));
    Field::extension(base.q(), ell)
}

/// Values of a univariate (or constant) circuit at each point.
fn circuit_values_at(c: &Circuit, field: &Field, pts: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if c.n_inputs() == 0 {
        let v = c.evaluate(field, &[])?;
        return Ok(vec![v; pts.len()]);
    }
    let ell = field.ell();
    let mut col = Vec::with_capacity(pts.len() * ell);
    for p in pts {
        if p.field() != field {
            return Err(Error::usage(format!("point from {} evaluated over {field}", p.field())));
        }
        col.extend_from_slice(p.limbs());
    }
    let out = c.evaluate_columns(field, &[col], pts.len())?;
    Ok((0..pts.len())
        .map(|i| {
            field
                .from_limbs(out[i * ell..(i + 1) * ell].to_vec())
                .expect("circuit outputs stay reduced")
        })
        .collect())
}

/// Exact identity test: interpolates both circuits' coefficient vectors
/// from `D+1` shared points (`D` = the larger syntactic degree, over an
/// extension of `base` when `base` has ≤ `D` elements) and compares them.
pub fn upit_deterministic(c1: &Circuit, c2: &Circuit, base: &Field) -> Result<bool> {
    require_univariate(c1, "first")?;
    require_univariate(c2, "second")?;
    let d = c1.syntactic_degree().max(c2.syntactic_degree());
    let field = identity_test_field(base, d)?;
    let pts = canonical_points(&field, u128::from(d) + 1)?;
    let interp = Interpolator::new(SubproductTree::build(&field, &pts)?)?;
    let p1 = interp.interpolate(&circuit_values_at(c1, &field, &pts)?)?;
    let p2 = interp.interpolate(&circuit_values_at(c2, &field, &pts)?)?;
    Ok(p1 == p2)
}

/// Randomized identity test: one uniform `r`, one evaluation of each
/// circuit.  One-sided error: identical polynomials always compare equal;
/// distinct ones collide with probability ≤ `D/|F|`.
pub fn upit_random(
    c1: &Circuit,
    c2: &Circuit,
    base: &Field,
    coins: &mut dyn CoinSupply,
) -> Result<bool> {
    require_univariate(c1, "first")?;
    require_univariate(c2, "second")?;
    let d = c1.syntactic_degree().max(c2.syntactic_degree());
    let field = identity_test_field(base, d)?;
    let r = field.random_element(coins)?;
    let v1 = circuit_values_at(c1, &field, std::slice::from_ref(&r))?;
    let v2 = circuit_values_at(c2, &field, std::slice::from_ref(&r))?;
    Ok(v1 == v2)
}
