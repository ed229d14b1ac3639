//! Three-round (Arthur–Merlin–Arthur) decision protocol for fully
//! quantified Boolean formulas.
//!
//! The innermost `⌈δn⌉` quantifiers are compiled away arithmetically — each
//! `∃x` becomes a sum over `x ∈ {0,1}`, each `∀x` a product — leaving a
//! circuit `P′` over the remaining prefix variables whose value at a Boolean
//! point is nonzero over ℤ exactly when the suffix-quantified subformula is
//! true there.  Arthur opens by sampling a random prime `p` from a large
//! interval (a nonzero `P′` value has few prime factors, so reduction mod
//! `p` rarely kills it), Merlin certifies `P′ mod p` at all Boolean prefix
//! points with the batch-evaluation protocol, and Arthur folds the decoded
//! truth bits through the remaining quantifier prefix.  When universals
//! dominate the suffix the whole formula is flipped and the answer
//! complemented, keeping the product depth — and with it `P′`'s degree and
//! magnitude — under control.

use serde_json::json;

use crate::circuit::{arithmetize_padded, Circuit, CircuitBuilder, Quant, QuantifiedFormula};
use crate::coins::{CoinSupply, RecordingCoins};
use crate::error::{Error, Outcome, Result};
use crate::field::{is_prime, MODULUS_LIMIT};
use crate::ma::{choose_params, prove_eval, verify_eval};
use crate::ops::{self, Phase};
use crate::sum::boolean_points;
use crate::transcript::{Sender, Transcript};

/// Tunable knobs of the protocol, plus the prime the verifier ends up
/// sampling (0 until a run fixes it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QbfParams {
    /// Fraction δ of variables compiled into the suffix, as a rational
    /// (numerator, denominator); the suffix holds the innermost `⌈δn⌉`.
    pub delta: (u32, u32),
    /// The prime is drawn uniformly from `[2, 2^exp · m]`, `m` the
    /// connective count of the matrix.
    pub prime_interval_exp: u32,
    /// The sampled prime.
    pub p: u64,
}

impl QbfParams {
    /// Paper defaults: δ = 2/3 and an interval exponent of `2n²`, capped at
    /// 52 so the interval stays inside the modulus budget at any `m`.
    pub fn defaults(n: usize) -> QbfParams {
        QbfParams {
            delta: (2, 3),
            prime_interval_exp: (2 * n * n).min(52) as u32,
            p: 0,
        }
    }
}

/// Record of one protocol run.
#[derive(Debug, Clone)]
pub struct QbfRun {
    /// The verifier's verdict; on acceptance, the truth value of the
    /// formula.
    pub outcome: Outcome<bool>,
    /// Parameters with the sampled prime filled in.
    pub params: QbfParams,
    /// Whether the formula was flipped (and the answer complemented).
    pub negated: bool,
    pub prefix_vars: usize,
    pub suffix_vars: usize,
    /// Bound on the probability that the sampled prime divides some nonzero
    /// suffix value, flipping a truth bit despite an honest prover.
    pub prime_miss_bound: f64,
    /// Soundness error of the embedded evaluation protocol, `dK/p^ℓ`.
    pub spot_check_bound: f64,
    pub coins_used: u64,
    pub transcript: Transcript,
}

impl QbfRun {
    pub fn value(&self) -> Option<bool> {
        match &self.outcome {
            Outcome::Accepted(v) => Some(*v),
            Outcome::Rejected(_) => None,
        }
    }

    /// Total reported failure bound: prime event plus spot-check event.
    pub fn failure_bound(&self) -> f64 {
        self.prime_miss_bound + self.spot_check_bound
    }
}

fn suffix_len(n: usize, delta: (u32, u32)) -> Result<usize> {
    let (num, den) = delta;
    if den == 0 || num > den {
        return Err(Error::usage(format!(
            "block fraction {num}/{den} must lie in [0, 1]"
        )));
    }
    Ok((n * num as usize).div_ceil(den as usize))
}

/// The formula with every quantifier dualized and the matrix negated; the
/// two formulas have opposite truth values.
pub fn flip_formula(phi: &QuantifiedFormula) -> QuantifiedFormula {
    let prefix: Vec<Quant> = phi
        .prefix()
        .iter()
        .map(|q| match q {
            Quant::Exists => Quant::ForAll,
            Quant::ForAll => Quant::Exists,
        })
        .collect();
    QuantifiedFormula::new(prefix, !phi.matrix().clone())
        .expect("flipping preserves the arity")
}

/// Flips the formula when universals outnumber existentials in the suffix
/// window, so [`suffix_arithmetize`] always sees an ∃-majority; the flag
/// says whether the final answer must be complemented.
pub fn flip_if_needed(
    phi: &QuantifiedFormula,
    delta: (u32, u32),
) -> Result<(QuantifiedFormula, bool)> {
    let n = phi.num_vars();
    let s = suffix_len(n, delta)?;
    let suffix = &phi.prefix()[n - s..];
    let foralls = suffix.iter().filter(|q| matches!(q, Quant::ForAll)).count();
    if 2 * foralls > s {
        Ok((flip_formula(phi), true))
    } else {
        Ok((phi.clone(), false))
    }
}

/// Compiles the innermost `⌈δn⌉` quantifiers into arithmetic: the result
/// takes the prefix variables, and at a Boolean point is nonzero over ℤ
/// exactly when the suffix-quantified subformula holds there.  With an
/// all-∃ suffix the value is precisely the number of suffix witnesses.
pub fn suffix_arithmetize(phi: &QuantifiedFormula, delta: (u32, u32)) -> Result<Circuit> {
    let n = phi.num_vars();
    let s = suffix_len(n, delta)?;
    if s > 18 {
        return Err(Error::capacity(format!(
            "a {s}-variable suffix expands to 2^{s} matrix copies"
        )));
    }
    let prefix = n - s;
    // arithmetize over the full arity so leaves can bind every quantified
    // variable
    let matrix = arithmetize_padded(phi.matrix(), n)?;
    let mut b = CircuitBuilder::new(prefix);
    let inputs: Vec<usize> = (0..prefix).map(|j| b.input(j)).collect();
    let consts = (b.constant(0), b.constant(1));
    let suffix_quants: Vec<Quant> = phi.prefix()[prefix..].to_vec();
    let out = expand_suffix(&mut b, &matrix, &inputs, &suffix_quants, consts, &mut Vec::new());
    Ok(b.finish(out))
}

fn expand_suffix(
    b: &mut CircuitBuilder,
    matrix: &Circuit,
    inputs: &[usize],
    quants: &[Quant],
    consts: (usize, usize),
    bits: &mut Vec<usize>,
) -> usize {
    if bits.len() == quants.len() {
        let mut map = inputs.to_vec();
        map.extend_from_slice(bits);
        return b.inline(matrix, &map);
    }
    let level = bits.len();
    bits.push(consts.0);
    let lo = expand_suffix(b, matrix, inputs, quants, consts, bits);
    bits.pop();
    bits.push(consts.1);
    let hi = expand_suffix(b, matrix, inputs, quants, consts, bits);
    bits.pop();
    match quants[level] {
        Quant::Exists => b.add(lo, hi),
        Quant::ForAll => b.mul(lo, hi),
    }
}

/// `P′` values at Boolean points fit in this many bits, walking the suffix
/// from the innermost quantifier out: leaves are 0/1, a sum adds one bit, a
/// product doubles them.  A nonzero value then has at most this many
/// distinct prime factors.
fn suffix_value_bits(quants: &[Quant]) -> u32 {
    let mut b = 0u32;
    for q in quants.iter().rev() {
        b = match q {
            Quant::Exists => b + 1,
            Quant::ForAll => b.saturating_mul(2),
        };
    }
    b
}

/// Decides a quantified Boolean formula with the three-round protocol.
/// `eps_exp` bounds the embedded evaluation protocol's soundness error by
/// `2^{-eps_exp}`; the prime-interval event is bounded separately in the
/// returned report.
pub fn qbf_decide(
    phi: &QuantifiedFormula,
    params: &QbfParams,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<QbfRun> {
    let n = phi.num_vars();
    if n == 0 {
        return Err(Error::usage("the formula must quantify at least one variable".to_string()));
    }
    let (work, negated) = flip_if_needed(phi, params.delta)?;
    let s = suffix_len(n, params.delta)?;
    let prefix = n - s;
    if prefix > 20 {
        return Err(Error::capacity(format!(
            "a {prefix}-variable prefix means 2^{prefix} certified points"
        )));
    }
    let m = work.matrix().connectives().max(1) as u64;
    let exp = params.prime_interval_exp;
    let upper: u64 = if exp >= 62 {
        MODULUS_LIMIT - 1
    } else {
        ((1u128 << exp) * u128::from(m)).min(u128::from(MODULUS_LIMIT - 1)) as u64
    };
    if upper < 2 {
        return Err(Error::usage(format!(
            "prime interval [2, {upper}] is empty; raise the interval exponent"
        )));
    }

    let mut transcript = Transcript::new(
        "qbf",
        json!({
            "n": n,
            "prefix_vars": prefix,
            "suffix_vars": s,
            "delta": [params.delta.0, params.delta.1],
            "interval_exp": exp,
            "interval_upper": upper,
            "m": m,
            "negated": negated,
        }),
    );
    let coins_before = coins.bits_consumed();

    // Round 1 (Arthur): a uniform prime from the interval.
    let mut rec = RecordingCoins::new(coins);
    let p = sample_prime(upper, &mut rec)?;
    for d in rec.draws() {
        transcript.push_coin(*d);
    }
    transcript.push_prime(Sender::Verifier, p);

    // Round 2 (Merlin): certify P′ mod p at every Boolean prefix point.
    let circuit = suffix_arithmetize(&work, params.delta)?;
    let points = boolean_points(prefix)?;
    let proto = choose_params(&circuit, points.len() as u64, p, eps_exp)?;
    let proof = ops::scoped(Phase::Prover, || prove_eval(&circuit, &points, &proto))?;
    transcript.push_poly(Sender::Prover, proof.q_poly.raw());

    // Round 3 (Arthur): spot-check, decode, fold the prefix.
    let mut rec = RecordingCoins::new(coins);
    let eval =
        ops::scoped(Phase::Verifier, || verify_eval(&circuit, &points, &proof, &mut rec))?;
    for d in rec.draws() {
        transcript.push_coin(*d);
    }
    let outcome = match eval.outcome {
        Outcome::Accepted(values) => {
            let mut table: Vec<bool> = values.iter().map(|&v| v != 0).collect();
            for level in (0..prefix).rev() {
                let half = 1usize << level;
                table = (0..half)
                    .map(|j| match work.prefix()[level] {
                        Quant::Exists => table[j] || table[j + half],
                        Quant::ForAll => table[j] && table[j + half],
                    })
                    .collect();
            }
            Outcome::Accepted(table[0] != negated)
        }
        Outcome::Rejected(r) => Outcome::Rejected(r),
    };
    transcript.set_decision(outcome.is_accepted());

    let factors = suffix_value_bits(&work.prefix()[prefix..]);
    let u = upper as f64;
    // π(x) > x/ln x for x ≥ 17; floor at one prime for degenerate intervals.
    let primes_in_interval = (u / u.ln()).max(1.0);
    let prime_miss_bound =
        (points.len() as f64) * f64::from(factors) / primes_in_interval;
    let spot_check_bound =
        (proto.soundness_numerator() as f64) / (p as f64).powi(proto.ell as i32);

    Ok(QbfRun {
        outcome,
        params: QbfParams { p, ..*params },
        negated,
        prefix_vars: prefix,
        suffix_vars: s,
        prime_miss_bound,
        spot_check_bound,
        coins_used: coins.bits_consumed() - coins_before,
        transcript,
    })
}

/// Uniform prime in `[2, upper]` by rejection sampling.
fn sample_prime(upper: u64, coins: &mut dyn CoinSupply) -> Result<u64> {
    let bits = 64 - upper.leading_zeros();
    for _ in 0..200_000 {
        let v = coins.draw_bits(bits)? as u64;
        if (2..=upper).contains(&v) && is_prime(v) {
            return Ok(v);
        }
    }
    Err(Error::domain(format!(
        "no prime drawn from [2, {upper}] within the retry budget"
    )))
}
