//! Certified sums over the Boolean cube, and the counting problems that
//! reduce to them.
//!
//! The base protocol certifies `Σ_{b∈{0,1}^n} C(b) mod p` by a square-root
//! speedup: fold the last `⌊n/2⌋` variables into an explicit sum, leaving
//! the half-sum circuit `C′(x) = Σ_b C(x, b)` on `⌈n/2⌉` variables with the
//! same total, then certify `C′` at all `K = 2^{⌈n/2⌉}` Boolean points with
//! the one-message evaluation protocol and let the verifier add up the
//! decoded values.  #SAT, the permanent (via Ryser's inclusion–exclusion),
//! and Hamiltonian-cycle counting (via Karp's) are all cube sums of small
//! circuits with a prime chosen large enough to make the modular count
//! exact.
//!
//! The multi-round variant trades messages for verifier time: variables are
//! split into `c+1` equal blocks, each round sends the univariate restriction
//! of the remaining sum through the bit-interpolants of one block, and one
//! coin per round pins it down, so the verifier only ever enumerates a single
//! block.  It runs both parties in-process and records a replayable
//! [`Transcript`].

use serde_json::json;

use crate::circuit::{arithmetize, BoolFormula, Circuit, CircuitBuilder};
use crate::coins::{CoinSupply, RecordingCoins, ReplayCoins};
use crate::error::{Error, Outcome, RejectReason, Result};
use crate::field::{addmod, find_prime, is_prime, Field, FieldElement};
use crate::ma::{choose_params, prove_eval, verify_eval, Proof};
use crate::ops::{self, Phase};
use crate::poly::{DensePoly, Interpolator, SubproductTree};
use crate::transcript::{Sender, Transcript};

/// A claimed cube sum: `claimed = Σ_{b∈{0,1}^n} circuit(b) mod p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumClaim {
    pub circuit: Circuit,
    pub p: u64,
    pub claimed: u64,
}

/// Verifier verdict on a sum claim: the certified sum on acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumOutput {
    pub outcome: Outcome<u64>,
    pub coins_used: u64,
}

/// Result of a certified counting run: the count, the prime it was
/// recovered under, and the verifier's coin bill.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountOutput {
    pub outcome: Outcome<u64>,
    pub p: u64,
    pub coins_used: u64,
}

impl CountOutput {
    pub fn count(&self) -> Option<u64> {
        match &self.outcome {
            Outcome::Accepted(c) => Some(*c),
            Outcome::Rejected(_) => None,
        }
    }
}

/// Folds the last `⌊n/2⌋` variables of `c` into an explicit Boolean sum:
/// the result takes the first `⌈n/2⌉` variables and satisfies
/// `Σ_{a} C′(a) = Σ_{b} C(b)` over the respective cubes, with syntactic
/// degree at most `c`'s.
pub fn build_half_sum_circuit(c: &Circuit) -> Circuit {
    let n = c.n_inputs();
    let free = n.div_ceil(2);
    let folded = n - free;
    let mut b = CircuitBuilder::new(free);
    let mut base_map: Vec<usize> = (0..free).map(|j| b.input(j)).collect();
    let zero = b.constant(0);
    let one = b.constant(1);
    base_map.resize(n, zero);
    let mut terms = Vec::with_capacity(1usize << folded);
    for mask in 0u64..1 << folded {
        let mut map = base_map.clone();
        for (i, slot) in map[free..].iter_mut().enumerate() {
            *slot = if mask >> i & 1 == 1 { one } else { zero };
        }
        terms.push(b.inline(c, &map));
    }
    let total = b.balanced_sum(&terms);
    b.finish(total)
}

/// All `2^vars` points of the Boolean cube, bit `i` of the row index giving
/// variable `i`.
pub fn boolean_points(vars: usize) -> Result<Vec<Vec<u64>>> {
    if vars > 26 {
        return Err(Error::capacity(format!(
            "enumerating 2^{vars} cube points exceeds the memory budget"
        )));
    }
    Ok((0u64..1 << vars)
        .map(|mask| (0..vars).map(|i| mask >> i & 1).collect())
        .collect())
}

/// Honest prover for a cube sum: builds the half-sum circuit, certifies it
/// at the Boolean points, and states the claim its own proof supports.
pub fn prove_sum(circuit: &Circuit, p: u64, eps_exp: u32) -> Result<(SumClaim, Proof)> {
    let half = build_half_sum_circuit(circuit);
    let points = boolean_points(half.n_inputs())?;
    let params = choose_params(&half, points.len() as u64, p, eps_exp)?;
    let proof = prove_eval(&half, &points, &params)?;
    let field = Field::from_modulus(p, proof.modulus.clone())?;
    let alphas: Vec<FieldElement> = (0..points.len())
        .map(|i| field.canonical_element(i as u128))
        .collect::<Result<_>>()?;
    let values = proof.q_poly.multipoint_eval(&alphas)?;
    let mut claimed = 0u64;
    for v in &values {
        claimed = addmod(claimed, v.project_base().expect("honest values are base residues"), p);
    }
    Ok((SumClaim { circuit: circuit.clone(), p, claimed }, proof))
}

/// Verifies a proved cube sum: checks the evaluation proof at the Boolean
/// points, adds the decoded values, and compares with the claim.
pub fn verify_sum(
    claim: &SumClaim,
    eps_exp: u32,
    proof: &Proof,
    coins: &mut dyn CoinSupply,
) -> Result<SumOutput> {
    if !is_prime(claim.p) {
        return Err(Error::usage(format!("claim modulus {} must be prime", claim.p)));
    }
    if claim.claimed >= claim.p {
        return Err(Error::usage(format!(
            "claimed sum {} is not a residue modulo {}",
            claim.claimed, claim.p
        )));
    }
    if proof.params.q != claim.p || proof.params.eps_exp != eps_exp {
        return Ok(SumOutput {
            outcome: Outcome::Rejected(RejectReason::Malformed(format!(
                "proof is for modulus {} at error exponent {}, the claim needs {} at {}",
                proof.params.q, proof.params.eps_exp, claim.p, eps_exp
            ))),
            coins_used: 0,
        });
    }
    let half = build_half_sum_circuit(&claim.circuit);
    let points = boolean_points(half.n_inputs())?;
    let out = verify_eval(&half, &points, proof, coins)?;
    let outcome = match out.outcome {
        Outcome::Accepted(values) => {
            let total = values.iter().fold(0u64, |acc, &v| addmod(acc, v, claim.p));
            if total == claim.claimed {
                Outcome::Accepted(total)
            } else {
                Outcome::Rejected(RejectReason::Unsound(format!(
                    "certified cube sum is {total}, the claim says {}",
                    claim.claimed
                )))
            }
        }
        Outcome::Rejected(r) => Outcome::Rejected(r),
    };
    Ok(SumOutput { outcome, coins_used: out.coins_used })
}

fn certified_count(
    circuit: &Circuit,
    p: u64,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<CountOutput> {
    let (claim, proof) = ops::scoped(Phase::Prover, || prove_sum(circuit, p, eps_exp))?;
    let out = ops::scoped(Phase::Verifier, || verify_sum(&claim, eps_exp, &proof, coins))?;
    Ok(CountOutput { outcome: out.outcome, p, coins_used: out.coins_used })
}

/// Certified model count of a Boolean formula: arithmetize, pick a prime
/// beyond `2^n` so the modular sum is the exact count, and run the sum
/// protocol end to end.
pub fn count_sat(f: &BoolFormula, eps_exp: u32, coins: &mut dyn CoinSupply) -> Result<CountOutput> {
    let circuit = arithmetize(f);
    let p = sat_prime(circuit.n_inputs())?;
    certified_count(&circuit, p, eps_exp, coins)
}

fn sat_prime(n: usize) -> Result<u64> {
    if n > 60 {
        return Err(Error::capacity(format!(
            "exact counting needs a prime beyond 2^{n}, past the modulus budget"
        )));
    }
    find_prime((1u64 << n).max(2))
}

/// Ryser's inclusion–exclusion as a circuit: with `y` the indicator of a
/// column subset, `C(y) = Π_j (2·y_j − 1) · Π_i (Σ_j M[i][j]·y_j)` sums to
/// the permanent of `M` over the Boolean cube.
pub fn ryser_circuit(m: &[Vec<u64>]) -> Result<Circuit> {
    let n = m.len();
    if n == 0 {
        return Err(Error::usage("the permanent needs at least a 1×1 matrix".to_string()));
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::usage("matrix must be square".to_string()));
    }
    if let Some(&e) = m.iter().flatten().find(|&&e| e > i64::MAX as u64) {
        return Err(Error::capacity(format!("matrix entry {e} exceeds the constant range")));
    }
    let mut b = CircuitBuilder::new(n);
    let minus_one = b.constant(-1);
    let sign_factors: Vec<usize> = (0..n)
        .map(|j| {
            let y = b.input(j);
            let doubled = b.add(y, y);
            b.add(doubled, minus_one)
        })
        .collect();
    let sign = b.balanced_product(&sign_factors);
    let rows: Vec<usize> = (0..n)
        .map(|i| {
            let terms: Vec<usize> = (0..n)
                .filter(|&j| m[i][j] != 0)
                .map(|j| {
                    let y = b.input(j);
                    if m[i][j] == 1 {
                        y
                    } else {
                        let e = b.constant(m[i][j] as i64);
                        b.mul(e, y)
                    }
                })
                .collect();
            b.balanced_sum(&terms)
        })
        .collect();
    let prod = b.balanced_product(&rows);
    let out = b.mul(sign, prod);
    Ok(b.finish(out))
}

/// Certified permanent of a nonnegative integer matrix, exact: the prime is
/// chosen beyond `n!·max_entryⁿ`, an upper bound on the permanent.
pub fn permanent(m: &[Vec<u64>], eps_exp: u32, coins: &mut dyn CoinSupply) -> Result<CountOutput> {
    let circuit = ryser_circuit(m)?;
    let n = m.len() as u128;
    let max_entry = m.iter().flatten().copied().max().unwrap_or(0).max(1);
    let mut bound: u128 = 1;
    for i in 1..=n {
        bound = bound
            .checked_mul(i)
            .and_then(|b| b.checked_mul(u128::from(max_entry)))
            .filter(|&b| b < 1 << 61)
            .ok_or_else(|| {
                Error::capacity(format!(
                    "permanent bound {n}!·{max_entry}^{n} exceeds the modulus budget"
                ))
            })?;
    }
    let p = find_prime((bound as u64).max(2))?;
    certified_count(&circuit, p, eps_exp, coins)
}

/// Karp's inclusion–exclusion as a circuit.  Node 1 is anchored (`y_1 ≡ 1`),
/// inputs are the indicators `y_2..y_n`, and the circuit computes
/// `Π_{i≥2}(2·y_i−1)` times the number of closed `n`-step walks from node 1
/// inside the indicated subgraph (each step a gated matrix–vector product);
/// its cube sum is the number of directed Hamiltonian cycles.
pub fn hamiltonian_circuit(adj: &[Vec<bool>]) -> Result<Circuit> {
    let n = adj.len();
    if n < 2 {
        return Err(Error::usage("Hamiltonian cycles need at least two nodes".to_string()));
    }
    if adj.iter().any(|row| row.len() != n) {
        return Err(Error::usage("adjacency matrix must be square".to_string()));
    }
    let mut b = CircuitBuilder::new(n - 1);
    let one = b.constant(1);
    let node_gates: Vec<usize> = (0..n).map(|i| if i == 0 { one } else { b.input(i - 1) }).collect();
    let mut reach: Vec<Option<usize>> = vec![None; n];
    reach[0] = Some(one);
    for _ in 0..n {
        let mut next: Vec<Option<usize>> = vec![None; n];
        for j in 0..n {
            let terms: Vec<usize> = (0..n)
                .filter(|&i| adj[i][j])
                .filter_map(|i| reach[i].map(|v| (i, v)))
                .map(|(i, v)| b.mul(v, node_gates[i]))
                .collect();
            if !terms.is_empty() {
                let s = b.balanced_sum(&terms);
                next[j] = Some(b.mul(s, node_gates[j]));
            }
        }
        reach = next;
    }
    let minus_one = b.constant(-1);
    let sign_factors: Vec<usize> = (1..n)
        .map(|i| {
            let y = node_gates[i];
            let doubled = b.add(y, y);
            b.add(doubled, minus_one)
        })
        .collect();
    let sign = b.balanced_product(&sign_factors);
    let out = match reach[0] {
        Some(w) => b.mul(sign, w),
        None => b.constant(0),
    };
    Ok(b.finish(out))
}

/// Certified count of Hamiltonian cycles.  Directed graphs are counted as
/// given; undirected graphs are symmetrized and the directed count halved
/// (each cycle has two orientations once `n ≥ 3`).
pub fn hamiltonian_cycles(
    adj: &[Vec<bool>],
    directed: bool,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<CountOutput> {
    let n = adj.len();
    if n >= 2 && adj.iter().any(|row| row.len() != n) {
        return Err(Error::usage("adjacency matrix must be square".to_string()));
    }
    if !directed && n < 3 {
        return Err(Error::usage(
            "undirected Hamiltonian counting needs at least 3 nodes".to_string(),
        ));
    }
    let work: Vec<Vec<bool>> = if directed {
        adj.to_vec()
    } else {
        (0..n).map(|i| (0..n).map(|j| adj[i][j] || adj[j][i]).collect()).collect()
    };
    let circuit = hamiltonian_circuit(&work)?;
    let mut bound: u128 = 1;
    for i in 1..n as u128 {
        bound = bound.checked_mul(i).filter(|&b| b < 1 << 61).ok_or_else(|| {
            Error::capacity(format!("cycle bound ({}−1)! exceeds the modulus budget", n))
        })?;
    }
    let p = find_prime((bound as u64).max(2))?;
    let out = certified_count(&circuit, p, eps_exp, coins)?;
    if !directed {
        if let Outcome::Accepted(c) = &out.outcome {
            debug_assert!(c % 2 == 0, "orientation pairing makes directed counts even");
            return Ok(CountOutput {
                outcome: Outcome::Accepted(c / 2),
                ..out
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Multi-round sums
// ---------------------------------------------------------------------------

/// Shape of a multi-round run, fixed by the circuit, the round count, and
/// the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiroundParams {
    pub p: u64,
    /// Number of prover messages `c`; variables are split into `c+1` blocks.
    pub rounds: u32,
    /// Variable count after padding to a multiple of `c+1`.
    pub n_padded: usize,
    /// Variables per block.
    pub block_vars: usize,
    /// Degree cap of every round polynomial: `deg(P)·(2^block_vars − 1)`.
    pub round_degree: u64,
}

/// Outcome of a multi-round run, with its replayable transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiroundRun {
    pub outcome: Outcome<()>,
    pub params: MultiroundParams,
    pub transcript: Transcript,
    pub coins_used: u64,
}

struct MultiroundCtx {
    field: Field,
    padded: Circuit,
    mp: MultiroundParams,
    /// Bit-interpolants: `psi[i]` has `psi[i](j) = bit i of j` on the block
    /// points `0..2^block_vars`.
    psi: Vec<DensePoly>,
    /// Canonical interpolation nodes `0..=round_degree` for the prover.
    nodes: Vec<FieldElement>,
    node_interp: Interpolator,
}

fn multiround_context(claim: &SumClaim, rounds: u32) -> Result<MultiroundCtx> {
    if rounds < 2 {
        return Err(Error::usage(format!(
            "the multi-round protocol needs at least 2 rounds, got {rounds}"
        )));
    }
    if !is_prime(claim.p) {
        return Err(Error::usage(format!("claim modulus {} must be prime", claim.p)));
    }
    if claim.claimed >= claim.p {
        return Err(Error::usage(format!(
            "claimed sum {} is not a residue modulo {}",
            claim.claimed, claim.p
        )));
    }
    let blocks = rounds as usize + 1;
    let n = claim.circuit.n_inputs();
    let n_padded = n.div_ceil(blocks) * blocks;
    let block_vars = n_padded / blocks;
    if block_vars > 20 {
        return Err(Error::capacity(format!(
            "blocks of {block_vars} variables force 2^{block_vars} verifier work"
        )));
    }
    let padded = if n_padded == n {
        claim.circuit.clone()
    } else {
        // Dummy variables are masked by (1 − y) so the padded cube sum is
        // unchanged: only the all-zero assignment of the dummies survives.
        let mut b = CircuitBuilder::new(n_padded);
        let map: Vec<usize> = (0..n).map(|j| b.input(j)).collect();
        let core = b.inline(&claim.circuit, &map);
        let one = b.constant(1);
        let masks: Vec<usize> = (n..n_padded)
            .map(|j| {
                let y = b.input(j);
                b.sub(one, y)
            })
            .collect();
        let mask = b.balanced_product(&masks);
        let out = b.mul(core, mask);
        b.finish(out)
    };
    let pts_per_block = 1u64 << block_vars;
    let round_degree = padded
        .syntactic_degree()
        .checked_mul(pts_per_block - 1)
        .ok_or_else(|| Error::capacity("round degree exceeds 64 bits".to_string()))?;
    if u128::from(claim.p) <= u128::from(round_degree) {
        return Err(Error::usage(format!(
            "modulus {} cannot support round polynomials of degree {round_degree}",
            claim.p
        )));
    }
    if u128::from(pts_per_block) > u128::from(claim.p) {
        return Err(Error::usage(format!(
            "modulus {} has too few points for blocks of {block_vars} variables",
            claim.p
        )));
    }
    let field = Field::prime(claim.p)?;
    let block_points: Vec<FieldElement> =
        (0..pts_per_block).map(|j| field.embed(j)).collect();
    let block_interp = Interpolator::new(SubproductTree::build(&field, &block_points)?)?;
    let psi: Vec<DensePoly> = (0..block_vars)
        .map(|i| {
            let bits: Vec<FieldElement> =
                (0..pts_per_block).map(|j| field.embed(j >> i & 1)).collect();
            block_interp.interpolate(&bits)
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<FieldElement> = (0..=round_degree).map(|z| field.embed(z)).collect();
    let node_interp = Interpolator::new(SubproductTree::build(&field, &nodes)?)?;
    Ok(MultiroundCtx {
        field,
        padded,
        mp: MultiroundParams {
            p: claim.p,
            rounds,
            n_padded,
            block_vars,
            round_degree,
        },
        psi,
        nodes,
        node_interp,
    })
}

/// Values `Ψ_i(r)` for one settled block, as base residues.
fn block_values_at(ctx: &MultiroundCtx, r: &FieldElement) -> Result<Vec<u64>> {
    ctx.psi
        .iter()
        .map(|p| Ok(p.eval(r)?.project_base().expect("prime-field values project")))
        .collect()
}

/// Sum of `padded` over the Boolean assignments of the trailing
/// `free_blocks` blocks, with all earlier blocks fixed to `prefix` (one
/// residue per variable, `prefix.len() = n_padded − free_blocks·block_vars`).
fn suffix_sum(ctx: &MultiroundCtx, prefix: &[u64], free_blocks: usize) -> Result<u64> {
    let b = ctx.mp.block_vars;
    let count = 1usize << (b * free_blocks);
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(ctx.mp.n_padded);
    for (v, &val) in prefix.iter().enumerate() {
        debug_assert!(v < ctx.mp.n_padded);
        cols.push(vec![val; count]);
    }
    for block in 0..free_blocks {
        for bit in 0..b {
            let col = (0..count)
                .map(|a| (a >> (block * b + bit) & 1) as u64)
                .collect();
            cols.push(col);
        }
    }
    let out = ctx.padded.evaluate_columns(&ctx.field, &cols, count)?;
    Ok(out.iter().fold(0u64, |acc, &v| addmod(acc, v, ctx.mp.p)))
}

/// Honest prover message for round `k` (1-based): the univariate
/// restriction of the remaining sum through block `k`'s bit-interpolants,
/// computed by interpolation at `round_degree + 1` canonical nodes.
fn prover_round(ctx: &MultiroundCtx, k: usize, settled: &[Vec<u64>]) -> Result<DensePoly> {
    let blocks = ctx.mp.rounds as usize + 1;
    let free_blocks = blocks - k;
    let prefix_len = (k - 1) * ctx.mp.block_vars;
    debug_assert_eq!(settled.len(), k - 1);
    let mut prefix: Vec<u64> = Vec::with_capacity(prefix_len + ctx.mp.block_vars);
    for vals in settled {
        prefix.extend_from_slice(vals);
    }
    let node_psi: Vec<Vec<FieldElement>> = ctx
        .psi
        .iter()
        .map(|p| p.multipoint_eval(&ctx.nodes))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(ctx.nodes.len());
    for (z, _) in ctx.nodes.iter().enumerate() {
        let mut full = prefix.clone();
        for psi_vals in &node_psi {
            full.push(psi_vals[z].project_base().expect("prime-field values project"));
        }
        values.push(ctx.field.embed(suffix_sum(ctx, &full, free_blocks)?));
    }
    ctx.node_interp.interpolate(&values)
}

/// Block-point sum `Σ_{j=0}^{2^b−1} q(j)`.
fn block_sum(ctx: &MultiroundCtx, q: &DensePoly) -> Result<u64> {
    let mut acc = 0u64;
    for j in 0..1u64 << ctx.mp.block_vars {
        let v = q.eval(&ctx.field.embed(j))?;
        acc = addmod(acc, v.project_base().expect("prime-field values project"), ctx.mp.p);
    }
    Ok(acc)
}

/// Drives the verifier side of a multi-round run, pulling each round
/// polynomial from `next_poly` (the in-process prover, or a transcript) and
/// coins from `coins`.  Records everything in the returned transcript.
fn drive_multiround<F>(
    ctx: &MultiroundCtx,
    claim: &SumClaim,
    coins: &mut dyn CoinSupply,
    mut next_poly: F,
) -> Result<MultiroundRun>
where
    F: FnMut(&MultiroundCtx, usize, &[Vec<u64>]) -> Result<DensePoly>,
{
    let mut transcript = Transcript::new(
        "multiround-sum",
        json!({
            "p": ctx.mp.p,
            "rounds": ctx.mp.rounds,
            "n_padded": ctx.mp.n_padded,
            "block_vars": ctx.mp.block_vars,
            "round_degree": ctx.mp.round_degree,
            "claimed": claim.claimed,
        }),
    );
    let coins_before = coins.bits_consumed();
    let mut settled: Vec<Vec<u64>> = Vec::with_capacity(ctx.mp.rounds as usize);
    let mut target = claim.claimed;
    let mut last_eval = 0u64;
    let mut outcome: Outcome<()> = Outcome::Accepted(());
    for k in 1..=ctx.mp.rounds as usize {
        let q = next_poly(ctx, k, &settled)?;
        transcript.push_poly(Sender::Prover, q.raw());
        let verdict = ops::scoped(Phase::Verifier, || -> Result<Option<RejectReason>> {
            if q.field() != &ctx.field {
                return Ok(Some(RejectReason::Malformed(format!(
                    "round {k}: polynomial is over {}, the protocol runs over {}",
                    q.field(),
                    ctx.field
                ))));
            }
            if q.num_coeffs() as u64 > ctx.mp.round_degree + 1 {
                return Ok(Some(RejectReason::Malformed(format!(
                    "round {k}: degree {} exceeds the bound {}",
                    q.num_coeffs() - 1,
                    ctx.mp.round_degree
                ))));
            }
            let s = block_sum(ctx, &q)?;
            if s != target {
                return Ok(Some(RejectReason::Unsound(format!(
                    "round {k}: block sum {s} does not match the running target {target}"
                ))));
            }
            Ok(None)
        })?;
        if let Some(reason) = verdict {
            outcome = Outcome::Rejected(reason);
            break;
        }
        let mut rec = RecordingCoins::new(coins);
        let r = ctx.field.random_element(&mut rec)?;
        for d in rec.draws() {
            transcript.push_coin(*d);
        }
        let (vals, at_r) = ops::scoped(Phase::Verifier, || -> Result<(Vec<u64>, u64)> {
            let vals = block_values_at(ctx, &r)?;
            let at_r = q.eval(&r)?.project_base().expect("prime-field values project");
            Ok((vals, at_r))
        })?;
        settled.push(vals);
        target = at_r;
        last_eval = at_r;
    }
    if outcome.is_accepted() {
        let final_ok = ops::scoped(Phase::Verifier, || -> Result<bool> {
            let mut prefix = Vec::with_capacity(ctx.mp.rounds as usize * ctx.mp.block_vars);
            for vals in &settled {
                prefix.extend_from_slice(vals);
            }
            Ok(suffix_sum(ctx, &prefix, 1)? == last_eval)
        })?;
        if !final_ok {
            outcome = Outcome::Rejected(RejectReason::Unsound(format!(
                "final check: the explicit last-block sum does not match Q_{}(r_{})",
                ctx.mp.rounds, ctx.mp.rounds
            )));
        }
    }
    transcript.set_decision(outcome.is_accepted());
    Ok(MultiroundRun {
        outcome,
        params: ctx.mp,
        transcript,
        coins_used: coins.bits_consumed() - coins_before,
    })
}

/// Runs the `rounds`-message sum protocol with the honest in-process
/// prover.
pub fn multiround_sum(
    claim: &SumClaim,
    rounds: u32,
    coins: &mut dyn CoinSupply,
) -> Result<MultiroundRun> {
    multiround_sum_with(claim, rounds, coins, |_, q| q)
}

/// Like [`multiround_sum`], but every prover message passes through
/// `mutate` (round index, honest polynomial) before delivery — the hook for
/// soundness experiments.
pub fn multiround_sum_with(
    claim: &SumClaim,
    rounds: u32,
    coins: &mut dyn CoinSupply,
    mut mutate: impl FnMut(usize, DensePoly) -> DensePoly,
) -> Result<MultiroundRun> {
    let ctx = multiround_context(claim, rounds)?;
    drive_multiround(&ctx, claim, coins, |ctx, k, settled| {
        let honest = ops::scoped(Phase::Prover, || prover_round(ctx, k, settled))?;
        Ok(mutate(k, honest))
    })
}

/// Re-runs the verifier of a recorded multi-round run against its own
/// polynomials and coins.  A consistency check on the recording (the coins
/// are not fresh), reproducing the recorded decision bit for untampered
/// transcripts.
pub fn multiround_replay(claim: &SumClaim, transcript: &Transcript) -> Result<MultiroundRun> {
    let rounds = transcript
        .params
        .get("rounds")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::domain("transcript params lack a round count".to_string()))?;
    let rounds = u32::try_from(rounds)
        .map_err(|_| Error::domain(format!("transcript round count {rounds} out of range")))?;
    let ctx = multiround_context(claim, rounds)?;
    let polys: Vec<DensePoly> = transcript
        .poly_messages()?
        .into_iter()
        .map(|words| {
            if let Some(&w) = words.iter().find(|&&w| w >= ctx.mp.p) {
                return Err(Error::domain(format!(
                    "recorded coefficient {w} is not a residue modulo {}",
                    ctx.mp.p
                )));
            }
            Ok(DensePoly::from_base_coeffs(&ctx.field, &words))
        })
        .collect::<Result<_>>()?;
    let mut coins = ReplayCoins::new(transcript.coin_draws()?);
    let run = drive_multiround(&ctx, claim, &mut coins, |_, k, _| {
        polys.get(k - 1).cloned().ok_or_else(|| {
            Error::domain(format!("transcript records {} round polynomials, round {k} needs more", polys.len()))
        })
    })?;
    Ok(run)
}

/// The statement the honest prover submits to the `rounds`-message model
/// counter: the arithmetized formula, a modulus large enough for both the
/// exact count and the per-round degree bound, and the exact count itself
/// (prover-side cube enumeration).
pub fn sat_multiround_claim(f: &BoolFormula, rounds: u32) -> Result<SumClaim> {
    let circuit = arithmetize(f);
    let n = circuit.n_inputs();
    let base_p = sat_prime(n)?;
    // The prime must also clear the per-round degree; rebuild the claim's
    // modulus upward if the block structure demands it.
    let probe = multiround_context(
        &SumClaim { circuit: circuit.clone(), p: base_p, claimed: 0 },
        rounds,
    );
    let p = match probe {
        Ok(_) => base_p,
        Err(Error::Usage(_)) => {
            let blocks = rounds as usize + 1;
            let n_padded = n.div_ceil(blocks) * blocks;
            let block_vars = n_padded / blocks;
            // padding adds one degree per dummy variable
            let d_pad = circuit.syntactic_degree() + (n_padded - n) as u64;
            let need = d_pad
                .checked_mul((1u64 << block_vars) - 1)
                .ok_or_else(|| Error::capacity("round degree exceeds 64 bits".to_string()))?
                .max(1u64 << block_vars)
                .max(1u64 << n.min(60));
            find_prime(need.max(2))?
        }
        Err(e) => return Err(e),
    };
    let claimed = ops::scoped(Phase::Prover, || {
        let vars = circuit.n_inputs();
        let field = Field::prime(p)?;
        let mut total = 0u64;
        let chunk = 1usize << vars.min(12);
        let all = 1u64 << vars;
        let mut start = 0u64;
        while start < all {
            let count = chunk.min((all - start) as usize);
            let cols: Vec<Vec<u64>> = (0..vars)
                .map(|i| (0..count).map(|a| (start + a as u64) >> i & 1).collect())
                .collect();
            let out = circuit.evaluate_columns(&field, &cols, count)?;
            for v in out {
                total = addmod(total, v, p);
            }
            start += count as u64;
        }
        Ok::<u64, Error>(total)
    })?;
    Ok(SumClaim { circuit, p, claimed })
}

/// Certified model count through the multi-round protocol; counts agree
/// with [`count_sat`] on every formula (both are exact).
pub fn count_sat_multiround(
    f: &BoolFormula,
    rounds: u32,
    coins: &mut dyn CoinSupply,
) -> Result<CountOutput> {
    let claim = sat_multiround_claim(f, rounds)?;
    let run = multiround_sum(&claim, rounds, coins)?;
    Ok(CountOutput {
        outcome: run.outcome.map(|()| claim.claimed),
        p: claim.p,
        coins_used: run.coins_used,
    })
}
