//! Batch-evaluation applications on vector sets and graphs: certified
//! orthogonal-vector counts, Hamming-neighbor counts, and k-clique counting
//! via the elementary symmetric polynomial.
//!
//! Each application encodes its pairwise question as one low-degree circuit
//! and a set of evaluation points — one per data element — then runs the
//! batch-evaluation protocol once, so the verifier's arithmetic is a single
//! spot check plus fast decoding instead of the quadratic pairwise scan.
//! The primes are chosen large enough that every certified residue is the
//! exact integer count.

use crate::circuit::{Circuit, CircuitBuilder};
use crate::coins::CoinSupply;
use crate::error::{Error, Outcome, RejectReason, Result};
use crate::field::{find_prime, Field, FieldElement};
use crate::ma::{choose_params, prove_eval, verify_eval};
use crate::ops::{self, Phase};
use crate::poly::{Interpolator, SubproductTree};
use crate::sum::CountOutput;

/// One certified count per input element, with the working prime and the
/// verifier's coin bill.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsOutput {
    pub outcome: Outcome<Vec<u64>>,
    pub p: u64,
    pub coins_used: u64,
}

impl CountsOutput {
    pub fn counts(&self) -> Option<&[u64]> {
        match &self.outcome {
            Outcome::Accepted(c) => Some(c),
            Outcome::Rejected(_) => None,
        }
    }
}

/// Runs the batch-evaluation protocol end to end for an application
/// circuit: honest prover, then verifier, with operation accounting per
/// phase.
fn certified_values(
    circuit: &Circuit,
    points: &[Vec<u64>],
    p: u64,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<(Outcome<Vec<u64>>, u64)> {
    let params = choose_params(circuit, points.len() as u64, p, eps_exp)?;
    let proof = ops::scoped(Phase::Prover, || prove_eval(circuit, points, &params))?;
    let out = ops::scoped(Phase::Verifier, || verify_eval(circuit, points, &proof, coins))?;
    Ok((out.outcome, out.coins_used))
}

fn validated_rows(a: &[Vec<bool>]) -> Result<usize> {
    if a.is_empty() {
        return Err(Error::usage("the vector set must not be empty".to_string()));
    }
    let d = a[0].len();
    if a.iter().any(|row| row.len() != d) {
        return Err(Error::usage("all vectors must share one dimension".to_string()));
    }
    Ok(d)
}

/// For each `u ∈ A`, the certified number of `v ∈ A` with `⟨u,v⟩ = 0`
/// (`u` itself included when self-orthogonal).  The circuit
/// `P′(x) = Σ_{v∈A} Π_i (1 − x_i·v_i)` is certified at the points of `A`
/// under a prime beyond `n²·d`, so residues are exact counts.
pub fn ov_count(a: &[Vec<bool>], eps_exp: u32, coins: &mut dyn CoinSupply) -> Result<CountsOutput> {
    let d = validated_rows(a)?;
    let n = a.len() as u64;
    let bound = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_mul(d as u64))
        .filter(|&b| b < 1 << 61)
        .ok_or_else(|| Error::capacity("n²·d exceeds the modulus budget".to_string()))?;
    let p = find_prime(bound.max(2))?;

    let mut b = CircuitBuilder::new(d);
    let one = b.constant(1);
    let terms: Vec<usize> = a
        .iter()
        .map(|v| {
            let factors: Vec<usize> = (0..d)
                .filter(|&i| v[i])
                .map(|i| {
                    let x = b.input(i);
                    b.sub(one, x)
                })
                .collect();
            b.balanced_product(&factors)
        })
        .collect();
    let out = b.balanced_sum(&terms);
    let circuit = b.finish(out);

    let points: Vec<Vec<u64>> =
        a.iter().map(|v| v.iter().map(|&bit| u64::from(bit)).collect()).collect();
    let (outcome, coins_used) = certified_values(&circuit, &points, p, eps_exp, coins)?;
    Ok(CountsOutput { outcome, p, coins_used })
}

/// For each `v ∈ A`, the certified number of `w ∈ A` within Hamming
/// distance `k` (self included).  Bits are mapped `0 → 1, 1 → −1`, making
/// the inner product of two mapped vectors `d − 2·distance`; a univariate
/// indicator interpolated through the `2d+1` reachable products flags
/// `⟨·,·⟩ ≥ d − 2k`, and the summed indicator is certified at the mapped
/// points of `A`.
pub fn hamming_count(
    a: &[Vec<bool>],
    k: usize,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<CountsOutput> {
    let d = validated_rows(a)?;
    if k > d {
        return Err(Error::usage(format!(
            "distance threshold {k} exceeds the dimension {d}"
        )));
    }
    let n = a.len() as u64;
    let bound = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_mul(2 * d as u64 + 1))
        .filter(|&b| b < 1 << 61)
        .ok_or_else(|| Error::capacity("n²·(2d+1) exceeds the modulus budget".to_string()))?;
    let p = find_prime(bound.max(2))?;
    let field = Field::prime(p)?;

    // signed residue j ∈ [−d, d] as an element of F_p
    let signed = |j: i64| -> u64 {
        if j >= 0 {
            j as u64
        } else {
            p - j.unsigned_abs()
        }
    };
    // indicator through the 2d+1 inner-product values: 1 iff j ≥ d − 2k
    let dd = d as i64;
    let nodes: Vec<FieldElement> = (-dd..=dd).map(|j| field.embed(signed(j))).collect();
    let values: Vec<FieldElement> = (-dd..=dd)
        .map(|j| field.embed(u64::from(j >= dd - 2 * k as i64)))
        .collect();
    let interp = Interpolator::new(SubproductTree::build(&field, &nodes)?)?;
    let psi = interp.interpolate(&values)?;

    let mut b = CircuitBuilder::new(d);
    let minus_one = b.constant(-1);
    let coeffs: Vec<i64> = psi
        .coeffs()
        .iter()
        .map(|c| c.project_base().expect("prime-field values project") as i64)
        .collect();
    let terms: Vec<usize> = a
        .iter()
        .map(|w| {
            let signs: Vec<usize> = (0..d)
                .map(|i| {
                    let x = b.input(i);
                    if w[i] {
                        b.mul(minus_one, x)
                    } else {
                        x
                    }
                })
                .collect();
            let inner = b.balanced_sum(&signs);
            // Horner: Ψ(inner)
            let mut acc = b.constant(*coeffs.last().unwrap_or(&0));
            for &c in coeffs.iter().rev().skip(1) {
                let shifted = b.mul(acc, inner);
                let cg = b.constant(c);
                acc = b.add(shifted, cg);
            }
            acc
        })
        .collect();
    let out = b.balanced_sum(&terms);
    let circuit = b.finish(out);

    let points: Vec<Vec<u64>> = a
        .iter()
        .map(|v| v.iter().map(|&bit| if bit { p - 1 } else { 1 }).collect())
        .collect();
    let (outcome, coins_used) = certified_values(&circuit, &points, p, eps_exp, coins)?;
    Ok(CountsOutput { outcome, p, coins_used })
}

/// The k-th elementary symmetric polynomial `E^k_n = Σ_{|S|=k} Π_{i∈S} x_i`
/// by the prefix recurrence `e_j ← e_j + x_i·e_{j−1}`: size `O(n·k)`,
/// syntactic degree exactly `k`.
pub fn elementary_symmetric_circuit(k: usize, n: usize) -> Result<Circuit> {
    if k > n {
        return Err(Error::usage(format!(
            "E^{k} needs at least {k} variables, got {n}"
        )));
    }
    let mut b = CircuitBuilder::new(n);
    let one = b.constant(1);
    let mut e: Vec<Option<usize>> = vec![None; k + 1];
    e[0] = Some(one);
    for i in 0..n {
        let x = b.input(i);
        for j in (1..=k.min(i + 1)).rev() {
            if let Some(prev) = e[j - 1] {
                let term = b.mul(x, prev);
                e[j] = Some(match e[j] {
                    Some(cur) => b.add(cur, term),
                    None => term,
                });
            }
        }
    }
    let out = e[k].expect("k ≤ n leaves e_k populated");
    Ok(b.finish(out))
}

/// All cliques of exactly `size` vertices, as increasing vertex lists.
fn cliques_of_size(adj: &[Vec<bool>], size: usize) -> Vec<Vec<usize>> {
    fn extend(
        adj: &[Vec<bool>],
        size: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(0, |&l| l + 1);
        for v in start..adj.len() {
            if cur.iter().all(|&u| adj[u][v]) {
                cur.push(v);
                extend(adj, size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(adj, size, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Certified number of k-cliques.  With `ℓ = ⌊k/2⌋`, the circuit sums
/// `E^{k−ℓ}` restricted to the joint neighborhood of each ℓ-clique; its
/// certified values over all `(k−ℓ)`-clique indicator vectors total
/// `C(k,ℓ)` per k-clique (the ways to split one into an ordered
/// ℓ/(k−ℓ) pair), so the total must divide exactly — anything else is
/// rejected.
pub fn kclique_count(
    adj: &[Vec<bool>],
    k: usize,
    eps_exp: u32,
    coins: &mut dyn CoinSupply,
) -> Result<CountOutput> {
    let n = adj.len();
    if adj.iter().any(|row| row.len() != n) {
        return Err(Error::usage("adjacency matrix must be square".to_string()));
    }
    if (0..n).any(|i| (0..n).any(|j| adj[i][j] != adj[j][i])) {
        return Err(Error::usage("adjacency matrix must be symmetric".to_string()));
    }
    if k < 2 {
        return Err(Error::usage(format!("clique size {k} must be at least 2")));
    }
    if n < k {
        return Err(Error::usage(format!(
            "a {k}-clique needs at least {k} vertices, the graph has {n}"
        )));
    }
    let ell = k / 2;
    let r = k - ell;
    let multiplicity = binomial(k as u64, ell as u64)
        .filter(|&m| m < 1 << 61)
        .ok_or_else(|| Error::capacity("split multiplicity overflows".to_string()))?
        as u64;
    let bound = binomial(n as u64, ell as u64)
        .and_then(|a| binomial(n as u64, r as u64).and_then(|b| a.checked_mul(b)))
        .filter(|&b| b < 1 << 61)
        .ok_or_else(|| Error::capacity("clique-pair bound exceeds the modulus budget".to_string()))?
        as u64;
    let p = find_prime(bound.max(2))?;

    let anchors = cliques_of_size(adj, ell);
    let probes = cliques_of_size(adj, r);
    if probes.is_empty() || anchors.is_empty() {
        // no candidate split exists, hence no k-clique; nothing to certify
        return Ok(CountOutput { outcome: Outcome::Accepted(0), p, coins_used: 0 });
    }

    let mut b = CircuitBuilder::new(n);
    let zero = b.constant(0);
    let sym = elementary_symmetric_circuit(r, n)?;
    let terms: Vec<usize> = anchors
        .iter()
        .map(|s| {
            // joint neighborhood: vertices outside S adjacent to all of S
            let map: Vec<usize> = (0..n)
                .map(|v| {
                    if !s.contains(&v) && s.iter().all(|&u| adj[u][v]) {
                        b.input(v)
                    } else {
                        zero
                    }
                })
                .collect();
            b.inline(&sym, &map)
        })
        .collect();
    let out = b.balanced_sum(&terms);
    let circuit = b.finish(out);

    let points: Vec<Vec<u64>> = probes
        .iter()
        .map(|t| {
            let mut row = vec![0u64; n];
            for &v in t {
                row[v] = 1;
            }
            row
        })
        .collect();
    let (outcome, coins_used) = certified_values(&circuit, &points, p, eps_exp, coins)?;
    let outcome = match outcome {
        Outcome::Accepted(values) => {
            // exact in ℤ: the honest total is bounded by #anchors·#probes < p
            let total: u128 = values.iter().map(|&v| u128::from(v)).sum();
            if total % u128::from(multiplicity) == 0 && total / u128::from(multiplicity) < u128::from(p)
            {
                Outcome::Accepted((total / u128::from(multiplicity)) as u64)
            } else {
                Outcome::Rejected(RejectReason::Unsound(format!(
                    "certified pair total {total} is not a clean multiple of the split multiplicity {multiplicity}"
                )))
            }
        }
        Outcome::Rejected(rej) => Outcome::Rejected(rej),
    };
    Ok(CountOutput { outcome, p, coins_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::Coins;
    use crate::oracle::{oracle_cliques, oracle_hamming, oracle_ov};
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn bits(rows: &[&[u8]]) -> Vec<Vec<bool>> {
        rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect()
    }

    fn random_vectors(rng: &mut ChaCha12Rng, n: usize, d: usize) -> Vec<Vec<bool>> {
        (0..n).map(|_| (0..d).map(|_| rng.next_u64() % 2 == 1).collect()).collect()
    }

    fn random_graph(rng: &mut ChaCha12Rng, n: usize) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let e = rng.next_u64() % 2 == 0;
                adj[i][j] = e;
                adj[j][i] = e;
            }
        }
        adj
    }

    #[test]
    fn orthogonal_counts_on_the_hand_examples() {
        let a = bits(&[&[1, 0], &[0, 1]]);
        let mut coins = Coins::from_seed(0);
        let out = ov_count(&a, 20, &mut coins).unwrap();
        assert_eq!(out.counts(), Some(&[1u64, 1][..]));
        assert_eq!(out.p, 11); // beyond n²·d = 8

        let z = bits(&[&[0, 0]]);
        let out = ov_count(&z, 20, &mut Coins::from_seed(1)).unwrap();
        assert_eq!(out.counts(), Some(&[1u64][..]));
    }

    #[test]
    fn orthogonal_counts_match_the_pairwise_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for trial in 0..10 {
            let n = 1 + (rng.next_u64() as usize) % 20;
            let d = 1 + (rng.next_u64() as usize) % 8;
            let a = random_vectors(&mut rng, n, d);
            let out = ov_count(&a, 20, &mut Coins::from_seed(trial)).unwrap();
            assert_eq!(out.counts().unwrap(), oracle_ov(&a).unwrap(), "trial {trial}");
        }
    }

    #[test]
    fn hamming_counts_at_the_threshold_extremes() {
        let a = bits(&[&[0, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        // k = d: everything is within distance 3 of everything
        let out = hamming_count(&a, 3, 20, &mut Coins::from_seed(0)).unwrap();
        assert_eq!(out.counts(), Some(&[3u64, 3, 3][..]));
        // k = 0 over distinct vectors: only the vector itself
        let out = hamming_count(&a, 0, 20, &mut Coins::from_seed(1)).unwrap();
        assert_eq!(out.counts(), Some(&[1u64, 1, 1][..]));

        assert!(matches!(
            hamming_count(&a, 4, 20, &mut Coins::from_seed(2)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn hamming_counts_match_the_pairwise_oracle_and_grow_with_k() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for trial in 0..8 {
            let n = 1 + (rng.next_u64() as usize) % 12;
            let d = 1 + (rng.next_u64() as usize) % 6;
            let a = random_vectors(&mut rng, n, d);
            let mut last: Option<Vec<u64>> = None;
            for k in 0..=d {
                let out = hamming_count(&a, k, 20, &mut Coins::from_seed(trial)).unwrap();
                let counts = out.counts().unwrap().to_vec();
                assert_eq!(counts, oracle_hamming(&a, k).unwrap(), "trial {trial} k {k}");
                if let Some(prev) = &last {
                    assert!(
                        prev.iter().zip(&counts).all(|(a, b)| a <= b),
                        "trial {trial}: counts shrank as k grew"
                    );
                }
                last = Some(counts);
            }
        }
    }

    #[test]
    fn elementary_symmetric_matches_the_subset_definition() {
        let f = Field::prime(10007).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for n in 0..=6usize {
            for k in 0..=n {
                let c = elementary_symmetric_circuit(k, n).unwrap();
                assert_eq!(c.syntactic_degree(), k as u64, "n {n} k {k}");
                for _ in 0..4 {
                    let xs: Vec<u64> = (0..n).map(|_| rng.next_u64() % 10007).collect();
                    let point: Vec<FieldElement> = xs.iter().map(|&x| f.embed(x)).collect();
                    let got = c.evaluate(&f, &point).unwrap();
                    // subset-sum definition
                    let mut want = f.zero();
                    for mask in 0u64..1 << n {
                        if mask.count_ones() as usize != k {
                            continue;
                        }
                        let mut prod = f.one();
                        for (i, x) in point.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                prod = prod.checked_mul(x).unwrap();
                            }
                        }
                        want = want.checked_add(&prod).unwrap();
                    }
                    assert_eq!(got, want, "n {n} k {k}");
                }
            }
        }
        assert!(matches!(elementary_symmetric_circuit(3, 2), Err(Error::Usage(_))));
    }

    #[test]
    fn elementary_symmetric_counts_ones_binomially() {
        let f = Field::prime(101).unwrap();
        for n in 1..=8usize {
            for k in 0..=n {
                let c = elementary_symmetric_circuit(k, n).unwrap();
                for mask in 0u64..1 << n {
                    let point: Vec<FieldElement> =
                        (0..n).map(|i| f.embed(mask >> i & 1)).collect();
                    let got = c.evaluate(&f, &point).unwrap();
                    let ones = mask.count_ones() as u64;
                    let want = binomial(ones, k as u64).unwrap() as u64 % 101;
                    assert_eq!(got, f.embed(want), "n {n} k {k} mask {mask}");
                }
            }
        }
    }

    #[test]
    fn clique_counts_on_the_hand_examples() {
        let k4: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i != j).collect()).collect();
        let out = kclique_count(&k4, 4, 20, &mut Coins::from_seed(0)).unwrap();
        assert_eq!(out.outcome, Outcome::Accepted(1));

        let empty = vec![vec![false; 5]; 5];
        for k in 2..=5 {
            let out = kclique_count(&empty, k, 20, &mut Coins::from_seed(1)).unwrap();
            assert_eq!(out.outcome, Outcome::Accepted(0), "k {k}");
            if k >= 3 {
                // no 2-clique probes exist at all: nothing was certified
                assert_eq!(out.coins_used, 0, "k {k}");
            }
        }

        let k5: Vec<Vec<bool>> = (0..5).map(|i| (0..5).map(|j| i != j).collect()).collect();
        for (k, expect) in [(2u32, 10u64), (3, 10), (4, 5), (5, 1)] {
            let out = kclique_count(&k5, k as usize, 20, &mut Coins::from_seed(2)).unwrap();
            assert_eq!(out.outcome, Outcome::Accepted(expect), "k {k}");
        }
    }

    #[test]
    fn clique_counts_match_the_enumeration_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for trial in 0..6 {
            let n = 6 + (rng.next_u64() as usize) % 7;
            let adj = random_graph(&mut rng, n);
            for k in [2usize, 3, 4] {
                let out = kclique_count(&adj, k, 20, &mut Coins::from_seed(trial)).unwrap();
                assert_eq!(
                    out.outcome,
                    Outcome::Accepted(oracle_cliques(&adj, k).unwrap()),
                    "trial {trial} k {k}"
                );
            }
        }
    }

    #[test]
    fn clique_count_of_two_is_the_edge_count() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for trial in 0..5 {
            let n = 3 + (rng.next_u64() as usize) % 10;
            let adj = random_graph(&mut rng, n);
            let edges: u64 = (0..n)
                .map(|i| (i + 1..n).filter(|&j| adj[i][j]).count() as u64)
                .sum();
            let out = kclique_count(&adj, 2, 20, &mut Coins::from_seed(trial)).unwrap();
            assert_eq!(out.outcome, Outcome::Accepted(edges), "trial {trial}");
        }
    }

    #[test]
    fn clique_validates_its_inputs() {
        let tri = random_graph(&mut ChaCha12Rng::seed_from_u64(0), 3);
        let mut coins = Coins::from_seed(0);
        assert!(matches!(kclique_count(&tri, 1, 20, &mut coins), Err(Error::Usage(_))));
        assert!(matches!(kclique_count(&tri, 4, 20, &mut coins), Err(Error::Usage(_))));
        let mut lop = tri.clone();
        lop[0][1] = true;
        lop[1][0] = false;
        assert!(matches!(kclique_count(&lop, 2, 20, &mut coins), Err(Error::Usage(_))));
    }
}
