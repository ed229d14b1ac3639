//! Brute-force reference implementations.
//!
//! Everything here answers by definition: per-point evaluation, exhaustive
//! enumeration of cubes / permutations / subsets, recursive quantifier
//! expansion.  None of it touches the protocol machinery, so a protocol bug
//! cannot hide inside its own reference.  Where the protocols reduce
//! modulo a prime, the oracles work over exact integers (big integers for
//! the permanent, whose values outgrow `u64`).
//!
//! All enumerations carry explicit capacity limits; exceeding one is a
//! [`Error::Capacity`](crate::error::Error) error rather than a silent hang.

use num_bigint::BigUint;

use crate::circuit::{BoolFormula, Circuit, Quant, QuantifiedFormula};
use crate::error::{Error, Result};
use crate::field::{is_prime, Field};

/// Per-point circuit evaluation over `F_q`, no protocol: the reference for
/// every batch-evaluation claim.
pub fn oracle_multipoint(c: &Circuit, q: u64, points: &[Vec<u64>]) -> Result<Vec<u64>> {
    let field = Field::prime(q)?;
    points
        .iter()
        .map(|row| {
            let pt: Vec<_> = row.iter().map(|&v| field.embed(v % q)).collect();
            let v = c.evaluate(&field, &pt)?;
            Ok(v.project_base().expect("prime-field values project"))
        })
        .collect()
}

/// `Σ_{b ∈ {0,1}^n} C(b) mod p` by enumerating all `2^n` points.
pub fn oracle_cube_sum(c: &Circuit, p: u64) -> Result<u64> {
    let n = c.n_inputs();
    if n > 20 {
        return Err(Error::capacity(format!(
            "cube enumeration capped at 20 variables, circuit has {n}"
        )));
    }
    if !is_prime(p) {
        return Err(Error::usage(format!("cube sum modulus {p} must be prime")));
    }
    let field = Field::prime(p)?;
    let zero = field.zero();
    let one = field.one();
    let mut acc = field.zero();
    for mask in 0u64..1 << n {
        let pt: Vec<_> = (0..n)
            .map(|j| if mask >> j & 1 == 1 { one.clone() } else { zero.clone() })
            .collect();
        acc = acc.checked_add(&c.evaluate(&field, &pt)?)?;
    }
    Ok(acc.project_base().expect("prime-field values project"))
}

/// Number of satisfying assignments, by truth table.
pub fn oracle_sat(f: &BoolFormula) -> Result<u64> {
    let n = f.num_vars();
    if n > 20 {
        return Err(Error::capacity(format!(
            "truth-table enumeration capped at 20 variables, formula has {n}"
        )));
    }
    let mut count = 0;
    let mut assignment = vec![false; n];
    for mask in 0u64..1 << n {
        for (j, a) in assignment.iter_mut().enumerate() {
            *a = mask >> j & 1 == 1;
        }
        if f.eval(&assignment) {
            count += 1;
        }
    }
    Ok(count)
}

/// Truth of a quantified Boolean formula by recursive expansion.
pub fn oracle_qbf(q: &QuantifiedFormula) -> Result<bool> {
    let n = q.num_vars();
    if n > 14 {
        return Err(Error::capacity(format!(
            "quantifier expansion capped at 14 variables, formula has {n}"
        )));
    }
    fn decide(prefix: &[Quant], matrix: &BoolFormula, assignment: &mut Vec<bool>) -> bool {
        match prefix.first() {
            None => matrix.eval(assignment),
            Some(q) => {
                let rest = &prefix[1..];
                let mut verdicts = [false, false];
                for (slot, val) in verdicts.iter_mut().zip([false, true]) {
                    assignment.push(val);
                    *slot = decide(rest, matrix, assignment);
                    assignment.pop();
                }
                match q {
                    Quant::Exists => verdicts[0] || verdicts[1],
                    Quant::ForAll => verdicts[0] && verdicts[1],
                }
            }
        }
    }
    Ok(decide(q.prefix(), q.matrix(), &mut Vec::with_capacity(n)))
}

fn require_square<T>(m: &[Vec<T>], what: &str) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::usage(format!("{what} must be square")));
    }
    Ok(n)
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..n).collect();
    let mut stack = vec![0usize; n];
    f(&items);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(stack[i], i);
            }
            f(&items);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
}

/// Permanent by the permutation expansion `Σ_σ Π_i M[i][σ(i)]`, over exact
/// integers.
pub fn oracle_permanent(m: &[Vec<u64>]) -> Result<BigUint> {
    let n = require_square(m, "matrix")?;
    if n > 8 {
        return Err(Error::capacity(format!(
            "permutation expansion capped at 8×8, matrix is {n}×{n}"
        )));
    }
    if n == 0 {
        return Ok(BigUint::from(1u32)); // empty product over the empty permutation
    }
    let mut total = BigUint::from(0u32);
    for_each_permutation(n, |perm| {
        let mut term = BigUint::from(1u32);
        for (i, &j) in perm.iter().enumerate() {
            term *= m[i][j];
        }
        total += term;
    });
    Ok(total)
}

/// Directed Hamiltonian cycles through all `n` nodes, one count per cyclic
/// sequence, by enumerating the `(n−1)!` orders of nodes `2..n`.
pub fn oracle_hamcycles(adj: &[Vec<bool>]) -> Result<u64> {
    let n = require_square(adj, "adjacency matrix")?;
    if n < 2 {
        return Err(Error::usage("Hamiltonian cycles need at least two nodes".to_string()));
    }
    if n > 8 {
        return Err(Error::capacity(format!(
            "cycle enumeration capped at 8 nodes, graph has {n}"
        )));
    }
    let mut count = 0u64;
    for_each_permutation(n - 1, |perm| {
        // perm maps positions 1..n to nodes 1..n (0-based: node perm[i]+1)
        let mut prev = 0usize;
        let mut ok = true;
        for &x in perm {
            let node = x + 1;
            if !adj[prev][node] {
                ok = false;
                break;
            }
            prev = node;
        }
        if ok && adj[prev][0] {
            count += 1;
        }
    });
    Ok(count)
}

fn require_same_dim(a: &[Vec<bool>]) -> Result<usize> {
    let d = a.first().map(|v| v.len()).unwrap_or(0);
    if a.iter().any(|v| v.len() != d) {
        return Err(Error::usage("all vectors must share one dimension".to_string()));
    }
    Ok(d)
}

/// For each vector, how many vectors of the set (itself included) it is
/// orthogonal to, by checking all `n²` inner products.
pub fn oracle_ov(a: &[Vec<bool>]) -> Result<Vec<u64>> {
    require_same_dim(a)?;
    Ok(a.iter()
        .map(|u| {
            a.iter()
                .filter(|v| u.iter().zip(v.iter()).all(|(&x, &y)| !(x && y)))
                .count() as u64
        })
        .collect())
}

/// For each vector, how many vectors of the set (itself included) lie
/// within Hamming distance `k`.
pub fn oracle_hamming(a: &[Vec<bool>], k: usize) -> Result<Vec<u64>> {
    let d = require_same_dim(a)?;
    if k > d {
        return Err(Error::usage(format!(
            "distance threshold {k} exceeds the dimension {d}"
        )));
    }
    Ok(a.iter()
        .map(|u| {
            a.iter()
                .filter(|v| u.iter().zip(v.iter()).filter(|(x, y)| x != y).count() <= k)
                .count() as u64
        })
        .collect())
}

/// Number of `k`-cliques in an undirected graph, by enumerating all
/// `k`-subsets.
pub fn oracle_cliques(adj: &[Vec<bool>], k: usize) -> Result<u64> {
    let n = require_square(adj, "adjacency matrix")?;
    for i in 0..n {
        for j in 0..n {
            if adj[i][j] != adj[j][i] {
                return Err(Error::usage(
                    "clique counting expects a symmetric adjacency matrix".to_string(),
                ));
            }
        }
    }
    if k == 0 {
        return Ok(1); // the empty clique
    }
    fn extend(adj: &[Vec<bool>], chosen: &mut Vec<usize>, from: usize, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut count = 0;
        for v in from..adj.len() {
            if chosen.iter().all(|&u| adj[u][v]) {
                chosen.push(v);
                count += extend(adj, chosen, v + 1, left - 1);
                chosen.pop();
            }
        }
        count
    }
    Ok(extend(adj, &mut Vec::with_capacity(k), 0, k))
}
