//! Subproduct trees: shared machinery for evaluating one polynomial at many
//! points (remainder down-sweep) and for interpolation (weighted up-sweep).
//!
//! A tree is built once per point set; an [`Interpolator`] adds the
//! barycentric-style weights `1 / M'(p_i)` on top and can then interpolate
//! any number of value columns over the same nodes.  Protocol code exploits
//! that: the same tree serves both the decoding of a proof polynomial at the
//! anchor points and the interpolation pass that built it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

use super::{raw_add, raw_derivative, raw_divrem, raw_batch_invert, raw_mul, trim_raw};

pub(crate) struct SubproductTree {
    field: Field,
    /// Flattened point limbs, `ell` per point, in input order.
    points: Vec<u64>,
    /// `levels[0][i] = (x - p_i)`; each higher node is the product of its
    /// (up to) two children, the last level holding the master polynomial
    /// `M(x) = prod_i (x - p_i)`.
    levels: Vec<Vec<Vec<u64>>>,
}

impl SubproductTree {
    pub(crate) fn build(field: &Field, points: &[FieldElement]) -> Result<SubproductTree> {
        if points.is_empty() {
            return Err(Error::usage(
                "a subproduct tree needs at least one point".to_string(),
            ));
        }
        let ell = field.ell();
        let repr = field.repr();
        let mut flat = Vec::with_capacity(points.len() * ell);
        let mut leaves: Vec<Vec<u64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.field() != field {
                return Err(Error::usage(format!(
                    "point from {} used with a tree over {}",
                    p.field(),
                    field
                )));
            }
            flat.extend_from_slice(p.limbs());
            let mut leaf = vec![0u64; 2 * ell];
            leaf[..ell].copy_from_slice(p.limbs());
            repr.limb_neg(&mut leaf[..ell]);
            leaf[ell] = 1;
            leaves.push(leaf);
        }
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let below = levels.last().unwrap();
            let mut next = Vec::with_capacity(below.len().div_ceil(2));
            for pair in below.chunks(2) {
                next.push(match pair {
                    [a, b] => raw_mul(repr, a, b),
                    [a] => a.clone(),
                    _ => unreachable!(),
                });
            }
            levels.push(next);
        }
        Ok(SubproductTree {
            field: field.clone(),
            points: flat,
            levels,
        })
    }

    pub(crate) fn field(&self) -> &Field {
        &self.field
    }

    pub(crate) fn len(&self) -> usize {
        self.levels[0].len()
    }

    /// The master polynomial `M(x)`, degree `len()`.
    pub(crate) fn master(&self) -> &[u64] {
        &self.levels.last().unwrap()[0]
    }

    /// Evaluate `poly` (raw limbs) at every tree point, by reducing down the
    /// tree.  Duplicated points simply produce equal values.
    pub(crate) fn eval(&self, poly: &[u64]) -> Result<Vec<FieldElement>> {
        let ell = self.field.ell();
        let repr = self.field.repr();
        let mut cur: Vec<Vec<u64>> = vec![mod_by(repr, poly, self.master())?];
        for k in (0..self.levels.len() - 1).rev() {
            let level = &self.levels[k];
            let mut next: Vec<Vec<u64>> = Vec::with_capacity(level.len());
            for (i, rem) in cur.iter().enumerate() {
                let left = 2 * i;
                next.push(mod_by(repr, rem, &level[left])?);
                if left + 1 < level.len() {
                    next.push(mod_by(repr, rem, &level[left + 1])?);
                }
            }
            cur = next;
        }
        debug_assert_eq!(cur.len(), self.len());
        cur.into_iter()
            .map(|mut rem| {
                rem.resize(ell, 0);
                Ok(self
                    .field
                    .from_limbs(rem)
                    .expect("remainders stay reduced"))
            })
            .collect()
    }

    /// The tree's points as field elements, in input order.
    fn point(&self, i: usize) -> FieldElement {
        let ell = self.field.ell();
        self.field
            .from_limbs(self.points[i * ell..(i + 1) * ell].to_vec())
            .expect("stored point limbs are reduced")
    }
}

/// `poly mod node`, skipping the division when the degree is already small.
fn mod_by(repr: &crate::field::FieldRepr, poly: &[u64], node: &[u64]) -> Result<Vec<u64>> {
    if poly.len() < node.len() {
        return Ok(poly.to_vec());
    }
    let (_, rem) = raw_divrem(repr, poly, node)?;
    Ok(rem)
}

/// A subproduct tree plus interpolation weights `1 / M'(p_i)`: repeated
/// interpolations over the same points share all of the tree work.
pub(crate) struct Interpolator {
    tree: SubproductTree,
    /// Flattened weights, `ell` limbs per point.
    weights: Vec<Vec<u64>>,
}

impl Interpolator {
    /// Errors with a `Domain` rejection if two points coincide (there is no
    /// interpolating polynomial through conflicting nodes).
    pub(crate) fn new(tree: SubproductTree) -> Result<Interpolator> {
        let ell = tree.field.ell();
        let mut seen: HashMap<&[u64], usize> = HashMap::new();
        for i in 0..tree.len() {
            let key = &tree.points[i * ell..(i + 1) * ell];
            if let Some(&first) = seen.get(key) {
                return Err(Error::domain(format!(
                    "duplicate abscissa {} at positions {first} and {i}",
                    tree.point(i)
                )));
            }
            seen.insert(key, i);
        }
        let deriv = raw_derivative(tree.field.repr(), tree.master());
        let mut weights: Vec<Vec<u64>> = tree
            .eval(&deriv)?
            .into_iter()
            .map(|e| e.limbs().to_vec())
            .collect();
        raw_batch_invert(tree.field.repr(), &mut weights)?;
        Ok(Interpolator { tree, weights })
    }

    pub(crate) fn tree(&self) -> &SubproductTree {
        &self.tree
    }

    /// The weights `1 / M'(p_i)`, one `ell`-limb element per point; these
    /// double as the barycentric factors for evaluating an interpolant at an
    /// off-node point without materializing it.
    pub(crate) fn weights(&self) -> &[Vec<u64>] {
        &self.weights
    }

    /// Interpolate one column of values (one per tree point, in order).
    pub(crate) fn interpolate(&self, values: &[FieldElement]) -> Result<super::DensePoly> {
        let field = &self.tree.field;
        if values.len() != self.tree.len() {
            return Err(Error::usage(format!(
                "interpolation got {} values for {} points",
                values.len(),
                self.tree.len()
            )));
        }
        let ell = field.ell();
        let repr = field.repr();
        let mut tmp = vec![0u64; ell];
        let mut scratch = Vec::new();
        // Leaf polynomials: the constants v_i / M'(p_i).
        let mut cur: Vec<Vec<u64>> = Vec::with_capacity(values.len());
        for (v, w) in values.iter().zip(self.weights.iter()) {
            if v.field() != field {
                return Err(Error::usage(format!(
                    "value from {} interpolated over {}",
                    v.field(),
                    field
                )));
            }
            if v.is_zero() {
                cur.push(vec![]);
            } else {
                repr.limb_mul(v.limbs(), w, &mut tmp, &mut scratch);
                cur.push(tmp.clone());
            }
        }
        // Up-sweep: combine children against the opposite child's product.
        for k in 0..self.tree.levels.len() - 1 {
            let level = &self.tree.levels[k];
            let mut next: Vec<Vec<u64>> = Vec::with_capacity(level.len().div_ceil(2));
            let mut i = 0;
            while i < cur.len() {
                if i + 1 < cur.len() {
                    let lhs = raw_mul(repr, &cur[i], &level[i + 1]);
                    let rhs = raw_mul(repr, &cur[i + 1], &level[i]);
                    let mut sum = raw_add(repr, &lhs, &rhs);
                    trim_raw(ell, &mut sum);
                    next.push(sum);
                    i += 2;
                } else {
                    next.push(std::mem::take(&mut cur[i]));
                    i += 1;
                }
            }
            cur = next;
        }
        let result = cur.into_iter().next().unwrap_or_default();
        Ok(super::DensePoly::from_raw(field.clone(), result))
    }
}
