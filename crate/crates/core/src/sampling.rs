//! Discrete sampling from nonnegative weight vectors via cumulative binary
//! trees, and the signed split A_k = A_k⁺ − A_k⁻ used by the two-spike
//! oracle.
//!
//! A draw consumes exactly one uniform variate and descends the tree in
//! O(log nnz), so expectations over draws stay exhaustively enumerable.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrixDual;

/// Cumulative binary tree over (id, weight ≥ 0) pairs.
///
/// Immutable after construction; safe for concurrent reads. RNG state lives
/// with the caller, which passes a uniform u ∈ [0, 1) per draw.
#[derive(Debug, Clone)]
pub struct WeightTree {
    ids: Vec<usize>,
    weights: Vec<f64>,
    /// Power-of-two leaf capacity; `sums[1]` is the root.
    size: usize,
    sums: Vec<f64>,
}

impl WeightTree {
    pub fn new(weights: &[(usize, f64)]) -> Result<Self> {
        for &(id, w) in weights {
            if w < 0.0 || w.is_nan() {
                return Err(Error::NegativeWeight { id, weight: w });
            }
        }
        let len = weights.len();
        let size = len.next_power_of_two().max(1);
        let mut sums = vec![0.0; 2 * size];
        for (slot, &(_, w)) in weights.iter().enumerate() {
            sums[size + slot] = w;
        }
        for node in (1..size).rev() {
            sums[node] = sums[2 * node] + sums[2 * node + 1];
        }
        Ok(Self {
            ids: weights.iter().map(|&(id, _)| id).collect(),
            weights: weights.iter().map(|&(_, w)| w).collect(),
            size,
            sums,
        })
    }

    pub fn total(&self) -> f64 {
        if self.ids.is_empty() {
            0.0
        } else {
            self.sums[1]
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Leaf (id, weight) pairs in construction order.
    pub fn leaves(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.ids.iter().copied().zip(self.weights.iter().copied())
    }

    /// Returns id i with probability weight(i)/total, as a deterministic
    /// function of u: descend left while u·total falls below the left
    /// subtree sum, otherwise subtract and go right.
    pub fn sample(&self, u: f64) -> Result<usize> {
        if self.total() <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        debug_assert!((0.0..1.0).contains(&u), "u must lie in [0, 1)");
        let mut target = u * self.total();
        let mut node = 1usize;
        while node < self.size {
            let left = self.sums[2 * node];
            if target < left {
                node = 2 * node;
            } else {
                target -= left;
                node = 2 * node + 1;
            }
        }
        // Rounding in the subtractions can only push the descent past the
        // last populated leaf; clamp back onto real leaves.
        let slot = (node - self.size).min(self.ids.len() - 1);
        Ok(self.ids[slot])
    }
}

/// Sampling preprocessing for one matrix row split into its positive part and
/// the magnitudes of its negative part.
#[derive(Debug, Clone)]
pub struct SignedRowSampler {
    pos: WeightTree,
    neg: WeightTree,
    l1_pos: f64,
    l1_neg: f64,
}

impl SignedRowSampler {
    pub fn from_entries(entries: impl Iterator<Item = (usize, f64)>) -> Self {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut l1_pos = 0.0;
        let mut l1_neg = 0.0;
        for (j, v) in entries {
            if v > 0.0 {
                pos.push((j, v));
                l1_pos += v;
            } else if v < 0.0 {
                neg.push((j, -v));
                l1_neg += -v;
            }
        }
        Self {
            // Nonnegative by construction.
            pos: WeightTree::new(&pos).expect("positive part weights"),
            neg: WeightTree::new(&neg).expect("negative part magnitudes"),
            l1_pos,
            l1_neg,
        }
    }

    /// ‖A_k⁺‖₁.
    pub fn l1_pos(&self) -> f64 {
        self.l1_pos
    }

    /// ‖A_k⁻‖₁.
    pub fn l1_neg(&self) -> f64 {
        self.l1_neg
    }

    /// ‖A_k‖₁.
    pub fn l1(&self) -> f64 {
        self.l1_pos + self.l1_neg
    }

    pub fn pos(&self) -> &WeightTree {
        &self.pos
    }

    pub fn neg(&self) -> &WeightTree {
        &self.neg
    }

    /// Reassembles A_k⁺ − A_k⁻ as sorted (index, value) pairs.
    pub fn reconstruct(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .pos
            .leaves()
            .chain(self.neg.leaves().map(|(j, w)| (j, -w)))
            .collect();
        out.sort_unstable_by_key(|&(j, _)| j);
        out
    }
}

/// Builds one [`SignedRowSampler`] per matrix row; total cost O(nnz).
pub fn signed_row_samplers(matrix: &SparseMatrixDual) -> Vec<SignedRowSampler> {
    (0..matrix.rows())
        .map(|k| SignedRowSampler::from_entries(matrix.row_entries(k)))
        .collect()
}
