//! Incremental tracking of the active row k(x) = argmax_k σ_k(A_kᵀx).
//!
//! A segment tree over the m row values supports the max+argmax query with a
//! lowest-index tie-break. When a mirror step changes x in a handful of
//! coordinates, the row-dot cache propagates the change to the rows of the
//! touched columns and the tree repairs one root path per touched row, so a
//! step costs O(Σ_j nnz(col j) · log m) instead of a full rescan.

use crate::error::{Error, Result};
use crate::oracles::{BlockSumProblem, MaxFormProblem};
use crate::prox::{SimplexState, StepDelta};
use crate::sparse::{RowDotCache, SparseMatrixDual, DEFAULT_REFRESH_PERIOD};

/// Max/argmax segment tree over a contiguous row range.
#[derive(Debug, Clone)]
struct MaxTree {
    offset: usize,
    len: usize,
    size: usize,
    vals: Vec<f64>,
    idxs: Vec<usize>,
    path_updates: u64,
}

impl MaxTree {
    fn build(offset: usize, values: &[f64]) -> Self {
        let len = values.len();
        let size = len.next_power_of_two().max(1);
        let mut tree = Self {
            offset,
            len,
            size,
            vals: vec![f64::NEG_INFINITY; 2 * size],
            idxs: vec![usize::MAX; 2 * size],
            path_updates: 0,
        };
        tree.fill(values);
        tree
    }

    fn fill(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.len);
        for slot in 0..self.size {
            let node = self.size + slot;
            if slot < self.len {
                self.vals[node] = values[slot];
                self.idxs[node] = self.offset + slot;
            } else {
                self.vals[node] = f64::NEG_INFINITY;
                self.idxs[node] = usize::MAX;
            }
        }
        for node in (1..self.size).rev() {
            self.pull(node);
        }
    }

    /// Lowest-index tie-break: the left child holds lower row indices, so
    /// `>=` keeps it on ties.
    fn pull(&mut self, node: usize) {
        let (l, r) = (2 * node, 2 * node + 1);
        if self.vals[l] >= self.vals[r] {
            self.vals[node] = self.vals[l];
            self.idxs[node] = self.idxs[l];
        } else {
            self.vals[node] = self.vals[r];
            self.idxs[node] = self.idxs[r];
        }
    }

    /// Sets the leaf for global row `row` and repairs the path to the root,
    /// counting one path update per internal node recomputed.
    fn update(&mut self, row: usize, value: f64) {
        let mut node = self.size + (row - self.offset);
        self.vals[node] = value;
        while node > 1 {
            node /= 2;
            self.pull(node);
            self.path_updates += 1;
        }
    }

    fn root(&self) -> (usize, f64) {
        (self.idxs[1], self.vals[1])
    }

    fn covers(&self, row: usize) -> bool {
        row >= self.offset && row < self.offset + self.len
    }
}

/// Argmax tracker for a max-form problem on a Euclidean trajectory.
///
/// Owns the row-dot cache it observes; leaves are refreshed from scratch on
/// the cache's periodic recomputation schedule.
#[derive(Debug, Clone)]
pub struct ArgmaxTree {
    cache: RowDotCache,
    tree: MaxTree,
}

impl ArgmaxTree {
    pub fn build(problem: &MaxFormProblem, x: &[f64]) -> Result<Self> {
        Self::build_with_period(problem, x, DEFAULT_REFRESH_PERIOD)
    }

    pub fn build_with_period(
        problem: &MaxFormProblem,
        x: &[f64],
        refresh_period: u32,
    ) -> Result<Self> {
        if problem.rows() == 0 {
            return Err(Error::NoRows);
        }
        let cache = RowDotCache::new(problem.matrix(), x, refresh_period)?;
        let values = sigma_values(problem, cache.values());
        Ok(Self {
            cache,
            tree: MaxTree::build(0, &values),
        })
    }

    /// Applies coordinate deltas, propagates them through the cache, and
    /// repairs the affected tree paths. Returns the new (k_max, max value).
    pub fn notify(
        &mut self,
        problem: &MaxFormProblem,
        changed: &[(usize, f64)],
    ) -> Result<(usize, f64)> {
        for &(j, delta) in changed {
            let out = self.cache.apply_sparse_delta(problem.matrix(), j, delta)?;
            if out.refreshed {
                let values = sigma_values(problem, self.cache.values());
                self.tree.fill(&values);
            } else {
                for (k, dot) in out.affected {
                    let (value, _) = problem.sigma().eval(k, dot);
                    self.tree.update(k, value);
                }
            }
        }
        Ok(self.current())
    }

    /// O(1) root read: (k_max, max σ value).
    pub fn current(&self) -> (usize, f64) {
        self.tree.root()
    }

    /// Active row and its dot ⟨A_k, x⟩, the inputs of the two-spike oracle.
    pub fn active(&self) -> (usize, f64) {
        let (k, _) = self.tree.root();
        (k, self.cache.value(k))
    }

    /// Rows updated since construction.
    pub fn touch_counter(&self) -> u64 {
        self.cache.touched_rows()
    }

    /// Internal tree nodes recomputed since construction.
    pub fn path_updates(&self) -> u64 {
        self.tree.path_updates
    }

    pub fn cache(&self) -> &RowDotCache {
        &self.cache
    }
}

fn sigma_values(problem: &MaxFormProblem, dots: &[f64]) -> Vec<f64> {
    dots.iter()
        .enumerate()
        .map(|(k, &dot)| problem.sigma().eval(k, dot).0)
        .collect()
}

/// Per-block argmax trackers sharing one row-dot cache, for block-sum
/// objectives. A coordinate delta is propagated once; each affected row is
/// dispatched to the tree of the block that owns it.
#[derive(Debug, Clone)]
pub struct BlockArgmax {
    cache: RowDotCache,
    trees: Vec<MaxTree>,
    ends: Vec<usize>,
}

impl BlockArgmax {
    pub fn build(problem: &BlockSumProblem, x: &[f64]) -> Result<Self> {
        Self::build_with_period(problem, x, DEFAULT_REFRESH_PERIOD)
    }

    pub fn build_with_period(
        problem: &BlockSumProblem,
        x: &[f64],
        refresh_period: u32,
    ) -> Result<Self> {
        let inner = problem.inner();
        if inner.rows() == 0 {
            return Err(Error::NoRows);
        }
        let cache = RowDotCache::new(inner.matrix(), x, refresh_period)?;
        let values = sigma_values(inner, cache.values());
        let mut trees = Vec::with_capacity(problem.blocks());
        let mut ends = Vec::with_capacity(problem.blocks());
        for b in 0..problem.blocks() {
            let range = problem.block_range(b);
            ends.push(range.end);
            trees.push(MaxTree::build(range.start, &values[range]));
        }
        Ok(Self { cache, trees, ends })
    }

    pub fn notify(&mut self, problem: &BlockSumProblem, changed: &[(usize, f64)]) -> Result<()> {
        let inner = problem.inner();
        for &(j, delta) in changed {
            let out = self.cache.apply_sparse_delta(inner.matrix(), j, delta)?;
            if out.refreshed {
                let values = sigma_values(inner, self.cache.values());
                for tree in &mut self.trees {
                    let range = tree.offset..tree.offset + tree.len;
                    tree.fill(&values[range]);
                }
            } else {
                for (k, dot) in out.affected {
                    let (value, _) = inner.sigma().eval(k, dot);
                    let b = self.ends.partition_point(|&end| end <= k);
                    debug_assert!(self.trees[b].covers(k));
                    self.trees[b].update(k, value);
                }
            }
        }
        Ok(())
    }

    /// Per-block (active row, ⟨A_k, x⟩) pairs.
    pub fn actives(&self) -> Vec<(usize, f64)> {
        self.trees
            .iter()
            .map(|tree| {
                let (k, _) = tree.root();
                (k, self.cache.value(k))
            })
            .collect()
    }

    /// (1/r)·Σ_b (block max), the block-sum objective at the tracked point.
    pub fn value(&self) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.root().1).sum();
        sum / self.trees.len() as f64
    }

    pub fn touch_counter(&self) -> u64 {
        self.cache.touched_rows()
    }

    pub fn path_updates(&self) -> u64 {
        self.trees.iter().map(|t| t.path_updates).sum()
    }
}

/// Argmax tracker for affine max-forms on an entropy trajectory.
///
/// The simplex point never changes sparsely, but its unnormalized weights
/// w_i = exp(log_weight_i) do. The tracker therefore follows y_k = ⟨A_k, w⟩
/// through the sparse weight deltas and applies the common normalizer as a
/// scalar correction at evaluation: ⟨A_k, x⟩ = y_k·exp(−log_normalizer).
/// Because the correction is shared by all rows, the y-ordering matches the
/// σ-ordering only when every affine offset is equal; other σ families are
/// rejected at build.
#[derive(Debug, Clone)]
pub struct SimplexArgmaxTracker {
    cache: RowDotCache,
    tree: MaxTree,
    offset: f64,
    log_normalizer: f64,
    /// log_normalizer at the last full rebuild. Incremental y updates mix
    /// floating-point noise from the scales they were applied at; once the
    /// mass scale has wandered this far, the tracker resyncs from the state.
    epoch_anchor: f64,
}

/// Widest log-normalizer excursion between full resyncs of the tracker.
const TRACKER_EPOCH_SPAN: f64 = 10.0;

impl SimplexArgmaxTracker {
    pub fn build(problem: &MaxFormProblem, state: &SimplexState) -> Result<Self> {
        Self::build_with_period(problem, state, DEFAULT_REFRESH_PERIOD)
    }

    pub fn build_with_period(
        problem: &MaxFormProblem,
        state: &SimplexState,
        refresh_period: u32,
    ) -> Result<Self> {
        if problem.rows() == 0 {
            return Err(Error::NoRows);
        }
        let offsets = problem
            .sigma()
            .affine_offsets()
            .ok_or(Error::NonUniformOffsets)?;
        let offset = offsets[0];
        if offsets.iter().any(|&b| b != offset) {
            return Err(Error::NonUniformOffsets);
        }
        let w: Vec<f64> = state.log_weights().iter().map(|&lw| lw.exp()).collect();
        let cache = RowDotCache::new(problem.matrix(), &w, refresh_period)?;
        let tree = MaxTree::build(0, cache.values());
        Ok(Self {
            cache,
            tree,
            offset,
            log_normalizer: state.log_normalizer(),
            epoch_anchor: state.log_normalizer(),
        })
    }

    /// Exact resync of weights, dots, and tree from the state; counters
    /// survive.
    fn resync(&mut self, matrix: &SparseMatrixDual, state: &SimplexState) -> Result<()> {
        let w: Vec<f64> = state.log_weights().iter().map(|&lw| lw.exp()).collect();
        self.cache.reset(matrix, &w)?;
        self.tree.fill(self.cache.values());
        self.epoch_anchor = state.log_normalizer();
        Ok(())
    }

    /// Feeds one entropy mirror-step outcome into the tracker.
    pub fn observe(
        &mut self,
        problem: &MaxFormProblem,
        delta: &StepDelta,
        state: &SimplexState,
    ) -> Result<()> {
        match delta {
            StepDelta::SimplexSparse(w_deltas) => {
                for wd in w_deltas {
                    let out =
                        self.cache
                            .apply_sparse_delta(problem.matrix(), wd.index, wd.delta())?;
                    if out.refreshed {
                        self.tree.fill(self.cache.values());
                    } else {
                        for (k, y) in out.affected {
                            self.tree.update(k, y);
                        }
                    }
                }
                if (state.log_normalizer() - self.epoch_anchor).abs() > TRACKER_EPOCH_SPAN {
                    self.resync(problem.matrix(), state)?;
                }
            }
            StepDelta::SimplexRescaled => self.resync(problem.matrix(), state)?,
            StepDelta::Dense(_) => unreachable!("dense delta on a simplex trajectory"),
        }
        self.log_normalizer = state.log_normalizer();
        Ok(())
    }

    /// Active row and its dot ⟨A_k, x⟩ at the materialized point.
    pub fn active(&self) -> (usize, f64) {
        let (k, y) = self.tree.root();
        (k, y * (-self.log_normalizer).exp())
    }

    /// (k_max, max σ value).
    pub fn current(&self) -> (usize, f64) {
        let (k, dot) = self.active();
        (k, dot - self.offset)
    }

    pub fn touch_counter(&self) -> u64 {
        self.cache.touched_rows()
    }

    pub fn path_updates(&self) -> u64 {
        self.tree.path_updates
    }
}
