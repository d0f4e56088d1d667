//! Stochastic subgradient oracles.
//!
//! For the PageRank objective ½‖Ax‖₂² with A = Pᵀ − I this provides the
//! double-sampling estimator (draw a column by the current point, then a
//! column by the drawn row of P) and the sum-randomization estimator
//! (uniform row, exact inner product). For max-of-scalar-convex objectives
//! max_k σ_k(A_kᵀ x) it provides the two-spike estimator built from the
//! signed split of the active row, its block-sum extension, and exact
//! deterministic subgradients for baselines.
//!
//! Every estimator is a deterministic function of its uniform draws, and the
//! functions that map drawn indices to gradients are shared with the
//! exhaustive-expectation checkers in [`expectation`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::prox::DualNorm;
use crate::rng::TrajectoryRng;
use crate::sampling::{SignedRowSampler, WeightTree};
use crate::sparse::{RowDotCache, SparseMatrixDual};

/// Indices drawn while producing one sample, for logging and replay checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SampleMeta {
    pub xi: Option<usize>,
    pub j: Option<usize>,
    pub block: Option<usize>,
}

/// One sparse stochastic (sub)gradient sample with a certified bound on its
/// dual norm.
#[derive(Debug, Clone)]
pub struct StochGrad {
    /// Sorted, unique (index, value) pairs; no explicit zeros.
    pub entries: Vec<(usize, f64)>,
    /// Certified per-sample bound on ‖entries‖ in `dual_norm`.
    pub m_bound: f64,
    pub dual_norm: DualNorm,
    pub meta: SampleMeta,
}

impl StochGrad {
    pub fn zero(dual_norm: DualNorm) -> Self {
        Self {
            entries: Vec::new(),
            m_bound: 0.0,
            dual_norm,
            meta: SampleMeta::default(),
        }
    }

    /// True when the certified bound actually dominates the sample, up to
    /// a relative rounding allowance.
    pub fn bound_holds(&self) -> bool {
        self.dual_norm.eval(&self.entries) <= self.m_bound * (1.0 + 1e-12) + 1e-300
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Sorts by index, merges duplicates, and drops exact zeros.
fn canonicalize(mut entries: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    entries.sort_unstable_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|&(_, v)| v != 0.0);
    out
}

/// Draws an index with probability x_i / Σx by a single cumulative scan.
/// O(n), which matches the amortized per-iteration budget of the PageRank
/// oracles; a weight tree over x would need a rebuild per step because the
/// entropy prox changes every coordinate.
fn sample_categorical(x: &[f64], u: f64) -> usize {
    let total: f64 = x.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &xi) in x.iter().enumerate() {
        if xi > 0.0 {
            last_positive = i;
            acc += xi;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

// ---------------------------------------------------------------------------
// PageRank
// ---------------------------------------------------------------------------

/// Minimize ½‖Ax‖₂² over the simplex, A = Pᵀ − I for a row-stochastic P.
///
/// A is never materialized: row k of A is column k of P with 1 subtracted on
/// the diagonal. Rows of P double as the sampling distributions of the
/// double-sampling oracle, so each row gets a weight tree at build time.
pub struct PageRankProblem {
    p: SparseMatrixDual,
    row_trees: Vec<WeightTree>,
    a_row_l1: Vec<f64>,
    a_row_linf: Vec<f64>,
}

impl PageRankProblem {
    pub fn new(p: SparseMatrixDual) -> Result<Self> {
        if p.rows() != p.cols() {
            return Err(Error::NotSquare {
                m: p.rows(),
                n: p.cols(),
            });
        }
        let n = p.rows();
        let mut row_trees = Vec::with_capacity(n);
        for k in 0..n {
            if p.row_nnz(k) == 0 {
                return Err(Error::NonStochasticRow {
                    row: k,
                    reason: "empty row".into(),
                });
            }
            let mut sum = 0.0;
            for (j, v) in p.row_entries(k) {
                if v < 0.0 {
                    return Err(Error::NonStochasticRow {
                        row: k,
                        reason: format!("negative entry {v} at column {j}"),
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NonStochasticRow {
                    row: k,
                    reason: format!("sums to {sum}"),
                });
            }
            let weights: Vec<(usize, f64)> = p.row_entries(k).collect();
            row_trees.push(WeightTree::new(&weights)?);
        }
        let mut problem = Self {
            p,
            row_trees,
            a_row_l1: Vec::new(),
            a_row_linf: Vec::new(),
        };
        for k in 0..n {
            let row = problem.a_row(k);
            problem
                .a_row_l1
                .push(row.iter().map(|&(_, v)| v.abs()).sum());
            problem
                .a_row_linf
                .push(row.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max));
        }
        Ok(problem)
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn matrix(&self) -> &SparseMatrixDual {
        &self.p
    }

    /// Row k of A = Pᵀ − I as sorted sparse entries.
    pub fn a_row(&self, k: usize) -> Vec<(usize, f64)> {
        let mut entries: Vec<(usize, f64)> = self.p.col_entries(k).collect();
        entries.push((k, -1.0));
        canonicalize(entries)
    }

    /// Ax = Pᵀx − x, which is also the vector of row dots ⟨A_k, x⟩.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut r: Vec<f64> = x.iter().map(|&v| -v).collect();
        for i in 0..self.dim() {
            for (j, pij) in self.p.row_entries(i) {
                r[j] += pij * x[i];
            }
        }
        Ok(r)
    }

    /// f(x) = ½‖Ax‖₂², exact, O(nnz).
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let r = self.residual(x)?;
        Ok(0.5 * r.iter().map(|v| v * v).sum::<f64>())
    }

    /// ∇f(x) = Aᵀ(Ax), exact, as sparse entries.
    pub fn exact_subgradient(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        let r = self.residual(x)?;
        let mut entries = Vec::new();
        for i in 0..self.dim() {
            let dot: f64 = self.p.row_entries(i).map(|(j, v)| v * r[j]).sum();
            let g = dot - r[i];
            if g != 0.0 {
                entries.push((i, g));
            }
        }
        Ok(entries)
    }

    /// Gradient realized by the double-sampling draw (ξ, j):
    /// column j of P − I minus column ξ of P − I.
    pub fn double_sample_outcome(&self, xi: usize, j: usize) -> Vec<(usize, f64)> {
        if xi == j {
            return Vec::new();
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        entries.extend(self.p.col_entries(j));
        entries.push((j, -1.0));
        entries.extend(self.p.col_entries(xi).map(|(i, v)| (i, -v)));
        entries.push((xi, 1.0));
        canonicalize(entries)
    }

    /// Double-sampling oracle: ξ ∼ x, then j ∼ row ξ of P. Unbiased for
    /// Aᵀ(Ax) on the simplex; support at most two columns of P plus two
    /// diagonal spikes; ‖·‖∞ ≤ 2 always. Consumes exactly two variates.
    pub fn double_sample(&self, x: &[f64], rng: &mut TrajectoryRng) -> StochGrad {
        let xi = sample_categorical(x, rng.uniform());
        let j = self.row_trees[xi]
            .sample(rng.uniform())
            .expect("stochastic rows are nonempty");
        let entries = self.double_sample_outcome(xi, j);
        debug_assert!(entries.len() <= self.p.col_nnz(j) + self.p.col_nnz(xi) + 2);
        let grad = StochGrad {
            entries,
            m_bound: 2.0,
            dual_norm: DualNorm::LInf,
            meta: SampleMeta {
                xi: Some(xi),
                j: Some(j),
                block: None,
            },
        };
        debug_assert!(grad.bound_holds());
        grad
    }

    /// Gradient realized by the sum-randomization draw ξ given the exact
    /// inner product ⟨A_ξ, x⟩: n · ⟨A_ξ, x⟩ · A_ξ.
    pub fn sum_randomization_outcome(&self, xi: usize, dot: f64) -> Vec<(usize, f64)> {
        let scale = self.dim() as f64 * dot;
        if scale == 0.0 {
            return Vec::new();
        }
        self.a_row(xi)
            .into_iter()
            .map(|(i, v)| (i, scale * v))
            .collect()
    }

    /// Sum-randomization oracle: ξ uniform on rows, gradient n·⟨A_ξ,x⟩·A_ξ
    /// with the inner product read exactly from the row-dot cache. Unbiased
    /// for ∇f; one variate per call.
    pub fn sum_randomization(&self, cache: &RowDotCache, rng: &mut TrajectoryRng) -> StochGrad {
        let xi = rng.uniform_index(self.dim());
        let dot = cache.value(xi);
        let entries = self.sum_randomization_outcome(xi, dot);
        let grad = StochGrad {
            entries,
            m_bound: self.dim() as f64 * dot.abs() * self.a_row_linf[xi],
            dual_norm: DualNorm::LInf,
            meta: SampleMeta {
                xi: Some(xi),
                j: None,
                block: None,
            },
        };
        debug_assert!(grad.bound_holds());
        grad
    }

    pub fn row_tree(&self, k: usize) -> &WeightTree {
        &self.row_trees[k]
    }

    /// max_k ‖A_k‖₁ (enters the two-spike bound when the ∞-form of the
    /// problem is solved as a max-form instance).
    pub fn max_a_row_l1(&self) -> f64 {
        self.a_row_l1.iter().copied().fold(0.0, f64::max)
    }

    /// max_k ‖A_k‖∞; n·(max_k ‖A_k‖∞)² bounds the sum-randomization
    /// samples in ℓ∞ over the simplex.
    pub fn max_a_row_linf(&self) -> f64 {
        self.a_row_linf.iter().copied().fold(0.0, f64::max)
    }
}

impl fmt::Debug for PageRankProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PageRankProblem")
            .field("n", &self.dim())
            .field("nnz", &self.p.nnz())
            .finish()
    }
}

// ---------------------------------------------------------------------------
// Max-form
// ---------------------------------------------------------------------------

/// The per-row scalar convex functions σ_k of a max-form objective, given as
/// (value, derivative) evaluators with a uniform Lipschitz bound.
#[derive(Clone)]
pub enum SigmaFamily {
    /// σ_k(t) = t − b_k; slope 1, Lipschitz bound 1.
    Affine { offsets: Vec<f64> },
    /// Arbitrary scalar convex family σ(k, t) → (value, derivative).
    Scalar {
        eval: Arc<dyn Fn(usize, f64) -> (f64, f64) + Send + Sync>,
        lipschitz: f64,
    },
}

impl SigmaFamily {
    pub fn affine_zero(m: usize) -> Self {
        SigmaFamily::Affine {
            offsets: vec![0.0; m],
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            SigmaFamily::Affine { .. } => 1.0,
            SigmaFamily::Scalar { lipschitz, .. } => *lipschitz,
        }
    }

    /// (σ_k(t), σ'_k(t)); the derivative is asserted against the declared
    /// Lipschitz bound.
    pub fn eval(&self, k: usize, t: f64) -> (f64, f64) {
        let (value, slope) = match self {
            SigmaFamily::Affine { offsets } => (t - offsets[k], 1.0),
            SigmaFamily::Scalar { eval, .. } => eval(k, t),
        };
        assert!(
            slope.abs() <= self.lipschitz() * (1.0 + 1e-12) + 1e-12,
            "sigma derivative {slope} exceeds the Lipschitz bound {}",
            self.lipschitz()
        );
        (value, slope)
    }

    /// The offsets when every σ_k is affine.
    pub fn affine_offsets(&self) -> Option<&[f64]> {
        match self {
            SigmaFamily::Affine { offsets } => Some(offsets),
            SigmaFamily::Scalar { .. } => None,
        }
    }
}

impl fmt::Debug for SigmaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaFamily::Affine { offsets } => {
                f.debug_struct("Affine").field("rows", &offsets.len()).finish()
            }
            SigmaFamily::Scalar { lipschitz, .. } => f
                .debug_struct("Scalar")
                .field("lipschitz", lipschitz)
                .finish(),
        }
    }
}

/// Minimize max_k σ_k(A_kᵀ x).
#[derive(Debug, Clone)]
pub struct MaxFormProblem {
    a: SparseMatrixDual,
    sigma: SigmaFamily,
}

impl MaxFormProblem {
    pub fn new(a: SparseMatrixDual, sigma: SigmaFamily) -> Result<Self> {
        if let Some(offsets) = sigma.affine_offsets() {
            if offsets.len() != a.rows() {
                return Err(Error::DimensionMismatch {
                    expected: a.rows(),
                    got: offsets.len(),
                });
            }
        }
        Ok(Self { a, sigma })
    }

    /// max_k (A_kᵀx − b_k).
    pub fn affine(a: SparseMatrixDual, offsets: Vec<f64>) -> Result<Self> {
        Self::new(a, SigmaFamily::Affine { offsets })
    }

    pub fn matrix(&self) -> &SparseMatrixDual {
        &self.a
    }

    pub fn sigma(&self) -> &SigmaFamily {
        &self.sigma
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    /// (argmax row with lowest-index tie-break, its σ value), by full scan.
    pub fn value_argmax(&self, x: &[f64]) -> Result<(usize, f64)> {
        if self.rows() == 0 {
            return Err(Error::NoRows);
        }
        let mut best_k = 0;
        let mut best = f64::NEG_INFINITY;
        for k in 0..self.rows() {
            let dot = self.a.row_dot(k, x)?;
            let (value, _) = self.sigma.eval(k, dot);
            if value > best {
                best = value;
                best_k = k;
            }
        }
        Ok((best_k, best))
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_argmax(x)?.1)
    }

    /// Deterministic subgradient σ'_{k(x)}(A_{k(x)}ᵀx) · A_{k(x)}.
    pub fn exact_subgradient(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        let (k, _) = self.value_argmax(x)?;
        let dot = self.a.row_dot(k, x)?;
        let (_, slope) = self.sigma.eval(k, dot);
        Ok(self
            .a
            .row_entries(k)
            .filter_map(|(j, v)| {
                let g = slope * v;
                (g != 0.0).then_some((j, g))
            })
            .collect())
    }

    /// Gradient realized by the two-spike draw for active row `k` with
    /// slope `s`: s·(‖A_k⁺‖₁·e_i − ‖A_k⁻‖₁·e_j). A `None` index means the
    /// corresponding part of the row is empty and its spike is omitted.
    pub fn two_spike_outcome(
        &self,
        slope: f64,
        sampler: &SignedRowSampler,
        i: Option<usize>,
        j: Option<usize>,
    ) -> Vec<(usize, f64)> {
        let mut entries = Vec::with_capacity(2);
        if let Some(i) = i {
            let v = slope * sampler.l1_pos();
            if v != 0.0 {
                entries.push((i, v));
            }
        }
        if let Some(j) = j {
            let v = -slope * sampler.l1_neg();
            if v != 0.0 {
                entries.push((j, v));
            }
        }
        canonicalize(entries)
    }

    /// Two-spike oracle for the active row `(k, ⟨A_k, x⟩)` (as maintained by
    /// an argmax tracker). Support ≤ 2; expectation σ'·A_k; at most two
    /// variates, none when the slope is zero or the row is empty.
    pub fn two_spike(
        &self,
        active: (usize, f64),
        samplers: &[SignedRowSampler],
        norm: DualNorm,
        rng: &mut TrajectoryRng,
    ) -> StochGrad {
        let (k, dot) = active;
        let (_, slope) = self.sigma.eval(k, dot);
        let sampler = &samplers[k];
        let mut meta = SampleMeta::default();
        let mut i = None;
        let mut j = None;
        if slope != 0.0 {
            if sampler.l1_pos() > 0.0 {
                i = Some(sampler.pos().sample(rng.uniform()).expect("nonempty"));
                meta.xi = i;
            }
            if sampler.l1_neg() > 0.0 {
                j = Some(sampler.neg().sample(rng.uniform()).expect("nonempty"));
                meta.j = j;
            }
        }
        let entries = self.two_spike_outcome(slope, sampler, i, j);
        debug_assert!(entries.len() <= 2);
        let grad = StochGrad {
            entries,
            m_bound: slope.abs() * sampler.l1(),
            dual_norm: norm,
            meta,
        };
        debug_assert!(grad.bound_holds());
        grad
    }

    /// M̃ for the two-spike oracle: Lipschitz bound times max_k ‖A_k‖₁.
    pub fn two_spike_m_bound(&self) -> f64 {
        let max_l1 = (0..self.rows())
            .map(|k| self.a.row_l1(k))
            .fold(0.0, f64::max);
        self.sigma.lipschitz() * max_l1
    }

    /// M for the deterministic subgradient in the given dual norm.
    pub fn exact_m_bound(&self, norm: DualNorm) -> f64 {
        let max_row = (0..self.rows())
            .map(|k| match norm {
                DualNorm::L2 => self.a.row_l2(k),
                DualNorm::LInf => self.a.row_linf(k),
            })
            .fold(0.0, f64::max);
        self.sigma.lipschitz() * max_row
    }
}

// ---------------------------------------------------------------------------
// Block sums of max-forms
// ---------------------------------------------------------------------------

/// (1/r)·Σ_b max_{k ∈ block b} σ_k(A_kᵀ x) over a contiguous partition of
/// the rows.
#[derive(Debug, Clone)]
pub struct BlockSumProblem {
    inner: MaxFormProblem,
    /// Exclusive end of each block; block b covers [ends[b−1], ends[b]).
    ends: Vec<usize>,
}

impl BlockSumProblem {
    pub fn new(inner: MaxFormProblem, ends: Vec<usize>) -> Result<Self> {
        if ends.is_empty() {
            return Err(Error::BadBlocks("no blocks".into()));
        }
        let mut prev = 0;
        for &b in &ends {
            if b <= prev {
                return Err(Error::BadBlocks(format!(
                    "boundary {b} does not increase past {prev}"
                )));
            }
            prev = b;
        }
        if prev != inner.rows() {
            return Err(Error::BadBlocks(format!(
                "last boundary {prev} must equal the row count {}",
                inner.rows()
            )));
        }
        Ok(Self { inner, ends })
    }

    pub fn inner(&self) -> &MaxFormProblem {
        &self.inner
    }

    pub fn blocks(&self) -> usize {
        self.ends.len()
    }

    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let start = if b == 0 { 0 } else { self.ends[b - 1] };
        start..self.ends[b]
    }

    /// Active row of block b by full scan: (row, dot, σ value).
    pub fn block_argmax(&self, b: usize, x: &[f64]) -> Result<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for k in self.block_range(b) {
            let dot = self.inner.matrix().row_dot(k, x)?;
            let (value, _) = self.inner.sigma().eval(k, dot);
            if best.is_none_or(|(_, _, bv)| value > bv) {
                best = Some((k, dot, value));
            }
        }
        best.ok_or(Error::NoRows)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for b in 0..self.blocks() {
            sum += self.block_argmax(b, x)?.2;
        }
        Ok(sum / self.blocks() as f64)
    }

    /// Deterministic subgradient (1/r)·Σ_b σ'·A_{k_b(x)}.
    pub fn exact_subgradient(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        let scale = 1.0 / self.blocks() as f64;
        let mut entries = Vec::new();
        for b in 0..self.blocks() {
            let (k, dot, _) = self.block_argmax(b, x)?;
            let (_, slope) = self.inner.sigma().eval(k, dot);
            entries.extend(
                self.inner
                    .matrix()
                    .row_entries(k)
                    .map(|(jcol, v)| (jcol, scale * slope * v)),
            );
        }
        Ok(canonicalize(entries))
    }

    /// Block-sum oracle: a uniform block draw followed by the two-spike
    /// estimator inside that block. The sample is deliberately not rescaled
    /// by r: the uniform draw's 1/r cancels the objective's 1/r, so the
    /// expectation equals [`Self::exact_subgradient`]. With a single block
    /// the draw is skipped and the call matches the plain two-spike oracle.
    pub fn sample(
        &self,
        actives: &[(usize, f64)],
        samplers: &[SignedRowSampler],
        norm: DualNorm,
        rng: &mut TrajectoryRng,
    ) -> StochGrad {
        let b = if self.blocks() == 1 {
            0
        } else {
            rng.uniform_index(self.blocks())
        };
        let mut grad = self.inner.two_spike(actives[b], samplers, norm, rng);
        grad.meta.block = Some(b);
        grad
    }
}

// ---------------------------------------------------------------------------
// Exhaustive expectations
// ---------------------------------------------------------------------------

/// Exhaustive expectations of every oracle over all of its random outcomes,
/// for unbiasedness checks on small instances. Shares the outcome→gradient
/// maps with the samplers; the comparison target (the exact subgradient)
/// goes through an independent dense route.
pub mod expectation {
    use super::*;

    /// Largest dimension accepted for enumeration.
    pub const MAX_ENUM: usize = 8;

    fn gate(size: usize) -> Result<()> {
        if size > MAX_ENUM {
            return Err(Error::TooLargeForEnumeration {
                size,
                max: MAX_ENUM,
            });
        }
        Ok(())
    }

    fn add_scaled(dense: &mut [f64], entries: &[(usize, f64)], scale: f64) {
        for &(i, v) in entries {
            dense[i] += scale * v;
        }
    }

    /// E over (ξ ∼ x, j ∼ row ξ of P) of the double-sampling gradient.
    pub fn double_sample(problem: &PageRankProblem, x: &[f64]) -> Result<Vec<f64>> {
        gate(problem.dim())?;
        let total: f64 = x.iter().sum();
        let mut mean = vec![0.0; problem.dim()];
        for xi in 0..problem.dim() {
            if x[xi] <= 0.0 {
                continue;
            }
            let p_xi = x[xi] / total;
            for (j, pj) in problem.matrix().row_entries(xi) {
                if pj == 0.0 {
                    continue;
                }
                let outcome = problem.double_sample_outcome(xi, j);
                add_scaled(&mut mean, &outcome, p_xi * pj);
            }
        }
        Ok(mean)
    }

    /// E over uniform ξ of the sum-randomization gradient, with exact dots.
    pub fn sum_randomization(problem: &PageRankProblem, x: &[f64]) -> Result<Vec<f64>> {
        gate(problem.dim())?;
        let dots = problem.residual(x)?;
        let n = problem.dim();
        let mut mean = vec![0.0; n];
        for xi in 0..n {
            let outcome = problem.sum_randomization_outcome(xi, dots[xi]);
            add_scaled(&mut mean, &outcome, 1.0 / n as f64);
        }
        Ok(mean)
    }

    /// E over the spike draws of the two-spike gradient at the scanned
    /// active row of x.
    pub fn two_spike(problem: &MaxFormProblem, x: &[f64]) -> Result<Vec<f64>> {
        gate(problem.dim().max(problem.rows()))?;
        let (k, _) = problem.value_argmax(x)?;
        let dot = problem.matrix().row_dot(k, x)?;
        let (_, slope) = problem.sigma().eval(k, dot);
        let sampler = SignedRowSampler::from_entries(problem.matrix().row_entries(k));
        Ok(two_spike_for_row(problem, slope, &sampler))
    }

    fn two_spike_for_row(
        problem: &MaxFormProblem,
        slope: f64,
        sampler: &SignedRowSampler,
    ) -> Vec<f64> {
        let mut mean = vec![0.0; problem.dim()];
        if slope == 0.0 {
            return mean;
        }
        let pos: Vec<(usize, f64)> = sampler.pos().leaves().collect();
        let neg: Vec<(usize, f64)> = sampler.neg().leaves().collect();
        let i_choices: Vec<(Option<usize>, f64)> = if sampler.l1_pos() > 0.0 {
            pos.iter()
                .map(|&(i, w)| (Some(i), w / sampler.l1_pos()))
                .collect()
        } else {
            vec![(None, 1.0)]
        };
        let j_choices: Vec<(Option<usize>, f64)> = if sampler.l1_neg() > 0.0 {
            neg.iter()
                .map(|&(j, w)| (Some(j), w / sampler.l1_neg()))
                .collect()
        } else {
            vec![(None, 1.0)]
        };
        for &(i, pi) in &i_choices {
            for &(j, pj) in &j_choices {
                let outcome = problem.two_spike_outcome(slope, sampler, i, j);
                add_scaled(&mut mean, &outcome, pi * pj);
            }
        }
        mean
    }

    /// E over (block, spikes) of the block-sum gradient.
    pub fn blocksum(problem: &BlockSumProblem, x: &[f64]) -> Result<Vec<f64>> {
        gate(problem.inner().dim().max(problem.inner().rows()))?;
        let r = problem.blocks() as f64;
        let mut mean = vec![0.0; problem.inner().dim()];
        for b in 0..problem.blocks() {
            let (k, dot, _) = problem.block_argmax(b, x)?;
            let (_, slope) = problem.inner().sigma().eval(k, dot);
            let sampler =
                SignedRowSampler::from_entries(problem.inner().matrix().row_entries(k));
            let block_mean = two_spike_for_row(problem.inner(), slope, &sampler);
            for (m, v) in mean.iter_mut().zip(block_mean) {
                *m += v / r;
            }
        }
        Ok(mean)
    }
}
