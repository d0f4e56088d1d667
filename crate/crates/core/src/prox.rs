//! Mirror-map setups: Euclidean on all of ℝⁿ, Euclidean on the nonnegative
//! orthant, and entropy on the unit simplex. Each setup provides its start
//! point, a sparse-gradient mirror step, and the step-size rules.
//!
//! The entropy state lives in log-space with an incrementally maintained
//! normalizer, so a step against a gradient with small support costs
//! O(|support|) instead of O(n). A shift guard keeps the exponents inside
//! the representable range.

use crate::error::{Error, Result};

/// When any touched log-weight (or the log-normalizer) exceeds this
/// magnitude, all log-weights are shifted by −max so exponentials stay
/// representable. The shift leaves the materialized point unchanged.
const LOG_SHIFT_GUARD: f64 = 300.0;

/// Dual norm in which a gradient bound is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualNorm {
    /// ℓ₂ (self-dual), paired with the Euclidean setups.
    L2,
    /// ℓ∞, dual to ℓ₁, paired with the entropy setup.
    LInf,
}

impl DualNorm {
    /// Evaluates the norm on a sparse vector with unique indices.
    pub fn eval(&self, entries: &[(usize, f64)]) -> f64 {
        match self {
            DualNorm::L2 => entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt(),
            DualNorm::LInf => entries.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max),
        }
    }
}

/// One of the three mirror-map configurations.
#[derive(Debug, Clone)]
pub enum ProxSetup {
    /// Q = ℝⁿ, d(x) = ‖x‖₂²/2, start at 0.
    EuclideanFree { n: usize },
    /// Q = ℝⁿ₊, d(x) = ‖x − anchor‖₂²/2, start at the anchor (> 0).
    EuclideanOrthant { anchor: Vec<f64> },
    /// Q = unit simplex, negative entropy prox, start at the uniform point.
    EntropySimplex { n: usize },
}

impl ProxSetup {
    pub fn dim(&self) -> usize {
        match self {
            ProxSetup::EuclideanFree { n } | ProxSetup::EntropySimplex { n } => *n,
            ProxSetup::EuclideanOrthant { anchor } => anchor.len(),
        }
    }

    /// Norm in which gradient bounds must be certified for this setup.
    pub fn dual_norm(&self) -> DualNorm {
        match self {
            ProxSetup::EntropySimplex { .. } => DualNorm::LInf,
            _ => DualNorm::L2,
        }
    }

    /// For the simplex the prox radius is known a priori: R = √(ln n).
    pub fn known_radius(&self) -> Option<f64> {
        match self {
            ProxSetup::EntropySimplex { n } => Some((*n as f64).ln().sqrt()),
            _ => None,
        }
    }

    /// arg min of the prox function over Q.
    pub fn start_point(&self) -> Result<ProxState> {
        match self {
            ProxSetup::EuclideanFree { n } => Ok(ProxState::Dense(vec![0.0; *n])),
            ProxSetup::EuclideanOrthant { anchor } => {
                for (index, &value) in anchor.iter().enumerate() {
                    if value <= 0.0 || !value.is_finite() {
                        return Err(Error::AnchorNotPositive { index, value });
                    }
                }
                Ok(ProxState::Dense(anchor.clone()))
            }
            ProxSetup::EntropySimplex { n } => Ok(ProxState::Simplex(SimplexState::uniform(*n))),
        }
    }

    /// One mirror-descent step against a sparse (sub)gradient.
    ///
    /// Euclidean free: x ← x − α·g. Orthant: x ← max{x − α·g, 0}
    /// componentwise. Entropy: multiplicative weight update in log-space.
    /// The returned delta feeds downstream caches and trackers.
    pub fn mirror_step(
        &self,
        state: &mut ProxState,
        grad: &[(usize, f64)],
        alpha: f64,
    ) -> Result<StepDelta> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::StepNotPositive(alpha));
        }
        let n = self.dim();
        for &(index, value) in grad {
            if index >= n {
                return Err(Error::SupportOutOfRange { index, n });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteGradient { index });
            }
        }
        match (self, state) {
            (ProxSetup::EuclideanFree { .. }, ProxState::Dense(x)) => {
                let mut changes = Vec::with_capacity(grad.len());
                for &(i, g) in grad {
                    let old = x[i];
                    let new = old - alpha * g;
                    if new != old {
                        x[i] = new;
                        changes.push(CoordDelta { index: i, old, new });
                    }
                }
                Ok(StepDelta::Dense(changes))
            }
            (ProxSetup::EuclideanOrthant { .. }, ProxState::Dense(x)) => {
                let mut changes = Vec::with_capacity(grad.len());
                for &(i, g) in grad {
                    let old = x[i];
                    let new = (old - alpha * g).max(0.0);
                    debug_assert!(new >= 0.0);
                    if new != old {
                        x[i] = new;
                        changes.push(CoordDelta { index: i, old, new });
                    }
                }
                Ok(StepDelta::Dense(changes))
            }
            (ProxSetup::EntropySimplex { .. }, ProxState::Simplex(s)) => {
                Ok(s.apply_sparse(grad, alpha))
            }
            _ => Err(Error::ProxStateMismatch),
        }
    }

    /// Bregman distance V_x(y) for this setup: half squared Euclidean
    /// distance for the Euclidean kinds, KL divergence for entropy.
    /// Diagnostic only; the solver loop never calls it.
    pub fn bregman(&self, from: &[f64], to: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanFree { .. } | ProxSetup::EuclideanOrthant { .. } => {
                from.iter()
                    .zip(to)
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum::<f64>()
                    / 2.0
            }
            ProxSetup::EntropySimplex { .. } => from
                .iter()
                .zip(to)
                .map(|(&p, &q)| {
                    if q == 0.0 {
                        0.0
                    } else if p == 0.0 {
                        f64::INFINITY
                    } else {
                        q * (q / p).ln()
                    }
                })
                .sum(),
        }
    }
}

/// One changed coordinate: the point coordinate for Euclidean states, the
/// unnormalized weight w_i = exp(log_weight_i) for simplex states. Carrying
/// both endpoint values lets observers resync exactly instead of
/// accumulating differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordDelta {
    pub index: usize,
    pub old: f64,
    pub new: f64,
}

impl CoordDelta {
    pub fn delta(&self) -> f64 {
        self.new - self.old
    }
}

/// What a mirror step changed, for downstream caches and trackers.
#[derive(Debug, Clone)]
pub enum StepDelta {
    /// Euclidean kinds: coordinates that changed.
    Dense(Vec<CoordDelta>),
    /// Entropy: changed unnormalized weights, in the state's current frame.
    SimplexSparse(Vec<CoordDelta>),
    /// Entropy: the shift guard fired; observers must resync from the state.
    SimplexRescaled,
}

/// Current point of a trajectory.
#[derive(Debug, Clone)]
pub enum ProxState {
    Dense(Vec<f64>),
    Simplex(SimplexState),
}

impl ProxState {
    pub fn dim(&self) -> usize {
        match self {
            ProxState::Dense(x) => x.len(),
            ProxState::Simplex(s) => s.dim(),
        }
    }

    pub fn as_dense(&self) -> Option<&[f64]> {
        match self {
            ProxState::Dense(x) => Some(x),
            ProxState::Simplex(_) => None,
        }
    }

    pub fn as_simplex(&self) -> Option<&SimplexState> {
        match self {
            ProxState::Simplex(s) => Some(s),
            ProxState::Dense(_) => None,
        }
    }

    pub fn materialize_into(&self, buf: &mut Vec<f64>) {
        match self {
            ProxState::Dense(x) => {
                buf.clear();
                buf.extend_from_slice(x);
            }
            ProxState::Simplex(s) => s.materialize_into(buf),
        }
    }

    pub fn materialize(&self) -> Vec<f64> {
        let mut buf = Vec::new();
        self.materialize_into(&mut buf);
        buf
    }
}

/// Simplex point kept as accumulated exponents with a cached log-normalizer.
///
/// The materialized point is exp(log_weights − log_normalizer), renormalized
/// exactly, so it is always nonnegative and sums to one up to rounding.
#[derive(Debug, Clone)]
pub struct SimplexState {
    log_weights: Vec<f64>,
    log_normalizer: f64,
    /// Largest |log_weight| among coordinates touched since the last shift
    /// (plus |log_normalizer|); drives the shift guard without dense scans.
    hot_bound: f64,
    /// log_normalizer at the last dense recomputation. The incremental
    /// update's relative drift is amplified by the total downward mass
    /// excursion since the last exact value, so the normalizer is resynced
    /// densely once it wanders more than [`NORMALIZER_RESYNC_SPAN`].
    norm_anchor: f64,
}

/// Log-normalizer excursion that triggers a dense logsumexp resync.
const NORMALIZER_RESYNC_SPAN: f64 = 1.0;

impl SimplexState {
    pub fn uniform(n: usize) -> Self {
        let log_normalizer = (n as f64).ln();
        Self {
            log_weights: vec![0.0; n],
            log_normalizer,
            hot_bound: 0.0,
            norm_anchor: log_normalizer,
        }
    }

    pub fn dim(&self) -> usize {
        self.log_weights.len()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Reference value: log Σ exp(log_weights), computed densely.
    pub fn dense_log_normalizer(&self) -> f64 {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = self.log_weights.iter().map(|&lw| (lw - max).exp()).sum();
        max + sum.ln()
    }

    pub fn materialize_into(&self, buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend(
            self.log_weights
                .iter()
                .map(|&lw| (lw - self.log_normalizer).exp()),
        );
        let sum: f64 = buf.iter().sum();
        for v in buf.iter_mut() {
            *v /= sum;
        }
    }

    pub fn materialize(&self) -> Vec<f64> {
        let mut buf = Vec::new();
        self.materialize_into(&mut buf);
        buf
    }

    /// Multiplicative update on the gradient support:
    /// log_weight_i ← log_weight_i − α·g_i, normalizer updated in
    /// O(|support|) through the mass ratio of the touched coordinates.
    fn apply_sparse(&mut self, grad: &[(usize, f64)], alpha: f64) -> StepDelta {
        let ln = self.log_normalizer;
        let mut ratio_delta = 0.0;
        let mut w_deltas = Vec::with_capacity(grad.len());
        for &(i, g) in grad {
            let old = self.log_weights[i];
            let new = old - alpha * g;
            ratio_delta += (new - ln).exp() - (old - ln).exp();
            w_deltas.push(CoordDelta {
                index: i,
                old: old.exp(),
                new: new.exp(),
            });
            self.log_weights[i] = new;
            self.hot_bound = self.hot_bound.max(new.abs());
        }
        if ratio_delta.is_finite() && ratio_delta > -1.0 {
            self.log_normalizer = ln + ratio_delta.ln_1p();
        } else {
            self.resync_normalizer();
        }
        if (self.log_normalizer - self.norm_anchor).abs() > NORMALIZER_RESYNC_SPAN {
            self.resync_normalizer();
        }
        self.hot_bound = self.hot_bound.max(self.log_normalizer.abs());
        if self.hot_bound > LOG_SHIFT_GUARD {
            self.shift();
            StepDelta::SimplexRescaled
        } else {
            StepDelta::SimplexSparse(w_deltas)
        }
    }

    fn resync_normalizer(&mut self) {
        self.log_normalizer = self.dense_log_normalizer();
        self.norm_anchor = self.log_normalizer;
    }

    /// Shifts all log-weights by −max, which leaves the materialized point
    /// invariant, and recomputes the normalizer densely.
    fn shift(&mut self) {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        for lw in &mut self.log_weights {
            *lw -= max;
        }
        self.resync_normalizer();
        self.hot_bound = self.log_normalizer.abs();
    }
}

/// Step-size rule.
#[derive(Debug, Clone, Copy)]
pub enum StepMode {
    /// α = (R/M)·√(2/N); pass R = √(ln n) on the simplex.
    FixedHorizon {
        radius: f64,
        m_bound: f64,
        horizon: usize,
    },
    /// α = ε/M², the resolution for unbounded Q.
    TargetAccuracy { epsilon: f64, m_bound: f64 },
}

/// Constant step size for the requested rule.
pub fn step_size(mode: StepMode) -> Result<f64> {
    let positive = |name: &'static str, value: f64| {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonPositiveParameter { name, value })
        }
    };
    match mode {
        StepMode::FixedHorizon {
            radius,
            m_bound,
            horizon,
        } => {
            let r = positive("radius", radius)?;
            let m = positive("m_bound", m_bound)?;
            let n = positive("horizon", horizon as f64)?;
            Ok(r / m * (2.0 / n).sqrt())
        }
        StepMode::TargetAccuracy { epsilon, m_bound } => {
            let eps = positive("epsilon", epsilon)?;
            let m = positive("m_bound", m_bound)?;
            Ok(eps / (m * m))
        }
    }
}

/// Exact running mean of a Euclidean trajectory, synchronized lazily: a
/// coordinate's pending contribution is flushed just before it changes, so
/// an iterate costs O(1) plus O(|support|) per step.
#[derive(Debug, Clone)]
pub struct DenseMeanTracker {
    acc: Vec<f64>,
    last_sync: Vec<u64>,
    included: u64,
}

impl DenseMeanTracker {
    pub fn new(n: usize) -> Self {
        Self {
            acc: vec![0.0; n],
            last_sync: vec![0; n],
            included: 0,
        }
    }

    /// Counts the current point into the mean.
    pub fn include_current(&mut self) {
        self.included += 1;
    }

    /// Must be called with the pre-change value before coordinate `i` moves.
    pub fn before_change(&mut self, i: usize, old_value: f64) {
        let pending = self.included - self.last_sync[i];
        if pending > 0 {
            self.acc[i] += old_value * pending as f64;
        }
        self.last_sync[i] = self.included;
    }

    pub fn count(&self) -> u64 {
        self.included
    }

    pub fn finalize(&self, x: &[f64]) -> Vec<f64> {
        let mut mean = self.acc.clone();
        for i in 0..mean.len() {
            let pending = self.included - self.last_sync[i];
            mean[i] += x[i] * pending as f64;
            mean[i] /= self.included as f64;
        }
        mean
    }
}

/// Exact running mean of an entropy trajectory.
///
/// Between normalizer changes each coordinate's materialized value is its
/// unnormalized weight times exp(−log_normalizer), so the mean accumulates
/// w_i against a running sum of inverse normalizers and flushes a coordinate
/// only when its weight changes. A shift event flushes everything and
/// restarts the bookkeeping in the new frame.
#[derive(Debug, Clone)]
pub struct SimplexMeanTracker {
    acc: Vec<f64>,
    last_sync_t: Vec<f64>,
    w: Vec<f64>,
    t_cum: f64,
    /// log_normalizer at the start of the current accumulation epoch. When
    /// the normalizer wanders too far, the inverse-normalizer prefix sums
    /// span incompatible scales and their differences cancel; a full flush
    /// restarts the epoch before that happens.
    epoch_anchor: f64,
    included: u64,
}

/// Widest log-normalizer excursion allowed within one accumulation epoch.
const MEAN_EPOCH_SPAN: f64 = 10.0;

impl SimplexMeanTracker {
    pub fn new(state: &SimplexState) -> Self {
        let n = state.dim();
        Self {
            acc: vec![0.0; n],
            last_sync_t: vec![0.0; n],
            w: state.log_weights().iter().map(|&lw| lw.exp()).collect(),
            t_cum: 0.0,
            epoch_anchor: state.log_normalizer(),
            included: 0,
        }
    }

    /// Flushes every pending window and restarts the epoch clock.
    fn reanchor(&mut self, anchor: f64) {
        for i in 0..self.w.len() {
            self.acc[i] += self.w[i] * (self.t_cum - self.last_sync_t[i]);
            self.last_sync_t[i] = 0.0;
        }
        self.t_cum = 0.0;
        self.epoch_anchor = anchor;
    }

    pub fn include_current(&mut self, state: &SimplexState) {
        let l = state.log_normalizer();
        if (l - self.epoch_anchor).abs() > MEAN_EPOCH_SPAN {
            self.reanchor(l);
        }
        self.t_cum += (-l).exp();
        self.included += 1;
    }

    pub fn count(&self) -> u64 {
        self.included
    }

    pub fn observe(&mut self, delta: &StepDelta, state: &SimplexState) {
        match delta {
            StepDelta::SimplexSparse(w_deltas) => {
                for wd in w_deltas {
                    self.acc[wd.index] += wd.old * (self.t_cum - self.last_sync_t[wd.index]);
                    self.last_sync_t[wd.index] = self.t_cum;
                    self.w[wd.index] = wd.new;
                }
            }
            StepDelta::SimplexRescaled => {
                self.reanchor(state.log_normalizer());
                for (wi, &lw) in self.w.iter_mut().zip(state.log_weights()) {
                    *wi = lw.exp();
                }
            }
            StepDelta::Dense(_) => unreachable!("dense delta on a simplex trajectory"),
        }
    }

    /// Mean of the included points, renormalized onto the simplex.
    pub fn finalize(&self) -> Vec<f64> {
        let mut mean = self.acc.clone();
        for i in 0..mean.len() {
            mean[i] += self.w[i] * (self.t_cum - self.last_sync_t[i]);
        }
        let sum: f64 = mean.iter().sum();
        if sum > 0.0 {
            for v in &mut mean {
                *v /= sum;
            }
        }
        mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad(entries: &[(usize, f64)]) -> Vec<(usize, f64)> {
        entries.to_vec()
    }

    #[test]
    fn start_points() {
        let simplex = ProxSetup::EntropySimplex { n: 4 }.start_point().unwrap();
        assert_eq!(simplex.materialize(), vec![0.25; 4]);

        let free = ProxSetup::EuclideanFree { n: 3 }.start_point().unwrap();
        assert_eq!(free.materialize(), vec![0.0; 3]);

        let orthant = ProxSetup::EuclideanOrthant {
            anchor: vec![1.0, 2.0],
        }
        .start_point()
        .unwrap();
        assert_eq!(orthant.materialize(), vec![1.0, 2.0]);
    }

    #[test]
    fn orthant_rejects_nonpositive_anchor() {
        let setup = ProxSetup::EuclideanOrthant {
            anchor: vec![1.0, 0.0],
        };
        assert!(matches!(
            setup.start_point(),
            Err(Error::AnchorNotPositive { index: 1, .. })
        ));
    }

    #[test]
    fn free_step() {
        let setup = ProxSetup::EuclideanFree { n: 2 };
        let mut state = ProxState::Dense(vec![1.0, 1.0]);
        setup
            .mirror_step(&mut state, &grad(&[(0, 2.0)]), 0.5)
            .unwrap();
        assert_eq!(state.materialize(), vec![0.0, 1.0]);
    }

    #[test]
    fn orthant_step_clips() {
        let setup = ProxSetup::EuclideanOrthant {
            anchor: vec![1.0, 1.0],
        };
        let mut state = ProxState::Dense(vec![1.0, 1.0]);
        setup
            .mirror_step(&mut state, &grad(&[(0, 2.0), (1, -1.0)]), 1.0)
            .unwrap();
        assert_eq!(state.materialize(), vec![0.0, 2.0]);
    }

    #[test]
    fn entropy_step_matches_closed_form() {
        let setup = ProxSetup::EntropySimplex { n: 2 };
        let mut state = setup.start_point().unwrap();
        setup
            .mirror_step(&mut state, &grad(&[(0, 1.0)]), 2.0f64.ln())
            .unwrap();
        let x = state.materialize();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_fixes_point() {
        for setup in [
            ProxSetup::EuclideanFree { n: 3 },
            ProxSetup::EuclideanOrthant {
                anchor: vec![0.5, 1.0, 2.0],
            },
            ProxSetup::EntropySimplex { n: 3 },
        ] {
            let mut state = setup.start_point().unwrap();
            let before = state.materialize();
            setup
                .mirror_step(&mut state, &grad(&[(0, 0.0), (2, 0.0)]), 1.0)
                .unwrap();
            assert_eq!(state.materialize(), before);
        }
    }

    #[test]
    fn step_rejects_bad_inputs() {
        let setup = ProxSetup::EuclideanFree { n: 2 };
        let mut state = setup.start_point().unwrap();
        assert!(matches!(
            setup.mirror_step(&mut state, &grad(&[(0, 1.0)]), 0.0),
            Err(Error::StepNotPositive(_))
        ));
        assert!(matches!(
            setup.mirror_step(&mut state, &grad(&[(0, f64::NAN)]), 1.0),
            Err(Error::NonFiniteGradient { index: 0 })
        ));
        assert!(matches!(
            setup.mirror_step(&mut state, &grad(&[(5, 1.0)]), 1.0),
            Err(Error::SupportOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn free_step_is_linear() {
        let setup = ProxSetup::EuclideanFree { n: 3 };
        let g1 = grad(&[(0, 1.5), (2, -0.5)]);
        let g2 = grad(&[(0, -0.25), (1, 2.0)]);
        let combined: Vec<(usize, f64)> = vec![(0, 1.25), (1, 2.0), (2, -0.5)];
        let alpha = 0.75;

        let mut a = ProxState::Dense(vec![0.1, 0.2, 0.3]);
        setup.mirror_step(&mut a, &combined, alpha).unwrap();
        let mut b = ProxState::Dense(vec![0.1, 0.2, 0.3]);
        setup.mirror_step(&mut b, &g1, alpha).unwrap();
        setup.mirror_step(&mut b, &g2, alpha).unwrap();
        for (u, v) in a.materialize().iter().zip(b.materialize()) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn step_sizes() {
        assert_eq!(
            step_size(StepMode::TargetAccuracy {
                epsilon: 0.1,
                m_bound: 2.0
            })
            .unwrap(),
            0.025
        );
        assert_eq!(
            step_size(StepMode::FixedHorizon {
                radius: 1.0,
                m_bound: 1.0,
                horizon: 2
            })
            .unwrap(),
            1.0
        );
        // Simplex flavor: R = sqrt(ln n) with ln n = 1.
        assert_eq!(
            step_size(StepMode::FixedHorizon {
                radius: 1.0f64.sqrt(),
                m_bound: 1.0,
                horizon: 2
            })
            .unwrap(),
            1.0
        );
        assert!(step_size(StepMode::TargetAccuracy {
            epsilon: -1.0,
            m_bound: 1.0
        })
        .is_err());
    }

    #[test]
    fn simplex_invariants_under_fuzz() {
        let setup = ProxSetup::EntropySimplex { n: 7 };
        let mut state = setup.start_point().unwrap();
        let mut lcg = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let i = (next() * 7.0) as usize % 7;
            let g = (next() - 0.5) * 6.0;
            setup.mirror_step(&mut state, &grad(&[(i, g)]), 0.3).unwrap();
            let x = state.materialize();
            let sum: f64 = x.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(x.iter().all(|&v| v >= 0.0));
        }
        let s = state.as_simplex().unwrap();
        assert!((s.log_normalizer() - s.dense_log_normalizer()).abs() <= 1e-10);
    }

    #[test]
    fn shift_guard_preserves_point() {
        let setup = ProxSetup::EntropySimplex { n: 3 };
        let mut state = setup.start_point().unwrap();
        // Push one coordinate's exponent far down in large jumps.
        let mut saw_rescale = false;
        for _ in 0..20 {
            let before = state.materialize();
            let delta = setup
                .mirror_step(&mut state, &grad(&[(0, 40.0)]), 1.0)
                .unwrap();
            if matches!(delta, StepDelta::SimplexRescaled) {
                saw_rescale = true;
            }
            let after = state.materialize();
            // One step moves mass; the shift itself must not.
            assert!(after.iter().sum::<f64>() - 1.0 <= 1e-12);
            assert!(before.iter().zip(&after).all(|(b, a)| a <= b || *a >= 0.0));
        }
        assert!(saw_rescale);
        // The guard caps the positive side; coordinates with negligible mass
        // may sit far below zero, which only underflows their weight to 0.
        let s = state.as_simplex().unwrap();
        let max_lw = s.log_weights().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(max_lw <= 300.0 + 40.0 + 1.0);
        assert!(s.log_normalizer().is_finite());
    }

    #[test]
    fn bregman_diagnostics() {
        let euclid = ProxSetup::EuclideanFree { n: 2 };
        assert_eq!(euclid.bregman(&[0.0, 0.0], &[3.0, 4.0]), 12.5);

        let entropy = ProxSetup::EntropySimplex { n: 2 };
        let kl = entropy.bregman(&[0.5, 0.5], &[0.25, 0.75]);
        let expect = 0.25 * (0.25f64 / 0.5).ln() + 0.75 * (0.75f64 / 0.5).ln();
        assert!((kl - expect).abs() < 1e-15);
        assert_eq!(entropy.bregman(&[1.0, 0.0], &[0.5, 0.5]), f64::INFINITY);
    }

    #[test]
    fn dense_mean_tracker_is_exact() {
        let setup = ProxSetup::EuclideanFree { n: 3 };
        let mut state = ProxState::Dense(vec![0.0; 3]);
        let mut tracker = DenseMeanTracker::new(3);
        let mut brute = vec![0.0; 3];
        let mut lcg = 99u64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            tracker.include_current();
            for (b, v) in brute.iter_mut().zip(state.as_dense().unwrap()) {
                *b += v;
            }
            let i = (next() * 3.0) as usize % 3;
            let g = next() - 0.5;
            let delta = setup.mirror_step(&mut state, &[(i, g)], 1.0).unwrap();
            if let StepDelta::Dense(changes) = delta {
                for c in changes {
                    tracker.before_change(c.index, c.old);
                }
            }
        }
        let mean = tracker.finalize(state.as_dense().unwrap());
        for (m, b) in mean.iter().zip(&brute) {
            assert!((m - b / 500.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_mean_tracker_matches_brute_force() {
        let setup = ProxSetup::EntropySimplex { n: 5 };
        let mut state = setup.start_point().unwrap();
        let mut tracker = match &state {
            ProxState::Simplex(s) => SimplexMeanTracker::new(s),
            _ => unreachable!(),
        };
        let mut brute = vec![0.0; 5];
        let mut lcg = 7u64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        let steps = 800;
        for _ in 0..steps {
            let s = match &state {
                ProxState::Simplex(s) => s,
                _ => unreachable!(),
            };
            tracker.include_current(s);
            for (b, v) in brute.iter_mut().zip(state.materialize()) {
                *b += v;
            }
            let i = (next() * 5.0) as usize % 5;
            let g = (next() - 0.5) * 40.0;
            let delta = setup.mirror_step(&mut state, &[(i, g)], 1.0).unwrap();
            let s = match &state {
                ProxState::Simplex(s) => s,
                _ => unreachable!(),
            };
            tracker.observe(&delta, s);
        }
        let mean = tracker.finalize();
        for (m, b) in mean.iter().zip(&brute) {
            assert!((m - b / steps as f64).abs() < 1e-9, "{m} vs {}", b / steps as f64);
        }
    }
}
