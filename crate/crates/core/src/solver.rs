//! Mirror-descent drivers: the plain averaged scheme, the switching scheme
//! for one functional constraint, best-iterate selection for deterministic
//! oracles, and amplification over independent trajectories.
//!
//! A trajectory is a self-contained unit: immutable shared problem data, a
//! trajectory-local oracle (which may own trackers and caches), and an RNG
//! stream derived from the master seed by the trajectory index. Identical
//! configuration and seed replay bit-identically.

use crate::argmax::{ArgmaxTree, BlockArgmax, SimplexArgmaxTracker};
use crate::error::{Error, Result};
use crate::oracles::{BlockSumProblem, MaxFormProblem, PageRankProblem, StochGrad};
use crate::prox::{
    step_size, DenseMeanTracker, DualNorm, ProxSetup, ProxState, SimplexMeanTracker, StepDelta,
    StepMode,
};
use crate::rng::TrajectoryRng;
use crate::sampling::{signed_row_samplers, SignedRowSampler};
use crate::sparse::{RowDotCache, DEFAULT_REFRESH_PERIOD};

/// What the report's output point should be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// x̄ = mean over every iterate (the default guarantee).
    MeanAll,
    /// Best iterate by exact objective; deterministic oracles only.
    BestIterate,
}

/// Ceiling-rounded iteration budget: 2M²R²/ε², plus one for the
/// constrained scheme.
pub fn derive_horizon(epsilon: f64, m_bound: f64, radius: f64, constrained: bool) -> Result<usize> {
    for (name, value) in [
        ("epsilon", epsilon),
        ("m_bound", m_bound),
        ("radius", radius),
    ] {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    let base = 2.0 * m_bound * m_bound * radius * radius / (epsilon * epsilon)
        + if constrained { 1.0 } else { 0.0 };
    Ok((base.ceil() as usize).max(1))
}

/// Configuration of one unconstrained solve.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target accuracy ε.
    pub epsilon: f64,
    /// Gradient-norm bound M (in the prox setup's dual norm).
    pub m_bound: f64,
    /// Prox-radius estimate R; on the simplex it defaults to √(ln n).
    pub radius: Option<f64>,
    /// Explicit iteration budget; derived from ε, M, R when absent.
    pub horizon: Option<usize>,
    pub seed: u64,
    /// Trajectory stream index under the master seed.
    pub stream: u64,
    pub averaging: Averaging,
    /// Objective-trace stride; defaults to max(1, N/1000).
    pub trace_every: Option<usize>,
}

impl SolverConfig {
    pub fn new(epsilon: f64, m_bound: f64, seed: u64) -> Self {
        Self {
            epsilon,
            m_bound,
            radius: None,
            horizon: None,
            seed,
            stream: 0,
            averaging: Averaging::MeanAll,
            trace_every: None,
        }
    }

    /// Resolves (N, α). An explicit horizon paired with an explicit radius
    /// must agree with the derived budget; with a radius available the step
    /// is (R/M)√(2/N), otherwise the unbounded-Q rule ε/M².
    pub fn resolve(&self, prox: &ProxSetup) -> Result<(usize, f64)> {
        let radius = self.radius.or_else(|| prox.known_radius());
        let horizon = match (self.horizon, self.radius) {
            (Some(n), Some(r)) => {
                let derived = derive_horizon(self.epsilon, self.m_bound, r, false)?;
                if n != derived {
                    return Err(Error::HorizonInconsistent {
                        given: n,
                        derived,
                    });
                }
                n
            }
            (Some(n), None) => n,
            (None, _) => match radius {
                Some(r) => derive_horizon(self.epsilon, self.m_bound, r, false)?,
                None => return Err(Error::HorizonUnderspecified),
            },
        };
        let alpha = match radius {
            Some(r) => step_size(StepMode::FixedHorizon {
                radius: r,
                m_bound: self.m_bound,
                horizon,
            })?,
            None => step_size(StepMode::TargetAccuracy {
                epsilon: self.epsilon,
                m_bound: self.m_bound,
            })?,
        };
        Ok((horizon, alpha))
    }
}

/// Configuration of a constrained solve (switching scheme).
#[derive(Debug, Clone)]
pub struct ConstrainedConfig {
    /// Constraint tolerance ε_g.
    pub eps_g: f64,
    /// Objective tolerance ε_f; defaults to the coupling (M_f/M_g)·ε_g.
    pub eps_f: Option<f64>,
    pub m_f: f64,
    pub m_g: f64,
    pub radius: Option<f64>,
    pub horizon: Option<usize>,
    pub seed: u64,
    pub stream: u64,
    pub trace_every: Option<usize>,
}

impl ConstrainedConfig {
    pub fn new(eps_g: f64, m_f: f64, m_g: f64, seed: u64) -> Self {
        Self {
            eps_g,
            eps_f: None,
            m_f,
            m_g,
            radius: None,
            horizon: None,
            seed,
            stream: 0,
            trace_every: None,
        }
    }

    pub fn eps_f(&self) -> f64 {
        self.eps_f.unwrap_or(self.m_f / self.m_g * self.eps_g)
    }

    /// h_f = ε_f/M_f²; with the default coupling this is ε_g/(M_f·M_g).
    pub fn step_f(&self) -> f64 {
        self.eps_f() / (self.m_f * self.m_f)
    }

    /// h_g = ε_g/M_g².
    pub fn step_g(&self) -> f64 {
        self.eps_g / (self.m_g * self.m_g)
    }

    pub fn resolve_horizon(&self, prox: &ProxSetup) -> Result<usize> {
        let radius = self.radius.or_else(|| prox.known_radius());
        match (self.horizon, self.radius) {
            (Some(n), Some(r)) => {
                let derived = derive_horizon(self.eps_g, self.m_g, r, true)?;
                if n != derived {
                    return Err(Error::HorizonInconsistent { given: n, derived });
                }
                Ok(n)
            }
            (Some(n), None) => Ok(n),
            (None, _) => match radius {
                Some(r) => derive_horizon(self.eps_g, self.m_g, r, true),
                None => Err(Error::HorizonUnderspecified),
            },
        }
    }
}

/// Work counters of one trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub oracle_calls: u64,
    pub touched_rows: u64,
    pub tree_path_updates: u64,
    pub uniform_variates: u64,
    pub max_touched_per_iter: u64,
    pub max_path_updates_per_iter: u64,
}

/// Tracker work attributable to one oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleCounters {
    pub touched_rows: u64,
    pub tree_path_updates: u64,
}

/// One sampled point of the convergence trace.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective: f64,
    pub constraint: Option<f64>,
    /// Cumulative touched rows at this iteration.
    pub touched_rows: u64,
}

/// Productive/unproductive step counts of a constrained run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductiveCounts {
    pub productive: usize,
    pub unproductive: usize,
}

/// Trajectory record returned by the drivers.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Averaged output x̄ (over the productive set when constrained).
    pub x_bar: Vec<f64>,
    /// Exact objective at x̄ when an evaluator was supplied.
    pub f_bar: Option<f64>,
    /// Best iterate and its objective (best-iterate mode).
    pub x_best: Option<Vec<f64>>,
    pub f_best: Option<f64>,
    pub trace: Vec<TracePoint>,
    pub counters: Counters,
    pub horizon: usize,
    pub alpha: f64,
    pub seed: u64,
    pub stream: u64,
    pub productive: Option<ProductiveCounts>,
}

impl RunReport {
    /// The point the run is judged by: best iterate when tracked, else x̄.
    pub fn output(&self) -> &[f64] {
        self.x_best.as_deref().unwrap_or(&self.x_bar)
    }
}

/// A stochastic (sub)gradient source driving one trajectory.
///
/// `init` sees the start point (to build trackers), `sample` draws a
/// gradient at the current point, and `observe` feeds every mirror-step
/// outcome back so incremental state stays consistent, including steps
/// taken against the other oracle of a constrained run.
pub trait StochasticOracle {
    fn dual_norm(&self) -> DualNorm;

    fn init(&mut self, _state: &ProxState) -> Result<()> {
        Ok(())
    }

    fn sample(&mut self, state: &ProxState, rng: &mut TrajectoryRng) -> Result<StochGrad>;

    fn observe(&mut self, _state: &ProxState, _delta: &StepDelta) -> Result<()> {
        Ok(())
    }

    fn counters(&self) -> OracleCounters {
        OracleCounters::default()
    }
}

/// A constraint oracle additionally evaluates g(x) at the current point,
/// O(1) from a tracker root for max-form constraints.
pub trait ConstraintOracle: StochasticOracle {
    fn value(&mut self, state: &ProxState) -> Result<f64>;
}

enum MeanTracker {
    Dense(DenseMeanTracker),
    Simplex(SimplexMeanTracker),
}

impl MeanTracker {
    fn for_state(state: &ProxState) -> Self {
        match state {
            ProxState::Dense(x) => MeanTracker::Dense(DenseMeanTracker::new(x.len())),
            ProxState::Simplex(s) => MeanTracker::Simplex(SimplexMeanTracker::new(s)),
        }
    }

    fn include_current(&mut self, state: &ProxState) {
        match (self, state) {
            (MeanTracker::Dense(t), _) => t.include_current(),
            (MeanTracker::Simplex(t), ProxState::Simplex(s)) => t.include_current(s),
            _ => unreachable!(),
        }
    }

    fn observe(&mut self, delta: &StepDelta, state: &ProxState) {
        match (self, delta, state) {
            (MeanTracker::Dense(t), StepDelta::Dense(changes), _) => {
                for c in changes {
                    t.before_change(c.index, c.old);
                }
            }
            (MeanTracker::Simplex(t), delta, ProxState::Simplex(s)) => t.observe(delta, s),
            _ => unreachable!(),
        }
    }

    fn count(&self) -> u64 {
        match self {
            MeanTracker::Dense(t) => t.count(),
            MeanTracker::Simplex(t) => t.count(),
        }
    }

    fn finalize(&self, state: &ProxState) -> Vec<f64> {
        match (self, state) {
            (MeanTracker::Dense(t), ProxState::Dense(x)) => t.finalize(x),
            (MeanTracker::Simplex(t), ProxState::Simplex(_)) => t.finalize(),
            _ => unreachable!(),
        }
    }
}

fn delta_is_finite(delta: &StepDelta, state: &ProxState) -> bool {
    match delta {
        StepDelta::Dense(changes) => changes.iter().all(|c| c.new.is_finite()),
        StepDelta::SimplexSparse(_) | StepDelta::SimplexRescaled => state
            .as_simplex()
            .is_some_and(|s| s.log_normalizer().is_finite()),
    }
}

struct IterationMeter {
    touched_before: u64,
    paths_before: u64,
    max_touched: u64,
    max_paths: u64,
}

impl IterationMeter {
    fn new() -> Self {
        Self {
            touched_before: 0,
            paths_before: 0,
            max_touched: 0,
            max_paths: 0,
        }
    }

    fn begin(&mut self, c: OracleCounters) {
        self.touched_before = c.touched_rows;
        self.paths_before = c.tree_path_updates;
    }

    fn end(&mut self, c: OracleCounters) {
        self.max_touched = self.max_touched.max(c.touched_rows - self.touched_before);
        self.max_paths = self
            .max_paths
            .max(c.tree_path_updates - self.paths_before);
    }
}

/// Runs N steps of x^{k+1} = Mirr_{x^k}(α·∇f_k(x^k, ξ^k)) from the prox
/// start point and returns the running mean x̄ plus counters. Deterministic
/// given (config, seed, stream).
pub fn mirror_descent<O: StochasticOracle>(
    config: &SolverConfig,
    prox: &ProxSetup,
    oracle: &mut O,
    f_exact: Option<&dyn Fn(&[f64]) -> f64>,
) -> Result<RunReport> {
    if oracle.dual_norm() != prox.dual_norm() {
        return Err(Error::IncompatibleNorms {
            oracle: oracle.dual_norm(),
            prox: prox.dual_norm(),
        });
    }
    if config.averaging == Averaging::BestIterate && f_exact.is_none() {
        return Err(Error::BestIterateNeedsObjective);
    }
    let (horizon, alpha) = config.resolve(prox)?;
    let stride = config.trace_every.unwrap_or_else(|| (horizon / 1000).max(1));

    let mut state = prox.start_point()?;
    oracle.init(&state)?;
    let mut rng = TrajectoryRng::new(config.seed, config.stream);
    let mut mean = MeanTracker::for_state(&state);
    let mut meter = IterationMeter::new();
    let mut trace = Vec::new();
    let mut x_buf = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let track_best = config.averaging == Averaging::BestIterate;

    for k in 1..=horizon {
        if let Some(f) = f_exact {
            let want_trace = k == 1 || k % stride == 0;
            if want_trace || track_best {
                state.materialize_into(&mut x_buf);
                let value = f(&x_buf);
                if want_trace {
                    trace.push(TracePoint {
                        iteration: k,
                        objective: value,
                        constraint: None,
                        touched_rows: oracle.counters().touched_rows,
                    });
                }
                if track_best && best.as_ref().is_none_or(|(fb, _)| value < *fb) {
                    best = Some((value, x_buf.clone()));
                }
            }
        }
        mean.include_current(&state);
        meter.begin(oracle.counters());
        let grad = oracle.sample(&state, &mut rng)?;
        debug_assert!(grad.bound_holds());
        let delta = prox.mirror_step(&mut state, &grad.entries, alpha)?;
        if !delta_is_finite(&delta, &state) {
            return Err(Error::NonFiniteIterate { iteration: k });
        }
        oracle.observe(&state, &delta)?;
        mean.observe(&delta, &state);
        meter.end(oracle.counters());
    }

    let x_bar = mean.finalize(&state);
    let f_bar = f_exact.map(|f| f(&x_bar));
    let oc = oracle.counters();
    Ok(RunReport {
        x_bar,
        f_bar,
        x_best: best.as_ref().map(|(_, x)| x.clone()),
        f_best: best.map(|(f, _)| f),
        trace,
        counters: Counters {
            oracle_calls: horizon as u64,
            touched_rows: oc.touched_rows,
            tree_path_updates: oc.tree_path_updates,
            uniform_variates: rng.variates(),
            max_touched_per_iter: meter.max_touched,
            max_path_updates_per_iter: meter.max_paths,
        },
        horizon,
        alpha,
        seed: config.seed,
        stream: config.stream,
        productive: None,
    })
}

/// Switching scheme for min f subject to g ≤ 0 on Q: step on f with h_f
/// when g(x^k) ≤ ε_g, on g with h_g otherwise, and average only the
/// productive iterates. Fails explicitly when no step was productive.
pub fn constrained_mirror_descent<F, G>(
    config: &ConstrainedConfig,
    prox: &ProxSetup,
    f_oracle: &mut F,
    g_oracle: &mut G,
    f_exact: Option<&dyn Fn(&[f64]) -> f64>,
) -> Result<RunReport>
where
    F: StochasticOracle,
    G: ConstraintOracle,
{
    for oracle_norm in [f_oracle.dual_norm(), g_oracle.dual_norm()] {
        if oracle_norm != prox.dual_norm() {
            return Err(Error::IncompatibleNorms {
                oracle: oracle_norm,
                prox: prox.dual_norm(),
            });
        }
    }
    let horizon = config.resolve_horizon(prox)?;
    let h_f = config.step_f();
    let h_g = config.step_g();
    if h_f <= 0.0 || h_g <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "step",
            value: h_f.min(h_g),
        });
    }
    let stride = config.trace_every.unwrap_or_else(|| (horizon / 1000).max(1));

    let mut state = prox.start_point()?;
    f_oracle.init(&state)?;
    g_oracle.init(&state)?;
    let mut rng = TrajectoryRng::new(config.seed, config.stream);
    let mut mean = MeanTracker::for_state(&state);
    let mut trace = Vec::new();
    let mut x_buf = Vec::new();
    let mut n_productive = 0usize;
    let mut n_unproductive = 0usize;

    let combined = |f: &F, g: &G| {
        let (fc, gc) = (f.counters(), g.counters());
        OracleCounters {
            touched_rows: fc.touched_rows + gc.touched_rows,
            tree_path_updates: fc.tree_path_updates + gc.tree_path_updates,
        }
    };
    let mut meter = IterationMeter::new();

    for k in 1..=horizon {
        let g_value = g_oracle.value(&state)?;
        let productive = g_value <= config.eps_g;
        if k == 1 || k % stride == 0 {
            state.materialize_into(&mut x_buf);
            trace.push(TracePoint {
                iteration: k,
                objective: f_exact.map_or(f64::NAN, |f| f(&x_buf)),
                constraint: Some(g_value),
                touched_rows: combined(f_oracle, g_oracle).touched_rows,
            });
        }
        meter.begin(combined(f_oracle, g_oracle));
        let (grad, step) = if productive {
            n_productive += 1;
            mean.include_current(&state);
            (f_oracle.sample(&state, &mut rng)?, h_f)
        } else {
            n_unproductive += 1;
            (g_oracle.sample(&state, &mut rng)?, h_g)
        };
        debug_assert!(grad.bound_holds());
        let delta = prox.mirror_step(&mut state, &grad.entries, step)?;
        if !delta_is_finite(&delta, &state) {
            return Err(Error::NonFiniteIterate { iteration: k });
        }
        f_oracle.observe(&state, &delta)?;
        g_oracle.observe(&state, &delta)?;
        mean.observe(&delta, &state);
        meter.end(combined(f_oracle, g_oracle));
    }

    if n_productive == 0 {
        return Err(Error::NoProductiveSteps { horizon });
    }
    debug_assert_eq!(mean.count(), n_productive as u64);
    let x_bar = mean.finalize(&state);
    let f_bar = f_exact.map(|f| f(&x_bar));
    let totals = combined(f_oracle, g_oracle);
    Ok(RunReport {
        x_bar,
        f_bar,
        x_best: None,
        f_best: None,
        trace,
        counters: Counters {
            oracle_calls: horizon as u64,
            touched_rows: totals.touched_rows,
            tree_path_updates: totals.tree_path_updates,
            uniform_variates: rng.variates(),
            max_touched_per_iter: meter.max_touched,
            max_path_updates_per_iter: meter.max_paths,
        },
        horizon,
        alpha: h_f,
        seed: config.seed,
        stream: config.stream,
        productive: Some(ProductiveCounts {
            productive: n_productive,
            unproductive: n_unproductive,
        }),
    })
}

/// Result of an amplified run.
#[derive(Debug, Clone)]
pub struct AmplifiedRun {
    pub best_point: Vec<f64>,
    pub best_objective: f64,
    /// Index of the winning trajectory.
    pub winner: usize,
    pub trajectories: usize,
    pub reports: Vec<RunReport>,
}

/// Runs ⌈log₂(1/σ)⌉ independent trajectories (distinct RNG streams under
/// one master seed), evaluates the exact objective at each averaged output,
/// and returns the minimizer.
pub fn amplify(
    sigma: f64,
    run_trajectory: &mut dyn FnMut(u64) -> Result<RunReport>,
    f_exact: &dyn Fn(&[f64]) -> f64,
) -> Result<AmplifiedRun> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    let trajectories = (1.0 / sigma).log2().ceil().max(1.0) as usize;
    let mut reports = Vec::with_capacity(trajectories);
    let mut best: Option<(usize, f64)> = None;
    for stream in 0..trajectories {
        let report = run_trajectory(stream as u64)?;
        let value = f_exact(report.output());
        if best.is_none_or(|(_, bv)| value < bv) {
            best = Some((stream, value));
        }
        reports.push(report);
    }
    let (winner, best_objective) = best.expect("at least one trajectory");
    Ok(AmplifiedRun {
        best_point: reports[winner].output().to_vec(),
        best_objective,
        winner,
        trajectories,
        reports,
    })
}

// ---------------------------------------------------------------------------
// Oracle adapters
// ---------------------------------------------------------------------------

/// Double-sampling PageRank oracle on an entropy trajectory.
pub struct DoubleSampleOracle<'a> {
    problem: &'a PageRankProblem,
    x_buf: Vec<f64>,
}

impl<'a> DoubleSampleOracle<'a> {
    pub fn new(problem: &'a PageRankProblem) -> Self {
        Self {
            problem,
            x_buf: Vec::new(),
        }
    }
}

impl StochasticOracle for DoubleSampleOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        DualNorm::LInf
    }

    fn sample(&mut self, state: &ProxState, rng: &mut TrajectoryRng) -> Result<StochGrad> {
        state.materialize_into(&mut self.x_buf);
        Ok(self.problem.double_sample(&self.x_buf, rng))
    }
}

/// Sum-randomization PageRank oracle. Rebuilds the row-dot view each call;
/// under the entropy prox every coordinate of x moves per step, so the
/// amortized O(n + nnz) rebuild is the honest cost of this estimator.
pub struct SumRandOracle<'a> {
    problem: &'a PageRankProblem,
    x_buf: Vec<f64>,
}

impl<'a> SumRandOracle<'a> {
    pub fn new(problem: &'a PageRankProblem) -> Self {
        Self {
            problem,
            x_buf: Vec::new(),
        }
    }
}

impl StochasticOracle for SumRandOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        DualNorm::LInf
    }

    fn sample(&mut self, state: &ProxState, rng: &mut TrajectoryRng) -> Result<StochGrad> {
        state.materialize_into(&mut self.x_buf);
        let dots = self.problem.residual(&self.x_buf)?;
        let cache = RowDotCache::from_parts(dots, self.x_buf.clone(), DEFAULT_REFRESH_PERIOD);
        Ok(self.problem.sum_randomization(&cache, rng))
    }
}

/// Exact-gradient PageRank baseline.
pub struct ExactPageRankOracle<'a> {
    problem: &'a PageRankProblem,
    x_buf: Vec<f64>,
    touched: u64,
}

impl<'a> ExactPageRankOracle<'a> {
    pub fn new(problem: &'a PageRankProblem) -> Self {
        Self {
            problem,
            x_buf: Vec::new(),
            touched: 0,
        }
    }
}

impl StochasticOracle for ExactPageRankOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        DualNorm::LInf
    }

    fn sample(&mut self, state: &ProxState, _rng: &mut TrajectoryRng) -> Result<StochGrad> {
        state.materialize_into(&mut self.x_buf);
        let entries = self.problem.exact_subgradient(&self.x_buf)?;
        // Full-gradient cost: every row dot is recomputed.
        self.touched += self.problem.dim() as u64;
        let m_bound = DualNorm::LInf.eval(&entries);
        Ok(StochGrad {
            entries,
            m_bound,
            dual_norm: DualNorm::LInf,
            meta: Default::default(),
        })
    }

    fn counters(&self) -> OracleCounters {
        OracleCounters {
            touched_rows: self.touched,
            tree_path_updates: 0,
        }
    }
}

enum MaxFormTracker {
    Euclidean(ArgmaxTree),
    Simplex(SimplexArgmaxTracker),
}

/// Two-spike oracle for a max-form objective, with the argmax maintained
/// incrementally: a segment tree over row dots on Euclidean trajectories,
/// or over unnormalized weight dots on entropy trajectories (uniform affine
/// offsets only).
pub struct TwoSpikeOracle<'a> {
    problem: &'a MaxFormProblem,
    samplers: Vec<SignedRowSampler>,
    tracker: Option<MaxFormTracker>,
    norm: DualNorm,
    refresh_period: u32,
}

impl<'a> TwoSpikeOracle<'a> {
    pub fn new(problem: &'a MaxFormProblem, norm: DualNorm) -> Self {
        Self {
            problem,
            samplers: signed_row_samplers(problem.matrix()),
            tracker: None,
            norm,
            refresh_period: DEFAULT_REFRESH_PERIOD,
        }
    }

    pub fn with_refresh_period(mut self, period: u32) -> Self {
        self.refresh_period = period;
        self
    }

    fn tracker(&self) -> &MaxFormTracker {
        self.tracker.as_ref().expect("oracle initialized")
    }
}

impl StochasticOracle for TwoSpikeOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        self.norm
    }

    fn init(&mut self, state: &ProxState) -> Result<()> {
        self.tracker = Some(match state {
            ProxState::Dense(x) => MaxFormTracker::Euclidean(ArgmaxTree::build_with_period(
                self.problem,
                x,
                self.refresh_period,
            )?),
            ProxState::Simplex(s) => MaxFormTracker::Simplex(
                SimplexArgmaxTracker::build_with_period(self.problem, s, self.refresh_period)?,
            ),
        });
        Ok(())
    }

    fn sample(&mut self, _state: &ProxState, rng: &mut TrajectoryRng) -> Result<StochGrad> {
        let active = match self.tracker() {
            MaxFormTracker::Euclidean(t) => t.active(),
            MaxFormTracker::Simplex(t) => t.active(),
        };
        Ok(self.problem.two_spike(active, &self.samplers, self.norm, rng))
    }

    fn observe(&mut self, state: &ProxState, delta: &StepDelta) -> Result<()> {
        match (self.tracker.as_mut().expect("oracle initialized"), delta) {
            (MaxFormTracker::Euclidean(t), StepDelta::Dense(changes)) => {
                let deltas: Vec<(usize, f64)> =
                    changes.iter().map(|c| (c.index, c.delta())).collect();
                t.notify(self.problem, &deltas)?;
            }
            (MaxFormTracker::Simplex(t), delta) => {
                let s = state.as_simplex().ok_or(Error::ProxStateMismatch)?;
                t.observe(self.problem, delta, s)?;
            }
            _ => return Err(Error::ProxStateMismatch),
        }
        Ok(())
    }

    fn counters(&self) -> OracleCounters {
        match self.tracker() {
            MaxFormTracker::Euclidean(t) => OracleCounters {
                touched_rows: t.touch_counter(),
                tree_path_updates: t.path_updates(),
            },
            MaxFormTracker::Simplex(t) => OracleCounters {
                touched_rows: t.touch_counter(),
                tree_path_updates: t.path_updates(),
            },
        }
    }
}

impl ConstraintOracle for TwoSpikeOracle<'_> {
    fn value(&mut self, _state: &ProxState) -> Result<f64> {
        Ok(match self.tracker() {
            MaxFormTracker::Euclidean(t) => t.current().1,
            MaxFormTracker::Simplex(t) => t.current().1,
        })
    }
}

/// Deterministic max-form baseline: full argmax scan and the exact
/// subgradient σ'·A_{k(x)} each call.
pub struct ExactMaxFormOracle<'a> {
    problem: &'a MaxFormProblem,
    norm: DualNorm,
    x_buf: Vec<f64>,
    touched: u64,
}

impl<'a> ExactMaxFormOracle<'a> {
    pub fn new(problem: &'a MaxFormProblem, norm: DualNorm) -> Self {
        Self {
            problem,
            norm,
            x_buf: Vec::new(),
            touched: 0,
        }
    }
}

impl StochasticOracle for ExactMaxFormOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        self.norm
    }

    fn sample(&mut self, state: &ProxState, _rng: &mut TrajectoryRng) -> Result<StochGrad> {
        state.materialize_into(&mut self.x_buf);
        let entries = self.problem.exact_subgradient(&self.x_buf)?;
        self.touched += self.problem.rows() as u64;
        let m_bound = self.norm.eval(&entries);
        Ok(StochGrad {
            entries,
            m_bound,
            dual_norm: self.norm,
            meta: Default::default(),
        })
    }

    fn counters(&self) -> OracleCounters {
        OracleCounters {
            touched_rows: self.touched,
            tree_path_updates: 0,
        }
    }
}

impl ConstraintOracle for ExactMaxFormOracle<'_> {
    fn value(&mut self, state: &ProxState) -> Result<f64> {
        state.materialize_into(&mut self.x_buf);
        self.problem.value(&self.x_buf)
    }
}

/// Block-sum two-spike oracle with per-block trackers (Euclidean
/// trajectories).
pub struct BlockSumOracle<'a> {
    problem: &'a BlockSumProblem,
    samplers: Vec<SignedRowSampler>,
    tracker: Option<BlockArgmax>,
    norm: DualNorm,
    refresh_period: u32,
}

impl<'a> BlockSumOracle<'a> {
    pub fn new(problem: &'a BlockSumProblem, norm: DualNorm) -> Self {
        Self {
            problem,
            samplers: signed_row_samplers(problem.inner().matrix()),
            tracker: None,
            norm,
            refresh_period: DEFAULT_REFRESH_PERIOD,
        }
    }
}

impl StochasticOracle for BlockSumOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        self.norm
    }

    fn init(&mut self, state: &ProxState) -> Result<()> {
        let x = state.as_dense().ok_or(Error::ProxStateMismatch)?;
        self.tracker = Some(BlockArgmax::build_with_period(
            self.problem,
            x,
            self.refresh_period,
        )?);
        Ok(())
    }

    fn sample(&mut self, _state: &ProxState, rng: &mut TrajectoryRng) -> Result<StochGrad> {
        let actives = self.tracker.as_ref().expect("initialized").actives();
        Ok(self.problem.sample(&actives, &self.samplers, self.norm, rng))
    }

    fn observe(&mut self, _state: &ProxState, delta: &StepDelta) -> Result<()> {
        match delta {
            StepDelta::Dense(changes) => {
                let deltas: Vec<(usize, f64)> =
                    changes.iter().map(|c| (c.index, c.delta())).collect();
                self.tracker
                    .as_mut()
                    .expect("initialized")
                    .notify(self.problem, &deltas)
            }
            _ => Err(Error::ProxStateMismatch),
        }
    }

    fn counters(&self) -> OracleCounters {
        let t = self.tracker.as_ref().expect("initialized");
        OracleCounters {
            touched_rows: t.touch_counter(),
            tree_path_updates: t.path_updates(),
        }
    }
}

/// Deterministic block-sum baseline.
pub struct ExactBlockSumOracle<'a> {
    problem: &'a BlockSumProblem,
    norm: DualNorm,
    x_buf: Vec<f64>,
    touched: u64,
}

impl<'a> ExactBlockSumOracle<'a> {
    pub fn new(problem: &'a BlockSumProblem, norm: DualNorm) -> Self {
        Self {
            problem,
            norm,
            x_buf: Vec::new(),
            touched: 0,
        }
    }
}

impl StochasticOracle for ExactBlockSumOracle<'_> {
    fn dual_norm(&self) -> DualNorm {
        self.norm
    }

    fn sample(&mut self, state: &ProxState, _rng: &mut TrajectoryRng) -> Result<StochGrad> {
        state.materialize_into(&mut self.x_buf);
        let entries = self.problem.exact_subgradient(&self.x_buf)?;
        self.touched += self.problem.inner().rows() as u64;
        let m_bound = self.norm.eval(&entries);
        Ok(StochGrad {
            entries,
            m_bound,
            dual_norm: self.norm,
            meta: Default::default(),
        })
    }

    fn counters(&self) -> OracleCounters {
        OracleCounters {
            touched_rows: self.touched,
            tree_path_updates: 0,
        }
    }
}

/// Constant-gradient oracle for a linear objective ⟨c, x⟩.
pub struct LinearObjectiveOracle {
    entries: Vec<(usize, f64)>,
    norm: DualNorm,
    m_bound: f64,
}

impl LinearObjectiveOracle {
    pub fn new(c: &[f64], norm: DualNorm) -> Self {
        let entries: Vec<(usize, f64)> = c
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        let m_bound = norm.eval(&entries);
        Self {
            entries,
            norm,
            m_bound,
        }
    }

    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }
}

impl StochasticOracle for LinearObjectiveOracle {
    fn dual_norm(&self) -> DualNorm {
        self.norm
    }

    fn sample(&mut self, _state: &ProxState, _rng: &mut TrajectoryRng) -> Result<StochGrad> {
        Ok(StochGrad {
            entries: self.entries.clone(),
            m_bound: self.m_bound,
            dual_norm: self.norm,
            meta: Default::default(),
        })
    }
}

/// Always-zero oracle (identity trajectory), for tests.
pub struct ZeroOracle(pub DualNorm);

impl StochasticOracle for ZeroOracle {
    fn dual_norm(&self) -> DualNorm {
        self.0
    }

    fn sample(&mut self, _state: &ProxState, _rng: &mut TrajectoryRng) -> Result<StochGrad> {
        Ok(StochGrad::zero(self.0))
    }
}
