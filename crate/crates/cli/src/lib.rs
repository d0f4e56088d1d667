//! Implementation of the `sparsemirror` command-line front end: problem
//! ingestion, oracle/prox pairing validation, solver dispatch, and the
//! report/trace writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use sparse_mirror::market::read_matrix_market;
use sparse_mirror::oracles::{expectation, BlockSumProblem, MaxFormProblem, PageRankProblem};
use sparse_mirror::prox::ProxSetup;
use sparse_mirror::solver::{
    amplify, constrained_mirror_descent, mirror_descent, Averaging, BlockSumOracle,
    ConstrainedConfig, DoubleSampleOracle, ExactBlockSumOracle, ExactMaxFormOracle,
    ExactPageRankOracle, LinearObjectiveOracle, RunReport, SolverConfig, SumRandOracle,
    TwoSpikeOracle,
};
use sparse_mirror::sparse::SparseMatrixDual;

/// Oracle/prox pairings accepted per problem kind; anything else is
/// rejected before any file is read.
pub const PAIRING_TABLE: &str = "\
problem         oracles                                  prox setups
pagerank        double-sample, sum-rand, deterministic   entropy
maxform         two-spike, deterministic                 euclidean-free, euclidean-orthant, entropy
blocksum        two-spike, deterministic                 euclidean-free, euclidean-orthant
constrained-lp  two-spike, deterministic (constraint)    euclidean-free, euclidean-orthant";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProblemKind {
    Pagerank,
    Maxform,
    Blocksum,
    ConstrainedLp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleKind {
    DoubleSample,
    SumRand,
    TwoSpike,
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProxKind {
    Entropy,
    EuclideanFree,
    EuclideanOrthant,
}

impl OracleKind {
    fn name(&self) -> &'static str {
        match self {
            OracleKind::DoubleSample => "double-sample",
            OracleKind::SumRand => "sum-rand",
            OracleKind::TwoSpike => "two-spike",
            OracleKind::Deterministic => "deterministic",
        }
    }
}

impl ProblemKind {
    fn name(&self) -> &'static str {
        match self {
            ProblemKind::Pagerank => "pagerank",
            ProblemKind::Maxform => "maxform",
            ProblemKind::Blocksum => "blocksum",
            ProblemKind::ConstrainedLp => "constrained-lp",
        }
    }
}

impl ProxKind {
    fn name(&self) -> &'static str {
        match self {
            ProxKind::Entropy => "entropy",
            ProxKind::EuclideanFree => "euclidean-free",
            ProxKind::EuclideanOrthant => "euclidean-orthant",
        }
    }
}

/// Everything a `solve` invocation needs.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub problem: ProblemKind,
    pub matrix: PathBuf,
    pub offsets: Option<PathBuf>,
    pub objective: Option<PathBuf>,
    /// Equality constraints Cx = d (constrained-lp): each row is folded
    /// into the two inequalities ⟨C_k, x⟩ ≤ d_k and −⟨C_k, x⟩ ≤ −d_k.
    pub eq_matrix: Option<PathBuf>,
    pub eq_rhs: Option<PathBuf>,
    pub blocks: Option<PathBuf>,
    pub num_blocks: Option<usize>,
    pub oracle: OracleKind,
    pub prox: ProxKind,
    pub anchor: Option<PathBuf>,
    pub epsilon: f64,
    pub eps_f: Option<f64>,
    pub m_bound: Option<f64>,
    pub m_f: Option<f64>,
    pub radius: Option<f64>,
    pub horizon: Option<usize>,
    pub sigma: Option<f64>,
    pub amplify: bool,
    pub seed: u64,
    pub trace_every: Option<usize>,
}

/// Rendered outputs of one solve.
pub struct SolveOutcome {
    pub report: String,
    pub trace: String,
}

pub fn validate_pairing(problem: ProblemKind, oracle: OracleKind, prox: ProxKind) -> Result<()> {
    use OracleKind::*;
    use ProblemKind::*;
    use ProxKind::*;
    let ok = match problem {
        Pagerank => matches!(oracle, DoubleSample | SumRand | Deterministic) && prox == Entropy,
        Maxform => matches!(oracle, TwoSpike | Deterministic),
        Blocksum | ConstrainedLp => {
            matches!(oracle, TwoSpike | Deterministic)
                && matches!(prox, EuclideanFree | EuclideanOrthant)
        }
    };
    if !ok {
        bail!(
            "unsupported pairing: problem={} oracle={} prox={}\nsupported pairings:\n{}",
            problem.name(),
            oracle.name(),
            prox.name(),
            PAIRING_TABLE
        );
    }
    Ok(())
}

/// Reads a plain vector file: one number per line, '%'/'#' comments skipped.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().with_context(|| {
            format!("{}:{}: bad number {trimmed:?}", path.display(), lineno + 1)
        })?;
        out.push(value);
    }
    Ok(out)
}

fn load_matrix(path: &Path) -> Result<SparseMatrixDual> {
    read_matrix_market(path).with_context(|| format!("loading matrix {}", path.display()))
}

fn build_prox(spec: &RunSpec, n: usize) -> Result<ProxSetup> {
    Ok(match spec.prox {
        ProxKind::Entropy => ProxSetup::EntropySimplex { n },
        ProxKind::EuclideanFree => ProxSetup::EuclideanFree { n },
        ProxKind::EuclideanOrthant => {
            let anchor = match &spec.anchor {
                Some(path) => {
                    let v = read_vector(path)?;
                    if v.len() != n {
                        bail!("anchor length {} does not match dimension {n}", v.len());
                    }
                    v
                }
                None => vec![1.0; n],
            };
            ProxSetup::EuclideanOrthant { anchor }
        }
    })
}

fn load_offsets(offsets: Option<&Path>, m: usize) -> Result<Vec<f64>> {
    match offsets {
        Some(path) => {
            let b = read_vector(path)?;
            if b.len() != m {
                bail!("offsets length {} does not match row count {m}", b.len());
            }
            Ok(b)
        }
        None => Ok(vec![0.0; m]),
    }
}

fn load_blocks(blocks: Option<&Path>, num_blocks: Option<usize>, m: usize) -> Result<Vec<usize>> {
    if let Some(path) = blocks {
        return read_vector(path)?
            .into_iter()
            .map(|v| {
                if v.fract() != 0.0 || v < 1.0 {
                    Err(anyhow!("block boundary {v} is not a positive integer"))
                } else {
                    Ok(v as usize)
                }
            })
            .collect();
    }
    let r = num_blocks.unwrap_or(1).max(1);
    if m % r != 0 {
        bail!("--num-blocks {r} does not divide the row count {m}");
    }
    Ok((1..=r).map(|b| b * m / r).collect())
}

struct ReportWriter {
    lines: Vec<(&'static str, String)>,
}

impl ReportWriter {
    fn new(spec: &RunSpec, m: usize, n: usize) -> Self {
        let mut rw = Self { lines: Vec::new() };
        rw.push("problem", spec.problem.name());
        rw.push("matrix", spec.matrix.display());
        rw.push("oracle", spec.oracle.name());
        rw.push("prox", spec.prox.name());
        rw.push("rows", m);
        rw.push("cols", n);
        rw.push("epsilon", spec.epsilon);
        rw.push("seed", spec.seed);
        rw
    }

    fn push(&mut self, key: &'static str, value: impl std::fmt::Display) {
        self.lines.push((key, value.to_string()));
    }

    fn counters(&mut self, report: &RunReport) {
        self.push("horizon", report.horizon);
        self.push("oracle_calls", report.counters.oracle_calls);
        self.push("uniform_variates", report.counters.uniform_variates);
        self.push("touched_rows", report.counters.touched_rows);
        self.push("tree_path_updates", report.counters.tree_path_updates);
        self.push("max_touched_per_iter", report.counters.max_touched_per_iter);
        self.push(
            "max_path_updates_per_iter",
            report.counters.max_path_updates_per_iter,
        );
    }

    fn finish(mut self, started: Instant) -> String {
        self.push("wall_time_ms", started.elapsed().as_millis());
        let mut out = String::new();
        for (k, v) in self.lines {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}

fn render_trace(report: &RunReport) -> String {
    let mut out = String::from("iteration,f,g,touched_rows\n");
    for point in &report.trace {
        let g = point.constraint.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            point.iteration, point.objective, g, point.touched_rows
        );
    }
    out
}

fn solver_config(spec: &RunSpec, m_bound: f64) -> SolverConfig {
    SolverConfig {
        epsilon: spec.epsilon,
        m_bound,
        radius: spec.radius,
        horizon: spec.horizon,
        seed: spec.seed,
        stream: 0,
        averaging: Averaging::MeanAll,
        trace_every: spec.trace_every,
    }
}

/// Runs the trajectory (or the amplified batch), appends the result lines,
/// and renders the outcome. The reported trace is the winner's.
fn drive(
    spec: &RunSpec,
    mut rw: ReportWriter,
    run_one: &mut dyn FnMut(u64) -> sparse_mirror::Result<RunReport>,
    objective: &dyn Fn(&[f64]) -> f64,
    started: Instant,
) -> Result<SolveOutcome> {
    let (report, final_f) = if spec.amplify {
        let sigma = spec
            .sigma
            .ok_or_else(|| anyhow!("--amplify requires --sigma"))?;
        let mut runner = |stream: u64| run_one(stream);
        let out = amplify(sigma, &mut runner, objective)?;
        rw.push("sigma", sigma);
        rw.push("trajectories", out.trajectories);
        rw.push("winner", out.winner);
        let best = out.best_objective;
        let report = out
            .reports
            .into_iter()
            .nth(out.winner)
            .expect("winner exists");
        (report, best)
    } else {
        let report = run_one(0)?;
        let final_f = objective(report.output());
        (report, final_f)
    };
    rw.push("alpha", report.alpha);
    rw.push("final_f", final_f);
    rw.counters(&report);
    Ok(SolveOutcome {
        report: rw.finish(started),
        trace: render_trace(&report),
    })
}

/// Runs one solve and renders the report and trace files' contents.
pub fn run_solve(spec: &RunSpec) -> Result<SolveOutcome> {
    validate_pairing(spec.problem, spec.oracle, spec.prox)?;
    if spec.amplify && spec.problem == ProblemKind::ConstrainedLp {
        bail!("amplification is not available for constrained solves");
    }
    let started = Instant::now();
    let matrix = load_matrix(&spec.matrix)?;
    match spec.problem {
        ProblemKind::Pagerank => solve_pagerank(spec, matrix, started),
        ProblemKind::Maxform => solve_maxform(spec, matrix, started),
        ProblemKind::Blocksum => solve_blocksum(spec, matrix, started),
        ProblemKind::ConstrainedLp => solve_constrained(spec, matrix, started),
    }
}

fn solve_pagerank(
    spec: &RunSpec,
    matrix: SparseMatrixDual,
    started: Instant,
) -> Result<SolveOutcome> {
    let problem = PageRankProblem::new(matrix)?;
    let n = problem.dim();
    let m_bound = spec.m_bound.unwrap_or(match spec.oracle {
        OracleKind::SumRand => {
            let linf = problem.max_a_row_linf();
            n as f64 * linf * linf
        }
        _ => 2.0,
    });
    let prox = build_prox(spec, n)?;
    let config = solver_config(spec, m_bound);
    let objective = |x: &[f64]| problem.objective(x).expect("dimension checked");
    let mut run_one = |stream: u64| {
        let mut config = config.clone();
        config.stream = stream;
        match spec.oracle {
            OracleKind::DoubleSample => {
                let mut oracle = DoubleSampleOracle::new(&problem);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
            OracleKind::SumRand => {
                let mut oracle = SumRandOracle::new(&problem);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
            _ => {
                let mut oracle = ExactPageRankOracle::new(&problem);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
        }
    };
    let mut rw = ReportWriter::new(spec, n, n);
    rw.push("m_bound", m_bound);
    drive(spec, rw, &mut run_one, &objective, started)
}

fn solve_maxform(
    spec: &RunSpec,
    matrix: SparseMatrixDual,
    started: Instant,
) -> Result<SolveOutcome> {
    let (m, n) = (matrix.rows(), matrix.cols());
    let offsets = load_offsets(spec.offsets.as_deref(), m)?;
    let problem = MaxFormProblem::affine(matrix, offsets)?;
    let prox = build_prox(spec, n)?;
    let norm = prox.dual_norm();
    let m_bound = spec.m_bound.unwrap_or(match spec.oracle {
        OracleKind::TwoSpike => problem.two_spike_m_bound(),
        _ => problem.exact_m_bound(norm),
    });
    let config = solver_config(spec, m_bound);
    let objective = |x: &[f64]| problem.value(x).expect("dimension checked");
    let mut run_one = |stream: u64| {
        let mut config = config.clone();
        config.stream = stream;
        match spec.oracle {
            OracleKind::TwoSpike => {
                let mut oracle = TwoSpikeOracle::new(&problem, norm);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
            _ => {
                let mut oracle = ExactMaxFormOracle::new(&problem, norm);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
        }
    };
    let mut rw = ReportWriter::new(spec, m, n);
    rw.push("m_bound", m_bound);
    drive(spec, rw, &mut run_one, &objective, started)
}

fn solve_blocksum(
    spec: &RunSpec,
    matrix: SparseMatrixDual,
    started: Instant,
) -> Result<SolveOutcome> {
    let (m, n) = (matrix.rows(), matrix.cols());
    let offsets = load_offsets(spec.offsets.as_deref(), m)?;
    let ends = load_blocks(spec.blocks.as_deref(), spec.num_blocks, m)?;
    let inner = MaxFormProblem::affine(matrix, offsets)?;
    let problem = BlockSumProblem::new(inner, ends)?;
    let prox = build_prox(spec, n)?;
    let norm = prox.dual_norm();
    let m_bound = spec.m_bound.unwrap_or(match spec.oracle {
        OracleKind::TwoSpike => problem.inner().two_spike_m_bound(),
        _ => problem.inner().exact_m_bound(norm),
    });
    let config = solver_config(spec, m_bound);
    let objective = |x: &[f64]| problem.value(x).expect("dimension checked");
    let mut run_one = |stream: u64| {
        let mut config = config.clone();
        config.stream = stream;
        match spec.oracle {
            OracleKind::TwoSpike => {
                let mut oracle = BlockSumOracle::new(&problem, norm);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
            _ => {
                let mut oracle = ExactBlockSumOracle::new(&problem, norm);
                mirror_descent(&config, &prox, &mut oracle, Some(&objective))
            }
        }
    };
    let mut rw = ReportWriter::new(spec, m, n);
    rw.push("blocks", problem.blocks());
    rw.push("m_bound", m_bound);
    drive(spec, rw, &mut run_one, &objective, started)
}

/// Appends Cx = d as the row pairs (C_k, d_k), (−C_k, −d_k).
fn fold_equalities(
    matrix: SparseMatrixDual,
    offsets: Vec<f64>,
    eq_matrix: &Path,
    eq_rhs: Option<&Path>,
) -> Result<(SparseMatrixDual, Vec<f64>)> {
    let c = load_matrix(eq_matrix)?;
    if c.cols() != matrix.cols() {
        bail!(
            "equality matrix has {} columns, expected {}",
            c.cols(),
            matrix.cols()
        );
    }
    let d = match eq_rhs {
        Some(path) => {
            let d = read_vector(path)?;
            if d.len() != c.rows() {
                bail!(
                    "equality rhs length {} does not match {} rows",
                    d.len(),
                    c.rows()
                );
            }
            d
        }
        None => vec![0.0; c.rows()],
    };
    let m = matrix.rows();
    let mut triplets = matrix.triplets();
    for (i, j, v) in c.triplets() {
        triplets.push((m + i, j, v));
        triplets.push((m + c.rows() + i, j, -v));
    }
    let mut b = offsets;
    b.extend(&d);
    b.extend(d.iter().map(|v| -v));
    let folded = SparseMatrixDual::from_triplets(&triplets, m + 2 * c.rows(), matrix.cols())?;
    Ok((folded, b))
}

fn solve_constrained(
    spec: &RunSpec,
    matrix: SparseMatrixDual,
    started: Instant,
) -> Result<SolveOutcome> {
    let n = matrix.cols();
    let offsets = load_offsets(spec.offsets.as_deref(), matrix.rows())?;
    let (matrix, offsets) = match &spec.eq_matrix {
        Some(path) => fold_equalities(matrix, offsets, path, spec.eq_rhs.as_deref())?,
        None => (matrix, offsets),
    };
    let m = matrix.rows();
    let g_problem = MaxFormProblem::affine(matrix, offsets)?;
    let c = match &spec.objective {
        Some(path) => {
            let v = read_vector(path)?;
            if v.len() != n {
                bail!("objective length {} does not match dimension {n}", v.len());
            }
            v
        }
        None => vec![1.0; n],
    };
    let prox = build_prox(spec, n)?;
    let norm = prox.dual_norm();
    let mut f_oracle = LinearObjectiveOracle::new(&c, norm);
    let m_f = spec.m_f.unwrap_or_else(|| f_oracle.m_bound());
    let m_g = spec.m_bound.unwrap_or(match spec.oracle {
        OracleKind::TwoSpike => g_problem.two_spike_m_bound(),
        _ => g_problem.exact_m_bound(norm),
    });
    let config = ConstrainedConfig {
        eps_g: spec.epsilon,
        eps_f: spec.eps_f,
        m_f,
        m_g,
        radius: spec.radius,
        horizon: spec.horizon,
        seed: spec.seed,
        stream: 0,
        trace_every: spec.trace_every,
    };
    let objective = |x: &[f64]| c.iter().zip(x).map(|(ci, xi)| ci * xi).sum::<f64>();

    let report = match spec.oracle {
        OracleKind::TwoSpike => {
            let mut g_oracle = TwoSpikeOracle::new(&g_problem, norm);
            constrained_mirror_descent(
                &config,
                &prox,
                &mut f_oracle,
                &mut g_oracle,
                Some(&objective),
            )?
        }
        _ => {
            let mut g_oracle = ExactMaxFormOracle::new(&g_problem, norm);
            constrained_mirror_descent(
                &config,
                &prox,
                &mut f_oracle,
                &mut g_oracle,
                Some(&objective),
            )?
        }
    };

    let mut rw = ReportWriter::new(spec, m, n);
    rw.push("eps_f", config.eps_f());
    rw.push("m_f", m_f);
    rw.push("m_g", m_g);
    rw.push("h_f", config.step_f());
    rw.push("h_g", config.step_g());
    rw.push("final_f", objective(&report.x_bar));
    rw.push("final_g", g_problem.value(&report.x_bar)?);
    let counts = report.productive.expect("constrained run");
    rw.push("n_productive", counts.productive);
    rw.push("n_unproductive", counts.unproductive);
    rw.counters(&report);
    Ok(SolveOutcome {
        report: rw.finish(started),
        trace: render_trace(&report),
    })
}

/// Exhaustive-expectation unbiasedness check on a small instance. Returns
/// the max componentwise deviation between E[stochastic gradient] and the
/// exact (sub)gradient over the probe points, plus a printable summary.
pub fn run_verify(
    problem: ProblemKind,
    oracle: OracleKind,
    matrix_path: &Path,
    offsets: Option<&Path>,
    blocks: Option<&Path>,
    num_blocks: Option<usize>,
) -> Result<(f64, String)> {
    let matrix = load_matrix(matrix_path)?;
    let mut out = String::new();
    let mut worst = 0.0f64;
    match problem {
        ProblemKind::Pagerank => {
            if !matches!(
                oracle,
                OracleKind::DoubleSample | OracleKind::SumRand | OracleKind::Deterministic
            ) {
                bail!("pagerank supports double-sample, sum-rand, deterministic");
            }
            let pr = PageRankProblem::new(matrix)?;
            let n = pr.dim();
            for x in simplex_probe_points(n) {
                let expected = match oracle {
                    OracleKind::DoubleSample => expectation::double_sample(&pr, &x)?,
                    OracleKind::SumRand => expectation::sum_randomization(&pr, &x)?,
                    _ => dense(&pr.exact_subgradient(&x)?, n),
                };
                let exact = dense(&pr.exact_subgradient(&x)?, n);
                let dev = max_abs_diff(&expected, &exact);
                worst = worst.max(dev);
                let _ = writeln!(out, "point {x:?}: max deviation {dev:e}");
            }
        }
        ProblemKind::Maxform | ProblemKind::Blocksum => {
            if !matches!(oracle, OracleKind::TwoSpike | OracleKind::Deterministic) {
                bail!("max-form problems support two-spike, deterministic");
            }
            let (m, n) = (matrix.rows(), matrix.cols());
            let offsets = load_offsets(offsets, m)?;
            let inner = MaxFormProblem::affine(matrix, offsets)?;
            let ends = if problem == ProblemKind::Blocksum {
                Some(load_blocks(blocks, num_blocks, m)?)
            } else {
                None
            };
            for x in dense_probe_points(n) {
                let (expected, exact) = match (&ends, oracle) {
                    (None, OracleKind::TwoSpike) => (
                        expectation::two_spike(&inner, &x)?,
                        dense(&inner.exact_subgradient(&x)?, n),
                    ),
                    (None, _) => {
                        let e = dense(&inner.exact_subgradient(&x)?, n);
                        (e.clone(), e)
                    }
                    (Some(ends), OracleKind::TwoSpike) => {
                        let blocks = BlockSumProblem::new(inner.clone(), ends.clone())?;
                        (
                            expectation::blocksum(&blocks, &x)?,
                            dense(&blocks.exact_subgradient(&x)?, n),
                        )
                    }
                    (Some(ends), _) => {
                        let blocks = BlockSumProblem::new(inner.clone(), ends.clone())?;
                        let e = dense(&blocks.exact_subgradient(&x)?, n);
                        (e.clone(), e)
                    }
                };
                let dev = max_abs_diff(&expected, &exact);
                worst = worst.max(dev);
                let _ = writeln!(out, "point {x:?}: max deviation {dev:e}");
            }
        }
        ProblemKind::ConstrainedLp => {
            bail!("verify the constraint oracle via --problem maxform");
        }
    }
    let _ = writeln!(out, "max deviation: {worst:e}");
    Ok((worst, out))
}

fn dense(entries: &[(usize, f64)], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for &(i, v) in entries {
        out[i] = v;
    }
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn simplex_probe_points(n: usize) -> Vec<Vec<f64>> {
    let uniform = vec![1.0 / n as f64; n];
    let mut skew = vec![0.125 / (n.max(2) - 1) as f64; n];
    skew[0] = 0.875;
    let mut ramp: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
    let total: f64 = ramp.iter().sum();
    for v in &mut ramp {
        *v /= total;
    }
    vec![uniform, skew, ramp]
}

fn dense_probe_points(n: usize) -> Vec<Vec<f64>> {
    let zeros = vec![0.0; n];
    let alternating: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 0.5 } else { -0.5 })
        .collect();
    let ramp: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) / 4.0).collect();
    vec![zeros, alternating, ramp]
}
