//! `sparsemirror`: randomized mirror-descent solver for sparse problems.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sparse_mirror_cli::{
    run_solve, run_verify, OracleKind, ProblemKind, ProxKind, RunSpec, PAIRING_TABLE,
};

#[derive(Parser)]
#[command(name = "sparsemirror")]
#[command(about = "Randomized mirror descent with sparse stochastic oracles")]
#[command(long_about = None, after_long_help = PAIRING_TABLE)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Solve a problem instance and write a report (and optional trace)
    #[command(after_long_help = PAIRING_TABLE)]
    Solve {
        /// Problem kind
        #[arg(long, value_enum)]
        problem: ProblemKind,
        /// Matrix Market file: P (pagerank) or A (max-form / constraints)
        #[arg(long)]
        matrix: PathBuf,
        /// Per-row offsets b (one number per line); defaults to zeros
        #[arg(long)]
        offsets: Option<PathBuf>,
        /// Linear objective c for constrained-lp; defaults to all ones
        #[arg(long)]
        objective: Option<PathBuf>,
        /// Equality constraints Cx = d for constrained-lp (Matrix Market);
        /// folded into two inequalities per row
        #[arg(long)]
        eq_matrix: Option<PathBuf>,
        /// Right-hand side d for --eq-matrix; defaults to zeros
        #[arg(long)]
        eq_rhs: Option<PathBuf>,
        /// Block boundaries for blocksum (one exclusive row end per line)
        #[arg(long)]
        blocks: Option<PathBuf>,
        /// Split rows into this many equal blocks (blocksum)
        #[arg(long)]
        num_blocks: Option<usize>,
        /// Gradient oracle
        #[arg(long, value_enum)]
        oracle: OracleKind,
        /// Mirror-map setup
        #[arg(long, value_enum)]
        prox: ProxKind,
        /// Anchor vector for euclidean-orthant; defaults to all ones
        #[arg(long)]
        anchor: Option<PathBuf>,
        /// Target accuracy ε (ε_g for constrained-lp)
        #[arg(long)]
        eps: f64,
        /// Objective tolerance ε_f (constrained-lp); defaults to (M_f/M_g)·ε_g
        #[arg(long)]
        eps_f: Option<f64>,
        /// Gradient-norm bound M override (M_g for constrained-lp)
        #[arg(long)]
        m_bound: Option<f64>,
        /// Objective gradient bound M_f override (constrained-lp)
        #[arg(long)]
        m_f: Option<f64>,
        /// Prox-radius estimate R (√(ln n) is implied on the simplex)
        #[arg(long)]
        radius: Option<f64>,
        /// Explicit iteration budget N
        #[arg(long)]
        horizon: Option<usize>,
        /// Confidence level σ for --amplify
        #[arg(long)]
        sigma: Option<f64>,
        /// Run ⌈log₂(1/σ)⌉ trajectories and keep the best by exact f
        #[arg(long)]
        amplify: bool,
        /// RNG seed; falls back to $SPARSEMIRROR_SEED, then 0
        #[arg(long)]
        seed: Option<u64>,
        /// Trace stride; defaults to max(1, N/1000)
        #[arg(long)]
        trace_every: Option<usize>,
        /// Write the convergence trace (CSV) here
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check an oracle's unbiasedness by exhaustive expectation (n, m ≤ 8)
    VerifyOracle {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        oracle: OracleKind,
        #[arg(long)]
        offsets: Option<PathBuf>,
        #[arg(long)]
        blocks: Option<PathBuf>,
        #[arg(long)]
        num_blocks: Option<usize>,
    },
}

fn seed_fallback(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("SPARSEMIRROR_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Commands::Solve {
            problem,
            matrix,
            offsets,
            objective,
            eq_matrix,
            eq_rhs,
            blocks,
            num_blocks,
            oracle,
            prox,
            anchor,
            eps,
            eps_f,
            m_bound,
            m_f,
            radius,
            horizon,
            sigma,
            amplify,
            seed,
            trace_every,
            trace,
            report,
        } => {
            let spec = RunSpec {
                problem,
                matrix,
                offsets,
                objective,
                eq_matrix,
                eq_rhs,
                blocks,
                num_blocks,
                oracle,
                prox,
                anchor,
                epsilon: eps,
                eps_f,
                m_bound,
                m_f,
                radius,
                horizon,
                sigma,
                amplify,
                seed: seed_fallback(seed),
                trace_every,
            };
            let outcome = run_solve(&spec)?;
            match report {
                Some(path) => fs::write(&path, &outcome.report)?,
                None => print!("{}", outcome.report),
            }
            if let Some(path) = trace {
                fs::write(&path, &outcome.trace)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Commands::VerifyOracle {
            problem,
            matrix,
            oracle,
            offsets,
            blocks,
            num_blocks,
        } => {
            let (worst, text) = run_verify(
                problem,
                oracle,
                &matrix,
                offsets.as_deref(),
                blocks.as_deref(),
                num_blocks,
            )?;
            print!("{text}");
            if worst <= 1e-12 {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("unbiasedness check failed: max deviation {worst:e} > 1e-12");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}
