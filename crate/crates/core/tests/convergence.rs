//! Statistical and desk-scale convergence checks of the solver drivers.

use sparse_mirror::oracles::PageRankProblem;
use sparse_mirror::prox::ProxSetup;
use sparse_mirror::solver::{mirror_descent, DoubleSampleOracle, SolverConfig, SumRandOracle};
use sparse_mirror::sparse::SparseMatrixDual;

fn cycle2() -> PageRankProblem {
    let p = SparseMatrixDual::from_triplets(&[(0, 1, 1.0), (1, 0, 1.0)], 2, 2).unwrap();
    PageRankProblem::new(p).unwrap()
}

/// Example-3 rate: the mean of f(x̄^N) over 20 seeds stays below
/// M̃·√(2·ln n/N) at several horizons (f* = 0 on the 2-cycle).
#[test]
fn empirical_rate_on_2cycle() {
    let problem = cycle2();
    let prox = ProxSetup::EntropySimplex { n: 2 };
    let m_bound = 2.0;
    for horizon in [100usize, 1_000, 10_000] {
        let mut total = 0.0;
        for seed in 0..20 {
            let mut config = SolverConfig::new(0.05, m_bound, seed);
            config.horizon = Some(horizon);
            let mut oracle = DoubleSampleOracle::new(&problem);
            let report = mirror_descent(&config, &prox, &mut oracle, None).unwrap();
            total += problem.objective(&report.x_bar).unwrap();
        }
        let mean = total / 20.0;
        let bound = m_bound * (2.0 * 2.0f64.ln() / horizon as f64).sqrt();
        assert!(
            mean <= bound,
            "rate violated at N = {horizon}: mean f = {mean} > {bound}"
        );
    }
}

/// Desk-scale target-accuracy run at ε = 0.02 with the derived budget.
#[test]
fn pagerank_2cycle_desk_run() {
    let problem = cycle2();
    let prox = ProxSetup::EntropySimplex { n: 2 };
    let eps = 0.02;
    let config = SolverConfig::new(eps, 2.0, 11);
    let mut oracle = DoubleSampleOracle::new(&problem);
    let report = mirror_descent(&config, &prox, &mut oracle, None).unwrap();
    let expected = (2.0 * 4.0 * 2.0f64.ln() / (eps * eps)).ceil() as usize;
    assert_eq!(report.horizon, expected);
    let f = problem.objective(&report.x_bar).unwrap();
    assert!(f <= eps, "f(x̄) = {f} > {eps}");
}

/// The sum-randomization oracle also drives the solver to the target on a
/// small instance, despite its larger sample bound.
#[test]
fn pagerank_sum_randomization_converges() {
    let problem = cycle2();
    let prox = ProxSetup::EntropySimplex { n: 2 };
    let n = problem.dim() as f64;
    let linf = problem.max_a_row_linf();
    let eps = 0.05;
    let mut successes = 0;
    for seed in 0..10 {
        let config = SolverConfig::new(eps, n * linf * linf, seed);
        let mut oracle = SumRandOracle::new(&problem);
        let report = mirror_descent(&config, &prox, &mut oracle, None).unwrap();
        if problem.objective(&report.x_bar).unwrap() <= eps {
            successes += 1;
        }
    }
    assert!(successes >= 9, "{successes}/10 under eps");
}

/// The ∞-form of the 2-cycle problem (min max_k ⟨A_k, x⟩ over the simplex
/// with A = Pᵀ − I) solved by the two-spike oracle under the entropy prox,
/// driving the simplex argmax tracker end to end. f* = 0 at (½, ½).
#[test]
fn maxform_infinity_norm_on_simplex() {
    use sparse_mirror::oracles::MaxFormProblem;
    use sparse_mirror::prox::DualNorm;
    use sparse_mirror::solver::TwoSpikeOracle;

    let a = SparseMatrixDual::from_dense(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    let problem = MaxFormProblem::affine(a, vec![0.0, 0.0]).unwrap();
    let prox = ProxSetup::EntropySimplex { n: 2 };
    let eps = 0.05;
    let mut successes = 0;
    for seed in 0..10 {
        let config = SolverConfig::new(eps, problem.two_spike_m_bound(), seed);
        let mut oracle = TwoSpikeOracle::new(&problem, DualNorm::LInf);
        let report = mirror_descent(&config, &prox, &mut oracle, None).unwrap();
        // max_k ⟨A_k, x⟩ = |x₁ − x₂| ≥ 0 here, so the value is the gap to f*.
        let value = problem.value(&report.x_bar).unwrap();
        if value <= eps {
            successes += 1;
        }
        assert!(report.counters.touched_rows > 0);
    }
    assert!(successes >= 9, "{successes}/10 runs reached the target");
}

/// Two trace-enabled runs of the same configuration agree, different seeds
/// diverge (trajectory identity sanity).
#[test]
fn seeds_identify_trajectories() {
    let problem = cycle2();
    let prox = ProxSetup::EntropySimplex { n: 2 };
    let run = |seed: u64| {
        let mut config = SolverConfig::new(0.1, 2.0, seed);
        config.horizon = Some(500);
        let mut oracle = DoubleSampleOracle::new(&problem);
        mirror_descent(&config, &prox, &mut oracle, None).unwrap()
    };
    let a = run(3);
    let b = run(3);
    let c = run(4);
    assert_eq!(a.x_bar, b.x_bar);
    assert_eq!(a.counters, b.counters);
    assert_ne!(a.x_bar, c.x_bar);
}
