//! Ablation and calibration baselines sharing the engine's operators.
//!
//! Parallel hill-climbing is the engine with the correlation machinery cut
//! out: each search accepts its offspring iff the objective strictly
//! improves. Everything else (population layout, mutation, step-size
//! adaptation, replacement counting, stream assignment) is identical, and
//! the lambda stream is still advanced each iteration so that a
//! hill-climbing run and a full run with the same seed see identical
//! mutation noise until their first diverging acceptance decision.
//!
//! Uniform random search is a sanity calibrator for the harness and the
//! statistics pipeline.

use crate::engine::{run_with_rule, AcceptanceRule, EngineError, NcsConfig, RunRecord};
use crate::objectives::ObjectiveSpec;
use crate::rng::{RngStream, INIT_STREAM};

/// Parallel hill-climbing: greedy fitness-only acceptance, strict
/// improvement (ties keep the incumbent).
pub fn phc_run(problem: &ObjectiveSpec, cfg: &NcsConfig) -> Result<RunRecord, EngineError> {
    run_with_rule(problem, cfg, AcceptanceRule::GreedyFitness)
}

/// Evaluate `budget` points drawn uniformly from the box and keep the best.
///
/// Samples come from the initialization stream, so two runs with the same
/// seed and budgets `b1 < b2` share their first `b1` samples.
pub fn random_search_run(
    problem: &ObjectiveSpec,
    budget: usize,
    seed: u64,
) -> Result<RunRecord, EngineError> {
    if budget == 0 {
        return Err(EngineError::InvalidConfig(
            "random search budget must be at least 1".into(),
        ));
    }
    let dim = problem.dim();
    let (lower, upper) = (problem.lower(), problem.upper());
    let mut rng = RngStream::new(seed, INIT_STREAM);

    let mut best_solution = Vec::new();
    let mut best_value = f64::INFINITY;
    let mut history = Vec::new();
    for i in 0..budget {
        let x: Vec<f64> = (0..dim)
            .map(|d| rng.uniform_in(lower[d], upper[d]))
            .collect();
        let value = problem.evaluate(&x);
        if !value.is_finite() {
            return Err(EngineError::NonFiniteObjective {
                iteration: i,
                rls: 0,
                value,
            });
        }
        if value < best_value {
            best_value = value;
            best_solution = x;
            history.push((i, best_value));
        }
    }

    Ok(RunRecord {
        final_population: vec![best_solution.clone()],
        final_values: vec![best_value],
        best_solution,
        best_value,
        history,
        trajectory: None,
        evaluations_used: budget,
    })
}
