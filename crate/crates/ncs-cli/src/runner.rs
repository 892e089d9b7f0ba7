//! Seeded multi-run execution and result persistence.
//!
//! A bench experiment executes `runs` independent runs with seeds
//! `base_seed + run_index`, writes one CSV row per run
//! (`run,seed,final_error,evaluations`), and a JSON summary holding the
//! mean and standard deviation of the final errors (sample standard
//! deviation, 0 for a single run). Floats are printed in Rust's shortest
//! round-trip form, so identical configurations produce byte-identical
//! files and the summary is recomputable from the CSV exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ncs_core::antenna::{radiation_pattern, AngleGrid, SusaaEncoding};
use ncs_core::baselines::{phc_run, random_search_run};
use ncs_core::engine::ncs_run;
use ncs_core::objectives::ObjectiveSpec;
use ncs_core::RunRecord;
use serde::Serialize;

use crate::config::{Algorithm, ExperimentConfig, ProblemSelection};

/// One finished run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_index: usize,
    pub seed: u64,
    /// `f(best) - optimum` when the optimum is known, raw `f(best)`
    /// otherwise.
    pub final_error: f64,
    pub evaluations: usize,
    pub record: RunRecord,
}

/// Aggregate statistics over the runs of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub algorithm: String,
    pub problem: String,
    pub dim: usize,
    pub runs: usize,
    pub budget: usize,
    pub base_seed: u64,
    pub mean_final_error: f64,
    pub std_final_error: f64,
    pub best_final_error: f64,
    pub worst_final_error: f64,
}

/// Paths and data produced by [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentOutput {
    pub outcomes: Vec<RunOutcome>,
    pub summary: Summary,
    pub results_csv: PathBuf,
    pub summary_json: PathBuf,
    pub trajectory_files: Vec<PathBuf>,
}

/// Execute one run with the given seed.
pub fn execute_single(
    cfg: &ExperimentConfig,
    problem: &ObjectiveSpec,
    run_index: usize,
) -> anyhow::Result<RunOutcome> {
    let seed = cfg.base_seed.wrapping_add(run_index as u64);
    let record = match cfg.algorithm {
        Algorithm::Ncs => ncs_run(problem, &cfg.engine_config(problem, seed)?),
        Algorithm::Phc => phc_run(problem, &cfg.engine_config(problem, seed)?),
        Algorithm::Random => random_search_run(problem, cfg.budget, seed),
    }
    .with_context(|| format!("run {run_index} (seed {seed}) failed"))?;
    Ok(RunOutcome {
        run_index,
        seed,
        final_error: problem.error_of(record.best_value),
        evaluations: record.evaluations_used,
        record,
    })
}

/// Execute every run of the experiment, in run-index order. Runs are
/// independent and are spread over worker threads when more than one is
/// available.
pub fn execute_runs(
    cfg: &ExperimentConfig,
    problem: &ObjectiveSpec,
) -> anyhow::Result<Vec<RunOutcome>> {
    let workers = if cfg.threads == 0 {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    } else {
        cfg.threads
    }
    .min(cfg.runs)
    .max(1);

    if workers == 1 {
        return (0..cfg.runs)
            .map(|i| execute_single(cfg, problem, i))
            .collect();
    }

    let mut slots: Vec<Option<anyhow::Result<RunOutcome>>> =
        (0..cfg.runs).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots_mutex = std::sync::Mutex::new(&mut slots);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= cfg.runs {
                    break;
                }
                let outcome = execute_single(cfg, problem, i);
                slots_mutex.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| slot.unwrap_or_else(|| panic!("run {i} was never executed")))
        .collect()
}

/// Sample mean and sample standard deviation (0 for a single value).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(cfg: &ExperimentConfig, problem: &ObjectiveSpec, outcomes: &[RunOutcome]) -> Summary {
    let errors: Vec<f64> = outcomes.iter().map(|o| o.final_error).collect();
    let (mean, std) = mean_and_std(&errors);
    Summary {
        algorithm: cfg.algorithm.name().to_string(),
        problem: cfg.problem.label(),
        dim: problem.dim(),
        runs: cfg.runs,
        budget: cfg.budget,
        base_seed: cfg.base_seed,
        mean_final_error: mean,
        std_final_error: std,
        best_final_error: errors.iter().cloned().fold(f64::INFINITY, f64::min),
        worst_final_error: errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Render the per-run results CSV (`run,seed,final_error,evaluations`).
pub fn results_csv(outcomes: &[RunOutcome]) -> String {
    let mut out = String::from("run,seed,final_error,evaluations\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{},{}\n",
            o.run_index, o.seed, o.final_error, o.evaluations
        ));
    }
    out
}

/// Render one run's trajectory CSV (`iteration,rls,f,x1,...,xD`).
pub fn trajectory_csv(record: &RunRecord, dim: usize) -> Option<String> {
    let log = record.trajectory.as_ref()?;
    let mut out = String::from("iteration,rls,f");
    for d in 1..=dim {
        out.push_str(&format!(",x{d}"));
    }
    out.push('\n');
    for point in log {
        out.push_str(&format!("{},{},{}", point.iteration, point.rls, point.value));
        for v in &point.position {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    Some(out)
}

/// Execute all runs and persist results under the configured output
/// directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentOutput> {
    let problem = cfg.objective()?;
    let outcomes = execute_runs(cfg, &problem)?;
    let summary = summarize(cfg, &problem, &outcomes);

    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create output directory {}", cfg.out_dir.display()))?;
    let stem = format!("{}_{}", summary.algorithm, summary.problem);

    let results_path = cfg.out_dir.join(format!("{stem}_results.csv"));
    fs::write(&results_path, results_csv(&outcomes))
        .with_context(|| format!("cannot write {}", results_path.display()))?;

    let summary_path = cfg.out_dir.join(format!("{stem}_summary.json"));
    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(&summary_path, json)
        .with_context(|| format!("cannot write {}", summary_path.display()))?;

    let mut trajectory_files = Vec::new();
    if cfg.trajectory {
        for outcome in &outcomes {
            if let Some(csv) = trajectory_csv(&outcome.record, problem.dim()) {
                let path = cfg
                    .out_dir
                    .join(format!("{stem}_trajectory_run{}.csv", outcome.run_index));
                fs::write(&path, csv)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                trajectory_files.push(path);
            }
        }
    }

    Ok(ExperimentOutput {
        outcomes,
        summary,
        results_csv: results_path,
        summary_json: summary_path,
        trajectory_files,
    })
}

/// Persist the antenna-specific artifacts for the best run of an antenna
/// experiment: the decoded layout (`position phase` per line) and the
/// normalized radiation pattern (`theta_deg db` per line).
pub fn write_antenna_artifacts(
    cfg: &ExperimentConfig,
    outcomes: &[RunOutcome],
    out_dir: &Path,
) -> anyhow::Result<(PathBuf, PathBuf)> {
    let ProblemSelection::Antenna { elements, mode } = cfg.problem else {
        anyhow::bail!("not an antenna experiment");
    };
    let best = outcomes
        .iter()
        .min_by(|a, b| a.final_error.partial_cmp(&b.final_error).unwrap())
        .context("no runs to export")?;

    let encoding = SusaaEncoding::new(mode, elements, best.record.best_solution.clone())?;
    let layout = encoding.decode()?;
    let grid = AngleGrid::standard();
    let pattern = radiation_pattern(&layout, &grid)?;

    let stem = cfg.problem.label();
    let layout_path = out_dir.join(format!("{stem}_layout.txt"));
    let mut layout_text = String::new();
    for (x, phi) in layout.positions.iter().zip(&layout.phases) {
        layout_text.push_str(&format!("{x} {phi}\n"));
    }
    fs::write(&layout_path, layout_text)?;

    let pattern_path = out_dir.join(format!("{stem}_pattern.txt"));
    let mut f = fs::File::create(&pattern_path)?;
    for (theta, db) in pattern {
        writeln!(f, "{theta} {db}")?;
    }
    Ok((layout_path, pattern_path))
}
