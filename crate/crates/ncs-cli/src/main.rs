//! `ncs` — experiment harness for negatively correlated search.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ncs_cli::config::{parse_config, Algorithm, PartialConfig};
use ncs_cli::plot::{emit_trajectory_svg, read_trajectory_csv};
use ncs_cli::report::{
    friedman_from_matrix_csv, pairwise_report, read_problem_group, read_results_csv,
    render_csv_report, render_text_report, render_top_k_report,
};
use ncs_cli::runner::{run_experiment, write_antenna_artifacts};
use ncs_core::antenna::EncodingMode;
use ncs_core::engine::BoundPolicy;
use ncs_core::objectives::{load_transform_file, Builtin, ObjectiveSpec};
use ncs_core::RunRecord;

#[derive(Parser)]
#[command(
    name = "ncs",
    version,
    about = "Negatively correlated search: benchmark runs, antenna synthesis, statistics, and trajectory plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the experiment subcommands; every flag overrides the
/// matching config-file key.
#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optimizer: ncs, phc, or random.
    #[arg(long)]
    algorithm: Option<String>,
    /// Problem name (sphere, rosenbrock, ackley, rastrigin, griewank,
    /// schwefel, weierstrass, or antenna).
    #[arg(long)]
    problem: Option<String>,
    /// Problem dimension (benchmark problems).
    #[arg(long)]
    dim: Option<usize>,
    /// Shift/rotation data file for benchmark problems.
    #[arg(long)]
    transform_file: Option<PathBuf>,
    /// Objective evaluations per run.
    #[arg(long)]
    budget: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Population size.
    #[arg(long)]
    n: Option<usize>,
    /// Initial step size (default: one tenth of the widest range).
    #[arg(long)]
    sigma0: Option<f64>,
    /// Lower step-size clamp (default: 1e-10 times the widest range).
    #[arg(long)]
    sigma_min: Option<f64>,
    /// Upper step-size clamp (default: the widest range).
    #[arg(long)]
    sigma_max: Option<f64>,
    /// Step-size adaptation factor in (0, 1).
    #[arg(long)]
    r: Option<f64>,
    /// Iterations between step-size adaptations.
    #[arg(long)]
    epoch: Option<usize>,
    /// Out-of-bounds repair: reflect or clamp.
    #[arg(long)]
    bound_policy: Option<String>,
    /// Log per-iteration retained solutions.
    #[arg(long)]
    trajectory: bool,
    /// Output directory (default: $NCS_OUT_DIR or ./results).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for multi-run experiments (0 = auto).
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonOpts {
    fn to_partial(&self) -> anyhow::Result<PartialConfig> {
        let mut partial = PartialConfig {
            problem_name: self.problem.clone(),
            dim: self.dim,
            transform_file: self.transform_file.clone(),
            budget: self.budget,
            seed: self.seed,
            n: self.n,
            sigma0: self.sigma0,
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            r: self.r,
            epoch: self.epoch,
            trajectory: if self.trajectory { Some(true) } else { None },
            out_dir: self.out_dir.clone(),
            threads: self.threads,
            ..Default::default()
        };
        if let Some(a) = &self.algorithm {
            partial.algorithm = Some(Algorithm::from_name(a)?);
        }
        if let Some(bp) = &self.bound_policy {
            partial.bound_policy = Some(BoundPolicy::from_name(bp)?);
        }
        Ok(partial)
    }

    /// Flags over file over nothing.
    fn merged(&self) -> anyhow::Result<PartialConfig> {
        let flags = self.to_partial()?;
        Ok(match &self.config {
            Some(path) => flags.or(parse_config(path)?),
            None => flags,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run and print the outcome.
    Run {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Execute a seeded batch of runs; write per-run CSV and a JSON summary.
    Bench {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of independent runs.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Antenna-array synthesis experiment with pattern and layout export.
    Antenna {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of independent runs.
        #[arg(long)]
        runs: Option<usize>,
        /// Array size (number of elements).
        #[arg(long)]
        elements: Option<usize>,
        /// Encoding: po (position only) or pp (position + phase).
        #[arg(long)]
        mode: Option<String>,
    },
    /// Compare result CSV files with rank-sum tests (text + CSV report).
    Stats {
        /// Result files (one algorithm each, schema run,seed,final_error,evaluations).
        files: Vec<PathBuf>,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Problems-by-algorithms matrix CSV for a Friedman ranking.
        #[arg(long)]
        friedman_matrix: Option<PathBuf>,
        /// Multi-problem Top-K input, repeatable: `problem=fileA,fileB,...`
        /// (same algorithm order in every group).
        #[arg(long = "group")]
        groups: Vec<String>,
        /// Where to write the CSV report (default: stdout text only).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render a logged 2-D trajectory as an SVG contour plot.
    TrajPlot {
        /// Trajectory CSV produced by a run with --trajectory.
        #[arg(long)]
        trajectory: PathBuf,
        /// Problem the trajectory was recorded on.
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Shift/rotation data file, if the run used one.
        #[arg(long)]
        transform_file: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run { common } => {
            let mut partial = common.merged()?;
            partial.runs = Some(1);
            let cfg = partial.resolve()?;
            let output = run_experiment(&cfg)?;
            let outcome = &output.outcomes[0];
            println!(
                "{} on {}: final_error={} best_value={} evaluations={}",
                cfg.algorithm.name(),
                cfg.problem.label(),
                outcome.final_error,
                outcome.record.best_value,
                outcome.evaluations
            );
            println!("results: {}", output.results_csv.display());
            for t in &output.trajectory_files {
                println!("trajectory: {}", t.display());
            }
        }
        Command::Bench { common, runs } => {
            let mut partial = common.merged()?;
            partial.runs = runs.or(partial.runs);
            let cfg = partial.resolve()?;
            let output = run_experiment(&cfg)?;
            println!(
                "{} on {}: {} runs, mean_final_error={} std={}",
                cfg.algorithm.name(),
                cfg.problem.label(),
                cfg.runs,
                output.summary.mean_final_error,
                output.summary.std_final_error
            );
            println!("results: {}", output.results_csv.display());
            println!("summary: {}", output.summary_json.display());
        }
        Command::Antenna {
            common,
            runs,
            elements,
            mode,
        } => {
            let mut partial = common.merged()?;
            partial.problem_name = Some("antenna".into());
            partial.runs = runs.or(partial.runs);
            partial.elements = elements.or(partial.elements);
            if let Some(m) = mode {
                partial.mode = Some(EncodingMode::from_name(&m)?);
            }
            if partial.algorithm.is_none() {
                partial.algorithm = Some(Algorithm::Ncs);
            }
            let cfg = partial.resolve()?;
            let output = run_experiment(&cfg)?;
            let (layout_path, pattern_path) =
                write_antenna_artifacts(&cfg, &output.outcomes, &cfg.out_dir)?;
            println!(
                "{} on {}: {} runs, mean PSLL = {} dB, best = {} dB",
                cfg.algorithm.name(),
                cfg.problem.label(),
                cfg.runs,
                output.summary.mean_final_error,
                output.summary.best_final_error
            );
            println!("results: {}", output.results_csv.display());
            println!("layout:  {}", layout_path.display());
            println!("pattern: {}", pattern_path.display());
        }
        Command::Stats {
            files,
            alpha,
            friedman_matrix,
            groups,
            out_dir,
        } => {
            anyhow::ensure!(
                files.len() >= 2 || friedman_matrix.is_some() || !groups.is_empty(),
                "need at least two result files, --group entries, or --friedman-matrix"
            );
            let samples: Vec<_> = files
                .iter()
                .map(read_results_csv)
                .collect::<Result<_, _>>()?;
            let pairs = pairwise_report(&samples, alpha)?;
            let friedman_result = friedman_matrix
                .map(friedman_from_matrix_csv)
                .transpose()?;
            let mut text = render_text_report(
                &samples,
                &pairs,
                alpha,
                friedman_result.as_ref().map(|(l, r)| (l.as_slice(), r)),
            );
            if !groups.is_empty() {
                let parsed: Vec<_> = groups
                    .iter()
                    .map(|g| read_problem_group(g))
                    .collect::<Result<_, _>>()?;
                text.push_str(&render_top_k_report(&parsed, alpha)?);
            }
            print!("{text}");
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                let csv_path = dir.join("comparison.csv");
                std::fs::write(&csv_path, render_csv_report(&pairs))?;
                let text_path = dir.join("comparison.txt");
                std::fs::write(&text_path, &text)?;
                println!("report: {}", csv_path.display());
            }
        }
        Command::TrajPlot {
            trajectory,
            problem,
            dim,
            transform_file,
            out,
        } => {
            let base = Builtin::from_name(&problem)?;
            let mut spec = ObjectiveSpec::builtin(base, dim);
            if let Some(path) = transform_file {
                let (shift, rotation) = load_transform_file(path, dim)?;
                spec = spec.with_shift(shift)?.with_rotation(rotation)?;
            }
            let points = read_trajectory_csv(&trajectory)
                .with_context(|| format!("cannot parse {}", trajectory.display()))?;
            anyhow::ensure!(!points.is_empty(), "trajectory file has no rows");
            let best = points
                .iter()
                .min_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
                .unwrap()
                .clone();
            let record = RunRecord {
                best_solution: best.position.clone(),
                best_value: best.value,
                history: Vec::new(),
                evaluations_used: 0,
                final_population: Vec::new(),
                final_values: Vec::new(),
                trajectory: Some(points),
            };
            emit_trajectory_svg(&record, &spec, &out)?;
            println!("plot: {}", out.display());
        }
    }
    Ok(())
}
