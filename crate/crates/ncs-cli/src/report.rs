//! Comparison reports over result CSV files.
//!
//! Each input file is one algorithm's per-run results
//! (`run,seed,final_error,evaluations`); the report carries per-file
//! summary statistics and all pairwise two-sided rank-sum verdicts, plus an
//! optional Friedman ranking over a problems-by-algorithms matrix file
//! (CSV: header `problem,<label>,...`, one row per problem).

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use ncs_core::stats::{
    friedman, pairwise_outcomes, top_k_table, wilcoxon_rank_sum, FriedmanResult, Verdict,
};

use crate::runner::mean_and_std;

/// One algorithm's sample, labeled for the report.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub label: String,
    pub values: Vec<f64>,
}

/// Read the `final_error` column of a results CSV.
pub fn read_results_csv(path: impl AsRef<Path>) -> anyhow::Result<LabeledSample> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read results file {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("results file is empty")?;
    let error_col = header
        .split(',')
        .position(|c| c.trim() == "final_error")
        .with_context(|| format!("{}: no `final_error` column", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let field = line
            .split(',')
            .nth(error_col)
            .with_context(|| format!("{}: row {} is short", path.display(), i + 2))?;
        values.push(
            field
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{}: row {}: bad number `{field}`", path.display(), i + 2))?,
        );
    }
    anyhow::ensure!(!values.is_empty(), "{}: no data rows", path.display());
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(LabeledSample { label, values })
}

/// Pairwise comparison row.
#[derive(Debug, Clone)]
pub struct PairRow {
    pub a: String,
    pub b: String,
    pub p_value: f64,
    pub verdict: Verdict,
}

/// All pairwise two-sided rank-sum comparisons at level `alpha`.
pub fn pairwise_report(samples: &[LabeledSample], alpha: f64) -> anyhow::Result<Vec<PairRow>> {
    let mut rows = Vec::new();
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let (p_value, verdict) =
                wilcoxon_rank_sum(&samples[i].values, &samples[j].values, alpha)?;
            rows.push(PairRow {
                a: samples[i].label.clone(),
                b: samples[j].label.clone(),
                p_value,
                verdict,
            });
        }
    }
    Ok(rows)
}

fn verdict_text(v: Verdict, a: &str, b: &str) -> String {
    match v {
        Verdict::ABetter => format!("{a} better"),
        Verdict::BBetter => format!("{b} better"),
        Verdict::NoDifference => "no difference".to_string(),
    }
}

/// Human-readable comparison report.
pub fn render_text_report(
    samples: &[LabeledSample],
    pairs: &[PairRow],
    alpha: f64,
    friedman_result: Option<(&[String], &FriedmanResult)>,
) -> String {
    let mut out = String::new();
    writeln!(out, "samples (final errors, lower is better):").unwrap();
    for s in samples {
        let (mean, std) = mean_and_std(&s.values);
        let mut sorted = s.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
        };
        writeln!(
            out,
            "  {:<24} n={:<3} mean={:<12.4e} std={:<12.4e} median={:.4e}",
            s.label,
            s.values.len(),
            mean,
            std,
            median
        )
        .unwrap();
    }
    writeln!(out, "\npairwise two-sided rank-sum tests (alpha = {alpha}):").unwrap();
    for row in pairs {
        writeln!(
            out,
            "  {:<24} vs {:<24} p={:<10.4e} -> {}",
            row.a,
            row.b,
            row.p_value,
            verdict_text(row.verdict, &row.a, &row.b)
        )
        .unwrap();
    }
    if let Some((labels, fr)) = friedman_result {
        writeln!(
            out,
            "\nfriedman test: statistic={:.4}, p={:.4e}",
            fr.statistic, fr.p_value
        )
        .unwrap();
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&i, &j| fr.avg_ranks[i].partial_cmp(&fr.avg_ranks[j]).unwrap());
        for idx in order {
            writeln!(out, "  {:<24} avg rank {:.3}", labels[idx], fr.avg_ranks[idx]).unwrap();
        }
    }
    out
}

/// Machine-readable comparison report (`a,b,p_value,verdict`).
pub fn render_csv_report(pairs: &[PairRow]) -> String {
    let mut out = String::from("a,b,p_value,verdict\n");
    for row in pairs {
        let verdict = match row.verdict {
            Verdict::ABetter => "a_better",
            Verdict::BBetter => "b_better",
            Verdict::NoDifference => "no_difference",
        };
        out.push_str(&format!("{},{},{},{}\n", row.a, row.b, row.p_value, verdict));
    }
    out
}

/// One problem's result files for a multi-problem comparison, as given by
/// a `--group problem=fileA,fileB,...` flag.
#[derive(Debug, Clone)]
pub struct ProblemGroup {
    pub problem: String,
    pub samples: Vec<LabeledSample>,
}

/// Parse `problem=fileA,fileB,...` and load each file.
pub fn read_problem_group(arg: &str) -> anyhow::Result<ProblemGroup> {
    let (problem, files) = arg
        .split_once('=')
        .with_context(|| format!("group `{arg}` is not `problem=fileA,fileB,...`"))?;
    let samples: Vec<LabeledSample> = files
        .split(',')
        .map(|f| read_results_csv(f.trim()))
        .collect::<Result<_, _>>()?;
    anyhow::ensure!(
        samples.len() >= 2,
        "group `{problem}` needs at least two result files"
    );
    Ok(ProblemGroup {
        problem: problem.trim().to_string(),
        samples,
    })
}

/// Top-K counts over several problems: for each problem, all pairwise
/// rank-sum verdicts order the algorithms by significant wins; the table
/// counts, per algorithm and K, the problems where it is among the K best.
/// Algorithms are aligned across groups by position.
pub fn render_top_k_report(groups: &[ProblemGroup], alpha: f64) -> anyhow::Result<String> {
    anyhow::ensure!(groups.len() >= 2, "Top-K needs at least two problems");
    let k = groups[0].samples.len();
    for g in groups {
        anyhow::ensure!(
            g.samples.len() == k,
            "group `{}` has {} algorithms, expected {}",
            g.problem,
            g.samples.len(),
            k
        );
    }
    let per_problem: Vec<_> = groups
        .iter()
        .map(|g| {
            let values: Vec<Vec<f64>> = g.samples.iter().map(|s| s.values.clone()).collect();
            pairwise_outcomes(&values, alpha)
        })
        .collect::<Result<_, _>>()?;
    let counts = top_k_table(&per_problem);

    let mut out = String::new();
    writeln!(
        out,
        "\ntop-k over {} problems (alpha = {alpha}; entry = problems where the algorithm ranks among the k best):",
        groups.len()
    )
    .unwrap();
    write!(out, "  {:<24}", "algorithm").unwrap();
    for kk in 1..=k {
        write!(out, " k={kk:<4}").unwrap();
    }
    writeln!(out).unwrap();
    for (i, row) in counts.iter().enumerate() {
        write!(out, "  {:<24}", groups[0].samples[i].label).unwrap();
        for c in row {
            write!(out, " {c:<6}").unwrap();
        }
        writeln!(out).unwrap();
    }
    Ok(out)
}

/// Read a problems-by-algorithms matrix CSV (header `problem,<label>...`)
/// and run the Friedman test on it.
pub fn friedman_from_matrix_csv(
    path: impl AsRef<Path>,
) -> anyhow::Result<(Vec<String>, FriedmanResult)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read matrix file {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("matrix file is empty")?;
    let labels: Vec<String> = header
        .split(',')
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    anyhow::ensure!(labels.len() >= 2, "matrix needs at least two algorithms");

    let mut matrix = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(
            fields.len() == labels.len() + 1,
            "{}: row {} has {} fields, expected {}",
            path.display(),
            i + 2,
            fields.len(),
            labels.len() + 1
        );
        let row: Result<Vec<f64>, _> = fields[1..].iter().map(|f| f.trim().parse()).collect();
        matrix.push(row.with_context(|| format!("{}: row {}: bad number", path.display(), i + 2))?);
    }
    let result = friedman(&matrix)?;
    Ok((labels, result))
}
