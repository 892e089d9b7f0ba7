//! Nonparametric comparison toolkit: two-sample Wilcoxon rank-sum test,
//! Friedman test with average ranks, and Top-K counting over pairwise
//! verdicts.
//!
//! Samples are losses: smaller values are better. The rank-sum test uses
//! mid-ranks for ties, an exact permutation null when the pooled size is at
//! most [`EXACT_ENUMERATION_LIMIT`], and a tie-corrected normal
//! approximation with continuity correction above it.

use thiserror::Error;

/// Pooled sample size up to which the rank-sum null distribution is
/// enumerated exactly.
pub const EXACT_ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{what}: need at least {min} values, got {got}")]
    TooFewValues {
        what: String,
        min: usize,
        got: usize,
    },
    #[error("{what} contains a non-finite value")]
    NonFinite { what: String },
    #[error("matrix rows have unequal lengths ({first} vs {offending})")]
    RaggedMatrix { first: usize, offending: usize },
}

/// Outcome of a two-sample comparison on losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `a`'s values are significantly smaller.
    ABetter,
    /// `b`'s values are significantly smaller.
    BBetter,
    NoDifference,
}

/// Alternative hypothesis for the rank-sum test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    /// `a` tends to exceed `b`.
    Greater,
    /// `a` tends to fall below `b`.
    Less,
}

/// Which null-distribution computation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSumMethod {
    /// Exact when the pooled size permits, normal approximation otherwise.
    Auto,
    Exact,
    NormalApprox,
}

/// Full rank-sum test output.
#[derive(Debug, Clone)]
pub struct RankSumResult {
    /// Rank sum of sample `a` (mid-ranks).
    pub statistic: f64,
    pub p_value: f64,
    /// Whether the exact enumeration branch produced the p-value.
    pub exact: bool,
}

fn validate_sample(name: &str, values: &[f64], min: usize) -> Result<(), StatsError> {
    if values.len() < min {
        return Err(StatsError::TooFewValues {
            what: name.into(),
            min,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite { what: name.into() });
    }
    Ok(())
}

/// Mid-ranks of `values` (average rank across ties), 1-based.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test on two loss samples, with a verdict at
/// significance level `alpha` (direction from the medians).
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<(f64, Verdict), StatsError> {
    let result = rank_sum_test(a, b, Alternative::TwoSided, RankSumMethod::Auto)?;
    let verdict = if result.p_value < alpha {
        match median(a).partial_cmp(&median(b)).unwrap() {
            std::cmp::Ordering::Less => Verdict::ABetter,
            std::cmp::Ordering::Greater => Verdict::BBetter,
            std::cmp::Ordering::Equal => {
                // Medians tie but the rank distribution does not: direct the
                // verdict by which sample carries the lower ranks.
                let n_a = a.len() as f64;
                let n = (a.len() + b.len()) as f64;
                let expected = n_a * (n + 1.0) / 2.0;
                if result.statistic < expected {
                    Verdict::ABetter
                } else if result.statistic > expected {
                    Verdict::BBetter
                } else {
                    Verdict::NoDifference
                }
            }
        }
    } else {
        Verdict::NoDifference
    };
    Ok((result.p_value, verdict))
}

/// Rank-sum test with an explicit alternative and method.
pub fn rank_sum_test(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    method: RankSumMethod,
) -> Result<RankSumResult, StatsError> {
    validate_sample("sample a", a, 3)?;
    validate_sample("sample b", b, 3)?;

    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = mid_ranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();

    let use_exact = match method {
        RankSumMethod::Exact => true,
        RankSumMethod::NormalApprox => false,
        RankSumMethod::Auto => pooled.len() <= EXACT_ENUMERATION_LIMIT,
    };

    let (p_value, exact) = if use_exact {
        (exact_rank_sum_p(&ranks, a.len(), w, alternative), true)
    } else {
        (
            normal_rank_sum_p(&ranks, a.len(), b.len(), w, alternative),
            false,
        )
    };

    Ok(RankSumResult {
        statistic: w,
        p_value: p_value.clamp(0.0, 1.0),
        exact,
    })
}

/// Exact permutation p-value: enumerate every assignment of `n_a` of the
/// pooled mid-ranks to sample `a` and count rank sums at least as extreme
/// as the observed one.
fn exact_rank_sum_p(ranks: &[f64], n_a: usize, observed: f64, alternative: Alternative) -> f64 {
    struct Tally {
        observed: f64,
        le: u64,
        ge: u64,
        total: u64,
    }

    impl Tally {
        fn record(&mut self, sum: f64) {
            // Mid-ranks are multiples of 0.5, so sums are exact in f64;
            // the epsilon only guards against addition order effects.
            let eps = 1e-9;
            self.total += 1;
            if sum <= self.observed + eps {
                self.le += 1;
            }
            if sum >= self.observed - eps {
                self.ge += 1;
            }
        }

        fn visit_subsets(&mut self, ranks: &[f64], remaining: usize, start: usize, sum: f64) {
            if remaining == 0 {
                self.record(sum);
                return;
            }
            for i in start..=(ranks.len() - remaining) {
                self.visit_subsets(ranks, remaining - 1, i + 1, sum + ranks[i]);
            }
        }
    }

    let mut tally = Tally {
        observed,
        le: 0,
        ge: 0,
        total: 0,
    };
    tally.visit_subsets(ranks, n_a, 0, 0.0);

    let p_le = tally.le as f64 / tally.total as f64;
    let p_ge = tally.ge as f64 / tally.total as f64;
    match alternative {
        Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
        Alternative::Less => p_le,
        Alternative::Greater => p_ge,
    }
}

/// Normal approximation with tie-corrected variance and continuity
/// correction.
fn normal_rank_sum_p(
    ranks: &[f64],
    n_a: usize,
    n_b: usize,
    observed: f64,
    alternative: Alternative,
) -> f64 {
    let n = (n_a + n_b) as f64;
    let mean = n_a as f64 * (n + 1.0) / 2.0;

    // Tie correction: sum over tie groups of (t^3 - t).
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = (n_a as f64 * n_b as f64 / 12.0) * (n + 1.0 - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        // Every pooled value is identical: no evidence either way.
        return 1.0;
    }
    let sd = variance.sqrt();

    let z_for = |shift: f64| (observed + shift - mean) / sd;
    match alternative {
        Alternative::TwoSided => {
            let cc = if observed > mean {
                -0.5
            } else if observed < mean {
                0.5
            } else {
                0.0
            };
            let z = z_for(cc);
            (2.0 * std_normal_cdf(-z.abs())).min(1.0)
        }
        Alternative::Greater => std_normal_cdf(-z_for(-0.5)),
        Alternative::Less => std_normal_cdf(z_for(0.5)),
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf polynomial
/// (absolute error below 1.5e-7).
pub fn std_normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    0.5 * (1.0 + erf(z))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Friedman test output.
#[derive(Debug, Clone)]
pub struct FriedmanResult {
    /// Per-algorithm average rank over the problems (rank 1 = smallest loss).
    pub avg_ranks: Vec<f64>,
    /// `12n / (k (k+1)) * sum_j (R_j - (k+1)/2)^2`.
    pub statistic: f64,
    /// Chi-square upper tail with `k - 1` degrees of freedom.
    pub p_value: f64,
}

/// Friedman test on a problems-by-algorithms loss matrix.
pub fn friedman(matrix: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    if matrix.len() < 2 {
        return Err(StatsError::TooFewValues {
            what: "problems (matrix rows)".into(),
            min: 2,
            got: matrix.len(),
        });
    }
    let k = matrix[0].len();
    if k < 2 {
        return Err(StatsError::TooFewValues {
            what: "algorithms (matrix columns)".into(),
            min: 2,
            got: k,
        });
    }
    for row in matrix {
        if row.len() != k {
            return Err(StatsError::RaggedMatrix {
                first: k,
                offending: row.len(),
            });
        }
        validate_sample("matrix row", row, k)?;
    }

    let n = matrix.len() as f64;
    let mut rank_sums = vec![0.0; k];
    for row in matrix {
        for (j, r) in mid_ranks(row).into_iter().enumerate() {
            rank_sums[j] += r;
        }
    }
    let avg_ranks: Vec<f64> = rank_sums.iter().map(|s| s / n).collect();

    let center = (k as f64 + 1.0) / 2.0;
    let statistic = 12.0 * n / (k as f64 * (k as f64 + 1.0))
        * avg_ranks
            .iter()
            .map(|r| (r - center) * (r - center))
            .sum::<f64>();
    let p_value = chi_square_sf(statistic, k - 1);

    Ok(FriedmanResult {
        avg_ranks,
        statistic,
        p_value,
    })
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma Q(a, x), series/continued-fraction
/// split at `x = a + 1`.
fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..500 {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Lanczos log-gamma (g = 7, 9 coefficients).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Outcome of one pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    Win,
    Tie,
    Loss,
}

/// All pairwise rank-sum verdicts among `k` loss samples for one problem;
/// entry `[i][j]` is algorithm `i`'s outcome against algorithm `j`.
pub fn pairwise_outcomes(
    samples: &[Vec<f64>],
    alpha: f64,
) -> Result<Vec<Vec<PairOutcome>>, StatsError> {
    let k = samples.len();
    let mut table = vec![vec![PairOutcome::Tie; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let (_, verdict) = wilcoxon_rank_sum(&samples[i], &samples[j], alpha)?;
            let (ij, ji) = match verdict {
                Verdict::ABetter => (PairOutcome::Win, PairOutcome::Loss),
                Verdict::BBetter => (PairOutcome::Loss, PairOutcome::Win),
                Verdict::NoDifference => (PairOutcome::Tie, PairOutcome::Tie),
            };
            table[i][j] = ij;
            table[j][i] = ji;
        }
    }
    Ok(table)
}

/// Top-K counts from per-problem pairwise outcome tables.
///
/// Per problem, algorithms are ordered by pairwise wins (descending), ties
/// broken by fewer losses; an algorithm is among the K best when fewer than
/// K others are strictly better under that order. Returns an
/// algorithms-by-K matrix (`K = 1..=k`) of problem counts.
pub fn top_k_table(per_problem: &[Vec<Vec<PairOutcome>>]) -> Vec<Vec<usize>> {
    if per_problem.is_empty() {
        return Vec::new();
    }
    let k = per_problem[0].len();
    let mut counts = vec![vec![0usize; k]; k];
    for table in per_problem {
        let score: Vec<(usize, usize)> = table
            .iter()
            .map(|row| {
                let wins = row.iter().filter(|o| **o == PairOutcome::Win).count();
                let losses = row.iter().filter(|o| **o == PairOutcome::Loss).count();
                (wins, losses)
            })
            .collect();
        for i in 0..k {
            let better = score
                .iter()
                .filter(|(w, l)| *w > score[i].0 || (*w == score[i].0 && *l < score[i].1))
                .count();
            // In the top K for every K > better.
            for slot in counts[i].iter_mut().skip(better) {
                *slot += 1;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_show_no_difference() {
        let a = [3.0, 1.0, 2.0];
        let (p, verdict) = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(verdict, Verdict::NoDifference);
    }

    #[test]
    fn fully_separated_triplets_give_exact_tenth() {
        let (p, _) = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05).unwrap();
        assert!((p - 0.1).abs() < 1e-12, "p = {p}");
    }

    #[test]
    fn swapping_samples_mirrors_the_verdict() {
        let a = [0.1, 0.2, 0.3, 0.15, 0.25];
        let b = [1.0, 2.0, 3.0, 1.5, 2.5];
        let (p_ab, v_ab) = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        let (p_ba, v_ba) = wilcoxon_rank_sum(&b, &a, 0.05).unwrap();
        assert_eq!(p_ab, p_ba);
        assert_eq!(v_ab, Verdict::ABetter);
        assert_eq!(v_ba, Verdict::BBetter);
    }

    #[test]
    fn all_identical_values_are_degenerate() {
        let a = [2.0; 5];
        let b = [2.0; 6];
        let (p, verdict) = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(verdict, Verdict::NoDifference);
    }

    #[test]
    fn tiny_samples_are_rejected() {
        assert!(wilcoxon_rank_sum(&[1.0, 2.0], &[1.0, 2.0, 3.0], 0.05).is_err());
    }

    #[test]
    fn one_sided_directions_are_complementary() {
        let a = [10.0, 11.0, 12.0, 13.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let greater = rank_sum_test(&a, &b, Alternative::Greater, RankSumMethod::Exact).unwrap();
        let less = rank_sum_test(&a, &b, Alternative::Less, RankSumMethod::Exact).unwrap();
        assert!(greater.p_value < 0.05);
        assert!(less.p_value > 0.9);
    }

    #[test]
    fn constant_rows_rank_in_the_middle() {
        let matrix = vec![vec![1.0, 1.0, 1.0]; 4];
        let result = friedman(&matrix).unwrap();
        assert_eq!(result.avg_ranks, vec![2.0, 2.0, 2.0]);
        assert_eq!(result.statistic, 0.0);
        assert!((result.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_column_reproduces_hand_computed_statistic() {
        let matrix = vec![
            vec![1.0, 2.0],
            vec![0.5, 0.9],
            vec![10.0, 30.0],
            vec![-3.0, -2.0],
        ];
        let result = friedman(&matrix).unwrap();
        assert_eq!(result.avg_ranks, vec![1.0, 2.0]);
        assert!((result.statistic - 4.0).abs() < 1e-12);
    }

    #[test]
    fn friedman_rejects_non_finite_and_ragged_input() {
        assert!(friedman(&[vec![1.0, 2.0], vec![f64::NAN, 0.0]]).is_err());
        assert!(friedman(&[vec![1.0, 2.0], vec![1.0, 2.0, 3.0]]).is_err());
    }

    #[test]
    fn chi_square_tail_matches_reference_values() {
        // Reference points from standard tables.
        assert!((chi_square_sf(3.841, 1) - 0.05).abs() < 1e-3);
        assert!((chi_square_sf(15.507, 8) - 0.05).abs() < 1e-3);
        assert!((chi_square_sf(2.733, 8) - 0.95).abs() < 1e-3);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-9);
        assert!((std_normal_cdf(1.96) - 0.975).abs() < 1e-4);
        assert!((std_normal_cdf(-1.96) - 0.025).abs() < 1e-4);
    }

    #[test]
    fn dominance_fills_the_top_row() {
        // A beats B and C on every problem.
        let a_wins = vec![
            vec![PairOutcome::Tie, PairOutcome::Win, PairOutcome::Win],
            vec![PairOutcome::Loss, PairOutcome::Tie, PairOutcome::Tie],
            vec![PairOutcome::Loss, PairOutcome::Tie, PairOutcome::Tie],
        ];
        let problems = vec![a_wins.clone(), a_wins.clone(), a_wins];
        let counts = top_k_table(&problems);
        assert_eq!(counts[0][0], 3); // A is top-1 everywhere
        for row in &counts {
            // Non-decreasing in K, all problems counted at K = k.
            for pair in row.windows(2) {
                assert!(pair[1] >= pair[0]);
            }
            assert_eq!(*row.last().unwrap(), 3);
        }
    }

    #[test]
    fn single_algorithm_tops_every_problem() {
        let solo = vec![vec![PairOutcome::Tie]];
        let problems = vec![solo.clone(), solo.clone(), solo.clone(), solo];
        let counts = top_k_table(&problems);
        assert_eq!(counts, vec![vec![4]]);
    }

    #[test]
    fn pairwise_outcomes_feed_the_top_k_counts() {
        // Algorithm 0 clearly best, 2 clearly worst, 1 in between.
        let samples = vec![
            vec![0.1, 0.2, 0.15, 0.12, 0.18],
            vec![1.0, 1.2, 1.1, 0.9, 1.3],
            vec![9.0, 9.5, 9.2, 9.8, 9.1],
        ];
        let table = pairwise_outcomes(&samples, 0.05).unwrap();
        assert_eq!(table[0][1], PairOutcome::Win);
        assert_eq!(table[1][0], PairOutcome::Loss);
        assert_eq!(table[0][0], PairOutcome::Tie);

        let counts = top_k_table(&[table]);
        assert_eq!(counts[0], vec![1, 1, 1]);
        assert_eq!(counts[1], vec![0, 1, 1]);
        assert_eq!(counts[2], vec![0, 0, 1]);
    }
}
