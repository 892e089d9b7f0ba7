//! Negatively correlated search for continuous minimization.
//!
//! A run maintains `N` parallel randomized local searches (RLSs). Each RLS
//! holds one solution and samples one offspring per iteration from an
//! isotropic Gaussian centered on its solution. Selection trades off the
//! offspring's objective value against how far its search distribution sits
//! from the other RLSs' distributions, measured by the closed-form
//! Bhattacharyya distance between Gaussians. Far-apart distributions are
//! preferred, which pushes the searches into different regions instead of
//! letting them pile into the same basin.
//!
//! Per iteration, for each RLS `i` with solution `x_i`, step size `sigma_i`,
//! and offspring `x_i'`:
//!
//! 1. `corr(p)` is the minimum Bhattacharyya distance from `p` to the other
//!    RLSs' current distributions, all taken against the same start-of-
//!    iteration snapshot so that the outcome does not depend on processing
//!    order.
//! 2. Objective values are shifted by the best value found so far (making
//!    them non-negative) and each old/new pair is normalized to sum to one;
//!    correlation pairs are normalized the same way.
//! 3. The offspring replaces its parent iff
//!    `f_norm(x_i') / corr_norm(p_i') < lambda_t`, where `lambda_t` is drawn
//!    from a normal distribution with mean 1 whose spread shrinks linearly
//!    to zero over the run.
//! 4. Every `epoch` iterations each `sigma_i` is adapted by the 1/5 success
//!    rule: grow when more than 20% of the epoch's offspring were accepted,
//!    shrink below 20%, hold at exactly 20%.

use thiserror::Error;

use crate::objectives::ObjectiveSpec;
use crate::rng::{rls_stream, RngStream, INIT_STREAM, LAMBDA_STREAM};

/// Draws of the selection threshold are clamped to this value when the
/// normal sample comes out non-positive; the threshold must stay positive
/// and resampling would consume a data-dependent number of draws.
pub const LAMBDA_MIN: f64 = 1e-6;

/// Errors raised by run configuration and execution.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("population must hold at least 2 search processes, got {0}")]
    PopulationTooSmall(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("search distributions have mismatched dimensions ({a} vs {b})")]
    DimensionMismatch { a: usize, b: usize },
    #[error(
        "objective returned a non-finite value {value} at iteration {iteration} (search process {rls})"
    )]
    NonFiniteObjective {
        iteration: usize,
        rls: usize,
        value: f64,
    },
    #[error(
        "normalization floor {floor} exceeds a value in the pair ({v_old}, {v_new}); the floor must be the running minimum"
    )]
    NormalizationFloor { v_old: f64, v_new: f64, floor: f64 },
}

/// Isotropic Gaussian search distribution: mean vector plus one shared
/// standard deviation (covariance `sigma^2 I`).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchDistribution {
    pub mean: Vec<f64>,
    pub sigma: f64,
}

impl SearchDistribution {
    pub fn new(mean: Vec<f64>, sigma: f64) -> SearchDistribution {
        debug_assert!(sigma > 0.0, "sigma must be positive");
        SearchDistribution { mean, sigma }
    }
}

/// One randomized local search: its distribution, the objective value of
/// the current solution, the epoch's replacement counter, and its own
/// random stream.
#[derive(Debug, Clone)]
pub struct RlsState {
    pub dist: SearchDistribution,
    pub f_current: f64,
    pub success_count: usize,
    pub rng: RngStream,
}

/// How offspring that leave the search box are repaired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundPolicy {
    /// Mirror the overshoot back inside, repeatedly until the point lands
    /// in the box. Keeps the perturbation magnitude meaningful.
    #[default]
    Reflect,
    /// Truncate to the nearest bound.
    Clamp,
}

impl BoundPolicy {
    pub fn from_name(name: &str) -> Result<BoundPolicy, EngineError> {
        match name.to_ascii_lowercase().as_str() {
            "reflect" => Ok(BoundPolicy::Reflect),
            "clamp" => Ok(BoundPolicy::Clamp),
            other => Err(EngineError::InvalidConfig(format!(
                "unknown bound policy `{other}` (expected `reflect` or `clamp`)"
            ))),
        }
    }
}

/// All parameters of a run.
///
/// Defaults follow the reference settings: population size 10, step-size
/// factor `r = 0.99`, adaptation period `epoch = 10`, initial step size
/// one-tenth of the widest coordinate range, step size clamped to
/// `[1e-10 * range, range]`.
#[derive(Debug, Clone)]
pub struct NcsConfig {
    /// Number of iterations of the main loop.
    pub t_max: usize,
    /// Population size (number of parallel searches), at least 2.
    pub n: usize,
    /// Initial step size shared by all searches.
    pub sigma0: f64,
    /// Step-size adaptation factor in (0, 1).
    pub r: f64,
    /// Iterations between step-size adaptations.
    pub epoch: usize,
    /// Base seed; all streams derive from it.
    pub seed: u64,
    /// Out-of-bounds repair policy.
    pub bound_policy: BoundPolicy,
    /// Lower clamp for adapted step sizes.
    pub sigma_min: f64,
    /// Upper clamp for adapted step sizes.
    pub sigma_max: f64,
    /// Record the retained solution of every search at every iteration.
    pub record_trajectory: bool,
}

impl NcsConfig {
    /// Default parameters for `problem`, with the step-size scale taken
    /// from the widest coordinate range.
    pub fn defaults_for(problem: &ObjectiveSpec, t_max: usize, seed: u64) -> NcsConfig {
        let range = problem.widest_range();
        NcsConfig {
            t_max,
            n: 10,
            sigma0: range / 10.0,
            r: 0.99,
            epoch: 10,
            seed,
            bound_policy: BoundPolicy::Reflect,
            sigma_min: 1e-10 * range,
            sigma_max: range,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n < 2 {
            return Err(EngineError::PopulationTooSmall(self.n));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(EngineError::InvalidConfig(format!(
                "step-size factor r must lie in (0, 1), got {}",
                self.r
            )));
        }
        if self.epoch == 0 {
            return Err(EngineError::InvalidConfig("epoch must be positive".into()));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(EngineError::InvalidConfig(format!(
                "sigma0 must be a positive finite number, got {}",
                self.sigma0
            )));
        }
        if !(self.sigma_min > 0.0 && self.sigma_max >= self.sigma_min) {
            return Err(EngineError::InvalidConfig(format!(
                "sigma bounds must satisfy 0 < sigma_min <= sigma_max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        Ok(())
    }
}

/// One logged population snapshot entry: the solution a search retained at
/// the end of an iteration (iteration 0 is the initial population).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub rls: usize,
    pub value: f64,
    pub position: Vec<f64>,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Best solution over every point evaluated during the run.
    pub best_solution: Vec<f64>,
    /// Objective value of [`RunRecord::best_solution`].
    pub best_value: f64,
    /// `(iteration, best value so far)`; entry 0 covers initialization.
    pub history: Vec<(usize, f64)>,
    /// Per-iteration retained solutions, when trajectory recording is on.
    pub trajectory: Option<Vec<TrajectoryPoint>>,
    /// Total objective evaluations consumed.
    pub evaluations_used: usize,
    /// Retained solution of each search at termination.
    pub final_population: Vec<Vec<f64>>,
    /// Objective value of each retained solution at termination.
    pub final_values: Vec<f64>,
}

/// Selection outcome for one search process in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Discard the parent; the offspring becomes the current solution.
    Replace,
    /// Discard the offspring.
    Keep,
}

/// Perturb every coordinate of `x` by `sigma * z` with `z` standard normal,
/// then repair out-of-bounds coordinates by `policy`. Consumes exactly
/// `x.len()` normal draws.
pub fn gaussian_mutate(
    x: &[f64],
    sigma: f64,
    rng: &mut RngStream,
    lower: &[f64],
    upper: &[f64],
    policy: BoundPolicy,
) -> Vec<f64> {
    debug_assert!(sigma > 0.0);
    x.iter()
        .enumerate()
        .map(|(d, &xd)| {
            let mut v = xd + sigma * rng.next_gaussian();
            let (lo, hi) = (lower[d], upper[d]);
            match policy {
                BoundPolicy::Clamp => v.clamp(lo, hi),
                BoundPolicy::Reflect => {
                    while v < lo || v > hi {
                        if v > hi {
                            v = 2.0 * hi - v;
                        } else {
                            v = 2.0 * lo - v;
                        }
                    }
                    v
                }
            }
        })
        .collect()
}

/// Closed-form Bhattacharyya distance between two isotropic Gaussians:
///
/// ```text
/// D_B = ||mean_a - mean_b||^2 / (4 (sigma_a^2 + sigma_b^2))
///     + (D/2) ln( (sigma_a^2 + sigma_b^2) / (2 sigma_a sigma_b) )
/// ```
///
/// Symmetric, non-negative, and zero exactly for identical `(mean, sigma)`.
pub fn bhattacharyya_gaussian(
    a: &SearchDistribution,
    b: &SearchDistribution,
) -> Result<f64, EngineError> {
    if a.mean.len() != b.mean.len() {
        return Err(EngineError::DimensionMismatch {
            a: a.mean.len(),
            b: b.mean.len(),
        });
    }
    debug_assert!(a.sigma > 0.0 && b.sigma > 0.0);
    let var_sum = a.sigma * a.sigma + b.sigma * b.sigma;
    let dist_sq: f64 = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let mean_term = dist_sq / (4.0 * var_sum);
    let spread_term = 0.5 * a.mean.len() as f64 * (var_sum / (2.0 * a.sigma * b.sigma)).ln();
    // Both terms are non-negative in exact arithmetic; the log term can
    // round to a tiny negative when the sigmas are nearly equal.
    Ok((mean_term + spread_term).max(0.0))
}

/// Minimum Bhattacharyya distance from `candidate` to every population
/// member except index `skip`. Errors when no other member exists.
pub fn min_correlation(
    candidate: &SearchDistribution,
    skip: usize,
    population: &[SearchDistribution],
) -> Result<f64, EngineError> {
    let mut best: Option<f64> = None;
    for (j, other) in population.iter().enumerate() {
        if j == skip {
            continue;
        }
        let d = bhattacharyya_gaussian(candidate, other)?;
        best = Some(match best {
            Some(b) => b.min(d),
            None => d,
        });
    }
    best.ok_or(EngineError::PopulationTooSmall(population.len()))
}

/// Shift a `(old, new)` value pair by `shift_floor` and scale it to sum to
/// one. Both shifted values must be non-negative; when both are zero the
/// pair is a neutral tie `(0.5, 0.5)`.
pub fn normalize_pair(
    v_old: f64,
    v_new: f64,
    shift_floor: f64,
) -> Result<(f64, f64), EngineError> {
    let a = v_old - shift_floor;
    let b = v_new - shift_floor;
    if a < 0.0 || b < 0.0 {
        return Err(EngineError::NormalizationFloor {
            v_old,
            v_new,
            floor: shift_floor,
        });
    }
    let total = a + b;
    if total == 0.0 {
        Ok((0.5, 0.5))
    } else {
        Ok((a / total, b / total))
    }
}

/// Decide whether the offspring replaces its parent.
///
/// Replacement happens iff `f_new_norm / corr_new_norm < lambda`. A zero
/// normalized correlation means the offspring's distribution coincides with
/// another search's: the ratio is treated as infinite and the parent is
/// kept, unless the normalized objective is also zero, in which case the
/// raw objective values are compared greedily.
pub fn selection_decide(
    f_new_norm: f64,
    corr_new_norm: f64,
    lambda: f64,
    f_old_raw: f64,
    f_new_raw: f64,
) -> Selection {
    if corr_new_norm == 0.0 {
        if f_new_norm == 0.0 {
            if f_new_raw < f_old_raw {
                Selection::Replace
            } else {
                Selection::Keep
            }
        } else {
            Selection::Keep
        }
    } else if f_new_norm / corr_new_norm < lambda {
        Selection::Replace
    } else {
        Selection::Keep
    }
}

/// Draw the iteration's selection threshold from
/// `Normal(1, 0.1 - 0.1 t / t_max)` (standard deviation shrinking linearly
/// to zero), clamped to [`LAMBDA_MIN`] when the draw is non-positive.
/// Consumes exactly one normal draw; at `t = t_max` the spread is zero and
/// the result is exactly 1.
pub fn lambda_at(t: usize, t_max: usize, rng: &mut RngStream) -> f64 {
    let frac = if t_max == 0 {
        1.0
    } else {
        t as f64 / t_max as f64
    };
    let std_dev = 0.1 * (1.0 - frac);
    let lambda = 1.0 + std_dev * rng.next_gaussian();
    if lambda <= 0.0 {
        LAMBDA_MIN
    } else {
        lambda
    }
}

/// Apply the 1/5 success rule: with `c` replacements over `epoch`
/// iterations, grow `sigma` by `1/r` when `c/epoch > 0.2`, shrink by `r`
/// when `c/epoch < 0.2`, hold when equal; the result is clamped into
/// `[sigma_min, sigma_max]`. The rate comparison is done in integers, so
/// the equality branch is exact.
pub fn adapt_sigma(
    sigma: f64,
    c: usize,
    epoch: usize,
    r: f64,
    sigma_min: f64,
    sigma_max: f64,
) -> f64 {
    debug_assert!(c <= epoch);
    let adapted = match (5 * c).cmp(&epoch) {
        std::cmp::Ordering::Greater => sigma / r,
        std::cmp::Ordering::Less => sigma * r,
        std::cmp::Ordering::Equal => sigma,
    };
    adapted.clamp(sigma_min, sigma_max)
}

/// Which acceptance rule a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AcceptanceRule {
    /// Objective/correlation trade-off against the lambda threshold.
    NegativeCorrelation,
    /// Greedy: accept iff the offspring strictly improves the objective.
    /// Correlation terms are not computed; lambda draws are still consumed
    /// so that runs with a common seed share identical mutation noise.
    GreedyFitness,
}

/// Run the full search loop. See the module docs for the iteration
/// structure.
pub fn ncs_run(problem: &ObjectiveSpec, cfg: &NcsConfig) -> Result<RunRecord, EngineError> {
    run_with_rule(problem, cfg, AcceptanceRule::NegativeCorrelation)
}

pub(crate) fn run_with_rule(
    problem: &ObjectiveSpec,
    cfg: &NcsConfig,
    rule: AcceptanceRule,
) -> Result<RunRecord, EngineError> {
    cfg.validate()?;
    let dim = problem.dim();
    let (lower, upper) = (problem.lower(), problem.upper());
    let n = cfg.n;

    let mut init_rng = RngStream::new(cfg.seed, INIT_STREAM);
    let mut lambda_rng = RngStream::new(cfg.seed, LAMBDA_STREAM);

    // Initial population: uniform in the box, one RLS at a time.
    let mut rls: Vec<RlsState> = (0..n)
        .map(|i| {
            let mean: Vec<f64> = (0..dim)
                .map(|d| init_rng.uniform_in(lower[d], upper[d]))
                .collect();
            RlsState {
                dist: SearchDistribution::new(mean, cfg.sigma0),
                f_current: f64::NAN,
                success_count: 0,
                rng: RngStream::new(cfg.seed, rls_stream(i)),
            }
        })
        .collect();

    let mut evaluations = 0usize;
    for (i, state) in rls.iter_mut().enumerate() {
        let value = problem.evaluate(&state.dist.mean);
        evaluations += 1;
        if !value.is_finite() {
            return Err(EngineError::NonFiniteObjective {
                iteration: 0,
                rls: i,
                value,
            });
        }
        state.f_current = value;
    }

    let mut best_index = 0;
    for i in 1..n {
        if rls[i].f_current < rls[best_index].f_current {
            best_index = i;
        }
    }
    let mut best_solution = rls[best_index].dist.mean.clone();
    let mut best_value = rls[best_index].f_current;

    let mut history = Vec::with_capacity(cfg.t_max + 1);
    history.push((0, best_value));

    let mut trajectory = if cfg.record_trajectory {
        let mut log = Vec::with_capacity((cfg.t_max + 1) * n);
        for (i, state) in rls.iter().enumerate() {
            log.push(TrajectoryPoint {
                iteration: 0,
                rls: i,
                value: state.f_current,
                position: state.dist.mean.clone(),
            });
        }
        Some(log)
    } else {
        None
    };

    let mut offspring: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut offspring_values = vec![0.0f64; n];
    let mut corr_old = vec![0.0f64; n];
    let mut corr_new = vec![0.0f64; n];

    for t in 0..cfg.t_max {
        let lambda = lambda_at(t, cfg.t_max, &mut lambda_rng);

        // Mutate and evaluate every search before any state changes.
        offspring.clear();
        for i in 0..n {
            let state = &mut rls[i];
            let child = gaussian_mutate(
                &state.dist.mean,
                state.dist.sigma,
                &mut state.rng,
                lower,
                upper,
                cfg.bound_policy,
            );
            let value = problem.evaluate(&child);
            evaluations += 1;
            if !value.is_finite() {
                return Err(EngineError::NonFiniteObjective {
                    iteration: t + 1,
                    rls: i,
                    value,
                });
            }
            offspring_values[i] = value;
            offspring.push(child);
        }

        // Correlations of parents and offspring against the same
        // start-of-iteration snapshot; all replacement decisions then apply
        // simultaneously.
        if rule == AcceptanceRule::NegativeCorrelation {
            let snapshot: Vec<SearchDistribution> =
                rls.iter().map(|s| s.dist.clone()).collect();
            for i in 0..n {
                corr_old[i] = min_correlation(&snapshot[i], i, &snapshot)?;
                let child_dist =
                    SearchDistribution::new(offspring[i].clone(), snapshot[i].sigma);
                corr_new[i] = min_correlation(&child_dist, i, &snapshot)?;
            }
        }

        // Track the best over everything evaluated; the updated best also
        // serves as the non-negativity floor for objective normalization.
        for i in 0..n {
            if offspring_values[i] < best_value {
                best_value = offspring_values[i];
                best_solution = offspring[i].clone();
            }
        }

        for i in 0..n {
            let decision = match rule {
                AcceptanceRule::GreedyFitness => {
                    if offspring_values[i] < rls[i].f_current {
                        Selection::Replace
                    } else {
                        Selection::Keep
                    }
                }
                AcceptanceRule::NegativeCorrelation => {
                    let (_, f_new_norm) =
                        normalize_pair(rls[i].f_current, offspring_values[i], best_value)?;
                    let (_, corr_new_norm) = normalize_pair(corr_old[i], corr_new[i], 0.0)?;
                    selection_decide(
                        f_new_norm,
                        corr_new_norm,
                        lambda,
                        rls[i].f_current,
                        offspring_values[i],
                    )
                }
            };
            if decision == Selection::Replace {
                rls[i].dist.mean = std::mem::take(&mut offspring[i]);
                rls[i].f_current = offspring_values[i];
                rls[i].success_count += 1;
            }
        }

        if (t + 1) % cfg.epoch == 0 {
            for state in &mut rls {
                state.dist.sigma = adapt_sigma(
                    state.dist.sigma,
                    state.success_count,
                    cfg.epoch,
                    cfg.r,
                    cfg.sigma_min,
                    cfg.sigma_max,
                );
                state.success_count = 0;
            }
        }

        history.push((t + 1, best_value));
        if let Some(log) = &mut trajectory {
            for (i, state) in rls.iter().enumerate() {
                log.push(TrajectoryPoint {
                    iteration: t + 1,
                    rls: i,
                    value: state.f_current,
                    position: state.dist.mean.clone(),
                });
            }
        }
    }

    Ok(RunRecord {
        best_solution,
        best_value,
        history,
        trajectory,
        evaluations_used: evaluations,
        final_population: rls.iter().map(|s| s.dist.mean.clone()).collect(),
        final_values: rls.iter().map(|s| s.f_current).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Builtin;

    fn dist(mean: &[f64], sigma: f64) -> SearchDistribution {
        SearchDistribution::new(mean.to_vec(), sigma)
    }

    #[test]
    fn mutate_adds_scaled_noise() {
        // With wide bounds the offspring is exactly x + sigma * z; replay
        // the stream to reconstruct the draws.
        let mut rng = RngStream::new(3, 2);
        let x = [0.25, -1.5];
        let child = gaussian_mutate(
            &x,
            2.0,
            &mut rng,
            &[-1e9, -1e9],
            &[1e9, 1e9],
            BoundPolicy::Reflect,
        );
        let mut replay = RngStream::new(3, 2);
        let z0 = replay.next_gaussian();
        let z1 = replay.next_gaussian();
        assert_eq!(child, vec![0.25 + 2.0 * z0, -1.5 + 2.0 * z1]);
    }

    #[test]
    fn mutate_sample_std_matches_sigma() {
        let mut rng = RngStream::new(11, 2);
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                gaussian_mutate(&[0.0], 2.0, &mut rng, &[-1e9], &[1e9], BoundPolicy::Reflect)[0]
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        assert!((1.9..=2.1).contains(&std), "sample std {std}");
    }

    #[test]
    fn reflection_mirrors_overshoot() {
        // Force a draw that lands at 1.3 from x = 0.9: z = (1.3 - 0.9) / sigma.
        // Easier checked directly on the repair arithmetic with a stub draw:
        // reflecting 1.3 into [-1, 1] gives 0.7.
        let mut v = 1.3f64;
        let (lo, hi) = (-1.0, 1.0);
        while v < lo || v > hi {
            if v > hi {
                v = 2.0 * hi - v;
            } else {
                v = 2.0 * lo - v;
            }
        }
        assert!((v - 0.7).abs() < 1e-15);

        // And through the public path: clamp truncates, reflect folds.
        let mut rng = RngStream::new(1, 2);
        let child = gaussian_mutate(&[0.9], 5.0, &mut rng, &[-1.0], &[1.0], BoundPolicy::Clamp);
        assert!(child[0] >= -1.0 && child[0] <= 1.0);
    }

    #[test]
    fn bhattacharyya_matches_hand_values() {
        // Identical distributions.
        let a = dist(&[1.0, 2.0], 0.7);
        assert_eq!(bhattacharyya_gaussian(&a, &a).unwrap(), 0.0);

        // 1-D, means 0 and 2, unit sigmas: 2^2 / 8 = 0.5.
        let b = bhattacharyya_gaussian(&dist(&[0.0], 1.0), &dist(&[2.0], 1.0)).unwrap();
        assert!((b - 0.5).abs() < 1e-12, "got {b}");

        // 2-D, equal means, sigmas 1 and 2: ln(5/4) = 0.22314...
        let c = bhattacharyya_gaussian(&dist(&[0.0, 0.0], 1.0), &dist(&[0.0, 0.0], 2.0)).unwrap();
        assert!((c - (5.0f64 / 4.0).ln()).abs() < 1e-12, "got {c}");
    }

    #[test]
    fn bhattacharyya_rejects_dimension_mismatch() {
        let err = bhattacharyya_gaussian(&dist(&[0.0], 1.0), &dist(&[0.0, 0.0], 1.0)).unwrap_err();
        assert!(matches!(err, EngineError::DimensionMismatch { .. }));
    }

    #[test]
    fn min_correlation_takes_the_nearest_neighbor() {
        let population = vec![
            dist(&[0.0], 1.0),
            dist(&[2.0], 1.0),  // distance 0.5
            dist(&[10.0], 1.0), // distance 12.5
        ];
        let corr = min_correlation(&population[0], 0, &population).unwrap();
        assert!((corr - 0.5).abs() < 1e-12, "got {corr}");

        // Candidate coinciding with another member: the zero term wins.
        let corr0 = min_correlation(&population[1], 0, &population).unwrap();
        assert_eq!(corr0, 0.0);
    }

    #[test]
    fn min_correlation_requires_another_member() {
        let only = vec![dist(&[0.0], 1.0)];
        assert!(matches!(
            min_correlation(&only[0], 0, &only),
            Err(EngineError::PopulationTooSmall(_))
        ));
    }

    #[test]
    fn normalize_pair_examples() {
        assert_eq!(normalize_pair(3.0, 1.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(normalize_pair(0.5, 1.5, 0.0).unwrap(), (0.25, 0.75));
        assert_eq!(normalize_pair(1.0, 1.0, 1.0).unwrap(), (0.5, 0.5));
        assert!(matches!(
            normalize_pair(0.5, 2.0, 1.0),
            Err(EngineError::NormalizationFloor { .. })
        ));
    }

    #[test]
    fn selection_rule_examples() {
        assert_eq!(
            selection_decide(0.25, 0.75, 1.0, 10.0, 5.0),
            Selection::Replace
        );
        assert_eq!(selection_decide(0.75, 0.25, 1.0, 5.0, 10.0), Selection::Keep);
        // Zero correlation, positive objective share: ratio is infinite.
        assert_eq!(selection_decide(0.4, 0.0, 1.0, 5.0, 4.0), Selection::Keep);
        // Both shares zero: greedy on the raw values.
        assert_eq!(
            selection_decide(0.0, 0.0, 1.0, 5.0, 4.0),
            Selection::Replace
        );
        assert_eq!(selection_decide(0.0, 0.0, 1.0, 4.0, 4.0), Selection::Keep);
    }

    #[test]
    fn lambda_is_exactly_one_at_the_horizon() {
        let mut rng = RngStream::new(77, 1);
        assert_eq!(lambda_at(100, 100, &mut rng), 1.0);
        assert_eq!(lambda_at(0, 0, &mut rng), 1.0);
    }

    #[test]
    fn lambda_spread_at_start_is_a_tenth() {
        let mut rng = RngStream::new(4, 1);
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| lambda_at(0, 1_000_000, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        assert!((std - 0.1).abs() < 0.005, "sample std {std}");
    }

    #[test]
    fn lambda_clamps_non_positive_draws() {
        // Hunt for a stream state whose next draw would push lambda below
        // zero at full spread 1.0 (std scaled up by construction): instead
        // verify the clamp arithmetic directly on the formula used.
        let mut rng = RngStream::new(0, 1);
        let mut clamped = false;
        for _ in 0..1_000_000 {
            let z = rng.next_gaussian();
            let lambda = 1.0 + 0.1 * z;
            if lambda <= 0.0 {
                clamped = true;
                break;
            }
        }
        // A |z| > 10 event is essentially impossible; the clamp is the
        // documented behavior, assert it on a synthetic draw instead.
        assert!(!clamped);
        assert_eq!(
            {
                let lambda = 1.0 + 0.1 * (-20.0);
                if lambda <= 0.0 {
                    LAMBDA_MIN
                } else {
                    lambda
                }
            },
            LAMBDA_MIN
        );
    }

    #[test]
    fn sigma_adaptation_branches() {
        let (lo, hi) = (1e-12, 1e12);
        let up = adapt_sigma(1.0, 5, 10, 0.99, lo, hi);
        assert!((up - 1.0 / 0.99).abs() < 1e-15, "got {up}");
        assert_eq!(adapt_sigma(1.0, 2, 10, 0.99, lo, hi), 1.0);
        assert_eq!(adapt_sigma(1.0, 0, 10, 0.99, lo, hi), 0.99);
        // Clamping.
        assert_eq!(adapt_sigma(1.0, 0, 10, 0.5, 0.9, hi), 0.9);
        assert_eq!(adapt_sigma(1.0, 10, 10, 0.5, lo, 1.5), 1.5);
    }

    #[test]
    fn zero_iterations_returns_best_initial_point() {
        let problem = ObjectiveSpec::builtin(Builtin::Sphere, 3);
        let mut cfg = NcsConfig::defaults_for(&problem, 0, 42);
        cfg.n = 6;
        let record = ncs_run(&problem, &cfg).unwrap();
        assert_eq!(record.evaluations_used, 6);
        assert_eq!(record.history, vec![(0, record.best_value)]);
        assert_eq!(record.final_population.len(), 6);
        let init_best = record
            .final_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(record.best_value, init_best);
    }

    #[test]
    fn runs_are_deterministic() {
        let problem = ObjectiveSpec::builtin(Builtin::Rastrigin, 2);
        let mut cfg = NcsConfig::defaults_for(&problem, 200, 7);
        cfg.record_trajectory = true;
        let a = ncs_run(&problem, &cfg).unwrap();
        let b = ncs_run(&problem, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn population_of_one_is_rejected() {
        let problem = ObjectiveSpec::builtin(Builtin::Sphere, 2);
        let mut cfg = NcsConfig::defaults_for(&problem, 10, 1);
        cfg.n = 1;
        assert!(matches!(
            ncs_run(&problem, &cfg),
            Err(EngineError::PopulationTooSmall(1))
        ));
    }

    #[test]
    fn non_finite_objective_aborts_with_context() {
        let problem = ObjectiveSpec::custom(
            "poison",
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            None,
            |x: &[f64]| {
                if x[0] > 0.0 {
                    f64::NAN
                } else {
                    x[0] * x[0]
                }
            },
        )
        .unwrap();
        let cfg = NcsConfig::defaults_for(&problem, 50, 5);
        let err = ncs_run(&problem, &cfg).unwrap_err();
        assert!(matches!(err, EngineError::NonFiniteObjective { .. }));
    }

    #[test]
    fn search_improves_on_the_initial_population() {
        let problem = ObjectiveSpec::builtin(Builtin::Sphere, 2);
        let cfg = NcsConfig::defaults_for(&problem, 1000, 1);
        let record = ncs_run(&problem, &cfg).unwrap();
        let initial_best = record.history[0].1;
        assert!(
            record.best_value < initial_best,
            "best {} vs initial {}",
            record.best_value,
            initial_best
        );
        assert_eq!(record.evaluations_used, cfg.n * (cfg.t_max + 1));
    }

    #[test]
    fn best_history_never_increases() {
        let problem = ObjectiveSpec::builtin(Builtin::Ackley, 3);
        let cfg = NcsConfig::defaults_for(&problem, 300, 9);
        let record = ncs_run(&problem, &cfg).unwrap();
        for pair in record.history.windows(2) {
            assert!(pair[1].1 <= pair[0].1);
        }
    }
}
