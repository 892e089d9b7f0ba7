//! Negatively correlated search for continuous optimization.
//!
//! A population of randomized local searches runs in parallel; each models
//! its next move as an isotropic Gaussian and selection explicitly rewards
//! search distributions that stay far (in Bhattacharyya distance) from the
//! rest of the population, trading that diversity pressure off against raw
//! objective quality. The crate bundles:
//!
//! * [`engine`] — the search loop and its operators (Gaussian mutation,
//!   closed-form Bhattacharyya distance, pair normalization, threshold
//!   schedule, 1/5-rule step-size adaptation);
//! * [`baselines`] — parallel hill-climbing (the same loop with greedy
//!   acceptance) and uniform random search;
//! * [`objectives`] — classical multimodal benchmark functions with
//!   optional shift/rotation transforms;
//! * [`antenna`] — synthesis of symmetric unequally spaced linear antenna
//!   arrays by peak-sidelobe-level minimization;
//! * [`stats`] — Wilcoxon rank-sum and Friedman tests plus Top-K counting;
//! * [`rng`] — the pinned deterministic random streams every run draws
//!   from.
//!
//! ```
//! use ncs_core::engine::{ncs_run, NcsConfig};
//! use ncs_core::objectives::{Builtin, ObjectiveSpec};
//!
//! let problem = ObjectiveSpec::builtin(Builtin::Rastrigin, 2);
//! let cfg = NcsConfig::defaults_for(&problem, 500, 42);
//! let record = ncs_run(&problem, &cfg).unwrap();
//! assert!(record.best_value < record.history[0].1);
//! ```

pub mod antenna;
pub mod baselines;
pub mod engine;
pub mod objectives;
pub mod rng;
pub mod stats;

pub use engine::{ncs_run, NcsConfig, RunRecord};
pub use objectives::ObjectiveSpec;
