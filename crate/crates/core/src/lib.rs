//! Read freshness in leader-based replicated storage.
//!
//! Closed-form average age of information for reads that fan out to `r` of
//! `n` replicas (`l` of which are leaders written sequentially, the rest
//! followers written by multicast), together with a Monte Carlo simulator of
//! the same protocol and a sweep harness over the model parameters.

pub mod analytic;
pub mod dist;
pub mod error;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sim;
pub mod sweep;

pub use analytic::{
    age_breakdown, exact_initial_decrease, initial_decrease_threshold, mean_age,
    mean_age_exponential, mean_age_given_followers, mean_age_given_leader, mean_age_scaled,
    mean_missed_rounds_min, optimal_leader_count, prob_read_hits_leader, prob_read_misses_leaders,
    AgeBreakdown, OptimalLeaders, SystemConfig, TimingModel,
};
pub use dist::WriteTimeDistribution;
pub use error::{Error, Result};
pub use sim::{
    follower_age_at, run as simulate, FollowerState, QueryRecord, SimParams, SimSummary, Simulator,
};
pub use sweep::{
    classify_monotonicity, classify_sequence, figure_preset, run_sweep, Coupling, FigureId,
    FixedParams, IntRange, Monotonicity, SimOptions, SweepMode, SweepParam, SweepRow, SweepSpec,
};
