//! Closed-form average age of a read query.
//!
//! A read fans out to `r` distinct nodes out of `n`, `l` of which are leaders.
//! With probability `Pr{B1}` it reaches a leader and sees age `c + T_a`;
//! otherwise it sees the freshest of `r` followers.

use serde::{Deserialize, Serialize};

use crate::dist::WriteTimeDistribution;
use crate::error::{Error, Result};

/// Replication topology: `n` nodes, `l` of them leaders, reads fan out to `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n: u32,
    pub l: u32,
    pub r: u32,
}

impl SystemConfig {
    pub fn new(n: u32, l: u32, r: u32) -> Result<Self> {
        let cfg = Self { n, l, r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("node count n must be >= 1"));
        }
        if self.l < 1 || self.l > self.n {
            return Err(Error::invalid(format!(
                "leader count must satisfy 1 <= l <= n (l={}, n={})",
                self.l, self.n
            )));
        }
        if self.r < 1 || self.r > self.n {
            return Err(Error::invalid(format!(
                "query size must satisfy 1 <= r <= n (r={}, n={})",
                self.r, self.n
            )));
        }
        Ok(())
    }

    pub fn followers(&self) -> u32 {
        self.n - self.l
    }
}

/// How the commit time `c` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimingModel {
    /// A fixed commit time.
    Explicit { commit: f64 },
    /// Commit time grows with the leader count: `c = l / (k λ)`, where `k` is
    /// the speed of a leader write relative to a follower write.
    Scaled { k: f64, lambda: f64 },
}

impl TimingModel {
    pub fn explicit(commit: f64) -> Result<Self> {
        let t = Self::Explicit { commit };
        t.validate()?;
        Ok(t)
    }

    pub fn scaled(k: f64, lambda: f64) -> Result<Self> {
        let t = Self::Scaled { k, lambda };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Explicit { commit } if !(commit.is_finite() && commit > 0.0) => Err(
                Error::invalid(format!("commit time c must be > 0, got {commit}")),
            ),
            Self::Scaled { k, .. } if !(k.is_finite() && k > 0.0) => Err(Error::invalid(format!(
                "relative speed k must be > 0, got {k}"
            ))),
            Self::Scaled { lambda, .. } if !(lambda.is_finite() && lambda > 0.0) => {
                Err(Error::invalid(format!(
                    "follower write rate lambda must be > 0, got {lambda}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Resolved commit time for a group of `leaders` leaders.
    pub fn commit_time(&self, leaders: u32) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::Explicit { commit } => commit,
            Self::Scaled { k, lambda } => f64::from(leaders) / (k * lambda),
        })
    }
}

/// `C(n−l, r) / C(n, r)`, the probability that a read misses every leader.
///
/// Evaluated as `∏_{i<r} (n−l−i)/(n−i)`; zero when `r > n − l`.
pub fn prob_read_misses_leaders(cfg: &SystemConfig) -> f64 {
    binomial_ratio(cfg.n, cfg.l, cfg.r)
}

/// `Pr{B1}`: probability that a read reaches at least one leader.
pub fn prob_read_hits_leader(cfg: &SystemConfig) -> f64 {
    1.0 - prob_read_misses_leaders(cfg)
}

fn binomial_ratio(n: u32, l: u32, r: u32) -> f64 {
    if r > n - l {
        return 0.0;
    }
    (0..r)
        .map(|i| f64::from(n - l - i) / f64::from(n - i))
        .product()
}

/// `E[Δ | B1] = 3c/2`: a leader always holds the update committed at the
/// start of the slot, and the read lands uniformly inside the slot.
pub fn mean_age_given_leader(c: f64) -> f64 {
    1.5 * c
}

/// `E[Z_min | B2]`, the expected number of missed update rounds at the
/// freshest of `r` followers.
pub fn mean_missed_rounds_min(dist: &WriteTimeDistribution, c: f64, r: u32) -> Result<f64> {
    let (integral, hit) = follower_terms(dist, c, r)?;
    Ok(1.0 + integral / c / hit)
}

/// `E[Δ | B2] = 3c/2 + ∫₀ᶜ[1−F_w]ʳ / (1 − [1−F_w(c)]ʳ)`.
pub fn mean_age_given_followers(
    cfg: &SystemConfig,
    dist: &WriteTimeDistribution,
    c: f64,
) -> Result<f64> {
    cfg.validate()?;
    let (integral, hit) = follower_terms(dist, c, cfg.r)?;
    Ok(1.5 * c + integral / hit)
}

fn follower_terms(dist: &WriteTimeDistribution, c: f64, r: u32) -> Result<(f64, f64)> {
    let integral = dist.survival_power_integral(c, r)?;
    if dist.cdf(c) <= 0.0 {
        return Err(Error::ModelDegenerate(format!(
            "F_w(c) = 0 for {dist} at c = {c}: followers never complete a write within a slot"
        )));
    }
    Ok((integral, dist.any_within(c, r)))
}

/// Per-event decomposition of the mean read age.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgeBreakdown {
    pub commit_time: f64,
    pub prob_b1: f64,
    pub mean_age_b1: f64,
    /// Absent when every read reaches a leader (`r > n − l`).
    pub mean_age_b2: Option<f64>,
    pub mean_age: f64,
}

/// Mean read age for an arbitrary follower write-time law, by total
/// expectation over the leader / no-leader events.
pub fn age_breakdown(
    cfg: &SystemConfig,
    dist: &WriteTimeDistribution,
    timing: &TimingModel,
) -> Result<AgeBreakdown> {
    cfg.validate()?;
    let c = timing.commit_time(cfg.l)?;
    let miss = prob_read_misses_leaders(cfg);
    let age_b1 = mean_age_given_leader(c);
    let age_b2 = if miss > 0.0 {
        Some(mean_age_given_followers(cfg, dist, c)?)
    } else {
        None
    };
    let mean_age = match age_b2 {
        Some(b2) => (1.0 - miss) * age_b1 + miss * b2,
        None => age_b1,
    };
    Ok(AgeBreakdown {
        commit_time: c,
        prob_b1: 1.0 - miss,
        mean_age_b1: age_b1,
        mean_age_b2: age_b2,
        mean_age,
    })
}

/// `E[Δ]` for an arbitrary follower law.
pub fn mean_age(
    cfg: &SystemConfig,
    dist: &WriteTimeDistribution,
    timing: &TimingModel,
) -> Result<f64> {
    age_breakdown(cfg, dist, timing).map(|b| b.mean_age)
}

/// Closed form for exponential follower writes:
/// `E[Δ] = 3c/2 + C(n−l,r)/C(n,r) · 1/(λr)`.
pub fn mean_age_exponential(cfg: &SystemConfig, rate: f64, c: f64) -> Result<f64> {
    cfg.validate()?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid(format!("rate must be > 0, got {rate}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!(
            "commit time c must be > 0, got {c}"
        )));
    }
    Ok(1.5 * c + prob_read_misses_leaders(cfg) / (rate * f64::from(cfg.r)))
}

/// Mean age under `c = l/(kλ)` with exponential follower writes:
/// `E[Δ] = (1/λ)[3l/(2k) + C(n−l,r)/(r C(n,r))]`.
pub fn mean_age_scaled(n: u32, l: u32, r: u32, k: f64, lambda: f64) -> Result<f64> {
    let cfg = SystemConfig::new(n, l, r)?;
    TimingModel::scaled(k, lambda)?;
    let bracket = exact_scaled_bracket(n, l, r, k).unwrap_or_else(|| {
        let leader_term = 3.0 * f64::from(l) / (2.0 * k);
        let follower_term = prob_read_misses_leaders(&cfg) / f64::from(r);
        leader_term + follower_term
    });
    Ok(bracket / lambda)
}

/// `3l/(2k) + C(n−l,r)/(r C(n,r))` as `(3lrQ + 2kP) / (2krQ)` with
/// `P = ∏(n−l−i)`, `Q = ∏(n−i)`, when `k` is an integer and every term is
/// exact in an `f64`. The single division is then correctly rounded.
fn exact_scaled_bracket(n: u32, l: u32, r: u32, k: f64) -> Option<f64> {
    const EXACT: u128 = 1 << 53;
    if k.fract() != 0.0 || k >= EXACT as f64 {
        return None;
    }
    let (k, l, r) = (k as u128, u128::from(l), u128::from(r));
    let (mut p, mut q) = (0u128, 1u128);
    if r <= u128::from(n) - l {
        p = 1;
        for i in 0..r {
            p = p.checked_mul(u128::from(n) - l - i)?;
            q = q.checked_mul(u128::from(n) - i)?;
        }
    }
    let num = (3 * l * r)
        .checked_mul(q)?
        .checked_add((2 * k).checked_mul(p)?)?;
    let den = (2 * k * r).checked_mul(q)?;
    (num <= EXACT && den <= EXACT).then(|| num as f64 / den as f64)
}

/// Smallest integer `k` from the closed-form threshold
/// `⌈3n(n−1) / (2(n−r))⌉` above which adding a second leader lowers the age.
pub fn initial_decrease_threshold(n: u32, r: u32) -> Result<u64> {
    if r < 1 || r >= n {
        return Err(Error::invalid(format!(
            "threshold needs 1 <= r < n (r={r}, n={n})"
        )));
    }
    let (n, r) = (u64::from(n), u64::from(r));
    let num = 3 * n * (n - 1);
    let den = 2 * (n - r);
    Ok(num.div_ceil(den))
}

/// Whether going from one leader to two strictly lowers the scaled mean age.
pub fn exact_initial_decrease(n: u32, r: u32, k: f64, lambda: f64) -> Result<bool> {
    if n < 2 {
        return Err(Error::invalid("need n >= 2 to compare one and two leaders"));
    }
    Ok(mean_age_scaled(n, 2, r, k, lambda)? < mean_age_scaled(n, 1, r, k, lambda)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalLeaders {
    pub leaders: u32,
    pub age: f64,
}

/// Exhaustive minimisation of the scaled mean age over `l ∈ 1..=n`.
/// Ties go to the smaller leader count.
pub fn optimal_leader_count(n: u32, r: u32, k: f64, lambda: f64) -> Result<OptimalLeaders> {
    let mut best: Option<OptimalLeaders> = None;
    for l in 1..=n {
        let age = mean_age_scaled(n, l, r, k, lambda)?;
        if best.is_none_or(|b| age < b.age) {
            best = Some(OptimalLeaders { leaders: l, age });
        }
    }
    best.ok_or_else(|| Error::invalid("node count n must be >= 1"))
}
