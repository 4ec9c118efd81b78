//! Follower write-time distributions.
//!
//! A follower receives the update being multicast in a slot only if its write
//! time `T_w` is strictly below the commit time `c`. Everything the analysis
//! needs from the law of `T_w` is its CDF and the survival-power integral
//! `∫₀ᶜ [1 − F(t)]ʳ dt`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH, DEFAULT_TOLERANCE};

/// Law of the time it takes to write one update to one follower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WriteTimeDistribution {
    /// Exponential with the given rate (per time unit).
    Exponential { rate: f64 },
    /// Uniform on `[0, upper]`.
    Uniform { upper: f64 },
    /// Always exactly `value`.
    Deterministic { value: f64 },
}

impl WriteTimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid(format!(
                "exponential rate must be > 0, got {rate}"
            )));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(Error::invalid(format!(
                "uniform upper bound must be > 0, got {upper}"
            )));
        }
        Ok(Self::Uniform { upper })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::invalid(format!(
                "deterministic value must be >= 0, got {value}"
            )));
        }
        Ok(Self::Deterministic { value })
    }

    /// `F_w(t)`. Right-continuous, so a deterministic law has `cdf(d) = 1`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => -(-rate * t).exp_m1(),
            Self::Uniform { upper } => (t / upper).min(1.0),
            Self::Deterministic { value } => {
                if t >= value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `1 − F_w(t)`, without cancellation for the exponential tail.
    pub fn survival(&self, t: f64) -> f64 {
        match *self {
            Self::Exponential { rate } if t >= 0.0 => (-rate * t).exp(),
            _ => 1.0 - self.cdf(t),
        }
    }

    /// Draws one write time.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            Self::Uniform { upper } => rng.random_range(0.0..=upper),
            Self::Deterministic { value } => value,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Uniform { upper } => 0.5 * upper,
            Self::Deterministic { value } => value,
        }
    }

    /// `1 − [1 − F_w(c)]ʳ`: probability that at least one of `r` followers
    /// completes the current slot's write within `c`.
    pub fn any_within(&self, c: f64, r: u32) -> f64 {
        match *self {
            Self::Exponential { rate } => -(-rate * f64::from(r) * c).exp_m1(),
            _ => {
                let p = self.cdf(c);
                if p >= 1.0 {
                    1.0
                } else {
                    -(f64::from(r) * (-p).ln_1p()).exp_m1()
                }
            }
        }
    }

    /// `∫₀ᶜ [1 − F_w(t)]ʳ dt`.
    ///
    /// Closed forms for the exponential and deterministic laws; adaptive
    /// Simpson (absolute tolerance 1e-10) otherwise.
    pub fn survival_power_integral(&self, c: f64, r: u32) -> Result<f64> {
        check_integral_args(c, r)?;
        Ok(match *self {
            Self::Exponential { rate } => {
                let lr = rate * f64::from(r);
                -(-lr * c).exp_m1() / lr
            }
            Self::Deterministic { value } => value.min(c),
            Self::Uniform { .. } => self.integrate_numerically(c, r),
        })
    }

    /// Same integral as [`survival_power_integral`](Self::survival_power_integral)
    /// but always by quadrature, splitting at the law's breakpoint if it lies
    /// inside `(0, c)`.
    pub fn survival_power_integral_quadrature(&self, c: f64, r: u32) -> Result<f64> {
        check_integral_args(c, r)?;
        Ok(self.integrate_numerically(c, r))
    }

    fn integrate_numerically(&self, c: f64, r: u32) -> f64 {
        let integrand = |t: f64| self.survival(t).powi(r as i32);
        let quad = |a: f64, b: f64| {
            adaptive_simpson(integrand, a, b, DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH)
        };
        let breakpoint = match *self {
            Self::Uniform { upper } => Some(upper),
            Self::Deterministic { value } => Some(value),
            Self::Exponential { .. } => None,
        };
        match breakpoint {
            Some(x) if x > 0.0 && x < c => {
                // Left-limit at the step so Simpson never sees the jump.
                let left = adaptive_simpson(
                    |t: f64| {
                        if t < x {
                            integrand(t)
                        } else {
                            integrand(x - f64::EPSILON * x)
                        }
                    },
                    0.0,
                    x,
                    DEFAULT_TOLERANCE,
                    DEFAULT_MAX_DEPTH,
                );
                left + quad(x, c)
            }
            _ => quad(0.0, c),
        }
    }
}

fn check_integral_args(c: f64, r: u32) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!(
            "commit time c must be > 0, got {c}"
        )));
    }
    if r < 1 {
        return Err(Error::invalid("query size r must be >= 1"));
    }
    Ok(())
}

impl fmt::Display for WriteTimeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::Uniform { upper } => write!(f, "uniform:{upper}"),
            Self::Deterministic { value } => write!(f, "det:{value}"),
        }
    }
}

impl FromStr for WriteTimeDistribution {
    type Err = Error;

    /// Parses `exp:RATE`, `uniform:B` or `det:D`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseDistribution(s.to_string());
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "exp" => Self::exponential(value),
            "uniform" => Self::uniform(value),
            "det" => Self::deterministic(value),
            _ => Err(bad()),
        }
    }
}
