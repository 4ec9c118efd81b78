//! Parameter sweeps and the figure presets built on them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, SystemConfig, TimingModel};
use crate::dist::WriteTimeDistribution;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sim::{self, SimParams};

/// The parameter a sweep walks over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    L,
    N,
    K,
    R,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::L => "l",
            Self::N => "n",
            Self::K => "k",
            Self::R => "r",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l" => Ok(Self::L),
            "n" => Ok(Self::N),
            "k" => Ok(Self::K),
            "r" => Ok(Self::R),
            _ => Err(Error::invalid(format!(
                "cannot vary `{s}` (expected l, n, k or r)"
            ))),
        }
    }
}

/// Inclusive integer range with a positive step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub from: u32,
    pub to: u32,
    pub step: u32,
}

impl IntRange {
    pub fn new(from: u32, to: u32, step: u32) -> Self {
        Self { from, to, step }
    }

    pub fn values(&self) -> Result<Vec<u32>> {
        if self.step == 0 {
            return Err(Error::invalid("sweep step must be >= 1"));
        }
        if self.from > self.to {
            return Err(Error::EmptyRange(format!("{}..={}", self.from, self.to)));
        }
        Ok((self.from..=self.to).step_by(self.step as usize).collect())
    }
}

/// `r = base + ⌊n / divisor⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling {
    pub base: u32,
    pub divisor: u32,
}

impl Coupling {
    pub fn new(base: u32, divisor: u32) -> Result<Self> {
        if divisor == 0 {
            return Err(Error::invalid("coupling divisor must be >= 1"));
        }
        Ok(Self { base, divisor })
    }

    pub fn query_size(&self, n: u32) -> u32 {
        self.base + n / self.divisor
    }
}

impl FromStr for Coupling {
    type Err = Error;

    /// Parses `A:B` as `r = A + ⌊n/B⌋`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse coupling `{s}` (expected A:B)"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Self::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Analytic,
    Simulate,
    Both,
}

impl SweepMode {
    pub fn analytic(&self) -> bool {
        matches!(self, Self::Analytic | Self::Both)
    }

    pub fn simulate(&self) -> bool {
        matches!(self, Self::Simulate | Self::Both)
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Simulate => "simulate",
            Self::Both => "both",
        })
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "simulate" => Ok(Self::Simulate),
            "both" => Ok(Self::Both),
            _ => Err(Error::invalid(format!(
                "unknown mode `{s}` (expected analytic, simulate or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub query_slots: u64,
    /// Master seed; point `i` runs on `derive_seed(seed, i)`.
    pub seed: u64,
}

/// Parameters held fixed across a sweep. The varied one is overwritten per
/// point. Commit time always follows `c = l / (kλ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub n: u32,
    pub l: u32,
    pub r: u32,
    pub k: f64,
    pub lambda: f64,
    /// Follower write-time law; exponential(λ) when absent.
    pub dist: Option<WriteTimeDistribution>,
}

impl FixedParams {
    pub fn dist(&self) -> Result<WriteTimeDistribution> {
        match self.dist {
            None => WriteTimeDistribution::exponential(self.lambda),
            Some(WriteTimeDistribution::Exponential { rate }) if rate != self.lambda => Err(Error::invalid(format!(
                "exponential rate {rate} disagrees with lambda {}; one rate drives both timing and follower writes",
                self.lambda
            ))),
            Some(d) => Ok(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Label carried into every row, e.g. `k=100`.
    pub curve: String,
    pub vary: SweepParam,
    pub range: IntRange,
    pub fixed: FixedParams,
    pub coupling: Option<Coupling>,
    pub mode: SweepMode,
    pub sim: Option<SimOptions>,
}

impl SweepSpec {
    pub fn with_simulation(mut self, mode: SweepMode, sim: SimOptions) -> Self {
        self.mode = mode;
        self.sim = Some(sim);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.fixed.lambda.is_finite() && self.fixed.lambda > 0.0) {
            return Err(Error::invalid(format!(
                "lambda must be > 0, got {}",
                self.fixed.lambda
            )));
        }
        if self.vary != SweepParam::K && !(self.fixed.k.is_finite() && self.fixed.k > 0.0) {
            return Err(Error::invalid(format!(
                "k must be > 0, got {}",
                self.fixed.k
            )));
        }
        if self.mode.simulate() && self.sim.is_none() {
            return Err(Error::invalid("simulation mode needs query_slots and seed"));
        }
        if let Some(Coupling { divisor: 0, .. }) = self.coupling {
            return Err(Error::invalid("coupling divisor must be >= 1"));
        }
        self.fixed.dist()?;
        Ok(())
    }

    /// Resolved `(n, l, r, k)` for one value of the varied parameter.
    fn point(&self, value: u32) -> (u32, u32, u32, f64) {
        let FixedParams {
            mut n,
            mut l,
            mut r,
            mut k,
            ..
        } = self.fixed;
        match self.vary {
            SweepParam::L => l = value,
            SweepParam::N => n = value,
            SweepParam::K => k = f64::from(value),
            SweepParam::R => r = value,
        }
        if let Some(c) = self.coupling {
            r = c.query_size(n);
        }
        (n, l, r, k)
    }
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub curve: String,
    pub vary: SweepParam,
    pub n: u32,
    pub l: u32,
    pub r: u32,
    pub k: f64,
    pub lambda: f64,
    /// Absent on skipped rows whose timing could not be resolved.
    pub c: Option<f64>,
    pub mode: SweepMode,
    pub analytic_age: Option<f64>,
    pub sim_age: Option<f64>,
    pub sim_stderr: Option<f64>,
    /// Why the point was skipped, if it was.
    pub skipped: Option<String>,
}

impl SweepRow {
    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    /// `|analytic − simulated|` when both are present.
    pub fn discrepancy(&self) -> Option<f64> {
        Some((self.analytic_age? - self.sim_age?).abs())
    }

    /// Whether the simulated age is within `max(3·stderr, 1%)` of the
    /// analytic one. `None` unless both are present.
    pub fn agrees(&self) -> Option<bool> {
        let tol = sim::agreement_tolerance(self.sim_stderr?, self.analytic_age?);
        Some(self.discrepancy()? <= tol)
    }

    /// The age used for classification: analytic if present, else simulated.
    pub fn age(&self) -> Option<f64> {
        self.analytic_age.or(self.sim_age)
    }
}

/// Evaluates every point of `spec`, in ascending order of the varied
/// parameter. Invalid points (e.g. `r > n`) yield rows marked as skipped.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let values = spec.range.values()?;
    let dist = spec.fixed.dist()?;
    let rows = values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| evaluate_point(spec, &dist, index as u64, value))
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().all(SweepRow::is_skipped) {
        return Err(Error::AllPointsSkipped);
    }
    Ok(rows)
}

fn evaluate_point(
    spec: &SweepSpec,
    dist: &WriteTimeDistribution,
    index: u64,
    value: u32,
) -> Result<SweepRow> {
    let (n, l, r, k) = spec.point(value);
    let lambda = spec.fixed.lambda;
    let mut row = SweepRow {
        curve: spec.curve.clone(),
        vary: spec.vary,
        n,
        l,
        r,
        k,
        lambda,
        c: None,
        mode: spec.mode,
        analytic_age: None,
        sim_age: None,
        sim_stderr: None,
        skipped: None,
    };
    let resolved = SystemConfig::new(n, l, r).and_then(|cfg| {
        let timing = TimingModel::scaled(k, lambda)?;
        Ok((cfg, timing, timing.commit_time(l)?))
    });
    let (cfg, timing, c) = match resolved {
        Ok(v) => v,
        Err(Error::InvalidParameter(why)) => {
            row.skipped = Some(why);
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    row.c = Some(c);
    if spec.mode.analytic() {
        row.analytic_age = Some(match dist {
            WriteTimeDistribution::Exponential { .. } => {
                analytic::mean_age_scaled(n, l, r, k, lambda)?
            }
            _ => analytic::mean_age(&cfg, dist, &timing)?,
        });
    }
    if spec.mode.simulate() {
        let opts = spec.sim.expect("validated");
        let params = SimParams::new(
            cfg,
            timing,
            *dist,
            opts.query_slots,
            derive_seed(opts.seed, index),
        );
        let summary = sim::run(&params)?;
        row.sim_age = Some(summary.mean_age);
        row.sim_stderr = Some(summary.stderr_age);
    }
    Ok(row)
}

/// Shape of an age sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    /// Strictly decreasing, then strictly increasing.
    InteriorMinimum,
    Flat,
    Other,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Increasing => "increasing",
            Self::Decreasing => "decreasing",
            Self::InteriorMinimum => "interior_minimum",
            Self::Flat => "flat",
            Self::Other => "other",
        })
    }
}

/// Differences within this are treated as equal.
pub const FLATNESS_TOLERANCE: f64 = 1e-9;

/// Classifies a sequence of at least three values.
pub fn classify_sequence(values: &[f64]) -> Result<Monotonicity> {
    if values.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: values.len(),
        });
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if max - min <= FLATNESS_TOLERANCE {
        return Ok(Monotonicity::Flat);
    }
    let steps: Vec<i8> = values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d > FLATNESS_TOLERANCE {
                1
            } else if d < -FLATNESS_TOLERANCE {
                -1
            } else {
                0
            }
        })
        .collect();
    let descending = steps.iter().take_while(|&&s| s == -1).count();
    let rest = &steps[descending..];
    Ok(if rest.is_empty() {
        Monotonicity::Decreasing
    } else if rest.iter().all(|&s| s == 1) {
        if descending == 0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::InteriorMinimum
        }
    } else {
        Monotonicity::Other
    })
}

/// Classifies the ages of the non-skipped rows.
pub fn classify_monotonicity(rows: &[SweepRow]) -> Result<Monotonicity> {
    let ages: Vec<f64> = rows
        .iter()
        .filter(|r| !r.is_skipped())
        .filter_map(SweepRow::age)
        .collect();
    classify_sequence(&ages)
}

/// The four numerical figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [Self::Fig2, Self::Fig3, Self::Fig4, Self::Fig5];

    /// Free-form notes recorded next to a figure's output.
    pub fn notes(&self) -> &'static [&'static str] {
        match self {
            Self::Fig2 => &["age vs leader count, n=50, r=1, lambda=1"],
            Self::Fig3 => &[
                "age vs leader count, n=50, r=5, lambda=1",
                "the published caption reads r=4 while the text uses r=5; this preset follows the text",
            ],
            Self::Fig4 => &[
                "age vs node count, r=10, l=5, lambda=1",
                "k per curve is not given for this figure; curves use k in {50, 100, 150}",
            ],
            Self::Fig5 => &[
                "age vs node count with r = 10 + floor(n/20), l=5, lambda=1",
                "k per curve is not given for this figure; curves use k in {50, 100, 150}",
            ],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            _ => Err(Error::UnknownFigure(s.to_string())),
        }
    }
}

const PRESET_SPEEDS: [u32; 3] = [50, 100, 150];

/// One analytic sweep spec per curve of the given figure.
pub fn figure_preset(id: FigureId) -> Vec<SweepSpec> {
    PRESET_SPEEDS
        .iter()
        .map(|&k| {
            let (vary, range, n, l, r, coupling) = match id {
                FigureId::Fig2 => (SweepParam::L, IntRange::new(1, 45, 1), 50, 1, 1, None),
                FigureId::Fig3 => (SweepParam::L, IntRange::new(1, 45, 1), 50, 1, 5, None),
                FigureId::Fig4 => (SweepParam::N, IntRange::new(20, 200, 20), 20, 5, 10, None),
                FigureId::Fig5 => (
                    SweepParam::N,
                    IntRange::new(20, 200, 20),
                    20,
                    5,
                    10,
                    Some(Coupling {
                        base: 10,
                        divisor: 20,
                    }),
                ),
            };
            SweepSpec {
                curve: format!("k={k}"),
                vary,
                range,
                fixed: FixedParams {
                    n,
                    l,
                    r,
                    k: f64::from(k),
                    lambda: 1.0,
                    dist: None,
                },
                coupling,
                mode: SweepMode::Analytic,
                sim: None,
            }
        })
        .collect()
}

/// Parses an id, then builds its preset.
pub fn figure_preset_by_name(id: &str) -> Result<Vec<SweepSpec>> {
    Ok(figure_preset(id.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(vary: SweepParam, range: IntRange, n: u32, l: u32, r: u32, k: f64) -> SweepSpec {
        SweepSpec {
            curve: "test".into(),
            vary,
            range,
            fixed: FixedParams {
                n,
                l,
                r,
                k,
                lambda: 1.0,
                dist: None,
            },
            coupling: None,
            mode: SweepMode::Analytic,
            sim: None,
        }
    }

    fn ages(rows: &[SweepRow]) -> Vec<f64> {
        rows.iter().map(|r| r.analytic_age.unwrap()).collect()
    }

    #[test]
    fn leader_sweep_follows_linear_law() {
        let rows = run_sweep(&spec(
            SweepParam::L,
            IntRange::new(1, 45, 1),
            50,
            1,
            1,
            50.0,
        ))
        .unwrap();
        assert_eq!(rows.len(), 45);
        for (row, l) in rows.iter().zip(1..) {
            assert_eq!(row.l, l);
            let expected = 1.0 + (75.0 / 50.0 - 1.0) * f64::from(l) / 50.0;
            assert!((row.analytic_age.unwrap() - expected).abs() < 1e-12);
        }
        assert_eq!(
            classify_monotonicity(&rows).unwrap(),
            Monotonicity::Increasing
        );
    }

    #[test]
    fn fig3_shape_has_interior_minimum() {
        let rows = run_sweep(&spec(
            SweepParam::L,
            IntRange::new(1, 45, 1),
            50,
            1,
            5,
            150.0,
        ))
        .unwrap();
        let a = ages(&rows);
        let argmin = a
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .unwrap()
            .0;
        assert!(argmin > 0 && argmin < a.len() - 1);
        assert_eq!(
            classify_monotonicity(&rows).unwrap(),
            Monotonicity::InteriorMinimum
        );
    }

    #[test]
    fn node_sweep_increasing() {
        let rows = run_sweep(&spec(
            SweepParam::N,
            IntRange::new(20, 200, 20),
            20,
            5,
            10,
            100.0,
        ))
        .unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(
            rows.iter().map(|r| r.n).collect::<Vec<_>>(),
            (20..=200).step_by(20).collect::<Vec<_>>()
        );
        assert_eq!(
            classify_monotonicity(&rows).unwrap(),
            Monotonicity::Increasing
        );
    }

    #[test]
    fn classification_examples() {
        let run = |k| {
            classify_monotonicity(
                &run_sweep(&spec(SweepParam::L, IntRange::new(1, 45, 1), 50, 1, 1, k)).unwrap(),
            )
        };
        assert_eq!(run(75.0).unwrap(), Monotonicity::Flat);
        assert_eq!(run(150.0).unwrap(), Monotonicity::Decreasing);
        let fig3 = run_sweep(&spec(
            SweepParam::L,
            IntRange::new(1, 45, 1),
            50,
            1,
            5,
            150.0,
        ))
        .unwrap();
        assert_eq!(
            classify_monotonicity(&fig3).unwrap(),
            Monotonicity::InteriorMinimum
        );
    }

    #[test]
    fn classify_sequence_cases() {
        assert_eq!(
            classify_sequence(&[1.0, 2.0, 3.0]).unwrap(),
            Monotonicity::Increasing
        );
        assert_eq!(
            classify_sequence(&[3.0, 2.0, 1.0]).unwrap(),
            Monotonicity::Decreasing
        );
        assert_eq!(
            classify_sequence(&[3.0, 1.0, 2.0, 5.0]).unwrap(),
            Monotonicity::InteriorMinimum
        );
        assert_eq!(
            classify_sequence(&[1.0, 1.0 + 1e-12, 1.0]).unwrap(),
            Monotonicity::Flat
        );
        assert_eq!(
            classify_sequence(&[1.0, 3.0, 2.0]).unwrap(),
            Monotonicity::Other
        );
        assert_eq!(
            classify_sequence(&[3.0, 1.0, 1.0, 2.0]).unwrap(),
            Monotonicity::Other
        );
        assert_eq!(
            classify_sequence(&[1.0, 2.0, 2.0]).unwrap(),
            Monotonicity::Other
        );
        assert_eq!(
            classify_sequence(&[3.0, 1.0, 2.0, 1.5]).unwrap(),
            Monotonicity::Other
        );
        assert_eq!(
            classify_sequence(&[1.0, 2.0]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        );
    }

    #[test]
    fn invalid_points_are_marked_not_dropped() {
        let rows = run_sweep(&spec(
            SweepParam::R,
            IntRange::new(8, 12, 1),
            10,
            2,
            1,
            50.0,
        ))
        .unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[..3].iter().all(|r| !r.is_skipped()));
        assert!(rows[3..]
            .iter()
            .all(|r| r.is_skipped() && r.analytic_age.is_none()));
    }

    #[test]
    fn sweep_errors() {
        let empty = spec(SweepParam::L, IntRange::new(5, 4, 1), 50, 1, 1, 50.0);
        assert!(matches!(run_sweep(&empty), Err(Error::EmptyRange(_))));
        let skipped = spec(SweepParam::L, IntRange::new(60, 70, 1), 50, 1, 1, 50.0);
        assert_eq!(run_sweep(&skipped), Err(Error::AllPointsSkipped));
        let no_sim = SweepSpec {
            mode: SweepMode::Both,
            ..spec(SweepParam::L, IntRange::new(1, 3, 1), 50, 1, 1, 50.0)
        };
        assert!(matches!(
            run_sweep(&no_sim),
            Err(Error::InvalidParameter(_))
        ));
        let mut rate_clash = spec(SweepParam::L, IntRange::new(1, 3, 1), 50, 1, 1, 50.0);
        rate_clash.fixed.dist = Some(WriteTimeDistribution::exponential(2.0).unwrap());
        assert!(matches!(
            run_sweep(&rate_clash),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn coupling_sets_query_size() {
        let mut s = spec(SweepParam::N, IntRange::new(20, 200, 20), 20, 5, 10, 100.0);
        s.coupling = Some("10:20".parse().unwrap());
        let rows = run_sweep(&s).unwrap();
        for row in &rows {
            assert_eq!(row.r, 10 + row.n / 20);
        }
        assert!("10".parse::<Coupling>().is_err());
        assert!("10:0".parse::<Coupling>().is_err());
    }

    #[test]
    fn vary_k_and_range_step() {
        let rows = run_sweep(&spec(
            SweepParam::K,
            IntRange::new(50, 150, 25),
            50,
            10,
            1,
            1.0,
        ))
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.k).collect::<Vec<_>>(),
            vec![50.0, 75.0, 100.0, 125.0, 150.0]
        );
        assert!((rows[1].analytic_age.unwrap() - 1.0).abs() < 1e-12);
        assert!(IntRange::new(1, 5, 0).values().is_err());
    }

    #[test]
    fn simulated_sweep_is_order_stable_and_agrees() {
        let s = spec(SweepParam::L, IntRange::new(2, 8, 3), 20, 1, 2, 20.0).with_simulation(
            SweepMode::Both,
            SimOptions {
                query_slots: 20_000,
                seed: 5,
            },
        );
        let a = run_sweep(&s).unwrap();
        let b = run_sweep(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.l).collect::<Vec<_>>(), vec![2, 5, 8]);
        for row in &a {
            assert_eq!(row.agrees(), Some(true), "{row:?}");
        }
    }

    #[test]
    fn non_exponential_followers_use_generic_path() {
        let mut s = spec(SweepParam::L, IntRange::new(1, 5, 1), 20, 1, 2, 40.0);
        s.fixed.dist = Some(WriteTimeDistribution::uniform(0.2).unwrap());
        let rows = run_sweep(&s).unwrap();
        for row in rows {
            let cfg = SystemConfig::new(20, row.l, 2).unwrap();
            let expected = analytic::mean_age(
                &cfg,
                &s.fixed.dist.unwrap(),
                &TimingModel::scaled(40.0, 1.0).unwrap(),
            )
            .unwrap();
            assert_eq!(row.analytic_age, Some(expected));
        }
    }

    #[test]
    fn presets() {
        let fig2 = figure_preset(FigureId::Fig2);
        assert_eq!(fig2.len(), 3);
        assert!(fig2.iter().all(|s| s.vary == SweepParam::L
            && s.range.values().unwrap().len() == 45
            && s.fixed.r == 1));
        let fig3 = figure_preset(FigureId::Fig3);
        assert!(fig3.iter().all(|s| s.fixed.r == 5));
        let fig4 = figure_preset(FigureId::Fig4);
        assert!(fig4
            .iter()
            .all(|s| s.vary == SweepParam::N && s.fixed.r == 10 && s.coupling.is_none()));
        let fig5 = figure_preset(FigureId::Fig5);
        assert!(fig5.iter().all(|s| s.coupling
            == Some(Coupling {
                base: 10,
                divisor: 20
            })));
        assert_eq!(fig5[0].range, IntRange::new(20, 200, 20));
        assert_eq!(
            figure_preset_by_name("fig6"),
            Err(Error::UnknownFigure("fig6".into()))
        );
    }
}
