//! Acceptance suite. Each test covers one criterion and prints one line per
//! check plus a final PASS/FAIL line; run with
//! `cargo test -p freshness-core --test acceptance -- --nocapture`.

use freshness_core::analytic::{self, SystemConfig, TimingModel};
use freshness_core::dist::WriteTimeDistribution;
use freshness_core::rng::{derive_seed, seeded};
use freshness_core::sim::{
    self, agreement_tolerance, default_warmup, ReplicaGroup, SimParams, Simulator,
};
use freshness_core::sweep::{
    classify_monotonicity, run_sweep, Coupling, FixedParams, IntRange, Monotonicity, SweepMode,
    SweepParam, SweepSpec,
};
use rayon::prelude::*;

/// Collects named checks and reports them.
struct Criterion {
    id: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Self {
            id,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        println!(
            "[{}] {} {}",
            self.id,
            if ok { "ok  " } else { "FAIL" },
            what
        );
        if !ok {
            self.failures.push(what);
        }
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{} {verdict}", self.id);
        assert!(
            self.failures.is_empty(),
            "{} failed:\n{}",
            self.id,
            self.failures.join("\n")
        );
    }
}

fn exp1() -> WriteTimeDistribution {
    WriteTimeDistribution::exponential(1.0).unwrap()
}

fn analytic_leader_sweep(r: u32, k: f64) -> Vec<freshness_core::SweepRow> {
    run_sweep(&SweepSpec {
        curve: format!("k={k}"),
        vary: SweepParam::L,
        range: IntRange::new(1, 45, 1),
        fixed: FixedParams {
            n: 50,
            l: 1,
            r,
            k,
            lambda: 1.0,
            dist: None,
        },
        coupling: None,
        mode: SweepMode::Analytic,
        sim: None,
    })
    .unwrap()
}

#[test]
fn a1_closed_form_three_way_agreement() {
    const SLOTS: u64 = 100_000;
    let mut grid = Vec::new();
    for l in [1, 5, 10, 25] {
        for r in [1, 4] {
            for k in [50.0, 100.0, 150.0] {
                grid.push((l, r, k));
            }
        }
    }
    let results: Vec<_> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(l, r, k))| {
            let cfg = SystemConfig::new(50, l, r).unwrap();
            let timing = TimingModel::scaled(k, 1.0).unwrap();
            let c = timing.commit_time(l).unwrap();
            let closed = analytic::mean_age_exponential(&cfg, 1.0, c).unwrap();
            let generic = analytic::mean_age(&cfg, &exp1(), &timing).unwrap();
            let summary = sim::run(&SimParams::new(
                cfg,
                timing,
                exp1(),
                SLOTS,
                derive_seed(0xA1, i as u64),
            ))
            .unwrap();
            (l, r, k, closed, generic, summary)
        })
        .collect();

    let mut a1 = Criterion::new("A1");
    for (l, r, k, closed, generic, s) in results {
        let rel = (generic - closed).abs() / closed;
        a1.check(rel <= 1e-9, format!("n=50 l={l} r={r} k={k}: generic {generic:.12} vs closed {closed:.12} (rel {rel:.1e})"));
        let tol = agreement_tolerance(s.stderr_age, closed);
        let diff = (s.mean_age - closed).abs();
        a1.check(
            diff <= tol,
            format!(
                "n=50 l={l} r={r} k={k}: sim {:.6} ± {:.6} vs closed {closed:.6} (|diff| {diff:.2e} <= tol {tol:.2e})",
                s.mean_age, s.stderr_age
            ),
        );
    }
    a1.finish();
}

#[test]
fn a2_conditional_ages() {
    let cfg = SystemConfig::new(50, 5, 4).unwrap();
    let timing = TimingModel::scaled(100.0, 1.0).unwrap();
    let c = timing.commit_time(cfg.l).unwrap();
    let dists = [
        exp1(),
        WriteTimeDistribution::uniform(2.0 * c).unwrap(),
        WriteTimeDistribution::deterministic(0.5 * c).unwrap(),
    ];
    let mut a2 = Criterion::new("A2");
    for (i, dist) in dists.into_iter().enumerate() {
        let s = sim::run(&SimParams::new(
            cfg,
            timing,
            dist,
            100_000,
            derive_seed(0xA2, i as u64),
        ))
        .unwrap();

        let b1_expected = analytic::mean_age_given_leader(c);
        let b1 = s.mean_age_b1.unwrap();
        let rel = (b1 - b1_expected).abs() / b1_expected;
        a2.check(
            rel <= 0.01,
            format!("{dist}: E[age|B1] sim {b1:.6} vs 3c/2 = {b1_expected:.6} (rel {rel:.2e})"),
        );

        // Reference by quadrature regardless of the law.
        let integral = dist.survival_power_integral_quadrature(c, cfg.r).unwrap();
        let b2_expected = 1.5 * c + integral / dist.any_within(c, cfg.r);
        let b2 = s.mean_age_b2.unwrap();
        let tol = agreement_tolerance(s.stderr_b2.unwrap(), b2_expected);
        a2.check(
            (b2 - b2_expected).abs() <= tol,
            format!("{dist}: E[age|B2] sim {b2:.6} ± {:.6} vs quadrature {b2_expected:.6} (tol {tol:.2e})", s.stderr_b2.unwrap()),
        );
    }
    a2.finish();
}

#[test]
fn a3_linear_regimes_for_single_node_reads() {
    let mut a3 = Criterion::new("A3");
    for (k, expected) in [
        (50.0, Monotonicity::Increasing),
        (75.0, Monotonicity::Flat),
        (150.0, Monotonicity::Decreasing),
    ] {
        let rows = analytic_leader_sweep(1, k);
        let got = classify_monotonicity(&rows).unwrap();
        a3.check(
            got == expected,
            format!("n=50 r=1 k={k}: {got} (expected {expected})"),
        );
        if k == 75.0 {
            let off: Vec<_> = rows
                .iter()
                .filter(|r| r.analytic_age != Some(1.0))
                .map(|r| (r.l, r.analytic_age))
                .collect();
            a3.check(
                off.is_empty(),
                format!("k=75 ages all exactly 1.0 (exceptions: {off:?})"),
            );
        }
    }
    a3.finish();
}

#[test]
fn a4_interior_minimum_for_larger_reads() {
    let mut a4 = Criterion::new("A4");
    for (k, expected) in [
        (150.0, Monotonicity::InteriorMinimum),
        (50.0, Monotonicity::Increasing),
    ] {
        let got = classify_monotonicity(&analytic_leader_sweep(5, k)).unwrap();
        a4.check(
            got == expected,
            format!("n=50 r=5 k={k}: {got} (expected {expected})"),
        );
    }
    a4.finish();
}

/// Largest `k` in `70..=90` at which adding a second leader does not lower the age.
fn exact_boundary(r: u32) -> Option<u32> {
    (70..=90)
        .filter(|&k| !analytic::exact_initial_decrease(50, r, f64::from(k), 1.0).unwrap())
        .max()
}

#[test]
fn a5_threshold_formula() {
    let mut a5 = Criterion::new("A5");
    let t5 = analytic::initial_decrease_threshold(50, 5).unwrap();
    let t1 = analytic::initial_decrease_threshold(50, 1).unwrap();
    a5.check(
        t5 == 82,
        format!("threshold(n=50, r=5) = {t5} (expected 82)"),
    );
    a5.check(
        t1 == 75,
        format!("threshold(n=50, r=1) = {t1} (expected 75)"),
    );
    for (r, threshold) in [(1, t1), (5, t5)] {
        let flags: String = (70..=90)
            .map(|k| {
                if analytic::exact_initial_decrease(50, r, f64::from(k), 1.0).unwrap() {
                    '+'
                } else {
                    '.'
                }
            })
            .collect();
        let boundary = exact_boundary(r);
        println!("[A5] r={r}: exact first-step decrease over k=70..90: {flags}; last non-decreasing k = {boundary:?}; formula threshold {threshold}");
        a5.check(
            boundary.is_some(),
            format!("r={r}: boundary found inside 70..90"),
        );
    }
    a5.finish();
}

/// The documented finding that the exact boundary sits at k = 75 for both
/// query sizes.
#[test]
fn a5_exact_boundary_finding() {
    let mut a5 = Criterion::new("A5-finding");
    for r in [1, 5] {
        let boundary = exact_boundary(r);
        a5.check(
            boundary == Some(75),
            format!("r={r}: exact boundary {boundary:?} (expected Some(75))"),
        );
    }
    a5.finish();
}

#[test]
fn a6_growth_and_plateau_in_node_count() {
    let mut a6 = Criterion::new("A6");
    let spec = |coupling: Option<Coupling>, step| SweepSpec {
        curve: "k=100".into(),
        vary: SweepParam::N,
        range: IntRange::new(20, 200, step),
        fixed: FixedParams {
            n: 20,
            l: 5,
            r: 10,
            k: 100.0,
            lambda: 1.0,
            dist: None,
        },
        coupling,
        mode: SweepMode::Analytic,
        sim: None,
    };
    for step in [20, 1] {
        let got = classify_monotonicity(&run_sweep(&spec(None, step)).unwrap()).unwrap();
        a6.check(
            got == Monotonicity::Increasing,
            format!("r=10 fixed, n=20..200 step {step}: {got}"),
        );
    }
    let rows = run_sweep(&spec(Some(Coupling::new(10, 20).unwrap()), 20)).unwrap();
    let at = |n| {
        rows.iter()
            .find(|r| r.n == n)
            .and_then(|r| r.analytic_age)
            .unwrap()
    };
    let (a100, a200) = (at(100), at(200));
    a6.check(
        a200 <= 1.05 * a100,
        format!(
            "r=10+n/20: age(200) {a200:.6} <= 1.05 × age(100) {a100:.6} (ratio {:.4})",
            a200 / a100
        ),
    );
    a6.finish();
}

/// Max gap between an empirical CDF and `cdf` at the probe points.
fn ks_at(samples: &mut [f64], probes: impl Iterator<Item = f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    probes
        .map(|p| (samples.partition_point(|&x| x <= p) as f64 / n - cdf(p)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn a7_determinism_and_properties() {
    let mut a7 = Criterion::new("A7");

    // Reproducibility, down to the serialized bytes.
    let params = SimParams::new(
        SystemConfig::new(50, 5, 4).unwrap(),
        TimingModel::scaled(100.0, 1.0).unwrap(),
        exp1(),
        100_000,
        7,
    );
    let a = sim::run(&params).unwrap();
    let b = sim::run(&params).unwrap();
    a7.check(
        a == b && format!("{a:?}").into_bytes() == format!("{b:?}").into_bytes(),
        "identical seed and params give bit-identical summaries",
    );
    let other = sim::run(&SimParams { seed: 8, ..params }).unwrap();
    a7.check(other != a, "a different seed gives a different summary");

    // Sampler KS distance at probe points.
    let mut rng = seeded(derive_seed(0xA7, 0));
    for (dist, span) in [
        (exp1(), 5.0),
        (WriteTimeDistribution::uniform(2.0).unwrap(), 2.0),
        (WriteTimeDistribution::deterministic(0.7).unwrap(), 2.0),
    ] {
        let mut xs: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let ks = ks_at(&mut xs, (0..=50).map(|i| f64::from(i) * span / 50.0), |t| {
            dist.cdf(t)
        });
        a7.check(
            ks < 0.01,
            format!("{dist}: KS distance at probes {ks:.4} < 0.01"),
        );
    }

    // Every leader-hitting read has age in [c, 2c).
    let mut sim = Simulator::new(params).unwrap();
    let c = sim.commit_time();
    let (mut b1, mut inside) = (0u64, 0u64);
    for _ in 0..100_000 {
        let q = sim.next_query();
        if q.hit_leader {
            b1 += 1;
            inside += u64::from(q.age >= c && q.age < 2.0 * c);
        }
    }
    a7.check(
        b1 > 0 && inside == b1,
        format!("leader ages in [c, 2c): {inside}/{b1}"),
    );

    // Missed rounds at a follower, read at a fixed offset, follow the
    // geometric law Pr{Z = j} = (1 − p_t)(1 − p_c)^{j−2} p_c for j >= 2.
    let cfg = SystemConfig::new(101, 1, 1).unwrap();
    let c = 1.0;
    let offset = 0.4;
    let dist = exp1();
    let (p_t, p_c) = (dist.cdf(offset), dist.cdf(c));
    let mut group = ReplicaGroup::new(&cfg, c, dist);
    let mut rng = seeded(derive_seed(0xA7, 1));
    for _ in 0..default_warmup(p_c) {
        group.begin_slot(&mut rng);
        group.end_slot();
    }
    let mut zs = Vec::with_capacity(100_000);
    for _ in 0..1_000 {
        group.begin_slot(&mut rng);
        zs.extend((1..=100).map(|node| group.missed_rounds(node, offset) as f64));
        group.end_slot();
    }
    let geometric_cdf = |j: f64| {
        if j < 1.0 {
            0.0
        } else {
            1.0 - (1.0 - p_t) * (1.0 - p_c).powf(j.floor() - 1.0)
        }
    };
    let ks = ks_at(&mut zs, (1..=15).map(f64::from), geometric_cdf);
    a7.check(
        ks < 0.01,
        format!(
            "missed-round law KS distance {ks:.4} < 0.01 over {} samples",
            zs.len()
        ),
    );

    a7.finish();
}
