use std::io::{self, Write};
use std::path::Path;

use freshness_core::analytic::{self, SystemConfig, TimingModel};
use freshness_core::report::{format_real, round_real, RowRecord};
use freshness_core::rng::derive_seed;
use freshness_core::sim::{self, agreement_tolerance, SimParams};
use freshness_core::sweep::{
    self, FigureId, FixedParams, IntRange, SimOptions, SweepMode, SweepParam, SweepRow, SweepSpec,
};
use freshness_core::WriteTimeDistribution;
use serde::Serialize;

use crate::args::{
    AnalyticArgs, FigureArgs, ModelArgs, RecordFormat, SimulateArgs, SweepArgs, TableFormat,
};
use crate::error::CliError;
use crate::output;

/// Key/value record printed by `analytic` and `simulate`.
struct Record(Vec<(&'static str, Option<String>)>);

impl Record {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn text(&mut self, key: &'static str, value: impl ToString) {
        self.0.push((key, Some(value.to_string())));
    }

    fn real(&mut self, key: &'static str, value: Option<f64>) {
        self.0.push((key, value.map(format_real)));
    }

    fn print(&self, format: RecordFormat) -> Result<(), CliError> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        let io_err = |e: io::Error| CliError::Io {
            path: "<stdout>".into(),
            source: e,
        };
        match format {
            RecordFormat::Text => {
                for (k, v) in &self.0 {
                    writeln!(out, "{k}={}", v.as_deref().unwrap_or("")).map_err(io_err)?;
                }
            }
            RecordFormat::Json => {
                let mut map = serde_json::Map::new();
                for (k, v) in &self.0 {
                    let value = match v {
                        None => serde_json::Value::Null,
                        Some(s) => s
                            .parse::<u64>()
                            .map(serde_json::Number::from)
                            .ok()
                            .or_else(|| {
                                s.parse::<f64>().ok().and_then(serde_json::Number::from_f64)
                            })
                            .map(serde_json::Value::Number)
                            .unwrap_or_else(|| match s.as_str() {
                                "true" => serde_json::Value::Bool(true),
                                "false" => serde_json::Value::Bool(false),
                                _ => serde_json::Value::String(s.clone()),
                            }),
                    };
                    map.insert((*k).to_string(), value);
                }
                writeln!(out, "{}", serde_json::Value::Object(map)).map_err(io_err)?;
            }
        }
        Ok(())
    }
}

fn resolve_timing(m: &ModelArgs) -> Result<TimingModel, CliError> {
    match (m.c, m.k) {
        (Some(c), None) => Ok(TimingModel::explicit(c)?),
        (None, Some(k)) => Ok(TimingModel::scaled(k, m.lambda)?),
        (Some(_), Some(_)) => Err(CliError::Usage("give either --c or --k, not both".into())),
        (None, None) => Err(CliError::Usage(
            "commit time missing: give --c, or --k with --lambda".into(),
        )),
    }
}

fn resolve_dist(m: &ModelArgs) -> Result<WriteTimeDistribution, CliError> {
    match m.dist {
        None => Ok(WriteTimeDistribution::exponential(m.lambda)?),
        Some(WriteTimeDistribution::Exponential { rate }) if m.k.is_some() && rate != m.lambda => Err(CliError::Usage(
            format!("--dist exp:{rate} disagrees with --lambda {}; one rate drives both timing and follower writes", m.lambda),
        )),
        Some(d) => Ok(d),
    }
}

fn require_leaders(m: &ModelArgs) -> Result<u32, CliError> {
    m.l.ok_or_else(|| CliError::Usage("--l is required".into()))
}

pub fn analytic(args: AnalyticArgs) -> Result<(), CliError> {
    let m = &args.model;
    let mut rec = Record::new();
    rec.text("n", m.n);
    rec.text("r", m.r);

    if m.l.is_none() && !args.threshold {
        return Err(CliError::Usage(
            "--l is required (or pass --threshold)".into(),
        ));
    }
    if let Some(l) = m.l {
        let cfg = SystemConfig::new(m.n, l, m.r)?;
        let timing = resolve_timing(m)?;
        let dist = resolve_dist(m)?;
        let b = analytic::age_breakdown(&cfg, &dist, &timing)?;
        rec.text("l", l);
        if let Some(k) = m.k {
            rec.real("k", Some(k));
            rec.real("lambda", Some(m.lambda));
        }
        rec.text("dist", dist);
        rec.real("c", Some(b.commit_time));
        rec.real("prob_b1", Some(b.prob_b1));
        rec.real("mean_age_b1", Some(b.mean_age_b1));
        rec.real("mean_age_b2", b.mean_age_b2);
        rec.real("mean_age", Some(b.mean_age));
        if let Some(k) = m.k {
            let opt = analytic::optimal_leader_count(m.n, m.r, k, m.lambda)?;
            rec.text("optimal_l", opt.leaders);
            rec.real("optimal_age", Some(opt.age));
        }
    }
    if args.threshold || (m.k.is_some() && m.r < m.n) {
        rec.text(
            "threshold_k",
            analytic::initial_decrease_threshold(m.n, m.r)?,
        );
    }
    rec.print(args.format)
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let m = &args.model;
    let cfg = SystemConfig::new(m.n, require_leaders(m)?, m.r)?;
    let timing = resolve_timing(m)?;
    let dist = resolve_dist(m)?;
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut params = SimParams::new(cfg, timing, dist, args.slots, seed);
    params.warmup_rounds = args.warmup;

    let s = sim::run(&params)?;
    let b = analytic::age_breakdown(&cfg, &dist, &timing)?;

    let mut rec = Record::new();
    rec.text("seed", seed);
    rec.text("n", cfg.n);
    rec.text("l", cfg.l);
    rec.text("r", cfg.r);
    if let Some(k) = m.k {
        rec.real("k", Some(k));
        rec.real("lambda", Some(m.lambda));
    }
    rec.text("dist", dist);
    rec.real("c", Some(s.commit_time));
    rec.text("warmup_rounds", s.warmup_rounds);
    rec.text("query_slots", s.query_slots);
    rec.real("sim_mean_age", Some(s.mean_age));
    rec.real("sim_stderr", Some(s.stderr_age));
    rec.real("analytic_mean_age", Some(b.mean_age));
    rec.text(
        "within_tolerance",
        (s.mean_age - b.mean_age).abs() <= agreement_tolerance(s.stderr_age, b.mean_age),
    );
    rec.text("count_b1", s.count_b1);
    rec.real("sim_mean_age_b1", s.mean_age_b1);
    rec.real("analytic_mean_age_b1", Some(b.mean_age_b1));
    rec.text("count_b2", s.count_b2);
    rec.real("sim_mean_age_b2", s.mean_age_b2);
    rec.real("sim_stderr_b2", s.stderr_b2);
    rec.real("analytic_mean_age_b2", b.mean_age_b2);
    rec.real("empirical_pc", s.empirical_pc);
    rec.real("analytic_pc", Some(dist.cdf(s.commit_time)));
    rec.print(args.format)?;

    if let Some(path) = &args.out {
        let row = RowRecord {
            curve: "simulate".into(),
            vary: String::new(),
            n: cfg.n,
            l: cfg.l,
            r: cfg.r,
            k: m.k.map(round_real),
            lambda: round_real(m.lambda),
            c: Some(round_real(s.commit_time)),
            mode: SweepMode::Both.to_string(),
            analytic_age: Some(round_real(b.mean_age)),
            sim_age: Some(round_real(s.mean_age)),
            sim_stderr: Some(round_real(s.stderr_age)),
            skipped: false,
        };
        output::append_csv_row(path, &row)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SkippedPoint {
    curve: String,
    n: u32,
    l: u32,
    r: u32,
    k: f64,
    reason: String,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    figure: Option<String>,
    format: &'static str,
    master_seed: Option<u64>,
    seed_derivation: &'static str,
    specs: &'a [SweepSpec],
    rows: usize,
    skipped: Vec<SkippedPoint>,
    notes: Vec<&'static str>,
}

fn format_name(f: TableFormat) -> &'static str {
    match f {
        TableFormat::Csv => "csv",
        TableFormat::Jsonl => "jsonl",
    }
}

fn skipped_points(rows: &[SweepRow]) -> Vec<SkippedPoint> {
    rows.iter()
        .filter_map(|r| {
            Some(SkippedPoint {
                curve: r.curve.clone(),
                n: r.n,
                l: r.l,
                r: r.r,
                k: r.k,
                reason: r.skipped.clone()?,
            })
        })
        .collect()
}

/// Prints skipped points and simulation discrepancies to stderr.
fn report_rows(rows: &[SweepRow]) {
    for p in skipped_points(rows) {
        eprintln!(
            "skipped {} n={} l={} r={} k={}: {}",
            p.curve,
            p.n,
            p.l,
            p.r,
            format_real(p.k),
            p.reason
        );
    }
    let compared: Vec<_> = rows
        .iter()
        .filter_map(|r| Some((r.discrepancy()?, r.agrees()?)))
        .collect();
    if !compared.is_empty() {
        let worst = compared.iter().map(|c| c.0).fold(0.0, f64::max);
        let outside = compared.iter().filter(|c| !c.1).count();
        eprintln!(
            "compared {} points: max |analytic - sim| = {}, {} outside max(3*stderr, 1%)",
            compared.len(),
            format_real(worst),
            outside
        );
    }
}

fn write_rows(path: Option<&Path>, rows: &[SweepRow], format: TableFormat) -> Result<(), CliError> {
    let records: Vec<RowRecord> = rows.iter().map(RowRecord::from).collect();
    match path {
        Some(p) => output::write_atomically(p, |f| output::write_table(&records, format, f)),
        None => {
            output::write_table(&records, format, io::stdout().lock()).map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

const SEED_DERIVATION: &str =
    "point i of spec j runs on splitmix(splitmix(master, j), i); see rng::derive_seed";

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let varied = |p: SweepParam| args.vary == p;
    let need = |v: Option<u32>, p: SweepParam, flag: &str| -> Result<u32, CliError> {
        match v {
            Some(v) => Ok(v),
            None if varied(p) => Ok(args.from),
            None => Err(CliError::Usage(format!(
                "{flag} is required unless --vary {p}"
            ))),
        }
    };
    let n = need(args.n, SweepParam::N, "--n")?;
    let l = need(args.l, SweepParam::L, "--l")?;
    let r = match (args.r, args.couple_r) {
        (Some(r), _) => r,
        (None, Some(c)) => c.query_size(n),
        (None, None) => need(None, SweepParam::R, "--r")?,
    };
    let k = match args.k {
        Some(k) => k,
        None if varied(SweepParam::K) => f64::from(args.from),
        None => return Err(CliError::Usage("--k is required unless --vary k".into())),
    };

    let master_seed = args
        .mode
        .simulate()
        .then(|| args.seed.unwrap_or_else(rand::random));
    let spec = SweepSpec {
        curve: args.curve.clone(),
        vary: args.vary,
        range: IntRange::new(args.from, args.to, args.step),
        fixed: FixedParams {
            n,
            l,
            r,
            k,
            lambda: args.lambda,
            dist: args.dist,
        },
        coupling: args.couple_r,
        mode: args.mode,
        sim: master_seed.map(|seed| SimOptions {
            query_slots: args.slots,
            seed: derive_seed(seed, 0),
        }),
    };
    let rows = sweep::run_sweep(&spec)?;
    report_rows(&rows);
    if let Some(seed) = master_seed {
        eprintln!("seed={seed}");
    }
    write_rows(args.out.as_deref(), &rows, args.format)?;
    if let Some(out) = &args.out {
        let specs = [spec];
        let meta = Metadata {
            tool: "freshness",
            version: env!("CARGO_PKG_VERSION"),
            command: "sweep",
            figure: None,
            format: format_name(args.format),
            master_seed,
            seed_derivation: SEED_DERIVATION,
            specs: &specs,
            rows: rows.len(),
            skipped: skipped_points(&rows),
            notes: Vec::new(),
        };
        output::write_json_pretty(&output::meta_path(out), &meta)?;
    }
    Ok(())
}

pub fn figure(args: FigureArgs) -> Result<(), CliError> {
    let ids: Vec<FigureId> = if args.id == "all" {
        FigureId::ALL.to_vec()
    } else {
        vec![args.id.parse()?]
    };
    output::ensure_dir(&args.out)?;
    let master_seed = args
        .mode
        .simulate()
        .then(|| args.seed.unwrap_or_else(rand::random));
    if let Some(seed) = master_seed {
        eprintln!("seed={seed}");
    }
    let ext = format_name(args.format);
    for id in ids {
        let specs: Vec<SweepSpec> = sweep::figure_preset(id)
            .into_iter()
            .enumerate()
            .map(|(j, spec)| match master_seed {
                Some(seed) => spec.with_simulation(
                    args.mode,
                    SimOptions {
                        query_slots: args.slots,
                        seed: derive_seed(seed, j as u64),
                    },
                ),
                None => spec,
            })
            .collect();
        let mut rows = Vec::new();
        for spec in &specs {
            rows.extend(sweep::run_sweep(spec)?);
        }
        report_rows(&rows);
        let path = args.out.join(format!("{id}.{ext}"));
        write_rows(Some(&path), &rows, args.format)?;
        let meta = Metadata {
            tool: "freshness",
            version: env!("CARGO_PKG_VERSION"),
            command: "figure",
            figure: Some(id.to_string()),
            format: ext,
            master_seed,
            seed_derivation: SEED_DERIVATION,
            specs: &specs,
            rows: rows.len(),
            skipped: skipped_points(&rows),
            notes: id.notes().to_vec(),
        };
        output::write_json_pretty(&output::meta_path(&path), &meta)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
