//! Tabular output shared by every subcommand.
//!
//! One schema serves CSV and JSON lines alike. Reals carry 12 significant
//! digits; absent values are empty in CSV and `null` in JSON.

use serde::Serialize;

use crate::sweep::SweepRow;

pub const CSV_HEADER: [&str; 13] = [
    "curve",
    "vary",
    "n",
    "l",
    "r",
    "k",
    "lambda",
    "c",
    "mode",
    "analytic_age",
    "sim_age",
    "sim_stderr",
    "skipped",
];

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` as a plain decimal with [`SIGNIFICANT_DIGITS`] significant
/// digits, trailing zeros removed. Very large or small magnitudes fall
/// back to scientific notation.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..=15).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`], as a number.
pub fn round_real(x: f64) -> f64 {
    format_real(x).parse().unwrap_or(x)
}

/// A row laid out in header order, rounded as written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowRecord {
    pub curve: String,
    pub vary: String,
    pub n: u32,
    pub l: u32,
    pub r: u32,
    pub k: Option<f64>,
    pub lambda: f64,
    pub c: Option<f64>,
    pub mode: String,
    pub analytic_age: Option<f64>,
    pub sim_age: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub skipped: bool,
}

impl From<&SweepRow> for RowRecord {
    fn from(row: &SweepRow) -> Self {
        Self {
            curve: row.curve.clone(),
            vary: row.vary.to_string(),
            n: row.n,
            l: row.l,
            r: row.r,
            k: Some(round_real(row.k)),
            lambda: round_real(row.lambda),
            c: row.c.map(round_real),
            mode: row.mode.to_string(),
            analytic_age: row.analytic_age.map(round_real),
            sim_age: row.sim_age.map(round_real),
            sim_stderr: row.sim_stderr.map(round_real),
            skipped: row.is_skipped(),
        }
    }
}

impl RowRecord {
    /// Field values in [`CSV_HEADER`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        vec![
            self.curve.clone(),
            self.vary.clone(),
            self.n.to_string(),
            self.l.to_string(),
            self.r.to_string(),
            opt(self.k),
            format_real(self.lambda),
            opt(self.c),
            self.mode.clone(),
            opt(self.analytic_age),
            opt(self.sim_age),
            opt(self.sim_stderr),
            self.skipped.to_string(),
        ]
    }
}
