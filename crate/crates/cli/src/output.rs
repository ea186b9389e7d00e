//! CSV tables: number formatting, writers, and a reader for curve files.
//!
//! Curve files (`<metric>.csv`) have the columns
//!
//! ```text
//! variable,x[,mc,mc_stderr,mc_trials][,analytic,analytic_err][,abs_diff],warning
//! ```
//!
//! where the bracketed groups depend on the run mode (`abs_diff` only with
//! both evaluators). Empty cells mean "not available"; the reason is in
//! `warning`. Trial files (`trials_<k>.csv`) hold one row per Monte Carlo
//! trial of grid point `k`.

use std::fmt;
use std::io::{Read, Write};

use hetcov::montecarlo::TrialResult;
use hetcov::Tier;

use crate::sweep::{Cell, MetricRow, Mode, Variable};

/// `%.9g`: nine significant digits, trailing zeros dropped, exponent form
/// outside [1e-4, 1e9).
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn curve_header(mode: Mode) -> Vec<&'static str> {
    let mut h = vec!["variable", "x"];
    if mode.mc() {
        h.extend(["mc", "mc_stderr", "mc_trials"]);
    }
    if mode.analytic() {
        h.extend(["analytic", "analytic_err"]);
    }
    if mode == Mode::Both {
        h.push("abs_diff");
    }
    h.push("warning");
    h
}

/// Writes one curve; rows appear in the order given.
pub fn write_curve<W: Write>(w: W, variable: Variable, mode: Mode, rows: &[&MetricRow]) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(curve_header(mode))?;
    for r in rows {
        let mut rec = vec![variable.label().to_string(), opt(r.x)];
        if mode.mc() {
            rec.push(opt(r.mc.map(|c| c.value)));
            rec.push(opt(r.mc.map(|c| c.err)));
            rec.push(r.mc_trials.map(|n| n.to_string()).unwrap_or_default());
        }
        if mode.analytic() {
            rec.push(opt(r.analytic.map(|c| c.value)));
            rec.push(opt(r.analytic.map(|c| c.err)));
        }
        if mode == Mode::Both {
            rec.push(opt(r.abs_diff()));
        }
        rec.push(r.warnings.join("; "));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub const TRIAL_HEADER: [&str; 7] = ["trial", "v0", "tier", "serving_distance", "sinr", "snr", "rate"];

/// One row per trial; `tier` is `sub6`, `mmwave` or `outage`, SINR and SNR
/// are linear.
pub fn write_trials<W: Write>(w: W, trials: &[TrialResult]) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(TRIAL_HEADER)?;
    for (i, t) in trials.iter().enumerate() {
        let tier = match t.tier() {
            Some(Tier::Sub6) => "sub6",
            Some(Tier::MmWave) => "mmwave",
            None => "outage",
        };
        out.write_record([
            i.to_string(),
            fmt_sig(t.v0),
            tier.to_string(),
            opt(t.outcome.map(|o| o.serving_distance)),
            fmt_sig(t.sinr),
            fmt_sig(t.snr),
            fmt_sig(t.rate),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// A malformed curve file; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ReadError {}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub variable: Variable,
    pub x: Option<f64>,
    pub mc: Option<Cell>,
    pub mc_trials: Option<usize>,
    pub analytic: Option<Cell>,
    pub abs_diff: Option<f64>,
    pub warning: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub mode: Mode,
    pub rows: Vec<CurveRow>,
}

fn num(field: &str, line: u64, col: &str) -> Result<Option<f64>, ReadError> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| ReadError { line, message: format!("column {col}: '{field}' is not a number") })
}

/// Value and uncertainty columns are both filled or both empty.
fn cell(v: Option<f64>, e: Option<f64>, line: u64, what: &str) -> Result<Option<Cell>, ReadError> {
    match (v, e) {
        (Some(value), Some(err)) => Ok(Some(Cell { value, err })),
        (None, None) => Ok(None),
        _ => Err(ReadError { line, message: format!("{what} value and error must be set together") }),
    }
}

/// Parses a curve file back into typed rows, checking the header against
/// the three possible layouts.
pub fn read_curve<R: Read>(r: R) -> Result<CurveTable, ReadError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| ReadError { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let mode = [Mode::Mc, Mode::Analytic, Mode::Both]
        .into_iter()
        .find(|m| curve_header(*m) == header)
        .ok_or_else(|| ReadError { line: 1, message: format!("unrecognized header: {}", header.join(",")) })?;
    let layout = curve_header(mode);
    let col = |name: &str| layout.iter().position(|c| *c == name);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ReadError { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |name: &str| col(name).map(|i| &rec[i]);
        let f = |name: &str| get(name).map_or(Ok(None), |s| num(s, line, name));
        let variable: Variable = get("variable").unwrap_or("").parse().map_err(|e| ReadError { line, message: e })?;
        let mc_trials = match get("mc_trials") {
            Some("") | None => None,
            Some(s) => Some(s.parse::<usize>().map_err(|_| ReadError { line, message: format!("column mc_trials: '{s}'") })?),
        };
        let row = CurveRow {
            variable,
            x: f("x")?,
            mc: cell(f("mc")?, f("mc_stderr")?, line, "mc")?,
            mc_trials,
            analytic: cell(f("analytic")?, f("analytic_err")?, line, "analytic")?,
            abs_diff: f("abs_diff")?,
            warning: get("warning").unwrap_or("").to_string(),
        };
        if row.mc.is_some() != row.mc_trials.is_some() {
            return Err(ReadError { line, message: "mc and mc_trials must be set together".into() });
        }
        if (variable == Variable::None) != row.x.is_none() {
            return Err(ReadError { line, message: "x must be empty exactly when variable is none".into() });
        }
        rows.push(row);
    }
    Ok(CurveTable { mode, rows })
}
