//! One-dimensional parameter sweeps and their per-point evaluation.

use std::fmt;
use std::str::FromStr;

use hetcov::analytic::{AnalyticModel, AnalyticReport, CoverageKind};
use hetcov::montecarlo::{
    estimate_coverage, estimate_snr_coverage, mean_rate, run_trials_with, sample_quantile, tier_shares, EstimateWithCI,
    SimOptions, TrialResult,
};
use hetcov::units::{db_to_linear, linear_to_db};
use hetcov::Tier;
use serde::Serialize;

use crate::config::ConfigValues;

/// Swept quantity; every grid point is a full evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variable {
    /// A single evaluation of the configured point.
    None,
    /// mmWave BSs per hotspot.
    NBs,
    /// σ_BS/σ_UE; σ_UE stays fixed.
    Eta,
    /// b_2_db − b_1_db; b_1_db stays fixed.
    BiasRatioDb,
    /// Distance of the UE to its hotspot center, in meters.
    V0,
    /// SINR/SNR threshold in dB for the coverage metrics.
    TauDb,
}

/// Reported quantity. Percentile metrics are over all UEs; outage counts as
/// zero SINR and zero rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    /// Probability of mmWave association.
    AssocProb,
    Coverage,
    SnrCoverage,
    /// 5th-percentile SINR in dB.
    EdgeSinr,
    MedianSinr,
    /// 5th-percentile rate in bit/s.
    EdgeRate,
    MedianRate,
    /// Over served UEs, in meters.
    MeanServingDistance,
    /// In bit/s.
    AvgRate,
}

macro_rules! labels {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl $t {
            pub const ALL: &'static [$t] = &[$($v),+];
            pub fn label(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                let s = s.trim().to_ascii_lowercase();
                Self::ALL.iter().copied().find(|v| v.label() == s).ok_or_else(|| {
                    let all: Vec<&str> = Self::ALL.iter().map(|v| v.label()).collect();
                    format!(concat!("unknown ", $what, " '{}'; expected one of: {}"), s, all.join(", "))
                })
            }
        }
    };
}

labels!(Variable, "sweep variable",
    Variable::None => "none",
    Variable::NBs => "n_bs",
    Variable::Eta => "eta",
    Variable::BiasRatioDb => "bias_ratio_db",
    Variable::V0 => "v0",
    Variable::TauDb => "tau_db");

labels!(Metric, "metric",
    Metric::AssocProb => "assoc_prob",
    Metric::Coverage => "coverage",
    Metric::SnrCoverage => "snr_coverage",
    Metric::EdgeSinr => "edge_sinr",
    Metric::MedianSinr => "median_sinr",
    Metric::EdgeRate => "edge_rate",
    Metric::MedianRate => "median_rate",
    Metric::MeanServingDistance => "mean_serving_distance",
    Metric::AvgRate => "avg_rate");

impl Variable {
    /// Writes grid value `x` into the configuration.
    pub fn apply(self, v: &mut ConfigValues, x: f64) {
        match self {
            Variable::NBs => v.n_bs = x as u32,
            Variable::Eta => v.sigma_bs_m = x * v.sigma_ue_m,
            Variable::BiasRatioDb => v.b_2_db = v.b_1_db + x,
            Variable::None | Variable::V0 | Variable::TauDb => {}
        }
    }

    fn check(self, x: f64) -> Result<(), String> {
        let ok = match self {
            Variable::NBs => x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64,
            Variable::Eta => x.is_finite() && x > 0.0,
            Variable::V0 => x.is_finite() && x >= 0.0,
            Variable::None | Variable::BiasRatioDb | Variable::TauDb => x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("grid value {x} is not admissible for {self}"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: Variable,
    /// Empty exactly when `variable` is [`Variable::None`].
    pub grid: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// Threshold of the coverage metrics unless τ is swept.
    pub tau_db: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            variable: Variable::None,
            grid: Vec::new(),
            metrics: vec![Metric::AssocProb, Metric::Coverage],
            tau_db: 0.0,
        }
    }
}

impl SweepSpec {
    pub fn new(variable: Variable, grid: Option<Vec<f64>>, metrics: Vec<Metric>, tau_db: f64) -> Result<Self, String> {
        let grid = match (variable, grid) {
            (Variable::None, None) => Vec::new(),
            (Variable::None, Some(_)) => return Err("a grid needs a sweep variable".into()),
            (_, None) => return Err(format!("variable {variable} needs a grid")),
            (_, Some(g)) if g.is_empty() => return Err("grid is empty".into()),
            (_, Some(g)) => g,
        };
        for x in &grid {
            variable.check(*x)?;
        }
        if metrics.is_empty() {
            return Err("no metrics requested".into());
        }
        for (i, m) in metrics.iter().enumerate() {
            if metrics[..i].contains(m) {
                return Err(format!("metric {m} listed twice"));
            }
        }
        if !tau_db.is_finite() {
            return Err(format!("tau_db must be finite, got {tau_db}"));
        }
        Ok(SweepSpec { variable, grid, metrics, tau_db })
    }

    /// Grid values, or a single `None` entry for an unswept run.
    pub fn points(&self) -> Vec<Option<f64>> {
        if self.variable == Variable::None {
            vec![None]
        } else {
            self.grid.iter().map(|x| Some(*x)).collect()
        }
    }
}

/// Which evaluators a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mc,
    Analytic,
    Both,
}

impl Mode {
    pub fn mc(self) -> bool {
        self != Mode::Analytic
    }

    pub fn analytic(self) -> bool {
        self != Mode::Mc
    }
}

/// A value with its uncertainty: MC standard error or quadrature estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub x: Option<f64>,
    pub mc: Option<Cell>,
    /// Trials behind `mc`; served trials only for the serving distance.
    pub mc_trials: Option<usize>,
    pub analytic: Option<Cell>,
    pub warnings: Vec<String>,
}

impl MetricRow {
    pub fn abs_diff(&self) -> Option<f64> {
        Some((self.mc?.value - self.analytic?.value).abs())
    }
}

/// Outcome of one grid point: one row per requested metric, plus the trial
/// table when Monte Carlo ran.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub rows: Vec<MetricRow>,
    pub trials: Option<Vec<TrialResult>>,
}

/// Bisection tolerance of the analytic percentile roots, reported as their
/// error: 1e-3 dB for SINR and a 1e-5 decade for rate.
const SINR_ROOT_TOL_DB: f64 = 1e-3;
const RATE_ROOT_TOL_DECADES: f64 = 1e-5;

/// Evaluates every requested metric at one grid point.
pub fn evaluate_point(base: &ConfigValues, x: Option<f64>, mode: Mode) -> PointResult {
    let sweep = &base.sweep;
    let mut values = base.clone();
    let mut tau_db = sweep.tau_db;
    let mut v0 = None;
    if let Some(x) = x {
        sweep.variable.apply(&mut values, x);
        match sweep.variable {
            Variable::TauDb => tau_db = x,
            Variable::V0 => v0 = Some(x),
            _ => {}
        }
    }
    let params = values.to_params();

    let trials = mode.mc().then(|| {
        let mut opts = SimOptions::new(values.scenario, values.trials, values.seed).window(values.window_radius_m);
        if let Some(v) = v0 {
            opts = opts.pinned_v0(v);
        }
        run_trials_with(&params, &opts)
    });

    let model = if mode.analytic() {
        Some(AnalyticModel::new(&params, values.scenario, values.analytic_options()).map_err(|e| e.to_string()))
    } else {
        None
    };

    let rows = sweep
        .metrics
        .iter()
        .map(|&m| {
            let mut warnings = Vec::new();
            let (mc, mc_trials) = match &trials {
                Some(t) => match mc_metric(t, m, tau_db) {
                    Ok((c, n)) => (Some(c), Some(n)),
                    Err(w) => {
                        warnings.push(format!("mc: {w}"));
                        (None, None)
                    }
                },
                None => (None, None),
            };
            let analytic = match &model {
                Some(Ok(model)) => analytic_cell(analytic_metric(model, m, tau_db, v0), &mut warnings),
                Some(Err(e)) => analytic_cell(Err(e.clone()), &mut warnings),
                None => None,
            };
            MetricRow { x, mc, mc_trials, analytic, warnings }
        })
        .collect();
    PointResult { rows, trials }
}

/// The reported cell; failures and unconverged quadrature become warnings.
fn analytic_cell(r: Result<AnalyticReport, String>, warnings: &mut Vec<String>) -> Option<Cell> {
    match r {
        Ok(r) => {
            if !r.converged {
                warnings.push("analytic: quadrature did not converge".into());
            }
            Some(Cell { value: r.value, err: r.est_error })
        }
        Err(w) => {
            warnings.push(format!("analytic: {w}"));
            None
        }
    }
}

fn from_estimate(e: EstimateWithCI) -> (Cell, usize) {
    (Cell { value: e.value, err: e.stderr }, e.n_trials)
}

/// SINR quantile in dB via the linear-scale sample quantile; the standard
/// error maps by the local slope of the dB transform.
fn sinr_quantile_db(t: &[TrialResult], q: f64) -> Result<(Cell, usize), String> {
    let sinr: Vec<f64> = t.iter().map(|r| r.sinr).collect();
    let e = sample_quantile(&sinr, q).map_err(|e| e.to_string())?;
    if !(e.value > 0.0) {
        return Err(format!("{}th-percentile SINR lies in outage", q * 100.0));
    }
    let err = 10.0 / std::f64::consts::LN_10 * e.stderr / e.value;
    Ok((Cell { value: linear_to_db(e.value), err }, e.n_trials))
}

fn mc_metric(t: &[TrialResult], m: Metric, tau_db: f64) -> Result<(Cell, usize), String> {
    let s = |e: hetcov::montecarlo::EstimateError| e.to_string();
    match m {
        Metric::AssocProb => Ok(from_estimate(tier_shares(t).map_err(s)?.mmwave)),
        Metric::Coverage => {
            let c = estimate_coverage(t, &[tau_db]).map_err(s)?.overall;
            Ok((Cell { value: c.probabilities[0], err: c.stderr[0] }, c.n_trials))
        }
        Metric::SnrCoverage => {
            let c = estimate_snr_coverage(t, &[tau_db]).map_err(s)?;
            Ok((Cell { value: c.probabilities[0], err: c.stderr[0] }, c.n_trials))
        }
        Metric::EdgeSinr => sinr_quantile_db(t, 0.05),
        Metric::MedianSinr => sinr_quantile_db(t, 0.5),
        Metric::EdgeRate | Metric::MedianRate => {
            let q = if m == Metric::EdgeRate { 0.05 } else { 0.5 };
            let rates: Vec<f64> = t.iter().map(|r| r.rate).collect();
            Ok(from_estimate(sample_quantile(&rates, q).map_err(s)?))
        }
        Metric::MeanServingDistance => {
            let d: Vec<f64> = t.iter().filter_map(|r| r.outcome.map(|o| o.serving_distance)).collect();
            if d.is_empty() {
                return Err("no trial was served".into());
            }
            Ok(from_estimate(EstimateWithCI::mean(&d)))
        }
        Metric::AvgRate => Ok(from_estimate(mean_rate(t).map_err(s)?)),
    }
}

fn analytic_metric(model: &AnalyticModel, m: Metric, tau_db: f64, v0: Option<f64>) -> Result<AnalyticReport, String> {
    let tau = db_to_linear(tau_db);
    let s = |e: hetcov::analytic::AnalyticError| e.to_string();
    let root = |value: f64, err: f64| AnalyticReport { value, est_error: err, evaluations: 0, converged: true };
    Ok(match (m, v0) {
        (Metric::AssocProb, None) => model.assoc_prob(Tier::MmWave),
        (Metric::AssocProb, Some(v)) => model.conditional_assoc_prob(Tier::MmWave, v),
        (Metric::Coverage, None) => model.coverage(tau),
        (Metric::Coverage, Some(v)) => model.coverage_at_v0(tau, v, CoverageKind::Sinr),
        (Metric::SnrCoverage, None) => model.snr_coverage(tau),
        (Metric::SnrCoverage, Some(v)) => model.coverage_at_v0(tau, v, CoverageKind::Snr),
        (Metric::EdgeSinr | Metric::MedianSinr, _) => {
            let pct = if m == Metric::EdgeSinr { 5.0 } else { 50.0 };
            let db = match v0 {
                None => model.percentile_sinr_db(pct, CoverageKind::Sinr),
                Some(v) => model.percentile_sinr_db_at_v0(pct, v, CoverageKind::Sinr),
            }
            .map_err(s)?;
            root(db, SINR_ROOT_TOL_DB)
        }
        (Metric::EdgeRate | Metric::MedianRate, _) => {
            let pct = if m == Metric::EdgeRate { 5.0 } else { 50.0 };
            let r = match v0 {
                None => model.percentile_rate(pct),
                Some(v) => model.percentile_rate_at_v0(pct, v),
            }
            .map_err(s)?;
            root(r, r * (10f64.powf(RATE_ROOT_TOL_DECADES) - 1.0))
        }
        (Metric::MeanServingDistance, None) => model.mean_serving_distance(),
        (Metric::MeanServingDistance, Some(v)) => {
            let d = model.conditional_mean_serving_distance(v);
            if !d.is_finite() {
                return Err(format!("no admissible serving BS at v0 = {v}"));
            }
            AnalyticReport::exact(d)
        }
        (Metric::AvgRate, None) => model.avg_rate(),
        (Metric::AvgRate, Some(v)) => model.avg_rate_at_v0(v),
    })
}
