//! Scenario configuration files.
//!
//! ```text
//! # comment
//! [deployment]
//! lambda_1_per_km2 = 30
//! n_bs = 10
//!
//! [sweep]
//! variable = n_bs
//! grid = 2, 6, 10, 14, 18
//! metrics = assoc_prob, coverage
//! ```
//!
//! Values are kept in the units the file uses (dB, dBm, MHz, per km²) so a
//! resolved configuration prints back exactly; [`ConfigValues::to_params`]
//! converts to the library's linear SI form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use hetcov::analytic::{AnalyticOptions, InterClusterCount, IntraClusterModel, NlosExclusion};
use hetcov::montecarlo::DEFAULT_WINDOW_RADIUS;
use hetcov::units::{db_to_linear, dbm_to_watts, per_km2_to_per_m2};
use hetcov::{ScenarioKind, SystemParams};
use serde::Serialize;

use crate::sweep::{Metric, SweepSpec, Variable};

pub const SECTIONS: [&str; 11] = [
    "deployment",
    "power",
    "antenna",
    "blockage",
    "fading",
    "pathloss",
    "bandwidth",
    "bias",
    "simulation",
    "analytic",
    "sweep",
];

/// A problem tied to a line of the file; line 0 means the whole file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Every error found, in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Syntactic layer: sections of `key = value` entries with line numbers.
#[derive(Debug, Clone, Default)]
pub struct Document {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut doc = Document::default();
        let mut errors = Vec::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    errors.push(ConfigError { line, message: format!("unterminated section header '{body}'") });
                    current = None;
                    continue;
                };
                let name = name.trim().to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    errors.push(ConfigError {
                        line,
                        message: format!("unknown section [{name}]; expected one of: {}", SECTIONS.join(", ")),
                    });
                    current = None;
                    continue;
                }
                if doc.sections.contains_key(&name) {
                    errors.push(ConfigError { line, message: format!("section [{name}] appears twice") });
                }
                doc.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                errors.push(ConfigError { line, message: format!("expected 'key = value', got '{body}'") });
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                errors.push(ConfigError { line, message: "empty key".into() });
                continue;
            }
            let Some(section) = current.as_ref() else {
                errors.push(ConfigError { line, message: format!("key '{key}' outside any section") });
                continue;
            };
            let entries = doc.sections.get_mut(section).expect("section registered");
            if let Some(prev) = entries.get(&key) {
                errors.push(ConfigError {
                    line,
                    message: format!("duplicate key '{key}' in [{section}] (first set on line {})", prev.line),
                });
                continue;
            }
            entries.insert(key, Entry { value: value.trim().to_string(), line, used: false });
        }
        if errors.is_empty() {
            Ok(doc)
        } else {
            Err(ConfigErrors(errors))
        }
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let e = self.sections.get_mut(section)?.get_mut(key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.sections.get(section)?.get(key).map(|e| e.line)
    }

    fn unused(&self) -> Vec<ConfigError> {
        let mut out: Vec<ConfigError> = self
            .sections
            .iter()
            .flat_map(|(s, es)| {
                es.iter().filter(|(_, e)| !e.used).map(move |(k, e)| ConfigError {
                    line: e.line,
                    message: format!("unknown key '{k}' in [{s}]"),
                })
            })
            .collect();
        out.sort_by_key(|e| e.line);
        out
    }
}

/// Text before a `#` or `;` comment marker.
fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Resolved configuration in file units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigValues {
    pub lambda_1_per_km2: f64,
    pub lambda_p_per_km2: f64,
    pub n_bs: u32,
    pub sigma_bs_m: f64,
    pub sigma_ue_m: f64,
    pub p_1_dbm: f64,
    pub p_2_dbm: f64,
    pub g_main_dbi: f64,
    pub g_side_dbi: f64,
    pub theta_b_deg: f64,
    pub g_1_dbi: f64,
    pub p_los: f64,
    pub r_los_ball_m: f64,
    pub n_los: u32,
    pub n_nlos: u32,
    pub c_1_db: f64,
    pub c_los_db: f64,
    pub c_nlos_db: f64,
    pub alpha_1: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub w_1_mhz: f64,
    pub w_2_mhz: f64,
    pub noise_figure_db: f64,
    pub b_1_db: f64,
    pub b_2_db: f64,
    pub scenario: ScenarioKind,
    pub trials: usize,
    pub seed: u64,
    pub window_radius_m: f64,
    pub raw_trials: bool,
    pub rel_tol: f64,
    pub intra_model: IntraClusterModel,
    pub inter_count: InterClusterCount,
    pub nlos_exclusion: NlosExclusion,
    pub v0_cutoff_sigmas: f64,
    pub sweep: SweepSpec,
}

impl Default for ConfigValues {
    fn default() -> Self {
        let opts = AnalyticOptions::default();
        ConfigValues {
            lambda_1_per_km2: 30.0,
            lambda_p_per_km2: 5.0,
            n_bs: 10,
            sigma_bs_m: 100.0,
            sigma_ue_m: 150.0,
            p_1_dbm: 40.0,
            p_2_dbm: 30.0,
            g_main_dbi: 18.0,
            g_side_dbi: -2.0,
            theta_b_deg: 10.0,
            g_1_dbi: 0.0,
            p_los: 0.2,
            r_los_ball_m: 200.0,
            n_los: 3,
            n_nlos: 2,
            c_1_db: -38.5,
            c_los_db: -61.4,
            c_nlos_db: -72.0,
            alpha_1: 3.0,
            alpha_los: 2.0,
            alpha_nlos: 2.92,
            w_1_mhz: 20.0,
            w_2_mhz: 1000.0,
            noise_figure_db: 10.0,
            b_1_db: 0.0,
            b_2_db: 0.0,
            scenario: ScenarioKind::IntegratedA,
            trials: 100_000,
            seed: 1,
            window_radius_m: DEFAULT_WINDOW_RADIUS,
            raw_trials: false,
            rel_tol: opts.outer.rel_tol,
            intra_model: opts.intra_model,
            inter_count: opts.inter_count,
            nlos_exclusion: opts.nlos_exclusion,
            v0_cutoff_sigmas: opts.v0_cutoff_sigmas,
            sweep: SweepSpec::default(),
        }
    }
}

/// A parsed and resolved configuration plus non-fatal notes.
#[derive(Debug, Clone)]
pub struct Config {
    pub values: ConfigValues,
    pub warnings: Vec<String>,
    doc: Document,
}

/// Section and key of each library parameter, for locating violations.
const PARAM_KEYS: [(&str, &str, &str); 27] = [
    ("lambda_1", "deployment", "lambda_1_per_km2"),
    ("lambda_p", "deployment", "lambda_p_per_km2"),
    ("n_bs", "deployment", "n_bs"),
    ("sigma_bs", "deployment", "sigma_bs_m"),
    ("sigma_ue", "deployment", "sigma_ue_m"),
    ("p_1", "power", "p_1_dbm"),
    ("p_2", "power", "p_2_dbm"),
    ("g_main", "antenna", "g_main_dbi"),
    ("g_side", "antenna", "g_side_dbi"),
    ("theta_b", "antenna", "theta_b_deg"),
    ("g_1", "antenna", "g_1_dbi"),
    ("p_los", "blockage", "p_los"),
    ("r_los_ball", "blockage", "r_los_ball_m"),
    ("n_los", "fading", "n_los"),
    ("n_nlos", "fading", "n_nlos"),
    ("c_1", "pathloss", "c_1_db"),
    ("c_los", "pathloss", "c_los_db"),
    ("c_nlos", "pathloss", "c_nlos_db"),
    ("alpha_1", "pathloss", "alpha_1"),
    ("alpha_los", "pathloss", "alpha_los"),
    ("alpha_nlos", "pathloss", "alpha_nlos"),
    ("w_1", "bandwidth", "w_1_mhz"),
    ("w_2", "bandwidth", "w_2_mhz"),
    ("noise_figure_db", "bandwidth", "noise_figure_db"),
    ("bias_1", "bias", "b_1_db"),
    ("bias_2", "bias", "b_2_db"),
    ("window", "simulation", "window_radius_m"),
];

/// Pulls typed values out of a [`Document`], collecting errors.
struct Reader<'a> {
    doc: &'a mut Document,
    errors: Vec<ConfigError>,
}

impl Reader<'_> {
    fn parsed<T, E: fmt::Display>(&mut self, section: &str, key: &str, parse: impl Fn(&str) -> Result<T, E>, slot: &mut T) {
        if let Some((raw, line)) = self.doc.take(section, key) {
            match parse(&raw) {
                Ok(v) => *slot = v,
                Err(e) => self.errors.push(ConfigError { line, message: format!("{section}.{key}: {e}") }),
            }
        }
    }

    fn real(&mut self, section: &str, key: &str, slot: &mut f64) {
        self.parsed(section, key, parse_real, slot)
    }

    fn int<T: FromStr>(&mut self, section: &str, key: &str, slot: &mut T)
    where
        T::Err: fmt::Display,
    {
        self.parsed(section, key, |s| s.parse::<T>().map_err(|e| format!("expected a nonnegative integer, got '{s}' ({e})")), slot)
    }

    fn choice<T: FromStr>(&mut self, section: &str, key: &str, slot: &mut T)
    where
        T::Err: fmt::Display,
    {
        self.parsed(section, key, |s| s.parse::<T>(), slot)
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => s.parse().map_err(|_| format!("expected a number, got '{s}'"))?,
    };
    if v.is_nan() {
        return Err("NaN is not a valid value".into());
    }
    Ok(v)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got '{s}'")),
    }
}

impl Config {
    /// Parses and resolves `text`; does not check parameter invariants
    /// (see [`Config::validate`]).
    pub fn parse(text: &str) -> Result<Config, ConfigErrors> {
        let mut doc = Document::parse(text)?;
        let mut v = ConfigValues::default();
        let mut r = Reader { doc: &mut doc, errors: Vec::new() };

        r.real("deployment", "lambda_1_per_km2", &mut v.lambda_1_per_km2);
        r.real("deployment", "lambda_p_per_km2", &mut v.lambda_p_per_km2);
        r.int("deployment", "n_bs", &mut v.n_bs);
        r.real("deployment", "sigma_bs_m", &mut v.sigma_bs_m);
        r.real("deployment", "sigma_ue_m", &mut v.sigma_ue_m);
        r.real("power", "p_1_dbm", &mut v.p_1_dbm);
        r.real("power", "p_2_dbm", &mut v.p_2_dbm);
        r.real("antenna", "g_main_dbi", &mut v.g_main_dbi);
        r.real("antenna", "g_side_dbi", &mut v.g_side_dbi);
        r.real("antenna", "theta_b_deg", &mut v.theta_b_deg);
        r.real("antenna", "g_1_dbi", &mut v.g_1_dbi);
        r.real("blockage", "p_los", &mut v.p_los);
        r.real("blockage", "r_los_ball_m", &mut v.r_los_ball_m);
        r.int("fading", "n_los", &mut v.n_los);
        r.int("fading", "n_nlos", &mut v.n_nlos);
        r.real("pathloss", "c_1_db", &mut v.c_1_db);
        r.real("pathloss", "c_los_db", &mut v.c_los_db);
        r.real("pathloss", "c_nlos_db", &mut v.c_nlos_db);
        r.real("pathloss", "alpha_1", &mut v.alpha_1);
        r.real("pathloss", "alpha_los", &mut v.alpha_los);
        r.real("pathloss", "alpha_nlos", &mut v.alpha_nlos);
        r.real("bandwidth", "w_1_mhz", &mut v.w_1_mhz);
        r.real("bandwidth", "w_2_mhz", &mut v.w_2_mhz);
        r.real("bandwidth", "noise_figure_db", &mut v.noise_figure_db);
        r.real("bias", "b_1_db", &mut v.b_1_db);
        r.real("bias", "b_2_db", &mut v.b_2_db);
        r.choice("simulation", "scenario", &mut v.scenario);
        r.int("simulation", "trials", &mut v.trials);
        r.int("simulation", "seed", &mut v.seed);
        r.real("simulation", "window_radius_m", &mut v.window_radius_m);
        r.parsed("simulation", "raw_trials", parse_bool, &mut v.raw_trials);
        r.real("analytic", "rel_tol", &mut v.rel_tol);
        r.choice("analytic", "intra_model", &mut v.intra_model);
        r.choice("analytic", "inter_count", &mut v.inter_count);
        r.choice("analytic", "nlos_exclusion", &mut v.nlos_exclusion);
        r.real("analytic", "v0_cutoff_sigmas", &mut v.v0_cutoff_sigmas);

        let sweep_given = r.doc.has_section("sweep");
        if sweep_given {
            let mut variable = Variable::None;
            r.choice("sweep", "variable", &mut variable);
            let grid_line = r.doc.line_of("sweep", "grid");
            let mut grid: Option<Vec<f64>> = None;
            r.parsed("sweep", "grid", |t| parse_grid(t).map(Some), &mut grid);
            let mut metrics = v.sweep.metrics.clone();
            r.parsed("sweep", "metrics", parse_metrics, &mut metrics);
            let mut tau_db = v.sweep.tau_db;
            r.real("sweep", "tau_db", &mut tau_db);
            match SweepSpec::new(variable, grid, metrics, tau_db) {
                Ok(s) => v.sweep = s,
                Err(e) => r.errors.push(ConfigError { line: grid_line.unwrap_or(0), message: format!("sweep: {e}") }),
            }
        }

        let mut errors = r.errors;
        errors.extend(doc.unused());
        errors.sort_by_key(|e| e.line);
        if !errors.is_empty() {
            return Err(ConfigErrors(errors));
        }

        let mut warnings = Vec::new();
        for key in ["b_1_db", "b_2_db"] {
            if doc.line_of("bias", key).is_none() {
                warnings.push(format!("bias.{key} not set; using the default 0 dB"));
            }
        }
        Ok(Config { values: v, warnings, doc })
    }

    /// Parameter invariants, reported against the line that set the
    /// offending key (line 0 when it kept its default).
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut errors: Vec<ConfigError> = self
            .values
            .to_params()
            .violations()
            .into_iter()
            .map(|viol| {
                let (section, key) = PARAM_KEYS
                    .iter()
                    .find(|(f, _, _)| *f == viol.field)
                    .map(|(_, s, k)| (*s, *k))
                    .unwrap_or(("", viol.field));
                ConfigError { line: self.doc.line_of(section, key).unwrap_or(0), message: format!("{section}.{key}: {}", viol.message) }
            })
            .collect();
        let mut extra = |ok: bool, section: &str, key: &str, message: String| {
            if !ok {
                errors.push(ConfigError { line: self.doc.line_of(section, key).unwrap_or(0), message: format!("{section}.{key}: {message}") });
            }
        };
        let v = &self.values;
        extra(v.trials > 0, "simulation", "trials", "must be > 0".into());
        extra(
            v.window_radius_m.is_finite() && v.window_radius_m > 0.0,
            "simulation",
            "window_radius_m",
            format!("must be finite and > 0, got {}", v.window_radius_m),
        );
        extra(v.rel_tol > 0.0 && v.rel_tol < 1.0, "analytic", "rel_tol", format!("must lie in (0, 1), got {}", v.rel_tol));
        extra(
            v.v0_cutoff_sigmas.is_finite() && v.v0_cutoff_sigmas > 0.0,
            "analytic",
            "v0_cutoff_sigmas",
            format!("must be finite and > 0, got {}", v.v0_cutoff_sigmas),
        );
        for (i, x) in v.sweep.grid.iter().enumerate() {
            let mut p = self.values.clone();
            v.sweep.variable.apply(&mut p, *x);
            for viol in p.to_params().violations() {
                errors.push(ConfigError {
                    line: self.doc.line_of("sweep", "grid").unwrap_or(0),
                    message: format!("sweep grid point {} ({} = {x}): {viol}", i + 1, v.sweep.variable),
                });
            }
        }
        errors.sort_by_key(|e| e.line);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some((a, rest)) = s.split_once(':') {
        // start:stop:step, stop included when hit within 1e-9 of a step
        let parts: Vec<&str> = std::iter::once(a).chain(rest.split(':')).collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:step, got '{s}'"));
        }
        let start = parse_real(parts[0].trim())?;
        let stop = parse_real(parts[1].trim())?;
        let step = parse_real(parts[2].trim())?;
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || step.is_infinite() {
            return Err(format!("range needs finite bounds and a positive step, got '{s}'"));
        }
        let n = ((stop - start) / step + 1e-9).floor();
        if n < 0.0 {
            return Ok(Vec::new());
        }
        if n > 1e5 {
            return Err(format!("range '{s}' has more than 100000 points"));
        }
        return Ok((0..=n as usize).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_real).collect()
}

fn parse_metrics(s: &str) -> Result<Vec<Metric>, String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
}

fn fmt_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl ConfigValues {
    /// Library parameters; conversions match [`SystemParams::table_defaults`]
    /// bit for bit on the default values.
    pub fn to_params(&self) -> SystemParams {
        let mut p = SystemParams::table_defaults();
        let d = &mut p.deployment;
        d.lambda_1 = per_km2_to_per_m2(self.lambda_1_per_km2);
        d.lambda_p = per_km2_to_per_m2(self.lambda_p_per_km2);
        d.n_bs = self.n_bs;
        d.sigma_bs = self.sigma_bs_m;
        d.sigma_ue = self.sigma_ue_m;
        let c = &mut p.channel;
        c.p_los = self.p_los;
        c.r_los_ball = self.r_los_ball_m;
        c.c_1 = db_to_linear(self.c_1_db);
        c.c_los = db_to_linear(self.c_los_db);
        c.c_nlos = db_to_linear(self.c_nlos_db);
        c.alpha_1 = self.alpha_1;
        c.alpha_los = self.alpha_los;
        c.alpha_nlos = self.alpha_nlos;
        c.n_los = self.n_los;
        c.n_nlos = self.n_nlos;
        c.g_1 = db_to_linear(self.g_1_dbi);
        c.g_main = db_to_linear(self.g_main_dbi);
        c.g_side = db_to_linear(self.g_side_dbi);
        c.theta_b = self.theta_b_deg.to_radians();
        c.w_1 = self.w_1_mhz * 1e6;
        c.w_2 = self.w_2_mhz * 1e6;
        c.noise_figure_db = self.noise_figure_db;
        p.p_1 = dbm_to_watts(self.p_1_dbm);
        p.p_2 = dbm_to_watts(self.p_2_dbm);
        p.bias_1 = db_to_linear(self.b_1_db);
        p.bias_2 = db_to_linear(self.b_2_db);
        p
    }

    pub fn analytic_options(&self) -> AnalyticOptions {
        let mut o = AnalyticOptions::default().with_rel_tol(self.rel_tol);
        o.intra_model = self.intra_model;
        o.inter_count = self.inter_count;
        o.nlos_exclusion = self.nlos_exclusion;
        o.v0_cutoff_sigmas = self.v0_cutoff_sigmas;
        o
    }

    /// The configuration as file text; parsing it yields `self` again.
    pub fn to_text(&self) -> String {
        let r = fmt_real;
        let sections: [(&str, Vec<(&str, String)>); 11] = [
            (
                "deployment",
                vec![
                    ("lambda_1_per_km2", r(self.lambda_1_per_km2)),
                    ("lambda_p_per_km2", r(self.lambda_p_per_km2)),
                    ("n_bs", self.n_bs.to_string()),
                    ("sigma_bs_m", r(self.sigma_bs_m)),
                    ("sigma_ue_m", r(self.sigma_ue_m)),
                ],
            ),
            ("power", vec![("p_1_dbm", r(self.p_1_dbm)), ("p_2_dbm", r(self.p_2_dbm))]),
            (
                "antenna",
                vec![
                    ("g_main_dbi", r(self.g_main_dbi)),
                    ("g_side_dbi", r(self.g_side_dbi)),
                    ("theta_b_deg", r(self.theta_b_deg)),
                    ("g_1_dbi", r(self.g_1_dbi)),
                ],
            ),
            ("blockage", vec![("p_los", r(self.p_los)), ("r_los_ball_m", r(self.r_los_ball_m))]),
            ("fading", vec![("n_los", self.n_los.to_string()), ("n_nlos", self.n_nlos.to_string())]),
            (
                "pathloss",
                vec![
                    ("c_1_db", r(self.c_1_db)),
                    ("c_los_db", r(self.c_los_db)),
                    ("c_nlos_db", r(self.c_nlos_db)),
                    ("alpha_1", r(self.alpha_1)),
                    ("alpha_los", r(self.alpha_los)),
                    ("alpha_nlos", r(self.alpha_nlos)),
                ],
            ),
            (
                "bandwidth",
                vec![("w_1_mhz", r(self.w_1_mhz)), ("w_2_mhz", r(self.w_2_mhz)), ("noise_figure_db", r(self.noise_figure_db))],
            ),
            ("bias", vec![("b_1_db", r(self.b_1_db)), ("b_2_db", r(self.b_2_db))]),
            (
                "simulation",
                vec![
                    ("scenario", self.scenario.label().to_string()),
                    ("trials", self.trials.to_string()),
                    ("seed", self.seed.to_string()),
                    ("window_radius_m", r(self.window_radius_m)),
                    ("raw_trials", self.raw_trials.to_string()),
                ],
            ),
            (
                "analytic",
                vec![
                    ("rel_tol", r(self.rel_tol)),
                    ("intra_model", self.intra_model.label().to_string()),
                    ("inter_count", self.inter_count.label().to_string()),
                    ("nlos_exclusion", self.nlos_exclusion.label().to_string()),
                    ("v0_cutoff_sigmas", r(self.v0_cutoff_sigmas)),
                ],
            ),
            (
                "sweep",
                [
                    Some(("variable", self.sweep.variable.label().to_string())),
                    (self.sweep.variable != Variable::None)
                        .then(|| ("grid", self.sweep.grid.iter().map(|x| r(*x)).collect::<Vec<_>>().join(", "))),
                    Some(("metrics", self.sweep.metrics.iter().map(|m| m.label()).collect::<Vec<_>>().join(", "))),
                    Some(("tau_db", r(self.sweep.tau_db))),
                ]
                .into_iter()
                .flatten()
                .collect(),
            ),
        ];
        let mut out = String::new();
        for (i, (name, keys)) in sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, val) in keys {
                out.push_str(&format!("{k} = {val}\n"));
            }
        }
        out
    }
}
