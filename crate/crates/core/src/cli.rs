//! Command-line front end: figure data, spectra, verification suites and
//! scattering sweeps.
//!
//! Settings come from built-in defaults, then an optional `key = value`
//! file (`--config`), then command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::field::linspace;
use crate::output::{csv_table, to_json_string};
use crate::scattering::{
    plane_partner_sweep, sweep_csv, transmission_reflection, PiecewisePotential, ScatteringResult,
};
use crate::spectral::{
    converged_spectrum, isospectral_check, truncation_study, well_spectrum_analytic,
    SpectrumReport, DEFAULT_INTERIOR_POINTS, MIN_INTERIOR_POINTS,
};
use crate::states::{pt_asymmetry, schrodinger_residual, WaveFunctionSpec};
use crate::susy::{check_shape_invariance, Constraint, Family, Partner, SuperpotentialSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_INVALID_CONFIG: i32 = 3;

/// Number of rows in each figure table.
pub const FIGURE_POINTS: usize = 1000;
/// Truncations used by the exploratory sweep.
pub const SWEEP_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const FIG1_COLUMNS: [&str; 6] = ["x", "V1_c_re", "V1_c_im", "V1_t_re", "V1_t_im", "V1_q0"];
pub const FIG2_COLUMNS: [&str; 7] = [
    "x", "V2_c_re", "V2_c_im", "V2_t_re", "V2_t_im", "V2_c_q0", "V2_t_q0",
];

/// Raw tolerance for box levels on a single grid.
const RAW_LEVEL_TOL: f64 = 1e-3;
/// Tolerance for Richardson-extrapolated box levels.
const EXTRAPOLATED_LEVEL_TOL: f64 = 1e-6;
const ISOSPECTRAL_TOL: f64 = 1e-4;
const RESIDUAL_STEP: f64 = 1e-4;
const RESIDUAL_TOL: f64 = 1e-6;
const DENSITY_TOL: f64 = 1e-12;
const DENSITY_POINTS: usize = 2000;
const PT_TOL: f64 = 1e-12;
/// Distance (in units of `1/k`) kept from the walls in the PT test.
const PT_MARGIN: f64 = PI / 16.0;
const FLUX_TOL: f64 = 1e-10;
const SHAPE_SAMPLES: usize = 1000;
const SHAPE_MARGIN: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "ptsusy",
    version,
    about = "Complexified SUSY partners of the square well and plane waves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write the partner-potential tables fig1 and fig2.
    Figures,
    /// Spectra of V1 and V2 on the well box.
    Spectrum,
    /// Run every invariant suite and write a pass/fail report.
    Verify,
    /// Transmission and reflection over an energy sweep.
    Scatter,
}

/// Flags shared by every subcommand. Each one may also appear in the
/// config file under the same name with `-` replaced by `_`.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// key = value settings file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// cotangent-well | tangent-well | plane-right | plane-left
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Shift parameter; defaults to k
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Endpoint truncation for singular partners and figure ranges
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_min: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_max: Option<String>,
    /// Interior grid sizes, comma separated
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Number of eigenvalues
    #[arg(long, global = true)]
    pub count: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv | json
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Scattering energies, comma separated
    #[arg(long, global = true)]
    pub energies: Option<String>,
    /// Scattering window `a,b` for plane partners
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// v1 | v2
    #[arg(long, global = true)]
    pub partner: Option<String>,
    /// Constant barrier preset `height,width`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub barrier: Option<String>,
    /// Spectra over the truncations 1e-2, 1e-3, 1e-4 (never gates)
    #[arg(long, global = true)]
    pub eps_sweep: bool,
    /// Replace the constraint by its doubled-frequency variant
    #[arg(long, global = true)]
    pub negative_control: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("expected csv or json, got '{other}'")),
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub k: f64,
    pub q: f64,
    pub alpha: f64,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub epsilon: f64,
    pub grid: Vec<usize>,
    pub count: usize,
    pub out: PathBuf,
    pub format: Option<OutputFormat>,
    pub energies: Option<Vec<f64>>,
    pub window: Option<(f64, f64)>,
    pub partner: Partner,
    pub barrier: Option<(f64, f64)>,
    pub eps_sweep: bool,
    pub negative_control: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: Family::CotangentWell,
            k: 1.0,
            q: 2.0,
            alpha: 1.0,
            x_min: None,
            x_max: None,
            epsilon: 1e-3,
            grid: vec![DEFAULT_INTERIOR_POINTS],
            count: 5,
            out: PathBuf::from("out"),
            format: None,
            energies: None,
            window: None,
            partner: Partner::V1,
            barrier: None,
            eps_sweep: false,
            negative_control: false,
        }
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config {
        field: String,
        message: String,
    },
    Numerical(Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(
                Error::ConvergenceFailure(_)
                | Error::SliceTooCoarse { .. }
                | Error::EvanescentOverflow { .. },
            ) => EXIT_CONVERGENCE,
            _ => EXIT_INVALID_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "invalid `{field}`: {message}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

/// Parses a flat `key = value` file. `#` starts a comment; keys may use
/// `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(
                "config",
                format!("line {}: expected key = value", lineno + 1),
            ));
        };
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: FromStr>(field: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::config(field, format!("cannot parse '{raw}'")))
}

fn parse_list<T: FromStr>(field: &str, raw: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(field, s))
        .collect()
}

fn parse_pair(field: &str, raw: &str) -> Result<(f64, f64), CliError> {
    match parse_list::<f64>(field, raw)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::config(
            field,
            "expected two comma-separated numbers",
        )),
    }
}

fn parse_bool(field: &str, raw: &str) -> Result<bool, CliError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::config(
            field,
            format!("expected true or false, got '{raw}'"),
        )),
    }
}

impl RunConfig {
    /// Defaults, then the config file named in `overrides`, then the flags.
    pub fn resolve(overrides: &Overrides) -> Result<Self, CliError> {
        let mut settings = match &overrides.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let flags = [
            ("family", &overrides.family),
            ("k", &overrides.k),
            ("q", &overrides.q),
            ("alpha", &overrides.alpha),
            ("epsilon", &overrides.epsilon),
            ("x_min", &overrides.x_min),
            ("x_max", &overrides.x_max),
            ("grid", &overrides.grid),
            ("count", &overrides.count),
            ("out", &overrides.out),
            ("format", &overrides.format),
            ("energies", &overrides.energies),
            ("window", &overrides.window),
            ("partner", &overrides.partner),
            ("barrier", &overrides.barrier),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.insert(key.to_string(), v.clone());
            }
        }
        if overrides.eps_sweep {
            settings.insert("eps_sweep".into(), "true".into());
        }
        if overrides.negative_control {
            settings.insert("negative_control".into(), "true".into());
        }
        Self::from_settings(&settings)
    }

    pub fn from_settings(settings: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut alpha = None;
        for (key, raw) in settings {
            let key = key.as_str();
            match key {
                "family" => {
                    cfg.family = raw
                        .parse()
                        .map_err(|e: Error| CliError::config(key, e.to_string()))?
                }
                "k" => cfg.k = parse_num(key, raw)?,
                "q" => cfg.q = parse_num(key, raw)?,
                "alpha" => alpha = Some(parse_num(key, raw)?),
                "epsilon" => cfg.epsilon = parse_num(key, raw)?,
                "x_min" => cfg.x_min = Some(parse_num(key, raw)?),
                "x_max" => cfg.x_max = Some(parse_num(key, raw)?),
                "grid" => cfg.grid = parse_list(key, raw)?,
                "count" => cfg.count = parse_num(key, raw)?,
                "out" => cfg.out = PathBuf::from(raw),
                "format" => {
                    cfg.format = Some(raw.parse().map_err(|e: String| CliError::config(key, e))?)
                }
                "energies" => cfg.energies = Some(parse_list(key, raw)?),
                "window" => cfg.window = Some(parse_pair(key, raw)?),
                "partner" => {
                    cfg.partner = match raw.trim().to_ascii_lowercase().as_str() {
                        "v1" | "1" => Partner::V1,
                        "v2" | "2" => Partner::V2,
                        other => {
                            return Err(CliError::config(
                                key,
                                format!("expected v1 or v2, got '{other}'"),
                            ))
                        }
                    }
                }
                "barrier" => cfg.barrier = Some(parse_pair(key, raw)?),
                "eps_sweep" => cfg.eps_sweep = parse_bool(key, raw)?,
                "negative_control" => cfg.negative_control = parse_bool(key, raw)?,
                other => return Err(CliError::config(other, "unknown setting")),
            }
        }
        cfg.alpha = alpha.unwrap_or(cfg.k);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(CliError::config(
                "k",
                format!("must be positive, got {}", self.k),
            ));
        }
        if !self.q.is_finite() {
            return Err(CliError::config("q", "must be finite"));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(CliError::config(
                "alpha",
                format!("must be positive, got {}", self.alpha),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon < 0.25 * PI / self.k) {
            return Err(CliError::config(
                "epsilon",
                format!("must lie in (0, π/4k), got {}", self.epsilon),
            ));
        }
        match (self.x_min, self.x_max) {
            (Some(a), Some(b)) if !(a.is_finite() && b.is_finite() && a < b) => {
                return Err(CliError::config(
                    "x_max",
                    format!("domain [{a}, {b}] is empty"),
                ))
            }
            (Some(_), None) => return Err(CliError::config("x_max", "missing; x_min was given")),
            (None, Some(_)) => return Err(CliError::config("x_min", "missing; x_max was given")),
            _ => {}
        }
        if self.grid.is_empty() {
            return Err(CliError::config("grid", "needs at least one size"));
        }
        if let Some(&n) = self.grid.iter().find(|&&n| n < MIN_INTERIOR_POINTS) {
            return Err(CliError::config(
                "grid",
                format!("sizes must be at least {MIN_INTERIOR_POINTS}, got {n}"),
            ));
        }
        let smallest = *self.grid.iter().min().unwrap();
        if self.count == 0 || self.count > smallest {
            return Err(CliError::config(
                "count",
                format!("must lie in 1..={smallest}, got {}", self.count),
            ));
        }
        if let Some(es) = &self.energies {
            if es.is_empty() {
                return Err(CliError::config("energies", "list is empty"));
            }
            if let Some(e) = es.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
                return Err(CliError::config(
                    "energies",
                    format!("must be positive, got {e}"),
                ));
            }
        }
        if let Some((a, b)) = self.window {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(CliError::config("window", format!("[{a}, {b}] is empty")));
            }
        }
        if let Some((v0, w)) = self.barrier {
            if !(v0.is_finite() && w.is_finite() && w >= 0.0) {
                return Err(CliError::config(
                    "barrier",
                    "needs a finite height and width ≥ 0",
                ));
            }
        }
        Ok(())
    }

    pub fn spec(&self, family: Family, q: f64) -> Result<SuperpotentialSpec, CliError> {
        let constraint = if self.negative_control {
            Constraint::DoubledFrequency
        } else {
            Constraint::ShapeInvariant
        };
        Ok(SuperpotentialSpec::new(family, self.k, q)?
            .with_alpha(self.alpha)?
            .with_constraint(constraint))
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Every gating check passed.
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Writes all files at once, creating the output directory first.
fn write_files(dir: &Path, files: Vec<(String, String)>) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}

fn json_text<T: Serialize>(value: &T) -> String {
    to_json_string(value).expect("values built here always serialize")
}

/// Column-oriented JSON object for a table.
fn table_json(header: &[&str], rows: &[Vec<f64>]) -> Value {
    let mut obj = serde_json::Map::new();
    for (j, name) in header.iter().enumerate() {
        obj.insert(name.to_string(), rows.iter().map(|r| r[j]).collect());
    }
    Value::Object(obj)
}

fn table_file(
    stem: &str,
    header: &[&str],
    rows: &[Vec<f64>],
    format: OutputFormat,
) -> (String, String) {
    match format {
        OutputFormat::Csv => (format!("{stem}.csv"), csv_table(header, rows)),
        OutputFormat::Json => (format!("{stem}.json"), json_text(&table_json(header, rows))),
    }
}

/// `(re, im)` of one well partner as tabulated in the figures.
pub fn partner_columns(
    family: Family,
    which: Partner,
    k: f64,
    q: f64,
    alpha: f64,
    x: f64,
) -> Result<[f64; 2], Error> {
    let v = SuperpotentialSpec::new(family, k, q)?
        .with_alpha(alpha)?
        .partner(which, x)?;
    Ok([v.re, v.im])
}

/// `x, V1_c (re, im), V1_t (re, im), V1 at q = 0`.
pub fn figure1_row(k: f64, q: f64, alpha: f64, x: f64) -> Result<[f64; 6], Error> {
    let c = partner_columns(Family::CotangentWell, Partner::V1, k, q, alpha, x)?;
    let t = partner_columns(Family::TangentWell, Partner::V1, k, q, alpha, x)?;
    let base = partner_columns(Family::CotangentWell, Partner::V1, k, 0.0, alpha, x)?;
    Ok([x, c[0], c[1], t[0], t[1], base[0]])
}

/// `x, V2_c (re, im), V2_t (re, im), V2_c and V2_t at q = 0`.
pub fn figure2_row(k: f64, q: f64, alpha: f64, x: f64) -> Result<[f64; 7], Error> {
    let c = partner_columns(Family::CotangentWell, Partner::V2, k, q, alpha, x)?;
    let t = partner_columns(Family::TangentWell, Partner::V2, k, q, alpha, x)?;
    let bc = partner_columns(Family::CotangentWell, Partner::V2, k, 0.0, alpha, x)?;
    let bt = partner_columns(Family::TangentWell, Partner::V2, k, 0.0, alpha, x)?;
    Ok([x, c[0], c[1], t[0], t[1], bc[0], bt[0]])
}

/// Sample positions of the figure tables.
pub fn figure_positions(cfg: &RunConfig) -> Vec<f64> {
    let (lo, hi) = match (cfg.x_min, cfg.x_max) {
        (Some(a), Some(b)) => (a, b),
        _ => (cfg.epsilon, PI - cfg.epsilon),
    };
    linspace(lo, hi, FIGURE_POINTS)
}

pub fn cmd_figures(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !cfg.family.is_well() {
        return Err(CliError::config("family", "figures need a well family"));
    }
    let xs = figure_positions(cfg);
    let fig1 = xs
        .iter()
        .map(|&x| figure1_row(cfg.k, cfg.q, cfg.alpha, x).map(|r| r.to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let fig2 = xs
        .iter()
        .map(|&x| figure2_row(cfg.k, cfg.q, cfg.alpha, x).map(|r| r.to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let format = cfg.format.unwrap_or(OutputFormat::Csv);
    let files = write_files(
        &cfg.out,
        vec![
            table_file("fig1", &FIG1_COLUMNS, &fig1, format),
            table_file("fig2", &FIG2_COLUMNS, &fig2, format),
        ],
    )?;
    Ok(Outcome {
        passed: true,
        summary: format!("{} rows per figure, k = {}, q = {}", xs.len(), cfg.k, cfg.q),
        files,
    })
}

/// Interval for spectra: the explicit bounds, else the family's regular
/// cell, shrunk by `ε` when the partners are singular at its ends.
pub fn spectrum_domain(cfg: &RunConfig, epsilon: Option<f64>) -> Result<(f64, f64), CliError> {
    if let (Some(a), Some(b)) = (cfg.x_min, cfg.x_max) {
        return Ok((a, b));
    }
    let spec = cfg.spec(cfg.family, cfg.q)?;
    let (lo, hi) = spec.regular_cell().ok_or_else(|| {
        CliError::config("family", "plane families need explicit x_min and x_max")
    })?;
    let eps = epsilon.unwrap_or(if cfg.q == 0.0 { 0.0 } else { cfg.epsilon });
    if lo + eps >= hi - eps {
        return Err(CliError::config("epsilon", "truncation leaves no interval"));
    }
    Ok((lo + eps, hi - eps))
}

fn spectrum_json(report: &SpectrumReport) -> String {
    json_text(report)
}

fn spectrum_csv(report: &SpectrumReport) -> String {
    let rows: Vec<Vec<f64>> = report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let extrapolated = report
                .richardson_estimates
                .get(j)
                .copied()
                .unwrap_or(f64::NAN);
            vec![j as f64, z.re, z.im, extrapolated]
        })
        .collect();
    csv_table(&["n", "re", "im", "richardson"], &rows)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.eps_sweep {
        return cmd_eps_sweep(cfg);
    }
    let (lo, hi) = spectrum_domain(cfg, None)?;
    let spec = cfg.spec(cfg.family, cfg.q)?;
    let v1 = converged_spectrum(
        &spec.partner_field(Partner::V1),
        lo,
        hi,
        &cfg.grid,
        cfg.count,
    )?;
    let v2 = converged_spectrum(
        &spec.partner_field(Partner::V2),
        lo,
        hi,
        &cfg.grid,
        cfg.count,
    )?;
    let format = cfg.format.unwrap_or(OutputFormat::Json);
    let render = |r: &SpectrumReport| match format {
        OutputFormat::Json => spectrum_json(r),
        OutputFormat::Csv => spectrum_csv(r),
    };
    let ext = match format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    };

    let mut summary = String::new();
    let mut passed = true;
    let gated = cfg.q == 0.0
        && cfg.family.is_well()
        && cfg.x_min.is_none()
        && cfg.alpha == cfg.k
        && !cfg.negative_control;
    if gated {
        // Box of width π/k: E_n = k² n(n + 2) for V1, and V2 lacks E_0.
        let scale = cfg.k * cfg.k;
        let extrapolated = !v1.richardson_estimates.is_empty();
        let (values, tol) = if extrapolated {
            (
                v1.richardson_estimates.clone(),
                EXTRAPOLATED_LEVEL_TOL * scale.max(1.0),
            )
        } else {
            (v1.real_parts(), RAW_LEVEL_TOL * scale.max(1.0))
        };
        summary.push_str(&format!(
            "{:>3}  {:>22}  {:>22}  {:>10}\n",
            "n", "V1", "V2", "exact"
        ));
        for (n, value) in values.iter().enumerate() {
            let exact = scale * well_spectrum_analytic(n as u32);
            let v2_text = if n >= 1 && n - 1 < v2.eigenvalues.len() {
                format!("{:>22.15}", v2.eigenvalues[n - 1].re)
            } else {
                format!("{:>22}", "-")
            };
            summary.push_str(&format!("{n:>3}  {value:>22.15}  {v2_text}  {exact:>10}\n"));
            passed &= (value - exact).abs() <= tol;
        }
        let iso = isospectral_check(&v1, &v2, 1, ISOSPECTRAL_TOL * scale.max(1.0))?;
        summary.push_str(&format!(
            "isospectral V2 vs V1 (shift 1): max error {:.3e} over {} levels\n",
            iso.max_error, iso.matched
        ));
        passed &= iso.passed;
    } else {
        for (name, r) in [("V1", &v1), ("V2", &v2)] {
            summary.push_str(&format!("{name}: max |Im| = {:.3e}\n", r.max_imag));
            for (n, z) in r.eigenvalues.iter().enumerate() {
                summary.push_str(&format!("{n:>3}  {:>22.15}  {:>+12.3e}i\n", z.re, z.im));
            }
        }
    }
    let files = write_files(
        &cfg.out,
        vec![
            (format!("spectrum_v1.{ext}"), render(&v1)),
            (format!("spectrum_v2.{ext}"), render(&v2)),
        ],
    )?;
    Ok(Outcome {
        passed,
        files,
        summary,
    })
}

/// Exploratory truncation study; always passes.
fn cmd_eps_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.spec(cfg.family, cfg.q)?;
    if !cfg.family.is_well() {
        return Err(CliError::config(
            "family",
            "the truncation sweep needs a well family",
        ));
    }
    let mut files = Vec::new();
    let mut summary = String::new();
    for eps in SWEEP_EPSILONS {
        let mut report = serde_json::Map::new();
        report.insert("epsilon".into(), json!(eps));
        for which in [Partner::V1, Partner::V2] {
            let rows = truncation_study(&spec, which, &[eps], &cfg.grid, cfg.count)?;
            for row in &rows {
                summary.push_str(&format!(
                    "ε = {eps:e}  n = {:>5}  {which:?}: {}\n",
                    row.n_interior,
                    match (&row.max_imag, &row.error) {
                        (Some(m), _) => format!("max |Im| = {m:.3e} ({:?})", row.phase.unwrap()),
                        (_, Some(e)) => format!("failed: {e}"),
                        _ => String::new(),
                    }
                ));
            }
            report.insert(
                format!("{which:?}"),
                serde_json::to_value(&rows).expect("serializable"),
            );
        }
        files.push((
            format!("eps_sweep_{eps:e}.json"),
            json_text(&Value::Object(report)),
        ));
    }
    Ok(Outcome {
        passed: true,
        files: write_files(&cfg.out, files)?,
        summary,
    })
}

/// One entry of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub gating: bool,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(name: String, gating: bool, value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            gating,
            passed: value <= tolerance,
            value,
            tolerance,
            detail,
        }
    }

    fn failed(name: String, gating: bool, err: &Error) -> Self {
        Self {
            name,
            gating,
            passed: false,
            value: f64::NAN,
            tolerance: f64::NAN,
            detail: err.to_string(),
        }
    }
}

fn check_or_fail(name: String, gating: bool, run: impl FnOnce() -> Result<Check, Error>) -> Check {
    run().unwrap_or_else(|e| Check::failed(name, gating, &e))
}

/// Interior sample points of a family, `margin / k` from the walls.
fn sample_points(family: Family, k: f64, n: usize, margin: f64) -> Vec<f64> {
    match family {
        Family::CotangentWell => linspace(margin / k, (PI - margin) / k, n),
        Family::TangentWell => linspace((-0.5 * PI + margin) / k, (0.5 * PI - margin) / k, n),
        Family::PlaneRight | Family::PlaneLeft => linspace(-PI / k, PI / k, n),
    }
}

/// Shape invariance, ground-state residuals, density equality, PT
/// asymmetry, isospectrality and flux conservation at the configured
/// `(k, q)`.
pub fn verification_checks(cfg: &RunConfig) -> Vec<Check> {
    let (k, q) = (cfg.k, cfg.q);
    let mut checks = Vec::new();

    for family in Family::ALL {
        let name = format!("shape_invariance/{family}");
        checks.push(check_or_fail(name.clone(), true, || {
            let spec = cfg.spec(family, q).map_err(|e| match e {
                CliError::Numerical(e) => e,
                other => Error::InvalidInput(other.to_string()),
            })?;
            let si =
                check_shape_invariance(&spec, &spec.regular_samples(SHAPE_SAMPLES, SHAPE_MARGIN))?;
            let expected = cfg.alpha * (cfg.alpha + 2.0 * k);
            let spread = si.max_abs_deviation.max((si.mean - expected).norm());
            Ok(Check::new(
                name,
                true,
                spread,
                si.tolerance(),
                format!("mean remainder {} (expected {expected})", si.mean),
            ))
        }));
    }

    for family in Family::ALL {
        let name = format!("ground_state_residual/{family}");
        checks.push(check_or_fail(name.clone(), true, || {
            let psi = WaveFunctionSpec::new(family, k, q)?;
            let v1 = psi.superpotential().partner_field(Partner::V1);
            let worst = sample_points(family, k, 5, 0.2 * PI)
                .into_iter()
                .map(|x| schrodinger_residual(&v1, &psi, 0.0, x, RESIDUAL_STEP).map(|r| r.norm()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(Check::new(
                name,
                true,
                worst,
                RESIDUAL_TOL,
                format!("h = {RESIDUAL_STEP}"),
            ))
        }));
    }

    for family in [Family::CotangentWell, Family::TangentWell] {
        let name = format!("density_equality/{family}");
        checks.push(check_or_fail(name.clone(), true, || {
            let psi = WaveFunctionSpec::new(family, k, q)?;
            let free = WaveFunctionSpec::new(family, k, 0.0)?;
            let (lo, hi) = psi.cell().expect("well family");
            let xs = linspace(lo, hi, DENSITY_POINTS + 2);
            let mut worst = 0.0f64;
            for &x in &xs[1..xs.len() - 1] {
                worst =
                    worst.max((psi.probability_density(x)? - free.probability_density(x)?).abs());
            }
            Ok(Check::new(
                name,
                true,
                worst,
                DENSITY_TOL,
                format!("{DENSITY_POINTS} points"),
            ))
        }));
    }

    for family in Family::ALL {
        for which in [Partner::V1, Partner::V2] {
            let name = format!("pt_asymmetry/{family}/{which:?}");
            let gating = family.is_well();
            checks.push(check_or_fail(name.clone(), gating, || {
                let spec = SuperpotentialSpec::new(family, k, q)?;
                let center = match family {
                    Family::CotangentWell => 0.5 * PI / k,
                    _ => 0.0,
                };
                let xs = sample_points(family, k, 501, PT_MARGIN);
                let a = pt_asymmetry(&spec.partner_field(which), center, &xs)?;
                Ok(Check::new(
                    name,
                    gating,
                    a,
                    PT_TOL,
                    format!("center {center}"),
                ))
            }));
        }
    }

    let name = "isospectrality/q0".to_string();
    checks.push(check_or_fail(name.clone(), true, || {
        let spec = SuperpotentialSpec::new(Family::CotangentWell, k, 0.0)?;
        let (lo, hi) = spec.regular_cell().expect("well family");
        let n = *cfg.grid.iter().max().unwrap();
        let v1 = converged_spectrum(
            &spec.partner_field(Partner::V1),
            lo,
            hi,
            &[n],
            cfg.count + 1,
        )?;
        let v2 = converged_spectrum(&spec.partner_field(Partner::V2), lo, hi, &[n], cfg.count)?;
        let tol = ISOSPECTRAL_TOL * (k * k).max(1.0);
        let m = isospectral_check(&v1, &v2, 1, tol)?;
        Ok(Check::new(
            name,
            true,
            m.max_error,
            tol,
            format!("{} levels, n = {n}", m.matched),
        ))
    }));

    let name = "flux_conservation/barrier".to_string();
    checks.push(check_or_fail(name.clone(), true, || {
        let v0 = 4.0;
        let pot = PiecewisePotential::constant_barrier(v0, 0.0, 1.0)?;
        let mut worst = 0.0f64;
        for f in [0.1, 0.5, 2.0, 5.0, 10.0] {
            worst = worst.max(transmission_reflection(&pot, f * v0)?.flux_defect.abs());
        }
        Ok(Check::new(
            name,
            true,
            worst,
            FLUX_TOL,
            format!("V0 = {v0}, width 1"),
        ))
    }));

    checks
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = verification_checks(cfg);
    let passed = checks.iter().filter(|c| c.gating).all(|c| c.passed);
    let report = json!({
        "k": cfg.k,
        "q": cfg.q,
        "alpha": cfg.alpha,
        "negative_control": cfg.negative_control,
        "passed": passed,
        "checks": checks,
    });
    let mut summary = String::new();
    for c in &checks {
        summary.push_str(&format!(
            "{} {}{}: {:.3e} (tol {:.1e})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            if c.gating { "" } else { " [non-gating]" },
            c.value,
            c.tolerance
        ));
    }
    Ok(Outcome {
        passed,
        files: write_files(&cfg.out, vec![("verify.json".into(), json_text(&report))])?,
        summary,
    })
}

/// Default energies: multiples of the barrier height, or of `k²`.
fn default_energies(scale: f64) -> Vec<f64> {
    [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * scale)
        .collect()
}

pub fn scatter_results(cfg: &RunConfig) -> Result<Vec<ScatteringResult>, CliError> {
    if let Some((v0, width)) = cfg.barrier {
        let pot = PiecewisePotential::constant_barrier(v0, 0.0, width)?;
        let energies = cfg
            .energies
            .clone()
            .unwrap_or_else(|| default_energies(v0.abs().max(1.0)));
        return Ok(energies
            .iter()
            .map(|&e| transmission_reflection(&pot, e))
            .collect::<Result<Vec<_>, _>>()?);
    }
    if !cfg.family.is_plane() {
        return Err(CliError::config(
            "family",
            "scatter needs a plane family or a barrier preset",
        ));
    }
    let spec = cfg.spec(cfg.family, cfg.q)?;
    let window = cfg.window.unwrap_or((0.0, 2.0 * PI / cfg.k));
    let energies = cfg
        .energies
        .clone()
        .unwrap_or_else(|| default_energies(cfg.k * cfg.k));
    Ok(plane_partner_sweep(&spec, cfg.partner, window, &energies)?)
}

pub fn cmd_scatter(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let results = scatter_results(cfg)?;
    let file = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => ("scatter.csv".to_string(), sweep_csv(&results)),
        OutputFormat::Json => ("scatter.json".to_string(), json_text(&results)),
    };
    let worst = results
        .iter()
        .map(|r| r.flux_defect.abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        passed: true,
        files: write_files(&cfg.out, vec![file])?,
        summary: format!("{} energies, max |flux defect| {worst:.3e}", results.len()),
    })
}

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Figures => cmd_figures(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Scatter => cmd_scatter(cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::resolve(&cli.overrides).and_then(|cfg| dispatch(cli.command, &cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if !outcome.summary.is_empty() && !outcome.summary.ends_with('\n') {
                println!();
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if !outcome.passed {
                eprintln!("error: a gating check failed");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn config_text_parsing() {
        let map = parse_config_text("# comment\nk = 2\n\nx-min=0.5 # trailing\n").unwrap();
        assert_eq!(map["k"], "2");
        assert_eq!(map["x_min"], "0.5");
        assert!(parse_config_text("k 2").is_err());
    }

    #[test]
    fn defaults_are_caption_parameters() {
        let cfg = RunConfig::from_settings(&BTreeMap::new()).unwrap();
        assert_eq!(
            (cfg.k, cfg.q, cfg.alpha, cfg.epsilon),
            (1.0, 2.0, 1.0, 1e-3)
        );
        assert_eq!(cfg.family, Family::CotangentWell);
    }

    #[test]
    fn alpha_follows_k() {
        let cfg = RunConfig::from_settings(&settings(&[("k", "3")])).unwrap();
        assert_eq!(cfg.alpha, 3.0);
        let cfg = RunConfig::from_settings(&settings(&[("k", "3"), ("alpha", "1")])).unwrap();
        assert_eq!(cfg.alpha, 1.0);
    }

    #[test]
    fn invalid_fields_are_named() {
        for (key, value) in [
            ("k", "-1"),
            ("k", "abc"),
            ("grid", "8"),
            ("count", "0"),
            ("epsilon", "0"),
            ("format", "xml"),
            ("family", "square"),
            ("energies", "1,-2"),
            ("bogus", "1"),
        ] {
            match RunConfig::from_settings(&settings(&[(key, value)])) {
                Err(CliError::Config { field, .. }) => assert_eq!(field, key),
                other => panic!("{key} = {value}: {other:?}"),
            }
        }
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(
            CliError::config("k", "bad").exit_code(),
            EXIT_INVALID_CONFIG
        );
        assert_eq!(
            CliError::Numerical(Error::ConvergenceFailure("x".into())).exit_code(),
            EXIT_CONVERGENCE
        );
    }

    #[test]
    fn figure_columns_at_midpoint() {
        let c =
            partner_columns(Family::CotangentWell, Partner::V1, 1.0, 2.0, 1.0, 0.5 * PI).unwrap();
        assert_eq!(c[0], -5.0);
        assert!(c[1].abs() <= 1e-15);
        // the tangent partner diverges there, so no full row exists
        assert!(figure1_row(1.0, 2.0, 1.0, 0.5 * PI).is_err());
        let r = figure1_row(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!([r[1], r[2], r[3], r[4], r[5]], [-1.0, 0.0, -1.0, 0.0, -1.0]);
        let c =
            partner_columns(Family::CotangentWell, Partner::V2, 1.0, 0.0, 1.0, 0.5 * PI).unwrap();
        assert_eq!(c[0], 1.0);
    }
}
