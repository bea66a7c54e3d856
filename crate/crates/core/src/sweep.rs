//! One-dimensional parameter sweeps written as CSV plus a JSON manifest.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{config_hash, parse_power_density};
use crate::ee::{closed_form_se, compare_setups, energy_efficiency_at, knee_point, SetupRow};
use crate::montecarlo::{derive_seed, mc_ergodic_se};
use crate::power::PowerBreakdown;
use crate::scenario::{Scenario, SetupPreset, SystemFamily};
use crate::throughput::se_upper_bound;
use crate::{dbm_per_hz_to_watts, Error, Result};

pub const CSV_HEADER: &str = "axis_value,N,K,B_hz,P_w_per_hz,se_ub,se_app,se_mc_mean,se_mc_ci95,\
throughput_bps,p_total_w,p_pa_w,p_converters_w,p_baseband_w,p_fixed_w,ee_bits_per_joule,notes";

/// Knee fraction reported in antenna sweeps.
pub const DEFAULT_KNEE_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Bandwidth,
    Antennas,
    Users,
    TxPower,
    /// Values 1, 2, 3 select the reference setups.
    Setup,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bandwidth" => SweepAxis::Bandwidth,
            "antennas" => SweepAxis::Antennas,
            "users" => SweepAxis::Users,
            "tx_power" => SweepAxis::TxPower,
            "setup" => SweepAxis::Setup,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown axis '{other}' (bandwidth, antennas, users, tx_power, setup)"
                )))
            }
        })
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Bandwidth => "bandwidth",
            SweepAxis::Antennas => "antennas",
            SweepAxis::Users => "users",
            SweepAxis::TxPower => "tx_power",
            SweepAxis::Setup => "setup",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    ClosedForm,
    MonteCarlo,
    /// Both estimates; throughput, power and EE use the closed form.
    Both,
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed_form" => SweepMode::ClosedForm,
            "monte_carlo" => SweepMode::MonteCarlo,
            "both" => SweepMode::Both,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown mode '{other}' (closed_form, monte_carlo, both)"
                )))
            }
        })
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::ClosedForm => "closed_form",
            SweepMode::MonteCarlo => "monte_carlo",
            SweepMode::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub mode: SweepMode,
    pub trials: usize,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Invalid("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("sweep values must be strictly increasing".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("sweep values must be finite".into()));
        }
        if matches!(self.axis, SweepAxis::Antennas | SweepAxis::Users | SweepAxis::Setup)
            && self.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
        {
            return Err(Error::Invalid(format!("{} values must be positive integers", self.axis)));
        }
        if self.axis == SweepAxis::Setup && self.values.iter().any(|v| *v > 3.0) {
            return Err(Error::Invalid("setup values must be 1, 2 or 3".into()));
        }
        if self.mode != SweepMode::ClosedForm && self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1 in monte_carlo mode".into()));
        }
        Ok(())
    }
}

/// Parses a value list: `a,b,c`, `lin(start,stop,count)` or
/// `log(start,stop,count)`. Numbers may carry a `dBm/Hz` or `W/Hz` suffix,
/// which converts them to W/Hz; a `lin` grid between two dBm end points is
/// evenly spaced in dBm.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let invalid = |m: String| Error::Invalid(format!("values '{text}': {m}"));
    let scalar = |s: &str| -> Result<f64> {
        let s = s.trim();
        if s.ends_with("Hz") {
            parse_power_density(s).map_err(invalid)
        } else {
            s.parse::<f64>().map_err(|_| invalid(format!("'{s}' is not a number")))
        }
    };
    for (prefix, log) in [("lin(", false), ("log(", true)] {
        if let Some(inner) = text.strip_prefix(prefix).and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(invalid("expected (start, stop, count)".into()));
            }
            // dBm end points of a linear grid are spaced evenly in dB
            let in_db = !log && parts[..2].iter().all(|p| p.trim().ends_with("dBm/Hz"));
            let (start, stop) = if in_db {
                let db = |s: &str| {
                    let n = s.trim().trim_end_matches("dBm/Hz").trim();
                    n.parse::<f64>().map_err(|_| invalid(format!("'{s}' is not a number")))
                };
                (db(parts[0])?, db(parts[1])?)
            } else {
                (scalar(parts[0])?, scalar(parts[1])?)
            };
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| invalid("count must be a positive integer".into()))?;
            if count == 0 {
                return Err(invalid("count must be a positive integer".into()));
            }
            if log && !(start > 0.0 && stop > 0.0) {
                return Err(invalid("log spacing needs positive end points".into()));
            }
            return Ok((0..count)
                .map(|i| {
                    let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                    if log {
                        (start.ln() + t * (stop.ln() - start.ln())).exp()
                    } else if in_db {
                        dbm_per_hz_to_watts(start + t * (stop - start))
                    } else {
                        start + t * (stop - start)
                    }
                })
                .map(|v| if log { round_to_grid(v) } else { v })
                .collect());
        }
    }
    text.split(',').map(scalar).collect()
}

// Snap log-grid points that land within rounding error of an integer so that
// antenna and user counts come out exact.
fn round_to_grid(v: f64) -> f64 {
    let r = v.round();
    if r != 0.0 && ((v - r) / r).abs() < 1e-12 {
        r
    } else {
        v
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub antennas: usize,
    pub users: usize,
    pub bandwidth: f64,
    pub tx_power: f64,
    pub se_ub: Option<f64>,
    pub se_app: Option<f64>,
    pub se_mc_mean: Option<f64>,
    pub se_mc_ci95: Option<f64>,
    pub throughput: Option<f64>,
    pub power: Option<PowerBreakdown>,
    pub ee: Option<f64>,
    pub rejected: usize,
    pub notes: Vec<String>,
}

impl SweepRow {
    fn empty(axis_value: f64, s: &Scenario) -> Self {
        Self {
            axis_value,
            antennas: s.antennas,
            users: s.users,
            bandwidth: s.protocol.bandwidth,
            tx_power: s.tx_power,
            se_ub: None,
            se_app: None,
            se_mc_mean: None,
            se_mc_ci95: None,
            throughput: None,
            power: None,
            ee: None,
            rejected: 0,
            notes: Vec::new(),
        }
    }

    pub fn to_csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_number).unwrap_or_default();
        let p = self.power.as_ref();
        [
            fmt_number(self.axis_value),
            self.antennas.to_string(),
            self.users.to_string(),
            fmt_number(self.bandwidth),
            fmt_number(self.tx_power),
            opt(self.se_ub),
            opt(self.se_app),
            opt(self.se_mc_mean),
            opt(self.se_mc_ci95),
            opt(self.throughput),
            opt(p.map(|b| b.total)),
            opt(p.map(|b| b.amplifiers())),
            opt(p.map(|b| b.converters())),
            opt(p.map(|b| b.baseband())),
            opt(p.map(|b| b.fixed_bs)),
            opt(self.ee),
            self.notes.join(";"),
        ]
        .join(",")
    }
}

/// Shortest round-trip scientific notation.
fn fmt_number(x: f64) -> String {
    format!("{x:e}")
}

fn note_text(text: &str) -> String {
    text.chars()
        .map(|c| if matches!(c, ',' | ';' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

fn point_scenario(base: &Scenario, axis: SweepAxis, value: f64) -> Scenario {
    let mut s = base.clone();
    match axis {
        SweepAxis::Bandwidth => s.protocol.bandwidth = value,
        SweepAxis::Antennas => s.antennas = value as usize,
        SweepAxis::Users => s.users = value as usize,
        SweepAxis::TxPower => s.tx_power = value,
        SweepAxis::Setup => {
            let preset = match value as usize {
                1 => SetupPreset::Sub6,
                2 => SetupPreset::XlMimo,
                _ => SetupPreset::MmWave,
            };
            s = Scenario {
                tx_power: base.tx_power,
                noise_density: base.noise_density,
                hardware: base.hardware.clone(),
                ..Scenario::preset(preset)
            };
        }
    }
    s
}

fn evaluate_point(base: &Scenario, spec: &SweepSpec, index: usize, hash: &str) -> SweepRow {
    let value = spec.values[index];
    let s = point_scenario(base, spec.axis, value);
    let mut row = SweepRow::empty(value, &s);
    row.notes.push(format!("family={}", s.family));
    if let Err(e) = s.validate() {
        row.notes.push(format!("error={}", note_text(&e.to_string())));
        row.notes.push(format!("cfg={hash}"));
        return row;
    }
    if s.family == SystemFamily::XlMimo {
        match se_upper_bound(
            s.antennas,
            s.spacing(),
            &s.cell,
            s.users,
            &s.effective_budget(),
            s.gain_wavelength(),
        ) {
            Ok(v) => row.se_ub = Some(v),
            Err(e) => row.notes.push(format!("se_ub={}", note_text(&e.to_string()))),
        }
    }
    match closed_form_se(&s) {
        Ok(v) => row.se_app = Some(v),
        Err(e) => row.notes.push(format!("se_app={}", note_text(&e.to_string()))),
    }
    if spec.mode != SweepMode::ClosedForm {
        match mc_ergodic_se(&s, spec.trials, derive_seed(spec.master_seed, index as u64)) {
            Ok(est) => {
                row.se_mc_mean = Some(est.mean);
                row.se_mc_ci95 = Some(est.half_ci95);
                row.rejected = est.rejected;
                if est.rejected > 0 {
                    row.notes.push(format!("rejected={}", est.rejected));
                }
            }
            Err(e) => row.notes.push(format!("se_mc={}", note_text(&e.to_string()))),
        }
    }
    let rate = match spec.mode {
        SweepMode::MonteCarlo => row.se_mc_mean,
        _ => row.se_app,
    };
    if let Some(se) = rate {
        match energy_efficiency_at(&s, se) {
            Ok((point, power)) => {
                row.throughput = Some(point.throughput);
                row.power = Some(power.breakdown);
                row.ee = Some(point.ee);
            }
            Err(e) => row.notes.push(format!("ee={}", note_text(&e.to_string()))),
        }
    }
    if spec.axis == SweepAxis::Antennas && s.family != SystemFamily::MmWave {
        if let Ok(knee) = knee_point(&s, DEFAULT_KNEE_FRACTION) {
            row.notes.push(format!("knee_point={}", fmt_number(knee.antennas)));
        }
    }
    row.notes.push(format!("cfg={hash}"));
    row
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub axis: String,
    pub mode: String,
    pub trials: usize,
    pub rows: usize,
    pub rejected_draws: usize,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<(Vec<SweepRow>, RunManifest)> {
    spec.validate()?;
    scenario.validate()?;
    let started = now_ms();
    let hash = config_hash(scenario);
    let short = &hash[..16];
    let rows: Vec<SweepRow> = (0..spec.values.len())
        .into_par_iter()
        .map(|i| evaluate_point(scenario, spec, i, short))
        .collect();
    let manifest = RunManifest {
        tool: "xlmimo".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: hash,
        master_seed: spec.master_seed,
        axis: spec.axis.to_string(),
        mode: spec.mode.to_string(),
        trials: spec.trials,
        rows: rows.len(),
        rejected_draws: rows.iter().map(|r| r.rejected).sum(),
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
    };
    Ok((rows, manifest))
}

/// Rows for a setup comparison: one per (setup, transmit density).
pub fn setup_rows(results: &[SetupRow], setups: &[(String, Scenario)]) -> Vec<SweepRow> {
    results
        .iter()
        .map(|r| {
            let base = &setups.iter().find(|s| s.0 == r.setup).expect("known setup").1;
            let s = Scenario { tx_power: r.tx_power, ..base.clone() };
            let e = &r.evaluation;
            let mut row = SweepRow::empty(r.tx_power, &s);
            row.se_app = Some(e.se);
            row.throughput = Some(e.point.throughput);
            row.power = Some(e.power.breakdown);
            row.ee = Some(e.point.ee);
            row.notes = vec![
                format!("setup={}", note_text(&r.setup)),
                format!("family={}", s.family),
                format!("cfg={}", &config_hash(&s)[..16]),
            ];
            row
        })
        .collect()
}

/// Closed-form comparison of setups over a transmit-density grid.
pub fn run_compare(setups: &[(String, Scenario)], p_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let results = compare_setups(setups, p_grid)?;
    Ok(setup_rows(&results, setups))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    out.flush()
}

/// `<out>.manifest.json` next to the CSV.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Runs the sweep and writes the CSV and its manifest.
pub fn run_sweep_to_file(scenario: &Scenario, spec: &SweepSpec, out: &Path) -> Result<RunManifest> {
    let (rows, manifest) = run_sweep(scenario, spec)?;
    write_csv(&rows, std::io::BufWriter::new(std::fs::File::create(out)?))?;
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(manifest_path(out), json + "\n")?;
    Ok(manifest)
}
