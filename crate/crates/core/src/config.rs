//! Flat `key = value` scenario files.
//!
//! Every key is optional; unset keys keep the baseline [`Scenario::default`].
//! Power densities need an explicit unit (`W/Hz` or `dBm/Hz`). Comments start
//! with `#`. Setup files group the same keys under `[name]` headers, each
//! section starting from a `preset`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::geometry::CellGeometry;
use crate::scenario::{InterfererRing, Scenario, SetupPreset};
use crate::{dbm_per_hz_to_watts, Error, Result};

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

/// Parses scenario text and validates the result.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let entries = collect_entries(text.lines().enumerate().map(|(i, l)| (i + 1, l)))?;
    let scenario = build(Scenario::default(), &entries)?;
    scenario.validate()?;
    Ok(scenario)
}

/// Reads a setups file; an empty file yields the three reference setups.
pub fn load_setups(path: &Path) -> Result<Vec<(String, Scenario)>> {
    let text = std::fs::read_to_string(path)?;
    parse_setups(&text)
}

pub fn default_setups() -> Vec<(String, Scenario)> {
    [
        ("setup1_sub6", SetupPreset::Sub6),
        ("setup2_xl_mimo", SetupPreset::XlMimo),
        ("setup3_mmwave", SetupPreset::MmWave),
    ]
    .into_iter()
    .map(|(name, p)| (name.to_string(), Scenario::preset(p)))
    .collect()
}

pub fn parse_setups(text: &str) -> Result<Vec<(String, Scenario)>> {
    let mut sections: Vec<(String, usize, Vec<(usize, &str)>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let number = i + 1;
        let trimmed = strip_comment(line).trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty() || name.contains(',') {
                return Err(parse_error(number, "section name must be non-empty and contain no commas"));
            }
            if sections.iter().any(|s| s.0 == name) {
                return Err(parse_error(number, &format!("duplicate section [{name}]")));
            }
            sections.push((name.to_string(), number, Vec::new()));
        } else {
            match sections.last_mut() {
                Some(section) => section.2.push((number, line)),
                None => return Err(parse_error(number, "setting outside of a [section]")),
            }
        }
    }
    if sections.is_empty() {
        return Ok(default_setups());
    }
    sections
        .into_iter()
        .map(|(name, header_line, lines)| {
            let mut entries = collect_entries(lines.into_iter())?;
            let base = match entries.remove("preset") {
                Some((line, value)) => {
                    Scenario::preset(value.parse().map_err(|m: String| parse_error(line, &m))?)
                }
                None => return Err(parse_error(header_line, &format!("section [{name}] needs a preset"))),
            };
            let scenario = build(base, &entries)?;
            scenario
                .validate()
                .map_err(|e| Error::Invalid(format!("setup [{name}]: {e}")))?;
            Ok((name, scenario))
        })
        .collect()
}

type Entries = BTreeMap<String, (usize, String)>;

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn parse_error(line: usize, message: &str) -> Error {
    Error::Parse { line, message: message.to_string() }
}

fn collect_entries<'a, I: Iterator<Item = (usize, &'a str)>>(lines: I) -> Result<Entries> {
    let mut entries = Entries::new();
    for (number, line) in lines {
        let content = strip_comment(line).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(number, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(parse_error(number, "expected 'key = value'"));
        }
        if entries.insert(key.to_string(), (number, value.to_string())).is_some() {
            return Err(parse_error(number, &format!("duplicate key '{key}'")));
        }
    }
    Ok(entries)
}

/// Parses `"<number> W/Hz"` or `"<number> dBm/Hz"` into W/Hz.
pub fn parse_power_density(value: &str) -> std::result::Result<f64, String> {
    let value = value.trim();
    let (number, to_watts): (&str, fn(f64) -> f64) = if let Some(n) = value.strip_suffix("dBm/Hz") {
        (n, dbm_per_hz_to_watts)
    } else if let Some(n) = value.strip_suffix("W/Hz") {
        (n, |w| w)
    } else {
        return Err(format!("power density '{value}' needs a unit suffix (W/Hz or dBm/Hz)"));
    };
    let x: f64 = number.trim().parse().map_err(|_| format!("'{value}' is not a number"))?;
    let watts = to_watts(x);
    if watts.is_finite() && watts >= 0.0 {
        Ok(watts)
    } else {
        Err(format!("power density '{value}' is out of range"))
    }
}

fn number(value: &str) -> std::result::Result<f64, String> {
    let x: f64 = value.parse().map_err(|_| format!("'{value}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{value}' is not finite"))
    }
}

fn count(value: &str) -> std::result::Result<usize, String> {
    value.parse().map_err(|_| format!("'{value}' is not a non-negative integer"))
}

fn flag(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

fn build(mut s: Scenario, entries: &Entries) -> Result<Scenario> {
    let mut ring_cells = 0usize;
    let mut ring_users: Option<usize> = None;
    let mut ring_distance: Option<f64> = None;
    let (mut r_min, mut r_max) = (s.cell.r_min, s.cell.r_max);
    for (key, (line, value)) in entries {
        let v = value.as_str();
        let hw = &mut s.hardware;
        let outcome: std::result::Result<(), String> = (|| {
            match key.as_str() {
                "family" => s.family = v.parse()?,
                "antennas" => s.antennas = count(v)?,
                "users" => s.users = count(v)?,
                "carrier_frequency" => s.carrier_frequency = number(v)?,
                "r_min" => r_min = number(v)?,
                "r_max" => r_max = number(v)?,
                "bandwidth" => s.protocol.bandwidth = number(v)?,
                "coherence_block" => s.protocol.coherence_block_size = number(v)?,
                "pilot_factor" => s.protocol.pilot_factor = number(v)?,
                "xi_ul" => s.protocol.uplink_fraction = number(v)?,
                "xi_dl" => s.protocol.downlink_fraction = number(v)?,
                "tx_power" => s.tx_power = parse_power_density(v)?,
                "noise_density" => s.noise_density = parse_power_density(v)?,
                "pathloss_constant" => s.pathloss_constant = number(v)?,
                "angular_spread" => s.angular_spread = number(v)?,
                "rician_factor" => s.rician_factor = number(v)?,
                "quadrature_points" => s.quadrature_points = count(v)?,
                "pa_efficiency_bs" => hw.pa_efficiency_bs = number(v)?,
                "pa_efficiency_ue" => hw.pa_efficiency_ue = number(v)?,
                "pa_static" => hw.pa_static = number(v)?,
                "lna_coeff" => hw.lna_coeff = number(v)?,
                "lna_gain_db" => hw.lna_gain = 10f64.powf(number(v)? / 10.0),
                "syn_power" => hw.syn_power = number(v)?,
                "rf_circ" => hw.rf_circ = number(v)?,
                "if_circ" => hw.if_circ = number(v)?,
                "adc_coeff" => hw.adc_coeff = number(v)?,
                "dac_coeff" => hw.dac_coeff = number(v)?,
                "adc_bits" => hw.adc_bits = count(v)? as u32,
                "dac_bits" => hw.dac_bits = count(v)? as u32,
                "oversampling" => hw.oversampling = number(v)?,
                "compute_efficiency" => hw.compute_efficiency = number(v)?,
                "decode_flops" => hw.decode_flops = number(v)?,
                "fixed_bs" => hw.fixed_bs = number(v)?,
                "fixed_ue" => hw.fixed_ue = number(v)?,
                "phase_shifter" => hw.phase_shifter = number(v)?,
                "rf_chains" => hw.num_rf_chains = Some(count(v)?),
                "ofdm" => hw.ofdm_enabled = flag(v)?,
                "subcarriers" => hw.subcarriers = count(v)? as u32,
                "interferer_cells" => ring_cells = count(v)?,
                "interferer_users" => ring_users = Some(count(v)?),
                "interferer_distance" => ring_distance = Some(number(v)?),
                other => return Err(format!("unknown key '{other}'")),
            }
            Ok(())
        })();
        outcome.map_err(|m| parse_error(*line, &m))?;
    }
    s.cell = CellGeometry::new(r_min, r_max)?;
    if ring_cells > 0 {
        s.interferers = Some(InterfererRing {
            cells: ring_cells,
            users_per_cell: ring_users.unwrap_or(s.users),
            site_distance: ring_distance.unwrap_or(2.0 * r_max),
        });
    }
    Ok(s)
}

/// Every semantic field as `key = value` lines in a fixed order.
pub fn canonical_text(s: &Scenario) -> String {
    let hw = &s.hardware;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("family", s.family.to_string());
    put("antennas", s.antennas.to_string());
    put("users", s.users.to_string());
    put("carrier_frequency", format!("{:?}", s.carrier_frequency));
    put("r_min", format!("{:?}", s.cell.r_min));
    put("r_max", format!("{:?}", s.cell.r_max));
    put("bandwidth", format!("{:?}", s.protocol.bandwidth));
    put("coherence_block", format!("{:?}", s.protocol.coherence_block_size));
    put("pilot_factor", format!("{:?}", s.protocol.pilot_factor));
    put("xi_ul", format!("{:?}", s.protocol.uplink_fraction));
    put("xi_dl", format!("{:?}", s.protocol.downlink_fraction));
    put("tx_power", format!("{:?} W/Hz", s.tx_power));
    put("noise_density", format!("{:?} W/Hz", s.noise_density));
    put("pathloss_constant", format!("{:?}", s.pathloss_constant));
    put("angular_spread", format!("{:?}", s.angular_spread));
    put("rician_factor", format!("{:?}", s.rician_factor));
    put("quadrature_points", s.quadrature_points.to_string());
    put("pa_efficiency_bs", format!("{:?}", hw.pa_efficiency_bs));
    put("pa_efficiency_ue", format!("{:?}", hw.pa_efficiency_ue));
    put("pa_static", format!("{:?}", hw.pa_static));
    put("lna_coeff", format!("{:?}", hw.lna_coeff));
    put("lna_gain", format!("{:?}", hw.lna_gain));
    put("syn_power", format!("{:?}", hw.syn_power));
    put("rf_circ", format!("{:?}", hw.rf_circ));
    put("if_circ", format!("{:?}", hw.if_circ));
    put("adc_coeff", format!("{:?}", hw.adc_coeff));
    put("dac_coeff", format!("{:?}", hw.dac_coeff));
    put("adc_bits", hw.adc_bits.to_string());
    put("dac_bits", hw.dac_bits.to_string());
    put("oversampling", format!("{:?}", hw.oversampling));
    put("compute_efficiency", format!("{:?}", hw.compute_efficiency));
    put("decode_flops", format!("{:?}", hw.decode_flops));
    put("fixed_bs", format!("{:?}", hw.fixed_bs));
    put("fixed_ue", format!("{:?}", hw.fixed_ue));
    put("phase_shifter", format!("{:?}", hw.phase_shifter));
    put("rf_chains", hw.num_rf_chains.map_or("auto".into(), |c| c.to_string()));
    put("ofdm", hw.ofdm_enabled.to_string());
    put("subcarriers", hw.subcarriers.to_string());
    match &s.interferers {
        Some(r) => {
            put("interferer_cells", r.cells.to_string());
            put("interferer_users", r.users_per_cell.to_string());
            put("interferer_distance", format!("{:?}", r.site_distance));
        }
        None => put("interferer_cells", "0".into()),
    }
    out
}

/// SHA-256 of [`canonical_text`], hex encoded.
pub fn config_hash(s: &Scenario) -> String {
    Sha256::digest(canonical_text(s).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
