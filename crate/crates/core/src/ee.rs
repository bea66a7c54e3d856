//! Energy efficiency and its scaling with bandwidth and array size.

use rayon::prelude::*;

use crate::montecarlo::mc_ergodic_se;
use crate::power::{coefficients, total_power, CoefficientScheme, PowerTotal};
use crate::scenario::{Scenario, SystemFamily};
use crate::throughput::{
    chi_bar, mmwave_se_approx, se_approx, sub6_se_lower_bound, wrap_throughput, ThroughputScope,
};
use crate::{Error, Result};

/// How the throughput in the numerator is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    ClosedForm,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EePoint {
    /// bits/J.
    pub ee: f64,
    /// Sum throughput over users and both link directions, bits/s.
    pub throughput: f64,
    /// W.
    pub power: f64,
    pub antennas: usize,
    pub users: usize,
    pub bandwidth: f64,
    pub tx_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EeEvaluation {
    pub point: EePoint,
    /// Per-user spectral efficiency that produced the throughput.
    pub se: f64,
    /// Monte Carlo half-width, when the rate was simulated.
    pub se_ci95: Option<f64>,
    pub rejected: usize,
    pub power: PowerTotal,
}

/// Closed-form per-user spectral efficiency of the scenario's family:
/// the integral approximation for XL-MIMO, the Rayleigh lower bound for
/// Sub-6 GHz and the Rayleigh-limit approximation for hybrid mmWave.
/// Inter-cell interference enters through the effective noise.
pub fn closed_form_se(scenario: &Scenario) -> Result<f64> {
    let budget = scenario.effective_budget();
    let gain = scenario.gain_wavelength();
    match scenario.family {
        SystemFamily::XlMimo => se_approx(
            scenario.antennas,
            scenario.spacing(),
            &scenario.cell,
            scenario.users,
            &budget,
            gain,
        ),
        SystemFamily::Sub6 => {
            sub6_se_lower_bound(scenario.antennas, scenario.users, &budget, &scenario.cell, gain)
        }
        SystemFamily::MmWave => mmwave_se_approx(scenario.antennas, &budget, &scenario.cell, gain),
    }
}

/// EE for a spectral efficiency that has already been computed. The decoding
/// power is evaluated at the same rate.
pub fn energy_efficiency_at(scenario: &Scenario, se: f64) -> Result<(EePoint, PowerTotal)> {
    let throughput = wrap_throughput(se, &scenario.protocol, scenario.users, ThroughputScope::Sum)?;
    let power = total_power(scenario.family, &scenario.operating_point(), &scenario.hardware, throughput);
    let point = EePoint {
        ee: throughput / power.watts(),
        throughput,
        power: power.watts(),
        antennas: scenario.antennas,
        users: scenario.users,
        bandwidth: scenario.protocol.bandwidth,
        tx_power: scenario.tx_power,
    };
    Ok((point, power))
}

pub fn energy_efficiency(scenario: &Scenario, mode: RateMode) -> Result<EeEvaluation> {
    let (se, se_ci95, rejected) = match mode {
        RateMode::ClosedForm => (closed_form_se(scenario)?, None, 0),
        RateMode::MonteCarlo { trials, seed } => {
            let est = mc_ergodic_se(scenario, trials, seed)?;
            (est.mean, Some(est.half_ci95), est.rejected)
        }
    };
    let (point, power) = energy_efficiency_at(scenario, se)?;
    Ok(EeEvaluation { point, se, se_ci95, rejected, power })
}

fn require_digital(scenario: &Scenario) -> Result<()> {
    if scenario.family == SystemFamily::MmWave {
        return Err(Error::Domain(
            "the coefficient model covers fully digital arrays only".into(),
        ));
    }
    Ok(())
}

/// Limit of the closed-form EE as the bandwidth grows without bound.
pub fn ee_bandwidth_limit(scenario: &Scenario) -> Result<f64> {
    require_digital(scenario)?;
    let se = closed_form_se(scenario)?;
    let c = coefficients(CoefficientScheme::BandwidthNormalized, &scenario.protocol, &scenario.hardware);
    let k = scenario.users as f64;
    let rate_per_hz = k * scenario.protocol.data_fraction(scenario.users) * se;
    let power_per_hz = c.antenna_independent(k, scenario.tx_power)
        + scenario.antennas as f64 * c.per_antenna(k)
        + c.decoding * rate_per_hz;
    Ok(rate_per_hz / power_per_hz)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneePoint {
    /// Real-valued antenna count; callers round.
    pub antennas: f64,
    /// `Pλ²χ̄/σ²` at the knee; the closed form assumes this is well below 1.
    pub snr_at_knee: f64,
}

impl KneePoint {
    pub fn in_low_power_regime(&self) -> bool {
        self.snr_at_knee < 0.1
    }
}

/// Antenna count at which the low-power EE reaches `eta` of its plateau:
/// `eta/(1-eta)` times the ratio of antenna-independent to per-antenna power.
pub fn knee_point(scenario: &Scenario, eta: f64) -> Result<KneePoint> {
    require_digital(scenario)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("knee fraction must lie in (0, 1), got {eta}")));
    }
    let c = coefficients(CoefficientScheme::XlMimo, &scenario.protocol, &scenario.hardware);
    let k = scenario.users as f64;
    let antennas = eta / (1.0 - eta) * c.antenna_independent(k, scenario.tx_power) / c.per_antenna(k);
    let budget = scenario.effective_budget();
    let gain = scenario.gain_wavelength();
    let snr_at_knee = match chi_bar(antennas, scenario.spacing(), &scenario.cell) {
        Ok(chi) => budget.snr_density() * gain * gain * chi,
        Err(_) => f64::INFINITY,
    };
    Ok(KneePoint { antennas, snr_at_knee })
}

/// Closed-form EE on an antenna grid with the behaviour beyond the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaScalingReport {
    /// `(N, EE)` for every grid point the model could evaluate.
    pub points: Vec<(usize, f64)>,
    /// Grid points outside the model's domain, with the reason.
    pub skipped: Vec<(usize, String)>,
    /// Antenna count with the largest EE among `points`.
    pub argmax: usize,
    /// EE strictly decreases across every evaluated point after `argmax`.
    pub decreasing_beyond_argmax: bool,
    /// EE at the largest evaluated N divided by the maximum EE.
    pub end_ratio: f64,
}

impl AntennaScalingReport {
    pub fn ee_at(&self, antennas: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == antennas).map(|p| p.1)
    }

    pub fn max_ee(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn ee_antenna_limit_check(scenario: &Scenario, grid: &[usize]) -> Result<AntennaScalingReport> {
    let outcomes: Vec<(usize, Result<f64>)> = grid
        .par_iter()
        .map(|&n| {
            let s = Scenario { antennas: n, ..scenario.clone() };
            let ee = s.validate().and_then(|_| energy_efficiency(&s, RateMode::ClosedForm));
            (n, ee.map(|e| e.point.ee))
        })
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (n, outcome) in outcomes {
        match outcome {
            Ok(ee) => points.push((n, ee)),
            Err(e) => skipped.push((n, e.to_string())),
        }
    }
    if points.is_empty() {
        return Err(Error::Domain("no antenna count on the grid is inside the model domain".into()));
    }
    let best = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let decreasing_beyond_argmax = points[best..].windows(2).all(|w| w[1].1 < w[0].1);
    let end_ratio = points.last().expect("non-empty").1 / points[best].1;
    Ok(AntennaScalingReport {
        argmax: points[best].0,
        points,
        skipped,
        decreasing_beyond_argmax,
        end_ratio,
    })
}

/// One row of a setup comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SetupRow {
    pub setup: String,
    pub tx_power: f64,
    pub evaluation: EeEvaluation,
}

/// Closed-form EE of every setup at every transmit density of `p_grid`,
/// ordered setup-major.
pub fn compare_setups(setups: &[(String, Scenario)], p_grid: &[f64]) -> Result<Vec<SetupRow>> {
    let jobs: Vec<(&String, &Scenario, f64)> = setups
        .iter()
        .flat_map(|(name, s)| p_grid.iter().map(move |&p| (name, s, p)))
        .collect();
    jobs.par_iter()
        .map(|&(name, s, p)| {
            let scenario = Scenario { tx_power: p, ..s.clone() };
            Ok(SetupRow {
                setup: name.clone(),
                tx_power: p,
                evaluation: energy_efficiency(&scenario, RateMode::ClosedForm)?,
            })
        })
        .collect()
}
