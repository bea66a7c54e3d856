//! Closed-form spectral-efficiency bounds and approximations, and the
//! frame-overhead wrapper that turns spectral efficiency into bits/s.

use std::f64::consts::LN_2;

use crate::geometry::CellGeometry;
use crate::special::scaled_exp_integral_e1;
use crate::transceiver::LinkBudget;
use crate::{Error, Result};

/// TDD frame parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    /// Hz.
    pub bandwidth: f64,
    /// Resource elements per coherence block.
    pub coherence_block_size: f64,
    /// Pilot length per user, in multiples of K.
    pub pilot_factor: f64,
    pub uplink_fraction: f64,
    pub downlink_fraction: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            bandwidth: 4e8,
            coherence_block_size: 1000.0,
            pilot_factor: 1.0,
            uplink_fraction: 0.4,
            downlink_fraction: 0.6,
        }
    }
}

impl ProtocolConfig {
    /// Checks the frame invariants for `users` scheduled users.
    pub fn validate(&self, users: usize) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Invalid(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        if !(self.coherence_block_size >= 1.0) {
            return Err(Error::Invalid("coherence block size must be at least 1".into()));
        }
        if !(self.pilot_factor > 0.0) {
            return Err(Error::Invalid("pilot factor must be positive".into()));
        }
        if !(self.uplink_fraction > 0.0 && self.downlink_fraction > 0.0) {
            return Err(Error::Invalid("xi_ul and xi_dl must be positive".into()));
        }
        if (self.uplink_fraction + self.downlink_fraction - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid("xi_ul + xi_dl must equal 1".into()));
        }
        let pilots = self.pilot_factor * users as f64;
        let capacity = self.coherence_block_size * self.uplink_fraction;
        if pilots >= capacity {
            return Err(Error::Invalid(format!(
                "pilot overhead tau*K = {pilots} must stay below S*xi_ul = {capacity}"
            )));
        }
        Ok(())
    }

    /// Share of resource elements left for data, `1 - τK/S`.
    pub fn data_fraction(&self, users: usize) -> f64 {
        1.0 - self.pilot_factor * users as f64 / self.coherence_block_size
    }
}

/// Which traffic a spectral efficiency is converted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputScope {
    /// One user's uplink throughput.
    Uplink,
    /// One user's downlink throughput.
    Downlink,
    /// All K users, uplink plus downlink.
    Sum,
}

/// Converts per-user spectral efficiency into bits/s with the pilot overhead.
pub fn wrap_throughput(
    se: f64,
    proto: &ProtocolConfig,
    users: usize,
    scope: ThroughputScope,
) -> Result<f64> {
    let pilots = proto.pilot_factor * users as f64;
    let capacity = proto.coherence_block_size * proto.uplink_fraction;
    if pilots > capacity {
        return Err(Error::Overhead { pilots, capacity });
    }
    let b = proto.bandwidth;
    Ok(match scope {
        ThroughputScope::Uplink => (capacity - pilots) / proto.coherence_block_size * b * se,
        ThroughputScope::Downlink => proto.downlink_fraction * b * se,
        ThroughputScope::Sum => b * users as f64 * proto.data_fraction(users) * se,
    })
}

fn log_ratio_terms(num_elements: usize, spacing: f64, cell: &CellGeometry) -> Result<Vec<f64>> {
    cell.require_annulus()?;
    let centre = (num_elements as f64 - 1.0) / 2.0;
    let span = cell.area_span();
    let r_min2 = cell.r_min * cell.r_min;
    let r_max2 = cell.r_max * cell.r_max;
    (0..num_elements)
        .map(|n| {
            let offset = (n as f64 - centre) * spacing;
            let o2 = offset * offset;
            if o2 >= r_min2 {
                return Err(Error::Domain(format!(
                    "element offset {offset} m reaches the inner cell radius {} m",
                    cell.r_min
                )));
            }
            Ok(((r_max2 - o2) / (r_min2 - o2)).ln() / span)
        })
        .collect()
}

/// Exact array-gain sum and interference sum over the element index set.
pub fn chi_and_interference_sums(
    num_elements: usize,
    spacing: f64,
    cell: &CellGeometry,
) -> Result<(f64, f64)> {
    let terms = log_ratio_terms(num_elements, spacing, cell)?;
    let chi = terms.iter().sum();
    let interference = terms.iter().map(|t| t * t).sum();
    Ok((chi, interference))
}

/// Jensen-type upper bound `log2(1 + (Pλ²/σ²)(χ - (K-1) I / χ))`.
pub fn se_upper_bound(
    num_elements: usize,
    spacing: f64,
    cell: &CellGeometry,
    users: usize,
    budget: &LinkBudget,
    wavelength: f64,
) -> Result<f64> {
    let (chi, interference) = chi_and_interference_sums(num_elements, spacing, cell)?;
    let effective = chi - (users as f64 - 1.0) * interference / chi;
    if effective <= 0.0 {
        return Err(Error::VacuousBound { users });
    }
    let scale = budget.snr_density() * wavelength * wavelength;
    Ok((scale * effective).ln_1p() / LN_2)
}

fn check_pole(num_elements: f64, spacing: f64, cell: &CellGeometry) -> Result<()> {
    cell.require_annulus()?;
    let pole = 2.0 * cell.r_min / spacing;
    if !(num_elements >= 0.0 && num_elements < pole) {
        return Err(Error::Domain(format!(
            "array gain density needs 0 <= N < 2 r_min / d = {pole}, got N = {num_elements}"
        )));
    }
    Ok(())
}

/// Integral approximation of the array-gain sum. `num_elements` may be
/// fractional so that the function can be probed near its pole.
pub fn chi_bar(num_elements: f64, spacing: f64, cell: &CellGeometry) -> Result<f64> {
    check_pole(num_elements, spacing, cell)?;
    let n = num_elements;
    let outer = 2.0 * cell.r_max / spacing;
    let inner = 2.0 * cell.r_min / spacing;
    let log_part = n * ((outer - n) * (outer + n)).ln() - n * ((inner - n) * (inner + n)).ln();
    // a ln((a+N)/(a-N)) = 2a atanh(N/a), written that way to keep small-N accuracy
    let edge = 2.0 * outer * (n / outer).atanh() - 2.0 * inner * (n / inner).atanh();
    Ok((log_part + edge) / cell.area_span())
}

/// Integral approximation of the interference sum.
pub fn i_bar(num_elements: f64, spacing: f64, cell: &CellGeometry) -> Result<f64> {
    cell.require_annulus()?;
    if !(num_elements >= 0.0) {
        return Err(Error::Domain(format!("N must be non-negative, got {num_elements}")));
    }
    let c = num_elements * spacing / 2.0;
    let (lo, hi) = (cell.r_min + c, cell.r_max + c);
    let value = (hi / lo).ln() + c * (1.0 / hi - 1.0 / lo);
    Ok(2.0 * value / cell.area_span())
}

/// Closed-form approximation `log2(1 + (Pλ²/σ²)(χ̄ - (K-1) Ī))`.
pub fn se_approx(
    num_elements: usize,
    spacing: f64,
    cell: &CellGeometry,
    users: usize,
    budget: &LinkBudget,
    wavelength: f64,
) -> Result<f64> {
    let n = num_elements as f64;
    let effective = chi_bar(n, spacing, cell)? - (users as f64 - 1.0) * i_bar(n, spacing, cell)?;
    if effective <= 0.0 {
        return Err(Error::VacuousBound { users });
    }
    let scale = budget.snr_density() * wavelength * wavelength;
    Ok((scale * effective).ln_1p() / LN_2)
}

/// Small-array slope and large-array limit of the array-gain density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiScaling {
    /// d χ̄ / d N as N → 0, per m² per element.
    pub linear_coefficient: f64,
    /// χ̄ as N approaches `2 r_min / d` from below, per m².
    pub saturation_limit: f64,
}

pub fn chi_scaling(spacing: f64, cell: &CellGeometry) -> Result<ChiScaling> {
    cell.require_annulus()?;
    let span = cell.area_span();
    let (r_min, r_max) = (cell.r_min, cell.r_max);
    let linear_coefficient = 2.0 * (r_max / r_min).ln() / span;
    let saturation_limit = (2.0 * r_max / spacing * ((r_max + r_min) / (r_max - r_min)).ln()
        + 2.0 * r_min / spacing * (span / (4.0 * r_min * r_min)).ln())
        / span;
    Ok(ChiScaling { linear_coefficient, saturation_limit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerRegime {
    LowPower,
    HighPower,
}

/// Sum throughput (bits/s) in the small-array regime where the array gain
/// grows linearly in N and interference is negligible.
pub fn throughput_asymptote(
    regime: PowerRegime,
    num_elements: usize,
    users: usize,
    budget: &LinkBudget,
    proto: &ProtocolConfig,
    cell: &CellGeometry,
    wavelength: f64,
) -> Result<f64> {
    cell.require_annulus()?;
    let prefactor = proto.bandwidth * users as f64 * proto.data_fraction(users);
    let snr = 2.0 * budget.snr_density() * num_elements as f64 * wavelength * wavelength
        * (cell.r_max / cell.r_min).ln()
        / cell.area_span();
    Ok(match regime {
        PowerRegime::LowPower => prefactor * snr / LN_2,
        PowerRegime::HighPower => prefactor * snr.ln_1p() / LN_2,
    })
}

/// Lower bound on the Rayleigh-fading ZF spectral efficiency, averaged over
/// the user distance: `∫ log2(1 + C/r²) f(r) dr` with `C = Pλ²(N-K)/σ²`.
pub fn sub6_se_lower_bound(
    num_elements: usize,
    users: usize,
    budget: &LinkBudget,
    cell: &CellGeometry,
    wavelength: f64,
) -> Result<f64> {
    if num_elements <= users {
        return Err(Error::Domain(format!(
            "Rayleigh ZF bound needs N > K, got N = {num_elements}, K = {users}"
        )));
    }
    cell.require_annulus()?;
    let c = budget.snr_density() * wavelength * wavelength * (num_elements - users) as f64;
    let (lo2, hi2) = (cell.r_min * cell.r_min, cell.r_max * cell.r_max);
    let value = c * ((hi2 + c) / (lo2 + c)).ln() + hi2 * (c / hi2).ln_1p() - lo2 * (c / lo2).ln_1p();
    Ok(value / (cell.area_span() * LN_2))
}

/// Rician-to-Rayleigh approximation for the hybrid mmWave array:
/// `∫∫ log2(1 + C̄ g / r²) e^{-g} f(r) dg dr` with `C̄ = Pλ²N/σ²`.
pub fn mmwave_se_approx(
    num_elements: usize,
    budget: &LinkBudget,
    cell: &CellGeometry,
    wavelength: f64,
) -> Result<f64> {
    cell.require_annulus()?;
    let c = budget.snr_density() * wavelength * wavelength * num_elements as f64;
    if !(c > 0.0) {
        return Err(Error::Domain("mmWave approximation needs a positive SNR scale".into()));
    }
    let (lo2, hi2) = (cell.r_min * cell.r_min, cell.r_max * cell.r_max);
    let bracket = scaled_exp_integral_e1(hi2 / c)? - scaled_exp_integral_e1(lo2 / c)? + (hi2 / lo2).ln();
    Ok(c * bracket / (cell.area_span() * LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell() -> CellGeometry {
        CellGeometry::new(70.0, 150.0).unwrap()
    }

    #[test]
    fn wrap_examples() {
        let proto = ProtocolConfig::default();
        let up = wrap_throughput(10.0, &proto, 16, ThroughputScope::Uplink).unwrap();
        assert!((up - 1.536e9).abs() < 1.0);
        let full = ProtocolConfig { pilot_factor: 1.0, ..proto };
        assert_eq!(wrap_throughput(3.0, &full, 400, ThroughputScope::Uplink).unwrap(), 0.0);
        assert!(matches!(
            wrap_throughput(3.0, &full, 401, ThroughputScope::Uplink),
            Err(Error::Overhead { .. })
        ));
    }

    #[test]
    fn protocol_validation() {
        let bad = ProtocolConfig { uplink_fraction: 0.7, downlink_fraction: 0.6, ..Default::default() };
        let msg = bad.validate(16).unwrap_err().to_string();
        assert!(msg.contains("xi_ul + xi_dl must equal 1"), "{msg}");
        assert!(ProtocolConfig::default().validate(16).is_ok());
        assert!(ProtocolConfig::default().validate(400).is_err());
    }

    #[test]
    fn single_element_sums() {
        let (chi, i) = chi_and_interference_sums(1, 0.02, &cell()).unwrap();
        assert!((chi - (150.0f64 * 150.0 / (70.0 * 70.0)).ln() / 17600.0).abs() < 1e-18);
        assert!((i - chi * chi).abs() < 1e-20);
    }

    #[test]
    fn chi_bar_domain() {
        assert!(chi_bar(7000.0, 0.02, &cell()).is_err());
        assert_eq!(chi_bar(0.0, 0.02, &cell()).unwrap(), 0.0);
    }

    #[test]
    fn vacuous_bound_is_typed() {
        let budget = LinkBudget::new(1e-18, 3.98e-21, 4000);
        assert!(matches!(
            se_approx(512, 0.02, &cell(), 4000, &budget, 0.04),
            Err(Error::VacuousBound { users: 4000 })
        ));
    }

    #[test]
    fn sub6_needs_more_antennas_than_users() {
        let budget = LinkBudget::new(1e-18, 3.98e-21, 8);
        assert!(sub6_se_lower_bound(8, 8, &budget, &cell(), 0.0857).is_err());
    }
}
