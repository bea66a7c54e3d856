//! Parametric power-consumption model of a multiuser TDD base station and
//! its users.
//!
//! The component sum ([`component_powers`], [`hybrid_component_powers`]) is
//! the reference; [`coefficients`] regroups the fully digital model into a
//! polynomial in N and K that the scaling-law analysis works with.

use serde::Serialize;

use crate::scenario::SystemFamily;
use crate::throughput::ProtocolConfig;
use crate::{Error, Result};

/// Hardware and compute constants of the power model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardwareProfile {
    pub pa_efficiency_bs: f64,
    pub pa_efficiency_ue: f64,
    /// Static PA bias power, W.
    pub pa_static: f64,
    /// W per (Hz · linear gain).
    pub lna_coeff: f64,
    /// Linear power gain.
    pub lna_gain: f64,
    pub syn_power: f64,
    pub rf_circ: f64,
    pub if_circ: f64,
    /// J per conversion step.
    pub adc_coeff: f64,
    pub dac_coeff: f64,
    pub adc_bits: u32,
    pub dac_bits: u32,
    pub oversampling: f64,
    /// flop/s per W.
    pub compute_efficiency: f64,
    /// flop per decoded bit.
    pub decode_flops: f64,
    pub fixed_bs: f64,
    pub fixed_ue: f64,
    /// Per phase shifter, W.
    pub phase_shifter: f64,
    /// RF chains of a hybrid array; `None` means one per user.
    pub num_rf_chains: Option<usize>,
    pub ofdm_enabled: bool,
    pub subcarriers: u32,
}

impl Default for HardwareProfile {
    fn default() -> Self {
        Self {
            pa_efficiency_bs: 0.30,
            pa_efficiency_ue: 0.15,
            pa_static: 0.3,
            lna_coeff: 1.67e-11,
            lna_gain: 100.0,
            syn_power: 0.05,
            rf_circ: 0.5,
            if_circ: 0.3,
            adc_coeff: 1.97e-19,
            dac_coeff: 1.66e-19,
            adc_bits: 14,
            dac_bits: 14,
            oversampling: 1.0,
            compute_efficiency: 3e10,
            decode_flops: 100.0,
            fixed_bs: 15.0,
            fixed_ue: 2.0,
            phase_shifter: 0.01,
            num_rf_chains: None,
            ofdm_enabled: true,
            subcarriers: 4096,
        }
    }
}

impl HardwareProfile {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pa_static", self.pa_static),
            ("lna_coeff", self.lna_coeff),
            ("lna_gain", self.lna_gain),
            ("syn_power", self.syn_power),
            ("rf_circ", self.rf_circ),
            ("if_circ", self.if_circ),
            ("adc_coeff", self.adc_coeff),
            ("dac_coeff", self.dac_coeff),
            ("compute_efficiency", self.compute_efficiency),
            ("decode_flops", self.decode_flops),
            ("fixed_bs", self.fixed_bs),
            ("fixed_ue", self.fixed_ue),
            ("phase_shifter", self.phase_shifter),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        for (name, eta) in [("pa_efficiency_bs", self.pa_efficiency_bs), ("pa_efficiency_ue", self.pa_efficiency_ue)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::Invalid(format!("{name} must lie in (0, 1], got {eta}")));
            }
        }
        for (name, bits) in [("adc_bits", self.adc_bits), ("dac_bits", self.dac_bits)] {
            if !(1..=24).contains(&bits) {
                return Err(Error::Invalid(format!("{name} must lie in [1, 24], got {bits}")));
            }
        }
        if !(self.oversampling >= 1.0) {
            return Err(Error::Invalid("oversampling must be at least 1".into()));
        }
        if self.subcarriers < 2 {
            return Err(Error::Invalid("subcarriers must be at least 2".into()));
        }
        if self.num_rf_chains == Some(0) {
            return Err(Error::Invalid("rf_chains must be at least 1".into()));
        }
        Ok(())
    }

    /// One LNA at bandwidth `b`.
    pub fn lna_power(&self, b: f64) -> f64 {
        self.lna_coeff * self.lna_gain * b
    }

    /// One ADC (I and Q branches) at bandwidth `b`.
    pub fn adc_power(&self, b: f64) -> f64 {
        2.0 * self.oversampling * self.adc_coeff * 2f64.powi(2 * self.adc_bits as i32) * b
    }

    pub fn dac_power(&self, b: f64) -> f64 {
        2.0 * self.oversampling * self.dac_coeff * 2f64.powi(2 * self.dac_bits as i32) * b
    }

    fn ofdm_flops_per_stream(&self, b: f64) -> f64 {
        if self.ofdm_enabled {
            5.0 * b * (self.subcarriers as f64).log2()
        } else {
            0.0
        }
    }
}

/// Quantities the power model needs from the link configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub antennas: usize,
    pub users: usize,
    /// Per-user transmit density, W/Hz.
    pub tx_power: f64,
    pub protocol: ProtocolConfig,
}

/// Power per component, W. BS parts are listed individually; all user-side
/// consumption is lumped in `ue_total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PowerBreakdown {
    pub pa_radiated: f64,
    pub pa_static: f64,
    pub lna: f64,
    pub syn: f64,
    pub rf_circ: f64,
    pub adc: f64,
    pub dac: f64,
    pub if_circ: f64,
    pub phase_shifters: f64,
    pub ce: f64,
    pub pd: f64,
    pub cd: f64,
    pub ofdm: f64,
    pub fixed_bs: f64,
    pub ue_total: f64,
    pub total: f64,
}

impl PowerBreakdown {
    pub fn parts(&self) -> [f64; 15] {
        [
            self.pa_radiated,
            self.pa_static,
            self.lna,
            self.syn,
            self.rf_circ,
            self.adc,
            self.dac,
            self.if_circ,
            self.phase_shifters,
            self.ce,
            self.pd,
            self.cd,
            self.ofdm,
            self.fixed_bs,
            self.ue_total,
        ]
    }

    fn with_total(mut self) -> Self {
        self.total = self.parts().iter().sum();
        self
    }

    /// BS power amplifiers, radiated plus static.
    pub fn amplifiers(&self) -> f64 {
        self.pa_radiated + self.pa_static
    }

    pub fn converters(&self) -> f64 {
        self.adc + self.dac
    }

    /// Channel estimation, precoding/detection, coding and OFDM processing.
    pub fn baseband(&self) -> f64 {
        self.ce + self.pd + self.cd + self.ofdm
    }
}

struct Shared {
    b: f64,
    k: f64,
    xi_ul: f64,
    xi_dl: f64,
    xi_sum: f64,
    data_fraction: f64,
    s: f64,
    tau: f64,
    q: f64,
}

impl Shared {
    fn new(op: &OperatingPoint, hw: &HardwareProfile) -> Self {
        let p = &op.protocol;
        Self {
            b: p.bandwidth,
            k: op.users as f64,
            xi_ul: p.uplink_fraction,
            xi_dl: p.downlink_fraction,
            xi_sum: p.uplink_fraction + p.downlink_fraction,
            data_fraction: p.data_fraction(op.users),
            s: p.coherence_block_size,
            tau: p.pilot_factor,
            q: hw.compute_efficiency,
        }
    }
}

fn user_side(op: &OperatingPoint, hw: &HardwareProfile, c: &Shared) -> f64 {
    let pa = c.b * op.tx_power / hw.pa_efficiency_ue + hw.pa_static;
    let per_user = c.xi_ul * pa
        + c.xi_dl * hw.lna_power(c.b)
        + hw.syn_power
        + hw.rf_circ
        + c.xi_dl * hw.adc_power(c.b)
        + c.xi_ul * hw.dac_power(c.b)
        + hw.if_circ
        + hw.fixed_ue;
    c.k * per_user
}

/// Component powers of a fully digital array (one RF chain per antenna).
pub fn component_powers(op: &OperatingPoint, hw: &HardwareProfile, throughput_sum: f64) -> PowerBreakdown {
    let c = Shared::new(op, hw);
    let n = op.antennas as f64;
    let k = c.k;
    PowerBreakdown {
        pa_radiated: c.xi_dl * c.b * k * op.tx_power / hw.pa_efficiency_bs,
        pa_static: c.xi_dl * n * hw.pa_static,
        lna: n * c.xi_ul * hw.lna_power(c.b),
        syn: n * hw.syn_power,
        rf_circ: n * hw.rf_circ,
        adc: n * c.xi_ul * hw.adc_power(c.b),
        dac: n * c.xi_dl * hw.dac_power(c.b),
        if_circ: n * hw.if_circ,
        phase_shifters: 0.0,
        ce: c.b / c.s * 8.0 * n * k * k * c.tau / c.q,
        pd: c.b * c.data_fraction * c.xi_sum * 8.0 * n * k / c.q
            + c.b * c.xi_sum / c.s * (8.0 * k.powi(3) / 3.0 + 16.0 * n * k * k + 2.0 * n * k) / c.q,
        cd: throughput_sum * hw.decode_flops / c.q,
        ofdm: (n + k) * hw.ofdm_flops_per_stream(c.b) * c.xi_sum / c.q,
        fixed_bs: hw.fixed_bs,
        ue_total: user_side(op, hw, &c),
        total: 0.0,
    }
    .with_total()
}

/// Component powers of a hybrid array with `rf_chains` digital chains behind
/// a phase-shifter network that connects every chain to every antenna.
pub fn hybrid_component_powers(
    op: &OperatingPoint,
    hw: &HardwareProfile,
    rf_chains: usize,
    throughput_sum: f64,
) -> PowerBreakdown {
    let c = Shared::new(op, hw);
    let n = op.antennas as f64;
    let chains = rf_chains as f64;
    let k = c.k;
    PowerBreakdown {
        pa_radiated: c.xi_dl * c.b * k * op.tx_power / hw.pa_efficiency_bs,
        pa_static: c.xi_dl * n * hw.pa_static,
        lna: n * c.xi_ul * hw.lna_power(c.b),
        syn: n * hw.syn_power,
        rf_circ: n * hw.rf_circ,
        adc: chains * c.xi_ul * hw.adc_power(c.b),
        dac: chains * c.xi_dl * hw.dac_power(c.b),
        if_circ: chains * hw.if_circ,
        phase_shifters: chains * n * hw.phase_shifter,
        ce: n * 8.0 * c.b * k * k * c.tau / (c.s * c.q),
        pd: chains
            * (c.b * c.data_fraction * c.xi_sum * 8.0 * k / c.q
                + c.b * c.xi_sum / (c.s * c.q) * (16.0 * k * k + 2.0 * k))
            + 8.0 * c.b * c.xi_sum * k.powi(3) / (3.0 * c.s * c.q),
        cd: throughput_sum * hw.decode_flops / c.q,
        ofdm: (chains + k) * hw.ofdm_flops_per_stream(c.b) * c.xi_sum / c.q,
        fixed_bs: hw.fixed_bs,
        ue_total: user_side(op, hw, &c),
        total: 0.0,
    }
    .with_total()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientScheme {
    /// Coefficients in W for the configured bandwidth.
    XlMimo,
    /// Bandwidth-proportional parts only, per Hz; constant terms dropped.
    BandwidthNormalized,
}

/// Coefficients of
/// `radiated·K·P + N·Σ_i antenna[i]·K^i + user_linear·K + user_cubic·K³ + decoding·R_sum + fixed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCoefficients {
    /// Multiplies K·P (W per W/Hz).
    pub radiated: f64,
    /// Multiply N, N·K and N·K².
    pub antenna: [f64; 3],
    pub user_linear: f64,
    pub user_cubic: f64,
    /// W per bit/s of sum throughput.
    pub decoding: f64,
    pub fixed: f64,
}

impl PowerCoefficients {
    /// Polynomial total for real-valued N and K.
    pub fn total(&self, antennas: f64, users: f64, tx_power: f64, throughput_sum: f64) -> f64 {
        let per_antenna = self.antenna[0] + self.antenna[1] * users + self.antenna[2] * users * users;
        self.radiated * users * tx_power
            + antennas * per_antenna
            + self.user_linear * users
            + self.user_cubic * users.powi(3)
            + self.decoding * throughput_sum
            + self.fixed
    }

    /// Power not proportional to N: radiated, user-side and cubic terms.
    pub fn antenna_independent(&self, users: f64, tx_power: f64) -> f64 {
        self.radiated * users * tx_power + self.user_linear * users + self.user_cubic * users.powi(3)
    }

    /// Per-antenna power `Σ_i antenna[i]·K^i`.
    pub fn per_antenna(&self, users: f64) -> f64 {
        self.antenna[0] + self.antenna[1] * users + self.antenna[2] * users * users
    }
}

/// Polynomial coefficients of the fully digital model.
///
/// Differences from a plain component regrouping: the `2NK/S` term of the
/// detection cost is not carried (it is four orders of magnitude below the
/// `8NK` term), so the polynomial slightly undercounts baseband power.
pub fn coefficients(scheme: CoefficientScheme, protocol: &ProtocolConfig, hw: &HardwareProfile) -> PowerCoefficients {
    let (b, constant) = match scheme {
        CoefficientScheme::XlMimo => (protocol.bandwidth, 1.0),
        CoefficientScheme::BandwidthNormalized => (1.0, 0.0),
    };
    let xi_ul = protocol.uplink_fraction;
    let xi_dl = protocol.downlink_fraction;
    let xi_sum = xi_ul + xi_dl;
    let s = protocol.coherence_block_size;
    let tau = protocol.pilot_factor;
    let q = hw.compute_efficiency;
    let ofdm = hw.ofdm_flops_per_stream(b) * xi_sum / q;
    let circuits = hw.syn_power + hw.rf_circ + hw.if_circ;
    PowerCoefficients {
        radiated: b * (xi_ul / hw.pa_efficiency_ue + xi_dl / hw.pa_efficiency_bs),
        antenna: [
            xi_ul * hw.lna_power(b)
                + xi_ul * hw.adc_power(b)
                + xi_dl * hw.dac_power(b)
                + ofdm
                + constant * (circuits + xi_dl * hw.pa_static),
            8.0 * b * xi_sum / q,
            b / (s * q) * (16.0 * xi_sum + 8.0 * tau - 8.0 * tau * xi_sum),
        ],
        user_linear: xi_dl * hw.lna_power(b)
            + xi_dl * hw.adc_power(b)
            + xi_ul * hw.dac_power(b)
            + ofdm
            + constant * (circuits + hw.fixed_ue + xi_ul * hw.pa_static),
        user_cubic: 8.0 * b * xi_sum / (3.0 * s * q),
        decoding: hw.decode_flops / q,
        fixed: constant * hw.fixed_bs,
    }
}

/// Total power with its breakdown; `polynomial` is the coefficient-table
/// total, available for fully digital families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTotal {
    pub breakdown: PowerBreakdown,
    pub polynomial: Option<f64>,
}

impl PowerTotal {
    pub fn watts(&self) -> f64 {
        self.breakdown.total
    }
}

pub fn total_power(
    family: SystemFamily,
    op: &OperatingPoint,
    hw: &HardwareProfile,
    throughput_sum: f64,
) -> PowerTotal {
    match family {
        SystemFamily::XlMimo | SystemFamily::Sub6 => {
            let breakdown = component_powers(op, hw, throughput_sum);
            let poly = coefficients(CoefficientScheme::XlMimo, &op.protocol, hw).total(
                op.antennas as f64,
                op.users as f64,
                op.tx_power,
                throughput_sum,
            );
            PowerTotal { breakdown, polynomial: Some(poly) }
        }
        SystemFamily::MmWave => {
            let chains = hw.num_rf_chains.unwrap_or(op.users);
            PowerTotal {
                breakdown: hybrid_component_powers(op, hw, chains, throughput_sum),
                polynomial: None,
            }
        }
    }
}
