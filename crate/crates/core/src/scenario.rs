//! Complete system configurations and the reference setups.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngExt};

use crate::channel::PropagationProfile;
use crate::geometry::{sample_user_location, ArrayGeometry, CellGeometry};
use crate::power::{HardwareProfile, OperatingPoint};
use crate::throughput::ProtocolConfig;
use crate::transceiver::LinkBudget;
use crate::{thermal_noise_density, Error, Result, SPEED_OF_LIGHT};

/// Array architecture and propagation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemFamily {
    /// Fully digital near-field ULA with spherical-wave channels.
    XlMimo,
    /// Fully digital array with i.i.d. Rayleigh fading.
    Sub6,
    /// Hybrid array with Rician channels and one RF chain per user.
    MmWave,
}

impl SystemFamily {
    pub fn name(self) -> &'static str {
        match self {
            SystemFamily::XlMimo => "xl_mimo",
            SystemFamily::Sub6 => "sub6",
            SystemFamily::MmWave => "mmwave",
        }
    }
}

impl fmt::Display for SystemFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "xl_mimo" => Ok(SystemFamily::XlMimo),
            "sub6" => Ok(SystemFamily::Sub6),
            "mmwave" => Ok(SystemFamily::MmWave),
            other => Err(format!("unknown family '{other}' (expected xl_mimo, sub6 or mmwave)")),
        }
    }
}

/// Neighbouring cells whose users leak into the home cell's uplink.
///
/// Each of `cells` neighbours sits `site_distance` metres from the home array
/// and serves `users_per_cell` users dropped in the same annulus as the home
/// cell, at a uniformly random bearing around their own site. Gains use the
/// far-field scalar model `C_PL λ / D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererRing {
    pub cells: usize,
    pub users_per_cell: usize,
    pub site_distance: f64,
}

impl InterfererRing {
    pub fn validate(&self, cell: &CellGeometry) -> Result<()> {
        if !(self.site_distance > cell.r_max) {
            return Err(Error::Invalid(format!(
                "interferer site distance {} must exceed r_max {}",
                self.site_distance, cell.r_max
            )));
        }
        Ok(())
    }

    /// Amplitude gains of every interfering user for one random drop.
    pub fn sample_gains<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        cell: &CellGeometry,
        amplitude_scale: f64,
    ) -> Vec<f64> {
        let s = self.site_distance;
        (0..self.cells * self.users_per_cell)
            .map(|_| {
                let loc = sample_user_location(rng, cell);
                let bearing = TAU * rng.random::<f64>();
                let r = loc.distance;
                let d2 = s * s + r * r - 2.0 * s * r * bearing.cos();
                amplitude_scale / d2.sqrt()
            })
            .collect()
    }

    /// Expected `Σ γ²` over all interfering users: the bearing average of
    /// `1/D²` is `1/(s² - r²)`, then averaged over the radial density.
    pub fn mean_aggregate_gain(&self, cell: &CellGeometry, amplitude_scale: f64) -> f64 {
        let s2 = self.site_distance * self.site_distance;
        let (lo2, hi2) = (cell.r_min * cell.r_min, cell.r_max * cell.r_max);
        let inverse_square = if hi2 > lo2 {
            ((s2 - lo2) / (s2 - hi2)).ln() / (hi2 - lo2)
        } else {
            1.0 / (s2 - lo2)
        };
        (self.cells * self.users_per_cell) as f64 * amplitude_scale * amplitude_scale * inverse_square
    }
}

/// Reference deployments used for cross-technology comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetupPreset {
    /// 3.5 GHz, 64 antennas, 20 MHz, 8 users, 70-500 m.
    Sub6,
    /// 7.5 GHz, 512 antennas, 400 MHz, 16 users, 70-200 m.
    XlMimo,
    /// 28 GHz, 256 antennas with 16 RF chains, 800 MHz, 16 users, 70-150 m.
    MmWave,
}

impl FromStr for SetupPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sub6" | "1" => Ok(SetupPreset::Sub6),
            "xl_mimo" | "2" => Ok(SetupPreset::XlMimo),
            "mmwave" | "3" => Ok(SetupPreset::MmWave),
            other => Err(format!("unknown preset '{other}' (expected sub6, xl_mimo or mmwave)")),
        }
    }
}

/// One complete system configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub family: SystemFamily,
    pub antennas: usize,
    pub users: usize,
    /// Hz.
    pub carrier_frequency: f64,
    pub cell: CellGeometry,
    pub pathloss_constant: f64,
    /// Radians, half-width of the angular power support.
    pub angular_spread: f64,
    pub rician_factor: f64,
    pub quadrature_points: usize,
    /// Per-user transmit density, W/Hz.
    pub tx_power: f64,
    /// W/Hz.
    pub noise_density: f64,
    pub protocol: ProtocolConfig,
    pub hardware: HardwareProfile,
    pub interferers: Option<InterfererRing>,
}

impl Default for Scenario {
    /// The baseline 7.5 GHz single-cell configuration (512 antennas, 16 users,
    /// 400 MHz, 70-150 m, -150 dBm/Hz per user).
    fn default() -> Self {
        Self {
            family: SystemFamily::XlMimo,
            antennas: 512,
            users: 16,
            carrier_frequency: 7.5e9,
            cell: CellGeometry { r_min: 70.0, r_max: 150.0 },
            pathloss_constant: 1.0,
            angular_spread: 0.0,
            rician_factor: 10.0,
            quadrature_points: 64,
            tx_power: 1e-18,
            noise_density: thermal_noise_density(),
            protocol: ProtocolConfig::default(),
            hardware: HardwareProfile::default(),
            interferers: None,
        }
    }
}

impl Scenario {
    pub fn preset(setup: SetupPreset) -> Self {
        let base = Scenario::default();
        let (family, carrier, antennas, bandwidth, users, r_max) = match setup {
            SetupPreset::Sub6 => (SystemFamily::Sub6, 3.5e9, 64, 2e7, 8, 500.0),
            SetupPreset::XlMimo => (SystemFamily::XlMimo, 7.5e9, 512, 4e8, 16, 200.0),
            SetupPreset::MmWave => (SystemFamily::MmWave, 28e9, 256, 8e8, 16, 150.0),
        };
        Scenario {
            family,
            carrier_frequency: carrier,
            antennas,
            users,
            cell: CellGeometry { r_min: 70.0, r_max },
            protocol: ProtocolConfig { bandwidth, ..base.protocol },
            ..base
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// Half-wavelength element spacing.
    pub fn spacing(&self) -> f64 {
        self.wavelength() / 2.0
    }

    /// `C_PL · λ`, the amplitude-gain numerator of the path loss.
    pub fn gain_wavelength(&self) -> f64 {
        self.pathloss_constant * self.wavelength()
    }

    pub fn array(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.antennas, self.spacing())
    }

    pub fn propagation(&self) -> PropagationProfile {
        PropagationProfile {
            wavelength: self.wavelength(),
            pathloss_constant: self.pathloss_constant,
            angular_spread: self.angular_spread,
            rician_factor: self.rician_factor,
            quadrature_points: self.quadrature_points,
        }
    }

    pub fn budget(&self) -> LinkBudget {
        LinkBudget::new(self.tx_power, self.noise_density, self.users)
    }

    /// Budget whose noise also carries the mean inter-cell interference, as
    /// used by the closed forms.
    pub fn effective_budget(&self) -> LinkBudget {
        let mut budget = self.budget();
        if let Some(ring) = &self.interferers {
            budget.noise_density +=
                self.tx_power * ring.mean_aggregate_gain(&self.cell, self.gain_wavelength());
        }
        budget
    }

    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint {
            antennas: self.antennas,
            users: self.users,
            tx_power: self.tx_power,
            protocol: self.protocol,
        }
    }

    pub fn rf_chains(&self) -> usize {
        self.hardware.num_rf_chains.unwrap_or(self.users)
    }

    /// Checks every invariant of the configuration.
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::Invalid("carrier frequency must be positive".into()));
        }
        CellGeometry::new(self.cell.r_min, self.cell.r_max)?;
        if self.users == 0 {
            return Err(Error::Invalid("users must be at least 1".into()));
        }
        if self.antennas < self.users {
            return Err(Error::Invalid(format!(
                "antennas ({}) must be at least users ({})",
                self.antennas, self.users
            )));
        }
        if self.family == SystemFamily::Sub6 && self.antennas == self.users {
            return Err(Error::Invalid("Rayleigh ZF needs more antennas than users".into()));
        }
        if !(self.tx_power >= 0.0 && self.tx_power.is_finite()) {
            return Err(Error::Invalid("tx_power must be non-negative".into()));
        }
        if !(self.noise_density > 0.0 && self.noise_density.is_finite()) {
            return Err(Error::Invalid("noise_density must be positive".into()));
        }
        if self.angular_spread >= PI / 2.0 {
            return Err(Error::Invalid("angular_spread must stay below pi/2".into()));
        }
        self.propagation().validate()?;
        self.protocol.validate(self.users)?;
        self.hardware.validate()?;
        if self.family == SystemFamily::MmWave && self.rf_chains() < self.users {
            return Err(Error::Invalid("a hybrid array needs at least one RF chain per user".into()));
        }
        if let Some(ring) = &self.interferers {
            ring.validate(&self.cell)?;
        }
        let half_aperture = self.antennas as f64 * self.spacing() / 2.0;
        if self.family != SystemFamily::Sub6 && self.cell.r_min <= half_aperture {
            return Err(Error::Invalid(format!(
                "r_min ({} m) must exceed the array half-aperture N*d/2 = {half_aperture} m",
                self.cell.r_min
            )));
        }
        Ok(())
    }
}
