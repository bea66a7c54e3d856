//! Monte Carlo estimation of the ergodic per-user spectral efficiency.
//!
//! Trial `t` of a run seeded with `seed` always draws from the ChaCha stream
//! `(seed, t)`, and per-trial results are reduced in trial order, so the
//! estimate does not depend on how rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    correlation_factor, line_of_sight_channel, sample_channel_mmwave, sample_channel_sub6,
    sample_with_factor,
};
use crate::geometry::{sample_user_location, ArrayGeometry, UserLocation};
use crate::scenario::{Scenario, SystemFamily};
use crate::transceiver::{hybrid_chain, multicell_uplink_sinr, uplink_sinr, SinrReport};
use crate::{CMatrix, Error, Result};

/// Rank-deficient drops are redrawn at most this many times per trial.
pub const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicEstimate {
    pub mean: f64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub half_ci95: f64,
    pub trials: usize,
    /// Channel draws discarded for an ill-conditioned Gram matrix.
    pub rejected: usize,
}

/// SplitMix64 mix of a master seed and an index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sample mean and 95% half-width (`1.96 s / sqrt(n)`).
pub fn mean_and_half_ci(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

fn draw_channel(
    scenario: &Scenario,
    geom: &ArrayGeometry,
    rng: &mut ChaCha8Rng,
) -> Result<(CMatrix, Vec<UserLocation>)> {
    let prop = scenario.propagation();
    let users: Vec<UserLocation> =
        (0..scenario.users).map(|_| sample_user_location(rng, &scenario.cell)).collect();
    let mut h = CMatrix::zeros(scenario.antennas, scenario.users);
    for (k, loc) in users.iter().enumerate() {
        let column = match scenario.family {
            SystemFamily::XlMimo if scenario.angular_spread == 0.0 => {
                line_of_sight_channel(loc, geom, &prop)?
            }
            SystemFamily::XlMimo => {
                let factor = correlation_factor(loc, geom, &prop)?;
                sample_with_factor(&factor, rng)
            }
            SystemFamily::Sub6 => sample_channel_sub6(loc, &prop, scenario.antennas, rng),
            SystemFamily::MmWave => sample_channel_mmwave(loc, geom, &prop, rng)?,
        };
        h.set_column(k, &column);
    }
    Ok((h, users))
}

fn drop_sinr(scenario: &Scenario, geom: &ArrayGeometry, rng: &mut ChaCha8Rng) -> Result<SinrReport> {
    let (h, users) = draw_channel(scenario, geom, rng)?;
    let h = if scenario.family == SystemFamily::MmWave {
        hybrid_chain(&h, &users, geom, &scenario.propagation())?.1
    } else {
        h
    };
    let budget = scenario.budget();
    match &scenario.interferers {
        Some(ring) => {
            let gains = ring.sample_gains(rng, &scenario.cell, scenario.gain_wavelength());
            multicell_uplink_sinr(&h, &gains, &budget)
        }
        None => uplink_sinr(&h, &budget),
    }
}

/// One trial: mean of `log2(1 + SINR)` over the users of a single drop,
/// with the number of rejected draws that preceded it.
pub fn trial_spectral_efficiency(
    scenario: &Scenario,
    geom: &ArrayGeometry,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, usize)> {
    for rejected in 0..=MAX_RETRIES {
        match drop_sinr(scenario, geom, rng) {
            Ok(report) => return Ok((report.mean_spectral_efficiency(), rejected)),
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted { attempts: MAX_RETRIES + 1 })
}

/// Ergodic per-user spectral efficiency (bits/s/Hz, before frame overhead)
/// under ZF, averaged over `trials` independent drops.
pub fn mc_ergodic_se(scenario: &Scenario, trials: usize, seed: u64) -> Result<ErgodicEstimate> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let geom = scenario.array()?;
    let outcomes: Vec<(f64, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_spectral_efficiency(scenario, &geom, &mut trial_rng(seed, t)))
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let (mean, half_ci95) = mean_and_half_ci(&samples);
    Ok(ErgodicEstimate {
        mean,
        half_ci95,
        trials,
        rejected: outcomes.iter().map(|o| o.1).sum(),
    })
}
