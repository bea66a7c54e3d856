//! Zero-forcing detection and precoding with per-user SINR evaluation.

use crate::channel::steering_vector;
use crate::geometry::{ArrayGeometry, UserLocation};
use crate::channel::PropagationProfile;
use crate::{CMatrix, Complex64, Error, Result};

/// Gram matrices with a larger condition number are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e10;

/// Power densities of one link, all in W/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Per-user uplink transmit density, also the per-user share of the
    /// downlink total.
    pub tx_power_density: f64,
    pub noise_density: f64,
    pub downlink_total_power_density: f64,
}

impl LinkBudget {
    /// Budget with the downlink total set to `users * tx_power_density`.
    pub fn new(tx_power_density: f64, noise_density: f64, users: usize) -> Self {
        Self {
            tx_power_density,
            noise_density,
            downlink_total_power_density: users as f64 * tx_power_density,
        }
    }

    /// Transmit-to-noise density ratio `P / σ²`.
    pub fn snr_density(&self) -> f64 {
        self.tx_power_density / self.noise_density
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub per_user: Vec<f64>,
    pub direction: LinkDirection,
}

impl SinrReport {
    /// Mean of `log2(1 + SINR)` over users.
    pub fn mean_spectral_efficiency(&self) -> f64 {
        let total: f64 = self.per_user.iter().map(|s| s.ln_1p()).sum();
        total / (self.per_user.len() as f64 * std::f64::consts::LN_2)
    }
}

/// `(HᴴH)⁻¹` for a tall channel matrix, rejecting ill-conditioned Gram matrices.
pub fn gram_inverse(h: &CMatrix) -> Result<CMatrix> {
    if h.ncols() == 0 || h.nrows() < h.ncols() {
        return Err(Error::Domain(format!(
            "zero forcing needs N >= K >= 1, got N = {} and K = {}",
            h.nrows(),
            h.ncols()
        )));
    }
    let gram = h.adjoint() * h;
    let eigenvalues = gram.clone().symmetric_eigenvalues();
    let largest = eigenvalues.max();
    let smallest = eigenvalues.min();
    let condition = if smallest > 0.0 { largest / smallest } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }
    gram.cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::RankDeficient { condition })
}

/// ZF combiner `H (HᴴH)⁻¹ / sqrt(P)`.
pub fn zf_uplink_combiner(h: &CMatrix, tx_power_density: f64) -> Result<CMatrix> {
    let inverse = gram_inverse(h)?;
    Ok(h * inverse / Complex64::from(tx_power_density.sqrt()))
}

/// Uplink ZF SINR `P / (σ² [(HᴴH)⁻¹]_kk)`.
pub fn uplink_sinr(h: &CMatrix, budget: &LinkBudget) -> Result<SinrReport> {
    let inverse = gram_inverse(h)?;
    Ok(SinrReport {
        per_user: inverse
            .diagonal()
            .iter()
            .map(|d| budget.tx_power_density / (budget.noise_density * d.re))
            .collect(),
        direction: LinkDirection::Uplink,
    })
}

/// Uplink SINR evaluated from its definition with explicit interference and
/// filtered-noise terms, for any combining matrix `W`.
pub fn uplink_sinr_ratio_form(h: &CMatrix, w: &CMatrix, budget: &LinkBudget) -> Vec<f64> {
    let p = budget.tx_power_density;
    let cross = w.adjoint() * h;
    (0..h.ncols())
        .map(|k| {
            let signal = p * cross[(k, k)].norm_sqr();
            let interference: f64 = (0..h.ncols())
                .filter(|&j| j != k)
                .map(|j| p * cross[(k, j)].norm_sqr())
                .sum();
            let noise = budget.noise_density * w.column(k).norm_squared();
            signal / (interference + noise)
        })
        .collect()
}

/// ZF precoder: returns `W = W̄ diag(ρ)` with `W̄ = H (HᴴH)⁻¹` and
/// `ρ_k = 1 / (sqrt(K) ‖w̄_k‖)`, so that `‖W‖_F = 1`.
pub fn zf_downlink_precoder(h: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let inverse = gram_inverse(h)?;
    let mut w = h * inverse;
    let users = h.ncols() as f64;
    let mut rho = Vec::with_capacity(h.ncols());
    for mut column in w.column_iter_mut() {
        let r = 1.0 / (users.sqrt() * column.norm());
        column.scale_mut(r);
        rho.push(r);
    }
    Ok((w, rho))
}

/// Downlink ZF SINR `P_sum ρ_k² / σ²`.
pub fn downlink_sinr(h: &CMatrix, budget: &LinkBudget) -> Result<SinrReport> {
    let (_, rho) = zf_downlink_precoder(h)?;
    Ok(SinrReport {
        per_user: rho
            .iter()
            .map(|r| budget.downlink_total_power_density * r * r / budget.noise_density)
            .collect(),
        direction: LinkDirection::Downlink,
    })
}

/// Downlink SINR from its definition for precoder `W` with total power `P_sum`.
pub fn downlink_sinr_ratio_form(h: &CMatrix, w: &CMatrix, budget: &LinkBudget) -> Vec<f64> {
    let p = budget.downlink_total_power_density;
    let cross = h.adjoint() * w;
    (0..h.ncols())
        .map(|k| {
            let signal = p * cross[(k, k)].norm_sqr();
            let interference: f64 = (0..w.ncols())
                .filter(|&j| j != k)
                .map(|j| p * cross[(k, j)].norm_sqr())
                .sum();
            signal / (interference + budget.noise_density)
        })
        .collect()
}

/// Uplink SINR with out-of-cell users folded into the noise:
/// `P / ([(HᴴH)⁻¹]_kk (σ² + P Σ γ²))`, `intercell_gains` being amplitude gains.
pub fn multicell_uplink_sinr(
    h: &CMatrix,
    intercell_gains: &[f64],
    budget: &LinkBudget,
) -> Result<SinrReport> {
    if intercell_gains.iter().any(|g| !(*g >= 0.0)) {
        return Err(Error::Domain("inter-cell gains must be non-negative".into()));
    }
    let aggregate: f64 = intercell_gains.iter().map(|g| g * g).sum();
    let inflated = LinkBudget {
        noise_density: budget.noise_density + budget.tx_power_density * aggregate,
        ..*budget
    };
    uplink_sinr(h, &inflated)
}

/// Analog stage `F = [b(r_k, φ_k)] / sqrt(N)` and effective channel `Fᴴ H`.
pub fn hybrid_chain(
    h: &CMatrix,
    users: &[UserLocation],
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<(CMatrix, CMatrix)> {
    if users.len() != h.ncols() {
        return Err(Error::Domain(format!(
            "{} user locations for a channel with {} columns",
            users.len(),
            h.ncols()
        )));
    }
    let norm = Complex64::from(1.0 / (geom.num_elements() as f64).sqrt());
    let mut analog = CMatrix::zeros(geom.num_elements(), users.len());
    for (k, loc) in users.iter().enumerate() {
        analog.set_column(k, &(steering_vector(loc, geom, prop)? * norm));
    }
    let effective = analog.adjoint() * h;
    Ok((analog, effective))
}
