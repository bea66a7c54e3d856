//! Large-scale gains, near-field steering vectors, spatial correlation and
//! random channel draws for the three system families.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{element_distances, ArrayGeometry, UserLocation};
use crate::{CMatrix, CVector, Complex64, Error, Result, SPEED_OF_LIGHT};

/// Carrier-dependent propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationProfile {
    pub wavelength: f64,
    pub pathloss_constant: f64,
    /// Half-width in radians of the uniform angular power support.
    pub angular_spread: f64,
    /// Rician K-factor, used by the mmWave family only.
    pub rician_factor: f64,
    pub quadrature_points: usize,
}

impl PropagationProfile {
    pub fn for_carrier(carrier_hz: f64) -> Self {
        Self {
            wavelength: SPEED_OF_LIGHT / carrier_hz,
            pathloss_constant: 1.0,
            angular_spread: 0.0,
            rician_factor: 10.0,
            quadrature_points: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::Invalid(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if !(self.pathloss_constant > 0.0) {
            return Err(Error::Invalid("pathloss constant must be positive".into()));
        }
        if !(self.angular_spread >= 0.0) {
            return Err(Error::Invalid("angular spread must be non-negative".into()));
        }
        if !(self.rician_factor >= 0.0) {
            return Err(Error::Invalid("rician factor must be non-negative".into()));
        }
        if self.quadrature_points == 0 {
            return Err(Error::Invalid("quadrature_points must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-element amplitude gains `C_PL * λ / D_n`.
pub fn large_scale_gains(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<Vec<f64>> {
    let scale = prop.pathloss_constant * prop.wavelength;
    Ok(element_distances(loc, geom)?.into_iter().map(|d| scale / d).collect())
}

/// Unit-modulus spherical-wave steering vector with entries `exp(-j 2π D_n / λ)`.
pub fn steering_vector(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<CVector> {
    let distances = element_distances(loc, geom)?;
    Ok(CVector::from_iterator(
        distances.len(),
        distances.into_iter().map(|d| phase(d, prop.wavelength)),
    ))
}

// Reduce to whole cycles first so that long paths keep their sub-wavelength phase.
fn phase(distance: f64, wavelength: f64) -> Complex64 {
    let cycles = (distance / wavelength).rem_euclid(1.0);
    Complex64::from_polar(1.0, -TAU * cycles)
}

fn quadrature_azimuths(loc: &UserLocation, prop: &PropagationProfile) -> Vec<f64> {
    if prop.angular_spread == 0.0 {
        return vec![loc.azimuth];
    }
    let q = prop.quadrature_points;
    let width = 2.0 * prop.angular_spread / q as f64;
    let start = loc.azimuth - prop.angular_spread;
    (0..q).map(|i| start + (i as f64 + 0.5) * width).collect()
}

/// N×Q factor `L` with `L Lᴴ` equal to the correlation matrix of
/// [`channel_correlation`]: column q is `γ ⊙ b(r, φ_q) / sqrt(Q)`.
pub fn correlation_factor(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<CMatrix> {
    let gains = large_scale_gains(loc, geom, prop)?;
    let azimuths = quadrature_azimuths(loc, prop);
    let norm = 1.0 / (azimuths.len() as f64).sqrt();
    let mut factor = CMatrix::zeros(gains.len(), azimuths.len());
    for (q, &azimuth) in azimuths.iter().enumerate() {
        let b = steering_vector(&UserLocation { distance: loc.distance, azimuth }, geom, prop)?;
        for (n, &g) in gains.iter().enumerate() {
            factor[(n, q)] = b[n] * (g * norm);
        }
    }
    Ok(factor)
}

/// Spatial correlation `(γγᵀ) ⊙ Θ̃` with `Θ̃` the midpoint-rule average of
/// `b bᴴ` over the angular support, distance held fixed.
pub fn channel_correlation(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<CMatrix> {
    let gains = large_scale_gains(loc, geom, prop)?;
    let azimuths = quadrature_azimuths(loc, prop);
    let mut steering = CMatrix::zeros(gains.len(), azimuths.len());
    for (q, &azimuth) in azimuths.iter().enumerate() {
        let b = steering_vector(&UserLocation { distance: loc.distance, azimuth }, geom, prop)?;
        steering.set_column(q, &b);
    }
    let normalized = &steering * steering.adjoint() / Complex64::from(azimuths.len() as f64);
    Ok(CMatrix::from_fn(gains.len(), gains.len(), |i, j| {
        normalized[(i, j)] * (gains[i] * gains[j])
    }))
}

/// Spectral square root `V diag(sqrt(max(λ, 0)))` of a Hermitian PSD matrix.
///
/// Eigenvalues down to `-1e-8 * trace` are treated as rounding noise and
/// clamped to zero, as are positive ones below `N ε λ_max`; anything more
/// negative is rejected.
pub fn hermitian_sqrt(corr: &CMatrix) -> Result<CMatrix> {
    let trace = corr.diagonal().iter().map(|z| z.re).sum::<f64>();
    let eig = corr.clone().symmetric_eigen();
    let lowest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lowest < -1e-8 * trace.abs() {
        return Err(Error::NotPsd { eigenvalue: lowest, trace });
    }
    // eigenvalues at rounding level carry no signal; keep them out of the factor
    let largest = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let floor = corr.nrows() as f64 * f64::EPSILON * largest;
    let mut factor = eig.eigenvectors;
    for (j, &value) in eig.eigenvalues.iter().enumerate() {
        let s = if value > floor { value.sqrt() } else { 0.0 };
        factor.column_mut(j).scale_mut(s);
    }
    Ok(factor)
}

/// Standard circularly-symmetric complex Gaussian vector, CN(0, I).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    CVector::from_iterator(len, (0..len).map(|_| complex_normal(rng)))
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// One draw `Θ^{1/2} g` with `g ~ CN(0, I)`.
pub fn sample_channel<R: Rng + ?Sized>(corr: &CMatrix, rng: &mut R) -> Result<CVector> {
    let factor = hermitian_sqrt(corr)?;
    Ok(sample_with_factor(&factor, rng))
}

/// Draw `L g` for a precomputed factor `L` (N×Q) and `g ~ CN(0, I_Q)`.
pub fn sample_with_factor<R: Rng + ?Sized>(factor: &CMatrix, rng: &mut R) -> CVector {
    let g = complex_gaussian(rng, factor.ncols());
    factor * g
}

/// i.i.d. Rayleigh channel with scalar gain `λ / r`.
pub fn sample_channel_sub6<R: Rng + ?Sized>(
    loc: &UserLocation,
    prop: &PropagationProfile,
    num_elements: usize,
    rng: &mut R,
) -> CVector {
    let gain = prop.wavelength / loc.distance;
    complex_gaussian(rng, num_elements) * Complex64::from(gain)
}

/// Rician channel: scaled near-field LoS component with a random complex
/// amplitude plus i.i.d. scattering, overall gain `λ / r`.
pub fn sample_channel_mmwave<R: Rng + ?Sized>(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
    rng: &mut R,
) -> Result<CVector> {
    let b = steering_vector(loc, geom, prop)?;
    let kappa = prop.rician_factor;
    let (los, nlos) = if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (kappa + 1.0)).sqrt(), (1.0 / (kappa + 1.0)).sqrt())
    };
    let gain = prop.wavelength / loc.distance;
    let amplitude = complex_normal(rng);
    let scatter = complex_gaussian(rng, geom.num_elements());
    Ok((b * (amplitude * los) + scatter * Complex64::from(nlos)) * Complex64::from(gain))
}

/// Deterministic line-of-sight channel `γ ⊙ b`.
pub fn line_of_sight_channel(
    loc: &UserLocation,
    geom: &ArrayGeometry,
    prop: &PropagationProfile,
) -> Result<CVector> {
    let gains = large_scale_gains(loc, geom, prop)?;
    let b = steering_vector(loc, geom, prop)?;
    Ok(CVector::from_iterator(
        gains.len(),
        gains.iter().zip(b.iter()).map(|(&g, &z)| z * g),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn profile() -> PropagationProfile {
        PropagationProfile::for_carrier(7.5e9)
    }

    #[test]
    fn wavelength_from_carrier() {
        assert!((profile().wavelength - 0.04).abs() < 1e-15);
    }

    #[test]
    fn single_element_gain() {
        let g = ArrayGeometry::new(1, 0.02).unwrap();
        let loc = UserLocation { distance: 70.0, azimuth: 1.0 };
        let gains = large_scale_gains(&loc, &g, &profile()).unwrap();
        assert!((gains[0] - 0.04 / 70.0).abs() < 1e-18);
    }

    #[test]
    fn steering_is_unit_modulus_and_symmetric_at_broadside() {
        let g = ArrayGeometry::new(9, 0.02).unwrap();
        let loc = UserLocation { distance: 90.0, azimuth: PI / 2.0 };
        let b = steering_vector(&loc, &g, &profile()).unwrap();
        for n in 0..9 {
            assert!((b[n].norm() - 1.0).abs() < 1e-12);
            assert!((b[n] - b[8 - n]).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_spread_correlation_is_rank_one() {
        let g = ArrayGeometry::new(6, 0.02).unwrap();
        let loc = UserLocation { distance: 75.0, azimuth: 0.7 };
        let mut prop = profile();
        prop.pathloss_constant = 1.0;
        let corr = channel_correlation(&loc, &g, &prop).unwrap();
        let h = line_of_sight_channel(&loc, &g, &prop).unwrap();
        let outer = &h * h.adjoint();
        assert!((corr - outer).norm() < 1e-12 * h.norm_squared());
    }

    #[test]
    fn not_psd_is_rejected() {
        let mut m = CMatrix::identity(3, 3);
        m[(2, 2)] = Complex64::new(-1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_channel(&m, &mut rng), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn rank_one_draw_is_collinear() {
        let g = ArrayGeometry::new(5, 0.02).unwrap();
        let loc = UserLocation { distance: 75.0, azimuth: 1.2 };
        let prop = profile();
        let b = steering_vector(&loc, &g, &prop).unwrap();
        let corr = &b * b.adjoint();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = sample_channel(&corr, &mut rng).unwrap();
        let scalar = h[0] / b[0];
        for n in 0..5 {
            assert!((h[n] - scalar * b[n]).norm() < 1e-10 * h.norm());
        }
    }
}
