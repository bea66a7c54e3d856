//! Array layout, cell annulus and user placement.

use std::f64::consts::PI;

use rand::{Rng, RngExt};

use crate::{Error, Result};

/// Uniform linear array centred on the origin along the x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing: f64,
    element_coords: Vec<f64>,
}

impl ArrayGeometry {
    /// Symmetric element positions `(n - (N-1)/2) * spacing`, n = 0..N.
    pub fn new(num_elements: usize, spacing: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::Invalid("array needs at least one element".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Invalid(format!("element spacing must be positive, got {spacing}")));
        }
        let centre = (num_elements as f64 - 1.0) / 2.0;
        let element_coords = (0..num_elements)
            .map(|n| (n as f64 - centre) * spacing)
            .collect();
        Ok(Self { num_elements, spacing, element_coords })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(num_elements: usize, wavelength: f64) -> Result<Self> {
        Self::new(num_elements, wavelength / 2.0)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn element_coords(&self) -> &[f64] {
        &self.element_coords
    }

    /// Distance from the array centre to its outermost element.
    pub fn max_offset(&self) -> f64 {
        (self.num_elements as f64 - 1.0) * self.spacing / 2.0
    }
}

/// Annulus `r_min <= r <= r_max` in which users are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub r_min: f64,
    pub r_max: f64,
}

impl CellGeometry {
    /// Accepts `r_min == r_max` (a ring) so that fixed-distance drops can be
    /// sampled; the closed forms call [`CellGeometry::require_annulus`].
    pub fn new(r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::Invalid(format!("r_min must be positive, got {r_min}")));
        }
        if r_max < r_min {
            return Err(Error::Invalid(format!(
                "r_min ({r_min}) must not exceed r_max ({r_max})"
            )));
        }
        Ok(Self { r_min, r_max })
    }

    pub fn require_annulus(&self) -> Result<()> {
        if self.r_max > self.r_min {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "closed forms need r_min < r_max, got {} and {}",
                self.r_min, self.r_max
            )))
        }
    }

    /// `r_max² - r_min²`.
    pub fn area_span(&self) -> f64 {
        (self.r_max - self.r_min) * (self.r_max + self.r_min)
    }
}

/// Polar position of a user relative to the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLocation {
    pub distance: f64,
    pub azimuth: f64,
}

/// Draws a user with radial density `2r / (r_max² - r_min²)` and azimuth
/// uniform on (0, π).
pub fn sample_user_location<R: Rng + ?Sized>(rng: &mut R, cell: &CellGeometry) -> UserLocation {
    let u: f64 = rng.random();
    let r2 = cell.r_min * cell.r_min + u * cell.area_span();
    // keep the draw inside the annulus despite rounding
    let distance = r2.sqrt().clamp(cell.r_min, cell.r_max);
    let mut azimuth = PI * rng.random::<f64>();
    if azimuth == 0.0 {
        azimuth = f64::MIN_POSITIVE;
    }
    UserLocation { distance, azimuth }
}

/// Law-of-cosines distance from the user to every array element.
pub fn element_distances(loc: &UserLocation, geom: &ArrayGeometry) -> Result<Vec<f64>> {
    if !(loc.distance > geom.max_offset()) {
        return Err(Error::Domain(format!(
            "user at {} m lies inside the array aperture (half-length {} m)",
            loc.distance,
            geom.max_offset()
        )));
    }
    let r = loc.distance;
    let cos_phi = loc.azimuth.cos();
    Ok(geom
        .element_coords()
        .iter()
        .map(|&delta| (r * r + delta * delta - 2.0 * r * delta * cos_phi).sqrt())
        .collect())
}
