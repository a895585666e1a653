use crate::math::{exp, sqrt};
use crate::{Error, Result};
use core::f64::consts::PI;

/// Diffraction-limited free-space link between two satellites.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct InterSatelliteLink {
    pub distance_m: f64,
    pub receiver_radius_m: f64,
    pub beam_waist_m: f64,
    pub wavelength_m: f64,
}

/// Gaussian beam radius `w(z) = w0·sqrt(1 + (λz/(πw0²))²)`.
pub fn beam_radius(waist_m: f64, wavelength_m: f64, z_m: f64) -> Result<f64> {
    if !(waist_m > 0.0) {
        return Err(Error::domain("beam_waist_m", waist_m, "must be positive"));
    }
    if !(wavelength_m > 0.0) {
        return Err(Error::domain("wavelength_m", wavelength_m, "must be positive"));
    }
    if !(z_m >= 0.0) {
        return Err(Error::domain("distance_m", z_m, "must be >= 0"));
    }
    let spread = wavelength_m * z_m / (PI * waist_m * waist_m);
    Ok(waist_m * sqrt(1.0 + spread * spread))
}

/// Fraction of a perfectly aligned Gaussian beam caught by a circular aperture.
pub fn intersat_transmittance(link: &InterSatelliteLink) -> Result<f64> {
    if !(link.receiver_radius_m > 0.0) {
        return Err(Error::domain(
            "receiver_radius_m",
            link.receiver_radius_m,
            "must be positive",
        ));
    }
    let w = beam_radius(link.beam_waist_m, link.wavelength_m, link.distance_m)?;
    let ratio = link.receiver_radius_m / w;
    Ok(1.0 - exp(-2.0 * ratio * ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn link(z: f64, r: f64) -> InterSatelliteLink {
        InterSatelliteLink {
            distance_m: z,
            receiver_radius_m: r,
            beam_waist_m: 0.2,
            wavelength_m: 1550e-9,
        }
    }

    #[test]
    fn beam_radius_examples() {
        assert_eq!(beam_radius(0.2, 1550e-9, 0.0).unwrap(), 0.2);
        let spread = 1550e-9 * 1e6 / (std::f64::consts::PI * 0.04);
        let oracle = 0.2 * (1.0 + spread * spread).sqrt();
        assert_relative_eq!(beam_radius(0.2, 1550e-9, 1e6).unwrap(), oracle, epsilon = 1e-14);
        assert_relative_eq!(oracle, 2.47500, epsilon = 1e-4);
        let far = beam_radius(0.2, 1550e-9, 2e9).unwrap() / beam_radius(0.2, 1550e-9, 1e9).unwrap();
        assert_relative_eq!(far, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn transmittance_examples() {
        assert!(intersat_transmittance(&link(1e6, 100.0)).unwrap() > 1.0 - 1e-12);
        let t = intersat_transmittance(&link(1e6, 0.2)).unwrap();
        let w = beam_radius(0.2, 1550e-9, 1e6).unwrap();
        assert_relative_eq!(t, 1.0 - (-2.0 * 0.04 / (w * w)).exp(), epsilon = 1e-15);
        assert_relative_eq!(t, 1.298e-2, epsilon = 1e-5);
        assert_relative_eq!(
            intersat_transmittance(&link(0.0, 0.2)).unwrap(),
            1.0 - (-2.0f64).exp(),
            epsilon = 1e-15
        );
    }
}
