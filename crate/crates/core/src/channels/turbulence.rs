//! Atmospheric turbulence: refractive-index structure profile, Rytov
//! variance, aperture-averaged scintillation index and fade margin.

use super::satground::{effective_atmosphere, Atmosphere, Turbulence};
use crate::math::{erf_inv, exp, log, pow, sin, sqrt, DEG};
use crate::{Error, Result};
use core::f64::consts::PI;

/// Added to the downlink scintillation index (not its square) for uplinks.
pub const UPLINK_SCINTILLATION_OFFSET: f64 = 0.2;

const RYTOV_REL_TOL: f64 = 1e-8;
const RYTOV_MAX_INTERVALS: usize = 1 << 20;

/// How the receiver-aperture parameter `d` in the scintillation index is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ApertureModel {
    /// `d = D_r·(π / (2·L))²` with `L` the effective atmosphere in metres.
    /// Makes `d` negligible, so there is effectively no aperture averaging.
    #[default]
    Literal,
    /// `d = sqrt(k·D_r² / (4L))`, the usual spherical-wave aperture parameter.
    SphericalWave,
}

/// Hufnagel-Valley style `C_n²(h)` in m^(−2/3) for altitude `h` in metres,
/// RMS wind speed `w` in m/s and ground-level strength `a`.
pub fn cn2_profile(h_m: f64, wind_m_s: f64, ground_cn2: f64) -> f64 {
    0.00594 * (wind_m_s / 27.0) * (wind_m_s / 27.0) * pow(h_m * 1e-5, 10.0) * exp(-h_m / 1000.0)
        + 2.7e-16 * exp(-h_m / 1500.0)
        + ground_cn2 * exp(-h_m / 100.0)
}

fn wavenumber(wavelength_m: f64) -> f64 {
    2.0 * PI / wavelength_m
}

/// `2.25·k^(7/6)·C_n²·(6/11)·L^(11/6)` for a uniform path of length `L` metres.
pub fn rytov_constant_closed_form(cn2: f64, path_m: f64, wavelength_m: f64) -> f64 {
    2.25 * pow(wavenumber(wavelength_m), 7.0 / 6.0) * cn2 * (6.0 / 11.0) * pow(path_m, 11.0 / 6.0)
}

/// `2.25·k^(7/6)·∫₀^L C_n²(z)(L − z)^(5/6) dz` by adaptive Simpson quadrature,
/// with `z` the distance along the path from the ground end.
pub fn rytov_numeric<F>(cn2_along_path: F, path_m: f64, wavelength_m: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(path_m >= 0.0) {
        return Err(Error::domain("path length", path_m, "must be >= 0"));
    }
    if !(wavelength_m > 0.0) {
        return Err(Error::domain("wavelength_m", wavelength_m, "must be positive"));
    }
    let integral = crate::math::simpson_adaptive(
        |z| cn2_along_path(z) * pow((path_m - z).max(0.0), 5.0 / 6.0),
        0.0,
        path_m,
        RYTOV_REL_TOL,
        RYTOV_MAX_INTERVALS,
    )?;
    Ok(2.25 * pow(wavenumber(wavelength_m), 7.0 / 6.0) * integral)
}

/// Rytov variance through the effective atmosphere at elevation `elevation_deg`.
///
/// Uniform turbulence uses the closed form; the altitude profile maps path
/// position `z` to altitude `h = L_OGS + z·sin θ` and is integrated numerically.
pub fn rytov_variance(
    atmosphere: &Atmosphere,
    elevation_deg: f64,
    ogs_altitude_km: f64,
    wavelength_m: f64,
) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain("wavelength_m", wavelength_m, "must be positive"));
    }
    let path_m = effective_atmosphere(elevation_deg, ogs_altitude_km)? * 1000.0;
    match atmosphere.turbulence {
        Turbulence::Constant { cn2 } => Ok(rytov_constant_closed_form(cn2, path_m, wavelength_m)),
        Turbulence::Profile {
            wind_speed_m_s,
            ground_cn2,
        } => {
            let rise = sin(elevation_deg * DEG);
            let base_m = ogs_altitude_km * 1000.0;
            rytov_numeric(
                |z| cn2_profile(base_m + z * rise, wind_speed_m_s, ground_cn2),
                path_m,
                wavelength_m,
            )
        }
    }
}

pub fn aperture_parameter(model: ApertureModel, rx_diameter_m: f64, wavelength_m: f64, path_m: f64) -> f64 {
    match model {
        ApertureModel::Literal => {
            let q = PI / (2.0 * path_m);
            rx_diameter_m * q * q
        }
        ApertureModel::SphericalWave => sqrt(wavenumber(wavelength_m) * rx_diameter_m * rx_diameter_m / (4.0 * path_m)),
    }
}

/// Aperture-averaged spherical-wave scintillation index `σ_I²`.
pub fn scintillation_index(
    rytov: f64,
    rx_diameter_m: f64,
    wavelength_m: f64,
    atm_eff_km: f64,
    model: ApertureModel,
) -> Result<f64> {
    if !(rytov >= 0.0) {
        return Err(Error::domain("rytov variance", rytov, "must be >= 0"));
    }
    if !(rx_diameter_m > 0.0) || !(atm_eff_km > 0.0) {
        return Err(Error::domain(
            "aperture geometry",
            rx_diameter_m.min(atm_eff_km),
            "diameter and path must be positive",
        ));
    }
    let d = aperture_parameter(model, rx_diameter_m, wavelength_m, atm_eff_km * 1000.0);
    let d2 = d * d;
    let s125 = pow(rytov, 6.0 / 5.0);
    let first = 0.20 * rytov / pow(1.0 + 0.18 * d2 + 0.20 * s125, 7.0 / 6.0);
    let second = 0.21 * rytov * pow(1.0 + 0.24 * s125, -5.0 / 6.0) / (1.0 + 0.90 * d2 + 0.21 * d2 * s125);
    Ok(exp(first + second) - 1.0)
}

/// `σ_I,uplink = σ_I,downlink + 0.2`, applied to the index itself.
pub fn uplink_scintillation_index(downlink_index: f64) -> Result<f64> {
    if !(downlink_index >= 0.0) {
        return Err(Error::domain("scintillation index", downlink_index, "must be >= 0"));
    }
    Ok(downlink_index + UPLINK_SCINTILLATION_OFFSET)
}

/// Log-normal fade margin for an outage probability `p_thr`, in dB.
///
/// Positive values are losses. The margin is
/// `−4.343·(erf⁻¹(2p − 1)·sqrt(2·ln(σ² + 1)) − ½·ln(σ² + 1))`, which is a
/// gain (negative) once `p_thr` is large enough that the median fade is
/// exceeded.
pub fn scintillation_loss_db(index_sq: f64, outage_probability: f64) -> Result<f64> {
    if !(index_sq >= 0.0) {
        return Err(Error::domain("scintillation index squared", index_sq, "must be >= 0"));
    }
    if !(outage_probability > 0.0 && outage_probability < 1.0) {
        return Err(Error::domain(
            "outage probability",
            outage_probability,
            "must lie strictly between 0 and 1",
        ));
    }
    let ln_term = log(index_sq + 1.0);
    let margin = erf_inv(2.0 * outage_probability - 1.0) * sqrt(2.0 * ln_term) - 0.5 * ln_term;
    Ok(-4.343 * margin)
}
