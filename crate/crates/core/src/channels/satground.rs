//! Satellite-to-ground and ground-to-satellite free-space links.
//!
//! The loss budget has three parts: geometric beam spreading over the full
//! slant range, Mie scattering over the slant path through the lower
//! atmosphere, and a scintillation fade margin.

use super::turbulence::{
    rytov_variance, scintillation_index, scintillation_loss_db, uplink_scintillation_index, ApertureModel,
};
use super::{Flagged, ModelWarning};
use crate::math::{asin, cos, db_to_transmittance, log10, pow, sin, sqrt, DEG};
use crate::{Error, Result, EARTH_RADIUS_KM};
use alloc::format;

/// Altitude of the top of the turbulent, scattering atmosphere, in km.
pub const ATMOSPHERE_THICKNESS_KM: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    Uplink,
    #[default]
    Downlink,
}

/// Terminal optics and link-budget margins.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct OpticsParams {
    pub tx_diameter_m: f64,
    pub rx_diameter_m: f64,
    pub tx_efficiency: f64,
    pub rx_efficiency: f64,
    /// Fraction of power lost to pointing error.
    pub pointing_loss: f64,
    /// Outage probability the scintillation margin is sized for.
    pub outage_probability: f64,
}

impl OpticsParams {
    /// 30 cm satellite telescope sending to a 1 m ground telescope.
    pub fn satellite_downlink() -> Self {
        Self {
            tx_diameter_m: 0.3,
            rx_diameter_m: 1.0,
            tx_efficiency: 1.0,
            rx_efficiency: 1.0,
            pointing_loss: 0.1,
            outage_probability: 1e-3,
        }
    }

    /// 1 m ground telescope sending to a 30 cm satellite telescope.
    pub fn ground_uplink() -> Self {
        Self {
            tx_diameter_m: 1.0,
            rx_diameter_m: 0.3,
            ..Self::satellite_downlink()
        }
    }

    pub fn for_direction(direction: Direction) -> Self {
        match direction {
            Direction::Uplink => Self::ground_uplink(),
            Direction::Downlink => Self::satellite_downlink(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tx_diameter_m > 0.0) {
            return Err(Error::domain("tx_diameter_m", self.tx_diameter_m, "must be positive"));
        }
        if !(self.rx_diameter_m > 0.0) {
            return Err(Error::domain("rx_diameter_m", self.rx_diameter_m, "must be positive"));
        }
        for (name, v) in [
            ("tx_efficiency", self.tx_efficiency),
            ("rx_efficiency", self.rx_efficiency),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(name, v, "must lie in (0, 1]"));
            }
        }
        if !(self.pointing_loss >= 0.0 && self.pointing_loss < 1.0) {
            return Err(Error::domain("pointing_loss", self.pointing_loss, "must lie in [0, 1)"));
        }
        Ok(())
    }
}

impl Default for OpticsParams {
    fn default() -> Self {
        Self::satellite_downlink()
    }
}

/// Turbulence strength along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum Turbulence {
    /// Uniform `C_n²` in m^(−2/3).
    Constant { cn2: f64 },
    /// Altitude-dependent profile with RMS wind speed and ground-level `C_n²`.
    Profile { wind_speed_m_s: f64, ground_cn2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Atmosphere {
    pub visibility_km: f64,
    pub turbulence: Turbulence,
}

impl Atmosphere {
    /// 200 km visibility, `C_n² = 1e-16`.
    pub fn good() -> Self {
        Self {
            visibility_km: 200.0,
            turbulence: Turbulence::Constant { cn2: 1e-16 },
        }
    }

    /// 20 km visibility, `C_n² = 1e-12`.
    pub fn bad() -> Self {
        Self {
            visibility_km: 20.0,
            turbulence: Turbulence::Constant { cn2: 1e-12 },
        }
    }
}

impl Default for Atmosphere {
    fn default() -> Self {
        Self::good()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SatGroundLink {
    pub elevation_deg: f64,
    pub satellite_altitude_km: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ogs_altitude_km: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub direction: Direction,
    #[cfg_attr(feature = "serde", serde(default))]
    pub optics: OpticsParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub atmosphere: Atmosphere,
    #[cfg_attr(feature = "serde", serde(default))]
    pub aperture_model: ApertureModel,
}

impl SatGroundLink {
    /// Downlink with default optics and a good atmosphere.
    pub fn downlink(elevation_deg: f64, satellite_altitude_km: f64) -> Self {
        Self {
            elevation_deg,
            satellite_altitude_km,
            ogs_altitude_km: 0.0,
            direction: Direction::Downlink,
            optics: OpticsParams::satellite_downlink(),
            atmosphere: Atmosphere::good(),
            aperture_model: ApertureModel::Literal,
        }
    }

    /// Uplink with default optics and a good atmosphere.
    pub fn uplink(elevation_deg: f64, satellite_altitude_km: f64) -> Self {
        Self {
            direction: Direction::Uplink,
            optics: OpticsParams::ground_uplink(),
            ..Self::downlink(elevation_deg, satellite_altitude_km)
        }
    }
}

/// Per-source loss budget of one satellite-ground link.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LinkBudget {
    pub transmittance: f64,
    pub geometric_db: f64,
    pub scattering_db: f64,
    pub scintillation_db: f64,
    pub total_db: f64,
    pub rytov_variance: f64,
    /// `σ_I²` after the uplink offset, if any.
    pub scintillation_index_sq: f64,
    pub slant_km: f64,
    pub atm_eff_km: f64,
    pub warning: Option<ModelWarning>,
}

fn check_elevation(elevation_deg: f64) -> Result<()> {
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::domain("elevation_deg", elevation_deg, "must lie in (0, 90]"));
    }
    Ok(())
}

/// Distance from a ground point at radius `r_g` to a shell at radius `r_s`
/// along a ray at elevation `θ`, via the central angle
/// `α = (90° − θ) − asin(cos θ · r_g / r_s)`.
fn slant_to_shell(elevation_deg: f64, r_g: f64, r_s: f64) -> Result<f64> {
    let arg = cos(elevation_deg * DEG) * r_g / r_s;
    if !(arg <= 1.0) {
        return Err(Error::Geometry(format!(
            "no intersection with the shell at radius {r_s} km from radius {r_g} km at elevation {elevation_deg} deg"
        )));
    }
    let alpha = (90.0 - elevation_deg) * DEG - asin(arg);
    let half = sin(alpha / 2.0);
    let dr = r_s - r_g;
    Ok(sqrt(dr * dr + 4.0 * r_s * r_g * half * half))
}

/// Slant range from the ground station to the satellite, in km.
pub fn slant_total_distance(elevation_deg: f64, satellite_altitude_km: f64, ogs_altitude_km: f64) -> Result<f64> {
    check_elevation(elevation_deg)?;
    if !(ogs_altitude_km >= 0.0) {
        return Err(Error::domain("ogs_altitude_km", ogs_altitude_km, "must be >= 0"));
    }
    if !(satellite_altitude_km > ogs_altitude_km) {
        return Err(Error::domain(
            "satellite_altitude_km",
            satellite_altitude_km,
            "must exceed the ground station altitude",
        ));
    }
    slant_to_shell(
        elevation_deg,
        EARTH_RADIUS_KM + ogs_altitude_km,
        EARTH_RADIUS_KM + satellite_altitude_km,
    )
}

/// Slant path length through the atmosphere, from the ground station up to
/// [`ATMOSPHERE_THICKNESS_KM`], in km.
pub fn effective_atmosphere(elevation_deg: f64, ogs_altitude_km: f64) -> Result<f64> {
    check_elevation(elevation_deg)?;
    if !(0.0..ATMOSPHERE_THICKNESS_KM).contains(&ogs_altitude_km) {
        return Err(Error::Geometry(format!(
            "ground station altitude {ogs_altitude_km} km is not below the top of the atmosphere"
        )));
    }
    slant_to_shell(
        elevation_deg,
        EARTH_RADIUS_KM + ogs_altitude_km,
        EARTH_RADIUS_KM + ATMOSPHERE_THICKNESS_KM,
    )
}

/// Beam-spreading loss `10·log10(L²λ² / (D_t²D_r²) / (T_t(1 − L_p)T_r))` in dB.
///
/// Flags links closer than `D_t·D_r/λ`, where the far-field form no longer holds.
pub fn geometric_loss_db(slant_km: f64, wavelength_m: f64, optics: &OpticsParams) -> Result<Flagged<f64>> {
    optics.validate()?;
    if !(wavelength_m > 0.0) {
        return Err(Error::domain("wavelength_m", wavelength_m, "must be positive"));
    }
    if !(slant_km > 0.0) {
        return Err(Error::domain("slant distance", slant_km, "must be positive"));
    }
    let l = slant_km * 1000.0;
    let spread = (l * wavelength_m) / (optics.tx_diameter_m * optics.rx_diameter_m);
    let efficiency = optics.tx_efficiency * (1.0 - optics.pointing_loss) * optics.rx_efficiency;
    let warning = (spread < 1.0).then_some(ModelWarning::NearField);
    Ok(Flagged::new(10.0 * log10(spread * spread / efficiency), warning))
}

/// Mie scattering attenuation in dB/km from visibility (km) and wavelength (nm).
pub fn mie_scattering_db_per_km(visibility_km: f64, wavelength_nm: f64) -> Result<f64> {
    if !(visibility_km > 0.0) {
        return Err(Error::domain("visibility_km", visibility_km, "must be positive"));
    }
    if !(wavelength_nm > 0.0) {
        return Err(Error::domain("wavelength_nm", wavelength_nm, "must be positive"));
    }
    let v = visibility_km;
    let p = if v >= 50.0 {
        1.6
    } else if v >= 6.0 {
        1.3
    } else if v >= 1.0 {
        0.16 * v + 0.34
    } else if v >= 0.5 {
        v - 0.5
    } else {
        0.0
    };
    Ok(4.343 * (3.912 / v) * pow(wavelength_nm / 550.0, -p))
}

/// Full loss budget and transmittance of a satellite-ground link.
pub fn satground_transmittance(link: &SatGroundLink, wavelength_m: f64) -> Result<LinkBudget> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain("wavelength_m", wavelength_m, "must be positive"));
    }
    let slant_km = slant_total_distance(link.elevation_deg, link.satellite_altitude_km, link.ogs_altitude_km)?;
    let atm_eff_km = effective_atmosphere(link.elevation_deg, link.ogs_altitude_km)?;
    let geometric = geometric_loss_db(slant_km, wavelength_m, &link.optics)?;
    let scattering_db = mie_scattering_db_per_km(link.atmosphere.visibility_km, wavelength_m * 1e9)? * atm_eff_km;
    let rytov = rytov_variance(&link.atmosphere, link.elevation_deg, link.ogs_altitude_km, wavelength_m)?;
    let mut index_sq = scintillation_index(
        rytov,
        link.optics.rx_diameter_m,
        wavelength_m,
        atm_eff_km,
        link.aperture_model,
    )?;
    if link.direction == Direction::Uplink {
        let up = uplink_scintillation_index(sqrt(index_sq))?;
        index_sq = up * up;
    }
    let scintillation_db = scintillation_loss_db(index_sq, link.optics.outage_probability)?;
    let total_db = geometric.value + scattering_db + scintillation_db;
    Ok(LinkBudget {
        transmittance: db_to_transmittance(total_db),
        geometric_db: geometric.value,
        scattering_db,
        scintillation_db,
        total_db,
        rytov_variance: rytov,
        scintillation_index_sq: index_sq,
        slant_km,
        atm_eff_km,
        warning: geometric.warning,
    })
}
