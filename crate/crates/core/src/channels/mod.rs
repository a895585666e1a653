//! Transmittance models for the four link families.
//!
//! Losses are attenuation ratios `A = P_T / P_R ≥ 1` or their dB values;
//! transmittances are `1 / A`.

mod fibre;
mod intersat;
mod satground;
mod turbulence;
mod underwater;

pub use fibre::{fibre_transmittance, FibreLink, DEFAULT_FIBRE_ATTENUATION_DB_PER_KM};
pub use intersat::{beam_radius, intersat_transmittance, InterSatelliteLink};
pub use satground::{
    effective_atmosphere, geometric_loss_db, mie_scattering_db_per_km, satground_transmittance, slant_total_distance,
    Atmosphere, Direction, LinkBudget, OpticsParams, SatGroundLink, Turbulence, ATMOSPHERE_THICKNESS_KM,
};
pub use turbulence::{
    aperture_parameter, cn2_profile, rytov_constant_closed_form, rytov_numeric, rytov_variance, scintillation_index,
    scintillation_loss_db, uplink_scintillation_index, ApertureModel, UPLINK_SCINTILLATION_OFFSET,
};
pub use underwater::{
    underwater_extinction, underwater_transmittance, Extinction, UnderwaterExtinction, UnderwaterLink, WaterType,
};

use crate::{Error, Result};

/// Caveats attached to a result that was still computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ModelWarning {
    /// Underwater absorption/scattering fits are for 400–700 nm.
    WavelengthOutsideVisible,
    /// Geometric loss assumes `L_tot > D_t·D_r/λ`.
    NearField,
}

/// A value together with an optional model warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warning: Option<ModelWarning>,
}

impl<T> Flagged<T> {
    pub(crate) fn new(value: T, warning: Option<ModelWarning>) -> Self {
        Self { value, warning }
    }
}

/// `T = Π 1/A_i` over attenuation ratios `A_i ≥ 1`.
pub fn combine_transmittances(losses: &[f64]) -> Result<f64> {
    losses.iter().try_fold(1.0, |t, &a| {
        if !(a >= 1.0) || !a.is_finite() {
            return Err(Error::domain("attenuation ratio", a, "must be >= 1 and finite"));
        }
        Ok(t / a)
    })
}

/// Link families, with the excess-noise sources typical for each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChannelKind {
    Fibre,
    Underwater,
    InterSatellite,
    SatelliteGround,
}

impl ChannelKind {
    pub fn noise_sources(self) -> &'static [&'static str] {
        match self {
            ChannelKind::Fibre => &["vibrations", "heat"],
            ChannelKind::Underwater => &["precipitates", "small organisms", "heat currents"],
            ChannelKind::InterSatellite => &["radiation"],
            ChannelKind::SatelliteGround => &["atmospheric aerosols", "atmospheric turbulence"],
        }
    }
}

/// One concrete channel of any family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum ChannelSpec {
    Fibre(FibreLink),
    Underwater(UnderwaterLink),
    InterSatellite(InterSatelliteLink),
    SatGround { link: SatGroundLink, wavelength_m: f64 },
}

impl ChannelSpec {
    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelSpec::Fibre(_) => ChannelKind::Fibre,
            ChannelSpec::Underwater(_) => ChannelKind::Underwater,
            ChannelSpec::InterSatellite(_) => ChannelKind::InterSatellite,
            ChannelSpec::SatGround { .. } => ChannelKind::SatelliteGround,
        }
    }

    pub fn transmittance(&self) -> Result<f64> {
        match self {
            ChannelSpec::Fibre(link) => fibre_transmittance(link),
            ChannelSpec::Underwater(link) => link.transmittance(),
            ChannelSpec::InterSatellite(link) => intersat_transmittance(link),
            ChannelSpec::SatGround { link, wavelength_m } => {
                Ok(satground_transmittance(link, *wavelength_m)?.transmittance)
            }
        }
    }
}
