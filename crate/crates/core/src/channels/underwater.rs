use super::{Flagged, ModelWarning};
use crate::math::{exp, pow};
use crate::{Error, Result};

/// Reference water types with absorption `a`, scattering `b` and extinction
/// `c` at 520 nm, all in m⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WaterType {
    PureSeaWater,
    ClearOceanWater,
    CoastalOceanWater,
    TurbidHarbourWater,
}

impl WaterType {
    pub const ALL: [WaterType; 4] = [
        WaterType::PureSeaWater,
        WaterType::ClearOceanWater,
        WaterType::CoastalOceanWater,
        WaterType::TurbidHarbourWater,
    ];

    /// `(a, b, c)` in m⁻¹ at 520 nm.
    pub fn coefficients(self) -> (f64, f64, f64) {
        match self {
            WaterType::PureSeaWater => (0.0405, 0.0025, 0.043),
            WaterType::ClearOceanWater => (0.114, 0.037, 0.151),
            WaterType::CoastalOceanWater => (0.179, 0.219, 0.398),
            WaterType::TurbidHarbourWater => (0.366, 1.824, 2.190),
        }
    }

    pub fn extinction(self) -> f64 {
        self.coefficients().2
    }

    pub fn name(self) -> &'static str {
        match self {
            WaterType::PureSeaWater => "pure_sea_water",
            WaterType::ClearOceanWater => "clear_ocean_water",
            WaterType::CoastalOceanWater => "coastal_ocean_water",
            WaterType::TurbidHarbourWater => "turbid_harbour_water",
        }
    }
}

/// Where the beam extinction coefficient comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum Extinction {
    /// Extinction `c` in m⁻¹.
    Coefficient(f64),
    Preset(WaterType),
    /// Chlorophyll model with user-supplied pure-water and chlorophyll-specific
    /// absorption at the operating wavelength.
    Chlorophyll {
        wavelength_nm: f64,
        concentration_mg_m3: f64,
        water_absorption: f64,
        chlorophyll_absorption: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct UnderwaterLink {
    pub length_m: f64,
    pub extinction: Extinction,
}

impl UnderwaterLink {
    pub fn extinction_coefficient(&self) -> Result<f64> {
        match self.extinction {
            Extinction::Coefficient(c) => Ok(c),
            Extinction::Preset(water) => Ok(water.extinction()),
            Extinction::Chlorophyll {
                wavelength_nm,
                concentration_mg_m3,
                water_absorption,
                chlorophyll_absorption,
            } => Ok(underwater_extinction(
                wavelength_nm,
                concentration_mg_m3,
                water_absorption,
                chlorophyll_absorption,
            )?
            .value
            .total),
        }
    }

    pub fn transmittance(&self) -> Result<f64> {
        underwater_transmittance(self.extinction_coefficient()?, self.length_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderwaterExtinction {
    pub absorption: f64,
    pub scattering: f64,
    pub total: f64,
}

/// Absorption and scattering from chlorophyll concentration.
///
/// `a = [a_w + 0.06·a_c·C^0.65]·[1 + 0.2·exp(−0.014(λ − 440))]` and
/// `b = 0.3·(550/λ)·C^0.62`, with `λ` in nm. Results outside 400–700 nm carry
/// a warning.
pub fn underwater_extinction(
    wavelength_nm: f64,
    concentration: f64,
    water_absorption: f64,
    chlorophyll_absorption: f64,
) -> Result<Flagged<UnderwaterExtinction>> {
    if !(wavelength_nm > 0.0) {
        return Err(Error::domain("wavelength_nm", wavelength_nm, "must be positive"));
    }
    if !(concentration >= 0.0) {
        return Err(Error::domain(
            "chlorophyll concentration",
            concentration,
            "must be >= 0",
        ));
    }
    if !(water_absorption >= 0.0) || !(chlorophyll_absorption >= 0.0) {
        return Err(Error::domain(
            "absorption coefficient",
            water_absorption.min(chlorophyll_absorption),
            "must be >= 0",
        ));
    }
    let absorption = (water_absorption + 0.06 * chlorophyll_absorption * pow(concentration, 0.65))
        * (1.0 + 0.2 * exp(-0.014 * (wavelength_nm - 440.0)));
    let scattering = 0.3 * (550.0 / wavelength_nm) * pow(concentration, 0.62);
    let warning = if (400.0..=700.0).contains(&wavelength_nm) {
        None
    } else {
        Some(ModelWarning::WavelengthOutsideVisible)
    };
    Ok(Flagged::new(
        UnderwaterExtinction {
            absorption,
            scattering,
            total: absorption + scattering,
        },
        warning,
    ))
}

/// Beer's law `T = exp(−c·z)`.
pub fn underwater_transmittance(extinction: f64, length_m: f64) -> Result<f64> {
    if !(extinction > 0.0) {
        return Err(Error::domain("extinction", extinction, "must be positive"));
    }
    if !(length_m >= 0.0) {
        return Err(Error::domain("length_m", length_m, "must be >= 0"));
    }
    Ok(exp(-extinction * length_m))
}
