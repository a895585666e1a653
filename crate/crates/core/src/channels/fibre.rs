use crate::math::pow;
use crate::{Error, Result};

/// Standard single-mode fibre at 1550 nm, i.e. `T = 10^(−0.02·d)`.
pub const DEFAULT_FIBRE_ATTENUATION_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FibreLink {
    pub length_km: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_attenuation"))]
    pub attenuation_db_per_km: f64,
}

#[cfg(feature = "serde")]
fn default_attenuation() -> f64 {
    DEFAULT_FIBRE_ATTENUATION_DB_PER_KM
}

impl FibreLink {
    pub fn new(length_km: f64) -> Self {
        Self {
            length_km,
            attenuation_db_per_km: DEFAULT_FIBRE_ATTENUATION_DB_PER_KM,
        }
    }
}

/// `T = 10^(−α·d/10)`.
pub fn fibre_transmittance(link: &FibreLink) -> Result<f64> {
    if !(link.length_km >= 0.0) || !link.length_km.is_finite() {
        return Err(Error::domain("length_km", link.length_km, "must be >= 0"));
    }
    if !(link.attenuation_db_per_km > 0.0) {
        return Err(Error::domain(
            "attenuation_db_per_km",
            link.attenuation_db_per_km,
            "must be positive",
        ));
    }
    Ok(pow(10.0, -link.attenuation_db_per_km * link.length_km / 10.0))
}
