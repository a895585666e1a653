//! Scenario documents.
//!
//! A scenario is one JSON object. Every section is optional except the one
//! the invoked command needs; unknown fields are rejected. Schema errors name
//! the offending field path, e.g. `skr.channel.fibre.attenuation_db_per_km`.

use std::fs;
use std::path::{Path, PathBuf};

use cvqkd_core::channels::{
    ApertureModel, Atmosphere, Direction, Extinction, InterSatelliteLink, OpticsParams, SatGroundLink, WaterType,
};
use cvqkd_core::netgraph::{Link, Network, Node, Objective};
use cvqkd_core::skr::{ProtocolParams, SecurityParams};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_WAVELENGTH_M: f64 = 1550e-9;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub protocol: ProtocolParams,
    #[serde(default)]
    pub security: SecurityParams,
    #[serde(default)]
    pub skr: Option<SkrSection>,
    #[serde(default)]
    pub capacity: Option<CapacitySection>,
    #[serde(default)]
    pub chain: Option<ChainSection>,
    #[serde(default)]
    pub route: Option<RouteSection>,
    /// Directory that relative file references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkrSection {
    pub channel: SweepChannel,
    pub grid: Grid,
}

/// Channel family swept by `skr`. The grid variable `x` is the fibre length
/// in km, the underwater path in m, the inter-satellite distance in km or the
/// satellite elevation in degrees.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepChannel {
    Fibre {
        #[serde(default = "default_fibre_attenuation")]
        attenuation_db_per_km: f64,
    },
    Underwater {
        water: WaterSpec,
    },
    InterSatellite {
        receiver_radius_m: f64,
        beam_waist_m: f64,
        #[serde(default = "default_wavelength")]
        wavelength_m: f64,
    },
    SatelliteGround(SatGroundSpec),
}

fn default_fibre_attenuation() -> f64 {
    cvqkd_core::channels::DEFAULT_FIBRE_ATTENUATION_DB_PER_KM
}

fn default_wavelength() -> f64 {
    DEFAULT_WAVELENGTH_M
}

/// Either `start`/`stop`/`step` or an explicit `values` list.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub values: Option<Vec<f64>>,
}

impl Grid {
    /// Points `start + i·step` up to `stop`; empty when `stop < start`.
    pub fn points(&self) -> Result<Vec<f64>> {
        match (self.start, self.stop, self.step, &self.values) {
            (None, None, None, Some(values)) => {
                if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::Invalid(format!("skr.grid.values: {v} is not finite")));
                }
                Ok(values.clone())
            }
            (Some(start), Some(stop), Some(step), None) => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(CliError::Invalid(format!("skr.grid.step: {step} must be positive")));
                }
                if !start.is_finite() || !stop.is_finite() {
                    return Err(CliError::Invalid("skr.grid: start and stop must be finite".into()));
                }
                if stop < start {
                    return Ok(Vec::new());
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if n > 10_000_000 {
                    return Err(CliError::Invalid(format!("skr.grid: {n} points is too many")));
                }
                Ok((0..n).map(|i| start + i as f64 * step).collect())
            }
            _ => Err(CliError::Invalid(
                "skr.grid: give either start, stop and step, or values".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum AtmospherePreset {
    #[serde(rename = "good_atmosphere")]
    Good,
    #[serde(rename = "bad_atmosphere")]
    Bad,
}

/// A named preset or an explicit atmosphere.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AtmosphereSpec {
    Preset(AtmospherePreset),
    Custom(Atmosphere),
}

impl Default for AtmosphereSpec {
    fn default() -> Self {
        AtmosphereSpec::Preset(AtmospherePreset::Good)
    }
}

impl AtmosphereSpec {
    pub fn resolve(self) -> Atmosphere {
        match self {
            AtmosphereSpec::Preset(AtmospherePreset::Good) => Atmosphere::good(),
            AtmosphereSpec::Preset(AtmospherePreset::Bad) => Atmosphere::bad(),
            AtmosphereSpec::Custom(a) => a,
        }
    }
}

/// A named water type, e.g. `clear_ocean_water`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct WaterPreset(pub WaterType);

impl TryFrom<String> for WaterPreset {
    type Error = String;

    fn try_from(name: String) -> std::result::Result<Self, String> {
        WaterType::ALL
            .iter()
            .find(|w| w.name() == name)
            .map(|&w| WaterPreset(w))
            .ok_or_else(|| {
                let known: Vec<&str> = WaterType::ALL.iter().map(|w| w.name()).collect();
                format!("unknown water preset `{name}`, expected one of {}", known.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WaterSpec {
    Preset(WaterPreset),
    Custom(Extinction),
}

impl WaterSpec {
    pub fn extinction(self) -> Extinction {
        match self {
            WaterSpec::Preset(WaterPreset(w)) => Extinction::Preset(w),
            WaterSpec::Custom(e) => e,
        }
    }
}

/// Optics fields to change from the direction's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsOverride {
    pub tx_diameter_m: Option<f64>,
    pub rx_diameter_m: Option<f64>,
    pub tx_efficiency: Option<f64>,
    pub rx_efficiency: Option<f64>,
    pub pointing_loss: Option<f64>,
    pub outage_probability: Option<f64>,
}

impl OpticsOverride {
    pub fn apply(&self, mut base: OpticsParams) -> OpticsParams {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut base.tx_diameter_m, self.tx_diameter_m);
        set(&mut base.rx_diameter_m, self.rx_diameter_m);
        set(&mut base.tx_efficiency, self.tx_efficiency);
        set(&mut base.rx_efficiency, self.rx_efficiency);
        set(&mut base.pointing_loss, self.pointing_loss);
        set(&mut base.outage_probability, self.outage_probability);
        base
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatGroundSpec {
    pub satellite_altitude_km: f64,
    #[serde(default)]
    pub ogs_altitude_km: f64,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub optics: OpticsOverride,
    #[serde(default)]
    pub atmosphere: AtmosphereSpec,
    #[serde(default)]
    pub aperture_model: ApertureModel,
    #[serde(default = "default_wavelength")]
    pub wavelength_m: f64,
}

impl SatGroundSpec {
    pub fn link(&self, elevation_deg: f64) -> SatGroundLink {
        SatGroundLink {
            elevation_deg,
            satellite_altitude_km: self.satellite_altitude_km,
            ogs_altitude_km: self.ogs_altitude_km,
            direction: self.direction,
            optics: self.optics.apply(OpticsParams::for_direction(self.direction)),
            atmosphere: self.atmosphere.resolve(),
            aperture_model: self.aperture_model,
        }
    }

    fn validate(&self, at: &str) -> Result<()> {
        // Zenith geometry exercises every check that does not depend on
        // the elevation itself.
        cvqkd_core::channels::satground_transmittance(&self.link(90.0), self.wavelength_m)
            .map(|_| ())
            .map_err(CliError::invalid(at))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySection {
    /// Pass CSV, relative to the scenario file. `--pass` overrides it.
    #[serde(default)]
    pub pass: Option<PathBuf>,
    #[serde(default = "default_ground_node")]
    pub ground_node: String,
    pub link: SatGroundSpec,
    #[serde(default = "default_bin")]
    pub bin_deg: f64,
}

fn default_ground_node() -> String {
    "ogs".to_string()
}

fn default_bin() -> f64 {
    cvqkd_core::passes::DEFAULT_BIN_DEG
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersatOptics {
    pub receiver_radius_m: f64,
    pub beam_waist_m: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_m: f64,
}

/// Inter-satellite chain between two ground stations. Give the ground
/// central angle directly or the two station positions, and either the link
/// SKR or the link optics to derive it from.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(default)]
    pub ground_angle_deg: Option<f64>,
    #[serde(default)]
    pub endpoints: Option<[GeoPoint; 2]>,
    pub altitude_km: f64,
    pub link_km: f64,
    pub required_capacity_bits: f64,
    #[serde(default)]
    pub link_skr_bps: Option<f64>,
    #[serde(default)]
    pub link_optics: Option<IntersatOptics>,
}

impl ChainSection {
    pub fn intersat_link(&self, optics: &IntersatOptics) -> InterSatelliteLink {
        InterSatelliteLink {
            distance_m: self.link_km * 1e3,
            receiver_radius_m: optics.receiver_radius_m,
            beam_waist_m: optics.beam_waist_m,
            wavelength_m: optics.wavelength_m,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

/// Random graph of fibre-linked ground stations drawn from `--seed`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomNetwork {
    pub nodes: usize,
    pub edge_probability: f64,
    pub max_bits: f64,
    #[serde(default)]
    pub untrusted_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteSection {
    #[serde(default)]
    pub network: Option<NetworkSpec>,
    #[serde(default)]
    pub random_network: Option<RandomNetwork>,
    pub window: Window,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub targets: Option<Vec<String>>,
    #[serde(default)]
    pub key_size_bits: Option<f64>,
    #[serde(default)]
    pub objective: Objective,
}

impl RouteSection {
    pub fn build_network(&self, seed: u64) -> Result<Network> {
        match (&self.network, &self.random_network) {
            (Some(spec), None) => {
                Network::new(spec.nodes.clone(), spec.links.clone()).map_err(CliError::invalid("route.network"))
            }
            (None, Some(r)) => crate::commands::random_network(r, seed),
            _ => Err(CliError::Invalid(
                "route: give exactly one of network or random_network".into(),
            )),
        }
    }
}

/// Parses scenario text; `file` labels error messages.
pub fn parse(text: &str, file: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        file: file.to_string(),
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut scenario = parse(&text, &path.display().to_string())?;
    scenario.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if let Some(cap) = &scenario.capacity {
        if let Some(pass) = &cap.pass {
            let full = scenario.base_dir.join(pass);
            if !full.is_file() {
                return Err(CliError::Invalid(format!(
                    "capacity.pass: {} does not exist",
                    full.display()
                )));
            }
        }
    }
    Ok(scenario)
}

impl Scenario {
    /// Checks every section present, before any computation.
    pub fn validate(&self) -> Result<()> {
        self.protocol.validate().map_err(CliError::invalid("protocol"))?;
        self.security.validate().map_err(CliError::invalid("security"))?;
        if let Some(skr) = &self.skr {
            skr.grid.points()?;
            match &skr.channel {
                SweepChannel::Fibre { attenuation_db_per_km } => {
                    if !(*attenuation_db_per_km >= 0.0) {
                        return Err(CliError::Invalid(format!(
                            "skr.channel.fibre.attenuation_db_per_km: {attenuation_db_per_km} must be >= 0"
                        )));
                    }
                }
                SweepChannel::Underwater { water } => {
                    cvqkd_core::channels::UnderwaterLink {
                        length_m: 0.0,
                        extinction: water.extinction(),
                    }
                    .transmittance()
                    .map_err(CliError::invalid("skr.channel.underwater.water"))?;
                }
                SweepChannel::InterSatellite {
                    receiver_radius_m,
                    beam_waist_m,
                    wavelength_m,
                } => {
                    cvqkd_core::channels::intersat_transmittance(&InterSatelliteLink {
                        distance_m: 0.0,
                        receiver_radius_m: *receiver_radius_m,
                        beam_waist_m: *beam_waist_m,
                        wavelength_m: *wavelength_m,
                    })
                    .map_err(CliError::invalid("skr.channel.inter_satellite"))?;
                }
                SweepChannel::SatelliteGround(spec) => spec.validate("skr.channel.satellite_ground")?,
            }
        }
        if let Some(cap) = &self.capacity {
            cap.link.validate("capacity.link")?;
            if !(cap.bin_deg > 0.0 && cap.bin_deg <= 90.0) {
                return Err(CliError::Invalid(format!(
                    "capacity.bin_deg: {} must lie in (0, 90]",
                    cap.bin_deg
                )));
            }
        }
        if let Some(chain) = &self.chain {
            match (chain.ground_angle_deg, chain.endpoints) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => {
                    return Err(CliError::Invalid(
                        "chain: give exactly one of ground_angle_deg or endpoints".into(),
                    ))
                }
            }
            match (chain.link_skr_bps, &chain.link_optics) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => {
                    return Err(CliError::Invalid(
                        "chain: give exactly one of link_skr_bps or link_optics".into(),
                    ))
                }
            }
        }
        if let Some(route) = &self.route {
            if !(route.window.end_s >= route.window.start_s) {
                return Err(CliError::Invalid("route.window: end_s precedes start_s".into()));
            }
            if let Some(k) = route.key_size_bits {
                if !(k > 0.0) {
                    return Err(CliError::Invalid(format!("route.key_size_bits: {k} must be positive")));
                }
            }
            if let Some(r) = &route.random_network {
                if !(1..=64).contains(&r.nodes) {
                    return Err(CliError::Invalid(
                        "route.random_network.nodes: must lie in [1, 64]".into(),
                    ));
                }
                for (name, p) in [
                    ("edge_probability", r.edge_probability),
                    ("untrusted_probability", r.untrusted_probability),
                ] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(CliError::Invalid(format!(
                            "route.random_network.{name}: {p} must lie in [0, 1]"
                        )));
                    }
                }
                if !(r.max_bits > 0.0) || !r.max_bits.is_finite() {
                    return Err(CliError::Invalid(
                        "route.random_network.max_bits: must be positive".into(),
                    ));
                }
            }
            if route.network.is_some() {
                route.build_network(0)?;
            }
        }
        Ok(())
    }
}
