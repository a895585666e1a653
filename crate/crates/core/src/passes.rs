//! Satellite passes: elevation histograms, link capacities, relay
//! feasibility and inter-satellite chain planning.

use crate::channels::{satground_transmittance, SatGroundLink};
use crate::math::{acos, asin, atan2, cos, sin, sqrt, DEG};
use crate::skr::{skr_finite, ProtocolParams, SecurityParams};
use crate::{Error, Result, EARTH_RADIUS_KM};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub const DEFAULT_BIN_DEG: f64 = 1.0;

/// Chord midpoints must stay above this altitude, in km.
pub const MIN_CHORD_ALTITUDE_KM: f64 = 20.0;

pub const PASS_CSV_HEADER: &str = "time_s,elevation_deg";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PassSample {
    pub time_s: f64,
    pub elevation_deg: f64,
}

/// Elevation of one satellite above one ground node over time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PassProfile {
    samples: Vec<PassSample>,
    altitude_km: f64,
    ground_node: String,
}

fn sample_error(index: usize, sample: &PassSample, previous: Option<&PassSample>) -> Option<String> {
    if !sample.time_s.is_finite() {
        return Some(format!("time {} is not finite", sample.time_s));
    }
    if !(sample.elevation_deg > 0.0 && sample.elevation_deg <= 90.0) {
        return Some(format!("elevation {} is outside (0, 90]", sample.elevation_deg));
    }
    match previous {
        Some(p) if !(sample.time_s > p.time_s) => Some(format!(
            "time {} does not increase (sample {}, previous time {})",
            sample.time_s, index, p.time_s
        )),
        _ => None,
    }
}

impl PassProfile {
    /// Validates samples: at least two, strictly increasing times, elevations in `(0, 90]`.
    pub fn new(samples: Vec<PassSample>, altitude_km: f64, ground_node: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Parse {
                line: 0,
                message: format!("a pass needs at least two samples, got {}", samples.len()),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            if let Some(message) = sample_error(i, s, i.checked_sub(1).map(|j| &samples[j])) {
                return Err(Error::Parse { line: 0, message });
            }
        }
        check_altitude(altitude_km)?;
        Ok(Self {
            samples,
            altitude_km,
            ground_node: ground_node.into(),
        })
    }

    /// Parses `time_s,elevation_deg` text. Errors carry 1-based line numbers.
    pub fn parse_csv(text: &str, altitude_km: f64, ground_node: impl Into<String>) -> Result<Self> {
        check_altitude(altitude_km)?;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, h)) if h == PASS_CSV_HEADER => {}
            Some((n, h)) => {
                return Err(Error::Parse {
                    line: n,
                    message: format!("expected header `{PASS_CSV_HEADER}`, found `{h}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty pass file".to_string(),
                })
            }
        }
        let mut samples: Vec<PassSample> = Vec::new();
        let mut last_line = 1;
        for (n, line) in lines {
            last_line = n;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(t), Some(e), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: n,
                    message: format!("expected two comma-separated fields, found `{line}`"),
                });
            };
            let parse = |field: &str, what: &str| {
                field.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: n,
                    message: format!("invalid {what} `{}`", field.trim()),
                })
            };
            let sample = PassSample {
                time_s: parse(t, "time")?,
                elevation_deg: parse(e, "elevation")?,
            };
            if let Some(message) = sample_error(samples.len(), &sample, samples.last()) {
                return Err(Error::Parse { line: n, message });
            }
            samples.push(sample);
        }
        if samples.len() < 2 {
            return Err(Error::Parse {
                line: last_line,
                message: format!("a pass needs at least two samples, got {}", samples.len()),
            });
        }
        Ok(Self {
            samples,
            altitude_km,
            ground_node: ground_node.into(),
        })
    }

    /// Renders the profile in the format read by [`PassProfile::parse_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(PASS_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.time_s, s.elevation_deg));
        }
        out
    }

    pub fn samples(&self) -> &[PassSample] {
        &self.samples
    }

    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }

    pub fn ground_node(&self) -> &str {
        &self.ground_node
    }

    pub fn start_s(&self) -> f64 {
        self.samples[0].time_s
    }

    pub fn end_s(&self) -> f64 {
        self.samples[self.samples.len() - 1].time_s
    }

    pub fn duration_s(&self) -> f64 {
        self.end_s() - self.start_s()
    }

    pub fn peak_elevation_deg(&self) -> f64 {
        self.samples.iter().map(|s| s.elevation_deg).fold(f64::MIN, f64::max)
    }

    pub fn max_sample_interval_s(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].time_s - w[0].time_s)
            .fold(0.0, f64::max)
    }

    /// The part of the pass inside `[start, end]`, with samples interpolated
    /// linearly at the cut points. `None` if less than a positive duration remains.
    pub fn clipped(&self, start_s: f64, end_s: f64) -> Option<Self> {
        let lo = start_s.max(self.start_s());
        let hi = end_s.min(self.end_s());
        if !(hi > lo) {
            return None;
        }
        let at = |t: f64| -> PassSample {
            let k = self
                .samples
                .partition_point(|s| s.time_s <= t)
                .clamp(1, self.samples.len() - 1);
            let (a, b) = (self.samples[k - 1], self.samples[k]);
            let f = (t - a.time_s) / (b.time_s - a.time_s);
            PassSample {
                time_s: t,
                elevation_deg: a.elevation_deg + f * (b.elevation_deg - a.elevation_deg),
            }
        };
        let mut samples = Vec::new();
        samples.push(at(lo));
        samples.extend(self.samples.iter().copied().filter(|s| s.time_s > lo && s.time_s < hi));
        samples.push(at(hi));
        Some(Self {
            samples,
            altitude_km: self.altitude_km,
            ground_node: self.ground_node.clone(),
        })
    }
}

fn check_altitude(altitude_km: f64) -> Result<()> {
    if !(altitude_km > 0.0) || !altitude_km.is_finite() {
        return Err(Error::domain("satellite altitude_km", altitude_km, "must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HistogramBin {
    pub lower_deg: f64,
    pub dwell_s: f64,
}

/// Time spent in each elevation bin. Only bins with dwell time are listed,
/// in increasing elevation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ElevationHistogram {
    pub bin_deg: f64,
    pub bins: Vec<HistogramBin>,
}

impl ElevationHistogram {
    pub fn total_dwell_s(&self) -> f64 {
        self.bins.iter().map(|b| b.dwell_s).sum()
    }

    /// Elevation at which a bin's SKR is evaluated: its centre, capped at 90°.
    pub fn center_deg(&self, bin: &HistogramBin) -> f64 {
        (bin.lower_deg + self.bin_deg / 2.0).min(90.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            bin_deg: self.bin_deg,
            bins: self
                .bins
                .iter()
                .map(|b| HistogramBin {
                    lower_deg: b.lower_deg,
                    dwell_s: b.dwell_s * factor,
                })
                .collect(),
        }
    }
}

/// Assigns each sample interval to the bin holding its midpoint elevation.
/// An elevation of exactly 90° on a bin edge goes to the bin below.
pub fn discretize_pass(profile: &PassProfile, bin_deg: f64) -> Result<ElevationHistogram> {
    if !(bin_deg > 0.0 && bin_deg <= 90.0) {
        return Err(Error::domain("bin_deg", bin_deg, "must lie in (0, 90]"));
    }
    let mut bins: Vec<(i64, f64)> = Vec::new();
    for w in profile.samples.windows(2) {
        let mid = 0.5 * (w[0].elevation_deg + w[1].elevation_deg);
        let mut index = libm::floor(mid / bin_deg) as i64;
        if index as f64 * bin_deg >= 90.0 {
            index -= 1;
        }
        let dt = w[1].time_s - w[0].time_s;
        match bins.binary_search_by_key(&index, |b| b.0) {
            Ok(k) => bins[k].1 += dt,
            Err(k) => bins.insert(k, (index, dt)),
        }
    }
    Ok(ElevationHistogram {
        bin_deg,
        bins: bins
            .into_iter()
            .map(|(i, dwell_s)| HistogramBin {
                lower_deg: i as f64 * bin_deg,
                dwell_s,
            })
            .collect(),
    })
}

/// `C = SKR·t`, or zero for a link without positive key rate.
pub fn link_capacity_static(skr_bps: f64, duration_s: f64) -> Result<f64> {
    if !(duration_s >= 0.0) {
        return Err(Error::domain("duration_s", duration_s, "must be >= 0"));
    }
    Ok(if skr_bps > 0.0 { skr_bps * duration_s } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CapacityBin {
    pub lower_deg: f64,
    pub center_deg: f64,
    pub dwell_s: f64,
    /// May be negative; such bins contribute nothing.
    pub skr_bps: f64,
    pub capacity_bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CapacityResult {
    pub bins: Vec<CapacityBin>,
    pub total_bits: f64,
    /// Share of the pass duration with positive SKR.
    pub usable_fraction: f64,
}

/// Sums `max(SKR, 0)·dwell` over the histogram, with `skr_at` giving the SKR
/// at a bin's centre elevation.
pub fn capacity_from_histogram<F>(hist: &ElevationHistogram, mut skr_at: F) -> Result<CapacityResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut bins = Vec::with_capacity(hist.bins.len());
    let mut total_bits = 0.0;
    let mut usable = 0.0;
    for b in &hist.bins {
        let center_deg = hist.center_deg(b);
        let skr_bps = skr_at(center_deg)?;
        let capacity_bits = link_capacity_static(skr_bps, b.dwell_s)?;
        if skr_bps > 0.0 {
            usable += b.dwell_s;
        }
        total_bits += capacity_bits;
        bins.push(CapacityBin {
            lower_deg: b.lower_deg,
            center_deg,
            dwell_s: b.dwell_s,
            skr_bps,
            capacity_bits,
        });
    }
    let total_dwell = hist.total_dwell_s();
    Ok(CapacityResult {
        bins,
        total_bits,
        usable_fraction: if total_dwell > 0.0 { usable / total_dwell } else { 0.0 },
    })
}

/// Capacity of one pass at 1° resolution. The template supplies direction,
/// optics and atmosphere; its elevation and satellite altitude are replaced by
/// each bin's centre and the profile's altitude.
pub fn link_capacity_pass(
    profile: &PassProfile,
    template: &SatGroundLink,
    wavelength_m: f64,
    proto: &ProtocolParams,
    sec: &SecurityParams,
) -> Result<CapacityResult> {
    link_capacity_pass_binned(profile, template, wavelength_m, proto, sec, DEFAULT_BIN_DEG)
}

pub fn link_capacity_pass_binned(
    profile: &PassProfile,
    template: &SatGroundLink,
    wavelength_m: f64,
    proto: &ProtocolParams,
    sec: &SecurityParams,
    bin_deg: f64,
) -> Result<CapacityResult> {
    let hist = discretize_pass(profile, bin_deg)?;
    capacity_from_histogram(&hist, |elevation_deg| {
        let link = SatGroundLink {
            elevation_deg,
            satellite_altitude_km: profile.altitude_km,
            ..*template
        };
        let t = satground_transmittance(&link, wavelength_m)?.transmittance;
        Ok(skr_finite(proto, sec, t, None)?.skr)
    })
}

/// Outcome of the two relay conditions on an ordered list of hop capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RelayVerdict {
    /// Every hop after the first has strictly more capacity than the first.
    pub no_bottleneck: bool,
    /// Every hop has strictly more capacity than the key.
    pub exceeds_key: bool,
    pub feasible: bool,
    /// First hop violating the bottleneck condition.
    pub first_bottleneck_hop: Option<usize>,
    /// First hop whose capacity does not exceed the key size.
    pub first_short_hop: Option<usize>,
}

pub fn check_relay_feasibility(capacities: &[f64], key_size_bits: f64) -> Result<RelayVerdict> {
    let Some(&first) = capacities.first() else {
        return Err(Error::Graph("feasibility needs at least one hop".to_string()));
    };
    if !(key_size_bits > 0.0) {
        return Err(Error::domain("key_size", key_size_bits, "must be positive"));
    }
    let first_bottleneck_hop = capacities.iter().skip(1).position(|&c| !(c > first)).map(|i| i + 1);
    let first_short_hop = capacities.iter().position(|&c| !(c > key_size_bits));
    let no_bottleneck = first_bottleneck_hop.is_none();
    let exceeds_key = first_short_hop.is_none();
    Ok(RelayVerdict {
        no_bottleneck,
        exceeds_key,
        feasible: no_bottleneck && exceeds_key,
        first_bottleneck_hop,
        first_short_hop,
    })
}

/// Central angle in degrees between two satellites at altitude `h_s` joined by
/// a chord of length `L` (both km).
pub fn chain_central_angle(link_km: f64, altitude_km: f64) -> Result<f64> {
    if !(link_km >= 0.0) {
        return Err(Error::domain("link distance", link_km, "must be >= 0"));
    }
    if !(altitude_km >= 0.0) {
        return Err(Error::domain("altitude_km", altitude_km, "must be >= 0"));
    }
    let arg = link_km / (2.0 * (EARTH_RADIUS_KM + altitude_km));
    if arg > 1.0 {
        return Err(Error::Geometry(format!(
            "a {link_km} km chord does not fit in the orbit at {altitude_km} km"
        )));
    }
    Ok(2.0 * asin(arg) / DEG)
}

/// Altitude of the midpoint of a chord spanning central angle `φ`.
pub fn chain_min_altitude(central_angle_deg: f64, altitude_km: f64) -> f64 {
    (EARTH_RADIUS_KM + altitude_km) * cos(central_angle_deg * DEG / 2.0) - EARTH_RADIUS_KM
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainPlan {
    pub ground_angle_deg: f64,
    pub altitude_km: f64,
    pub link_km: f64,
    pub central_angle_deg: f64,
    pub min_links: u64,
    pub max_links: u64,
    pub min_satellites: u64,
    pub max_satellites: u64,
    /// Time each link must be held to carry the required capacity.
    pub min_dwell_s: f64,
    pub min_chord_altitude_km: f64,
    /// Chords stay above [`MIN_CHORD_ALTITUDE_KM`].
    pub valid: bool,
}

pub fn plan_intersat_chain(
    ground_angle_deg: f64,
    altitude_km: f64,
    link_km: f64,
    required_capacity_bits: f64,
    intersat_skr_bps: f64,
) -> Result<ChainPlan> {
    if !(0.0..=180.0).contains(&ground_angle_deg) {
        return Err(Error::domain(
            "ground central angle",
            ground_angle_deg,
            "must lie in [0, 180]",
        ));
    }
    if !(intersat_skr_bps > 0.0) {
        return Err(Error::domain(
            "inter-satellite SKR",
            intersat_skr_bps,
            "must be positive",
        ));
    }
    if !(required_capacity_bits >= 0.0) {
        return Err(Error::domain(
            "required capacity",
            required_capacity_bits,
            "must be >= 0",
        ));
    }
    let phi = chain_central_angle(link_km, altitude_km)?;
    if !(phi > 0.0) {
        return Err(Error::Geometry("links of zero length cannot span a chain".to_string()));
    }
    let spans = ground_angle_deg / phi;
    let min_links = libm::floor(spans) as u64;
    let max_links = libm::ceil(spans) as u64;
    let min_chord_altitude_km = chain_min_altitude(phi, altitude_km);
    Ok(ChainPlan {
        ground_angle_deg,
        altitude_km,
        link_km,
        central_angle_deg: phi,
        min_links,
        max_links,
        min_satellites: min_links + 1,
        max_satellites: max_links + 1,
        min_dwell_s: required_capacity_bits / intersat_skr_bps,
        min_chord_altitude_km,
        valid: min_chord_altitude_km >= MIN_CHORD_ALTITUDE_KM,
    })
}

/// Great-circle central angle between two points, in degrees.
pub fn ground_central_angle(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64> {
    for (name, lat) in [("latitude", lat1), ("latitude", lat2)] {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::domain(name, lat, "must lie in [-90, 90]"));
        }
    }
    for lon in [lon1, lon2] {
        if !lon.is_finite() {
            return Err(Error::domain("longitude", lon, "must be finite"));
        }
    }
    // Vincenty's form stays accurate near 0° and near antipodes.
    let (p1, p2) = (lat1 * DEG, lat2 * DEG);
    let dl = (lon2 - lon1) * DEG;
    let east = cos(p2) * sin(dl);
    let north = cos(p1) * sin(p2) - sin(p1) * cos(p2) * cos(dl);
    let cross = sqrt(east * east + north * north);
    let dot = sin(p1) * sin(p2) + cos(p1) * cos(p2) * cos(dl);
    Ok(atan2(cross, dot) / DEG)
}

/// Idealised pass over a spherical Earth: the sub-satellite point moves at
/// a constant angular rate along a great circle whose closest approach gives
/// `peak_elevation_deg`, and the pass starts and ends at `edge_elevation_deg`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SyntheticPass {
    pub altitude_km: f64,
    pub peak_elevation_deg: f64,
    pub edge_elevation_deg: f64,
    pub duration_s: f64,
    pub step_s: f64,
    pub start_s: f64,
    pub ground_node: String,
}

/// Earth-central angle between the ground station and the sub-satellite
/// point when the satellite is seen at elevation `el`.
fn central_angle_at(elevation_deg: f64, r_ratio: f64) -> f64 {
    let el = elevation_deg * DEG;
    core::f64::consts::FRAC_PI_2 - el - asin(r_ratio * cos(el))
}

fn elevation_at(central_angle: f64, r_ratio: f64) -> f64 {
    atan2(cos(central_angle) - r_ratio, sin(central_angle)) / DEG
}

impl SyntheticPass {
    pub fn generate(&self) -> Result<PassProfile> {
        check_altitude(self.altitude_km)?;
        if !(self.edge_elevation_deg > 0.0
            && self.edge_elevation_deg < self.peak_elevation_deg
            && self.peak_elevation_deg <= 90.0)
        {
            return Err(Error::domain(
                "peak_elevation_deg",
                self.peak_elevation_deg,
                "need 0 < edge elevation < peak elevation <= 90",
            ));
        }
        if !(self.duration_s > 0.0 && self.step_s > 0.0) {
            return Err(Error::domain(
                "duration_s",
                self.duration_s,
                "duration and step must be positive",
            ));
        }
        let r_ratio = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + self.altitude_km);
        let psi_min = central_angle_at(self.peak_elevation_deg, r_ratio).max(0.0);
        let psi_edge = central_angle_at(self.edge_elevation_deg, r_ratio);
        let half = self.duration_s / 2.0;
        let rate = acos((cos(psi_edge) / cos(psi_min)).min(1.0)) / half;
        let steps = libm::ceil(self.duration_s / self.step_s - 1e-9) as usize;
        let mut samples = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let t = (i as f64 * self.step_s).min(self.duration_s);
            let psi = acos((cos(psi_min) * cos(rate * (t - half))).clamp(-1.0, 1.0));
            let el = elevation_at(psi, r_ratio).clamp(self.edge_elevation_deg.min(1e-9), 90.0);
            samples.push(PassSample {
                time_s: self.start_s + t,
                elevation_deg: el,
            });
        }
        samples.dedup_by(|b, a| b.time_s <= a.time_s);
        PassProfile::new(samples, self.altitude_km, self.ground_node.clone())
    }
}
