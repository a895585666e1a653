//! Secret key rates for Gaussian-modulated coherent-state CVQKD.
//!
//! Everything here is a pure function of its inputs. Variances are in
//! shot-noise units (SNU); information quantities are bits per symbol unless
//! a name says otherwise.

use crate::math::{atan, log10, log2, pow, sqrt};
use crate::{Error, Result};

/// Tolerance on the uncertainty relation and on negative Holevo values.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Table of the empirical reconciliation-efficiency fit `c1^(c2·s) − c3^(c4·s)`.
const BETA_MLC_MSD: [f64; 4] = [0.9655, 1.507e-4, -4.696e-2, -0.2238];
const BETA_MD: [f64; 4] = [8.250e-2, 0.1834, 0.9821, -2.815e-5];

/// Frame error rate fit `½[1 + m1·atan(m2·s + m3)]`.
pub const FER_M1: f64 = 0.8218;
pub const FER_M2: f64 = -19.46;
pub const FER_M3: f64 = -298.1;

/// Default laser repetition rate, symbols per second.
pub const DEFAULT_REPETITION_RATE_HZ: f64 = 50e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

/// Information reconciliation scheme whose empirical efficiency curve is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Reconciliation {
    /// Multidimensional reconciliation.
    Md,
    /// Multilevel coding with multistage decoding.
    MlcMsd,
}

impl Reconciliation {
    fn beta_coefficients(self) -> [f64; 4] {
        match self {
            Reconciliation::Md => BETA_MD,
            Reconciliation::MlcMsd => BETA_MLC_MSD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BetaMode {
    /// SNR-dependent fit for the chosen reconciliation scheme.
    Empirical,
    /// A constant efficiency in `[0, 1]`.
    Fixed(f64),
}

/// How a negative base in the efficiency fit is raised to a real power.
///
/// The MLC-MSD coefficient `c3` is negative, which has no real power in
/// general.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NegativeBase {
    /// `|c|^e`. Keeps the MLC-MSD curve inside `[0, 1]` for negative SNR and
    /// rising towards one as the SNR falls.
    #[default]
    Magnitude,
    /// `sign(c)·|c|^e`. With the published MLC-MSD coefficients this pins the
    /// clamped efficiency at one for every SNR.
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ProtocolParams {
    /// Alice's modulation variance `V_A`, SNU.
    pub modulation_variance: f64,
    /// Excess noise `ξ` referred to the channel input, SNU.
    pub excess_noise: f64,
    pub detection: Detection,
    pub reconciliation: Reconciliation,
    pub beta_mode: BetaMode,
    /// Symbols per second.
    pub repetition_rate_hz: f64,
    pub negative_base: NegativeBase,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            modulation_variance: 5.0,
            excess_noise: 0.03,
            detection: Detection::Heterodyne,
            reconciliation: Reconciliation::Md,
            beta_mode: BetaMode::Empirical,
            repetition_rate_hz: DEFAULT_REPETITION_RATE_HZ,
            negative_base: NegativeBase::Magnitude,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.modulation_variance > 0.0) || !self.modulation_variance.is_finite() {
            return Err(Error::domain(
                "modulation_variance",
                self.modulation_variance,
                "must be positive",
            ));
        }
        if !(self.excess_noise >= 0.0) || !self.excess_noise.is_finite() {
            return Err(Error::domain("excess_noise", self.excess_noise, "must be >= 0"));
        }
        if !(self.repetition_rate_hz > 0.0) || !self.repetition_rate_hz.is_finite() {
            return Err(Error::domain(
                "repetition_rate_hz",
                self.repetition_rate_hz,
                "must be positive",
            ));
        }
        if let BetaMode::Fixed(beta) = self.beta_mode {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::domain("beta", beta, "fixed efficiency must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Finite-size security parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SecurityParams {
    /// Discretisation parameter `d`.
    pub discretisation: u32,
    /// Smoothing parameter `ε_s`.
    pub smoothing: f64,
    /// Security parameter `ε`.
    pub security: f64,
    /// Total number of exchanged symbols `N`.
    pub block_size: f64,
    /// Fraction of symbols kept for parameter estimation. Recorded only; it
    /// does not enter the key rate.
    pub estimation_fraction: Option<f64>,
}

impl Default for SecurityParams {
    fn default() -> Self {
        Self {
            discretisation: 5,
            smoothing: 2e-10,
            security: 1e-9,
            block_size: 1e11,
            estimation_fraction: None,
        }
    }
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing > 0.0 && self.smoothing < 1.0) {
            return Err(Error::domain("smoothing", self.smoothing, "must lie in (0, 1)"));
        }
        if !(self.security > 0.0 && self.security < 1.0) {
            return Err(Error::domain("security", self.security, "must lie in (0, 1)"));
        }
        if !(self.block_size >= 1.0) || !self.block_size.is_finite() {
            return Err(Error::domain("block_size", self.block_size, "must be >= 1"));
        }
        if let Some(v) = self.estimation_fraction {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::domain("estimation_fraction", v, "must lie in [0, 1)"));
            }
        }
        Ok(())
    }
}

/// Two-mode covariance matrix `[[V·I, Z·σz], [Z·σz, W·I]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CovarianceMatrix {
    v: f64,
    w: f64,
    z: f64,
}

impl CovarianceMatrix {
    /// Builds a matrix from its three entries, rejecting unphysical ones.
    pub fn from_entries(v: f64, w: f64, z: f64) -> Result<Self> {
        let unphysical = Error::Unphysical { v, w, z };
        if !(v.is_finite() && w.is_finite() && z.is_finite()) {
            return Err(unphysical);
        }
        if v < 1.0 - PHYSICALITY_TOL || w < 1.0 - PHYSICALITY_TOL {
            return Err(unphysical);
        }
        if v * w - z * z < 1.0 - PHYSICALITY_TOL {
            return Err(unphysical);
        }
        Ok(Self { v, w, z })
    }

    /// Alice's mode variance.
    pub fn v(&self) -> f64 {
        self.v
    }

    /// Bob's mode variance.
    pub fn w(&self) -> f64 {
        self.w
    }

    /// Correlation coefficient.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn determinant_block(&self) -> f64 {
        self.v * self.w - self.z * self.z
    }
}

/// A fitted value clamped to `[0, 1]`, keeping the raw fit for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl Clamped {
    fn unit_interval(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self {
            value,
            raw,
            clamped: value != raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkrResult {
    pub transmittance: f64,
    pub snr_linear: f64,
    /// `-inf` when the SNR is zero.
    pub snr_db: f64,
    pub beta: f64,
    pub beta_clamped: bool,
    pub fer: f64,
    pub fer_clamped: bool,
    pub mutual_info: f64,
    pub holevo: f64,
    pub delta_n_privacy: f64,
    /// Key bits per symbol, possibly negative.
    pub skr_per_symbol: f64,
    /// Key bits per second, possibly negative.
    pub skr: f64,
    pub positive: bool,
}

fn check_transmittance(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("transmittance", t, "must lie in [0, 1]"));
    }
    Ok(())
}

fn check_modulation(va: f64) -> Result<()> {
    if !(va > 0.0) || !va.is_finite() {
        return Err(Error::domain("modulation_variance", va, "must be positive"));
    }
    Ok(())
}

/// Correlation coefficient `Z = sqrt(T·(V_A² + 2V_A))` for Gaussian modulation.
pub fn correlation_coefficient_gm(va: f64, t: f64) -> Result<f64> {
    check_modulation(va)?;
    check_transmittance(t)?;
    Ok(sqrt(t * (va * va + 2.0 * va)))
}

pub fn build_covariance(va: f64, t: f64, xi: f64) -> Result<CovarianceMatrix> {
    check_modulation(va)?;
    check_transmittance(t)?;
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::domain("excess_noise", xi, "must be >= 0"));
    }
    let z = correlation_coefficient_gm(va, t)?;
    CovarianceMatrix::from_entries(va + 1.0, 1.0 + t * va + t * xi, z)
}

/// `T·V_A / (2 + T·ξ)`.
pub fn snr_linear(va: f64, t: f64, xi: f64) -> Result<f64> {
    check_modulation(va)?;
    check_transmittance(t)?;
    if !(xi >= 0.0) {
        return Err(Error::domain("excess_noise", xi, "must be >= 0"));
    }
    Ok(t * va / (2.0 + t * xi))
}

/// SNR in dB; `-inf` at zero SNR.
pub fn snr_db(va: f64, t: f64, xi: f64) -> Result<f64> {
    let snr = snr_linear(va, t, xi)?;
    Ok(linear_to_db(snr))
}

fn linear_to_db(snr: f64) -> f64 {
    if snr <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * log10(snr)
    }
}

/// Mutual information between Alice and Bob, bits per symbol.
pub fn mutual_information(snr: f64, detection: Detection) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::domain("snr", snr, "must be >= 0"));
    }
    let het = log2(1.0 + snr);
    Ok(match detection {
        Detection::Heterodyne => het,
        Detection::Homodyne => 0.5 * het,
    })
}

/// Von Neumann entropy of a thermal mode with mean photon number `x`.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("mean photon number", x, "must be >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * log2(x + 1.0) - x * log2(x))
}

/// Symplectic eigenvalues `(λ1, λ2)` with `λ1 ≥ λ2`.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Result<(f64, f64)> {
    let (v, w, z) = (cov.v, cov.w, cov.z);
    let delta = v * v + w * w - 2.0 * z * z;
    let det = cov.determinant_block();
    let mut disc = delta * delta - 4.0 * det * det;
    if disc < 0.0 {
        if disc < -PHYSICALITY_TOL * (delta * delta).max(1.0) {
            return Err(Error::Numerical(alloc::format!(
                "negative discriminant {disc:e} in symplectic eigenvalues"
            )));
        }
        disc = 0.0;
    }
    let root = sqrt(disc);
    let l1 = sqrt((delta + root) / 2.0);
    let l2 = sqrt(((delta - root) / 2.0).max(0.0));
    if l2 < 1.0 - PHYSICALITY_TOL {
        return Err(Error::Numerical(alloc::format!(
            "symplectic eigenvalue {l2} below the vacuum level"
        )));
    }
    Ok((l1, l2))
}

fn thermal_entropy(lambda: f64) -> Result<f64> {
    let x = (lambda - 1.0) / 2.0;
    if x < 0.0 {
        if x < -PHYSICALITY_TOL {
            return Err(Error::Numerical(alloc::format!(
                "eigenvalue {lambda} below the vacuum level"
            )));
        }
        return Ok(0.0);
    }
    g_function(x)
}

/// Holevo bound `S_BE` on Eve's information, bits per symbol.
pub fn holevo_bound(cov: &CovarianceMatrix, detection: Detection) -> Result<f64> {
    let (l1, l2) = symplectic_eigenvalues(cov)?;
    let (v, w, z) = (cov.v, cov.w, cov.z);
    let l3 = match detection {
        Detection::Heterodyne => v - z * z / (w + 1.0),
        Detection::Homodyne => {
            let inner = v * (v - z * z / w);
            if inner < 0.0 {
                return Err(Error::Numerical(alloc::format!(
                    "negative argument {inner:e} under the homodyne λ3 root"
                )));
            }
            sqrt(inner)
        }
    };
    let s = thermal_entropy(l1)? + thermal_entropy(l2)? - thermal_entropy(l3)?;
    if s < 0.0 {
        if s < -PHYSICALITY_TOL {
            return Err(Error::Numerical(alloc::format!("Holevo bound {s:e} is negative")));
        }
        return Ok(0.0);
    }
    Ok(s)
}

/// `β·I_AB − S_BE`, which may be negative.
pub fn skr_asymptotic(beta: f64, mutual_info: f64, holevo: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain("beta", beta, "must lie in [0, 1]"));
    }
    Ok(beta * mutual_info - holevo)
}

fn fit_power(base: f64, exponent: f64, policy: NegativeBase) -> f64 {
    let magnitude = pow(base.abs(), exponent);
    match policy {
        NegativeBase::Signed if base < 0.0 => -magnitude,
        _ => magnitude,
    }
}

/// Empirical reconciliation efficiency at `snr_db`, clamped to `[0, 1]`.
pub fn beta_empirical(snr_db: f64, scheme: Reconciliation) -> Clamped {
    beta_empirical_with(snr_db, scheme, NegativeBase::default())
}

pub fn beta_empirical_with(snr_db: f64, scheme: Reconciliation, policy: NegativeBase) -> Clamped {
    let [c1, c2, c3, c4] = scheme.beta_coefficients();
    let raw = fit_power(c1, c2 * snr_db, policy) - fit_power(c3, c4 * snr_db, policy);
    Clamped::unit_interval(raw)
}

/// Empirical frame error rate at `snr_db`, clamped to `[0, 1]`.
pub fn fer_empirical(snr_db: f64) -> Clamped {
    let raw = 0.5 * (1.0 + FER_M1 * atan(FER_M2 * snr_db + FER_M3));
    Clamped::unit_interval(raw)
}

/// Finite-size penalty `δn_privacy`, bits per symbol.
///
/// The last term is `(4·ε_s·d / (ε·√N)) / √N` exactly as it is usually
/// typeset. At practical block sizes it is below 1e-10.
pub fn delta_n_privacy(sec: &SecurityParams) -> f64 {
    let d = sec.discretisation as f64;
    let root_n = sqrt(sec.block_size);
    let eps_s = sec.smoothing;
    let eps = sec.security;
    let t1 = (d + 1.0) * (d + 1.0) / root_n;
    let t2 = 4.0 * (d + 1.0) * sqrt(log2(2.0 / eps_s)) / root_n;
    let t3 = 2.0 * log2(2.0 / (eps * eps * eps_s)) / root_n;
    let t4 = (4.0 * eps_s * d / (eps * root_n)) / root_n;
    t1 + t2 + t3 + t4
}

/// Finite-size secret key rate for a channel of transmittance `t`.
///
/// `xi_override` replaces the protocol's excess noise when given.
pub fn skr_finite(proto: &ProtocolParams, sec: &SecurityParams, t: f64, xi_override: Option<f64>) -> Result<SkrResult> {
    proto.validate()?;
    sec.validate()?;
    let va = proto.modulation_variance;
    let xi = xi_override.unwrap_or(proto.excess_noise);
    let cov = build_covariance(va, t, xi)?;
    let snr = snr_linear(va, t, xi)?;
    let snr_db = linear_to_db(snr);
    let mutual_info = mutual_information(snr, proto.detection)?;
    let holevo = holevo_bound(&cov, proto.detection)?;
    let beta = match proto.beta_mode {
        BetaMode::Fixed(b) => Clamped {
            value: b,
            raw: b,
            clamped: false,
        },
        BetaMode::Empirical => beta_empirical_with(snr_db, proto.reconciliation, proto.negative_base),
    };
    let fer = fer_empirical(snr_db);
    let delta_n = delta_n_privacy(sec);
    let per_symbol = (1.0 - fer.value) * beta.value * mutual_info - holevo - delta_n;
    let skr = proto.repetition_rate_hz * per_symbol;
    Ok(SkrResult {
        transmittance: t,
        snr_linear: snr,
        snr_db,
        beta: beta.value,
        beta_clamped: beta.clamped,
        fer: fer.value,
        fer_clamped: fer.clamped,
        mutual_info,
        holevo,
        delta_n_privacy: delta_n,
        skr_per_symbol: per_symbol,
        skr,
        positive: skr > 0.0,
    })
}
