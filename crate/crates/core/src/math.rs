//! Floating-point helpers that work without `std`.

use crate::{Error, Result};

pub(crate) use libm::{acos, asin, atan, atan2, cos, exp, log, log10, log2, pow, sin, sqrt};

pub(crate) const DEG: f64 = core::f64::consts::PI / 180.0;

/// Converts a loss in dB to the power ratio `P_T / P_R`.
pub fn db_to_ratio(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

/// Converts a loss in dB to a transmittance `P_R / P_T`.
pub fn db_to_transmittance(db: f64) -> f64 {
    pow(10.0, -db / 10.0)
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * log10(ratio)
}

/// Inverse error function on `(-1, 1)`.
///
/// Starts from Giles' single-precision polynomial and polishes with two
/// Newton steps against `libm::erf`, which brings the result to within a few
/// ulp. Returns `±inf` at `±1` and NaN outside `[-1, 1]`.
pub fn erf_inv(y: f64) -> f64 {
    if y.is_nan() || !(-1.0..=1.0).contains(&y) {
        return f64::NAN;
    }
    if y == 1.0 {
        return f64::INFINITY;
    }
    if y == -1.0 {
        return f64::NEG_INFINITY;
    }
    if y == 0.0 {
        return 0.0;
    }
    let mut w = -log((1.0 - y) * (1.0 + y));
    let mut p;
    if w < 5.0 {
        w -= 2.5;
        p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        p = 1.501_409_41 + p * w;
    } else {
        w = sqrt(w) - 3.0;
        p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        p = 2.832_976_82 + p * w;
    }
    let mut x = p * y;
    let two_over_sqrt_pi = 2.0 / sqrt(core::f64::consts::PI);
    for _ in 0..2 {
        let slope = two_over_sqrt_pi * exp(-x * x);
        if slope == 0.0 {
            break;
        }
        x -= (libm::erf(x) - y) / slope;
    }
    x
}

/// Composite Simpson quadrature with interval halving.
///
/// Doubles the interval count from 16 until two successive estimates differ by
/// less than `rel_tol` (relative), giving up after `max_intervals`.
pub fn simpson_adaptive<F>(f: F, a: f64, b: f64, rel_tol: f64, max_intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let mut n = 2usize;
    let mut h = (b - a) / n as f64;
    let ends = f(a) + f(b);
    let mut even = 0.0;
    let mut odd = f(a + h);
    let mut estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    loop {
        if n >= max_intervals {
            return Err(Error::Numerical(alloc::format!(
                "Simpson quadrature did not reach relative tolerance {rel_tol:e} within {max_intervals} intervals"
            )));
        }
        n *= 2;
        h /= 2.0;
        even += odd;
        odd = 0.0;
        for i in 0..n / 2 {
            odd += f(a + (2 * i + 1) as f64 * h);
        }
        let next = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        if !next.is_finite() {
            return Err(Error::Numerical("integrand is not finite".into()));
        }
        let change = libm::fabs(next - estimate);
        let converged = change <= rel_tol * libm::fabs(next) || (next == 0.0 && estimate == 0.0);
        estimate = next;
        if n >= 16 && converged {
            return Ok(estimate);
        }
    }
}
