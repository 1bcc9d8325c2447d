//! Unweighted least squares of log(length) on log(scale) and the map from
//! the resulting critical exponent to a Hausdorff dimension.

use alloc::vec::Vec;

use num_traits::Float;

use super::SpecFunError;

/// Result of a power-law fit L(eps) = amplitude * eps^(-exponent).
///
/// The sign convention: a positive exponent means the length grows as the
/// scale shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub stderr_exponent: f64,
    pub n_points: usize,
}

/// Ordinary least squares in log-log space over (scale, length) pairs.
///
/// No window selection happens here; the caller decides which points
/// belong to the scaling region.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, SpecFunError> {
    if points.len() < 2 {
        return Err(SpecFunError::FitInput("need at least 2 points"));
    }
    for &(s, l) in points {
        if !(s > 0.0) || !s.is_finite() {
            return Err(SpecFunError::FitInput("scales must be positive and finite"));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(SpecFunError::FitInput("lengths must be positive and finite"));
        }
    }
    let mut scales: Vec<f64> = points.iter().map(|p| p.0).collect();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if scales.windows(2).any(|w| w[0] == w[1]) {
        return Err(SpecFunError::FitInput("duplicate scales"));
    }

    let n = points.len() as f64;
    let t: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let tbar = t.iter().sum::<f64>() / n;
    let ybar = y.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|&ti| (ti - tbar) * (ti - tbar)).sum();
    let sxy: f64 = t.iter().zip(&y).map(|(&ti, &yi)| (ti - tbar) * (yi - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * tbar;

    let ssr: f64 = t
        .iter()
        .zip(&y)
        .map(|(&ti, &yi)| {
            let r = yi - (intercept + slope * ti);
            r * r
        })
        .sum();
    let stderr = if points.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };

    Ok(PowerLawFit {
        amplitude: intercept.exp(),
        exponent: -slope,
        stderr_exponent: stderr,
        n_points: points.len(),
    })
}

/// d_H = exponent + 1.
pub fn hausdorff_from_exponent(exponent: f64) -> f64 {
    exponent + 1.0
}
