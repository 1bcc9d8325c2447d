//! Thin reporting layer over the power-law fit: window selection over the
//! scaling region and the dimension summary used by the pipelines.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::specfun::{fit_power_law, hausdorff_from_exponent, PowerLawFit, SpecFunError};

/// How the fit window over the (scale, length) points is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    /// Use every point.
    All,
    /// Contiguous window of >= 3 points (in ascending-scale order) that
    /// minimizes fit stderr per point; ties break toward smaller scales.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fit: PowerLawFit,
    pub d_h: f64,
    pub d_h_stderr: f64,
    /// Inclusive index range into the ascending-scale ordering of the input.
    pub window: (usize, usize),
    pub points_used: usize,
}

impl FitReport {
    pub fn summary_line(&self) -> String {
        format!(
            "L0={:.8e} exponent={:.8e}\u{b1}{:.8e} dH={:.8e}\u{b1}{:.8e} window=[{},{}]",
            self.fit.amplitude,
            self.fit.exponent,
            self.fit.stderr_exponent,
            self.d_h,
            self.d_h_stderr,
            self.window.0,
            self.window.1
        )
    }
}

pub fn fit_with_window(points: &[(f64, f64)], policy: WindowPolicy) -> Result<FitReport, SpecFunError> {
    if points.len() < 3 {
        return Err(SpecFunError::FitInput("window fit needs at least 3 points"));
    }
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let full = fit_power_law(&sorted)?;
    let (fit, window) = match policy {
        WindowPolicy::All => (full, (0, sorted.len() - 1)),
        WindowPolicy::Auto => {
            let mut best_fit = full;
            let mut best_win = (0, sorted.len() - 1);
            let mut best_score = score(&best_fit);
            for lo in 0..sorted.len() {
                for hi in (lo + 2)..sorted.len() {
                    let f = fit_power_law(&sorted[lo..=hi])?;
                    let s = score(&f);
                    if s < best_score {
                        best_score = s;
                        best_fit = f;
                        best_win = (lo, hi);
                    }
                }
            }
            (best_fit, best_win)
        }
    };

    let d_h = hausdorff_from_exponent(fit.exponent);
    let d_h_stderr = fit.stderr_exponent;
    let points_used = window.1 - window.0 + 1;
    Ok(FitReport { fit, d_h, d_h_stderr, window, points_used })
}

fn score(fit: &PowerLawFit) -> f64 {
    fit.stderr_exponent / fit.n_points as f64
}
