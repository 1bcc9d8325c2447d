//! Interference bench I: scan |K_ab - K_semiclassical| over (h, alpha) grids
//! and produce table rows ready for CSV emission.

use alloc::vec::Vec;

use core::f64::consts::TAU;

use crate::propagator::{
    ab_propagator, de_broglie, semiclassical, to_polar, AlphaFlux, ExperimentGeometry, PhysParams,
    PropagatorError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Exp1Error {
    #[error("invalid scan grid: {0}")]
    InvalidGrid(&'static str),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// Cartesian scan specification over solenoid offsets and flux parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub h_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub params: PhysParams,
    pub length_l: f64,
    pub m_max: u32,
    /// Divide both propagators by the common prefactor mu/(2 pi i hbar T).
    pub normalize: bool,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<(), Exp1Error> {
        if self.h_values.is_empty() || self.alpha_values.is_empty() {
            return Err(Exp1Error::InvalidGrid("axes must be non-empty"));
        }
        if self.h_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Exp1Error::InvalidGrid("h axis must be strictly increasing"));
        }
        if self.alpha_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Exp1Error::InvalidGrid("alpha axis must be strictly increasing"));
        }
        if self.h_values.iter().any(|h| !(*h >= 0.0)) {
            return Err(Exp1Error::InvalidGrid("h values must be >= 0"));
        }
        if !(self.length_l > 0.0) {
            return Err(Exp1Error::InvalidGrid("L must be positive"));
        }
        self.params.validate()?;
        Ok(())
    }
}

/// One scan point; `abs_re_diff` and `abs_im_diff` are the componentwise
/// magnitudes of K_ab - K_semi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub h: f64,
    pub alpha: f64,
    pub re_ab: f64,
    pub im_ab: f64,
    pub re_semi: f64,
    pub im_semi: f64,
    pub abs_re_diff: f64,
    pub abs_im_diff: f64,
    pub quantum_region: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Rows in (h, alpha) lexicographic order, exactly |h| x |alpha| of them.
    pub rows: Vec<ScanRow>,
    /// Offset at which the quantum_region flag flips.
    pub boundary_h: f64,
}

/// Evaluate one (h, alpha) grid point.
pub fn eval_point(grid: &ScanGrid, h: f64, alpha: f64) -> Result<ScanRow, Exp1Error> {
    let geom = ExperimentGeometry { length_l: grid.length_l, dist_h: h };
    let pp = to_polar(&geom);
    let a = AlphaFlux { alpha };
    let mut ab = ab_propagator(&grid.params, &pp, a, grid.m_max)?;
    let mut semi = semiclassical(&grid.params, &pp, a);
    if grid.normalize {
        let pref = grid.params.prefactor();
        ab /= pref;
        semi /= pref;
    }
    let boundary = classical_quantum_boundary(&grid.params, 0.5 * grid.length_l);
    Ok(ScanRow {
        h,
        alpha,
        re_ab: ab.re,
        im_ab: ab.im,
        re_semi: semi.re,
        im_semi: semi.im,
        abs_re_diff: (ab.re - semi.re).abs(),
        abs_im_diff: (ab.im - semi.im).abs(),
        quantum_region: h < boundary,
    })
}

/// Dense scan over the full grid, rows ordered by (h, alpha).
pub fn run_scan(grid: &ScanGrid) -> Result<ScanResult, Exp1Error> {
    grid.validate()?;
    let mut rows = Vec::with_capacity(grid.h_values.len() * grid.alpha_values.len());
    for &h in &grid.h_values {
        for &alpha in &grid.alpha_values {
            rows.push(eval_point(grid, h, alpha)?);
        }
    }
    Ok(ScanResult { rows, boundary_h: classical_quantum_boundary(&grid.params, 0.5 * grid.length_l) })
}

/// The offset below which propagation is quantum: lambda / (2 pi) with the
/// de Broglie wavelength evaluated at radius r.
pub fn classical_quantum_boundary(p: &PhysParams, r: f64) -> f64 {
    de_broglie(p, r) / TAU
}
