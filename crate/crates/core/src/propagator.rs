//! Free, winding-sector, Aharonov-Bohm and semi-classical propagators in two
//! dimensions for a charged particle passing an idealized flux line, plus the
//! mapping from the bench geometry (source-detector separation L, solenoid
//! offset h) to polar coordinates about the solenoid.

use core::f64::consts::{PI, TAU};

use num_traits::Float;

use crate::quad;
use crate::specfun::{self, SpecFunError};
use crate::Complex;

/// Default partial-wave cutoff for the flux propagator sums.
pub const DEFAULT_M_MAX: u32 = 50;
/// Default truncation of the order integral in [`winding_sector_free`].
pub const DEFAULT_LAMBDA_CUT: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagatorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("order-integral quadrature did not converge (estimated residual {residual:e})")]
    QuadratureNotConverged { residual: f64 },
}

/// Mass, units and total flight time governing every propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub mass_mu: f64,
    pub hbar: f64,
    pub light_c: f64,
    pub charge_q: f64,
    pub time_t: f64,
}

impl PhysParams {
    pub fn new(
        mass_mu: f64,
        hbar: f64,
        light_c: f64,
        charge_q: f64,
        time_t: f64,
    ) -> Result<Self, PropagatorError> {
        let p = Self { mass_mu, hbar, light_c, charge_q, time_t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PropagatorError> {
        let pos = [self.mass_mu, self.hbar, self.light_c, self.time_t];
        if pos.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(PropagatorError::InvalidParams(
                "mass, hbar, c and T must be positive and finite",
            ));
        }
        if !self.charge_q.is_finite() {
            return Err(PropagatorError::InvalidParams("charge must be finite"));
        }
        Ok(())
    }

    /// Dimensionless bench set: mu = hbar = c = 1, T = 10, and q = 2 pi so
    /// that one unit of flux corresponds to alpha = 1.
    pub fn bench() -> Self {
        Self { mass_mu: 1.0, hbar: 1.0, light_c: 1.0, charge_q: TAU, time_t: 10.0 }
    }

    /// Electron-scale set in fm units (hbar = c = 1): mass 0.259e-2 fm^-1,
    /// flight time 1 s = 3e23 fm.
    pub fn electron_fm() -> Self {
        Self { mass_mu: 0.259e-2, hbar: 1.0, light_c: 1.0, charge_q: TAU, time_t: 3.0e23 }
    }

    /// Flux-to-phase coupling q / (2 pi hbar c).
    pub fn coupling(&self) -> f64 {
        self.charge_q / (TAU * self.hbar * self.light_c)
    }

    /// Common dimensionful prefactor mu / (2 pi i hbar T).
    pub fn prefactor(&self) -> Complex {
        Complex::new(0.0, -self.mass_mu / (TAU * self.hbar * self.time_t))
    }
}

/// Propagation endpoints in polar coordinates about the solenoid, angles on
/// the branch (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPair {
    pub r_in: f64,
    pub theta_in: f64,
    pub r_fi: f64,
    pub theta_fi: f64,
}

impl PolarPair {
    pub fn new(r_in: f64, theta_in: f64, r_fi: f64, theta_fi: f64) -> Result<Self, PropagatorError> {
        if !(r_in >= 0.0) || !(r_fi >= 0.0) || !r_in.is_finite() || !r_fi.is_finite() {
            return Err(PropagatorError::InvalidParams("radii must be >= 0 and finite"));
        }
        if !theta_in.is_finite() || !theta_fi.is_finite() {
            return Err(PropagatorError::InvalidParams("angles must be finite"));
        }
        Ok(Self {
            r_in,
            theta_in: wrap_angle(theta_in),
            r_fi,
            theta_fi: wrap_angle(theta_fi),
        })
    }

    /// theta_fi - theta_in on the fixed branch; lies in (-2 pi, 2 pi).
    pub fn delta_theta(&self) -> f64 {
        self.theta_fi - self.theta_in
    }
}

/// Wrap an angle onto (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut t = a - TAU * (a / TAU).floor();
    if t > PI {
        t -= TAU;
    }
    t
}

/// Bench geometry: straight-line source-detector distance L, solenoid at
/// perpendicular distance h from that line, equidistant from both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentGeometry {
    pub length_l: f64,
    pub dist_h: f64,
}

impl ExperimentGeometry {
    pub fn new(length_l: f64, dist_h: f64) -> Result<Self, PropagatorError> {
        if !(length_l > 0.0) || !length_l.is_finite() {
            return Err(PropagatorError::InvalidParams("L must be positive"));
        }
        if !(dist_h >= 0.0) || !dist_h.is_finite() {
            return Err(PropagatorError::InvalidParams("h must be >= 0"));
        }
        Ok(Self { length_l, dist_h })
    }
}

/// Dimensionless flux parameter alpha = q phi / (2 pi hbar c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaFlux {
    pub alpha: f64,
}

/// Solenoid at the origin, endpoints at (-L/2, h) and (+L/2, h). Then
/// r = r' = sqrt(h^2 + L^2/4) and theta' - theta = 2 atan(2h/L) - pi.
pub fn to_polar(geom: &ExperimentGeometry) -> PolarPair {
    let r = geom.dist_h.hypot(0.5 * geom.length_l);
    let theta_in = geom.dist_h.atan2(-0.5 * geom.length_l);
    let theta_fi = geom.dist_h.atan2(0.5 * geom.length_l);
    PolarPair { r_in: r, theta_in, r_fi: r, theta_fi }
}

/// Exact free propagator in D = 2; depends only on the chord between the
/// endpoints.
pub fn free_exact(p: &PhysParams, pp: &PolarPair) -> Complex {
    let chord2 = pp.r_fi * pp.r_fi + pp.r_in * pp.r_in
        - 2.0 * pp.r_fi * pp.r_in * pp.delta_theta().cos();
    let phase = 0.5 * p.mass_mu * chord2 / (p.hbar * p.time_t);
    p.prefactor() * Complex::from_polar(1.0, phase)
}

/// Partial-wave expansion of the free propagator, truncated at |m| <= m_max.
/// Converges to [`free_exact`] as m_max grows.
pub fn free_partial_wave(p: &PhysParams, pp: &PolarPair, m_max: u32) -> Result<Complex, PropagatorError> {
    partial_wave_sum(p, pp, 0.0, m_max)
}

/// Flux-line propagator: partial-wave sum with Bessel order |m - alpha|.
pub fn ab_propagator(
    p: &PhysParams,
    pp: &PolarPair,
    a: AlphaFlux,
    m_max: u32,
) -> Result<Complex, PropagatorError> {
    if !a.alpha.is_finite() {
        return Err(PropagatorError::InvalidParams("alpha must be finite"));
    }
    partial_wave_sum(p, pp, a.alpha, m_max)
}

/// Free propagator times the flux phase along the classical (zero-winding)
/// trajectory.
pub fn semiclassical(p: &PhysParams, pp: &PolarPair, a: AlphaFlux) -> Complex {
    free_exact(p, pp) * Complex::from_polar(1.0, a.alpha * pp.delta_theta())
}

/// Shared kernel for the m-sums. The orders |m - alpha| fall on two ladders
/// with fixed fractional part, which a single batched downward recurrence
/// serves per ladder.
fn partial_wave_sum(p: &PhysParams, pp: &PolarPair, alpha: f64, m_max: u32) -> Result<Complex, PropagatorError> {
    p.validate()?;
    if alpha.abs() > 1.0e6 || m_max > 1_000_000 {
        return Err(PropagatorError::InvalidParams("alpha or m_max too large for the partial-wave sum"));
    }
    let x = p.mass_mu * pp.r_in * pp.r_fi / (p.hbar * p.time_t);
    let dth = pp.delta_theta();
    let mm = m_max as i64;
    let fl = alpha.floor();
    let g = alpha - fl;
    let fl = fl as i64;

    // ladder A: m <= fl, order = g + (fl - m); ladder B: m > fl, order = (1-g) + (m-fl-1)
    let a_top = fl.min(mm);
    let batch_a = if a_top >= -mm {
        let count = (fl + mm + 1).max(0) as usize;
        specfun::bessel_j_batch(g, count, x)?
    } else {
        alloc::vec::Vec::new()
    };
    let b_bot = (fl + 1).max(-mm);
    let batch_b = if b_bot <= mm {
        let count = (mm - fl).max(0) as usize;
        specfun::bessel_j_batch(1.0 - g, count, x)?
    } else {
        alloc::vec::Vec::new()
    };

    let phase_a0 = quadrant_phase_frac(g);
    let phase_b0 = quadrant_phase_frac(1.0 - g);

    let mut sum = Complex::new(0.0, 0.0);
    for m in -mm..=mm {
        let (order_phase, j) = if m <= fl {
            let k = (fl - m) as usize;
            (phase_a0 * int_quadrant(k), batch_a[k])
        } else {
            let k = (m - fl - 1) as usize;
            (phase_b0 * int_quadrant(k), batch_b[k])
        };
        sum += Complex::from_polar(1.0, m as f64 * dth) * order_phase * j;
    }

    let quad_phase = 0.5 * p.mass_mu * (pp.r_in * pp.r_in + pp.r_fi * pp.r_fi) / (p.hbar * p.time_t);
    Ok(p.prefactor() * Complex::from_polar(1.0, quad_phase) * sum)
}

/// exp(-i pi nu / 2) for fractional nu in [0, 1].
fn quadrant_phase_frac(nu: f64) -> Complex {
    if nu == 0.0 {
        Complex::new(1.0, 0.0)
    } else if nu == 1.0 {
        Complex::new(0.0, -1.0)
    } else {
        let a = 0.5 * PI * nu;
        Complex::new(a.cos(), -a.sin())
    }
}

/// (-i)^k exactly.
fn int_quadrant(k: usize) -> Complex {
    match k % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, -1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, 1.0),
    }
}

/// Free propagator restricted to one winding sector: the order integral
/// int dlambda exp(i lambda Theta) K~(lambda) with Theta = theta'-theta + 2 pi n_w,
/// truncated at |lambda| <= lambda_cut.
pub fn winding_sector_free(
    p: &PhysParams,
    pp: &PolarPair,
    n_w: i32,
    lambda_cut: f64,
) -> Result<Complex, PropagatorError> {
    p.validate()?;
    if !(lambda_cut > 0.0) || !lambda_cut.is_finite() {
        return Err(PropagatorError::InvalidParams("lambda_cut must be positive"));
    }
    let x = p.mass_mu * pp.r_in * pp.r_fi / (p.hbar * p.time_t);
    let big_theta = pp.delta_theta() + TAU * n_w as f64;

    // folding the symmetric integral onto lambda >= 0:
    // 2 cos(lambda Theta) exp(-i pi lambda / 2) J_lambda(x)
    let integrand = |lam: f64| -> Complex {
        let j = specfun::bessel_j(lam, x).unwrap_or(f64::NAN);
        let arg = 0.5 * PI * lam;
        Complex::new(arg.cos(), -arg.sin()) * (2.0 * (lam * big_theta).cos() * j)
    };
    let out = quad::integrate_adaptive(&integrand, 0.0, lambda_cut, 1e-12);
    if !out.value.re.is_finite() || !out.value.im.is_finite() {
        return Err(PropagatorError::Domain("order integrand evaluation failed"));
    }
    if out.residual > 1e-7 * (1.0 + out.value.norm()) {
        return Err(PropagatorError::QuadratureNotConverged { residual: out.residual });
    }
    let quad_phase = 0.5 * p.mass_mu * (pp.r_in * pp.r_in + pp.r_fi * pp.r_fi) / (p.hbar * p.time_t);
    Ok(p.prefactor() * Complex::from_polar(1.0, quad_phase) * out.value)
}

/// Differential cross section for scattering off the flux line,
/// (1/2 pi k) sin^2(pi alpha) / sin^2(theta/2).
pub fn ab_cross_section(theta: f64, k: f64, a: AlphaFlux) -> Result<f64, PropagatorError> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(PropagatorError::Domain("theta must lie in (0, 2 pi)"));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(PropagatorError::Domain("wave number must be positive"));
    }
    let s = (PI * a.alpha).sin();
    let d = (0.5 * theta).sin();
    Ok(s * s / (d * d) / (TAU * k))
}

/// De Broglie wavelength pi hbar T / (mu r) of a particle that covers radius
/// r in time T/2 (velocity 2r/T). Caller guarantees r > 0.
pub fn de_broglie(p: &PhysParams, r: f64) -> f64 {
    debug_assert!(r > 0.0);
    PI * p.hbar * p.time_t / (p.mass_mu * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench_pair(h: f64) -> PolarPair {
        to_polar(&ExperimentGeometry { length_l: 2.0, dist_h: h })
    }

    #[test]
    fn polar_geometry_on_axis() {
        let pp = bench_pair(0.0);
        assert!((pp.r_in - 1.0).abs() < 1e-15);
        assert!((pp.r_fi - 1.0).abs() < 1e-15);
        assert!((pp.theta_in - PI).abs() < 1e-15);
        assert!(pp.theta_fi.abs() < 1e-15);
    }

    #[test]
    fn polar_geometry_unit_offset() {
        let pp = bench_pair(1.0);
        assert!((pp.r_in - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((pp.delta_theta() - (2.0 * 1.0f64.atan() - PI)).abs() < 1e-15);
        assert!((pp.delta_theta() + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn polar_geometry_far_limit() {
        let pp = bench_pair(1.0e9);
        assert!(pp.delta_theta().abs() < 1e-8);
    }

    #[test]
    fn free_exact_bench_value() {
        // sin(0.2)/(20 pi) - i cos(0.2)/(20 pi)
        let p = PhysParams::bench();
        let want_re = 0.2f64.sin() / (20.0 * PI);
        let want_im = -(0.2f64.cos()) / (20.0 * PI);
        for h in 0..=10 {
            let k = free_exact(&p, &bench_pair(h as f64));
            assert!((k.re - want_re).abs() < 1e-13 * want_re.abs().max(1e-3));
            assert!((k.im - want_im).abs() < 1e-13 * want_im.abs());
        }
    }

    #[test]
    fn free_exact_coincident_endpoints() {
        let p = PhysParams::bench();
        let pp = PolarPair::new(1.3, 0.4, 1.3, 0.4).unwrap();
        let k = free_exact(&p, &pp);
        let want = p.prefactor();
        assert!((k - want).norm() < 1e-15);
    }

    #[test]
    fn partial_wave_m0_single_term() {
        let p = PhysParams::bench();
        let pp = bench_pair(1.0); // delta theta = -pi/2
        let got = free_partial_wave(&p, &pp, 0).unwrap();
        let x = pp.r_in * pp.r_fi / 10.0;
        let want = p.prefactor()
            * Complex::from_polar(1.0, (pp.r_in * pp.r_in + pp.r_fi * pp.r_fi) / 20.0)
            * crate::specfun::bessel_j(0.0, x).unwrap();
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn partial_wave_converges_to_exact() {
        let p = PhysParams::bench();
        for h in [0.0, 2.5, 5.0, 10.0] {
            let pp = bench_pair(h);
            let exact = free_exact(&p, &pp);
            let pw = free_partial_wave(&p, &pp, 20).unwrap();
            assert!(
                (pw - exact).norm() < 1e-6,
                "h={h}: |pw - exact| = {:e}",
                (pw - exact).norm()
            );
        }
    }

    #[test]
    fn ab_alpha_zero_equals_free() {
        let p = PhysParams::bench();
        let pp = bench_pair(3.0);
        let ab = ab_propagator(&p, &pp, AlphaFlux { alpha: 0.0 }, 15).unwrap();
        let fr = free_partial_wave(&p, &pp, 15).unwrap();
        assert_eq!(ab, fr);
    }

    #[test]
    fn ab_integer_alpha_reduces_to_semiclassical() {
        let p = PhysParams::bench();
        for h in [0.0, 1.0, 4.0, 10.0] {
            let pp = bench_pair(h);
            for n in 0..=3 {
                let a = AlphaFlux { alpha: n as f64 };
                let ab = ab_propagator(&p, &pp, a, DEFAULT_M_MAX).unwrap();
                let sc = semiclassical(&p, &pp, a);
                assert!(
                    (ab - sc).norm() < 1e-6,
                    "h={h} n={n}: {:e}",
                    (ab - sc).norm()
                );
            }
        }
    }

    #[test]
    fn ab_alpha_shift_covariance() {
        let p = PhysParams::bench();
        let pp = bench_pair(2.0);
        for alpha in [0.2, 0.5, 1.7] {
            let k0 = ab_propagator(&p, &pp, AlphaFlux { alpha }, DEFAULT_M_MAX).unwrap();
            let k1 = ab_propagator(&p, &pp, AlphaFlux { alpha: alpha + 1.0 }, DEFAULT_M_MAX).unwrap();
            let want = Complex::from_polar(1.0, pp.delta_theta()) * k0;
            assert!((k1 - want).norm() < 1e-8, "alpha={alpha}: {:e}", (k1 - want).norm());
        }
    }

    #[test]
    fn semiclassical_properties() {
        let p = PhysParams::bench();
        let pp = bench_pair(1.0);
        let free = free_exact(&p, &pp);
        assert_eq!(semiclassical(&p, &pp, AlphaFlux { alpha: 0.0 }), free);
        for alpha in [0.3, 1.0, 2.6] {
            let sc = semiclassical(&p, &pp, AlphaFlux { alpha });
            assert!((sc.norm() - free.norm()).abs() < 1e-16 * free.norm().max(1.0));
        }
        // alpha = 1 at delta theta = -pi/2 multiplies by exp(-i pi/2)
        let sc = semiclassical(&p, &pp, AlphaFlux { alpha: 1.0 });
        let want = free * Complex::new(0.0, -1.0);
        assert!((sc - want).norm() < 1e-15);
    }

    #[test]
    fn winding_sector_depends_on_big_theta_only() {
        let p = PhysParams::bench();
        // Theta = 3pi/2 reached as (n_w = 0, dth = 3pi/2) and (n_w = 1, dth = -pi/2)
        let a = PolarPair::new(1.0, -3.0 * PI / 4.0, 1.0, 3.0 * PI / 4.0).unwrap();
        let b = PolarPair::new(1.0, PI / 4.0, 1.0, -PI / 4.0).unwrap();
        let ka = winding_sector_free(&p, &a, 0, 40.0).unwrap();
        let kb = winding_sector_free(&p, &b, 1, 40.0).unwrap();
        assert!((ka - kb).norm() < 1e-12);
    }

    #[test]
    fn winding_sectors_resum_to_free() {
        let p = PhysParams::bench();
        let pp = bench_pair(1.0);
        let mut sum = Complex::new(0.0, 0.0);
        // sector magnitudes fall off like 1/n^2, so the tail past |n| = 48
        // is a few 1e-5 of the total
        for n in -48..=48 {
            sum += winding_sector_free(&p, &pp, n, DEFAULT_LAMBDA_CUT).unwrap();
        }
        let exact = free_exact(&p, &pp);
        assert!((sum - exact).norm() < 1e-4, "resummation error {:e}", (sum - exact).norm());
    }

    #[test]
    fn winding_sectors_with_flux_weight_resum_to_ab() {
        let p = PhysParams::bench();
        let pp = bench_pair(1.0);
        let alpha = 0.5;
        let mut sum = Complex::new(0.0, 0.0);
        for n in -24..=24 {
            let theta_n = pp.delta_theta() + TAU * n as f64;
            sum += Complex::from_polar(1.0, alpha * theta_n)
                * winding_sector_free(&p, &pp, n, DEFAULT_LAMBDA_CUT).unwrap();
        }
        let ab = ab_propagator(&p, &pp, AlphaFlux { alpha }, DEFAULT_M_MAX).unwrap();
        assert!((sum - ab).norm() < 1e-4, "weighted resummation error {:e}", (sum - ab).norm());
    }

    #[test]
    fn cross_section_values() {
        let a0 = AlphaFlux { alpha: 0.0 };
        for theta in [0.5, PI, 4.0] {
            assert_eq!(ab_cross_section(theta, 2.0, a0).unwrap(), 0.0);
        }
        let half = AlphaFlux { alpha: 0.5 };
        let v = ab_cross_section(PI, 1.0, half).unwrap();
        assert!((v - 1.0 / TAU).abs() < 1e-15);
        // periodicity in alpha
        let a = ab_cross_section(1.0, 3.0, AlphaFlux { alpha: 0.3 }).unwrap();
        let b = ab_cross_section(1.0, 3.0, AlphaFlux { alpha: 1.3 }).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(ab_cross_section(0.0, 1.0, half).is_err());
    }

    #[test]
    fn de_broglie_anchors() {
        let p = PhysParams::bench();
        assert!((de_broglie(&p, 1.0) - 10.0 * PI).abs() < 1e-12);
        let e = PhysParams::electron_fm();
        let lambda = de_broglie(&e, 1.0e13);
        assert!((lambda - 3.63e13).abs() / 3.63e13 < 0.01);
    }

    #[test]
    fn large_h_decay_of_ab_minus_semiclassical() {
        let p = PhysParams::bench();
        let a = AlphaFlux { alpha: 0.5 };
        let mut prev = f64::INFINITY;
        for h in [2.0, 4.0, 6.0, 8.0, 10.0] {
            let pp = bench_pair(h);
            let diff = (ab_propagator(&p, &pp, a, DEFAULT_M_MAX).unwrap() - semiclassical(&p, &pp, a)).norm();
            assert!(diff < prev, "difference not decreasing at h={h}: {diff:e} >= {prev:e}");
            prev = diff;
        }
    }
}
