//! Statistical oracles for the lattice Monte Carlo: exact Brownian-bridge
//! moments, the half-normal increment identity, reversibility of the sampler
//! and dimension estimates per potential. All chains are seeded, so these
//! tests are deterministic.

use pathdim_core::pimc::{
    check_eq13, estimate_dh, mean_abs_increment, mean_sq_increment, measure_length,
    metropolis_sweep, run_chain, ChainConfig, DhConfig, LatticePath, PotentialSpec, SerialRunner,
};
use pathdim_core::propagator::PhysParams;
use pathdim_core::rng::DetRng;

fn params_with_time(t: f64) -> PhysParams {
    PhysParams { time_t: t, ..PhysParams::bench() }
}

fn free_chain_samples(n_steps: usize, delta: f64, sweeps: usize, seed: u64) -> Vec<LatticePath> {
    let cfg = ChainConfig {
        n_steps,
        dim: 1,
        delta,
        sweeps,
        therm_sweeps: 1500,
        measure_every: 2,
        x_in: vec![0.0],
        x_fi: vec![0.0],
    };
    run_chain(&PotentialSpec::Free, &PhysParams::bench(), &cfg, seed)
        .unwrap()
        .samples
}

#[test]
fn free_increment_variance_matches_bridge_value() {
    // <(dx)^2> = (hbar delta / mu) (N-1)/N for the fixed-endpoint free walk
    for (delta, seed) in [(0.5, 11u64), (0.125, 12)] {
        let n = 32;
        let paths = free_chain_samples(n, delta, 8000, seed);
        let est = mean_sq_increment(&paths).unwrap();
        let want = delta * (n as f64 - 1.0) / n as f64;
        assert!(
            (est.mean - want).abs() < 2.0 * est.stderr,
            "delta={delta}: got {} +- {}, want {want}",
            est.mean,
            est.stderr
        );
        assert!(est.stderr < 0.02 * want, "too noisy to be meaningful");
    }
}

#[test]
fn free_length_matches_half_normal_mean() {
    // each bridge increment is Gaussian, so <L> = N sqrt(2 sigma^2 / pi) with
    // sigma^2 = (hbar delta / mu)(N-1)/N
    let n = 32;
    let delta = 0.25;
    let paths = free_chain_samples(n, delta, 8000, 21);
    let est = measure_length(&paths).unwrap();
    let sigma2 = delta * (n as f64 - 1.0) / n as f64;
    let want = n as f64 * (2.0 * sigma2 / std::f64::consts::PI).sqrt();
    assert!(
        (est.mean - want).abs() < 2.5 * est.stderr,
        "got {} +- {}, want {want}",
        est.mean,
        est.stderr
    );
}

#[test]
fn length_scales_like_inverse_sqrt_delta() {
    // fixed total time: <L> ~ T sqrt(2 hbar / (pi mu delta)), so quartering
    // delta doubles the length up to the finite-N bridge factor
    let t = 8.0;
    let (nc, nf) = ((t / 0.5) as usize, (t / 0.125) as usize);
    let coarse = free_chain_samples(nc, 0.5, 8000, 31);
    let fine = free_chain_samples(nf, 0.125, 8000, 32);
    let lc = measure_length(&coarse).unwrap();
    let lf = measure_length(&fine).unwrap();
    let ratio = lf.mean / lc.mean;
    let sigma = |n: usize, d: f64| (d * (n as f64 - 1.0) / n as f64).sqrt();
    let want = (nf as f64 * sigma(nf, 0.125)) / (nc as f64 * sigma(nc, 0.5));
    let err = 2.0 * (lf.stderr / lf.mean + lc.stderr / lc.mean) * ratio;
    assert!((want - 2.0).abs() < 0.06, "bridge-corrected target {want} should be near 2");
    assert!(
        (ratio - want).abs() < err.max(0.02),
        "ratio {ratio} +- {err}, want {want}"
    );
}

#[test]
fn eq13_ratio_is_two_over_pi_and_delta_independent() {
    let want = 2.0 / std::f64::consts::PI;
    let mut means = Vec::new();
    for (delta, seed) in [(0.5, 41u64), (0.125, 42), (0.05, 43)] {
        let paths = free_chain_samples(32, delta, 8000, seed);
        let est = check_eq13(&paths).unwrap();
        assert!(
            (est.mean - want).abs() < 2.0 * est.stderr.max(1e-4),
            "delta={delta}: ratio {} +- {}",
            est.mean,
            est.stderr
        );
        means.push((est.mean, est.stderr));
    }
    for w in means.windows(2) {
        let d = (w[0].0 - w[1].0).abs();
        let s = (w[0].1.powi(2) + w[1].1.powi(2)).sqrt();
        assert!(d < 3.0 * s.max(1e-4), "ratio drifts across delta: {means:?}");
    }
}

#[test]
fn harmonic_small_delta_ratio_approaches_free_value() {
    // kinetic term dominates as delta -> 0
    let cfg = ChainConfig {
        n_steps: 64,
        dim: 1,
        delta: 0.02,
        sweeps: 6000,
        therm_sweeps: 1500,
        measure_every: 2,
        x_in: vec![0.0],
        x_fi: vec![0.0],
    };
    let out = run_chain(&PotentialSpec::Harmonic { omega: 1.0 }, &PhysParams::bench(), &cfg, 71)
        .unwrap();
    let est = check_eq13(&out.samples).unwrap();
    let want = 2.0 / std::f64::consts::PI;
    assert!(
        (est.mean - want).abs() < 3.0 * est.stderr.max(1e-3),
        "ratio {} +- {}",
        est.mean,
        est.stderr
    );
}

#[test]
fn sampler_is_reversible_between_states() {
    // single interior site; bin its position and demand the flow between
    // any two bins balances within counting errors
    let p = PhysParams::bench();
    let mut path = LatticePath::bridge(2, 1, 1.0, &[0.0], &[0.0]).unwrap();
    let mut rng = DetRng::seed_from(99);
    let edges = [-0.75, -0.25, 0.25, 0.75];
    let bin_of = |x: f64| -> usize {
        edges.iter().position(|&e| x < e).unwrap_or(edges.len())
    };
    let mut counts = [[0u64; 5]; 5];
    // equilibrate
    for _ in 0..2000 {
        metropolis_sweep(&mut path, &PotentialSpec::Free, &p, 1.0, &mut rng);
    }
    let mut prev = bin_of(path.site(1)[0]);
    for _ in 0..400_000 {
        metropolis_sweep(&mut path, &PotentialSpec::Free, &p, 1.0, &mut rng);
        let b = bin_of(path.site(1)[0]);
        counts[prev][b] += 1;
        prev = b;
    }
    for i in 0..5 {
        for j in (i + 1)..5 {
            let nij = counts[i][j] as f64;
            let nji = counts[j][i] as f64;
            if nij + nji < 200.0 {
                continue;
            }
            let diff = (nij - nji).abs();
            let sigma = (nij + nji).sqrt();
            assert!(
                diff <= 3.0 * sigma,
                "flow imbalance {i}->{j}: {nij} vs {nji} ({} sigma)",
                diff / sigma
            );
        }
    }
}

fn desk_dh(pot: &PotentialSpec, dim: usize, seed: u64) -> pathdim_core::pimc::DhOutcome {
    let p = params_with_time(16.0);
    let cfg = DhConfig {
        delta_values: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
        dim,
        sweeps: 6000,
        therm_sweeps: 1500,
        measure_every: 3,
        n_chains: 2,
        seed,
    };
    estimate_dh(pot, &p, &cfg, &SerialRunner).unwrap()
}

#[test]
fn free_motion_dimension_is_two() {
    let out = desk_dh(&PotentialSpec::Free, 1, 1001);
    assert!(
        (out.d_h - 2.0).abs() < 0.15,
        "free d_H = {} +- {}",
        out.d_h,
        out.d_h_stderr
    );
}

#[test]
fn free_motion_dimension_agrees_across_space_dimensions() {
    let d1 = desk_dh(&PotentialSpec::Free, 1, 1003);
    let d2 = desk_dh(&PotentialSpec::Free, 2, 1004);
    let joint = (d1.d_h_stderr.powi(2) + d2.d_h_stderr.powi(2)).sqrt();
    assert!(
        (d1.d_h - d2.d_h).abs() < 3.0 * joint.max(0.02),
        "d_H(1D) = {} vs d_H(2D) = {} (joint err {joint})",
        d1.d_h,
        d2.d_h
    );
}

#[test]
fn cubic_velocity_interaction_lowers_the_dimension() {
    let out = desk_dh(&PotentialSpec::Velocity { u0: 1.0, alpha_v: 3.0 }, 1, 1005);
    assert!(
        out.d_h + 2.0 * out.d_h_stderr < 2.0,
        "velocity d_H = {} +- {}",
        out.d_h,
        out.d_h_stderr
    );
    // and it lands near the cubic-interaction prediction of 1.5
    assert!((out.d_h - 1.5).abs() < 0.2, "velocity d_H = {}", out.d_h);
}
