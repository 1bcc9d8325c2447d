//! Scratch diagnostics (removed before release).
use pathdim_core::exp2::*;
use pathdim_core::propagator::PhysParams;
use pathdim_core::rng::DetRng;
use pathdim_core::windings::{assign_fluxes, enumerate_classes, FluxAssignment, WindingVector};
use pathdim_core::Complex;

fn decay_amps(classes: &[WindingVector], seed: u64) -> ClassAmplitudes {
    let mut rng = DetRng::seed_from(seed);
    let k: Vec<Complex> = classes
        .iter()
        .map(|w| {
            let mag = 0.35f64.powi(w.l1() as i32) * (0.75 + 0.5 * rng.next_f64());
            let phase = if w.is_zero() { 0.0 } else { rng.range_f64(-std::f64::consts::PI, std::f64::consts::PI) };
            Complex::from_polar(mag, phase)
        })
        .collect();
    ClassAmplitudes::new(k, classes).gauge_fixed()
}

fn main() {
    let p = PhysParams::bench();
    let classes = enumerate_classes(2, 1).unwrap();
    let n_f = 4 * classes.len();
    for seed in 0..20u64 {
        let truth = decay_amps(&classes, 7_700 + seed);
        let sets: Vec<FluxAssignment> = (0..n_f)
            .map(|f| assign_fluxes(2, 1, 1_000_000 + seed * 4096 + f as u64).unwrap())
            .collect();
        let intensities: Vec<f64> = sets
            .iter()
            .map(|s| synth_intensity(&truth, &classes, s, &p, 0.0).unwrap())
            .collect();
        let family = FluxSetFamily { sets, intensities };
        match reconstruct(&family, &classes, &p, 0.0, seed, &ReconstructOptions::default()) {
            Ok(rec) => {
                let d = aligned_distance(&rec.amps, &truth, &classes).unwrap();
                let plain = amp_distance(&align_phase(&rec.amps, &truth), &truth);
                println!(
                    "seed {seed:2}: dist {d:.2e} plain {plain:.2e} rms {:.1e} start {} iters {}",
                    rec.residual_rms, rec.start_index, rec.n_iterations
                );
            }
            Err(e) => println!("seed {seed:2}: ERR {e}"),
        }
    }
}
