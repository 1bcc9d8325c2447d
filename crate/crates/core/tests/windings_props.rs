//! Property tests for flux decoding and the topological machinery.

use num_bigint::BigInt;
use pathdim_core::windings::{
    assign_fluxes, decode_total_flux, enumerate_classes, generalized_ab_phase,
    representative_path, SolenoidArray, WindingVector,
};
use pathdim_core::propagator::PhysParams;
use pathdim_core::BigRational;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Round trip: encoding any winding vector within the cutoff into a total
    /// flux and decoding recovers it exactly (no tolerance).
    #[test]
    fn decode_roundtrip(
        seed in 0u64..5000,
        n_s in 1usize..4,
        cutoff in 1u32..3,
        picks in proptest::collection::vec(-2i32..=2, 3),
    ) {
        let fa = assign_fluxes(n_s, cutoff, seed).unwrap();
        let w = WindingVector(
            picks[..n_s]
                .iter()
                .map(|&v| v.clamp(-(cutoff as i32), cutoff as i32))
                .collect(),
        );
        let total = fa.weighted_sum(&w).unwrap();
        let decoded = decode_total_flux(&total, &fa).unwrap();
        prop_assert_eq!(decoded, w);
    }

    /// The flux phase factor always has unit modulus and is a group
    /// homomorphism in the winding vector at fixed endpoints.
    #[test]
    fn phase_modulus_and_additivity(
        seed in 0u64..5000,
        a0 in -2i32..=2, a1 in -2i32..=2,
        b0 in -2i32..=2, b1 in -2i32..=2,
    ) {
        let p = PhysParams::bench();
        let fa = assign_fluxes(2, 2, seed).unwrap();
        let wa = WindingVector(vec![a0, a1]);
        let wb = WindingVector(vec![b0, b1]);
        let wsum = WindingVector(vec![a0 + b0, a1 + b1]);
        let pa = generalized_ab_phase(&wa, &fa, &p, 0.0).unwrap();
        let pb = generalized_ab_phase(&wb, &fa, &p, 0.0).unwrap();
        let ps = generalized_ab_phase(&wsum, &fa, &p, 0.0).unwrap();
        prop_assert!((pa.norm() - 1.0).abs() < 1e-14);
        prop_assert!((pa * pb - ps).norm() < 1e-10);
    }
}

#[test]
fn enumeration_is_lexicographic_and_negation_closed() {
    for (n_s, cutoff) in [(1usize, 1u32), (2, 1), (2, 2), (3, 1)] {
        let classes = enumerate_classes(n_s, cutoff).unwrap();
        assert_eq!(classes.len(), (2 * cutoff as usize + 1).pow(n_s as u32));
        let mut sorted = classes.clone();
        sorted.sort();
        assert_eq!(sorted, classes, "lexicographic order expected");
        for w in &classes {
            assert!(classes.contains(&w.negated()));
        }
    }
}

#[test]
fn path_lengths_symmetric_under_negation() {
    let arr = SolenoidArray::grid(2, 2, 0.5, 0.0).unwrap();
    let x_in = [-3.0, 0.0];
    let x_fi = [3.0, 0.0];
    for w in enumerate_classes(4, 1).unwrap() {
        let a = representative_path(&w, &arr, x_in, x_fi).unwrap();
        let b = representative_path(&w.negated(), &arr, x_in, x_fi).unwrap();
        assert!(
            (a.classical_length - b.classical_length).abs() < 1e-12,
            "lengths differ for {:?}",
            w
        );
        assert!(a.classical_length >= 6.0 - 1e-12);
    }
}

#[test]
fn paper_anchor_certificate_is_exact() {
    // worked example: fluxes 97/99 and 101/111, total 8463/10989 decodes to
    // (-2, 3) and to nothing else
    let fa = pathdim_core::windings::FluxAssignment::new(
        vec![
            BigRational::new(BigInt::from(97), BigInt::from(99)),
            BigRational::new(BigInt::from(101), BigInt::from(111)),
        ],
        2,
    )
    .unwrap();
    fa.verify_uniqueness().unwrap();
    let total = BigRational::new(BigInt::from(8463), BigInt::from(10989));
    let w = decode_total_flux(&total, &fa).unwrap();
    assert_eq!(w.0, vec![-2, 3]);
    // and the encoding direction agrees exactly
    assert_eq!(fa.weighted_sum(&w).unwrap(), total);
}
