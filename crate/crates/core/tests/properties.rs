//! Randomized invariants across the construction: whatever the label and
//! spectrum, states stay normalized, phases compose, and the action identity
//! holds to certified tolerance.

use std::sync::Arc;

use proptest::prelude::*;

use cohstate_core::{
    autocorrelation, coefficients, evolve_direct, mean_energy, overlap, unit_phase, FormulaFamily,
    SpectrumSpec, TimeGrid, TruncationPolicy,
};

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

// (spectrum, J well inside the convergence domain)
fn spec_and_label() -> impl Strategy<Value = (Arc<SpectrumSpec>, f64)> {
    prop_oneof![
        (0.01f64..8.0).prop_map(|j| (Arc::new(SpectrumSpec::harmonic(1.0).unwrap()), j)),
        (0.01f64..0.95).prop_map(|j| (Arc::new(SpectrumSpec::hydrogen_1d(1.0).unwrap()), j)),
        ((0.6f64..3.0), (0.01f64..0.9)).prop_map(|(p, frac)| {
            let s = SpectrumSpec::custom_formula(1.0, FormulaFamily::PowerLaw { p }).unwrap();
            (Arc::new(s), frac)
        }),
        ((0.5f64..4.0), (0.01f64..0.9)).prop_map(|(cap, frac)| {
            let s = SpectrumSpec::custom_formula(1.0, FormulaFamily::AffineCapped { cap }).unwrap();
            (Arc::new(s), frac * cap)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn states_are_normalized((spec, j) in spec_and_label(), gamma in -10.0f64..10.0) {
        let s = coefficients(&spec, j, gamma, &pol()).unwrap();
        let norm = s.norm_sq();
        prop_assert!((norm - 1.0).abs() <= s.tail_bound() + 1e-11,
            "norm {} tail {}", norm, s.tail_bound());
    }

    #[test]
    fn gamma_shift_is_a_phase_rotation((spec, j) in spec_and_label(),
                                       gamma in -5.0f64..5.0,
                                       shift in -20.0f64..20.0) {
        let a = coefficients(&spec, j, gamma, &pol()).unwrap();
        let b = coefficients(&spec, j, gamma + shift, &pol()).unwrap();
        for n in 0..a.coeffs().len().min(b.coeffs().len()) {
            let e_n = spec.level(n).unwrap();
            let rotated = a.coeffs()[n] * unit_phase(e_n * shift);
            prop_assert!((rotated - b.coeffs()[n]).norm() < 1e-12,
                "n = {}: {:?} vs {:?}", n, rotated, b.coeffs()[n]);
        }
    }

    #[test]
    fn overlaps_live_in_the_unit_disk((spec, j) in spec_and_label(),
                                      dj in 0.0f64..0.5,
                                      g1 in -3.0f64..3.0,
                                      g2 in -3.0f64..3.0) {
        let j2 = (j * (1.0 - dj)).max(0.0);
        let a = coefficients(&spec, j, g1, &pol()).unwrap();
        let b = coefficients(&spec, j2, g2, &pol()).unwrap();
        let ab = overlap(&a, &b).unwrap();
        let ba = overlap(&b, &a).unwrap();
        prop_assert!(ab.norm() <= 1.0 + 1e-10);
        prop_assert!((ab - ba.conj()).norm() < 1e-13);
    }

    #[test]
    fn evolution_composes_and_preserves_norm((spec, j) in spec_and_label(),
                                             t1 in 0.0f64..50.0,
                                             t2 in 0.0f64..50.0) {
        let s = coefficients(&spec, j, 0.3, &pol()).unwrap();
        let chained = evolve_direct(&evolve_direct(&s, t1), t2);
        let direct = evolve_direct(&s, t1 + t2);
        let mut dist_sq = 0.0;
        for n in 0..chained.coeffs().len() {
            dist_sq += (chained.coeffs()[n] - direct.coeffs()[n]).norm_sqr();
        }
        prop_assert!(dist_sq.sqrt() < 1e-11, "l2 {}", dist_sq.sqrt());
        prop_assert!((chained.norm_sq() - s.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn action_identity_everywhere((spec, j) in spec_and_label()) {
        let m = mean_energy(&spec, j, &pol()).unwrap();
        prop_assert!((m / (spec.omega() * j) - 1.0).abs() < 1e-9,
            "<H>/(wJ) = {}", m / (spec.omega() * j));
    }

    #[test]
    fn survival_probability_is_a_probability((spec, j) in spec_and_label()) {
        let grid = TimeGrid::linspace(0.0, 20.0, 17).unwrap();
        let pts = autocorrelation(&spec, j, &grid, &pol()).unwrap();
        for (t, p) in pts {
            prop_assert!((-1e-12..=1.0 + 1e-10).contains(&p), "t = {}: P = {}", t, p);
        }
    }

    #[test]
    fn phase_reduction_is_periodic(theta in -1e4f64..1e4, k in 1u32..100_000) {
        let shifted = theta + k as f64 * 2.0 * std::f64::consts::PI;
        let a = unit_phase(theta);
        let b = unit_phase(shifted);
        // the shift itself is inexact by ~k*ulp(2pi); allow that much slack
        let slack = 1e-15 * (1.0 + shifted.abs());
        prop_assert!((a - b).norm() < 1e-12 + slack, "theta {} k {}", theta, k);
    }
}

#[test]
fn formula_spectra_keep_their_levels_ordered() {
    for family in [
        FormulaFamily::PowerLaw { p: 0.7 },
        FormulaFamily::PowerLaw { p: 2.0 },
        FormulaFamily::AffineCapped { cap: 0.5 },
        FormulaFamily::AffineCapped { cap: 3.0 },
    ] {
        let s = SpectrumSpec::custom_formula(1.0, family).unwrap();
        assert!(s.validate(100_000).is_valid());
    }
}
