use proptest::prelude::*;

use squintless_core::beam::{composite_gain, BeamformerWeights};
use squintless_core::beamforming::{extract_weights, rank_one_gap, sca_beamforming, spectral_subgradient};
use squintless_core::composite::{composite_bounds, sample_grid, AngularRange, CompositeBounds};
use squintless_core::conic::{solve_scalar_maxmin_quadratic, Quadratic};
use squintless_core::geometry::{steering_vector_composite, ArrayConfig};
use squintless_core::linalg::HermitianMatrix;
use squintless_core::num::cis;
use squintless_core::rotation::{reconstruct_angles, sca_rotation, surrogate_coeffs};

fn phases(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn surrogate_is_a_tight_minorant(ph in phases(1..=8), w in 0.0f64..3.5, mu0 in -1.0f64..1.0) {
        let s = surrogate_coeffs(w, &ph, mu0);
        prop_assert!(s.a <= 0.0);
        prop_assert!((s.eval(mu0) - composite_gain(&ph, w, mu0)).abs() < 1e-12);
        for i in 0..=400 {
            let mu = -1.0 + i as f64 / 200.0;
            prop_assert!(s.eval(mu) <= composite_gain(&ph, w, mu) + 1e-9);
        }
    }

    #[test]
    fn gain_is_between_zero_and_n(ph in phases(1..=16), w in -4.0f64..4.0, mu in -1.0f64..1.0) {
        let g = composite_gain(&ph, w, mu);
        prop_assert!(g >= -1e-12 && g <= ph.len() as f64 + 1e-9);
    }

    #[test]
    fn extracted_weights_have_constant_modulus(ph in phases(1..=8), noise in 0.0f64..0.3) {
        let n = ph.len();
        let v: Vec<_> = ph.iter().map(|&p| cis(p) / (n as f64).sqrt()).collect();
        let w = &HermitianMatrix::outer(&v) + &HermitianMatrix::scaled_identity(n, noise);
        let weights = extract_weights(&w);
        for z in weights.to_complex() {
            prop_assert!((z.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn linearized_penalty_bounds_the_gap(seed_a in phases(3..=3), seed_b in phases(3..=3), t in 0.0f64..1.0) {
        // f̃(W | W_i) = Tr W − Tr(s s^H W) ≥ f(W) with equality at W_i.
        let a: Vec<_> = seed_a.iter().map(|&p| cis(p)).collect();
        let b: Vec<_> = seed_b.iter().map(|&p| cis(p) * t).collect();
        let wi = &HermitianMatrix::outer(&a) + &HermitianMatrix::outer(&b);
        let w = &HermitianMatrix::outer(&b) + &HermitianMatrix::scaled_identity(3, 0.1);
        let s = spectral_subgradient(&wi).unwrap();
        let f = |m: &HermitianMatrix<f64>| rank_one_gap(m).unwrap();
        prop_assert!((wi.trace() - s.inner(&wi) - f(&wi)).abs() < 1e-10);
        prop_assert!(w.trace() - s.inner(&w) >= f(&w) - 1e-8);
    }

    #[test]
    fn angle_round_trip(mu in -1.0f64..=1.0) {
        let a = reconstruct_angles(mu).unwrap();
        prop_assert!((a.rotation_coefficient() - mu).abs() < 1e-12);
        prop_assert_eq!(a.alpha, 0.0);
    }

    #[test]
    fn bounds_contain_every_band_and_angle_sample(
        n in 1usize..64, b in 0.0f64..0.5e12, lo in -179.0f64..179.0, width in 0.0f64..100.0,
        fi in 0.0f64..1.0, ti in 0.0f64..1.0,
    ) {
        let hi = (lo + width).min(180.0);
        let cfg = ArrayConfig::new(n, 1e12, b).unwrap();
        let range = AngularRange::from_degrees(lo, hi).unwrap();
        let bounds = composite_bounds(&cfg, &range).unwrap();
        let (f_lo, f_hi) = cfg.band_edges();
        let f = f_lo + (f_hi - f_lo) * fi;
        let th = range.theta_min + (range.theta_max - range.theta_min) * ti;
        let v = cfg.composite_variable(f, th);
        let slack = 1e-12 * bounds.hi.abs().max(1.0);
        prop_assert!(v >= bounds.lo - slack && v <= bounds.hi + slack);
    }

    #[test]
    fn steering_entries_are_unit_modulus(n in 1usize..40, w in -4.0f64..4.0, mu in -1.0f64..1.0) {
        let a = steering_vector_composite(n, w, mu);
        prop_assert!(a.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
        prop_assert_eq!(a.entries()[0], cis(0.0));
    }

    #[test]
    fn scalar_solver_beats_every_sample(
        coeffs in prop::collection::vec((-3.0f64..0.0, -3.0f64..3.0, -3.0f64..3.0), 1..6),
    ) {
        let q: Vec<_> = coeffs.iter().map(|&(a, b, c)| Quadratic::new(a, b, c)).collect();
        let r = solve_scalar_maxmin_quadratic(&q, -1.0, 1.0).unwrap();
        for i in 0..=200 {
            let mu = -1.0 + i as f64 / 100.0;
            let env = q.iter().map(|c| c.eval(mu)).fold(f64::INFINITY, f64::min);
            prop_assert!(env <= r.sigma + 1e-12);
        }
    }

    #[test]
    fn rotation_sca_ascends(ph in phases(2..=8), lo in 0.3f64..2.5, width in 0.0f64..1.5, mu0 in -1.0f64..1.0) {
        let grid = sample_grid(CompositeBounds { lo, hi: lo + width }, 12).unwrap();
        let (_, trace) = sca_rotation(&grid, &ph, mu0, 1e-6, 50).unwrap();
        for p in trace.objective_values.windows(2) {
            prop_assert!(p[1] >= p[0] - 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn beamforming_sca_is_monotone(n in 2usize..6, lo in 0.5f64..2.5, width in 0.0f64..1.0, mu in -1.0f64..1.0) {
        let grid = sample_grid(CompositeBounds { lo, hi: lo + width }, 8).unwrap();
        let start = BeamformerWeights::<f64>::uniform(n);
        let w0 = HermitianMatrix::outer(&start.to_complex());
        let (_, trace) = sca_beamforming(&grid, mu, &w0, 20.0, 1e-4, 30).unwrap();
        for p in trace.objective_values.windows(2) {
            prop_assert!(p[1] >= p[0] - 1e-5 * p[0].abs().max(1.0), "{:?}", trace.objective_values);
        }
    }
}
