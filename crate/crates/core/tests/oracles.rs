use nalgebra::{Complex as NComplex, DMatrix};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squintless_core::beam::composite_gain;
use squintless_core::beamforming::{rank_one_gap, spectral_subgradient};
use squintless_core::composite::{sample_grid, CompositeBounds};
use squintless_core::conic::{psd_project, solve_maxmin_sdp, solve_scalar_maxmin_quadratic, GainMatrix, Quadratic, SdpProblem};
use squintless_core::geometry::steering_vector_composite;
use squintless_core::linalg::{CMatrix, HermitianMatrix};
use squintless_core::rotation::sca_rotation;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix<f64> {
    CMatrix::from_fn(n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).hermitian_part()
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HermitianMatrix<f64> {
    let mut acc = HermitianMatrix::zeros(n);
    for _ in 0..rank {
        let v: Vec<_> = (0..n)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        acc = &acc + &HermitianMatrix::outer(&v);
    }
    acc
}

fn to_nalgebra(m: &HermitianMatrix<f64>) -> DMatrix<NComplex<f64>> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| NComplex::new(m[(i, j)].re, m[(i, j)].im))
}

/// Eigenvalues from nalgebra, descending.
fn oracle_eigenvalues(m: &HermitianMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = to_nalgebra(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

#[test]
fn eigenvalues_match_independent_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1, 2, 3, 5, 8, 16, 32] {
        let m = random_hermitian(&mut rng, n);
        let ours = m.eigenvalues();
        let theirs = oracle_eigenvalues(&m);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn rank_one_gap_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..50 {
        let n = 2 + trial % 7;
        let w = random_psd(&mut rng, n, 1 + trial % n);
        let ev = oracle_eigenvalues(&w);
        let expect: f64 = ev.iter().sum::<f64>() - ev[0];
        assert!((rank_one_gap(&w).unwrap() - expect).abs() < 1e-10);
    }
}

#[test]
fn subgradient_attains_spectral_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let w = random_psd(&mut rng, 6, 3);
        let s = spectral_subgradient(&w).unwrap();
        let top = oracle_eigenvalues(&w)[0];
        assert!((s.inner(&w) - top).abs() < 1e-10);
        assert!((s.trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn psd_projection_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let m = random_hermitian(&mut rng, 6);
        let p = psd_project(&m).unwrap();
        let e = to_nalgebra(&m).symmetric_eigen();
        let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| NComplex::new(v.max(0.0), 0.0)));
        let oracle = &e.eigenvectors * d * e.eigenvectors.adjoint();
        for i in 0..6 {
            for j in 0..6 {
                let o = oracle[(i, j)];
                assert!((p[(i, j)] - Complex::new(o.re, o.im)).norm() < 1e-10);
            }
        }
    }
}

/// Random instance shaped like a beamformer SCA step.
fn sca_shaped_instance(rng: &mut ChaCha8Rng) -> SdpProblem<f64> {
    let n = rng.random_range(2..=8);
    let l = rng.random_range(2..=12);
    let mu = rng.random_range(-1.0..1.0);
    let lo = rng.random_range(0.2..2.0);
    let hi = lo + rng.random_range(0.0..2.0);
    let gains = (0..l)
        .map(|k| {
            let w = lo + (hi - lo) * k as f64 / (l - 1) as f64;
            GainMatrix::rank_one(steering_vector_composite(n, w, mu).0)
        })
        .collect();
    let s: Vec<_> = (0..n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let s: Vec<_> = s.into_iter().map(|z| z / norm).collect();
    let rho = rng.random_range(0.0..40.0);
    SdpProblem::new(gains, 1.0 / n as f64).with_linear_term(HermitianMatrix::outer(&s).scale(rho))
}

#[test]
fn sdp_certificates_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..30 {
        let p = sca_shaped_instance(&mut rng);
        let sol = solve_maxmin_sdp(&p).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert!(sol.residuals.gap <= 1e-6, "trial {trial}: gap {}", sol.residuals.gap);
        assert!(sol.residuals.psd <= 1e-8);
        assert!(sol.residuals.diag <= 1e-8);
        assert!(sol.objective <= sol.dual_bound + 1e-6 * (1.0 + sol.dual_bound.abs()));
    }
}

#[test]
fn no_random_feasible_point_beats_the_sdp() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let p = sca_shaped_instance(&mut rng);
        let n = p.dim();
        let sol = solve_maxmin_sdp(&p).unwrap();
        for _ in 0..100 {
            // Random PSD matrix with the required diagonal.
            let rank = rng.random_range(1..=n);
            let r = random_psd(&mut rng, n, rank);
            let d: Vec<f64> = r.diagonal().iter().map(|v| (p.diag_value / v).sqrt()).collect();
            let w = CMatrix::from_fn(n, |i, j| r[(i, j)] * (d[i] * d[j])).hermitian_part();
            assert!(p.objective_of(&w) <= sol.objective + 1e-6);
        }
    }
}

fn envelope(q: &[Quadratic<f64>], mu: f64) -> f64 {
    q.iter().map(|c| c.eval(mu)).fold(f64::INFINITY, f64::min)
}

/// Dense grid followed by golden-section refinement on the concave envelope.
fn scalar_oracle(q: &[Quadratic<f64>], lo: f64, hi: f64, points: usize) -> f64 {
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=points {
        let m = lo + (hi - lo) * i as f64 / points as f64;
        let v = envelope(q, m);
        if v > best.0 {
            best = (v, m);
        }
    }
    let h = (hi - lo) / points as f64;
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if envelope(q, c) >= envelope(q, d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.0.max(envelope(q, 0.5 * (a + b)))
}

#[test]
fn scalar_solver_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let k = rng.random_range(1..=8);
        let q: Vec<_> = (0..k)
            .map(|_| {
                Quadratic::new(
                    -rng.random_range(0.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                )
            })
            .collect();
        let r = solve_scalar_maxmin_quadratic(&q, -1.0, 1.0).unwrap();
        let oracle = scalar_oracle(&q, -1.0, 1.0, 20_000);
        assert!((r.sigma - oracle).abs() < 1e-9, "{} vs {oracle}", r.sigma);
        assert!((envelope(&q, r.mu) - r.sigma).abs() < 1e-12);
    }
}

#[test]
fn rotation_sca_against_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let n = rng.random_range(2..=8);
        let l = rng.random_range(1..=16);
        let lo = rng.random_range(0.5..2.0);
        let hi = if l == 1 { lo } else { lo + rng.random_range(0.1..1.5) };
        let grid = sample_grid(CompositeBounds { lo, hi }, l).unwrap();
        let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mu0 = rng.random_range(-1.0..1.0);
        let (mu, trace) = sca_rotation(&grid, &phases, mu0, 1e-6, 50).unwrap();
        let min_gain = |m: f64| {
            grid.samples()
                .iter()
                .map(|&w| composite_gain(&phases, w, m))
                .fold(f64::INFINITY, f64::min)
        };
        let best = (0..=20_000)
            .map(|i| min_gain(-1.0 + i as f64 / 10_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        let got = min_gain(mu);
        assert_eq!(got, *trace.objective_values.last().unwrap());
        assert!(got >= best - 1e-3 || got >= min_gain(mu0) - 1e-9);
    }
}
