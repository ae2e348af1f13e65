//! Quick invariant checks behind the `validate` subcommand.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squintless_core::beam::{composite_gain, gain_heatmap};
use squintless_core::beamforming::sca_beamforming;
use squintless_core::composite::{sample_grid, CompositeBounds};
use squintless_core::conic::{solve_maxmin_sdp, solve_scalar_maxmin_quadratic, GainMatrix, Quadratic, SdpProblem};
use squintless_core::rotation::{sca_rotation, surrogate_coeffs};
use squintless_core::{AngularRange, ArrayConfig, BeamformerWeights, HermitianMatrix, RotationAngles};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn boresight_flatness(array: &ArrayConfig, range: &AngularRange) -> Check {
    let n = array.num_antennas as f64;
    let bore = RotationAngles::new(0.0, 0.0, std::f64::consts::FRAC_PI_2).expect("finite angles");
    match gain_heatmap(&BeamformerWeights::uniform(array.num_antennas), &bore, array, range, 64, 64) {
        Ok(map) => {
            let worst = map
                .gains_db
                .iter()
                .flatten()
                .map(|g| (10f64.powf(g / 10.0) - n).abs())
                .fold(0.0, f64::max);
            check("boresight flatness", worst < 1e-9 * n.max(1.0), format!("max |G - N| = {worst:.3e}"))
        }
        Err(e) => check("boresight flatness", false, e.to_string()),
    }
}

fn surrogate_soundness(rng: &mut ChaCha8Rng) -> Check {
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_tight: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-3.2..3.2)).collect();
        let w = rng.random_range(0.0..3.5);
        let mu0 = rng.random_range(-1.0..1.0);
        let s = surrogate_coeffs(w, &phases, mu0);
        worst_tight = worst_tight.max((s.eval(mu0) - composite_gain(&phases, w, mu0)).abs());
        for i in 0..=1000 {
            let mu = -1.0 + i as f64 / 500.0;
            worst_bound = worst_bound.max(s.eval(mu) - composite_gain(&phases, w, mu));
        }
    }
    check(
        "surrogate minorant",
        worst_bound <= 1e-9 && worst_tight <= 1e-12,
        format!("max excess {worst_bound:.3e}, anchor error {worst_tight:.3e}"),
    )
}

fn scalar_solver(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(1..=6);
        let q: Vec<_> = (0..k)
            .map(|_| Quadratic::new(-rng.random_range(0.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)))
            .collect();
        let Ok(r) = solve_scalar_maxmin_quadratic(&q, -1.0, 1.0) else {
            return check("scalar max-min solver", false, "solver rejected a valid instance".into());
        };
        let grid_best = (0..=20_000)
            .map(|i| {
                let mu = -1.0 + i as f64 / 10_000.0;
                q.iter().map(|c| c.eval(mu)).fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(grid_best - r.sigma);
    }
    check("scalar max-min solver", worst <= 1e-9, format!("max grid excess {worst:.3e}"))
}

fn sdp_analytic() -> Check {
    let one = Complex::new(1.0f64, 0.0);
    let p = SdpProblem::new(vec![GainMatrix::rank_one(vec![one, one])], 0.5);
    match solve_maxmin_sdp(&p) {
        Ok(sol) => check(
            "SDP two-element optimum",
            (sol.sigma - 2.0).abs() <= 1e-6 && sol.residuals.gap <= 1e-6,
            format!("sigma = {:.9}, gap = {:.3e}", sol.sigma, sol.residuals.gap),
        ),
        Err(e) => check("SDP two-element optimum", false, e.to_string()),
    }
}

fn sca_monotonicity(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let n = rng.random_range(2..=6);
        let lo = rng.random_range(0.5..2.5);
        let grid = sample_grid(CompositeBounds { lo, hi: lo + rng.random_range(0.1..1.0) }, 8).expect("valid grid");
        let mu = rng.random_range(-1.0..1.0);
        let w0 = HermitianMatrix::outer(&BeamformerWeights::uniform(n).to_complex());
        let bf = match sca_beamforming(&grid, mu, &w0, 20.0, 1e-4, 30) {
            Ok((_, t)) => t,
            Err(e) => return check("SCA monotonicity", false, e.to_string()),
        };
        for p in bf.objective_values.windows(2) {
            worst = worst.max((p[0] - p[1]) / p[0].abs().max(1.0));
        }
        let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let rot = match sca_rotation(&grid, &phases, mu, 1e-6, 50) {
            Ok((_, t)) => t,
            Err(e) => return check("SCA monotonicity", false, e.to_string()),
        };
        for p in rot.objective_values.windows(2) {
            worst = worst.max(p[0] - p[1]);
        }
    }
    check("SCA monotonicity", worst <= 1e-5, format!("largest decrease {worst:.3e}"))
}

/// Runs every check; the configuration supplies the array and range for the
/// flatness check.
pub fn run_checks(array: &ArrayConfig, range: &AngularRange, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        boresight_flatness(array, range),
        surrogate_soundness(&mut rng),
        scalar_solver(&mut rng),
        sdp_analytic(),
        sca_monotonicity(&mut rng),
    ]
}
