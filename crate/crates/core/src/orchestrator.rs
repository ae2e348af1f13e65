//! End-to-end solve: SDR initialization, alternating beamformer and rotation
//! updates, and the benchmark schemes used for comparison.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::beam::{composite_gain_curve, min_composite_gain, BeamformerWeights};
use crate::beamforming::{extract_weights, gain_matrices, sca_beamforming, ScaTrace};
use crate::composite::{composite_grid, AngularRange, CompositeGrid};
use crate::conic::{solve_maxmin_sdp, SdpProblem};
use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, RotationAngles};
use crate::linalg::HermitianMatrix;
use crate::num::{to_db, Real, C};
use crate::rotation::{reconstruct_angles, sca_rotation};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveParams<T> {
    pub rho: T,
    /// Grid points `L` on the composite interval.
    pub samples: usize,
    pub ao_tol: T,
    pub ao_max_iter: usize,
    pub sca_tol: T,
    pub sca_max_iter: usize,
    pub rotation_tol: T,
    pub rotation_max_iter: usize,
    pub n_randomizations: usize,
    /// Evenly spaced `μ` values in `[−1, 1]`, starting at 1, screened by their
    /// SDR bound to pick the starting rotation. 1 keeps `μ₀ = 1`.
    pub mu_candidates: usize,
    pub seed: u64,
}

impl<T: Real> Default for SolveParams<T> {
    fn default() -> Self {
        Self {
            rho: T::lit(20.0),
            samples: 64,
            ao_tol: T::lit(1e-4),
            ao_max_iter: 15,
            sca_tol: T::lit(1e-4),
            sca_max_iter: 30,
            rotation_tol: T::lit(1e-6),
            rotation_max_iter: 50,
            n_randomizations: 100,
            mu_candidates: 21,
            seed: 0,
        }
    }
}

impl<T: Real> SolveParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x > T::zero() && x.is_finite();
        if !positive(self.rho) {
            return Err(Error::InvalidConfig(format!("penalty rho must be positive, got {}", self.rho)));
        }
        if !(positive(self.ao_tol) && positive(self.sca_tol) && positive(self.rotation_tol)) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.ao_max_iter == 0 || self.sca_max_iter == 0 || self.rotation_max_iter == 0 {
            return Err(Error::InvalidConfig("iteration limits must be at least 1".into()));
        }
        if self.mu_candidates == 0 {
            return Err(Error::InvalidConfig("mu candidates must be at least 1".into()));
        }
        if self.n_randomizations == 0 {
            return Err(Error::InvalidConfig("randomizations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub weights: BeamformerWeights<T>,
    pub mu: T,
    pub angles: RotationAngles<T>,
    pub min_gain: T,
    pub min_gain_db: T,
    /// Minimum gain after initialization and after every AO round.
    pub ao_trace: Vec<T>,
    pub beamforming_traces: Vec<ScaTrace<T>>,
    pub rotation_traces: Vec<ScaTrace<T>>,
    /// SDR value of the initialization problem.
    pub sdr_bound: T,
    pub converged: bool,
    pub wall_time: Duration,
}

impl<T: Real> SolveReport<T> {
    /// Equality of every field except the wall-clock time.
    pub fn same_result(&self, other: &Self) -> bool {
        self.weights == other.weights
            && self.mu == other.mu
            && self.angles == other.angles
            && self.min_gain == other.min_gain
            && self.min_gain_db == other.min_gain_db
            && self.ao_trace == other.ao_trace
            && self.beamforming_traces == other.beamforming_traces
            && self.rotation_traces == other.rotation_traces
            && self.sdr_bound == other.sdr_bound
            && self.converged == other.converged
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Narrowband design at the carrier, no rotation.
    NarrowbandFixed,
    /// Wideband design, no rotation.
    WidebandFixed,
    /// Narrowband design, then rotation only.
    NarrowbandRotated,
    /// Wideband design with `μ` fixed by the center of the angular range.
    CenterAngle,
    /// Joint design.
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::NarrowbandFixed,
        Scheme::WidebandFixed,
        Scheme::NarrowbandRotated,
        Scheme::CenterAngle,
        Scheme::Proposed,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scheme::NarrowbandFixed => "1",
            Scheme::WidebandFixed => "2",
            Scheme::NarrowbandRotated => "3",
            Scheme::CenterAngle => "4",
            Scheme::Proposed => "proposed",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scheme::NarrowbandFixed => "narrowband beamforming without rotation",
            Scheme::WidebandFixed => "wideband beamforming without rotation",
            Scheme::NarrowbandRotated => "narrowband beamforming with rotation",
            Scheme::CenterAngle => "wideband beamforming with rotation fixed at the range center",
            Scheme::Proposed => "joint beamforming and rotation",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.id() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme '{s}', expected 1, 2, 3, 4 or proposed")))
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkResult<T> {
    pub scheme: Scheme,
    pub report: SolveReport<T>,
    /// Gain at every point of the wideband grid.
    pub gain_curve: Vec<T>,
    /// Grid the curve was evaluated on.
    pub grid: CompositeGrid<T>,
}

/// SDR solution and the randomized phases drawn from it.
#[derive(Clone, Debug)]
pub struct SdrInit<T> {
    pub weights: BeamformerWeights<T>,
    pub min_gain: T,
    /// Optimal value of the relaxation, an upper bound on any weights.
    pub sdr_bound: T,
}

/// SDR of the max-min problem at fixed `μ` followed by Gaussian randomization.
pub fn sdr_initialization<T: Real>(
    grid: &CompositeGrid<T>,
    n: usize,
    mu: T,
    params: &SolveParams<T>,
) -> Result<SdrInit<T>> {
    let problem = SdpProblem::new(gain_matrices(n, grid, mu), T::one() / T::from_usize_lossy(n));
    let sol = solve_maxmin_sdp(&problem).map_err(|e| e.context("SDR initialization"))?;
    let eig = sol.w.eigh();
    let roots: Vec<T> = eig.values.iter().map(|v| v.max(T::zero()).sqrt()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let inv_sqrt2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut best: Option<(T, BeamformerWeights<T>)> = None;
    for _ in 0..params.n_randomizations {
        let q: Vec<C<T>> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C::new(T::lit(re), T::lit(im)) * inv_sqrt2
            })
            .collect();
        let v: Vec<C<T>> = (0..n)
            .map(|i| (0..n).fold(C::new(T::zero(), T::zero()), |acc, k| acc + eig.vectors[(i, k)] * (q[k] * roots[k])))
            .collect();
        let cand = BeamformerWeights::from_complex(&v);
        let (g, _) = min_composite_gain(&cand, mu, grid)?;
        if best.as_ref().is_none_or(|(bg, _)| g > *bg) {
            best = Some((g, cand));
        }
    }
    let (min_gain, weights) = best.expect("at least one randomization");
    debug!(
        "SDR bound {:.6}, best randomization {:.6}",
        sol.sigma.to_f64_lossy(),
        min_gain.to_f64_lossy()
    );
    Ok(SdrInit {
        weights,
        min_gain,
        sdr_bound: sol.sigma,
    })
}

fn prepare<T: Real>(config: &ArrayConfig<T>, range: &AngularRange<T>, params: &SolveParams<T>) -> Result<CompositeGrid<T>> {
    config.validate()?;
    params.validate()?;
    composite_grid(config, range, params.samples)
}

/// Candidate starting rotations `1, …, −1`.
pub fn mu_candidates<T: Real>(count: usize) -> Vec<T> {
    if count <= 1 {
        return vec![T::one()];
    }
    let step = T::two() / T::from_usize_lossy(count - 1);
    (0..count)
        .map(|k| if k == count - 1 { -T::one() } else { T::one() - step * T::from_usize_lossy(k) })
        .collect()
}

/// SDR initialization at the candidate `μ` with the largest relaxation bound.
/// Ties keep the candidate closer to 1.
pub fn screened_initialization<T: Real>(
    grid: &CompositeGrid<T>,
    n: usize,
    params: &SolveParams<T>,
) -> Result<(SdrInit<T>, T)> {
    let mut best: Option<(T, T)> = None;
    let candidates = mu_candidates::<T>(params.mu_candidates);
    if candidates.len() > 1 {
        for &mu in &candidates {
            let problem = SdpProblem::new(gain_matrices(n, grid, mu), T::one() / T::from_usize_lossy(n));
            let bound = solve_maxmin_sdp(&problem)
                .map_err(|e| e.context(format!("SDR screening at mu = {mu}")))?
                .sigma;
            debug!("SDR bound at mu {:.3}: {:.6}", mu.to_f64_lossy(), bound.to_f64_lossy());
            if best.is_none_or(|(_, b)| bound > b) {
                best = Some((mu, bound));
            }
        }
    }
    let mu = best.map_or(T::one(), |(mu, _)| mu);
    Ok((sdr_initialization(grid, n, mu, params)?, mu))
}

/// Initial weights and rotation coefficient.
pub fn initialize<T: Real>(
    config: &ArrayConfig<T>,
    range: &AngularRange<T>,
    params: &SolveParams<T>,
) -> Result<(BeamformerWeights<T>, T)> {
    let grid = prepare(config, range, params)?;
    let (init, mu) = screened_initialization(&grid, config.num_antennas, params)?;
    Ok((init.weights, mu))
}

/// One beamformer SCA pass at fixed `μ`, seeded with `ωω^H`. Keeps the
/// incoming weights if the extracted ones are worse.
fn beamformer_step<T: Real>(
    grid: &CompositeGrid<T>,
    weights: &BeamformerWeights<T>,
    mu: T,
    params: &SolveParams<T>,
) -> Result<(BeamformerWeights<T>, ScaTrace<T>)> {
    let w0 = HermitianMatrix::outer(&weights.to_complex());
    let (w, trace) = sca_beamforming(grid, mu, &w0, params.rho, params.sca_tol, params.sca_max_iter)?;
    let cand = extract_weights(&w);
    let (g_new, _) = min_composite_gain(&cand, mu, grid)?;
    let (g_old, _) = min_composite_gain(weights, mu, grid)?;
    Ok((if g_new >= g_old { cand } else { weights.clone() }, trace))
}

#[allow(clippy::too_many_arguments)]
fn finish_report<T: Real>(
    grid: &CompositeGrid<T>,
    weights: BeamformerWeights<T>,
    mu: T,
    mut ao_trace: Vec<T>,
    beamforming_traces: Vec<ScaTrace<T>>,
    rotation_traces: Vec<ScaTrace<T>>,
    sdr_bound: T,
    converged: bool,
    started: Instant,
) -> Result<SolveReport<T>> {
    let (min_gain, _) = min_composite_gain(&weights, mu, grid)?;
    if ao_trace.is_empty() {
        ao_trace.push(min_gain);
    }
    Ok(SolveReport {
        angles: reconstruct_angles(mu)?,
        min_gain_db: to_db(min_gain, T::lit(crate::beam::DB_FLOOR)),
        weights,
        mu,
        min_gain,
        ao_trace,
        beamforming_traces,
        rotation_traces,
        sdr_bound,
        converged,
        wall_time: started.elapsed(),
    })
}

/// Alternating optimization of the phases and the rotation coefficient.
pub fn alternating_optimize<T: Real>(
    config: &ArrayConfig<T>,
    range: &AngularRange<T>,
    params: &SolveParams<T>,
) -> Result<SolveReport<T>> {
    let started = Instant::now();
    let grid = prepare(config, range, params)?;
    let (init, mu0) = screened_initialization(&grid, config.num_antennas, params)?;
    let mut weights = init.weights;
    let mut mu = mu0;
    let mut gain = init.min_gain;
    let mut ao_trace = vec![gain];
    let mut bf_traces = Vec::new();
    let mut rot_traces = Vec::new();
    let mut converged = false;

    for j in 1..=params.ao_max_iter {
        let (w_next, bt) =
            beamformer_step(&grid, &weights, mu, params).map_err(|e| e.context(format!("AO iteration {j}")))?;
        weights = w_next;
        bf_traces.push(bt);
        let (mu_next, rt) = sca_rotation(&grid, &weights.phases, mu, params.rotation_tol, params.rotation_max_iter)
            .map_err(|e| e.context(format!("AO iteration {j}")))?;
        mu = mu_next;
        rot_traces.push(rt);
        let (g_next, _) = min_composite_gain(&weights, mu, &grid)?;
        ao_trace.push(g_next);
        info!(
            "AO iteration {j}: mu {:.6}, min gain {:.4} dB",
            mu.to_f64_lossy(),
            (T::lit(10.0) * g_next.log10()).to_f64_lossy()
        );
        let improvement = (g_next - gain) / gain.abs().max(T::epsilon());
        gain = g_next;
        if improvement <= params.ao_tol {
            converged = true;
            break;
        }
    }
    finish_report(
        &grid,
        weights,
        mu,
        ao_trace,
        bf_traces,
        rot_traces,
        init.sdr_bound,
        converged,
        started,
    )
}

/// Weights designed for a fixed `μ` on `design_grid`: SDR initialization then
/// one beamformer SCA pass.
fn fixed_mu_design<T: Real>(
    design_grid: &CompositeGrid<T>,
    n: usize,
    mu: T,
    params: &SolveParams<T>,
) -> Result<(BeamformerWeights<T>, ScaTrace<T>, T)> {
    let init = sdr_initialization(design_grid, n, mu, params)?;
    let (weights, trace) = beamformer_step(design_grid, &init.weights, mu, params)?;
    Ok((weights, trace, init.sdr_bound))
}

/// Runs one comparison scheme. Every scheme is scored on the same wideband grid.
pub fn run_benchmark<T: Real>(
    scheme: Scheme,
    config: &ArrayConfig<T>,
    range: &AngularRange<T>,
    params: &SolveParams<T>,
) -> Result<BenchmarkResult<T>> {
    let started = Instant::now();
    let grid = prepare(config, range, params)?;
    let n = config.num_antennas;
    let narrow = || -> Result<_> {
        let mut cfg = *config;
        cfg.bandwidth = T::zero();
        let g = composite_grid(&cfg, range, params.samples)?;
        fixed_mu_design(&g, n, T::one(), params)
    };
    let context = |e: Error| e.context(format!("benchmark scheme {}", scheme.id()));

    let report = match scheme {
        Scheme::Proposed => alternating_optimize(config, range, params).map_err(context)?,
        Scheme::NarrowbandFixed | Scheme::WidebandFixed | Scheme::CenterAngle => {
            let (mu, (weights, trace, bound)) = match scheme {
                Scheme::NarrowbandFixed => (T::one(), narrow().map_err(context)?),
                Scheme::WidebandFixed => (T::one(), fixed_mu_design(&grid, n, T::one(), params).map_err(context)?),
                _ => {
                    let mu = range.center().cos();
                    (mu, fixed_mu_design(&grid, n, mu, params).map_err(context)?)
                }
            };
            finish_report(&grid, weights, mu, Vec::new(), vec![trace], Vec::new(), bound, true, started)?
        }
        Scheme::NarrowbandRotated => {
            let (weights, bt, bound) = narrow().map_err(context)?;
            let (mu, rt) = sca_rotation(&grid, &weights.phases, T::one(), params.rotation_tol, params.rotation_max_iter)
                .map_err(context)?;
            finish_report(&grid, weights, mu, Vec::new(), vec![bt], vec![rt], bound, true, started)?
        }
    };
    let gain_curve = composite_gain_curve(&report.weights, report.mu, &grid);
    Ok(BenchmarkResult {
        scheme,
        report,
        gain_curve,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (ArrayConfig<f64>, AngularRange<f64>, SolveParams<f64>) {
        let cfg = ArrayConfig::new(8, 1e12, 1e11).unwrap();
        let range = AngularRange::from_degrees(0.0, 60.0).unwrap();
        let params = SolveParams {
            samples: 16,
            n_randomizations: 20,
            ..SolveParams::default()
        };
        (cfg, range, params)
    }

    #[test]
    fn scheme_ids_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.id().parse::<Scheme>().unwrap(), s);
        }
        assert!("5".parse::<Scheme>().is_err());
    }

    #[test]
    fn degenerate_domain_gives_matched_filter() {
        let cfg = ArrayConfig::<f64>::new(6, 1e12, 0.0).unwrap();
        let range = AngularRange::new(0.4, 0.4).unwrap();
        let params = SolveParams {
            samples: 1,
            n_randomizations: 5,
            ..SolveParams::default()
        };
        let r = alternating_optimize(&cfg, &range, &params).unwrap();
        assert!((r.min_gain - 6.0).abs() < 1e-6, "{}", r.min_gain);
        assert!(r.converged);
        assert_eq!(r.ao_trace.len(), 2);
    }

    #[test]
    fn small_solve_is_consistent_and_deterministic() {
        let (cfg, range, params) = small();
        let a = alternating_optimize(&cfg, &range, &params).unwrap();
        let b = alternating_optimize(&cfg, &range, &params).unwrap();
        assert!(a.same_result(&b));
        let grid = composite_grid(&cfg, &range, params.samples).unwrap();
        let (g, _) = min_composite_gain(&a.weights, a.mu, &grid).unwrap();
        assert_eq!(g, a.min_gain);
        assert!(a.min_gain <= 8.0 + 1e-9);
        for p in a.ao_trace.windows(2) {
            assert!(p[1] >= p[0] - 1e-3 * p[0], "{p:?}");
        }
        assert!((a.angles.rotation_coefficient() - a.mu).abs() < 1e-12);
    }

    #[test]
    fn initialization_is_bounded_by_relaxation() {
        let (cfg, range, params) = small();
        let grid = composite_grid(&cfg, &range, params.samples).unwrap();
        let init = sdr_initialization(&grid, 8, 1.0, &params).unwrap();
        assert!(init.min_gain <= init.sdr_bound + 1e-9);
        let single = SolveParams {
            mu_candidates: 1,
            ..params.clone()
        };
        let (w, mu) = initialize(&cfg, &range, &single).unwrap();
        assert_eq!(mu, 1.0);
        assert_eq!(w, init.weights);
        let (_, mu) = initialize(&cfg, &range, &params).unwrap();
        assert!(mu.abs() < 1e-12, "screening picks boresight, got {mu}");
    }

    #[test]
    fn candidate_grid() {
        assert_eq!(mu_candidates::<f64>(1), vec![1.0]);
        assert_eq!(mu_candidates::<f64>(5), vec![1.0, 0.5, 0.0, -0.5, -1.0]);
    }

    #[test]
    fn center_angle_zero_matches_wideband_fixed() {
        let (cfg, _, params) = small();
        let range = AngularRange::from_degrees(-30.0, 30.0).unwrap();
        let b2 = run_benchmark(Scheme::WidebandFixed, &cfg, &range, &params).unwrap();
        let b4 = run_benchmark(Scheme::CenterAngle, &cfg, &range, &params).unwrap();
        assert_eq!(b4.report.mu, 1.0);
        assert_eq!(b2.report.weights, b4.report.weights);
        assert_eq!(b2.gain_curve.len(), params.samples);
    }
}
