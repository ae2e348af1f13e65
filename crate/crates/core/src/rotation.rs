//! Rotation-coefficient update for fixed phases.
//!
//! Writing the gain as `(1/N) Σ_n Σ_m cos(Ω μ (n−m) − (ϑ_n − ϑ_m))` and
//! bounding each cosine by `cos z₀ − sin z₀ (z−z₀) − ½(z−z₀)²` gives a concave
//! quadratic minorant in `μ` per grid point. Maximizing the pointwise minimum
//! of those quadratics over `[−1, 1]` is a scalar problem solved exactly.

use log::trace;

use crate::beam::composite_gain;
use crate::beamforming::ScaTrace;
use crate::composite::CompositeGrid;
use crate::conic::{solve_scalar_maxmin_quadratic, Quadratic};
use crate::error::{Error, Result};
use crate::geometry::RotationAngles;
use crate::num::Real;

/// Quadratic minorant `A μ² + B μ + C` of the gain at one grid point.
///
/// Also kept in centred form `g₀ + d (μ − μ₀) + A (μ − μ₀)²`, which `eval`
/// uses: the expanded coefficients lose about `|A| ε` to cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurrogateCoeffs<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub mu0: T,
    /// Gain at `mu0`.
    pub value0: T,
    /// Derivative at `mu0`.
    pub slope0: T,
}

impl<T: Real> SurrogateCoeffs<T> {
    pub fn eval(&self, mu: T) -> T {
        let d = mu - self.mu0;
        self.value0 + (self.slope0 + self.a * d) * d
    }
}

impl<T: Real> From<SurrogateCoeffs<T>> for Quadratic<T> {
    fn from(s: SurrogateCoeffs<T>) -> Self {
        Quadratic::new(s.a, s.b, s.c)
    }
}

/// Minorant of `G(Ω, μ)` that touches it at `μ = mu0`.
pub fn surrogate_coeffs<T: Real>(omega: T, phases: &[T], mu0: T) -> SurrogateCoeffs<T> {
    let n = phases.len();
    let (mut a, mut slope, mut value) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            let k = omega * (T::from_usize_lossy(i) - T::from_usize_lossy(j));
            let z0 = k * mu0 - (phases[i] - phases[j]);
            let (s0, c0) = z0.sin_cos();
            a = a - T::half() * k * k;
            slope = slope - k * s0;
            value = value + c0;
        }
    }
    let inv_n = T::one() / T::from_usize_lossy(n.max(1));
    let (a, slope0, value0) = (a * inv_n, slope * inv_n, value * inv_n);
    let two = T::one() + T::one();
    SurrogateCoeffs {
        a,
        b: slope0 - two * a * mu0,
        c: value0 - slope0 * mu0 + a * mu0 * mu0,
        mu0,
        value0,
        slope0,
    }
}

fn min_gain<T: Real>(grid: &CompositeGrid<T>, phases: &[T], mu: T) -> T {
    grid.samples()
        .iter()
        .map(|&w| composite_gain(phases, w, mu))
        .fold(T::infinity(), T::min)
}

/// SCA over `μ ∈ [−1, 1]` for fixed phases.
///
/// The trace records the true minimum gain at the start and after every
/// step. Stops when `|Δμ| ≤ tol`, when the surrogate optimum moves by at
/// most `tol`, or after `max_iter` steps.
pub fn sca_rotation<T: Real>(
    grid: &CompositeGrid<T>,
    phases: &[T],
    mu_init: T,
    tol: T,
    max_iter: usize,
) -> Result<(T, ScaTrace<T>)> {
    if !(mu_init.abs() <= T::one()) {
        return Err(Error::Domain(format!("mu_init = {mu_init} is outside [-1, 1]")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty composite grid".into()));
    }
    if phases.is_empty() {
        return Err(Error::Contract("phase vector is empty".into()));
    }
    if !(tol > T::zero()) || max_iter == 0 {
        return Err(Error::InvalidConfig("SCA needs tol > 0 and max_iter >= 1".into()));
    }

    let mut trace = ScaTrace::empty(T::zero());
    let mut mu = mu_init;
    let mut g = min_gain(grid, phases, mu);
    trace.objective_values.push(g);
    let mut prev_sigma: Option<T> = None;

    for i in 0..max_iter {
        let quads: Vec<Quadratic<T>> = grid
            .samples()
            .iter()
            .map(|&w| surrogate_coeffs(w, phases, mu).into())
            .collect();
        let step = solve_scalar_maxmin_quadratic(&quads, -T::one(), T::one())
            .map_err(|e| e.context(format!("rotation SCA iteration {}", i + 1)))?;
        let g_next = min_gain(grid, phases, step.mu);
        trace.iterations = i + 1;
        // The minorant guarantees ascent; rounding can still undo it.
        if g_next < g {
            trace.objective_values.push(g);
            trace.converged = true;
            break;
        }
        let dmu = (step.mu - mu).abs();
        let dsigma = prev_sigma.map_or(T::infinity(), |p| (step.sigma - p).abs());
        trace!(
            "rotation SCA {}: mu {:.9} min gain {:.9}",
            i + 1,
            step.mu.to_f64_lossy(),
            g_next.to_f64_lossy()
        );
        mu = step.mu;
        g = g_next;
        trace.objective_values.push(g);
        prev_sigma = Some(step.sigma);
        if dmu <= tol || dsigma <= tol {
            trace.converged = true;
            break;
        }
    }
    Ok((mu, trace))
}

/// One rotation realizing `μ`: `α = β = 0`, `γ = arccos μ`.
pub fn reconstruct_angles<T: Real>(mu: T) -> Result<RotationAngles<T>> {
    if !(mu.abs() <= T::one()) {
        return Err(Error::Domain(format!("rotation coefficient {mu} is outside [-1, 1]")));
    }
    RotationAngles::new(T::zero(), T::zero(), mu.acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{sample_grid, CompositeBounds};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn grid(lo: f64, hi: f64, l: usize) -> CompositeGrid<f64> {
        sample_grid(CompositeBounds { lo, hi }, l).unwrap()
    }

    #[test]
    fn two_element_square_coefficient() {
        let s = surrogate_coeffs(1.0f64, &[0.3, -0.2], 0.4);
        assert!((s.a + 0.5).abs() < 1e-15);
    }

    #[test]
    fn tight_at_anchor() {
        let phases = [0.1f64, 1.4, -0.7, 2.2, 0.0];
        for &(w, mu0) in &[(1.7, 0.3), (3.0, -0.8), (0.4, 1.0)] {
            let s = surrogate_coeffs(w, &phases, mu0);
            assert!((s.eval(mu0) - composite_gain(&phases, w, mu0)).abs() < 1e-12);
            assert!(s.a <= 0.0);
        }
    }

    #[test]
    fn coherent_anchor_reaches_n() {
        let n = 6;
        let (w, mu0) = (2.0, 0.35);
        let phases: Vec<f64> = (0..n).map(|k| w * mu0 * k as f64).collect();
        let s = surrogate_coeffs(w, &phases, mu0);
        assert!((s.eval(mu0) - n as f64).abs() < 1e-12);
    }

    #[test]
    fn minorant_holds_on_a_dense_grid() {
        let phases = [0.5, -1.0, 2.0, 0.25];
        let s = surrogate_coeffs(2.4, &phases, -0.2);
        for i in 0..=2000 {
            let mu = -1.0 + i as f64 / 1000.0;
            assert!(s.eval(mu) <= composite_gain(&phases, 2.4, mu) + 1e-9);
        }
    }

    #[test]
    fn uniform_phases_stay_at_boresight() {
        let g = grid(1.5, 3.3, 32);
        let (mu, trace) = sca_rotation(&g, &[0.0; 8], 0.0, 1e-6, 50).unwrap();
        assert!(mu.abs() < 1e-9);
        assert!((trace.final_objective().unwrap() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn matched_single_point_is_fixed() {
        let (w, mu0) = (1.9, 0.6);
        let phases: Vec<f64> = (0..5).map(|k| w * mu0 * k as f64).collect();
        let (mu, trace) = sca_rotation(&grid(w, w, 1), &phases, mu0, 1e-6, 50).unwrap();
        assert!((mu - mu0).abs() < 1e-9);
        assert!(trace.converged);
    }

    #[test]
    fn ascent_from_boresight_start() {
        let g = grid(1.49, 3.3, 32);
        let phases = [0.0, 0.9, 2.1, 0.3, -1.2, 0.8];
        let (_, trace) = sca_rotation(&g, &phases, 1.0, 1e-6, 50).unwrap();
        for p in trace.objective_values.windows(2) {
            assert!(p[1] >= p[0] - 1e-9);
        }
    }

    #[test]
    fn angle_reconstruction() {
        let a = reconstruct_angles(1.0).unwrap();
        assert_eq!((a.alpha, a.beta, a.gamma), (0.0, 0.0, 0.0));
        assert!((reconstruct_angles(0.0).unwrap().gamma - FRAC_PI_2).abs() < 1e-15);
        let a = reconstruct_angles(0.5).unwrap();
        assert!((a.gamma - FRAC_PI_3).abs() < 1e-15);
        assert!((a.rotation_coefficient() - 0.5).abs() < 1e-12);
        assert!(matches!(reconstruct_angles(1.5), Err(Error::Domain(_))));
        assert!(sca_rotation(&grid(1.0, 1.0, 1), &[0.0], 1.2, 1e-6, 5).is_err());
    }
}
