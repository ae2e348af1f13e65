//! Beamformer update for a fixed rotation coefficient.
//!
//! The unit-modulus constraint is lifted to `W = ωω^H` with `W_nn = 1/N`, and
//! the rank-one requirement becomes the penalty `ρ(‖W‖_* − ‖W‖_2)`. Each SCA
//! step linearizes the spectral norm at the current point and solves one SDP.

use log::debug;

use crate::beam::BeamformerWeights;
use crate::composite::CompositeGrid;
use crate::conic::{solve_maxmin_sdp, GainMatrix, SdpProblem};
use crate::error::{Error, Result};
use crate::geometry::steering_vector_composite;
use crate::linalg::HermitianMatrix;
use crate::num::Real;

/// Gap ratio above which the penalty is doubled once.
pub const ESCALATION_RATIO: f64 = 1e-2;

/// Per-iteration record of an SCA loop.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaTrace<T> {
    /// Objective at the starting point followed by one value per iteration.
    pub objective_values: Vec<T>,
    /// Rank-one gap of the iterate matching each objective value. Empty for
    /// the rotation loop.
    pub rank_one_gaps: Vec<T>,
    /// Certified relative duality gap of each SDP solve.
    pub solver_gaps: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Penalty weight of the recorded run.
    pub rho: T,
    /// Whether the penalty was doubled after a high-rank first run.
    pub escalated: bool,
}

impl<T: Real> ScaTrace<T> {
    pub(crate) fn empty(rho: T) -> Self {
        Self {
            objective_values: Vec::new(),
            rank_one_gaps: Vec::new(),
            solver_gaps: Vec::new(),
            converged: false,
            iterations: 0,
            rho,
            escalated: false,
        }
    }

    pub fn final_objective(&self) -> Option<T> {
        self.objective_values.last().copied()
    }
}

fn check_finite<T: Real>(w: &HermitianMatrix<T>) -> Result<()> {
    if w.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `‖W‖_* − ‖W‖_2`; equals `Tr W − λ_max` for PSD `W`.
pub fn rank_one_gap<T: Real>(w: &HermitianMatrix<T>) -> Result<T> {
    check_finite(w)?;
    let ev = w.eigenvalues();
    let nuclear: T = ev.iter().map(|v| v.abs()).sum();
    let spectral = ev.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    Ok((nuclear - spectral).max(T::zero()))
}

/// `s s^H` for a unit top eigenvector `s`. Ties go to the first eigenvector in
/// the eigensolver's sorted output.
pub fn spectral_subgradient<T: Real>(w: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    check_finite(w)?;
    if w.dim() == 0 {
        return Err(Error::Contract("empty matrix".into()));
    }
    Ok(HermitianMatrix::outer(&w.eigh().vector(0)))
}

/// Unit-modulus projection of the principal component `√λ_max · s`.
pub fn extract_weights<T: Real>(w: &HermitianMatrix<T>) -> BeamformerWeights<T> {
    let eig = w.eigh();
    let lam = eig.values.first().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt();
    let pc: Vec<_> = eig.vector(0).into_iter().map(|z| z * lam).collect();
    BeamformerWeights::from_complex(&pc)
}

/// `V_l = a(Ω_l, μ) a(Ω_l, μ)^H` for every grid point.
pub fn gain_matrices<T: Real>(n: usize, grid: &CompositeGrid<T>, mu: T) -> Vec<GainMatrix<T>> {
    grid.samples()
        .iter()
        .map(|&w| GainMatrix::rank_one(steering_vector_composite(n, w, mu).0))
        .collect()
}

/// Penalized objective `min_l Tr(V_l W) − ρ(Tr W − λ_max(W))`.
pub fn penalized_objective<T: Real>(gains: &[GainMatrix<T>], w: &HermitianMatrix<T>, rho: T) -> Result<T> {
    let sigma = gains
        .iter()
        .map(|g| g.trace_with(w.as_matrix()))
        .fold(T::infinity(), T::min);
    Ok(sigma - rho * rank_one_gap(w)?)
}

/// SCA over `W` for fixed `μ`.
///
/// Stops when `|v⁽ⁱ⁺¹⁾ − v⁽ⁱ⁾| ≤ tol · max(1, |v⁽ⁱ⁾|)` or after `max_iter`
/// SDP solves. If the result is still far from rank one the penalty is
/// doubled and the loop restarts from the returned `W`; the trace then
/// describes the second run.
pub fn sca_beamforming<T: Real>(
    grid: &CompositeGrid<T>,
    mu: T,
    w_init: &HermitianMatrix<T>,
    rho: T,
    tol: T,
    max_iter: usize,
) -> Result<(HermitianMatrix<T>, ScaTrace<T>)> {
    if !(rho > T::zero() && rho.is_finite()) {
        return Err(Error::InvalidConfig(format!("penalty rho must be positive, got {rho}")));
    }
    if !(tol > T::zero()) || max_iter == 0 {
        return Err(Error::InvalidConfig("SCA needs tol > 0 and max_iter >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty composite grid".into()));
    }
    let n = w_init.dim();
    if n == 0 {
        return Err(Error::Contract("empty initial matrix".into()));
    }
    let gains = gain_matrices(n, grid, mu);

    let (w, trace) = sca_run(&gains, w_init, rho, tol, max_iter)?;
    let gap = trace.rank_one_gaps.last().copied().unwrap_or_else(T::zero);
    let lead = w.eigenvalues()[0];
    if lead > T::zero() && gap / lead > T::lit(ESCALATION_RATIO) {
        debug!("rank-one gap ratio {:.3e}, doubling rho", (gap / lead).to_f64_lossy());
        let (w, mut trace) = sca_run(&gains, &w, rho * T::two(), tol, max_iter)?;
        trace.escalated = true;
        return Ok((w, trace));
    }
    Ok((w, trace))
}

fn sca_run<T: Real>(
    gains: &[GainMatrix<T>],
    w_init: &HermitianMatrix<T>,
    rho: T,
    tol: T,
    max_iter: usize,
) -> Result<(HermitianMatrix<T>, ScaTrace<T>)> {
    let n = w_init.dim();
    let diag = T::one() / T::from_usize_lossy(n);
    let mut trace = ScaTrace::empty(rho);
    let mut w = w_init.clone();
    let mut v = penalized_objective(gains, &w, rho)?;
    trace.objective_values.push(v);
    trace.rank_one_gaps.push(rank_one_gap(&w)?);

    for i in 0..max_iter {
        let d = spectral_subgradient(&w)?.scale(rho);
        let problem = SdpProblem::new(gains.to_vec(), diag).with_linear_term(d);
        let sol = solve_maxmin_sdp(&problem).map_err(|e| e.context(format!("beamforming SCA iteration {}", i + 1)))?;
        w = sol.w;
        let v_next = penalized_objective(gains, &w, rho)?;
        trace.objective_values.push(v_next);
        trace.rank_one_gaps.push(rank_one_gap(&w)?);
        trace.solver_gaps.push(sol.residuals.gap);
        trace.iterations = i + 1;
        let done = (v_next - v).abs() <= tol * v.abs().max(T::one());
        v = v_next;
        if done {
            trace.converged = true;
            break;
        }
    }
    Ok((w, trace))
}
