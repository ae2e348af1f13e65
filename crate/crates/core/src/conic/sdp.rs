//! Primal-dual interior-point solver for the max-min gain SDP
//!
//! ```text
//! maximize   ς + Re Tr(D W)
//! subject to Tr(V_l W) ≥ ς,   l = 1..L
//!            W_nn = d,        n = 1..N
//!            W ⪰ 0
//! ```
//!
//! Each `V_l` is PSD, so `ς ≥ 0` at the optimum and it is treated as a
//! nonnegative variable. With slacks `s_l = Tr(V_l W) - ς` the problem is a
//! standard-form conic program over `H^N_+ × R^L_+ × R_+` with `L + N`
//! equality constraints, solved with the HKM direction and Mehrotra's
//! predictor-corrector. Low-rank factors of `V_l` keep the Schur complement
//! assembly cheap.

use log::{debug, trace};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, hpd_inverse, lower_triangular_inverse, solve_real, CMatrix, HermitianMatrix};
use crate::num::{dot_h, Real, C};

const STEP_FRACTION: f64 = 0.98;

/// PSD matrix stored through a factorization `V = Σ_r f_r f_r^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct GainMatrix<T> {
    factors: Vec<Vec<C<T>>>,
}

impl<T: Real> GainMatrix<T> {
    /// `v v^H`.
    pub fn rank_one(v: Vec<C<T>>) -> Self {
        Self { factors: vec![v] }
    }

    pub fn from_factors(factors: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = factors.first().map(Vec::len).unwrap_or(0);
        if factors.is_empty() || n == 0 {
            return Err(Error::Contract("gain matrix needs at least one non-empty factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
        Ok(Self { factors })
    }

    /// `scale · I_n`.
    pub fn scaled_identity(n: usize, scale: T) -> Self {
        let s = scale.sqrt();
        let factors = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| if i == k { C::new(s, T::zero()) } else { C::new(T::zero(), T::zero()) })
                    .collect()
            })
            .collect();
        Self { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors[0].len()
    }

    pub fn factors(&self) -> &[Vec<C<T>>] {
        &self.factors
    }

    pub fn to_matrix(&self) -> HermitianMatrix<T> {
        let n = self.dim();
        let mut acc = HermitianMatrix::zeros(n);
        for f in &self.factors {
            acc = &acc + &HermitianMatrix::outer(f);
        }
        acc
    }

    /// `Re Tr(V W) = Σ_r f_r^H W f_r`.
    pub fn trace_with(&self, w: &CMatrix<T>) -> T {
        self.factors
            .iter()
            .map(|f| dot_h(f, &w.mat_vec(f)).re)
            .sum()
    }

    fn add_scaled_into(&self, scale: T, target: &mut CMatrix<T>) {
        let n = self.dim();
        for f in &self.factors {
            for i in 0..n {
                let fi = f[i] * scale;
                for j in 0..n {
                    target[(i, j)] = target[(i, j)] + fi * f[j].conj();
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    pub gain_matrices: Vec<GainMatrix<T>>,
    /// `D` in the objective `ς + Re Tr(D W)`.
    pub linear_term: HermitianMatrix<T>,
    /// Required value of every diagonal entry of `W`.
    pub diag_value: T,
    /// Relative duality gap target.
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> SdpProblem<T> {
    pub const DEFAULT_MAX_ITERATIONS: usize = 100;

    pub fn default_tolerance() -> T {
        T::lit(1e-6).max(T::epsilon().sqrt() * T::lit(10.0))
    }

    /// Problem with zero linear term and default settings.
    pub fn new(gain_matrices: Vec<GainMatrix<T>>, diag_value: T) -> Self {
        let n = gain_matrices.first().map(GainMatrix::dim).unwrap_or(0);
        Self {
            gain_matrices,
            linear_term: HermitianMatrix::zeros(n),
            diag_value,
            tolerance: Self::default_tolerance(),
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_linear_term(mut self, d: HermitianMatrix<T>) -> Self {
        self.linear_term = d;
        self
    }

    pub fn dim(&self) -> usize {
        self.linear_term.dim()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::Contract("empty SDP".into()));
        }
        if self.gain_matrices.is_empty() {
            return Err(Error::Contract("at least one gain constraint is required".into()));
        }
        if let Some(g) = self.gain_matrices.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.dim(),
            });
        }
        if !(self.diag_value > T::zero() && self.diag_value.is_finite()) {
            return Err(Error::Contract("diagonal value must be positive".into()));
        }
        if !self.linear_term.is_finite()
            || self
                .gain_matrices
                .iter()
                .flat_map(|g| g.factors.iter().flatten())
                .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        if !(self.tolerance > T::zero()) {
            return Err(Error::Contract("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// `ς + Re Tr(D W)` with `ς = min_l Tr(V_l W)`.
    pub fn objective_of(&self, w: &HermitianMatrix<T>) -> T {
        let sigma = self
            .gain_matrices
            .iter()
            .map(|g| g.trace_with(w.as_matrix()))
            .fold(T::infinity(), T::min);
        sigma + self.linear_term.inner(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpResiduals<T> {
    /// Relative primal infeasibility at the last interior iterate.
    pub primal: T,
    /// Relative dual infeasibility.
    pub dual: T,
    /// Relative gap between the returned objective and the dual bound.
    pub gap: T,
    /// `max(0, -λ_min(W))`.
    pub psd: T,
    /// `max_n |W_nn - d|`.
    pub diag: T,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub w: HermitianMatrix<T>,
    pub sigma: T,
    pub objective: T,
    /// Upper bound on the optimal objective from the dual iterate.
    pub dual_bound: T,
    pub residuals: SdpResiduals<T>,
    pub iterations: usize,
}

struct Iterate<T> {
    x: CMatrix<T>,
    s: Vec<T>,
    sig: T,
    y: Vec<T>,
    z: CMatrix<T>,
    zs: Vec<T>,
    zsig: T,
}

struct Direction<T> {
    dx: CMatrix<T>,
    ds: Vec<T>,
    dsig: T,
    dy: Vec<T>,
    dz: CMatrix<T>,
    dzs: Vec<T>,
    dzsig: T,
}

struct Residuals<T> {
    rp: Vec<T>,
    rd: CMatrix<T>,
    rd_s: Vec<T>,
    rd_sig: T,
}

struct Solver<'a, T> {
    p: &'a SdpProblem<T>,
    n: usize,
    l: usize,
    neg_d: CMatrix<T>,
}

impl<'a, T: Real> Solver<'a, T> {
    fn m(&self) -> usize {
        self.l + self.n
    }

    /// `A^*_W(y) = Σ y_l V_l + Diag(y_diag)`.
    fn adjoint_w(&self, y: &[T]) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.n);
        for (g, &yl) in self.p.gain_matrices.iter().zip(&y[..self.l]) {
            g.add_scaled_into(yl, &mut out);
        }
        for k in 0..self.n {
            out[(k, k)].re = out[(k, k)].re + y[self.l + k];
        }
        out
    }

    fn residuals(&self, it: &Iterate<T>) -> Residuals<T> {
        let mut rp = Vec::with_capacity(self.m());
        for (g, &sl) in self.p.gain_matrices.iter().zip(&it.s) {
            rp.push(-(g.trace_with(&it.x) - sl - it.sig));
        }
        for k in 0..self.n {
            rp.push(self.p.diag_value - it.x[(k, k)].re);
        }
        let aty = self.adjoint_w(&it.y);
        let rd = &(&self.neg_d - &aty) - &it.z;
        let rd_s = it.y[..self.l].iter().zip(&it.zs).map(|(&y, &z)| y - z).collect();
        let ysum: T = it.y[..self.l].iter().copied().sum();
        Residuals {
            rp,
            rd,
            rd_s,
            rd_sig: ysum - T::one() - it.zsig,
        }
    }

    fn complementarity(&self, it: &Iterate<T>) -> T {
        let lp: T = it.s.iter().zip(&it.zs).map(|(&a, &b)| a * b).sum();
        let nu = T::from_usize_lossy(self.n + self.l + 1);
        (it.x.re_trace_product(&it.z) + lp + it.sig * it.zsig) / nu
    }

    fn primal_objective(&self, it: &Iterate<T>) -> T {
        self.neg_d.re_trace_product(&it.x) - it.sig
    }

    fn dual_objective(&self, it: &Iterate<T>) -> T {
        self.p.diag_value * it.y[self.l..].iter().copied().sum::<T>()
    }

    fn direction(
        &self,
        it: &Iterate<T>,
        zinv: &CMatrix<T>,
        res: &Residuals<T>,
        target: T,
        corr: Option<&Direction<T>>,
    ) -> Result<Direction<T>> {
        let (n, l, m) = (self.n, self.l, self.m());

        // R Z^{-1} = target Z^{-1} - X - (dXa dZa) Z^{-1}
        let mut rzinv = &zinv.scale(target) - &it.x;
        if let Some(c) = corr {
            let cz = c.dx.matmul(&c.dz).matmul(zinv);
            rzinv = &rzinv - &cz;
        }
        let xrdz = it.x.matmul(&res.rd).matmul(zinv);
        let g = &rzinv - &xrdz;

        let rs: Vec<T> = (0..l)
            .map(|k| {
                let cc = corr.map_or(T::zero(), |c| c.ds[k] * c.dzs[k]);
                target - it.s[k] * it.zs[k] - cc
            })
            .collect();
        let rsig = target - it.sig * it.zsig - corr.map_or(T::zero(), |c| c.dsig * c.dzsig);

        let factors: Vec<&Vec<Vec<C<T>>>> = self.p.gain_matrices.iter().map(|g| &g.factors).collect();
        let px: Vec<Vec<Vec<C<T>>>> = factors
            .iter()
            .map(|fs| fs.iter().map(|f| it.x.mat_vec(f)).collect())
            .collect();
        let qz: Vec<Vec<Vec<C<T>>>> = factors
            .iter()
            .map(|fs| fs.iter().map(|f| zinv.mat_vec(f)).collect())
            .collect();

        let mut mat = vec![T::zero(); m * m];
        for a in 0..l {
            for b in a..l {
                let mut v = T::zero();
                for (fa, qa) in factors[a].iter().zip(&qz[a]) {
                    for (fb, pb) in factors[b].iter().zip(&px[b]) {
                        v = v + (dot_h(fa, pb) * dot_h(fb, qa)).re;
                    }
                }
                mat[a * m + b] = v;
                mat[b * m + a] = v;
            }
            for k in 0..n {
                let v: T = px[a]
                    .iter()
                    .zip(&qz[a])
                    .map(|(pv, qv)| (pv[k].conj() * qv[k]).re)
                    .sum();
                mat[a * m + l + k] = v;
                mat[(l + k) * m + a] = v;
            }
        }
        for k in 0..n {
            for j in 0..n {
                mat[(l + k) * m + l + j] = (it.x[(k, j)] * zinv[(j, k)]).re;
            }
        }
        let sig_ratio = it.sig / it.zsig;
        for a in 0..l {
            for b in 0..l {
                mat[a * m + b] = mat[a * m + b] + sig_ratio;
            }
            mat[a * m + a] = mat[a * m + a] + it.s[a] / it.zs[a];
        }

        let sig_term = (rsig - it.sig * res.rd_sig) / it.zsig;
        let mut rhs = Vec::with_capacity(m);
        for a in 0..l {
            let tr_g: T = factors[a].iter().map(|f| dot_h(f, &g.mat_vec(f)).re).sum();
            rhs.push(res.rp[a] - tr_g + (rs[a] - it.s[a] * res.rd_s[a]) / it.zs[a] + sig_term);
        }
        for k in 0..n {
            rhs.push(res.rp[l + k] - g[(k, k)].re);
        }

        let dy = solve_real(mat, rhs)?;
        let dz = &res.rd - &self.adjoint_w(&dy);
        let dx = (&g + &it.x.matmul(&self.adjoint_w(&dy)).matmul(zinv))
            .hermitian_part()
            .into_matrix();
        let dzs: Vec<T> = (0..l).map(|k| res.rd_s[k] + dy[k]).collect();
        let dzsig = res.rd_sig + dy[..l].iter().copied().sum::<T>();
        let ds = (0..l).map(|k| (rs[k] - it.s[k] * dzs[k]) / it.zs[k]).collect();
        let dsig = (rsig - it.sig * dzsig) / it.zsig;
        Ok(Direction {
            dx,
            ds,
            dsig,
            dy,
            dz,
            dzs,
            dzsig,
        })
    }
}

/// Largest `α ≤ cap` keeping `M + α dM` PSD, given the Cholesky inverse of `M`.
fn psd_step<T: Real>(linv: &CMatrix<T>, dm: &CMatrix<T>) -> T {
    let k = linv.matmul(dm).matmul(&linv.adjoint()).hermitian_part();
    let lmin = k.min_eigenvalue();
    if lmin >= T::zero() {
        T::infinity()
    } else {
        -T::one() / lmin
    }
}

fn lp_step<T: Real>(x: &[T], dx: &[T]) -> T {
    x.iter()
        .zip(dx)
        .filter(|(_, &d)| d < T::zero())
        .map(|(&v, &d)| -v / d)
        .fold(T::infinity(), T::min)
}

fn step_lengths<T: Real>(
    it: &Iterate<T>,
    dir: &Direction<T>,
    lx: &CMatrix<T>,
    lz: &CMatrix<T>,
) -> (T, T) {
    let ap = psd_step(lx, &dir.dx)
        .min(lp_step(&it.s, &dir.ds))
        .min(lp_step(&[it.sig], &[dir.dsig]));
    let ad = psd_step(lz, &dir.dz)
        .min(lp_step(&it.zs, &dir.dzs))
        .min(lp_step(&[it.zsig], &[dir.dzsig]));
    (ap, ad)
}

fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// Solve the max-min gain SDP to the requested relative duality gap.
///
/// The returned `W` has its diagonal rescaled to exactly `diag_value` and
/// `ς = min_l Tr(V_l W)`, so the reported objective is attained by a
/// feasible point and the gap is certified against the dual bound.
pub fn solve_maxmin_sdp<T: Real>(problem: &SdpProblem<T>) -> Result<SdpSolution<T>> {
    problem.validate()?;
    let n = problem.dim();
    let l = problem.gain_matrices.len();
    let solver = Solver {
        p: problem,
        n,
        l,
        neg_d: problem.linear_term.as_matrix().scale(-T::one()),
    };
    let m = solver.m();
    let tol = problem.tolerance;
    // The finishing step restores the diagonal exactly, so primal residuals
    // only need to be small enough for the certified gap to hold. The dual
    // residual backs the bound and is held tighter.
    let pfeas_tol = tol;
    let dfeas_tol = tol * T::lit(1e-2);

    let b_norm = problem.diag_value * T::from_usize_lossy(n).sqrt();
    let c_norm = problem.linear_term.as_matrix().frobenius_norm() + T::one();

    // Primal start satisfies the diagonal constraints; dual start is feasible.
    let y_l = T::two() / T::from_usize_lossy(l);
    let mut y = vec![y_l; l];
    let mut dual_w = solver.neg_d.clone();
    for g in &problem.gain_matrices {
        g.add_scaled_into(-y_l, &mut dual_w);
    }
    let kappa = dual_w.frobenius_norm() + T::one();
    y.extend(std::iter::repeat_n(-kappa, n));
    for k in 0..n {
        dual_w[(k, k)].re = dual_w[(k, k)].re + kappa;
    }
    let mut it = Iterate {
        x: CMatrix::identity(n).scale(problem.diag_value),
        s: vec![T::one(); l],
        sig: T::one(),
        y,
        z: dual_w.hermitian_part().into_matrix(),
        zs: vec![y_l; l],
        zsig: T::one(),
    };
    debug_assert_eq!(it.y.len(), m);

    let mut last = (T::infinity(), T::infinity(), T::infinity());
    for iter in 0..problem.max_iterations {
        let res = solver.residuals(&it);
        let pobj = solver.primal_objective(&it);
        let dobj = solver.dual_objective(&it);
        let gap = (pobj - dobj).abs() / (T::one() + pobj.abs() + dobj.abs());
        let pinf = norm2(&res.rp) / (T::one() + b_norm);
        let dinf = (res.rd.frobenius_norm().powi(2) + res.rd_s.iter().map(|v| *v * *v).sum::<T>()
            + res.rd_sig * res.rd_sig)
            .sqrt()
            / (T::one() + c_norm);
        last = (pinf, dinf, gap);
        trace!(
            "sdp iter {iter}: pobj {:.10e} dobj {:.10e} gap {:.3e} pinf {:.3e} dinf {:.3e}",
            pobj.to_f64_lossy(),
            dobj.to_f64_lossy(),
            gap.to_f64_lossy(),
            pinf.to_f64_lossy(),
            dinf.to_f64_lossy()
        );
        if gap <= tol * T::lit(0.1) && pinf <= pfeas_tol && dinf <= dfeas_tol {
            let sol = finish(problem, &it, -dobj, iter, (pinf, dinf))?;
            if sol.residuals.gap <= tol {
                debug!("sdp converged in {iter} iterations, gap {:.3e}", sol.residuals.gap.to_f64_lossy());
                return Ok(sol);
            }
        }

        let mu = solver.complementarity(&it);
        let lx = match cholesky(&it.x) {
            Ok(f) => lower_triangular_inverse(&f),
            Err(_) => break,
        };
        let lz = match cholesky(&it.z) {
            Ok(f) => lower_triangular_inverse(&f),
            Err(_) => break,
        };
        let zinv = match hpd_inverse(&it.z) {
            Ok(zi) => zi.into_matrix(),
            Err(_) => break,
        };

        let aff = match solver.direction(&it, &zinv, &res, T::zero(), None) {
            Ok(d) => d,
            Err(_) => break,
        };
        let (ap, ad) = step_lengths(&it, &aff, &lx, &lz);
        let (ap, ad) = (ap.min(T::one()), ad.min(T::one()));
        let xa = &it.x + &aff.dx.scale(ap);
        let za = &it.z + &aff.dz.scale(ad);
        let lp_aff: T = (0..l)
            .map(|k| (it.s[k] + ap * aff.ds[k]) * (it.zs[k] + ad * aff.dzs[k]))
            .sum();
        let mu_aff = (xa.re_trace_product(&za) + lp_aff + (it.sig + ap * aff.dsig) * (it.zsig + ad * aff.dzsig))
            / T::from_usize_lossy(n + l + 1);
        let ratio = (mu_aff / mu).max(T::zero()).min(T::one());
        let sigma = ratio * ratio * ratio;

        let dir = match solver.direction(&it, &zinv, &res, sigma * mu, Some(&aff)) {
            Ok(d) => d,
            Err(_) => break,
        };
        let (ap, ad) = step_lengths(&it, &dir, &lx, &lz);
        let frac = T::lit(STEP_FRACTION);
        let ap = (frac * ap).min(T::one());
        let ad = (frac * ad).min(T::one());

        it.x = (&it.x + &dir.dx.scale(ap)).hermitian_part().into_matrix();
        for k in 0..l {
            it.s[k] = it.s[k] + ap * dir.ds[k];
            it.zs[k] = it.zs[k] + ad * dir.dzs[k];
        }
        it.sig = it.sig + ap * dir.dsig;
        it.zsig = it.zsig + ad * dir.dzsig;
        for k in 0..m {
            it.y[k] = it.y[k] + ad * dir.dy[k];
        }
        it.z = (&it.z + &dir.dz.scale(ad)).hermitian_part().into_matrix();
    }

    // Accept the last iterate if it meets the contract even though the
    // interior loop stalled.
    let dobj = solver.dual_objective(&it);
    if let Ok(sol) = finish(problem, &it, -dobj, problem.max_iterations, (last.0, last.1)) {
        if sol.residuals.gap <= tol && last.0 <= pfeas_tol && last.1 <= dfeas_tol {
            return Ok(sol);
        }
    }
    Err(Error::NotConverged {
        iterations: problem.max_iterations,
        primal: last.0.to_f64_lossy(),
        dual: last.1.to_f64_lossy(),
        gap: last.2.to_f64_lossy(),
    })
}

fn finish<T: Real>(
    problem: &SdpProblem<T>,
    it: &Iterate<T>,
    dual_bound: T,
    iterations: usize,
    (pinf, dinf): (T, T),
) -> Result<SdpSolution<T>> {
    let n = problem.dim();
    let w = it.x.hermitian_part();
    let scale: Vec<T> = w
        .diagonal()
        .into_iter()
        .map(|v| {
            if v > T::zero() {
                (problem.diag_value / v).sqrt()
            } else {
                T::one()
            }
        })
        .collect();
    let w = CMatrix::from_fn(n, |i, j| w[(i, j)] * (scale[i] * scale[j])).hermitian_part();
    let sigma = problem
        .gain_matrices
        .iter()
        .map(|g| g.trace_with(w.as_matrix()))
        .fold(T::infinity(), T::min);
    let objective = sigma + problem.linear_term.inner(&w);
    let gap = (dual_bound - objective).abs() / (T::one() + dual_bound.abs() + objective.abs());
    let psd = (-w.min_eigenvalue()).max(T::zero());
    let diag = w
        .diagonal()
        .into_iter()
        .map(|v| (v - problem.diag_value).abs())
        .fold(T::zero(), T::max);
    if !w.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(SdpSolution {
        w,
        sigma,
        objective,
        dual_bound,
        residuals: SdpResiduals {
            primal: pinf,
            dual: dinf,
            gap,
            psd,
            diag,
        },
        iterations,
    })
}
