//! Small dense complex linear algebra: just what the SDP solver and the
//! rank-one machinery need, written for matrices of a few dozen rows.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::num::{Real, C};

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Build from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<C<T>>) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self { n, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.n, v.len(), "mat_vec dimension mismatch");
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `Re Tr(self · rhs)` without forming the product.
    pub fn re_trace_product(&self, rhs: &Self) -> T {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                let b = rhs.data[j * n + i];
                acc = acc + a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|A - A^H|` entry.
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> HermitianMatrix<T> {
        let half = T::half();
        let mut m = Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half);
        for i in 0..self.n {
            m[(i, i)].im = T::zero();
        }
        HermitianMatrix(m)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// Complex Hermitian matrix. Construction always symmetrizes or checks.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T>(CMatrix<T>);

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        Self(CMatrix::identity(n).scale(s))
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(n, |i, j| {
            if i == j {
                C::new(diag[i], T::zero())
            } else {
                C::zero()
            }
        }))
    }

    /// `v v^H`.
    pub fn outer(v: &[C<T>]) -> Self {
        let n = v.len();
        let mut m = CMatrix::from_fn(n, |i, j| v[i] * v[j].conj());
        for i in 0..n {
            m[(i, i)].im = T::zero();
        }
        Self(m)
    }

    /// Accepts `m` if it is Hermitian to within `tol` (absolute, entrywise)
    /// and returns its exact Hermitian part.
    pub fn try_from_matrix(m: CMatrix<T>, tol: T) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = m.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(m.hermitian_part())
    }

    /// Hermitian part of an arbitrary square matrix.
    pub fn symmetrized(m: &CMatrix<T>) -> Self {
        m.hermitian_part()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// Quadratic form `v^H A v` (real for Hermitian A).
    pub fn quadratic_form(&self, v: &[C<T>]) -> T {
        let av = self.0.mat_vec(v);
        crate::num::dot_h(v, &av).re
    }

    /// `Re Tr(self · rhs)`.
    pub fn inner(&self, rhs: &Self) -> T {
        self.0.re_trace_product(&rhs.0)
    }

    pub fn eigh(&self) -> HermitianEigen<T> {
        jacobi_eigh(&self.0, true)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        jacobi_eigh(&self.0, false).values
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().last().copied().unwrap_or_else(T::zero)
    }
}

impl<T> Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C<T> {
        &self.0[idx]
    }
}

impl<T: Real> Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl<T: Real> Sub for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn sub(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

/// Eigendecomposition `A = U diag(values) U^H`, values descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors as columns. Empty when only values were requested.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        let n = self.vectors.dim();
        let m = CMatrix::from_fn(n, |i, j| {
            (0..n).fold(C::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * self.values[k]
            })
        });
        m.hermitian_part()
    }
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot, then applies the real symmetric 2x2 rotation.
fn jacobi_eigh<T: Real>(m: &CMatrix<T>, want_vectors: bool) -> HermitianEigen<T> {
    let n = m.dim();
    let mut a = m.hermitian_part().into_matrix();
    let mut v = if want_vectors {
        CMatrix::identity(n)
    } else {
        CMatrix::zeros(0)
    };

    let frob2 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>();
    let eps = T::epsilon();
    let threshold = eps * eps * frob2;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + a[(i, j)].norm_sqr();
                }
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs == T::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip pivots that are negligible against both diagonals.
                if babs <= eps * eps * (app.abs() + aqq.abs()) {
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                    continue;
                }
                let theta = (aqq - app) / (T::two() * babs);
                let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
                    T::half() / theta
                } else {
                    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                    sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let e = b / babs;
                let ec = e.conj();

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - ec * akq * s;
                    a[(k, q)] = akp * s + ec * akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - e * aqk * s;
                    a[(q, k)] = apk * s + e * aqk * c;
                }
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - ec * vkq * s;
                        v[(k, q)] = vkp * s + ec * vkq * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal eigenvalues keep their original column order.
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<T> = order.iter().map(|&k| a[(k, k)].re).collect();

    let vectors = if want_vectors {
        let mut out = CMatrix::zeros(n);
        for (col, &k) in order.iter().enumerate() {
            // Fix the phase so the largest component is real positive.
            let mut pivot = 0;
            let mut best = T::zero();
            for i in 0..n {
                let mag = v[(i, k)].norm();
                if mag > best {
                    best = mag;
                    pivot = i;
                }
            }
            let phase = if best > T::zero() {
                v[(pivot, k)].conj() / best
            } else {
                C::one()
            };
            for i in 0..n {
                out[(i, col)] = v[(i, k)] * phase;
            }
        }
        out
    } else {
        CMatrix::zeros(0)
    };

    HermitianEigen { values, vectors }
}

/// Lower Cholesky factor `L` with `A = L L^H`.
pub fn cholesky<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = m.dim();
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = C::new(ljj, T::zero());
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let n = l.dim();
    let mut inv = CMatrix::<T>::zeros(n);
    for col in 0..n {
        for i in col..n {
            let mut s: C<T> = if i == col { C::one() } else { C::zero() };
            for k in col..i {
                s = s - l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive definite matrix through its Cholesky factor.
pub fn hpd_inverse<T: Real>(m: &CMatrix<T>) -> Result<HermitianMatrix<T>> {
    let l = cholesky(m)?;
    let linv = lower_triangular_inverse(&l);
    Ok(linv.adjoint().matmul(&linv).hermitian_part())
}

/// Dense real solve `A x = b` by LU with partial pivoting. `a` is row-major.
pub fn solve_real<T: Real>(mut a: Vec<T>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tiny = T::epsilon() * scale * T::from_usize_lossy(n.max(1));
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if !(best > tiny) {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        let akk = a[k * n + k];
        for i in (k + 1)..n {
            let f = a[i * n + k] / akk;
            if f == T::zero() {
                continue;
            }
            a[i * n + k] = T::zero();
            for j in (k + 1)..n {
                a[i * n + j] = a[i * n + j] - f * a[k * n + j];
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s = s - a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn sample_hermitian(n: usize, seed: u64) -> HermitianMatrix<f64> {
        // Small LCG so the tests do not depend on rand.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let m = CMatrix::from_fn(n, |_, _| c(next(), next()));
        m.hermitian_part()
    }

    #[test]
    fn jacobi_reconstructs_and_is_unitary() {
        for n in [1, 2, 3, 7, 16] {
            let h = sample_hermitian(n, n as u64);
            let eig = h.eigh();
            let back = eig.reconstruct();
            let err = (back.as_matrix() - h.as_matrix()).frobenius_norm();
            assert!(err < 1e-12 * (n as f64), "n={n} err={err}");
            let u = &eig.vectors;
            let g = u.adjoint().matmul(u);
            let dev = (&g - &CMatrix::identity(n)).frobenius_norm();
            assert!(dev < 1e-12 * (n as f64), "n={n} unitary dev {dev}");
            for w in eig.values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn jacobi_diagonal_input_keeps_order_for_ties() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 3.0, 3.0]);
        let eig = h.eigh();
        assert_eq!(eig.values, vec![3.0, 3.0, 1.0]);
        assert_eq!(eig.vector(0)[1], c(1.0, 0.0));
        assert_eq!(eig.vector(1)[2], c(1.0, 0.0));
    }

    #[test]
    fn cholesky_and_inverse() {
        let n = 5;
        let h = sample_hermitian(n, 9);
        let pd = &h.as_matrix().adjoint().matmul(h.as_matrix()) + &CMatrix::identity(n);
        let l = cholesky(&pd).unwrap();
        let back = l.matmul(&l.adjoint());
        assert!((&back - &pd).frobenius_norm() < 1e-12);
        let inv = hpd_inverse(&pd).unwrap();
        let prod = pd.matmul(inv.as_matrix());
        assert!((&prod - &CMatrix::identity(n)).frobenius_norm() < 1e-11);
        assert_eq!(
            cholesky(&CMatrix::<f64>::identity(2).scale(-1.0)),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn real_solve_matches() {
        let a = vec![2.0f64, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let x = solve_real(a.clone(), vec![3.0, 5.0, 5.0]).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
        assert_eq!(solve_real(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0]), Err(Error::Singular));
    }

    #[test]
    fn try_from_matrix_rejects_non_hermitian() {
        let m = CMatrix::from_row_major(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            HermitianMatrix::try_from_matrix(m, 1e-12),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let h = HermitianMatrix::<f32>::from_real_diagonal(&[2.0, -1.0]);
        assert_eq!(h.eigenvalues(), vec![2.0, -1.0]);
    }
}
