use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::num::Real;

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to zero.
pub fn psd_project<T: Real>(h: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut eig = h.eigh();
    for v in eig.values.iter_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    Ok(eig.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use num_complex::Complex;

    #[test]
    fn clips_negative_diagonal() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0f64, -1.0]);
        let p = psd_project(&h).unwrap();
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!(p[(1, 1)].norm() < 1e-15);
        assert!(p[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn psd_input_unchanged() {
        let v = vec![Complex::new(1.0, 0.5), Complex::new(-0.3, 0.2), Complex::new(0.0, 1.0)];
        let h = &HermitianMatrix::outer(&v) + &HermitianMatrix::scaled_identity(3, 0.25);
        let p = psd_project(&h).unwrap();
        assert!((p.as_matrix() - h.as_matrix()).frobenius_norm() < 1e-12);
        let pp = psd_project(&p).unwrap();
        assert!((pp.as_matrix() - p.as_matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let m = CMatrix::from_fn(2, |_, _| Complex::new(f64::NAN, 0.0));
        let h = HermitianMatrix::symmetrized(&m);
        assert_eq!(psd_project(&h), Err(Error::NonFinite));
    }
}
