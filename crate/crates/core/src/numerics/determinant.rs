use num_complex::Complex;
use num_traits::{One, Zero};

use super::Matrix;
use crate::error::Result;
use crate::scalar::Real;

/// Determinant by LU elimination with partial pivoting on modulus.
///
/// A pivot whose modulus falls below [`Real::pivot_floor`] makes the
/// matrix numerically singular and the result exactly zero.
pub fn determinant<T: Real>(m: &Matrix<T>) -> Result<Complex<T>> {
    let n = m.require_square("determinant")?;
    let mut a = m.as_slice().to_vec();
    let floor = T::pivot_floor();
    let mut det = Complex::<T>::one();

    for k in 0..n {
        let (pivot_row, pivot_mod) =
            (k..n)
                .map(|r| (r, a[r * n + k].norm()))
                .fold(
                    (k, T::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_mod < floor {
            return Ok(Complex::zero());
        }
        if pivot_row != k {
            for c in 0..n {
                a.swap(k * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        let inv = pivot.inv();
        for r in k + 1..n {
            let factor = a[r * n + k] * inv;
            if factor.is_zero() {
                continue;
            }
            for c in k + 1..n {
                let upper = a[k * n + c];
                a[r * n + c] -= factor * upper;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms;
    use crate::sample::Sampler;
    use crate::{CMatrix, CMatrix32, Complex64};

    /// Signed sum over all of `S_n`.
    fn leibniz(m: &CMatrix) -> Complex64 {
        let n = m.rows();
        perms::iterate(n)
            .unwrap()
            .map(|p| {
                let term: Complex64 = (0..n).map(|j| m[(j, p.apply(j))]).product();
                term * p.parity().value::<f64>()
            })
            .sum()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn two_by_two() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!((determinant(&m).unwrap() - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_four() {
        assert_eq!(determinant(&CMatrix::identity(4)).unwrap(), Complex64::one());
    }

    #[test]
    fn six_by_six_matches_leibniz() {
        let mut s = Sampler::new(7, 0);
        for _ in 0..10 {
            let m = s.unit_disc_matrix(6, 6);
            assert!(rel(determinant(&m).unwrap(), leibniz(&m)) < 1e-10);
        }
    }

    #[test]
    fn matches_leibniz_up_to_eight() {
        let mut s = Sampler::new(8, 0);
        for n in 1..=8 {
            let m = s.unit_disc_matrix(n, n);
            assert!(rel(determinant(&m).unwrap(), leibniz(&m)) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn multiplicative() {
        let mut s = Sampler::new(9, 0);
        for n in 1..=7 {
            let a = s.unit_disc_matrix(n, n);
            let b = s.unit_disc_matrix(n, n);
            let lhs = determinant(&a.matmul(&b).unwrap()).unwrap();
            let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
            assert!(rel(lhs, rhs) < 1e-9);
        }
    }

    #[test]
    fn repeated_column_vanishes() {
        let mut s = Sampler::new(10, 0);
        for n in 2..=6 {
            let base = s.unit_disc_matrix(n, n);
            let m = CMatrix::from_fn(n, n, |r, c| base[(r, if c == 1 { 0 } else { c })]).unwrap();
            assert!(determinant(&m).unwrap().norm() <= 1e-12);
        }
    }

    #[test]
    fn singular_by_pivot_floor() {
        let m = CMatrix::from_real_rows(&[&[1e-301, 0.0], &[0.0, 1e-301]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), Complex64::zero());
        assert!(determinant(&CMatrix::zeros(3, 3)).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_square_and_empty() {
        assert!(determinant(&CMatrix::zeros(2, 3)).is_err());
        assert!(determinant(&CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn single_precision() {
        let m = CMatrix32::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!((determinant(&m).unwrap().re + 2.0).abs() < 1e-6);
    }
}
