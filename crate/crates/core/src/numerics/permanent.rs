use num_complex::Complex;
use num_traits::{One, Zero};

use super::Matrix;
use crate::error::{Error, Result};
use crate::perms;
use crate::scalar::Real;

/// Largest matrix accepted by [`permanent_ryser`].
pub const MAX_RYSER_PERMANENT: usize = 30;
/// Largest matrix accepted by [`permanent_naive`].
pub const MAX_NAIVE_PERMANENT: usize = 10;

/// Permanent by Ryser's inclusion–exclusion formula.
///
/// Uses the Nijenhuis–Wilf form: with the last column folded into the
/// starting row sums `x_i = a[i][n-1] - ½ Σ_j a[i][j]`,
///
/// ```text
/// perm(A) = 2 (-1)^(n-1) Σ_{S ⊆ {0..n-2}} (-1)^|S| Π_i (x_i + Σ_{j∈S} a[i][j])
/// ```
///
/// Subsets are visited in binary-reflected Gray-code order so each step
/// toggles one column and updates the row sums in `O(n)`; total cost is
/// `n · 2^(n-1)` multiplications. Summation is sequential in Gray order,
/// so results are bitwise reproducible.
pub fn permanent_ryser<T: Real>(m: &Matrix<T>) -> Result<Complex<T>> {
    let n = m.require_square("permanent")?;
    if n > MAX_RYSER_PERMANENT {
        return Err(Error::SizeLimit {
            what: "permanent",
            n,
            max: MAX_RYSER_PERMANENT,
        });
    }
    let half = T::lit(0.5);
    let mut sums: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let total: Complex<T> = m.row(i).iter().copied().sum();
            m[(i, n - 1)] - total * half
        })
        .collect();

    let product = |s: &[Complex<T>]| s.iter().fold(Complex::<T>::one(), |acc, &x| acc * x);
    let mut total = product(&sums);
    let mut negative = false;

    let subsets: u64 = 1 << (n - 1);
    for k in 1..subsets {
        let col = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let added = (gray >> col) & 1 == 1;
        for (i, s) in sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, col)];
            } else {
                *s -= m[(i, col)];
            }
        }
        negative = !negative;
        let p = product(&sums);
        if negative {
            total -= p;
        } else {
            total += p;
        }
    }

    let two = T::lit(2.0);
    Ok(if n % 2 == 0 { -total * two } else { total * two })
}

/// Permanent by direct expansion over `S_n`. `O(n!·n)`; an oracle only.
pub fn permanent_naive<T: Real>(m: &Matrix<T>) -> Result<Complex<T>> {
    let n = m.require_square("permanent")?;
    if n > MAX_NAIVE_PERMANENT {
        return Err(Error::SizeLimit {
            what: "naive permanent",
            n,
            max: MAX_NAIVE_PERMANENT,
        });
    }
    let mut total = Complex::zero();
    for p in perms::iterate(n)? {
        let mut term = Complex::one();
        for j in 0..n {
            term *= m[(j, p.apply(j))];
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;
    use crate::{CMatrix, CMatrix32, Complex64};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn two_by_two() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(permanent_ryser(&m).unwrap(), Complex64::new(10.0, 0.0));
        assert_eq!(permanent_naive(&m).unwrap(), Complex64::new(10.0, 0.0));
    }

    #[test]
    fn antidiagonal() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(permanent_naive(&m).unwrap(), Complex64::one());
        assert_eq!(permanent_ryser(&m).unwrap(), Complex64::one());
    }

    #[test]
    fn identities() {
        for n in 1..=12 {
            let p = permanent_ryser(&CMatrix::identity(n)).unwrap();
            assert!((p - Complex64::one()).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn all_ones_gives_factorial() {
        for n in 1..=9 {
            let m = CMatrix::from_fn(n, n, |_, _| Complex64::one()).unwrap();
            let expected = perms::factorial(n) as f64;
            assert!((permanent_ryser(&m).unwrap().re - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn seven_by_seven_matches_enumeration() {
        let mut s = Sampler::new(3, 0);
        for _ in 0..5 {
            let m = s.unit_disc_matrix(7, 7);
            assert!(rel(permanent_ryser(&m).unwrap(), permanent_naive(&m).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn five_by_five_tight() {
        let mut s = Sampler::new(4, 0);
        for _ in 0..20 {
            let m = s.unit_disc_matrix(5, 5);
            assert!(rel(permanent_ryser(&m).unwrap(), permanent_naive(&m).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn agrees_with_determinant_on_scalars() {
        let m = CMatrix::new(1, 1, vec![Complex64::new(0.3, -0.4)]).unwrap();
        assert_eq!(permanent_ryser(&m).unwrap(), super::super::determinant(&m).unwrap());
        assert_eq!(permanent_naive(&m).unwrap(), Complex64::new(0.3, -0.4));
    }

    #[test]
    fn limits() {
        assert!(matches!(
            permanent_ryser(&CMatrix::zeros(31, 31)),
            Err(Error::SizeLimit { n: 31, .. })
        ));
        assert!(matches!(
            permanent_naive(&CMatrix::zeros(11, 11)),
            Err(Error::SizeLimit { n: 11, .. })
        ));
        assert!(permanent_ryser(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn single_precision() {
        let m = CMatrix32::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!((permanent_ryser(&m).unwrap().re - 10.0).abs() < 1e-5);
    }
}
