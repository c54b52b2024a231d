use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::perms::{self, Sign};
use crate::Complex64;

/// Candidate `H` with coefficient `e^{iθ}` on odd permutations and `1` on
/// even ones, optionally conjugated as a whole. `θ = 0` is the bosonic and
/// `θ = π` the fermionic law; any other `θ` is an anyonic candidate.
///
/// Only this module can build such a candidate: [`crate::Statistics`] has
/// no anyonic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HVariant {
    theta: f64,
    conjugated: bool,
}

impl HVariant {
    /// `theta` is reduced into `[0, 2π)`.
    pub fn new(theta: f64, conjugated: bool) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("variant phase"));
        }
        Ok(HVariant {
            theta: theta.rem_euclid(TAU),
            conjugated,
        })
    }

    pub fn boson() -> Self {
        HVariant {
            theta: 0.0,
            conjugated: false,
        }
    }

    pub fn fermion() -> Self {
        HVariant {
            theta: PI,
            conjugated: false,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    /// Whether the odd coefficient is real, i.e. `θ ∈ {0, π}` (exactly).
    pub fn is_real(&self) -> bool {
        self.theta == 0.0 || self.theta == PI
    }

    fn odd_coefficient(&self) -> Complex64 {
        // exact values on the real axis keep the boson/fermion residuals at zero
        if self.theta == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if self.theta == PI {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex::from_polar(1.0, self.theta)
        }
    }

    /// `H_θ(α)` with `α` in [`perms::iterate`] order.
    pub fn apply(&self, alphas: &[Complex64]) -> Result<Complex64> {
        let n = perms::factorial_root(alphas.len())
            .ok_or_else(|| Error::Shape(format!("{} amplitudes is not N! for any N", alphas.len())))?;
        let signs = perms::sign_table(n)?;
        let odd = self.odd_coefficient();
        let mut total = Complex64::zero();
        for (a, s) in alphas.iter().zip(signs) {
            match s {
                Sign::Plus => total += a,
                Sign::Minus => total += odd * a,
            }
        }
        Ok(if self.conjugated { total.conj() } else { total })
    }

    /// Short label used in check names, e.g. `theta=pi/2`.
    pub fn label(&self) -> String {
        let ratio = self.theta / PI;
        let named = [
            (0.0, "0"),
            (1.0, "pi"),
            (0.5, "pi/2"),
            (1.5, "3pi/2"),
            (1.0 / 3.0, "pi/3"),
            (0.25, "pi/4"),
        ];
        let base = named
            .iter()
            .find(|(r, _)| (ratio - r).abs() < 1e-15)
            .map(|(_, s)| format!("theta={s}"))
            .unwrap_or_else(|| format!("theta={:.6}", self.theta));
        if self.conjugated {
            format!("{base},conj")
        } else {
            base
        }
    }
}

/// Candidate solutions of the pair `f(z₁+z₂) = f(z₁)+f(z₂)`,
/// `f(z₁z₂) = f(z₁)f(z₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CauchyCandidate {
    Identity,
    Conjugate,
    Zero,
    Scale(f64),
    Phase(f64),
}

impl CauchyCandidate {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match *self {
            CauchyCandidate::Identity => z,
            CauchyCandidate::Conjugate => z.conj(),
            CauchyCandidate::Zero => Complex64::zero(),
            CauchyCandidate::Scale(c) => z * c,
            CauchyCandidate::Phase(theta) => z * Complex::from_polar(1.0, theta),
        }
    }

    /// The zero map solves both equations but violates `f(1) = 1`.
    pub fn is_inadmissible(&self) -> bool {
        matches!(self, CauchyCandidate::Zero | CauchyCandidate::Scale(0.0))
    }
}

impl fmt::Display for CauchyCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CauchyCandidate::Identity => f.write_str("id"),
            CauchyCandidate::Conjugate => f.write_str("conj"),
            CauchyCandidate::Zero => f.write_str("zero"),
            CauchyCandidate::Scale(c) => write!(f, "scale({c})"),
            CauchyCandidate::Phase(t) => write!(f, "phase({t:.6})"),
        }
    }
}
