//! Transition amplitudes for systems of identical particles.
//!
//! The amplitude of an indistinguishable-particle process is a signed sum of
//! the amplitudes of the `N!` distinguishable transitions compatible with it:
//! the permanent of the single-particle transition submatrix for bosons and
//! its determinant for fermions. Alongside the kernels, [`verify`] checks
//! numerically each of the functional equations that force this form:
//! products over stages, additivity under coarse-graining, conjugation under
//! reversal, isolation, and the Cauchy pair. It also shows that anyonic phases
//! break the conjugation law.
//!
//! Kernels are generic over [`Real`]; the `f64` aliases below are what the
//! experiment, verification and CLI layers use.

pub mod error;
pub mod experiment;
pub mod indist;
pub mod numerics;
pub mod perms;
pub mod sample;
pub mod scalar;
pub mod seqalg;
pub mod verify;

pub use error::{Error, Result};
pub use indist::{Configuration, StageMatrix, Statistics};
pub use numerics::Matrix;
pub use perms::{Permutation, Sign};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision amplitude.
pub type Complex64 = Complex<f64>;
/// Single-precision amplitude.
pub type Complex32 = Complex<f32>;
/// Dense double-precision complex matrix.
pub type CMatrix = Matrix<f64>;
/// Dense single-precision complex matrix.
pub type CMatrix32 = Matrix<f32>;
/// Double-precision stage amplitude table.
pub type Stage = StageMatrix<f64>;
