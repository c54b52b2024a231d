//! Indistinguishable-particle amplitudes.
//!
//! For `N` particles moving from configuration `from` to configuration `to`
//! through one stage, each permutation `π` names a distinguishable
//! transition: the particle registered at `from[j]` is later found at
//! `to[π(j)]`, with amplitude
//!
//! ```text
//! α_π = Π_j u[to[π(j)], from[j]]
//! ```
//!
//! The indistinguishable process has amplitude `H(α) = Σ_π sgn(π)^σ α_π`,
//! which is `perm(B)` for bosons (`σ = 0`) and `det(B)` for fermions
//! (`σ = 1`) where `B[j][i] = u[to[i], from[j]]`. [`h_bruteforce`] evaluates
//! the sum literally; [`h_fast`] goes through the kernels.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{determinant, permanent_ryser, Matrix, MAX_RYSER_PERMANENT};
use crate::perms::{self, Permutation, Sign};
use crate::scalar::Real;

/// Largest fermion configuration [`h_fast`] accepts.
pub const MAX_FERMIONS: usize = 500;
/// Largest boson configuration [`h_fast`] accepts.
pub const MAX_BOSONS: usize = MAX_RYSER_PERMANENT;
/// Largest `n` for [`q_coefficients`].
pub const MAX_PROBE: usize = 8;

/// Stage entries may exceed the unit disc by this much (rounding slack).
pub const DISC_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub const ALL: [Statistics; 2] = [Statistics::Boson, Statistics::Fermion];

    pub fn sigma(self) -> u8 {
        match self {
            Statistics::Boson => 0,
            Statistics::Fermion => 1,
        }
    }

    pub fn from_sigma(sigma: u8) -> Result<Self> {
        match sigma {
            0 => Ok(Statistics::Boson),
            1 => Ok(Statistics::Fermion),
            s => Err(Error::Unsupported(format!("statistics sigma = {s}"))),
        }
    }

    /// Coefficient `sgn(π)^σ` of a permutation of the given sign.
    pub fn coefficient(self, sign: Sign) -> Sign {
        sign.pow(self.sigma())
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boson" => Ok(Statistics::Boson),
            "fermion" => Ok(Statistics::Fermion),
            other => Err(Error::Unsupported(format!("statistics {other:?}"))),
        }
    }
}

/// Ordered tuple of outcome labels registered at one measurement time.
///
/// Labels are held 0-based; [`Configuration::from_one_based`] and `Display`
/// use the 1-based public convention. Repeated labels are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    labels: Vec<usize>,
}

impl Configuration {
    pub fn from_zero_based(labels: Vec<usize>) -> Self {
        Configuration { labels }
    }

    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if let Some(&l) = labels.iter().find(|&&l| l == 0) {
            return Err(Error::LabelOutOfRange {
                label: l,
                bound: usize::MAX,
                context: "configuration (labels are 1-based)".into(),
            });
        }
        Ok(Configuration {
            labels: labels.iter().map(|&l| l - 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// 0-based labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| l + 1).collect()
    }

    pub fn is_distinct(&self) -> bool {
        let mut sorted = self.labels.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Ascending-label form.
    pub fn canonical(&self) -> Configuration {
        let mut labels = self.labels.clone();
        labels.sort_unstable();
        Configuration { labels }
    }

    pub fn is_canonical(&self) -> bool {
        self.labels.windows(2).all(|w| w[0] <= w[1])
    }

    /// Reorders labels: position `π(j)` of the result holds label `j`.
    pub fn permuted(&self, pi: &Permutation) -> Result<Configuration> {
        if pi.len() != self.len() {
            return Err(Error::Dimension(format!(
                "permutation of size {} applied to {} labels",
                pi.len(),
                self.len()
            )));
        }
        let mut labels = vec![0; self.len()];
        for (j, &l) in self.labels.iter().enumerate() {
            labels[pi.apply(j)] = l;
        }
        Ok(Configuration { labels })
    }

    pub(crate) fn check_bounds(&self, bound: usize, context: &str) -> Result<()> {
        match self.labels.iter().find(|&&l| l >= bound) {
            Some(&l) => Err(Error::LabelOutOfRange {
                label: l + 1,
                bound,
                context: context.to_owned(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l + 1)?;
        }
        f.write_str(")")
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

/// All `k`-element subsets of `0..m` in ascending (canonical) form,
/// lexicographically ordered.
pub fn distinct_configurations(k: usize, m: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(Configuration::from_zero_based(idx.clone()));
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Single-particle amplitudes of one stage: entry `(m, l)` is the amplitude
/// of one particle going from source outcome `l` to destination outcome `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMatrix<T: Real> {
    u: Matrix<T>,
}

impl<T: Real> StageMatrix<T> {
    pub fn new(u: Matrix<T>) -> Result<Self> {
        let bound = T::one() + T::lit(DISC_SLACK);
        for r in 0..u.rows() {
            for c in 0..u.cols() {
                let modulus = u[(r, c)].norm();
                if modulus > bound {
                    return Err(Error::OutsideDisc {
                        at: format!("stage entry ({},{})", r + 1, c + 1),
                        modulus: modulus.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(StageMatrix { u })
    }

    pub fn identity(n: usize) -> Self {
        StageMatrix { u: Matrix::identity(n) }
    }

    /// Skips the unit-disc check, for composed stages built from validated
    /// ones whose products may exceed the disc.
    pub(crate) fn unchecked(u: Matrix<T>) -> Self {
        StageMatrix { u }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.u
    }

    /// Number of destination outcomes.
    pub fn destinations(&self) -> usize {
        self.u.rows()
    }

    /// Number of source outcomes.
    pub fn sources(&self) -> usize {
        self.u.cols()
    }

    /// Amplitude for one particle going `source → destination` (0-based).
    #[inline]
    pub fn amplitude(&self, destination: usize, source: usize) -> Complex<T> {
        self.u[(destination, source)]
    }

    /// The stage `self` followed by `next` as a single stage (`next · self`).
    pub fn then(&self, next: &StageMatrix<T>) -> Result<Matrix<T>> {
        next.u.matmul(&self.u)
    }

    fn check_transition(&self, from: &Configuration, to: &Configuration) -> Result<usize> {
        if from.len() != to.len() {
            return Err(Error::Dimension(format!(
                "configurations of {} and {} particles",
                from.len(),
                to.len()
            )));
        }
        if from.is_empty() {
            return Err(Error::Dimension("empty configuration".into()));
        }
        from.check_bounds(self.sources(), "source configuration")?;
        to.check_bounds(self.destinations(), "destination configuration")?;
        Ok(from.len())
    }

    /// `B[j][i] = u[to[i], from[j]]`, whose permanent/determinant is `H`.
    pub fn transition_matrix(&self, from: &Configuration, to: &Configuration) -> Result<Matrix<T>> {
        let n = self.check_transition(from, to)?;
        Matrix::from_fn(n, n, |j, i| self.amplitude(to.labels[i], from.labels[j]))
    }
}

/// Amplitude of the distinguishable transition in which the particle seen at
/// `from[j]` is next seen at `to[π(j)]`.
pub fn alpha_pi<T: Real>(
    stage: &StageMatrix<T>,
    from: &Configuration,
    to: &Configuration,
    pi: &Permutation,
) -> Result<Complex<T>> {
    let n = stage.check_transition(from, to)?;
    if pi.len() != n {
        return Err(Error::Dimension(format!(
            "permutation of size {} for {n} particles",
            pi.len()
        )));
    }
    Ok((0..n)
        .map(|j| stage.amplitude(to.labels[pi.apply(j)], from.labels[j]))
        .fold(Complex::one(), |acc, a| acc * a))
}

/// All `N!` distinguishable-transition amplitudes in [`perms::iterate`] order.
pub fn alpha_vector<T: Real>(
    stage: &StageMatrix<T>,
    from: &Configuration,
    to: &Configuration,
) -> Result<Vec<Complex<T>>> {
    let n = stage.check_transition(from, to)?;
    perms::iterate(n)?.map(|pi| alpha_pi(stage, from, to, &pi)).collect()
}

fn sign_table_for(len: usize) -> Result<&'static [Sign]> {
    let n = perms::factorial_root(len).ok_or_else(|| Error::Shape(format!("{len} amplitudes is not N! for any N")))?;
    perms::sign_table(n)
}

/// `H(α) = Σ_i sgn(π_i)^σ α_i`, with `α` indexed in [`perms::iterate`] order.
pub fn h_bruteforce<T: Real>(alphas: &[Complex<T>], stats: Statistics) -> Result<Complex<T>> {
    let signs = sign_table_for(alphas.len())?;
    let mut total = Complex::zero();
    for (a, s) in alphas.iter().zip(signs) {
        match stats.coefficient(*s) {
            Sign::Plus => total += a,
            Sign::Minus => total -= a,
        }
    }
    Ok(total)
}

/// `H` via the permanent (bosons) or determinant (fermions) of the
/// transition matrix.
pub fn h_fast<T: Real>(
    stage: &StageMatrix<T>,
    from: &Configuration,
    to: &Configuration,
    stats: Statistics,
) -> Result<Complex<T>> {
    let (what, max) = match stats {
        Statistics::Boson => ("boson amplitude", MAX_BOSONS),
        Statistics::Fermion => ("fermion amplitude", MAX_FERMIONS),
    };
    if from.len() > max {
        return Err(Error::SizeLimit {
            what,
            n: from.len(),
            max,
        });
    }
    let b = stage.transition_matrix(from, to)?;
    match stats {
        Statistics::Boson => permanent_ryser(&b),
        Statistics::Fermion => determinant(&b),
    }
}

/// Amplitude of `l → m → n` through two stages with `m` atomic:
/// `H(α)·H(β)`.
pub fn g_two_stage<T: Real>(
    stage1: &StageMatrix<T>,
    stage2: &StageMatrix<T>,
    l: &Configuration,
    m: &Configuration,
    n: &Configuration,
    stats: Statistics,
) -> Result<Complex<T>> {
    if stage1.destinations() != stage2.sources() {
        return Err(Error::Dimension(format!(
            "stage 1 has {} destinations but stage 2 has {} sources",
            stage1.destinations(),
            stage2.sources()
        )));
    }
    Ok(h_fast(stage1, l, m, stats)? * h_fast(stage2, m, n, stats)?)
}

/// `Γ_ij = α_{π_i} β_{π_j}`: amplitudes of the `(N!)²` two-stage
/// distinguishable transitions, row-major.
pub fn gamma_matrix<T: Real>(alphas: &[Complex<T>], betas: &[Complex<T>]) -> Result<Matrix<T>> {
    if alphas.len() != betas.len() {
        return Err(Error::Shape(format!(
            "stage amplitude vectors of length {} and {}",
            alphas.len(),
            betas.len()
        )));
    }
    let k = alphas.len();
    Matrix::from_fn(k, k, |i, j| alphas[i] * betas[j])
}

/// `G(Γ)` as the sum over two-stage transitions. Transition `(i, j)` takes
/// the particle at `l_a` to `n_{π_j(π_i(a))}`, so its coefficient is
/// `sgn(π_j ∘ π_i)^σ`.
pub fn g_bruteforce<T: Real>(gamma: &Matrix<T>, stats: Statistics) -> Result<Complex<T>> {
    if !gamma.is_square() {
        return Err(Error::Shape("Γ must be square".into()));
    }
    let n = perms::factorial_root(gamma.rows())
        .ok_or_else(|| Error::Shape(format!("Γ of size {} is not N!", gamma.rows())))?;
    let all: Vec<Permutation> = perms::iterate(n)?.collect();
    let mut total = Complex::zero();
    for (i, pi) in all.iter().enumerate() {
        for (j, pj) in all.iter().enumerate() {
            let overall = pj.compose(pi)?;
            match stats.coefficient(overall.parity()) {
                Sign::Plus => total += gamma[(i, j)],
                Sign::Minus => total -= gamma[(i, j)],
            }
        }
    }
    Ok(total)
}

/// Coefficient of each `α_π` in `H`, recovered by probing `H` with indicator
/// vectors `α_{π_i} = δ_{ik}`. Returned in [`perms::iterate`] order.
pub fn q_coefficients(n: usize, stats: Statistics) -> Result<Vec<(Permutation, f64)>> {
    if n > MAX_PROBE {
        return Err(Error::SizeLimit {
            what: "coefficient probe",
            n,
            max: MAX_PROBE,
        });
    }
    let all: Vec<Permutation> = perms::iterate(n)?.collect();
    let len = all.len();
    let coefficients: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|k| {
            let mut probe = vec![Complex::<f64>::zero(); len];
            probe[k] = Complex::one();
            h_bruteforce(&probe, stats).map(|h| h.re)
        })
        .collect::<Result<_>>()?;
    Ok(all.into_iter().zip(coefficients).collect())
}

/// Per-subexperiment factorisation `Π_b |H_b|` for a stage whose amplitudes
/// vanish between blocks.
///
/// `blocks` partitions particle positions `0..N`; block `b` pairs sources
/// `from[j]` with destinations `to[j]` for `j ∈ b`. Every amplitude from a
/// source in one block to a destination in another must be exactly zero.
pub fn isolation_factor<T: Real>(
    stage: &StageMatrix<T>,
    from: &Configuration,
    to: &Configuration,
    stats: Statistics,
    blocks: &[Vec<usize>],
) -> Result<T> {
    let n = stage.check_transition(from, to)?;
    let mut owner = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::Block(format!("block {b} is empty")));
        }
        for &j in block {
            if j >= n {
                return Err(Error::Block(format!("particle {j} out of range for N = {n}")));
            }
            if owner[j] != usize::MAX {
                return Err(Error::Block(format!("particle {j} is in two blocks")));
            }
            owner[j] = b;
        }
    }
    if let Some(j) = owner.iter().position(|&b| b == usize::MAX) {
        return Err(Error::Block(format!("particle {j} is in no block")));
    }
    for j in 0..n {
        for i in 0..n {
            if owner[i] != owner[j] && !stage.amplitude(to.labels[i], from.labels[j]).is_zero() {
                return Err(Error::Block(format!(
                    "amplitude {} -> {} crosses blocks {} and {}",
                    from.labels[j] + 1,
                    to.labels[i] + 1,
                    owner[j],
                    owner[i]
                )));
            }
        }
    }
    blocks.iter().try_fold(T::one(), |acc, block| {
        let pick = |c: &Configuration| Configuration::from_zero_based(block.iter().map(|&j| c.labels[j]).collect());
        Ok(acc * h_fast(stage, &pick(from), &pick(to), stats)?.norm())
    })
}
