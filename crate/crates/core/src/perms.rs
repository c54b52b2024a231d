//! The symmetric group: permutations, lexicographic enumeration and parity.
//!
//! Internally images are 0-based; the textual form is the 1-based image
//! tuple, e.g. `(2,3,1)` maps 1→2, 2→3, 3→1.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which `S_n` may be enumerated.
pub const MAX_ENUMERATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: One + Zero + std::ops::Neg<Output = T>>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `self^sigma` for `sigma` in {0, 1}.
    pub fn pow(self, sigma: u8) -> Sign {
        if sigma.is_multiple_of(2) {
            Sign::Plus
        } else {
            self
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Permutation(format!("{images:?} is not a bijection on 0..{n}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based images, the public convention.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Permutation("images are 1-based".into()));
        }
        Self::from_zero_based(images.iter().map(|&i| i - 1).collect())
    }

    /// Swaps `a` and `b` (0-based), fixing everything else.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n || a == b {
            return Err(Error::Permutation(format!(
                "transposition ({a},{b}) invalid for n = {n}"
            )));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of `j` (0-based).
    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Parity by cycle decomposition: a cycle of length `k` contributes
    /// `k - 1` transpositions.
    pub fn parity(&self) -> Sign {
        let n = self.images.len();
        let mut visited = vec![false; n];
        let mut transpositions = 0usize;
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                j = self.images[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Permutation(format!(
                "cannot compose permutations of size {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Permutation { images }
    }

    /// Position of this permutation in [`iterate`] order (its Lehmer rank).
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for j in 0..n {
            let smaller_later = self.images[j + 1..].iter().filter(|&&x| x < self.images[j]).count();
            rank = rank * (n - j) + smaller_later;
        }
        rank
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str(")")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Permutation(format!("expected (i,j,...), got {s:?}")))?;
        let images = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Permutation(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&images)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Inverse of [`factorial`] on its image.
pub fn factorial_root(len: usize) -> Option<usize> {
    let mut n = 1;
    let mut f = 1;
    while f < len {
        n += 1;
        f *= n;
    }
    (f == len).then_some(n)
}

/// All permutations of `0..n` in lexicographic order of images, identity
/// first. The stream position is the stable index `π_i` used by
/// [`crate::indist::h_bruteforce`] and in reports.
pub fn iterate(n: usize) -> Result<Lexicographic> {
    if n == 0 {
        return Err(Error::Permutation("S_0 is not enumerated".into()));
    }
    if n > MAX_ENUMERATION {
        return Err(Error::SizeLimit {
            what: "permutation enumeration",
            n,
            max: MAX_ENUMERATION,
        });
    }
    Ok(Lexicographic {
        next: Some((0..n).collect()),
    })
}

#[derive(Debug, Clone)]
pub struct Lexicographic {
    next: Option<Vec<usize>>,
}

impl Iterator for Lexicographic {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

/// Advances `a` to its lexicographic successor; false when `a` was last.
fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Parities of `S_n` in [`iterate`] order, computed once per `n`.
pub fn sign_table(n: usize) -> Result<&'static [Sign]> {
    static TABLES: [OnceLock<Vec<Sign>>; MAX_ENUMERATION + 1] = [const { OnceLock::new() }; MAX_ENUMERATION + 1];
    let perms = iterate(n)?;
    Ok(TABLES[n].get_or_init(|| perms.map(|p| p.parity()).collect()))
}
