//! Operational sequences and Feynman's rules.
//!
//! A sequence is a record of measurement outcomes at successive times. Atomic
//! sequences carry an amplitude; composite ones are built with three
//! operators:
//!
//! * `ser(a, b)`: `a` then `b`, joined at a shared atomic outcome; amplitudes
//!   multiply.
//! * `par(a, b)`: two sequences that differ only in one intermediate outcome,
//!   coarse-grained together; amplitudes add.
//! * `rev(a)`: the same measurements in reverse order, allowed only when they
//!   immediately follow one another; the amplitude is conjugated.
//!
//! Atoms parsed from the bare text form `atom(re,im)` carry no outcome
//! record; structural rules that need outcomes are skipped for them.

mod random;
mod text;

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::is_finite;
use crate::Complex64;

pub use random::TreeGenerator;

/// Modulus slack for atom amplitudes.
pub const ATOM_SLACK: f64 = 1e-12;

/// The result of one measurement: a time and the set of atomic outcome
/// labels it cannot distinguish. A single label is an atomic outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub time: u32,
    labels: Vec<u32>,
}

impl Outcome {
    pub fn atomic(time: u32, label: u32) -> Self {
        Outcome {
            time,
            labels: vec![label],
        }
    }

    /// Coarse-grained outcome; labels are sorted and deduplicated.
    pub fn coarse(time: u32, mut labels: Vec<u32>) -> Self {
        labels.sort_unstable();
        labels.dedup();
        Outcome { time, labels }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn is_atomic(&self) -> bool {
        self.labels.len() == 1
    }

    fn disjoint(&self, other: &Outcome) -> bool {
        self.labels.iter().all(|l| !other.labels.contains(l))
    }

    fn merged(&self, other: &Outcome) -> Outcome {
        Outcome::coarse(self.time, [self.labels.as_slice(), &other.labels].concat())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.time)?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicSequence {
    outcomes: Option<Vec<Outcome>>,
    amplitude: Complex64,
    reversible: bool,
}

impl AtomicSequence {
    /// An atom with an outcome record.
    pub fn new(outcomes: Vec<Outcome>, amplitude: Complex64) -> Self {
        AtomicSequence {
            outcomes: Some(outcomes),
            amplitude,
            reversible: false,
        }
    }

    /// An atom known only by its amplitude.
    pub fn unrecorded(amplitude: Complex64) -> Self {
        AtomicSequence {
            outcomes: None,
            amplitude,
            reversible: false,
        }
    }

    /// Marks the measurements as immediately successive, permitting `rev`.
    pub fn reversible(mut self, yes: bool) -> Self {
        self.reversible = yes;
        self
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn outcomes(&self) -> Option<&[Outcome]> {
        self.outcomes.as_deref()
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceExpr {
    Atom(AtomicSequence),
    Series(Box<SequenceExpr>, Box<SequenceExpr>),
    Parallel(Box<SequenceExpr>, Box<SequenceExpr>),
    Reverse(Box<SequenceExpr>),
}

/// Structural rule broken by an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    NonFiniteAmplitude,
    AmplitudeOutsideDisc(f64),
    TooFewOutcomes(usize),
    TimesNotIncreasing,
    EmptyOutcome,
    JunctionMismatch { left: Outcome, right: Outcome },
    JunctionNotAtomic(Outcome),
    ParallelShapeMismatch,
    ParallelIdentical,
    ParallelDiffersInSeveral(usize),
    ParallelDiffersAtTerminal,
    ParallelOverlap(u32),
    NotReversible,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NonFiniteAmplitude => write!(f, "amplitude is not finite"),
            Rule::AmplitudeOutsideDisc(m) => write!(f, "atom amplitude modulus {m} exceeds 1"),
            Rule::TooFewOutcomes(n) => write!(f, "atom has {n} outcomes, needs an initial and a final one"),
            Rule::TimesNotIncreasing => write!(f, "outcome times must strictly increase"),
            Rule::EmptyOutcome => write!(f, "outcome with no labels"),
            Rule::JunctionMismatch { left, right } => {
                write!(f, "junction mismatch: left ends at {left}, right starts at {right}")
            }
            Rule::JunctionNotAtomic(o) => write!(f, "junction outcome {o} is not atomic"),
            Rule::ParallelShapeMismatch => write!(f, "parallel branches have different measurement times"),
            Rule::ParallelIdentical => write!(f, "parallel branches do not differ"),
            Rule::ParallelDiffersInSeveral(n) => write!(f, "parallel branches differ in {n} outcomes"),
            Rule::ParallelDiffersAtTerminal => {
                write!(f, "parallel branches differ in an initial or final outcome")
            }
            Rule::ParallelOverlap(l) => write!(f, "parallel branches share outcome label {l}"),
            Rule::NotReversible => {
                write!(f, "reversal of measurements that do not immediately follow one another")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Slash-separated route from the root, e.g. `root/ser.1/par.0`.
    pub path: String,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.rule)
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::Structure {
            path: v.path,
            rule: v.rule.to_string(),
        }
    }
}

type Record = Option<Vec<Outcome>>;

impl SequenceExpr {
    pub fn atom(a: AtomicSequence) -> Self {
        SequenceExpr::Atom(a)
    }

    pub fn series(a: SequenceExpr, b: SequenceExpr) -> Self {
        SequenceExpr::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SequenceExpr, b: SequenceExpr) -> Self {
        SequenceExpr::Parallel(Box::new(a), Box::new(b))
    }

    pub fn reverse(a: SequenceExpr) -> Self {
        SequenceExpr::Reverse(Box::new(a))
    }

    /// True when every atom is flagged reversible.
    pub fn is_reversible(&self) -> bool {
        match self {
            SequenceExpr::Atom(a) => a.reversible,
            SequenceExpr::Series(a, b) | SequenceExpr::Parallel(a, b) => a.is_reversible() && b.is_reversible(),
            SequenceExpr::Reverse(c) => c.is_reversible(),
        }
    }

    /// Checks the structural rules, reporting the first violation found in
    /// pre-order.
    pub fn validate(&self) -> Result<(), Violation> {
        self.record("root").map(|_| ())
    }

    /// Outcome record of the whole expression (`None` if any part is
    /// unrecorded).
    pub fn outcomes(&self) -> Result<Option<Vec<Outcome>>, Violation> {
        self.record("root")
    }

    fn record(&self, path: &str) -> Result<Record, Violation> {
        let fail = |rule| {
            Err(Violation {
                path: path.to_owned(),
                rule,
            })
        };
        match self {
            SequenceExpr::Atom(a) => {
                if !is_finite(&a.amplitude) {
                    return fail(Rule::NonFiniteAmplitude);
                }
                let m = a.amplitude.norm();
                if m > 1.0 + ATOM_SLACK {
                    return fail(Rule::AmplitudeOutsideDisc(m));
                }
                let Some(outcomes) = &a.outcomes else {
                    return Ok(None);
                };
                if outcomes.len() < 2 {
                    return fail(Rule::TooFewOutcomes(outcomes.len()));
                }
                if outcomes.iter().any(|o| o.labels.is_empty()) {
                    return fail(Rule::EmptyOutcome);
                }
                if outcomes.windows(2).any(|w| w[0].time >= w[1].time) {
                    return fail(Rule::TimesNotIncreasing);
                }
                Ok(Some(outcomes.clone()))
            }
            SequenceExpr::Series(a, b) => {
                let left = a.record(&format!("{path}/ser.0"))?;
                let right = b.record(&format!("{path}/ser.1"))?;
                let (Some(left), Some(mut right)) = (left, right) else {
                    return Ok(None);
                };
                let (l, r) = (left.last().unwrap(), &right[0]);
                if l != r {
                    return fail(Rule::JunctionMismatch {
                        left: l.clone(),
                        right: r.clone(),
                    });
                }
                if !l.is_atomic() {
                    return fail(Rule::JunctionNotAtomic(l.clone()));
                }
                let mut joined = left;
                joined.extend(right.drain(1..));
                Ok(Some(joined))
            }
            SequenceExpr::Parallel(a, b) => {
                let left = a.record(&format!("{path}/par.0"))?;
                let right = b.record(&format!("{path}/par.1"))?;
                let (Some(left), Some(right)) = (left, right) else {
                    return Ok(None);
                };
                if left.len() != right.len() || left.iter().zip(&right).any(|(x, y)| x.time != y.time) {
                    return fail(Rule::ParallelShapeMismatch);
                }
                let differing: Vec<usize> = (0..left.len()).filter(|&k| left[k] != right[k]).collect();
                match differing.as_slice() {
                    [] => fail(Rule::ParallelIdentical),
                    [k] if *k == 0 || *k == left.len() - 1 => fail(Rule::ParallelDiffersAtTerminal),
                    &[k] => {
                        if let Some(&shared) = left[k].labels.iter().find(|l| right[k].labels.contains(l)) {
                            return fail(Rule::ParallelOverlap(shared));
                        }
                        debug_assert!(left[k].disjoint(&right[k]));
                        let mut merged = left;
                        merged[k] = merged[k].merged(&right[k]);
                        Ok(Some(merged))
                    }
                    many => fail(Rule::ParallelDiffersInSeveral(many.len())),
                }
            }
            SequenceExpr::Reverse(c) => {
                if !c.is_reversible() {
                    return fail(Rule::NotReversible);
                }
                let inner = c.record(&format!("{path}/rev"))?;
                Ok(inner.map(|mut outcomes| {
                    let span = outcomes[0].time + outcomes.last().unwrap().time;
                    outcomes.reverse();
                    for o in &mut outcomes {
                        o.time = span - o.time;
                    }
                    outcomes
                }))
            }
        }
    }

    /// Amplitude by Feynman's rules. Fails if the expression is invalid.
    pub fn evaluate(&self) -> Result<Complex64> {
        self.validate()?;
        Ok(self.evaluate_unchecked())
    }

    /// Amplitude by Feynman's rules without structural checks. No clamping:
    /// parallel sums of unnormalised inputs may leave the unit disc.
    pub fn evaluate_unchecked(&self) -> Complex64 {
        match self {
            SequenceExpr::Atom(a) => a.amplitude,
            SequenceExpr::Series(a, b) => a.evaluate_unchecked() * b.evaluate_unchecked(),
            SequenceExpr::Parallel(a, b) => a.evaluate_unchecked() + b.evaluate_unchecked(),
            SequenceExpr::Reverse(c) => c.evaluate_unchecked().conj(),
        }
    }

    /// `|amplitude|²`.
    pub fn probability(&self) -> Result<f64> {
        self.evaluate().map(|a| a.norm_sqr())
    }

    pub fn atom_count(&self) -> usize {
        match self {
            SequenceExpr::Atom(_) => 1,
            SequenceExpr::Series(a, b) | SequenceExpr::Parallel(a, b) => a.atom_count() + b.atom_count(),
            SequenceExpr::Reverse(c) => c.atom_count(),
        }
    }
}

impl From<AtomicSequence> for SequenceExpr {
    fn from(a: AtomicSequence) -> Self {
        SequenceExpr::Atom(a)
    }
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}
