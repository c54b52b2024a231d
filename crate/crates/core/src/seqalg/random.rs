use super::{AtomicSequence, Outcome, SequenceExpr};
use crate::sample::Sampler;

/// Atom amplitudes are drawn from the disc of this radius so that the
/// parallel groups the generator builds (at most three atoms) stay in the
/// unit disc.
const ATOM_RADIUS: f64 = 0.25;

/// Random structurally valid sequence expressions with recorded outcomes.
///
/// Every atom covers consecutive times and is flagged reversible, so any
/// generated tree may be reversed.
pub struct TreeGenerator<'a> {
    sampler: &'a mut Sampler,
    labels: u32,
}

impl<'a> TreeGenerator<'a> {
    /// `labels` is the number of outcome labels per measurement (≥ 4).
    pub fn new(sampler: &'a mut Sampler, labels: u32) -> Self {
        assert!(labels >= 4, "need room for three disjoint parallel branches");
        TreeGenerator { sampler, labels }
    }

    fn label(&mut self) -> u32 {
        self.sampler.index(self.labels as usize) as u32
    }

    fn amplitude(&mut self) -> crate::Complex64 {
        self.sampler.disc(ATOM_RADIUS)
    }

    fn chain(&mut self, t0: u32, l0: u32, t1: u32, l1: u32) -> Vec<Outcome> {
        let mut outcomes = vec![Outcome::atomic(t0, l0)];
        for t in t0 + 1..t1 {
            let l = self.label();
            outcomes.push(Outcome::atomic(t, l));
        }
        outcomes.push(Outcome::atomic(t1, l1));
        outcomes
    }

    fn leaf(&mut self, outcomes: Vec<Outcome>) -> SequenceExpr {
        let a = self.amplitude();
        AtomicSequence::new(outcomes, a).reversible(true).into()
    }

    /// A tree running from outcome `l0` at `t0` to `l1` at `t1`.
    pub fn tree(&mut self, t0: u32, l0: u32, t1: u32, l1: u32, depth: u32) -> SequenceExpr {
        assert!(t1 > t0);
        let span = t1 - t0;
        if depth == 0 || span == 1 {
            let outcomes = self.chain(t0, l0, t1, l1);
            return self.leaf(outcomes);
        }
        match self.sampler.index(4) {
            0 => {
                let tm = t0 + 1 + self.sampler.index(span as usize - 1) as u32;
                let lm = self.label();
                let a = self.tree(t0, l0, tm, lm, depth - 1);
                let b = self.tree(tm, lm, t1, l1, depth - 1);
                SequenceExpr::series(a, b)
            }
            1 => self.parallel_group(t0, l0, t1, l1),
            2 => SequenceExpr::reverse(SequenceExpr::reverse(self.tree(t0, l0, t1, l1, depth - 1))),
            _ => {
                let outcomes = self.chain(t0, l0, t1, l1);
                self.leaf(outcomes)
            }
        }
    }

    /// Two or three atoms differing only at one interior time.
    fn parallel_group(&mut self, t0: u32, l0: u32, t1: u32, l1: u32) -> SequenceExpr {
        let template = self.chain(t0, l0, t1, l1);
        let k = 1 + self.sampler.index(template.len() - 2);
        let branches = 2 + self.sampler.index(2);
        let mut picked: Vec<u32> = Vec::new();
        while picked.len() < branches {
            let l = self.label();
            if !picked.contains(&l) {
                picked.push(l);
            }
        }
        let mut atoms = picked.into_iter().map(|l| {
            let mut outcomes = template.clone();
            outcomes[k] = Outcome::atomic(outcomes[k].time, l);
            outcomes
        });
        let first = atoms.next().unwrap();
        let mut acc = self.leaf(first);
        for outcomes in atoms {
            let next = self.leaf(outcomes);
            acc = SequenceExpr::parallel(acc, next);
        }
        acc
    }

    /// A copy of `e` with fresh amplitudes whose record differs from `e`'s at
    /// exactly one interior atomic outcome, so that `par(e, partner)` is
    /// valid. `None` if `e` has no interior atomic outcome.
    pub fn parallel_partner(&mut self, e: &SequenceExpr) -> Option<SequenceExpr> {
        let record = e.outcomes().ok()??;
        let interior: Vec<&Outcome> = record[1..record.len() - 1].iter().filter(|o| o.is_atomic()).collect();
        if interior.is_empty() {
            return None;
        }
        let target = interior[self.sampler.index(interior.len())].clone();
        let old = target.labels()[0];
        let fresh = loop {
            let l = self.label();
            if l != old {
                break l;
            }
        };
        Some(self.relabel(e, &target, fresh))
    }

    fn relabel(&mut self, e: &SequenceExpr, target: &Outcome, fresh: u32) -> SequenceExpr {
        match e {
            SequenceExpr::Atom(a) => {
                let outcomes = a
                    .outcomes()
                    .expect("generated atoms are recorded")
                    .iter()
                    .map(|o| {
                        if o == target {
                            Outcome::atomic(o.time, fresh)
                        } else {
                            o.clone()
                        }
                    })
                    .collect();
                self.leaf(outcomes)
            }
            SequenceExpr::Series(a, b) => {
                SequenceExpr::series(self.relabel(a, target, fresh), self.relabel(b, target, fresh))
            }
            SequenceExpr::Parallel(a, b) => {
                SequenceExpr::parallel(self.relabel(a, target, fresh), self.relabel(b, target, fresh))
            }
            // only double reversals are generated, which leave times in place
            SequenceExpr::Reverse(x) => SequenceExpr::reverse(self.relabel(x, target, fresh)),
        }
    }
}
