use proptest::prelude::*;

use symmetrize::experiment::{Experiment, Intermediate};
use symmetrize::indist::{alpha_vector, h_bruteforce, h_fast};
use symmetrize::numerics::{determinant, permanent_naive, permanent_ryser};
use symmetrize::perms::{self, Sign};
use symmetrize::sample::Sampler;
use symmetrize::seqalg::{SequenceExpr, TreeGenerator};
use symmetrize::verify::{additivity_residual, conjugation_residual, HVariant};
use symmetrize::{CMatrix, Complex64, Configuration, Permutation, Stage, StageMatrix, Statistics};

fn stats() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn stage(s: &mut Sampler, modes: usize) -> Stage {
    StageMatrix::new(s.unitary(modes)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_matches_sum_over_permutations(seed: u64, n in 1usize..=5, st in stats()) {
        let mut s = Sampler::new(seed, 1);
        let u = stage(&mut s, n + 2);
        let from = s.distinct_configuration(n, n + 2);
        let to = s.distinct_configuration(n, n + 2);
        let brute = h_bruteforce(&alpha_vector(&u, &from, &to).unwrap(), st).unwrap();
        let fast = h_fast(&u, &from, &to, st).unwrap();
        prop_assert!(close(fast, brute, 1e-10));
    }

    #[test]
    fn relabelling_the_final_scales_by_the_sign(seed: u64, n in 1usize..=6, st in stats(), k: usize) {
        let mut s = Sampler::new(seed, 2);
        let u = stage(&mut s, n + 1);
        let from = s.distinct_configuration(n, n + 1);
        let to = s.distinct_configuration(n, n + 1);
        let pi = perms::iterate(n).unwrap().nth(k % perms::factorial(n)).unwrap();
        let moved = to.permuted(&pi).unwrap();
        let sign: f64 = match (st, pi.parity()) {
            (Statistics::Fermion, Sign::Minus) => -1.0,
            _ => 1.0,
        };
        let a = h_fast(&u, &from, &to, st).unwrap();
        let b = h_fast(&u, &from, &moved, st).unwrap();
        prop_assert!(close(b, a * sign, 1e-10));
    }

    #[test]
    fn ryser_matches_naive(seed: u64, n in 1usize..=7) {
        let mut s = Sampler::new(seed, 3);
        let m = s.unit_disc_matrix(n, n);
        let naive = permanent_naive(&m).unwrap();
        prop_assert!(close(permanent_ryser(&m).unwrap(), naive, 1e-10));
    }

    #[test]
    fn determinant_is_multiplicative(seed: u64, n in 1usize..=12) {
        let mut s = Sampler::new(seed, 4);
        let a = s.unit_disc_matrix(n, n);
        let b = s.unit_disc_matrix(n, n);
        let ab = a.matmul(&b).unwrap();
        let lhs = determinant(&ab).unwrap();
        let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn determinant_of_unitary_has_unit_modulus(seed: u64, n in 1usize..=16) {
        let mut s = Sampler::new(seed, 5);
        let u: CMatrix = s.unitary(n);
        prop_assert!((determinant(&u).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn permutation_group_laws(n in 1usize..=7, i: usize, j: usize) {
        let all: Vec<Permutation> = perms::iterate(n).unwrap().collect();
        let a = &all[i % all.len()];
        let b = &all[j % all.len()];
        let ab = a.compose(b).unwrap();
        prop_assert_eq!(ab.parity(), a.parity() * b.parity());
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(a.rank(), i % all.len());
        prop_assert_eq!(a.to_string().parse::<Permutation>().unwrap(), a.clone());
    }

    #[test]
    fn additivity_and_conjugation(seed: u64, n in 1usize..=5, st in stats()) {
        let mut s = Sampler::new(seed, 6);
        let len = perms::factorial(n);
        let a = s.unit_disc_vec(len);
        let b = s.unit_disc_vec(len);
        prop_assert!(additivity_residual(&a, &b, st).unwrap() < 1e-12);
        let variant = match st {
            Statistics::Boson => HVariant::boson(),
            Statistics::Fermion => HVariant::fermion(),
        };
        if n >= 2 {
            prop_assert!(conjugation_residual(variant, &a).unwrap() < 1e-12);
        }
    }

    #[test]
    fn coarse_outcome_is_sum_of_its_parts(seed: u64, n in 1usize..=3, st in stats(), split: usize) {
        let mut s = Sampler::new(seed, 7);
        let modes = n + 2;
        let stages = vec![stage(&mut s, modes), stage(&mut s, modes)];
        let initial = s.distinct_configuration(n, modes);
        let last = s.distinct_configuration(n, modes);
        let mids: Vec<Configuration> = symmetrize::indist::distinct_configurations(n, modes);
        let cut = 1 + split % (mids.len() - 1).max(1);
        let cut = cut.min(mids.len());
        let amp = |inter: Vec<Configuration>| {
            Experiment::new(st, stages.clone(), initial.clone(), vec![Intermediate::Coarse(inter)], vec![last.clone()])
                .unwrap()
                .sequence_amplitude()
                .unwrap()
        };
        let whole = amp(mids.clone());
        let left = amp(mids[..cut].to_vec());
        let parts = if cut < mids.len() { left + amp(mids[cut..].to_vec()) } else { left };
        prop_assert!(close(whole, parts, 1e-12));
        if st == Statistics::Fermion {
            // summing over every distinct intermediate composes the stages
            let composed = StageMatrix::new(stages[0].then(&stages[1]).unwrap()).unwrap();
            let direct = h_fast(&composed, &initial, &last, st).unwrap();
            prop_assert!(close(whole, direct, 1e-10));
        }
    }

    #[test]
    fn sequence_laws_on_random_trees(seed: u64, span in 1u32..=6, depth in 0u32..=4) {
        let mut s = Sampler::new(seed, 8);
        let mut g = TreeGenerator::new(&mut s, 5);
        let a = g.tree(0, 0, span, 1, depth);
        let v = a.evaluate().unwrap();
        prop_assert!(v.norm() <= 1.0);
        let rr = SequenceExpr::reverse(SequenceExpr::reverse(a.clone()));
        prop_assert_eq!(rr.evaluate().unwrap(), v);
        prop_assert_eq!(SequenceExpr::reverse(a.clone()).evaluate().unwrap(), v.conj());
        let back: SequenceExpr = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a.clone());
        if let Some(p) = g.parallel_partner(&a) {
            let x = SequenceExpr::parallel(a.clone(), p.clone()).evaluate().unwrap();
            let y = SequenceExpr::parallel(p, a).evaluate().unwrap();
            prop_assert!(close(x, y, 1e-15));
        }
    }
}
