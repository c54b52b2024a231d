use num_traits::Zero;

use super::{sampler_for, CauchyCandidate, CheckReport, HVariant, Tally, BLOCK_TOL, EXACT_TOL, KERNEL_TOL};
use crate::error::{Error, Result};
use crate::indist::{
    alpha_vector, g_bruteforce, gamma_matrix, h_bruteforce, h_fast, isolation_factor, q_coefficients, StageMatrix,
    Statistics,
};
use crate::perms::{self, Permutation};
use crate::sample::Sampler;
use crate::scalar::residual;
use crate::seqalg::{SequenceExpr, TreeGenerator};
use crate::{CMatrix, Complex64, Stage};

const MAX_G_PARTICLES: usize = 4;
const MAX_CONJUGATION_PARTICLES: usize = 6;
const REJECTION_ATTEMPTS: usize = 1000;

fn random_stage(s: &mut Sampler, modes: usize) -> Stage {
    StageMatrix::new(s.unitary(modes)).expect("unitaries lie in the unit disc")
}

/// Amplitudes `α_π` of a random transition of `n` particles through one
/// random unitary stage.
fn random_alphas(s: &mut Sampler, n: usize) -> Result<Vec<Complex64>> {
    let modes = n + 1;
    let stage = random_stage(s, modes);
    let from = s.distinct_configuration(n, modes);
    let to = s.distinct_configuration(n, modes);
    alpha_vector(&stage, &from, &to)
}

fn short(z: Complex64) -> String {
    format!("{:.4}{:+.4}i", z.re, z.im)
}

fn check_g(n: usize, trials: usize, seed: u64, stats: Statistics, fault: Option<Complex64>) -> Result<CheckReport> {
    if n == 0 || n > MAX_G_PARTICLES {
        return Err(Error::SizeLimit {
            what: "G-product check",
            n,
            max: MAX_G_PARTICLES,
        });
    }
    let name = match fault {
        None => format!("gproduct/{stats}/n={n}"),
        Some(_) => format!("gproduct/{stats}/n={n}/fault"),
    };
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, KERNEL_TOL);
    let modes = n + 1;
    for trial in 0..trials {
        let stage1 = random_stage(&mut s, modes);
        let stage2 = random_stage(&mut s, modes);
        let l = s.distinct_configuration(n, modes);
        let m = s.distinct_configuration(n, modes);
        let k = s.distinct_configuration(n, modes);
        let alphas = alpha_vector(&stage1, &l, &m)?;
        let betas = alpha_vector(&stage2, &m, &k)?;
        let mut gamma = gamma_matrix(&alphas, &betas)?;
        if let Some(delta) = fault {
            gamma[(0, 0)] += delta;
        }
        let g = g_bruteforce(&gamma, stats)?;
        let product = h_bruteforce(&alphas, stats)? * h_bruteforce(&betas, stats)?;
        tally.record(residual(g, product), || format!("trial {trial}: l={l} m={m} n={k}"));
    }
    Ok(tally.finish())
}

/// `G(Γ)` against `H(α)H(β)` for random pairs of unitary stages.
pub fn check_g_product(n: usize, trials: usize, seed: u64, stats: Statistics) -> Result<CheckReport> {
    check_g(n, trials, seed, stats, None)
}

/// As [`check_g_product`] with `0.1` added to `Γ[0][0]`, which must be
/// caught.
pub fn check_g_product_with_fault(n: usize, trials: usize, seed: u64, stats: Statistics) -> Result<CheckReport> {
    check_g(n, trials, seed, stats, Some(Complex64::new(0.1, 0.0)))
}

/// `|H(α+α′) − H(α) − H(α′)|` relative to `H(α)+H(α′)`.
pub fn additivity_residual(alphas: &[Complex64], primes: &[Complex64], stats: Statistics) -> Result<f64> {
    if alphas.len() != primes.len() {
        return Err(Error::Shape(format!(
            "amplitude vectors of length {} and {}",
            alphas.len(),
            primes.len()
        )));
    }
    let sum: Vec<Complex64> = alphas.iter().zip(primes).map(|(a, b)| a + b).collect();
    let lhs = h_bruteforce(&sum, stats)?;
    let rhs = h_bruteforce(alphas, stats)? + h_bruteforce(primes, stats)?;
    Ok(residual(lhs, rhs))
}

/// Linearity of `H` on pairs of physical amplitude vectors whose sum keeps
/// `|H|` in the closed unit disc.
pub fn check_additivity(n: usize, trials: usize, seed: u64, stats: Statistics) -> Result<CheckReport> {
    let name = format!("additivity/{stats}/n={n}");
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, EXACT_TOL);
    for trial in 0..trials {
        let mut attempt = 0;
        let (alphas, primes) = loop {
            let mut a = random_alphas(&mut s, n)?;
            let mut b = random_alphas(&mut s, n)?;
            attempt += 1;
            if attempt >= REJECTION_ATTEMPTS {
                a.iter_mut().chain(b.iter_mut()).for_each(|x| *x *= 0.5);
            }
            let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            if h_bruteforce(&sum, stats)?.norm() <= 1.0 {
                break (a, b);
            }
        };
        let r = additivity_residual(&alphas, &primes, stats)?;
        tally.record(r, || format!("trial {trial}"));
    }
    Ok(tally.finish())
}

/// `|conj(H_θ(α)) − H_θ(conj(α))|` relative to the second term.
pub fn conjugation_residual(variant: HVariant, alphas: &[Complex64]) -> Result<f64> {
    let conjugated: Vec<Complex64> = alphas.iter().map(|a| a.conj()).collect();
    Ok(residual(variant.apply(alphas)?.conj(), variant.apply(&conjugated)?))
}

/// Conjugation symmetry of a candidate `H_θ`. Besides the random samples,
/// the unit vector on the first odd permutation is always tried: for
/// `n = 2` that is `α = (0, 1)`, whose residual is `2|sin θ|`.
pub fn check_conjugation(variant: HVariant, n: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    let max = if variant.is_real() {
        MAX_CONJUGATION_PARTICLES
    } else {
        2
    };
    if n < 2 || n > max {
        return Err(Error::SizeLimit {
            what: "conjugation check",
            n,
            max,
        });
    }
    let name = format!("conjugation/{}/n={n}", variant.label());
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, EXACT_TOL);
    let len = perms::factorial(n);
    let mut witness = vec![Complex64::zero(); len];
    witness[1] = Complex64::new(1.0, 0.0);
    tally.record(conjugation_residual(variant, &witness)?, || "e_1".to_owned());
    for trial in 0..trials {
        let alphas = random_alphas(&mut s, n)?;
        let r = conjugation_residual(variant, &alphas)?;
        tally.record(r, || {
            if n == 2 {
                format!("alpha=({}, {})", short(alphas[0]), short(alphas[1]))
            } else {
                format!("trial {trial}")
            }
        });
    }
    Ok(tally.finish())
}

/// Residuals of `|H(z, 0)| = |z|` and `|H(0, z)| = |z|` for two particles.
pub fn isolation_residuals(z: Complex64, stats: Statistics) -> Result<[f64; 2]> {
    let zero = Complex64::zero();
    let direct = h_bruteforce(&[z, zero], stats)?.norm();
    let crossed = h_bruteforce(&[zero, z], stats)?.norm();
    Ok([(direct - z.norm()).abs(), (crossed - z.norm()).abs()])
}

/// `|H|` for three particles where particles 1 and 2 share a subexperiment
/// with amplitudes `u₁₂` (direct) and `u₂₁` (exchanged) and particle 3 is
/// isolated with amplitude 1. Only the identity and the transposition
/// `(2,1,3)` carry amplitude.
pub fn isolation_block_amplitude(u12: Complex64, u21: Complex64, stats: Statistics) -> Result<f64> {
    let swap = Permutation::transposition(3, 0, 1)?;
    let alphas: Vec<Complex64> = perms::iterate(3)?
        .map(|pi| {
            if pi.is_identity() {
                u12
            } else if pi == swap {
                u21
            } else {
                Complex64::zero()
            }
        })
        .collect();
    Ok(h_bruteforce(&alphas, stats)?.norm())
}

/// The two-particle normalisations and the three-particle block case
/// `|u₁₂ + (−1)^σ u₂₁|`.
pub fn check_isolation(stats: Statistics, seed: u64, trials: usize) -> Result<CheckReport> {
    let name = format!("isolation/{stats}");
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, EXACT_TOL);
    let sign = match stats {
        Statistics::Boson => 1.0,
        Statistics::Fermion => -1.0,
    };
    for _ in 0..trials {
        let z = s.unit_disc();
        for r in isolation_residuals(z, stats)? {
            tally.record(r, || format!("z={}", short(z)));
        }
        let u12 = s.half_disc();
        let u21 = s.half_disc();
        let got = isolation_block_amplitude(u12, u21, stats)?;
        let expected = (u12 + u21 * sign).norm();
        tally.record((got - expected).abs(), || {
            format!("u12={} u21={}", short(u12), short(u21))
        });
    }
    Ok(tally.finish())
}

/// Random partition of `0..n` into non-empty blocks.
fn random_blocks(s: &mut Sampler, n: usize) -> Vec<Vec<usize>> {
    let count = 1 + s.index(n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, s.index(i + 1));
    }
    let mut blocks: Vec<Vec<usize>> = order[..count].iter().map(|&j| vec![j]).collect();
    for &j in &order[count..] {
        let b = s.index(count);
        blocks[b].push(j);
    }
    blocks.iter_mut().for_each(|b| b.sort_unstable());
    blocks.sort();
    blocks
}

/// `|h_fast|` on a stage with random block structure against the product
/// of per-block moduli.
pub fn check_block_factorization(stats: Statistics, seed: u64, trials: usize, max_n: usize) -> Result<CheckReport> {
    let name = format!("blocks/{stats}");
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, BLOCK_TOL);
    let max_n = max_n.max(1);
    for _ in 0..trials {
        let n = 1 + s.index(max_n);
        let modes = n;
        let from = s.distinct_configuration(n, modes);
        let to = s.distinct_configuration(n, modes);
        let blocks = random_blocks(&mut s, n);
        let mut u = CMatrix::zeros(modes, modes);
        for block in &blocks {
            let local = s.unitary(block.len());
            for (a, &i) in block.iter().enumerate() {
                for (b, &j) in block.iter().enumerate() {
                    u[(to.labels()[i], from.labels()[j])] = local[(a, b)];
                }
            }
        }
        let stage = StageMatrix::new(u)?;
        let full = h_fast(&stage, &from, &to, stats)?.norm();
        let factored = isolation_factor(&stage, &from, &to, stats, &blocks)?;
        let r = (full - factored).abs() / factored.max(1.0);
        tally.record(r, || format!("from={from} to={to} blocks={blocks:?}"));
    }
    Ok(tally.finish())
}

fn cauchy_residual(f: CauchyCandidate, z1: Complex64, z2: Complex64) -> f64 {
    let additive = residual(f.apply(z1 + z2), f.apply(z1) + f.apply(z2));
    let (w1, w2) = (z1 * 2.0, z2 * 2.0);
    let multiplicative = residual(f.apply(w1 * w2), f.apply(w1) * f.apply(w2));
    additive.max(multiplicative)
}

/// Joint residual of `f(z₁+z₂) = f(z₁)+f(z₂)` and `f(w₁w₂) = f(w₁)f(w₂)`
/// with `z` drawn from the closed half disc and `w = 2z`, so every argument
/// stays in the closed unit disc. The pairs `(½, ½)` and `(½i, ½i)` are
/// always included.
pub fn check_cauchy_pair(candidate: CauchyCandidate, samples: usize, seed: u64) -> Result<CheckReport> {
    let name = format!("cauchy/{candidate}");
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, EXACT_TOL);
    let anchors = [
        (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
        (Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.5)),
    ];
    let drawn = (0..samples).map(|_| (s.half_disc(), s.half_disc())).collect::<Vec<_>>();
    for (z1, z2) in anchors.into_iter().chain(drawn) {
        tally.record(cauchy_residual(candidate, z1, z2), || {
            format!("z1={} z2={}", short(z1), short(z2))
        });
    }
    let mut report = tally.finish();
    if candidate.is_inadmissible() {
        report.note = Some("inadmissible: f(1) = 1".to_owned());
    }
    Ok(report)
}

/// Probed coefficients of `H` against `sgn(π)^σ`.
pub fn check_q_parity(n: usize, stats: Statistics) -> Result<CheckReport> {
    let name = format!("qparity/{stats}/n={n}");
    let mut tally = Tally::new(name, 0.0);
    for (pi, q) in q_coefficients(n, stats)? {
        let expected: f64 = stats.coefficient(pi.parity()).value();
        tally.record((q - expected).abs(), || format!("pi={pi} q={q}"));
    }
    Ok(tally.finish())
}

fn tree_residual(result: Result<Complex64>, expected: Complex64) -> f64 {
    match result {
        Ok(v) => residual(v, expected),
        Err(_) => f64::INFINITY,
    }
}

/// Algebraic laws of sequence expressions on random trees: double reversal,
/// parallel commutativity, series associativity, reversal of a series,
/// the probability bound and the text round trip.
pub fn check_sequence_algebra(trials: usize, seed: u64) -> Result<CheckReport> {
    let name = "seqalg".to_owned();
    let mut s = sampler_for(seed, &name);
    let mut tally = Tally::new(name, EXACT_TOL);
    let mut g = TreeGenerator::new(&mut s, 6);
    for trial in 0..trials {
        // three chained trees a: t0 → t1, b: t1 → t2, c: t2 → t3
        let t1 = 2 + trial as u32 % 4;
        let t2 = t1 + 1 + trial as u32 % 3;
        let t3 = t2 + 2;
        let a = g.tree(0, 0, t1, 1, 3);
        let b = g.tree(t1, 1, t2, 2, 3);
        let c = g.tree(t2, 2, t3, 3, 3);
        let va = a.evaluate()?;
        let vb = b.evaluate()?;
        let vc = c.evaluate()?;
        let at = |law: &str| format!("trial {trial}: {law}");

        let rr = SequenceExpr::reverse(SequenceExpr::reverse(a.clone()));
        tally.record(tree_residual(rr.evaluate(), va), || at("rev(rev(a)) = a"));

        if let Some(p) = g.parallel_partner(&a) {
            let vp = p.evaluate()?;
            let ap = SequenceExpr::parallel(a.clone(), p.clone()).evaluate();
            let pa = SequenceExpr::parallel(p, a.clone()).evaluate();
            tally.record(tree_residual(ap, va + vp), || at("par(a,p) = a + p"));
            tally.record(tree_residual(pa, va + vp), || at("par(p,a) = a + p"));
        }

        let left = SequenceExpr::series(SequenceExpr::series(a.clone(), b.clone()), c.clone()).evaluate();
        let right = SequenceExpr::series(a.clone(), SequenceExpr::series(b.clone(), c)).evaluate();
        let abc = va * vb * vc;
        tally.record(tree_residual(left, abc), || at("ser(ser(a,b),c)"));
        tally.record(tree_residual(right, abc), || at("ser(a,ser(b,c))"));

        let rev = SequenceExpr::reverse(SequenceExpr::series(a.clone(), b)).evaluate();
        tally.record(tree_residual(rev, (va * vb).conj()), || at("rev(ser(a,b)) = conj"));

        tally.record((va.norm_sqr() - 1.0).max(0.0), || at("probability <= 1"));

        let text = a.to_string();
        let round = match text.parse::<SequenceExpr>() {
            Ok(back) if back == a => 0.0,
            _ => 1.0,
        };
        tally.record(round, || format!("trial {trial}: text round trip of {text}"));
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indist::Configuration;
    use std::f64::consts::PI;

    #[test]
    fn g_product_examples() {
        let r = check_g_product(2, 100, 7, Statistics::Fermion).unwrap();
        assert!(r.passed(), "{}", r.line());
        assert_eq!(r.samples, 100);
        let r = check_g_product(3, 50, 7, Statistics::Boson).unwrap();
        assert!(r.passed(), "{}", r.line());
        assert!(check_g_product(5, 1, 7, Statistics::Boson).is_err());
    }

    #[test]
    fn g_product_fault_is_caught() {
        for stats in Statistics::ALL {
            let r = check_g_product_with_fault(2, 20, 3, stats).unwrap();
            assert!(!r.passed());
            assert!(r.max_residual >= 0.09, "{}", r.line());
        }
    }

    #[test]
    fn additivity_examples() {
        let r = check_additivity(3, 100, 1, Statistics::Boson).unwrap();
        assert!(r.passed(), "{}", r.line());
        let r = check_additivity(2, 100, 1, Statistics::Fermion).unwrap();
        assert!(r.passed(), "{}", r.line());
        let mut s = Sampler::new(2, 0);
        let alphas = s.unit_disc_vec(6);
        let zeros = vec![Complex64::zero(); 6];
        for stats in Statistics::ALL {
            assert_eq!(additivity_residual(&alphas, &zeros, stats).unwrap(), 0.0);
        }
    }

    #[test]
    fn conjugation_examples() {
        for variant in [HVariant::boson(), HVariant::fermion()] {
            let r = check_conjugation(variant, 4, 50, 9).unwrap();
            assert!(r.passed(), "{}", r.line());
        }
        let anyon = HVariant::new(PI / 2.0, false).unwrap();
        let witness = [Complex64::zero(), Complex64::new(1.0, 0.0)];
        assert!((conjugation_residual(anyon, &witness).unwrap() - 2.0).abs() < 1e-15);
        let r = check_conjugation(anyon, 2, 10, 9).unwrap();
        assert!(!r.passed());
        assert!((r.max_residual - 2.0).abs() < 1e-15);
        assert!(check_conjugation(anyon, 3, 1, 9).is_err());
    }

    #[test]
    fn conjugation_residual_is_analytic_for_anyons() {
        let mut s = Sampler::new(5, 5);
        for theta in [0.3, 1.0, PI / 2.0, 2.5, 4.0] {
            let v = HVariant::new(theta, false).unwrap();
            for _ in 0..20 {
                let alphas = [s.half_disc(), s.half_disc()];
                let h = v.apply(&alphas.map(|a| a.conj())).unwrap();
                let absolute = conjugation_residual(v, &alphas).unwrap() * h.norm().max(1.0);
                let analytic = 2.0 * theta.sin().abs() * alphas[1].norm();
                assert!((absolute - analytic).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn anyon_bound() {
        // |sin θ| ≥ 0.1 and a sample with |α₂₁| ≥ 0.5 give residual ≥ 0.1
        let v = HVariant::new(0.1f64.asin(), false).unwrap();
        let alphas = [Complex64::new(0.2, 0.1), Complex64::new(0.0, 0.5)];
        assert!(conjugation_residual(v, &alphas).unwrap() >= 0.1 - 1e-12);
    }

    #[test]
    fn isolation_examples() {
        for stats in Statistics::ALL {
            let r = check_isolation(stats, 11, 100).unwrap();
            assert!(r.passed(), "{}", r.line());
            assert_eq!(isolation_residuals(Complex64::zero(), stats).unwrap(), [0.0, 0.0]);
        }
        let half = Complex64::new(0.5, 0.0);
        assert_eq!(isolation_block_amplitude(half, half, Statistics::Fermion).unwrap(), 0.0);
        assert_eq!(isolation_block_amplitude(half, half, Statistics::Boson).unwrap(), 1.0);
    }

    #[test]
    fn isolation_block_matches_stage() {
        // particles 1, 2 share a beam splitter, particle 3 passes through
        let u12 = Complex64::new(0.3, 0.2);
        let u21 = Complex64::new(-0.1, 0.4);
        let z = Complex64::zero();
        let one = Complex64::new(1.0, 0.0);
        let u = CMatrix::from_rows(vec![vec![u12, u21, z], vec![u21, u12, z], vec![z, z, one]]).unwrap();
        let stage = StageMatrix::new(u).unwrap();
        let c = Configuration::from_zero_based(vec![0, 1, 2]);
        for stats in Statistics::ALL {
            let direct = h_fast(&stage, &c, &c, stats).unwrap().norm();
            let block = isolation_block_amplitude(u12 * u12, u21 * u21, stats).unwrap();
            assert!((direct - block).abs() < 1e-12);
        }
    }

    #[test]
    fn block_factorization() {
        for stats in Statistics::ALL {
            let r = check_block_factorization(stats, 4, 200, 6).unwrap();
            assert!(r.passed(), "{}", r.line());
        }
    }

    #[test]
    fn partitions_cover_everything() {
        let mut s = Sampler::new(8, 8);
        for n in 1..=6 {
            for _ in 0..20 {
                let blocks = random_blocks(&mut s, n);
                let mut all: Vec<usize> = blocks.concat();
                all.sort_unstable();
                assert_eq!(all, (0..n).collect::<Vec<_>>());
                assert!(blocks.iter().all(|b| !b.is_empty()));
            }
        }
    }

    #[test]
    fn cauchy_examples() {
        for f in [
            CauchyCandidate::Identity,
            CauchyCandidate::Conjugate,
            CauchyCandidate::Zero,
        ] {
            let r = check_cauchy_pair(f, 500, 3).unwrap();
            assert!(r.passed(), "{}", r.line());
            assert_eq!(r.samples, 502);
        }
        let zero = check_cauchy_pair(CauchyCandidate::Zero, 1, 3).unwrap();
        assert_eq!(zero.note.as_deref(), Some("inadmissible: f(1) = 1"));
        let scale = check_cauchy_pair(CauchyCandidate::Scale(0.5), 10, 3).unwrap();
        assert!(!scale.passed());
        assert!((scale.max_residual - 0.25).abs() < 1e-12);
        for f in [
            CauchyCandidate::Scale(2.0),
            CauchyCandidate::Scale(-1.0),
            CauchyCandidate::Phase(PI / 3.0),
            CauchyCandidate::Phase(PI),
            CauchyCandidate::Phase(0.01),
        ] {
            assert!(!check_cauchy_pair(f, 10, 3).unwrap().passed(), "{f}");
        }
    }

    #[test]
    fn q_parity_examples() {
        let r = check_q_parity(5, Statistics::Fermion).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.samples, 120);
        let q = q_coefficients(2, Statistics::Fermion).unwrap();
        assert_eq!(q.iter().map(|(_, v)| *v).collect::<Vec<_>>(), [1.0, -1.0]);
        assert!(check_q_parity(5, Statistics::Boson).unwrap().passed());
    }

    #[test]
    fn sequence_algebra() {
        let r = check_sequence_algebra(200, 13).unwrap();
        assert!(r.passed(), "{}\n{:?}", r.line(), r.witnesses);
        assert!(r.samples >= 200 * 6);
    }

    #[test]
    fn deterministic() {
        let a = check_additivity(3, 20, 99, Statistics::Fermion).unwrap();
        let b = check_additivity(3, 20, 99, Statistics::Fermion).unwrap();
        assert_eq!(a, b);
    }
}
