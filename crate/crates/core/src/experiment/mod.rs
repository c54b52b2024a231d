//! Multi-stage experiments on `N` identical particles.
//!
//! An experiment prepares an initial configuration, passes it through a chain
//! of stages and tabulates a list of final configurations. Between stages
//! the outcome is either one atomic configuration or a coarse-grained set of
//! them. Amplitudes multiply along a path of atomic outcomes and add across
//! the members of a coarse-grained set.

mod format;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indist::{distinct_configurations, h_fast, Configuration, StageMatrix, Statistics};
use crate::scalar::residual;
use crate::{Complex64, Stage};

pub use format::parse_experiment;

/// Outcome registered between two stages.
#[derive(Debug, Clone, PartialEq)]
pub enum Intermediate {
    Atomic(Configuration),
    Coarse(Vec<Configuration>),
}

impl Intermediate {
    pub fn configurations(&self) -> &[Configuration] {
        match self {
            Intermediate::Atomic(c) => std::slice::from_ref(c),
            Intermediate::Coarse(cs) => cs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    stats: Statistics,
    stages: Vec<Stage>,
    initial: Configuration,
    intermediates: Vec<Intermediate>,
    finals: Vec<Configuration>,
    normalize: bool,
}

impl Experiment {
    pub fn new(
        stats: Statistics,
        stages: Vec<Stage>,
        initial: Configuration,
        intermediates: Vec<Intermediate>,
        finals: Vec<Configuration>,
    ) -> Result<Self> {
        let x = Experiment {
            stats,
            stages,
            initial,
            intermediates,
            finals,
            normalize: false,
        };
        x.validate()?;
        Ok(x)
    }

    /// Normalise probabilities over the listed finals (a conditional
    /// distribution).
    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn intermediates(&self) -> &[Intermediate] {
        &self.intermediates
    }

    pub fn finals(&self) -> &[Configuration] {
        &self.finals
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    pub fn particles(&self) -> usize {
        self.initial.len()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Experiment(m));
        if self.stages.is_empty() {
            return bad("at least one stage is required".into());
        }
        for (k, pair) in self.stages.windows(2).enumerate() {
            if pair[1].sources() != pair[0].destinations() {
                return Err(Error::Dimension(format!(
                    "stage {} has {} sources but stage {} has {} destinations",
                    k + 1,
                    pair[1].sources(),
                    k,
                    pair[0].destinations()
                )));
            }
        }
        if self.intermediates.len() != self.stages.len() - 1 {
            return bad(format!(
                "{} stages need {} intermediate outcomes, got {}",
                self.stages.len(),
                self.stages.len() - 1,
                self.intermediates.len()
            ));
        }
        let n = self.initial.len();
        if n == 0 {
            return bad("initial configuration is empty".into());
        }
        self.initial
            .check_bounds(self.stages[0].sources(), "initial configuration")?;
        let check = |c: &Configuration, bound: usize, ctx: &str| -> Result<()> {
            if c.len() != n {
                return Err(Error::Experiment(format!(
                    "{ctx} {c} has {} labels, expected {n}",
                    c.len()
                )));
            }
            c.check_bounds(bound, ctx)
        };
        for (k, inter) in self.intermediates.iter().enumerate() {
            let ctx = format!("intermediate {k}");
            if let Intermediate::Coarse(cs) = inter {
                if cs.is_empty() {
                    return bad(format!("{ctx}: empty coarse-grained outcome"));
                }
                let mut sorted = cs.clone();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return bad(format!("{ctx}: coarse-grained outcome lists a configuration twice"));
                }
            }
            for c in inter.configurations() {
                check(c, self.stages[k].destinations(), &ctx)?;
            }
        }
        let last = self.stages.last().unwrap().destinations();
        for f in &self.finals {
            check(f, last, "final")?;
        }
        Ok(())
    }

    /// Amplitude of reaching `last` from the initial configuration through
    /// the listed intermediates: each coarse set is expanded and the
    /// per-stage products are summed over every choice of atomic outcomes.
    pub fn amplitude_to(&self, last: &Configuration) -> Result<Complex64> {
        if last.len() != self.particles() {
            return Err(Error::Experiment(format!(
                "final {last} has {} labels, expected {}",
                last.len(),
                self.particles()
            )));
        }
        last.check_bounds(self.stages.last().unwrap().destinations(), "final")?;
        // Σ over paths of Π_k H_k, accumulated stage by stage
        let mut frontier = vec![(self.initial.clone(), Complex64::one())];
        for (k, stage) in self.stages.iter().enumerate() {
            let targets = match self.intermediates.get(k) {
                Some(inter) => inter.configurations(),
                None => std::slice::from_ref(last),
            };
            frontier = targets
                .iter()
                .map(|t| {
                    let mut amp = Complex64::zero();
                    for (s, a) in &frontier {
                        if !a.is_zero() {
                            amp += a * h_fast(stage, s, t, self.stats)?;
                        }
                    }
                    Ok((t.clone(), amp))
                })
                .collect::<Result<_>>()?;
        }
        Ok(frontier[0].1)
    }

    /// Amplitude of the single listed final.
    pub fn sequence_amplitude(&self) -> Result<Complex64> {
        match self.finals.as_slice() {
            [only] => self.amplitude_to(only),
            other => Err(Error::Experiment(format!(
                "sequence amplitude needs exactly one final, {} listed",
                other.len()
            ))),
        }
    }

    /// One row per listed final, ordered by canonical configuration.
    pub fn distribution(&self) -> Result<OutcomeDistribution> {
        if self.finals.is_empty() {
            return Err(Error::Experiment("no final configurations listed".into()));
        }
        let mut rows: Vec<OutcomeRow> = self
            .finals
            .par_iter()
            .map(|f| {
                let amplitude = self.amplitude_to(f)?;
                Ok(OutcomeRow {
                    configuration: f.clone(),
                    amplitude,
                    probability: amplitude.norm_sqr(),
                    conditional: None,
                })
            })
            .collect::<Result<_>>()?;
        rows.sort_by(|a, b| {
            (a.configuration.canonical(), &a.configuration).cmp(&(b.configuration.canonical(), &b.configuration))
        });

        let repeated_label_warnings = rows
            .iter()
            .filter(|r| !r.configuration.is_distinct())
            .map(|r| {
                format!(
                    "final {} repeats a label; probability is the raw |H|^2 without occupancy weights",
                    r.configuration
                )
            })
            .collect();

        let total: f64 = rows.iter().map(|r| r.probability).sum();
        if self.normalize {
            if total <= 0.0 {
                return Err(Error::Experiment(
                    "cannot normalise: listed finals have total probability 0".into(),
                ));
            }
            for r in &mut rows {
                r.conditional = Some(r.probability / total);
            }
        }
        Ok(OutcomeDistribution {
            statistics: self.stats,
            rows,
            normalized: self.normalize,
            total,
            repeated_label_warnings,
        })
    }

    /// Compares the coarse-grained two-stage amplitude against the
    /// determinant of the composed stage, final by final. Valid for fermions
    /// when the intermediate is coarse-grained over every distinct
    /// configuration, where the two agree by the Cauchy–Binet formula.
    pub fn compose_check(&self) -> Result<CompositionReport> {
        if self.stats != Statistics::Fermion {
            return Err(Error::Unsupported(
                "composition check needs fermions; boson coarse-graining over repeated occupancies is not modelled"
                    .into(),
            ));
        }
        if self.stages.len() != 2 {
            return Err(Error::Experiment(format!(
                "composition check needs two stages, got {}",
                self.stages.len()
            )));
        }
        let expected = distinct_configurations(self.particles(), self.stages[0].destinations());
        let mut listed: Vec<Configuration> = self.intermediates[0].configurations().to_vec();
        listed.sort();
        if listed != expected {
            return Err(Error::Experiment(
                "intermediate must be coarse-grained over all canonical distinct configurations".into(),
            ));
        }
        if self.finals.is_empty() {
            return Err(Error::Experiment("no final configurations listed".into()));
        }
        let composed = StageMatrix::unchecked(self.stages[0].then(&self.stages[1])?);
        let mut rows = Vec::with_capacity(self.finals.len());
        let mut max_residual = 0.0f64;
        for f in &self.finals {
            let summed = self.amplitude_to(f)?;
            let direct = h_fast(&composed, &self.initial, f, self.stats)?;
            let r = residual(summed, direct);
            max_residual = max_residual.max(r);
            rows.push(CompositionRow {
                configuration: f.clone(),
                summed,
                direct,
                residual: r,
            });
        }
        Ok(CompositionReport { max_residual, rows })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRow {
    pub configuration: Configuration,
    pub amplitude: Complex64,
    /// `|amplitude|²`.
    pub probability: f64,
    /// Probability conditional on the listed finals, when normalising.
    pub conditional: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeDistribution {
    pub statistics: Statistics,
    pub rows: Vec<OutcomeRow>,
    pub normalized: bool,
    /// Sum of the raw probabilities over the listed finals.
    pub total: f64,
    pub repeated_label_warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionRow {
    pub configuration: Configuration,
    pub summed: Complex64,
    pub direct: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    pub max_residual: f64,
    pub rows: Vec<CompositionRow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;
    use crate::CMatrix;

    fn conf(labels: &[usize]) -> Configuration {
        Configuration::from_one_based(labels).unwrap()
    }

    fn beam_splitter() -> Stage {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StageMatrix::new(CMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()).unwrap()
    }

    fn unitary_stage(s: &mut Sampler, m: usize) -> Stage {
        StageMatrix::new(s.unitary(m)).unwrap()
    }

    #[test]
    fn single_stage_is_h_fast() {
        let mut s = Sampler::new(31, 0);
        let st = unitary_stage(&mut s, 4);
        let (l, m) = (conf(&[1, 3]), conf(&[2, 4]));
        for stats in Statistics::ALL {
            let x = Experiment::new(stats, vec![st.clone()], l.clone(), vec![], vec![m.clone()]).unwrap();
            assert_eq!(x.sequence_amplitude().unwrap(), h_fast(&st, &l, &m, stats).unwrap());
        }
    }

    #[test]
    fn atomic_intermediate_multiplies() {
        let mut s = Sampler::new(32, 0);
        let (a, b) = (unitary_stage(&mut s, 3), unitary_stage(&mut s, 3));
        let (l, m, n) = (conf(&[1, 2]), conf(&[2, 3]), conf(&[1, 3]));
        for stats in Statistics::ALL {
            let x = Experiment::new(
                stats,
                vec![a.clone(), b.clone()],
                l.clone(),
                vec![Intermediate::Atomic(m.clone())],
                vec![n.clone()],
            )
            .unwrap();
            let expected = h_fast(&a, &l, &m, stats).unwrap() * h_fast(&b, &m, &n, stats).unwrap();
            assert!((x.sequence_amplitude().unwrap() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn coarse_intermediate_adds() {
        let mut s = Sampler::new(33, 0);
        let (a, b) = (unitary_stage(&mut s, 4), unitary_stage(&mut s, 4));
        let (l, m, m2, n) = (conf(&[1, 2]), conf(&[1, 3]), conf(&[2, 4]), conf(&[3, 4]));
        for stats in Statistics::ALL {
            let x = Experiment::new(
                stats,
                vec![a.clone(), b.clone()],
                l.clone(),
                vec![Intermediate::Coarse(vec![m.clone(), m2.clone()])],
                vec![n.clone()],
            )
            .unwrap();
            let h = |st: &Stage, f: &Configuration, t: &Configuration| h_fast(st, f, t, stats).unwrap();
            let expected = h(&a, &l, &m) * h(&b, &m, &n) + h(&a, &l, &m2) * h(&b, &m2, &n);
            assert!((x.sequence_amplitude().unwrap() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn hom_distribution() {
        let cf = conf(&[1, 2]);
        let boson = Experiment::new(
            Statistics::Boson,
            vec![beam_splitter()],
            cf.clone(),
            vec![],
            vec![cf.clone()],
        )
        .unwrap();
        assert!(boson.distribution().unwrap().rows[0].probability < 1e-18);
        let fermion = Experiment::new(
            Statistics::Fermion,
            vec![beam_splitter()],
            cf.clone(),
            vec![],
            vec![cf.clone()],
        )
        .unwrap();
        assert!((fermion.distribution().unwrap().rows[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_stage_keeps_initial() {
        let cf = conf(&[2, 3, 1]);
        for stats in Statistics::ALL {
            let x = Experiment::new(stats, vec![Stage::identity(3)], cf.clone(), vec![], vec![cf.clone()]).unwrap();
            assert_eq!(x.distribution().unwrap().rows[0].probability, 1.0);
        }
    }

    #[test]
    fn fermion_pairs_normalised() {
        let mut s = Sampler::new(34, 0);
        let st = unitary_stage(&mut s, 3);
        let x = Experiment::new(
            Statistics::Fermion,
            vec![st],
            conf(&[1, 3]),
            vec![],
            distinct_configurations(2, 3),
        )
        .unwrap();
        let d = x.distribution().unwrap();
        assert_eq!(d.rows.len(), 3);
        assert!((d.total - 1.0).abs() < 1e-9);
        assert!(d.repeated_label_warnings.is_empty());
    }

    #[test]
    fn ordering_warnings_and_normalisation() {
        let mut s = Sampler::new(35, 0);
        let st = unitary_stage(&mut s, 3);
        let finals = vec![conf(&[3, 2]), conf(&[1, 1]), conf(&[2, 3]), conf(&[1, 2])];
        let x = Experiment::new(Statistics::Boson, vec![st], conf(&[1, 2]), vec![], finals)
            .unwrap()
            .with_normalize(true);
        let d = x.distribution().unwrap();
        let order: Vec<String> = d.rows.iter().map(|r| r.configuration.to_string()).collect();
        assert_eq!(order, ["(1,1)", "(1,2)", "(2,3)", "(3,2)"]);
        assert_eq!(d.repeated_label_warnings.len(), 1);
        let sum: f64 = d.rows.iter().map(|r| r.conditional.unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        // reordering labels leaves the boson amplitude alone
        assert!((d.rows[2].amplitude - d.rows[3].amplitude).norm() < 1e-15);
    }

    #[test]
    fn compose_check_cauchy_binet() {
        let mut s = Sampler::new(36, 0);
        for m in [3, 4] {
            let (a, b) = (unitary_stage(&mut s, m), unitary_stage(&mut s, m));
            let x = Experiment::new(
                Statistics::Fermion,
                vec![a, b],
                conf(&[1, 2]),
                vec![Intermediate::Coarse(distinct_configurations(2, m))],
                distinct_configurations(2, m),
            )
            .unwrap();
            assert!(x.compose_check().unwrap().max_residual <= 1e-9);
        }
    }

    #[test]
    fn compose_check_with_identity_second_stage() {
        let mut s = Sampler::new(37, 0);
        let a = unitary_stage(&mut s, 3);
        let l = conf(&[1, 2]);
        let x = Experiment::new(
            Statistics::Fermion,
            vec![a.clone(), Stage::identity(3)],
            l.clone(),
            vec![Intermediate::Coarse(distinct_configurations(2, 3))],
            distinct_configurations(2, 3),
        )
        .unwrap();
        let report = x.compose_check().unwrap();
        for row in &report.rows {
            let h = h_fast(&a, &l, &row.configuration, Statistics::Fermion).unwrap();
            assert_eq!(row.summed, h);
            assert_eq!(row.direct, h);
        }
    }

    #[test]
    fn compose_check_rejections() {
        let mut s = Sampler::new(38, 0);
        let (a, b) = (unitary_stage(&mut s, 3), unitary_stage(&mut s, 3));
        let build = |stats, inter: Vec<Configuration>| {
            Experiment::new(
                stats,
                vec![a.clone(), b.clone()],
                conf(&[1, 2]),
                vec![Intermediate::Coarse(inter)],
                vec![conf(&[1, 2])],
            )
            .unwrap()
        };
        assert!(matches!(
            build(Statistics::Boson, distinct_configurations(2, 3)).compose_check(),
            Err(Error::Unsupported(_))
        ));
        assert!(build(Statistics::Fermion, vec![conf(&[1, 2])]).compose_check().is_err());
    }

    #[test]
    fn construction_errors() {
        let cf = conf(&[1, 2]);
        let two = Stage::identity(2);
        let three = Stage::identity(3);
        let e = Experiment::new(Statistics::Boson, vec![], cf.clone(), vec![], vec![]);
        assert!(e.is_err());
        let e = Experiment::new(
            Statistics::Boson,
            vec![two.clone(), three.clone()],
            cf.clone(),
            vec![Intermediate::Atomic(cf.clone())],
            vec![],
        );
        assert!(matches!(e, Err(Error::Dimension(_))));
        let e = Experiment::new(
            Statistics::Boson,
            vec![two.clone(), two.clone()],
            cf.clone(),
            vec![],
            vec![],
        );
        assert!(e.is_err());
        let e = Experiment::new(
            Statistics::Boson,
            vec![two.clone(), two.clone()],
            cf.clone(),
            vec![Intermediate::Coarse(vec![])],
            vec![],
        );
        assert!(e.is_err());
        let e = Experiment::new(
            Statistics::Boson,
            vec![two.clone(), two.clone()],
            cf.clone(),
            vec![Intermediate::Coarse(vec![cf.clone(), cf.clone()])],
            vec![],
        );
        assert!(e.is_err());
        let e = Experiment::new(Statistics::Boson, vec![two.clone()], conf(&[1, 3]), vec![], vec![]);
        assert!(matches!(e, Err(Error::LabelOutOfRange { label: 3, .. })));
        let e = Experiment::new(
            Statistics::Boson,
            vec![two.clone()],
            cf.clone(),
            vec![],
            vec![conf(&[1])],
        );
        assert!(e.is_err());
        let x = Experiment::new(Statistics::Boson, vec![two], cf.clone(), vec![], vec![]).unwrap();
        assert!(x.distribution().is_err());
        assert!(x.sequence_amplitude().is_err());
    }
}
