use std::fmt::Write;
use std::time::Instant;

use clap::ValueEnum;
use serde_json::json;

use symmetrize::indist::{h_fast, MAX_FERMIONS};
use symmetrize::numerics::{determinant, permanent_ryser, MAX_RYSER_PERMANENT};
use symmetrize::sample::Sampler;
use symmetrize::{Complex64, Configuration, Error, StageMatrix, Statistics};

use crate::{Failure, Format};

const BENCH_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Permanent,
    Determinant,
    #[value(name = "h_fast")]
    HFast,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Permanent => "permanent",
            Kind::Determinant => "determinant",
            Kind::HFast => "h_fast",
        }
    }

    fn limit(self, stats: Statistics) -> usize {
        match (self, stats) {
            (Kind::Permanent, _) | (Kind::HFast, Statistics::Boson) => MAX_RYSER_PERMANENT,
            _ => MAX_FERMIONS,
        }
    }
}

/// One timed size: median wall time over the repetitions and the kernel
/// value, which depends only on the fixed seed.
pub struct Row {
    pub n: usize,
    pub median: f64,
    pub value: Complex64,
}

fn case(kind: Kind, n: usize, stats: Statistics) -> impl FnMut() -> Result<Complex64, Error> {
    let mut s = Sampler::new(BENCH_SEED, n as u64);
    let (u, to) = match kind {
        Kind::HFast => {
            let modes = 2 * n;
            (s.unitary(modes), s.distinct_configuration(n, modes))
        }
        _ => (s.unitary(n), Configuration::from_zero_based(Vec::new())),
    };
    let from = Configuration::from_zero_based((0..n).collect());
    let stage = StageMatrix::new(u.clone()).expect("unitary stage");
    move || match kind {
        Kind::Permanent => permanent_ryser(&u),
        Kind::Determinant => determinant(&u),
        Kind::HFast => h_fast(&stage, &from, &to, stats),
    }
}

pub fn measure(kind: Kind, min: usize, max: usize, reps: usize, stats: Statistics) -> Result<Vec<Row>, Failure> {
    if min == 0 || min > max {
        return Err(Failure::usage(format!(
            "size range {min}..={max} is empty or starts at 0"
        )));
    }
    if reps == 0 {
        return Err(Failure::usage("reps must be at least 1"));
    }
    let limit = kind.limit(stats);
    if max > limit {
        return Err(Error::SizeLimit {
            what: "bench",
            n: max,
            max: limit,
        }
        .into());
    }
    let mut rows = Vec::new();
    for n in min..=max {
        let mut run = case(kind, n, stats);
        let mut times = Vec::with_capacity(reps);
        let mut value = Complex64::new(0.0, 0.0);
        for _ in 0..reps {
            let start = Instant::now();
            value = run()?;
            times.push(start.elapsed().as_secs_f64());
        }
        times.sort_by(f64::total_cmp);
        let median = if reps % 2 == 1 {
            times[reps / 2]
        } else {
            (times[reps / 2 - 1] + times[reps / 2]) / 2.0
        };
        rows.push(Row { n, median, value });
    }
    Ok(rows)
}

pub fn run(
    kind: Kind,
    min: usize,
    max: usize,
    reps: usize,
    statistics: &str,
    format: Format,
) -> Result<(String, u8), Failure> {
    let stats: Statistics = statistics.parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
    let rows = measure(kind, min, max, reps, stats)?;
    let mut out = String::new();
    match format {
        Format::Text => {
            writeln!(out, "# kind {} reps {reps} seed {BENCH_SEED}", kind.name()).unwrap();
            writeln!(
                out,
                "# {:>4}  {:>12}  {:>14}  {:>22}",
                "n", "median_s", "evals_per_s", "|value|"
            )
            .unwrap();
            for r in &rows {
                writeln!(
                    out,
                    "  {:>4}  {:>12.6e}  {:>14.3e}  {:>22.15e}",
                    r.n,
                    r.median,
                    1.0 / r.median.max(1e-12),
                    r.value.norm()
                )
                .unwrap();
            }
        }
        Format::Machine => {
            for r in &rows {
                let obj = json!({
                    "kind": kind.name(),
                    "n": r.n,
                    "median_s": r.median,
                    "evals_per_s": 1.0 / r.median.max(1e-12),
                    "value": [r.value.re, r.value.im],
                });
                writeln!(out, "{obj}").unwrap();
            }
        }
    }
    Ok((out, 0))
}
