//! Experiment files.
//!
//! ```json
//! { "statistics": "boson" | "fermion",
//!   "stages": [ [ [ [re, im], ... ], ... ], ... ],
//!   "initial": [1, 2],
//!   "intermediates": [ {"atomic": [1, 2]} | {"coarse": [[1, 2], [1, 3]]} | "sum_distinct", ... ],
//!   "finals": [ [1, 2], ... ] | "all_distinct",
//!   "normalize": false }
//! ```
//!
//! Stage `k` is a list of rows, one per destination outcome; entry `[m][l]`
//! is the single-particle amplitude `l → m`. An entry is `[re, im]` or a bare
//! real. Labels are 1-based. `sum_distinct` and `all_distinct` expand to
//! every ascending configuration of distinct labels. `intermediates` may be
//! omitted for a single stage and `normalize` defaults to false.
//!
//! Syntax errors are located by line and column, semantic errors by a JSON
//! path such as `$.stages[1][0]`.

use serde_json::{Map, Value};

use super::{Experiment, Intermediate};
use crate::error::{Error, Result};
use crate::indist::{distinct_configurations, Configuration, StageMatrix, Statistics};
use crate::{CMatrix, Complex64, Stage};

const KEYS: [&str; 6] = [
    "statistics",
    "stages",
    "initial",
    "intermediates",
    "finals",
    "normalize",
];

pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::parse(format!("$.{k}"), "unknown key"));
    }

    let stats = match field(obj, "statistics")?.as_str() {
        Some("boson") => Statistics::Boson,
        Some("fermion") => Statistics::Fermion,
        _ => return Err(Error::parse("$.statistics", "expected \"boson\" or \"fermion\"")),
    };

    let stage_values = field(obj, "stages")?
        .as_array()
        .ok_or_else(|| Error::parse("$.stages", "expected a list of stages"))?;
    if stage_values.is_empty() {
        return Err(Error::parse("$.stages", "at least one stage is required"));
    }
    let mut stages: Vec<Stage> = Vec::with_capacity(stage_values.len());
    for (k, v) in stage_values.iter().enumerate() {
        let path = format!("$.stages[{k}]");
        let stage = parse_stage(v, &path)?;
        if let Some(prev) = stages.last() {
            if stage.sources() != prev.destinations() {
                return Err(Error::parse(
                    path,
                    format!(
                        "stage {k} has {} source columns but stage {} has {} destination rows",
                        stage.sources(),
                        k - 1,
                        prev.destinations()
                    ),
                ));
            }
        }
        stages.push(stage);
    }

    let initial = parse_configuration(field(obj, "initial")?, "$.initial", stages[0].sources())?;
    let n = initial.len();
    if n == 0 {
        return Err(Error::parse("$.initial", "at least one particle is required"));
    }

    let inter_values: &[Value] = match obj.get("intermediates") {
        None => &[],
        Some(Value::Array(a)) => a,
        Some(_) => return Err(Error::parse("$.intermediates", "expected a list")),
    };
    if inter_values.len() != stages.len() - 1 {
        return Err(Error::parse(
            "$.intermediates",
            format!(
                "{} stages need {} intermediate outcomes, got {}",
                stages.len(),
                stages.len() - 1,
                inter_values.len()
            ),
        ));
    }
    let intermediates = inter_values
        .iter()
        .enumerate()
        .map(|(k, v)| parse_intermediate(v, &format!("$.intermediates[{k}]"), n, stages[k].destinations()))
        .collect::<Result<Vec<_>>>()?;

    let last = stages.last().unwrap().destinations();
    let finals = match field(obj, "finals")? {
        Value::String(s) if s == "all_distinct" => distinct_configurations(n, last),
        Value::Array(list) => list
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let path = format!("$.finals[{k}]");
                let c = parse_configuration(v, &path, last)?;
                expect_particles(&c, n, &path)?;
                Ok(c)
            })
            .collect::<Result<_>>()?,
        _ => {
            return Err(Error::parse(
                "$.finals",
                "expected a list of configurations or \"all_distinct\"",
            ))
        }
    };
    if finals.is_empty() {
        return Err(Error::parse("$.finals", "no final configurations"));
    }

    let normalize = match obj.get("normalize") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::parse("$.normalize", "expected true or false")),
    };

    Ok(Experiment::new(stats, stages, initial, intermediates, finals)?.with_normalize(normalize))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse("$", format!("missing key {key:?}")))
}

fn parse_stage(v: &Value, path: &str) -> Result<Stage> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected a list of rows"))?;
    if rows.is_empty() {
        return Err(Error::parse(path, "stage has no rows"));
    }
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{r}]");
        let entries = row
            .as_array()
            .ok_or_else(|| Error::parse(&rpath, "expected a row of amplitudes"))?;
        let row: Vec<Complex64> = entries
            .iter()
            .enumerate()
            .map(|(c, e)| parse_complex(e, &format!("{rpath}[{c}]")))
            .collect::<Result<_>>()?;
        if let Some(first) = parsed.first() {
            if row.len() != first.len() {
                return Err(Error::parse(
                    &rpath,
                    format!("row has {} entries but row 0 has {}", row.len(), first.len()),
                ));
            }
        } else if row.is_empty() {
            return Err(Error::parse(&rpath, "empty row"));
        }
        parsed.push(row);
    }
    let m = CMatrix::from_rows(parsed).map_err(|e| Error::parse(path, e.to_string()))?;
    StageMatrix::new(m).map_err(|e| Error::parse(path, e.to_string()))
}

fn parse_complex(v: &Value, path: &str) -> Result<Complex64> {
    let z = match v {
        Value::Number(x) => Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0),
        Value::Array(parts) if parts.len() == 2 => match (parts[0].as_f64(), parts[1].as_f64()) {
            (Some(re), Some(im)) => Complex64::new(re, im),
            _ => return Err(Error::parse(path, "expected [re, im] numbers")),
        },
        _ => return Err(Error::parse(path, "expected [re, im] or a real number")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::parse(path, "non-finite amplitude"));
    }
    Ok(z)
}

fn parse_configuration(v: &Value, path: &str, bound: usize) -> Result<Configuration> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected a list of 1-based labels"))?;
    let labels = items
        .iter()
        .map(|x| match x.as_u64() {
            Some(l) if l >= 1 && (l as usize) <= bound => Ok(l as usize),
            Some(l) => Err(Error::parse(path, format!("label {l} out of range 1..={bound}"))),
            None => Err(Error::parse(path, format!("invalid label {x}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Configuration::from_one_based(&labels)
}

fn expect_particles(c: &Configuration, n: usize, path: &str) -> Result<()> {
    if c.len() != n {
        return Err(Error::parse(path, format!("{} labels, expected {n}", c.len())));
    }
    Ok(())
}

fn parse_intermediate(v: &Value, path: &str, n: usize, bound: usize) -> Result<Intermediate> {
    match v {
        Value::String(s) if s == "sum_distinct" => {
            let all = distinct_configurations(n, bound);
            if all.is_empty() {
                return Err(Error::parse(
                    path,
                    format!("no distinct configurations of {n} among {bound} outcomes"),
                ));
            }
            Ok(Intermediate::Coarse(all))
        }
        Value::Object(o) if o.len() == 1 => {
            if let Some(a) = o.get("atomic") {
                let p = format!("{path}.atomic");
                let c = parse_configuration(a, &p, bound)?;
                expect_particles(&c, n, &p)?;
                Ok(Intermediate::Atomic(c))
            } else if let Some(list) = o.get("coarse") {
                let p = format!("{path}.coarse");
                let items = list
                    .as_array()
                    .ok_or_else(|| Error::parse(&p, "expected a list of configurations"))?;
                if items.is_empty() {
                    return Err(Error::parse(&p, "empty coarse-grained outcome"));
                }
                let configs = items
                    .iter()
                    .enumerate()
                    .map(|(k, x)| {
                        let q = format!("{p}[{k}]");
                        let c = parse_configuration(x, &q, bound)?;
                        expect_particles(&c, n, &q)?;
                        Ok(c)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Intermediate::Coarse(configs))
            } else {
                Err(Error::parse(path, "expected {\"atomic\": ...} or {\"coarse\": ...}"))
            }
        }
        _ => Err(Error::parse(
            path,
            "expected {\"atomic\": ...}, {\"coarse\": ...} or \"sum_distinct\"",
        )),
    }
}
