use std::fmt::Write;
use std::path::Path;

use serde_json::json;

use symmetrize::experiment::{parse_experiment, OutcomeDistribution};

use crate::{Failure, Format};

pub fn run(path: &Path, normalize: bool, format: Format) -> Result<(String, u8), Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut experiment = parse_experiment(&text)?;
    if normalize {
        experiment = experiment.with_normalize(true);
    }
    let dist = experiment.distribution()?;
    let out = match format {
        Format::Text => render_text(&dist),
        Format::Machine => render_machine(&dist),
    };
    Ok((out, 0))
}

/// Fixed-point with `digits` decimals, never `-0.000…`.
pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{:.*}", digits, x);
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_owned(),
        _ => s,
    }
}

fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

pub fn render_text(dist: &OutcomeDistribution) -> String {
    let mut header = vec!["configuration", "amplitude.re", "amplitude.im", "probability"];
    if dist.normalized {
        header.push("conditional");
    }
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for row in &dist.rows {
        let mut cells = vec![
            row.configuration.to_string(),
            fixed(row.amplitude.re, 12),
            fixed(row.amplitude.im, 12),
            fixed(row.probability, 9),
        ];
        if let Some(c) = row.conditional {
            cells.push(fixed(c, 9));
        }
        table.push(cells);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    writeln!(out, "# statistics: {}", dist.statistics).unwrap();
    for w in &dist.repeated_label_warnings {
        writeln!(out, "# warning: {w}").unwrap();
    }
    for (i, r) in table.iter().enumerate() {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| {
                if c == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        let line = line.join("  ");
        if i == 0 {
            writeln!(out, "# {}", line.trim_end()).unwrap();
        } else {
            writeln!(out, "  {}", line.trim_end()).unwrap();
        }
    }
    writeln!(out, "# total: {}", fixed(dist.total, 9)).unwrap();
    out
}

pub fn render_machine(dist: &OutcomeDistribution) -> String {
    let mut out = String::new();
    for row in &dist.rows {
        let mut obj = json!({
            "configuration": row.configuration.one_based(),
            "amplitude": [unsigned_zero(row.amplitude.re), unsigned_zero(row.amplitude.im)],
            "probability": row.probability,
        });
        if let Some(c) = row.conditional {
            obj["conditional"] = json!(c);
        }
        writeln!(out, "{obj}").unwrap();
    }
    let summary = json!({
        "statistics": dist.statistics.name(),
        "total": dist.total,
        "normalized": dist.normalized,
        "warnings": dist.repeated_label_warnings,
    });
    writeln!(out, "{summary}").unwrap();
    out
}
