use std::fmt::Write;

use symmetrize::verify::{run_suite, suite_ok, Suite, SuiteConfig};

use crate::{Failure, Format};

pub fn config(suites: &[String], seed: u64, tolerances: &[String]) -> Result<SuiteConfig, Failure> {
    let mut selected: Vec<Suite> = Vec::new();
    for name in suites.iter().flat_map(|s| s.split(',')).map(str::trim) {
        for suite in Suite::select(name).map_err(|e| Failure::usage(e.to_string()))? {
            if !selected.contains(&suite) {
                selected.push(suite);
            }
        }
    }
    let mut config = SuiteConfig {
        suites: selected,
        seed,
        ..SuiteConfig::default()
    };
    for t in tolerances {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("tolerance {t:?} is not NAME=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("tolerance value {value:?} is not a number")))?;
        config
            .set_tolerance(name.trim(), value)
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(config)
}

pub fn run(suites: &[String], seed: u64, tolerances: &[String], format: Format) -> Result<(String, u8), Failure> {
    let config = config(suites, seed, tolerances)?;
    let reports = run_suite(&config)?;
    let ok = suite_ok(&reports);
    let mut out = String::new();
    for r in &reports {
        match format {
            Format::Text => writeln!(out, "{}", r.line()).unwrap(),
            Format::Machine => writeln!(out, "{}", r.to_json()).unwrap(),
        }
    }
    if format == Format::Text {
        let failed = reports.iter().filter(|r| !r.passed()).count();
        let expected = reports.iter().filter(|r| r.expected_fail.is_some()).count();
        writeln!(
            out,
            "# {} checks, {failed} failed, {expected} expected to fail, seed {seed}: {}",
            reports.len(),
            if ok { "ok" } else { "FAILED" }
        )
        .unwrap();
    }
    Ok((out, if ok { 0 } else { 1 }))
}
