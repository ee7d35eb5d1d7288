//! Experiment runner: reads a JSON config, runs a suite of instances and
//! writes a deterministic JSON report.

pub mod classes;
pub mod config;
pub mod report;
pub mod suites;

use std::time::Instant;

use anyhow::{Context, Result};
use majcert_core::majcert::DecompositionKind;
use rayon::prelude::*;

use crate::classes::generate_class;
use crate::config::{ExperimentConfig, SuiteParams, SCHEMA_VERSION};
use crate::report::{Record, Report, Summary, Timings, ARTIFACT_VERSION};
use crate::suites::{instance_seed, run_instance};

pub struct RunOutput {
    pub report: Report,
    pub timings: Timings,
}

/// Run every instance of the configured suite. Records come back in index
/// order regardless of `jobs`.
pub fn run(config: &ExperimentConfig, params: &SuiteParams, seed: Option<u64>, jobs: usize) -> Result<RunOutput> {
    let seed = seed.unwrap_or(config.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building thread pool")?;
    let results: Vec<(Record, std::time::Duration)> = pool.install(|| {
        (0..params.instances())
            .into_par_iter()
            .map(|i| {
                let start = Instant::now();
                let rec = run_instance(params, i, instance_seed(seed, i));
                (rec, start.elapsed())
            })
            .collect()
    });
    let (records, times): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut echo = config.clone();
    echo.seed = seed;
    let summary = Summary::of(&records);
    Ok(RunOutput {
        report: Report {
            schema: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            seed,
            config: echo,
            records,
            summary,
        },
        timings: Timings(times),
    })
}

fn reverify_doc(params: &SuiteParams, rec: &Record) -> Result<bool> {
    let Some(doc) = &rec.decomposition else {
        return Ok(true);
    };
    let class = match params {
        SuiteParams::Majcert(p) => generate_class(&p.class, rec.seed)?,
        SuiteParams::Realmajcert(p) => generate_class(&p.class, rec.seed)?,
        SuiteParams::QuantumProtocol(p) => {
            classes::GeneratedClass::Real(suites::quantum_class(p, rec.seed)?)
        }
        _ => return Ok(true),
    };
    Ok(match doc.kind {
        DecompositionKind::Real => doc.reverify_real(&class.to_real()),
        _ => doc.reverify_boolean(class.boolean()?),
    })
}

/// Check a report: schema, summary consistency, that a rerun reproduces the
/// records exactly, and that embedded decompositions reverify. Returns the
/// list of problems found.
pub fn verify(report: &Report, jobs: usize) -> Result<Vec<String>> {
    let mut issues = Vec::new();
    if report.schema != SCHEMA_VERSION {
        issues.push(format!("schema {} is not {SCHEMA_VERSION}", report.schema));
        return Ok(issues);
    }
    if report.seed != report.config.seed {
        issues.push("report seed differs from config seed".into());
    }
    if report.summary != Summary::of(&report.records) {
        issues.push("summary does not match records".into());
    }
    let params = report.config.validate()?;
    for rec in &report.records {
        match reverify_doc(&params, rec) {
            Ok(true) => {}
            Ok(false) => issues.push(format!("record {}: embedded decomposition does not verify", rec.index)),
            Err(e) => issues.push(format!("record {}: {e:#}", rec.index)),
        }
    }
    let rerun = run(&report.config, &params, Some(report.seed), jobs)?.report;
    if rerun.records.len() != report.records.len() {
        issues.push(format!("rerun produced {} records, report has {}", rerun.records.len(), report.records.len()));
    }
    for (a, b) in report.records.iter().zip(&rerun.records) {
        if a != b {
            issues.push(format!("record {} differs from rerun", a.index));
        }
    }
    Ok(issues)
}
