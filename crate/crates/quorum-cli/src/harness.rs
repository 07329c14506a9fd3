//! Runs a configured experiment grid: datasets × seeds, one committee per
//! cell.
//!
//! Datasets are processed in configuration order; the seeds of one dataset
//! run in parallel and are collected back in seed order, so reports are
//! byte-stable across thread schedules.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use quorum::{
    fit_member, plan_protocol, rng, split, standardize, Committee, Dataset, Scaler,
    WeightProtocol,
};

use crate::committee_file;
use crate::config::{ExperimentConfig, ProtocolChoice, ReportFormat};
use crate::manifest;
use crate::report::{
    compute_aggregates, format_csv, format_json, format_markdown, format_predictions,
    format_seed_metrics, DatasetReport, ExperimentReport, MemberResult, SeedReport,
};

/// Everything a cell produces beyond its report: the fitted committee and
/// the feature scaler it expects inputs to pass through.
pub struct CellArtifacts {
    pub seed: u64,
    pub committee: Committee,
    pub scaler: Scaler,
}

pub struct DatasetRun {
    pub report: DatasetReport,
    pub cells: Vec<CellArtifacts>,
}

pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub datasets: Vec<DatasetRun>,
}

fn hits(predictions: &[usize], truth: &[usize]) -> f64 {
    let agree = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    agree as f64 / truth.len() as f64
}

fn run_cell(
    ds: &Dataset,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<(SeedReport, CellArtifacts, usize, usize)> {
    let pair = split(ds, cfg.split_fraction, seed, cfg.split_mode, cfg.rounding)?;
    let (train, test, scaler) = standardize(&pair.train, &pair.test);
    let protocol = match cfg.protocol {
        ProtocolChoice::Validation(f) => WeightProtocol::Validation(f),
        ProtocolChoice::Resubstitution => WeightProtocol::Resubstitution,
        ProtocolChoice::ExternalTest => WeightProtocol::External(&test),
    };
    let plan = plan_protocol(&train, &protocol, seed)?;

    let mut warnings = Vec::new();
    let mut scored = Vec::new();
    for (k, spec) in cfg.learners.iter().enumerate() {
        // Same member-seed rule as quorum::fit_committee, keyed by roster
        // position so drops don't reshuffle the survivors' seeds.
        let spec = spec.clone().with_seed(rng::derive(seed, k as u64));
        match fit_member(&spec, &plan, &train, cfg.accuracy_mode) {
            Ok(member) => scored.push(member),
            Err(e) => warnings.push(format!("dropped {}: {e}", spec.kind().name())),
        }
    }
    if scored.is_empty() {
        bail!("seed {seed}: every member failed to fit ({})", warnings.join("; "));
    }

    let mut members = Vec::with_capacity(scored.len());
    for s in &scored {
        let predictions = s.member.model.predict_batch(&test)?;
        let test_accuracy = hits(&predictions, test.labels());
        members.push(MemberResult {
            learner: s.member.spec.kind().name().to_string(),
            test_accuracy,
            precision: s.eval_metrics.precision.clone(),
            recall: s.eval_metrics.recall.clone(),
            accuracy: s.eval_metrics.accuracy.clone(),
            weights: s.member.weights.as_slice().to_vec(),
            predictions,
        });
    }

    let committee = Committee::new(
        scored.into_iter().map(|s| s.member).collect(),
        train.n_classes(),
        cfg.rating,
    )?;
    let ensemble_predictions = committee.predict_batch(&test)?;
    let ensemble_accuracy = hits(&ensemble_predictions, test.labels());

    let report = SeedReport {
        seed,
        members,
        ensemble_accuracy: Some(ensemble_accuracy),
        ensemble_predictions,
        truth: test.labels().to_vec(),
        warnings,
    };
    let artifacts = CellArtifacts { seed, committee, scaler };
    Ok((report, artifacts, train.n_rows(), test.n_rows()))
}

/// Run every configured seed against one already-loaded dataset.
pub fn run_dataset(name: &str, ds: &Dataset, cfg: &ExperimentConfig) -> DatasetRun {
    let outcomes: Vec<_> =
        cfg.seeds.par_iter().map(|&seed| run_cell(ds, seed, cfg)).collect();
    let mut seeds = Vec::new();
    let mut cells = Vec::new();
    let (mut n_train, mut n_test) = (0, 0);
    for outcome in outcomes {
        match outcome {
            Ok((seed_report, artifacts, tr, te)) => {
                seeds.push(seed_report);
                cells.push(artifacts);
                n_train = tr;
                n_test = te;
            }
            Err(e) => {
                return DatasetRun {
                    report: DatasetReport {
                        name: name.to_string(),
                        n_train: 0,
                        n_test: 0,
                        n_classes: ds.n_classes(),
                        failed: Some(format!("{e:#}")),
                        seeds: Vec::new(),
                        aggregates: Vec::new(),
                    },
                    cells: Vec::new(),
                }
            }
        }
    }
    let aggregates = compute_aggregates(&seeds);
    DatasetRun {
        report: DatasetReport {
            name: name.to_string(),
            n_train,
            n_test,
            n_classes: ds.n_classes(),
            failed: None,
            seeds,
            aggregates,
        },
        cells,
    }
}

/// Run the whole grid. A dataset that fails to load is reported as failed
/// and the run continues with the rest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    let mut datasets = Vec::new();
    for (name, manifest_path) in &cfg.datasets {
        let run = match manifest::parse_manifest(manifest_path)
            .and_then(|m| manifest::load_dataset(&m))
        {
            Ok(ds) => run_dataset(name, &ds, cfg),
            Err(e) => DatasetRun {
                report: DatasetReport {
                    name: name.clone(),
                    n_train: 0,
                    n_test: 0,
                    n_classes: 0,
                    failed: Some(format!("{e:#}")),
                    seeds: Vec::new(),
                    aggregates: Vec::new(),
                },
                cells: Vec::new(),
            },
        };
        if let Some(reason) = &run.report.failed {
            eprintln!("warning: dataset {name} failed: {reason}");
        }
        for seed in &run.report.seeds {
            for w in &seed.warnings {
                eprintln!("warning: {name} seed {}: {w}", seed.seed);
            }
        }
        datasets.push(run);
    }
    let report =
        ExperimentReport { datasets: datasets.iter().map(|d| d.report.clone()).collect() };
    Ok(ExperimentRun { report, datasets })
}

/// Write the report files and per-cell artifacts under `cfg.out_dir`.
/// Returns the paths written, top-level reports first.
pub fn write_outputs(cfg: &ExperimentConfig, run: &ExperimentRun) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    for format in &cfg.formats {
        let text = match format {
            ReportFormat::Csv => format_csv(&run.report),
            ReportFormat::Markdown => format_markdown(&run.report),
            ReportFormat::Json => format_json(&run.report)?,
        };
        let path = cfg.out_dir.join(format!("report.{}", format.extension()));
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    for ds in &run.datasets {
        if ds.report.failed.is_some() {
            continue;
        }
        for (seed_report, cell) in ds.report.seeds.iter().zip(&ds.cells) {
            let dir = cfg.out_dir.join(&ds.report.name).join(format!("seed_{}", cell.seed));
            fs::create_dir_all(&dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
            fs::write(dir.join("metrics.csv"), format_seed_metrics(seed_report))?;
            fs::write(dir.join("predictions.csv"), format_predictions(seed_report))?;
            let text = committee_file::render(&cell.committee, &cell.scaler);
            fs::write(dir.join("committee.txt"), text)?;
            written.push(dir.join("committee.txt"));
        }
    }
    Ok(written)
}

/// Load one configured dataset by name; convenience for `inspect` flows
/// and tests.
pub fn load_named_dataset(cfg: &ExperimentConfig, name: &str) -> Result<Dataset> {
    let (_, path) = cfg
        .datasets
        .iter()
        .find(|(n, _)| n == name)
        .ok_or_else(|| anyhow!("dataset {name:?} is not configured"))?;
    let m = manifest::parse_manifest(path)?;
    manifest::load_dataset(&m)
}
