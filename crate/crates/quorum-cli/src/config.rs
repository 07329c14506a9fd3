//! Run configuration: a flat sectioned text file, fully overridable from
//! the command line.
//!
//! ```text
//! [experiment]
//! seeds = 0..10
//! split_fraction = 0.8
//! weight_protocol = validation:0.25
//! rating = scores
//!
//! [datasets]
//! wine = ../data/manifests/wine.manifest
//!
//! [learners]
//! knn = k:5
//! logreg =
//! ```
//!
//! Dataset manifest paths are resolved relative to the config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quorum::{AccuracyMode, LearnerKind, LearnerSpec, RatingMode, Rounding, SplitMode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolChoice {
    Validation(f64),
    Resubstitution,
    /// Measure weights on the test set — leaks it, mirrors the published
    /// setup.
    ExternalTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// (name, manifest path) in configuration order.
    pub datasets: Vec<(String, PathBuf)>,
    pub learners: Vec<LearnerSpec>,
    pub seeds: Vec<u64>,
    pub split_fraction: f64,
    pub split_mode: SplitMode,
    pub rounding: Rounding,
    pub protocol: ProtocolChoice,
    pub rating: RatingMode,
    pub accuracy_mode: AccuracyMode,
    pub out_dir: PathBuf,
    pub formats: Vec<ReportFormat>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            learners: Vec::new(),
            seeds: (0..10).collect(),
            split_fraction: 0.8,
            split_mode: SplitMode::Stratified,
            rounding: Rounding::HalfUp,
            protocol: ProtocolChoice::Validation(0.25),
            rating: RatingMode::Scores,
            accuracy_mode: AccuracyMode::Overall,
            out_dir: PathBuf::from("out"),
            formats: vec![ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::Json],
        }
    }
}

/// Command-line overrides layered on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Restrict the run to these configured dataset names.
    pub datasets: Vec<String>,
    pub seeds: Option<String>,
    pub split: Option<f64>,
    pub learners: Option<String>,
    pub protocol: Option<String>,
    pub rating: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    /// Single seed, external-test weighting, one-hot votes, all six
    /// learners, plain split with ceil rounding: the published protocol.
    pub paper_protocol: bool,
}

/// "0..10", "7", or "1,2,5".
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let start: u64 = a.trim().parse().with_context(|| format!("bad seed range {text:?}"))?;
        let end: u64 = b.trim().parse().with_context(|| format!("bad seed range {text:?}"))?;
        if end <= start {
            bail!("empty seed range {text:?}");
        }
        return Ok((start..end).collect());
    }
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().with_context(|| format!("bad seed {t:?}")))
        .collect()
}

pub fn parse_protocol(text: &str) -> Result<ProtocolChoice> {
    match text.trim() {
        "resubstitution" => Ok(ProtocolChoice::Resubstitution),
        "external-test" => Ok(ProtocolChoice::ExternalTest),
        other => match other.strip_prefix("validation:") {
            Some(frac) => {
                let f: f64 =
                    frac.parse().with_context(|| format!("bad validation fraction {frac:?}"))?;
                if !(f > 0.0 && f < 1.0) {
                    bail!("validation fraction {f} outside (0, 1)");
                }
                Ok(ProtocolChoice::Validation(f))
            }
            None => bail!(
                "unknown weight protocol {other:?} (expected validation:F, resubstitution or external-test)"
            ),
        },
    }
}

pub fn parse_rating(text: &str) -> Result<RatingMode> {
    RatingMode::parse(text.trim())
        .with_context(|| format!("unknown rating mode {text:?} (expected onehot or scores)"))
}

pub fn parse_formats(text: &str) -> Result<Vec<ReportFormat>> {
    let mut formats = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        formats.push(match token {
            "csv" => ReportFormat::Csv,
            "markdown" | "md" => ReportFormat::Markdown,
            "json" => ReportFormat::Json,
            other => bail!("unknown report format {other:?}"),
        });
    }
    if formats.is_empty() {
        bail!("no report formats given");
    }
    Ok(formats)
}

/// `kind` plus `key:value` hyperparameter pairs, e.g. `knn = k:5`.
fn parse_learner(kind_name: &str, params: &str) -> Result<LearnerSpec> {
    let kind = LearnerKind::parse(kind_name)
        .with_context(|| format!("unknown learner {kind_name:?}"))?;
    let mut spec = LearnerSpec::new(kind);
    for pair in params.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (key, value) = pair
            .split_once(':')
            .with_context(|| format!("learner {kind_name}: {pair:?} is not key:value"))?;
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("learner {kind_name}: bad value in {pair:?}"))?;
        spec = spec
            .with(key.trim(), value)
            .with_context(|| format!("learner {kind_name}: rejected {pair:?}"))?;
    }
    Ok(spec)
}

/// Comma list of learner kind names, defaults for every hyperparameter.
pub fn parse_learner_list(text: &str) -> Result<Vec<LearnerSpec>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|name| parse_learner(name, ""))
        .collect()
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut cfg = ExperimentConfig::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            if !["experiment", "datasets", "learners"].contains(&section.as_str()) {
                bail!("{}: line {}: unknown section [{}]", path.display(), i + 1, section);
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}: line {}: expected `key = value`", path.display(), i + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        match section.as_str() {
            "experiment" => match key {
                "seeds" => cfg.seeds = parse_seeds(value)?,
                "split_fraction" => {
                    cfg.split_fraction =
                        value.parse().with_context(|| format!("bad split_fraction {value:?}"))?
                }
                "split_mode" => {
                    cfg.split_mode = match value {
                        "stratified" => SplitMode::Stratified,
                        "uniform" => SplitMode::Uniform,
                        other => bail!("unknown split_mode {other:?}"),
                    }
                }
                "rounding" => {
                    cfg.rounding = match value {
                        "half_up" => Rounding::HalfUp,
                        "up" => Rounding::Up,
                        "down" => Rounding::Down,
                        other => bail!("unknown rounding {other:?}"),
                    }
                }
                "weight_protocol" => cfg.protocol = parse_protocol(value)?,
                "rating" => cfg.rating = parse_rating(value)?,
                "accuracy" => {
                    cfg.accuracy_mode = match value {
                        "overall" => AccuracyMode::Overall,
                        "one_vs_rest" => AccuracyMode::OneVsRest,
                        other => bail!("unknown accuracy mode {other:?}"),
                    }
                }
                "out" => cfg.out_dir = dir.join(value),
                "format" => cfg.formats = parse_formats(value)?,
                other => bail!("{}: unknown experiment key {:?}", path.display(), other),
            },
            "datasets" => cfg.datasets.push((key.to_string(), dir.join(value))),
            "learners" => cfg.learners.push(parse_learner(key, value)?),
            _ => bail!("{}: line {}: entry outside any section", path.display(), i + 1),
        }
    }
    Ok(cfg)
}

/// Layer command-line overrides over a parsed config and validate the
/// result.
pub fn apply_overrides(mut cfg: ExperimentConfig, ov: &Overrides) -> Result<ExperimentConfig> {
    if !ov.datasets.is_empty() {
        let mut picked = Vec::new();
        for want in &ov.datasets {
            match cfg.datasets.iter().find(|(name, _)| name == want) {
                Some(entry) => picked.push(entry.clone()),
                None => bail!(
                    "dataset {want:?} is not configured (known: {})",
                    cfg.datasets.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
                ),
            }
        }
        cfg.datasets = picked;
    }
    if let Some(seeds) = &ov.seeds {
        cfg.seeds = parse_seeds(seeds)?;
    }
    if let Some(split) = ov.split {
        cfg.split_fraction = split;
    }
    if let Some(learners) = &ov.learners {
        cfg.learners = parse_learner_list(learners)?;
    }
    if let Some(protocol) = &ov.protocol {
        cfg.protocol = parse_protocol(protocol)?;
    }
    if let Some(rating) = &ov.rating {
        cfg.rating = parse_rating(rating)?;
    }
    if let Some(out) = &ov.out {
        cfg.out_dir = out.clone();
    }
    if let Some(format) = &ov.format {
        cfg.formats = parse_formats(format)?;
    }
    if ov.paper_protocol {
        cfg.seeds.truncate(1);
        if cfg.seeds.is_empty() {
            cfg.seeds.push(0);
        }
        cfg.protocol = ProtocolChoice::ExternalTest;
        cfg.rating = RatingMode::OneHot;
        cfg.learners = LearnerKind::ALL.map(LearnerSpec::new).to_vec();
        cfg.split_mode = SplitMode::Uniform;
        cfg.rounding = Rounding::Up;
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.datasets.is_empty() {
        bail!("no datasets configured");
    }
    if cfg.learners.is_empty() {
        bail!("no learners configured");
    }
    if cfg.seeds.is_empty() {
        bail!("no seeds configured");
    }
    if !(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0) {
        bail!("split fraction {} outside (0, 1)", cfg.split_fraction);
    }
    if cfg.formats.is_empty() {
        bail!("no report formats configured");
    }
    Ok(())
}
