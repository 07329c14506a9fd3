use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use quorum::LearnerKind;
use quorum_cli::config::{apply_overrides, parse_config, Overrides};
use quorum_cli::manifest::parse_manifest;
use quorum_cli::report::format_markdown;
use quorum_cli::{committee_file, fetch, harness};

/// Weighted-committee classifier: train a roster of base learners, weight
/// each per class by precision + recall + accuracy, vote by weighted
/// argmax.
#[derive(Parser)]
#[command(name = "quorum", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid (datasets × seeds) and write reports.
    Run(RunArgs),
    /// Download any missing dataset files and verify shapes.
    Fetch(FetchArgs),
    /// Print the weight matrix and roster of a saved committee.
    InspectCommittee {
        /// A committee.txt written by `run`.
        path: PathBuf,
    },
    /// List available learners and their hyperparameters.
    Learners,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long, default_value = "configs/default.conf")]
    config: PathBuf,
    /// Restrict to this configured dataset (repeatable).
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    /// Seeds: a range `0..10` or a comma list `1,2,5`.
    #[arg(long)]
    seeds: Option<String>,
    /// Train fraction in (0, 1).
    #[arg(long)]
    split: Option<f64>,
    /// Comma list of learners, e.g. `knn,logreg,random_forest,elm`.
    #[arg(long)]
    learners: Option<String>,
    /// `validation:F`, `resubstitution` or `external-test`.
    #[arg(long = "weight-protocol")]
    weight_protocol: Option<String>,
    /// `onehot` or `scores`.
    #[arg(long)]
    rating: Option<String>,
    /// Output directory for reports and per-seed artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma list of report formats: `csv`, `markdown`, `json`.
    #[arg(long)]
    format: Option<String>,
    /// Published-protocol shorthand: one seed, external-test weighting,
    /// one-hot votes, all six learners, plain split with ceil rounding.
    #[arg(long = "paper-protocol")]
    paper_protocol: bool,
}

#[derive(Args)]
struct FetchArgs {
    /// Experiment config naming the datasets to fetch.
    #[arg(long, default_value = "configs/default.conf")]
    config: PathBuf,
    /// Restrict to this configured dataset (repeatable).
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    /// Print the SHA-256 of each data file.
    #[arg(long)]
    checksums: bool,
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let cfg = parse_config(&args.config)?;
    let overrides = Overrides {
        datasets: args.datasets,
        seeds: args.seeds,
        split: args.split,
        learners: args.learners,
        protocol: args.weight_protocol,
        rating: args.rating,
        out: args.out,
        format: args.format,
        paper_protocol: args.paper_protocol,
    };
    let cfg = apply_overrides(cfg, &overrides)?;
    let run = harness::run_experiment(&cfg)?;
    let written = harness::write_outputs(&cfg, &run)?;
    print!("{}", format_markdown(&run.report));
    println!();
    for path in written.iter().filter(|p| p.file_name().map_or(false, |n| n != "committee.txt")) {
        println!("wrote {}", path.display());
    }
    if run.report.all_succeeded() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: not all requested datasets completed");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_fetch(args: FetchArgs) -> Result<ExitCode> {
    let cfg = parse_config(&args.config)?;
    let mut names: Vec<String> = cfg.datasets.iter().map(|(n, _)| n.clone()).collect();
    if !args.datasets.is_empty() {
        for want in &args.datasets {
            if !names.contains(want) {
                anyhow::bail!("dataset {want:?} is not configured (known: {})", names.join(", "));
            }
        }
        names = args.datasets;
    }
    let mut failures = 0;
    for name in &names {
        let path = &cfg.datasets.iter().find(|(n, _)| n == name).unwrap().1;
        let outcome = parse_manifest(path).and_then(|m| fetch::fetch_one(&m, args.checksums));
        match outcome {
            Ok(outcome) => println!("{}", fetch::describe(&outcome)),
            Err(e) => {
                eprintln!("{name}: failed: {e:#}");
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_inspect(path: PathBuf) -> Result<ExitCode> {
    let (committee, scaler) = committee_file::load(&path)?;
    let m = committee.n_classes();
    println!(
        "{} members, {} classes, {} features, rating {}",
        committee.members().len(),
        m,
        scaler.means.len(),
        committee.rating_mode().name()
    );
    println!();
    let name_width = committee
        .members()
        .iter()
        .map(|mem| mem.spec.kind().name().len())
        .max()
        .unwrap_or(0)
        .max("learner".len());
    print!("{:name_width$}", "learner");
    for c in 0..m {
        print!("  {:>8}", format!("class {c}"));
    }
    println!();
    for member in committee.members() {
        print!("{:name_width$}", member.spec.kind().name());
        for &w in member.weights.as_slice() {
            print!("  {w:>8.4}");
        }
        println!();
    }
    println!();
    for member in committee.members() {
        let params: Vec<String> =
            member.spec.overrides().map(|(k, v)| format!("{k}:{v}")).collect();
        let params =
            if params.is_empty() { "defaults".to_string() } else { params.join(",") };
        println!("{}: seed {}, {params}", member.spec.kind().name(), member.spec.seed());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_learners() -> ExitCode {
    for kind in LearnerKind::ALL {
        println!("{}", kind.name());
        for p in kind.schema() {
            let range = if p.integer {
                format!("{}..{}", p.min, p.max)
            } else {
                format!("{:e}..{:e}", p.min, p.max)
            };
            let kind_note = if p.integer { "integer" } else { "float" };
            println!("  {} = {} ({}, {}): {}", p.name, p.default, kind_note, range, p.help);
        }
        println!();
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Fetch(args) => cmd_fetch(args),
        Command::InspectCommittee { path } => {
            cmd_inspect(path).context("inspect-committee failed")
        }
        Command::Learners => Ok(cmd_learners()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
