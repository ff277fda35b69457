use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contractctl::experiments::{self, Out, EXPERIMENTS};
use contractctl::params::{parse_list, parse_tol, Params};

#[derive(Parser)]
#[command(name = "contractctl", version = env!("CONTRACTCTL_BUILD_STAMP"), about = "Run contraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report (and datasets) to the output directory.
    Run(RunArgs),
}

/// A comma-separated list taken as a single flag value.
#[derive(Clone)]
struct List(Vec<f64>);

fn list(s: &str) -> anyhow::Result<List> {
    parse_list(s).map(List)
}

#[derive(Args)]
struct RunArgs {
    experiment: String,
    /// Scales, comma separated; `2^-k` is accepted.
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    t: Option<List>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Values of χ, comma separated.
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    chi: Option<List>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<i64>,
    #[arg(long)]
    h: Option<f64>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "contractctl-out")]
    out: PathBuf,
}

impl RunArgs {
    fn flag_params(&self) -> Params {
        Params {
            t: self.t.clone().map(|l| l.0),
            samples: self.samples,
            seed: self.seed,
            lambda: self.lambda,
            chi: self.chi.clone().map(|l| l.0),
            range: self.range,
            resolution: self.resolution,
            radius: self.radius,
            m: self.m,
            weight: self.weight,
            h: self.h,
            tol: self.tol.iter().cloned().collect(),
        }
    }
}

fn usage() -> String {
    format!(
        "usage: contractctl run <experiment> [--flag ...] [--config path.toml] [--out dir]\nexperiments: {}",
        EXPERIMENTS.join(", ")
    )
}

fn configure_threads() {
    if let Some(n) = std::env::var("CONTRACTCTL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    let Some(defaults) = experiments::defaults(&args.experiment) else {
        eprintln!("unknown experiment: {}\n{}", args.experiment, usage());
        return ExitCode::from(2);
    };
    let mut params = defaults;
    if let Some(path) = &args.config {
        match Params::from_toml_file(path) {
            Ok(c) => params = params.overlay(&c),
            Err(e) => {
                eprintln!("error: {e:#}\n{}", usage());
                return ExitCode::from(2);
            }
        }
    }
    let params = params.overlay(&args.flag_params());
    if let Err(e) = params.validate() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    configure_threads();
    let out = match Out::new(&args.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut report = match experiments::run(&args.experiment, &params, &out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e:#}", args.experiment);
            return ExitCode::from(1);
        }
    };
    let path = out.report_path(&args.experiment);
    report.outputs.sort();
    if let Err(e) = std::fs::write(&path, report.to_json()) {
        eprintln!("error: writing {}: {e}", path.display());
        return ExitCode::from(1);
    }
    for g in report.failed_gates() {
        eprintln!(
            "gate failed: {} ({:?} on {}, value {:?}, limit {:?})",
            g.target, g.rule, g.name, g.value, g.limit
        );
    }
    println!(
        "{}: {} ({})",
        args.experiment,
        if report.passed { "passed" } else { "FAILED" },
        path.display()
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
