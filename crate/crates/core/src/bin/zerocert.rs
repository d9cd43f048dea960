use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zerocert::scenario::{run, Scenario, Stage};
use zerocert::Execution;

/// Zero-subset certification under δ-subharmonic growth bounds.
#[derive(Parser)]
#[command(name = "zerocert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output directory for reports.
    #[arg(long, global = true, default_value = "zerocert-out")]
    out: PathBuf,

    /// Overrides the scenario tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the largest test-family parameter.
    #[arg(long, global = true)]
    tau_max: Option<f64>,

    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Margin sweep over the test family.
    CheckNecessary,
    /// Regularity of the upper majorant under circle means.
    CheckM0,
    /// Canonical product and pointwise bound check.
    ConstructVerify,
    /// Poisson–Jensen and measure/potential round trip.
    JensenSelftest,
    /// Chain of integral means on the standard battery.
    MeansSelftest,
    /// Disk constants for the margin inequality.
    Lemma1,
    /// All stages in order.
    All,
}

impl Command {
    fn stages(self) -> Vec<Stage> {
        match self {
            Command::CheckNecessary => vec![Stage::CheckNecessary],
            Command::CheckM0 => vec![Stage::CheckM0],
            Command::ConstructVerify => vec![Stage::ConstructVerify],
            Command::JensenSelftest => vec![Stage::JensenSelftest],
            Command::MeansSelftest => vec![Stage::MeansSelftest],
            Command::Lemma1 => vec![Stage::Lemma1],
            Command::All => Stage::ALL.to_vec(),
        }
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("ZEROCERT_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring ZEROCERT_THREADS={v:?}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();

    let scenario = match &cli.scenario {
        Some(path) => Scenario::load(path),
        None => Scenario::from_json("{}"),
    };
    let mut scenario = match scenario {
        Ok(s) => s,
        Err(e) => {
            eprintln!("schema error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(tol) = cli.tol {
        scenario.tolerance = tol;
    }
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(t) = cli.tau_max {
        scenario.family = scenario.family.with_t_max(t);
    }
    if let Err(e) = scenario.validate() {
        eprintln!("schema error: {e}");
        return ExitCode::from(2);
    }

    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let report = match run(&scenario, &cli.command.stages(), &cli.out, exec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot write reports to {}: {e}", cli.out.display());
            return ExitCode::from(3);
        }
    };
    for s in &report.stages {
        match &s.error {
            None => println!("{}: ok ({:.2}s)", s.stage.name(), s.seconds),
            Some(e) => eprintln!("{}: failed: {e}", s.stage.name()),
        }
    }
    if let Some(c) = &report.consistency {
        println!("consistency: {c}");
    }
    let failed = report.failed_stages();
    if !failed.is_empty() {
        eprintln!("stage failure: {}", failed.join(", "));
        return ExitCode::from(3);
    }
    if report.contradiction() {
        eprintln!("stage failure: consistency");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
