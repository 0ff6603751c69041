//! Command-line front end for the verification suites.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for an
//! invalid configuration or command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use special_reps::suites::{run_and_write, AlgebraSpec, SuiteConfig, SuiteName};

#[derive(Parser)]
#[command(name = "special-reps", version, about = "Run the special-representation verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the suites.
    ListSuites,
    /// Parse and range-check a config file without running it.
    Validate {
        /// A `.toml` or `.json` suite config.
        config: PathBuf,
    },
    /// Run one suite (by name or config file) or all of them.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Suite name; omit when `--config` or `--all` is given.
    suite: Option<String>,
    #[arg(long, conflicts_with = "suite")]
    config: Option<PathBuf>,
    /// Run every suite with its defaults (plus the overrides below).
    #[arg(long, conflicts_with_all = ["suite", "config"])]
    all: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Radial profile: quadratic, linear, const:<c>, power:<c>:<p> or
    /// custom:<expr in r>.
    #[arg(long)]
    u: Option<String>,
    /// Monte Carlo draws for the Poisson estimates.
    #[arg(long)]
    samples: Option<usize>,
    /// `abelian:<d>`, `heisenberg:<n>`, `free:<class>` or `file:<path>`.
    #[arg(long)]
    algebra: Option<String>,
    /// Print every check, not only failures.
    #[arg(long, short)]
    verbose: bool,
}

enum Failure {
    Invalid(String),
    Checks,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListSuites => {
            for s in SuiteName::ALL {
                println!("{:<12} {}", s.label(), s.summary());
            }
            Ok(())
        }
        Command::Validate { config } => validate(config),
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn validate(path: PathBuf) -> Result<(), Failure> {
    let cfg = SuiteConfig::load(&path).map_err(|e| Failure::Invalid(e.to_string()))?;
    if let Some(spec) = &cfg.algebra {
        spec.build()
            .map_err(|e| Failure::Invalid(format!("{}: algebra: {e}", path.display())))?;
    }
    println!("{}: ok ({} suite, seed {})", path.display(), cfg.suite, cfg.seed);
    Ok(())
}

fn configs(args: &RunArgs) -> Result<Vec<SuiteConfig>, String> {
    let mut cfgs = match (&args.suite, &args.config, args.all) {
        (_, _, true) => SuiteName::ALL.map(SuiteConfig::new).to_vec(),
        (Some(name), None, false) => vec![SuiteConfig::new(SuiteName::parse(name).map_err(|e| e.to_string())?)],
        (None, Some(path), false) => vec![SuiteConfig::load(path).map_err(|e| e.to_string())?],
        _ => return Err("give a suite name, --config <file> or --all".into()),
    };
    for cfg in &mut cfgs {
        if let Some(s) = args.seed {
            cfg.seed = s;
        }
        if let Some(d) = &args.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(v) = args.r_min {
            cfg.grid.r_min = v;
        }
        if let Some(v) = args.r_max {
            cfg.grid.r_max = v;
        }
        if let Some(v) = args.nodes {
            cfg.grid.nodes = v;
        }
        if let Some(v) = &args.u {
            cfg.grid.u = v.clone();
        }
        if let Some(v) = args.samples {
            cfg.samples = v;
        }
        if let Some(v) = &args.algebra {
            cfg.algebra = Some(AlgebraSpec::try_from(v.clone()).map_err(|e| e.to_string())?);
        }
        cfg.validate().map_err(|e| e.to_string())?;
    }
    Ok(cfgs)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let cfgs = configs(&args).map_err(Failure::Invalid)?;
    let mut failed = false;
    for cfg in &cfgs {
        let started = std::time::Instant::now();
        let (report, csv, json) = run_and_write(cfg).map_err(|e| Failure::Invalid(format!("{}: {e}", cfg.suite)))?;
        println!(
            "{:<12} {} ({} passed, {} failed, {:.1?}) -> {}, {}",
            cfg.suite.label(),
            if report.pass { "PASS" } else { "FAIL" },
            report.checks_passed,
            report.checks_failed,
            started.elapsed(),
            csv.display(),
            json.display(),
        );
        for c in &report.checks {
            if args.verbose || !c.pass {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                println!("  {mark} {:<48} {:>12.4e}  {}", c.id, c.value, c.detail);
            }
        }
        failed |= !report.pass;
    }
    if failed {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}
