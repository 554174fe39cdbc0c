//! Command-line front end: `snls <subcommand> --config run.json`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use snls::cli_io::{self, exit, load_config, ExperimentSpec, RunConfig};

#[derive(Parser)]
#[command(
    name = "snls",
    version,
    about = "Stochastic NLS simulation and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample trajectories and check the conservation laws.
    Simulate(RunArgs),
    /// Recompute the records of a stored trajectory directory.
    Verify {
        dir: PathBuf,
        #[arg(long, env = "SNLS_THREADS")]
        threads: Option<usize>,
    },
    /// Perturb the initial datum or add a forcing term and fit the deviation slope.
    Stability(RunArgs),
    /// Pull solutions back along the free and rescaled flows.
    Scatter(RunArgs),
    /// Compare solutions driven by noise and by its piecewise-linear interpolations.
    Support(RunArgs),
    /// Evaluate the space-time norm profile of sampled trajectories.
    Norms(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory; defaults to the config's `output`, then `./out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "SNLS_THREADS")]
    threads: Option<usize>,
}

fn report_error(e: &snls::Error) -> ExitCode {
    let code = cli_io::exit_code_for(e);
    println!(
        "{}",
        json!({ "status": "error", "exit_code": code, "error": e.to_string() })
    );
    ExitCode::from(code as u8)
}

fn init_threads(threads: Option<usize>) -> Result<(), snls::Error> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(snls::Error::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| snls::Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn experiment_for(cfg: &RunConfig, name: &str) -> Result<ExperimentSpec, snls::Error> {
    match &cfg.experiment {
        Some(e) if e.name() == name => Ok(e.clone()),
        Some(e) => Err(snls::Error::Config(format!(
            "config selects experiment `{}` but the subcommand is `{name}`",
            e.name()
        ))),
        None => Ok(ExperimentSpec::default_for(name).expect("known subcommand")),
    }
}

fn run(name: &str, args: RunArgs) -> Result<ExitCode, snls::Error> {
    init_threads(args.threads)?;
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.samples = samples;
    }
    let experiment = experiment_for(&cfg, name)?;
    let out = args
        .out
        .or_else(|| cfg.output.as_deref().map(|o| cfg.resolve(o)))
        .unwrap_or_else(|| Path::new("out").to_path_buf());
    let outcome = cli_io::run(&cfg, &experiment, &out)?;
    let code = outcome.exit_code();
    println!(
        "{}",
        json!({
            "status": if code == exit::PASS { "pass" } else if code == exit::NUMERICAL { "aborted" } else { "fail" },
            "exit_code": code,
            "experiment": outcome.experiment,
            "out": out.display().to_string(),
            "aborted": outcome.aborted,
            "failures": outcome.failures(),
        })
    );
    Ok(ExitCode::from(code as u8))
}

fn verify(dir: &Path, threads: Option<usize>) -> Result<ExitCode, snls::Error> {
    init_threads(threads)?;
    let checks = cli_io::verify_trajectory(dir)?;
    let failures: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    let code = if failures.is_empty() {
        exit::PASS
    } else {
        exit::CHECK_FAILED
    };
    println!(
        "{}",
        json!({
            "status": if code == exit::PASS { "pass" } else { "fail" },
            "exit_code": code,
            "checks": checks,
            "failures": failures,
        })
    );
    Ok(ExitCode::from(code as u8))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::PASS as u8
            });
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => run("simulate", a),
        Command::Stability(a) => run("stability", a),
        Command::Scatter(a) => run("scatter", a),
        Command::Support(a) => run("support", a),
        Command::Norms(a) => run("norms", a),
        Command::Verify { dir, threads } => verify(&dir, threads),
    };
    result.unwrap_or_else(|e| report_error(&e))
}
