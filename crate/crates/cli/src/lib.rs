//! Command-line front end: grid planning, replanning simulation, motion
//! evaluation, and loss-landscape slicing.
//!
//! Global flags: `--seed` (recorded in every output header), `--config`
//! (JSON defaults per subcommand), `--out` (output file, stdout when
//! omitted). `HOIPLAN_THREADS` caps the worker pool. Exit codes: 0 success,
//! 1 input error, 2 domain-level negative result.

pub mod commands;
pub mod formats;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Ctx, Outcome, RunConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
/// No path, or a timeline that never reached its goal.
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hoiplan",
    version,
    about = "Grid planning, replanning simulation, motion metrics, and loss-landscape slices"
)]
pub struct Cli {
    /// RNG seed, recorded in every output header.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON file with per-subcommand parameter defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Plan a risk-aware grid path through a scene.
    Plan(commands::PlanArgs),
    /// Run the replanning loop on a scripted scenario.
    Simulate(commands::SimulateArgs),
    /// Score predicted motions against ground truth.
    Eval(commands::EvalArgs),
    /// Sample a 2-D slice of a loss functional.
    Landscape(commands::LandscapeArgs),
}

/// Caps the rayon pool when HOIPLAN_THREADS is set.
fn init_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("HOIPLAN_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|e| anyhow::anyhow!("bad HOIPLAN_THREADS value '{raw}': {e}"))?;
        if n == 0 {
            anyhow::bail!("HOIPLAN_THREADS must be positive");
        }
        // A second call keeps the first pool; that is fine for tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses argv and runs one subcommand, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successful terminations; everything else
            // is an input error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_SUCCESS,
                _ => EXIT_INPUT_ERROR,
            };
            let _ = err.print();
            return code;
        }
    };
    let _ = env_logger::try_init();
    match dispatch(cli) {
        Ok(Outcome::Success) => EXIT_SUCCESS,
        Ok(Outcome::Negative) => EXIT_NEGATIVE,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_INPUT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<Outcome> {
    init_threads()?;
    let config = match &cli.config {
        Some(path) => formats::read_json::<RunConfig>(path)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx { seed: cli.seed, out: cli.out.clone(), config };
    match &cli.command {
        Command::Plan(args) => commands::cmd_plan(&ctx, args),
        Command::Simulate(args) => commands::cmd_simulate(&ctx, args),
        Command::Eval(args) => commands::cmd_eval(&ctx, args),
        Command::Landscape(args) => commands::cmd_landscape(&ctx, args),
    }
}
