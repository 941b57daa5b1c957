use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use floeflow::scenario::{Mode, Scenario};
use floeflow::{runner, FloeError};

/// Run a sea-ice floe scenario.
#[derive(Parser, Debug)]
#[command(name = "floeflow", version)]
struct Args {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario mode: particle, hydro or compare.
    #[arg(long)]
    mode: Option<Mode>,
    /// Override the RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only print warnings and errors.
    #[arg(long)]
    quiet: bool,
    /// Parse and validate the scenario, then exit without running.
    #[arg(long)]
    validate_only: bool,
}

fn run(args: &Args) -> Result<(), FloeError> {
    let mut s = Scenario::load(&args.config)?;
    if let Some(m) = args.mode {
        s.mode = m;
    }
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(out) = &args.out {
        s.output.dir = out.clone();
    }
    s.validate()?;
    if args.validate_only {
        log::info!("{} is valid", args.config.display());
        return Ok(());
    }
    let summary = runner::run_scenario(&s)?;
    if let Some(r) = &summary.last_record {
        log::info!(
            "particle steps {}, max relative residuals: momentum {:e}, energy {:e}",
            summary.particle_steps,
            r.running.momentum_relative_max,
            r.running.energy_relative_max
        );
    }
    for a in &summary.agreement {
        log::info!("t = {}: L1 = {:.4}, correlation = {:.4}", a.t, a.l1, a.pearson);
    }
    log::info!("outputs in {}", summary.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("floeflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
