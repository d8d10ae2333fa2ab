use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orlicz_dynamics::config::RunConfig;
use orlicz_dynamics::report::{
    cmd_check, cmd_norm, cmd_probe_young, cmd_simulate, load_vector, AppError, ReportEnvelope, ERROR_EXIT_CODE,
};

#[derive(Parser)]
#[command(
    name = "orlicz-lab",
    version,
    about = "Dynamics of weighted translations on Orlicz spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; CSV series are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the checkers.
    #[arg(long, env = "ORLICZ_LAB_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the criterion checkers; exit 0 witness, 2 obstruction, 3 inconclusive.
    Check(Common),
    /// Build witness and periodic vectors at the checker's witnesses.
    Simulate(Common),
    /// Luxemburg norm of a vector file.
    Norm {
        #[command(flatten)]
        common: Common,
        /// Vector as a JSON list of `[element, value]` pairs.
        #[arg(long)]
        vector: PathBuf,
    },
    /// Δ₂ probe and complementary-function table of the configured Young function.
    ProbeYoung(Common),
}

fn run(cli: Cli) -> Result<i32, AppError> {
    let (common, vector) = match &cli.command {
        Command::Check(c) | Command::Simulate(c) | Command::ProbeYoung(c) => (c, None),
        Command::Norm { common, vector } => (common, Some(vector)),
    };
    if let Some(jobs) = common.jobs.filter(|j| *j > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let mut config = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    let report: ReportEnvelope = match &cli.command {
        Command::Check(_) => cmd_check(&config)?,
        Command::Simulate(_) => cmd_simulate(&config)?,
        Command::Norm { .. } => cmd_norm(&config, &load_vector(vector.expect("norm has a vector"))?)?,
        Command::ProbeYoung(_) => cmd_probe_young(&config)?,
    };
    match common.out.as_ref().or(config.output.as_ref()) {
        Some(path) => {
            for p in report.write_to(path)? {
                eprintln!("wrote {}", p.display());
            }
            if let Some(n) = &report.norm {
                println!("norm {} modular {}", n.norm, n.modular_at_norm);
            } else if let Some(o) = report.outcome {
                println!("{o:?}");
            }
        }
        None => println!("{}", report.to_json()),
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ERROR_EXIT_CODE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT_CODE as u8)
        }
    }
}
