use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigma_lab::{cmd_audit, cmd_convergence, cmd_feasibility_scan, cmd_simulate, AuditKind, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "sigma-lab", version, about = "Dirac-harmonic maps into spheres on a discrete torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a seed, run the flow, write the final fields and the trace.
    Simulate(Common),
    /// Run an audit battery on saved fields or on a seed.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Directory holding phi.csv and optionally psi.csv.
        #[arg(long)]
        fields: Option<PathBuf>,
    },
    /// Grid refinement study with empirical orders.
    Convergence(Common),
    /// Scan the constants for a positive gradient coefficient.
    FeasibilityScan(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $SIGMA_LAB_OUT, else ./sigma-lab-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid size; a comma-separated list for `convergence`.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<usize>,
    #[arg(long)]
    seed_rng: Option<u64>,
    /// Comma-separated audit names.
    #[arg(long, value_delimiter = ',')]
    audits: Option<Vec<AuditKind>>,
    /// Flow residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn run(cli: Cli) -> Result<sigma_lab::RunManifest, CliError> {
    let (common, fields) = match &cli.command {
        Command::Simulate(c) | Command::Convergence(c) | Command::FeasibilityScan(c) => (c, None),
        Command::Audit { common, fields } => (common, fields.clone()),
    };
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        grid: common.grid.clone(),
        seed_rng: common.seed_rng,
        audits: common.audits.clone(),
        tol: common.tol,
        fields,
        out: common.out.clone(),
    };
    cfg.apply(&overrides, matches!(cli.command, Command::Convergence(_)))?;
    match cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::Audit { .. } => cmd_audit(&cfg),
        Command::Convergence(_) => cmd_convergence(&cfg),
        Command::FeasibilityScan(_) => cmd_feasibility_scan(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(m) => {
            println!(
                "{}: {} ({} files in {})",
                m.command,
                m.status,
                m.files.len(),
                sigma_lab::resolve_out_dir(&m.config).display()
            );
            for note in &m.notes {
                println!("note: {note}");
            }
            ExitCode::from(m.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
