use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_spectra::config::{ConfigError, RunConfig};
use dirac_spectra::pipeline::{self, PipelineError};

#[derive(Parser)]
#[command(name = "dirac", about = "Spectral computations for Dirac operators with regular boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize and classify the boundary conditions.
    Classify(Args),
    /// Localization plan, eigenvalues and deviations.
    Spectrum(Args),
    /// Riesz projections, Bari–Markus sums and reconstruction.
    Projections(Args),
    /// Pointwise partial sums and equiconvergence gaps.
    Converge(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "contour-nodes")]
    contour_nodes: Option<usize>,
    #[arg(long)]
    truncation: Option<i64>,
}

fn load(args: &Args) -> Result<RunConfig, PipelineError> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if let Some(m) = args.truncation {
        cfg = cfg.with_truncation(m)?;
    }
    if let Some(q) = args.contour_nodes {
        cfg.contour_nodes = q;
        cfg.validate()?;
    }
    Ok(cfg)
}

/// Prints to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let (Command::Classify(args) | Command::Spectrum(args) | Command::Projections(args) | Command::Converge(args)) = &cli.command;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }
    let cfg = load(args)?;
    let dir = pipeline::output_dir(args.out.clone(), &cfg);
    match cli.command {
        Command::Classify(_) => {
            let rep = pipeline::classify(&cfg, Some(&dir))?;
            say(&serde_json::to_string_pretty(&rep).expect("report serializes"));
        }
        Command::Spectrum(_) => {
            let rep = pipeline::spectrum(cfg, &dir)?;
            say(&format!("{} eigenvalues, {} in the rectangle; wrote {}", rep.eigenvalues.len(), rep.rect_count, dir.display()));
        }
        Command::Projections(_) => {
            let out = pipeline::projections(cfg, &dir)?;
            say(&format!("{} disc projections, sum {:.6e}; wrote {}", out.bari_markus.rows.len(), out.bari_markus.total(), dir.display()));
        }
        Command::Converge(_) => {
            let out = pipeline::converge(cfg, &dir)?;
            say(&format!("{} pointwise rows, {} gaps; wrote {}", out.pointwise.len(), out.equiconvergence.len(), dir.display()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
