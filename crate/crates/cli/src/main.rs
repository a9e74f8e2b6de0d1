use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use antitree_cli::{run_file, Experiment, RunOptions};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "antitree", version, about = "Random Schrödinger operators on antitrees")]
struct Cli {
    /// One of phase-diagram, lyapunov, density, harmonic-check, geometry-audit, spectrum-sets.
    experiment: Experiment,
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { seed: cli.seed, out: cli.out, threads: cli.threads };
    let summary = match run_file(cli.experiment, &cli.config, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("antitree: {e}");
            return ExitCode::from(1);
        }
    };
    if cli.experiment == Experiment::GeometryAudit {
        if let Ok(bytes) = summary.outcome.table.to_csv() {
            let _ = std::io::stdout().write_all(&bytes);
        }
    }
    for c in summary.outcome.cells.iter().filter(|c| c.error.is_some()) {
        let at: Vec<String> = c.coords.iter().map(|(k, v)| format!("{k}={v}")).collect();
        eprintln!("cell {} failed: {}", at.join(" "), c.error.as_deref().unwrap_or_default());
    }
    eprintln!(
        "wrote {} ({} rows) and {}",
        summary.data_path.display(),
        summary.outcome.table.rows.len(),
        summary.manifest_path.display()
    );
    if summary.failures() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
