use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use decision_market::config::{parse_config, parse_override};
use decision_market::{harness, Error};

/// Run decision-market simulations and write metrics, weights and summaries.
#[derive(Debug, Parser)]
#[command(name = "dmsim", version)]
struct Cli {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// distributed | centralised | det_single | det_three | custom
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generic override, e.g. `--set policy.sigma=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(cli: Cli) -> Result<(), Error> {
    let file = match &cli.config {
        Some(path) => std::fs::read(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?,
        None => Vec::new(),
    };
    let mut overrides = cli.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    let quoted = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    if let Some(e) = &cli.experiment {
        overrides.push(("experiment".into(), quoted(e)));
    }
    if let Some(s) = cli.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(n) = cli.steps {
        overrides.push(("num_steps".into(), n.to_string()));
    }
    if let Some(r) = cli.replicates {
        overrides.push(("replicates".into(), r.to_string()));
    }
    if let Some(o) = &cli.out {
        overrides.push(("output_dir".into(), quoted(&o.to_string_lossy())));
    }
    let config = parse_config(&file, &overrides)?;
    let summary = harness::run(&config)?;
    for r in &summary.replicates {
        println!(
            "replicate {}: tail er {:.5}, tail reward {:.4}, converged at {}",
            r.replicate,
            r.tail_mean_er,
            r.tail_mean_reward,
            r.convergence_step.map_or("never".to_string(), |s| s.to_string())
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dmsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
