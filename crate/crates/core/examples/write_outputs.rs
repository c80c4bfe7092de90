//! Runs a small configured experiment and writes the CSV/JSON outputs, the
//! same way the `dmsim` binary does.
//!
//! cargo run --release --example write_outputs -- [output dir]

use decision_market::config::parse_config;
use decision_market::harness;

const CONFIG: &str = r#"
experiment = "distributed"
signals = 3
num_steps = 20000
replicates = 2
seed = 11
snapshot_every = 5000

[policy]
learning_rate = 0.0003
"#;

fn main() -> Result<(), decision_market::Error> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/example".into());
    let overrides = [("output_dir".to_string(), format!("{out:?}"))];
    let config = parse_config(CONFIG.as_bytes(), &overrides)?;
    let summary = harness::run(&config)?;
    for r in &summary.replicates {
        println!("replicate {} (seed {:#x}): tail Er {:.4}", r.replicate, r.seed, r.tail_mean_er);
    }
    println!("wrote {}", config.output_dir.display());
    Ok(())
}
