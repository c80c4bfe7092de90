//! Three agents under a deterministic decision rule: who collects the score?
//!
//! cargo run --release --example deterministic_three_agents -- [steps] [seeds]

use decision_market::config::{ExperimentConfig, ExperimentKind};
use decision_market::harness::simulate_replicate;
use decision_market::metrics::{tail_mean, TAIL_STEPS};

fn main() {
    let mut args = std::env::args().skip(1);
    let steps: u64 = args.next().map_or(100_000, |s| s.parse().expect("steps"));
    let seeds: u64 = args.next().map_or(3, |s| s.parse().expect("seeds"));
    let mut config = ExperimentConfig::preset(ExperimentKind::DetThree, 3).expect("preset");
    config.num_steps = steps;
    for rep in 0..seeds {
        let (market, series) = simulate_replicate(&config, rep).expect("run");
        let shares = series.score_shares();
        println!(
            "replicate {rep}: mean scores {:+.4?} shares {:?} tail Er {:.4}",
            shares.means,
            shares.shares.map(|s| s.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()),
            tail_mean(&series.er, TAIL_STEPS)
        );
        println!("  first agent weights:\n{:.3}", market.agents()[0].parameters().weights());
    }
}
