//! J signals spread over J agents versus one agent holding all of them.
//!
//! cargo run --release --example distributed_vs_centralised -- [signals] [steps]

use decision_market::config::{ExperimentConfig, ExperimentKind};
use decision_market::harness::{simulate_replicate, ReplicateSummary};

fn main() {
    let mut args = std::env::args().skip(1);
    let signals: usize = args.next().map_or(3, |s| s.parse().expect("signals"));
    let steps: u64 = args.next().map_or(100_000, |s| s.parse().expect("steps"));
    for kind in [ExperimentKind::Distributed, ExperimentKind::Centralised] {
        let mut config = ExperimentConfig::preset(kind, signals).expect("preset");
        config.num_steps = steps;
        let (_, series) = simulate_replicate(&config, 0).expect("run");
        let s = ReplicateSummary::from_series(0, config.seed, &series);
        println!(
            "{:<12} tail Er {:.4}  reward {:.3} (rule {:.3}, ideal {:.3})  converged at {:?}",
            kind.name(),
            s.tail_mean_er,
            s.tail_mean_reward,
            s.tail_mean_rule_predicted_reward,
            s.tail_mean_ideal_reward,
            s.convergence_step
        );
    }
}
