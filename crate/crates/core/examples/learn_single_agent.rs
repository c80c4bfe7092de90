//! A single agent with every signal learns to report the Bayesian posterior.
//! Prints its weights next to the ideal ones every so often.
//!
//! cargo run --release --example learn_single_agent -- [steps]

use decision_market::agent::ParameterMatrix;
use decision_market::environment::EnvironmentConfig;
use decision_market::market::{Market, MarketConfig};
use decision_market::metrics::tail_mean;

fn main() {
    let steps: u64 = std::env::args().nth(1).map_or(100_000, |s| s.parse().expect("steps"));
    let env = EnvironmentConfig::default();
    let mut market =
        Market::new(env.clone(), MarketConfig::centralised(3), Default::default(), 3).expect("valid config");
    let mut er = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        er.push(market.step().report_error);
        if (er.len() as u64).is_multiple_of((steps / 5).max(1)) {
            println!("step {:>7}: mean Er over last 1000 steps {:.4}", er.len(), tail_mean(&er, 1000));
        }
    }
    println!("learned weights:\n{:.3}", market.agents()[0].parameters().weights());
    println!("ideal weights:\n{:.3}", ParameterMatrix::ideal(&env).weights());
}
