//! Walks through one time step of a three-agent market.

use decision_market::environment::EnvironmentConfig;
use decision_market::market::{Market, MarketConfig};

fn main() {
    let mut market = Market::new(EnvironmentConfig::default(), MarketConfig::distributed(3), Default::default(), 7)
        .expect("valid config");
    let r = market.step();
    println!("priors            {:.3?}", r.priors.as_slice());
    for (pos, report) in r.reports.iter().enumerate().skip(1) {
        println!("agent {} reports   {:.3?}  (signals {:?})", pos - 1, report.as_slice(), r.signals[pos - 1]);
    }
    println!("oracle            {:.3?}", r.oracle_posterior.as_slice());
    println!("action dist       {:?}", r.action_distribution.probabilities());
    println!("action {} -> outcome {}", r.action, r.outcome);
    println!("scores            {:+.4?}", r.scores);
    println!("report error      {:.5}", r.report_error);
}
