//! Decision scoring: expected scores peak at the truth no matter how likely
//! the action was to be taken, and a chain of reports is paid the telescoped
//! improvement over the prior.

use decision_market::decision::DecisionRuleSpec;
use decision_market::scoring::{score_chain, ScoringRule};
use decision_market::Report;

fn main() {
    let (p0, q) = (0.5, 0.7);
    println!("expected log decision score, prior {p0}, true probability {q}");
    for p in [0.3, 0.5, 0.6, 0.7, 0.8, 0.95] {
        println!("  report {p:.2}: {:+.5}", ScoringRule::Log.expected_decision_score(p, p0, q));
    }

    let chain = [Report::new([0.5, 0.5]), Report::new([0.7, 0.4]), Report::new([0.8, 0.3])];
    let dist = DecisionRuleSpec::stochastic(0.9).make_distribution(&chain[2]);
    for (action, outcome) in [(0, true), (0, false), (1, true)] {
        let records = score_chain(ScoringRule::Log, &chain, &dist, action, outcome);
        let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
        println!(
            "action {action}, success {outcome}: scores {:+.4?}, total {:+.4}",
            scores,
            scores.iter().sum::<f64>()
        );
    }
}
