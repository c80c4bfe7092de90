use decision_market::decision::DecisionRuleSpec;
use decision_market::seed::SimRng;
use decision_market::Report;
use rand::SeedableRng;

fn main() {
    let report = Report::new([0.35, 0.6, 0.2]);
    let mut rng = SimRng::seed_from_u64(9);
    for rule in [DecisionRuleSpec::stochastic(0.9), DecisionRuleSpec::deterministic()] {
        let dist = rule.make_distribution(&report);
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            counts[dist.sample(&mut rng)] += 1;
        }
        println!("{:?}: probabilities {:?}, 10k draws {:?}", rule.kind, dist.probabilities(), counts);
    }
}
