//! Samples a few urn worlds and compares what an omniscient observer believes
//! with the priors the principal starts from.

use decision_market::environment::{bayesian_posterior, draw_signals, sample_episode, EnvironmentConfig};
use decision_market::seed::SimRng;
use rand::SeedableRng;

fn main() {
    let env = EnvironmentConfig::default();
    let mut rng = SimRng::seed_from_u64(1);
    println!(
        "red ball likelihood ratio {:.3}, blue {:.3}",
        env.red_likelihood_ratio(),
        env.blue_likelihood_ratio()
    );
    for _ in 0..5 {
        let episode = sample_episode(&mut rng, &env);
        let signals = draw_signals(&mut rng, &episode, &env, 4);
        let post = bayesian_posterior(&episode.priors, &signals, &env);
        let balls: Vec<String> = signals.iter().map(|s| format!("{:?}@{}", s.color, s.urn)).collect();
        println!(
            "types {:?}  priors {:.3?}  balls [{}]  posterior {:.3?}",
            episode.urn_types(),
            episode.priors.as_slice(),
            balls.join(" "),
            post.as_slice()
        );
    }
}
