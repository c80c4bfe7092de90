//! Continuum-armed contextual bandit agents.
//!
//! An agent sees a context made of per-urn ball counts and the log-odds of the
//! report it was handed. Its policy is Gaussian in log-odds space with mean
//! `contextᵀ · Θ` and fixed standard deviation; the sampled log-odds are
//! mapped through the logistic function to form the outgoing report.
//!
//! Learning is REINFORCE with a baseline: every experience
//! `(context, μ, h, score)` yields the gradient estimate
//! `context ⊗ (score - baseline) · (h - μ) / σ²`, and each update averages a
//! minibatch drawn from a replay buffer.

mod replay;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use replay::ReplayBuffer;

use crate::environment::{Color, EnvironmentConfig, Signal};
use crate::error::{Error, Result};
use crate::prob::{sigmoid, Report};
use crate::seed::SimRng;

/// Context rows per urn: red count, blue count, prior log-odds.
pub const ROWS_PER_URN: usize = 3;

/// Agent context `(c_r1, c_b1, c_p1, c_r2, c_b2, c_p2, ...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextVector(Array1<f64>);

impl ContextVector {
    pub fn from_vec(values: Vec<f64>) -> Self {
        assert_eq!(values.len() % ROWS_PER_URN, 0, "context length must be a multiple of 3");
        ContextVector(Array1::from(values))
    }

    pub fn num_actions(&self) -> usize {
        self.0.len() / ROWS_PER_URN
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("contiguous")
    }

    pub fn red_count(&self, urn: usize) -> f64 {
        self.0[ROWS_PER_URN * urn]
    }

    pub fn blue_count(&self, urn: usize) -> f64 {
        self.0[ROWS_PER_URN * urn + 1]
    }

    pub fn prior_log_odds(&self, urn: usize) -> f64 {
        self.0[ROWS_PER_URN * urn + 2]
    }
}

/// Builds the agent context from its signals and the incoming report.
pub fn build_context<'a>(signals: impl IntoIterator<Item = &'a Signal>, incoming_report: &Report) -> ContextVector {
    let k = incoming_report.len();
    let mut c = Array1::zeros(ROWS_PER_URN * k);
    for s in signals {
        let row = ROWS_PER_URN * s.urn
            + match s.color {
                Color::Red => 0,
                Color::Blue => 1,
            };
        c[row] += 1.0;
    }
    for (urn, lo) in incoming_report.logits().enumerate() {
        c[ROWS_PER_URN * urn + 2] = lo;
    }
    ContextVector(c)
}

/// Policy weights, `3k` rows by `k` columns. Column `A` produces the mean
/// log-odds for action `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterMatrix(Array2<f64>);

impl ParameterMatrix {
    pub fn zeros(k: usize) -> Self {
        ParameterMatrix(Array2::zeros((ROWS_PER_URN * k, k)))
    }

    pub fn from_array(weights: Array2<f64>) -> Result<Self> {
        let (rows, cols) = weights.dim();
        if rows != ROWS_PER_URN * cols {
            return Err(Error::contract(format!(
                "parameter matrix must be 3k x k, got {rows} x {cols}"
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::contract("parameter matrix has non-finite entries"));
        }
        Ok(ParameterMatrix(weights))
    }

    /// Weights that reproduce the Bayesian posterior exactly: each column
    /// adds the log likelihood ratio of every ball from its own urn to its
    /// own prior log-odds and ignores the other urns.
    pub fn ideal(config: &EnvironmentConfig) -> Self {
        let k = config.num_actions;
        let mut w = Array2::zeros((ROWS_PER_URN * k, k));
        for a in 0..k {
            w[[ROWS_PER_URN * a, a]] = config.red_likelihood_ratio().ln();
            w[[ROWS_PER_URN * a + 1, a]] = config.blue_likelihood_ratio().ln();
            w[[ROWS_PER_URN * a + 2, a]] = 1.0;
        }
        ParameterMatrix(w)
    }

    pub fn num_actions(&self) -> usize {
        self.0.ncols()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn weights_mut(&mut self) -> &mut Array2<f64> {
        &mut self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[[row, col]]
    }

    /// `(row, col, value)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.0.indexed_iter().map(|((r, c), &v)| (r, c, v))
    }
}

/// Standard normal initial weights.
pub fn init_parameters<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ParameterMatrix {
    let w = Array2::from_shape_simple_fn((ROWS_PER_URN * k, k), || StandardNormal.sample(rng));
    ParameterMatrix(w)
}

/// Mean log-odds `μ = contextᵀ · Θ`.
pub fn policy_mean(context: &ContextVector, params: &ParameterMatrix) -> Array1<f64> {
    assert_eq!(
        context.0.len(),
        params.0.nrows(),
        "context length does not match parameter rows"
    );
    context.0.dot(&params.0)
}

/// The result of one policy query.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyOutput {
    pub report: Report,
    pub mu: Array1<f64>,
    pub h: Array1<f64>,
}

/// Samples log-odds around the policy mean and converts them to a report.
pub fn act<R: Rng + ?Sized>(rng: &mut R, context: &ContextVector, params: &ParameterMatrix, sigma: f64) -> PolicyOutput {
    let noise: Vec<f64> = (0..params.num_actions()).map(|_| StandardNormal.sample(rng)).collect();
    act_with_noise(context, params, sigma, &noise)
}

/// [`act`] with the standard normal draws supplied by the caller.
pub fn act_with_noise(context: &ContextVector, params: &ParameterMatrix, sigma: f64, noise: &[f64]) -> PolicyOutput {
    let mu = policy_mean(context, params);
    assert_eq!(noise.len(), mu.len());
    let h = &mu + &(ArrayView1::from(noise).mapv(|z| sigma * z));
    let report = Report::new(h.iter().map(|&x| sigmoid(x)));
    PolicyOutput { report, mu, h }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub sigma: f64,
    pub learning_rate: f64,
    pub buffer_capacity: usize,
    pub minibatch_size: usize,
    pub baseline_decay: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            sigma: 0.3,
            learning_rate: 3e-4,
            buffer_capacity: 4096,
            minibatch_size: 64,
            baseline_decay: 0.99,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config("policy.sigma", "must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("policy.learning_rate", "must be positive"));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::config("policy.buffer_capacity", "must be positive"));
        }
        if self.minibatch_size == 0 || self.minibatch_size > self.buffer_capacity {
            return Err(Error::config(
                "policy.minibatch_size",
                format!("must lie in [1, buffer_capacity = {}]", self.buffer_capacity),
            ));
        }
        if !(0.0..1.0).contains(&self.baseline_decay) {
            return Err(Error::config("policy.baseline_decay", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One stored interaction, kept exactly as produced at acting time.
#[derive(Clone, Debug, PartialEq)]
pub struct Experience {
    pub context: ContextVector,
    pub mu: Array1<f64>,
    pub h: Array1<f64>,
    pub score: f64,
}

/// REINFORCE gradient of a single experience.
pub fn compute_gradient(exp: &Experience, baseline_value: f64, sigma: f64) -> Array2<f64> {
    let mut g = Array2::zeros((exp.context.0.len(), exp.mu.len()));
    accumulate_gradient(&mut g, exp, baseline_value, sigma, 1.0);
    g
}

fn accumulate_gradient(acc: &mut Array2<f64>, exp: &Experience, baseline_value: f64, sigma: f64, weight: f64) {
    let advantage = weight * (exp.score - baseline_value) / (sigma * sigma);
    if advantage == 0.0 {
        return;
    }
    let direction = (&exp.h - &exp.mu) * advantage;
    for (mut row, &c) in acc.rows_mut().into_iter().zip(exp.context.0.iter()) {
        if c != 0.0 {
            row.scaled_add(c, &direction);
        }
    }
}

/// One minibatch gradient-ascent step.
///
/// Samples `min(F, len)` experiences uniformly with replacement and moves the
/// parameters by `α` times their mean gradient.
pub fn update<R: Rng + ?Sized>(
    params: &ParameterMatrix,
    buffer: &ReplayBuffer<Experience>,
    rng: &mut R,
    config: &PolicyConfig,
    baseline_value: f64,
) -> ParameterMatrix {
    assert!(!buffer.is_empty(), "update needs at least one experience");
    let count = config.minibatch_size.min(buffer.len());
    let mut grad = Array2::zeros(params.0.dim());
    let weight = 1.0 / count as f64;
    for exp in buffer.sample(rng, count) {
        accumulate_gradient(&mut grad, exp, baseline_value, config.sigma, weight);
    }
    let mut next = params.0.clone();
    next.scaled_add(config.learning_rate, &grad);
    ParameterMatrix(next)
}

/// Exponential moving average of scores.
pub fn update_baseline(current: f64, new_score: f64, decay: f64) -> f64 {
    decay * current + (1.0 - decay) * new_score
}

/// A learning agent: parameters, replay buffer, baseline and its own RNG.
#[derive(Clone, Debug)]
pub struct Agent {
    params: ParameterMatrix,
    config: PolicyConfig,
    buffer: ReplayBuffer<Experience>,
    baseline: f64,
    rng: SimRng,
    learning: bool,
}

impl Agent {
    /// New agent with standard-normal weights drawn from its own stream.
    pub fn new(num_actions: usize, config: PolicyConfig, mut rng: SimRng) -> Self {
        let params = init_parameters(&mut rng, num_actions);
        Agent::with_parameters(params, config, rng)
    }

    pub fn with_parameters(params: ParameterMatrix, config: PolicyConfig, rng: SimRng) -> Self {
        let buffer = ReplayBuffer::new(config.buffer_capacity);
        Agent {
            params,
            config,
            buffer,
            baseline: 0.0,
            rng,
            learning: true,
        }
    }

    pub fn parameters(&self) -> &ParameterMatrix {
        &self.params
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn buffer(&self) -> &ReplayBuffer<Experience> {
        &self.buffer
    }

    /// Freezes or unfreezes the parameters; a frozen agent still acts.
    pub fn set_learning(&mut self, enabled: bool) {
        self.learning = enabled;
    }

    pub fn is_learning(&self) -> bool {
        self.learning
    }

    /// Produces a report for the given context.
    pub fn act(&mut self, context: &ContextVector) -> PolicyOutput {
        act(&mut self.rng, context, &self.params, self.config.sigma)
    }

    /// Stores the experience, takes one gradient step, then folds the score
    /// into the baseline.
    pub fn learn(&mut self, experience: Experience) {
        if !self.learning {
            return;
        }
        let score = experience.score;
        self.buffer.push(experience);
        self.params = update(&self.params, &self.buffer, &mut self.rng, &self.config, self.baseline);
        self.baseline = update_baseline(self.baseline, score, self.config.baseline_decay);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::bayesian_posterior;
    use crate::prob::logit;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> SimRng {
        SimRng::seed_from_u64(seed)
    }

    #[test]
    fn context_examples() {
        let half = Report::uniform(2, 0.5);
        let c = build_context(&[Signal::red(0)], &half);
        assert_eq!(c.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let signals = [Signal::red(0), Signal::red(0), Signal::blue(0)];
        let c = build_context(&signals, &Report::new([0.8, 0.5]));
        let expected = [2.0, 1.0, 1.386_294_361_119_890_6, 0.0, 0.0, 0.0];
        for (a, b) in c.as_slice().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }

        assert!(build_context(&[], &half).as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn policy_mean_examples() {
        let mut rng = rng(1);
        let params = init_parameters(&mut rng, 2);
        let zero = ContextVector::from_vec(vec![0.0; 6]);
        assert!(policy_mean(&zero, &params).iter().all(|&m| m == 0.0));

        let ideal = ParameterMatrix::ideal(&EnvironmentConfig::default());
        let c = ContextVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let mu = policy_mean(&c, &ideal);
        assert_abs_diff_eq!(mu[0], 2f64.ln(), epsilon = 1e-15);
        assert_eq!(mu[1], 0.0);

        let mut w = ParameterMatrix::zeros(2);
        w.weights_mut()[[2, 0]] = 1.0;
        let c = ContextVector::from_vec(vec![0.0, 0.0, -0.7, 0.0, 0.0, 0.0]);
        assert_eq!(policy_mean(&c, &w)[0], -0.7);
    }

    #[test]
    fn act_examples() {
        let zero = ContextVector::from_vec(vec![0.0; 6]);
        let out = act_with_noise(&zero, &ParameterMatrix::zeros(2), 0.3, &[0.0, 0.0]);
        assert_eq!(out.report.as_slice(), &[0.5, 0.5]);

        let mut w = ParameterMatrix::zeros(2);
        w.weights_mut()[[0, 0]] = 2f64.ln();
        w.weights_mut()[[0, 1]] = -(2f64.ln());
        let c = ContextVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let out = act_with_noise(&c, &w, 0.3, &[0.0, 0.0]);
        assert_abs_diff_eq!(out.report[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.report[1], 1.0 / 3.0, epsilon = 1e-15);

        let mut w = ParameterMatrix::zeros(2);
        w.weights_mut()[[2, 0]] = 40.0;
        w.weights_mut()[[2, 1]] = -40.0;
        let c = ContextVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let out = act_with_noise(&c, &w, 0.3, &[0.0, 0.0]);
        assert_eq!(out.report.as_slice(), &[1.0 - 1e-6, 1e-6]);
    }

    #[test]
    fn gradient_examples() {
        let exp = Experience {
            context: ContextVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            mu: array![0.0, 0.0],
            h: array![0.5, -0.5],
            score: 1.0,
        };
        let g = compute_gradient(&exp, 0.0, 1.0);
        assert_eq!(g.row(0).to_vec(), vec![0.5, -0.5]);
        assert!(g.rows().into_iter().skip(1).all(|r| r.iter().all(|&x| x == 0.0)));

        assert!(compute_gradient(&exp, 1.0, 1.0).iter().all(|&x| x == 0.0));
        let still = Experience { h: exp.mu.clone(), ..exp };
        assert!(compute_gradient(&still, 0.0, 1.0).iter().all(|&x| x == 0.0));
    }

    fn experience(score: f64, h: [f64; 2]) -> Experience {
        Experience {
            context: ContextVector::from_vec(vec![1.0, 2.0, 0.5, 0.0, 1.0, -0.3]),
            mu: array![0.1, -0.2],
            h: array![h[0], h[1]],
            score,
        }
    }

    #[test]
    fn update_examples() {
        let config = PolicyConfig {
            minibatch_size: 1,
            learning_rate: 0.1,
            ..Default::default()
        };
        let params = init_parameters(&mut rng(5), 2);

        let mut buf = ReplayBuffer::new(8);
        buf.push(experience(0.4, [0.3, 0.1]));
        buf.push(experience(0.4, [-0.3, 0.2]));
        assert_eq!(update(&params, &buf, &mut rng(6), &config, 0.4), params);

        let mut single = ReplayBuffer::new(8);
        let exp = experience(1.5, [0.3, 0.1]);
        single.push(exp.clone());
        let next = update(&params, &single, &mut rng(7), &config, 0.2);
        let expected = params.weights() + &(compute_gradient(&exp, 0.2, config.sigma) * 0.1);
        for (a, b) in next.weights().iter().zip(expected.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }

        // Mirror-image experiences cancel when each is drawn once.
        let plus = experience(1.0, [0.4, -0.1]);
        let minus = experience(-1.0, [0.4, -0.1]);
        assert_abs_diff_eq!(
            (compute_gradient(&plus, 0.0, 0.3) + compute_gradient(&minus, 0.0, 0.3))
                .iter()
                .map(|x| x.abs())
                .sum::<f64>(),
            0.0
        );
        let config2 = PolicyConfig {
            minibatch_size: 2,
            ..config
        };
        let mut pair = ReplayBuffer::new(2);
        pair.push(plus);
        pair.push(minus);
        let mut r = rng(8);
        let mut cancelled = false;
        for _ in 0..64 {
            // Find a draw that picks each experience once.
            let probe = r.clone();
            let picks: Vec<f64> = pair.sample(&mut probe.clone(), 2).map(|e| e.score).collect();
            if picks[0] != picks[1] {
                let next = update(&params, &pair, &mut probe.clone(), &config2, 0.0);
                for (a, b) in next.weights().iter().zip(params.weights().iter()) {
                    assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
                }
                cancelled = true;
                break;
            }
            r.random::<u64>();
        }
        assert!(cancelled);
    }

    #[test]
    fn baseline_examples() {
        assert_abs_diff_eq!(update_baseline(0.0, 1.0, 0.99), 0.01, epsilon = 1e-15);
        assert_eq!(update_baseline(0.3, 0.3, 0.99), 0.3);
        assert_eq!(update_baseline(0.3, 0.7, 0.0), 0.7);
    }

    #[test]
    fn init_examples() {
        let a = init_parameters(&mut rng(9), 2);
        assert_eq!(a, init_parameters(&mut rng(9), 2));
        assert_eq!(a.weights().dim(), (6, 2));

        let mut r = rng(10);
        let pooled: Vec<f64> = (0..8_334)
            .flat_map(|_| init_parameters(&mut r, 2).weights().iter().copied().collect::<Vec<_>>())
            .collect();
        assert!(pooled.len() >= 100_000);
        let n = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / n;
        let std = (pooled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 0.02, "{mean}");
        assert!((0.98..=1.02).contains(&std), "{std}");
    }

    #[test]
    fn ideal_weights_reproduce_posterior() {
        let env = EnvironmentConfig::default();
        let ideal = ParameterMatrix::ideal(&env);
        let colors = [Color::Red, Color::Blue];
        let priors = Report::new([0.3, 0.75]);
        // every multiset of up to 3 balls over two urns
        for n in 0..=3usize {
            for code in 0..4usize.pow(n as u32) {
                let signals: Vec<Signal> = (0..n)
                    .map(|i| {
                        let d = (code / 4usize.pow(i as u32)) % 4;
                        Signal { urn: d / 2, color: colors[d % 2] }
                    })
                    .collect();
                let ctx = build_context(&signals, &priors);
                let mu = policy_mean(&ctx, &ideal);
                let post = bayesian_posterior(&priors, &signals, &env);
                let mean_report = Report::from_logits(mu.iter().copied());
                for a in 0..2 {
                    assert_abs_diff_eq!(mean_report[a], post[a], epsilon = 1e-12);
                }
                let mu_vec: Vec<f64> = mu.to_vec();
                assert_eq!(crate::prob::argmax(&mu_vec), post.argmax());
            }
        }
    }

    #[test]
    fn agent_frozen_keeps_parameters() {
        let mut agent = Agent::new(2, PolicyConfig::default(), rng(12));
        agent.set_learning(false);
        let before = agent.parameters().clone();
        let ctx = ContextVector::from_vec(vec![1.0, 0.0, 0.2, 0.0, 0.0, -0.1]);
        let out = agent.act(&ctx);
        agent.learn(Experience { context: ctx, mu: out.mu, h: out.h, score: 1.0 });
        assert_eq!(agent.parameters(), &before);
        assert!(agent.buffer().is_empty());
    }

    proptest! {
        #[test]
        fn act_round_trips_through_logit(
            ctx in prop::collection::vec(-3.0f64..3.0, 6),
            seed in any::<u64>(),
        ) {
            let params = init_parameters(&mut rng(seed), 2);
            let c = ContextVector::from_vec(ctx);
            let out = act(&mut rng(seed ^ 1), &c, &params, 0.3);
            for a in 0..2 {
                let p = out.report[a];
                prop_assert!(p > 0.0 && p < 1.0);
                if out.h[a].abs() < 13.0 {
                    prop_assert!((logit(p) - out.h[a]).abs() < 1e-9);
                }
            }
        }
    }
}
