//! One time step of the decision market and whole experiment runs.
//!
//! Per step, in order: draw priors and hidden urn types, draw each agent's
//! private balls, pass the report along the agents in their fixed order, let
//! the principal pick an action from the final report, reveal the outcome,
//! score every agent and let each agent learn from its own score. The oracle
//! posterior is computed from all signals for evaluation only; nothing on the
//! decision path reads it.

use serde::{Deserialize, Serialize};

use crate::agent::{build_context, Agent, Experience, PolicyConfig};
use crate::decision::{ActionDistribution, DecisionRuleSpec};
use crate::environment::{bayesian_posterior, draw_signals, observe_outcome, sample_episode, EnvironmentConfig, Signal};
use crate::error::{Error, Result};
use crate::metrics::report_error;
use crate::prob::Report;
use crate::scoring::{score_chain, ScoringRule};
use crate::seed::{stream_rng, SimRng, Stream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Distributed,
    /// One agent holding every signal.
    Centralised,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarketConfig {
    pub num_agents: usize,
    pub signals_per_agent: usize,
    /// `agent_order[position]` is the agent that reports at that position.
    pub agent_order: Vec<usize>,
    pub decision_rule: DecisionRuleSpec,
    pub scoring_rule: ScoringRule,
    pub mode: Mode,
}

impl MarketConfig {
    pub fn new(num_agents: usize, signals_per_agent: usize, decision_rule: DecisionRuleSpec) -> Self {
        MarketConfig {
            num_agents,
            signals_per_agent,
            agent_order: (0..num_agents).collect(),
            decision_rule,
            scoring_rule: ScoringRule::Log,
            mode: Mode::Distributed,
        }
    }

    /// `signals` agents with one ball each, stochastic 90/10 rule.
    pub fn distributed(signals: usize) -> Self {
        MarketConfig::new(signals, 1, DecisionRuleSpec::stochastic(0.9))
    }

    /// One agent with `signals` balls, stochastic 90/10 rule.
    pub fn centralised(signals: usize) -> Self {
        MarketConfig {
            mode: Mode::Centralised,
            ..MarketConfig::new(1, signals, DecisionRuleSpec::stochastic(0.9))
        }
    }

    pub fn deterministic_single() -> Self {
        MarketConfig::new(1, 1, DecisionRuleSpec::deterministic())
    }

    pub fn deterministic_three() -> Self {
        MarketConfig::new(3, 1, DecisionRuleSpec::deterministic())
    }

    pub fn total_signals(&self) -> usize {
        self.num_agents * self.signals_per_agent
    }

    pub fn validate(&self, num_actions: usize) -> Result<()> {
        if self.num_agents == 0 {
            return Err(Error::config("market.num_agents", "need at least one agent"));
        }
        if self.mode == Mode::Centralised && self.num_agents != 1 {
            return Err(Error::config(
                "market.num_agents",
                format!("centralised mode needs exactly one agent, got {}", self.num_agents),
            ));
        }
        let mut seen = vec![false; self.num_agents];
        if self.agent_order.len() != self.num_agents
            || !self.agent_order.iter().all(|&i| i < self.num_agents && !std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::config(
                "market.agent_order",
                format!("must be a permutation of 0..{}", self.num_agents),
            ));
        }
        self.decision_rule.validate(num_actions)
    }
}

/// Full trace of one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// 1-based time step.
    pub step: u64,
    pub priors: Report,
    /// Signals indexed by agent.
    pub signals: Vec<Vec<Signal>>,
    /// Report chain by reporting position: priors first, final report last.
    pub reports: Vec<Report>,
    pub action_distribution: ActionDistribution,
    pub action: usize,
    pub outcome: u8,
    /// Decision scores indexed by agent.
    pub scores: Vec<f64>,
    pub oracle_posterior: Report,
    pub report_error: f64,
}

impl StepRecord {
    pub fn final_report(&self) -> &Report {
        self.reports.last().expect("chain starts with priors")
    }
}

/// A running market: environment stream, agents and their configs.
#[derive(Clone, Debug)]
pub struct Market {
    env: EnvironmentConfig,
    config: MarketConfig,
    agents: Vec<Agent>,
    rng: SimRng,
    step: u64,
}

impl Market {
    /// Builds a market whose random streams all derive from `seed`.
    pub fn new(env: EnvironmentConfig, config: MarketConfig, policy: PolicyConfig, seed: u64) -> Result<Self> {
        env.validate()?;
        config.validate(env.num_actions)?;
        policy.validate()?;
        let agents = (0..config.num_agents)
            .map(|i| Agent::new(env.num_actions, policy.clone(), stream_rng(seed, Stream::Agent(i))))
            .collect();
        Ok(Market {
            rng: stream_rng(seed, Stream::Environment),
            env,
            config,
            agents,
            step: 0,
        })
    }

    pub fn environment(&self) -> &EnvironmentConfig {
        &self.env
    }

    pub fn config(&self) -> &MarketConfig {
        &self.config
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    /// Number of steps run so far.
    pub fn steps_done(&self) -> u64 {
        self.step
    }

    /// Runs one time step.
    pub fn step(&mut self) -> StepRecord {
        self.step += 1;
        let episode = sample_episode(&mut self.rng, &self.env);
        let signals: Vec<Vec<Signal>> = (0..self.config.num_agents)
            .map(|_| draw_signals(&mut self.rng, &episode, &self.env, self.config.signals_per_agent))
            .collect();

        let mut reports = Vec::with_capacity(self.config.num_agents + 1);
        reports.push(episode.priors.clone());
        let mut pending = Vec::with_capacity(self.config.num_agents);
        for &agent in &self.config.agent_order {
            let incoming = reports.last().expect("nonempty chain");
            let context = build_context(&signals[agent], incoming);
            let out = self.agents[agent].act(&context);
            reports.push(out.report);
            pending.push((agent, context, out.mu, out.h));
        }

        let final_report = reports.last().expect("nonempty chain");
        let action_distribution = self.config.decision_rule.make_distribution(final_report);
        let action = action_distribution.sample(&mut self.rng);
        let outcome = observe_outcome(&episode, action).expect("sampled action is in range");

        let by_position = score_chain(
            self.config.scoring_rule,
            &reports,
            &action_distribution,
            action,
            outcome.is_success(),
        );
        let mut scores = vec![0.0; self.config.num_agents];
        for ((agent, context, mu, h), record) in pending.into_iter().zip(&by_position) {
            scores[agent] = record.score;
            self.agents[agent].learn(Experience {
                context,
                mu,
                h,
                score: record.score,
            });
        }

        let oracle_posterior = bayesian_posterior(&episode.priors, signals.iter().flatten(), &self.env);
        let report_error = report_error(final_report, &oracle_posterior);
        StepRecord {
            step: self.step,
            priors: episode.priors,
            signals,
            reports,
            action_distribution,
            action,
            outcome: outcome.outcome(),
            scores,
            oracle_posterior,
            report_error,
        }
    }

    /// Iterator over the next `num_steps` steps.
    pub fn run(&mut self, num_steps: u64) -> impl Iterator<Item = StepRecord> + '_ {
        (0..num_steps).map(move |_| self.step())
    }
}

/// Runs `num_steps` steps of a fresh market seeded with `seed`.
pub fn run_experiment(
    env: EnvironmentConfig,
    config: MarketConfig,
    policy: PolicyConfig,
    seed: u64,
    num_steps: u64,
) -> Result<impl Iterator<Item = StepRecord>> {
    if num_steps == 0 {
        return Err(Error::contract("an experiment needs at least one step"));
    }
    let mut market = Market::new(env, config, policy, seed)?;
    Ok((0..num_steps).map(move |_| market.step()))
}
