//! Experiment configuration.
//!
//! Configs are TOML documents. Values come from, in increasing precedence:
//! built-in defaults, the config file, and command-line overrides given as
//! dotted `key=value` pairs (`policy.sigma=0.1`). Unknown keys are rejected.
//!
//! ```toml
//! experiment = "distributed"   # distributed | centralised | det_single | det_three | custom
//! signals = 3                  # total signals J for the presets
//! num_steps = 200000
//! seed = 1
//! replicates = 3
//! output_dir = "out/distributed"
//! snapshot_every = 1000
//!
//! [environment]
//! num_actions = 2
//! red_fraction_type1 = 0.6666666666666666
//! red_fraction_type0 = 0.3333333333333333
//! prior_log_odds_mean = 0.0
//! prior_log_odds_std = 1.0
//!
//! [market]                     # presets pin num_agents, signals_per_agent, mode and decision_rule
//! num_agents = 3
//! signals_per_agent = 1
//! agent_order = [0, 1, 2]
//! decision_rule = "stochastic_max"   # or "deterministic_max"
//! top_probability = 0.9
//! scoring_rule = "log"               # or "brier"
//! mode = "distributed"               # or "centralised"
//!
//! [policy]
//! sigma = 0.3
//! learning_rate = 0.0003
//! buffer_capacity = 4096
//! minibatch_size = 64
//! baseline_decay = 0.99
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agent::PolicyConfig;
use crate::decision::{DecisionRuleKind, DecisionRuleSpec};
use crate::environment::EnvironmentConfig;
use crate::error::{Error, Result};
use crate::market::{MarketConfig, Mode};
use crate::scoring::ScoringRule;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `J` agents with one signal each, stochastic rule.
    Distributed,
    /// One agent with `J` signals, stochastic rule.
    Centralised,
    /// One agent, one signal, deterministic rule.
    DetSingle,
    /// Three agents, one signal each, deterministic rule.
    DetThree,
    /// Market shape taken entirely from the `[market]` table.
    #[default]
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Distributed => "distributed",
            ExperimentKind::Centralised => "centralised",
            ExperimentKind::DetSingle => "det_single",
            ExperimentKind::DetThree => "det_three",
            ExperimentKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub num_steps: u64,
    pub seed: u64,
    pub replicates: u64,
    pub environment: EnvironmentConfig,
    pub market: MarketConfig,
    pub policy: PolicyConfig,
    pub output_dir: PathBuf,
    pub snapshot_every: u64,
}

pub const DEFAULT_SIGNALS: usize = 3;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<ExperimentKind>,
    signals: Option<usize>,
    num_steps: Option<u64>,
    seed: Option<u64>,
    replicates: Option<u64>,
    output_dir: Option<PathBuf>,
    snapshot_every: Option<u64>,
    #[serde(default)]
    environment: EnvironmentConfig,
    #[serde(default)]
    market: RawMarket,
    #[serde(default)]
    policy: PolicyConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    num_agents: Option<usize>,
    signals_per_agent: Option<usize>,
    agent_order: Option<Vec<usize>>,
    decision_rule: Option<DecisionRuleKind>,
    top_probability: Option<f64>,
    scoring_rule: Option<ScoringRule>,
    mode: Option<Mode>,
}

/// Parses a config file and applies `key=value` overrides on top.
pub fn parse_config(file: &[u8], overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let text = std::str::from_utf8(file).map_err(|e| Error::config("<file>", format!("not UTF-8: {e}")))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
    for (key, value) in overrides {
        apply_override(&mut table, key, value)?;
    }
    let raw: RawConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(path, inner.message().to_string())
    })?;
    resolve(raw)
}

/// Splits `key=value`.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| Error::config(arg, "override must look like key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn apply_override(table: &mut toml::Table, key: &str, raw_value: &str) -> Result<()> {
    let value = parse_value(raw_value);
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::config(key, "empty key"))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Reads an override value as TOML, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn pin<T: PartialEq + std::fmt::Debug>(key: &str, given: Option<T>, pinned: T, preset: ExperimentKind) -> Result<T> {
    match given {
        Some(v) if v != pinned => Err(Error::config(
            key,
            format!("preset `{}` pins this to {pinned:?}, got {v:?}", preset.name()),
        )),
        _ => Ok(pinned),
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    let experiment = raw.experiment.unwrap_or_default();
    let signals = raw.signals.unwrap_or(DEFAULT_SIGNALS);
    let m = raw.market;
    let top = m.top_probability.unwrap_or(0.9);

    let (num_agents, signals_per_agent, rule, mode) = match experiment {
        ExperimentKind::Custom => {
            let num_agents = m
                .num_agents
                .ok_or_else(|| Error::config("market.num_agents", "required for a custom experiment"))?;
            (
                num_agents,
                m.signals_per_agent.unwrap_or(1),
                m.decision_rule.unwrap_or_default(),
                m.mode.unwrap_or_default(),
            )
        }
        preset => {
            let (agents, per_agent, rule, mode) = match preset {
                ExperimentKind::Distributed => (signals, 1, DecisionRuleKind::StochasticMax, Mode::Distributed),
                ExperimentKind::Centralised => (1, signals, DecisionRuleKind::StochasticMax, Mode::Centralised),
                ExperimentKind::DetSingle => (1, 1, DecisionRuleKind::DeterministicMax, Mode::Distributed),
                ExperimentKind::DetThree => (3, 1, DecisionRuleKind::DeterministicMax, Mode::Distributed),
                ExperimentKind::Custom => unreachable!(),
            };
            (
                pin("market.num_agents", m.num_agents, agents, preset)?,
                pin("market.signals_per_agent", m.signals_per_agent, per_agent, preset)?,
                pin("market.decision_rule", m.decision_rule, rule, preset)?,
                pin("market.mode", m.mode, mode, preset)?,
            )
        }
    };
    let decision_rule = match rule {
        DecisionRuleKind::StochasticMax => DecisionRuleSpec::stochastic(top),
        DecisionRuleKind::DeterministicMax => DecisionRuleSpec::deterministic(),
    };
    let market = MarketConfig {
        num_agents,
        signals_per_agent,
        agent_order: m.agent_order.unwrap_or_else(|| (0..num_agents).collect()),
        decision_rule,
        scoring_rule: m.scoring_rule.unwrap_or_default(),
        mode,
    };

    let config = ExperimentConfig {
        experiment,
        num_steps: raw.num_steps.unwrap_or(100_000),
        seed: raw.seed.unwrap_or(0),
        replicates: raw.replicates.unwrap_or(1),
        environment: raw.environment,
        market,
        policy: raw.policy,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        snapshot_every: raw.snapshot_every.unwrap_or(1000),
    };
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Default config of a preset with `signals` total signals.
    pub fn preset(experiment: ExperimentKind, signals: usize) -> Result<Self> {
        let overrides = [
            ("experiment".to_string(), experiment.name().to_string()),
            ("signals".to_string(), signals.to_string()),
        ];
        parse_config(b"", &overrides)
    }

    pub fn validate(&self) -> Result<()> {
        self.environment.validate()?;
        self.market.validate(self.environment.num_actions)?;
        self.policy.validate()?;
        if self.num_steps == 0 {
            return Err(Error::config("num_steps", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be at least 1"));
        }
        Ok(())
    }
}
