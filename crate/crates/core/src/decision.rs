//! Decision rules: final report to a distribution over actions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{argmax, Report};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRuleKind {
    /// Top mass on the argmax, remainder split evenly.
    #[default]
    StochasticMax,
    /// All mass on the argmax.
    DeterministicMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRuleSpec {
    pub kind: DecisionRuleKind,
    pub top_probability: f64,
}

impl Default for DecisionRuleSpec {
    fn default() -> Self {
        DecisionRuleSpec::stochastic(0.9)
    }
}

impl DecisionRuleSpec {
    pub fn stochastic(top_probability: f64) -> Self {
        DecisionRuleSpec {
            kind: DecisionRuleKind::StochasticMax,
            top_probability,
        }
    }

    pub fn deterministic() -> Self {
        DecisionRuleSpec {
            kind: DecisionRuleKind::DeterministicMax,
            top_probability: 1.0,
        }
    }

    pub fn validate(&self, num_actions: usize) -> Result<()> {
        if self.kind == DecisionRuleKind::StochasticMax {
            let lo = 1.0 / num_actions as f64;
            if !(lo..=1.0).contains(&self.top_probability) {
                return Err(Error::config(
                    "market.top_probability",
                    format!("must lie in [1/k, 1] = [{lo}, 1], got {}", self.top_probability),
                ));
            }
        }
        Ok(())
    }

    /// Mass placed on the argmax action.
    pub fn top_mass(&self) -> f64 {
        match self.kind {
            DecisionRuleKind::StochasticMax => self.top_probability,
            DecisionRuleKind::DeterministicMax => 1.0,
        }
    }

    pub fn make_distribution(&self, final_report: &Report) -> ActionDistribution {
        make_distribution(self, final_report.as_slice())
    }
}

/// Probabilities of selecting each action; nonnegative and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ActionDistribution(Vec<f64>);

impl ActionDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities.is_empty()
            || probabilities.iter().any(|&p| p.is_nan() || p < 0.0)
            || (sum - 1.0).abs() > 1e-12
        {
            return Err(Error::contract(format!(
                "not a probability distribution: {probabilities:?}"
            )));
        }
        Ok(ActionDistribution(probabilities))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn probability(&self, action: usize) -> f64 {
        self.0[action]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Categorical draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_action(rng, self)
    }
}

/// Applies a decision rule to raw report components.
pub fn make_distribution(spec: &DecisionRuleSpec, final_report: &[f64]) -> ActionDistribution {
    let k = final_report.len();
    let top = spec.top_mass();
    let rest = if k > 1 { (1.0 - top) / (k - 1) as f64 } else { 0.0 };
    let best = argmax(final_report);
    let probabilities = (0..k).map(|a| if a == best { top } else { rest }).collect();
    ActionDistribution(probabilities)
}

pub fn sample_action<R: Rng + ?Sized>(rng: &mut R, distribution: &ActionDistribution) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let probs = distribution.probabilities();
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left u above the running sum: take the last action with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
