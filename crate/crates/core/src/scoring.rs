//! Proper scoring rules and the decision scoring rule built on them.
//!
//! An agent that moves the report for the selected action from `p0` to `p`
//! is paid `(Ŝ(p, ω) - Ŝ(p0, ω)) / Φ_A`, where `Φ_A` is the probability the
//! decision rule gave the selected action. Dividing by `Φ_A` makes the
//! expected payment independent of the decision rule, so a strictly proper
//! `Ŝ` stays strictly proper under any decision rule with full support.
//! Actions with zero selection probability are paid nothing.

use serde::{Deserialize, Serialize};

use crate::decision::ActionDistribution;
use crate::prob::Report;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringRule {
    #[default]
    Log,
    Brier,
}

impl ScoringRule {
    /// Score of a single probability forecast `p` for a binary outcome.
    pub fn score(self, p: f64, outcome: bool) -> f64 {
        match self {
            ScoringRule::Log => {
                if outcome {
                    p.ln()
                } else {
                    (1.0 - p).ln()
                }
            }
            ScoringRule::Brier => {
                let w = if outcome { 1.0 } else { 0.0 };
                -(p - w) * (p - w)
            }
        }
    }

    /// Decision score for one action's report component.
    ///
    /// Zero when the action was not selected or had zero selection
    /// probability.
    pub fn decision_score(
        self,
        report: f64,
        previous_report: f64,
        action_probability: f64,
        action_selected: bool,
        outcome: bool,
    ) -> f64 {
        if !action_selected || action_probability <= 0.0 {
            return 0.0;
        }
        let gain = match self {
            // Ratio form keeps the log rule exactly zero for identical reports.
            ScoringRule::Log => {
                if outcome {
                    (report / previous_report).ln()
                } else {
                    ((1.0 - report) / (1.0 - previous_report)).ln()
                }
            }
            ScoringRule::Brier => self.score(report, outcome) - self.score(previous_report, outcome),
        };
        gain / action_probability
    }

    /// Expected decision score of one report component when the true success
    /// probability is `true_probability`, taken over both action selection
    /// and outcome. The selection probability cancels.
    pub fn expected_decision_score(self, report: f64, previous_report: f64, true_probability: f64) -> f64 {
        let q = true_probability;
        match self {
            ScoringRule::Log => {
                q * (report / previous_report).ln()
                    + (1.0 - q) * ((1.0 - report) / (1.0 - previous_report)).ln()
            }
            ScoringRule::Brier => {
                let expected = |p: f64| q * self.score(p, true) + (1.0 - q) * self.score(p, false);
                expected(report) - expected(previous_report)
            }
        }
    }
}

/// Logarithmic score of a single forecast.
pub fn proper_score(rule: ScoringRule, report_component: f64, outcome: bool) -> f64 {
    rule.score(report_component, outcome)
}

/// Logarithmic decision score.
pub fn decision_score(
    report: f64,
    previous_report: f64,
    action_probability: f64,
    action_selected: bool,
    outcome: bool,
) -> f64 {
    ScoringRule::Log.decision_score(report, previous_report, action_probability, action_selected, outcome)
}

/// Expected logarithmic decision score.
///
/// `action_probability` only enters through the `Φ_A · (1/Φ_A)` product and
/// is accepted to mirror the realised-score signature.
pub fn expected_decision_score(
    report: f64,
    previous_report: f64,
    true_probability: f64,
    action_probability: f64,
) -> f64 {
    debug_assert!(action_probability > 0.0);
    let q = true_probability;
    let phi = action_probability;
    phi * (q * (1.0 / phi) * (report / previous_report).ln()
        + (1.0 - q) * (1.0 / phi) * ((1.0 - report) / (1.0 - previous_report)).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub agent_index: usize,
    pub score: f64,
    pub action: usize,
    pub outcome: u8,
    pub action_probability: f64,
}

/// Scores every agent in a report chain `Pr_(0), Pr_(1), ..., Pr_(m)`.
///
/// Agent `E` is scored on the selected action's component of `Pr_(E)`
/// against `Pr_(E-1)`.
pub fn score_chain(
    rule: ScoringRule,
    chain: &[Report],
    distribution: &ActionDistribution,
    action: usize,
    outcome: bool,
) -> Vec<ScoreRecord> {
    let phi = distribution.probability(action);
    chain
        .windows(2)
        .enumerate()
        .map(|(agent_index, pair)| ScoreRecord {
            agent_index,
            score: rule.decision_score(pair[1][action], pair[0][action], phi, true, outcome),
            action,
            outcome: u8::from(outcome),
            action_probability: phi,
        })
        .collect()
}
