//! Evaluation statistics over a run.

use serde::Serialize;

use crate::decision::DecisionRuleSpec;
use crate::market::StepRecord;
use crate::prob::Report;

/// Default running-average window, in steps.
pub const DEFAULT_WINDOW: usize = 1000;
/// Running-mean error threshold that counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.005;
/// Tail length used for post-convergence statistics.
pub const TAIL_STEPS: usize = 10_000;

/// Squared distance between the final report and the oracle posterior,
/// summed over actions.
pub fn report_error(final_report: &Report, oracle: &Report) -> f64 {
    assert_eq!(final_report.len(), oracle.len(), "report lengths differ");
    final_report
        .as_slice()
        .iter()
        .zip(oracle.as_slice())
        .map(|(p, q)| (p - q) * (p - q))
        .sum()
}

/// Sliding-window mean; the first `window - 1` entries average the prefix.
pub fn running_mean(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (i, &x) in series.iter().enumerate() {
        if i % window == 0 {
            // Exact resum once per window stops rounding drift.
            sum = series[(i + 1).saturating_sub(window)..=i].iter().sum();
        } else {
            sum += x;
            if i >= window {
                sum -= series[i - window];
            }
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// First index where the series drops below `threshold`.
pub fn convergence_step(mse_running: &[f64], threshold: f64) -> Option<usize> {
    mse_running.iter().position(|&x| x < threshold)
}

/// Mean of the last `min(last_n, len)` entries.
pub fn tail_mean(series: &[f64], last_n: usize) -> f64 {
    assert!(!series.is_empty(), "tail_mean of an empty series");
    let tail = &series[series.len() - last_n.min(series.len())..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Expected reward of the Bayes-optimal choice and of the decision rule
/// applied to the oracle posterior.
pub fn reward_baselines(oracle: &Report, rule: &DecisionRuleSpec) -> (f64, f64) {
    let ideal = oracle.as_slice().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dist = rule.make_distribution(oracle);
    let predicted = dist
        .probabilities()
        .iter()
        .zip(oracle.as_slice())
        .map(|(phi, p)| phi * p)
        .sum();
    (ideal, predicted)
}

/// Per-agent share of the total mean score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreShares {
    pub means: Vec<f64>,
    /// `None` when the summed means are not positive.
    pub shares: Option<Vec<f64>>,
}

pub fn score_shares(scores: &[Vec<f64>]) -> ScoreShares {
    assert!(!scores.is_empty(), "score shares need at least one step");
    let m = scores[0].len();
    let n = scores.len() as f64;
    let mut means = vec![0.0; m];
    for row in scores {
        for (acc, s) in means.iter_mut().zip(row) {
            *acc += s;
        }
    }
    means.iter_mut().for_each(|x| *x /= n);
    let total: f64 = means.iter().sum();
    let shares = (total > 0.0).then(|| means.iter().map(|x| x / total).collect());
    ScoreShares { means, shares }
}

/// Column store of the per-step statistics of one run.
#[derive(Clone, Debug, Default)]
pub struct MetricsSeries {
    pub er: Vec<f64>,
    pub reward: Vec<f64>,
    pub scores: Vec<Vec<f64>>,
    pub ideal_reward: Vec<f64>,
    pub rule_predicted_reward: Vec<f64>,
}

impl MetricsSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: &StepRecord, rule: &DecisionRuleSpec) {
        let (ideal, predicted) = reward_baselines(&record.oracle_posterior, rule);
        self.er.push(record.report_error);
        self.reward.push(f64::from(record.outcome));
        self.scores.push(record.scores.clone());
        self.ideal_reward.push(ideal);
        self.rule_predicted_reward.push(predicted);
    }

    pub fn len(&self) -> usize {
        self.er.len()
    }

    pub fn is_empty(&self) -> bool {
        self.er.is_empty()
    }

    /// Step index (0-based) where the running-mean error first drops below
    /// the threshold.
    pub fn convergence_step(&self, window: usize, threshold: f64) -> Option<usize> {
        convergence_step(&running_mean(&self.er, window), threshold)
    }

    pub fn score_shares(&self) -> ScoreShares {
        score_shares(&self.scores)
    }

    /// Score shares over the last `last_n` steps only.
    pub fn tail_score_shares(&self, last_n: usize) -> ScoreShares {
        let start = self.scores.len() - last_n.min(self.scores.len());
        score_shares(&self.scores[start..])
    }

    /// Column of agent `agent`'s scores.
    pub fn agent_scores(&self, agent: usize) -> Vec<f64> {
        self.scores.iter().map(|row| row[agent]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn report_error_examples() {
        let a = Report::new([0.7, 0.4]);
        assert_eq!(report_error(&a, &a), 0.0);
        assert_abs_diff_eq!(report_error(&a, &Report::new([0.6, 0.5])), 0.02, epsilon = 1e-15);
        let e = report_error(&Report::new([1.0, 0.0]), &Report::new([0.0, 1.0]));
        assert_abs_diff_eq!(e, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn running_mean_examples() {
        assert_eq!(running_mean(&[3.0; 5], 2), vec![3.0; 5]);
        let s = [0.1, 0.5, 0.2];
        assert_eq!(running_mean(&s, 1), s.to_vec());
        let alt: Vec<f64> = (0..8).map(|i| (i % 2) as f64).collect();
        let r = running_mean(&alt, 2);
        assert_eq!(r[0], 0.0);
        assert!(r[1..].iter().all(|&x| x == 0.5));
    }

    #[test]
    fn convergence_examples() {
        assert_eq!(convergence_step(&[0.1, 0.2, 0.05], 0.005), None);
        assert_eq!(convergence_step(&[0.01, 0.004, 0.006, 0.001], 0.005), Some(1));
        let dec: Vec<f64> = (0..100).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(convergence_step(&dec, 0.05), Some(20));
    }

    #[test]
    fn tail_mean_examples() {
        assert_eq!(tail_mean(&[1.0, 2.0, 3.0], 10), 2.0);
        assert_eq!(tail_mean(&[4.0; 7], 3), 4.0);
        assert_eq!(tail_mean(&[9.0, 1.0, 2.0, 4.0], 2), 3.0);
    }

    #[test]
    fn reward_baseline_examples() {
        let oracle = Report::new([0.8, 0.4]);
        assert_eq!(reward_baselines(&oracle, &DecisionRuleSpec::deterministic()), (0.8, 0.8));
        let (ideal, predicted) = reward_baselines(&oracle, &DecisionRuleSpec::stochastic(0.9));
        assert_eq!(ideal, 0.8);
        assert_abs_diff_eq!(predicted, 0.76, epsilon = 1e-12);
        let flat = Report::new([0.5, 0.5]);
        assert_eq!(reward_baselines(&flat, &DecisionRuleSpec::stochastic(0.9)).0, 0.5);
    }

    #[test]
    fn score_share_examples() {
        let equal = score_shares(&[vec![1.0, 1.0, 1.0], vec![3.0, 3.0, 3.0]]);
        assert_eq!(equal.shares, Some(vec![1.0 / 3.0; 3]));
        let uneven = score_shares(&[vec![2.0, 1.0, 1.0]]);
        assert_eq!(uneven.shares, Some(vec![0.5, 0.25, 0.25]));
        let zero_sum = score_shares(&[vec![0.4, -0.4, 0.0]]);
        assert_eq!(zero_sum.shares, None);
        assert_eq!(zero_sum.means, vec![0.4, -0.4, 0.0]);
    }

    proptest! {
        #[test]
        fn report_error_is_a_squared_distance(
            a in prop::collection::vec(0.0f64..1.0, 3),
            b in prop::collection::vec(0.0f64..1.0, 3),
        ) {
            let (ra, rb) = (Report::new(a), Report::new(b));
            let e = report_error(&ra, &rb);
            prop_assert!(e >= 0.0);
            prop_assert_eq!(e == 0.0, ra == rb);
        }

        #[test]
        fn tail_mean_ignores_prefix(
            tail in prop::collection::vec(-5.0f64..5.0, 1..50),
            prefix in prop::collection::vec(-5.0f64..5.0, 0..50),
        ) {
            let full: Vec<f64> = prefix.iter().chain(&tail).copied().collect();
            prop_assert_eq!(tail_mean(&full, tail.len()), tail_mean(&tail, tail.len()));
        }

        #[test]
        fn ideal_dominates_rule(p in prop::collection::vec(0.0f64..1.0, 2..5), top in 0.5f64..1.0) {
            let oracle = Report::new(p);
            let (ideal, predicted) = reward_baselines(&oracle, &DecisionRuleSpec::stochastic(top.max(1.0 / oracle.len() as f64)));
            prop_assert!(ideal >= predicted - 1e-15);
        }
    }
}
