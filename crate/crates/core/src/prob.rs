//! Probability helpers shared by every module.
//!
//! Every probability that crosses a module boundary is clamped to
//! `[PROB_EPS, 1 - PROB_EPS]`, which keeps logits and log scores finite.

use serde::Serialize;

/// Lower clamp bound for probabilities.
pub const PROB_EPS: f64 = 1e-6;

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// A vector of per-action success probabilities, clamped on construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Report(Vec<f64>);

impl Report {
    pub fn new(probabilities: impl IntoIterator<Item = f64>) -> Self {
        Report(probabilities.into_iter().map(clamp_probability).collect())
    }

    /// Builds a report from log-odds, applying the logistic map and clamping.
    pub fn from_logits(logits: impl IntoIterator<Item = f64>) -> Self {
        Report::new(logits.into_iter().map(sigmoid))
    }

    pub fn uniform(k: usize, p: f64) -> Self {
        Report::new(std::iter::repeat_n(p, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn logits(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|&p| logit(p))
    }

    /// Index of the largest component, lowest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

impl std::ops::Index<usize> for Report {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// Lowest index of the maximum; NaN-free input assumed.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_reference_points() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2f64.ln()) - 2.0 / 3.0).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0);
        assert!(sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn clamping_keeps_logits_finite() {
        let r = Report::from_logits([40.0, -40.0]);
        assert_eq!(r[0], 1.0 - PROB_EPS);
        assert_eq!(r[1], PROB_EPS);
        assert!(r.logits().all(f64::is_finite));
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }
}
