//! The urn world.
//!
//! Each action is an urn of hidden type 1 (mostly red balls) or type 0
//! (mostly blue balls). Priors are drawn in log-odds space, urn types are drawn
//! from the priors, and agents see balls drawn with replacement from uniformly
//! chosen urns. Selecting an urn reveals its type and nothing else.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{logit, sigmoid, Report};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub num_actions: usize,
    pub red_fraction_type1: f64,
    pub red_fraction_type0: f64,
    pub prior_log_odds_mean: f64,
    pub prior_log_odds_std: f64,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        EnvironmentConfig {
            num_actions: 2,
            red_fraction_type1: 2.0 / 3.0,
            red_fraction_type0: 1.0 / 3.0,
            prior_log_odds_mean: 0.0,
            prior_log_odds_std: 1.0,
        }
    }
}

impl EnvironmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_actions < 2 {
            return Err(Error::config(
                "environment.num_actions",
                format!("need at least 2 actions, got {}", self.num_actions),
            ));
        }
        let (lo, hi) = (self.red_fraction_type0, self.red_fraction_type1);
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::config(
                "environment.red_fraction_type0",
                format!("need 0 < red_fraction_type0 < red_fraction_type1 < 1, got {lo} and {hi}"),
            ));
        }
        if !self.prior_log_odds_mean.is_finite() {
            return Err(Error::config("environment.prior_log_odds_mean", "must be finite"));
        }
        if !(self.prior_log_odds_std >= 0.0 && self.prior_log_odds_std.is_finite()) {
            return Err(Error::config(
                "environment.prior_log_odds_std",
                "must be finite and nonnegative",
            ));
        }
        Ok(())
    }

    /// Likelihood ratio P(red | type 1) / P(red | type 0).
    pub fn red_likelihood_ratio(&self) -> f64 {
        self.red_fraction_type1 / self.red_fraction_type0
    }

    /// Likelihood ratio P(blue | type 1) / P(blue | type 0).
    pub fn blue_likelihood_ratio(&self) -> f64 {
        (1.0 - self.red_fraction_type1) / (1.0 - self.red_fraction_type0)
    }

    pub fn red_fraction(&self, urn_type: UrnType) -> f64 {
        match urn_type {
            UrnType::Red => self.red_fraction_type1,
            UrnType::Blue => self.red_fraction_type0,
        }
    }
}

/// Hidden urn type; also the Bernoulli outcome of selecting the urn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UrnType {
    /// Type 0.
    Blue,
    /// Type 1, the outcome the principal wants.
    Red,
}

impl UrnType {
    pub fn outcome(self) -> u8 {
        match self {
            UrnType::Blue => 0,
            UrnType::Red => 1,
        }
    }

    pub fn is_success(self) -> bool {
        self == UrnType::Red
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Color {
    Red,
    Blue,
}

/// One ball, labelled with the urn it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signal {
    pub urn: usize,
    pub color: Color,
}

impl Signal {
    pub fn red(urn: usize) -> Self {
        Signal { urn, color: Color::Red }
    }

    pub fn blue(urn: usize) -> Self {
        Signal { urn, color: Color::Blue }
    }
}

/// Priors and hidden urn types for one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeState {
    pub priors: Report,
    urn_types: Vec<UrnType>,
}

impl EpisodeState {
    pub fn new(priors: Report, urn_types: Vec<UrnType>) -> Self {
        assert_eq!(priors.len(), urn_types.len(), "one urn type per prior");
        EpisodeState { priors, urn_types }
    }

    pub fn num_actions(&self) -> usize {
        self.urn_types.len()
    }

    /// Hidden types, for evaluation code only; the principal goes through
    /// [`observe_outcome`].
    pub fn urn_types(&self) -> &[UrnType] {
        &self.urn_types
    }
}

pub fn sample_priors<R: Rng + ?Sized>(rng: &mut R, config: &EnvironmentConfig) -> Report {
    let std = config.prior_log_odds_std;
    let mean = config.prior_log_odds_mean;
    if std == 0.0 {
        return Report::from_logits(std::iter::repeat_n(mean, config.num_actions));
    }
    let normal = Normal::new(mean, std).expect("validated prior parameters");
    Report::from_logits((0..config.num_actions).map(|_| normal.sample(rng)))
}

pub fn sample_urn_types<R: Rng + ?Sized>(rng: &mut R, priors: &Report) -> Vec<UrnType> {
    priors
        .as_slice()
        .iter()
        .map(|&p| {
            if rng.random::<f64>() < p {
                UrnType::Red
            } else {
                UrnType::Blue
            }
        })
        .collect()
}

pub fn sample_episode<R: Rng + ?Sized>(rng: &mut R, config: &EnvironmentConfig) -> EpisodeState {
    let priors = sample_priors(rng, config);
    let urn_types = sample_urn_types(rng, &priors);
    EpisodeState { priors, urn_types }
}

/// Draws one ball from an urn of the given type.
pub fn draw_ball<R: Rng + ?Sized>(rng: &mut R, urn_type: UrnType, config: &EnvironmentConfig) -> Color {
    if rng.random::<f64>() < config.red_fraction(urn_type) {
        Color::Red
    } else {
        Color::Blue
    }
}

/// Draws `num_balls` signals, each from a uniformly chosen urn, with replacement.
pub fn draw_signals<R: Rng + ?Sized>(
    rng: &mut R,
    episode: &EpisodeState,
    config: &EnvironmentConfig,
    num_balls: usize,
) -> Vec<Signal> {
    let k = episode.num_actions();
    (0..num_balls)
        .map(|_| {
            let urn = rng.random_range(0..k);
            let color = draw_ball(rng, episode.urn_types[urn], config);
            Signal { urn, color }
        })
        .collect()
}

/// Posterior of an observer who sees the priors and every signal.
pub fn bayesian_posterior<'a>(
    priors: &Report,
    signals: impl IntoIterator<Item = &'a Signal>,
    config: &EnvironmentConfig,
) -> Report {
    let red = config.red_likelihood_ratio().ln();
    let blue = config.blue_likelihood_ratio().ln();
    let mut log_odds: Vec<f64> = priors.logits().collect();
    for s in signals {
        log_odds[s.urn] += match s.color {
            Color::Red => red,
            Color::Blue => blue,
        };
    }
    Report::new(log_odds.into_iter().map(sigmoid))
}

/// Reveals the type of the selected urn.
pub fn observe_outcome(episode: &EpisodeState, action: usize) -> Result<UrnType> {
    episode.urn_types.get(action).copied().ok_or_else(|| {
        Error::contract(format!(
            "action {action} out of range for {} urns",
            episode.num_actions()
        ))
    })
}

/// Log-odds of a prior probability; exposed for building ideal weights.
pub fn prior_log_odds(p: f64) -> f64 {
    logit(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SimRng;
    use rand::SeedableRng;

    fn rng() -> SimRng {
        SimRng::seed_from_u64(11)
    }

    #[test]
    fn degenerate_prior_is_one_half() {
        let config = EnvironmentConfig {
            prior_log_odds_std: 0.0,
            ..Default::default()
        };
        let priors = sample_priors(&mut rng(), &config);
        assert_eq!(priors.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn clamped_priors_give_certain_types() {
        let mut rng = rng();
        let priors = Report::new([1.0, 0.0]);
        for _ in 0..1000 {
            assert_eq!(sample_urn_types(&mut rng, &priors), vec![UrnType::Red, UrnType::Blue]);
        }
    }

    #[test]
    fn urn_types_follow_prior() {
        let mut rng = rng();
        let priors = Report::new([0.5]);
        let n = 1_000_000;
        let reds = (0..n)
            .filter(|_| sample_urn_types(&mut rng, &priors)[0].is_success())
            .count();
        let frac = reds as f64 / n as f64;
        assert!((0.498..=0.502).contains(&frac), "{frac}");
    }

    #[test]
    fn no_balls_no_signals() {
        let episode = EpisodeState::new(Report::uniform(2, 0.5), vec![UrnType::Red, UrnType::Blue]);
        assert!(draw_signals(&mut rng(), &episode, &EnvironmentConfig::default(), 0).is_empty());
    }

    #[test]
    fn red_urn_is_two_thirds_red() {
        let mut rng = rng();
        let config = EnvironmentConfig::default();
        let n = 1_000_000;
        let reds = (0..n)
            .filter(|_| draw_ball(&mut rng, UrnType::Red, &config) == Color::Red)
            .count();
        let frac = reds as f64 / n as f64;
        assert!((0.665..=0.668).contains(&frac), "{frac}");
    }

    #[test]
    fn source_urn_is_uniform() {
        let mut rng = rng();
        let episode = EpisodeState::new(Report::uniform(2, 0.5), vec![UrnType::Red, UrnType::Blue]);
        let signals = draw_signals(&mut rng, &episode, &EnvironmentConfig::default(), 1_000_000);
        let from_first = signals.iter().filter(|s| s.urn == 0).count() as f64 / 1e6;
        assert!((0.498..=0.502).contains(&from_first), "{from_first}");
    }

    #[test]
    fn posterior_examples() {
        let config = EnvironmentConfig::default();
        let priors = Report::uniform(2, 0.5);
        assert_eq!(bayesian_posterior(&priors, &[], &config), priors);

        let one_red = bayesian_posterior(&priors, &[Signal::red(0)], &config);
        assert!((one_red[0] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(one_red[1], 0.5);

        let mixed = [Signal::red(0), Signal::red(0), Signal::blue(0)];
        let post = bayesian_posterior(&priors, &mixed, &config);
        assert!((post[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_reveals_selected_type() {
        let ep = EpisodeState::new(Report::uniform(2, 0.5), vec![UrnType::Red, UrnType::Blue]);
        assert_eq!(observe_outcome(&ep, 0).unwrap().outcome(), 1);
        assert_eq!(observe_outcome(&ep, 1).unwrap().outcome(), 0);
        let ep = EpisodeState::new(Report::uniform(2, 0.5), vec![UrnType::Blue, UrnType::Blue]);
        assert_eq!(observe_outcome(&ep, 1).unwrap().outcome(), 0);
        assert!(matches!(observe_outcome(&ep, 2), Err(Error::Contract(_))));
    }

    #[test]
    fn config_validation() {
        assert!(EnvironmentConfig::default().validate().is_ok());
        let bad = EnvironmentConfig {
            red_fraction_type0: 0.7,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EnvironmentConfig {
            num_actions: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
