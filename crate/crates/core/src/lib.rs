//! Decision markets as a multi-agent contextual bandit learner.
//!
//! A principal faces a Bernoulli bandit over `k` urns. Each time step it
//! receives prior probabilities for every urn, then passes that report along a
//! fixed sequence of agents. Each agent holds a private signal (balls drawn
//! from the urns), refines the report, and is paid with a decision scoring
//! rule once the principal has picked an urn with its decision rule and
//! observed the outcome. Agents are linear-Gaussian policies over log-odds and
//! learn with REINFORCE from a replay buffer.
//!
//! The crate is organised by role:
//!
//! - [`environment`]: urn world, signals and the omniscient Bayesian oracle.
//! - [`scoring`]: proper scoring rules and the decision scoring rule.
//! - [`decision`]: decision rules mapping a final report to action probabilities.
//! - [`agent`]: context construction, policy, gradient estimator, replay buffer.
//! - [`market`]: one time step of the market and whole experiment runs.
//! - [`metrics`]: report error, running statistics, reward baselines, score shares.
//! - [`config`] and [`harness`]: experiment presets, config files and output files.
//!
//! ```
//! use decision_market::{environment::EnvironmentConfig, market::{Market, MarketConfig}};
//!
//! let env = EnvironmentConfig::default();
//! let market = MarketConfig::distributed(3);
//! let mut sim = Market::new(env, market, Default::default(), 42).unwrap();
//! let record = sim.step();
//! assert_eq!(record.reports.len(), 4);
//! ```

pub mod agent;
pub mod config;
pub mod decision;
pub mod environment;
pub mod error;
pub mod harness;
pub mod market;
pub mod metrics;
pub mod prob;
pub mod scoring;
pub mod seed;

pub use error::{Error, Result};
pub use prob::Report;
