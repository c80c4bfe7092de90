//! Runs configured experiments and writes their output files.
//!
//! Each replicate gets its own directory `replicate_NNN/` under the output
//! directory holding
//!
//! - `metrics.csv`: `step,action,outcome,er,reward,ideal_reward,rule_predicted_reward,score_agent_0,...`
//! - `weights.csv`: `step,agent,row,col,value`, one snapshot every `snapshot_every` steps
//! - `summary.json`: tail statistics, convergence step and score shares
//!
//! and the output directory itself gets a `summary.json` listing every
//! replicate. Steps are 1-based everywhere. Files are byte-identical across
//! reruns of the same config.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::market::{Market, StepRecord};
use crate::metrics::{
    reward_baselines, tail_mean, MetricsSeries, ScoreShares, CONVERGENCE_THRESHOLD, DEFAULT_WINDOW, TAIL_STEPS,
};
use crate::seed::replicate_seed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub replicate: u64,
    pub seed: u64,
    pub num_steps: u64,
    pub tail_steps: usize,
    pub tail_mean_er: f64,
    pub tail_mean_reward: f64,
    pub tail_mean_ideal_reward: f64,
    pub tail_mean_rule_predicted_reward: f64,
    pub convergence_window: usize,
    pub convergence_threshold: f64,
    /// First step whose running-mean error is below the threshold.
    pub convergence_step: Option<u64>,
    pub score_means: Vec<f64>,
    pub score_shares: Option<Vec<f64>>,
}

impl ReplicateSummary {
    pub fn from_series(replicate: u64, seed: u64, series: &MetricsSeries) -> Self {
        let ScoreShares { means, shares } = series.score_shares();
        ReplicateSummary {
            replicate,
            seed,
            num_steps: series.len() as u64,
            tail_steps: TAIL_STEPS,
            tail_mean_er: tail_mean(&series.er, TAIL_STEPS),
            tail_mean_reward: tail_mean(&series.reward, TAIL_STEPS),
            tail_mean_ideal_reward: tail_mean(&series.ideal_reward, TAIL_STEPS),
            tail_mean_rule_predicted_reward: tail_mean(&series.rule_predicted_reward, TAIL_STEPS),
            convergence_window: DEFAULT_WINDOW,
            convergence_threshold: CONVERGENCE_THRESHOLD,
            convergence_step: series
                .convergence_step(DEFAULT_WINDOW, CONVERGENCE_THRESHOLD)
                .map(|i| i as u64 + 1),
            score_means: means,
            score_shares: shares,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub master_seed: u64,
    pub replicates: Vec<ReplicateSummary>,
}

/// Directory of replicate `index` under `output_dir`.
pub fn replicate_dir(output_dir: &Path, index: u64) -> PathBuf {
    output_dir.join(format!("replicate_{index:03}"))
}

/// Runs every replicate and writes all output files.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let replicates = (0..config.replicates)
        .into_par_iter()
        .map(|i| run_replicate(config, i))
        .collect::<Result<Vec<_>>>()?;
    let summary = RunSummary {
        experiment: config.experiment.name().to_string(),
        master_seed: config.seed,
        replicates,
    };
    write_json(&config.output_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Runs replicate `index` in memory, without touching the filesystem.
pub fn simulate_replicate(config: &ExperimentConfig, index: u64) -> Result<(Market, MetricsSeries)> {
    let seed = replicate_seed(config.seed, index);
    let mut market = Market::new(
        config.environment.clone(),
        config.market.clone(),
        config.policy.clone(),
        seed,
    )?;
    let mut series = MetricsSeries::new();
    for record in market.run(config.num_steps) {
        series.push(&record, &config.market.decision_rule);
    }
    Ok((market, series))
}

fn run_replicate(config: &ExperimentConfig, index: u64) -> Result<ReplicateSummary> {
    let dir = replicate_dir(&config.output_dir, index);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let seed = replicate_seed(config.seed, index);
    let mut market = Market::new(
        config.environment.clone(),
        config.market.clone(),
        config.policy.clone(),
        seed,
    )?;

    let metrics_path = dir.join("metrics.csv");
    let weights_path = dir.join("weights.csv");
    let mut metrics = CsvFile::create(&metrics_path)?;
    let mut weights = CsvFile::create(&weights_path)?;

    let m = config.market.num_agents;
    let mut header = String::from("step,action,outcome,er,reward,ideal_reward,rule_predicted_reward");
    for a in 0..m {
        header.push_str(&format!(",score_agent_{a}"));
    }
    metrics.line(&header)?;
    weights.line("step,agent,row,col,value")?;

    let mut series = MetricsSeries::new();
    for _ in 0..config.num_steps {
        let record = market.step();
        metrics.line(&metrics_row(&record, config))?;
        series.push(&record, &config.market.decision_rule);
        if record.step % config.snapshot_every == 0 {
            for (agent, a) in market.agents().iter().enumerate() {
                for (row, col, value) in a.parameters().entries() {
                    weights.line(&format!("{},{agent},{row},{col},{value}", record.step))?;
                }
            }
        }
    }
    metrics.finish()?;
    weights.finish()?;

    let summary = ReplicateSummary::from_series(index, seed, &series);
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn metrics_row(record: &StepRecord, config: &ExperimentConfig) -> String {
    let (ideal, predicted) = reward_baselines(&record.oracle_posterior, &config.market.decision_rule);
    let mut row = format!(
        "{},{},{},{},{},{},{}",
        record.step, record.action, record.outcome, record.report_error, record.outcome, ideal, predicted
    );
    for s in &record.scores {
        row.push_str(&format!(",{s}"));
    }
    row
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(CsvFile {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    fn line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::contract(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
