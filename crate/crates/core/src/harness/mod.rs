//! Monte Carlo experiments over generated markets.
//!
//! Every trial derives its own seed from the run seed and the trial index, so
//! a trial is reproducible on its own and results do not depend on how the
//! worker pool schedules it. Means are summed in trial order.

mod per_rank;
mod strategy;
mod welfare;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::matching::{MechanismConfig, Mode};
use crate::simgen::GenConfig;
use crate::welfare::UtilityFunction;

pub use per_rank::{
    per_rank_trial, run_per_rank, write_per_rank_csv, write_per_rank_trials_csv, PerRankMode, PerRankOutput,
    PerRankRow, PerRankTrial,
};
pub use strategy::{
    run_strategy_count, strategy_trial, write_strategy_csv, write_strategy_trials_csv, StrategyOutput, StrategyRow,
    StrategyTrial,
};
pub use welfare::{
    run_welfare_sweep, welfare_trial, write_welfare_csv, write_welfare_trials_csv, WelfareOutput, WelfareRow,
    WelfareTrial,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Welfare,
    Strategy,
    PerRank,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Welfare => "welfare",
            Experiment::Strategy => "strategy",
            Experiment::PerRank => "per-rank",
        }
    }
}

/// Hybrid uses each college's drawn factor; pure GS forces every factor to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Hybrid,
    #[serde(alias = "pure_gs")]
    Gs,
}

impl Mechanism {
    pub fn mode(self) -> Mode {
        match self {
            Mechanism::Hybrid => Mode::Generalized,
            Mechanism::Gs => Mode::PureDa,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Hybrid => "hybrid",
            Mechanism::Gs => "gs",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Which students play strategy S when only `k` of them do.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategicSelection {
    /// The `k` lowest scores.
    Lowest,
    /// A uniform `k`-subset, redrawn every trial.
    #[default]
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: usize,
    pub beta_step: f64,
    /// Explicit grid for the welfare sweep; overrides `beta_step`.
    pub betas: Option<Vec<f64>>,
    pub mechanisms: Vec<Mechanism>,
    /// Correlation used by the strategy experiment.
    pub strategy_beta: f64,
    /// Defaults to `0..=n_students`.
    pub strategic_counts: Option<Vec<usize>>,
    pub strategic_selection: StrategicSelection,
    pub per_rank_betas: Vec<f64>,
    /// `U(r) = utility_top - r`, `U(0) = 0` on both sides.
    pub utility_top: f64,
    pub gen: GenConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            seed: 0,
            trials: 1000,
            beta_step: 0.01,
            betas: None,
            mechanisms: vec![Mechanism::Hybrid, Mechanism::Gs],
            strategy_beta: 1.0,
            strategic_counts: None,
            strategic_selection: StrategicSelection::default(),
            per_rank_betas: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            utility_top: 11.0,
            gen: GenConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| MatchError::Config(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MatchError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment specs always serialize")
    }

    pub fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(MatchError::Config("trials must be at least 1".into()));
        }
        if !(self.beta_step > 0.0 && self.beta_step <= 1.0) {
            return Err(MatchError::Config(format!(
                "beta step {} outside (0, 1]",
                self.beta_step
            )));
        }
        let in_unit = |b: &f64| (0.0..=1.0).contains(b);
        if let Some(b) = self
            .betas
            .iter()
            .flatten()
            .chain(&self.per_rank_betas)
            .find(|b| !in_unit(b))
        {
            return Err(MatchError::Config(format!("beta {b} outside [0, 1]")));
        }
        if !in_unit(&self.strategy_beta) {
            return Err(MatchError::Config(format!(
                "beta {} outside [0, 1]",
                self.strategy_beta
            )));
        }
        if self.mechanisms.is_empty() {
            return Err(MatchError::Config("no mechanisms selected".into()));
        }
        if let Some(k) = self
            .strategic_counts
            .iter()
            .flatten()
            .find(|&&k| k > self.gen.n_students)
        {
            return Err(MatchError::Config(format!(
                "{k} strategic students but only {} students",
                self.gen.n_students
            )));
        }
        self.gen.check()
    }

    /// `0, step, 2 step, ..., 1`. When the step divides 1 the points are
    /// `i / n`, which keeps values like 0.3 exact.
    pub fn beta_grid(&self) -> Vec<f64> {
        if let Some(b) = &self.betas {
            return b.clone();
        }
        let n = (1.0 / self.beta_step).round();
        if (n * self.beta_step - 1.0).abs() < 1e-9 {
            (0..=n as usize).map(|i| i as f64 / n).collect()
        } else {
            (0..)
                .map(|i| i as f64 * self.beta_step)
                .take_while(|b| *b <= 1.0 + 1e-12)
                .map(|b| b.min(1.0))
                .collect()
        }
    }

    pub fn strategic_counts(&self) -> Vec<usize> {
        self.strategic_counts
            .clone()
            .unwrap_or_else(|| (0..=self.gen.n_students).collect())
    }

    /// Strategy and per-rank runs use one mechanism: the selected one, or
    /// hybrid when several are selected.
    pub fn single_mechanism(&self) -> Mechanism {
        match self.mechanisms.as_slice() {
            [m] => *m,
            _ => Mechanism::Hybrid,
        }
    }

    pub fn trial_indices(&self) -> Vec<u64> {
        (0..self.trials as u64).collect()
    }

    fn student_utility(&self) -> UtilityFunction {
        UtilityFunction::linear(self.utility_top, self.gen.n_colleges)
    }

    fn college_utility(&self) -> UtilityFunction {
        UtilityFunction::linear(self.utility_top, self.gen.n_students)
    }

    fn trial_gen(&self, beta: f64, trial: u64) -> (GenConfig, MechanismConfig) {
        let seed = crate::rng::trial_seed(self.seed, trial);
        let gen = GenConfig {
            seed,
            beta,
            ..self.gen.clone()
        };
        (gen, MechanismConfig::new(Mode::Generalized, seed))
    }
}

/// `SEED:TRIAL`, as taken by `--replay`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayTarget {
    pub seed: u64,
    pub trial: u64,
}

impl FromStr for ReplayTarget {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || MatchError::Parse(format!("expected SEED:TRIAL, got `{s}`"));
        let (seed, trial) = s.split_once(':').ok_or_else(bad)?;
        Ok(ReplayTarget {
            seed: seed.trim().parse().map_err(|_| bad())?,
            trial: trial.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Summary {
    /// `None` for an empty sample. Sums run in slice order.
    pub fn of(values: &[f64]) -> Option<Summary> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary { mean, se, n })
    }
}

fn over_trials<T, F>(trials: &[u64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    trials.par_iter().map(|&t| f(t)).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_rows<W: std::io::Write>(header: &[&str], rows: impl Iterator<Item = Vec<String>>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| MatchError::io("<csv>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_exact() {
        let spec = ExperimentSpec::default();
        let grid = spec.beta_grid();
        assert_eq!(grid.len(), 101);
        assert_eq!(grid[30], 0.3);
        assert_eq!(grid[100], 1.0);
        let coarse = ExperimentSpec {
            beta_step: 0.3,
            ..ExperimentSpec::default()
        };
        assert_eq!(coarse.beta_grid().len(), 4);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(Summary::of(&[7.0]).unwrap().se, 0.0);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn replay_target_parses() {
        assert_eq!(
            "12:7".parse::<ReplayTarget>().unwrap(),
            ReplayTarget { seed: 12, trial: 7 }
        );
        assert!("12".parse::<ReplayTarget>().is_err());
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = ExperimentSpec {
            seed: 9,
            trials: 20,
            ..ExperimentSpec::default()
        };
        assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
        let partial = ExperimentSpec::from_toml("trials = 5\n[gen]\nbeta = 0.5\n").unwrap();
        assert_eq!(partial.trials, 5);
        assert_eq!(partial.gen.n_students, 10);
        assert!(ExperimentSpec::from_toml("trials = 0").is_err());
    }
}
