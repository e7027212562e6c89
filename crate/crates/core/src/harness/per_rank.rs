//! Utility of one deviating student, by score rank, truthful against strategy S.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{over_trials, write_rows, ExperimentSpec, Summary};
use crate::error::Result;
use crate::matching::{generalized_match, MechanismConfig};
use crate::model::{Market, StudentId};
use crate::simgen::{gen_instance, score_ranks};
use crate::strategy::strategy_s;
use crate::welfare::{agent_utility, Agent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerRankMode {
    Truthful,
    StrategyS,
}

impl PerRankMode {
    pub const ALL: [PerRankMode; 2] = [PerRankMode::Truthful, PerRankMode::StrategyS];

    pub fn name(self) -> &'static str {
        match self {
            PerRankMode::Truthful => "truthful",
            PerRankMode::StrategyS => "strategy_s",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerRankTrial {
    pub trial: u64,
    pub beta: f64,
    pub rank: usize,
    pub mode: PerRankMode,
    pub utility: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerRankRow {
    pub beta: f64,
    pub rank: usize,
    pub mode: PerRankMode,
    pub utility: Summary,
}

#[derive(Clone, Debug, Default)]
pub struct PerRankOutput {
    pub rows: Vec<PerRankRow>,
    pub trials: Vec<PerRankTrial>,
}

impl PerRankOutput {
    pub fn row(&self, beta: f64, rank: usize, mode: PerRankMode) -> Option<&PerRankRow> {
        self.rows
            .iter()
            .find(|r| r.beta == beta && r.rank == rank && r.mode == mode)
    }
}

/// The student holding score rank `rank` deviates (or not); everyone else is
/// truthful. Returns one entry per rank and mode, rank-major.
pub fn per_rank_trial(spec: &ExperimentSpec, beta: f64, trial: u64) -> Result<Vec<PerRankTrial>> {
    let (gen, base) = spec.trial_gen(beta, trial);
    let instance = gen_instance(&gen)?;
    let config = MechanismConfig {
        mode: spec.single_mechanism().mode(),
        ..base
    };
    let ranks = score_ranks(&instance.scores());
    let truthful = &instance.student_prefs;
    // Only the student side is read when scoring students.
    let true_side = Market {
        student_prefs: truthful.clone(),
        college_prefs: Vec::new(),
        quotas: instance.quotas(),
    };
    let u = spec.student_utility();

    let mut out = Vec::with_capacity(2 * ranks.len());
    for rank in 1..=ranks.len() {
        let s = ranks.iter().position(|&r| r == rank).expect("ranks are a permutation");
        for mode in PerRankMode::ALL {
            let mut submitted = truthful.clone();
            if mode == PerRankMode::StrategyS {
                submitted[s] = strategy_s(&truthful[s], rank)?;
            }
            let matching = generalized_match(&instance, &submitted, &config)?;
            out.push(PerRankTrial {
                trial,
                beta,
                rank,
                mode,
                utility: agent_utility(Agent::Student(StudentId(s)), &matching, &true_side, &u)?,
            });
        }
    }
    Ok(out)
}

pub fn run_per_rank(spec: &ExperimentSpec, trials: Option<&[u64]>) -> Result<PerRankOutput> {
    spec.check()?;
    let all = spec.trial_indices();
    let trials = trials.unwrap_or(&all);
    let mut out = PerRankOutput::default();
    for &beta in &spec.per_rank_betas {
        let per_trial = over_trials(trials, |t| per_rank_trial(spec, beta, t))?;
        let cells = per_trial.first().map_or(0, Vec::len);
        for i in 0..cells {
            let values: Vec<f64> = per_trial.iter().map(|v| v[i].utility).collect();
            let first = per_trial[0][i];
            out.rows.push(PerRankRow {
                beta,
                rank: first.rank,
                mode: first.mode,
                utility: Summary::of(&values).expect("at least one trial"),
            });
        }
        out.trials.extend(per_trial.into_iter().flatten());
    }
    Ok(out)
}

pub fn write_per_rank_csv<W: Write>(rows: &[PerRankRow], out: W) -> Result<()> {
    write_rows(
        &["beta", "rank", "mode", "mean_u", "se"],
        rows.iter().map(|r| {
            vec![
                r.beta.to_string(),
                r.rank.to_string(),
                r.mode.name().to_string(),
                r.utility.mean.to_string(),
                r.utility.se.to_string(),
            ]
        }),
        out,
    )
}

pub fn write_per_rank_trials_csv<W: Write>(trials: &[PerRankTrial], out: W) -> Result<()> {
    write_rows(
        &["trial", "beta", "rank", "mode", "u"],
        trials.iter().map(|t| {
            vec![
                t.trial.to_string(),
                t.beta.to_string(),
                t.rank.to_string(),
                t.mode.name().to_string(),
                t.utility.to_string(),
            ]
        }),
        out,
    )
}
