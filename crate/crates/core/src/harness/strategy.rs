//! Utilities when `k` students play strategy S and the rest report truthfully.

use std::io::Write;

use rand::seq::index::sample;

use super::{opt, over_trials, write_rows, ExperimentSpec, StrategicSelection, Summary};
use crate::error::Result;
use crate::matching::{generalized_match, reciprocating_market, MechanismConfig};
use crate::model::{PreferenceList, StudentId};
use crate::rng::{substream, trial_seed, Purpose};
use crate::simgen::{gen_instance, score_ranks};
use crate::strategy::strategy_s;
use crate::welfare::{agent_utility, aggregate, Agent, SideKind};

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyTrial {
    pub trial: u64,
    pub k: usize,
    /// Mean utility of this trial's strategic students, `None` when `k = 0`.
    pub u_strategic: Option<f64>,
    pub u_truthful: Option<f64>,
    pub pi_s: f64,
    /// Colleges scored against lists built from the submitted preferences.
    pub pi_c_submitted: f64,
    /// Colleges scored against lists built from the true preferences.
    pub pi_c_true: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyRow {
    pub k: usize,
    pub u_strategic: Option<Summary>,
    pub u_truthful: Option<Summary>,
    pub pi_s: Summary,
    pub pi_c_submitted: Summary,
    pub pi_c_true: Summary,
}

#[derive(Clone, Debug, Default)]
pub struct StrategyOutput {
    pub rows: Vec<StrategyRow>,
    pub trials: Vec<StrategyTrial>,
}

fn strategic_students(spec: &ExperimentSpec, ranks: &[usize], k: usize, seed: u64) -> Vec<bool> {
    let n = ranks.len();
    match spec.strategic_selection {
        StrategicSelection::Lowest => ranks.iter().map(|&r| r > n - k).collect(),
        StrategicSelection::Random => {
            let mut rng = substream(seed, Purpose::Strategic, k as u64, 0);
            let mut chosen = vec![false; n];
            for s in sample(&mut rng, n, k) {
                chosen[s] = true;
            }
            chosen
        }
    }
}

/// One market, evaluated for every strategic count.
pub fn strategy_trial(spec: &ExperimentSpec, trial: u64) -> Result<Vec<StrategyTrial>> {
    let mechanism = spec.single_mechanism();
    let (gen, base) = spec.trial_gen(spec.strategy_beta, trial);
    let instance = gen_instance(&gen)?;
    let config = MechanismConfig {
        mode: mechanism.mode(),
        ..base
    };
    let ranks = score_ranks(&instance.scores());
    let truthful = &instance.student_prefs;
    let true_market = reciprocating_market(&instance, truthful, &config)?;
    let (u_s, u_c) = (spec.student_utility(), spec.college_utility());

    spec.strategic_counts()
        .into_iter()
        .map(|k| {
            let chosen = strategic_students(spec, &ranks, k, trial_seed(spec.seed, trial));
            let submitted = truthful
                .iter()
                .zip(&ranks)
                .zip(&chosen)
                .map(|((list, &rank), &strategic)| {
                    if strategic {
                        strategy_s(list, rank)
                    } else {
                        Ok(list.clone())
                    }
                })
                .collect::<Result<Vec<PreferenceList<_>>>>()?;
            let matching = generalized_match(&instance, &submitted, &config)?;
            let submitted_market = reciprocating_market(&instance, &submitted, &config)?;

            let (mut strat, mut honest) = (Vec::new(), Vec::new());
            for (s, &strategic) in chosen.iter().enumerate() {
                let u = agent_utility(Agent::Student(StudentId(s)), &matching, &true_market, &u_s)?;
                if strategic {
                    strat.push(u)
                } else {
                    honest.push(u)
                }
            }
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            Ok(StrategyTrial {
                trial,
                k,
                u_strategic: mean(&strat),
                u_truthful: mean(&honest),
                pi_s: aggregate(&matching, SideKind::Students, &true_market, &u_s)?,
                pi_c_submitted: aggregate(&matching, SideKind::Colleges, &submitted_market, &u_c)?,
                pi_c_true: aggregate(&matching, SideKind::Colleges, &true_market, &u_c)?,
            })
        })
        .collect()
}

pub fn run_strategy_count(spec: &ExperimentSpec, trials: Option<&[u64]>) -> Result<StrategyOutput> {
    spec.check()?;
    let all = spec.trial_indices();
    let trials = trials.unwrap_or(&all);
    let per_trial = over_trials(trials, |t| strategy_trial(spec, t))?;
    let mut out = StrategyOutput::default();
    for (i, k) in spec.strategic_counts().into_iter().enumerate() {
        let rows: Vec<&StrategyTrial> = per_trial.iter().map(|v| &v[i]).collect();
        let opt_col =
            |f: fn(&StrategyTrial) -> Option<f64>| Summary::of(&rows.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
        let col = |f: fn(&StrategyTrial) -> f64| {
            Summary::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>()).expect("at least one trial")
        };
        out.rows.push(StrategyRow {
            k,
            u_strategic: opt_col(|r| r.u_strategic),
            u_truthful: opt_col(|r| r.u_truthful),
            pi_s: col(|r| r.pi_s),
            pi_c_submitted: col(|r| r.pi_c_submitted),
            pi_c_true: col(|r| r.pi_c_true),
        });
    }
    // Trial-major order, like the other experiments' per-trial files.
    out.trials = per_trial.into_iter().flatten().collect();
    Ok(out)
}

/// `piS`, `piC_submitted` and `piC_true` are means over trials.
pub fn write_strategy_csv<W: Write>(rows: &[StrategyRow], out: W) -> Result<()> {
    write_rows(
        &[
            "k",
            "mean_u_strategic",
            "se",
            "mean_u_truthful",
            "se",
            "piS",
            "piC_submitted",
            "piC_true",
        ],
        rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                opt(r.u_strategic.map(|s| s.mean)),
                opt(r.u_strategic.map(|s| s.se)),
                opt(r.u_truthful.map(|s| s.mean)),
                opt(r.u_truthful.map(|s| s.se)),
                r.pi_s.mean.to_string(),
                r.pi_c_submitted.mean.to_string(),
                r.pi_c_true.mean.to_string(),
            ]
        }),
        out,
    )
}

pub fn write_strategy_trials_csv<W: Write>(trials: &[StrategyTrial], out: W) -> Result<()> {
    write_rows(
        &[
            "trial",
            "k",
            "u_strategic",
            "u_truthful",
            "piS",
            "piC_submitted",
            "piC_true",
        ],
        trials.iter().map(|t| {
            vec![
                t.trial.to_string(),
                t.k.to_string(),
                opt(t.u_strategic),
                opt(t.u_truthful),
                t.pi_s.to_string(),
                t.pi_c_submitted.to_string(),
                t.pi_c_true.to_string(),
            ]
        }),
        out,
    )
}
