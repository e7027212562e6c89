//! Aggregate utilities and social welfare along the correlation grid, all
//! students truthful.

use std::io::Write;

use super::{over_trials, write_rows, ExperimentSpec, Mechanism, Summary};
use crate::error::Result;
use crate::matching::{generalized_match, reciprocating_market, MechanismConfig};
use crate::simgen::gen_instance;
use crate::welfare::{aggregate, SideKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelfareTrial {
    pub trial: u64,
    pub beta: f64,
    pub mechanism: Mechanism,
    pub pi_s: f64,
    pub pi_c: f64,
    pub pi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelfareRow {
    pub beta: f64,
    pub mechanism: Mechanism,
    pub pi_s: Summary,
    pub pi_c: Summary,
    pub pi: Summary,
}

#[derive(Clone, Debug, Default)]
pub struct WelfareOutput {
    pub rows: Vec<WelfareRow>,
    pub trials: Vec<WelfareTrial>,
}

/// One trial at one grid point. Both mechanisms see the same market.
pub fn welfare_trial(spec: &ExperimentSpec, beta: f64, mechanism: Mechanism, trial: u64) -> Result<WelfareTrial> {
    let (gen, base) = spec.trial_gen(beta, trial);
    let instance = gen_instance(&gen)?;
    let config = MechanismConfig {
        mode: mechanism.mode(),
        ..base
    };
    let truthful = &instance.student_prefs;
    let matching = generalized_match(&instance, truthful, &config)?;
    let market = reciprocating_market(&instance, truthful, &config)?;
    let pi_s = aggregate(&matching, SideKind::Students, &market, &spec.student_utility())?;
    let pi_c = aggregate(&matching, SideKind::Colleges, &market, &spec.college_utility())?;
    Ok(WelfareTrial {
        trial,
        beta,
        mechanism,
        pi_s,
        pi_c,
        pi: pi_s + pi_c,
    })
}

/// Runs `trials` (every trial when `None`) at every grid point and mechanism.
pub fn run_welfare_sweep(spec: &ExperimentSpec, trials: Option<&[u64]>) -> Result<WelfareOutput> {
    spec.check()?;
    let all = spec.trial_indices();
    let trials = trials.unwrap_or(&all);
    let mut out = WelfareOutput::default();
    for beta in spec.beta_grid() {
        for &mechanism in &spec.mechanisms {
            let rows = over_trials(trials, |t| welfare_trial(spec, beta, mechanism, t))?;
            let col = |f: fn(&WelfareTrial) -> f64| {
                Summary::of(&rows.iter().map(f).collect::<Vec<_>>()).expect("at least one trial")
            };
            out.rows.push(WelfareRow {
                beta,
                mechanism,
                pi_s: col(|r| r.pi_s),
                pi_c: col(|r| r.pi_c),
                pi: col(|r| r.pi),
            });
            out.trials.extend(rows);
        }
    }
    Ok(out)
}

pub fn write_welfare_csv<W: Write>(rows: &[WelfareRow], out: W) -> Result<()> {
    write_rows(
        &[
            "beta",
            "mechanism",
            "mean_piS",
            "se_piS",
            "mean_piC",
            "se_piC",
            "mean_Pi",
            "se_Pi",
        ],
        rows.iter().map(|r| {
            vec![
                r.beta.to_string(),
                r.mechanism.to_string(),
                r.pi_s.mean.to_string(),
                r.pi_s.se.to_string(),
                r.pi_c.mean.to_string(),
                r.pi_c.se.to_string(),
                r.pi.mean.to_string(),
                r.pi.se.to_string(),
            ]
        }),
        out,
    )
}

pub fn write_welfare_trials_csv<W: Write>(trials: &[WelfareTrial], out: W) -> Result<()> {
    write_rows(
        &["trial", "beta", "mechanism", "pi_S", "pi_C", "Pi"],
        trials.iter().map(|t| {
            vec![
                t.trial.to_string(),
                t.beta.to_string(),
                t.mechanism.to_string(),
                t.pi_s.to_string(),
                t.pi_c.to_string(),
                t.pi.to_string(),
            ]
        }),
        out,
    )
}
