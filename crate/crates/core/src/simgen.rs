//! Random admissions markets.
//!
//! Student `s` values college `c` at `beta * reputation(c) + (1 - beta) * taste(s, c)`
//! with `taste ~ U[0, 100]`, and lists colleges by descending value. Scores
//! are `U[0, f_max]`; reciprocating factors follow [`AlphaDist`]; every
//! college uses `h(r) = 110 - 10 r`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::model::{BonusFunction, College, CollegeId, Instance, PreferenceList, Student};
use crate::rng::{substream, Purpose};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaDist {
    /// 0 or 1 with probability 1/2 each.
    BernoulliHalf,
    Uniform {
        lo: f64,
        hi: f64,
    },
    Constant {
        value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n_students: usize,
    pub n_colleges: usize,
    pub quota: usize,
    pub beta: f64,
    pub reputations: Vec<f64>,
    pub alpha: AlphaDist,
    pub f_max: f64,
    pub bonus_intercept: f64,
    pub bonus_step: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_students: 10,
            n_colleges: 5,
            quota: 1,
            beta: 0.0,
            reputations: default_reputations(5),
            alpha: AlphaDist::BernoulliHalf,
            f_max: 100.0,
            bonus_intercept: 110.0,
            bonus_step: 10.0,
            seed: 0,
        }
    }
}

/// `100, 90, 80, ...` for `m` colleges.
pub fn default_reputations(m: usize) -> Vec<f64> {
    (0..m).map(|i| 100.0 - 10.0 * i as f64).collect()
}

impl GenConfig {
    /// A market of the given size with reputations `100, 90, ...`.
    pub fn sized(n_students: usize, n_colleges: usize) -> Self {
        GenConfig {
            n_students,
            n_colleges,
            reputations: default_reputations(n_colleges),
            ..GenConfig::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(MatchError::Config(format!("beta {} outside [0, 1]", self.beta)));
        }
        if self.reputations.len() != self.n_colleges {
            return Err(MatchError::Config(format!(
                "{} reputations for {} colleges",
                self.reputations.len(),
                self.n_colleges
            )));
        }
        if self.quota == 0 {
            return Err(MatchError::Config("quota must be at least 1".into()));
        }
        match self.alpha {
            AlphaDist::Uniform { lo, hi } if lo > hi || lo < 0.0 || hi > 1.0 => Err(MatchError::Config(format!(
                "alpha interval [{lo}, {hi}] is not inside [0, 1]"
            ))),
            AlphaDist::Constant { value } if !(0.0..=1.0).contains(&value) => {
                Err(MatchError::Config(format!("alpha {value} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// True preference lists, one substream per student.
pub fn gen_student_prefs(config: &GenConfig) -> Vec<PreferenceList<CollegeId>> {
    (0..config.n_students)
        .map(|s| {
            let mut rng = substream(config.seed, Purpose::Taste, s as u64, 0);
            let mut values: Vec<(f64, usize)> = config
                .reputations
                .iter()
                .enumerate()
                .map(|(c, rep)| {
                    let taste = rng.random::<f64>() * 100.0;
                    (config.beta * rep + (1.0 - config.beta) * taste, c)
                })
                .collect();
            values.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            values.into_iter().map(|(_, c)| CollegeId(c)).collect()
        })
        .collect()
}

pub fn gen_scores(config: &GenConfig) -> Vec<f64> {
    (0..config.n_students)
        .map(|s| substream(config.seed, Purpose::Score, s as u64, 0).random::<f64>() * config.f_max)
        .collect()
}

pub fn gen_alphas(config: &GenConfig) -> Result<Vec<f64>> {
    config.check()?;
    Ok((0..config.n_colleges)
        .map(|c| {
            let mut rng = substream(config.seed, Purpose::Alpha, c as u64, 0);
            match config.alpha {
                AlphaDist::BernoulliHalf => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        0.0
                    }
                }
                AlphaDist::Uniform { lo, hi } => {
                    if lo == hi {
                        lo
                    } else {
                        rng.random_range(lo..=hi)
                    }
                }
                AlphaDist::Constant { value } => value,
            }
        })
        .collect())
}

/// Builds a validated instance whose `student_prefs` are the true lists.
pub fn gen_instance(config: &GenConfig) -> Result<Instance> {
    config.check()?;
    let scores = gen_scores(config);
    let alphas = gen_alphas(config)?;
    let bonus = BonusFunction::linear(config.bonus_intercept, config.bonus_step, config.n_colleges);
    let instance = Instance {
        f_max: config.f_max,
        students: scores
            .into_iter()
            .enumerate()
            .map(|(i, score)| Student {
                id: format!("s{}", i + 1),
                score,
            })
            .collect(),
        colleges: alphas
            .into_iter()
            .enumerate()
            .map(|(i, alpha)| College {
                id: format!("c{}", i + 1),
                quota: config.quota,
                alpha,
                bonus: bonus.clone(),
            })
            .collect(),
        student_prefs: gen_student_prefs(config),
    };
    instance.check()?;
    Ok(instance)
}

/// 1-based score rank of every student (1 = highest score), ties by index.
pub fn score_ranks(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; scores.len()];
    for (r, s) in order.into_iter().enumerate() {
        ranks[s] = r + 1;
    }
    ranks
}
