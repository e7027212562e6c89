//! The matching phase: student-proposing deferred acceptance, the Boston
//! mechanism, and the two-stage generalized pipeline that feeds merit-ordered
//! college lists into deferred acceptance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::merit::{self, UnlistedPolicy};
use crate::model::{CollegeId, Instance, Market, Matching, PreferenceList, StudentId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Each college uses its own reciprocating factor.
    #[default]
    Generalized,
    /// Every factor forced to 0: Gale-Shapley student-optimal mechanism.
    PureDa,
    /// Immediate acceptance, rounds by choice number.
    PureBm,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismConfig {
    pub mode: Mode,
    pub lottery_seed: u64,
    pub unlisted: UnlistedPolicy,
}

impl MechanismConfig {
    pub fn new(mode: Mode, lottery_seed: u64) -> Self {
        MechanismConfig {
            mode,
            lottery_seed,
            unlisted: UnlistedPolicy::default(),
        }
    }

    fn alpha_override(&self) -> Option<f64> {
        match self.mode {
            Mode::Generalized => None,
            Mode::PureDa => Some(0.0),
            Mode::PureBm => Some(1.0),
        }
    }
}

/// Student-proposing deferred acceptance, students queued in index order.
pub fn deferred_acceptance(market: &Market) -> Matching {
    let order: Vec<StudentId> = (0..market.n_students()).map(StudentId).collect();
    deferred_acceptance_in_order(market, &order)
}

/// Deferred acceptance with an explicit initial proposal queue. The outcome
/// does not depend on `order`.
pub fn deferred_acceptance_in_order(market: &Market, order: &[StudentId]) -> Matching {
    let positions = market.college_positions();
    let mut next = vec![0usize; market.n_students()];
    let mut held: Vec<Vec<StudentId>> = vec![Vec::new(); market.n_colleges()];
    let mut queue: VecDeque<StudentId> = order.iter().copied().collect();

    while let Some(s) = queue.pop_front() {
        let prefs = &market.student_prefs[s.index()];
        while let Some(c) = prefs.at_rank(next[s.index()] + 1) {
            next[s.index()] += 1;
            let pos = &positions[c.index()];
            if pos[s.index()].is_none() {
                continue;
            }
            let tentative = &mut held[c.index()];
            tentative.push(s);
            if tentative.len() <= market.quotas[c.index()] {
                break;
            }
            let worst = tentative
                .iter()
                .enumerate()
                .max_by_key(|(_, t)| pos[t.index()])
                .map(|(i, _)| i)
                .expect("non-empty");
            let rejected = tentative.swap_remove(worst);
            if rejected != s {
                queue.push_back(rejected);
                break;
            }
        }
    }

    let mut m = Matching::unmatched(market.n_students());
    for (c, students) in held.iter().enumerate() {
        for &s in students {
            m.assign(s, Some(CollegeId(c)));
        }
    }
    m
}

/// Boston (immediate acceptance) mechanism.
///
/// In round `r` every still-unmatched student applies to their `r`-th choice
/// if it has seats left; the college admits applicants in the order of its
/// list until full. Admissions are final. A student whose `r`-th choice is
/// already full sits the round out and moves on to choice `r + 1`.
pub fn boston(market: &Market) -> Matching {
    let positions = market.college_positions();
    let mut seats = market.quotas.clone();
    let mut m = Matching::unmatched(market.n_students());
    let rounds = market.student_prefs.iter().map(|p| p.len()).max().unwrap_or(0);

    for round in 1..=rounds {
        let mut applicants: Vec<Vec<StudentId>> = vec![Vec::new(); market.n_colleges()];
        for (s, prefs) in market.student_prefs.iter().enumerate() {
            let s = StudentId(s);
            if m.college_of(s).is_some() {
                continue;
            }
            if let Some(c) = prefs.at_rank(round) {
                if seats[c.index()] > 0 && positions[c.index()][s.index()].is_some() {
                    applicants[c.index()].push(s);
                }
            }
        }
        for (c, mut apps) in applicants.into_iter().enumerate() {
            apps.sort_by_key(|s| positions[c][s.index()]);
            for s in apps.into_iter().take(seats[c]) {
                m.assign(s, Some(CollegeId(c)));
                seats[c] -= 1;
            }
        }
    }
    m
}

/// Builds the market the matching phase sees: `submitted` on the student
/// side, reciprocating preferences on the college side.
pub fn reciprocating_market(
    instance: &Instance,
    submitted: &[PreferenceList<CollegeId>],
    config: &MechanismConfig,
) -> Result<Market> {
    let college_prefs = merit::reciprocating_preferences(
        instance,
        submitted,
        config.alpha_override(),
        config.lottery_seed,
        config.unlisted,
    )?;
    Ok(Market {
        student_prefs: submitted.to_vec(),
        college_prefs,
        quotas: instance.quotas(),
    })
}

/// Runs the full pipeline on `submitted` lists.
pub fn generalized_match(
    instance: &Instance,
    submitted: &[PreferenceList<CollegeId>],
    config: &MechanismConfig,
) -> Result<Matching> {
    instance.check()?;
    instance.check_submitted(submitted)?;
    let market = reciprocating_market(instance, submitted, config)?;
    Ok(match config.mode {
        Mode::PureBm => boston(&market),
        Mode::Generalized | Mode::PureDa => deferred_acceptance(&market),
    })
}
