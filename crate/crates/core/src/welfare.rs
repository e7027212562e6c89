//! Rank-based utilities, aggregate utility per side and social welfare.

use crate::error::{MatchError, Result};
use crate::model::{CollegeId, Market, Matching, StudentId};

/// Utility as a function of the partner's rank; `unmatched` is the utility of
/// an empty slot (rank 0).
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityFunction {
    by_rank: Vec<f64>,
    unmatched: f64,
}

impl UtilityFunction {
    pub fn new(by_rank: Vec<f64>, unmatched: f64) -> Result<Self> {
        if let Some(i) = by_rank.windows(2).position(|w| w[1] > w[0]) {
            return Err(MatchError::UtilityIncreasing(i + 2));
        }
        Ok(UtilityFunction { by_rank, unmatched })
    }

    /// `U(r) = top - r` for `r` in `1..=len`, `U(0) = 0`.
    pub fn linear(top: f64, len: usize) -> Self {
        UtilityFunction {
            by_rank: (1..=len).map(|r| top - r as f64).collect(),
            unmatched: 0.0,
        }
    }

    /// Utility at a 1-based rank, `None` meaning unmatched.
    pub fn at(&self, rank: Option<usize>) -> Option<f64> {
        match rank {
            None => Some(self.unmatched),
            Some(r) => r.checked_sub(1).and_then(|i| self.by_rank.get(i).copied()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agent {
    Student(StudentId),
    College(CollegeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideKind {
    Students,
    Colleges,
}

/// Utility of one agent, ranks measured against `market`'s lists. A college
/// collects one term per seat; empty seats count as unmatched.
pub fn agent_utility(agent: Agent, matching: &Matching, market: &Market, u: &UtilityFunction) -> Result<f64> {
    match agent {
        Agent::Student(s) => {
            let prefs = &market.student_prefs[s.index()];
            match matching.college_of(s) {
                None => Ok(u.unmatched),
                Some(c) => prefs
                    .rank_of(c)
                    .and_then(|r| u.at(Some(r)))
                    .ok_or(MatchError::UnrankedPartner {
                        agent: s.index(),
                        partner: c.index(),
                    }),
            }
        }
        Agent::College(c) => {
            let prefs = &market.college_prefs[c.index()];
            let members = matching.students_of(c);
            let mut total = 0.0;
            for s in &members {
                total += prefs
                    .rank_of(*s)
                    .and_then(|r| u.at(Some(r)))
                    .ok_or(MatchError::UnrankedPartner {
                        agent: c.index(),
                        partner: s.index(),
                    })?;
            }
            let empty = market.quotas[c.index()].saturating_sub(members.len());
            Ok(total + empty as f64 * u.unmatched)
        }
    }
}

pub fn aggregate(matching: &Matching, side: SideKind, market: &Market, u: &UtilityFunction) -> Result<f64> {
    match side {
        SideKind::Students => (0..market.n_students())
            .map(|s| agent_utility(Agent::Student(StudentId(s)), matching, market, u))
            .sum(),
        SideKind::Colleges => (0..market.n_colleges())
            .map(|c| agent_utility(Agent::College(CollegeId(c)), matching, market, u))
            .sum(),
    }
}

/// Sum of both sides' aggregate utilities.
pub fn social_welfare(
    matching: &Matching,
    market: &Market,
    u_students: &UtilityFunction,
    u_colleges: &UtilityFunction,
) -> Result<f64> {
    Ok(aggregate(matching, SideKind::Students, market, u_students)?
        + aggregate(matching, SideKind::Colleges, market, u_colleges)?)
}
