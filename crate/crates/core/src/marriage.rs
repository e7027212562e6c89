//! One-to-one variant: both sides may weigh their own rating of a suitor
//! against how highly that suitor ranked them.
//!
//! Men occupy the student side of a [`Market`] and women the college side,
//! whichever side proposes.

use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::matching::deferred_acceptance;
use crate::merit::{marriage_merit, rank_by_merit, MeritEntry};
use crate::model::{BonusFunction, CollegeId, Market, Matching, PreferenceList, StudentId};
use crate::rng::{self, Purpose};

pub type Man = StudentId;
pub type Woman = CollegeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposer {
    Men,
    Women,
}

/// Per-agent parameters for one side of the market.
#[derive(Clone, Debug, PartialEq)]
pub struct Side<Own, Other> {
    /// Initial preference lists.
    pub prefs: Vec<PreferenceList<Other>>,
    /// `ratings[i][j]`: agent `i`'s initial rating of agent `j` on the other side.
    pub ratings: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub bonuses: Vec<BonusFunction>,
    _own: std::marker::PhantomData<Own>,
}

impl<Own, Other> Side<Own, Other> {
    pub fn new(
        prefs: Vec<PreferenceList<Other>>,
        ratings: Vec<Vec<f64>>,
        alphas: Vec<f64>,
        bonuses: Vec<BonusFunction>,
    ) -> Self {
        Side {
            prefs,
            ratings,
            alphas,
            bonuses,
            _own: std::marker::PhantomData,
        }
    }

    pub fn len(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarriageProblem {
    pub men: Side<Man, Woman>,
    pub women: Side<Woman, Man>,
    pub lottery_seed: u64,
}

/// Reciprocating list of one agent: the suitors it lists initially, ordered by
/// merit. The bonus rank is the agent's position in each suitor's INITIAL
/// list; a suitor who does not list the agent gets no bonus.
fn reciprocal_list<Own, Other>(
    owner: usize,
    own: &Side<Own, Other>,
    suitors: &Side<Other, Own>,
    seed: u64,
    salt: usize,
) -> Result<PreferenceList<Other>>
where
    Own: Copy + PartialEq + From<usize>,
    Other: Copy + PartialEq + Ord + Into<usize>,
{
    let alpha = own.alphas[owner];
    let me = Own::from(owner);
    let mut entries = Vec::new();
    for suitor in own.prefs[owner].iter() {
        let j: usize = suitor.into();
        let rating = *own
            .ratings
            .get(owner)
            .and_then(|r| r.get(j))
            .ok_or(MatchError::UnrankedPartner {
                agent: owner,
                partner: j,
            })?;
        let merit = match suitors.prefs[j].rank_of(me) {
            Some(rank) => marriage_merit(alpha, rating, &own.bonuses[owner], rank)?,
            None => (1.0 - alpha) * rating,
        };
        entries.push(MeritEntry {
            agent: suitor,
            merit,
            score: rating,
            lottery: rng::lottery(seed, Purpose::Marriage, salt * 1_000_003 + owner, j),
        });
    }
    Ok(rank_by_merit(entries))
}

impl From<usize> for StudentId {
    fn from(i: usize) -> Self {
        StudentId(i)
    }
}

impl From<usize> for CollegeId {
    fn from(i: usize) -> Self {
        CollegeId(i)
    }
}

impl From<StudentId> for usize {
    fn from(s: StudentId) -> usize {
        s.0
    }
}

impl From<CollegeId> for usize {
    fn from(c: CollegeId) -> usize {
        c.0
    }
}

/// Reciprocating preferences of both sides, built from the initial lists.
/// The result has men on the student side and women on the college side.
pub fn reciprocal_market(problem: &MarriageProblem) -> Result<Market> {
    let seed = problem.lottery_seed;
    let men_prefs = (0..problem.men.len())
        .map(|m| reciprocal_list(m, &problem.men, &problem.women, seed, 0))
        .collect::<Result<Vec<_>>>()?;
    let women_prefs = (0..problem.women.len())
        .map(|w| reciprocal_list(w, &problem.women, &problem.men, seed, 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Market {
        student_prefs: men_prefs,
        college_prefs: women_prefs,
        quotas: vec![1; problem.women.len()],
    })
}

/// Proposer-optimal stable marriage under reciprocating preferences.
/// The returned matching maps each man to his wife.
pub fn marriage_match(problem: &MarriageProblem, proposer: Proposer) -> Result<Matching> {
    let market = reciprocal_market(problem)?;
    Ok(match proposer {
        Proposer::Men => deferred_acceptance(&market),
        Proposer::Women => {
            let flipped = Market {
                student_prefs: market
                    .college_prefs
                    .iter()
                    .map(|l| l.iter().map(|m| CollegeId(m.0)).collect())
                    .collect(),
                college_prefs: market
                    .student_prefs
                    .iter()
                    .map(|l| l.iter().map(|w| StudentId(w.0)).collect())
                    .collect(),
                quotas: vec![1; market.n_students()],
            };
            let by_woman = deferred_acceptance(&flipped);
            let mut by_man = Matching::unmatched(market.n_students());
            for (w, husband) in by_woman.assignment().iter().enumerate() {
                if let Some(m) = husband {
                    by_man.assign(StudentId(m.0), Some(CollegeId(w)));
                }
            }
            by_man
        }
    })
}
