//! Merit scores and the reciprocating preference lists colleges derive from
//! them.
//!
//! A college evaluates applicant `s` as
//! `(1 - alpha) * score(s) + alpha * bonus(rank s gave the college)`
//! and orders applicants by that merit, breaking near-ties by raw score and
//! then by a keyed lottery.

use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::model::{BandTable, BonusFunction, College, CollegeId, Instance, PreferenceList, Student, StudentId};
use crate::rng::{self, Purpose};

/// Merits closer than this are treated as tied.
pub const MERIT_TOLERANCE: f64 = 1e-9;

/// How a college treats students who did not list it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnlistedPolicy {
    /// The college never considers them.
    #[default]
    Unacceptable,
    /// They are ranked with a bonus of zero.
    Acceptable,
}

pub fn merit_score(alpha: f64, score: f64, bonus: &BonusFunction, rank: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(MatchError::AlphaOutOfRange(alpha));
    }
    Ok((1.0 - alpha) * score + alpha * bonus.get(rank)?)
}

/// Merit of a suitor in the marriage variant: `initial_rating` plays the role
/// of the exam score and `rank` is the evaluator's position in the suitor's
/// initial list. Works for either side.
pub fn marriage_merit(alpha: f64, initial_rating: f64, bonus: &BonusFunction, rank: usize) -> Result<f64> {
    merit_score(alpha, initial_rating, bonus, rank)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeritEntry<T> {
    pub agent: T,
    pub merit: f64,
    /// First tie-break key (higher wins).
    pub score: f64,
    /// Final tie-break key in `[0, 1)` (lower wins).
    pub lottery: f64,
}

/// Orders entries by merit (descending). Entries whose merits chain together
/// within [`MERIT_TOLERANCE`] form one tie group, resolved by score and then
/// by lottery.
pub fn rank_by_merit<T: Copy + PartialEq + Ord>(mut entries: Vec<MeritEntry<T>>) -> PreferenceList<T> {
    entries.sort_by(|a, b| b.merit.total_cmp(&a.merit));
    let mut out = Vec::with_capacity(entries.len());
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end - 1].merit - entries[end].merit <= MERIT_TOLERANCE {
            end += 1;
        }
        let group = &mut entries[start..end];
        group.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(a.lottery.total_cmp(&b.lottery))
                .then(a.agent.cmp(&b.agent))
        });
        out.extend(group.iter().map(|e| e.agent));
        start = end;
    }
    PreferenceList::new(out)
}

/// Reciprocating preference of college `c` over the students, given their
/// submitted lists.
pub fn reciprocating_preference(
    c: CollegeId,
    college: &College,
    students: &[Student],
    submitted: &[PreferenceList<CollegeId>],
    lottery_seed: u64,
    unlisted: UnlistedPolicy,
) -> Result<PreferenceList<StudentId>> {
    reciprocating_preference_with_alpha(c, college, college.alpha, students, submitted, lottery_seed, unlisted)
}

pub(crate) fn reciprocating_preference_with_alpha(
    c: CollegeId,
    college: &College,
    alpha: f64,
    students: &[Student],
    submitted: &[PreferenceList<CollegeId>],
    lottery_seed: u64,
    unlisted: UnlistedPolicy,
) -> Result<PreferenceList<StudentId>> {
    let mut entries = Vec::with_capacity(students.len());
    for (i, (student, list)) in students.iter().zip(submitted).enumerate() {
        let merit = match (list.rank_of(c), unlisted) {
            (Some(rank), _) => merit_score(alpha, student.score, &college.bonus, rank)?,
            (None, UnlistedPolicy::Acceptable) => (1.0 - alpha) * student.score,
            (None, UnlistedPolicy::Unacceptable) => continue,
        };
        entries.push(MeritEntry {
            agent: StudentId(i),
            merit,
            score: student.score,
            lottery: rng::lottery(lottery_seed, Purpose::Lottery, c.index(), i),
        });
    }
    Ok(rank_by_merit(entries))
}

/// Reciprocating preferences for every college. `alpha_override` replaces
/// each college's own factor (0 for pure deferred acceptance, 1 for Boston).
pub fn reciprocating_preferences(
    instance: &Instance,
    submitted: &[PreferenceList<CollegeId>],
    alpha_override: Option<f64>,
    lottery_seed: u64,
    unlisted: UnlistedPolicy,
) -> Result<Vec<PreferenceList<StudentId>>> {
    instance
        .colleges
        .iter()
        .enumerate()
        .map(|(c, college)| {
            reciprocating_preference_with_alpha(
                CollegeId(c),
                college,
                alpha_override.unwrap_or(college.alpha),
                &instance.students,
                submitted,
                lottery_seed,
                unlisted,
            )
        })
        .collect()
}

/// Expands one bonus value per band into a bonus over choice numbers.
pub fn band_bonus(bands: &BandTable, per_band: &[f64]) -> Result<BonusFunction> {
    bands.check()?;
    if per_band.len() != bands.bands.len() {
        return Err(MatchError::BadBandTable(format!(
            "{} band values for {} bands",
            per_band.len(),
            bands.bands.len()
        )));
    }
    let f = BonusFunction::Banded {
        bands: bands.clone(),
        values: per_band.to_vec(),
    };
    if let Some(rank) = f.first_violation() {
        return Err(MatchError::BonusNotDecreasing(rank));
    }
    Ok(f)
}
