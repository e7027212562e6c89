//! Domain types shared by every stage of the pipeline.
//!
//! Agents are addressed by dense indices ([`StudentId`], [`CollegeId`]) into
//! the owning [`Instance`]; human-readable ids only exist at the file boundary.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};

/// Default full mark of the examination.
pub const DEFAULT_F_MAX: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StudentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CollegeId(pub usize);

impl StudentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl CollegeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for CollegeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A strict ordering of agents, most preferred first. Unlisted agents are
/// unacceptable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreferenceList<T>(Vec<T>);

impl<T> Default for PreferenceList<T> {
    fn default() -> Self {
        PreferenceList(Vec::new())
    }
}

impl<T: Copy + PartialEq> PreferenceList<T> {
    pub fn new(items: Vec<T>) -> Self {
        PreferenceList(items)
    }

    /// 1-based position of `target`, or `None` when unlisted.
    pub fn rank_of(&self, target: T) -> Option<usize> {
        self.0.iter().position(|&x| x == target).map(|p| p + 1)
    }

    /// Agent at 1-based `rank`.
    pub fn at_rank(&self, rank: usize) -> Option<T> {
        rank.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn contains(&self, target: T) -> bool {
        self.0.contains(&target)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    /// `true` if `a` is listed strictly before `b`; an unlisted agent loses
    /// to any listed one.
    pub fn prefers(&self, a: T, b: T) -> bool {
        match (self.rank_of(a), self.rank_of(b)) {
            (Some(ra), Some(rb)) => ra < rb,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// Swap the entries at two 1-based ranks.
    pub fn swap_ranks(&mut self, a: usize, b: usize) {
        self.0.swap(a - 1, b - 1);
    }
}

impl<T: Copy + PartialEq> FromIterator<T> for PreferenceList<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        PreferenceList(iter.into_iter().collect())
    }
}

/// Returns the first duplicated entry, if any.
fn first_duplicate<T: Copy + Eq + std::hash::Hash>(items: &[T]) -> Option<T> {
    let mut seen = HashSet::new();
    items.iter().copied().find(|x| !seen.insert(*x))
}

/// Contiguous choice-number intervals disclosed to colleges instead of exact
/// ranks. Bands are 1-based and inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub bands: Vec<Band>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub label: String,
    pub first: usize,
    pub last: usize,
}

impl BandTable {
    pub fn new(bands: Vec<Band>) -> Result<Self> {
        let table = BandTable { bands };
        table.check()?;
        Ok(table)
    }

    /// The five-band disclosure used by the Hong Kong joint admissions system.
    pub fn jupas() -> Self {
        let band = |label: &str, first, last| Band {
            label: label.to_string(),
            first,
            last,
        };
        BandTable {
            bands: vec![
                band("A", 1, 3),
                band("B", 4, 6),
                band("C", 7, 10),
                band("D", 11, 14),
                band("E", 15, 25),
            ],
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.bands.is_empty() {
            return Err(MatchError::BadBandTable("no bands".into()));
        }
        let mut expected = 1;
        for band in &self.bands {
            if band.first != expected || band.last < band.first {
                return Err(MatchError::BadBandTable(format!(
                    "band {} covers {}..={}, expected to start at {}",
                    band.label, band.first, band.last, expected
                )));
            }
            expected = band.last + 1;
        }
        Ok(())
    }

    /// Index of the band containing choice number `rank`.
    pub fn band_of(&self, rank: usize) -> Option<usize> {
        self.bands.iter().position(|b| (b.first..=b.last).contains(&rank))
    }

    pub fn last_choice(&self) -> usize {
        self.bands.last().map_or(0, |b| b.last)
    }
}

/// Rank-to-bonus mapping `h(r)`.
///
/// The per-rank form must be strictly decreasing. The banded form is constant
/// inside each band and strictly decreasing across bands.
#[derive(Clone, Debug, PartialEq)]
pub enum BonusFunction {
    PerRank(Vec<f64>),
    Banded { bands: BandTable, values: Vec<f64> },
}

impl BonusFunction {
    pub fn per_rank(values: Vec<f64>) -> Result<Self> {
        if let Some(r) = first_non_decreasing(&values) {
            return Err(MatchError::BonusNotDecreasing(r));
        }
        Ok(BonusFunction::PerRank(values))
    }

    /// `h(r) = intercept - step * r` for `r` in `1..=len`.
    pub fn linear(intercept: f64, step: f64, len: usize) -> Self {
        BonusFunction::PerRank((1..=len).map(|r| intercept - step * r as f64).collect())
    }

    /// Number of ranks the function is defined on.
    pub fn domain(&self) -> usize {
        match self {
            BonusFunction::PerRank(v) => v.len(),
            BonusFunction::Banded { bands, .. } => bands.last_choice(),
        }
    }

    pub fn get(&self, rank: usize) -> Result<f64> {
        let out_of_domain = MatchError::RankOutOfDomain {
            rank,
            domain: self.domain(),
        };
        match self {
            BonusFunction::PerRank(v) => rank.checked_sub(1).and_then(|i| v.get(i).copied()).ok_or(out_of_domain),
            BonusFunction::Banded { bands, values } => bands
                .band_of(rank)
                .and_then(|i| values.get(i).copied())
                .ok_or(out_of_domain),
        }
    }

    pub fn is_banded(&self) -> bool {
        matches!(self, BonusFunction::Banded { .. })
    }

    /// First rank at which the ordering invariant breaks.
    pub fn first_violation(&self) -> Option<usize> {
        match self {
            BonusFunction::PerRank(v) => first_non_decreasing(v),
            BonusFunction::Banded { bands, values } => {
                if bands.check().is_err() || values.len() != bands.bands.len() {
                    return Some(1);
                }
                first_non_decreasing(values).map(|i| bands.bands[i - 1].first)
            }
        }
    }
}

fn first_non_decreasing(values: &[f64]) -> Option<usize> {
    values
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Greater))
        .map(|i| i + 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Student {
    pub id: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct College {
    pub id: String,
    pub quota: usize,
    pub alpha: f64,
    pub bonus: BonusFunction,
}

/// A complete admissions problem: agents, parameters and the students'
/// preference lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub f_max: f64,
    pub students: Vec<Student>,
    pub colleges: Vec<College>,
    /// Indexed by student.
    pub student_prefs: Vec<PreferenceList<CollegeId>>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("f_max {0} must be positive")]
    NonPositiveFMax(f64),
    #[error("duplicate student id `{0}`")]
    DuplicateStudent(String),
    #[error("duplicate college id `{0}`")]
    DuplicateCollege(String),
    #[error("student `{student}`: score out of range ({score})")]
    ScoreOutOfRange { student: String, score: f64 },
    #[error("college `{0}`: quota must be at least 1")]
    ZeroQuota(String),
    #[error("college `{college}`: alpha {alpha} out of range")]
    AlphaOutOfRange { college: String, alpha: f64 },
    #[error("college `{college}`: bonus not strictly decreasing at rank {rank}")]
    BonusNotDecreasing { college: String, rank: usize },
    #[error("college `{college}`: bonus undefined at rank {rank} used by student `{student}`")]
    BonusTooShort {
        college: String,
        student: String,
        rank: usize,
    },
    #[error("student `{student}`: college `{college}` listed twice")]
    DuplicateInPrefs { student: String, college: String },
    #[error("student `{student}`: unknown college `{college}`")]
    UnknownCollege { student: String, college: String },
    #[error("preferences given for unknown student `{0}`")]
    UnknownStudent(String),
    #[error("{prefs} preference lists for {students} students")]
    PrefsCount { prefs: usize, students: usize },
}

impl Instance {
    pub fn n_students(&self) -> usize {
        self.students.len()
    }

    pub fn n_colleges(&self) -> usize {
        self.colleges.len()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.students.iter().map(|s| s.score).collect()
    }

    pub fn quotas(&self) -> Vec<usize> {
        self.colleges.iter().map(|c| c.quota).collect()
    }

    pub fn student_index(&self, id: &str) -> Option<StudentId> {
        self.students.iter().position(|s| s.id == id).map(StudentId)
    }

    pub fn college_index(&self, id: &str) -> Option<CollegeId> {
        self.colleges.iter().position(|c| c.id == id).map(CollegeId)
    }

    /// Every invariant violation, empty when the instance is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        validate_parts(self, &self.student_prefs)
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MatchError::Invalid(v))
        }
    }

    /// Validates `submitted` lists against this instance's agents.
    pub fn check_submitted(&self, submitted: &[PreferenceList<CollegeId>]) -> Result<()> {
        let v = validate_parts(self, submitted);
        if v.is_empty() {
            Ok(())
        } else {
            Err(MatchError::Invalid(v))
        }
    }
}

fn validate_parts(inst: &Instance, prefs: &[PreferenceList<CollegeId>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.f_max.is_nan() || inst.f_max <= 0.0 {
        out.push(Violation::NonPositiveFMax(inst.f_max));
    }
    let mut seen = HashSet::new();
    for s in &inst.students {
        if !seen.insert(s.id.as_str()) {
            out.push(Violation::DuplicateStudent(s.id.clone()));
        }
        if !(0.0..=inst.f_max).contains(&s.score) {
            out.push(Violation::ScoreOutOfRange {
                student: s.id.clone(),
                score: s.score,
            });
        }
    }
    let mut seen = HashSet::new();
    for c in &inst.colleges {
        if !seen.insert(c.id.as_str()) {
            out.push(Violation::DuplicateCollege(c.id.clone()));
        }
        if c.quota == 0 {
            out.push(Violation::ZeroQuota(c.id.clone()));
        }
        if !(0.0..=1.0).contains(&c.alpha) {
            out.push(Violation::AlphaOutOfRange {
                college: c.id.clone(),
                alpha: c.alpha,
            });
        }
        if let Some(rank) = c.bonus.first_violation() {
            out.push(Violation::BonusNotDecreasing {
                college: c.id.clone(),
                rank,
            });
        }
    }
    if prefs.len() != inst.students.len() {
        out.push(Violation::PrefsCount {
            prefs: prefs.len(),
            students: inst.students.len(),
        });
    }
    for (s, list) in inst.students.iter().zip(prefs) {
        if let Some(dup) = first_duplicate(list.as_slice()) {
            out.push(Violation::DuplicateInPrefs {
                student: s.id.clone(),
                college: college_label(inst, dup),
            });
        }
        for (pos, c) in list.iter().enumerate() {
            match inst.colleges.get(c.index()) {
                None => out.push(Violation::UnknownCollege {
                    student: s.id.clone(),
                    college: c.to_string(),
                }),
                Some(college) if pos + 1 > college.bonus.domain() => out.push(Violation::BonusTooShort {
                    college: college.id.clone(),
                    student: s.id.clone(),
                    rank: pos + 1,
                }),
                Some(_) => {}
            }
        }
    }
    out
}

fn college_label(inst: &Instance, c: CollegeId) -> String {
    inst.colleges
        .get(c.index())
        .map_or_else(|| c.to_string(), |x| x.id.clone())
}

/// Assignment of students to colleges; `None` is the unmatched sentinel.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<Option<CollegeId>>,
}

impl Matching {
    pub fn unmatched(n_students: usize) -> Self {
        Matching {
            assignment: vec![None; n_students],
        }
    }

    pub fn from_assignment(assignment: Vec<Option<CollegeId>>) -> Self {
        Matching { assignment }
    }

    pub fn n_students(&self) -> usize {
        self.assignment.len()
    }

    pub fn college_of(&self, s: StudentId) -> Option<CollegeId> {
        self.assignment[s.index()]
    }

    pub fn assign(&mut self, s: StudentId, c: Option<CollegeId>) {
        self.assignment[s.index()] = c;
    }

    pub fn assignment(&self) -> &[Option<CollegeId>] {
        &self.assignment
    }

    /// Students assigned to `c`, ascending by index.
    pub fn students_of(&self, c: CollegeId) -> Vec<StudentId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Some(c))
            .map(|(s, _)| StudentId(s))
            .collect()
    }

    pub fn load(&self, n_colleges: usize) -> Vec<usize> {
        let mut load = vec![0; n_colleges];
        for c in self.assignment.iter().flatten() {
            load[c.index()] += 1;
        }
        load
    }

    pub fn respects_quotas(&self, quotas: &[usize]) -> bool {
        self.assignment.iter().flatten().all(|c| c.index() < quotas.len())
            && self.load(quotas.len()).iter().zip(quotas).all(|(l, q)| l <= q)
    }
}

/// Both sides' submitted lists plus capacities: everything the matching
/// phase sees once merit scores have been turned into orderings.
#[derive(Clone, Debug, PartialEq)]
pub struct Market {
    pub student_prefs: Vec<PreferenceList<CollegeId>>,
    pub college_prefs: Vec<PreferenceList<StudentId>>,
    pub quotas: Vec<usize>,
}

impl Market {
    pub fn n_students(&self) -> usize {
        self.student_prefs.len()
    }

    pub fn n_colleges(&self) -> usize {
        self.college_prefs.len()
    }

    /// `table[c][s]` is the 0-based position of `s` in `c`'s list.
    pub fn college_positions(&self) -> Vec<Vec<Option<usize>>> {
        self.college_prefs
            .iter()
            .map(|list| {
                let mut pos = vec![None; self.n_students()];
                for (i, s) in list.iter().enumerate() {
                    pos[s.index()] = Some(i);
                }
                pos
            })
            .collect()
    }

    /// Both agents list each other.
    pub fn mutually_acceptable(&self, s: StudentId, c: CollegeId) -> bool {
        self.student_prefs[s.index()].contains(c) && self.college_prefs[c.index()].contains(s)
    }

    /// Feasible and individually rational.
    pub fn admits(&self, m: &Matching) -> bool {
        m.n_students() == self.n_students()
            && m.respects_quotas(&self.quotas)
            && (0..m.n_students()).all(|s| {
                m.college_of(StudentId(s))
                    .is_none_or(|c| self.mutually_acceptable(StudentId(s), c))
            })
    }
}
