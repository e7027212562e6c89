//! Strategic behaviour on both sides of the market.
//!
//! Students: the score-rank-indexed misreport table used in the correlated
//! preference experiments, its general `c2 > ... > cm > c1` form, and the
//! two-student construction that shows the mechanism is manipulable whenever
//! some college has a positive reciprocating factor.
//!
//! Colleges: dropping strategies, the rejection-chain procedure, and an
//! exhaustive audit that reruns the mechanism under every dropping strategy.

use std::io::Write;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::matching::{deferred_acceptance, reciprocating_market, MechanismConfig};
use crate::model::{BonusFunction, College, CollegeId, Instance, Market, Matching, PreferenceList, Student, StudentId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudentStrategy {
    Truthful,
    /// The five-college misreport table, keyed by the student's score rank.
    StrategyS,
    /// Shield the favourite: `c2 > c3 > ... > cm > c1`.
    ShieldFavourite,
    Custom(PreferenceList<CollegeId>),
}

impl StudentStrategy {
    /// The list a student with `true_pref` and 1-based `score_rank` submits.
    pub fn report(
        &self,
        true_pref: &PreferenceList<CollegeId>,
        score_rank: usize,
    ) -> Result<PreferenceList<CollegeId>> {
        match self {
            StudentStrategy::Truthful => Ok(true_pref.clone()),
            StudentStrategy::StrategyS => strategy_s(true_pref, score_rank),
            StudentStrategy::ShieldFavourite => Ok(shield_favourite(true_pref)),
            StudentStrategy::Custom(list) => Ok(list.clone()),
        }
    }
}

/// Strategy S. Positions refer to the student's true list `t1 > ... > t5`:
///
/// | score rank | submitted                |
/// |------------|--------------------------|
/// | 1          | t1 > t2 > t3 > t4 > t5   |
/// | 2          | t2 > t3 > t4 > t5 > t1   |
/// | 3          | t3 > t2 > t4 > t5 > t1   |
/// | 4          | t4 > t2 > t3 > t5 > t1   |
/// | 5 or worse | t5 > t2 > t3 > t4 > t1   |
pub fn strategy_s(true_pref: &PreferenceList<CollegeId>, score_rank: usize) -> Result<PreferenceList<CollegeId>> {
    if true_pref.len() != 5 {
        return Err(MatchError::StrategyArity(true_pref.len()));
    }
    let t = true_pref.as_slice();
    let order: [usize; 5] = match score_rank {
        0 | 1 => [0, 1, 2, 3, 4],
        2 => [1, 2, 3, 4, 0],
        3 => [2, 1, 3, 4, 0],
        4 => [3, 1, 2, 4, 0],
        _ => [4, 1, 2, 3, 0],
    };
    Ok(order.iter().map(|&i| t[i]).collect())
}

/// Moves the favourite college to the end of the list.
pub fn shield_favourite(true_pref: &PreferenceList<CollegeId>) -> PreferenceList<CollegeId> {
    let t = true_pref.as_slice();
    match t.split_first() {
        Some((first, rest)) => rest.iter().copied().chain(std::iter::once(*first)).collect(),
        None => PreferenceList::default(),
    }
}

/// Largest score gap `f(s1) - f(s2)` for which a college with reciprocating
/// factor `epsilon` ranks a student listing it first above a stronger student
/// listing it second: `epsilon / (1 - epsilon) * (h(1) - h(2))`.
pub fn deviation_threshold(epsilon: f64, bonus: &BonusFunction) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MatchError::EpsilonOutOfRange(epsilon));
    }
    Ok(epsilon / (1.0 - epsilon) * (bonus.get(1)? - bonus.get(2)?))
}

/// The three-student market behind [`deviation_threshold`].
///
/// `top` (α = 0, quota 1) is everyone's target but is taken by a stronger
/// student; `c` (α = `epsilon`, quota 1) is `s1`'s second choice and `s2`'s
/// first. Student indices: 0 = the strong student, 1 = `s1`, 2 = `s2`.
pub fn deviation_market(epsilon: f64, score_s1: f64, score_s2: f64, bonus: BonusFunction) -> Instance {
    let top = CollegeId(0);
    let c = CollegeId(1);
    let student = |id: &str, score| Student { id: id.into(), score };
    Instance {
        f_max: 100.0,
        students: vec![student("s0", 100.0), student("s1", score_s1), student("s2", score_s2)],
        colleges: vec![
            College {
                id: "top".into(),
                quota: 1,
                alpha: 0.0,
                bonus: bonus.clone(),
            },
            College {
                id: "c".into(),
                quota: 1,
                alpha: epsilon,
                bonus,
            },
        ],
        student_prefs: vec![
            PreferenceList::new(vec![top, c]),
            PreferenceList::new(vec![top, c]),
            PreferenceList::new(vec![c, top]),
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeviationOutcome {
    /// `s1`'s true-list rank of its assignment when truthful (`None` = unmatched).
    pub truthful_rank: Option<usize>,
    /// Same, after `s1` swaps `c` to the top of its list.
    pub deviating_rank: Option<usize>,
}

impl DeviationOutcome {
    pub fn deviation_pays(&self) -> bool {
        match (self.deviating_rank, self.truthful_rank) {
            (Some(d), Some(t)) => d < t,
            (Some(_), None) => true,
            _ => false,
        }
    }
}

/// Runs [`deviation_market`] with `s1` truthful and with `s1` listing `c`
/// first.
pub fn deviation_witness(
    epsilon: f64,
    score_s1: f64,
    score_s2: f64,
    bonus: BonusFunction,
    config: &MechanismConfig,
) -> Result<DeviationOutcome> {
    let inst = deviation_market(epsilon, score_s1, score_s2, bonus);
    let s1 = StudentId(1);
    let true_list = inst.student_prefs[1].clone();
    let rank = |m: &Matching| m.college_of(s1).and_then(|c| true_list.rank_of(c));

    let truthful = crate::matching::generalized_match(&inst, &inst.student_prefs, config)?;
    let mut submitted = inst.student_prefs.clone();
    submitted[1].swap_ranks(1, 2);
    let deviating = crate::matching::generalized_match(&inst, &submitted, config)?;
    Ok(DeviationOutcome {
        truthful_rank: rank(&truthful),
        deviating_rank: rank(&deviating),
    })
}

/// A college report obtained by deleting students from its true list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DroppingStrategy {
    pub base: PreferenceList<StudentId>,
    pub dropped: Vec<StudentId>,
}

impl DroppingStrategy {
    pub fn report(&self) -> PreferenceList<StudentId> {
        self.base.iter().filter(|s| !self.dropped.contains(s)).collect()
    }
}

/// Every dropping strategy removing at most `max_drop` students, smallest
/// first; the truthful report (nothing dropped) comes first.
pub fn dropping_strategies(
    base: &PreferenceList<StudentId>,
    max_drop: usize,
) -> impl Iterator<Item = DroppingStrategy> + '_ {
    let max_drop = max_drop.min(base.len());
    (0..=max_drop).flat_map(move |k| {
        base.iter().combinations(k).map(move |dropped| DroppingStrategy {
            base: base.clone(),
            dropped,
        })
    })
}

/// Responsive comparison of two sets of students under `pref`: `a` is weakly
/// better iff it is at least as large and its i-th best member is at least
/// as good as `b`'s i-th best, for every i.
pub fn weakly_prefers(pref: &PreferenceList<StudentId>, a: &[StudentId], b: &[StudentId]) -> bool {
    let sorted = |set: &[StudentId]| -> Vec<usize> {
        set.iter()
            .map(|&s| pref.rank_of(s).unwrap_or(usize::MAX))
            .sorted()
            .collect()
    };
    let (ra, rb) = (sorted(a), sorted(b));
    ra.len() >= rb.len() && ra.iter().zip(&rb).all(|(x, y)| x <= y)
}

pub fn strictly_prefers(pref: &PreferenceList<StudentId>, a: &[StudentId], b: &[StudentId]) -> bool {
    weakly_prefers(pref, a, b) && !weakly_prefers(pref, b, a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectionChainOutcome {
    /// A displaced student applied to the dropping college.
    pub returns_to_c: bool,
    /// The dropping college's holdings when the procedure stopped.
    pub final_assignment_of_c: Vec<StudentId>,
    /// Student peeled off the rejected set in the last iteration.
    pub last_dropped: Option<StudentId>,
    /// Student whose application triggered the return.
    pub returning: Option<StudentId>,
}

/// Rejection chains.
///
/// Starting from the deferred-acceptance outcome `mu`, college `c` rejects
/// the students in `rejected`. They are released one at a time, least
/// preferred first, and each release runs the usual application / rejection
/// cascade. Stops with `returns_to_c = true` as soon as any displaced student
/// is about to apply to `c`.
pub fn rejection_chains(
    market: &Market,
    mu: &Matching,
    c: CollegeId,
    rejected: &[StudentId],
) -> Result<RejectionChainOutcome> {
    if rejected.is_empty() {
        return Err(MatchError::EmptyRejectedSet);
    }
    if rejected.iter().any(|&s| mu.college_of(s) != Some(c)) {
        return Err(MatchError::NotInAssignment);
    }
    let positions = market.college_positions();
    let mut held: Vec<Vec<StudentId>> = (0..market.n_colleges()).map(|k| mu.students_of(CollegeId(k))).collect();
    held[c.index()].retain(|s| !rejected.contains(s));

    // Every student has applied to everything up to their current match, or
    // to their whole list if unmatched.
    let mut next: Vec<usize> = (0..market.n_students())
        .map(|s| {
            let prefs = &market.student_prefs[s];
            mu.college_of(StudentId(s))
                .and_then(|k| prefs.rank_of(k))
                .unwrap_or(prefs.len())
        })
        .collect();

    let c_pos = &positions[c.index()];
    let mut pending: Vec<StudentId> = rejected.to_vec();
    pending.sort_by_key(|s| c_pos[s.index()]);

    while let Some(dropped) = pending.pop() {
        let mut s = dropped;
        'cascade: loop {
            let Some(target) = market.student_prefs[s.index()].at_rank(next[s.index()] + 1) else {
                break 'cascade;
            };
            next[s.index()] += 1;
            if target == c {
                return Ok(RejectionChainOutcome {
                    returns_to_c: true,
                    final_assignment_of_c: held[c.index()].clone(),
                    last_dropped: Some(dropped),
                    returning: Some(s),
                });
            }
            let pos = &positions[target.index()];
            let Some(p) = pos[s.index()] else {
                continue 'cascade;
            };
            let mates = &mut held[target.index()];
            let quota = market.quotas[target.index()];
            if mates.len() < quota {
                mates.push(s);
                break 'cascade;
            }
            let (wi, worst) = mates
                .iter()
                .enumerate()
                .max_by_key(|(_, t)| pos[t.index()])
                .map(|(i, t)| (i, pos[t.index()]))
                .expect("full college holds someone");
            if worst < Some(p) {
                continue 'cascade;
            }
            s = std::mem::replace(&mut mates[wi], s);
        }
    }
    let mut final_c = held[c.index()].clone();
    final_c.sort();
    Ok(RejectionChainOutcome {
        returns_to_c: false,
        final_assignment_of_c: final_c,
        last_dropped: None,
        returning: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub strategy_id: usize,
    pub dropped: Vec<StudentId>,
    pub assignment: Vec<StudentId>,
    pub improved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub college: CollegeId,
    pub true_preference: PreferenceList<StudentId>,
    pub truthful_assignment: Vec<StudentId>,
    /// Best assignment found under the true preference (truthful on ties).
    pub best_assignment: Vec<StudentId>,
    pub best_strategy: usize,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn profitable(&self) -> bool {
        self.rows.iter().any(|r| r.improved)
    }
}

/// Reruns the mechanism with college `c` reporting every dropping strategy of
/// its true reciprocating preference and compares the outcomes it gets.
pub fn college_manipulation_audit(
    instance: &Instance,
    submitted: &[PreferenceList<CollegeId>],
    config: &MechanismConfig,
    c: CollegeId,
    max_drop: usize,
) -> Result<AuditReport> {
    instance.check()?;
    instance.check_submitted(submitted)?;
    let market = reciprocating_market(instance, submitted, config)?;
    audit_market(&market, c, max_drop)
}

/// [`college_manipulation_audit`] on an already-built market.
pub fn audit_market(market: &Market, c: CollegeId, max_drop: usize) -> Result<AuditReport> {
    let true_pref = market.college_prefs[c.index()].clone();
    let truthful = deferred_acceptance(market).students_of(c);
    let mut rows = Vec::new();
    let mut best = truthful.clone();
    let mut best_strategy = 0;
    let mut scratch = market.clone();
    for (id, strategy) in dropping_strategies(&true_pref, max_drop).enumerate() {
        scratch.college_prefs[c.index()] = strategy.report();
        let got = deferred_acceptance(&scratch).students_of(c);
        let improved = strictly_prefers(&true_pref, &got, &truthful);
        if strictly_prefers(&true_pref, &got, &best) {
            best = got.clone();
            best_strategy = id;
        }
        rows.push(AuditRow {
            strategy_id: id,
            dropped: strategy.dropped,
            assignment: got,
            improved,
        });
    }
    Ok(AuditReport {
        college: c,
        true_preference: true_pref,
        truthful_assignment: truthful,
        best_assignment: best,
        best_strategy,
        rows,
    })
}

/// Writes `seed,college,strategy_id,dropped_count,improved` rows.
pub fn write_audit_csv<W: Write>(reports: &[(u64, &str, &AuditReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "college", "strategy_id", "dropped_count", "improved"])?;
    for (seed, college, report) in reports {
        for row in &report.rows {
            w.write_record([
                seed.to_string(),
                college.to_string(),
                row.strategy_id.to_string(),
                row.dropped.len().to_string(),
                row.improved.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| MatchError::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::Mode;

    fn five() -> PreferenceList<CollegeId> {
        (0..5).map(CollegeId).collect()
    }

    fn idx(l: &PreferenceList<CollegeId>) -> Vec<usize> {
        l.iter().map(|c| c.index()).collect()
    }

    #[test]
    fn strategy_table() {
        assert_eq!(idx(&strategy_s(&five(), 1).unwrap()), vec![0, 1, 2, 3, 4]);
        assert_eq!(idx(&strategy_s(&five(), 2).unwrap()), vec![1, 2, 3, 4, 0]);
        assert_eq!(idx(&strategy_s(&five(), 3).unwrap()), vec![2, 1, 3, 4, 0]);
        assert_eq!(idx(&strategy_s(&five(), 4).unwrap()), vec![3, 1, 2, 4, 0]);
        assert_eq!(idx(&strategy_s(&five(), 5).unwrap()), vec![4, 1, 2, 3, 0]);
        assert_eq!(idx(&strategy_s(&five(), 9).unwrap()), vec![4, 1, 2, 3, 0]);
        let four: PreferenceList<CollegeId> = (0..4).map(CollegeId).collect();
        assert!(matches!(strategy_s(&four, 2), Err(MatchError::StrategyArity(4))));
    }

    #[test]
    fn strategy_follows_true_order() {
        let t: PreferenceList<CollegeId> = [3, 0, 4, 1, 2].into_iter().map(CollegeId).collect();
        assert_eq!(idx(&strategy_s(&t, 3).unwrap()), vec![4, 0, 1, 2, 3]);
        assert_eq!(idx(&shield_favourite(&t)), vec![0, 4, 1, 2, 3]);
    }

    #[test]
    fn thresholds() {
        let h = BonusFunction::per_rank(vec![100.0, 90.0]).unwrap();
        assert!((deviation_threshold(0.5, &h).unwrap() - 10.0).abs() < 1e-12);
        assert!((deviation_threshold(0.9, &h).unwrap() - 90.0).abs() < 1e-9);
        assert!(deviation_threshold(1e-9, &h).unwrap() < 1e-7);
        assert!(deviation_threshold(0.0, &h).is_err());
        assert!(deviation_threshold(1.0, &h).is_err());
    }

    #[test]
    fn appendix_construction() {
        let h = BonusFunction::per_rank(vec![100.0, 90.0]).unwrap();
        let cfg = MechanismConfig::new(Mode::Generalized, 0);
        // delta = 10 at epsilon = 0.5; gap 5 < delta
        let out = deviation_witness(0.5, 95.0, 90.0, h.clone(), &cfg).unwrap();
        assert_eq!(out.truthful_rank, None);
        assert_eq!(out.deviating_rank, Some(2));
        assert!(out.deviation_pays());
        // gap 20 > delta: truthful already wins c
        let out = deviation_witness(0.5, 95.0, 75.0, h, &cfg).unwrap();
        assert_eq!(out.truthful_rank, Some(2));
        assert!(!out.deviation_pays());
    }

    #[test]
    fn dropping_powerset() {
        let base: PreferenceList<StudentId> = (0..2).map(StudentId).collect();
        let all: Vec<_> = dropping_strategies(&base, 2).map(|d| d.dropped).collect();
        assert_eq!(
            all,
            vec![
                vec![],
                vec![StudentId(0)],
                vec![StudentId(1)],
                vec![StudentId(0), StudentId(1)]
            ]
        );
        let base: PreferenceList<StudentId> = (0..6).map(StudentId).collect();
        assert_eq!(dropping_strategies(&base, 6).count(), 64);
        assert_eq!(dropping_strategies(&base, 1).count(), 7);
        for d in dropping_strategies(&base, 6) {
            let r = d.report();
            assert!(r.as_slice().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn responsive_set_comparison() {
        let p: PreferenceList<StudentId> = (0..4).map(StudentId).collect();
        let s = |v: &[usize]| v.iter().map(|&i| StudentId(i)).collect::<Vec<_>>();
        assert!(strictly_prefers(&p, &s(&[0]), &s(&[1])));
        assert!(strictly_prefers(&p, &s(&[1, 3]), &s(&[2])));
        assert!(!weakly_prefers(&p, &s(&[]), &s(&[3])));
        assert!(weakly_prefers(&p, &s(&[2]), &s(&[2])));
        // incomparable
        assert!(!weakly_prefers(&p, &s(&[0, 3]), &s(&[1, 2])) || !weakly_prefers(&p, &s(&[1, 2]), &s(&[0, 3])));
    }

    fn market(students: &[&[usize]], colleges: &[&[usize]], quotas: &[usize]) -> Market {
        Market {
            student_prefs: students
                .iter()
                .map(|l| l.iter().map(|&c| CollegeId(c)).collect())
                .collect(),
            college_prefs: colleges
                .iter()
                .map(|l| l.iter().map(|&s| StudentId(s)).collect())
                .collect(),
            quotas: quotas.to_vec(),
        }
    }

    #[test]
    fn chain_that_leaves_c() {
        // s0 holds c0; after release it goes to c1 (vacant) and stops.
        let mk = market(&[&[0, 1], &[2]], &[&[0], &[0], &[1]], &[1, 1, 1]);
        let mu = deferred_acceptance(&mk);
        let out = rejection_chains(&mk, &mu, CollegeId(0), &[StudentId(0)]).unwrap();
        assert!(!out.returns_to_c);
        assert!(out.final_assignment_of_c.is_empty());
    }

    #[test]
    fn chain_that_returns() {
        // s0: c0 > c1, s1: c1 > c0; c0 prefers s1, c1 prefers s0.
        // Releasing s0 from c0 displaces s1 at c1, whose next choice is c0.
        let mk = market(&[&[0, 1], &[1, 0]], &[&[1, 0], &[0, 1]], &[1, 1]);
        let mu = deferred_acceptance(&mk);
        assert_eq!(mu.college_of(StudentId(0)), Some(CollegeId(0)));
        let out = rejection_chains(&mk, &mu, CollegeId(0), &[StudentId(0)]).unwrap();
        assert!(out.returns_to_c);
        assert_eq!(out.last_dropped, Some(StudentId(0)));
        assert_eq!(out.returning, Some(StudentId(1)));
        // and the matching audit agrees that dropping pays here
        let report = audit_market(&mk, CollegeId(0), 2).unwrap();
        assert!(report.profitable());
        assert_eq!(report.best_assignment, vec![StudentId(1)]);
    }

    #[test]
    fn chain_preconditions() {
        let mk = market(&[&[0], &[0]], &[&[0, 1]], &[1]);
        let mu = deferred_acceptance(&mk);
        assert!(matches!(
            rejection_chains(&mk, &mu, CollegeId(0), &[StudentId(1)]),
            Err(MatchError::NotInAssignment)
        ));
        assert!(matches!(
            rejection_chains(&mk, &mu, CollegeId(0), &[]),
            Err(MatchError::EmptyRejectedSet)
        ));
    }

    #[test]
    fn dropping_whole_assignment_never_helps() {
        let mk = market(&[&[0, 1], &[0, 1], &[1, 0]], &[&[0, 1, 2], &[2, 1, 0]], &[2, 1]);
        let report = audit_market(&mk, CollegeId(0), 3).unwrap();
        let everything = report
            .rows
            .iter()
            .find(|r| {
                r.dropped.len() == report.truthful_assignment.len()
                    && report.truthful_assignment.iter().all(|s| r.dropped.contains(s))
            })
            .unwrap();
        assert!(!everything.improved);
    }
}
