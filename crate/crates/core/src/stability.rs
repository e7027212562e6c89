//! Stability checks against reciprocating preferences and brute-force
//! oracles for small markets.

use std::io::Write;

use crate::error::{MatchError, Result};
use crate::model::{CollegeId, Market, Matching, StudentId};

/// Largest candidate-assignment count [`enumerate_stable`] will walk.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// A student and a college that both prefer each other to what they hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockingPair {
    pub student: StudentId,
    pub college: CollegeId,
    /// Ranks gained by the student; unmatched counts as one past the list end.
    pub student_gain: usize,
    /// Positions gained by the college over the student it would evict, or
    /// over one past the end of its list when it has a vacancy.
    pub college_gain: usize,
}

/// Every blocking pair of `matching`. Empty iff the matching is stable with
/// respect to `market`'s lists.
pub fn blocking_pairs(matching: &Matching, market: &Market) -> Vec<BlockingPair> {
    let positions = market.college_positions();
    let load = matching.load(market.n_colleges());
    // Worst held position per college.
    let mut worst: Vec<Option<usize>> = vec![None; market.n_colleges()];
    for (s, c) in matching.assignment().iter().enumerate() {
        if let Some(c) = c {
            let p = positions[c.index()][s].unwrap_or(usize::MAX);
            worst[c.index()] = Some(worst[c.index()].map_or(p, |w: usize| w.max(p)));
        }
    }

    let mut out = Vec::new();
    for (s, prefs) in market.student_prefs.iter().enumerate() {
        let current = matching
            .college_of(StudentId(s))
            .and_then(|c| prefs.rank_of(c))
            .unwrap_or(prefs.len() + 1);
        for (i, c) in prefs.iter().enumerate() {
            let rank = i + 1;
            if rank >= current {
                break;
            }
            let Some(pos) = positions[c.index()][s] else {
                continue;
            };
            let college_gain = if load[c.index()] < market.quotas[c.index()] {
                market.college_prefs[c.index()].len() - pos
            } else {
                match worst[c.index()] {
                    Some(w) if w > pos => w.min(market.college_prefs[c.index()].len()) - pos,
                    _ => continue,
                }
            };
            out.push(BlockingPair {
                student: StudentId(s),
                college: c,
                student_gain: current - rank,
                college_gain,
            });
        }
    }
    out
}

/// Feasible, individually rational and free of blocking pairs.
pub fn is_stable(matching: &Matching, market: &Market) -> bool {
    market.admits(matching) && blocking_pairs(matching, market).is_empty()
}

/// All stable matchings, by exhaustive search over assignments of each
/// student to a mutually acceptable college or to nobody.
pub fn enumerate_stable(market: &Market) -> Result<Vec<Matching>> {
    let candidates = (market.n_colleges() as u128 + 1)
        .checked_pow(market.n_students() as u32)
        .unwrap_or(u128::MAX);
    if candidates > ENUMERATION_LIMIT {
        return Err(MatchError::EnumerationTooLarge {
            candidates,
            limit: ENUMERATION_LIMIT,
        });
    }
    let options: Vec<Vec<Option<CollegeId>>> = (0..market.n_students())
        .map(|s| {
            std::iter::once(None)
                .chain(
                    market.student_prefs[s]
                        .iter()
                        .filter(|&c| market.mutually_acceptable(StudentId(s), c))
                        .map(Some),
                )
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut current = Matching::unmatched(market.n_students());
    let mut load = vec![0usize; market.n_colleges()];
    walk(0, market, &options, &mut current, &mut load, &mut out);
    Ok(out)
}

fn walk(
    s: usize,
    market: &Market,
    options: &[Vec<Option<CollegeId>>],
    current: &mut Matching,
    load: &mut [usize],
    out: &mut Vec<Matching>,
) {
    if s == options.len() {
        if blocking_pairs(current, market).is_empty() {
            out.push(current.clone());
        }
        return;
    }
    for &opt in &options[s] {
        if let Some(c) = opt {
            if load[c.index()] == market.quotas[c.index()] {
                continue;
            }
            load[c.index()] += 1;
        }
        current.assign(StudentId(s), opt);
        walk(s + 1, market, options, current, load, out);
        if let Some(c) = opt {
            load[c.index()] -= 1;
        }
    }
    current.assign(StudentId(s), None);
}

/// `true` iff every student weakly prefers `candidate` to every matching in
/// `stable_set`.
pub fn is_student_optimal(candidate: &Matching, stable_set: &[Matching], market: &Market) -> Result<bool> {
    if !stable_set.contains(candidate) {
        return Err(MatchError::NotInStableSet);
    }
    let rank = |m: &Matching, s: usize| {
        let prefs = &market.student_prefs[s];
        m.college_of(StudentId(s))
            .and_then(|c| prefs.rank_of(c))
            .unwrap_or(usize::MAX)
    };
    Ok(stable_set
        .iter()
        .all(|other| (0..market.n_students()).all(|s| rank(candidate, s) <= rank(other, s))))
}

/// Writes `student,college,student_gain,college_gain` rows using the given
/// display names.
pub fn write_blocking_pairs_csv<W: Write>(
    pairs: &[BlockingPair],
    student_names: &[String],
    college_names: &[String],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["student", "college", "student_gain", "college_gain"])?;
    for p in pairs {
        w.write_record([
            student_names[p.student.index()].as_str(),
            college_names[p.college.index()].as_str(),
            &p.student_gain.to_string(),
            &p.college_gain.to_string(),
        ])?;
    }
    w.flush().map_err(|e| MatchError::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::deferred_acceptance;

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

    fn assign(v: &[Option<usize>]) -> Matching {
        Matching::from_assignment(v.iter().map(|c| c.map(CollegeId)).collect())
    }

    fn instance_one() -> Market {
        market(&[&[0, 1], &[0, 1], &[0, 1]], &[&[0, 1, 2], &[0, 1, 2]], &[1, 1])
    }

    #[test]
    fn deferred_acceptance_output_is_stable() {
        let mk = instance_one();
        let da = deferred_acceptance(&mk);
        assert!(blocking_pairs(&da, &mk).is_empty());
        assert!(is_stable(&da, &mk));
    }

    #[test]
    fn swapped_assignment_blocks() {
        let mk = instance_one();
        let swapped = assign(&[Some(1), Some(0), None]);
        let pairs = blocking_pairs(&swapped, &mk);
        assert_eq!(
            pairs,
            vec![BlockingPair {
                student: StudentId(0),
                college: CollegeId(0),
                student_gain: 1,
                college_gain: 1,
            }]
        );
    }

    #[test]
    fn vacancy_blocks_with_unmatched_student() {
        let mk = market(&[&[0]], &[&[0]], &[1]);
        let pairs = blocking_pairs(&assign(&[None]), &mk);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].student_gain, 1);
        assert_eq!(pairs[0].college_gain, 1);
    }

    #[test]
    fn stable_set_of_instance_one() {
        let mk = instance_one();
        let set = enumerate_stable(&mk).unwrap();
        assert_eq!(set, vec![assign(&[Some(0), Some(1), None])]);
        assert!(is_student_optimal(&set[0], &set, &mk).unwrap());
    }

    #[test]
    fn single_mutual_pair() {
        let mk = market(&[&[0]], &[&[0]], &[1]);
        assert_eq!(enumerate_stable(&mk).unwrap(), vec![assign(&[Some(0)])]);
    }

    #[test]
    fn unacceptable_student_never_matched() {
        let mk = market(&[&[0, 1], &[0, 1], &[1]], &[&[0, 1], &[1, 0]], &[1, 2]);
        let set = enumerate_stable(&mk).unwrap();
        assert!(!set.is_empty());
        assert!(set.iter().all(|m| m.college_of(StudentId(2)).is_none()));
    }

    #[test]
    fn college_optimal_matching_is_not_student_optimal() {
        // Latin-square market with three stable matchings.
        let mk = market(
            &[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]],
            &[&[1, 2, 0], &[2, 0, 1], &[0, 1, 2]],
            &[1, 1, 1],
        );
        let set = enumerate_stable(&mk).unwrap();
        assert_eq!(set.len(), 3);
        let da = deferred_acceptance(&mk);
        assert!(is_student_optimal(&da, &set, &mk).unwrap());
        let college_opt = assign(&[Some(2), Some(0), Some(1)]);
        assert!(set.contains(&college_opt));
        assert!(!is_student_optimal(&college_opt, &set, &mk).unwrap());
    }

    #[test]
    fn candidate_outside_set_is_an_error() {
        let mk = instance_one();
        let set = enumerate_stable(&mk).unwrap();
        assert!(matches!(
            is_student_optimal(&assign(&[None, None, None]), &set, &mk),
            Err(MatchError::NotInStableSet)
        ));
    }

    #[test]
    fn size_guard() {
        let empty: &[usize] = &[];
        let mk = market(&vec![&[0usize][..]; 24], &[empty], &[1]);
        assert!(matches!(
            enumerate_stable(&mk),
            Err(MatchError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn blocking_pair_csv() {
        let pairs = [BlockingPair {
            student: StudentId(0),
            college: CollegeId(1),
            student_gain: 1,
            college_gain: 2,
        }];
        let mut buf = Vec::new();
        write_blocking_pairs_csv(&pairs, &["a".into()], &["x".into(), "y".into()], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "student,college,student_gain,college_gain\na,y,1,2\n"
        );
    }
}
