//! Instance and matching files.
//!
//! Instances are TOML documents:
//!
//! ```toml
//! f_max = 100.0
//!
//! [[students]]
//! id = "s1"
//! score = 95.0
//!
//! [[colleges]]
//! id = "c1"
//! quota = 1
//! alpha = 0.5
//! bonus = [[1, 100.0], [2, 90.0]]
//!
//! [prefs]
//! s1 = ["c1"]
//! ```
//!
//! A banded bonus replaces `bonus` with
//! `bands = [{ label = "A", first = 1, last = 3, value = 100.0 }, ...]`.
//! Matchings are `student_id,college_id` lines in student order, with `-`
//! for an unmatched student.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};
use crate::model::{
    Band, BandTable, BonusFunction, College, CollegeId, Instance, Matching, PreferenceList, Student, StudentId,
    Violation, DEFAULT_F_MAX,
};

pub const UNMATCHED: &str = "-";

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(default = "default_f_max")]
    f_max: f64,
    #[serde(default)]
    students: Vec<StudentDoc>,
    #[serde(default)]
    colleges: Vec<CollegeDoc>,
    #[serde(default)]
    prefs: BTreeMap<String, Vec<String>>,
}

fn default_f_max() -> f64 {
    DEFAULT_F_MAX
}

#[derive(Debug, Serialize, Deserialize)]
struct StudentDoc {
    id: String,
    score: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CollegeDoc {
    id: String,
    quota: usize,
    alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bonus: Option<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bands: Option<Vec<BandDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BandDoc {
    label: String,
    first: usize,
    last: usize,
    value: f64,
}

fn bonus_from_doc(doc: &CollegeDoc) -> Result<BonusFunction> {
    match (&doc.bonus, &doc.bands) {
        (Some(pairs), None) => {
            for (i, (rank, _)) in pairs.iter().enumerate() {
                if *rank != i + 1 {
                    return Err(MatchError::Parse(format!(
                        "college `{}`: bonus ranks must be 1, 2, 3, ... in order (found {rank} at position {})",
                        doc.id,
                        i + 1
                    )));
                }
            }
            // Ordering violations are reported by validation, not here.
            Ok(BonusFunction::PerRank(pairs.iter().map(|p| p.1).collect()))
        }
        (None, Some(bands)) => Ok(BonusFunction::Banded {
            bands: BandTable {
                bands: bands
                    .iter()
                    .map(|b| Band {
                        label: b.label.clone(),
                        first: b.first,
                        last: b.last,
                    })
                    .collect(),
            },
            values: bands.iter().map(|b| b.value).collect(),
        }),
        _ => Err(MatchError::Parse(format!(
            "college `{}` needs exactly one of `bonus` or `bands`",
            doc.id
        ))),
    }
}

fn college_doc(c: &College) -> CollegeDoc {
    let (bonus, bands) = match &c.bonus {
        BonusFunction::PerRank(v) => (Some(v.iter().enumerate().map(|(i, &x)| (i + 1, x)).collect()), None),
        BonusFunction::Banded { bands, values } => (
            None,
            Some(
                bands
                    .bands
                    .iter()
                    .zip(values)
                    .map(|(b, &value)| BandDoc {
                        label: b.label.clone(),
                        first: b.first,
                        last: b.last,
                        value,
                    })
                    .collect(),
            ),
        ),
    };
    CollegeDoc {
        id: c.id.clone(),
        quota: c.quota,
        alpha: c.alpha,
        bonus,
        bands,
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = toml::from_str(text).map_err(|e| MatchError::Parse(e.to_string()))?;
    let colleges = doc
        .colleges
        .iter()
        .map(|c| {
            Ok(College {
                id: c.id.clone(),
                quota: c.quota,
                alpha: c.alpha,
                bonus: bonus_from_doc(c)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let students: Vec<Student> = doc
        .students
        .iter()
        .map(|s| Student {
            id: s.id.clone(),
            score: s.score,
        })
        .collect();

    let mut violations = Vec::new();
    for key in doc.prefs.keys() {
        if !students.iter().any(|s| &s.id == key) {
            violations.push(Violation::UnknownStudent(key.clone()));
        }
    }
    let student_prefs = students
        .iter()
        .map(|s| {
            doc.prefs
                .get(&s.id)
                .map(|names| {
                    names
                        .iter()
                        .filter_map(|name| match colleges.iter().position(|c| &c.id == name) {
                            Some(i) => Some(CollegeId(i)),
                            None => {
                                violations.push(Violation::UnknownCollege {
                                    student: s.id.clone(),
                                    college: name.clone(),
                                });
                                None
                            }
                        })
                        .collect::<PreferenceList<_>>()
                })
                .unwrap_or_default()
        })
        .collect();

    let instance = Instance {
        f_max: doc.f_max,
        students,
        colleges,
        student_prefs,
    };
    violations.extend(instance.validate());
    if violations.is_empty() {
        Ok(instance)
    } else {
        Err(MatchError::Invalid(violations))
    }
}

/// Canonical text form of an instance.
pub fn instance_to_toml(instance: &Instance) -> String {
    let doc = InstanceDoc {
        f_max: instance.f_max,
        students: instance
            .students
            .iter()
            .map(|s| StudentDoc {
                id: s.id.clone(),
                score: s.score,
            })
            .collect(),
        colleges: instance.colleges.iter().map(college_doc).collect(),
        prefs: instance
            .students
            .iter()
            .zip(&instance.student_prefs)
            .map(|(s, list)| {
                (
                    s.id.clone(),
                    list.iter().map(|c| instance.colleges[c.index()].id.clone()).collect(),
                )
            })
            .collect(),
    };
    toml::to_string(&doc).expect("instance documents always serialize")
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| MatchError::io(path, e))?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    std::fs::write(path, instance_to_toml(instance)).map_err(|e| MatchError::io(path, e))
}

/// `student_id,college_id` per line, in student order.
pub fn matching_to_text(matching: &Matching, instance: &Instance) -> String {
    let mut out = String::new();
    for (s, c) in instance.students.iter().zip(matching.assignment()) {
        let college = c.map_or(UNMATCHED, |c| instance.colleges[c.index()].id.as_str());
        let _ = writeln!(out, "{},{}", s.id, college);
    }
    out
}

pub fn parse_matching(text: &str, instance: &Instance) -> Result<Matching> {
    let mut m = Matching::unmatched(instance.n_students());
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (s, c) = line
            .split_once(',')
            .ok_or_else(|| MatchError::Parse(format!("expected `student,college`, got `{line}`")))?;
        let s = instance
            .student_index(s.trim())
            .ok_or_else(|| MatchError::UnknownId(s.trim().to_string()))?;
        let c = match c.trim() {
            UNMATCHED => None,
            name => Some(
                instance
                    .college_index(name)
                    .ok_or_else(|| MatchError::UnknownId(name.to_string()))?,
            ),
        };
        m.assign(s, c);
    }
    Ok(m)
}

/// Display names in index order, for CSV writers.
pub fn student_names(instance: &Instance) -> Vec<String> {
    instance.students.iter().map(|s| s.id.clone()).collect()
}

pub fn college_names(instance: &Instance) -> Vec<String> {
    instance.colleges.iter().map(|c| c.id.clone()).collect()
}

pub fn student_name(instance: &Instance, s: StudentId) -> &str {
    &instance.students[s.index()].id
}
