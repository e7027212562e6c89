//! Two-sided matching with reciprocating preferences.
//!
//! Each college ranks applicants by a merit score that blends the exam score
//! with a bonus for the rank at which the applicant listed the college:
//!
//! ```text
//! merit = (1 - alpha) * score + alpha * h(rank)
//! ```
//!
//! Student-proposing deferred acceptance then runs on those merit-ordered
//! lists. `alpha = 0` everywhere gives the Gale-Shapley student-optimal
//! mechanism; `alpha = 1` gives the Boston mechanism's outcome.
//!
//! ```
//! use recipmatch::{generalized_match, gen_instance, GenConfig, MechanismConfig, Mode};
//!
//! let instance = gen_instance(&GenConfig { seed: 7, ..GenConfig::default() }).unwrap();
//! let m = generalized_match(&instance, &instance.student_prefs, &MechanismConfig::new(Mode::Generalized, 7)).unwrap();
//! assert!(m.respects_quotas(&instance.quotas()));
//! ```

pub mod error;
pub mod harness;
pub mod io;
pub mod marriage;
pub mod matching;
pub mod merit;
pub mod model;
pub mod rng;
pub mod simgen;
pub mod stability;
pub mod strategy;
pub mod welfare;

pub use error::{MatchError, Result};
pub use matching::{boston, deferred_acceptance, generalized_match, reciprocating_market, MechanismConfig, Mode};
pub use merit::{merit_score, reciprocating_preference, reciprocating_preferences, UnlistedPolicy};
pub use model::{
    BandTable, BonusFunction, College, CollegeId, Instance, Market, Matching, PreferenceList, Student, StudentId,
    Violation,
};
pub use simgen::{gen_instance, AlphaDist, GenConfig};
pub use stability::{blocking_pairs, enumerate_stable, is_stable, is_student_optimal, BlockingPair};
pub use welfare::{aggregate, social_welfare, SideKind, UtilityFunction};
