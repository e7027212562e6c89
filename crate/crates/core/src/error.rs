use std::path::PathBuf;

use crate::model::Violation;

pub type Result<T, E = MatchError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum MatchError {
    #[error("rank {rank} is outside the bonus domain 1..={domain}")]
    RankOutOfDomain { rank: usize, domain: usize },

    #[error("alpha {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("bonus function is not strictly decreasing at rank {0}")]
    BonusNotDecreasing(usize),

    #[error("bad band table: {0}")]
    BadBandTable(String),

    #[error("epsilon {0} is outside the open interval (0, 1)")]
    EpsilonOutOfRange(f64),

    #[error("utility table is increasing at rank {0}")]
    UtilityIncreasing(usize),

    #[error("partner at index {partner} is not ranked by agent {agent}")]
    UnrankedPartner { agent: usize, partner: usize },

    #[error("strategy S needs exactly 5 colleges, got {0}")]
    StrategyArity(usize),

    #[error("enumeration would visit {candidates} assignments, limit is {limit}")]
    EnumerationTooLarge { candidates: u128, limit: u128 },

    #[error("candidate matching is not in the stable set")]
    NotInStableSet,

    #[error("rejected set is not contained in the college's assignment")]
    NotInAssignment,

    #[error("rejected set is empty")]
    EmptyRejectedSet,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("unknown agent id `{0}`")]
    UnknownId(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl MatchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MatchError::Io {
            path: path.into(),
            source,
        }
    }
}
