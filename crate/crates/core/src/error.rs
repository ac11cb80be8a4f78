use alloc::string::String;

use crate::date::Date;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid date `{0}` (expected YYYY-MM-DD)")]
    InvalidDate(String),

    #[error("no snapshot observed at {0}")]
    UnobservedTime(Date),

    #[error("observation interval {0}..{1} is not increasing")]
    InvalidInterval(Date, Date),

    #[error("history needs at least {0} snapshot(s)")]
    TooFewSnapshots(usize),

    #[error("snapshot dates not strictly increasing: {0} followed by {1}")]
    NonMonotoneDates(Date, Date),

    #[error("empty surface for mention {0}")]
    EmptySurface(String),

    #[error("mention {mention} is claimed by profiles `{first}` and `{second}`")]
    DuplicateMention {
        mention: String,
        first: String,
        second: String,
    },

    #[error("duplicate profile `{0}`")]
    DuplicateProfile(String),

    #[error("duplicate document `{0}`")]
    DuplicateDocument(String),

    #[error("profile `{profile}` references unknown document `{document}`")]
    DanglingDocument { profile: String, document: String },

    #[error("document `{document}` references unknown venue `{venue}`")]
    DanglingVenue { document: String, venue: String },

    #[error("venue `{0}` declared with conflicting names")]
    ConflictingVenue(String),

    #[error("mention {0} points past the end of its document's name list")]
    PositionOutOfRange(String),

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("unknown document `{0}`")]
    UnknownDocument(String),

    #[error("infeasible edit: {0}")]
    InfeasibleEdit(String),

    #[error("infeasible generator plan: {0}")]
    InfeasiblePlan(String),

    #[error("name `{0}` has no usable tokens for a blocking key")]
    EmptyBlockingKey(String),

    #[error("hit rate is undefined for an empty pair list")]
    NoPairs,

    #[error("invalid case graph: {0}")]
    InvalidGraph(String),
}
