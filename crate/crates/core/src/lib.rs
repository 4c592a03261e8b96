pub mod algebra;
pub mod bitset;
mod error;
pub mod eval;
pub mod exact;
pub mod io;
pub mod learner;
pub mod oracle;
pub mod rng;
pub mod universe;

pub use algebra::*;
pub use bitset::AttributeSet;
pub use error::{CoreError, Result};
pub use exact::{brute_force_dg, dg_basis, exact_plain_error, exact_strong_error, ExactError};
pub use learner::{
    pac_horn_approximation, LearnerConfig, LearnerError, Mode, PacLearner, RunReport,
};
pub use oracle::{
    is_member, AnswerCache, CachingOracle, DatasetOracle, ImplicationOracle, OracleAnswer,
    OracleError, QueryCounts, TargetFormulaOracles,
};
pub use universe::AttributeUniverse;
