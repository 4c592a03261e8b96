//! Learning Horn formulas from implication queries.
//!
//! [`pac_horn_approximation`] is the entry point for datasets and other
//! automatic oracles; [`PacLearner`] is the same learner as a step-by-step
//! state machine for interactive use; [`horn1`] is the exact learner for known
//! Horn targets.

mod config;
mod equivalence;
mod horn1;
mod machine;
mod refine;
mod sampling;

use std::time::Instant;

use thiserror::Error;

use crate::algebra::HornFormula;
use crate::oracle::{CachingOracle, ImplicationOracle, OracleError, QueryCounts};

pub use config::{LearnerConfig, Mode};
pub use equivalence::{
    is_approximately_equivalent, is_strongly_approximately_equivalent, EquivalenceVerdict,
};
pub use horn1::{horn1, horn1_observed};
pub use machine::{
    PacLearner, Progress, Query, QueryKind, QueryOrigin, Reply, RunReport, Termination,
};
pub use refine::{
    refine_negative, refine_positive, try_refine_negative, valid_hypothesis_refine,
    NegativeRefinement,
};
pub use sampling::{random_subset, sample_count};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "sample count for round {i} at epsilon {epsilon}, delta {delta} does not fit in 64 bits"
    )]
    SampleCountOverflow { epsilon: f64, delta: f64, i: u64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("no query is pending")]
    NoPendingQuery,
    #[error("a full query needs a counterexample when the implication does not hold")]
    MissingCounterexample,
    #[error("the counterexample does not violate the queried implication")]
    InvalidCounterexample,
    #[error("gave up after {0} counterexamples")]
    CounterexampleCap(u64),
}

fn counts_since(now: QueryCounts, before: QueryCounts) -> QueryCounts {
    QueryCounts {
        restricted: now.restricted - before.restricted,
        full: now.full - before.full,
    }
}

/// Learns an approximation of the oracle's Horn envelope.
///
/// Hitting `max_counterexamples` is not an error: the partial hypothesis is
/// returned with `report.terminated == false`.
pub fn pac_horn_approximation<O: ImplicationOracle + ?Sized>(
    oracle: &mut O,
    config: &LearnerConfig,
) -> Result<(HornFormula, RunReport), LearnerError> {
    let start = Instant::now();
    let before = oracle.counts();
    let mut learner = PacLearner::new(oracle.width(), config.clone())?;
    let mut cache_hits = 0;
    if config.caching() {
        let mut cache = CachingOracle::new(
            &mut *oracle,
            config.cache_counterexamples,
            config.cache_confirmed,
        );
        learner.run(&mut cache)?;
        cache_hits = cache.hits();
    } else {
        learner.run(oracle)?;
    }
    let mut report = learner.report();
    report.oracle_queries = counts_since(oracle.counts(), before);
    report.cache_hits = cache_hits;
    report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok((learner.into_hypothesis(), report))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{AssignmentFamily, Implication};
    use crate::bitset::AttributeSet;
    use crate::oracle::DatasetOracle;

    #[test]
    fn empty_row_only_forbids_every_attribute() {
        let v = Arc::new(AssignmentFamily::from_bits(2, &[0]));
        for seed in 0..10 {
            let mut o = DatasetOracle::new(v.clone());
            let config = LearnerConfig::new(0.01, 0.1).with_seed(seed);
            let (h, report) = pac_horn_approximation(&mut o, &config).unwrap();
            assert!(report.terminated);
            for a in 0..2 {
                let imp = Implication::to_bottom(AttributeSet::from_indices(2, [a]));
                assert!(crate::algebra::entails(&h, &imp).unwrap());
            }
        }
    }

    #[test]
    fn caching_saves_queries_without_changing_the_result() {
        let rows = [0b00111, 0b01101, 0b11000, 0b00001, 0b10110, 0b00110];
        let v = Arc::new(AssignmentFamily::from_bits(5, &rows));
        let plain = LearnerConfig::new(0.05, 0.1).with_seed(8);
        let mut cached = plain.clone();
        cached.cache_counterexamples = true;
        cached.cache_confirmed = true;
        let (h1, r1) = pac_horn_approximation(&mut DatasetOracle::new(v.clone()), &plain).unwrap();
        let (h2, r2) = pac_horn_approximation(&mut DatasetOracle::new(v.clone()), &cached).unwrap();
        assert_eq!(r1.oracle_queries, r1.queries);
        assert!(r2.oracle_queries.total() + r2.cache_hits >= r2.queries.total());
        assert!(r2.oracle_queries.total() < r1.oracle_queries.total());
        // restricted answers are the same either way
        assert_eq!(h1, h2);
    }
}
