//! The PAC learner as a resumable state machine.
//!
//! [`PacLearner::pending_query`] exposes the single outstanding oracle
//! question; [`PacLearner::feed`] answers it and runs the learner up to its
//! next question or to termination. Driving it against an oracle gives exactly
//! the straight-line algorithm; suspending between calls is what lets a person
//! act as the oracle.

use std::mem;

use serde::{Deserialize, Serialize};

use crate::algebra::{ClosureResult, HornFormula, Implication};
use crate::bitset::AttributeSet;
use crate::oracle::{
    violates, EnvelopeClosureProbe, ImplicationOracle, MembershipProbe, OracleAnswer, Probe,
    QueryCounts,
};
use crate::rng::{session_rng, SessionRng};

use super::refine::next_candidate;
use super::{random_subset, refine_positive, sample_count, LearnerConfig, LearnerError, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    /// Only validity is wanted.
    Restricted,
    /// A counterexample is required when the implication fails.
    Full,
}

/// Why the learner asks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryOrigin {
    /// Part of deciding whether a set is a closed set of the domain.
    Membership,
    /// `X → H(X)` for a sample `X` in strong mode.
    StrongCheck,
    /// Part of computing a domain closure for a new conclusion.
    EnvelopeClosure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Sequence number, starting at 0.
    pub id: u64,
    pub implication: Implication,
    pub kind: QueryKind,
    pub origin: QueryOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Valid,
    /// Not valid, no counterexample given. Only allowed for restricted queries.
    Invalid,
    Counterexample(AttributeSet),
}

impl From<OracleAnswer> for Reply {
    fn from(a: OracleAnswer) -> Self {
        match a {
            OracleAnswer::Valid => Reply::Valid,
            OracleAnswer::Counterexample(c) => Reply::Counterexample(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The last equivalence round found no counterexample.
    Converged,
    CounterexampleCap,
    SampleCountOverflow,
    Aborted(String),
}

/// Position within the current equivalence round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    /// Equivalence round, from 1.
    pub round: u64,
    /// Samples drawn in this round so far.
    pub sample: u64,
    pub budget: u64,
}

/// Summary of a learning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub terminated: bool,
    pub termination: Option<Termination>,
    pub mode: Mode,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub width: usize,
    pub hypothesis_size: usize,
    pub rounds: u64,
    pub samples: u64,
    pub counterexamples: u64,
    pub negative_counterexamples: u64,
    pub positive_counterexamples: u64,
    /// Queries issued by the learner.
    pub queries: QueryCounts,
    /// Queries that reached the underlying oracle, after caching.
    pub oracle_queries: QueryCounts,
    pub cache_hits: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone)]
enum Stage {
    Draw,
    Member {
        x: AttributeSet,
        x_models: bool,
        probe: MembershipProbe,
    },
    Closure {
        x: AttributeSet,
        y: ClosureResult,
    },
    ClosureMember {
        probe: MembershipProbe,
    },
    /// `H(X) = ⊥`: one `Φ → ⊥` query stands in for the membership test.
    BottomMember,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Replace(usize),
    Append,
}

#[derive(Debug, Clone)]
enum Phase {
    Round {
        budget: u64,
        drawn: u64,
        stage: Stage,
    },
    /// Negative refinement: looking for a premise to shrink.
    Scan {
        x: AttributeSet,
        from: usize,
        probe: Option<(usize, MembershipProbe)>,
    },
    /// Valid-hypothesis variant: computing the conclusion to install.
    Install {
        target: Target,
        probe: EnvelopeClosureProbe,
    },
    Done,
}

#[derive(Debug, Clone)]
pub struct PacLearner {
    config: LearnerConfig,
    width: usize,
    hypothesis: HornFormula,
    rng: SessionRng,
    round: u64,
    phase: Phase,
    pending: Option<Query>,
    next_id: u64,
    samples: u64,
    negative: u64,
    positive: u64,
    queries: QueryCounts,
    termination: Option<Termination>,
    last_changed: Vec<usize>,
}

impl PacLearner {
    pub fn new(width: usize, config: LearnerConfig) -> Result<Self, LearnerError> {
        config.validate()?;
        let mut learner = Self {
            rng: session_rng(config.seed),
            config,
            width,
            hypothesis: HornFormula::new(width),
            round: 0,
            phase: Phase::Done,
            pending: None,
            next_id: 0,
            samples: 0,
            negative: 0,
            positive: 0,
            queries: QueryCounts::default(),
            termination: None,
            last_changed: Vec::new(),
        };
        learner.phase = learner.next_round();
        learner.advance();
        Ok(learner)
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn hypothesis(&self) -> &HornFormula {
        &self.hypothesis
    }

    pub fn into_hypothesis(self) -> HornFormula {
        self.hypothesis
    }

    /// The outstanding question, `None` once the learner has stopped.
    pub fn pending_query(&self) -> Option<&Query> {
        self.pending.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.termination.is_some()
    }

    pub fn termination(&self) -> Option<&Termination> {
        self.termination.as_ref()
    }

    /// Positions of the implications touched by the latest refinement.
    pub fn last_changed(&self) -> &[usize] {
        &self.last_changed
    }

    pub fn counterexamples(&self) -> u64 {
        self.negative + self.positive
    }

    pub fn progress(&self) -> Progress {
        let (sample, budget) = match &self.phase {
            Phase::Round { budget, drawn, .. } => (*drawn, *budget),
            _ => (
                0,
                sample_count(self.config.epsilon, self.config.delta, self.round).unwrap_or(0),
            ),
        };
        Progress {
            round: self.round,
            sample,
            budget,
        }
    }

    /// Stops the run; the hypothesis is kept as it is.
    pub fn abort(&mut self, reason: impl Into<String>) {
        if self.termination.is_none() {
            self.pending = None;
            self.phase = Phase::Done;
            self.termination = Some(Termination::Aborted(reason.into()));
        }
    }

    /// Checks `reply` against the pending query without consuming it.
    pub fn check_reply(&self, reply: &Reply) -> Result<(), LearnerError> {
        let query = self.pending.as_ref().ok_or(LearnerError::NoPendingQuery)?;
        match reply {
            Reply::Invalid if query.kind == QueryKind::Full => {
                Err(LearnerError::MissingCounterexample)
            }
            Reply::Counterexample(c) if !violates(c, &query.implication) => {
                Err(LearnerError::InvalidCounterexample)
            }
            _ => Ok(()),
        }
    }

    /// Answers the pending query and runs to the next one.
    pub fn feed(&mut self, reply: Reply) -> Result<(), LearnerError> {
        self.check_reply(&reply)?;
        let query = self.pending.take().expect("checked above");
        match query.kind {
            QueryKind::Restricted => self.queries.restricted += 1,
            QueryKind::Full => self.queries.full += 1,
        }
        let valid = reply == Reply::Valid;

        self.phase = match mem::replace(&mut self.phase, Phase::Done) {
            Phase::Round {
                budget,
                drawn,
                stage,
            } => {
                let keep = |stage| Phase::Round {
                    budget,
                    drawn,
                    stage,
                };
                match stage {
                    Stage::Member {
                        x,
                        x_models,
                        mut probe,
                    } => match probe.feed(valid) {
                        None => keep(Stage::Member { x, x_models, probe }),
                        Some(member) if member != x_models => self.on_counterexample(x),
                        Some(_) => keep(Stage::Draw),
                    },
                    Stage::Closure { y, .. } => match (reply, y) {
                        (Reply::Counterexample(c), _) => self.on_counterexample(c),
                        (_, ClosureResult::Closed(y)) => keep(Stage::ClosureMember {
                            probe: MembershipProbe::new(y),
                        }),
                        (_, ClosureResult::Bottom) => keep(Stage::BottomMember),
                    },
                    Stage::ClosureMember { mut probe } => match probe.feed(valid) {
                        None => keep(Stage::ClosureMember { probe }),
                        Some(false) => {
                            let y = probe.set().clone();
                            self.on_counterexample(y)
                        }
                        Some(true) => keep(Stage::Draw),
                    },
                    Stage::BottomMember if valid => keep(Stage::Draw),
                    Stage::BottomMember => self.on_counterexample(AttributeSet::full(self.width)),
                    Stage::Draw => unreachable!("no query is pending while drawing"),
                }
            }
            Phase::Scan {
                x,
                from,
                probe: Some((pos, mut probe)),
            } => match probe.feed(valid) {
                None => Phase::Scan {
                    x,
                    from,
                    probe: Some((pos, probe)),
                },
                Some(true) => Phase::Scan {
                    x,
                    from: pos + 1,
                    probe: None,
                },
                Some(false) => {
                    let c = probe.set().clone();
                    if self.config.valid_hypothesis {
                        Phase::Install {
                            target: Target::Replace(pos),
                            probe: EnvelopeClosureProbe::new(c),
                        }
                    } else {
                        self.hypothesis.get_mut(pos).premise = c;
                        self.last_changed = vec![pos];
                        self.next_round()
                    }
                }
            },
            Phase::Install { target, mut probe } => match probe.feed(valid) {
                None => Phase::Install { target, probe },
                Some(conclusion) => {
                    let imp = Implication {
                        premise: probe.set().clone(),
                        conclusion,
                    };
                    match target {
                        Target::Replace(pos) => {
                            *self.hypothesis.get_mut(pos) = imp;
                            self.last_changed = vec![pos];
                        }
                        Target::Append => {
                            self.hypothesis.push(imp).expect("same universe");
                            self.last_changed = vec![self.hypothesis.len() - 1];
                        }
                    }
                    self.next_round()
                }
            },
            Phase::Scan { probe: None, .. } | Phase::Done => {
                unreachable!("no query is pending in this phase")
            }
        };
        self.advance();
        Ok(())
    }

    /// Answers queries from `oracle` until the learner stops.
    pub fn run<O: ImplicationOracle + ?Sized>(
        &mut self,
        oracle: &mut O,
    ) -> Result<(), LearnerError> {
        while let Some(query) = &self.pending {
            let reply = match query.kind {
                QueryKind::Restricted => {
                    if oracle.ask_restricted(&query.implication)? {
                        Reply::Valid
                    } else {
                        Reply::Invalid
                    }
                }
                QueryKind::Full => oracle.ask(&query.implication)?.into(),
            };
            self.feed(reply)?;
        }
        Ok(())
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            terminated: self.termination == Some(Termination::Converged),
            termination: self.termination.clone(),
            mode: self.config.mode,
            epsilon: self.config.epsilon,
            delta: self.config.delta,
            seed: self.config.seed,
            width: self.width,
            hypothesis_size: self.hypothesis.len(),
            rounds: self.round,
            samples: self.samples,
            counterexamples: self.counterexamples(),
            negative_counterexamples: self.negative,
            positive_counterexamples: self.positive,
            queries: self.queries,
            oracle_queries: self.queries,
            cache_hits: 0,
            wall_time_ms: None,
        }
    }

    fn issue(&mut self, implication: Implication, kind: QueryKind, origin: QueryOrigin) {
        self.pending = Some(Query {
            id: self.next_id,
            implication,
            kind,
            origin,
        });
        self.next_id += 1;
    }

    fn finish(&mut self, termination: Termination) -> Phase {
        self.termination = Some(termination);
        Phase::Done
    }

    fn next_round(&mut self) -> Phase {
        self.round += 1;
        match sample_count(self.config.epsilon, self.config.delta, self.round) {
            Ok(budget) => Phase::Round {
                budget,
                drawn: 0,
                stage: Stage::Draw,
            },
            Err(_) => self.finish(Termination::SampleCountOverflow),
        }
    }

    fn on_counterexample(&mut self, x: AttributeSet) -> Phase {
        if self
            .config
            .max_counterexamples
            .is_some_and(|cap| self.counterexamples() >= cap)
        {
            return self.finish(Termination::CounterexampleCap);
        }
        if self.hypothesis.is_model(&x) {
            self.negative += 1;
            Phase::Scan {
                x,
                from: 0,
                probe: None,
            }
        } else {
            self.positive += 1;
            self.last_changed = (0..self.hypothesis.len())
                .filter(|&p| !self.hypothesis.as_slice()[p].is_satisfied_by(&x))
                .collect();
            refine_positive(&mut self.hypothesis, &x);
            self.next_round()
        }
    }

    /// Runs internal steps until a query is pending or the run is over.
    fn advance(&mut self) {
        while self.pending.is_none() {
            self.phase = match mem::replace(&mut self.phase, Phase::Done) {
                Phase::Done => return,
                Phase::Round {
                    budget,
                    drawn,
                    stage: Stage::Draw,
                } => {
                    if drawn == budget {
                        self.finish(Termination::Converged)
                    } else {
                        let x = random_subset(&mut self.rng, self.width);
                        self.samples += 1;
                        let stage = match self.config.mode {
                            Mode::Approx => Stage::Member {
                                x_models: self.hypothesis.is_model(&x),
                                probe: MembershipProbe::new(x.clone()),
                                x,
                            },
                            Mode::StrongApprox => Stage::Closure {
                                y: self.hypothesis.closure_of(&x),
                                x,
                            },
                        };
                        Phase::Round {
                            budget,
                            drawn: drawn + 1,
                            stage,
                        }
                    }
                }
                Phase::Round {
                    budget,
                    drawn,
                    stage,
                } => {
                    match &stage {
                        Stage::Member { probe, .. } | Stage::ClosureMember { probe } => self.issue(
                            probe.query(),
                            QueryKind::Restricted,
                            QueryOrigin::Membership,
                        ),
                        Stage::Closure { x, y } => {
                            let imp = Implication {
                                premise: x.clone(),
                                conclusion: y.clone(),
                            };
                            self.issue(imp, QueryKind::Full, QueryOrigin::StrongCheck)
                        }
                        Stage::BottomMember => self.issue(
                            Implication::to_bottom(AttributeSet::full(self.width)),
                            QueryKind::Restricted,
                            QueryOrigin::Membership,
                        ),
                        Stage::Draw => unreachable!(),
                    }
                    Phase::Round {
                        budget,
                        drawn,
                        stage,
                    }
                }
                Phase::Scan {
                    x,
                    from,
                    probe: None,
                } => match next_candidate(&self.hypothesis, &x, from) {
                    Some((pos, c)) => Phase::Scan {
                        x,
                        from,
                        probe: Some((pos, MembershipProbe::new(c))),
                    },
                    None if self.config.valid_hypothesis => Phase::Install {
                        target: Target::Append,
                        probe: EnvelopeClosureProbe::new(x),
                    },
                    None => {
                        self.hypothesis
                            .push(Implication::to_bottom(x))
                            .expect("same universe");
                        self.last_changed = vec![self.hypothesis.len() - 1];
                        self.next_round()
                    }
                },
                Phase::Scan {
                    x,
                    from,
                    probe: Some((pos, probe)),
                } => {
                    self.issue(
                        probe.query(),
                        QueryKind::Restricted,
                        QueryOrigin::Membership,
                    );
                    Phase::Scan {
                        x,
                        from,
                        probe: Some((pos, probe)),
                    }
                }
                Phase::Install { target, probe } => {
                    self.issue(
                        probe.query(),
                        QueryKind::Restricted,
                        QueryOrigin::EnvelopeClosure,
                    );
                    Phase::Install { target, probe }
                }
            };
        }
    }
}
