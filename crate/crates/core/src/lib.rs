//! Actual-cause explanations for counterexamples to universally quantified
//! HyperLTL properties of finite Moore machines.
//!
//! The pipeline: [`checker::find_counterexample`] produces a counterexample,
//! [`satcore::candidate_cause`] over-approximates its causes, and
//! [`causality::actual_cause`] or [`causality::all_minimal_causes`] narrows the
//! candidate to minimal causes with contingencies. [`oracle`] recomputes causes
//! by exhaustion for cross-checking.

pub mod alternating;
pub mod causality;
pub mod checker;
pub mod fixtures;
pub mod io;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod report;
pub mod satcore;
mod subsets;

pub use alternating::{AltAutomaton, AnnotationPolicy, RunTree};
pub use logic::{HyperFormula, Ltl, Syntax, ZippedTrace};
pub use model::{Counterexample, Event, Lasso, MooreMachine, Polarity, PropKind};
pub use satcore::CandidateSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Logic(#[from] logic::LogicError),
    #[error(transparent)]
    Alternating(#[from] alternating::AltError),
    #[error(transparent)]
    Sat(#[from] satcore::SatError),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

