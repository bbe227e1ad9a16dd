//! Systems, traces, events, counterexamples, counterfactual automata and interventions.

mod alphabet;
mod counterexample;
mod counterfactual;
mod event;
mod guard;
mod lasso;
mod machine;

pub use alphabet::{Alphabet, AtomicProp, Letter, PropKind, MAX_PROPS};
pub use counterexample::Counterexample;
pub use counterfactual::{
    intervene, Config, CounterfactualAutomaton, CounterfactualWord, Edge, Intervener,
};
pub use event::{render_events, Event, Polarity};
pub use guard::Guard;
pub use lasso::{lcm, Lasso};
pub use machine::{MooreMachine, State, TraceDiagnostic, MAX_INPUTS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("lasso period must be non-empty")]
    EmptyPeriod,
    #[error("{0}")]
    Alphabet(String),
    #[error("{0} inputs exceed the supported maximum of {MAX_INPUTS}")]
    TooManyInputs(usize),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("label of state `{state}` contains `{prop}`, which is not an output")]
    LabelNotOutput { state: String, prop: String },
    #[error("guard on a transition from `{state}` mentions `{prop}`, which is not an input")]
    GuardNotOverInputs { state: String, prop: String },
    #[error("state `{state}` on inputs {inputs}: {matches} guards hold, expected exactly one")]
    NotDeterministicTotal {
        state: String,
        inputs: String,
        matches: usize,
    },
    #[error("malformed transition table: {0}")]
    Table(String),
    #[error("guard syntax error at offset {offset}: {message}")]
    GuardSyntax { offset: usize, message: String },
    #[error("input word contains non-input letter {0}")]
    NotAnInputWord(String),
    #[error("trace `{trace}` is not a trace of the machine at position {position}: {reason}")]
    InvalidTrace {
        trace: String,
        position: usize,
        reason: String,
    },
    #[error("counterexample alphabet differs from the machine alphabet")]
    AlphabetMismatch,
    #[error("unknown trace variable `{0}`")]
    UnknownTrace(String),
    #[error("position {position} is outside trace `{trace}` (length {len})")]
    PositionOutOfRange {
        trace: String,
        position: usize,
        len: usize,
    },
    #[error("event {event} is not an {expected} event")]
    WrongEventKind { event: String, expected: PropKind },
}
