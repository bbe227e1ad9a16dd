//! HyperLTL and LTL syntax, the zipping reduction, and lasso semantics.

mod eval;
mod formula;
mod nnf;
mod parse;
mod zip;

pub use eval::{eval_ltl, truth};
pub use formula::{zipped_atom, Formula, HyperFormula, IndexedAtom, Ltl};
pub use nnf::{negate_to_nnf, to_nnf};
pub use parse::{parse_hyperltl, ParseError, Syntax};
pub use zip::{eval_hyper, zip, ZippedTrace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {0}")]
    Syntax(ParseError),
    #[error("unsupported formula at {0}")]
    Unsupported(ParseError),
    #[error("trace variable `{0}` is not assigned by the counterexample")]
    UnboundVariable(String),
    #[error("formula mentions `{0}`, which is not a proposition of the system")]
    UnknownProp(String),
    #[error("zipped alphabet has {0} propositions; at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("{0}")]
    Zip(String),
}
