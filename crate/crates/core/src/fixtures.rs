//! The bundled running example: a four-state system whose low output reveals
//! whether a high input arrived in the first step, and the two-trace
//! counterexample to observational determinism.

pub mod random;

use std::collections::BTreeMap;

use crate::logic::HyperFormula;
use crate::model::{Counterexample, Guard, Lasso, MooreMachine};

pub const RUNNING_EXAMPLE_MACHINE: &str = include_str!("../examples/running_example.machine.json");
pub const RUNNING_EXAMPLE_TRACES: &str = include_str!("../examples/running_example.traces.json");
pub const RUNNING_EXAMPLE_FORMULA: &str =
    include_str!("../examples/formulas/running_example.hltl");

pub fn running_example() -> MooreMachine {
    let g = |s: &str| Guard::parse(s).unwrap();
    MooreMachine::from_guards(
        vec!["hi".into()],
        vec!["ho".into(), "lo".into()],
        vec![
            ("s0".into(), vec![]),
            ("s1".into(), vec!["ho".into()]),
            ("s2".into(), vec!["lo".into()]),
            ("s3".into(), vec!["ho".into(), "lo".into()]),
        ],
        "s0",
        vec![
            ("s0".into(), g("hi"), "s1".into()),
            ("s0".into(), g("!hi"), "s2".into()),
            ("s2".into(), g("hi"), "s1".into()),
            ("s2".into(), g("!hi"), "s3".into()),
            ("s1".into(), g("true"), "s3".into()),
            ("s3".into(), g("true"), "s3".into()),
        ],
    )
    .expect("running example is well-formed")
}

/// `t1 = {} {lo} ({ho,lo})^ω`, `t2 = {hi} {hi,ho} ({ho,lo})^ω`.
pub fn running_counterexample(m: &MooreMachine) -> Counterexample {
    let ap = m.alphabet();
    let l = |names: &[&str]| ap.letter(names.iter().copied()).unwrap();
    let t1 = Lasso::new(vec![l(&[]), l(&["lo"])], vec![l(&["ho", "lo"])]).unwrap();
    let t2 = Lasso::new(vec![l(&["hi"]), l(&["hi", "ho"])], vec![l(&["ho", "lo"])]).unwrap();
    Counterexample::new(
        ap.clone(),
        BTreeMap::from([("t1".to_string(), t1), ("t2".to_string(), t2)]),
    )
}

/// `∀t1 ∀t2. G (lo_t1 ↔ lo_t2)`.
pub fn running_formula() -> HyperFormula {
    crate::logic::parse_hyperltl(RUNNING_EXAMPLE_FORMULA, crate::logic::Syntax::Auto)
        .expect("bundled formula parses")
}
