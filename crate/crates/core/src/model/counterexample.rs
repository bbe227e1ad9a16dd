use std::collections::{BTreeMap, BTreeSet};

use super::alphabet::{Alphabet, PropKind};
use super::event::{Event, Polarity};
use super::lasso::Lasso;
use super::machine::{MooreMachine, TraceDiagnostic};
use super::ModelError;

/// An assignment of lasso traces to trace variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    ap: Alphabet,
    traces: BTreeMap<String, Lasso>,
}

impl Counterexample {
    pub fn new(ap: Alphabet, traces: BTreeMap<String, Lasso>) -> Self {
        Counterexample { ap, traces }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.ap
    }

    pub fn traces(&self) -> &BTreeMap<String, Lasso> {
        &self.traces
    }

    pub fn trace(&self, var: &str) -> Option<&Lasso> {
        self.traces.get(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.traces.keys().map(String::as_str)
    }

    pub(crate) fn traces_mut(&mut self) -> &mut BTreeMap<String, Lasso> {
        &mut self.traces
    }

    /// Checks every trace against the machine; returns the first failure.
    pub fn validate(&self, machine: &MooreMachine) -> Result<(), ModelError> {
        if self.ap != *machine.alphabet() {
            return Err(ModelError::AlphabetMismatch);
        }
        for (var, t) in &self.traces {
            if let TraceDiagnostic::Rejected { position, reason } = machine.validate_trace(t) {
                return Err(ModelError::InvalidTrace {
                    trace: var.clone(),
                    position,
                    reason,
                });
            }
        }
        Ok(())
    }

    /// Value of `prop` on trace `var` at position `n` of its finite representation.
    pub fn value(&self, var: &str, prop: &str, n: usize) -> Result<bool, ModelError> {
        let t = self
            .traces
            .get(var)
            .ok_or_else(|| ModelError::UnknownTrace(var.to_string()))?;
        let bit = self
            .ap
            .bit(prop)
            .ok_or_else(|| ModelError::UnknownProp(prop.to_string()))?;
        if n >= t.len() {
            return Err(ModelError::PositionOutOfRange {
                trace: var.to_string(),
                position: n,
                len: t.len(),
            });
        }
        Ok(t.at(n) & (1 << bit) != 0)
    }

    /// `Γ ⊨ events`: every event names a trace of the assignment and its literal holds there.
    pub fn satisfies<'a>(&self, events: impl IntoIterator<Item = &'a Event>) -> bool {
        events.into_iter().all(|e| {
            self.value(&e.trace, &e.prop, e.position)
                .map(|v| Polarity::of(v) == e.polarity)
                .unwrap_or(false)
        })
    }

    /// Every event of the given kind that holds on the finite representations.
    pub fn events(&self, kind: PropKind) -> BTreeSet<Event> {
        let mut out = BTreeSet::new();
        for (var, t) in &self.traces {
            for (n, letter) in t.letters().enumerate() {
                for (bit, p) in self.ap.props().iter().enumerate() {
                    if p.kind == kind {
                        let pol = Polarity::of(letter & (1 << bit) != 0);
                        out.insert(Event::new(pol, &p.name, n, var));
                    }
                }
            }
        }
        out
    }

    pub fn input_events(&self) -> BTreeSet<Event> {
        self.events(PropKind::Input)
    }

    pub fn output_events(&self) -> BTreeSet<Event> {
        self.events(PropKind::Output)
    }

    pub fn render(&self) -> String {
        self.traces
            .iter()
            .map(|(v, t)| format!("{v} = {}", t.render(&self.ap)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
