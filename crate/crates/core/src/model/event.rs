use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn of(value: bool) -> Polarity {
        if value {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Polarity::Positive
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive => Polarity::Negative,
        }
    }
}

/// A literal over a proposition at a position of a named counterexample trace.
///
/// Field order fixes the ordering used for every enumeration: trace variable,
/// position, proposition name, then polarity (negative first). A position in
/// the period stands for that offset in every loop iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    pub trace: String,
    pub position: usize,
    pub prop: String,
    pub polarity: Polarity,
}

impl Event {
    pub fn new(polarity: Polarity, prop: &str, position: usize, trace: &str) -> Event {
        Event {
            trace: trace.to_string(),
            position,
            prop: prop.to_string(),
            polarity,
        }
    }

    pub fn pos(prop: &str, position: usize, trace: &str) -> Event {
        Event::new(Polarity::Positive, prop, position, trace)
    }

    pub fn neg(prop: &str, position: usize, trace: &str) -> Event {
        Event::new(Polarity::Negative, prop, position, trace)
    }

    /// Same proposition, position and trace, ignoring polarity.
    pub fn same_site(&self, other: &Event) -> bool {
        self.trace == other.trace && self.position == other.position && self.prop == other.prop
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = if self.polarity.is_positive() { "" } else { "¬" };
        write!(f, "⟨{neg}{},{},{}⟩", self.prop, self.position, self.trace)
    }
}

/// Renders a set of events as `{e1, e2}`.
pub fn render_events<'a>(events: impl IntoIterator<Item = &'a Event>) -> String {
    let parts: Vec<String> = events.into_iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}
