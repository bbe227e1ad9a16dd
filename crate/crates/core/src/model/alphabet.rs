use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A valuation of atomic propositions, one bit per proposition of an [`Alphabet`].
pub type Letter = u64;

/// Largest number of propositions a single alphabet may carry.
pub const MAX_PROPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropKind {
    Input,
    Output,
}

impl fmt::Display for PropKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropKind::Input => f.write_str("input"),
            PropKind::Output => f.write_str("output"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicProp {
    pub name: String,
    pub kind: PropKind,
}

/// An ordered set of atomic propositions; the position of a proposition is its bit in a [`Letter`].
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    props: Vec<AtomicProp>,
    index: HashMap<String, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.props == other.props
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicate names and more than [`MAX_PROPS`] entries.
    pub fn new(props: Vec<AtomicProp>) -> Result<Self, String> {
        if props.len() > MAX_PROPS {
            return Err(format!(
                "{} propositions exceed the limit of {MAX_PROPS}",
                props.len()
            ));
        }
        let mut index = HashMap::with_capacity(props.len());
        for (i, p) in props.iter().enumerate() {
            if index.insert(p.name.clone(), i).is_some() {
                return Err(format!("duplicate proposition `{}`", p.name));
            }
        }
        Ok(Alphabet { props, index })
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn props(&self) -> &[AtomicProp] {
        &self.props
    }

    pub fn get(&self, bit: usize) -> &AtomicProp {
        &self.props[bit]
    }

    pub fn bit(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn kind(&self, name: &str) -> Option<PropKind> {
        self.bit(name).map(|b| self.props[b].kind)
    }

    /// Mask of every bit whose proposition has the given kind.
    pub fn mask_of(&self, kind: PropKind) -> Letter {
        self.props
            .iter()
            .enumerate()
            .filter(|(_, p)| p.kind == kind)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn full_mask(&self) -> Letter {
        if self.props.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.props.len()) - 1
        }
    }

    /// Encodes a set of proposition names.
    pub fn letter<'a, I>(&self, names: I) -> Result<Letter, String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut l = 0;
        for n in names {
            let b = self
                .bit(n)
                .ok_or_else(|| format!("unknown proposition `{n}`"))?;
            l |= 1 << b;
        }
        Ok(l)
    }

    /// Names of the propositions set in `letter`, in alphabet order.
    pub fn names(&self, letter: Letter) -> Vec<&str> {
        self.props
            .iter()
            .enumerate()
            .filter(|(i, _)| letter & (1 << i) != 0)
            .map(|(_, p)| p.name.as_str())
            .collect()
    }

    pub fn render(&self, letter: Letter) -> String {
        format!("{{{}}}", self.names(letter).join(","))
    }
}
