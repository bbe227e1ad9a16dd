use std::fmt;

/// Temporal formula over atoms of type `A`.
///
/// Derived operators (`->`, `<->`, `F`, `G`) are kept as written; only
/// negation-normal-form conversion expands `->` and `<->`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
    Next(Box<Formula<A>>),
    Eventually(Box<Formula<A>>),
    Globally(Box<Formula<A>>),
    Until(Box<Formula<A>>, Box<Formula<A>>),
    Release(Box<Formula<A>>, Box<Formula<A>>),
}

/// An atom `a_π` of a HyperLTL body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedAtom {
    pub prop: String,
    pub var: String,
}

impl fmt::Display for IndexedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.prop, self.var)
    }
}

/// LTL over zipped atoms `prop@var`.
pub type Ltl = Formula<String>;

/// Name of the zipped atom for `prop` on trace `var`.
pub fn zipped_atom(prop: &str, var: &str) -> String {
    format!("{prop}@{var}")
}

/// A `∀π1 … ∀πn. body` formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperFormula {
    pub vars: Vec<String>,
    pub body: Formula<IndexedAtom>,
}

impl HyperFormula {
    /// The LTL formula obtained by renaming every `a_π` to `a@π`.
    pub fn zipped_body(&self) -> Ltl {
        self.body.map_atoms(&|a| zipped_atom(&a.prop, &a.var))
    }

    pub fn props(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.body.atoms().map(|a| a.prop.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "forall {}. {}", self.vars.join(" "), self.body)
    }
}

macro_rules! ctor1 {
    ($name:ident, $v:ident) => {
        pub fn $name(a: Formula<A>) -> Formula<A> {
            Formula::$v(Box::new(a))
        }
    };
}
macro_rules! ctor2 {
    ($name:ident, $v:ident) => {
        pub fn $name(a: Formula<A>, b: Formula<A>) -> Formula<A> {
            Formula::$v(Box::new(a), Box::new(b))
        }
    };
}

impl<A> Formula<A> {
    ctor1!(not, Not);
    ctor1!(next, Next);
    ctor1!(eventually, Eventually);
    ctor1!(globally, Globally);
    ctor2!(and, And);
    ctor2!(or, Or);
    ctor2!(implies, Implies);
    ctor2!(iff, Iff);
    ctor2!(until, Until);
    ctor2!(release, Release);

    pub fn children(&self) -> Vec<&Formula<A>> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Eventually(a) | Globally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &A> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            while let Some(f) = stack.pop() {
                if let Formula::Atom(a) = f {
                    return Some(a);
                }
                stack.extend(f.children());
            }
            None
        })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Nesting depth of temporal operators.
    pub fn temporal_depth(&self) -> usize {
        use Formula::*;
        let inner = self
            .children()
            .iter()
            .map(|c| c.temporal_depth())
            .max()
            .unwrap_or(0);
        match self {
            Next(_) | Eventually(_) | Globally(_) | Until(..) | Release(..) => inner + 1,
            _ => inner,
        }
    }

    /// Negation only on atoms; no `->` or `<->`.
    pub fn is_nnf(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Atom(_) => true,
            Not(a) => matches!(**a, Atom(_)),
            Implies(..) | Iff(..) => false,
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }

    pub fn map_atoms<B>(&self, f: &impl Fn(&A) -> B) -> Formula<B> {
        use Formula::*;
        let m = |x: &Formula<A>| Box::new(x.map_atoms(f));
        match self {
            True => True,
            False => False,
            Atom(a) => Atom(f(a)),
            Not(a) => Not(m(a)),
            Next(a) => Next(m(a)),
            Eventually(a) => Eventually(m(a)),
            Globally(a) => Globally(m(a)),
            And(a, b) => And(m(a), m(b)),
            Or(a, b) => Or(m(a), m(b)),
            Implies(a, b) => Implies(m(a), m(b)),
            Iff(a, b) => Iff(m(a), m(b)),
            Until(a, b) => Until(m(a), m(b)),
            Release(a, b) => Release(m(a), m(b)),
        }
    }
}

// Binding strength used by the printer and the infix parser.
pub(crate) const PREC_IFF: u8 = 1;
pub(crate) const PREC_IMPLIES: u8 = 2;
pub(crate) const PREC_OR: u8 = 3;
pub(crate) const PREC_AND: u8 = 4;
pub(crate) const PREC_TEMPORAL: u8 = 5;
pub(crate) const PREC_UNARY: u8 = 6;

impl<A> Formula<A> {
    fn prec(&self) -> u8 {
        use Formula::*;
        match self {
            Iff(..) => PREC_IFF,
            Implies(..) => PREC_IMPLIES,
            Or(..) => PREC_OR,
            And(..) => PREC_AND,
            Until(..) | Release(..) => PREC_TEMPORAL,
            _ => PREC_UNARY,
        }
    }
}

struct Prec<'a, A>(&'a Formula<A>, u8);

impl<A: fmt::Display> fmt::Display for Prec<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.prec() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(a) => write!(f, "!{}", Prec(a, PREC_UNARY)),
            Next(a) => write!(f, "X {}", Prec(a, PREC_UNARY)),
            Eventually(a) => write!(f, "F {}", Prec(a, PREC_UNARY)),
            Globally(a) => write!(f, "G {}", Prec(a, PREC_UNARY)),
            // left-associative
            And(a, b) => write!(f, "{} & {}", Prec(a, PREC_AND), Prec(b, PREC_AND + 1)),
            Or(a, b) => write!(f, "{} | {}", Prec(a, PREC_OR), Prec(b, PREC_OR + 1)),
            Iff(a, b) => write!(f, "{} <-> {}", Prec(a, PREC_IFF), Prec(b, PREC_IFF + 1)),
            // right-associative
            Implies(a, b) => write!(
                f,
                "{} -> {}",
                Prec(a, PREC_IMPLIES + 1),
                Prec(b, PREC_IMPLIES)
            ),
            Until(a, b) => write!(
                f,
                "{} U {}",
                Prec(a, PREC_TEMPORAL + 1),
                Prec(b, PREC_TEMPORAL)
            ),
            Release(a, b) => write!(
                f,
                "{} R {}",
                Prec(a, PREC_TEMPORAL + 1),
                Prec(b, PREC_TEMPORAL)
            ),
        }
    }
}
