//! Boolean guards over input propositions, as written in machine files.

use std::fmt;

use super::alphabet::{Alphabet, Letter};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    Const(bool),
    Var(String),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    /// Parses `&`, `|`, `!`, parentheses, `true`, `false` and identifiers.
    /// `!` binds tightest, then `&`, then `|`.
    pub fn parse(text: &str) -> Result<Guard, ModelError> {
        let mut p = GuardParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let g = p.disjunction()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(g)
    }

    /// Evaluates against a letter, resolving variables through `ap`.
    pub fn eval(&self, ap: &Alphabet, letter: Letter) -> Result<bool, ModelError> {
        Ok(match self {
            Guard::Const(b) => *b,
            Guard::Var(v) => {
                let bit = ap
                    .bit(v)
                    .ok_or_else(|| ModelError::UnknownProp(v.clone()))?;
                letter & (1 << bit) != 0
            }
            Guard::Not(g) => !g.eval(ap, letter)?,
            Guard::And(a, b) => a.eval(ap, letter)? && b.eval(ap, letter)?,
            Guard::Or(a, b) => a.eval(ap, letter)? || b.eval(ap, letter)?,
        })
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Guard::Const(_) => {}
            Guard::Var(v) => out.push(v.clone()),
            Guard::Not(g) => g.vars(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Const(true) => f.write_str("true"),
            Guard::Const(false) => f.write_str("false"),
            Guard::Var(v) => f.write_str(v),
            Guard::Not(g) => write!(f, "!{}", Paren(g)),
            Guard::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Guard::Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
        }
    }
}

struct Paren<'a>(&'a Guard);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Guard::And(..) | Guard::Or(..) => write!(f, "({})", self.0),
            g => write!(f, "{g}"),
        }
    }
}

struct GuardParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl GuardParser<'_> {
    fn error(&self, msg: &str) -> ModelError {
        ModelError::GuardSyntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            // accept doubled operators (`&&`, `||`)
            if (c == b'&' || c == b'|') && self.src.get(self.pos) == Some(&c) {
                self.pos += 1;
            }
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Guard, ModelError> {
        let mut g = self.conjunction()?;
        while self.eat(b'|') {
            let r = self.conjunction()?;
            g = Guard::Or(Box::new(g), Box::new(r));
        }
        Ok(g)
    }

    fn conjunction(&mut self) -> Result<Guard, ModelError> {
        let mut g = self.unary()?;
        while self.eat(b'&') {
            let r = self.unary()?;
            g = Guard::And(Box::new(g), Box::new(r));
        }
        Ok(g)
    }

    fn unary(&mut self) -> Result<Guard, ModelError> {
        if self.eat(b'!') {
            return Ok(Guard::Not(Box::new(self.unary()?)));
        }
        if self.eat(b'(') {
            let g = self.disjunction()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(g);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier, `!` or `(`"));
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(match word {
            "true" => Guard::Const(true),
            "false" => Guard::Const(false),
            w => Guard::Var(w.to_string()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::alphabet::{AtomicProp, PropKind};

    fn ap() -> Alphabet {
        Alphabet::new(vec![
            AtomicProp {
                name: "a".into(),
                kind: PropKind::Input,
            },
            AtomicProp {
                name: "b".into(),
                kind: PropKind::Input,
            },
        ])
        .unwrap()
    }

    #[test]
    fn precedence() {
        let g = Guard::parse("!a | a & b").unwrap();
        let ap = ap();
        assert!(g.eval(&ap, 0).unwrap());
        assert!(!g.eval(&ap, 0b01).unwrap());
        assert!(g.eval(&ap, 0b11).unwrap());
    }

    #[test]
    fn display_reparses() {
        let g = Guard::parse("!(a | b) & true").unwrap();
        assert_eq!(Guard::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn syntax_error_reports_offset() {
        match Guard::parse("a & (b") {
            Err(ModelError::GuardSyntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
    }
}
