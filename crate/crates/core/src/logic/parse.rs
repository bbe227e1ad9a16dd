//! Two concrete syntaxes for `∀ⁿ` HyperLTL.
//!
//! Infix: `forall t1 t2. G (lo[t1] <-> lo[t2])`, with `!`, `&`, `|`, `->`,
//! `<->`, `X`, `F`, `G`, `U`, `R`, `W`. Binding from weakest: `<->`, `->`
//! (right), `|`, `&`, `U`/`R`/`W` (right), unary operators.
//!
//! S-expressions: `Forall (Forall (G (Eq (AP "lo" 0) (AP "lo" 1))))`, where the
//! integer of `AP` is the quantifier index counted from the outermost and names
//! the trace variable `t{index+1}`.

use std::fmt;

use super::formula::{
    Formula, HyperFormula, IndexedAtom, PREC_AND, PREC_IFF, PREC_IMPLIES, PREC_OR, PREC_TEMPORAL,
};
use super::LogicError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Syntax {
    Infix,
    Sexpr,
    /// S-expression when the first word is `Forall` or `Exists`, infix otherwise.
    Auto,
}

impl std::str::FromStr for Syntax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "infix" => Ok(Syntax::Infix),
            "sexpr" => Ok(Syntax::Sexpr),
            "auto" => Ok(Syntax::Auto),
            _ => Err(format!("unknown syntax `{s}` (expected infix, sexpr or auto)")),
        }
    }
}

/// A syntax error located by byte offset, line and column (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(text: &str, offset: usize, message: impl Into<String>) -> ParseError {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

pub fn parse_hyperltl(text: &str, syntax: Syntax) -> Result<HyperFormula, LogicError> {
    let syntax = match syntax {
        Syntax::Auto => {
            let first = text.trim_start();
            if first.starts_with("Forall") || first.starts_with("Exists") {
                Syntax::Sexpr
            } else {
                Syntax::Infix
            }
        }
        s => s,
    };
    match syntax {
        Syntax::Sexpr => Sexpr::new(text).parse(),
        _ => Infix::new(text)?.parse(),
    }
}

fn unsupported(text: &str, offset: usize) -> LogicError {
    LogicError::Unsupported(ParseError::at(
        text,
        offset,
        "existential quantifiers are not supported; only a prefix of universal quantifiers is",
    ))
}

// ---------------------------------------------------------------- infix

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Not => f.write_str("`!`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '.' => (Tok::Dot, 1),
            '!' | '~' => (Tok::Not, 1),
            '&' if text[i..].starts_with("&&") => (Tok::And, 2),
            '&' => (Tok::And, 1),
            '|' if text[i..].starts_with("||") => (Tok::Or, 2),
            '|' => (Tok::Or, 1),
            '-' if text[i..].starts_with("->") => (Tok::Implies, 2),
            '<' if text[i..].starts_with("<->") => (Tok::Iff, 3),
            c if is_ident_start(c) => {
                let len = text[i..]
                    .find(|ch: char| !is_ident_char(ch))
                    .unwrap_or(text.len() - i);
                (Tok::Ident(text[i..i + len].to_string()), len)
            }
            _ => {
                return Err(LogicError::Syntax(ParseError::at(
                    text,
                    i,
                    format!("unexpected character `{c}`"),
                )))
            }
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Infix<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vec<String>,
}

type F = Formula<IndexedAtom>;

impl<'a> Infix<'a> {
    fn new(text: &'a str) -> Result<Self, LogicError> {
        Ok(Infix {
            text,
            toks: lex(text)?,
            pos: 0,
            vars: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> LogicError {
        LogicError::Syntax(ParseError::at(self.text, self.offset(), message))
    }

    fn expect(&mut self, want: Tok) -> Result<(), LogicError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {want}, found {}", self.peek())))
        }
    }

    /// An identifier used as an operator keyword, unless it names an atom.
    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw) && *self.peek2() != Tok::LBracket
    }

    fn parse(mut self) -> Result<HyperFormula, LogicError> {
        loop {
            if self.at_keyword("exists") {
                return Err(unsupported(self.text, self.offset()));
            }
            if !self.at_keyword("forall") {
                break;
            }
            self.bump();
            let before = self.vars.len();
            while let Tok::Ident(name) = self.peek().clone() {
                if self.vars.contains(&name) {
                    return Err(self.error(format!("trace variable `{name}` bound twice")));
                }
                self.vars.push(name);
                self.bump();
            }
            if self.vars.len() == before {
                return Err(self.error("expected a trace variable after `forall`"));
            }
            self.expect(Tok::Dot)?;
        }
        if self.vars.is_empty() {
            return Err(self.error("expected `forall`"));
        }
        let body = self.iff()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(format!("unexpected {}", self.peek())));
        }
        Ok(HyperFormula {
            vars: self.vars,
            body,
        })
    }

    fn iff(&mut self) -> Result<F, LogicError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            lhs = F::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<F, LogicError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(F::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<F, LogicError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = F::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<F, LogicError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = F::and(lhs, self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<F, LogicError> {
        let lhs = self.unary()?;
        for kw in ["U", "R", "W"] {
            if self.at_keyword(kw) {
                self.bump();
                let rhs = self.temporal()?;
                return Ok(match kw {
                    "U" => F::until(lhs, rhs),
                    "R" => F::release(lhs, rhs),
                    _ => F::or(F::until(lhs.clone(), rhs), F::globally(lhs)),
                });
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<F, LogicError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(F::not(self.unary()?));
        }
        for kw in ["X", "F", "G"] {
            if self.at_keyword(kw) {
                self.bump();
                let a = self.unary()?;
                return Ok(match kw {
                    "X" => F::next(a),
                    "F" => F::eventually(a),
                    _ => F::globally(a),
                });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<F, LogicError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if (s == "true" || s == "false") && *self.peek2() != Tok::LBracket => {
                self.bump();
                Ok(if s == "true" { F::True } else { F::False })
            }
            Tok::Ident(prop) => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let at = self.offset();
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    t => {
                        return Err(LogicError::Syntax(ParseError::at(
                            self.text,
                            at,
                            format!("expected a trace variable, found {t}"),
                        )))
                    }
                };
                if !self.vars.contains(&var) {
                    return Err(LogicError::Syntax(ParseError::at(
                        self.text,
                        at,
                        format!("trace variable `{var}` is not bound"),
                    )));
                }
                self.expect(Tok::RBracket)?;
                Ok(F::Atom(IndexedAtom { prop, var }))
            }
            t => Err(self.error(format!("expected a formula, found {t}"))),
        }
    }
}

// ---------------------------------------------------------------- sexpr

#[derive(Debug)]
enum Item {
    Node {
        head: String,
        args: Vec<Item>,
        offset: usize,
    },
    Str(String, usize),
    Int(usize, usize),
}

impl Item {
    fn offset(&self) -> usize {
        match self {
            Item::Node { offset, .. } | Item::Str(_, offset) | Item::Int(_, offset) => *offset,
        }
    }
}

struct Sexpr<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Sexpr<'a> {
    fn new(text: &'a str) -> Self {
        Sexpr { text, pos: 0 }
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> LogicError {
        LogicError::Syntax(ParseError::at(self.text, offset, message))
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    /// A bare word, possibly the head of a node.
    fn word(&mut self) -> Result<(String, usize), LogicError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| !is_ident_char(c))
            .unwrap_or(self.text.len() - start);
        if len == 0 || !self.text[start..].starts_with(is_ident_start) {
            let found = self.text[start..]
                .chars()
                .next()
                .map_or("end of input".to_string(), |c| format!("`{c}`"));
            return Err(self.error(start, format!("expected an operator, found {found}")));
        }
        self.pos += len;
        Ok((self.text[start..start + len].to_string(), start))
    }

    /// `head arg*` up to the enclosing `)` or end of input.
    fn node(&mut self) -> Result<Item, LogicError> {
        let (head, offset) = self.word()?;
        let mut args = Vec::new();
        loop {
            match self.peek() {
                None | Some(')') => break,
                Some('(') => {
                    let open = self.pos;
                    self.pos += 1;
                    let inner = self.node()?;
                    if self.peek() != Some(')') {
                        return Err(self.error(self.pos, format!("unclosed `(` opened at offset {open}")));
                    }
                    self.pos += 1;
                    args.push(inner);
                }
                Some('"') | Some('\\') => args.push(self.string()?),
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    let len = self.text[start..]
                        .find(|c: char| !c.is_ascii_digit())
                        .unwrap_or(self.text.len() - start);
                    let n = self.text[start..start + len]
                        .parse()
                        .map_err(|_| self.error(start, "integer out of range"))?;
                    self.pos += len;
                    args.push(Item::Int(n, start));
                }
                Some(_) => {
                    let (w, at) = self.word()?;
                    args.push(Item::Node {
                        head: w,
                        args: vec![],
                        offset: at,
                    });
                }
            }
        }
        Ok(Item::Node { head, args, offset })
    }

    /// A double-quoted string; a backslash before either quote is ignored.
    fn string(&mut self) -> Result<Item, LogicError> {
        let start = self.pos;
        let open = if self.text[self.pos..].starts_with("\\\"") { 2 } else { 1 };
        if !self.text[self.pos + open - 1..].starts_with('"') {
            return Err(self.error(start, "expected a string"));
        }
        self.pos += open;
        let rest = &self.text[self.pos..];
        let end = rest
            .find('"')
            .ok_or_else(|| self.error(start, "unterminated string"))?;
        let mut s = &rest[..end];
        if let Some(stripped) = s.strip_suffix('\\') {
            s = stripped;
        }
        self.pos += end + 1;
        Ok(Item::Str(s.to_string(), start))
    }

    fn parse(mut self) -> Result<HyperFormula, LogicError> {
        let root = self.node()?;
        if let Some(c) = self.peek() {
            return Err(self.error(self.pos, format!("unexpected `{c}` after the formula")));
        }
        let mut n = 0;
        let mut cur = &root;
        loop {
            match cur {
                Item::Node { head, args, offset } if head == "Forall" => {
                    if args.len() != 1 {
                        return Err(self.error(*offset, "`Forall` takes exactly one argument"));
                    }
                    n += 1;
                    cur = &args[0];
                }
                Item::Node { head, offset, .. } if head == "Exists" => {
                    return Err(unsupported(self.text, *offset));
                }
                _ => break,
            }
        }
        if n == 0 {
            return Err(self.error(root.offset(), "expected `Forall`"));
        }
        let body = self.convert(cur, n)?;
        Ok(HyperFormula {
            vars: (1..=n).map(|i| format!("t{i}")).collect(),
            body,
        })
    }

    fn convert(&self, item: &Item, n: usize) -> Result<F, LogicError> {
        let (head, args, offset) = match item {
            Item::Node { head, args, offset } => (head.as_str(), args, *offset),
            other => return Err(self.error(other.offset(), "expected a formula")),
        };
        let arity = |k: usize| -> Result<(), LogicError> {
            if args.len() == k {
                Ok(())
            } else {
                Err(self.error(
                    offset,
                    format!("`{head}` takes {k} argument(s), found {}", args.len()),
                ))
            }
        };
        let sub = |i: usize| self.convert(&args[i], n);
        Ok(match head {
            "AP" => {
                arity(2)?;
                let prop = match &args[0] {
                    Item::Str(s, _) => s.clone(),
                    a => return Err(self.error(a.offset(), "expected a proposition name string")),
                };
                let idx = match &args[1] {
                    Item::Int(i, _) => *i,
                    a => return Err(self.error(a.offset(), "expected a trace index")),
                };
                if idx >= n {
                    return Err(self.error(
                        args[1].offset(),
                        format!("trace index {idx} is not bound by the {n} quantifier(s)"),
                    ));
                }
                F::Atom(IndexedAtom {
                    prop,
                    var: format!("t{}", idx + 1),
                })
            }
            "Const" => {
                arity(1)?;
                match &args[0] {
                    Item::Node { head, args, .. } if args.is_empty() && head == "True" => F::True,
                    Item::Node { head, args, .. } if args.is_empty() && head == "False" => F::False,
                    a => return Err(self.error(a.offset(), "expected `True` or `False`")),
                }
            }
            "True" | "TRUE" => {
                arity(0)?;
                F::True
            }
            "False" | "FALSE" => {
                arity(0)?;
                F::False
            }
            "Not" | "Neg" => {
                arity(1)?;
                F::not(sub(0)?)
            }
            "X" | "Next" => {
                arity(1)?;
                F::next(sub(0)?)
            }
            "F" | "Finally" | "Eventually" => {
                arity(1)?;
                F::eventually(sub(0)?)
            }
            "G" | "Globally" => {
                arity(1)?;
                F::globally(sub(0)?)
            }
            "And" | "Or" | "Implies" | "Eq" | "Iff" | "Equiv" | "Neq" | "Xor" | "Until" | "U"
            | "Release" | "R" | "WeakUntil" | "W" => {
                arity(2)?;
                let (a, b) = (sub(0)?, sub(1)?);
                match head {
                    "And" => F::and(a, b),
                    "Or" => F::or(a, b),
                    "Implies" => F::implies(a, b),
                    "Eq" | "Iff" | "Equiv" => F::iff(a, b),
                    "Neq" | "Xor" => F::not(F::iff(a, b)),
                    "Until" | "U" => F::until(a, b),
                    "Release" | "R" => F::release(a, b),
                    _ => F::or(F::until(a.clone(), b), F::globally(a)),
                }
            }
            "Forall" => return Err(self.error(offset, "quantifiers must form a prefix")),
            "Exists" => return Err(unsupported(self.text, offset)),
            _ => return Err(self.error(offset, format!("unknown operator `{head}`"))),
        })
    }
}

// ---------------------------------------------------------------- printing

impl HyperFormula {
    /// Infix rendering; parses back to the same formula.
    pub fn to_infix(&self) -> String {
        self.to_string()
    }

    /// S-expression rendering. Trace variables are numbered by quantifier position.
    pub fn to_sexpr(&self) -> String {
        let mut body = String::new();
        write_sexpr(&self.body, &self.vars, &mut body);
        let mut out = String::new();
        for _ in &self.vars {
            out.push_str("Forall (");
        }
        out.push_str(&body);
        out.push_str(&")".repeat(self.vars.len()));
        out
    }
}

fn write_sexpr(f: &F, vars: &[String], out: &mut String) {
    use Formula::*;
    let app = |name: &str, args: &[&F], out: &mut String| {
        out.push_str(name);
        for a in args {
            out.push_str(" (");
            write_sexpr(a, vars, out);
            out.push(')');
        }
    };
    match f {
        True => out.push_str("Const True"),
        False => out.push_str("Const False"),
        Atom(a) => {
            let idx = vars.iter().position(|v| *v == a.var).unwrap_or(usize::MAX);
            out.push_str(&format!("AP \"{}\" {idx}", a.prop));
        }
        Not(a) => match &**a {
            Iff(x, y) => app("Neq", &[x, y], out),
            _ => app("Not", &[a], out),
        },
        And(a, b) => app("And", &[a, b], out),
        Or(a, b) => app("Or", &[a, b], out),
        Implies(a, b) => app("Implies", &[a, b], out),
        Iff(a, b) => app("Eq", &[a, b], out),
        Next(a) => app("X", &[a], out),
        Eventually(a) => app("F", &[a], out),
        Globally(a) => app("G", &[a], out),
        Until(a, b) => app("Until", &[a, b], out),
        Release(a, b) => app("Release", &[a, b], out),
    }
}

// Keep the precedence table in one place: the printer's choices must be
// exactly what the infix parser's grammar levels accept.
const _: () = assert!(PREC_IFF < PREC_IMPLIES && PREC_IMPLIES < PREC_OR);
const _: () = assert!(PREC_OR < PREC_AND && PREC_AND < PREC_TEMPORAL);
