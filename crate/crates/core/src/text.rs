//! Text format for knowledge bases, events and queries.
//!
//! ```text
//! atoms: bird penguin fly have_legs
//! L: penguin => bird            # bird ⇐ penguin
//! P: (fly | bird) [1, 1]
//! P: (fly | penguin) [0, 1/20]
//! ```
//!
//! Events use `!`, `&`, ` v `, `true`, `false` and parentheses, binding in
//! that order; `a => b` is material implication and binds loosest.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kb::{ConditionalConstraint, KnowledgeBase, LogicalConstraint};
use crate::logic::{AtomTable, ConditionalEvent, Event};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    Not,
    And,
    Or,
    Implies,
    RevImplies,
    True,
    False,
    Ident(String),
    Number(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`v`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::RevImplies => "`<=`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("`{s}`"),
        }
    }
}

fn lex(src: &str, line: usize) -> Result<Vec<Tok>> {
    let err = |message: String| Error::Parse { line, message };
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => (out.push(Tok::LParen), i += 1).1,
            ')' => (out.push(Tok::RParen), i += 1).1,
            '[' => (out.push(Tok::LBracket), i += 1).1,
            ']' => (out.push(Tok::RBracket), i += 1).1,
            ',' => (out.push(Tok::Comma), i += 1).1,
            '|' => (out.push(Tok::Bar), i += 1).1,
            '!' => (out.push(Tok::Not), i += 1).1,
            '&' => (out.push(Tok::And), i += 1).1,
            '=' if chars.get(i + 1) == Some(&'>') => (out.push(Tok::Implies), i += 2).1,
            '<' if chars.get(i + 1) == Some(&'=') => (out.push(Tok::RevImplies), i += 2).1,
            _ if c.is_ascii_lowercase() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(match word.as_str() {
                    "v" => Tok::Or,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                });
            }
            _ if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
                    i += 1;
                }
                out.push(Tok::Number(chars[start..i].iter().collect()));
            }
            _ if c.is_ascii_alphabetic() => {
                return Err(err(format!("invalid character `{c}` (atom names are lowercase)")));
            }
            _ => return Err(err(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    atoms: &'a AtomTable,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &str, atoms: &'a AtomTable, line: usize) -> Result<Self> {
        Ok(Parser { toks: lex(src, line)?, pos: 0, atoms, line })
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        match self.bump() {
            Some(ref got) if got == t => Ok(()),
            Some(got) => self.err(format!("expected {}, found {}", t.describe(), got.describe())),
            None => self.err(format!("expected {}, found end of input", t.describe())),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected {} after end of expression", t.describe())),
        }
    }

    fn implication(&mut self) -> Result<Event> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Event::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Event> {
        let mut e = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            e = Event::or(e, rhs);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<Event> {
        let mut e = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            e = Event::and(e, rhs);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Event> {
        match self.bump() {
            Some(Tok::Not) => Ok(Event::not(self.unary()?)),
            Some(Tok::True) => Ok(Event::Top),
            Some(Tok::False) => Ok(Event::Bottom),
            Some(Tok::LParen) => {
                let e = self.implication()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match self.atoms.index_of(&name) {
                Some(i) => Ok(Event::atom(i)),
                None => self.err(format!("unknown atom `{name}`")),
            },
            Some(t) => self.err(format!("expected an event, found {}", t.describe())),
            None => self.err("expected an event, found end of input"),
        }
    }

    fn conditional_event(&mut self) -> Result<ConditionalEvent> {
        self.expect(&Tok::LParen)?;
        let consequent = self.implication()?;
        self.expect(&Tok::Bar)?;
        let antecedent = self.implication()?;
        self.expect(&Tok::RParen)?;
        Ok(ConditionalEvent::new(consequent, antecedent))
    }

    fn number(&mut self) -> Result<Rational> {
        match self.bump() {
            Some(Tok::Number(s)) => match s.parse::<Rational>() {
                Ok(r) => Ok(r),
                Err(e) => self.err(format!("bad number `{s}`: {e}")),
            },
            Some(t) => self.err(format!("expected a number, found {}", t.describe())),
            None => self.err("expected a number, found end of input"),
        }
    }

    fn conditional_constraint(&mut self) -> Result<ConditionalConstraint> {
        let cond = self.conditional_event()?;
        self.expect(&Tok::LBracket)?;
        let lower = self.number()?;
        self.expect(&Tok::Comma)?;
        let upper = self.number()?;
        self.expect(&Tok::RBracket)?;
        Ok(ConditionalConstraint::from_event(cond, lower, upper))
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses a knowledge base file. Bounds are checked later by validation,
/// so a reversed interval parses successfully.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase> {
    let mut kb = KnowledgeBase::new(AtomTable::default());
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let Some((head, rest)) = body.split_once(':') else {
            return Err(Error::Parse { line, message: "expected `atoms:`, `L:` or `P:`".into() });
        };
        match head.trim() {
            "atoms" => {
                for name in rest.split_whitespace() {
                    kb.atoms.push(name.to_string()).map_err(|e| Error::Parse { line, message: e.to_string() })?;
                }
            }
            "L" => {
                let mut p = Parser::new(rest, &kb.atoms, line)?;
                let first = p.disjunction()?;
                let constraint = if p.eat(&Tok::Implies) {
                    let consequent = p.implication()?;
                    LogicalConstraint::new(consequent, first)
                } else {
                    LogicalConstraint::new(first, Event::Top)
                };
                p.finish()?;
                kb.logical.push(constraint);
            }
            "P" => {
                let mut p = Parser::new(rest, &kb.atoms, line)?;
                let c = p.conditional_constraint()?;
                p.finish()?;
                kb.conditional.push(c);
            }
            other => {
                return Err(Error::Parse { line, message: format!("unknown line kind `{other}`") });
            }
        }
    }
    Ok(kb)
}

pub fn parse_event(atoms: &AtomTable, src: &str) -> Result<Event> {
    let mut p = Parser::new(src, atoms, 1)?;
    let e = p.implication()?;
    p.finish()?;
    Ok(e)
}

/// `(psi | phi)`.
pub fn parse_conditional_event(atoms: &AtomTable, src: &str) -> Result<ConditionalEvent> {
    let mut p = Parser::new(src, atoms, 1)?;
    let c = p.conditional_event()?;
    p.finish()?;
    Ok(c)
}

/// `(psi | phi) [l, u]`.
pub fn parse_conditional_constraint(atoms: &AtomTable, src: &str) -> Result<ConditionalConstraint> {
    let mut p = Parser::new(src, atoms, 1)?;
    let c = p.conditional_constraint()?;
    p.finish()?;
    Ok(c)
}

/// A classical default `psi <= phi`, returned as `(psi, phi)`.
pub fn parse_default(atoms: &AtomTable, src: &str) -> Result<(Event, Event)> {
    let mut p = Parser::new(src, atoms, 1)?;
    let consequent = p.implication()?;
    p.expect(&Tok::RevImplies)?;
    let antecedent = p.implication()?;
    p.finish()?;
    Ok((consequent, antecedent))
}

pub fn write_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    out.push_str("atoms:");
    for name in kb.atoms.names() {
        write!(out, " {name}").unwrap();
    }
    out.push('\n');
    for l in &kb.logical {
        writeln!(out, "L: {} => {}", l.antecedent.display(&kb.atoms), l.consequent.display(&kb.atoms)).unwrap();
    }
    for c in &kb.conditional {
        writeln!(out, "P: {}", c.display(&kb.atoms)).unwrap();
    }
    out
}
