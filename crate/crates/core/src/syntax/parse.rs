use std::collections::BTreeMap;

use thiserror::Error;

use super::{reserved_index, var, Formula, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arity mismatch for `{name}` at offset {pos}: signature has {expected}, found {found}")]
    Arity { name: String, pos: usize, expected: usize, found: usize },
}

/// Predicate arities, fixed by first use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub arities: BTreeMap<Var, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn declare(&mut self, name: &Var, arity: usize, pos: usize) -> Result<(), ParseError> {
        match self.arities.get(name) {
            Some(&a) if a != arity => Err(ParseError::Arity {
                name: name.to_string(),
                pos,
                expected: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.clone(), arity);
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept the reserved `_vK` variable names. Used when reading
    /// certificates that contain eigenvariables.
    pub allow_reserved: bool,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, &mut Signature::new(), ParseOptions::default())
}

pub fn parse_with(
    text: &str,
    sig: &mut Signature,
    opts: ParseOptions,
) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, sig, opts, end: text.len() };
    let f = p.imp()?;
    if let Some(t) = p.peek() {
        return Err(p.err_at(t.pos, format!("unexpected {}", t.kind.describe())));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Question,
    Amp,
    Vee,
    Arrow,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::LParen => "`(`".into(),
            Kind::RParen => "`)`".into(),
            Kind::Comma => "`,`".into(),
            Kind::Dot => "`.`".into(),
            Kind::Tilde => "`~`".into(),
            Kind::Question => "`?`".into(),
            Kind::Amp => "`&`".into(),
            Kind::Vee => "`\\/`".into(),
            Kind::Arrow => "`->`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Tok {
    kind: Kind,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Kind::LParen,
            b')' => Kind::RParen,
            b',' => Kind::Comma,
            b'.' => Kind::Dot,
            b'~' => Kind::Tilde,
            b'?' => Kind::Question,
            b'&' => Kind::Amp,
            b'\\' if bytes.get(i + 1) == Some(&b'/') => {
                i += 1;
                Kind::Vee
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Kind::Arrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push(Tok { kind: Kind::Ident(text[start..i].to_string()), pos });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{ch}`") });
            }
        };
        i += 1;
        out.push(Tok { kind, pos });
    }
    Ok(out)
}

const KEYWORDS: [&str; 3] = ["bot", "forall", "iexists"];

struct Parser<'a> {
    toks: Vec<Tok>,
    i: usize,
    sig: &'a mut Signature,
    opts: ParseOptions,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn err_at(&self, pos: usize, msg: String) -> ParseError {
        ParseError::Syntax { pos, msg }
    }

    fn eat(&mut self, k: &Kind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(k) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, k: Kind) -> Result<(), ParseError> {
        if self.eat(&k) {
            Ok(())
        } else {
            let found = self.peek().map(|t| t.kind.describe()).unwrap_or("end of input".into());
            Err(self.err_at(self.pos(), format!("expected {}, found {found}", k.describe())))
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Kind::Arrow) {
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Kind::Vee) {
            let rhs = self.and()?;
            lhs = Formula::idisj(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Kind::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Kind::Tilde) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Kind::Question) {
            return Ok(Formula::question(self.unary()?));
        }
        self.primary()
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        let pos = self.pos();
        match self.peek().map(|t| t.kind.clone()) {
            Some(Kind::Ident(name)) => {
                self.i += 1;
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(self.err_at(pos, format!("keyword `{name}` used as a variable")));
                }
                if name.starts_with('_') {
                    let ok = self.opts.allow_reserved && reserved_index(&name).is_some();
                    if !ok {
                        return Err(self.err_at(pos, format!("`{name}` is a reserved name")));
                    }
                }
                Ok(var(&name))
            }
            other => Err(self.err_at(
                pos,
                format!(
                    "expected a variable, found {}",
                    other.map(|k| k.describe()).unwrap_or("end of input".into())
                ),
            )),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let tok = match self.peek() {
            Some(t) => t.kind.clone(),
            None => return Err(self.err_at(pos, "unexpected end of input".into())),
        };
        match tok {
            Kind::LParen => {
                self.i += 1;
                let f = self.imp()?;
                self.expect(Kind::RParen)?;
                Ok(f)
            }
            Kind::Ident(name) if name == "bot" => {
                self.i += 1;
                Ok(Formula::Bot)
            }
            Kind::Ident(name) if name == "forall" || name == "iexists" => {
                self.i += 1;
                let x = self.variable()?;
                self.expect(Kind::Dot)?;
                let body = self.imp()?;
                Ok(if name == "forall" {
                    Formula::forall_v(x, body)
                } else {
                    Formula::iexists_v(x, body)
                })
            }
            Kind::Ident(name) => {
                self.i += 1;
                if name.starts_with('_') {
                    return Err(self.err_at(pos, format!("`{name}` is a reserved name")));
                }
                let mut args = Vec::new();
                if self.eat(&Kind::LParen) {
                    if !self.eat(&Kind::RParen) {
                        loop {
                            args.push(self.variable()?);
                            if self.eat(&Kind::Comma) {
                                continue;
                            }
                            self.expect(Kind::RParen)?;
                            break;
                        }
                    }
                }
                let name = var(&name);
                self.sig.declare(&name, args.len(), pos)?;
                Ok(Formula::Atom(name, args))
            }
            other => Err(self.err_at(pos, format!("unexpected {}", other.describe()))),
        }
    }
}
