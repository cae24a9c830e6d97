//! Text grammar for rank expressions.
//!
//! ```text
//! file      := header* relation
//! header    := "name" IDENT NEWLINE | "vars" IDENT ("," IDENT)* NEWLINE
//!            | "applies" ("all" | "only-char" INT,* | "except-char" INT,*) NEWLINE
//! relation  := sum (("<=" | ">=") sum)?
//! sum       := ("+" | "-")? product (("+" | "-") product)*
//! product   := RATIONAL "*"? atom | atom | RATIONAL
//! atom      := "H(" list ("|" list)? ")" | "I(" list ";" list ("|" list)? ")" | "(" sum ")"
//! ```
//!
//! `#` starts a comment. A bare rational is only accepted when it is zero, so
//! `... >= 0` parses. Without a `vars` header, variables are declared in order
//! of first appearance; with one, any other name is an unknown-variable error.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Zero;

use super::{var_set, Applicability, EntropyTerm, RankExpression, TermKind, VarSet};
use crate::{Error, Rational, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Semi,
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    Le,
    Ge,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = first_line + li;
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
            match c {
                c if c.is_whitespace() => {}
                '(' => push(&mut out, Tok::LParen),
                ')' => push(&mut out, Tok::RParen),
                ',' => push(&mut out, Tok::Comma),
                ';' => push(&mut out, Tok::Semi),
                '|' => push(&mut out, Tok::Bar),
                '+' => push(&mut out, Tok::Plus),
                '-' => push(&mut out, Tok::Minus),
                '*' => push(&mut out, Tok::Star),
                '/' => push(&mut out, Tok::Slash),
                '≤' => push(&mut out, Tok::Le),
                '≥' => push(&mut out, Tok::Ge),
                '<' | '>' => {
                    if chars.get(i + 1) != Some(&'=') {
                        return Err(syntax(line, column, "expected `<=` or `>=`"));
                    }
                    push(&mut out, if c == '<' { Tok::Le } else { Tok::Ge });
                    i += 1;
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..=i].iter().collect();
                    let n = digits
                        .parse()
                        .map_err(|_| syntax(line, column, "integer literal out of range"))?;
                    push(&mut out, Tok::Int(n));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..=i].iter().collect()));
                }
                other => return Err(syntax(line, column, alloc::format!("unexpected character `{other}`"))),
            }
            i += 1;
        }
    }
    let (line, column) = out.last().map_or((first_line, 1), |s| (s.line, s.column + 1));
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    declared: Option<Vec<String>>,
    seen: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.column)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(alloc::format!("expected {what}")))
        }
    }

    fn relation(&mut self) -> Result<Vec<EntropyTerm>> {
        let lhs = self.sum()?;
        let terms = match self.peek() {
            Tok::Ge => {
                self.bump();
                let rhs = self.sum()?;
                lhs.into_iter().chain(negate(rhs)).collect()
            }
            Tok::Le => {
                self.bump();
                let rhs = self.sum()?;
                rhs.into_iter().chain(negate(lhs)).collect()
            }
            _ => lhs,
        };
        if *self.peek() != Tok::Eof {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(terms)
    }

    fn sum(&mut self) -> Result<Vec<EntropyTerm>> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1
            }
            Tok::Plus => {
                self.bump();
                1
            }
            _ => 1,
        };
        loop {
            for mut t in self.product()? {
                t.coeff *= Rational::from_integer(sign);
                terms.push(t);
            }
            sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => return Ok(terms),
            };
            self.bump();
        }
    }

    fn rational(&mut self) -> Result<Option<Rational>> {
        let Tok::Int(n) = *self.peek() else {
            return Ok(None);
        };
        self.bump();
        if *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Int(d) = *self.peek() else {
                return Err(self.err("expected denominator"));
            };
            if d == 0 {
                return Err(self.err("zero denominator"));
            }
            self.bump();
            return Ok(Some(Rational::new(n, d)));
        }
        Ok(Some(Rational::from_integer(n)))
    }

    fn product(&mut self) -> Result<Vec<EntropyTerm>> {
        let coeff = self.rational()?;
        if coeff.is_some() && *self.peek() == Tok::Star {
            self.bump();
        }
        let starts_atom = matches!(self.peek(), Tok::LParen | Tok::Ident(_));
        if !starts_atom {
            return match coeff {
                Some(c) if c.is_zero() => Ok(Vec::new()),
                Some(_) => Err(self.err("constant terms are not supported")),
                None => Err(self.err("expected a term")),
            };
        }
        let coeff = coeff.unwrap_or_else(|| Rational::from_integer(1));
        let atom = self.atom()?;
        Ok(atom
            .into_iter()
            .filter_map(|mut t| {
                t.coeff *= coeff;
                (!t.coeff.is_zero()).then_some(t)
            })
            .collect())
    }

    fn atom(&mut self) -> Result<Vec<EntropyTerm>> {
        let (line, column) = self.here();
        match self.bump() {
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(f) if f == "H" || f == "I" => {
                self.expect(Tok::LParen, "`(` after function name")?;
                let first = self.list()?;
                let kind = if f == "H" {
                    if *self.peek() == Tok::Bar {
                        self.bump();
                        TermKind::Conditional(first, self.list()?)
                    } else {
                        TermKind::Joint(first)
                    }
                } else {
                    self.expect(Tok::Semi, "`;` in I(S;T)")?;
                    let second = self.list()?;
                    if *self.peek() == Tok::Bar {
                        self.bump();
                        TermKind::CondMutual(first, second, self.list()?)
                    } else {
                        TermKind::Mutual(first, second)
                    }
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(alloc::vec![EntropyTerm {
                    coeff: Rational::from_integer(1),
                    kind
                }])
            }
            Tok::Ident(other) => Err(syntax(line, column, alloc::format!("unknown function `{other}`"))),
            _ => Err(syntax(line, column, "expected `H(`, `I(` or `(`")),
        }
    }

    fn list(&mut self) -> Result<VarSet> {
        let mut names = Vec::new();
        loop {
            let Tok::Ident(name) = self.peek().clone() else {
                return Err(self.err("expected a variable name"));
            };
            self.bump();
            self.declare(&name)?;
            names.push(name);
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        Ok(var_set(names.iter().map(String::as_str)))
    }

    fn declare(&mut self, name: &str) -> Result<()> {
        match &self.declared {
            Some(vars) if !vars.iter().any(|v| v == name) => Err(Error::UnknownVariable(name.to_string())),
            Some(_) => Ok(()),
            None => {
                if !self.seen.iter().any(|v| v == name) {
                    self.seen.push(name.to_string());
                }
                Ok(())
            }
        }
    }
}

fn negate(terms: Vec<EntropyTerm>) -> impl Iterator<Item = EntropyTerm> {
    terms.into_iter().map(|mut t| {
        t.coeff = -t.coeff;
        t
    })
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse one expression (see the module docs for the grammar).
pub fn parse_expression(text: &str) -> Result<RankExpression> {
    let mut name = String::from("custom");
    let mut declared: Option<Vec<String>> = None;
    let mut applicability = Applicability::All;
    let mut body_start = 0;
    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            body_start = i + 1;
            continue;
        }
        if let Some(rest) = line.strip_prefix("name ") {
            let rest = rest.trim();
            if rest.is_empty() || rest.contains(char::is_whitespace) {
                return Err(syntax(i + 1, 6, "expected a single expression name"));
            }
            name = rest.to_string();
        } else if let Some(rest) = line.strip_prefix("applies ") {
            applicability = parse_applicability(rest.trim())
                .ok_or_else(|| syntax(i + 1, 9, "expected `all`, `only-char P,..` or `except-char P,..`"))?;
        } else if let Some(rest) = line.strip_prefix("vars ") {
            let mut vars: Vec<String> = Vec::new();
            for v in rest.split(',').map(str::trim) {
                if !is_ident(v) {
                    return Err(syntax(i + 1, 6, alloc::format!("invalid variable name `{v}`")));
                }
                if vars.iter().any(|w| w == v) {
                    return Err(syntax(i + 1, 6, alloc::format!("duplicate variable `{v}`")));
                }
                vars.push(v.to_string());
            }
            declared = Some(vars);
        } else {
            break;
        }
        body_start = i + 1;
    }
    let body = lines.get(body_start..).unwrap_or(&[]).join("\n");
    let toks = lex(&body, body_start + 1)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        declared,
        seen: Vec::new(),
    };
    let terms = parser.relation()?;
    let variables = parser.declared.take().unwrap_or(parser.seen);
    RankExpression::new(name, variables, terms, applicability)
}

fn parse_applicability(text: &str) -> Option<Applicability> {
    let primes = |rest: &str| -> Option<Vec<u32>> { rest.split(',').map(|p| p.trim().parse().ok()).collect() };
    if text == "all" {
        Some(Applicability::All)
    } else if let Some(rest) = text.strip_prefix("only-char ") {
        Some(Applicability::OnlyChar(primes(rest)?))
    } else if let Some(rest) = text.strip_prefix("except-char ") {
        Some(Applicability::ExceptChar(primes(rest)?))
    } else {
        None
    }
}
