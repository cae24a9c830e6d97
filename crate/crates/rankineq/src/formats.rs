//! Line-oriented text formats for assignments, networks, codes and
//! distributions. Every format ignores blank lines and `#` comments, and each
//! has a writer whose output parses back to an equal value.
//!
//! ```text
//! # assignment            # network                  # code
//! field 3                 messages x,y               field 2
//! ambient 4               derive z <- x,y            k 1
//! A = span{(1,0,0,0)}     demand n5: y <- x,z        n 1
//! O = span{}              demand n6: x <- y,z        encode z: x=[1] y=[1]
//!                                                    decode n5: x=[-1] z=[1]
//! # distribution
//! vars A,B
//! atom 0,1 : 1/2
//! atom 1,0 : 1/2
//! ```
//!
//! Code matrices are row-major, rows separated by `;`, and entries may be
//! rationals such as `1/2`; they are reduced into the field when the code is
//! instantiated.

use std::fmt::Write as _;

use rankineq_core::entropy::JointDistribution;
use rankineq_core::network::{CodeSpec, LinearMap, Network, RationalMatrix};
use rankineq_core::subspace::{Subspace, SubspaceAssignment};
use rankineq_core::{PrimeField, Rational};

use crate::{Error, Result};

struct Ctx<'a> {
    origin: &'a str,
}

impl Ctx<'_> {
    fn fail(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Format {
            origin: self.origin.to_string(),
            line,
            message: message.into(),
        }
    }

    fn core<T>(&self, line: usize, r: rankineq_core::Result<T>) -> Result<T> {
        r.map_err(|e| self.fail(line, e.to_string()))
    }
}

/// Non-blank lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn names<'t>(cx: &Ctx, line: usize, list: &'t str) -> Result<Vec<&'t str>> {
    let out: Vec<&str> = list.split(',').map(str::trim).collect();
    match out.iter().find(|n| !is_ident(n)) {
        Some(bad) => Err(cx.fail(line, format!("`{bad}` is not a valid name"))),
        None => Ok(out),
    }
}

/// `a` or `a/b` with integer `a` and nonzero `b`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

fn keyword<'t>(line: &'t str, word: &str) -> Option<&'t str> {
    let rest = line.strip_prefix(word)?;
    (rest.is_empty() || rest.starts_with(char::is_whitespace)).then(|| rest.trim())
}

fn parse_uint(cx: &Ctx, line: usize, what: &str, s: &str) -> Result<u64> {
    s.parse()
        .map_err(|_| cx.fail(line, format!("{what} must be a nonnegative integer, got `{s}`")))
}

// ---------------------------------------------------------------------------
// Subspace assignments
// ---------------------------------------------------------------------------

pub fn parse_assignment(text: &str, origin: &str) -> Result<SubspaceAssignment> {
    let cx = Ctx { origin };
    let mut field = None;
    let mut ambient = None;
    let mut ctx: Option<SubspaceAssignment> = None;
    for (line, l) in content_lines(text) {
        if let Some(rest) = keyword(l, "field") {
            if ctx.is_some() || field.is_some() {
                return Err(cx.fail(line, "`field` must appear once, before any binding"));
            }
            field = Some(cx.core(line, PrimeField::new(parse_uint(&cx, line, "field", rest)?))?);
        } else if let Some(rest) = keyword(l, "ambient") {
            if ctx.is_some() || ambient.is_some() {
                return Err(cx.fail(line, "`ambient` must appear once, before any binding"));
            }
            ambient = Some(parse_uint(&cx, line, "ambient", rest)? as usize);
        } else if let Some((name, rhs)) = l.split_once('=') {
            let name = name.trim();
            if !is_ident(name) {
                return Err(cx.fail(line, format!("`{name}` is not a valid name")));
            }
            let (Some(f), Some(d)) = (field, ambient) else {
                return Err(cx.fail(line, "`field` and `ambient` must precede bindings"));
            };
            let ctx = ctx.get_or_insert_with(|| SubspaceAssignment::new(f, d));
            if ctx.get(name).is_ok() {
                return Err(cx.fail(line, format!("`{name}` is bound twice")));
            }
            let vectors = parse_span(&cx, line, rhs.trim())?;
            if let Some(v) = vectors.iter().find(|v| v.len() != d) {
                return Err(cx.fail(
                    line,
                    format!("vector of length {} in a space of dimension {d}", v.len()),
                ));
            }
            let s = cx.core(line, Subspace::span(f, d, &vectors))?;
            cx.core(line, ctx.bind(name, s))?;
        } else {
            return Err(cx.fail(line, format!("unrecognized line `{l}`")));
        }
    }
    match (ctx, field, ambient) {
        (Some(ctx), _, _) => Ok(ctx),
        (None, Some(f), Some(d)) => Ok(SubspaceAssignment::new(f, d)),
        _ => Err(cx.fail(0, "missing `field` or `ambient` header")),
    }
}

/// `span{}` or `span{(1,0); (0,1)}`.
fn parse_span(cx: &Ctx, line: usize, s: &str) -> Result<Vec<Vec<i64>>> {
    let inner = s
        .strip_prefix("span")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('{'))
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| cx.fail(line, "expected `span{...}`"))?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(';')
        .map(|v| {
            let v = v.trim();
            let body = v
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| cx.fail(line, format!("expected a parenthesized vector, got `{v}`")))?;
            body.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| cx.fail(line, format!("`{}` is not an integer", x.trim())))
                })
                .collect()
        })
        .collect()
}

/// Canonical form: each subspace by its reduced basis.
pub fn write_assignment(ctx: &SubspaceAssignment) -> String {
    let mut out = format!("field {}\nambient {}\n", ctx.field().modulus(), ctx.ambient_dim());
    for (name, s) in ctx.iter() {
        let vectors: Vec<String> = s
            .basis()
            .row_iter()
            .map(|r| format!("({})", r.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        let _ = writeln!(out, "{name} = span{{{}}}", vectors.join("; "));
    }
    out
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

pub fn parse_network(text: &str, origin: &str) -> Result<Network> {
    let cx = Ctx { origin };
    let mut net: Option<Network> = None;
    for (line, l) in content_lines(text) {
        if let Some(rest) = keyword(l, "messages") {
            if net.is_some() {
                return Err(cx.fail(line, "`messages` must appear once, first"));
            }
            net = Some(cx.core(line, Network::new(&names(&cx, line, rest)?))?);
            continue;
        }
        let net = net
            .as_mut()
            .ok_or_else(|| cx.fail(line, "`messages` must come first"))?;
        if let Some(rest) = keyword(l, "derive") {
            let (name, inputs) = rest
                .split_once("<-")
                .ok_or_else(|| cx.fail(line, "expected `derive NAME <- INPUTS`"))?;
            let name = name.trim();
            if !is_ident(name) {
                return Err(cx.fail(line, format!("`{name}` is not a valid name")));
            }
            cx.core(line, net.derive(name, &names(&cx, line, inputs)?))?;
        } else if let Some(rest) = keyword(l, "demand") {
            let (label, body) = rest
                .split_once(':')
                .ok_or_else(|| cx.fail(line, "expected `demand LABEL: TARGET <- INPUTS`"))?;
            let (target, inputs) = body
                .split_once("<-")
                .ok_or_else(|| cx.fail(line, "expected `demand LABEL: TARGET <- INPUTS`"))?;
            let (label, target) = (label.trim(), target.trim());
            if !is_ident(label) {
                return Err(cx.fail(line, format!("`{label}` is not a valid label")));
            }
            cx.core(line, net.demand(label, target, &names(&cx, line, inputs)?))?;
        } else {
            return Err(cx.fail(line, format!("unrecognized line `{l}`")));
        }
    }
    net.ok_or_else(|| cx.fail(0, "missing `messages` line"))
}

pub fn write_network(net: &Network) -> String {
    let mut out = format!("messages {}\n", net.messages().join(","));
    for d in net.derived() {
        let _ = writeln!(out, "derive {} <- {}", d.name, d.inputs.join(","));
    }
    for d in net.demands() {
        let _ = writeln!(out, "demand {}: {} <- {}", d.label, d.target, d.inputs.join(","));
    }
    out
}

// ---------------------------------------------------------------------------
// Linear codes
// ---------------------------------------------------------------------------

pub fn parse_code(text: &str, origin: &str) -> Result<CodeSpec> {
    let cx = Ctx { origin };
    let (mut field, mut k, mut n) = (None, None, None);
    let mut encoders = Vec::new();
    let mut decoders = Vec::new();
    for (line, l) in content_lines(text) {
        for (word, slot) in [("field", &mut field), ("k", &mut k), ("n", &mut n)] {
            if let Some(rest) = keyword(l, word) {
                if slot.is_some() {
                    return Err(cx.fail(line, format!("`{word}` given twice")));
                }
                *slot = Some(parse_uint(&cx, line, word, rest)?);
            }
        }
        if ["field", "k", "n"].iter().any(|w| keyword(l, w).is_some()) {
            continue;
        }
        let (list, rest) = if let Some(rest) = keyword(l, "encode") {
            (&mut encoders, rest)
        } else if let Some(rest) = keyword(l, "decode") {
            (&mut decoders, rest)
        } else {
            return Err(cx.fail(line, format!("unrecognized line `{l}`")));
        };
        let (owner, terms) = rest
            .split_once(':')
            .ok_or_else(|| cx.fail(line, "expected `encode NAME: VAR=[...] ...`"))?;
        let owner = owner.trim();
        if !is_ident(owner) {
            return Err(cx.fail(line, format!("`{owner}` is not a valid name")));
        }
        list.push((owner.to_string(), parse_terms(&cx, line, terms)?));
    }
    let need = |v: Option<u64>, w: &str| v.ok_or_else(|| cx.fail(0, format!("missing `{w}` line")));
    let default_field = need(field, "field")?;
    cx.core(0, PrimeField::new(default_field))?;
    let (k, n) = (need(k, "k")? as usize, need(n, "n")? as usize);
    if k == 0 || n == 0 {
        return Err(cx.fail(0, "k and n must be positive"));
    }
    Ok(CodeSpec {
        default_field,
        k,
        n,
        encoders,
        decoders,
    })
}

/// `A=[1 0; 0 1] B=[1/2]`.
fn parse_terms(cx: &Ctx, line: usize, mut s: &str) -> Result<LinearMap<RationalMatrix>> {
    let mut out: LinearMap<RationalMatrix> = Vec::new();
    loop {
        s = s.trim_start();
        if s.is_empty() {
            return Ok(out);
        }
        let (name, rest) = s
            .split_once('=')
            .ok_or_else(|| cx.fail(line, format!("expected `VAR=[...]`, got `{s}`")))?;
        let name = name.trim();
        if !is_ident(name) {
            return Err(cx.fail(line, format!("`{name}` is not a valid name")));
        }
        if out.iter().any(|(n, _)| n == name) {
            return Err(cx.fail(line, format!("`{name}` has two matrices")));
        }
        let body = rest
            .trim_start()
            .strip_prefix('[')
            .ok_or_else(|| cx.fail(line, format!("expected `[` after `{name}=`")))?;
        let (matrix, rest) = body
            .split_once(']')
            .ok_or_else(|| cx.fail(line, "unterminated matrix"))?;
        let rows = matrix
            .split(';')
            .map(|row| {
                row.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|x| !x.is_empty())
                    .map(|x| parse_rational(x).ok_or_else(|| cx.fail(line, format!("`{x}` is not a rational"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().any(Vec::is_empty) {
            return Err(cx.fail(line, format!("empty row in the matrix for `{name}`")));
        }
        out.push((name.to_string(), cx.core(line, RationalMatrix::from_rows(rows))?));
        s = rest;
    }
}

pub fn write_code(spec: &CodeSpec) -> String {
    let mut out = format!("field {}\nk {}\nn {}\n", spec.default_field, spec.k, spec.n);
    for (word, list) in [("encode", &spec.encoders), ("decode", &spec.decoders)] {
        for (owner, terms) in list {
            let terms: Vec<String> = terms.iter().map(|(v, m)| format!("{v}={m}")).collect();
            let _ = writeln!(out, "{word} {owner}: {}", terms.join(" "));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

pub fn parse_distribution(text: &str, origin: &str) -> Result<JointDistribution> {
    let cx = Ctx { origin };
    let mut vars: Option<Vec<String>> = None;
    let mut atoms = Vec::new();
    let mut last = 0;
    for (line, l) in content_lines(text) {
        last = line;
        if let Some(rest) = keyword(l, "vars") {
            if vars.is_some() {
                return Err(cx.fail(line, "`vars` given twice"));
            }
            vars = Some(names(&cx, line, rest)?.into_iter().map(String::from).collect());
        } else if let Some(rest) = keyword(l, "atom") {
            if vars.is_none() {
                return Err(cx.fail(line, "`vars` must come first"));
            }
            let (values, prob) = rest
                .split_once(':')
                .ok_or_else(|| cx.fail(line, "expected `atom V1,V2,... : PROB`"))?;
            let values = values
                .split(',')
                .map(|v| parse_uint(&cx, line, "atom value", v.trim()))
                .collect::<Result<Vec<_>>>()?;
            let prob =
                parse_rational(prob).ok_or_else(|| cx.fail(line, format!("`{}` is not a rational", prob.trim())))?;
            atoms.push((values, prob));
        } else {
            return Err(cx.fail(line, format!("unrecognized line `{l}`")));
        }
    }
    let vars = vars.ok_or_else(|| cx.fail(0, "missing `vars` line"))?;
    cx.core(last, JointDistribution::new(vars, atoms))
}

pub fn write_distribution(d: &JointDistribution) -> String {
    let mut out = format!("vars {}\n", d.variables().join(","));
    for (values, prob) in d.atoms() {
        let values: Vec<String> = values.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "atom {} : {prob}", values.join(","));
    }
    out
}
