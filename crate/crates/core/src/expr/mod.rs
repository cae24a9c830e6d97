//! Linear rank inequalities: a rational combination of entropy-style terms
//! read as the assertion `Σ terms ≥ 0`.
//!
//! Inequalities stated as `lhs ≤ rhs` are stored as the residual `rhs - lhs`.
//! [`RankExpression::desugar`] rewrites every term into joint ranks `H(S)` with
//! like supports merged; [`RankExpression::evaluate`] computes the exact residual
//! on a [`SubspaceAssignment`].

mod catalog;
mod parse;
pub mod search;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::subspace::SubspaceAssignment;
use crate::{Error, Rational, Result};

pub use catalog::{builtin, BUILTIN_NAMES};
pub use parse::parse_expression;
pub use search::{search_violation, LineSearch, RandomSearch, SearchStrategy, Violation};

pub type VarSet = BTreeSet<String>;

pub fn var_set<'a, I: IntoIterator<Item = &'a str>>(names: I) -> VarSet {
    names.into_iter().map(ToString::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// `H(S)`
    Joint(VarSet),
    /// `H(S|T)`
    Conditional(VarSet, VarSet),
    /// `I(S;T)`
    Mutual(VarSet, VarSet),
    /// `I(S;T|U)`
    CondMutual(VarSet, VarSet, VarSet),
}

impl TermKind {
    fn sets(&self) -> Vec<&VarSet> {
        match self {
            TermKind::Joint(s) => alloc::vec![s],
            TermKind::Conditional(s, t) | TermKind::Mutual(s, t) => alloc::vec![s, t],
            TermKind::CondMutual(s, t, u) => alloc::vec![s, t, u],
        }
    }

    /// Signed joint-rank expansion, before merging.
    fn expand(&self) -> Vec<(i64, VarSet)> {
        let union = |sets: &[&VarSet]| -> VarSet { sets.iter().flat_map(|s| s.iter().cloned()).collect() };
        match self {
            TermKind::Joint(s) => alloc::vec![(1, s.clone())],
            TermKind::Conditional(s, t) => alloc::vec![(1, union(&[s, t])), (-1, t.clone())],
            TermKind::Mutual(s, t) => alloc::vec![(1, s.clone()), (1, t.clone()), (-1, union(&[s, t]))],
            TermKind::CondMutual(s, t, u) => alloc::vec![
                (1, union(&[s, u])),
                (1, union(&[t, u])),
                (-1, u.clone()),
                (-1, union(&[s, t, u])),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntropyTerm {
    pub coeff: Rational,
    pub kind: TermKind,
}

impl EntropyTerm {
    pub fn new(coeff: Rational, kind: TermKind) -> Result<Self> {
        if coeff.is_zero() {
            return Err(Error::InvalidTerm("zero coefficient".to_string()));
        }
        if kind.sets().iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidTerm("empty variable list".to_string()));
        }
        Ok(EntropyTerm { coeff, kind })
    }

    pub fn joint(coeff: i64, vars: &[&str]) -> Self {
        EntropyTerm::new(
            Rational::from_integer(coeff),
            TermKind::Joint(var_set(vars.iter().copied())),
        )
        .expect("nonzero coefficient and nonempty support")
    }

    pub fn conditional(coeff: i64, s: &[&str], t: &[&str]) -> Self {
        EntropyTerm::new(
            Rational::from_integer(coeff),
            TermKind::Conditional(var_set(s.iter().copied()), var_set(t.iter().copied())),
        )
        .expect("nonzero coefficient and nonempty sets")
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> + '_ {
        self.kind.sets().into_iter().flat_map(|s| s.iter().map(String::as_str))
    }

    /// Exact value of the term (coefficient included) on an assignment.
    pub fn evaluate(&self, ctx: &SubspaceAssignment) -> Result<Rational> {
        fn v(s: &VarSet) -> Vec<&str> {
            s.iter().map(String::as_str).collect()
        }
        let rank = match &self.kind {
            TermKind::Joint(s) => ctx.joint_rank(v(s))?,
            TermKind::Conditional(s, t) => ctx.cond_rank(&v(s), &v(t))?,
            TermKind::Mutual(s, t) => ctx.mutual_rank(&v(s), &v(t))?,
            TermKind::CondMutual(s, t, u) => ctx.cond_mutual_rank(&v(s), &v(t), &v(u))?,
        };
        Ok(self.coeff * Rational::from_integer(rank as i64))
    }
}

/// Characteristics for which an inequality is claimed to be a linear rank inequality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Applicability {
    #[default]
    All,
    OnlyChar(Vec<u32>),
    ExceptChar(Vec<u32>),
}

impl Applicability {
    pub fn applies_to(&self, characteristic: u32) -> bool {
        match self {
            Applicability::All => true,
            Applicability::OnlyChar(ps) => ps.contains(&characteristic),
            Applicability::ExceptChar(ps) => !ps.contains(&characteristic),
        }
    }
}

impl fmt::Display for Applicability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ps: &[u32]| ps.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(",");
        match self {
            Applicability::All => write!(f, "all"),
            Applicability::OnlyChar(ps) => write!(f, "only-char {{{}}}", list(ps)),
            Applicability::ExceptChar(ps) => write!(f, "except-char {{{}}}", list(ps)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankExpression {
    name: String,
    variables: Vec<String>,
    terms: Vec<EntropyTerm>,
    applicability: Applicability,
}

impl RankExpression {
    /// Every variable a term mentions must be declared in `variables`.
    pub fn new(
        name: impl Into<String>,
        variables: Vec<String>,
        terms: Vec<EntropyTerm>,
        applicability: Applicability,
    ) -> Result<Self> {
        let declared: BTreeSet<&str> = variables.iter().map(String::as_str).collect();
        if declared.len() != variables.len() {
            return Err(Error::InvalidTerm("duplicate variable declaration".to_string()));
        }
        for t in &terms {
            if let Some(v) = t.variables().find(|v| !declared.contains(v)) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        Ok(RankExpression {
            name: name.into(),
            variables,
            terms,
            applicability,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> &[EntropyTerm] {
        &self.terms
    }

    pub fn applicability(&self) -> &Applicability {
        &self.applicability
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_applicability(mut self, applicability: Applicability) -> Self {
        self.applicability = applicability;
        self
    }

    /// Full text form with `name`, `applies` and `vars` headers; parses back to
    /// an identical expression.
    pub fn to_text(&self) -> String {
        let applies = match &self.applicability {
            Applicability::All => String::from("all"),
            Applicability::OnlyChar(ps) | Applicability::ExceptChar(ps) => {
                let tag = if matches!(self.applicability, Applicability::OnlyChar(_)) {
                    "only-char"
                } else {
                    "except-char"
                };
                let list: Vec<String> = ps.iter().map(|p| format!("{p}")).collect();
                format!("{tag} {}", list.join(","))
            }
        };
        format!(
            "name {}\napplies {}\nvars {}\n{}\n",
            self.name,
            applies,
            self.variables.join(","),
            self
        )
    }

    /// Joint-rank normal form. Supports are merged in order of first appearance,
    /// terms whose coefficients cancel are dropped, and `H(∅)` vanishes.
    pub fn desugar(&self) -> RankExpression {
        let mut order: Vec<VarSet> = Vec::new();
        let mut coeffs: BTreeMap<VarSet, Rational> = BTreeMap::new();
        for term in &self.terms {
            for (sign, support) in term.kind.expand() {
                if support.is_empty() {
                    continue;
                }
                let c = coeffs.entry(support.clone()).or_insert_with(|| {
                    order.push(support);
                    Rational::zero()
                });
                *c += term.coeff * Rational::from_integer(sign);
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|s| {
                let c = coeffs[&s];
                (!c.is_zero()).then_some(EntropyTerm {
                    coeff: c,
                    kind: TermKind::Joint(s),
                })
            })
            .collect();
        RankExpression {
            name: self.name.clone(),
            variables: self.variables.clone(),
            terms,
            applicability: self.applicability.clone(),
        }
    }

    /// Exact residual on `ctx`; the inequality holds iff the residual is `≥ 0`.
    pub fn evaluate(&self, ctx: &SubspaceAssignment) -> Result<Rational> {
        if let Some(v) = self.variables.iter().find(|v| ctx.get(v).is_err()) {
            return Err(Error::UnboundVariable(v.clone()));
        }
        self.terms
            .iter()
            .try_fold(Rational::zero(), |acc, t| Ok(acc + t.evaluate(ctx)?))
    }

    pub fn holds(&self, ctx: &SubspaceAssignment) -> Result<bool> {
        Ok(!self.evaluate(ctx)?.is_negative())
    }

    /// Bitmask form of the desugared expression with integer coefficients
    /// (scaled by the lcm of the denominators, which preserves the sign).
    pub fn compile(&self) -> Result<CompiledExpression> {
        if self.variables.len() > 32 {
            return Err(Error::Budget(format!(
                "{} variables exceed the 32-variable compiled form",
                self.variables.len()
            )));
        }
        let index: BTreeMap<&str, usize> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let desugared = self.desugar();
        let scale = desugared
            .terms
            .iter()
            .fold(1i64, |l, t| num_integer_lcm(l, *t.coeff.denom()));
        let terms = desugared
            .terms
            .iter()
            .map(|t| {
                let TermKind::Joint(s) = &t.kind else {
                    unreachable!("desugared terms are joint")
                };
                let mask = s.iter().fold(0u32, |m, v| m | 1 << index[v.as_str()]);
                let scaled = t.coeff * Rational::from_integer(scale);
                (scaled.to_integer(), mask)
            })
            .collect();
        Ok(CompiledExpression {
            variables: self.variables.clone(),
            terms,
            scale,
        })
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    (a / gcd(a, b) * b).abs()
}

/// Desugared expression as `(coefficient, variable bitmask)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledExpression {
    pub variables: Vec<String>,
    pub terms: Vec<(i64, u32)>,
    /// The original residual is `Σ coeff·H(mask) / scale`.
    pub scale: i64,
}

impl CompiledExpression {
    /// Scaled residual given a rank oracle over variable bitmasks.
    pub fn scaled_residual(&self, mut rank: impl FnMut(u32) -> usize) -> i64 {
        self.terms.iter().map(|&(c, m)| c * rank(m) as i64).sum()
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, s: &VarSet) -> fmt::Result {
    for (i, v) in s.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(v)?;
    }
    Ok(())
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKind::Joint(s) => {
                f.write_str("H(")?;
                write_set(f, s)?;
            }
            TermKind::Conditional(s, t) => {
                f.write_str("H(")?;
                write_set(f, s)?;
                f.write_str("|")?;
                write_set(f, t)?;
            }
            TermKind::Mutual(s, t) => {
                f.write_str("I(")?;
                write_set(f, s)?;
                f.write_str(";")?;
                write_set(f, t)?;
            }
            TermKind::CondMutual(s, t, u) => {
                f.write_str("I(")?;
                write_set(f, s)?;
                f.write_str(";")?;
                write_set(f, t)?;
                f.write_str("|")?;
                write_set(f, u)?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Display for EntropyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == Rational::from_integer(1) {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{} {}", self.coeff, self.kind)
        }
    }
}

/// Prints `t1 + t2 - t3 ... >= 0`, which [`parse_expression`] reads back.
impl fmt::Display for RankExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0 >= 0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let magnitude = EntropyTerm {
                coeff: t.coeff.abs(),
                kind: t.kind.clone(),
            };
            match (i, t.coeff.is_negative()) {
                (0, false) => write!(f, "{magnitude}")?,
                (0, true) => write!(f, "-{magnitude}")?,
                (_, false) => write!(f, " + {magnitude}")?,
                (_, true) => write!(f, " - {magnitude}")?,
            }
        }
        f.write_str(" >= 0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PrimeField;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn supports(e: &RankExpression) -> Vec<(Rational, String)> {
        e.terms.iter().map(|t| (t.coeff, format!("{}", t.kind))).collect()
    }

    #[test]
    fn desugar_mutual_information() {
        let e = parse_expression("I(A;B)").unwrap().desugar();
        assert_eq!(
            supports(&e),
            [(r(1), "H(A)".into()), (r(1), "H(B)".into()), (r(-1), "H(A,B)".into())]
        );
        let e = parse_expression("I(A;B|C)").unwrap().desugar();
        assert_eq!(
            supports(&e),
            [
                (r(1), "H(A,C)".into()),
                (r(1), "H(B,C)".into()),
                (r(-1), "H(C)".into()),
                (r(-1), "H(A,B,C)".into())
            ]
        );
        assert!(parse_expression("H(A|A)").unwrap().desugar().terms().is_empty());
    }

    #[test]
    fn evaluate_on_zero_assignment() {
        let f = PrimeField::new(5).unwrap();
        let mut ctx = SubspaceAssignment::new(f, 3);
        for v in ["A", "B", "C", "D"] {
            ctx.bind(v, crate::subspace::Subspace::zero(f, 3)).unwrap();
        }
        for name in BUILTIN_NAMES.iter().filter(|n| !n.contains("t8")) {
            assert_eq!(builtin(name).unwrap().evaluate(&ctx), Ok(r(0)));
        }
        let t8 = builtin("t8").unwrap();
        assert_eq!(t8.evaluate(&ctx), Err(Error::UnboundVariable("W".into())));
    }

    #[test]
    fn compile_scales_rationals() {
        let e = parse_expression("1/2 H(A) - 1/3 H(A,B)").unwrap();
        let c = e.compile().unwrap();
        assert_eq!(c.scale, 6);
        assert_eq!(c.terms, [(3, 0b01), (-2, 0b11)]);
    }

    #[test]
    fn undeclared_variables_rejected() {
        let t = EntropyTerm::joint(1, &["Q"]);
        assert_eq!(
            RankExpression::new("x", alloc::vec!["A".into()], alloc::vec![t], Applicability::All),
            Err(Error::UnknownVariable("Q".into()))
        );
    }

    #[test]
    fn applicability_tags() {
        assert!(Applicability::ExceptChar(alloc::vec![3]).applies_to(2));
        assert!(!Applicability::ExceptChar(alloc::vec![3]).applies_to(3));
        assert!(Applicability::OnlyChar(alloc::vec![3]).applies_to(3));
        assert!(!Applicability::OnlyChar(alloc::vec![3]).applies_to(5));
    }
}
