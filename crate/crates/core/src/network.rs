//! Coding networks as constraint systems, linear codes over them, and
//! capacity bounds.
//!
//! A [`Network`] lists its messages, the derived (edge) variables together with
//! the variables each is computed from, and its demands. This is exactly the
//! information capacity arguments consume: every derived variable is a function
//! of its inputs, and every demand is a function of its inputs. Messages carry
//! `k` symbols and derived variables `n` symbols. Graph topology beyond these
//! functional dependencies is not modelled, and only linear codes are checked.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::expr::{Applicability, RankExpression, TermKind, VarSet};
use crate::subspace::{Subspace, SubspaceAssignment};
use crate::{Error, Matrix, PrimeField, Rational, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedVar {
    pub name: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub label: String,
    pub target: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    messages: Vec<String>,
    derived: Vec<DerivedVar>,
    demands: Vec<Demand>,
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl Network {
    pub fn new(messages: &[&str]) -> Result<Self> {
        let mut net = Network::default();
        for m in messages {
            if net.is_declared(m) {
                return Err(Error::DuplicateLabel(m.to_string()));
            }
            net.messages.push(m.to_string());
        }
        Ok(net)
    }

    /// Declare `name` as computed from `inputs`, all of which must already
    /// exist; this keeps the network acyclic.
    pub fn derive(&mut self, name: &str, inputs: &[&str]) -> Result<()> {
        if self.is_declared(name) {
            return Err(Error::DuplicateLabel(name.to_string()));
        }
        self.check_inputs(name, inputs)?;
        self.derived.push(DerivedVar {
            name: name.to_string(),
            inputs: owned(inputs),
        });
        Ok(())
    }

    pub fn demand(&mut self, label: &str, target: &str, inputs: &[&str]) -> Result<()> {
        if self.demands.iter().any(|d| d.label == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        if !self.is_message(target) {
            return Err(Error::InvalidNetwork(format!(
                "demand {label} targets `{target}`, which is not a message"
            )));
        }
        self.check_inputs(label, inputs)?;
        self.demands.push(Demand {
            label: label.to_string(),
            target: target.to_string(),
            inputs: owned(inputs),
        });
        Ok(())
    }

    fn check_inputs(&self, owner: &str, inputs: &[&str]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for i in inputs {
            if !self.is_declared(i) {
                return Err(Error::InvalidNetwork(format!("{owner} reads undeclared `{i}`")));
            }
            if !seen.insert(*i) {
                return Err(Error::InvalidNetwork(format!("{owner} lists `{i}` twice")));
            }
        }
        Ok(())
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn derived(&self) -> &[DerivedVar] {
        &self.derived
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn is_message(&self, name: &str) -> bool {
        self.messages.iter().any(|m| m == name)
    }

    pub fn derived_var(&self, name: &str) -> Option<&DerivedVar> {
        self.derived.iter().find(|d| d.name == name)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.is_message(name) || self.derived_var(name).is_some()
    }

    pub fn find_demand(&self, label: &str) -> Result<&Demand> {
        self.demands
            .iter()
            .find(|d| d.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Messages a variable depends on, transitively through derived inputs.
    pub fn message_closure(&self, name: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![name.to_string()];
        let mut visited = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if !visited.insert(v.clone()) {
                continue;
            }
            if self.is_message(&v) {
                out.insert(v);
            } else if let Some(d) = self.derived_var(&v) {
                stack.extend(d.inputs.iter().cloned());
            }
        }
        out
    }

    /// The functional dependencies every solution satisfies: one per derived
    /// variable (`H(d | inputs) = 0`) and one per demand (`H(target | inputs) = 0`).
    pub fn functional_constraints(&self) -> Vec<Constraint<'_>> {
        let derived = self.derived.iter().map(|d| Constraint {
            determined: &d.name,
            inputs: &d.inputs,
            source: ConstraintSource::Derive,
        });
        let demands = self.demands.iter().map(|d| Constraint {
            determined: &d.target,
            inputs: &d.inputs,
            source: ConstraintSource::Demand(&d.label),
        });
        derived.chain(demands).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSource<'a> {
    Derive,
    Demand(&'a str),
}

/// `determined` is a function of `inputs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint<'a> {
    pub determined: &'a str,
    pub inputs: &'a [String],
    pub source: ConstraintSource<'a>,
}

impl fmt::Display for Constraint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            ConstraintSource::Derive => write!(f, "derive {} <- {}", self.determined, self.inputs.join(",")),
            ConstraintSource::Demand(l) => write!(f, "demand {l}: {} <- {}", self.determined, self.inputs.join(",")),
        }
    }
}

pub const BUILTIN_NETWORKS: [&str; 3] = ["butterfly", "t8", "non-t8"];

pub fn builtin_network(name: &str) -> Result<Network> {
    match name {
        "butterfly" => {
            let mut net = Network::new(&["x", "y"])?;
            net.derive("z", &["x", "y"])?;
            net.demand("n5", "y", &["x", "z"])?;
            net.demand("n6", "x", &["y", "z"])?;
            Ok(net)
        }
        "t8" => {
            let mut net = Network::new(&["A", "B", "C", "D"])?;
            net.derive("Z", &["A", "B", "C"])?;
            net.derive("W", &["B", "C", "D"])?;
            net.derive("X", &["A", "C", "D"])?;
            net.derive("Y", &["W", "X", "Z"])?;
            net.demand("n9", "A", &["B", "D", "Y"])?;
            net.demand("n10", "D", &["A", "W", "Z"])?;
            net.demand("n11", "C", &["D", "Y", "Z"])?;
            net.demand("n12", "B", &["D", "X", "Z"])?;
            net.demand("n13", "C", &["B", "X", "Y"])?;
            net.demand("n14", "C", &["A", "W", "Y"])?;
            net.demand("n15", "B", &["A", "W", "X"])?;
            Ok(net)
        }
        "non-t8" => {
            let mut net = Network::new(&["A", "B", "C", "D"])?;
            net.derive("W", &["B", "C", "D"])?;
            net.derive("X", &["A", "C", "D"])?;
            net.derive("Y", &["A", "B", "D"])?;
            net.derive("Z", &["A", "B", "C"])?;
            net.demand("n9", "A", &["B", "W", "X"])?;
            net.demand("n10", "C", &["A", "W", "Y"])?;
            net.demand("n11", "B", &["C", "X", "Y"])?;
            net.demand("n12", "D", &["A", "W", "Z"])?;
            net.demand("n13", "B", &["D", "X", "Z"])?;
            net.demand("n14", "C", &["D", "Y", "Z"])?;
            net.demand("n15", "A", &["W", "X", "Y", "Z"])?;
            Ok(net)
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Linear codes
// ---------------------------------------------------------------------------

/// A matrix of rational literals, interpreted in a field on demand so the
/// same code text can be checked over several characteristics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix literal".to_string()));
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn scalar(value: Rational) -> Self {
        RationalMatrix {
            rows: 1,
            cols: 1,
            entries: alloc::vec![value],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries[r * self.cols + c]
    }

    /// Reduce into `GF(p)`; fails with a missing-inverse error when a
    /// denominator vanishes mod `p`.
    pub fn to_field(&self, field: PrimeField) -> Result<Matrix> {
        let entries = self
            .entries
            .iter()
            .map(|&r| field.from_rational(r))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_residues(field, self.rows, self.cols, entries)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.entries[r * self.cols + c])?;
            }
        }
        f.write_str("]")
    }
}

/// Per-input coefficient matrices of one linear function.
pub type LinearMap<M> = Vec<(String, M)>;

/// A linear code as written: rational literals plus a default field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub default_field: u64,
    pub k: usize,
    pub n: usize,
    /// Keyed by derived variable name.
    pub encoders: Vec<(String, LinearMap<RationalMatrix>)>,
    /// Keyed by demand label.
    pub decoders: Vec<(String, LinearMap<RationalMatrix>)>,
}

impl CodeSpec {
    pub fn instantiate(&self, field: PrimeField) -> Result<LinearCode> {
        let convert = |maps: &[(String, LinearMap<RationalMatrix>)]| -> Result<Vec<(String, LinearMap<Matrix>)>> {
            maps.iter()
                .map(|(owner, terms)| {
                    let terms = terms
                        .iter()
                        .map(|(input, m)| Ok((input.clone(), m.to_field(field)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((owner.clone(), terms))
                })
                .collect()
        };
        Ok(LinearCode {
            field,
            k: self.k,
            n: self.n,
            encoders: convert(&self.encoders)?,
            decoders: convert(&self.decoders)?,
        })
    }
}

/// A `(k, n)` linear code over a prime field. Each derived variable's vector is
/// `Σ M_i · input_i` over its encoder terms; each demand decodes likewise.
/// Inputs without a term contribute nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    pub field: PrimeField,
    pub k: usize,
    pub n: usize,
    pub encoders: Vec<(String, LinearMap<Matrix>)>,
    pub decoders: Vec<(String, LinearMap<Matrix>)>,
}

impl LinearCode {
    pub fn encoder(&self, derived: &str) -> Option<&LinearMap<Matrix>> {
        self.encoders.iter().find(|(d, _)| d == derived).map(|(_, m)| m)
    }

    pub fn decoder(&self, label: &str) -> Option<&LinearMap<Matrix>> {
        self.decoders.iter().find(|(d, _)| d == label).map(|(_, m)| m)
    }

    fn width(&self, net: &Network, var: &str) -> usize {
        if net.is_message(var) {
            self.k
        } else {
            self.n
        }
    }
}

pub const BUILTIN_CODES: [&str; 3] = ["butterfly", "t8-gf3", "non-t8"];

fn scalar_map(terms: &[(&str, Rational)]) -> LinearMap<RationalMatrix> {
    terms
        .iter()
        .map(|(v, c)| (v.to_string(), RationalMatrix::scalar(*c)))
        .collect()
}

fn scalar_code(
    default_field: u64,
    encoders: &[(&str, &[(&str, Rational)])],
    decoders: &[(&str, &[(&str, Rational)])],
) -> CodeSpec {
    let build = |list: &[(&str, &[(&str, Rational)])]| {
        list.iter()
            .map(|(owner, terms)| (owner.to_string(), scalar_map(terms)))
            .collect()
    };
    CodeSpec {
        default_field,
        k: 1,
        n: 1,
        encoders: build(encoders),
        decoders: build(decoders),
    }
}

/// Scalar (`k = n = 1`) codes: `butterfly` (`z = x + y`, default GF(2)),
/// `t8-gf3` (the characteristic-3 solution of the T8 network) and `non-t8`
/// (the solution of the non-T8 network for characteristic other than 3,
/// default GF(5)).
pub fn builtin_code(name: &str) -> Result<CodeSpec> {
    let one = Rational::from_integer(1);
    let neg = Rational::from_integer(-1);
    let half = Rational::new(1, 2);
    let third = Rational::new(1, 3);
    match name {
        "butterfly" => Ok(scalar_code(
            2,
            &[("z", &[("x", one), ("y", one)])],
            &[("n5", &[("x", neg), ("z", one)]), ("n6", &[("y", neg), ("z", one)])],
        )),
        "t8-gf3" => Ok(scalar_code(
            3,
            &[
                ("Z", &[("A", one), ("B", one), ("C", one)]),
                ("W", &[("B", one), ("C", one), ("D", one)]),
                ("X", &[("A", one), ("C", one), ("D", one)]),
                ("Y", &[("W", one), ("X", one), ("Z", one)]),
            ],
            &[
                ("n9", &[("Y", half), ("B", neg), ("D", neg)]),
                ("n10", &[("W", one), ("Z", neg), ("A", one)]),
                ("n11", &[("Z", one), ("Y", -half), ("D", one)]),
                ("n12", &[("Z", one), ("X", neg), ("D", one)]),
                ("n13", &[("X", one), ("Y", -half), ("B", one)]),
                ("n14", &[("W", one), ("Y", -half), ("A", one)]),
                ("n15", &[("W", one), ("X", neg), ("A", one)]),
            ],
        )),
        "non-t8" => Ok(scalar_code(
            5,
            &[
                ("W", &[("B", one), ("C", one), ("D", one)]),
                ("X", &[("A", one), ("C", one), ("D", one)]),
                ("Y", &[("A", one), ("B", one), ("D", one)]),
                ("Z", &[("A", one), ("B", one), ("C", one)]),
            ],
            &[
                ("n9", &[("X", one), ("W", neg), ("B", one)]),
                ("n10", &[("W", one), ("Y", neg), ("A", one)]),
                ("n11", &[("Y", one), ("X", neg), ("C", one)]),
                ("n12", &[("W", one), ("Z", neg), ("A", one)]),
                ("n13", &[("Z", one), ("X", neg), ("D", one)]),
                ("n14", &[("Z", one), ("Y", neg), ("D", one)]),
                (
                    "n15",
                    &[("X", third), ("Y", third), ("Z", third), ("W", Rational::new(-2, 3))],
                ),
            ],
        )),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// `k x k·|messages|` matrix selecting message `m` from the stacked message vector.
pub fn message_selector(net: &Network, code: &LinearCode, m: &str) -> Result<Matrix> {
    let j = net
        .messages
        .iter()
        .position(|x| x == m)
        .ok_or_else(|| Error::UnknownVariable(m.to_string()))?;
    let mut s = Matrix::zeros(code.field, code.k, code.k * net.messages.len());
    for i in 0..code.k {
        s.set(i, j * code.k + i, 1);
    }
    Ok(s)
}

/// Evaluate a linear map on global matrices of its inputs.
fn apply(
    net: &Network,
    code: &LinearCode,
    owner: &str,
    allowed: &[String],
    out_rows: usize,
    map: &LinearMap<Matrix>,
    globals: &BTreeMap<String, Matrix>,
) -> Result<Matrix> {
    let width = code.k * net.messages.len();
    let mut acc = Matrix::zeros(code.field, out_rows, width);
    for (input, m) in map {
        if !allowed.contains(input) {
            return Err(Error::ShapeMismatch(format!(
                "{owner} has a term for `{input}`, which is not one of its inputs"
            )));
        }
        let expected = (out_rows, code.width(net, input));
        if (m.rows(), m.cols()) != expected {
            return Err(Error::ShapeMismatch(format!(
                "{owner}: matrix for `{input}` is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                expected.0,
                expected.1
            )));
        }
        if m.field() != code.field {
            return Err(Error::FieldMismatch(code.field.modulus(), m.field().modulus()));
        }
        acc = acc.add(&m.mul(&globals[input.as_str()])?)?;
    }
    Ok(acc)
}

fn check_owners(kind: &str, maps: &[(String, LinearMap<Matrix>)], known: &[&str]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (owner, _) in maps {
        if !known.contains(&owner.as_str()) {
            return Err(Error::ShapeMismatch(format!("{kind} for unknown `{owner}`")));
        }
        if !seen.insert(owner) {
            return Err(Error::ShapeMismatch(format!("two {kind}s for `{owner}`")));
        }
    }
    Ok(())
}

/// Global `n x k·|messages|` map of every derived variable, composing the
/// local encoders in declaration order. Messages map to their selectors.
pub fn compose_global(net: &Network, code: &LinearCode) -> Result<BTreeMap<String, Matrix>> {
    let derived_names: Vec<&str> = net.derived.iter().map(|d| d.name.as_str()).collect();
    check_owners("encoder", &code.encoders, &derived_names)?;
    let mut globals = BTreeMap::new();
    for m in &net.messages {
        globals.insert(m.clone(), message_selector(net, code, m)?);
    }
    for d in &net.derived {
        let map = code
            .encoder(&d.name)
            .ok_or_else(|| Error::ShapeMismatch(format!("no encoder for `{}`", d.name)))?;
        let g = apply(net, code, &d.name, &d.inputs, code.n, map, &globals)?;
        globals.insert(d.name.clone(), g);
    }
    Ok(globals)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVerdict {
    pub label: String,
    pub target: String,
    /// Decoded map minus the selector of the target; zero iff the demand is met.
    pub residual: Matrix,
}

impl DemandVerdict {
    pub fn ok(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub demands: Vec<DemandVerdict>,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        self.demands.iter().all(DemandVerdict::ok)
    }

    pub fn failing(&self) -> impl Iterator<Item = &DemandVerdict> + '_ {
        self.demands.iter().filter(|d| !d.ok())
    }
}

/// Check every demand decodes its message exactly, as an identity of global
/// linear maps. Results are in demand declaration order.
pub fn verify_solution(net: &Network, code: &LinearCode) -> Result<Verdict> {
    let globals = compose_global(net, code)?;
    let labels: Vec<&str> = net.demands.iter().map(|d| d.label.as_str()).collect();
    check_owners("decoder", &code.decoders, &labels)?;
    let demands = net
        .demands
        .iter()
        .map(|d| {
            let map = code
                .decoder(&d.label)
                .ok_or_else(|| Error::ShapeMismatch(format!("no decoder for demand {}", d.label)))?;
            let decoded = apply(net, code, &d.label, &d.inputs, code.k, map, &globals)?;
            Ok(DemandVerdict {
                label: d.label.clone(),
                target: d.target.clone(),
                residual: decoded.sub(&globals[d.target.as_str()])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Verdict { demands })
}

/// Instantiate literals over `field`, then [`verify_solution`].
pub fn verify_code_spec(net: &Network, spec: &CodeSpec, field: PrimeField) -> Result<Verdict> {
    verify_solution(net, &spec.instantiate(field)?)
}

/// Subspaces of `GF(p)^(k·|messages|)` induced by a code: each variable maps
/// to the row space of its global map.
pub fn induced_assignment(net: &Network, code: &LinearCode) -> Result<SubspaceAssignment> {
    let globals = compose_global(net, code)?;
    let mut ctx = SubspaceAssignment::new(code.field, code.k * net.messages.len());
    for (name, g) in &globals {
        ctx.bind(name.clone(), Subspace::row_space(g))?;
    }
    Ok(ctx)
}

// ---------------------------------------------------------------------------
// Capacity bounds
// ---------------------------------------------------------------------------

/// An upper bound `k/n ≤ value` on linear coding rates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityBound {
    pub value: Rational,
    pub provenance: String,
    pub trace: Vec<String>,
    /// Characteristics for which the bound is established.
    pub applicability: Applicability,
}

fn fmt_set(s: &VarSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

/// Why `H(s | given) = 0`, if a single network constraint shows it.
fn certify(net: &Network, s: &str, given: &VarSet) -> Option<String> {
    if given.contains(s) {
        return Some(format!("{s} is conditioned on"));
    }
    net.functional_constraints()
        .into_iter()
        .find(|c| c.determined == s && c.inputs.iter().all(|i| given.contains(i)))
        .map(|c| c.to_string())
}

/// Reduce a catalog inequality to a rate bound on `net`.
///
/// Every conditional term must be zeroed by a network constraint, the only
/// non-singleton joint term allowed is the full message set (which splits by
/// message independence), then `H(message) = k` and `H(edge) ≤ n` turn the
/// residual `Σ c_e H(e) + Σ c_m H(m) ≥ 0` into `k/n ≤ Σ c_e / (-Σ c_m)`.
/// `var_map` renames inequality variables to network names (missing entries
/// map to themselves).
pub fn capacity_bound_from_inequality(
    net: &Network,
    expr: &RankExpression,
    var_map: &BTreeMap<String, String>,
) -> Result<CapacityBound> {
    let rename = |v: &String| -> Result<String> {
        let target = var_map.get(v).unwrap_or(v);
        if !net.is_declared(target) {
            return Err(Error::UnknownVariable(target.clone()));
        }
        Ok(target.clone())
    };
    let rename_set = |s: &VarSet| -> Result<VarSet> { s.iter().map(rename).collect() };
    for v in expr.variables() {
        rename(v)?;
    }

    let mut trace = Vec::new();
    let mut joint: BTreeMap<VarSet, Rational> = BTreeMap::new();
    let mut add = |s: VarSet, c: Rational| {
        *joint.entry(s).or_insert_with(Rational::zero) += c;
    };
    for term in expr.terms() {
        match &term.kind {
            TermKind::Joint(s) => add(rename_set(s)?, term.coeff),
            TermKind::Conditional(s, t) => {
                let (s, t) = (rename_set(s)?, rename_set(t)?);
                let shown = format!("H({}|{})", fmt_set(&s), fmt_set(&t));
                let reasons = s
                    .iter()
                    .map(|x| certify(net, x, &t))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::UnjustifiedConditional(shown.clone()))?;
                trace.push(format!("{shown} = 0 by {}", reasons.join("; ")));
            }
            kind @ (TermKind::Mutual(..) | TermKind::CondMutual(..)) => {
                let single = RankExpression::new(
                    "",
                    expr.variables().to_vec(),
                    alloc::vec![crate::expr::EntropyTerm::new(term.coeff, kind.clone())?],
                    Applicability::All,
                )?
                .desugar();
                for t in single.terms() {
                    let TermKind::Joint(s) = &t.kind else { unreachable!() };
                    add(rename_set(s)?, t.coeff);
                }
            }
        }
    }

    let messages: VarSet = net.messages.iter().cloned().collect();
    let mut singles: BTreeMap<String, Rational> = BTreeMap::new();
    for (support, c) in joint {
        if c.is_zero() {
            continue;
        }
        if support.len() == 1 {
            *singles
                .entry(support.into_iter().next().unwrap())
                .or_insert_with(Rational::zero) += c;
        } else if support == messages {
            trace.push(format!(
                "H({}) = {} by independence of the messages",
                fmt_set(&support),
                support
                    .iter()
                    .map(|m| format!("H({m})"))
                    .collect::<Vec<_>>()
                    .join(" + ")
            ));
            for m in support {
                *singles.entry(m).or_insert_with(Rational::zero) += c;
            }
        } else {
            return Err(Error::UnreducibleTerm(format!("{c} H({})", fmt_set(&support))));
        }
    }

    let mut message_sum = Rational::zero();
    let mut edge_sum = Rational::zero();
    for (v, c) in &singles {
        if net.is_message(v) {
            message_sum += c;
        } else if c.is_negative() {
            return Err(Error::NegativeEdgeCoefficient(v.clone()));
        } else {
            edge_sum += c;
        }
    }
    let denominator = -message_sum;
    if !denominator.is_positive() {
        return Err(Error::NonpositiveBound("denominator"));
    }
    if !edge_sum.is_positive() {
        return Err(Error::NonpositiveBound("numerator"));
    }
    trace.push(format!(
        "H(message) = k, H(edge) <= n: 0 <= {edge_sum} n - {denominator} k"
    ));
    let value = edge_sum / denominator;
    trace.push(format!("k/n <= {value}"));
    Ok(CapacityBound {
        value,
        provenance: format!("inequality {}", expr.name()),
        trace,
        applicability: expr.applicability().clone(),
    })
}

/// Cut bound for one demand: only derived inputs whose transitive inputs
/// include the demanded message can carry it, so `k ≤ c·n` with `c` the number
/// of such inputs.
pub fn dependency_cut_bound(net: &Network, demand_label: &str) -> Result<CapacityBound> {
    let d = net.find_demand(demand_label)?;
    if d.inputs.contains(&d.target) {
        return Err(Error::DegenerateDemand(d.label.clone()));
    }
    let carriers: Vec<&String> = d
        .inputs
        .iter()
        .filter(|i| !net.is_message(i) && net.message_closure(i).contains(&d.target))
        .collect();
    if carriers.is_empty() {
        return Err(Error::NonpositiveBound("cut"));
    }
    let c = carriers.len() as i64;
    Ok(CapacityBound {
        value: Rational::from_integer(c),
        provenance: format!("dependency cut at demand {}", d.label),
        trace: alloc::vec![
            format!("demand {}: {} <- {}", d.label, d.target, d.inputs.join(",")),
            format!(
                "inputs depending on {}: {}",
                d.target,
                carriers.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")
            ),
            format!("k <= {c} n"),
        ],
        applicability: Applicability::All,
    })
}

/// The smallest [`dependency_cut_bound`] over non-degenerate demands (first
/// demand wins ties).
pub fn network_cut_bound(net: &Network) -> Result<CapacityBound> {
    let mut best: Option<CapacityBound> = None;
    for d in &net.demands {
        match dependency_cut_bound(net, &d.label) {
            Ok(b) if best.as_ref().is_none_or(|x| b.value < x.value) => best = Some(b),
            Ok(_) | Err(Error::DegenerateDemand(_)) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| Error::InvalidNetwork("no demand yields a cut bound".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::builtin;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn code(name: &str, p: u64) -> LinearCode {
        builtin_code(name).unwrap().instantiate(gf(p)).unwrap()
    }

    #[test]
    fn builtin_shapes() {
        let t8 = builtin_network("t8").unwrap();
        assert_eq!(t8.derived().len(), 4);
        assert_eq!(t8.demands().len(), 7);
        let non = builtin_network("non-t8").unwrap();
        assert_eq!(non.find_demand("n15").unwrap().inputs, ["W", "X", "Y", "Z"]);
        assert_eq!(builtin_network("butterfly").unwrap().derived().len(), 1);
        assert_eq!(builtin_network("fano"), Err(Error::UnknownName("fano".into())));
    }

    #[test]
    fn network_validation() {
        let mut net = Network::new(&["a", "b"]).unwrap();
        assert!(net.derive("e", &["a", "f"]).is_err());
        assert!(net.derive("a", &["b"]).is_err());
        assert!(net.derive("e", &["a", "a"]).is_err());
        net.derive("e", &["a", "b"]).unwrap();
        assert!(net.demand("d1", "e", &["a"]).is_err());
        net.demand("d1", "a", &["e", "b"]).unwrap();
        assert!(net.demand("d1", "b", &["e"]).is_err());
        assert!(Network::new(&["a", "a"]).is_err());
    }

    #[test]
    fn global_maps() {
        let net = builtin_network("butterfly").unwrap();
        let g = compose_global(&net, &code("butterfly", 2)).unwrap();
        assert_eq!(g["z"], Matrix::from_rows(gf(2), 2, &[[1, 1]]).unwrap());

        let net = builtin_network("t8").unwrap();
        let g = compose_global(&net, &code("t8-gf3", 3)).unwrap();
        assert_eq!(g["Y"].row(0), &[2, 2, 0, 2]);

        let mut zeroed = code("t8-gf3", 3);
        for (_, terms) in zeroed.encoders.iter_mut() {
            for (_, m) in terms.iter_mut() {
                *m = Matrix::zeros(gf(3), 1, 1);
            }
        }
        let g = compose_global(&net, &zeroed).unwrap();
        assert!(["W", "X", "Y", "Z"].iter().all(|v| g[*v].is_zero()));
    }

    #[test]
    fn t8_code_by_characteristic() {
        let net = builtin_network("t8").unwrap();
        assert!(verify_solution(&net, &code("t8-gf3", 3)).unwrap().is_verified());

        let v5 = verify_solution(&net, &code("t8-gf3", 5)).unwrap();
        let failing: Vec<&str> = v5.failing().map(|d| d.label.as_str()).collect();
        assert_eq!(failing, ["n9", "n11", "n13", "n14"]);
        // n9 decodes A + 3·2^-1·C, i.e. A + 4C over GF(5).
        assert_eq!(v5.demands[0].residual.row(0), &[0, 0, 4, 0]);
    }

    #[test]
    fn non_t8_code_by_characteristic() {
        let net = builtin_network("non-t8").unwrap();
        let spec = builtin_code("non-t8").unwrap();
        for p in [2, 5, 7, 11] {
            assert!(verify_code_spec(&net, &spec, gf(p)).unwrap().is_verified(), "p = {p}");
        }
        assert!(matches!(
            verify_code_spec(&net, &spec, gf(3)),
            Err(Error::MissingInverse {
                modulus: 3,
                denominator: 3,
                ..
            })
        ));
        let net = builtin_network("butterfly").unwrap();
        assert!(verify_solution(&net, &code("butterfly", 2)).unwrap().is_verified());
    }

    #[test]
    fn shape_errors() {
        let net = builtin_network("butterfly").unwrap();
        let mut c = code("butterfly", 2);
        c.encoders[0].1[0].1 = Matrix::zeros(gf(2), 2, 1);
        assert!(matches!(verify_solution(&net, &c), Err(Error::ShapeMismatch(_))));

        let mut c = code("butterfly", 2);
        c.decoders.pop();
        assert!(matches!(verify_solution(&net, &c), Err(Error::ShapeMismatch(_))));

        let mut c = code("butterfly", 2);
        c.decoders[0].1.push(("y".into(), Matrix::identity(gf(2), 1)));
        assert!(matches!(verify_solution(&net, &c), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn inequality_bounds() {
        let none = BTreeMap::new();
        let t8 =
            capacity_bound_from_inequality(&builtin_network("t8").unwrap(), &builtin("t8").unwrap(), &none).unwrap();
        assert_eq!(t8.value, Rational::new(48, 49));
        assert_eq!(t8.applicability, Applicability::ExceptChar(alloc::vec![3]));
        assert!(t8.trace.iter().any(|l| l == "H(Y|W,X,Z) = 0 by derive Y <- W,X,Z"));
        assert!(t8.trace.iter().any(|l| l == "H(A|B,D,Y) = 0 by demand n9: A <- B,D,Y"));

        let non =
            capacity_bound_from_inequality(&builtin_network("non-t8").unwrap(), &builtin("non-t8").unwrap(), &none)
                .unwrap();
        assert_eq!(non.value, Rational::new(28, 29));

        assert_eq!(
            capacity_bound_from_inequality(&builtin_network("non-t8").unwrap(), &builtin("t8").unwrap(), &none),
            Err(Error::UnjustifiedConditional("H(Y|W,X,Z)".into()))
        );
    }

    #[test]
    fn inequality_bound_errors() {
        let none = BTreeMap::new();
        let net = builtin_network("butterfly").unwrap();
        let e = crate::expr::parse_expression("H(x) + H(y) + H(z) - H(x,y,z)").unwrap();
        assert!(matches!(
            capacity_bound_from_inequality(&net, &e, &none),
            Err(Error::UnreducibleTerm(_))
        ));
        let e = crate::expr::parse_expression("H(x) - H(z)").unwrap();
        assert_eq!(
            capacity_bound_from_inequality(&net, &e, &none),
            Err(Error::NegativeEdgeCoefficient("z".into()))
        );
        let e = crate::expr::parse_expression("H(x) + H(z)").unwrap();
        assert_eq!(
            capacity_bound_from_inequality(&net, &e, &none),
            Err(Error::NonpositiveBound("denominator"))
        );
        let e = crate::expr::parse_expression("H(Q)").unwrap();
        assert_eq!(
            capacity_bound_from_inequality(&net, &e, &none),
            Err(Error::UnknownVariable("Q".into()))
        );
    }

    /// The butterfly bound `2k ≤ k + n` as a rank expression: with the
    /// decoding constraint and message independence it reduces to `k/n ≤ 1`.
    #[test]
    fn butterfly_bound_with_renaming() {
        let net = builtin_network("butterfly").unwrap();
        let e = crate::expr::parse_expression("H(a) + H(c) - H(a,b) + H(b|a,c)").unwrap();
        let map: BTreeMap<String, String> = [("a", "x"), ("b", "y"), ("c", "z")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let b = capacity_bound_from_inequality(&net, &e, &map).unwrap();
        assert_eq!(b.value, Rational::from_integer(1));
    }

    #[test]
    fn cut_bounds() {
        let one = Rational::from_integer(1);
        assert_eq!(
            dependency_cut_bound(&builtin_network("t8").unwrap(), "n9")
                .unwrap()
                .value,
            one
        );
        assert_eq!(
            dependency_cut_bound(&builtin_network("non-t8").unwrap(), "n9")
                .unwrap()
                .value,
            one
        );
        assert_eq!(
            dependency_cut_bound(&builtin_network("butterfly").unwrap(), "n6")
                .unwrap()
                .value,
            one
        );
        assert_eq!(
            network_cut_bound(&builtin_network("non-t8").unwrap()).unwrap().value,
            one
        );
        let n15 = dependency_cut_bound(&builtin_network("non-t8").unwrap(), "n15").unwrap();
        assert_eq!(n15.value, Rational::from_integer(3));

        let mut net = Network::new(&["a", "b"]).unwrap();
        net.demand("d", "a", &["a", "b"]).unwrap();
        assert_eq!(
            dependency_cut_bound(&net, "d"),
            Err(Error::DegenerateDemand("d".into()))
        );
        assert!(dependency_cut_bound(&net, "zz").is_err());
    }

    #[test]
    fn induced_subspaces_satisfy_constraints() {
        for (net, code) in [
            (builtin_network("t8").unwrap(), code("t8-gf3", 3)),
            (builtin_network("non-t8").unwrap(), code("non-t8", 7)),
            (builtin_network("butterfly").unwrap(), code("butterfly", 2)),
        ] {
            let ctx = induced_assignment(&net, &code).unwrap();
            for c in net.functional_constraints() {
                let inputs: Vec<&str> = c.inputs.iter().map(String::as_str).collect();
                assert_eq!(ctx.cond_rank(&[c.determined], &inputs), Ok(0), "{c}");
            }
            let msgs: Vec<&str> = net.messages().iter().map(String::as_str).collect();
            let singles: usize = msgs.iter().map(|m| ctx.joint_rank([*m]).unwrap()).sum();
            assert_eq!(singles, ctx.joint_rank(msgs.iter().copied()).unwrap());
        }
    }
}
