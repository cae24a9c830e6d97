//! Counterexample search for rank inequalities.
//!
//! Two strategies:
//!
//! - **Exhaustive over lines.** Every variable is the zero subspace or a line
//!   of `GF(p)^d`. The residual is invariant under `GL(d)` acting on all
//!   subspaces at once, so assignments are enumerated up to that action: if the
//!   lines chosen so far span `⟨e_1..e_r⟩`, the next variable is a line inside
//!   that span, the fresh axis `e_{r+1}`, or zero. Every assignment is
//!   equivalent to at least one enumerated path, so the sweep is complete.
//!   Residuals are only evaluated once all variables are bound.
//! - **Random.** Trial `i` draws every variable with
//!   [`random_subspace`](crate::subspace::random_subspace) from a ChaCha8 stream
//!   `(seed, i)`, so trials are independent and reproducible in any order.
//!
//! Both searches are split into independently searchable units (enumeration
//! prefixes, trial indices); the first violation in unit order is reported, so
//! sequential and parallel drivers agree.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CompiledExpression, RankExpression};
use crate::matrix::rank_in_place;
use crate::subspace::{random_subspace, Subspace, SubspaceAssignment};
use crate::{Error, Matrix, PrimeField, Rational, Result};

/// Largest expression the exhaustive sweep accepts.
pub const MAX_EXHAUSTIVE_VARIABLES: usize = 8;
/// Cap on `p^d` for line enumeration.
pub const MAX_EXHAUSTIVE_VECTORS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    ExhaustiveLines,
    Random { seed: u64, trials: u64, max_dim: usize },
}

/// A violating assignment together with its re-verified residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub assignment: SubspaceAssignment,
    pub residual: Rational,
}

/// Sequential search; see [`LineSearch`] and [`RandomSearch`] for the
/// partitioned building blocks.
pub fn search_violation(
    expr: &RankExpression,
    field: PrimeField,
    ambient_dim: usize,
    strategy: SearchStrategy,
) -> Result<Option<Violation>> {
    match strategy {
        SearchStrategy::ExhaustiveLines => {
            let search = LineSearch::new(expr, field, ambient_dim)?;
            for prefix in search.prefixes(search.default_split_depth()) {
                if let Some(v) = search.search_from(&prefix)? {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
        SearchStrategy::Random { seed, trials, max_dim } => {
            let search = RandomSearch::new(expr, field, ambient_dim, seed, max_dim)?;
            if trials == 0 {
                return Err(Error::Budget("random search needs at least one trial".to_string()));
            }
            for i in 0..trials {
                if let Some(v) = search.trial(i)? {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
    }
}

/// Per-variable choice in the line sweep: `0` is the zero subspace, `i > 0`
/// is `lines[i - 1]`.
pub type LineChoice = u32;

/// A partially bound canonical assignment: choices for the leading variables
/// plus the dimension `r` of their span `⟨e_1..e_r⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prefix {
    pub choices: Vec<LineChoice>,
    pub span_dim: usize,
}

#[derive(Debug, Clone)]
pub struct LineSearch<'a> {
    expr: &'a RankExpression,
    compiled: CompiledExpression,
    field: PrimeField,
    ambient_dim: usize,
    /// Normalized lines (first nonzero coordinate 1), sorted by the position of
    /// the last nonzero coordinate, then lexicographically. The lines of
    /// `⟨e_1..e_r⟩` are exactly the first `(p^r - 1)/(p - 1)`, and the first
    /// line of group `r` is `e_{r+1}`.
    lines: Vec<Vec<u32>>,
}

fn count_lines(p: u64, r: usize) -> usize {
    ((p.pow(r as u32) - 1) / (p - 1)) as usize
}

impl<'a> LineSearch<'a> {
    pub fn new(expr: &'a RankExpression, field: PrimeField, ambient_dim: usize) -> Result<Self> {
        let nvars = expr.variables().len();
        if nvars > MAX_EXHAUSTIVE_VARIABLES {
            return Err(Error::Budget(format!(
                "exhaustive line search supports at most {MAX_EXHAUSTIVE_VARIABLES} variables, got {nvars}"
            )));
        }
        let p = field.modulus() as u64;
        let vectors = p
            .checked_pow(ambient_dim as u32)
            .filter(|&n| n <= MAX_EXHAUSTIVE_VECTORS);
        let Some(vectors) = vectors else {
            return Err(Error::Budget(format!(
                "GF({p})^{ambient_dim} exceeds {MAX_EXHAUSTIVE_VECTORS} vectors"
            )));
        };
        let mut lines = Vec::new();
        for code in 0..vectors {
            let mut v = vec![0u32; ambient_dim];
            let mut c = code;
            for x in v.iter_mut() {
                *x = (c % p) as u32;
                c /= p;
            }
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                lines.push(v);
            }
        }
        lines.sort_by(|a, b| {
            let last = |v: &Vec<u32>| v.iter().rposition(|&x| x != 0);
            last(a).cmp(&last(b)).then_with(|| a.cmp(b))
        });
        Ok(LineSearch {
            expr,
            compiled: expr.compile()?,
            field,
            ambient_dim,
            lines,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.compiled.variables.len()
    }

    /// Split depth used by the sequential driver; parallel drivers may pick any.
    pub fn default_split_depth(&self) -> usize {
        self.variable_count().min(2)
    }

    /// Choices for the next variable given the current span dimension, in
    /// enumeration order: fresh axis, lines of the span, zero.
    fn options(&self, span_dim: usize) -> impl Iterator<Item = (LineChoice, usize)> + '_ {
        let p = self.field.modulus() as u64;
        let inside = count_lines(p, span_dim);
        let fresh = (span_dim < self.ambient_dim).then_some((inside as LineChoice + 1, span_dim + 1));
        fresh
            .into_iter()
            .chain((0..inside).map(move |i| (i as LineChoice + 1, span_dim)))
            .chain(core::iter::once((0, span_dim)))
    }

    /// All canonical prefixes binding the first `depth` variables, in order.
    pub fn prefixes(&self, depth: usize) -> Vec<Prefix> {
        let mut out = vec![Prefix {
            choices: Vec::new(),
            span_dim: 0,
        }];
        for _ in 0..depth.min(self.variable_count()) {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    self.options(pre.span_dim)
                        .map(|(c, r)| {
                            let mut choices = pre.choices.clone();
                            choices.push(c);
                            Prefix { choices, span_dim: r }
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }

    /// Depth-first sweep of every completion of `prefix`; the first violation
    /// in enumeration order.
    pub fn search_from(&self, prefix: &Prefix) -> Result<Option<Violation>> {
        let n = self.variable_count();
        let mut choices = prefix.choices.clone();
        let mut scratch = vec![0u32; n * self.ambient_dim];
        let mut found = None;
        self.dfs(&mut choices, prefix.span_dim, n, &mut scratch, &mut found)?;
        Ok(found)
    }

    fn dfs(
        &self,
        choices: &mut Vec<LineChoice>,
        span_dim: usize,
        n: usize,
        scratch: &mut [u32],
        found: &mut Option<Violation>,
    ) -> Result<bool> {
        if choices.len() == n {
            if self.leaf_residual(choices, scratch) < 0 {
                let assignment = self.assignment(choices)?;
                let residual = self.expr.evaluate(&assignment)?;
                if residual.is_negative() {
                    *found = Some(Violation { assignment, residual });
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        let options: Vec<_> = self.options(span_dim).collect();
        for (c, r) in options {
            choices.push(c);
            let done = self.dfs(choices, r, n, scratch, found)?;
            choices.pop();
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn leaf_residual(&self, choices: &[LineChoice], scratch: &mut [u32]) -> i64 {
        let d = self.ambient_dim;
        self.compiled.scaled_residual(|mask| {
            let mut rows = 0;
            for (i, &c) in choices.iter().enumerate() {
                if mask & (1 << i) != 0 && c != 0 {
                    scratch[rows * d..(rows + 1) * d].copy_from_slice(&self.lines[c as usize - 1]);
                    rows += 1;
                }
            }
            rank_in_place(self.field, &mut scratch[..rows * d], rows, d)
        })
    }

    /// Materialize a full choice vector as an assignment.
    pub fn assignment(&self, choices: &[LineChoice]) -> Result<SubspaceAssignment> {
        let mut ctx = SubspaceAssignment::new(self.field, self.ambient_dim);
        for (name, &c) in self.compiled.variables.iter().zip(choices) {
            let s = if c == 0 {
                Subspace::zero(self.field, self.ambient_dim)
            } else {
                let v = self.lines[c as usize - 1].clone();
                Subspace::row_space(&Matrix::from_residues(self.field, 1, self.ambient_dim, v)?)
            };
            ctx.bind(name.clone(), s)?;
        }
        Ok(ctx)
    }
}

#[derive(Debug, Clone)]
pub struct RandomSearch<'a> {
    expr: &'a RankExpression,
    field: PrimeField,
    ambient_dim: usize,
    seed: u64,
    max_dim: usize,
}

impl<'a> RandomSearch<'a> {
    pub fn new(
        expr: &'a RankExpression,
        field: PrimeField,
        ambient_dim: usize,
        seed: u64,
        max_dim: usize,
    ) -> Result<Self> {
        if max_dim > ambient_dim {
            return Err(Error::Budget(format!(
                "max_dim {max_dim} exceeds the ambient dimension {ambient_dim}"
            )));
        }
        Ok(RandomSearch {
            expr,
            field,
            ambient_dim,
            seed,
            max_dim,
        })
    }

    /// The assignment drawn by trial `index`.
    pub fn sample(&self, index: u64) -> SubspaceAssignment {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let mut ctx = SubspaceAssignment::new(self.field, self.ambient_dim);
        for v in self.expr.variables() {
            let s = random_subspace(self.field, self.ambient_dim, self.max_dim, &mut rng);
            ctx.bind(v.clone(), s).expect("sampled in the same space");
        }
        ctx
    }

    pub fn trial(&self, index: u64) -> Result<Option<Violation>> {
        let assignment = self.sample(index);
        let residual = self.expr.evaluate(&assignment)?;
        Ok(residual.is_negative().then_some(Violation { assignment, residual }))
    }
}
