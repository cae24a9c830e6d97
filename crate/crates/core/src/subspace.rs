//! Canonical subspaces of `GF(p)^d` and the rank functionals over them.
//!
//! For subspaces the entropy notation reads as linear algebra: `H(S)` is the
//! dimension of the span of the subspaces named in `S`, `H(S|T) = H(S,T) - H(T)`,
//! `I(S;T) = H(S) + H(T) - H(S,T)` and `I(S;T|U) = H(S,U) + H(T,U) - H(U) - H(S,T,U)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Matrix, PrimeField, Result};

/// A subspace stored by its RREF basis, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient_dim),
        }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, ambient_dim),
        }
    }

    /// Span of integer vectors (entries reduced mod `p`).
    pub fn span<V: AsRef<[i64]>>(field: PrimeField, ambient_dim: usize, vectors: &[V]) -> Result<Self> {
        Ok(Self::row_space(&Matrix::from_rows(field, ambient_dim, vectors)?))
    }

    /// Row space of a matrix.
    pub fn row_space(m: &Matrix) -> Self {
        Subspace {
            basis: m.row_space_basis(),
        }
    }

    /// Column space of a matrix, as a subspace of `GF(p)^rows`.
    pub fn column_space(m: &Matrix) -> Self {
        Self::row_space(&m.transpose())
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().modulus(), other.field().modulus()));
        }
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of GF(p)^{} and GF(p)^{}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        let m = Matrix::from_residues(self.field(), 1, v.len(), v.to_vec()).expect("shape checked");
        let stacked = self.basis.vstack(&m).expect("same field and width");
        stacked.rank() == self.dim()
    }

    pub fn is_subspace_of(&self, parent: &Subspace) -> Result<bool> {
        self.check_compatible(parent)?;
        Ok(join(&[parent, self])?.dim() == parent.dim())
    }

    /// `A ∩ B` from the kernel of the stacked bases: `(α, β)` with
    /// `αA = -βB` gives the intersection vectors `αA`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let (ra, rb) = (self.dim(), other.dim());
        if ra == 0 || rb == 0 {
            return Ok(Subspace::zero(self.field(), self.ambient_dim()));
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let kernel = stacked.transpose().kernel_basis();
        let alphas: Vec<usize> = (0..ra).collect();
        let alpha = kernel.select_columns(&alphas);
        Ok(Subspace::row_space(&alpha.mul(&self.basis)?))
    }
}

/// Span of the union of a nonempty family of compatible subspaces.
pub fn join(subspaces: &[&Subspace]) -> Result<Subspace> {
    let (first, rest) = subspaces
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("join of an empty family".to_string()))?;
    let mut stacked = first.basis.clone();
    for s in rest {
        first.check_compatible(s)?;
        stacked = stacked.vstack(&s.basis)?;
    }
    Ok(Subspace::row_space(&stacked))
}

pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

/// `dim(parent) - dim(sub)`, requiring `sub ⊆ parent`.
pub fn codim(parent: &Subspace, sub: &Subspace) -> Result<usize> {
    if !sub.is_subspace_of(parent)? {
        return Err(Error::NotASubspace);
    }
    Ok(parent.dim() - sub.dim())
}

/// Draw a subspace: dimension target uniform in `[0, min(max_dim, d)]`, then
/// the column span of a uniform `d x dim` matrix.
pub fn random_subspace<R: Rng + ?Sized>(
    field: PrimeField,
    ambient_dim: usize,
    max_dim: usize,
    rng: &mut R,
) -> Subspace {
    let target = rng.random_range(0..=max_dim.min(ambient_dim));
    let p = field.modulus();
    let entries = (0..ambient_dim * target).map(|_| rng.random_range(0..p)).collect();
    let m = Matrix::from_residues(field, ambient_dim, target, entries).expect("shape");
    Subspace::column_space(&m)
}

/// Named subspaces of one common `GF(p)^d`: the context every rank
/// expression is evaluated in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceAssignment {
    field: PrimeField,
    ambient_dim: usize,
    bindings: BTreeMap<String, Subspace>,
}

impl SubspaceAssignment {
    pub fn new(field: PrimeField, ambient_dim: usize) -> Self {
        SubspaceAssignment {
            field,
            ambient_dim,
            bindings: BTreeMap::new(),
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Bind (or rebind) a name.
    pub fn bind(&mut self, name: impl Into<String>, subspace: Subspace) -> Result<()> {
        if subspace.field() != self.field {
            return Err(Error::FieldMismatch(self.field.modulus(), subspace.field().modulus()));
        }
        if subspace.ambient_dim() != self.ambient_dim {
            return Err(Error::WrongLength {
                expected: self.ambient_dim,
                got: subspace.ambient_dim(),
            });
        }
        self.bindings.insert(name.into(), subspace);
        Ok(())
    }

    /// Builder-style [`bind`](Self::bind) from integer spanning vectors.
    pub fn with_span<V: AsRef<[i64]>>(mut self, name: &str, vectors: &[V]) -> Result<Self> {
        let s = Subspace::span(self.field, self.ambient_dim, vectors)?;
        self.bind(name, s)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<&Subspace> {
        self.bindings
            .get(name)
            .ok_or_else(|| Error::UnboundVariable(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.bindings.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Subspace)> + '_ {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `H(S)`: dimension of the join of the named subspaces; `H(∅) = 0`.
    /// Order and repetition of names are irrelevant.
    pub fn joint_rank<'a, I>(&self, vars: I) -> Result<usize>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut stacked = Matrix::zeros(self.field, 0, self.ambient_dim);
        for v in vars {
            stacked = stacked.vstack(self.get(v)?.basis())?;
        }
        Ok(stacked.rank())
    }

    /// `H(S|T) = H(S ∪ T) - H(T)`.
    pub fn cond_rank(&self, s: &[&str], t: &[&str]) -> Result<usize> {
        let st = self.joint_rank(s.iter().chain(t).copied())?;
        Ok(st - self.joint_rank(t.iter().copied())?)
    }

    /// `I(S;T) = H(S) + H(T) - H(S,T)`.
    pub fn mutual_rank(&self, s: &[&str], t: &[&str]) -> Result<usize> {
        self.cond_mutual_rank(s, t, &[])
    }

    /// `I(S;T|U) = H(S,U) + H(T,U) - H(U) - H(S,T,U)`.
    pub fn cond_mutual_rank(&self, s: &[&str], t: &[&str], u: &[&str]) -> Result<usize> {
        let su = self.joint_rank(s.iter().chain(u).copied())?;
        let tu = self.joint_rank(t.iter().chain(u).copied())?;
        let uu = self.joint_rank(u.iter().copied())?;
        let stu = self.joint_rank(s.iter().chain(t).chain(u).copied())?;
        Ok(su + tu - uu - stu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// The coordinate-axis / all-but-one-coordinate assignment used to refute
    /// T8 over characteristic 3 and non-T8 elsewhere.
    fn axes_assignment(p: u64) -> SubspaceAssignment {
        SubspaceAssignment::new(gf(p), 4)
            .with_span("A", &[[1, 0, 0, 0]])
            .and_then(|a| a.with_span("B", &[[0, 1, 0, 0]]))
            .and_then(|a| a.with_span("C", &[[0, 0, 1, 0]]))
            .and_then(|a| a.with_span("D", &[[0, 0, 0, 1]]))
            .and_then(|a| a.with_span("W", &[[0, 1, 1, 1]]))
            .and_then(|a| a.with_span("X", &[[1, 0, 1, 1]]))
            .and_then(|a| a.with_span("Y", &[[1, 1, 0, 1]]))
            .and_then(|a| a.with_span("Z", &[[1, 1, 1, 0]]))
            .unwrap()
    }

    #[test]
    fn span_examples() {
        let a = Subspace::span(gf(3), 4, &[[1, 0, 0, 0]]).unwrap();
        assert_eq!(a.dim(), 1);
        let empty: [[i64; 4]; 0] = [];
        assert_eq!(Subspace::span(gf(3), 4, &empty).unwrap(), Subspace::zero(gf(3), 4));
        let line = Subspace::span(gf(3), 4, &[[1, 1, 1, 0], [2, 2, 2, 0]]).unwrap();
        assert_eq!(line.dim(), 1);
        assert_eq!(
            Subspace::span(gf(3), 4, &[[1, 0, 0]]),
            Err(Error::WrongLength { expected: 4, got: 3 })
        );
    }

    #[test]
    fn joins() {
        let ctx = axes_assignment(3);
        let a = ctx.get("A").unwrap();
        assert_eq!(&join(&[a, &Subspace::zero(gf(3), 4)]).unwrap(), a);
        let abcd: Vec<&Subspace> = ["A", "B", "C", "D"].iter().map(|n| ctx.get(n).unwrap()).collect();
        assert_eq!(join(&abcd).unwrap().dim(), 4);

        let ctx5 = axes_assignment(5);
        let g = |n| ctx5.get(n).unwrap();
        let wxz = join(&[g("W"), g("X"), g("Z")]).unwrap();
        assert_eq!(wxz.dim(), 3);
        let wxyz = join(&[&wxz, g("Y")]).unwrap();
        assert_eq!(wxyz.dim(), 4);
        assert!(wxz.is_subspace_of(&wxyz).unwrap());
        assert_ne!(wxz, wxyz);

        let other = Subspace::zero(gf(5), 4);
        assert!(matches!(join(&[a, &other]), Err(Error::FieldMismatch(3, 5))));
        assert!(join(&[]).is_err());
    }

    #[test]
    fn intersections() {
        let ctx = axes_assignment(3);
        let a = ctx.get("A").unwrap();
        assert_eq!(&a.intersect(a).unwrap(), a);
        assert_eq!(a.intersect(ctx.get("B").unwrap()).unwrap().dim(), 0);

        let f = gf(2);
        let p1 = Subspace::span(f, 3, &[[1, 0, 0], [0, 1, 0]]).unwrap();
        let p2 = Subspace::span(f, 3, &[[1, 1, 0], [0, 0, 1]]).unwrap();
        assert_eq!(p1.intersect(&p2).unwrap(), Subspace::span(f, 3, &[[1, 1, 0]]).unwrap());
    }

    #[test]
    fn rank_functionals() {
        let ctx = axes_assignment(3);
        let none: [&str; 0] = [];
        assert_eq!(ctx.joint_rank(none), Ok(0));
        assert_eq!(ctx.joint_rank(["A", "B", "C", "D"]), Ok(4));
        assert_eq!(ctx.joint_rank(["W", "X", "Y", "Z"]), Ok(3));
        assert_eq!(ctx.cond_rank(&["Y"], &["W", "X", "Z"]), Ok(0));
        assert_eq!(axes_assignment(5).cond_rank(&["Y"], &["W", "X", "Z"]), Ok(1));
        assert_eq!(ctx.cond_rank(&["A"], &["A"]), Ok(0));
        assert_eq!(ctx.mutual_rank(&["A"], &["B"]), Ok(0));
        assert_eq!(ctx.mutual_rank(&["A"], &["A"]), Ok(1));
        assert_eq!(ctx.joint_rank(["A", "A", "B"]), Ok(2));
        assert_eq!(ctx.joint_rank(["Q"]), Err(Error::UnboundVariable("Q".into())));

        let f = gf(2);
        let planes = SubspaceAssignment::new(f, 3)
            .with_span("P", &[[1, 0, 0], [0, 1, 0]])
            .and_then(|c| c.with_span("Q", &[[1, 1, 0], [0, 0, 1]]))
            .unwrap();
        assert_eq!(planes.mutual_rank(&["P"], &["Q"]), Ok(1));
    }

    #[test]
    fn codimensions() {
        let f = gf(3);
        let v = Subspace::full(f, 4);
        assert_eq!(codim(&v, &v), Ok(0));
        let a = Subspace::span(f, 4, &[[1, 0, 0, 0]]).unwrap();
        assert_eq!(codim(&v, &a), Ok(3));
        assert_eq!(codim(&a, &Subspace::zero(f, 4)), Ok(1));
        let b = Subspace::span(f, 4, &[[0, 1, 0, 0]]).unwrap();
        assert_eq!(codim(&a, &b), Err(Error::NotASubspace));
    }

    #[test]
    fn zero_ambient_dimension() {
        let ctx = SubspaceAssignment::new(gf(2), 0)
            .with_span::<[i64; 0]>("A", &[])
            .unwrap();
        assert_eq!(ctx.joint_rank(["A"]), Ok(0));
        assert_eq!(ctx.cond_mutual_rank(&["A"], &["A"], &[]), Ok(0));
    }

    #[test]
    fn bind_rejects_foreign_subspaces() {
        let mut ctx = SubspaceAssignment::new(gf(3), 4);
        assert!(ctx.bind("A", Subspace::zero(gf(5), 4)).is_err());
        assert!(ctx.bind("A", Subspace::zero(gf(3), 3)).is_err());
    }
}
