//! Vector matroids: the independence structure of the columns of a matrix.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Matrix, PrimeField, Result};

/// Power-set enumeration limit for [`VectorMatroid::bases`] and
/// [`VectorMatroid::circuits`].
pub const MAX_ENUMERATION_GROUND: usize = 20;

pub const BUILTIN_MATROIDS: [&str; 2] = ["t8-example-2x5", "t8"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorMatroid {
    ground: Vec<String>,
    representation: Matrix,
}

impl VectorMatroid {
    pub fn new(ground: Vec<String>, representation: Matrix) -> Result<Self> {
        if ground.len() != representation.cols() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} labels for {} columns",
                ground.len(),
                representation.cols()
            )));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = ground.iter().find(|g| !seen.insert(*g)) {
            return Err(Error::DuplicateLabel(dup.clone()));
        }
        Ok(VectorMatroid { ground, representation })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn representation(&self) -> &Matrix {
        &self.representation
    }

    pub fn field(&self) -> PrimeField {
        self.representation.field()
    }

    fn mask_of(&self, subset: &[&str]) -> Result<u32> {
        subset.iter().try_fold(0u32, |m, label| {
            let i = self
                .ground
                .iter()
                .position(|g| g == label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            Ok(m | 1 << i)
        })
    }

    fn labels_of(&self, mask: u32) -> BTreeSet<String> {
        (0..self.ground.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ground[i].clone())
            .collect()
    }

    /// Rank of the column multiset indexed by `mask`.
    pub fn rank_mask(&self, mask: u32) -> usize {
        let cols: Vec<usize> = (0..self.ground.len()).filter(|i| mask & (1 << i) != 0).collect();
        self.representation.select_columns(&cols).rank()
    }

    pub fn rank(&self, subset: &[&str]) -> Result<usize> {
        Ok(self.rank_mask(self.mask_of(subset)?))
    }

    /// `r(E)`.
    pub fn full_rank(&self) -> usize {
        self.representation.rank()
    }

    pub fn is_independent_mask(&self, mask: u32) -> bool {
        self.rank_mask(mask) == mask.count_ones() as usize
    }

    pub fn is_independent(&self, subset: &[&str]) -> Result<bool> {
        let mask = self.mask_of(subset)?;
        // Duplicate labels collapse in the mask, matching set semantics.
        Ok(self.is_independent_mask(mask))
    }

    fn check_enumerable(&self) -> Result<u32> {
        let n = self.ground.len();
        if n > MAX_ENUMERATION_GROUND {
            return Err(Error::SizeLimit(n));
        }
        Ok(((1u64 << n) - 1) as u32)
    }

    /// Independence bitmap over the whole power set.
    pub fn independent_masks(&self) -> Result<Vec<bool>> {
        let all = self.check_enumerable()?;
        Ok((0..=all).map(|m| self.is_independent_mask(m)).collect())
    }

    pub fn bases_masks(&self) -> Result<Vec<u32>> {
        let all = self.check_enumerable()?;
        let r = self.full_rank() as u32;
        Ok((0..=all)
            .filter(|m| m.count_ones() == r && self.is_independent_mask(*m))
            .collect())
    }

    /// Minimal dependent sets: dependent, and every one-element deletion is independent.
    pub fn circuit_masks(&self) -> Result<Vec<u32>> {
        let indep = self.independent_masks()?;
        Ok((0..indep.len() as u32)
            .filter(|&m| {
                !indep[m as usize]
                    && (0..self.ground.len())
                        .filter(|i| m & (1 << i) != 0)
                        .all(|i| indep[(m & !(1 << i)) as usize])
            })
            .collect())
    }

    pub fn bases(&self) -> Result<BTreeSet<BTreeSet<String>>> {
        Ok(self.bases_masks()?.into_iter().map(|m| self.labels_of(m)).collect())
    }

    pub fn circuits(&self) -> Result<BTreeSet<BTreeSet<String>>> {
        Ok(self.circuit_masks()?.into_iter().map(|m| self.labels_of(m)).collect())
    }

    /// Check (I1)-(I3) exhaustively over the power set.
    pub fn check_axioms(&self) -> Result<Result<(), String>> {
        let indep = self.independent_masks()?;
        let n = self.ground.len();
        if !indep[0] {
            return Ok(Err("(I1): the empty set is dependent".to_string()));
        }
        for m in 0..indep.len() as u32 {
            if !indep[m as usize] {
                continue;
            }
            for i in (0..n).filter(|i| m & (1 << i) != 0) {
                if !indep[(m & !(1 << i)) as usize] {
                    return Ok(Err(alloc::format!(
                        "(I2): a subset of {:?} is dependent",
                        self.labels_of(m)
                    )));
                }
            }
        }
        for a in 0..indep.len() as u32 {
            if !indep[a as usize] {
                continue;
            }
            for b in 0..indep.len() as u32 {
                if !indep[b as usize] || a.count_ones() <= b.count_ones() {
                    continue;
                }
                let diff = a & !b;
                let ok = (0..n).any(|i| diff & (1 << i) != 0 && indep[(b | 1 << i) as usize]);
                if !ok {
                    return Ok(Err(alloc::format!(
                        "(I3): no element of {:?} extends {:?}",
                        self.labels_of(a),
                        self.labels_of(b)
                    )));
                }
            }
        }
        Ok(Ok(()))
    }
}

/// The 0/1 matrix with columns `A,B,C,D,W,X,Y,Z`: identity on `A..D`, and each
/// of `W,X,Y,Z` the all-ones vector with one coordinate cleared.
pub const T8_MATRIX: [[i64; 8]; 4] = [
    [1, 0, 0, 0, 0, 1, 1, 1],
    [0, 1, 0, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 0, 1],
    [0, 0, 0, 1, 1, 1, 1, 0],
];

pub const T8_LABELS: [&str; 8] = ["A", "B", "C", "D", "W", "X", "Y", "Z"];

const EXAMPLE_2X5: [[i64; 5]; 2] = [[1, 0, 0, 1, 1], [0, 1, 0, 0, 1]];

/// `t8` reduced mod `p` represents T8 when `p = 3` and the non-T8 matroid
/// (with `{W,X,Y,Z}` a base) otherwise.
pub fn builtin_matroid(name: &str, p: u64) -> Result<VectorMatroid> {
    let field = PrimeField::new(p)?;
    let (labels, matrix): (&[&str], Matrix) = match name {
        "t8" => (&T8_LABELS, Matrix::from_rows(field, 8, &T8_MATRIX)?),
        "t8-example-2x5" => (&["a", "b", "c", "d", "e"], Matrix::from_rows(field, 5, &EXAMPLE_2X5)?),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    VectorMatroid::new(labels.iter().map(|s| s.to_string()).collect(), matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(list: &[&[&str]]) -> BTreeSet<BTreeSet<String>> {
        list.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[test]
    fn example_ranks() {
        let m = builtin_matroid("t8-example-2x5", 2).unwrap();
        assert_eq!(m.full_rank(), 2);
        assert_eq!(m.rank(&[]), Ok(0));
        assert_eq!(m.rank(&["c"]), Ok(0));
        assert_eq!(m.rank(&["q"]), Err(Error::UnknownLabel("q".into())));
    }

    #[test]
    fn example_independence() {
        let m = builtin_matroid("t8-example-2x5", 2).unwrap();
        assert_eq!(m.is_independent(&["a", "b"]), Ok(true));
        assert_eq!(m.is_independent(&["a", "d"]), Ok(false));
        assert_eq!(m.is_independent(&[]), Ok(true));
    }

    #[test]
    fn example_bases_and_circuits() {
        let m = builtin_matroid("t8-example-2x5", 2).unwrap();
        assert_eq!(
            m.bases().unwrap(),
            sets(&[&["a", "b"], &["a", "e"], &["b", "d"], &["b", "e"], &["d", "e"]])
        );
        assert_eq!(
            m.circuits().unwrap(),
            sets(&[&["c"], &["a", "d"], &["a", "b", "e"], &["b", "d", "e"]])
        );
    }

    #[test]
    fn t8_circuit_depends_on_characteristic() {
        let wxyz = sets(&[&["W", "X", "Y", "Z"]]).pop_first().unwrap();
        let t3 = builtin_matroid("t8", 3).unwrap();
        assert!(t3.circuits().unwrap().contains(&wxyz));
        assert!(!t3.bases().unwrap().contains(&wxyz));
        for p in [2, 5, 7] {
            let m = builtin_matroid("t8", p).unwrap();
            assert!(m.bases().unwrap().contains(&wxyz), "p = {p}");
            assert_eq!(m.is_independent(&["W", "X", "Y", "Z"]), Ok(true));
        }
    }

    /// Each zero-conditional `H(s|T) = 0` of the characteristic-3 refutation
    /// makes `T ∪ {s}` a rank-3 dependency.
    #[test]
    fn t8_dependencies_have_rank_three() {
        let m = builtin_matroid("t8", 3).unwrap();
        let deps: [[&str; 4]; 11] = [
            ["Z", "A", "B", "C"],
            ["W", "B", "C", "D"],
            ["X", "A", "C", "D"],
            ["Y", "W", "X", "Z"],
            ["A", "B", "D", "Y"],
            ["D", "A", "W", "Z"],
            ["C", "D", "Y", "Z"],
            ["B", "D", "X", "Z"],
            ["C", "B", "X", "Y"],
            ["C", "A", "W", "Y"],
            ["B", "A", "W", "X"],
        ];
        for d in deps {
            assert_eq!(m.rank(&d), Ok(3), "{d:?}");
        }
    }

    #[test]
    fn axioms_hold_for_builtins() {
        for name in BUILTIN_MATROIDS {
            for p in [2, 3, 5] {
                let m = builtin_matroid(name, p).unwrap();
                assert_eq!(m.check_axioms(), Ok(Ok(())), "{name} over GF({p})");
            }
        }
    }

    #[test]
    fn construction_errors() {
        let f = PrimeField::new(2).unwrap();
        let m = Matrix::zeros(f, 1, 2);
        assert!(VectorMatroid::new(alloc::vec!["a".into()], m.clone()).is_err());
        assert!(VectorMatroid::new(alloc::vec!["a".into(), "a".into()], m).is_err());
        assert_eq!(builtin_matroid("fano", 2), Err(Error::UnknownName("fano".into())));
        let big = Matrix::zeros(f, 1, 21);
        let labels = (0..21).map(|i| alloc::format!("e{i}")).collect();
        let big = VectorMatroid::new(labels, big).unwrap();
        assert_eq!(big.bases(), Err(Error::SizeLimit(21)));
    }
}
