//! Matroid structure of random small matrices.

use proptest::prelude::*;
use rankineq_core::matroid::{builtin_matroid, VectorMatroid, BUILTIN_MATROIDS};
use rankineq_core::subspace::{Subspace, SubspaceAssignment};
use rankineq_core::{Matrix, PrimeField};

const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn matroid(p: u64, entries: Vec<u32>) -> VectorMatroid {
    let f = PrimeField::new(p).unwrap();
    let m = Matrix::from_residues(f, 3, 6, entries.into_iter().map(|x| x % f.modulus()).collect()).unwrap();
    VectorMatroid::new(LABELS.iter().map(|s| s.to_string()).collect(), m).unwrap()
}

fn labels(mask: u32) -> Vec<&'static str> {
    (0..6).filter(|i| mask & (1 << i) != 0).map(|i| LABELS[i]).collect()
}

proptest! {
    #[test]
    fn random_matrices_satisfy_axioms(p in prop_oneof![Just(2u64), Just(3)], entries in prop::collection::vec(0u32..3, 18)) {
        let m = matroid(p, entries);
        prop_assert_eq!(m.check_axioms().unwrap(), Ok(()));
    }

    #[test]
    fn bases_share_cardinality(p in prop_oneof![Just(2u64), Just(3)], entries in prop::collection::vec(0u32..3, 18)) {
        let m = matroid(p, entries);
        let bases = m.bases_masks().unwrap();
        prop_assert!(!bases.is_empty());
        prop_assert!(bases.iter().all(|b| b.count_ones() as usize == m.full_rank()));
    }

    #[test]
    fn circuits_are_minimal_dependent(p in prop_oneof![Just(2u64), Just(3)], entries in prop::collection::vec(0u32..3, 18)) {
        let m = matroid(p, entries);
        for c in m.circuit_masks().unwrap() {
            prop_assert!(!m.is_independent_mask(c));
            for sub in (0..c).filter(|s| s & c == *s) {
                prop_assert!(m.is_independent_mask(sub));
            }
        }
    }

    /// Matroid rank of a column set is the joint rank of the column lines.
    #[test]
    fn rank_is_joint_rank_of_columns(p in prop_oneof![Just(2u64), Just(3), Just(5)], entries in prop::collection::vec(0u32..5, 18), mask in 0u32..64) {
        let m = matroid(p, entries);
        let f = m.field();
        let mut ctx = SubspaceAssignment::new(f, 3);
        for (j, name) in LABELS.iter().enumerate() {
            let col: Vec<i64> = (0..3).map(|r| m.representation().get(r, j) as i64).collect();
            ctx.bind(*name, Subspace::span(f, 3, &[col]).unwrap()).unwrap();
        }
        prop_assert_eq!(m.rank(&labels(mask)).unwrap(), ctx.joint_rank(labels(mask)).unwrap());
    }
}

#[test]
fn builtin_ranks_match_subspace_ranks() {
    for name in BUILTIN_MATROIDS {
        for p in [2, 3, 5, 7] {
            let m = builtin_matroid(name, p).unwrap();
            let rows = m.representation().rows();
            let mut ctx = SubspaceAssignment::new(m.field(), rows);
            for (j, label) in m.ground().iter().enumerate() {
                let col: Vec<i64> = (0..rows).map(|r| m.representation().get(r, j) as i64).collect();
                ctx.bind(label.clone(), Subspace::span(m.field(), rows, &[col]).unwrap())
                    .unwrap();
            }
            for mask in 0..1u32 << m.ground().len() {
                let subset: Vec<&str> = (0..m.ground().len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| m.ground()[i].as_str())
                    .collect();
                assert_eq!(
                    m.rank(&subset).unwrap(),
                    ctx.joint_rank(subset.iter().copied()).unwrap()
                );
            }
        }
    }
}
