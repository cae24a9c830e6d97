//! Subspace operations against explicit vector-set oracles, and the rank
//! identities every assignment satisfies.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankineq_core::subspace::{codim, intersect, join, random_subspace, Subspace, SubspaceAssignment};
use rankineq_core::PrimeField;

type VecSet = BTreeSet<Vec<u32>>;

fn all_vectors(p: u32, d: usize) -> Vec<Vec<u32>> {
    (0..p.pow(d as u32))
        .map(|mut i| {
            (0..d)
                .map(|_| {
                    let c = i % p;
                    i /= p;
                    c
                })
                .collect()
        })
        .collect()
}

/// Every linear combination of `gens`, as a set.
fn closure(p: u32, d: usize, gens: &[Vec<u32>]) -> VecSet {
    all_vectors(p, gens.len())
        .into_iter()
        .map(|coeffs| {
            (0..d)
                .map(|j| gens.iter().zip(&coeffs).map(|(g, c)| g[j] * c).sum::<u32>() % p)
                .collect()
        })
        .collect()
}

fn as_set(s: &Subspace) -> VecSet {
    let p = s.field().modulus();
    let gens: Vec<Vec<u32>> = s.basis().row_iter().map(<[u32]>::to_vec).collect();
    closure(p, s.ambient_dim(), &gens)
}

fn log_p(p: u32, n: usize) -> usize {
    let mut k = 0;
    let mut m = 1;
    while m < n {
        m *= p as usize;
        k += 1;
    }
    assert_eq!(m, n);
    k
}

fn check_pair(a: &Subspace, b: &Subspace) {
    let p = a.field().modulus();
    let d = a.ambient_dim();
    let (sa, sb) = (as_set(a), as_set(b));
    assert_eq!(log_p(p, sa.len()), a.dim());

    // Combinations of both bases: the smallest set closed under addition
    // containing both subspaces.
    let gens: Vec<Vec<u32>> = a
        .basis()
        .row_iter()
        .chain(b.basis().row_iter())
        .map(<[u32]>::to_vec)
        .collect();
    let joined = join(&[a, b]).unwrap();
    assert_eq!(as_set(&joined), closure(p, d, &gens));
    assert!(sa.union(&sb).all(|v| as_set(&joined).contains(v)));

    let met = intersect(a, b).unwrap();
    let expected: VecSet = sa.intersection(&sb).cloned().collect();
    assert_eq!(as_set(&met), expected);

    assert_eq!(a.is_subspace_of(b).unwrap(), sa.is_subset(&sb));
}

/// All 16 subspaces of GF(2)^3, found by closing every set of at most three vectors.
#[test]
fn all_gf2_cube_pairs_match_oracle() {
    let f = PrimeField::new(2).unwrap();
    let vectors = all_vectors(2, 3);
    let mut seen = BTreeSet::new();
    let mut subspaces = Vec::new();
    for mask in 0u32..1 << 8 {
        if mask.count_ones() > 3 {
            continue;
        }
        let gens: Vec<Vec<i64>> = (0..8)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vectors[i].iter().map(|&x| x as i64).collect())
            .collect();
        let s = Subspace::span(f, 3, &gens).unwrap();
        if seen.insert(as_set(&s)) {
            subspaces.push(s);
        }
    }
    assert_eq!(subspaces.len(), 16);
    for a in &subspaces {
        for b in &subspaces {
            check_pair(a, b);
        }
    }
}

#[test]
fn random_gf3_cube_pairs_match_oracle() {
    let f = PrimeField::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let a = random_subspace(f, 3, 3, &mut rng);
        let b = random_subspace(f, 3, 3, &mut rng);
        check_pair(&a, &b);
    }
}

fn assignment(p: u64, d: usize, seed: u64) -> SubspaceAssignment {
    let f = PrimeField::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ctx = SubspaceAssignment::new(f, d);
    for name in ["A", "B", "C"] {
        ctx.bind(name, random_subspace(f, d, d, &mut rng)).unwrap();
    }
    ctx
}

fn small_field() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
}

proptest! {
    #[test]
    fn submodularity(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let lhs = ctx.cond_rank(&["A", "B"], &["C"]).unwrap();
        let rhs = ctx.cond_rank(&["A"], &["C"]).unwrap() + ctx.cond_rank(&["B"], &["C"]).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn monotonicity(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let a_bc = ctx.cond_rank(&["A"], &["B", "C"]).unwrap();
        let a_b = ctx.cond_rank(&["A"], &["B"]).unwrap();
        let ac_b = ctx.cond_rank(&["A", "C"], &["B"]).unwrap();
        prop_assert!(a_bc <= a_b && a_b <= ac_b);
    }

    #[test]
    fn chain_rule(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let lhs = ctx.mutual_rank(&["A"], &["B", "C"]).unwrap();
        let rhs = ctx.cond_mutual_rank(&["A"], &["B"], &["C"]).unwrap() + ctx.mutual_rank(&["A"], &["C"]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn codimension_of_intersection(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let v = Subspace::full(ctx.field(), d);
        let (a, b) = (ctx.get("A").unwrap(), ctx.get("B").unwrap());
        let ab = intersect(a, b).unwrap();
        prop_assert!(codim(&v, &ab).unwrap() <= codim(&v, a).unwrap() + codim(&v, b).unwrap());
    }

    #[test]
    fn dimension_identity(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let (a, b) = (ctx.get("A").unwrap(), ctx.get("B").unwrap());
        let sum = intersect(a, b).unwrap().dim() + join(&[a, b]).unwrap().dim();
        prop_assert_eq!(sum, a.dim() + b.dim());
    }

    #[test]
    fn conditional_rank_is_codimension(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let (a, b) = (ctx.get("A").unwrap(), ctx.get("B").unwrap());
        let ab = join(&[a, b]).unwrap();
        prop_assert_eq!(ctx.cond_rank(&["A"], &["B"]).unwrap(), codim(&ab, b).unwrap());
    }

    #[test]
    fn names_are_sets(p in small_field(), d in 0usize..5, seed: u64) {
        let ctx = assignment(p, d, seed);
        let h = ctx.joint_rank(["A", "B"]).unwrap();
        prop_assert_eq!(ctx.joint_rank(["B", "A", "B"]).unwrap(), h);
    }
}
