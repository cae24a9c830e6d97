//! Entropy identities on random distributions and the bridge from subspace
//! ranks to entropies.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankineq_core::entropy::{evaluate_on_distribution, induce_distribution, JointDistribution};
use rankineq_core::expr::{builtin, var_set, VarSet};
use rankineq_core::subspace::{random_subspace, Subspace, SubspaceAssignment};
use rankineq_core::{PrimeField, Rational};

const TOL: f64 = 1e-9;

/// Up to 12 atoms over `{0,1,2}^4` with random positive weights.
fn distribution(seed: u64) -> JointDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=12);
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..10)).collect();
    let total: i64 = weights.iter().sum();
    let atoms = weights
        .iter()
        .map(|&w| {
            (
                (0..4).map(|_| rng.random_range(0..3)).collect(),
                Rational::new(w, total),
            )
        })
        .collect();
    JointDistribution::new(["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(), atoms).unwrap()
}

fn s(names: &[&str]) -> VarSet {
    var_set(names.iter().copied())
}

proptest! {
    #[test]
    fn elementary_facts(seed: u64) {
        let d = distribution(seed);
        let h = |x: &[&str]| d.entropy(&s(x), 2.0).unwrap();
        let hc = |x: &[&str], y: &[&str]| d.conditional_entropy(&s(x), &s(y), 2.0).unwrap();
        let i = |x: &[&str], y: &[&str]| d.mutual_information(&s(x), &s(y), 2.0).unwrap();
        let ic = |x: &[&str], y: &[&str], z: &[&str]| d.conditional_mutual_information(&s(x), &s(y), &s(z), 2.0).unwrap();

        prop_assert_eq!(h(&[]), 0.0);
        prop_assert!(h(&["A"]) >= -TOL);
        prop_assert!(hc(&["A"], &["B"]) >= -TOL);
        prop_assert!(i(&["A"], &["B"]) >= -TOL);
        prop_assert!(hc(&["A", "B"], &["C"]) <= hc(&["A"], &["C"]) + hc(&["B"], &["C"]) + TOL);
        prop_assert!(hc(&["A"], &["B", "C"]) <= hc(&["A"], &["B"]) + TOL);
        prop_assert!(hc(&["A"], &["B"]) <= hc(&["A", "C"], &["B"]) + TOL);
        prop_assert!((i(&["A"], &["B", "C"]) - ic(&["A"], &["B"], &["C"]) - i(&["A"], &["C"])).abs() < TOL);
        prop_assert!((hc(&["A"], &["B"]) - (h(&["A", "B"]) - h(&["B"]))).abs() < TOL);
    }

    #[test]
    fn shannon_elemental_is_nonnegative(seed: u64) {
        let r = evaluate_on_distribution(&builtin("shannon-elemental").unwrap(), &distribution(seed), 2.0).unwrap();
        prop_assert!(r >= -1e-12);
    }

    #[test]
    fn desugared_residual_agrees(seed: u64, which in 0usize..4) {
        let name = ["shannon-elemental", "ingleton", "t8", "non-t8"][which];
        let e = builtin(name).unwrap();
        let mut d = distribution(seed);
        if which >= 2 {
            // Eight variables: reuse the four columns twice.
            let names = ["A", "B", "C", "D", "W", "X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
            let atoms = d.atoms().iter().map(|(v, p)| ([v.clone(), v.iter().rev().copied().collect()].concat(), *p)).collect();
            d = JointDistribution::new(names, atoms).unwrap();
        }
        let direct = evaluate_on_distribution(&e, &d, 2.0).unwrap();
        let sugar_free = evaluate_on_distribution(&e.desugar(), &d, 2.0).unwrap();
        prop_assert!((direct - sugar_free).abs() < 1e-12 * (1.0 + direct.abs()).max(100.0));
    }
}

#[test]
fn induced_entropies_equal_ranks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [2u64, 3] {
        let f = PrimeField::new(p).unwrap();
        for _ in 0..50 {
            let mut ctx = SubspaceAssignment::new(f, 3);
            for n in ["A", "B", "C"] {
                ctx.bind(n, random_subspace(f, 3, 3, &mut rng)).unwrap();
            }
            let d = induce_distribution(&ctx).unwrap();
            for mask in 1..8u32 {
                let names: Vec<&str> = (0..3)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| ["A", "B", "C"][i])
                    .collect();
                let h = d.entropy(&s(&names), p as f64).unwrap();
                let r = ctx.joint_rank(names.iter().copied()).unwrap();
                assert!((h - r as f64).abs() < TOL, "{names:?}: {h} vs {r}");
            }
        }
    }
}

#[test]
fn induced_zero_subspace_is_constant() {
    let f = PrimeField::new(5).unwrap();
    let mut ctx = SubspaceAssignment::new(f, 2);
    ctx.bind("O", Subspace::zero(f, 2)).unwrap();
    let d = induce_distribution(&ctx).unwrap();
    assert_eq!(d.entropy(&s(&["O"]), 5.0), Ok(0.0));
}
