use coherent_access::counting::{
    coherent_degeneracy, enumerate_coherent_sequences, macrostate_weight, microstate_count,
    total_omega, BigCount, LevelSpec, MacrostateSpec,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

// (g + n - 1)! / ((g - 1)! n!)
fn textbook_bosonic(g: u64, n: u64) -> BigUint {
    factorial(g + n - 1) / (factorial(g - 1) * factorial(n))
}

// All (N_1, .., N_m) with the given sum.
fn compositions(parts: usize, total: u64) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(parts - 1, total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[test]
fn enumeration_matches_closed_form_on_the_full_test_range() {
    for g in 1..=4u32 {
        let states = coherent_degeneracy(g).unwrap();
        for n in 0..=6u32 {
            let listed = enumerate_coherent_sequences(g, n).unwrap().len() as u64;
            assert_eq!(microstate_count(&states, u64::from(n)).unwrap(), listed, "g={g} n={n}");
        }
    }
}

#[test]
fn closed_form_reduces_to_textbook_bosonic_count() {
    for g in 1..=6u64 {
        for n in 0..=6u64 {
            let got = microstate_count(&BigCount::from(g), n).unwrap();
            assert_eq!(got.into_biguint(), textbook_bosonic(g, n), "g={g} n={n}");
        }
    }
    assert_eq!(coherent_degeneracy(1).unwrap(), 1);
}

#[test]
fn coherent_access_strictly_enlarges_the_count() {
    for g in 2..=8u32 {
        let coherent = coherent_degeneracy(g).unwrap();
        for n in 1..=8u64 {
            let with = microstate_count(&coherent, n).unwrap();
            let without = microstate_count(&BigCount::from(u64::from(g)), n).unwrap();
            assert!(with > without, "g={g} n={n}");
            assert!(with.ln() > without.ln());
        }
    }
}

#[test]
fn total_omega_matches_brute_force_and_stars_and_bars() {
    let cases: &[&[u32]] = &[&[1], &[2], &[1, 1], &[2, 2], &[1, 2, 3], &[3, 1], &[4, 2, 1, 1]];
    for &levels in cases {
        let states: Vec<BigUint> = levels
            .iter()
            .map(|&g| coherent_degeneracy(g).unwrap().into_biguint())
            .collect();
        let pooled: BigUint = states.iter().sum();
        for n in 0..=6u64 {
            let brute: BigUint = compositions(levels.len(), n)
                .iter()
                .map(|occ| {
                    states
                        .iter()
                        .zip(occ)
                        .map(|(s, &k)| {
                            let s = s.clone();
                            // C(s + k - 1, k) by falling factorial
                            let mut acc = BigUint::from(1u32);
                            for i in 1..=k {
                                acc = acc * (&s - 1u32 + i) / i;
                            }
                            acc
                        })
                        .product::<BigUint>()
                })
                .sum();
            let omega = total_omega(levels, n).unwrap();
            assert_eq!(omega.as_biguint(), &brute, "levels={levels:?} n={n}");
            let closed = microstate_count(&pooled.clone().into(), n).unwrap();
            assert_eq!(omega, closed, "levels={levels:?} n={n}");
        }
    }
}

#[test]
fn per_level_enumeration_confirms_macrostate_weight() {
    let m = MacrostateSpec::new(vec![
        LevelSpec::new(2, 2).unwrap(),
        LevelSpec::new(1, 5).unwrap(),
        LevelSpec::new(3, 1).unwrap(),
    ])
    .unwrap();
    let oracle: u64 = m
        .levels()
        .iter()
        .map(|l| enumerate_coherent_sequences(l.g(), l.occupancy() as u32).unwrap().len() as u64)
        .product();
    assert_eq!(macrostate_weight(&m), oracle);
}

proptest! {
    #[test]
    fn macrostate_weight_ignores_level_order(
        levels in proptest::collection::vec((1u32..6, 0u64..6), 1..6),
        seed in any::<u64>(),
    ) {
        let specs: Vec<LevelSpec> = levels.iter().map(|&(g, n)| LevelSpec::new(g, n).unwrap()).collect();
        let mut shuffled = specs.clone();
        // deterministic Fisher-Yates driven by the seed
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let a = macrostate_weight(&MacrostateSpec::new(specs).unwrap());
        let b = macrostate_weight(&MacrostateSpec::new(shuffled).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn total_omega_equals_pooled_closed_form(
        levels in proptest::collection::vec(1u32..7, 1..5),
        n in 0u64..12,
    ) {
        let pooled: BigCount = levels.iter().map(|&g| coherent_degeneracy(g).unwrap()).sum();
        prop_assert_eq!(total_omega(&levels, n).unwrap(), microstate_count(&pooled, n).unwrap());
    }
}
