use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use pfdim_core::measure::{
    atoms, binomial_gap, find_rich_intersection, inclusion_exclusion_tail, s_k, MeasureSpace,
    SetSystem,
};
use proptest::prelude::*;

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n - first - 1, k - 1) {
            let mut s = vec![first];
            s.extend(rest.into_iter().map(|r| r + first + 1));
            out.push(s);
        }
    }
    out
}

fn oracle_intersection(weights: &[BigRational], sets: &[Vec<usize>], chosen: &[usize]) -> BigRational {
    let mut common: BTreeSet<usize> = (0..weights.len()).collect();
    for &i in chosen {
        let s: BTreeSet<usize> = sets[i].iter().copied().collect();
        common = common.intersection(&s).copied().collect();
    }
    common.iter().map(|&p| weights[p].clone()).sum()
}

fn oracle_s_k(weights: &[BigRational], sets: &[Vec<usize>], k: usize) -> BigRational {
    subsets(sets.len(), k)
        .iter()
        .map(|c| oracle_intersection(weights, sets, c))
        .sum()
}

fn oracle_union(weights: &[BigRational], sets: &[Vec<usize>]) -> BigRational {
    (0..weights.len())
        .filter(|p| sets.iter().any(|s| s.contains(p)))
        .map(|p| weights[p].clone())
        .sum()
}

/// `(masses, sets)`: 1..=10 points with integer masses (not all zero) and
/// 1..=6 subsets given by membership bits.
fn system() -> impl Strategy<Value = (Vec<u64>, Vec<Vec<usize>>)> {
    (1usize..=10, 1usize..=6).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(0u64..=10, m).prop_filter("positive mass", |w| w.iter().any(|&x| x > 0)),
            prop::collection::vec(prop::collection::vec(any::<bool>(), m), n),
        )
            .prop_map(|(w, bits)| {
                let sets = bits
                    .into_iter()
                    .map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(p, _)| p).collect())
                    .collect();
                (w, sets)
            })
    })
}

fn normalised(masses: &[u64]) -> Vec<BigRational> {
    let total: u64 = masses.iter().sum();
    masses
        .iter()
        .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn s_k_matches_subset_enumeration((masses, sets) in system()) {
        let space: MeasureSpace = MeasureSpace::from_masses(&masses).unwrap();
        let sys = SetSystem::new(masses.len(), &sets).unwrap();
        let w = normalised(&masses);
        for k in 1..=sets.len() {
            prop_assert_eq!(s_k(&space, &sys, k).unwrap(), oracle_s_k(&w, &sets, k));
        }
    }

    #[test]
    fn tails_obey_bonferroni((masses, sets) in system()) {
        let space: MeasureSpace = MeasureSpace::from_masses(&masses).unwrap();
        let sys = SetSystem::new(masses.len(), &sets).unwrap();
        let w = normalised(&masses);
        let n = sets.len();
        for start in 1..=n {
            let tail = inclusion_exclusion_tail(&space, &sys, start).unwrap();
            let oracle: BigRational = (start..=n)
                .map(|i| {
                    let s = oracle_s_k(&w, &sets, i);
                    if i % 2 == 1 { s } else { -s }
                })
                .sum();
            prop_assert_eq!(&tail, &oracle);
            if start % 2 == 1 {
                prop_assert!(!tail.is_negative(), "odd start {} gave {}", start, tail);
            } else {
                prop_assert!(!tail.is_positive(), "even start {} gave {}", start, tail);
            }
        }
        prop_assert_eq!(inclusion_exclusion_tail(&space, &sys, 1).unwrap(), oracle_union(&w, &sets));
    }

    #[test]
    fn atoms_partition_the_space((masses, sets) in system()) {
        let space: MeasureSpace = MeasureSpace::from_masses(&masses).unwrap();
        let sys = SetSystem::new(masses.len(), &sets).unwrap();
        let w = normalised(&masses);
        let at = atoms(&space, &sys).unwrap();
        let total: BigRational = (0..1usize << sets.len()).map(|mask| at.get(mask).clone()).sum();
        prop_assert!(total.is_one());
        prop_assert_eq!(at.union_measure(), oracle_union(&w, &sets));
        for k in 1..=sets.len() {
            for chosen in subsets(sets.len(), k) {
                prop_assert_eq!(at.intersection_measure(&chosen), oracle_intersection(&w, &sets, &chosen));
            }
        }
        prop_assert_eq!(at.nonempty().count(), (1usize << sets.len()) - 1);
        for (mask, m) in at.nonempty() {
            prop_assert!(mask != 0);
            // The atom is the set of points whose membership pattern is `mask`.
            let expect: BigRational = (0..masses.len())
                .filter(|p| (0..sets.len()).all(|i| sets[i].contains(p) == (mask >> i & 1 == 1)))
                .map(|p| w[p].clone())
                .sum();
            prop_assert_eq!(m, &expect);
        }
    }

    #[test]
    fn float_weights_track_exact_ones((masses, sets) in system()) {
        let space: MeasureSpace = MeasureSpace::from_masses(&masses).unwrap();
        let float = space.to_float();
        let sys = SetSystem::new(masses.len(), &sets).unwrap();
        for start in 1..=sets.len() {
            let exact = inclusion_exclusion_tail(&space, &sys, start).unwrap();
            let approx = inclusion_exclusion_tail(&float, &sys, start).unwrap();
            let exact: f64 = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            prop_assert!((exact - approx).abs() < 1e-9);
        }
    }

    #[test]
    fn rich_search_is_exhaustive(k in 1usize..=3, masses in prop::collection::vec(1u64..=4, 8), seed in any::<u64>()) {
        // Sets each holding at least half of the points by count; ε = 1/4
        // keeps every set above ε even under uneven masses.
        let mut rng = seed;
        let mut sets = Vec::new();
        let w = normalised(&masses);
        let eps = BigRational::new(BigInt::one(), BigInt::from(4));
        while sets.len() < 5 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let bits = (rng >> 24) as u8;
            let set: Vec<usize> = (0..8).filter(|i| bits >> i & 1 == 1).collect();
            if oracle_intersection(&w, std::slice::from_ref(&set), &[0]) >= eps {
                sets.push(set);
            }
        }
        let space: MeasureSpace = MeasureSpace::from_masses(&masses).unwrap();
        let sys = SetSystem::new(8, &sets).unwrap();
        let found = find_rich_intersection(&space, &sys, k, &eps).unwrap();
        let threshold = num_traits::pow(eps.clone(), 3usize.pow(k as u32 - 1));
        prop_assert_eq!(&found.threshold, &threshold);
        let all = subsets(sets.len(), k);
        let first = all.iter().find(|c| oracle_intersection(&w, &sets, c) >= threshold);
        match (&found.hit, first) {
            (Some((chosen, m)), Some(expected)) => {
                prop_assert_eq!(chosen, expected);
                prop_assert_eq!(m, &oracle_intersection(&w, &sets, expected));
            }
            (None, None) => {}
            (got, want) => prop_assert!(false, "search gave {:?}, oracle {:?}", got, want),
        }
    }
}

#[test]
fn binomial_gap_matches_pascal_triangle() {
    let mut row: Vec<u128> = vec![1];
    for m in 1..=60u64 {
        let mut next = vec![1u128; m as usize + 1];
        for i in 1..m as usize {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
        for i in 0..m {
            let want = BigInt::from(row[i as usize]) - BigInt::from(row[i as usize + 1]);
            assert_eq!(binomial_gap(m, i).unwrap(), want, "m = {m}, i = {i}");
        }
    }
    assert!(binomial_gap(5, 5).is_err());
}

#[test]
fn subsets_helper_counts() {
    assert_eq!(subsets(5, 2).len(), 10);
    assert_eq!(subsets(6, 3).len(), 20);
    assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
}
