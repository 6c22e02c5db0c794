use std::collections::BTreeMap;

use super::{Element, FiniteStructure, FunctionTable, Relation, RelationTable, StructureError};
use crate::logic::Signature;

/// Largest dyadic exponent whose universe still fits comfortably in memory
/// for exhaustive evaluation.
const MAX_DYADIC_EXPONENT: usize = 40;

pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Circular betweenness on `Z/modulus`: `b` lies strictly inside the arc
/// that runs forward from `a` to `c`, and that arc has length at most `span`.
#[inline]
pub fn circular_between(modulus: usize, span: usize, b: Element, a: Element, c: Element) -> bool {
    let to_b = (b + modulus - a) % modulus;
    let to_c = (c + modulus - a) % modulus;
    0 < to_b && to_b < to_c && to_c <= span
}

/// `([1, n], <)`, element `i` standing for `i + 1`.
pub fn build_linear_order(n: usize) -> Result<FiniteStructure, StructureError> {
    let sig = Signature::from_parts(&[("<", 2)], &[], &[]).expect("static signature");
    FiniteStructure::new(
        sig,
        n,
        BTreeMap::from([("<".to_string(), Relation::new(2, RelationTable::StrictOrder))]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
}

/// Class start points of the dyadic equivalence on `[0, 2^n]`: classes of
/// size `2^(n-1), 2^(n-2), …, 2^2`, then a final class `[2^n - 4, 2^n]`.
pub(crate) fn dyadic_class_starts(n: usize) -> Vec<Element> {
    let mut starts = vec![0];
    for j in 0..=n - 3 {
        let last = *starts.last().unwrap();
        starts.push(last + (1 << (n - 1 - j)));
    }
    starts
}

pub fn build_dyadic_equiv(n: usize) -> Result<FiniteStructure, StructureError> {
    if !(4..=MAX_DYADIC_EXPONENT).contains(&n) {
        return Err(StructureError::InvalidIndex {
            family: "dyadic-equiv".into(),
            index: n,
            reason: format!("exponent must lie in 4..={MAX_DYADIC_EXPONENT}"),
        });
    }
    let sig = Signature::from_parts(&[("E", 2)], &[], &[]).expect("static signature");
    let starts = dyadic_class_starts(n);
    FiniteStructure::new(
        sig,
        (1 << n) + 1,
        BTreeMap::from([(
            "E".to_string(),
            Relation::new(2, RelationTable::IntervalPartition { starts }),
        )]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
}

/// `(Z/3nZ, R)` with `R(b; a, c)` the short-arc betweenness relation.
pub fn build_circular_3n(n: usize) -> Result<FiniteStructure, StructureError> {
    if n < 2 {
        return Err(StructureError::InvalidIndex {
            family: "circular-3n".into(),
            index: n,
            reason: "n must be at least 2".into(),
        });
    }
    let sig = Signature::from_parts(&[("R", 3)], &[], &[]).expect("static signature");
    FiniteStructure::new(
        sig,
        3 * n,
        BTreeMap::from([(
            "R".to_string(),
            Relation::new(
                3,
                RelationTable::CircularBetween {
                    modulus: 3 * n,
                    span: n,
                },
            ),
        )]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
}

fn require_prime(p: usize) -> Result<(), StructureError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(StructureError::NotPrime(p))
    }
}

pub fn build_cyclic_group(p: usize) -> Result<FiniteStructure, StructureError> {
    require_prime(p)?;
    let sig = Signature::from_parts(&[], &[("+", 2)], &["0"]).expect("static signature");
    FiniteStructure::new(
        sig,
        p,
        BTreeMap::new(),
        BTreeMap::from([(
            "+".to_string(),
            FunctionTable::tabulate(p, 2, |a| (a[0] + a[1]) % p),
        )]),
        BTreeMap::from([("0".to_string(), 0)]),
    )
}

pub fn build_prime_field(p: usize) -> Result<FiniteStructure, StructureError> {
    require_prime(p)?;
    let sig = Signature::from_parts(&[], &[("+", 2), ("*", 2)], &["0", "1"]).expect("static signature");
    FiniteStructure::new(
        sig,
        p,
        BTreeMap::new(),
        BTreeMap::from([
            (
                "+".to_string(),
                FunctionTable::tabulate(p, 2, |a| (a[0] + a[1]) % p),
            ),
            (
                "*".to_string(),
                FunctionTable::tabulate(p, 2, |a| (a[0] * a[1]) % p),
            ),
        ]),
        BTreeMap::from([("0".to_string(), 0), ("1".to_string(), 1 % p)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The definitional lift scan: some `a' in [0, 3n)`, `c' in (a', a'+n]`,
    /// `b'` strictly between, all congruent to the given residues.
    fn lift_scan(n: usize, b: usize, a: usize, c: usize) -> bool {
        let m = 3 * n;
        for a1 in 0..m {
            if a1 % m != a {
                continue;
            }
            for c1 in a1 + 1..=a1 + n {
                if c1 % m != c {
                    continue;
                }
                for b1 in a1 + 1..c1 {
                    if b1 % m == b {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn linear_order_tables() {
        let m = build_linear_order(1).unwrap();
        assert!(m.relation("<").unwrap().tuples(1).is_empty());
        let m = build_linear_order(3).unwrap();
        assert_eq!(
            m.relation("<").unwrap().tuples(3),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert!(matches!(build_linear_order(0), Err(StructureError::EmptyUniverse)));
    }

    #[test]
    fn dyadic_class_layout() {
        assert_eq!(dyadic_class_starts(4), vec![0, 8, 12]);
        let m = build_dyadic_equiv(4).unwrap();
        assert_eq!(m.universe_size(), 17);
        let class_of = |e: usize| (0..17).filter(|&x| m.holds("E", &[e, x]).unwrap()).collect::<Vec<_>>();
        assert_eq!(class_of(0), (0..=7).collect::<Vec<_>>());
        assert_eq!(class_of(8), (8..=11).collect::<Vec<_>>());
        assert_eq!(class_of(16), (12..=16).collect::<Vec<_>>());
        assert!(build_dyadic_equiv(3).is_err());
    }

    #[test]
    fn dyadic_sizes_sum_to_universe() {
        for n in 4..=12 {
            let starts = dyadic_class_starts(n);
            let mut sizes: Vec<usize> = starts.windows(2).map(|w| w[1] - w[0]).collect();
            sizes.push((1 << n) + 1 - starts.last().unwrap());
            let expected: Vec<usize> = (2..n).rev().map(|k| 1 << k).chain([5]).collect();
            assert_eq!(sizes, expected, "n = {n}");
            assert_eq!(sizes.iter().sum::<usize>(), (1 << n) + 1);
        }
        let starts = dyadic_class_starts(5);
        assert_eq!(starts, vec![0, 16, 24, 28]);
    }

    #[test]
    fn circular_examples() {
        let m = build_circular_3n(5).unwrap();
        assert_eq!(m.holds("R", &[2, 0, 4]), Some(true));
        assert_eq!(m.holds("R", &[7, 0, 4]), Some(false));
        for a in 0..15 {
            for b in 0..15 {
                assert_eq!(m.holds("R", &[b, a, a]), Some(false));
            }
        }
    }

    #[test]
    fn circular_closed_form_matches_lift_scan() {
        for n in 2..=8 {
            let m = build_circular_3n(n).unwrap();
            let u = 3 * n;
            for b in 0..u {
                for a in 0..u {
                    for c in 0..u {
                        assert_eq!(
                            m.holds("R", &[b, a, c]).unwrap(),
                            lift_scan(n, b, a, c),
                            "n={n} (b,a,c)=({b},{a},{c})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn circular_rotation_invariance() {
        for n in 2..=20 {
            let m = build_circular_3n(n).unwrap();
            let u = 3 * n;
            for b in 0..u {
                for a in 0..u {
                    for c in 0..u {
                        let base = m.holds("R", &[b, a, c]).unwrap();
                        for t in [1, n, u - 1] {
                            let r = m.holds("R", &[(b + t) % u, (a + t) % u, (c + t) % u]).unwrap();
                            assert_eq!(base, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn group_and_field_tables() {
        let g = build_cyclic_group(5).unwrap();
        assert_eq!(g.apply("+", &[3, 4]), Some(2));
        assert_eq!(build_cyclic_group(2).unwrap().function("+").unwrap().values().len(), 4);
        let f = build_prime_field(13).unwrap();
        assert_eq!(f.apply("*", &[5, 8]), Some(1));
        assert_eq!(f.constant("1"), Some(1));
        assert!(matches!(build_prime_field(15), Err(StructureError::NotPrime(15))));
        assert!(matches!(build_cyclic_group(1), Err(StructureError::NotPrime(1))));
    }

    #[test]
    fn builders_are_deterministic() {
        assert_eq!(build_circular_3n(7).unwrap(), build_circular_3n(7).unwrap());
        assert_eq!(build_prime_field(11).unwrap(), build_prime_field(11).unwrap());
        assert_eq!(build_dyadic_equiv(9).unwrap(), build_dyadic_equiv(9).unwrap());
    }

    #[test]
    fn primes() {
        let small: Vec<usize> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
