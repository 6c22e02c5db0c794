//! Finite weighted probability spaces, set systems over them, and the
//! inclusion–exclusion and intersection combinatorics run on top.
//!
//! Spaces are generic over [`Weight`]: exact [`BigRational`] weights are the
//! default; `f64` weights are available for large spaces, with every `≥`
//! comparison relaxed by [`Weight::TOLERANCE`].

mod ops;
mod system;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::structures::{Element, FiniteStructure};

pub use ops::{
    atoms, binomial_gap, find_rich_intersection, inclusion_exclusion_tail, pair_guarantee_f,
    pair_guarantee_size, rich_threshold, s_k, Atoms, RichIntersection, MAX_ATOM_SETS,
};
pub use system::{load_set_system, parse_weight, PointSet, SetSystem, SetSystemFile};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("binomial_gap needs 0 <= i < m, got m = {m}, i = {i}")]
    BinomialRange { m: u64, i: u64 },
    #[error("the counting measure needs a non-empty set")]
    EmptyCountingSet,
    #[error("element {element} is outside the universe of size {size}")]
    ElementOutOfRange { element: Element, size: usize },
    #[error("weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("weight of point {index} is negative")]
    NegativeWeight { index: usize },
    #[error("a space needs at least one point")]
    NoPoints,
    #[error("{given} weights given for {points} points")]
    WeightCount { given: usize, points: usize },
    #[error("set {set} contains point {point}, but the space has {points} points")]
    PointOutOfRange { set: usize, point: usize, points: usize },
    #[error("system has {sets} sets over {system_points} points but the space has {space_points}")]
    SpaceMismatch {
        sets: usize,
        system_points: usize,
        space_points: usize,
    },
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("start = {start} is outside 1..={n}")]
    StartOutOfRange { start: usize, n: usize },
    #[error("{n} sets exceed the atom enumeration bound of {max}")]
    TooManySets { n: usize, max: usize },
    #[error("epsilon = {0} is outside (0, 1/2]")]
    EpsilonOutOfRange(String),
    #[error("set {index} has measure {measure} < epsilon = {epsilon}")]
    Hypothesis {
        index: usize,
        measure: String,
        epsilon: String,
    },
    #[error("cannot read weight `{0}`")]
    BadWeight(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Numeric type for point weights and measures.
pub trait Weight:
    Clone
    + PartialOrd
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Slack allowed in `≥` comparisons and in the normalisation check.
    const TOLERANCE: f64;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// `self ≥ bound`, up to the tolerance.
    fn at_least(&self, bound: &Self) -> bool;

    /// Integer numerators over a common denominator, when every partial sum
    /// is guaranteed to fit in `u128`.
    fn common_scale(_weights: &[Self]) -> Option<(Vec<u128>, u128)> {
        None
    }

    fn from_scaled(num: u128, den: u128) -> Self;

    fn display(&self) -> String;
}

impl Weight for BigRational {
    const TOLERANCE: f64 = 0.0;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn at_least(&self, bound: &Self) -> bool {
        self >= bound
    }

    fn common_scale(weights: &[Self]) -> Option<(Vec<u128>, u128)> {
        let mut den = BigInt::one();
        for w in weights {
            den = den.lcm(w.denom());
        }
        let den = den.to_u64()? as u128;
        let nums = weights
            .iter()
            .map(|w| {
                let scaled = w.numer() * BigInt::from(den) / w.denom();
                scaled.to_u64().map(u128::from)
            })
            .collect::<Option<Vec<_>>>()?;
        Some((nums, den))
    }

    fn from_scaled(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn display(&self) -> String {
        self.to_string()
    }
}

impl Weight for f64 {
    const TOLERANCE: f64 = 1e-12;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn at_least(&self, bound: &Self) -> bool {
        *self >= *bound - Self::TOLERANCE
    }

    fn from_scaled(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn display(&self) -> String {
        format!("{self}")
    }
}

/// A probability measure on points `0..m`.
#[derive(Debug, Clone)]
pub struct MeasureSpace<W: Weight = BigRational> {
    weights: Vec<W>,
    scaled: Option<(Vec<u128>, u128)>,
}

impl<W: Weight> MeasureSpace<W> {
    /// Validates non-negativity and total mass 1 (exactly for rationals,
    /// within the tolerance for floats).
    pub fn new(weights: Vec<W>) -> Result<Self, MeasureError> {
        if weights.is_empty() {
            return Err(MeasureError::NoPoints);
        }
        if let Some(index) = weights.iter().position(|w| *w < W::zero()) {
            return Err(MeasureError::NegativeWeight { index });
        }
        let total = weights.iter().cloned().fold(W::zero(), |a, b| a + b);
        let off = (total.to_f64() - 1.0).abs();
        let normalized = if W::TOLERANCE == 0.0 {
            total == W::one()
        } else {
            off <= W::TOLERANCE
        };
        if !normalized {
            return Err(MeasureError::NotNormalized(total.display()));
        }
        let scaled = W::common_scale(&weights);
        Ok(Self { weights, scaled })
    }

    /// Uniform weight `1/m` on `m` points.
    pub fn uniform(m: usize) -> Result<Self, MeasureError> {
        if m == 0 {
            return Err(MeasureError::NoPoints);
        }
        let w = W::from_rational(&BigRational::new(BigInt::one(), BigInt::from(m)));
        Self::new(vec![w; m])
    }

    /// Normalises arbitrary non-negative integer masses.
    pub fn from_masses(masses: &[u64]) -> Result<Self, MeasureError> {
        let total: u128 = masses.iter().map(|&x| x as u128).sum();
        if masses.is_empty() {
            return Err(MeasureError::NoPoints);
        }
        if total == 0 {
            return Err(MeasureError::NotNormalized("0".into()));
        }
        let den = BigInt::from(total);
        Self::new(
            masses
                .iter()
                .map(|&x| W::from_rational(&BigRational::new(BigInt::from(x), den.clone())))
                .collect(),
        )
    }

    pub fn points(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> &W {
        &self.weights[point]
    }

    /// Measure of an explicit list of points (duplicates counted once).
    pub fn measure_of(&self, points: &[usize]) -> Result<W, MeasureError> {
        let set = PointSet::from_points(self.points(), points).map_err(|point| {
            MeasureError::PointOutOfRange {
                set: 0,
                point,
                points: self.points(),
            }
        })?;
        Ok(self.measure(&set))
    }

    pub fn measure(&self, set: &PointSet) -> W {
        match self.scaled_measure(set) {
            Some((num, den)) => W::from_scaled(num, den),
            None => set
                .iter()
                .fold(W::zero(), |acc, p| acc + self.weights[p].clone()),
        }
    }

    /// Scaled numerator and denominator, on the fast path.
    pub(crate) fn scaled_measure(&self, set: &PointSet) -> Option<(u128, u128)> {
        let (nums, den) = self.scaled.as_ref()?;
        Some((set.iter().map(|p| nums[p]).sum(), *den))
    }

    pub(crate) fn scale(&self) -> Option<&(Vec<u128>, u128)> {
        self.scaled.as_ref()
    }

    /// Same space with float weights.
    pub fn to_float(&self) -> MeasureSpace<f64> {
        MeasureSpace {
            weights: self.weights.iter().map(Weight::to_f64).collect(),
            scaled: None,
        }
    }
}

/// Normalised counting measure on the finite set `x ⊆ M`. Point `j` of the
/// result stands for the `j`-th smallest element of `x`.
pub fn counting_measure_on(m: &FiniteStructure, x: &[Element]) -> Result<MeasureSpace, MeasureError> {
    let size = m.universe_size();
    if let Some(&element) = x.iter().find(|&&e| e >= size) {
        return Err(MeasureError::ElementOutOfRange { element, size });
    }
    let mut distinct = x.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.is_empty() {
        return Err(MeasureError::EmptyCountingSet);
    }
    MeasureSpace::uniform(distinct.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::build_linear_order;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn counting_measure_examples() {
        let m = build_linear_order(10).unwrap();
        let s = counting_measure_on(&m, &[1, 3, 5, 7]).unwrap();
        assert_eq!(s.weights(), &[q(1, 4), q(1, 4), q(1, 4), q(1, 4)]);
        assert_eq!(s.measure_of(&[0, 1, 2, 3]).unwrap(), q(1, 1));
        let s = counting_measure_on(&m, &[0, 1]).unwrap();
        assert_eq!(s.measure_of(&[0]).unwrap(), q(1, 2));
        assert!(matches!(counting_measure_on(&m, &[]), Err(MeasureError::EmptyCountingSet)));
        assert!(matches!(
            counting_measure_on(&m, &[10]),
            Err(MeasureError::ElementOutOfRange { .. })
        ));
    }

    #[test]
    fn normalisation_is_checked() {
        assert!(MeasureSpace::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(MeasureSpace::new(vec![q(3, 2), q(-1, 2)]).is_err());
        assert!(MeasureSpace::<f64>::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(MeasureSpace::<f64>::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(MeasureSpace::<BigRational>::new(vec![]).is_err());
    }

    #[test]
    fn fast_path_agrees_with_plain_sums() {
        let s = MeasureSpace::<BigRational>::from_masses(&[1, 2, 3, 4, 0, 7]).unwrap();
        assert!(s.scale().is_some());
        let set = PointSet::from_points(6, &[0, 2, 5]).unwrap();
        let plain = set.iter().fold(BigRational::zero(), |a, p| a + s.weight(p).clone());
        assert_eq!(s.measure(&set), plain);
        assert_eq!(plain, q(11, 17));
    }

    #[test]
    fn huge_denominators_fall_back() {
        let big = BigInt::from(u64::MAX) * BigInt::from(3u8);
        let w = BigRational::new(BigInt::one(), big.clone());
        let rest = BigRational::one() - w.clone();
        let s = MeasureSpace::new(vec![w.clone(), rest]).unwrap();
        assert!(s.scale().is_none());
        assert_eq!(s.measure_of(&[0]).unwrap(), w);
    }
}
