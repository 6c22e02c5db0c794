use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{MeasureError, MeasureSpace, PointSet, SetSystem, Weight};

/// Largest number of sets for which atoms are enumerated.
pub const MAX_ATOM_SETS: usize = 20;

/// Largest `k` for which `ε^(3^(k-1))` is formed exactly.
const MAX_RICH_K: usize = 12;

/// `C(m, i) − C(m, i+1)`.
pub fn binomial_gap(m: u64, i: u64) -> Result<BigInt, MeasureError> {
    if i >= m {
        return Err(MeasureError::BinomialRange { m, i });
    }
    let m = BigInt::from(m);
    Ok(binomial(m.clone(), BigInt::from(i)) - binomial(m, BigInt::from(i + 1)))
}

/// Sums measures, staying on scaled integers while the space allows it.
struct Summer<'a, W: Weight> {
    space: &'a MeasureSpace<W>,
    scaled: u128,
    exact: W,
}

impl<'a, W: Weight> Summer<'a, W> {
    fn new(space: &'a MeasureSpace<W>) -> Self {
        Self {
            space,
            scaled: 0,
            exact: W::zero(),
        }
    }

    fn add(&mut self, set: &PointSet) {
        match self.space.scaled_measure(set) {
            Some((num, _)) => match self.scaled.checked_add(num) {
                Some(s) => self.scaled = s,
                None => {
                    let den = self.space.scale().expect("scaled").1;
                    self.exact = self.exact.clone() + W::from_scaled(self.scaled, den);
                    self.scaled = num;
                }
            },
            None => self.exact = self.exact.clone() + self.space.measure(set),
        }
    }

    fn total(self) -> W {
        match self.space.scale() {
            Some((_, den)) => self.exact + W::from_scaled(self.scaled, *den),
            None => self.exact,
        }
    }
}

/// Visits every `k`-subset of `0..n` in lexicographic order along with the
/// intersection of its sets. `visit` returns `false` to stop early.
fn for_each_intersection(
    system: &SetSystem,
    k: usize,
    mut visit: impl FnMut(&[usize], &PointSet) -> bool,
) {
    fn go(
        system: &SetSystem,
        k: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        acc: &PointSet,
        visit: &mut dyn FnMut(&[usize], &PointSet) -> bool,
    ) -> bool {
        if chosen.len() == k {
            return visit(chosen, acc);
        }
        let need = k - chosen.len();
        for i in from..=system.len() - need {
            chosen.push(i);
            let next = acc.intersection(system.set(i));
            let keep_going = go(system, k, i + 1, chosen, &next, visit);
            chosen.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    let full = PointSet::full(system.points());
    go(system, k, 0, &mut Vec::with_capacity(k), &full, &mut visit);
}

/// `S_k = Σ_{i_1<…<i_k} μ(A_{i_1} ∩ … ∩ A_{i_k})`.
pub fn s_k<W: Weight>(space: &MeasureSpace<W>, system: &SetSystem, k: usize) -> Result<W, MeasureError> {
    system.check_space(space)?;
    if k == 0 || k > system.len() {
        return Err(MeasureError::KOutOfRange { k, n: system.len() });
    }
    let mut sum = Summer::new(space);
    for_each_intersection(system, k, |_, set| {
        sum.add(set);
        true
    });
    Ok(sum.total())
}

/// Measures of the atoms `E_W`, indexed by the bitmask of `W` (bit `i` for
/// set `i`). Index 0 holds the part of the space outside every set.
#[derive(Debug, Clone, PartialEq)]
pub struct Atoms<W: Weight> {
    sets: usize,
    measures: Vec<W>,
}

impl<W: Weight> Atoms<W> {
    pub fn sets(&self) -> usize {
        self.sets
    }

    pub fn get(&self, mask: usize) -> &W {
        &self.measures[mask]
    }

    /// `(mask, μ(E_W))` for every non-empty `W`.
    pub fn nonempty(&self) -> impl Iterator<Item = (usize, &W)> {
        self.measures.iter().enumerate().skip(1)
    }

    /// `μ(⋃ A_i) = Σ_{W ≠ ∅} μ(E_W)`.
    pub fn union_measure(&self) -> W {
        self.nonempty().fold(W::zero(), |a, (_, m)| a + m.clone())
    }

    /// `μ(⋂_{i ∈ I} A_i) = Σ_{W ⊇ I} μ(E_W)`.
    pub fn intersection_measure(&self, indices: &[usize]) -> W {
        let need = indices.iter().fold(0usize, |m, &i| m | 1 << i);
        self.measures
            .iter()
            .enumerate()
            .filter(|(w, _)| w & need == need)
            .fold(W::zero(), |a, (_, m)| a + m.clone())
    }
}

pub fn atoms<W: Weight>(space: &MeasureSpace<W>, system: &SetSystem) -> Result<Atoms<W>, MeasureError> {
    system.check_space(space)?;
    let n = system.len();
    if n > MAX_ATOM_SETS {
        return Err(MeasureError::TooManySets { n, max: MAX_ATOM_SETS });
    }
    let mut measures = vec![W::zero(); 1 << n];
    for p in 0..space.points() {
        let mask = system.membership(p) as usize;
        measures[mask] = measures[mask].clone() + space.weight(p).clone();
    }
    Ok(Atoms { sets: n, measures })
}

/// `Σ_{i=start}^{N} (−1)^{i−1} S_i`.
pub fn inclusion_exclusion_tail<W: Weight>(
    space: &MeasureSpace<W>,
    system: &SetSystem,
    start: usize,
) -> Result<W, MeasureError> {
    system.check_space(space)?;
    let n = system.len();
    if start == 0 || start > n {
        return Err(MeasureError::StartOutOfRange { start, n });
    }
    if let Some((nums, den)) = space.scale() {
        // Signed running sum on scaled integers; one conversion at the end.
        let mut acc: Option<i128> = Some(0);
        for i in start..=n {
            for_each_intersection(system, i, |_, set| {
                let v = set.iter().map(|p| nums[p]).sum::<u128>() as i128;
                acc = acc.and_then(|a| if i % 2 == 1 { a.checked_add(v) } else { a.checked_sub(v) });
                acc.is_some()
            });
        }
        if let Some(a) = acc {
            let magnitude = W::from_scaled(a.unsigned_abs(), *den);
            return Ok(if a < 0 { -magnitude } else { magnitude });
        }
    }
    let mut total = W::zero();
    for i in start..=n {
        let s = s_k(space, system, i)?;
        total = if i % 2 == 1 { total + s } else { total - s };
    }
    Ok(total)
}

fn check_epsilon(eps: &BigRational) -> Result<(), MeasureError> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    if eps.is_zero() || *eps < BigRational::zero() || *eps > half {
        return Err(MeasureError::EpsilonOutOfRange(eps.to_string()));
    }
    Ok(())
}

/// `floor(1/ε² + 1/2)`: this many sets of measure `≥ ε` always contain a
/// pair whose intersection has measure `≥ ε³`.
pub fn pair_guarantee_size(eps: &BigRational) -> Result<u64, MeasureError> {
    check_epsilon(eps)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    let x0 = (eps * eps).recip() + half;
    let n = x0.floor().to_integer();
    u64::try_from(n).map_err(|_| MeasureError::EpsilonOutOfRange(eps.to_string()))
}

/// `f(N) = Nε − N(N−1)ε³/2`, the lower bound on `μ(⋃ A_i)` when every
/// pairwise intersection is below `ε³`.
pub fn pair_guarantee_f(n: u64, eps: &BigRational) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(n));
    let cube = eps * eps * eps;
    &n * eps - &n * (&n - BigRational::one()) * cube / BigRational::from_integer(2.into())
}

/// `ε^(3^(k−1))`.
pub fn rich_threshold(eps: &BigRational, k: usize) -> Result<BigRational, MeasureError> {
    if k == 0 || k > MAX_RICH_K {
        return Err(MeasureError::KOutOfRange { k, n: MAX_RICH_K });
    }
    Ok(num_traits::pow(eps.clone(), 3usize.pow(k as u32 - 1)))
}

/// Outcome of the `k`-fold intersection search. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct RichIntersection<W: Weight> {
    pub k: usize,
    pub threshold: W,
    /// First subset, lexicographically, meeting the threshold.
    pub hit: Option<(Vec<usize>, W)>,
    /// Largest intersection seen (the hit itself when there is one).
    pub best: (Vec<usize>, W),
    pub examined: u64,
}

/// Searches `k`-subsets of a system with `μ(A_i) ≥ ε` for one whose
/// intersection has measure `≥ ε^(3^(k−1))`.
pub fn find_rich_intersection<W: Weight>(
    space: &MeasureSpace<W>,
    system: &SetSystem,
    k: usize,
    eps: &BigRational,
) -> Result<RichIntersection<W>, MeasureError> {
    system.check_space(space)?;
    check_epsilon(eps)?;
    if k == 0 || k > system.len() {
        return Err(MeasureError::KOutOfRange { k, n: system.len() });
    }
    let eps_w = W::from_rational(eps);
    for (index, set) in system.sets().iter().enumerate() {
        let m = space.measure(set);
        if !m.at_least(&eps_w) {
            return Err(MeasureError::Hypothesis {
                index,
                measure: m.display(),
                epsilon: eps.to_string(),
            });
        }
    }
    let threshold = W::from_rational(&rich_threshold(eps, k)?);
    let mut best: Option<(Vec<usize>, W)> = None;
    let mut hit = None;
    let mut examined = 0;
    for_each_intersection(system, k, |chosen, set| {
        examined += 1;
        let m = space.measure(set);
        if best.as_ref().is_none_or(|(_, b)| m > *b) {
            best = Some((chosen.to_vec(), m.clone()));
        }
        if m.at_least(&threshold) {
            hit = Some((chosen.to_vec(), m));
            return false;
        }
        true
    });
    let best = match &hit {
        Some(h) => h.clone(),
        None => best.expect("k ≤ N gives at least one subset"),
    };
    Ok(RichIntersection {
        k,
        threshold,
        hit,
        best,
        examined,
    })
}
