use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{MeasureError, MeasureSpace};

/// A subset of `0..m` as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(points: usize) -> Self {
        Self {
            words: vec![0; points.div_ceil(64)],
        }
    }

    pub fn full(points: usize) -> Self {
        let mut s = Self::empty(points);
        for p in 0..points {
            s.insert(p);
        }
        s
    }

    /// Fails with the first point `≥ points`.
    pub fn from_points(points: usize, members: &[usize]) -> Result<Self, usize> {
        let mut s = Self::empty(points);
        for &p in members {
            if p >= points {
                return Err(p);
            }
            s.insert(p);
        }
        Ok(s)
    }

    pub fn insert(&mut self, p: usize) {
        self.words[p / 64] |= 1 << (p % 64);
    }

    pub fn contains(&self, p: usize) -> bool {
        self.words.get(p / 64).is_some_and(|w| w >> (p % 64) & 1 == 1)
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

/// Sets `A_1..A_N` over points `0..m` (indexed from 0 in code).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    points: usize,
    sets: Vec<PointSet>,
}

impl SetSystem {
    pub fn new(points: usize, sets: &[Vec<usize>]) -> Result<Self, MeasureError> {
        let sets = sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                PointSet::from_points(points, s).map_err(|point| MeasureError::PointOutOfRange {
                    set: i,
                    point,
                    points,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { points, sets })
    }

    pub fn from_point_sets(points: usize, sets: Vec<PointSet>) -> Self {
        Self { points, sets }
    }

    /// Re-indexes element sets onto the points of `domain` (sorted,
    /// distinct); elements outside `domain` are dropped.
    pub fn restricted(domain: &[usize], sets: &[Vec<usize>]) -> Self {
        let points = domain.len();
        let sets = sets
            .iter()
            .map(|s| {
                let mut ps = PointSet::empty(points);
                for e in s {
                    if let Ok(j) = domain.binary_search(e) {
                        ps.insert(j);
                    }
                }
                ps
            })
            .collect();
        Self { points, sets }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, i: usize) -> &PointSet {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    /// Bitmask of the sets containing `p`; needs at most 64 sets.
    pub(crate) fn membership(&self, p: usize) -> u64 {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(p))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub(crate) fn check_space<W: super::Weight>(&self, space: &MeasureSpace<W>) -> Result<(), MeasureError> {
        if space.points() != self.points {
            return Err(MeasureError::SpaceMismatch {
                sets: self.len(),
                system_points: self.points,
                space_points: space.points(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightText {
    Text(String),
    Number(serde_json::Number),
}

/// On-disk form of a weighted set system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSystemFile {
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightText>>,
    pub sets: Vec<Vec<usize>>,
}

/// Reads `"p/q"`, an integer, or a plain decimal such as `"0.125"` as an
/// exact rational.
pub fn parse_weight(text: &str) -> Result<BigRational, MeasureError> {
    let bad = || MeasureError::BadWeight(text.to_string());
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10u8), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Parses the JSON set-system format; weights default to uniform.
pub fn load_set_system(json: &str) -> Result<(MeasureSpace, SetSystem), MeasureError> {
    let file: SetSystemFile = serde_json::from_str(json)?;
    let space = match &file.weights {
        None => MeasureSpace::uniform(file.points)?,
        Some(ws) => {
            if ws.len() != file.points {
                return Err(MeasureError::WeightCount {
                    given: ws.len(),
                    points: file.points,
                });
            }
            let ws = ws
                .iter()
                .map(|w| match w {
                    WeightText::Text(t) => parse_weight(t),
                    WeightText::Number(n) => parse_weight(&n.to_string()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            MeasureSpace::new(ws)?
        }
    };
    let system = SetSystem::new(file.points, &file.sets)?;
    Ok((space, system))
}
