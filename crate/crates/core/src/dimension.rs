//! Comparing growth rates of definable sets along a family.
//!
//! Two count profiles have equal dimension when their log-gap stays
//! bounded, and the first is strictly smaller when the gap diverges. A
//! finite sample can only suggest either, so the classifier works from a
//! least-squares slope of the gap against `ln n` plus explicit thresholds,
//! and answers `inconclusive` whenever the evidence is mixed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{count_solutions, project_count, Assignment, EvalError, GrowthProfile};
use crate::logic::Formula;
use crate::structures::FiniteStructure;

#[derive(Debug, Error)]
pub enum DimensionError {
    #[error("profiles sample different indices ({left:?} vs {right:?})")]
    IndexMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("{found} sample(s), at least {needed} needed")]
    TooFewSamples { found: usize, needed: usize },
    #[error("index 0 has no logarithm")]
    ZeroIndex,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    /// Least gap slope (per unit of `ln n`) that counts as divergence.
    pub slope_threshold: f64,
    /// Gap, in nats, that the tail must clear for a strict verdict and
    /// that no sample may exceed for an equal verdict.
    pub divergence_threshold: f64,
    pub min_samples: usize,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            slope_threshold: 0.05,
            divergence_threshold: 3.0,
            min_samples: 5,
        }
    }
}

impl GapConfig {
    pub fn validate(&self) -> Result<(), DimensionError> {
        if !(self.slope_threshold > 0.0 && self.slope_threshold.is_finite()) {
            return Err(DimensionError::Config("slope threshold must be positive".into()));
        }
        if !(self.divergence_threshold > 0.0 && self.divergence_threshold.is_finite()) {
            return Err(DimensionError::Config("divergence threshold must be positive".into()));
        }
        if self.min_samples < 2 {
            return Err(DimensionError::Config("need at least two samples to fit a slope".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub index: usize,
    pub count_x: u64,
    pub count_y: u64,
    /// `ln c^Y_n − ln c^X_n`; absent when either count is 0.
    pub gap: Option<f64>,
}

/// Pairs up two profiles sampled on the same indices.
pub fn gap_sequence(px: &GrowthProfile, py: &GrowthProfile) -> Result<Vec<GapPoint>, DimensionError> {
    if px.indices() != py.indices() {
        return Err(DimensionError::IndexMismatch {
            left: px.indices(),
            right: py.indices(),
        });
    }
    Ok(px
        .rows
        .iter()
        .zip(&py.rows)
        .map(|(x, y)| GapPoint {
            index: x.index,
            count_x: x.count,
            count_y: y.count,
            gap: (x.count > 0 && y.count > 0).then(|| (y.count as f64 / x.count as f64).ln()),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    MinusInfinity,
    Equal,
    StrictlyLess,
    Inconclusive,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::MinusInfinity => "minus-infinity",
            VerdictKind::Equal => "equal",
            VerdictKind::StrictlyLess => "strictly-less",
            VerdictKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapVerdict {
    pub kind: VerdictKind,
    pub slope: Option<f64>,
    pub max_gap: Option<f64>,
    pub min_tail_gap: Option<f64>,
    pub samples: usize,
    pub config: GapConfig,
}

impl GapVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Number of trailing samples forming the tail window: the last third,
/// rounded up.
pub fn tail_len(samples: usize) -> usize {
    samples.div_ceil(3)
}

pub fn classify_gap(gaps: &[GapPoint], cfg: &GapConfig) -> Result<GapVerdict, DimensionError> {
    cfg.validate()?;
    let verdict = |kind, slope, max_gap, min_tail_gap| GapVerdict {
        kind,
        slope,
        max_gap,
        min_tail_gap,
        samples: gaps.len(),
        config: *cfg,
    };
    if !gaps.is_empty() && gaps.iter().all(|g| g.count_x == 0) {
        return Ok(verdict(VerdictKind::MinusInfinity, None, None, None));
    }
    if gaps.len() < cfg.min_samples {
        return Err(DimensionError::TooFewSamples {
            found: gaps.len(),
            needed: cfg.min_samples,
        });
    }
    if gaps.iter().any(|g| g.index == 0) {
        return Err(DimensionError::ZeroIndex);
    }
    let Some(ys) = gaps.iter().map(|g| g.gap).collect::<Option<Vec<f64>>>() else {
        return Ok(verdict(VerdictKind::Inconclusive, None, None, None));
    };
    let xs: Vec<f64> = gaps.iter().map(|g| (g.index as f64).ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let max_gap = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let tail = &ys[ys.len() - tail_len(ys.len())..];
    let min_tail_gap = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let kind = if slope >= cfg.slope_threshold && min_tail_gap >= cfg.divergence_threshold {
        VerdictKind::StrictlyLess
    } else if max_gap <= cfg.divergence_threshold && slope < cfg.slope_threshold {
        VerdictKind::Equal
    } else {
        VerdictKind::Inconclusive
    };
    Ok(verdict(kind, Some(slope), Some(max_gap), Some(min_tail_gap)))
}

/// `classify_gap(gap_sequence(px, py))`.
pub fn compare_profiles(
    px: &GrowthProfile,
    py: &GrowthProfile,
    cfg: &GapConfig,
) -> Result<GapVerdict, DimensionError> {
    classify_gap(&gap_sequence(px, py)?, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionBound {
    pub count_f: u64,
    pub count_g: u64,
    pub count_union: u64,
    /// `ln |X ∪ Y|`; absent when the union is empty.
    pub lhs: Option<f64>,
    /// `max(ln |X|, ln |Y|) + ln 2`; absent when both sets are empty.
    pub rhs: Option<f64>,
    pub degenerate: bool,
    /// `|X ∪ Y| ≤ 2·max(|X|, |Y|)`, decided on integers.
    pub holds: bool,
}

/// The union axiom on one instance: `|X ∪ Y| ≤ 2·max(|X|, |Y|)`, with the
/// union counted through the disjunction `f ∨ g`.
pub fn union_bound_check(
    m: &FiniteStructure,
    f: &Formula,
    g: &Formula,
    x: &str,
    params: &Assignment,
) -> Result<UnionBound, DimensionError> {
    let count_f = count_solutions(m, f, &[x], params)?;
    let count_g = count_solutions(m, g, &[x], params)?;
    let either = Formula::or(f.clone(), g.clone());
    let count_union = count_solutions(m, &either, &[x], params)?;
    let larger = count_f.max(count_g);
    let ln = |c: u64| (c > 0).then(|| (c as f64).ln());
    Ok(UnionBound {
        count_f,
        count_g,
        count_union,
        lhs: ln(count_union),
        rhs: ln(larger).map(|l| l + std::f64::consts::LN_2),
        degenerate: larger == 0,
        holds: count_union as u128 <= 2 * larger as u128,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiberBound {
    pub total: u64,
    pub image: u64,
    pub max_fiber: u64,
    /// `total ≤ image · max_fiber`.
    pub holds: bool,
}

/// The fiber axiom on one instance: `|X| ≤ |π(X)| · max fiber`.
pub fn fiber_bound_check<S: AsRef<str>, K: AsRef<str>>(
    m: &FiniteStructure,
    f: &Formula,
    vars: &[S],
    keep: &[K],
    params: &Assignment,
) -> Result<FiberBound, DimensionError> {
    let p = project_count(m, f, vars, params, keep)?;
    Ok(FiberBound {
        total: p.total,
        image: p.image,
        max_fiber: p.max_fiber,
        holds: p.total as u128 <= p.image as u128 * p.max_fiber as u128,
    })
}
