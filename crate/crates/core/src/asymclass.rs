//! Empirical checks of the one-dimensional asymptotic-class conditions:
//! every instance `φ(M, ā)` is either boundedly small or has size
//! `μ|M| + O(|M|^{1/2})` for `μ` in a finite set `E`, and the `μ`-parts are
//! definable. Fits are witnesses on the sampled indices, never proofs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dimension::{classify_gap, gap_sequence, DimensionError, GapConfig, GapVerdict, VerdictKind};
use crate::eval::{parameter_variables, sweep_counts, Assignment, Compiled, EvalError, GrowthProfile};
use crate::logic::Formula;
use crate::structures::{advance, Element, FiniteStructure, StructureError, StructureFamily};

#[derive(Debug, Error)]
pub enum AsymError {
    #[error("the formula has no parameters besides `{0}`")]
    NoParameters(String),
    #[error("index {index}: {tuples} parameter tuples exceed the budget of {budget}")]
    Budget { index: usize, tuples: u128, budget: u64 },
    #[error("no indices given")]
    NoIndices,
    #[error("candidate mentions `{0}`, which is not a parameter of the formula")]
    CandidateVariable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    /// Counts at or below this are bounded; inferred when absent.
    pub c_bound: Option<u64>,
    /// Ratio gap separating clusters at the largest index; defaults to
    /// `3·|M_N|^{-1/2}`.
    pub gap: Option<f64>,
    /// Cluster membership radius, in units of `|M|^{1/2}`.
    pub radius: f64,
    /// Largest number of parameter tuples per index.
    pub budget: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            c_bound: None,
            gap: None,
            radius: 3.0,
            budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bucket {
    Bounded,
    Cluster(usize),
    Unclassified,
}

impl Bucket {
    fn label(self) -> String {
        match self {
            Bucket::Bounded => "bounded".into(),
            Bucket::Cluster(i) => format!("mu{i}"),
            Bucket::Unclassified => "unclassified".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub index: usize,
    pub universe: usize,
    pub tuple: Vec<Element>,
    pub count: u64,
    pub bucket: Bucket,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub mu: f64,
    /// Largest distance from `mu` of a member ratio at the largest index.
    pub radius: f64,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub formula: String,
    pub parameters: Vec<String>,
    pub indices: Vec<usize>,
    pub c_bound: u64,
    pub clusters: Vec<Cluster>,
    pub residual_constant: f64,
    pub bounded: usize,
    pub clustered: usize,
    pub unclassified: usize,
    /// The first few unclassified `(index, tuple)` pairs.
    pub unclassified_sample: Vec<(usize, Vec<Element>)>,
    pub consistent: bool,
    pub verdict: String,
    #[serde(skip)]
    pub rows: Vec<FitRow>,
}

impl AsymptoticFit {
    /// Measure estimates `E`, ascending.
    pub fn measures(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.mu).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fits serialize")
    }

    /// Rows `index,tuple,count,bucket`, tuple entries separated by spaces.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,tuple,count,bucket\n");
        for r in &self.rows {
            let tuple: Vec<String> = r.tuple.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{},{},{},{}", r.index, tuple.join(" "), r.count, r.bucket.label());
        }
        out
    }
}

fn decode(mut code: usize, n: usize, m: usize) -> Vec<Element> {
    let mut t = vec![0; m];
    for slot in t.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
    t
}

/// `|φ(M, ā)|` for every `ā ∈ M^m`, in lexicographic order of `ā`.
pub fn parameter_counts(
    m: &FiniteStructure,
    phi: &Formula,
    x: &str,
    params: &[String],
) -> Result<Vec<u64>, EvalError> {
    let n = m.universe_size();
    let rest: Vec<&str> = params[1..].iter().map(String::as_str).chain([x]).collect();
    let block = n.pow(params.len() as u32 - 1);
    let blocks = (0..n)
        .into_par_iter()
        .map(|a0| {
            let fixed: Assignment = [(params[0].clone(), a0)].into();
            let c = Compiled::new(m, phi, &rest, &fixed)?;
            let mut counts = vec![0u64; block];
            c.for_each_solution(|t| {
                let code = t[..t.len() - 1].iter().fold(0, |acc, &e| acc * n + e);
                counts[code] += 1;
            });
            Ok(counts)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(blocks.concat())
}

/// Fits condition (1): a bounded bucket, measure clusters `E`, and the
/// residual constant, from exact counts over all parameter tuples.
pub fn fit_condition_one(
    fam: &StructureFamily,
    phi: &Formula,
    x: &str,
    indices: &[usize],
    cfg: &FitConfig,
) -> Result<AsymptoticFit, AsymError> {
    let params = parameter_variables(phi, x);
    if params.is_empty() {
        return Err(AsymError::NoParameters(x.to_string()));
    }
    if indices.is_empty() {
        return Err(AsymError::NoIndices);
    }
    let arity = params.len();
    for &n in indices {
        let tuples = (fam.universe_size(n) as u128).pow(arity as u32);
        if tuples > cfg.budget as u128 {
            return Err(AsymError::Budget {
                index: n,
                tuples,
                budget: cfg.budget,
            });
        }
    }
    // index position → (universe, counts by tuple code)
    let mut data: Vec<(usize, usize, Vec<u64>)> = Vec::with_capacity(indices.len());
    for &n in indices {
        let m = fam.generate(n)?;
        let counts = parameter_counts(&m, phi, x, &params)?;
        data.push((n, m.universe_size(), counts));
    }

    // code tuples present at every index, keyed by element tuple
    let min_universe = data.iter().map(|d| d.1).min().expect("non-empty");
    let (first, last) = (&data[0], &data[data.len() - 1]);
    let shared: Vec<Vec<Element>> = (0..min_universe.pow(arity as u32))
        .map(|c| decode(c, min_universe, arity))
        .collect();
    let code_of = |t: &[Element], n: usize| t.iter().fold(0, |acc, &e| acc * n + e);
    let c_bound = cfg.c_bound.unwrap_or_else(|| {
        shared
            .iter()
            .filter(|t| last.2[code_of(t, last.1)] <= first.2[code_of(t, first.1)])
            .map(|t| first.2[code_of(t, first.1)])
            .max()
            .unwrap_or(0)
    });
    // shared tuples exceeding the bound somewhere are never bounded
    let mut ever_large: BTreeMap<Vec<Element>, bool> = BTreeMap::new();
    for t in &shared {
        let large = data.iter().any(|(_, u, counts)| counts[code_of(t, *u)] > c_bound);
        ever_large.insert(t.clone(), large);
    }
    let is_bounded = |t: &[Element], count: u64, universe: usize| {
        count <= c_bound && !(t.iter().all(|&e| e < min_universe) && ever_large[t]) && universe > 0
    };

    // clusters at the largest index
    let big = last.1 as f64;
    let gap = cfg.gap.unwrap_or(3.0 / big.sqrt());
    let mut ratios: Vec<(f64, usize)> = last
        .2
        .iter()
        .enumerate()
        .filter(|&(code, &c)| !is_bounded(&decode(code, last.1, arity), c, last.1))
        .map(|(code, &c)| (c as f64 / big, code))
        .collect();
    ratios.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for r in ratios {
        match groups.last_mut() {
            Some(g) if r.0 - g.last().expect("non-empty").0 <= gap => g.push(r),
            _ => groups.push(vec![r]),
        }
    }
    let mut clusters = Vec::new();
    let mut last_assignment: BTreeMap<usize, Bucket> = BTreeMap::new();
    for g in groups {
        let mu = g.iter().map(|r| r.0).sum::<f64>() / g.len() as f64;
        // a band reaching down to 0 cannot be told apart from bounded counts
        let resolvable = mu * big > cfg.radius * big.sqrt();
        let bucket = if resolvable {
            clusters.push(Cluster {
                mu,
                radius: g.iter().map(|r| (r.0 - mu).abs()).fold(0.0, f64::max),
                members: g.len(),
            });
            Bucket::Cluster(clusters.len() - 1)
        } else {
            Bucket::Unclassified
        };
        for (_, code) in g {
            last_assignment.insert(code, bucket);
        }
    }

    let mut rows = Vec::new();
    let mut residual: f64 = 0.0;
    let (mut bounded, mut clustered, mut unclassified) = (0, 0, 0);
    let mut sample = Vec::new();
    for (pos, (n, universe, counts)) in data.iter().enumerate() {
        let size = *universe as f64;
        for (code, &count) in counts.iter().enumerate() {
            let tuple = decode(code, *universe, arity);
            let bucket = if is_bounded(&tuple, count, *universe) {
                Bucket::Bounded
            } else if pos == data.len() - 1 {
                match last_assignment[&code] {
                    Bucket::Cluster(i) if (count as f64 - clusters[i].mu * size).abs() > cfg.radius * size.sqrt() => {
                        Bucket::Unclassified
                    }
                    b => b,
                }
            } else {
                clusters
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, (count as f64 - c.mu * size).abs()))
                    .filter(|&(_, d)| d <= cfg.radius * size.sqrt())
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map_or(Bucket::Unclassified, |(i, _)| Bucket::Cluster(i))
            };
            match bucket {
                Bucket::Bounded => bounded += 1,
                Bucket::Cluster(i) => {
                    clustered += 1;
                    residual = residual.max((count as f64 - clusters[i].mu * size).abs() / size.sqrt());
                }
                Bucket::Unclassified => {
                    unclassified += 1;
                    if sample.len() < 20 {
                        sample.push((*n, tuple.clone()));
                    }
                }
            }
            rows.push(FitRow {
                index: *n,
                universe: *universe,
                tuple,
                count,
                bucket,
            });
        }
    }
    let consistent = unclassified == 0;
    let verdict = if consistent {
        "consistent with condition (1) on sampled indices".to_string()
    } else {
        format!("not a fit: {unclassified} unclassified (index, tuple) pairs")
    };
    Ok(AsymptoticFit {
        formula: phi.to_string(),
        parameters: params,
        indices: indices.to_vec(),
        c_bound,
        clusters,
        residual_constant: residual,
        bounded,
        clustered,
        unclassified,
        unclassified_sample: sample,
        consistent,
        verdict,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuCheckRow {
    pub index: usize,
    pub agrees: bool,
    /// Tuples on which the candidate and the counting condition disagree.
    pub counterexamples: Vec<Vec<Element>>,
}

const MAX_COUNTEREXAMPLES: usize = 5;

/// Condition (2): compares the candidate's solution set in `M^m` with the
/// tuples `ā` satisfying `||φ(M,ā)| − μ|M|| ≤ C|M|^{1/2}`. `mu = None`
/// stands for an empty measure set, whose condition holds nowhere.
pub fn check_mu_definability(
    fam: &StructureFamily,
    phi: &Formula,
    x: &str,
    mu: Option<f64>,
    candidate: &Formula,
    indices: &[usize],
    c: f64,
) -> Result<Vec<MuCheckRow>, AsymError> {
    let params = parameter_variables(phi, x);
    if params.is_empty() {
        return Err(AsymError::NoParameters(x.to_string()));
    }
    if let Some(v) = candidate.free_variables().into_iter().find(|v| !params.contains(v)) {
        return Err(AsymError::CandidateVariable(v));
    }
    indices
        .par_iter()
        .map(|&n| {
            let m = fam.generate(n)?;
            let size = m.universe_size() as f64;
            let counts = parameter_counts(&m, phi, x, &params)?;
            let cand = Compiled::new(&m, candidate, &params, &Assignment::new())?;
            let mut tuple = vec![0; params.len()];
            let mut counterexamples = Vec::new();
            let mut agrees = true;
            for &count in &counts {
                let wanted = mu.is_some_and(|mu| (count as f64 - mu * size).abs() <= c * size.sqrt());
                if cand.eval_at(&tuple) != wanted {
                    agrees = false;
                    if counterexamples.len() < MAX_COUNTEREXAMPLES {
                        counterexamples.push(tuple.clone());
                    }
                }
                advance(&mut tuple, m.universe_size());
            }
            Ok(MuCheckRow {
                index: n,
                agrees,
                counterexamples,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TwoValueClass {
    Zero,
    Full,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoValueEntry {
    pub formula: String,
    pub scheme: String,
    pub counts: Vec<u64>,
    pub class: TwoValueClass,
    pub verdict: Option<GapVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoValueReport {
    pub family: String,
    pub indices: Vec<usize>,
    pub c_bound: u64,
    pub entries: Vec<TwoValueEntry>,
    pub violations: usize,
}

impl TwoValueReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoValueConfig {
    pub c_bound: u64,
    pub gap: GapConfig,
}

impl Default for TwoValueConfig {
    fn default() -> Self {
        Self {
            c_bound: 8,
            gap: GapConfig::default(),
        }
    }
}

/// Sorts each one-variable definable set into dimension 0 (bounded counts)
/// or full dimension (bounded gap to the universe); anything else is a
/// violation of the two-value dichotomy.
pub fn two_value_check(
    fam: &StructureFamily,
    entries: &[(Formula, String)],
    x: &str,
    indices: &[usize],
    cfg: &TwoValueConfig,
) -> Result<TwoValueReport, AsymError> {
    if indices.is_empty() {
        return Err(AsymError::NoIndices);
    }
    let universe_formula = Formula::Eq(crate::logic::Term::var(x), crate::logic::Term::var(x));
    let universe = sweep_counts(fam, &universe_formula, x, "none", indices)?;
    let mut out = Vec::with_capacity(entries.len());
    for (phi, scheme) in entries {
        let profile: GrowthProfile = sweep_counts(fam, phi, x, scheme, indices)?;
        let counts = profile.counts();
        let (class, verdict) = if counts.iter().all(|&c| c <= cfg.c_bound) {
            (TwoValueClass::Zero, None)
        } else {
            let v = classify_gap(&gap_sequence(&profile, &universe)?, &cfg.gap)?;
            let class = if v.kind == VerdictKind::Equal {
                TwoValueClass::Full
            } else {
                TwoValueClass::Violation
            };
            (class, Some(v))
        };
        out.push(TwoValueEntry {
            formula: phi.to_string(),
            scheme: scheme.clone(),
            counts,
            class,
            verdict,
        });
    }
    let violations = out.iter().filter(|e| e.class == TwoValueClass::Violation).count();
    Ok(TwoValueReport {
        family: fam.name().to_string(),
        indices: indices.to_vec(),
        c_bound: cfg.c_bound,
        entries: out,
        violations,
    })
}
