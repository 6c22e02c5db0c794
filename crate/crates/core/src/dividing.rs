//! k-inconsistency of formula instances, the explicit circular-order
//! witness sequence, and the finite mechanism relating dividing to a drop in
//! dimension: enough dense instances always share a rich pair, so a
//! 2-inconsistent family cannot be uniformly dense.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dimension::{compare_profiles, DimensionError, GapConfig, GapVerdict, VerdictKind};
use crate::eval::{
    bind_parameters, definable_set, parameter_variables, sweep_counts, Assignment, Compiled,
    EvalError, GrowthProfile,
};
use crate::logic::{parse_formula, Formula, SyntaxError};
use crate::measure::{
    counting_measure_on, find_rich_intersection, pair_guarantee_size, MeasureError, PointSet,
    SetSystem,
};
use crate::structures::{Element, FiniteStructure, StructureError, StructureFamily};

#[derive(Debug, Error)]
pub enum DividingError {
    #[error("parameter tuple {index} has {found} entries, the formula has {expected} parameter(s)")]
    TupleLength { index: usize, expected: usize, found: usize },
    #[error("parameter tuple {index} mentions element {element}, outside the universe of size {size}")]
    TupleOutOfRange { index: usize, element: Element, size: usize },
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("the witness sequence needs n >= 8, got {0}")]
    WitnessIndex(usize),
    #[error("count {count} exceeds floor(n / ln n) = {cap} at n = {n}")]
    WitnessCount { n: usize, count: usize, cap: usize },
    #[error("instance {index}: {reason}")]
    Precondition { index: usize, reason: String },
    #[error("M0 must be at least 2, got {0}")]
    DensityBound(u64),
    #[error("{found} instance(s) given, the pair guarantee needs {needed}")]
    TooFewInstances { found: usize, needed: u64 },
    #[error("scheme `{scheme}` at index {index}: element {element} satisfies the dividing formula but not the baseline")]
    Containment { scheme: String, index: usize, element: Element },
    #[error("no conjugate schemes given")]
    NoSchemes,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

/// Instances `φ(x, b̄_1), …, φ(x, b̄_N)` of one formula in one structure.
#[derive(Debug, Clone)]
pub struct InstanceFamily<'m> {
    structure: &'m FiniteStructure,
    formula: Formula,
    x: String,
    params: Vec<String>,
    tuples: Vec<Vec<Element>>,
}

impl<'m> InstanceFamily<'m> {
    /// The parameter variables of `formula` are its free variables other
    /// than `x`, in first-occurrence order; each tuple binds them in order.
    pub fn new(
        structure: &'m FiniteStructure,
        formula: Formula,
        x: &str,
        tuples: Vec<Vec<Element>>,
    ) -> Result<Self, DividingError> {
        let params = parameter_variables(&formula, x);
        let size = structure.universe_size();
        for (index, t) in tuples.iter().enumerate() {
            if t.len() != params.len() {
                return Err(DividingError::TupleLength {
                    index,
                    expected: params.len(),
                    found: t.len(),
                });
            }
            if let Some(&element) = t.iter().find(|&&e| e >= size) {
                return Err(DividingError::TupleOutOfRange { index, element, size });
            }
        }
        Ok(Self {
            structure,
            formula,
            x: x.to_string(),
            params,
            tuples,
        })
    }

    pub fn structure(&self) -> &FiniteStructure {
        self.structure
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn variable(&self) -> &str {
        &self.x
    }

    pub fn parameters(&self) -> &[String] {
        &self.params
    }

    pub fn tuples(&self) -> &[Vec<Element>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    fn assignment(&self, j: usize) -> Assignment {
        self.params
            .iter()
            .cloned()
            .zip(self.tuples[j].iter().copied())
            .collect()
    }

    /// Solution set of every instance, as bitsets over the universe.
    pub fn solution_sets(&self) -> Result<Vec<PointSet>, DividingError> {
        let size = self.structure.universe_size();
        (0..self.len())
            .into_par_iter()
            .map(|j| {
                let c = Compiled::new(self.structure, &self.formula, &[self.x.as_str()], &self.assignment(j))?;
                let mut set = PointSet::empty(size);
                c.for_each_solution(|t| set.insert(t[0]));
                Ok(set)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Consistency {
    Inconsistent,
    Consistent { indices: Vec<usize>, element: Element },
}

impl Consistency {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, Consistency::Inconsistent)
    }
}

fn first_consistent_subset(sets: &[PointSet], k: usize) -> Consistency {
    fn go(
        sets: &[PointSet],
        k: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        acc: Option<&PointSet>,
    ) -> Option<Element> {
        if chosen.len() == k {
            return acc.and_then(|a| a.iter().next());
        }
        for i in from..=sets.len() - (k - chosen.len()) {
            let next = match acc {
                Some(a) => a.intersection(&sets[i]),
                None => sets[i].clone(),
            };
            if next.is_empty() {
                continue;
            }
            chosen.push(i);
            if let Some(e) = go(sets, k, i + 1, chosen, Some(&next)) {
                return Some(e);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::with_capacity(k);
    match go(sets, k, 0, &mut chosen, None) {
        Some(element) => Consistency::Consistent { indices: chosen, element },
        None => Consistency::Inconsistent,
    }
}

/// Whether every `k` of the instances have no common solution. Otherwise
/// gives the lexicographically first `k`-subset (0-based) that does, with
/// its least common solution.
pub fn check_k_inconsistent(fam: &InstanceFamily, k: usize) -> Result<Consistency, DividingError> {
    if k == 0 || k > fam.len() {
        return Err(DividingError::KOutOfRange { k, n: fam.len() });
    }
    let sets = fam.solution_sets()?;
    Ok(first_consistent_subset(&sets, k))
}

/// `⟦log n⟧ = floor(ln n)`.
pub fn log_step(n: usize) -> usize {
    (n as f64).ln().floor() as usize
}

/// `floor(n / ln n)`, the longest permitted witness sequence.
pub fn circular_witness_cap(n: usize) -> usize {
    (n as f64 / (n as f64).ln()).floor() as usize
}

/// Consecutive short arcs `(a_i, b_i) = (n + i·s, n + (i+1)·s) mod 3n`
/// with `s = ⟦log n⟧`, for `i = 0..count`.
pub fn circular_witness_sequence(n: usize, count: usize) -> Result<Vec<(Element, Element)>, DividingError> {
    if n < 8 {
        return Err(DividingError::WitnessIndex(n));
    }
    let cap = circular_witness_cap(n);
    if count > cap {
        return Err(DividingError::WitnessCount { n, count, cap });
    }
    let s = log_step(n);
    let m = 3 * n;
    Ok((0..count)
        .map(|i| ((n + i * s) % m, (n + (i + 1) * s) % m))
        .collect())
}

/// The instances `R(x, a_i, b_i)` of the witness sequence inside `M_n`.
pub fn circular_witness_family(
    m: &FiniteStructure,
    n: usize,
    count: usize,
) -> Result<InstanceFamily<'_>, DividingError> {
    let pairs = circular_witness_sequence(n, count)?;
    let phi = parse_formula("R(x, a, b)", m.signature())?;
    InstanceFamily::new(m, phi, "x", pairs.into_iter().map(|(a, b)| vec![a, b]).collect())
}

/// The forking cover of `x = x` in `M_n`: the three short arcs between
/// `0, n, 2n` together with the three endpoints themselves.
pub fn circular_cover_disjuncts(m: &FiniteStructure, n: usize) -> Result<Vec<Formula>, DividingError> {
    let (a, b, c) = (0, n, 2 * n);
    [
        format!("R(x, ⟨{a}⟩, ⟨{b}⟩)"),
        format!("R(x, ⟨{b}⟩, ⟨{c}⟩)"),
        format!("R(x, ⟨{c}⟩, ⟨{a}⟩)"),
        format!("x = ⟨{a}⟩"),
        format!("x = ⟨{b}⟩"),
        format!("x = ⟨{c}⟩"),
    ]
    .iter()
    .map(|s| parse_formula(s, m.signature()).map_err(DividingError::from))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub universe: usize,
    pub m0: u64,
    pub instances: usize,
    pub pair_guarantee: u64,
    /// 0-based indices of the first qualifying pair.
    pub pair: Option<(usize, usize)>,
    pub intersection: u64,
    /// `|φ(M,b_j1) ∩ φ(M,b_j2)| / |X|`, exact.
    pub ratio: String,
    pub threshold: String,
    pub contradiction_certified: bool,
}

/// Given instances inside `x` of density at least `1/m0`, exhibits a pair
/// whose intersection has density at least `1/m0³`. If the family was also
/// claimed 2-inconsistent, the pair refutes that claim.
pub fn density_conflict_check(
    m: &FiniteStructure,
    x: &[Element],
    fam: &InstanceFamily,
    m0: u64,
    declared_two_inconsistent: bool,
) -> Result<DensityReport, DividingError> {
    if m0 < 2 {
        return Err(DividingError::DensityBound(m0));
    }
    let mut domain = x.to_vec();
    domain.sort_unstable();
    domain.dedup();
    let space = counting_measure_on(m, &domain)?;
    let sets = fam.solution_sets()?;
    let mut members = Vec::with_capacity(sets.len());
    for (index, set) in sets.iter().enumerate() {
        let elems: Vec<Element> = set.iter().collect();
        if let Some(e) = elems.iter().find(|e| domain.binary_search(e).is_err()) {
            return Err(DividingError::Precondition {
                index,
                reason: format!("solution {e} lies outside X"),
            });
        }
        if (elems.len() as u128) * (m0 as u128) < domain.len() as u128 {
            return Err(DividingError::Precondition {
                index,
                reason: format!("{} solutions, below |X|/M0 = {}/{m0}", elems.len(), domain.len()),
            });
        }
        members.push(elems);
    }
    let eps = BigRational::new(BigInt::from(1), BigInt::from(m0));
    let needed = pair_guarantee_size(&eps)?;
    if (fam.len() as u64) < needed {
        return Err(DividingError::TooFewInstances {
            found: fam.len(),
            needed,
        });
    }
    let system = SetSystem::restricted(&domain, &members);
    let search = find_rich_intersection(&space, &system, 2, &eps)?;
    let (pair, intersection, ratio) = match &search.hit {
        Some((idx, measure)) => {
            let count = system.set(idx[0]).intersection(system.set(idx[1])).len() as u64;
            (Some((idx[0], idx[1])), count, measure.to_string())
        }
        None => (None, 0, search.best.1.to_string()),
    };
    Ok(DensityReport {
        universe: m.universe_size(),
        m0,
        instances: fam.len(),
        pair_guarantee: needed,
        pair,
        intersection,
        ratio,
        threshold: search.threshold.to_string(),
        contradiction_certified: declared_two_inconsistent && pair.is_some(),
    })
}

/// Quantifier-free agreement of `(base, left)` and `(base, right)`: every
/// atomic formula built from terms of function depth at most `depth` over
/// these elements and the constants gets the same truth value.
pub fn qf_diagram_agrees(
    m: &FiniteStructure,
    base: &[Element],
    left: &[Element],
    right: &[Element],
    depth: usize,
) -> bool {
    const TERM_LIMIT: usize = 4096;
    let n = m.universe_size();
    let mut lt: Vec<Element> = base.iter().chain(left).copied().collect();
    let mut rt: Vec<Element> = base.iter().chain(right).copied().collect();
    if lt.len() != rt.len() {
        return false;
    }
    for (_, c) in m.constants() {
        lt.push(c);
        rt.push(c);
    }
    for _ in 0..depth {
        if lt.is_empty() {
            break;
        }
        let (l0, r0) = (lt.clone(), rt.clone());
        for (_, f) in m.functions() {
            let k = f.arity();
            let mut idx = vec![0usize; k];
            loop {
                if lt.len() >= TERM_LIMIT {
                    break;
                }
                let la: Vec<Element> = idx.iter().map(|&i| l0[i]).collect();
                let ra: Vec<Element> = idx.iter().map(|&i| r0[i]).collect();
                lt.push(f.apply(n, &la));
                rt.push(f.apply(n, &ra));
                if !crate::structures::advance(&mut idx, l0.len()) {
                    break;
                }
            }
        }
    }
    for i in 0..lt.len() {
        for j in i + 1..lt.len() {
            if (lt[i] == lt[j]) != (rt[i] == rt[j]) {
                return false;
            }
        }
    }
    if lt.is_empty() {
        return true;
    }
    for (_, rel) in m.relations() {
        let k = rel.arity();
        if lt.len().checked_pow(k as u32).is_none_or(|c| c > 1 << 22) {
            continue;
        }
        let mut idx = vec![0usize; k];
        loop {
            let la: Vec<Element> = idx.iter().map(|&i| lt[i]).collect();
            let ra: Vec<Element> = idx.iter().map(|&i| rt[i]).collect();
            if rel.holds(n, &la) != rel.holds(n, &ra) {
                return false;
            }
            if !crate::structures::advance(&mut idx, lt.len()) {
                break;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeOutcome {
    pub scheme: String,
    pub profile: GrowthProfile,
    pub verdict: GapVerdict,
    /// Per index: does this scheme's tuple share the first scheme's
    /// quantifier-free diagram over the baseline parameters?
    pub diagram_agreement: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InconsistencyRecord {
    pub k: usize,
    /// False when `k` exceeds the number of conjugate schemes.
    pub checked: bool,
    pub inconsistent_at: Vec<usize>,
    pub consistent_at: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropReport {
    pub family: String,
    pub baseline_formula: String,
    pub baseline_scheme: String,
    pub dividing_formula: String,
    pub baseline_profile: GrowthProfile,
    pub schemes: Vec<SchemeOutcome>,
    pub inconsistency: InconsistencyRecord,
    pub diagram_depth: usize,
    /// First scheme whose count falls strictly below the baseline.
    pub drop_scheme: Option<String>,
    pub finding: String,
}

impl DropReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// One row per scheme and index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,index,universe,count,baseline_count,gap,verdict\n");
        for s in &self.schemes {
            for (row, base) in s.profile.rows.iter().zip(&self.baseline_profile.rows) {
                let gap = if row.count > 0 && base.count > 0 {
                    format!("{}", (base.count as f64 / row.count as f64).ln())
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.scheme,
                    row.index,
                    row.universe,
                    row.count,
                    base.count,
                    gap,
                    s.verdict.kind.as_str()
                );
            }
        }
        out
    }
}

/// Options for [`dividing_drop_report`].
#[derive(Debug, Clone)]
pub struct DropOptions {
    pub k: usize,
    pub gap: GapConfig,
    pub diagram_depth: usize,
}

impl Default for DropOptions {
    fn default() -> Self {
        Self {
            k: 2,
            gap: GapConfig::default(),
            diagram_depth: 0,
        }
    }
}

/// Compares `φ(x, b̄′)` against the baseline `ψ(x, ā)` for each conjugate
/// scheme `b̄′` along `indices`, and reports the first scheme whose count
/// is of strictly smaller dimension.
pub fn dividing_drop_report(
    fam: &StructureFamily,
    x: &str,
    baseline: (&Formula, &str),
    phi: &Formula,
    schemes: &[String],
    indices: &[usize],
    opts: &DropOptions,
) -> Result<DropReport, DividingError> {
    let (psi, base_scheme) = baseline;
    if schemes.is_empty() {
        return Err(DividingError::NoSchemes);
    }
    let baseline_profile = sweep_counts(fam, psi, x, base_scheme, indices)?;
    let base_resolved = fam.resolve_scheme(base_scheme)?;
    let resolved = schemes
        .iter()
        .map(|s| fam.resolve_scheme(s))
        .collect::<Result<Vec<_>, _>>()?;

    // per-index containment, k-inconsistency and diagram agreement
    struct IndexFacts {
        inconsistent: Option<bool>,
        agreement: Vec<bool>,
    }
    let facts = indices
        .par_iter()
        .map(|&n| -> Result<IndexFacts, DividingError> {
            let m = fam.generate(n)?;
            let a = fam.scheme_elements(&base_resolved, n)?;
            let base_params = bind_parameters(psi, x, &a)?;
            let base_set: Vec<Element> = definable_set(&m, psi, x, &base_params)?;
            let tuples = resolved
                .iter()
                .map(|s| fam.scheme_elements(s, n))
                .collect::<Result<Vec<_>, _>>()?;
            let inst = InstanceFamily::new(&m, phi.clone(), x, tuples.clone())?;
            let sets = inst.solution_sets()?;
            for (j, set) in sets.iter().enumerate() {
                if let Some(element) = set.iter().find(|e| base_set.binary_search(e).is_err()) {
                    return Err(DividingError::Containment {
                        scheme: schemes[j].clone(),
                        index: n,
                        element,
                    });
                }
            }
            let inconsistent = (opts.k >= 1 && opts.k <= sets.len())
                .then(|| first_consistent_subset(&sets, opts.k).is_inconsistent());
            let agreement = tuples
                .iter()
                .map(|t| qf_diagram_agrees(&m, &a, &tuples[0], t, opts.diagram_depth))
                .collect();
            Ok(IndexFacts { inconsistent, agreement })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut outcomes = Vec::with_capacity(schemes.len());
    for (j, scheme) in schemes.iter().enumerate() {
        let profile = sweep_counts(fam, phi, x, scheme, indices)?;
        let verdict = compare_profiles(&profile, &baseline_profile, &opts.gap)?;
        outcomes.push(SchemeOutcome {
            scheme: scheme.clone(),
            profile,
            verdict,
            diagram_agreement: facts.iter().map(|f| f.agreement[j]).collect(),
        });
    }
    let checked = opts.k >= 1 && opts.k <= schemes.len();
    let mut inconsistency = InconsistencyRecord {
        k: opts.k,
        checked,
        inconsistent_at: Vec::new(),
        consistent_at: Vec::new(),
    };
    for (&n, f) in indices.iter().zip(&facts) {
        match f.inconsistent {
            Some(true) => inconsistency.inconsistent_at.push(n),
            Some(false) => inconsistency.consistent_at.push(n),
            None => {}
        }
    }
    let drop_scheme = outcomes
        .iter()
        .find(|o| o.verdict.kind == VerdictKind::StrictlyLess)
        .map(|o| o.scheme.clone());
    let finding = match &drop_scheme {
        Some(s) => format!("drop witnessed by scheme {s}"),
        None => "not witnessed among given schemes".to_string(),
    };
    Ok(DropReport {
        family: fam.name().to_string(),
        baseline_formula: psi.to_string(),
        baseline_scheme: base_scheme.to_string(),
        dividing_formula: phi.to_string(),
        baseline_profile,
        schemes: outcomes,
        inconsistency,
        diagram_depth: opts.diagram_depth,
        drop_scheme,
        finding,
    })
}
