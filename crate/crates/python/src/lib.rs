//! Python bindings: structure families, counting sweeps, gap verdicts,
//! finite-measure experiments, dividing reports and asymptotic fits.
//! Reports come back as plain dicts and exact weights as `Fraction`s.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pfdim_core::asymclass::{fit_condition_one, two_value_check, FitConfig, TwoValueConfig};
use pfdim_core::dimension::{compare_profiles, GapConfig};
use pfdim_core::dividing::{dividing_drop_report, DropOptions};
use pfdim_core::eval::{bind_parameters, count_solutions, sweep_counts};
use pfdim_core::logic::{parse_formula, Formula};
use pfdim_core::measure::{
    self, find_rich_intersection, inclusion_exclusion_tail, parse_weight, MeasureSpace, SetSystem,
};
use pfdim_core::scheme::parse_ladder;
use pfdim_core::structures::{self, StructureFamily};

create_exception!(pfdim, PfdimError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    PfdimError::new_err(e.to_string())
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn fraction<'py>(py: Python<'py>, q: &impl std::fmt::Display) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.to_string(),))
}

fn gap_config(slope_threshold: Option<f64>, divergence_threshold: Option<f64>, min_samples: Option<usize>) -> PyResult<GapConfig> {
    let mut cfg = GapConfig::default();
    if let Some(v) = slope_threshold {
        cfg.slope_threshold = v;
    }
    if let Some(v) = divergence_threshold {
        cfg.divergence_threshold = v;
    }
    if let Some(v) = min_samples {
        cfg.min_samples = v;
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Weights are rational strings (`"1/3"`, `"0.25"`) or numbers.
fn system(weights: Vec<Bound<'_, PyAny>>, sets: Vec<Vec<usize>>) -> PyResult<(MeasureSpace, SetSystem)> {
    let weights = weights
        .iter()
        .map(|w| parse_weight(&w.str()?.to_string()).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let space = MeasureSpace::new(weights).map_err(err)?;
    let sys = SetSystem::new(space.points(), &sets).map_err(err)?;
    Ok((space, sys))
}

/// A named family `n ↦ M_n` of finite structures.
#[pyclass(module = "pfdim", frozen)]
struct Family {
    inner: StructureFamily,
}

impl Family {
    fn formula(&self, text: &str) -> PyResult<Formula> {
        parse_formula(text, self.inner.signature()).map_err(err)
    }

    /// A ladder string (`"4:16"`, `"geo:100..1000000"`, `"primes:11..199"`)
    /// or a list of indices, checked against the family.
    fn ladder(&self, indices: &Bound<'_, PyAny>) -> PyResult<Vec<usize>> {
        let ladder = match indices.extract::<String>() {
            Ok(text) => parse_ladder(&text).map_err(err)?,
            Err(_) => indices.extract::<Vec<usize>>()?,
        };
        if let Some(&bad) = ladder.iter().find(|&&n| !self.inner.is_valid_index(n)) {
            return Err(err(format!("index {bad} is not valid for {}", self.inner.name())));
        }
        Ok(ladder)
    }
}

#[pymethods]
impl Family {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Family { inner: structures::family(name).map_err(err)? })
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        structures::FAMILY_NAMES.to_vec()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn schemes(&self) -> Vec<String> {
        self.inner.scheme_names().map(String::from).collect()
    }

    fn universe_size(&self, n: usize) -> usize {
        self.inner.universe_size(n)
    }

    /// Canonical printed form of a formula in this family's signature.
    fn parse(&self, formula: &str) -> PyResult<String> {
        Ok(self.formula(formula)?.to_string())
    }

    /// `|φ(M_n, b)|` for the tuple of counted variables, with the remaining
    /// free variables bound by the parameter scheme.
    #[pyo3(signature = (formula, index, vars = vec!["x".to_string()], scheme = "none"))]
    fn count(&self, formula: &str, index: usize, vars: Vec<String>, scheme: &str) -> PyResult<u64> {
        if !self.inner.is_valid_index(index) {
            return Err(err(format!("index {index} is not valid for {}", self.inner.name())));
        }
        let f = self.formula(formula)?;
        let m = self.inner.generate(index).map_err(err)?;
        let scheme = self.inner.resolve_scheme(scheme).map_err(err)?;
        let values = self.inner.scheme_elements(&scheme, index).map_err(err)?;
        let params: Vec<String> = f.free_variables().into_iter().filter(|v| !vars.contains(v)).collect();
        if params.len() != values.len() {
            return Err(err(format!("scheme gives {} values for {} parameters", values.len(), params.len())));
        }
        let binding = params.into_iter().zip(values).collect();
        count_solutions(&m, &f, &vars, &binding).map_err(err)
    }

    #[pyo3(signature = (formula, indices, scheme = "none", var = "x"))]
    fn sweep(&self, formula: &str, indices: &Bound<'_, PyAny>, scheme: &str, var: &str) -> PyResult<Profile> {
        let f = self.formula(formula)?;
        let ladder = self.ladder(indices)?;
        let inner = sweep_counts(&self.inner, &f, var, scheme, &ladder).map_err(err)?;
        Ok(Profile { inner })
    }

    /// Measure clusters and the bounded-count constant over all parameter tuples.
    #[pyo3(signature = (formula, indices, var = "x", c_bound = None, gap = None, radius = 3.0, budget = 10_000_000))]
    #[allow(clippy::too_many_arguments)]
    fn asymfit<'py>(
        &self,
        py: Python<'py>,
        formula: &str,
        indices: &Bound<'py, PyAny>,
        var: &str,
        c_bound: Option<u64>,
        gap: Option<f64>,
        radius: f64,
        budget: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = self.formula(formula)?;
        let ladder = self.ladder(indices)?;
        let cfg = FitConfig { c_bound, gap, radius, budget };
        let fit = fit_condition_one(&self.inner, &f, var, &ladder, &cfg).map_err(err)?;
        from_json(py, &fit.to_json())
    }

    /// Classifies each `(formula, scheme)` entry as bounded or full dimension.
    #[pyo3(signature = (entries, indices, var = "x", c_bound = 8))]
    fn two_value<'py>(
        &self,
        py: Python<'py>,
        entries: Vec<(String, String)>,
        indices: &Bound<'py, PyAny>,
        var: &str,
        c_bound: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let parsed = entries
            .iter()
            .map(|(f, s)| Ok((self.formula(f)?, s.clone())))
            .collect::<PyResult<Vec<_>>>()?;
        let ladder = self.ladder(indices)?;
        let cfg = TwoValueConfig { c_bound, ..TwoValueConfig::default() };
        let report = two_value_check(&self.inner, &parsed, var, &ladder, &cfg).map_err(err)?;
        from_json(py, &report.to_json())
    }

    /// Dimension-drop report for `phi` under each conjugate scheme against a baseline.
    #[pyo3(signature = (baseline, phi, schemes, indices, baseline_scheme = "none", k = 2, var = "x", diagram_depth = 0))]
    #[allow(clippy::too_many_arguments)]
    fn dividing<'py>(
        &self,
        py: Python<'py>,
        baseline: &str,
        phi: &str,
        schemes: Vec<String>,
        indices: &Bound<'py, PyAny>,
        baseline_scheme: &str,
        k: usize,
        var: &str,
        diagram_depth: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let base = self.formula(baseline)?;
        let phi = self.formula(phi)?;
        let ladder = self.ladder(indices)?;
        let opts = DropOptions { k, diagram_depth, ..DropOptions::default() };
        let report =
            dividing_drop_report(&self.inner, var, (&base, baseline_scheme), &phi, &schemes, &ladder, &opts).map_err(err)?;
        from_json(py, &report.to_json())
    }

    /// Values of the free parameters at index `n` under a scheme.
    #[pyo3(signature = (formula, index, scheme, var = "x"))]
    fn parameters(&self, formula: &str, index: usize, scheme: &str, var: &str) -> PyResult<Vec<(String, usize)>> {
        let f = self.formula(formula)?;
        let scheme = self.inner.resolve_scheme(scheme).map_err(err)?;
        let values = self.inner.scheme_elements(&scheme, index).map_err(err)?;
        Ok(bind_parameters(&f, var, &values).map_err(err)?.into_iter().collect())
    }

    fn __repr__(&self) -> String {
        format!("Family({:?})", self.inner.name())
    }
}

/// Counts of one definable family along a ladder of indices.
#[pyclass(module = "pfdim", frozen)]
struct Profile {
    inner: pfdim_core::eval::GrowthProfile,
}

#[pymethods]
impl Profile {
    #[getter]
    fn indices(&self) -> Vec<usize> {
        self.inner.indices()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts()
    }

    #[getter]
    fn universes(&self) -> Vec<u64> {
        self.inner.rows.iter().map(|r| r.universe).collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    /// Gap verdict of this profile against `other` (`self` is the smaller side).
    #[pyo3(signature = (other, slope_threshold = None, divergence_threshold = None, min_samples = None))]
    fn gap<'py>(
        &self,
        py: Python<'py>,
        other: &Profile,
        slope_threshold: Option<f64>,
        divergence_threshold: Option<f64>,
        min_samples: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = gap_config(slope_threshold, divergence_threshold, min_samples)?;
        let verdict = compare_profiles(&self.inner, &other.inner, &cfg).map_err(err)?;
        from_json(py, &verdict.to_json())
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }

    fn __repr__(&self) -> String {
        format!("Profile({:?}, {:?}, {} rows)", self.inner.family, self.inner.formula, self.inner.rows.len())
    }
}

/// `C(m, i) - C(m, i+1)` as an exact integer.
#[pyfunction]
fn binomial_gap<'py>(py: Python<'py>, m: u64, i: u64) -> PyResult<Bound<'py, PyAny>> {
    let g = measure::binomial_gap(m, i).map_err(err)?;
    py.import("builtins")?.getattr("int")?.call1((g.to_string(),))
}

/// `Σ_{k ≥ start} (-1)^{k+1} S_k` for the sets under the given point weights.
#[pyfunction]
fn inclexcl_tail<'py>(
    py: Python<'py>,
    weights: Vec<Bound<'py, PyAny>>,
    sets: Vec<Vec<usize>>,
    start: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let (space, sys) = system(weights, sets)?;
    let tail = inclusion_exclusion_tail(&space, &sys, start).map_err(err)?;
    fraction(py, &tail)
}

/// `S_k`: the sum of the measures of all k-fold intersections.
#[pyfunction]
fn s_k<'py>(py: Python<'py>, weights: Vec<Bound<'py, PyAny>>, sets: Vec<Vec<usize>>, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let (space, sys) = system(weights, sets)?;
    fraction(py, &measure::s_k(&space, &sys, k).map_err(err)?)
}

/// First k-subset whose intersection has measure at least `eps^(3^(k-1))`,
/// as `(sets, measure)`, or `None`.
#[pyfunction]
fn rich_intersection<'py>(
    py: Python<'py>,
    weights: Vec<Bound<'py, PyAny>>,
    sets: Vec<Vec<usize>>,
    k: usize,
    eps: Bound<'py, PyAny>,
) -> PyResult<Option<(Vec<usize>, Bound<'py, PyAny>)>> {
    let (space, sys) = system(weights, sets)?;
    let eps = parse_weight(&eps.str()?.to_string()).map_err(err)?;
    let found = find_rich_intersection(&space, &sys, k, &eps).map_err(err)?;
    found.hit.map(|(sets, m)| Ok((sets, fraction(py, &m)?))).transpose()
}

#[pymodule]
fn pfdim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PfdimError", m.py().get_type::<PfdimError>())?;
    m.add_class::<Family>()?;
    m.add_class::<Profile>()?;
    m.add_function(wrap_pyfunction!(binomial_gap, m)?)?;
    m.add_function(wrap_pyfunction!(inclexcl_tail, m)?)?;
    m.add_function(wrap_pyfunction!(s_k, m)?)?;
    m.add_function(wrap_pyfunction!(rich_intersection, m)?)?;
    Ok(())
}
