//! Tarski satisfaction and exhaustive solution counting over finite
//! structures.
//!
//! Formulas are compiled against a structure once: variables become slots
//! in a flat environment and symbols are resolved to their tables. Every
//! quantifier then ranges over the whole universe with short-circuiting.

mod profile;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::logic::{Formula, Term};
use crate::structures::{
    advance, Element, FiniteStructure, FunctionTable, Relation, StructureError, StructureFamily,
};

pub use profile::{GrowthProfile, ProfileRow};

/// Variable name → universe element.
pub type Assignment = BTreeMap<String, Element>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("free variable `{0}` has no value")]
    UnboundVariable(String),
    #[error("symbol `{0}` is not interpreted in the structure")]
    Uninterpreted(String),
    #[error("`{symbol}` is interpreted with arity {expected} but applied to {found} argument(s)")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("element ⟨{element}⟩ is outside the universe of size {size}")]
    ElementOutOfRange { element: Element, size: usize },
    #[error("variable `{0}` listed twice")]
    DuplicateVariable(String),
    #[error("projection keeps `{0}`, which is not among the counted variables")]
    NotCounted(String),
    #[error("scheme supplies {found} value(s) but the formula has {expected} parameter(s) {params:?}")]
    SchemeMismatch {
        expected: usize,
        found: usize,
        params: Vec<String>,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

enum CTerm<'m> {
    Slot(usize),
    Elem(Element),
    App(&'m FunctionTable, Vec<CTerm<'m>>),
}

enum CFormula<'m> {
    Rel(&'m Relation, Vec<CTerm<'m>>),
    Eq(CTerm<'m>, CTerm<'m>),
    Not(Box<CFormula<'m>>),
    And(Box<CFormula<'m>>, Box<CFormula<'m>>),
    Or(Box<CFormula<'m>>, Box<CFormula<'m>>),
    Implies(Box<CFormula<'m>>, Box<CFormula<'m>>),
    Exists(usize, Box<CFormula<'m>>),
    Forall(usize, Box<CFormula<'m>>),
}

/// A formula resolved against one structure, with a fixed slot layout:
/// the counted variables first, then the parameters, then one slot per
/// quantifier binder.
pub struct Compiled<'m> {
    m: &'m FiniteStructure,
    root: CFormula<'m>,
    slots: usize,
    counted: usize,
    init: Vec<Element>,
}

struct Compiler<'m> {
    m: &'m FiniteStructure,
    scope: Vec<(String, usize)>,
    next: usize,
}

impl<'m> Compiler<'m> {
    fn lookup(&self, v: &str) -> Option<usize> {
        self.scope.iter().rev().find(|(n, _)| n == v).map(|(_, s)| *s)
    }

    fn term(&mut self, t: &Term) -> Result<CTerm<'m>, EvalError> {
        let size = self.m.universe_size();
        Ok(match t {
            Term::Var(v) => CTerm::Slot(
                self.lookup(v)
                    .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?,
            ),
            Term::Elem(e) => {
                if *e >= size {
                    return Err(EvalError::ElementOutOfRange { element: *e, size });
                }
                CTerm::Elem(*e)
            }
            Term::Const(c) => CTerm::Elem(
                self.m
                    .constant(c)
                    .ok_or_else(|| EvalError::Uninterpreted(c.clone()))?,
            ),
            Term::App(f, args) => {
                let table = self
                    .m
                    .function(f)
                    .ok_or_else(|| EvalError::Uninterpreted(f.clone()))?;
                if table.arity() != args.len() {
                    return Err(EvalError::Arity {
                        symbol: f.clone(),
                        expected: table.arity(),
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                CTerm::App(table, args)
            }
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula<'m>, EvalError> {
        Ok(match f {
            Formula::Rel(r, args) => {
                let rel = self
                    .m
                    .relation(r)
                    .ok_or_else(|| EvalError::Uninterpreted(r.clone()))?;
                if rel.arity() != args.len() {
                    return Err(EvalError::Arity {
                        symbol: r.clone(),
                        expected: rel.arity(),
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                CFormula::Rel(rel, args)
            }
            Formula::Eq(a, b) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(a) => CFormula::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => CFormula::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Or(a, b) => CFormula::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Implies(a, b) => {
                CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = self.next;
                self.next += 1;
                self.scope.push((v.clone(), slot));
                let inner = self.formula(body);
                self.scope.pop();
                let inner = Box::new(inner?);
                if matches!(f, Formula::Exists(..)) {
                    CFormula::Exists(slot, inner)
                } else {
                    CFormula::Forall(slot, inner)
                }
            }
        })
    }
}

impl<'m> Compiled<'m> {
    /// Compiles `f` with `vars` as the enumerated variables and `params`
    /// fixed. Every free variable must be in one of the two.
    pub fn new<S: AsRef<str>>(
        m: &'m FiniteStructure,
        f: &Formula,
        vars: &[S],
        params: &Assignment,
    ) -> Result<Self, EvalError> {
        let size = m.universe_size();
        let mut scope: Vec<(String, usize)> = Vec::new();
        for v in vars {
            let v = v.as_ref();
            if scope.iter().any(|(n, _)| n == v) {
                return Err(EvalError::DuplicateVariable(v.to_string()));
            }
            scope.push((v.to_string(), scope.len()));
        }
        let counted = scope.len();
        let mut init = vec![0; counted];
        for (name, &value) in params {
            if value >= size {
                return Err(EvalError::ElementOutOfRange { element: value, size });
            }
            if scope.iter().any(|(n, _)| n == name) {
                continue;
            }
            scope.push((name.clone(), scope.len()));
            init.push(value);
        }
        let mut c = Compiler {
            m,
            next: scope.len(),
            scope,
        };
        let root = c.formula(f)?;
        init.resize(c.next, 0);
        Ok(Self {
            m,
            root,
            slots: c.next,
            counted,
            init,
        })
    }

    fn fresh_env(&self) -> Vec<Element> {
        self.init.clone()
    }

    #[inline]
    fn term(&self, t: &CTerm<'m>, env: &[Element]) -> Element {
        match t {
            CTerm::Slot(s) => env[*s],
            CTerm::Elem(e) => *e,
            CTerm::App(table, args) => {
                let n = self.m.universe_size();
                if args.len() <= 8 {
                    let mut buf = [0; 8];
                    for (slot, a) in buf.iter_mut().zip(args) {
                        *slot = self.term(a, env);
                    }
                    table.apply(n, &buf[..args.len()])
                } else {
                    let vals: Vec<Element> = args.iter().map(|a| self.term(a, env)).collect();
                    table.apply(n, &vals)
                }
            }
        }
    }

    fn sat(&self, f: &CFormula<'m>, env: &mut [Element]) -> bool {
        let n = self.m.universe_size();
        match f {
            CFormula::Rel(rel, args) => {
                if args.len() <= 8 {
                    let mut buf = [0; 8];
                    for (slot, a) in buf.iter_mut().zip(args) {
                        *slot = self.term(a, env);
                    }
                    rel.holds(n, &buf[..args.len()])
                } else {
                    let vals: Vec<Element> = args.iter().map(|a| self.term(a, env)).collect();
                    rel.holds(n, &vals)
                }
            }
            CFormula::Eq(a, b) => self.term(a, env) == self.term(b, env),
            CFormula::Not(a) => !self.sat(a, env),
            CFormula::And(a, b) => self.sat(a, env) && self.sat(b, env),
            CFormula::Or(a, b) => self.sat(a, env) || self.sat(b, env),
            CFormula::Implies(a, b) => !self.sat(a, env) || self.sat(b, env),
            CFormula::Exists(slot, body) => (0..n).any(|e| {
                env[*slot] = e;
                self.sat(body, env)
            }),
            CFormula::Forall(slot, body) => (0..n).all(|e| {
                env[*slot] = e;
                self.sat(body, env)
            }),
        }
    }

    /// Truth value with the counted variables set to `values`.
    pub fn eval_at(&self, values: &[Element]) -> bool {
        let mut env = self.fresh_env();
        env[..self.counted].copy_from_slice(values);
        self.sat(&self.root, &mut env)
    }

    /// Calls `visit` with every satisfying tuple of the counted variables,
    /// in lexicographic order.
    pub fn for_each_solution(&self, mut visit: impl FnMut(&[Element])) {
        let n = self.m.universe_size();
        let mut env = self.fresh_env();
        debug_assert_eq!(env.len(), self.slots);
        if self.counted == 0 {
            if self.sat(&self.root, &mut env) {
                visit(&[]);
            }
            return;
        }
        let mut tuple = vec![0; self.counted];
        loop {
            env[..self.counted].copy_from_slice(&tuple);
            if self.sat(&self.root, &mut env) {
                visit(&tuple);
            }
            if !advance(&mut tuple, n) {
                return;
            }
        }
    }

    pub fn count(&self) -> u64 {
        let mut total = 0u64;
        self.for_each_solution(|_| total += 1);
        total
    }
}

/// Standard satisfaction of `f` under `a`.
pub fn satisfies(m: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    let c = Compiled::new::<&str>(m, f, &[], a)?;
    Ok(c.eval_at(&[]))
}

/// `{e : M ⊨ f[x ↦ e, params]}` in ascending order.
pub fn definable_set(
    m: &FiniteStructure,
    f: &Formula,
    x: &str,
    params: &Assignment,
) -> Result<Vec<Element>, EvalError> {
    let c = Compiled::new(m, f, &[x], params)?;
    let mut out = Vec::new();
    c.for_each_solution(|t| out.push(t[0]));
    Ok(out)
}

/// Number of tuples for `vars` satisfying `f` with `params` fixed.
pub fn count_solutions<S: AsRef<str>>(
    m: &FiniteStructure,
    f: &Formula,
    vars: &[S],
    params: &Assignment,
) -> Result<u64, EvalError> {
    Ok(Compiled::new(m, f, vars, params)?.count())
}

/// Image size and largest fiber of the solution set under projection onto
/// the `keep` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Projection {
    pub total: u64,
    pub image: u64,
    pub max_fiber: u64,
}

pub fn project_count<S: AsRef<str>, K: AsRef<str>>(
    m: &FiniteStructure,
    f: &Formula,
    vars: &[S],
    params: &Assignment,
    keep: &[K],
) -> Result<Projection, EvalError> {
    let positions = keep
        .iter()
        .map(|k| {
            vars.iter()
                .position(|v| v.as_ref() == k.as_ref())
                .ok_or_else(|| EvalError::NotCounted(k.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let c = Compiled::new(m, f, vars, params)?;
    let mut fibers: HashMap<Vec<Element>, u64> = HashMap::new();
    let mut total = 0;
    c.for_each_solution(|t| {
        total += 1;
        let key: Vec<Element> = positions.iter().map(|&p| t[p]).collect();
        *fibers.entry(key).or_default() += 1;
    });
    Ok(Projection {
        total,
        image: fibers.len() as u64,
        max_fiber: fibers.values().copied().max().unwrap_or(0),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CoverCheck {
    pub covered: bool,
    /// Least solution of the target that no disjunct catches.
    pub witness: Option<Element>,
    pub target_size: u64,
}

/// Checks that every solution of `target` satisfies at least one disjunct.
/// All formulas must have `x` as their only free variable.
pub fn verify_cover(
    m: &FiniteStructure,
    target: &Formula,
    disjuncts: &[Formula],
    x: &str,
) -> Result<CoverCheck, EvalError> {
    let none = Assignment::new();
    let target = Compiled::new(m, target, &[x], &none)?;
    let parts = disjuncts
        .iter()
        .map(|d| Compiled::new(m, d, &[x], &none))
        .collect::<Result<Vec<_>, _>>()?;
    let mut witness = None;
    let mut target_size = 0;
    target.for_each_solution(|t| {
        target_size += 1;
        if witness.is_none() && !parts.iter().any(|p| p.eval_at(t)) {
            witness = Some(t[0]);
        }
    });
    Ok(CoverCheck {
        covered: witness.is_none(),
        witness,
        target_size,
    })
}

/// Parameters of `f` relative to the distinguished variable `x`: its free
/// variables other than `x`, in first-occurrence order.
pub fn parameter_variables(f: &Formula, x: &str) -> Vec<String> {
    f.free_variables().into_iter().filter(|v| v != x).collect()
}

/// Binds the parameters of `f` (relative to `x`) to `values` positionally.
pub fn bind_parameters(f: &Formula, x: &str, values: &[Element]) -> Result<Assignment, EvalError> {
    let params = parameter_variables(f, x);
    if params.len() != values.len() {
        return Err(EvalError::SchemeMismatch {
            expected: params.len(),
            found: values.len(),
            params,
        });
    }
    Ok(params.into_iter().zip(values.iter().copied()).collect())
}

/// Counts `|f(M_n, scheme(n))|` along `indices`. Indices are evaluated in
/// parallel; rows come back in index order.
pub fn sweep_counts(
    fam: &StructureFamily,
    f: &Formula,
    x: &str,
    scheme: &str,
    indices: &[usize],
) -> Result<GrowthProfile, EvalError> {
    let resolved = fam.resolve_scheme(scheme)?;
    let rows = indices
        .par_iter()
        .map(|&n| {
            let m = fam.generate(n)?;
            let values = fam.scheme_elements(&resolved, n)?;
            let params = bind_parameters(f, x, &values)?;
            let count = count_solutions(&m, f, &[x], &params)?;
            Ok(ProfileRow {
                index: n,
                universe: m.universe_size() as u64,
                count,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(GrowthProfile::new(fam.name(), &f.to_string(), scheme, rows))
}
