//! Single-sorted first-order syntax with equality: signatures, terms,
//! formulas, and the syntactic utilities the evaluator builds on.

mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::parse_formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` is declared more than once")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(String),
    #[error("variable `{0}` is quantified in the formula and cannot be bound as a parameter")]
    Capture(String),
}

/// What kind of symbol a name denotes in a [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Relation(usize),
    Function(usize),
    Constant,
}

/// The non-logical vocabulary of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Signature {
    relations: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new(
        relations: Vec<(String, usize)>,
        functions: Vec<(String, usize)>,
        constants: Vec<String>,
    ) -> Result<Self, SyntaxError> {
        let mut seen = BTreeSet::new();
        for (name, arity) in relations.iter().chain(functions.iter()) {
            if *arity == 0 {
                return Err(SyntaxError::ZeroArity(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(SyntaxError::DuplicateSymbol(name.clone()));
            }
        }
        for name in &constants {
            if !seen.insert(name.as_str()) {
                return Err(SyntaxError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Self {
            relations,
            functions,
            constants,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_parts(
        relations: &[(&str, usize)],
        functions: &[(&str, usize)],
        constants: &[&str],
    ) -> Result<Self, SyntaxError> {
        Self::new(
            relations.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            functions.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            constants.iter().map(|n| n.to_string()).collect(),
        )
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        if let Some((_, a)) = self.relations.iter().find(|(n, _)| n == name) {
            return Some(SymbolKind::Relation(*a));
        }
        if let Some((_, a)) = self.functions.iter().find(|(n, _)| n == name) {
            return Some(SymbolKind::Function(*a));
        }
        if self.constants.iter().any(|n| n == name) {
            return Some(SymbolKind::Constant);
        }
        None
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        match self.lookup(name) {
            Some(SymbolKind::Relation(a)) => Some(a),
            _ => None,
        }
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        match self.lookup(name) {
            Some(SymbolKind::Function(a)) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
    /// A literal universe element, produced by parameter substitution and
    /// printed as `⟨k⟩`.
    Elem(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    fn collect_vars(&self, bound: &[&str], out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(&v.as_str()) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(bound, out)),
            Term::Const(_) | Term::Elem(_) => {}
        }
    }

    fn substitute(&self, bound: &[&str], binding: &BTreeMap<String, usize>) -> Term {
        match self {
            Term::Var(v) if !bound.contains(&v.as_str()) => match binding.get(v) {
                Some(&e) => Term::Elem(e),
                None => self.clone(),
            },
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.substitute(bound, binding)).collect(),
            ),
            _ => self.clone(),
        }
    }

    /// Checks symbol declarations and arities against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Term::Var(_) | Term::Elem(_) => Ok(()),
            Term::Const(c) => match sig.lookup(c) {
                Some(SymbolKind::Constant) => Ok(()),
                _ => Err(SyntaxError::UnknownSymbol(c.clone())),
            },
            Term::App(f, args) => {
                let arity = sig
                    .function_arity(f)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(f.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Self {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Self {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Folds a non-empty list into a left-nested disjunction.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Variables not captured by a quantifier, in first-occurrence order.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<String>) {
        match self {
            Formula::Rel(_, args) => args.iter().for_each(|t| t.collect_vars(bound, out)),
            Formula::Eq(a, b) => {
                a.collect_vars(bound, out);
                b.collect_vars(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name that appears under a quantifier binder.
    pub fn quantified_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_quantified(&mut out);
        out
    }

    fn collect_quantified(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Rel(..) | Formula::Eq(..) => {}
            Formula::Not(f) => f.collect_quantified(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_quantified(out);
                b.collect_quantified(out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                out.insert(v.clone());
                body.collect_quantified(out);
            }
        }
    }

    /// Replaces free occurrences of the bound keys by element literals.
    ///
    /// Binding a variable that the formula quantifies anywhere is rejected,
    /// even where the occurrence would be free.
    pub fn substitute_params(&self, binding: &BTreeMap<String, usize>) -> Result<Formula, SyntaxError> {
        let quantified = self.quantified_variables();
        if let Some(v) = binding.keys().find(|k| quantified.contains(*k)) {
            return Err(SyntaxError::Capture(v.clone()));
        }
        Ok(self.substitute(&mut Vec::new(), binding))
    }

    fn substitute<'a>(&'a self, bound: &mut Vec<&'a str>, binding: &BTreeMap<String, usize>) -> Formula {
        match self {
            Formula::Rel(r, args) => Formula::Rel(
                r.clone(),
                args.iter().map(|t| t.substitute(bound, binding)).collect(),
            ),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(bound, binding), b.substitute(bound, binding)),
            Formula::Not(f) => Formula::not(f.substitute(bound, binding)),
            Formula::And(a, b) => Formula::and(a.substitute(bound, binding), b.substitute(bound, binding)),
            Formula::Or(a, b) => Formula::or(a.substitute(bound, binding), b.substitute(bound, binding)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(bound, binding), b.substitute(bound, binding))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v);
                let inner = body.substitute(bound, binding);
                bound.pop();
                match self {
                    Formula::Exists(..) => Formula::exists(v, inner),
                    _ => Formula::forall(v, inner),
                }
            }
        }
    }

    /// Checks symbol declarations and arities against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Formula::Rel(r, args) => {
                let arity = sig
                    .relation_arity(r)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(r.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: r.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|t| t.check(sig))
            }
            Formula::Eq(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Not(f) => f.check(sig),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.check(sig),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        printer::write_term(f, self, printer::TermPrec::Sum)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        printer::write_formula(f, self, printer::Prec::Quantifier)
    }
}
