//! Random structures, random formulas and a naive reference semantics used
//! as an oracle for the compiled evaluator.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pfdim_core::logic::{Formula, Signature, Term};
use pfdim_core::structures::{Element, FiniteStructure, FunctionTable, Relation};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub fn fuzz_signature() -> Signature {
    Signature::from_parts(
        &[("P", 1), ("E", 2), ("R", 3), ("<", 2)],
        &[("f", 1), ("+", 2)],
        &["c", "0"],
    )
    .unwrap()
}

/// Raw interpretation kept beside the structure, so the oracle never
/// consults the structure's own tables.
#[derive(Debug, Clone)]
pub struct Raw {
    pub n: usize,
    pub relations: BTreeMap<String, BTreeSet<Vec<Element>>>,
    pub functions: BTreeMap<String, BTreeMap<Vec<Element>, Element>>,
    pub constants: BTreeMap<String, Element>,
}

fn all_tuples(n: usize, arity: usize) -> Vec<Vec<Element>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn random_raw<R: Rng>(rng: &mut R, sig: &Signature, n: usize) -> Raw {
    let density = rng.gen_range(0.1..0.9);
    let relations = sig
        .relations()
        .iter()
        .map(|(name, arity)| {
            let set = all_tuples(n, *arity)
                .into_iter()
                .filter(|_| rng.gen_bool(density))
                .collect();
            (name.clone(), set)
        })
        .collect();
    let functions = sig
        .functions()
        .iter()
        .map(|(name, arity)| {
            let table = all_tuples(n, *arity)
                .into_iter()
                .map(|t| (t, rng.gen_range(0..n)))
                .collect();
            (name.clone(), table)
        })
        .collect();
    let constants = sig
        .constants()
        .iter()
        .map(|c| (c.clone(), rng.gen_range(0..n)))
        .collect();
    Raw { n, relations, functions, constants }
}

pub fn build(sig: &Signature, raw: &Raw) -> FiniteStructure {
    let relations = raw
        .relations
        .iter()
        .map(|(name, set)| {
            let arity = sig.relation_arity(name).unwrap();
            (name.clone(), Relation::from_tuples(raw.n, arity, set.iter().cloned()))
        })
        .collect();
    let functions = raw
        .functions
        .iter()
        .map(|(name, table)| {
            let arity = sig.function_arity(name).unwrap();
            // BTreeMap order over equal-length tuples is row-major order.
            (name.clone(), FunctionTable::from_values(arity, table.values().copied().collect()))
        })
        .collect();
    FiniteStructure::new(sig.clone(), raw.n, relations, functions, raw.constants.clone()).unwrap()
}

pub fn random_term<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Term {
    let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..5) };
    match choice {
        0 | 1 => Term::var(vars.choose(rng).unwrap()),
        2 => Term::Const(["c", "0"].choose(rng).unwrap().to_string()),
        3 => Term::App("f".into(), vec![random_term(rng, vars, depth - 1)]),
        _ => Term::App(
            "+".into(),
            vec![random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1)],
        ),
    }
}

/// A random formula whose free variables are drawn from `vars`; bound
/// variables come from the same pool so shadowing gets exercised.
pub fn random_formula<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Formula {
    let choice = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..11) };
    match choice {
        0 => Formula::Rel("P".into(), vec![random_term(rng, vars, 1)]),
        1 => Formula::Rel(
            "E".into(),
            vec![random_term(rng, vars, 1), random_term(rng, vars, 1)],
        ),
        2 => Formula::Rel(
            "R".into(),
            vec![
                random_term(rng, vars, 0),
                random_term(rng, vars, 0),
                random_term(rng, vars, 0),
            ],
        ),
        3 => Formula::Rel(
            "<".into(),
            vec![random_term(rng, vars, 1), random_term(rng, vars, 1)],
        ),
        4 => Formula::Eq(random_term(rng, vars, 1), random_term(rng, vars, 1)),
        5 => Formula::not(random_formula(rng, vars, depth - 1)),
        6 => Formula::and(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)),
        7 => Formula::or(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)),
        8 => Formula::implies(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
        9 => Formula::exists(VARS.choose(rng).unwrap(), random_formula(rng, vars, depth - 1)),
        _ => Formula::forall(VARS.choose(rng).unwrap(), random_formula(rng, vars, depth - 1)),
    }
}

pub fn ref_term(raw: &Raw, t: &Term, a: &BTreeMap<String, Element>) -> Element {
    match t {
        Term::Var(v) => a[v],
        Term::Const(c) => raw.constants[c],
        Term::Elem(k) => *k,
        Term::App(f, args) => {
            let args: Vec<Element> = args.iter().map(|s| ref_term(raw, s, a)).collect();
            raw.functions[f][&args]
        }
    }
}

/// Tarski semantics, read straight off the definition.
pub fn ref_holds(raw: &Raw, f: &Formula, a: &BTreeMap<String, Element>) -> bool {
    match f {
        Formula::Rel(r, args) => {
            let args: Vec<Element> = args.iter().map(|s| ref_term(raw, s, a)).collect();
            raw.relations[r].contains(&args)
        }
        Formula::Eq(s, t) => ref_term(raw, s, a) == ref_term(raw, t, a),
        Formula::Not(g) => !ref_holds(raw, g, a),
        Formula::And(g, h) => ref_holds(raw, g, a) && ref_holds(raw, h, a),
        Formula::Or(g, h) => ref_holds(raw, g, a) || ref_holds(raw, h, a),
        Formula::Implies(g, h) => !ref_holds(raw, g, a) || ref_holds(raw, h, a),
        Formula::Exists(v, g) => (0..raw.n).any(|e| {
            let mut b = a.clone();
            b.insert(v.clone(), e);
            ref_holds(raw, g, &b)
        }),
        Formula::Forall(v, g) => (0..raw.n).all(|e| {
            let mut b = a.clone();
            b.insert(v.clone(), e);
            ref_holds(raw, g, &b)
        }),
    }
}

/// Number of tuples over `vars` satisfying `f`, by brute force.
pub fn ref_count(raw: &Raw, f: &Formula, vars: &[&str], params: &BTreeMap<String, Element>) -> u64 {
    all_tuples(raw.n, vars.len())
        .into_iter()
        .filter(|t| {
            let mut a = params.clone();
            for (v, e) in vars.iter().zip(t) {
                a.insert(v.to_string(), *e);
            }
            ref_holds(raw, f, &a)
        })
        .count() as u64
}

pub fn ref_set(raw: &Raw, f: &Formula, x: &str, params: &BTreeMap<String, Element>) -> BTreeSet<Element> {
    (0..raw.n)
        .filter(|&e| {
            let mut a = params.clone();
            a.insert(x.to_string(), e);
            ref_holds(raw, f, &a)
        })
        .collect()
}
