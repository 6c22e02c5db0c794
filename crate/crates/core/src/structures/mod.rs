//! Explicit finite structures over the universe `0..n` and the generators
//! for the families studied here.

mod builders;
mod family;
mod io;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::logic::Signature;
use crate::scheme::SchemeError;

pub use builders::{
    build_circular_3n, build_cyclic_group, build_dyadic_equiv, build_linear_order,
    build_prime_field, circular_between, is_prime,
};
pub use family::{family, FamilyKind, StructureFamily, FAMILY_NAMES};
pub use io::{load_structure, structure_to_json, StructureFile};

pub type Element = usize;

/// Above this many cells a relation is never stored as a bit matrix.
const DENSE_CELL_LIMIT: usize = 1 << 26;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("universe must be non-empty")]
    EmptyUniverse,
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("index {index} is not valid for family `{family}`: {reason}")]
    InvalidIndex {
        family: String,
        index: usize,
        reason: String,
    },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("unknown scheme `{scheme}` for family `{family}`")]
    UnknownScheme { family: String, scheme: String },
    #[error("scheme error: {0}")]
    Scheme(#[from] SchemeError),
    #[error("symbol `{0}` is not declared in the signature")]
    Undeclared(String),
    #[error("symbol `{0}` has no interpretation")]
    Uninterpreted(String),
    #[error("`{symbol}` has arity {expected} but was given {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} in `{symbol}` is outside the universe of size {size}")]
    OutOfRange {
        symbol: String,
        element: usize,
        size: usize,
    },
    #[error("function `{symbol}` table has {found} entries, expected {expected}")]
    PartialFunction {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("structure too large to materialize: {0}")]
    TooLarge(String),
    #[error("malformed structure file: {0}")]
    Json(#[from] serde_json::Error),
}

/// How a relation's extension is stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationTable {
    /// Explicit sorted tuple set.
    Tuples(BTreeSet<Vec<Element>>),
    /// Row-major bit matrix over `universe^arity`.
    Dense(Vec<u64>),
    /// `(a, b)` holds iff `a < b` as codes.
    StrictOrder,
    /// Equivalence relation whose classes are the consecutive intervals
    /// starting at each entry of `starts` (the first entry is 0).
    IntervalPartition { starts: Vec<Element> },
    /// `(b, a, c)` holds iff some lifts satisfy `a' < b' < c'` with
    /// `c' - a' <= span`, all modulo `modulus`.
    CircularBetween { modulus: usize, span: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    table: RelationTable,
}

impl Relation {
    pub fn new(arity: usize, table: RelationTable) -> Self {
        Self { arity, table }
    }

    /// Builds an explicit relation, as a bit matrix when small enough.
    pub fn from_tuples(
        universe: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Element>>,
    ) -> Self {
        let cells = universe.checked_pow(arity as u32).filter(|&c| c <= DENSE_CELL_LIMIT);
        match cells {
            Some(cells) if arity <= 3 => {
                let mut bits = vec![0u64; cells.div_ceil(64)];
                for t in tuples {
                    let i = dense_index(universe, &t);
                    bits[i / 64] |= 1 << (i % 64);
                }
                Self::new(arity, RelationTable::Dense(bits))
            }
            _ => Self::new(arity, RelationTable::Tuples(tuples.into_iter().collect())),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &RelationTable {
        &self.table
    }

    /// Membership test; `args` must have the relation's arity and lie in
    /// the universe.
    #[inline]
    pub fn holds(&self, universe: usize, args: &[Element]) -> bool {
        match &self.table {
            RelationTable::Tuples(set) => set.contains(args),
            RelationTable::Dense(bits) => {
                let i = dense_index(universe, args);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            RelationTable::StrictOrder => args[0] < args[1],
            RelationTable::IntervalPartition { starts } => {
                class_index(starts, args[0]) == class_index(starts, args[1])
            }
            RelationTable::CircularBetween { modulus, span } => {
                circular_between(*modulus, *span, args[0], args[1], args[2])
            }
        }
    }

    /// Enumerates the extension in lexicographic order.
    pub fn tuples(&self, universe: usize) -> Vec<Vec<Element>> {
        if let RelationTable::Tuples(set) = &self.table {
            return set.iter().cloned().collect();
        }
        let mut out = Vec::new();
        let mut t = vec![0; self.arity];
        if universe == 0 {
            return out;
        }
        loop {
            if self.holds(universe, &t) {
                out.push(t.clone());
            }
            if !advance(&mut t, universe) {
                return out;
            }
        }
    }

    fn max_element(&self) -> Option<Element> {
        match &self.table {
            RelationTable::Tuples(set) => set.iter().flatten().copied().max(),
            _ => None,
        }
    }
}

/// Odometer step over `universe^len`; false once wrapped around.
pub(crate) fn advance(t: &mut [Element], universe: usize) -> bool {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < universe {
            return true;
        }
        *slot = 0;
    }
    false
}

fn dense_index(universe: usize, args: &[Element]) -> usize {
    args.iter().fold(0, |acc, &a| acc * universe + a)
}

fn class_index(starts: &[Element], e: Element) -> usize {
    starts.partition_point(|&s| s <= e) - 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    arity: usize,
    values: Vec<Element>,
}

impl FunctionTable {
    /// Tabulates `f` over `universe^arity` in row-major argument order.
    pub fn tabulate(universe: usize, arity: usize, f: impl Fn(&[Element]) -> Element) -> Self {
        let mut values = Vec::with_capacity(universe.pow(arity as u32));
        let mut args = vec![0; arity];
        loop {
            values.push(f(&args));
            if !advance(&mut args, universe) {
                break;
            }
        }
        Self { arity, values }
    }

    pub fn from_values(arity: usize, values: Vec<Element>) -> Self {
        Self { arity, values }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Element] {
        &self.values
    }

    #[inline]
    pub fn apply(&self, universe: usize, args: &[Element]) -> Element {
        self.values[dense_index(universe, args)]
    }
}

/// A finite structure with universe `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    signature: Signature,
    universe_size: usize,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, FunctionTable>,
    constants: BTreeMap<String, Element>,
}

impl FiniteStructure {
    /// Validates that the interpretations cover exactly the signature and
    /// stay inside the universe.
    pub fn new(
        signature: Signature,
        universe_size: usize,
        relations: BTreeMap<String, Relation>,
        functions: BTreeMap<String, FunctionTable>,
        constants: BTreeMap<String, Element>,
    ) -> Result<Self, StructureError> {
        if universe_size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        for (name, arity) in signature.relations() {
            let rel = relations
                .get(name)
                .ok_or_else(|| StructureError::Uninterpreted(name.clone()))?;
            if rel.arity != *arity {
                return Err(StructureError::Arity {
                    symbol: name.clone(),
                    expected: *arity,
                    found: rel.arity,
                });
            }
            if let RelationTable::Tuples(set) = &rel.table {
                if let Some(bad) = set.iter().find(|t| t.len() != *arity) {
                    return Err(StructureError::Arity {
                        symbol: name.clone(),
                        expected: *arity,
                        found: bad.len(),
                    });
                }
            }
            if let Some(e) = rel.max_element().filter(|&e| e >= universe_size) {
                return Err(StructureError::OutOfRange {
                    symbol: name.clone(),
                    element: e,
                    size: universe_size,
                });
            }
        }
        for (name, arity) in signature.functions() {
            let fun = functions
                .get(name)
                .ok_or_else(|| StructureError::Uninterpreted(name.clone()))?;
            if fun.arity != *arity {
                return Err(StructureError::Arity {
                    symbol: name.clone(),
                    expected: *arity,
                    found: fun.arity,
                });
            }
            let expected = universe_size
                .checked_pow(*arity as u32)
                .ok_or_else(|| StructureError::TooLarge(format!("function `{name}`")))?;
            if fun.values.len() != expected {
                return Err(StructureError::PartialFunction {
                    symbol: name.clone(),
                    expected,
                    found: fun.values.len(),
                });
            }
            if let Some(&e) = fun.values.iter().find(|&&v| v >= universe_size) {
                return Err(StructureError::OutOfRange {
                    symbol: name.clone(),
                    element: e,
                    size: universe_size,
                });
            }
        }
        for name in signature.constants() {
            let &e = constants
                .get(name)
                .ok_or_else(|| StructureError::Uninterpreted(name.clone()))?;
            if e >= universe_size {
                return Err(StructureError::OutOfRange {
                    symbol: name.clone(),
                    element: e,
                    size: universe_size,
                });
            }
        }
        let declared = |n: &String| signature.lookup(n).is_some();
        if let Some(extra) = relations
            .keys()
            .chain(functions.keys())
            .chain(constants.keys())
            .find(|n| !declared(n))
        {
            return Err(StructureError::Undeclared(extra.clone()));
        }
        Ok(Self {
            signature,
            universe_size,
            relations,
            functions,
            constants,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionTable> {
        self.functions.get(name)
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.constants.get(name).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &FunctionTable)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, Element)> {
        self.constants.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// `None` when the relation is not interpreted.
    pub fn holds(&self, relation: &str, args: &[Element]) -> Option<bool> {
        self.relations
            .get(relation)
            .map(|r| r.holds(self.universe_size, args))
    }

    pub fn apply(&self, function: &str, args: &[Element]) -> Option<Element> {
        self.functions
            .get(function)
            .map(|f| f.apply(self.universe_size, args))
    }
}
