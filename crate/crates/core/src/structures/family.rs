use std::collections::BTreeMap;

use super::builders::{
    build_circular_3n, build_cyclic_group, build_dyadic_equiv, build_linear_order,
    build_prime_field, is_prime,
};
use super::{Element, FiniteStructure, StructureError};
use crate::logic::Signature;
use crate::scheme::Scheme;

pub const FAMILY_NAMES: [&str; 5] = [
    "linear-order",
    "dyadic-equiv",
    "circular-3n",
    "cyclic-group",
    "prime-field",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    LinearOrder,
    DyadicEquiv,
    Circular3n,
    CyclicGroup,
    PrimeField,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::LinearOrder => "linear-order",
            FamilyKind::DyadicEquiv => "dyadic-equiv",
            FamilyKind::Circular3n => "circular-3n",
            FamilyKind::CyclicGroup => "cyclic-group",
            FamilyKind::PrimeField => "prime-field",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "linear-order" => FamilyKind::LinearOrder,
            "dyadic-equiv" => FamilyKind::DyadicEquiv,
            "circular-3n" => FamilyKind::Circular3n,
            "cyclic-group" => FamilyKind::CyclicGroup,
            "prime-field" => FamilyKind::PrimeField,
            _ => return None,
        })
    }
}

/// An indexed family `n ↦ M_n` together with named parameter schemes.
#[derive(Debug, Clone)]
pub struct StructureFamily {
    kind: FamilyKind,
    signature: Signature,
    schemes: BTreeMap<String, Scheme>,
}

fn schemes(pairs: &[(&str, &str)]) -> BTreeMap<String, Scheme> {
    pairs
        .iter()
        .map(|(name, text)| (name.to_string(), Scheme::parse(text).expect("built-in scheme")))
        .collect()
}

/// Looks up a built-in family by name.
pub fn family(name: &str) -> Result<StructureFamily, StructureError> {
    let kind = FamilyKind::from_name(name).ok_or_else(|| StructureError::UnknownFamily(name.into()))?;
    let (sig, schemes) = match kind {
        FamilyKind::LinearOrder => (
            Signature::from_parts(&[("<", 2)], &[], &[]),
            schemes(&[("first", "0"), ("last", "n - 1"), ("sqrt", "floor(n^0.5)")]),
        ),
        FamilyKind::DyadicEquiv => (
            Signature::from_parts(&[("E", 2)], &[], &[]),
            schemes(&[("b-zero", "0"), ("b-last", "2^n")]),
        ),
        FamilyKind::Circular3n => (
            Signature::from_parts(&[("R", 3)], &[], &[]),
            schemes(&[
                ("ab", "n mod 3n, 2n mod 3n"),
                ("ab-origin", "0, n"),
                ("witness-first", "n, n + floor(ln(n))"),
            ]),
        ),
        FamilyKind::CyclicGroup => (
            Signature::from_parts(&[], &[("+", 2)], &["0"]),
            schemes(&[("zero", "0"), ("one", "1")]),
        ),
        FamilyKind::PrimeField => (
            Signature::from_parts(&[], &[("+", 2), ("*", 2)], &["0", "1"]),
            schemes(&[("zero", "0"), ("one", "1")]),
        ),
    };
    Ok(StructureFamily {
        kind,
        signature: sig.expect("static signature"),
        schemes,
    })
}

impl StructureFamily {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn is_valid_index(&self, n: usize) -> bool {
        match self.kind {
            FamilyKind::LinearOrder => n >= 1,
            FamilyKind::DyadicEquiv => (4..=40).contains(&n),
            FamilyKind::Circular3n => n >= 2,
            FamilyKind::CyclicGroup | FamilyKind::PrimeField => is_prime(n),
        }
    }

    /// Universe size of `M_n` without building it.
    pub fn universe_size(&self, n: usize) -> usize {
        match self.kind {
            FamilyKind::LinearOrder | FamilyKind::CyclicGroup | FamilyKind::PrimeField => n,
            FamilyKind::DyadicEquiv => (1 << n) + 1,
            FamilyKind::Circular3n => 3 * n,
        }
    }

    pub fn generate(&self, n: usize) -> Result<FiniteStructure, StructureError> {
        if !self.is_valid_index(n) {
            return Err(StructureError::InvalidIndex {
                family: self.name().into(),
                index: n,
                reason: "outside the family's index set".into(),
            });
        }
        match self.kind {
            FamilyKind::LinearOrder => build_linear_order(n),
            FamilyKind::DyadicEquiv => build_dyadic_equiv(n),
            FamilyKind::Circular3n => build_circular_3n(n),
            FamilyKind::CyclicGroup => build_cyclic_group(n),
            FamilyKind::PrimeField => build_prime_field(n),
        }
    }

    pub fn scheme_names(&self) -> impl Iterator<Item = &str> {
        self.schemes.keys().map(String::as_str)
    }

    pub fn scheme(&self, name: &str) -> Option<&Scheme> {
        self.schemes.get(name)
    }

    pub fn add_scheme(&mut self, name: &str, scheme: Scheme) {
        self.schemes.insert(name.to_string(), scheme);
    }

    /// A named scheme, or else an inline scheme expression list.
    pub fn resolve_scheme(&self, spec: &str) -> Result<Scheme, StructureError> {
        if let Some(s) = self.schemes.get(spec) {
            return Ok(s.clone());
        }
        Scheme::parse(spec).map_err(|_| StructureError::UnknownScheme {
            family: self.name().into(),
            scheme: spec.into(),
        })
    }

    /// Evaluates a scheme at index `n` against `M_n`'s universe.
    pub fn scheme_elements(&self, scheme: &Scheme, n: usize) -> Result<Vec<Element>, StructureError> {
        Ok(scheme.elements(n, self.universe_size(n))?)
    }
}
