//! JSON structure files:
//! `{"universe_size": n, "relations": {name: [[..], ..]},
//!   "functions": {name: {"arity": k, "table": [..]}}, "constants": {name: v}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteStructure, FunctionTable, Relation, StructureError};
use crate::logic::Signature;

/// Refuse to write out more tuples than this.
const EXPORT_TUPLE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub arity: usize,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub universe_size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionFile>,
    #[serde(default)]
    pub constants: BTreeMap<String, usize>,
}

/// Parses a structure file and validates it against `sig`.
pub fn load_structure(json: &str, sig: &Signature) -> Result<FiniteStructure, StructureError> {
    let file: StructureFile = serde_json::from_str(json)?;
    let n = file.universe_size;
    let mut relations = BTreeMap::new();
    for (name, tuples) in file.relations {
        let arity = sig
            .relation_arity(&name)
            .ok_or_else(|| StructureError::Undeclared(name.clone()))?;
        for t in &tuples {
            if t.len() != arity {
                return Err(StructureError::Arity {
                    symbol: name.clone(),
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&e) = t.iter().find(|&&e| e >= n) {
                return Err(StructureError::OutOfRange {
                    symbol: name.clone(),
                    element: e,
                    size: n,
                });
            }
        }
        relations.insert(name, Relation::from_tuples(n, arity, tuples));
    }
    let functions = file
        .functions
        .into_iter()
        .map(|(name, f)| (name, FunctionTable::from_values(f.arity, f.table)))
        .collect();
    FiniteStructure::new(sig.clone(), n, relations, functions, file.constants)
}

/// Materializes a structure into the file format.
pub fn structure_to_json(m: &FiniteStructure) -> Result<String, StructureError> {
    let n = m.universe_size();
    let mut relations = BTreeMap::new();
    for (name, rel) in m.relations() {
        let cells = n.checked_pow(rel.arity() as u32).unwrap_or(usize::MAX);
        if cells > EXPORT_TUPLE_LIMIT {
            return Err(StructureError::TooLarge(format!(
                "relation `{name}` spans {n}^{} tuples",
                rel.arity()
            )));
        }
        relations.insert(name.to_string(), rel.tuples(n));
    }
    let file = StructureFile {
        universe_size: n,
        relations,
        functions: m
            .functions()
            .map(|(name, f)| {
                (
                    name.to_string(),
                    FunctionFile {
                        arity: f.arity(),
                        table: f.values().to_vec(),
                    },
                )
            })
            .collect(),
        constants: m.constants().map(|(k, v)| (k.to_string(), v)).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

#[cfg(test)]
mod tests {
    use super::super::{build_circular_3n, build_prime_field};
    use super::*;

    #[test]
    fn round_trip_preserves_semantics() {
        let m = build_circular_3n(3).unwrap();
        let json = structure_to_json(&m).unwrap();
        let back = load_structure(&json, m.signature()).unwrap();
        for b in 0..9 {
            for a in 0..9 {
                for c in 0..9 {
                    assert_eq!(m.holds("R", &[b, a, c]), back.holds("R", &[b, a, c]));
                }
            }
        }
        let f = build_prime_field(7).unwrap();
        let back = load_structure(&structure_to_json(&f).unwrap(), f.signature()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn validation_errors() {
        let sig = Signature::from_parts(&[("E", 2)], &[("s", 1)], &["c"]).unwrap();
        let ok = r#"{"universe_size": 2, "relations": {"E": [[0,1]]},
                     "functions": {"s": {"arity": 1, "table": [1, 0]}}, "constants": {"c": 0}}"#;
        assert!(load_structure(ok, &sig).is_ok());
        let bad_range = ok.replace("[[0,1]]", "[[0,2]]");
        assert!(matches!(
            load_structure(&bad_range, &sig),
            Err(StructureError::OutOfRange { .. })
        ));
        let bad_arity = ok.replace("[[0,1]]", "[[0,1,1]]");
        assert!(matches!(load_structure(&bad_arity, &sig), Err(StructureError::Arity { .. })));
        let partial = ok.replace("[1, 0]", "[1]");
        assert!(matches!(
            load_structure(&partial, &sig),
            Err(StructureError::PartialFunction { .. })
        ));
        let missing_const = ok.replace(r#""c": 0"#, "");
        assert!(matches!(
            load_structure(&missing_const, &sig),
            Err(StructureError::Uninterpreted(_))
        ));
        let missing_rel = r#"{"universe_size": 2, "functions": {"s": {"arity": 1, "table": [1, 0]}}, "constants": {"c": 0}}"#;
        assert!(matches!(
            load_structure(missing_rel, &sig),
            Err(StructureError::Uninterpreted(_))
        ));
        assert!(matches!(load_structure("{", &sig), Err(StructureError::Json(_))));
    }
}
