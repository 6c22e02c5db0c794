use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub index: usize,
    pub universe: u64,
    pub count: u64,
}

/// `n ↦ |φ(M_n, b_n)|` sampled along a ladder of indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub family: String,
    pub formula: String,
    pub scheme: String,
    pub rows: Vec<ProfileRow>,
}

impl GrowthProfile {
    pub fn new(family: &str, formula: &str, scheme: &str, rows: Vec<ProfileRow>) -> Self {
        Self {
            family: family.into(),
            formula: formula.into(),
            scheme: scheme.into(),
            rows,
        }
    }

    pub fn counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.count).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.index).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,universe,count\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.index, r.universe, r.count);
        }
        out
    }
}
