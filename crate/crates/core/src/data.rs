//! Bundled reference data: cited combinatorial values, verified state sets
//! and the golden tables.
//!
//! Files are compiled into the binary. Setting `FINGERLAB_DATA_DIR` makes the
//! loaders read the same file names from that directory instead; a file
//! missing from the override directory is an error, never a silent fallback.

use std::borrow::Cow;
use std::path::PathBuf;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATA_DIR_ENV: &str = "FINGERLAB_DATA_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("literature.json", include_str!("../data/literature.json")),
    ("states.json", include_str!("../data/states.json")),
    ("table1.csv", include_str!("../data/table1.csv")),
    ("table2.csv", include_str!("../data/table2.csv")),
    ("table3.csv", include_str!("../data/table3.csv")),
    ("table4.csv", include_str!("../data/table4.csv")),
    ("table_smp.csv", include_str!("../data/table_smp.csv")),
];

/// Where a cited value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactSource {
    /// Reproduced by this crate's own exhaustive search.
    Search,
    /// Taken from published tables; not recomputed here.
    Literature,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFreeFact {
    pub m: usize,
    pub k: usize,
    pub j: usize,
    pub value: u64,
    pub exact: bool,
    pub source: FactSource,
}

/// `A(n, d, w)` for binary constant-weight codes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantWeightFact {
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub value: u64,
    pub source: String,
}

/// `N_2(m, k1, k2, j)`; a lower bound when `exact` is false.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCapacityFact {
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub j: usize,
    pub value: u64,
    pub exact: bool,
    pub source: FactSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmpExactFact {
    pub n: usize,
    pub m: usize,
    pub value: String,
    pub source: FactSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Literature {
    pub cover_free: Vec<CoverFreeFact>,
    pub constant_weight: Vec<ConstantWeightFact>,
    pub pair_capacity: Vec<PairCapacityFact>,
    pub smp_exact: Vec<SmpExactFact>,
}

impl Literature {
    pub fn cover_free(&self, m: usize, k: usize, j: usize) -> Option<&CoverFreeFact> {
        self.cover_free
            .iter()
            .find(|f| f.m == m && f.k == k && f.j == j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Etf,
    Sic,
    Mub,
    Numeric,
}

/// A state set as stored on disk: `vectors[x][i] = [re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundledStates {
    pub kind: StateKind,
    pub dim: usize,
    pub count: usize,
    pub source: String,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
struct StatesFile {
    sets: Vec<BundledStates>,
}

pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

/// Raw text of a data file, honouring the override directory.
pub fn read(name: &str) -> Result<Cow<'static, str>> {
    if let Some(dir) = data_dir() {
        let path = dir.join(name);
        return std::fs::read_to_string(&path)
            .map(Cow::Owned)
            .map_err(|e| Error::MissingData(format!("{}: {e}", path.display())));
    }
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Cow::Borrowed(*text))
        .ok_or_else(|| Error::MissingData(name.to_string()))
}

fn cached<T>(
    cell: &'static OnceLock<std::result::Result<T, String>>,
    load: impl FnOnce() -> Result<T>,
) -> Result<&'static T> {
    cell.get_or_init(|| load().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::MissingData(e.clone()))
}

/// Cited values, loaded once per process.
pub fn literature() -> Result<&'static Literature> {
    static CELL: OnceLock<std::result::Result<Literature, String>> = OnceLock::new();
    cached(&CELL, || {
        Ok(serde_json::from_str(&read("literature.json")?)?)
    })
}

/// Every bundled state set, loaded once per process.
pub fn states() -> Result<&'static [BundledStates]> {
    static CELL: OnceLock<std::result::Result<Vec<BundledStates>, String>> = OnceLock::new();
    cached(&CELL, || {
        let f: StatesFile = serde_json::from_str(&read("states.json")?)?;
        for s in &f.sets {
            if s.vectors.len() != s.count || s.vectors.iter().any(|v| v.len() != s.dim) {
                return Err(Error::InvalidInput(format!(
                    "bundled set {:?} ({}, {}) has the wrong shape",
                    s.kind, s.dim, s.count
                )));
            }
        }
        Ok(f.sets)
    })
    .map(Vec::as_slice)
}

/// First bundled set with the given shape, optionally restricted to a kind.
pub fn find_states(
    dim: usize,
    count: usize,
    kind: Option<StateKind>,
) -> Result<Option<&'static BundledStates>> {
    Ok(states()?
        .iter()
        .find(|s| s.dim == dim && s.count == count && kind.is_none_or(|k| k == s.kind)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        let lit = literature().unwrap();
        assert_eq!(lit.cover_free(9, 2, 1).unwrap().value, 12);
        assert!(lit
            .constant_weight
            .iter()
            .any(|c| c.n == 13 && c.value == 13));
        assert_eq!(states().unwrap().len(), 12);
        assert!(find_states(3, 9, Some(StateKind::Sic)).unwrap().is_some());
        assert!(find_states(3, 9, Some(StateKind::Mub)).unwrap().is_none());
        for name in [
            "table1.csv",
            "table2.csv",
            "table3.csv",
            "table4.csv",
            "table_smp.csv",
        ] {
            assert!(read(name).unwrap().lines().count() > 5);
        }
    }
}
