//! JSON file formats for strategies, families and state sets.
//!
//! Probabilities are written as `"num/den"` strings and decision entries
//! that are exactly 0 or 1 as integers, so files never contain floats.
//! Object keys come out sorted.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::SubsetFamily;
use crate::quantum::StateSet;
use crate::scalar::{format_rational, parse_rational};
use crate::{Rational, Strategy};

fn rational_cell(r: &Rational) -> Value {
    if r.is_zero() {
        json!(0)
    } else if r.is_one() {
        json!(1)
    } else {
        json!(format_rational(r))
    }
}

fn parse_cell(v: &Value, what: &str) -> Result<Rational> {
    let bad = || {
        Error::InvalidInput(format!(
            "{what}: expected \"num/den\" or an integer, got {v}"
        ))
    };
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(bad),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn matrix(rows: &[Vec<Rational>], strings: bool) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|x| {
                            if strings {
                                json!(format_rational(x))
                            } else {
                                rational_cell(x)
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Rows of `"num/den"` strings or integers.
pub fn parse_matrix(v: &Value, what: &str) -> Result<Vec<Vec<Rational>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be an array of rows")))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| Error::InvalidInput(format!("{what}[{i}] must be an array")))?
                .iter()
                .map(|c| parse_cell(c, what))
                .collect()
        })
        .collect()
}

pub fn strategy_to_value(s: &Strategy) -> Value {
    json!({
        "n": s.n(),
        "m_a": s.m_a(),
        "m_b": s.m_b(),
        "p": matrix(s.p(), true),
        "q": matrix(s.q(), true),
        "r": matrix(s.r(), false),
    })
}

pub fn strategy_to_json(s: &Strategy) -> String {
    to_pretty(&strategy_to_value(s))
}

/// Reads a strategy. `q` may be omitted for a one-way strategy, in which
/// case Bob relays his message (`q` is the identity).
pub fn strategy_from_value(v: &Value) -> Result<Strategy> {
    let p = parse_matrix(
        v.get("p")
            .ok_or_else(|| Error::InvalidInput("strategy needs \"p\"".into()))?,
        "p",
    )?;
    let r = parse_matrix(
        v.get("r")
            .ok_or_else(|| Error::InvalidInput("strategy needs \"r\"".into()))?,
        "r",
    )?;
    let s = match v.get("q") {
        Some(q) => Strategy::new(p, parse_matrix(q, "q")?, r)?,
        None => Strategy::one_way(p, r)?,
    };
    for (key, want) in [("n", s.n()), ("m_a", s.m_a()), ("m_b", s.m_b())] {
        if let Some(got) = v.get(key) {
            if got.as_u64() != Some(want as u64) {
                return Err(Error::MalformedStrategy(format!(
                    "{key} = {got} but the matrices give {want}"
                )));
            }
        }
    }
    Ok(s)
}

pub fn strategy_from_json(text: &str) -> Result<Strategy> {
    strategy_from_value(&serde_json::from_str(text)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub m: usize,
    /// One-based, sorted.
    pub sets: Vec<Vec<usize>>,
}

impl From<&SubsetFamily> for FamilyFile {
    fn from(f: &SubsetFamily) -> Self {
        Self {
            m: f.m(),
            sets: f.to_one_based(),
        }
    }
}

impl FamilyFile {
    pub fn to_family(&self) -> Result<SubsetFamily> {
        SubsetFamily::from_one_based(self.m, &self.sets)
    }
}

pub fn family_to_json(f: &SubsetFamily) -> String {
    to_pretty(&serde_json::to_value(FamilyFile::from(f)).expect("family serializes"))
}

pub fn family_from_json(text: &str) -> Result<SubsetFamily> {
    serde_json::from_str::<FamilyFile>(text)?.to_family()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatesFile {
    pub dim: usize,
    pub count: usize,
    /// `vectors[x][i] = [re, im]`.
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl From<&StateSet> for StatesFile {
    fn from(s: &StateSet) -> Self {
        Self {
            dim: s.dim(),
            count: s.count(),
            vectors: s
                .vectors()
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl StatesFile {
    pub fn to_states(&self) -> Result<StateSet> {
        if self.vectors.len() != self.count {
            return Err(Error::DimensionMismatch(format!(
                "count = {} but {} vectors given",
                self.count,
                self.vectors.len()
            )));
        }
        let vectors = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        StateSet::new(self.dim, vectors)
    }
}

pub fn states_to_json(s: &StateSet) -> String {
    to_pretty(&serde_json::to_value(StatesFile::from(s)).expect("states serialize"))
}

pub fn states_from_json(text: &str) -> Result<StateSet> {
    serde_json::from_str::<StatesFile>(text)?.to_states()
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    // serde_json's default map is ordered, so re-parsing sorts nested keys.
    let sorted: Value = serde_json::from_str(&v.to_string()).expect("valid JSON");
    let mut s = serde_json::to_string_pretty(&sorted).expect("JSON serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn strategy_round_trip() {
        let f = SubsetFamily::k_subsets(4, 2);
        let s = crate::codes::strategy_from_cwc(&f, 2, 1).unwrap();
        let text = strategy_to_json(&s);
        assert!(text.contains("\"1/2\""));
        assert!(!text.contains('.'));
        let back = strategy_from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.error_report().worst_case, ratio(1, 2));
    }

    #[test]
    fn one_way_without_q() {
        let text = r#"{"p": [["1"], ["1/2", "1/2"]], "r": [[1, 1], [0, 1]]}"#;
        assert!(strategy_from_json(text).is_err());
        let text = r#"{"p": [["1", "0"], ["0", "1"]], "r": [[1, 0], [0, 1]]}"#;
        let s = strategy_from_json(text).unwrap();
        assert_eq!(s.m_b(), 2);
        assert!(s.is_one_way());
    }

    #[test]
    fn family_and_states_round_trip() {
        let f = SubsetFamily::k_subsets(5, 2);
        assert_eq!(family_from_json(&family_to_json(&f)).unwrap(), f);
        let s = crate::quantum::mub_states(3).unwrap();
        let back = states_from_json(&states_to_json(&s)).unwrap();
        for (a, b) in back
            .vectors()
            .iter()
            .flatten()
            .zip(s.vectors().iter().flatten())
        {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"z": 1, "a": {"y": 2, "b": 3}});
        let s = to_pretty(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(s.find("\"b\"").unwrap() < s.find("\"y\"").unwrap());
    }
}
