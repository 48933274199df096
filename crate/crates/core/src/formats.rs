//! JSON file formats.
//!
//! * weight table: `[w(0), w(1), ..., w(q-1)]` in canonical element order;
//! * poset: `{"n": 3, "covers": [[1, 2], [2, 3]]}`, coordinates counted from 1,
//!   `[i, j]` meaning `i < j`;
//! * code: `{"q": 5, "n": 2, "words": [[0, 0], [1, 3]]}`.

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldSpec, Space, Vector};
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::weights::WeightTable;

fn parse<'a, T: Deserialize<'a>>(what: &str, text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Reads raw values without checking the weight axioms.
pub fn parse_weight_values(text: &str) -> Result<Vec<u32>> {
    parse("weight table", text)
}

/// Reads a table over `field` and checks the weight axioms.
pub fn parse_weight(field: &FieldSpec, text: &str) -> Result<WeightTable> {
    let values = parse_weight_values(text)?;
    WeightTable::new(field.clone(), values)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub n: usize,
    pub covers: Vec<[usize; 2]>,
}

impl PosetFile {
    pub fn to_poset(&self) -> Result<Poset> {
        let mut rel = Vec::with_capacity(self.covers.len());
        for &[i, j] in &self.covers {
            if i == 0 || j == 0 {
                return Err(Error::InvalidPoset(format!(
                    "relation [{i},{j}]: coordinates are counted from 1"
                )));
            }
            rel.push((i - 1, j - 1));
        }
        Poset::from_covers(self.n, &rel)
    }

    pub fn from_poset(p: &Poset) -> Self {
        PosetFile {
            n: p.n(),
            covers: p
                .covers()
                .into_iter()
                .map(|(i, j)| [i + 1, j + 1])
                .collect(),
        }
    }
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    parse::<PosetFile>("poset", text)?.to_poset()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub q: usize,
    pub n: usize,
    pub words: Vec<Vec<usize>>,
}

impl CodeFile {
    /// Checks every word against `space`; the file's `q` and `n` must match it.
    pub fn vectors(&self, space: &Space) -> Result<Vec<Vector>> {
        if self.q != space.field().q() {
            return Err(Error::Validation(format!(
                "code is over F_{}, expected F_{}",
                self.q,
                space.field().q()
            )));
        }
        if self.n != space.n() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                found: self.n,
            });
        }
        self.words.iter().map(|w| space.vector(w)).collect()
    }

    pub fn from_vectors(space: &Space, words: &[Vector]) -> Self {
        CodeFile {
            q: space.field().q(),
            n: space.n(),
            words: words
                .iter()
                .map(|v| v.coords().iter().map(|a| a.index()).collect())
                .collect(),
        }
    }
}

pub fn parse_code(text: &str) -> Result<CodeFile> {
    parse("code", text)
}
