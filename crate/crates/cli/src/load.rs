//! Turns command-line flags and files into library values.

use std::fs;
use std::path::Path;

use serde::Serialize;
use wchain::formats::{parse_code, parse_poset, parse_weight, CodeFile};
use wchain::{Error, FieldSpec, MetricSpace, Poset, Result, Vector, WeightTable};

pub fn read(path: &str) -> Result<String> {
    fs::read_to_string(Path::new(path)).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

pub fn field(q: &str) -> Result<FieldSpec> {
    q.parse()
}

/// `hamming`, `lee`, or a JSON file holding the table.
pub fn weight(field: &FieldSpec, source: &str) -> Result<WeightTable> {
    match source {
        "hamming" => Ok(WeightTable::hamming(field)),
        "lee" => WeightTable::lee(field),
        path => parse_weight(field, &read(path)?),
    }
}

/// `chain`, `antichain`, or a JSON poset file. A file fixes `n` itself.
pub fn poset(source: &str, n: Option<usize>) -> Result<Poset> {
    let need_n = || n.ok_or_else(|| Error::Validation("--n is required".into()));
    match source {
        "chain" => Poset::chain(need_n()?),
        "antichain" => Poset::antichain(need_n()?),
        path => {
            let p = parse_poset(&read(path)?)?;
            if let Some(n) = n {
                if n != p.n() {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: p.n(),
                    });
                }
            }
            Ok(p)
        }
    }
}

/// A metric space together with the relabelling applied to a chain given in
/// a non-usual order: coordinate `k` of the usual chain is `relabel[k]` of the
/// input, both counted from 1.
#[derive(Clone, Debug)]
pub struct Setting {
    pub metric: MetricSpace,
    pub relabel: Option<Vec<usize>>,
}

#[derive(Serialize)]
pub struct SettingInfo {
    pub q: usize,
    pub field: String,
    pub n: usize,
    pub weight: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relabel: Option<Vec<usize>>,
}

impl Setting {
    pub fn new(poset: Poset, weight: WeightTable) -> Result<Self> {
        if poset.is_chain() && !poset.is_usual_chain() {
            let order = poset.chain_order().expect("chain");
            let metric = MetricSpace::chain(weight, poset.n())?;
            return Ok(Setting {
                metric,
                relabel: Some(order.into_iter().map(|i| i + 1).collect()),
            });
        }
        Ok(Setting {
            metric: MetricSpace::new(poset, weight)?,
            relabel: None,
        })
    }

    pub fn info(&self) -> SettingInfo {
        let f = self.metric.field();
        SettingInfo {
            q: f.q(),
            field: f.to_string(),
            n: self.metric.n(),
            weight: self.metric.weight().values().to_vec(),
            relabel: self.relabel.clone(),
        }
    }

    /// Coordinates as read, moved into the usual chain order.
    pub fn vector(&self, coords: &[usize]) -> Result<Vector> {
        let space = self.metric.space();
        match &self.relabel {
            None => space.vector(coords),
            Some(order) => {
                if coords.len() != order.len() {
                    return Err(Error::DimensionMismatch {
                        expected: order.len(),
                        found: coords.len(),
                    });
                }
                let moved: Vec<usize> = order.iter().map(|&i| coords[i - 1]).collect();
                space.vector(&moved)
            }
        }
    }

    pub fn vector_or_zero(&self, coords: Option<&[usize]>) -> Result<Vector> {
        match coords {
            Some(c) => self.vector(c),
            None => Ok(self.metric.space().zero()),
        }
    }

    pub fn code_words(&self, file: &CodeFile) -> Result<Vec<Vector>> {
        if file.q != self.metric.field().q() {
            return Err(Error::Validation(format!(
                "code is over F_{}, the weight over F_{}",
                file.q,
                self.metric.field().q()
            )));
        }
        if file.n != self.metric.n() {
            return Err(Error::DimensionMismatch {
                expected: self.metric.n(),
                found: file.n,
            });
        }
        file.words.iter().map(|w| self.vector(w)).collect()
    }
}

pub fn code_file(path: &str) -> Result<CodeFile> {
    parse_code(&read(path)?)
}
