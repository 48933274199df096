//! Weights on `F_q` and the scalars derived from them.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, FieldSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardWeight {
    Hamming,
    Lee,
}

/// A broken weight axiom together with the elements witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    /// `w(0) != 0`, or `w(a) = 0` for some `a != 0`.
    Definiteness { element: FieldElement },
    /// `w(a) != w(-a)`.
    Symmetry {
        a: FieldElement,
        neg_a: FieldElement,
    },
    /// `w(a + b) > w(a) + w(b)`.
    Triangle { a: FieldElement, b: FieldElement },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Definiteness { element } => {
                write!(f, "definiteness fails at {element}")
            }
            AxiomViolation::Symmetry { a, neg_a } => {
                write!(f, "symmetry fails at ({a},{neg_a})")
            }
            AxiomViolation::Triangle { a, b } => {
                write!(f, "triangle inequality fails at ({a},{b})")
            }
        }
    }
}

/// Checks the three weight axioms on a candidate table.
///
/// Returns the lexicographically first witness of each broken axiom; an empty
/// list means the table is a weight. A table of the wrong length is an error.
pub fn validate_weight(field: &FieldSpec, values: &[u32]) -> Result<Vec<AxiomViolation>> {
    let q = field.q();
    if values.len() != q {
        return Err(Error::IncompleteWeightTable {
            expected: q,
            found: values.len(),
        });
    }
    let w = |a: FieldElement| values[a.index()];
    let mut out = Vec::new();
    if let Some(element) = field.elements().find(|&a| (w(a) == 0) != a.is_zero()) {
        out.push(AxiomViolation::Definiteness { element });
    }
    if let Some(a) = field.elements().find(|&a| w(a) != w(field.neg(a))) {
        out.push(AxiomViolation::Symmetry {
            a,
            neg_a: field.neg(a),
        });
    }
    'tri: for a in field.elements() {
        for b in field.elements() {
            if w(field.add(a, b)) > w(a) + w(b) {
                out.push(AxiomViolation::Triangle { a, b });
                break 'tri;
            }
        }
    }
    Ok(out)
}

/// A validated weight `w: F_q -> N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    field: FieldSpec,
    values: Vec<u32>,
}

/// Scalars read off a weight table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightStats {
    /// `M_w`.
    pub max_weight: u32,
    /// `m_w`, the least weight of a nonzero element.
    pub min_nonzero_weight: u32,
    /// `Im(w)` in increasing order, including 0.
    pub image: Vec<u32>,
    /// `S_w`: the least `max{w(a), w(b)}` over pairs with `w(a - b) > max{w(a), w(b)}`,
    /// or `M_w` when no such pair exists.
    pub archimedean_threshold: u32,
    pub non_archimedean: bool,
}

/// The `w`-interval `[r]_w = {1..=r} ∩ Im(w)` and how many elements it weighs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WInterval {
    pub levels: Vec<u32>,
    /// `|w^{-1}([r]_w)|`.
    pub count: usize,
}

impl WeightTable {
    pub fn new(field: FieldSpec, values: Vec<u32>) -> Result<Self> {
        let violations = validate_weight(&field, &values)?;
        if !violations.is_empty() {
            return Err(Error::InvalidWeight(violations));
        }
        Ok(WeightTable { field, values })
    }

    pub fn standard(field: &FieldSpec, kind: StandardWeight) -> Result<Self> {
        match kind {
            StandardWeight::Hamming => Ok(Self::hamming(field)),
            StandardWeight::Lee => Self::lee(field),
        }
    }

    pub fn hamming(field: &FieldSpec) -> Self {
        let values = field.elements().map(|a| u32::from(!a.is_zero())).collect();
        WeightTable {
            field: field.clone(),
            values,
        }
    }

    /// Lee weight `min(a, p - a)` on a prime field.
    pub fn lee(field: &FieldSpec) -> Result<Self> {
        if !field.is_prime_field() {
            return Err(Error::UnsupportedWeight(format!(
                "the Lee weight needs a prime field, got q = {}",
                field.q()
            )));
        }
        let p = field.q();
        let values = (0..p).map(|a| a.min(p - a) as u32).collect();
        Ok(WeightTable {
            field: field.clone(),
            values,
        })
    }

    /// Draws a symmetric table with nonzero values in `1..=max_value` and
    /// rejects it until the triangle inequality holds. Gives up after
    /// `attempts` draws.
    pub fn random<R: Rng + ?Sized>(
        field: &FieldSpec,
        max_value: u32,
        attempts: usize,
        rng: &mut R,
    ) -> Option<Self> {
        let q = field.q();
        for _ in 0..attempts {
            let mut values = vec![0u32; q];
            for a in field.elements().skip(1) {
                let na = field.neg(a);
                if na.index() >= a.index() {
                    let v = rng.gen_range(1..=max_value);
                    values[a.index()] = v;
                    values[na.index()] = v;
                }
            }
            if let Ok(w) = WeightTable::new(field.clone(), values) {
                return Some(w);
            }
        }
        None
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, a: FieldElement) -> u32 {
        self.values[a.index()]
    }

    pub fn max_weight(&self) -> u32 {
        *self.values.iter().max().unwrap()
    }

    pub fn min_nonzero_weight(&self) -> u32 {
        *self.values[1..].iter().min().unwrap()
    }

    pub fn image(&self) -> Vec<u32> {
        let mut im = self.values.clone();
        im.sort_unstable();
        im.dedup();
        im
    }

    pub fn in_image(&self, t: u32) -> bool {
        self.values.contains(&t)
    }

    /// True when `w` is a positive multiple of the Hamming weight.
    pub fn is_scaled_hamming(&self) -> bool {
        self.values[1..].iter().all(|&v| v == self.values[1])
    }

    pub fn stats(&self) -> WeightStats {
        let f = &self.field;
        let mut threshold: Option<u32> = None;
        for a in f.elements() {
            for b in f.elements() {
                let top = self.get(a).max(self.get(b));
                if self.get(f.sub(a, b)) > top {
                    threshold = Some(threshold.map_or(top, |t| t.min(top)));
                }
            }
        }
        let max_weight = self.max_weight();
        WeightStats {
            max_weight,
            min_nonzero_weight: self.min_nonzero_weight(),
            image: self.image(),
            archimedean_threshold: threshold.unwrap_or(max_weight),
            non_archimedean: threshold.is_none(),
        }
    }

    pub fn interval(&self, r: u32) -> WInterval {
        let levels = self
            .image()
            .into_iter()
            .filter(|&t| t >= 1 && t <= r)
            .collect();
        let count = self.values.iter().filter(|&&v| v >= 1 && v <= r).count();
        WInterval { levels, count }
    }

    /// `|w^{-1}([r]_w)|`: nonzero elements of weight at most `r`.
    pub fn count_up_to(&self, r: u32) -> usize {
        self.values.iter().filter(|&&v| v >= 1 && v <= r).count()
    }

    /// Largest weight `s + i * M_w` (with `s ∈ Im(w)`, `0 <= i < n`) strictly below `d`;
    /// these are exactly the values of the weighted chain weight on `F_q^n`.
    pub fn floor_weight(&self, n: usize, d: u32) -> u32 {
        let m = self.max_weight();
        let image = self.image();
        let mut best = 0;
        for i in 0..n as u32 {
            for &s in &image {
                let v = s + i * m;
                if v < d && v > best {
                    best = v;
                }
            }
        }
        best
    }

    /// Largest element of `Im(w)` that is `<= s` (0 always qualifies).
    pub fn image_floor(&self, s: u32) -> u32 {
        self.values
            .iter()
            .copied()
            .filter(|&v| v <= s)
            .max()
            .unwrap_or(0)
    }
}
