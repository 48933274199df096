//! Codes in the weighted chain space: minimum distances, packing, and the
//! MDS, perfect and diameter perfect verdicts, plus the two explicit families
//! (MDS codes `{(x_y, y)}` and the threshold codes built from `W^w(S)`).

use serde::Serialize;

use crate::algebra::{FieldElement, Vector};
use crate::anticode::{ball_size, lower_family, optimal_anticode_size, q_pow, upper_family};
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::weights::WeightTable;

/// A nonempty code in a usual-chain metric space. Words are deduplicated and
/// kept in rank order.
#[derive(Clone, Debug)]
pub struct Code {
    metric: MetricSpace,
    words: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MinDistances {
    /// `d(C)`: least top differing position over pairs, counted from 1.
    pub d_poset: usize,
    /// `S_{w,C}`: least `w(x_d - y_d)` over pairs with `d(x, y) = d(C)`.
    pub s_wc: u32,
    /// `d_w(C) = S_{w,C} + (d(C) - 1) M_w`.
    pub d_weighted: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PackingCheck {
    pub radius: u32,
    /// Balls of `radius` around distinct words never meet.
    pub disjoint: bool,
    /// Some pair at poset distance `d(C)` has meeting balls of radius `radius + m_w`.
    pub collides_above: bool,
    pub collision_pair: Option<(Vector, Vector)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MdsVerdict {
    pub mds: bool,
    pub size: usize,
    /// `q^{n - d(C) + 1}`.
    pub singleton: u64,
    /// `(y, x_y)` pairs when the code has the form `{(x_y, y)}`.
    pub map: Option<Vec<(Vector, Vector)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterPerfectVerdict {
    pub d_weighted: u32,
    /// The anticode diameter `floor(d_w(C))`.
    pub floor: u32,
    pub a_star: u64,
    pub size: u64,
    pub space_size: u64,
    pub diameter_perfect: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PowerOfQ {
    pub k: u32,
    pub mds: bool,
    pub diameter_perfect: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub q: usize,
    pub n: usize,
    pub size: usize,
    pub d_poset: usize,
    pub s_wc: u32,
    pub d_weighted: u32,
    pub packing_radius: u32,
    pub mds: bool,
    pub perfect: bool,
    pub diameter_perfect: bool,
}

impl Code {
    pub fn new(metric: MetricSpace, words: Vec<Vector>) -> Result<Self> {
        metric.require_usual_chain()?;
        if words.is_empty() {
            return Err(Error::Domain("a code needs at least one word".into()));
        }
        for w in &words {
            metric.space().check(w)?;
        }
        let mut words = words;
        words.sort_by_cached_key(|v| metric.space().rank(v));
        words.dedup();
        Ok(Code { metric, words })
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    pub fn words(&self) -> &[Vector] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn pairs(&self) -> impl Iterator<Item = (&Vector, &Vector)> {
        self.words
            .iter()
            .enumerate()
            .flat_map(move |(i, u)| self.words[i + 1..].iter().map(move |v| (u, v)))
    }

    fn require_pair(&self) -> Result<()> {
        if self.words.len() < 2 {
            return Err(Error::Domain(
                "minimum distance needs at least two words".into(),
            ));
        }
        Ok(())
    }

    fn top_difference(u: &Vector, v: &Vector) -> usize {
        (0..u.len()).rev().find(|&i| u[i] != v[i]).unwrap()
    }

    pub fn min_distances(&self) -> Result<MinDistances> {
        self.require_pair()?;
        let f = self.metric.field();
        let w = self.metric.weight();
        let mut top = usize::MAX;
        let mut s_wc = u32::MAX;
        for (u, v) in self.pairs() {
            let t = Self::top_difference(u, v);
            let s = w.get(f.sub(u[t], v[t]));
            if t < top {
                top = t;
                s_wc = s;
            } else if t == top {
                s_wc = s_wc.min(s);
            }
        }
        Ok(MinDistances {
            d_poset: top + 1,
            s_wc,
            d_weighted: s_wc + top as u32 * self.metric.max_weight(),
        })
    }

    /// `M_w (d(C) - 1)`.
    pub fn packing_radius(&self) -> Result<u32> {
        Ok(self.metric.max_weight() * (self.min_distances()?.d_poset as u32 - 1))
    }

    /// Tests the packing radius by enumeration: disjointness at the radius and
    /// a collision at `radius + m_w` for a pair realising `d(C)`.
    pub fn check_packing(&self, budget: u64) -> Result<PackingCheck> {
        let d = self.min_distances()?;
        let radius = self.packing_radius()?;
        let m = &self.metric;
        let size = m.space().size_within(budget)?;
        let all: Vec<Vector> = m.space().vectors(size)?.collect();
        let meet = |u: &Vector, v: &Vector| {
            all.iter()
                .map(|x| m.distance(u, x).max(m.distance(v, x)))
                .min()
                .unwrap()
        };
        let mut disjoint = true;
        let mut collision_pair = None;
        let above = radius + m.stats().min_nonzero_weight;
        for (u, v) in self.pairs() {
            let r = meet(u, v);
            disjoint &= r > radius;
            if collision_pair.is_none() && Self::top_difference(u, v) + 1 == d.d_poset && r <= above
            {
                collision_pair = Some((u.clone(), v.clone()));
            }
        }
        Ok(PackingCheck {
            radius,
            disjoint,
            collides_above: collision_pair.is_some(),
            collision_pair,
        })
    }

    /// Whether the packing-radius balls cover the space, by enumeration.
    pub fn is_perfect(&self, budget: u64) -> Result<bool> {
        let radius = self.packing_radius()?;
        let m = &self.metric;
        let size = m.space().size_within(budget)?;
        let mut all = m.space().vectors(size)?;
        Ok(all.all(|x| self.words.iter().any(|c| m.distance(c, &x) <= radius)))
    }

    /// `|C| = q^{n - d(C) + 1}`, with the map `y -> x_y` read off the last
    /// `n - d(C) + 1` coordinates when they list `F_q^{n-d(C)+1}` once each.
    pub fn is_mds(&self) -> Result<MdsVerdict> {
        let d = self.min_distances()?.d_poset;
        let n = self.metric.n();
        let singleton = q_pow(self.metric.field().q(), n - d + 1)?;
        let mds = self.words.len() as u64 == singleton;
        let map = mds.then(|| {
            let mut map: Vec<(Vector, Vector)> = self
                .words
                .iter()
                .map(|c| {
                    let (x, y) = c.coords().split_at(d - 1);
                    (Vector::new(y.to_vec()), Vector::new(x.to_vec()))
                })
                .collect();
            map.sort_by(|a, b| a.0.coords().cmp(b.0.coords()));
            map.dedup_by(|a, b| a.0 == b.0);
            map
        });
        let map = map.filter(|m| m.len() as u64 == singleton);
        Ok(MdsVerdict {
            mds,
            size: self.words.len(),
            singleton,
            map,
        })
    }

    /// `A*(floor(d_w(C))) * |C| = q^n`, with `A*` from the closed forms.
    pub fn is_diameter_perfect(&self) -> Result<DiameterPerfectVerdict> {
        let d = self.min_distances()?;
        let w = self.metric.weight();
        let n = self.metric.n();
        let floor = w.floor_weight(n, d.d_weighted);
        let a_star = optimal_anticode_size(w, n, floor)?.a_star;
        let size = self.words.len() as u64;
        let space_size = q_pow(self.metric.field().q(), n)?;
        let product = a_star.checked_mul(size).ok_or(Error::Overflow("A* |C|"))?;
        Ok(DiameterPerfectVerdict {
            d_weighted: d.d_weighted,
            floor,
            a_star,
            size,
            space_size,
            diameter_perfect: product == space_size,
        })
    }

    /// For `|C| = q^k`: diameter perfect exactly when MDS.
    pub fn power_of_q_classification(&self) -> Result<PowerOfQ> {
        let q = self.metric.field().q();
        let mut k = 0;
        let mut size = self.words.len();
        while size.is_multiple_of(q) {
            size /= q;
            k += 1;
        }
        if size != 1 {
            return Err(Error::Domain(format!(
                "|C| = {} is not a power of {q}",
                self.words.len()
            )));
        }
        let mds = self.is_mds()?.mds;
        let diameter_perfect = self.is_diameter_perfect()?.diameter_perfect;
        Ok(PowerOfQ {
            k,
            mds,
            diameter_perfect,
            consistent: mds == diameter_perfect,
        })
    }

    pub fn report(&self, budget: u64) -> Result<CodeReport> {
        let d = self.min_distances()?;
        Ok(CodeReport {
            q: self.metric.field().q(),
            n: self.metric.n(),
            size: self.words.len(),
            d_poset: d.d_poset,
            s_wc: d.s_wc,
            d_weighted: d.d_weighted,
            packing_radius: self.packing_radius()?,
            mds: self.is_mds()?.mds,
            perfect: self.is_perfect(budget)?,
            diameter_perfect: self.is_diameter_perfect()?.diameter_perfect,
        })
    }
}

/// `{(assign(y), y) : y in F_q^{n-d+1}}`, checked to have `d(C) = d`.
pub fn construct_mds(
    metric: &MetricSpace,
    d: usize,
    assign: impl Fn(&Vector) -> Vector,
    budget: u64,
) -> Result<Code> {
    let n = metric.n();
    if d == 0 || d > n {
        return Err(Error::Domain(format!(
            "MDS construction needs 1 <= d <= n = {n}, got d = {d}"
        )));
    }
    let tail = crate::algebra::Space::new(metric.field().clone(), n - d + 1)?;
    let size = tail.size_within(budget)?;
    let mut words = Vec::with_capacity(size as usize);
    for y in tail.vectors(size)? {
        let x = assign(&y);
        if x.len() != d - 1 {
            return Err(Error::DimensionMismatch {
                expected: d - 1,
                found: x.len(),
            });
        }
        let mut coords = x.into_coords();
        coords.extend_from_slice(y.coords());
        words.push(Vector::new(coords));
    }
    let code = Code::new(metric.clone(), words)?;
    let got = code.min_distances()?;
    if got.d_poset != d || code.len() as u64 != size {
        let (u, v) = code
            .pairs()
            .find(|(u, v)| Code::top_difference(u, v) + 1 == got.d_poset)
            .map(|(u, v)| (u.clone(), v.clone()))
            .unwrap();
        return Err(Error::Contract(format!(
            "expected d(C) = {d}, got {} at the pair {u}, {v}",
            got.d_poset
        )));
    }
    Ok(code)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionCase {
    /// `m_w < S <= S_w`: `(1 + |w^{-1}([S-1]_w)|) |W^w(S)| <= q`.
    UpToThreshold,
    /// `S_w < S < M_w`: `(1 + |w^{-1}([S_w-1]_w)| + |W_w(S-1)|) |W^w(S)| <= q`.
    AboveThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    #[serde(rename = "S")]
    pub s: u32,
    pub case: CriterionCase,
    /// The anticode factor (left of `|W^w(S)|`).
    pub anticode_factor: u64,
    pub upper_cardinality: u64,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
    /// Equality: a diameter perfect code with this `S` exists.
    pub equality: bool,
}

/// Evaluates the diameter-perfect inequality at a level `m_w < S < M_w`, `S in Im(w)`.
pub fn diameter_perfect_criterion(w: &WeightTable, s: u32) -> Result<CriterionReport> {
    let st = w.stats();
    if s <= st.min_nonzero_weight || s >= st.max_weight || !w.in_image(s) {
        return Err(Error::Domain(format!(
            "criterion needs S in Im(w) with {} < S < {}, got S = {s}",
            st.min_nonzero_weight, st.max_weight
        )));
    }
    let upper = upper_family(w, s)?.cardinality as u64;
    let (case, factor) = if s <= st.archimedean_threshold {
        (
            CriterionCase::UpToThreshold,
            1 + w.count_up_to(s - 1) as u64,
        )
    } else {
        let lower = lower_family(w, s - 1)?.cardinality as u64;
        let below = w.count_up_to(st.archimedean_threshold - 1) as u64;
        (CriterionCase::AboveThreshold, 1 + below + lower)
    };
    let lhs = factor * upper;
    let rhs = w.field().q() as u64;
    Ok(CriterionReport {
        s,
        case,
        anticode_factor: factor,
        upper_cardinality: upper,
        lhs,
        rhs,
        holds: lhs <= rhs,
        equality: lhs == rhs,
    })
}

/// Levels at which [`diameter_perfect_criterion`] applies.
pub fn criterion_levels(w: &WeightTable) -> Vec<u32> {
    let st = w.stats();
    st.image
        .iter()
        .copied()
        .filter(|&s| s > st.min_nonzero_weight && s < st.max_weight)
        .collect()
}

/// `{(0, ..., 0, c_R, c_{R+1}, ..., c_n) : c_R in W^w(S)}` using the least
/// member of `W^w(S)`; `R` counts from 1. Checked to have
/// `d_w(C) = S + (R - 1) M_w` and `|C| = q^{n-R} |W^w(S)|`.
pub fn construct_threshold_code(
    metric: &MetricSpace,
    s: u32,
    r: usize,
    budget: u64,
) -> Result<Code> {
    let w = metric.weight();
    let st = metric.stats();
    let n = metric.n();
    if s <= st.min_nonzero_weight || s >= st.max_weight || !w.in_image(s) {
        return Err(Error::Domain(format!(
            "threshold codes need S in Im(w) with {} < S < {}, got S = {s}",
            st.min_nonzero_weight, st.max_weight
        )));
    }
    if r == 0 || r > n {
        return Err(Error::Domain(format!(
            "threshold codes need 1 <= R <= n = {n}, got R = {r}"
        )));
    }
    let upper = upper_family(w, s)?;
    let k: &[FieldElement] = &upper.members[0];
    let q = metric.field().q();
    let count = q_pow(q, n - r)?;
    if count > budget {
        return Err(Error::BudgetExceeded {
            requested: count as u128 * k.len() as u128,
            limit: budget,
        });
    }
    let mut words = Vec::new();
    for rank in 0..count {
        let mut rest = rank as usize;
        let tail = (0..n - r).map(|_| {
            let digit = rest % q;
            rest /= q;
            metric.field().element(digit).unwrap()
        });
        let tail: Vec<FieldElement> = tail.collect();
        for &c in k {
            let mut coords = vec![FieldElement::ZERO; r - 1];
            coords.push(c);
            coords.extend_from_slice(&tail);
            words.push(Vector::new(coords));
        }
    }
    let code = Code::new(metric.clone(), words)?;
    let expected_d = s + (r as u32 - 1) * st.max_weight;
    let expected_size = count * upper.cardinality as u64;
    let got = code.min_distances()?;
    if got.d_weighted != expected_d || code.len() as u64 != expected_size {
        return Err(Error::Contract(format!(
            "threshold code has d_w = {} and size {}, expected {expected_d} and {expected_size}",
            got.d_weighted,
            code.len()
        )));
    }
    Ok(code)
}

/// Ball size at the packing radius, used for the counting cross-check of perfection.
pub fn packing_ball_size(code: &Code) -> Result<u64> {
    Ok(ball_size(
        code.metric().weight(),
        code.metric().n(),
        code.packing_radius()?,
    )?
    .size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;
    use crate::oracle::brute_min_distance;

    fn lee(q: usize, n: usize) -> MetricSpace {
        MetricSpace::chain(WeightTable::lee(&FieldSpec::new(q).unwrap()).unwrap(), n).unwrap()
    }

    fn hamming(q: usize, n: usize) -> MetricSpace {
        MetricSpace::chain(WeightTable::hamming(&FieldSpec::new(q).unwrap()), n).unwrap()
    }

    fn code(m: &MetricSpace, idx: &[&[usize]]) -> Code {
        Code::new(
            m.clone(),
            idx.iter().map(|i| m.space().vector(i).unwrap()).collect(),
        )
        .unwrap()
    }

    fn sum_code() -> Code {
        let m = hamming(3, 3);
        let f = m.field().clone();
        construct_mds(&m, 2, |y| Vector::new(vec![f.add(y[0], y[1])]), 1000).unwrap()
    }

    #[test]
    fn minimum_distance_examples() {
        let m = lee(5, 2);
        let c = code(&m, &[&[0, 0], &[0, 1]]);
        let d = c.min_distances().unwrap();
        assert_eq!((d.d_poset, d.s_wc, d.d_weighted), (2, 1, 3));
        let c = code(&m, &[&[0, 0], &[0, 2]]);
        assert_eq!(c.min_distances().unwrap().d_weighted, 4);
        assert_eq!(c.packing_radius().unwrap(), 2);
        assert!(matches!(
            code(&m, &[&[0, 0]]).min_distances(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn s_wc_only_counts_pairs_at_the_minimum_poset_distance() {
        let m = lee(7, 2);
        let c = code(&m, &[&[0, 0], &[3, 0], &[1, 1]]);
        let d = c.min_distances().unwrap();
        assert_eq!((d.d_poset, d.s_wc, d.d_weighted), (1, 3, 3));
        assert_eq!(brute_min_distance(&m, c.words()).unwrap(), 3);
        // Over all pairs with a differing first coordinate the least weight is 1.
        let f = m.field();
        let literal = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| (&c.words()[i], &c.words()[j]))
            .filter(|(u, v)| u[0] != v[0])
            .map(|(u, v)| m.weight().get(f.sub(u[0], v[0])))
            .min()
            .unwrap();
        assert_eq!(literal, 1);
    }

    #[test]
    fn mds_examples() {
        let c = sum_code();
        assert_eq!(c.len(), 9);
        let v = c.is_mds().unwrap();
        assert!(v.mds);
        assert_eq!(v.map.as_ref().unwrap().len(), 9);
        assert_eq!(c.min_distances().unwrap().d_poset, 2);
        assert!(c.is_perfect(1000).unwrap());
        assert_eq!(c.packing_radius().unwrap(), 1);
        assert!(c.is_diameter_perfect().unwrap().diameter_perfect);

        let h = hamming(2, 2);
        let diag = construct_mds(&h, 2, |y| y.clone(), 100).unwrap();
        assert_eq!(diag.words(), code(&h, &[&[0, 0], &[1, 1]]).words());
        assert!(diag.is_mds().unwrap().mds);
        assert!(diag.is_diameter_perfect().unwrap().diameter_perfect);

        let whole = construct_mds(&h, 1, |_| Vector::new(vec![]), 100).unwrap();
        assert_eq!(whole.len(), 4);
        assert!(whole.is_mds().unwrap().mds);
        let p = whole.power_of_q_classification().unwrap();
        assert!(p.mds && p.diameter_perfect && p.consistent);

        let low = code(&h, &[&[0, 0], &[1, 0]]);
        assert!(!low.is_mds().unwrap().mds);
        assert!(!low.is_perfect(100).unwrap());
        assert!(!low.is_diameter_perfect().unwrap().diameter_perfect);
    }

    #[test]
    fn mds_rejects_bad_target() {
        let h = hamming(2, 2);
        assert!(matches!(
            construct_mds(&h, 3, |y| y.clone(), 100),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            construct_mds(&h, 2, |_| Vector::new(vec![]), 100),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diameter_perfect_examples() {
        let m = lee(5, 2);
        let c = code(&m, &[&[0, 0], &[0, 2]]);
        let v = c.is_diameter_perfect().unwrap();
        assert_eq!((v.d_weighted, v.floor), (4, 3));
        assert!(!v.diameter_perfect);
        assert!(v.a_star * v.size < 25);
        assert!(matches!(
            c.power_of_q_classification(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn criterion_examples() {
        let w = WeightTable::lee(&FieldSpec::new(7).unwrap()).unwrap();
        let r = diameter_perfect_criterion(&w, 2).unwrap();
        assert_eq!(r.case, CriterionCase::AboveThreshold);
        assert_eq!((r.lhs, r.rhs, r.equality), (6, 7, false));
        let h = WeightTable::hamming(&FieldSpec::new(4).unwrap());
        assert!(criterion_levels(&h).is_empty());
        assert!(matches!(
            diameter_perfect_criterion(&h, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn threshold_code_examples() {
        let c = construct_threshold_code(&lee(7, 2), 2, 1, 1000).unwrap();
        assert_eq!((c.len(), c.min_distances().unwrap().d_weighted), (21, 2));
        let c = construct_threshold_code(&lee(7, 3), 2, 2, 1000).unwrap();
        assert_eq!((c.len(), c.min_distances().unwrap().d_weighted), (21, 5));
        assert!(matches!(
            construct_threshold_code(&lee(5, 2), 2, 1, 1000),
            Err(Error::Domain(_))
        ));
        let top = construct_threshold_code(&lee(7, 2), 2, 2, 1000).unwrap();
        assert_eq!((top.len(), top.min_distances().unwrap().d_weighted), (3, 5));
    }

    #[test]
    fn packing_examples() {
        let c = sum_code();
        let p = c.check_packing(1000).unwrap();
        assert!(p.disjoint && p.collides_above);
        assert_eq!(packing_ball_size(&c).unwrap() * c.len() as u64, 27);
        let sparse = code(&lee(7, 1), &[&[0], &[3]]);
        let p = sparse.check_packing(100).unwrap();
        assert_eq!(p.radius, 0);
        assert!(p.disjoint);
        assert!(!p.collides_above);
    }

    #[test]
    fn report_fields() {
        let r = sum_code().report(1000).unwrap();
        assert_eq!(
            (r.size, r.d_poset, r.d_weighted, r.packing_radius),
            (9, 2, 2, 1)
        );
        assert!(r.mds && r.perfect && r.diameter_perfect);
    }
}
