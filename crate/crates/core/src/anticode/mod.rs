//! Balls, diameters and optimal anticodes on the weighted chain.
//!
//! Every radius is written `D = S + R * M_w` with `0 <= S < M_w` and `S`
//! pushed down into `Im(w)`; the closed forms below are stated in `S` and `R`.

mod families;

use std::collections::BTreeSet;

use serde::Serialize;

pub use families::{lower_family, upper_family, w_families, Family, WFamilies};

use crate::algebra::{FieldElement, Vector};
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::weights::WeightTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RadiusDecomposition {
    pub raw: u32,
    pub s: u32,
    pub r: u32,
    /// `s + r * M_w`; a ball of this radius equals the ball of radius `raw`.
    pub normalized: u32,
}

pub fn normalize_radius(w: &WeightTable, d: u32) -> RadiusDecomposition {
    let m = w.max_weight();
    let r = d / m;
    let s = w.image_floor(d % m);
    RadiusDecomposition {
        raw: d,
        s,
        r,
        normalized: s + r * m,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BallSize {
    pub size: u64,
    pub radius: RadiusDecomposition,
    /// The radius reaches every vector (`R >= n`); `size` is `q^n`.
    pub saturated: bool,
}

pub(crate) fn q_pow(q: usize, e: usize) -> Result<u64> {
    (q as u64)
        .checked_pow(e as u32)
        .ok_or(Error::Overflow("q^e"))
}

/// `q^R * (1 + |w^{-1}([S]_w)|)`, clamped to `q^n`.
pub fn ball_size(w: &WeightTable, n: usize, d: u32) -> Result<BallSize> {
    let radius = normalize_radius(w, d);
    let q = w.field().q();
    if radius.r as usize >= n {
        return Ok(BallSize {
            size: q_pow(q, n)?,
            radius,
            saturated: true,
        });
    }
    let size = q_pow(q, radius.r as usize)?
        .checked_mul(1 + w.count_up_to(radius.s) as u64)
        .ok_or(Error::Overflow("ball size"))?;
    Ok(BallSize {
        size,
        radius,
        saturated: false,
    })
}

fn sort_by_rank(m: &MetricSpace, set: &mut [Vector]) {
    set.sort_by_cached_key(|v| m.space().rank(v));
}

/// `B(center, D)`, sorted by rank.
pub fn ball(m: &MetricSpace, center: &Vector, d: u32, budget: u64) -> Result<Vec<Vector>> {
    m.space().check(center)?;
    let size = m.space().size_within(budget)?;
    Ok(m.space()
        .vectors(size)?
        .filter(|v| m.distance(center, v) <= d)
        .collect())
}

pub fn diameter(m: &MetricSpace, set: &[Vector]) -> Result<u32> {
    if set.is_empty() {
        return Err(Error::Domain(
            "the diameter of the empty set is undefined".into(),
        ));
    }
    let mut best = 0;
    for (i, u) in set.iter().enumerate() {
        for v in &set[i + 1..] {
            best = best.max(m.distance(u, v));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductBound {
    pub distances_a: BTreeSet<u32>,
    pub distances_b: BTreeSet<u32>,
    pub disjoint_distance_sets: bool,
    pub product: u128,
    pub space_size: u128,
    /// `|A| * |B| <= q^n`; only asserted when the distance sets are disjoint.
    pub bound_holds: bool,
}

fn nonzero_distances(m: &MetricSpace, set: &[Vector]) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for (i, u) in set.iter().enumerate() {
        for v in &set[i + 1..] {
            let d = m.distance(u, v);
            if d > 0 {
                out.insert(d);
            }
        }
    }
    out
}

pub fn distance_set_product_bound(
    m: &MetricSpace,
    a: &[Vector],
    b: &[Vector],
) -> Result<ProductBound> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("both sets must be nonempty".into()));
    }
    let distances_a = nonzero_distances(m, a);
    let distances_b = nonzero_distances(m, b);
    let disjoint_distance_sets = distances_a.is_disjoint(&distances_b);
    let product = a.len() as u128 * b.len() as u128;
    let space_size = (m.field().q() as u128)
        .checked_pow(m.n() as u32)
        .ok_or(Error::Overflow("q^n"))?;
    Ok(ProductBound {
        distances_a,
        distances_b,
        disjoint_distance_sets,
        product,
        space_size,
        bound_holds: !disjoint_distance_sets || product <= space_size,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `S < S_w`: balls are optimal.
    BelowThreshold,
    /// `S >= S_w`: optimal anticodes are `(x + Y_{w,R}(K)) ∪ B(x, D')`.
    AtOrAboveThreshold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum StructuralForm {
    Ball {
        center: Vector,
    },
    XPlusY {
        center: Vector,
        k: Vec<FieldElement>,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnticodeReport {
    pub q: usize,
    pub n: usize,
    pub weight: Vec<u32>,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "D_normalized")]
    pub normalized: u32,
    #[serde(rename = "S")]
    pub s: u32,
    #[serde(rename = "R")]
    pub r: u32,
    #[serde(rename = "S_w")]
    pub s_w: u32,
    /// `D' = floor(S_w) + R * M_w`, used by the second branch.
    #[serde(rename = "D_prime")]
    pub d_prime: u32,
    pub branch: Branch,
    pub a_star: u64,
    pub saturated: bool,
    /// Optimal anticodes through the origin, one per family member.
    pub witnesses: Vec<StructuralForm>,
}

/// `D' = floor(S_w) + R * M_w`.
pub fn d_prime(w: &WeightTable, n: usize, r: u32) -> u32 {
    w.floor_weight(n, w.stats().archimedean_threshold) + r * w.max_weight()
}

/// `A*(D)` from the closed forms:
/// `q^R (1 + |w^{-1}([S]_w)|)` when `S < S_w`, otherwise
/// `q^R (1 + |w^{-1}([S_w - 1]_w)| + |W_w(S)|)`.
pub fn optimal_anticode_size(w: &WeightTable, n: usize, d: u32) -> Result<AnticodeReport> {
    let radius = normalize_radius(w, d);
    let st = w.stats();
    let q = w.field().q();
    let zero = Vector::new(vec![FieldElement::ZERO; n]);
    let branch = if radius.s < st.archimedean_threshold {
        Branch::BelowThreshold
    } else {
        Branch::AtOrAboveThreshold
    };
    let mut report = AnticodeReport {
        q,
        n,
        weight: w.values().to_vec(),
        d,
        normalized: radius.normalized,
        s: radius.s,
        r: radius.r,
        s_w: st.archimedean_threshold,
        d_prime: d_prime(w, n, radius.r),
        branch,
        a_star: 0,
        saturated: radius.r as usize >= n,
        witnesses: Vec::new(),
    };
    if report.saturated {
        report.a_star = q_pow(q, n)?;
        report.witnesses.push(StructuralForm::Ball { center: zero });
        return Ok(report);
    }
    let q_r = q_pow(q, radius.r as usize)?;
    let factor = match branch {
        Branch::BelowThreshold => {
            report.witnesses.push(StructuralForm::Ball { center: zero });
            1 + w.count_up_to(radius.s)
        }
        Branch::AtOrAboveThreshold => {
            let fam = lower_family(w, radius.s)?;
            report.witnesses = fam
                .members
                .iter()
                .map(|k| StructuralForm::XPlusY {
                    center: zero.clone(),
                    k: k.clone(),
                })
                .collect();
            1 + w.count_up_to(st.archimedean_threshold - 1) + fam.cardinality
        }
    };
    report.a_star = q_r
        .checked_mul(factor as u64)
        .ok_or(Error::Overflow("A*(D)"))?;
    Ok(report)
}

/// `B(center, D)` below the threshold, `(center + Y_{w,R}(K)) ∪ B(center, D')`
/// at or above it. `k` is required in the second case.
pub fn build_optimal_anticode(
    m: &MetricSpace,
    center: &Vector,
    d: u32,
    k: Option<&[FieldElement]>,
    budget: u64,
) -> Result<Vec<Vector>> {
    m.require_usual_chain()?;
    let w = m.weight();
    let radius = normalize_radius(w, d);
    if radius.r as usize >= m.n() || radius.s < m.stats().archimedean_threshold {
        return ball(m, center, radius.normalized, budget);
    }
    let k = k.ok_or_else(|| {
        Error::Validation(format!(
            "S = {} >= S_w needs a member K of W_w(S)",
            radius.s
        ))
    })?;
    let fam = lower_family(w, radius.s)?;
    if !fam.contains(k) {
        return Err(Error::Validation(format!(
            "K is not a maximum member of W_w({})",
            radius.s
        )));
    }
    let low = d_prime(w, m.n(), radius.r);
    let r = radius.r as usize;
    m.space().check(center)?;
    let size = m.space().size_within(budget)?;
    Ok(m.space()
        .vectors(size)?
        .filter(|v| {
            let x = m.space().sub(v, center);
            m.usual_chain_weight(&x) <= low || (x.top() == Some(r) && k.contains(&x[r]))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimalityCheck {
    pub optimal: bool,
    pub size: usize,
    pub diameter: u32,
    pub a_star: u64,
    pub form: StructuralForm,
}

/// Optimal when the diameter is at most `D` and the size reaches `A*(D)`;
/// the structural form records which classified shape the set has, if any.
pub fn is_optimal_anticode(
    m: &MetricSpace,
    set: &[Vector],
    d: u32,
    budget: u64,
) -> Result<OptimalityCheck> {
    m.require_usual_chain()?;
    let report = optimal_anticode_size(m.weight(), m.n(), d)?;
    let dia = diameter(m, set)?;
    let mut sorted = set.to_vec();
    sort_by_rank(m, &mut sorted);
    sorted.dedup();
    let optimal = dia <= d && sorted.len() as u64 == report.a_star;
    let form = structural_form(m, &sorted, d, budget)?;
    Ok(OptimalityCheck {
        optimal,
        size: sorted.len(),
        diameter: dia,
        a_star: report.a_star,
        form,
    })
}

/// Which classified shape, if any, the rank-sorted `set` has.
fn structural_form(m: &MetricSpace, set: &[Vector], d: u32, budget: u64) -> Result<StructuralForm> {
    let w = m.weight();
    let radius = normalize_radius(w, d);
    let below = radius.r as usize >= m.n() || radius.s < m.stats().archimedean_threshold;
    let r = radius.r as usize;
    for x in set {
        if below {
            if ball(m, x, radius.normalized, budget)? == set {
                return Ok(StructuralForm::Ball { center: x.clone() });
            }
            continue;
        }
        let mut k: Vec<FieldElement> = set
            .iter()
            .map(|a| m.space().sub(a, x))
            .filter(|y| y.top() == Some(r))
            .map(|y| y[r])
            .collect();
        k.sort_unstable();
        k.dedup();
        match build_optimal_anticode(m, x, d, Some(&k), budget) {
            Ok(built) if built == set => {
                return Ok(StructuralForm::XPlusY {
                    center: x.clone(),
                    k,
                });
            }
            Ok(_) | Err(Error::Validation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(StructuralForm::None)
}

/// Every classified optimal anticode that contains the origin, each sorted by
/// rank, in lexicographic order of ranks.
pub fn classified_anticodes_through_zero(
    m: &MetricSpace,
    d: u32,
    budget: u64,
) -> Result<Vec<Vec<Vector>>> {
    m.require_usual_chain()?;
    let w = m.weight();
    let radius = normalize_radius(w, d);
    let below = radius.r as usize >= m.n() || radius.s < m.stats().archimedean_threshold;
    let zero = m.space().zero();
    let centers = ball(m, &zero, radius.normalized, budget)?;
    let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
    let members = if below {
        vec![Vec::new()]
    } else {
        lower_family(w, radius.s)?.members
    };
    for x in &centers {
        for k in &members {
            let built = build_optimal_anticode(m, x, d, (!below).then_some(k.as_slice()), budget)?;
            if built.iter().any(|v| v.is_zero()) {
                out.insert(built.iter().map(|v| m.space().rank(v)).collect());
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|ranks| ranks.into_iter().map(|r| m.space().unrank(r)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;

    fn field(q: usize) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn lee_w(q: usize) -> WeightTable {
        WeightTable::lee(&field(q)).unwrap()
    }

    fn vecs(m: &MetricSpace, idx: &[&[usize]]) -> Vec<Vector> {
        idx.iter().map(|i| m.space().vector(i).unwrap()).collect()
    }

    #[test]
    fn radius_normalization() {
        let gap = WeightTable::new(field(5), vec![0, 2, 3, 3, 2]).unwrap();
        let r = normalize_radius(&gap, 1);
        assert_eq!((r.s, r.r, r.normalized), (0, 0, 0));
        let r = normalize_radius(&lee_w(5), 3);
        assert_eq!((r.s, r.r, r.normalized), (1, 1, 3));
        let r = normalize_radius(&lee_w(5), 0);
        assert_eq!((r.s, r.r), (0, 0));
    }

    #[test]
    fn ball_size_examples() {
        assert_eq!(ball_size(&lee_w(5), 2, 3).unwrap().size, 15);
        let h = WeightTable::hamming(&field(3));
        let b = ball_size(&h, 3, 2).unwrap();
        assert_eq!((b.size, b.radius.s, b.radius.r), (9, 0, 2));
        assert_eq!(ball_size(&lee_w(7), 2, 0).unwrap().size, 1);
        let sat = ball_size(&lee_w(5), 2, 4).unwrap();
        assert!(sat.saturated);
        assert_eq!(sat.size, 25);
    }

    #[test]
    fn balls_and_diameters() {
        let h = MetricSpace::chain(WeightTable::hamming(&field(2)), 2).unwrap();
        let b = ball(&h, &h.space().zero(), 1, 100).unwrap();
        assert_eq!(b, vecs(&h, &[&[0, 0], &[1, 0]]));
        let l = MetricSpace::chain(lee_w(5), 2).unwrap();
        assert_eq!(ball(&l, &l.space().zero(), 0, 100).unwrap().len(), 1);
        let b3 = ball(&l, &l.space().zero(), 3, 100).unwrap();
        assert_eq!(b3.len(), 15);
        assert_eq!(diameter(&l, &b3).unwrap(), 4);
        let x = l.space().vector(&[2, 3]).unwrap();
        assert_eq!(ball(&l, &x, 3, 100).unwrap().len(), 15);
        assert_eq!(diameter(&l, &b3[..1]).unwrap(), 0);
        assert!(matches!(diameter(&l, &[]), Err(Error::Domain(_))));
        let h3 = MetricSpace::chain(WeightTable::hamming(&field(3)), 3).unwrap();
        for d in 0..=3 {
            let b = ball(&h3, &h3.space().zero(), d, 100).unwrap();
            assert_eq!(diameter(&h3, &b).unwrap(), d);
        }
    }

    #[test]
    fn product_bound_examples() {
        let h = MetricSpace::chain(WeightTable::hamming(&field(2)), 2).unwrap();
        let a = vecs(&h, &[&[0, 0], &[1, 0]]);
        let b = vecs(&h, &[&[0, 0], &[0, 1]]);
        let r = distance_set_product_bound(&h, &a, &b).unwrap();
        assert!(r.disjoint_distance_sets && r.bound_holds);
        assert_eq!((r.product, r.space_size), (4, 4));
        let z = vecs(&h, &[&[0, 0]]);
        assert!(
            distance_set_product_bound(&h, &z, &z)
                .unwrap()
                .disjoint_distance_sets
        );
        assert!(
            !distance_set_product_bound(&h, &a, &a)
                .unwrap()
                .disjoint_distance_sets
        );
    }

    #[test]
    fn anticode_size_examples() {
        let r = optimal_anticode_size(&lee_w(5), 1, 1).unwrap();
        assert_eq!((r.a_star, r.branch), (2, Branch::AtOrAboveThreshold));
        assert_eq!(optimal_anticode_size(&lee_w(7), 1, 2).unwrap().a_star, 3);
        let h = WeightTable::hamming(&field(2));
        let r = optimal_anticode_size(&h, 3, 2).unwrap();
        assert_eq!((r.a_star, r.branch), (4, Branch::BelowThreshold));
    }

    #[test]
    fn build_examples() {
        let l5 = MetricSpace::chain(lee_w(5), 1).unwrap();
        let one = [field(5).element(1).unwrap()];
        let a = build_optimal_anticode(&l5, &l5.space().zero(), 1, Some(&one), 100).unwrap();
        assert_eq!(a, vecs(&l5, &[&[0], &[1]]));
        assert!(matches!(
            build_optimal_anticode(&l5, &l5.space().zero(), 1, None, 100),
            Err(Error::Validation(_))
        ));
        let two = [field(5).element(2).unwrap()];
        assert!(matches!(
            build_optimal_anticode(&l5, &l5.space().zero(), 1, Some(&two), 100),
            Err(Error::Validation(_))
        ));

        let h = MetricSpace::chain(WeightTable::hamming(&field(2)), 3).unwrap();
        let sub = build_optimal_anticode(&h, &h.space().zero(), 2, None, 100).unwrap();
        assert_eq!(
            sub,
            vecs(&h, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])
        );

        let l7 = MetricSpace::chain(lee_w(7), 1).unwrap();
        let k = [field(7).element(1).unwrap(), field(7).element(2).unwrap()];
        let c = l7.space().vector(&[3]).unwrap();
        let a = build_optimal_anticode(&l7, &c, 2, Some(&k), 100).unwrap();
        assert_eq!(a, vecs(&l7, &[&[3], &[4], &[5]]));
    }

    #[test]
    fn optimality_examples() {
        let h = MetricSpace::chain(WeightTable::hamming(&field(2)), 3).unwrap();
        let b = ball(&h, &h.space().zero(), 2, 100).unwrap();
        let c = is_optimal_anticode(&h, &b, 2, 100).unwrap();
        assert!(c.optimal);
        assert_eq!(
            c.form,
            StructuralForm::Ball {
                center: h.space().zero()
            }
        );

        let l7 = MetricSpace::chain(lee_w(7), 1).unwrap();
        let c = is_optimal_anticode(&l7, &vecs(&l7, &[&[0], &[1], &[2]]), 2, 100).unwrap();
        assert!(c.optimal);
        assert!(matches!(c.form, StructuralForm::XPlusY { .. }));

        let c = is_optimal_anticode(&l7, &vecs(&l7, &[&[0], &[3]]), 3, 100).unwrap();
        assert!(!c.optimal);
        assert!(c.a_star > 2);
    }

    #[test]
    fn classified_sets_through_zero() {
        let l5 = MetricSpace::chain(lee_w(5), 1).unwrap();
        let got = classified_anticodes_through_zero(&l5, 1, 100).unwrap();
        assert_eq!(
            got,
            vec![vecs(&l5, &[&[0], &[1]]), vecs(&l5, &[&[0], &[4]])]
        );
    }

    #[test]
    fn chain_operations_reject_other_orders() {
        let p = crate::poset::Poset::antichain(2).unwrap();
        let m = MetricSpace::new(p, lee_w(5)).unwrap();
        assert_eq!(
            build_optimal_anticode(&m, &m.space().zero(), 1, None, 100),
            Err(Error::NotChain)
        );
    }
}
