//! The `(P,w)`-weight and distance on `F_q^n`, the chain fast path, the
//! support-based variant that breaks the triangle inequality, and the
//! ultrametric scan.

use serde::Serialize;

use crate::algebra::{FieldElement, FieldSpec, Space, Vector};
use crate::error::{Error, Result};
use crate::poset::{CoordSet, Poset};
use crate::weights::{WeightStats, WeightTable};

/// `(F_q^n, d_(P,w))`.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    space: Space,
    poset: Poset,
    weight: WeightTable,
    stats: WeightStats,
    up_strict: Vec<u32>,
    chain_rank: Option<Vec<u32>>,
    usual_chain: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UltrametricWitness {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UltrametricReport {
    pub is_ultrametric: bool,
    /// Least `(z, x, y)` in rank order with `d(x,y) > max{d(x,z), d(z,y)}`.
    pub witness: Option<UltrametricWitness>,
}

impl MetricSpace {
    pub fn new(poset: Poset, weight: WeightTable) -> Result<Self> {
        let n = poset.n();
        let space = Space::new(weight.field().clone(), n)?;
        let stats = weight.stats();
        let up_strict = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && poset.leq(i, j))
                    .fold(0u32, |m, j| m | 1 << j)
            })
            .collect();
        let chain_rank = poset
            .is_chain()
            .then(|| (0..n).map(|j| poset.down_set(j).len() as u32 - 1).collect());
        let usual_chain = poset.is_usual_chain();
        Ok(MetricSpace {
            space,
            poset,
            weight,
            stats,
            up_strict,
            chain_rank,
            usual_chain,
        })
    }

    /// `F_q^n` with the usual chain order.
    pub fn chain(weight: WeightTable, n: usize) -> Result<Self> {
        Self::new(Poset::chain(n)?, weight)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn field(&self) -> &FieldSpec {
        self.space.field()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn weight(&self) -> &WeightTable {
        &self.weight
    }

    pub fn stats(&self) -> &WeightStats {
        &self.stats
    }

    pub fn max_weight(&self) -> u32 {
        self.stats.max_weight
    }

    pub fn is_chain(&self) -> bool {
        self.chain_rank.is_some()
    }

    pub fn is_usual_chain(&self) -> bool {
        self.usual_chain
    }

    pub(crate) fn require_usual_chain(&self) -> Result<()> {
        if self.usual_chain {
            Ok(())
        } else {
            Err(Error::NotChain)
        }
    }

    #[inline]
    fn maximal(&self, ideal: u32) -> u32 {
        let mut m = 0;
        let mut rest = ideal;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.up_strict[i] & ideal == 0 {
                m |= 1 << i;
            }
        }
        m
    }

    /// Definition-level evaluation on the coordinate values produced by `coord`.
    #[inline]
    fn wp_weight_by(&self, support: u32, coord: impl Fn(usize) -> FieldElement) -> u32 {
        let ideal = self.poset.closure_unchecked(CoordSet(support)).0;
        let maximals = self.maximal(ideal);
        let mut total = 0;
        let mut rest = maximals;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += self.weight.get(coord(i));
        }
        total + self.stats.max_weight * (ideal.count_ones() - maximals.count_ones())
    }

    /// `sum_{i in M_u} w(u_i) + M_w * |I_u \ M_u|`.
    pub fn wp_weight(&self, u: &Vector) -> u32 {
        self.wp_weight_by(u.support_mask(), |i| u[i])
    }

    pub fn wp_distance(&self, u: &Vector, v: &Vector) -> u32 {
        let f = self.field();
        let support = u
            .coords()
            .iter()
            .zip(v.coords())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .fold(0u32, |m, (i, _)| m | 1 << i);
        self.wp_weight_by(support, |i| f.sub(u[i], v[i]))
    }

    /// `w(u_i) + rank(i) * M_w` for the top nonzero coordinate `i` of a chain.
    pub fn chain_weight(&self, u: &Vector) -> Result<u32> {
        let rank = self.chain_rank.as_ref().ok_or(Error::NotChain)?;
        if self.usual_chain {
            return Ok(self.usual_chain_weight(u));
        }
        let top = (0..self.n())
            .filter(|&i| !u[i].is_zero())
            .max_by_key(|&i| rank[i]);
        Ok(top.map_or(0, |i| {
            self.weight.get(u[i]) + rank[i] * self.stats.max_weight
        }))
    }

    #[inline]
    pub(crate) fn usual_chain_weight(&self, u: &Vector) -> u32 {
        match u.top() {
            None => 0,
            Some(i) => self.weight.get(u[i]) + i as u32 * self.stats.max_weight,
        }
    }

    #[inline]
    pub(crate) fn usual_chain_distance(&self, u: &Vector, v: &Vector) -> u32 {
        let f = self.field();
        match (0..self.n()).rev().find(|&i| u[i] != v[i]) {
            None => 0,
            Some(i) => self.weight.get(f.sub(u[i], v[i])) + i as u32 * self.stats.max_weight,
        }
    }

    pub fn chain_distance(&self, u: &Vector, v: &Vector) -> Result<u32> {
        if self.usual_chain {
            Ok(self.usual_chain_distance(u, v))
        } else {
            self.chain_weight(&self.space.sub(u, v))
        }
    }

    /// `d_(P,w)(u, v)`, through the chain fast path when the order allows it.
    #[inline]
    pub fn distance(&self, u: &Vector, v: &Vector) -> u32 {
        if self.usual_chain {
            self.usual_chain_distance(u, v)
        } else {
            self.wp_distance(u, v)
        }
    }

    #[inline]
    pub fn weight_of(&self, u: &Vector) -> u32 {
        if self.usual_chain {
            self.usual_chain_weight(u)
        } else {
            self.wp_weight(u)
        }
    }

    /// `sum_{i in supp(u)} w(u_i) + M_w * |I_u \ supp(u)|`. Not a weight in
    /// general; kept for regression tests of the triangle inequality.
    pub fn naive_support_weight(&self, u: &Vector) -> u32 {
        let support = u.support_mask();
        let ideal = self.poset.closure_unchecked(CoordSet(support)).0;
        let on_support: u32 = CoordSet(support)
            .iter()
            .map(|i| self.weight.get(u[i]))
            .sum();
        on_support + self.stats.max_weight * (ideal.count_ones() - support.count_ones())
    }

    /// Scans pairs `(x, y)` with `z = 0`, which covers every triple by
    /// translation invariance.
    pub fn check_ultrametric(&self, budget: u64) -> Result<UltrametricReport> {
        self.chain_weight(&self.space.zero())?;
        let size = self.space.size_within(budget)?;
        let all: Vec<Vector> = self.space.vectors(size)?.collect();
        let weights: Vec<u32> = all.iter().map(|v| self.weight_of(v)).collect();
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                if self.distance(x, y) > weights[i].max(weights[j]) {
                    return Ok(UltrametricReport {
                        is_ultrametric: false,
                        witness: Some(UltrametricWitness {
                            x: x.clone(),
                            y: y.clone(),
                            z: self.space.zero(),
                        }),
                    });
                }
            }
        }
        Ok(UltrametricReport {
            is_ultrametric: true,
            witness: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FieldSpec, DEFAULT_ENUMERATION_BUDGET};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(q: usize) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn lee(q: usize) -> WeightTable {
        WeightTable::lee(&field(q)).unwrap()
    }

    fn vec_of(m: &MetricSpace, idx: &[usize]) -> Vector {
        m.space().vector(idx).unwrap()
    }

    #[test]
    fn wp_weight_examples() {
        let m = MetricSpace::chain(lee(7), 2).unwrap();
        // (-1, 1): maximal element is coordinate 1, coordinate 0 lies below it.
        assert_eq!(m.wp_weight(&vec_of(&m, &[6, 1])), 1 + 3);
        assert_eq!(m.wp_weight(&m.space().zero()), 0);
        let a = MetricSpace::new(
            Poset::antichain(3).unwrap(),
            WeightTable::hamming(&field(2)),
        )
        .unwrap();
        assert_eq!(a.wp_weight(&vec_of(&a, &[1, 0, 1])), 2);
    }

    #[test]
    fn chain_weight_examples() {
        let h = MetricSpace::chain(WeightTable::hamming(&field(2)), 3).unwrap();
        assert_eq!(h.chain_weight(&vec_of(&h, &[1, 0, 1])).unwrap(), 3);
        let l = MetricSpace::chain(lee(5), 2).unwrap();
        assert_eq!(l.chain_weight(&vec_of(&l, &[0, 2])).unwrap(), 4);
        assert_eq!(l.chain_weight(&l.space().zero()).unwrap(), 0);
        let v = MetricSpace::new(
            Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap(),
            WeightTable::hamming(&field(2)),
        )
        .unwrap();
        assert_eq!(v.chain_weight(&v.space().zero()), Err(Error::NotChain));
    }

    #[test]
    fn chain_weight_on_relabelled_chain_matches_definition() {
        let p = Poset::from_covers(3, &[(2, 0), (0, 1)]).unwrap();
        let m = MetricSpace::new(p, lee(5)).unwrap();
        for u in m.space().vectors(125).unwrap() {
            assert_eq!(m.chain_weight(&u).unwrap(), m.wp_weight(&u));
        }
    }

    #[test]
    fn naive_weight_breaks_triangle_at_known_pair() {
        let m = MetricSpace::chain(lee(7), 2).unwrap();
        let u = vec_of(&m, &[1, 0]);
        let v = vec_of(&m, &[6, 1]);
        let s = m.space().add(&u, &v);
        assert_eq!(m.naive_support_weight(&u), 1);
        assert_eq!(m.naive_support_weight(&v), 2);
        assert_eq!(m.naive_support_weight(&s), 4);
        assert!(
            m.naive_support_weight(&s) > m.naive_support_weight(&u) + m.naive_support_weight(&v)
        );
        assert!(m.wp_weight(&s) <= m.wp_weight(&u) + m.wp_weight(&v));
    }

    #[test]
    fn ultrametric_examples() {
        let h = MetricSpace::chain(WeightTable::hamming(&field(3)), 2).unwrap();
        assert!(
            h.check_ultrametric(DEFAULT_ENUMERATION_BUDGET)
                .unwrap()
                .is_ultrametric
        );
        let l5 = MetricSpace::chain(lee(5), 1).unwrap();
        let r = l5.check_ultrametric(DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(!r.is_ultrametric);
        let w = r.witness.unwrap();
        assert_eq!(
            (w.x, w.y, w.z),
            (vec_of(&l5, &[1]), vec_of(&l5, &[4]), vec_of(&l5, &[0]))
        );
        let l7 = MetricSpace::chain(lee(7), 2).unwrap();
        assert!(
            !l7.check_ultrametric(DEFAULT_ENUMERATION_BUDGET)
                .unwrap()
                .is_ultrametric
        );
        assert!(matches!(
            l7.check_ultrametric(10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    fn weights_for(q: usize, rng: &mut ChaCha8Rng) -> Vec<WeightTable> {
        let f = field(q);
        let mut ws = vec![WeightTable::hamming(&f)];
        if f.is_prime_field() {
            ws.push(WeightTable::lee(&f).unwrap());
        }
        for _ in 0..10 {
            ws.push(WeightTable::random(&f, 5, 100_000, rng).unwrap());
        }
        ws
    }

    #[test]
    fn metric_axioms_every_small_poset() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2, 3, 4, 5] {
            for w in weights_for(q, &mut rng) {
                for n in 1..=3 {
                    if (q as u64).pow(n as u32) > 125 {
                        continue;
                    }
                    for p in Poset::all_labeled(n).unwrap() {
                        let m = MetricSpace::new(p, w.clone()).unwrap();
                        let all: Vec<Vector> = m.space().vectors(1000).unwrap().collect();
                        let wt: Vec<u32> = all.iter().map(|u| m.wp_weight(u)).collect();
                        for (i, u) in all.iter().enumerate() {
                            assert_eq!(wt[i] == 0, u.is_zero());
                            assert_eq!(wt[i], m.wp_weight(&m.space().neg(u)));
                            if m.is_chain() {
                                assert_eq!(m.chain_weight(u).unwrap(), wt[i]);
                            }
                            for (j, v) in all.iter().enumerate() {
                                let s = m.space().add(u, v);
                                assert!(m.wp_weight(&s) <= wt[i] + wt[j]);
                            }
                        }
                        let t = &all[rng.gen_range(0..all.len())];
                        for u in all.iter().take(20) {
                            for v in all.iter().rev().take(20) {
                                let d = m.wp_distance(u, v);
                                let ut = m.space().add(u, t);
                                let vt = m.space().add(v, t);
                                assert_eq!(m.wp_distance(&ut, &vt), d);
                                assert_eq!(m.distance(u, v), d);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn naive_weight_agrees_when_max_weight_at_most_twice_min() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in [3, 4, 5, 7] {
            for w in weights_for(q, &mut rng) {
                let st = w.stats();
                if st.max_weight > 2 * st.min_nonzero_weight {
                    continue;
                }
                let m = MetricSpace::chain(w, 2).unwrap();
                let all: Vec<Vector> = m.space().vectors(1000).unwrap().collect();
                for u in &all {
                    for v in &all {
                        let s = m.space().add(u, v);
                        assert!(
                            m.naive_support_weight(&s)
                                <= m.naive_support_weight(u) + m.naive_support_weight(v)
                        );
                    }
                }
            }
        }
    }
}
