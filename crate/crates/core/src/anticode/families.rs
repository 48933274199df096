//! The extremal subsets `W_w(S)` and `W^w(S)` of `F_q`.
//!
//! Both families are found by exhaustive backtracking over at most `q`
//! candidates with a size cutoff, so every maximum-cardinality member is listed.

use serde::Serialize;

use crate::algebra::FieldElement;
use crate::error::{Error, Result};
use crate::weights::WeightTable;

/// All maximum-cardinality subsets satisfying a family's conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub level: u32,
    pub cardinality: usize,
    /// Sorted by element index; each member is itself sorted.
    pub members: Vec<Vec<FieldElement>>,
}

impl Family {
    pub fn contains(&self, set: &[FieldElement]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        self.members.contains(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WFamilies {
    pub level: u32,
    /// `W_w(S)`; `None` when `S` is outside `[S_w, M_w]`.
    pub lower: Option<Family>,
    /// `W^w(S)`; `None` when `S` is not a weight in `[m_w, M_w]`.
    pub upper: Option<Family>,
}

/// `W_w(S)`: sets `K` with `S_w <= w(a) <= S` for `a` in `K`, `w(a - b) <= S`
/// whenever `w(b) < S_w`, and `w(a - b) <= S` inside `K`.
pub fn lower_family(w: &WeightTable, s: u32) -> Result<Family> {
    let st = w.stats();
    if s < st.archimedean_threshold || s > st.max_weight {
        return Err(Error::Domain(format!(
            "lower family needs {} <= S <= {}, got S = {s}",
            st.archimedean_threshold, st.max_weight
        )));
    }
    let f = w.field();
    let low: Vec<FieldElement> = f
        .elements()
        .filter(|&b| w.get(b) < st.archimedean_threshold)
        .collect();
    let candidates: Vec<FieldElement> = f
        .elements()
        .filter(|&a| {
            let wa = w.get(a);
            wa >= st.archimedean_threshold
                && wa <= s
                && low.iter().all(|&b| w.get(f.sub(a, b)) <= s)
        })
        .collect();
    let compatible = |a: FieldElement, b: FieldElement| w.get(f.sub(a, b)) <= s;
    let (cardinality, members) = maximum_sets(&candidates, compatible, |_| true);
    Ok(Family {
        level: s,
        cardinality,
        members,
    })
}

/// `W^w(S)`: sets whose distinct elements differ by weight at least `S`, with
/// at least one difference of weight exactly `S`.
pub fn upper_family(w: &WeightTable, s: u32) -> Result<Family> {
    let st = w.stats();
    if s < st.min_nonzero_weight || s > st.max_weight || !w.in_image(s) {
        return Err(Error::Domain(format!(
            "upper family needs S in Im(w) with {} <= S <= {}, got S = {s}",
            st.min_nonzero_weight, st.max_weight
        )));
    }
    let f = w.field();
    let candidates: Vec<FieldElement> = f.elements().collect();
    let compatible = |a: FieldElement, b: FieldElement| w.get(f.sub(a, b)) >= s;
    let has_exact = |set: &[FieldElement]| {
        set.iter()
            .enumerate()
            .any(|(i, &a)| set[i + 1..].iter().any(|&b| w.get(f.sub(a, b)) == s))
    };
    let (cardinality, members) = maximum_sets(&candidates, compatible, has_exact);
    Ok(Family {
        level: s,
        cardinality,
        members,
    })
}

pub fn w_families(w: &WeightTable, s: u32) -> Result<WFamilies> {
    let lower = lower_family(w, s).ok();
    let upper = upper_family(w, s).ok();
    if lower.is_none() && upper.is_none() {
        return Err(Error::Domain(format!(
            "no W-family is defined at level S = {s}"
        )));
    }
    Ok(WFamilies {
        level: s,
        lower,
        upper,
    })
}

/// Largest subsets of `candidates` that are pairwise `compatible` and satisfy
/// `accept`, with all of them listed. The empty set counts when nothing else does.
fn maximum_sets<C, A>(
    candidates: &[FieldElement],
    compatible: C,
    accept: A,
) -> (usize, Vec<Vec<FieldElement>>)
where
    C: Fn(FieldElement, FieldElement) -> bool,
    A: Fn(&[FieldElement]) -> bool,
{
    struct Search<'a, C, A> {
        candidates: &'a [FieldElement],
        compatible: C,
        accept: A,
        best: usize,
        found: Vec<Vec<FieldElement>>,
    }

    impl<C, A> Search<'_, C, A>
    where
        C: Fn(FieldElement, FieldElement) -> bool,
        A: Fn(&[FieldElement]) -> bool,
    {
        fn run(&mut self, current: &mut Vec<FieldElement>, allowed: &[usize]) {
            if (self.accept)(current) {
                if current.len() > self.best {
                    self.best = current.len();
                    self.found.clear();
                }
                if current.len() == self.best {
                    self.found.push(current.clone());
                }
            }
            for (pos, &i) in allowed.iter().enumerate() {
                if current.len() + allowed.len() - pos < self.best {
                    return;
                }
                let a = self.candidates[i];
                let next: Vec<usize> = allowed[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&j| (self.compatible)(a, self.candidates[j]))
                    .collect();
                current.push(a);
                self.run(current, &next);
                current.pop();
            }
        }
    }

    let mut search = Search {
        candidates,
        compatible,
        accept,
        best: 0,
        found: Vec::new(),
    };
    let all: Vec<usize> = (0..candidates.len()).collect();
    search.run(&mut Vec::new(), &all);
    let mut found = search.found;
    found.iter_mut().for_each(|m| m.sort_unstable());
    found.sort();
    (search.best, found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;

    fn els(f: &FieldSpec, idx: &[usize]) -> Vec<FieldElement> {
        idx.iter().map(|&i| f.element(i).unwrap()).collect()
    }

    #[test]
    fn lee_five_lower_level_one() {
        let f = FieldSpec::new(5).unwrap();
        let w = WeightTable::lee(&f).unwrap();
        let fam = lower_family(&w, 1).unwrap();
        assert_eq!(fam.cardinality, 1);
        assert_eq!(fam.members, vec![els(&f, &[1]), els(&f, &[4])]);
    }

    #[test]
    fn lee_seven_level_two() {
        let f = FieldSpec::new(7).unwrap();
        let w = WeightTable::lee(&f).unwrap();
        let lower = lower_family(&w, 2).unwrap();
        assert_eq!(lower.cardinality, 2);
        assert!(lower.contains(&els(&f, &[1, 2])));
        let upper = upper_family(&w, 2).unwrap();
        assert_eq!(upper.cardinality, 3);
        assert!(upper.contains(&els(&f, &[0, 2, 4])));
        assert_eq!(lower_family(&w, 1).unwrap().cardinality, 1);
    }

    #[test]
    fn hamming_upper_is_whole_field() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::new(q).unwrap();
            let w = WeightTable::hamming(&f);
            let upper = upper_family(&w, 1).unwrap();
            assert_eq!(upper.cardinality, q);
            assert_eq!(upper.members, vec![f.elements().collect::<Vec<_>>()]);
        }
    }

    #[test]
    fn level_range_is_enforced() {
        let f = FieldSpec::new(5).unwrap();
        let w = WeightTable::new(f.clone(), vec![0, 2, 3, 3, 2]).unwrap();
        assert!(matches!(upper_family(&w, 1), Err(Error::Domain(_))));
        assert!(matches!(lower_family(&w, 4), Err(Error::Domain(_))));
        let fams = w_families(&w, 3).unwrap();
        assert!(fams.upper.is_some());
        assert!(matches!(w_families(&w, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn members_satisfy_their_conditions() {
        let f = FieldSpec::new(9).unwrap();
        let w = WeightTable::new(f.clone(), vec![0, 1, 1, 2, 3, 3, 2, 3, 3]).unwrap();
        let st = w.stats();
        for s in st.archimedean_threshold..=st.max_weight {
            let fam = lower_family(&w, s).unwrap();
            for m in &fam.members {
                assert_eq!(m.len(), fam.cardinality);
                for &a in m {
                    assert!(w.get(a) >= st.archimedean_threshold && w.get(a) <= s);
                    for b in f
                        .elements()
                        .filter(|&b| w.get(b) < st.archimedean_threshold)
                    {
                        assert!(w.get(f.sub(a, b)) <= s);
                    }
                    for &b in m {
                        assert!(w.get(f.sub(a, b)) <= s);
                    }
                }
            }
        }
        for &s in st.image.iter().filter(|&&s| s > 0) {
            let fam = upper_family(&w, s).unwrap();
            assert!(fam.cardinality >= 2);
            for m in &fam.members {
                assert_eq!(m.len(), fam.cardinality);
                let mut exact = false;
                for (i, &a) in m.iter().enumerate() {
                    for &b in &m[i + 1..] {
                        assert!(w.get(f.sub(a, b)) >= s);
                        exact |= w.get(f.sub(a, b)) == s;
                    }
                }
                assert!(exact);
            }
        }
    }
}
