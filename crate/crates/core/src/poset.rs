//! Partial orders on the coordinate set `{0, .., n-1}` and their ideals.
//!
//! The order is kept transitively closed as bit masks: `down[j]` holds every
//! `i` with `i <= j`, so ideal closure is a union of masks.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Vector, MAX_DIMENSION};
use crate::error::{Error, Result};

/// A set of coordinates, as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordSet(pub u32);

impl CoordSet {
    pub const EMPTY: CoordSet = CoordSet(0);

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: CoordSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 >> i & 1 == 1)
    }
}

impl FromIterator<usize> for CoordSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = CoordSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Serialize for CoordSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetKind {
    Chain,
    Antichain,
    /// Pairs `(i, j)` meaning `i < j`; closed transitively.
    Covers(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    down: Vec<u32>,
}

/// `supp(u)`, the ideal it generates and that ideal's maximal elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SupportIdeal {
    pub support: CoordSet,
    pub ideal: CoordSet,
    pub maximals: CoordSet,
}

impl Poset {
    pub fn make(n: usize, kind: PosetKind) -> Result<Self> {
        match kind {
            PosetKind::Chain => Self::chain(n),
            PosetKind::Antichain => Self::antichain(n),
            PosetKind::Covers(c) => Self::from_covers(n, &c),
        }
    }

    /// The usual chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Result<Self> {
        check_size(n)?;
        let down = (0..n).map(|j| low_mask(j + 1)).collect();
        Ok(Poset { n, down })
    }

    pub fn antichain(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Poset {
            n,
            down: (0..n).map(|j| 1u32 << j).collect(),
        })
    }

    /// Transitive closure of the given strict relations; fails on cycles.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self> {
        check_size(n)?;
        let mut down: Vec<u32> = (0..n).map(|j| 1u32 << j).collect();
        for &(i, j) in covers {
            if i >= n || j >= n {
                return Err(Error::InvalidPoset(format!(
                    "relation ({i},{j}) outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidPoset(format!("relation ({i},{i}) is a loop")));
            }
            down[j] |= 1 << i;
        }
        // Warshall on bit rows: if k <= j then everything below k is below j.
        for k in 0..n {
            for j in 0..n {
                if down[j] >> k & 1 == 1 {
                    down[j] |= down[k];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && down[j] >> i & 1 == 1 && down[i] >> j & 1 == 1 {
                    return Err(Error::InvalidPoset(format!(
                        "relations form a cycle through {i} and {j}"
                    )));
                }
            }
        }
        Ok(Poset { n, down })
    }

    /// Every partial order on `n` labelled points. Exponential; meant for `n <= 4`.
    pub fn all_labeled(n: usize) -> Result<Vec<Poset>> {
        if n > 5 {
            return Err(Error::Domain(format!(
                "refusing to list all posets on {n} points"
            )));
        }
        check_size(n)?;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let mut out = Vec::new();
        for mask in 0u64..1 << pairs.len() {
            let mut down: Vec<u32> = (0..n).map(|j| 1u32 << j).collect();
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    down[j] |= 1 << i;
                }
            }
            let antisymmetric = pairs
                .iter()
                .all(|&(i, j)| !(down[j] >> i & 1 == 1 && down[i] >> j & 1 == 1));
            // transitive: i <= k <= j implies i <= j
            let transitive = (0..n).all(|j| {
                (0..n)
                    .filter(|&k| down[j] >> k & 1 == 1)
                    .all(|k| down[k] & !down[j] == 0)
            });
            if antisymmetric && transitive {
                out.push(Poset { n, down });
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.down[j] >> i & 1 == 1
    }

    /// `{i : i <= j}`.
    pub fn down_set(&self, j: usize) -> CoordSet {
        CoordSet(self.down[j])
    }

    pub fn is_chain(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.leq(i, j) || self.leq(j, i)))
    }

    pub fn is_usual_chain(&self) -> bool {
        (0..self.n).all(|j| self.down[j] == low_mask(j + 1))
    }

    /// For a chain, its elements from bottom to top.
    pub fn chain_order(&self) -> Option<Vec<usize>> {
        if !self.is_chain() {
            return None;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&j| self.down[j].count_ones());
        Some(order)
    }

    /// Cover pairs `(i, j)`: `i < j` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..self.n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let between =
                    (0..self.n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn check_members(&self, x: CoordSet) -> Result<()> {
        if x.0 & !low_mask(self.n) != 0 {
            return Err(Error::Validation(format!(
                "coordinate set {x} not contained in 0..{}",
                self.n
            )));
        }
        Ok(())
    }

    /// `<X>`, the smallest ideal containing `X`.
    pub fn ideal_closure(&self, x: CoordSet) -> Result<CoordSet> {
        self.check_members(x)?;
        Ok(self.closure_unchecked(x))
    }

    #[inline]
    pub(crate) fn closure_unchecked(&self, x: CoordSet) -> CoordSet {
        CoordSet(x.iter().fold(0, |m, j| m | self.down[j]))
    }

    /// Maximal elements of `X` under the order.
    #[inline]
    pub fn maximal(&self, x: CoordSet) -> CoordSet {
        x.iter()
            .filter(|&i| x.iter().all(|j| j == i || !self.leq(i, j)))
            .collect()
    }

    pub fn is_ideal(&self, x: CoordSet) -> bool {
        self.closure_unchecked(x) == x
    }

    pub fn support_ideal(&self, u: &Vector) -> Result<SupportIdeal> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: u.len(),
            });
        }
        let support = CoordSet(u.support_mask());
        let ideal = self.closure_unchecked(support);
        Ok(SupportIdeal {
            support,
            ideal,
            maximals: self.maximal(ideal),
        })
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::InvalidPoset(format!(
            "size {n} outside 1..={MAX_DIMENSION}"
        )));
    }
    Ok(())
}

fn low_mask(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FieldSpec, Space};

    fn set(items: &[usize]) -> CoordSet {
        items.iter().copied().collect()
    }

    fn v_shape() -> Poset {
        Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn constructors() {
        let c = Poset::make(3, PosetKind::Chain).unwrap();
        assert!(c.leq(0, 1) && c.leq(1, 2) && c.leq(0, 2) && !c.leq(2, 0));
        assert!(c.is_chain() && c.is_usual_chain());
        let a = Poset::make(3, PosetKind::Antichain).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| a.leq(i, j) == (i == j))));
        let v = v_shape();
        assert!(!v.is_chain());
        assert!(!v.leq(0, 1) && !v.leq(1, 0));
    }

    #[test]
    fn cycles_and_loops_are_rejected() {
        assert!(matches!(
            Poset::from_covers(3, &[(0, 1), (1, 2), (2, 0)]),
            Err(Error::InvalidPoset(_))
        ));
        assert!(Poset::from_covers(2, &[(1, 1)]).is_err());
        assert!(Poset::from_covers(2, &[(0, 5)]).is_err());
    }

    #[test]
    fn closure_examples() {
        let c = Poset::chain(3).unwrap();
        assert_eq!(c.ideal_closure(set(&[2])).unwrap(), set(&[0, 1, 2]));
        let a = Poset::antichain(3).unwrap();
        assert_eq!(a.ideal_closure(set(&[1])).unwrap(), set(&[1]));
        assert_eq!(v_shape().ideal_closure(set(&[2])).unwrap(), set(&[0, 1, 2]));
        assert!(c.ideal_closure(set(&[3])).is_err());
    }

    #[test]
    fn support_ideal_examples() {
        let space = Space::new(FieldSpec::new(2).unwrap(), 3).unwrap();
        let u = space.vector(&[1, 0, 1]).unwrap();
        let s = Poset::chain(3).unwrap().support_ideal(&u).unwrap();
        assert_eq!(
            (s.support, s.ideal, s.maximals),
            (set(&[0, 2]), set(&[0, 1, 2]), set(&[2]))
        );
        let s = Poset::antichain(3).unwrap().support_ideal(&u).unwrap();
        assert_eq!(
            (s.support, s.ideal, s.maximals),
            (set(&[0, 2]), set(&[0, 2]), set(&[0, 2]))
        );
        let s = v_shape().support_ideal(&space.zero()).unwrap();
        assert!(s.support.is_empty() && s.ideal.is_empty() && s.maximals.is_empty());
    }

    #[test]
    fn labelled_poset_counts() {
        // OEIS A001035: 1, 3, 19, 219
        let counts: Vec<usize> = (1..=4)
            .map(|n| Poset::all_labeled(n).unwrap().len())
            .collect();
        assert_eq!(counts, [1, 3, 19, 219]);
        let chains = Poset::all_labeled(4)
            .unwrap()
            .into_iter()
            .filter(Poset::is_chain)
            .count();
        assert_eq!(chains, 24);
    }

    #[test]
    fn support_ideal_invariants_all_small_posets() {
        for n in 1..=4 {
            let space = Space::new(FieldSpec::new(2).unwrap(), n).unwrap();
            for p in Poset::all_labeled(n).unwrap() {
                for x in 0u32..1 << n {
                    let x = CoordSet(x);
                    let ideal = p.ideal_closure(x).unwrap();
                    assert!(x.is_subset(ideal));
                    assert_eq!(p.ideal_closure(ideal).unwrap(), ideal);
                    assert!(p.is_ideal(ideal));
                    for y in 0u32..1 << n {
                        if x.is_subset(CoordSet(y)) {
                            assert!(ideal.is_subset(p.ideal_closure(CoordSet(y)).unwrap()));
                        }
                    }
                }
                for u in space.vectors(1 << n).unwrap() {
                    let s = p.support_ideal(&u).unwrap();
                    assert_eq!(s.ideal, p.ideal_closure(s.support).unwrap());
                    assert!(s.maximals.is_subset(s.ideal));
                    assert!(s.maximals.is_subset(s.support));
                    for m in s.maximals.iter() {
                        assert!(s.ideal.iter().all(|j| j == m || !p.leq(m, j)));
                    }
                    if p.is_usual_chain() && !u.is_zero() {
                        assert_eq!(s.maximals, set(&[u.top().unwrap()]));
                    }
                }
            }
        }
    }

    #[test]
    fn chain_order_of_relabelled_chain() {
        let p = Poset::from_covers(3, &[(2, 0), (0, 1)]).unwrap();
        assert!(p.is_chain() && !p.is_usual_chain());
        assert_eq!(p.chain_order(), Some(vec![2, 0, 1]));
        assert_eq!(p.covers(), vec![(2, 0), (0, 1)]);
    }
}
