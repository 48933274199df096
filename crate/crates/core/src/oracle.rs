//! Exhaustive reference computations. Nothing here uses the closed forms;
//! weights come straight from the `(P,w)` definition and anticodes from an
//! exact maximum-clique search.

use crate::algebra::Vector;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, UltrametricWitness};

/// Default vertex budget for [`brute_a_star`].
pub const DEFAULT_CLIQUE_BUDGET: u64 = 125;
/// Default vertex budget for [`brute_optimal_anticodes`].
pub const DEFAULT_LISTING_BUDGET: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

/// An undirected graph for exact maximum-clique search.
#[derive(Clone, Debug)]
pub struct CliqueProblem {
    n: usize,
    adj: Vec<Bits>,
}

impl CliqueProblem {
    /// `edge` is consulted once per unordered pair `i < j`.
    pub fn new(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Bits::empty(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    adj[i].set(j);
                    adj[j].set(i);
                }
            }
        }
        CliqueProblem { n, adj }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].0[j / 64] >> (j % 64) & 1 == 1
    }

    /// Greedy colouring of `p`; vertices come out grouped by ascending colour.
    fn colour_sort(&self, p: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                uncoloured.clear(v);
                q.and_not_assign(&self.adj[v]);
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand_best(&self, r: &mut Vec<usize>, mut p: Bits, best: &mut Vec<usize>) {
        let (order, colours) = self.colour_sort(&p);
        for k in (0..order.len()).rev() {
            if r.len() + colours[k] <= best.len() {
                return;
            }
            let v = order[k];
            r.push(v);
            let np = p.and(&self.adj[v]);
            if np.is_empty() {
                if r.len() > best.len() {
                    *best = r.clone();
                }
            } else {
                self.expand_best(r, np, best);
            }
            r.pop();
            p.clear(v);
        }
    }

    fn expand_all(
        &self,
        r: &mut Vec<usize>,
        mut p: Bits,
        target: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if r.len() == target {
            out.push(r.clone());
            return;
        }
        let (order, colours) = self.colour_sort(&p);
        for k in (0..order.len()).rev() {
            if r.len() + colours[k] < target {
                return;
            }
            let v = order[k];
            r.push(v);
            self.expand_all(r, p.and(&self.adj[v]), target, out);
            r.pop();
            p.clear(v);
        }
    }

    /// A maximum clique, sorted.
    pub fn maximum_clique(&self) -> Vec<usize> {
        let mut best = Vec::new();
        if self.n > 0 {
            self.expand_best(&mut Vec::new(), Bits::full(self.n), &mut best);
        }
        best.sort_unstable();
        best
    }

    pub fn clique_number(&self) -> usize {
        self.maximum_clique().len()
    }

    /// Every maximum clique, each sorted, in lexicographic order.
    pub fn all_maximum_cliques(&self) -> Vec<Vec<usize>> {
        let target = self.clique_number();
        let mut out = Vec::new();
        self.expand_all(&mut Vec::new(), Bits::full(self.n), target, &mut out);
        out.iter_mut().for_each(|c| c.sort_unstable());
        out.sort();
        out
    }
}

fn all_vectors(m: &MetricSpace, budget: u64) -> Result<Vec<Vector>> {
    let size = m.space().size_within(budget)?;
    Ok(m.space().vectors(size)?.collect())
}

/// `|B(0, D)|` by counting vectors whose `(P,w)`-weight is at most `D`.
pub fn brute_ball_size(m: &MetricSpace, d: u32, budget: u64) -> Result<u64> {
    let size = m.space().size_within(budget)?;
    Ok(m.space()
        .vectors(size)?
        .filter(|v| m.wp_weight(v) <= d)
        .count() as u64)
}

/// Nonzero vectors of weight at most `D` form the neighbourhood of 0;
/// every anticode through 0 lives there.
fn anticode_graph(m: &MetricSpace, d: u32, budget: u64) -> Result<(Vec<Vector>, CliqueProblem)> {
    let size = m.space().size_within(budget)?;
    let vertices: Vec<Vector> = m
        .space()
        .vectors(size)?
        .filter(|v| !v.is_zero() && m.wp_weight(v) <= d)
        .collect();
    let g = CliqueProblem::new(vertices.len(), |i, j| {
        m.wp_distance(&vertices[i], &vertices[j]) <= d
    });
    Ok((vertices, g))
}

/// `A*(D)` as one plus the clique number of the neighbourhood of 0.
pub fn brute_a_star(m: &MetricSpace, d: u32, budget: u64) -> Result<u64> {
    let (_, g) = anticode_graph(m, d, budget)?;
    Ok(1 + g.clique_number() as u64)
}

/// Every maximum anticode of diameter at most `D` that contains 0, each
/// sorted by rank, in lexicographic order of ranks.
pub fn brute_optimal_anticodes(m: &MetricSpace, d: u32, budget: u64) -> Result<Vec<Vec<Vector>>> {
    let (vertices, g) = anticode_graph(m, d, budget)?;
    let space = m.space();
    let mut out: Vec<Vec<Vector>> = g
        .all_maximum_cliques()
        .into_iter()
        .map(|c| {
            let mut set: Vec<Vector> = c.into_iter().map(|i| vertices[i].clone()).collect();
            set.push(space.zero());
            set.sort_by_key(|v| space.rank(v));
            set
        })
        .collect();
    out.sort_by_key(|set| set.iter().map(|v| space.rank(v)).collect::<Vec<_>>());
    Ok(out)
}

/// First triple `(x, y, z)` in rank order (`x` slowest) with
/// `d(x,y) > max{d(x,z), d(z,y)}`.
pub fn brute_ultrametric_violation(
    m: &MetricSpace,
    budget: u64,
) -> Result<Option<UltrametricWitness>> {
    let all = all_vectors(m, budget)?;
    let n = all.len();
    let dist: Vec<u32> = (0..n * n)
        .map(|k| m.wp_distance(&all[k / n], &all[k % n]))
        .collect();
    for x in 0..n {
        for y in 0..n {
            let dxy = dist[x * n + y];
            for z in 0..n {
                if dxy > dist[x * n + z].max(dist[z * n + y]) {
                    return Ok(Some(UltrametricWitness {
                        x: all[x].clone(),
                        y: all[y].clone(),
                        z: all[z].clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Minimum pairwise `(P,w)`-distance.
pub fn brute_min_distance(m: &MetricSpace, words: &[Vector]) -> Result<u32> {
    if words.len() < 2 {
        return Err(Error::Domain(
            "minimum distance needs at least two words".into(),
        ));
    }
    let mut best = u32::MAX;
    for (i, u) in words.iter().enumerate() {
        for v in &words[i + 1..] {
            best = best.min(m.wp_distance(u, v));
        }
    }
    Ok(best)
}

/// Largest `r` for which the `r`-balls around distinct words are disjoint.
pub fn brute_packing_radius(m: &MetricSpace, words: &[Vector], budget: u64) -> Result<u32> {
    if words.len() < 2 {
        return Err(Error::Domain(
            "packing radius needs at least two words".into(),
        ));
    }
    let all = all_vectors(m, budget)?;
    let mut collide = u32::MAX;
    for (i, u) in words.iter().enumerate() {
        for v in &words[i + 1..] {
            let meet = all
                .iter()
                .map(|x| m.wp_distance(u, x).max(m.wp_distance(v, x)))
                .min()
                .unwrap();
            collide = collide.min(meet);
        }
    }
    Ok(collide - 1)
}
