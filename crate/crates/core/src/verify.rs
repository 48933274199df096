//! The verification sweep: every closed form and classification result,
//! checked against the exhaustive oracles on small instances.
//!
//! Checks are named by descriptive ids. All randomness is derived from the
//! configured seed, so a report is a pure function of its config.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, FieldSpec, Vector};
use crate::anticode::{
    ball, ball_size, classified_anticodes_through_zero, diameter, distance_set_product_bound,
    lower_family, normalize_radius, optimal_anticode_size, upper_family,
};
use crate::codes::{
    construct_mds, construct_threshold_code, criterion_levels, diameter_perfect_criterion,
    packing_ball_size, Code, CriterionCase,
};
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::oracle::{
    brute_a_star, brute_ball_size, brute_min_distance, brute_optimal_anticodes,
    brute_ultrametric_violation,
};
use crate::poset::{CoordSet, Poset};
use crate::weights::WeightTable;

/// Every check id, in report order.
pub const CHECK_IDS: &[&str] = &[
    "field-axioms",
    "weight-axioms",
    "poset-ideals",
    "wp-weight-triangle",
    "chain-weight-fast-path",
    "naive-support-weight-regression",
    "naive-support-weight-recovery",
    "distance-set-product-bound",
    "radius-normalization",
    "ball-size-formula",
    "minimum-distance-structure",
    "packing-radius",
    "mds-iff-perfect",
    "anticode-upper-bound",
    "d-optimality-equivalence",
    "subspace-ball",
    "singleton-equivalence",
    "mds-diameter-perfect",
    "power-of-q-classification",
    "anticode-size-formula",
    "anticode-classification",
    "diameter-perfect-criterion",
    "prime-field-strictness",
    "ultrametric-iff-non-archimedean",
    "ball-diameter-characterization",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Field orders for the main sweep.
    pub fields: Vec<usize>,
    pub max_n: usize,
    /// Random valid weight tables per field, on top of Hamming and Lee.
    pub random_weights: usize,
    /// Largest value a random weight may take.
    pub random_max_value: u32,
    pub seed: u64,
    /// Extra weight tables, for instance loaded from files.
    pub extra_weights: Vec<Vec<u32>>,
    pub enumeration_budget: u64,
    /// `q^n` limit for `A*` clique searches.
    pub clique_budget: u64,
    /// `q^n` limit for listing every optimal anticode.
    pub listing_budget: u64,
    /// `q^n` limit for pair-scan metric checks.
    pub pair_budget: u64,
    /// `q^n` limit for triple-scan ultrametric checks.
    pub triple_budget: u64,
    /// `q^n` limit for ball diameters over non-chain orders.
    pub non_chain_budget: u64,
    pub random_codes: usize,
    pub max_code_size: usize,
    /// `q^n` limit for random code checks.
    pub code_budget: u64,
    pub mds_fields: Vec<usize>,
    pub random_non_mds_codes: usize,
    pub product_pairs: usize,
    pub prime_fields: Vec<usize>,
    pub equality_fields: Vec<usize>,
    pub equality_max_value: u32,
    /// Ambient dimension of the threshold codes built for equality instances.
    pub equality_n: usize,
    /// Report the naive-weight counterexample as an expected failure; when off the check is skipped.
    pub naive_weight_regression: bool,
    /// Run only these checks; empty means all.
    pub checks: Vec<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            fields: vec![2, 3, 4, 5, 7],
            max_n: 4,
            random_weights: 20,
            random_max_value: 5,
            seed: 1,
            extra_weights: Vec::new(),
            enumeration_budget: 10_000,
            clique_budget: 125,
            listing_budget: 64,
            pair_budget: 343,
            triple_budget: 343,
            non_chain_budget: 81,
            random_codes: 500,
            max_code_size: 16,
            code_budget: 625,
            mds_fields: vec![2, 3, 5],
            random_non_mds_codes: 100,
            product_pairs: 1000,
            prime_fields: vec![2, 3, 5, 7],
            equality_fields: vec![4, 8, 9],
            equality_max_value: 4,
            equality_n: 2,
            naive_weight_regression: true,
            checks: Vec::new(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let budgets = [
            self.enumeration_budget,
            self.clique_budget,
            self.listing_budget,
            self.pair_budget,
            self.triple_budget,
            self.non_chain_budget,
            self.code_budget,
        ];
        if budgets.contains(&0) {
            return Err(Error::Validation("every budget must be positive".into()));
        }
        if self.max_n == 0 || self.equality_n == 0 {
            return Err(Error::Validation("dimensions must be positive".into()));
        }
        if self.max_code_size < 2 || self.random_max_value == 0 {
            return Err(Error::Validation(
                "max_code_size must be at least 2 and random_max_value positive".into(),
            ));
        }
        for q in self
            .fields
            .iter()
            .chain(&self.mds_fields)
            .chain(&self.prime_fields)
            .chain(&self.equality_fields)
        {
            FieldSpec::new(*q)?;
        }
        for id in &self.checks {
            if !CHECK_IDS.contains(&id.as_str()) {
                return Err(Error::Validation(format!("unknown check id {id:?}")));
            }
        }
        for values in &self.extra_weights {
            WeightTable::new(FieldSpec::new(values.len())?, values.clone())?;
        }
        Ok(())
    }

    fn wants(&self, id: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// A deliberately broken variant failed where it should.
    ExpectedFailure,
}

impl Status {
    pub fn is_ok(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub status: Status,
    pub instances: u64,
    pub skipped: u64,
    pub counterexamples: u64,
    /// The first few counterexamples, in discovery order.
    pub examples: Vec<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub config: SweepConfig,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

const MAX_EXAMPLES: usize = 5;

struct Tally {
    id: &'static str,
    instances: u64,
    skipped: u64,
    failures: u64,
    examples: Vec<String>,
    note: Option<String>,
}

impl Tally {
    fn new(id: &'static str) -> Self {
        Tally {
            id,
            instances: 0,
            skipped: 0,
            failures: 0,
            examples: Vec::new(),
            note: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(describe());
            }
        }
    }

    /// Unwraps a result; budget overruns count as skips, other errors as failures.
    fn guard<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(Error::BudgetExceeded { .. }) => {
                self.skipped += 1;
                None
            }
            Err(e) => {
                self.check(false, || format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn finish(self) -> CheckOutcome {
        let status = if self.failures > 0 {
            Status::Fail
        } else if self.instances == 0 && self.skipped > 0 {
            Status::Skipped
        } else {
            Status::Pass
        };
        CheckOutcome {
            id: self.id.to_string(),
            status,
            instances: self.instances,
            skipped: self.skipped,
            counterexamples: self.failures,
            examples: self.examples,
            note: self.note,
        }
    }
}

/// A weight table with a short provenance label.
#[derive(Clone, Debug)]
pub struct LabelledWeight {
    pub label: String,
    pub table: WeightTable,
}

impl LabelledWeight {
    fn describe(&self) -> String {
        format!(
            "q={} w={:?} ({})",
            self.table.field().q(),
            self.table.values(),
            self.label
        )
    }
}

fn mix(seed: u64, tag: &str, q: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in tag.bytes().chain((q as u64).to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// A generator determined by the seed, a tag naming its use, and a field order.
pub fn rng_for(seed: u64, tag: &str, q: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, tag, q))
}

/// Hamming, Lee (prime `q`), the configured extras for this `q`, then
/// `random_weights` seeded random tables. Duplicates are dropped.
pub fn sweep_weights(cfg: &SweepConfig, q: usize) -> Result<Vec<LabelledWeight>> {
    let f = FieldSpec::new(q)?;
    let mut out = vec![LabelledWeight {
        label: "hamming".into(),
        table: WeightTable::hamming(&f),
    }];
    if f.is_prime_field() {
        out.push(LabelledWeight {
            label: "lee".into(),
            table: WeightTable::lee(&f)?,
        });
    }
    for (i, values) in cfg
        .extra_weights
        .iter()
        .enumerate()
        .filter(|(_, v)| v.len() == q)
    {
        out.push(LabelledWeight {
            label: format!("extra#{i}"),
            table: WeightTable::new(f.clone(), values.clone())?,
        });
    }
    let mut rng = rng_for(cfg.seed, "weights", q);
    for i in 0..cfg.random_weights {
        if let Some(table) = WeightTable::random(&f, cfg.random_max_value, 10_000, &mut rng) {
            out.push(LabelledWeight {
                label: format!("random#{i}"),
                table,
            });
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|w| seen.insert(w.table.values().to_vec()));
    Ok(out)
}

/// Every valid weight on `F_q` with nonzero values in `1..=max_value`.
pub fn enumerate_weights(field: &FieldSpec, max_value: u32) -> Vec<WeightTable> {
    let reps: Vec<FieldElement> = field
        .elements()
        .skip(1)
        .filter(|&a| field.neg(a).index() >= a.index())
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![1u32; reps.len()];
    loop {
        let mut values = vec![0u32; field.q()];
        for (&a, &v) in reps.iter().zip(&choice) {
            values[a.index()] = v;
            values[field.neg(a).index()] = v;
        }
        if let Ok(w) = WeightTable::new(field.clone(), values) {
            out.push(w);
        }
        let Some(pos) = choice.iter().position(|&v| v < max_value) else {
            break;
        };
        choice[pos] += 1;
        choice[..pos].iter_mut().for_each(|v| *v = 1);
    }
    out
}

/// `{0} ∪ {s + i M_w : s in Im(w) \ {0}, i < n}`: every value of the chain weight.
pub fn realizable_radii(w: &WeightTable, n: usize) -> Vec<u32> {
    let m = w.max_weight();
    let mut out: BTreeSet<u32> = BTreeSet::from([0]);
    for &s in w.image().iter().filter(|&&s| s > 0) {
        for i in 0..n as u32 {
            out.insert(s + i * m);
        }
    }
    out.into_iter().collect()
}

fn fits(q: usize, n: usize, budget: u64) -> bool {
    (q as u128)
        .checked_pow(n as u32)
        .is_some_and(|s| s <= budget as u128)
}

fn chain(w: &WeightTable, n: usize) -> Result<MetricSpace> {
    MetricSpace::chain(w.clone(), n)
}

fn random_words(rng: &mut ChaCha8Rng, m: &MetricSpace, size: usize) -> Vec<Vector> {
    let total = m.space().size().unwrap() as usize;
    sample(rng, total, size.min(total))
        .into_iter()
        .map(|r| m.space().unrank(r as u64))
        .collect()
}

fn fmt_set(set: &[Vector]) -> String {
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

pub fn check_field_axioms(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("field-axioms");
    let fields: BTreeSet<usize> = cfg
        .fields
        .iter()
        .chain(&cfg.mds_fields)
        .chain(&cfg.prime_fields)
        .chain(&cfg.equality_fields)
        .copied()
        .collect();
    for q in fields {
        let Some(f) = t.guard(FieldSpec::new(q), || format!("q={q}")) else {
            continue;
        };
        let els: Vec<FieldElement> = f.elements().collect();
        let mut ok = true;
        for &a in &els {
            ok &= f.add(a, f.neg(a)).is_zero();
            if !a.is_zero() {
                ok &= f.inv(a).is_ok_and(|i| f.mul(a, i) == FieldElement::ONE);
            }
            for &b in &els {
                ok &= f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a);
                for &c in &els {
                    ok &= f.add(f.add(a, b), c) == f.add(a, f.add(b, c));
                    ok &= f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c));
                    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                }
            }
        }
        let count = crate::algebra::enumerate_vectors(&f, 2, cfg.enumeration_budget)
            .map(|v| v.collect::<std::collections::HashSet<_>>().len() == q * q)
            .unwrap_or(false);
        t.check(ok && count, || format!("q={q} ({})", f.modulus_string()));
    }
    t.finish()
}

pub fn check_weight_axioms(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("weight-axioms");
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for lw in ws {
            let w = &lw.table;
            let st = w.stats();
            let mut ok = st.min_nonzero_weight <= st.archimedean_threshold
                && st.archimedean_threshold <= st.max_weight
                && st.non_archimedean == (st.archimedean_threshold == st.max_weight);
            let violations = crate::weights::validate_weight(w.field(), w.values());
            ok &= violations.is_ok_and(|v| v.is_empty());
            let top = w.interval(st.max_weight);
            ok &= top.levels == st.image[1..] && top.count + 1 == q;
            for n in 1..=cfg.max_n {
                let mut last = 0;
                for d in 1..=(n as u32 * st.max_weight + 1) {
                    let fl = w.floor_weight(n, d);
                    ok &= fl < d && fl >= last;
                    last = fl;
                }
            }
            t.check(ok, || lw.describe());
        }
    }
    t.finish()
}

pub fn check_poset_ideals(_cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("poset-ideals");
    for n in 1..=4 {
        let Some(posets) = t.guard(Poset::all_labeled(n), || format!("n={n}")) else {
            continue;
        };
        for p in posets {
            let mut ok = true;
            for x in 0u32..1 << n {
                let x = CoordSet(x);
                let Ok(i) = p.ideal_closure(x) else {
                    ok = false;
                    continue;
                };
                ok &= x.is_subset(i) && p.is_ideal(i) && p.ideal_closure(i) == Ok(i);
                for e in 0..n {
                    let mut y = x;
                    y.insert(e);
                    ok &= p.ideal_closure(y).is_ok_and(|j| i.is_subset(j));
                }
                let m = p.maximal(i);
                ok &= m.is_subset(i);
                ok &= m.iter().all(|a| i.iter().all(|b| a == b || !p.leq(a, b)));
                if p.is_chain() && !x.is_empty() {
                    ok &= m.len() == 1;
                }
            }
            t.check(ok, || format!("n={n} covers={:?}", p.covers()));
        }
    }
    t.finish()
}

pub fn check_wp_weight_triangle(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("wp-weight-triangle");
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        let mut rng = rng_for(cfg.seed, "translation", q);
        for n in (1..=3).filter(|&n| fits(q, n, cfg.pair_budget)) {
            let Some(posets) = t.guard(Poset::all_labeled(n), || format!("n={n}")) else {
                continue;
            };
            for lw in &ws {
                for p in &posets {
                    let Some(m) = t.guard(MetricSpace::new(p.clone(), lw.table.clone()), || {
                        lw.describe()
                    }) else {
                        continue;
                    };
                    let all: Vec<Vector> = m.space().vectors(cfg.pair_budget).unwrap().collect();
                    let wt: Vec<u32> = all.iter().map(|u| m.wp_weight(u)).collect();
                    let mut bad = None;
                    for (i, u) in all.iter().enumerate() {
                        if (wt[i] == 0) != u.is_zero() || wt[i] != m.wp_weight(&m.space().neg(u)) {
                            bad = Some(format!("positivity/symmetry at {u}"));
                            break;
                        }
                        if let Some((j, _)) = all
                            .iter()
                            .enumerate()
                            .find(|(j, v)| m.wp_weight(&m.space().add(u, v)) > wt[i] + wt[*j])
                        {
                            bad = Some(format!("triangle at {u}, {}", all[j]));
                            break;
                        }
                    }
                    let shift = &all[rng.gen_range(0..all.len())];
                    for u in all.iter().step_by(3) {
                        for v in all.iter().step_by(5) {
                            let a = m.wp_distance(u, v);
                            let b =
                                m.wp_distance(&m.space().add(u, shift), &m.space().add(v, shift));
                            if a != b && bad.is_none() {
                                bad = Some(format!("translation by {shift} at {u}, {v}"));
                            }
                        }
                    }
                    t.check(bad.is_none(), || {
                        format!(
                            "{} n={n} covers={:?}: {}",
                            lw.describe(),
                            p.covers(),
                            bad.unwrap()
                        )
                    });
                }
            }
        }
    }
    t.finish()
}

pub fn check_chain_weight_fast_path(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("chain-weight-fast-path");
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in (1..=cfg.max_n.min(4)).filter(|&n| fits(q, n, cfg.enumeration_budget)) {
            let Some(posets) = t.guard(Poset::all_labeled(n), || format!("n={n}")) else {
                continue;
            };
            for p in posets.iter().filter(|p| p.is_chain()) {
                for lw in &ws {
                    let m = MetricSpace::new(p.clone(), lw.table.clone()).unwrap();
                    let bad = m
                        .space()
                        .vectors(cfg.enumeration_budget)
                        .unwrap()
                        .find(|u| m.chain_weight(u) != Ok(m.wp_weight(u)));
                    t.check(bad.is_none(), || {
                        format!(
                            "{} chain {:?} at {}",
                            lw.describe(),
                            p.chain_order(),
                            bad.unwrap()
                        )
                    });
                }
            }
        }
    }
    t.finish()
}

pub fn check_naive_weight_regression(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("naive-support-weight-regression");
    let f = FieldSpec::new(7).unwrap();
    let m = chain(&WeightTable::lee(&f).unwrap(), 2).unwrap();
    let u = m.space().vector(&[1, 0]).unwrap();
    let v = m.space().vector(&[6, 1]).unwrap();
    let s = m.space().add(&u, &v);
    let (nu, nv, ns) = (
        m.naive_support_weight(&u),
        m.naive_support_weight(&v),
        m.naive_support_weight(&s),
    );
    let broken = (nu, nv, ns) == (1, 2, 4);
    t.check(broken, || {
        format!("naive weights at u, v, u+v are {nu}, {nv}, {ns}; expected 1, 2, 4")
    });
    let all: Vec<Vector> = m.space().vectors(100).unwrap().collect();
    let wp_ok = all.iter().all(|a| {
        all.iter()
            .all(|b| m.wp_weight(&m.space().add(a, b)) <= m.wp_weight(a) + m.wp_weight(b))
    });
    t.check(wp_ok, || {
        "(P,w)-weight breaks the triangle inequality on F_7^2 Lee".into()
    });
    let mut out = t.finish();
    if !cfg.naive_weight_regression {
        out.status = Status::Skipped;
        out.note = Some("disabled by configuration".into());
    } else if out.status == Status::Pass {
        out.status = Status::ExpectedFailure;
        out.note = Some(format!(
            "naive weight breaks the triangle inequality at u={u}, v={v}: {ns} > {nu} + {nv}"
        ));
    }
    out
}

/// The support-based variant keeps the triangle inequality once `M_w <= 2 m_w`.
pub fn check_naive_weight_recovery(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("naive-support-weight-recovery");
    for &q in &cfg.fields {
        let Ok(ws) = sweep_weights(cfg, q) else {
            continue;
        };
        for lw in ws
            .iter()
            .filter(|lw| lw.table.max_weight() <= 2 * lw.table.min_nonzero_weight())
        {
            for n in (1..=3).filter(|&n| fits(q, n, cfg.pair_budget)) {
                let m = chain(&lw.table, n).unwrap();
                let all: Vec<Vector> = m.space().vectors(cfg.pair_budget).unwrap().collect();
                let nw: Vec<u32> = all.iter().map(|a| m.naive_support_weight(a)).collect();
                let bad = all.iter().enumerate().find_map(|(i, a)| {
                    all.iter()
                        .enumerate()
                        .find(|(j, b)| {
                            m.naive_support_weight(&m.space().add(a, b)) > nw[i] + nw[*j]
                        })
                        .map(|(_, b)| (a.clone(), b.clone()))
                });
                t.check(bad.is_none(), || {
                    let (a, b) = bad.unwrap();
                    format!("{} n={n}: naive triangle fails at {a}, {b}", lw.describe())
                });
            }
        }
    }
    t.finish()
}

pub fn check_distance_set_product_bound(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("distance-set-product-bound");
    let mut spaces = Vec::new();
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in (1..=3).filter(|&n| fits(q, n, cfg.pair_budget)) {
            for p in Poset::all_labeled(n).unwrap() {
                for lw in &ws {
                    spaces.push((
                        lw.clone(),
                        MetricSpace::new(p.clone(), lw.table.clone()).unwrap(),
                    ));
                }
            }
        }
    }
    if spaces.is_empty() {
        return t.finish();
    }
    let mut rng = rng_for(cfg.seed, "product-pairs", 0);
    let mut nontrivial = 0u64;
    for _ in 0..cfg.product_pairs {
        let (lw, m) = &spaces[rng.gen_range(0..spaces.len())];
        let all: Vec<Vector> = m.space().vectors(cfg.pair_budget).unwrap().collect();
        let center = &all[rng.gen_range(0..all.len())];
        let top = m.n() as u32 * m.max_weight();
        let radius = rng.gen_range(0..=top);
        let mut near: Vec<Vector> = all
            .iter()
            .filter(|v| m.distance(center, v) <= radius)
            .cloned()
            .collect();
        near.shuffle(&mut rng);
        near.truncate(rng.gen_range(1..=12));
        let used: BTreeSet<u32> = near
            .iter()
            .enumerate()
            .flat_map(|(i, u)| near[i + 1..].iter().map(|v| m.distance(u, v)))
            .collect();
        let target = rng.gen_range(1..=30);
        let mut order = all.clone();
        order.shuffle(&mut rng);
        let mut b: Vec<Vector> = Vec::new();
        for v in order {
            if b.len() == target {
                break;
            }
            if b.iter().all(|x| {
                let d = m.distance(x, &v);
                d > 0 && !used.contains(&d)
            }) {
                b.push(v);
            }
        }
        let Some(r) = t.guard(distance_set_product_bound(m, &near, &b), || lw.describe()) else {
            continue;
        };
        if near.len() > 1 && b.len() > 1 {
            nontrivial += 1;
        }
        t.check(r.disjoint_distance_sets && r.bound_holds, || {
            format!(
                "{} n={}: A={} B={}",
                lw.describe(),
                m.n(),
                fmt_set(&near),
                fmt_set(&b)
            )
        });
    }
    t.note = Some(format!("{nontrivial} pairs with |A|, |B| >= 2"));
    t.finish()
}

pub fn check_radius_normalization(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("radius-normalization");
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for lw in &ws {
            for n in (1..=3).filter(|&n| fits(q, n, cfg.enumeration_budget)) {
                let m = chain(&lw.table, n).unwrap();
                let weights: Vec<u32> = m
                    .space()
                    .vectors(cfg.enumeration_budget)
                    .unwrap()
                    .map(|v| m.wp_weight(&v))
                    .collect();
                for raw in 0..=(n as u32 * m.max_weight()) {
                    let r = normalize_radius(&lw.table, raw);
                    let a = weights.iter().filter(|&&x| x <= raw).count();
                    let b = weights.iter().filter(|&&x| x <= r.normalized).count();
                    let ok = a == b && lw.table.image().contains(&r.s) && r.s < m.max_weight();
                    t.check(ok, || {
                        format!(
                            "{} n={n} r={raw}: normalized {} ({a} vs {b})",
                            lw.describe(),
                            r.normalized
                        )
                    });
                }
            }
        }
    }
    t.finish()
}

pub fn check_ball_size_formula(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("ball-size-formula");
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in 1..=cfg.max_n {
            if !fits(q, n, cfg.enumeration_budget) {
                t.skipped += 1;
                continue;
            }
            for lw in &ws {
                let m = chain(&lw.table, n).unwrap();
                for d in realizable_radii(&lw.table, n) {
                    let Some(brute) = t
                        .guard(brute_ball_size(&m, d, cfg.enumeration_budget), || {
                            lw.describe()
                        })
                    else {
                        continue;
                    };
                    let Some(formula) = t.guard(ball_size(&lw.table, n, d), || lw.describe())
                    else {
                        continue;
                    };
                    t.check(formula.size == brute, || {
                        format!(
                            "{} n={n} D={d}: formula {} brute {brute}",
                            lw.describe(),
                            formula.size
                        )
                    });
                }
            }
        }
    }
    t.finish()
}

/// Random codes for every `(q, n)` with `q^n <= code_budget`, weights cycled
/// through the sweep set.
fn random_code_corpus(cfg: &SweepConfig) -> Result<Vec<(LabelledWeight, Code)>> {
    let mut out = Vec::new();
    for &q in &cfg.fields {
        let ws = sweep_weights(cfg, q)?;
        let mut rng = rng_for(cfg.seed, "random-codes", q);
        for n in (1..).take_while(|&n| fits(q, n, cfg.code_budget)) {
            let total = q.pow(n as u32);
            for i in 0..cfg.random_codes {
                let lw = &ws[i % ws.len()];
                let m = chain(&lw.table, n)?;
                let size = rng.gen_range(2..=cfg.max_code_size.min(total));
                let words = random_words(&mut rng, &m, size);
                out.push((lw.clone(), Code::new(m, words)?));
            }
        }
    }
    Ok(out)
}

fn describe_code(lw: &LabelledWeight, c: &Code) -> String {
    format!(
        "{} n={} C={}",
        lw.describe(),
        c.metric().n(),
        fmt_set(c.words())
    )
}

pub fn check_minimum_distance_structure(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("minimum-distance-structure");
    let Some(corpus) = t.guard(random_code_corpus(cfg), || "corpus".into()) else {
        return t.finish();
    };
    for (lw, c) in &corpus {
        let Some(d) = t.guard(c.min_distances(), || describe_code(lw, c)) else {
            continue;
        };
        let brute = brute_min_distance(c.metric(), c.words()).unwrap();
        let identity = d.d_weighted == d.s_wc + (d.d_poset as u32 - 1) * lw.table.max_weight();
        t.check(identity && brute == d.d_weighted, || {
            format!(
                "{}: structure {} brute {brute}",
                describe_code(lw, c),
                d.d_weighted
            )
        });
    }
    t.finish()
}

pub fn check_packing_radius(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("packing-radius");
    let Some(corpus) = t.guard(random_code_corpus(cfg), || "corpus".into()) else {
        return t.finish();
    };
    let mut not_disjoint = 0u64;
    let mut no_collision = 0u64;
    for (lw, c) in &corpus {
        let Some(p) = t.guard(c.check_packing(cfg.code_budget), || describe_code(lw, c)) else {
            continue;
        };
        not_disjoint += u64::from(!p.disjoint);
        no_collision += u64::from(!p.collides_above);
        t.check(p.disjoint && p.collides_above, || {
            format!(
                "{}: radius {} disjoint={} collides at radius + m_w={}",
                describe_code(lw, c),
                p.radius,
                p.disjoint,
                p.collides_above
            )
        });
    }
    t.note = Some(format!("{not_disjoint} codes with overlapping balls, {no_collision} without a collision one step up"));
    t.finish()
}

/// MDS codes `{(x_y, y)}` with a seeded random map `y -> x_y`, for every
/// `q` in `mds_fields`, `n <= max_n`, `1 <= d <= n` and sweep weight.
fn mds_corpus(cfg: &SweepConfig, t: &mut Tally) -> Vec<(LabelledWeight, Code)> {
    let mut out = Vec::new();
    for &q in &cfg.mds_fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        let mut rng = rng_for(cfg.seed, "mds", q);
        for n in (1..=cfg.max_n).filter(|&n| fits(q, n, cfg.code_budget)) {
            for d in 1..=n {
                for lw in &ws {
                    let m = chain(&lw.table, n).unwrap();
                    let f = m.field().clone();
                    let tail = q.pow((n - d + 1) as u32);
                    let table: Vec<Vec<FieldElement>> = (0..tail)
                        .map(|_| {
                            (0..d - 1)
                                .map(|_| f.element(rng.gen_range(0..q)).unwrap())
                                .collect()
                        })
                        .collect();
                    let tail_space = crate::algebra::Space::new(f.clone(), n - d + 1).unwrap();
                    let assign =
                        |y: &Vector| Vector::new(table[tail_space.rank(y) as usize].clone());
                    let built = construct_mds(&m, d, assign, cfg.code_budget);
                    if let Some(c) = t.guard(built, || format!("{} n={n} d={d}", lw.describe())) {
                        out.push((lw.clone(), c));
                    }
                }
            }
        }
    }
    out
}

fn non_mds_corpus(cfg: &SweepConfig, t: &mut Tally) -> Vec<(LabelledWeight, Code)> {
    let mut out = Vec::new();
    let mut shapes = Vec::new();
    for &q in &cfg.mds_fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in (1..=cfg.max_n).filter(|&n| fits(q, n, cfg.code_budget)) {
            for lw in &ws {
                shapes.push((lw.clone(), n));
            }
        }
    }
    if shapes.is_empty() {
        return out;
    }
    let mut rng = rng_for(cfg.seed, "non-mds", 0);
    while out.len() < cfg.random_non_mds_codes {
        let (lw, n) = &shapes[rng.gen_range(0..shapes.len())];
        let m = chain(&lw.table, *n).unwrap();
        let total = m.space().size().unwrap() as usize;
        let size = rng.gen_range(2..=cfg.max_code_size.min(total));
        let words = random_words(&mut rng, &m, size);
        let c = Code::new(m, words).unwrap();
        if !c.is_mds().unwrap().mds {
            out.push((lw.clone(), c));
        }
    }
    out
}

pub fn check_mds_iff_perfect(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("mds-iff-perfect");
    let mds = mds_corpus(cfg, &mut t);
    for (lw, c) in &mds {
        let v = c.is_mds().unwrap();
        let Some(perfect) = t.guard(c.is_perfect(cfg.code_budget), || describe_code(lw, c)) else {
            continue;
        };
        let space = c.metric().space().size().unwrap();
        let counting = packing_ball_size(c).map(|b| b * c.len() as u64 == space);
        t.check(
            v.mds && v.map.is_some() && perfect && counting == Ok(true),
            || format!("{}: mds={} perfect={perfect}", describe_code(lw, c), v.mds),
        );
    }
    for (lw, c) in &non_mds_corpus(cfg, &mut t) {
        let Some(perfect) = t.guard(c.is_perfect(cfg.code_budget), || describe_code(lw, c)) else {
            continue;
        };
        t.check(!perfect, || {
            format!("{}: non-MDS but perfect", describe_code(lw, c))
        });
    }
    t.finish()
}

pub fn check_mds_diameter_perfect(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("mds-diameter-perfect");
    for (lw, c) in &mds_corpus(cfg, &mut t) {
        let Some(v) = t.guard(c.is_diameter_perfect(), || describe_code(lw, c)) else {
            continue;
        };
        t.check(v.a_star * v.size == v.space_size, || {
            format!(
                "{}: A*({}) = {}, |C| = {}",
                describe_code(lw, c),
                v.floor,
                v.a_star,
                v.size
            )
        });
    }
    for (lw, c) in &non_mds_corpus(cfg, &mut t) {
        let Some(v) = t.guard(c.is_diameter_perfect(), || describe_code(lw, c)) else {
            continue;
        };
        t.check(v.a_star * v.size < v.space_size, || {
            format!(
                "{}: non-MDS with A*({}) |C| = {} >= q^n",
                describe_code(lw, c),
                v.floor,
                v.a_star * v.size
            )
        });
    }
    t.finish()
}

pub fn check_power_of_q_classification(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("power-of-q-classification");
    for (lw, c) in &mds_corpus(cfg, &mut t) {
        let Some(p) = t.guard(c.power_of_q_classification(), || describe_code(lw, c)) else {
            continue;
        };
        t.check(p.consistent && p.mds, || {
            format!("{}: {p:?}", describe_code(lw, c))
        });
    }
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        let mut rng = rng_for(cfg.seed, "power-of-q", q);
        for n in (1..=cfg.max_n).filter(|&n| fits(q, n, cfg.code_budget)) {
            for lw in &ws {
                let m = chain(&lw.table, n).unwrap();
                let k = rng.gen_range(1..=n);
                let words = random_words(&mut rng, &m, q.pow(k as u32));
                let c = Code::new(m, words).unwrap();
                let Some(p) = t.guard(c.power_of_q_classification(), || describe_code(lw, &c))
                else {
                    continue;
                };
                t.check(p.consistent, || format!("{}: {p:?}", describe_code(lw, &c)));
            }
        }
    }
    t.finish()
}

pub fn check_singleton_equivalence(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("singleton-equivalence");
    let mut codes = mds_corpus(cfg, &mut t);
    codes.extend(non_mds_corpus(cfg, &mut t));
    if let Some(corpus) = t.guard(random_code_corpus(cfg), || "corpus".into()) {
        codes.extend(corpus);
    }
    for (lw, c) in &codes {
        let d = c.min_distances().unwrap();
        let st = c.metric().stats();
        let applies = lw.table.is_scaled_hamming() || d.s_wc == st.min_nonzero_weight;
        if !applies {
            continue;
        }
        let mds = c.is_mds().unwrap().mds;
        let Some(dp) = t.guard(c.is_diameter_perfect(), || describe_code(lw, c)) else {
            continue;
        };
        t.check(mds == dp.diameter_perfect, || {
            format!(
                "{}: mds={mds} diameter_perfect={}",
                describe_code(lw, c),
                dp.diameter_perfect
            )
        });
    }
    t.finish()
}

/// Instances `(weight, n)` with `q^n` within `budget`, over the main sweep.
fn small_chains(cfg: &SweepConfig, budget: u64, t: &mut Tally) -> Vec<(LabelledWeight, usize)> {
    let mut out = Vec::new();
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in (1..).take_while(|&n| fits(q, n, budget)) {
            for lw in &ws {
                out.push((lw.clone(), n));
            }
        }
    }
    out
}

pub fn check_anticode_size_formula(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("anticode-size-formula");
    for (lw, n) in small_chains(cfg, cfg.clique_budget, &mut t) {
        let m = chain(&lw.table, n).unwrap();
        for d in realizable_radii(&lw.table, n) {
            let Some(brute) = t.guard(brute_a_star(&m, d, cfg.clique_budget), || lw.describe())
            else {
                continue;
            };
            let Some(r) = t.guard(optimal_anticode_size(&lw.table, n, d), || lw.describe()) else {
                continue;
            };
            t.check(r.a_star == brute, || {
                format!(
                    "{} n={n} D={d}: formula {} brute {brute}",
                    lw.describe(),
                    r.a_star
                )
            });
        }
    }
    t.finish()
}

pub fn check_anticode_upper_bound(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("anticode-upper-bound");
    for (lw, n) in small_chains(cfg, cfg.clique_budget, &mut t) {
        let m = chain(&lw.table, n).unwrap();
        for d in realizable_radii(&lw.table, n) {
            let r = normalize_radius(&lw.table, d);
            if r.r as usize >= n {
                continue;
            }
            let Some(brute) = t.guard(brute_a_star(&m, d, cfg.clique_budget), || lw.describe())
            else {
                continue;
            };
            let bound = ball_size(&lw.table, n, d).unwrap().size;
            let strict = (m.field().q() as u64).pow(r.r + 1);
            t.check(brute <= bound && brute < strict, || {
                format!(
                    "{} n={n} D={d}: A* {brute}, ball {bound}, q^(R+1) {strict}",
                    lw.describe()
                )
            });
        }
    }
    t.finish()
}

fn ranks(m: &MetricSpace, set: &[Vector]) -> Vec<u64> {
    set.iter().map(|v| m.space().rank(v)).collect()
}

pub fn check_anticode_classification(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("anticode-classification");
    for (lw, n) in small_chains(cfg, cfg.listing_budget, &mut t) {
        let m = chain(&lw.table, n).unwrap();
        for d in realizable_radii(&lw.table, n) {
            let Some(brute) = t.guard(brute_optimal_anticodes(&m, d, cfg.listing_budget), || {
                lw.describe()
            }) else {
                continue;
            };
            let Some(classified) = t.guard(
                classified_anticodes_through_zero(&m, d, cfg.listing_budget),
                || lw.describe(),
            ) else {
                continue;
            };
            let b: BTreeSet<Vec<u64>> = brute.iter().map(|s| ranks(&m, s)).collect();
            let c: BTreeSet<Vec<u64>> = classified.iter().map(|s| ranks(&m, s)).collect();
            t.check(b == c, || {
                let extra = brute.iter().find(|s| !c.contains(&ranks(&m, s)));
                let missing = classified.iter().find(|s| !b.contains(&ranks(&m, s)));
                format!(
                    "{} n={n} D={d}: {} optimal vs {} classified; unclassified {}, not optimal {}",
                    lw.describe(),
                    brute.len(),
                    classified.len(),
                    extra.map_or("none".into(), |s| fmt_set(s)),
                    missing.map_or("none".into(), |s| fmt_set(s)),
                )
            });
        }
    }
    t.finish()
}

pub fn check_d_optimality_equivalence(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("d-optimality-equivalence");
    for (lw, n) in small_chains(cfg, cfg.listing_budget, &mut t) {
        let m = chain(&lw.table, n).unwrap();
        let all: Vec<Vector> = m.space().vectors(cfg.listing_budget).unwrap().collect();
        for d in realizable_radii(&lw.table, n) {
            let b0 = ball(&m, &m.space().zero(), d, cfg.listing_budget).unwrap();
            let a_star = brute_a_star(&m, d, cfg.listing_budget).unwrap();
            let diam_all = all
                .iter()
                .step_by(7)
                .all(|x| diameter(&m, &ball(&m, x, d, cfg.listing_budget).unwrap()).unwrap() == d);
            let optimal_all = all.iter().step_by(7).all(|x| {
                let b = ball(&m, x, d, cfg.listing_budget).unwrap();
                diameter(&m, &b).unwrap() <= d && b.len() as u64 == a_star
            });
            let only_balls = brute_optimal_anticodes(&m, d, cfg.listing_budget)
                .unwrap()
                .iter()
                .all(|a| {
                    a.iter()
                        .any(|x| ball(&m, x, d, cfg.listing_budget).unwrap() == *a)
                });
            let size = a_star == b0.len() as u64;
            let props = [diam_all, optimal_all, only_balls, size];
            t.check(props.iter().all(|&p| p == props[0]), || {
                format!("{} n={n} D={d}: properties {props:?}", lw.describe())
            });
        }
    }
    t.finish()
}

fn closed_under(m: &MetricSpace, set: &[Vector], scalars: bool) -> bool {
    let members: BTreeSet<u64> = set.iter().map(|v| m.space().rank(v)).collect();
    let f = m.field();
    set.iter().all(|u| {
        set.iter()
            .all(|v| members.contains(&m.space().rank(&m.space().sub(u, v))))
            && (!scalars
                || f.elements()
                    .all(|l| members.contains(&m.space().rank(&m.space().scale(l, u)))))
    })
}

pub fn check_subspace_ball(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("subspace-ball");
    for (lw, n) in small_chains(cfg, cfg.pair_budget, &mut t) {
        let m = chain(&lw.table, n).unwrap();
        let mw = m.max_weight();
        let q = m.field().q() as u64;
        for r in 0..=n as u32 {
            let b = ball(&m, &m.space().zero(), r * mw, cfg.pair_budget).unwrap();
            let ok = b.len() as u64 == q.pow(r)
                && closed_under(&m, &b, true)
                && diameter(&m, &b).unwrap() == r * mw;
            t.check(ok, || format!("{} n={n} D={}", lw.describe(), r * mw));
        }
        let sw = m.stats().archimedean_threshold;
        for &s in m
            .stats()
            .image
            .iter()
            .filter(|&&s| s > 0 && s < sw && s < mw)
        {
            for r in 0..n as u32 {
                let b = ball(&m, &m.space().zero(), s + r * mw, cfg.pair_budget).unwrap();
                t.check(!closed_under(&m, &b, true), || {
                    format!(
                        "{} n={n} D={}: ball is a subspace",
                        lw.describe(),
                        s + r * mw
                    )
                });
            }
        }
    }
    t.finish()
}

pub fn check_diameter_perfect_criterion(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("diameter-perfect-criterion");
    let hunt = search_equality(
        &cfg.equality_fields,
        cfg.equality_max_value,
        cfg.equality_n,
        cfg.clique_budget,
    );
    let Some(hunt) = t.guard(hunt, || "equality search".into()) else {
        return t.finish();
    };
    for e in &hunt.instances {
        let ok = e
            .codes
            .iter()
            .all(|c| c.diameter_perfect && c.brute_diameter_perfect != Some(false));
        t.check(ok, || {
            format!("q={} w={:?} S={}: {:?}", e.q, e.weight, e.s, e.codes)
        });
    }
    // The inequality itself holds wherever it applies.
    for w in &hunt.violations {
        t.check(false, || w.clone());
    }
    t.instances += hunt.levels_scanned;
    t.note = Some(if hunt.instances.is_empty() {
        format!(
            "no equality instance among {} weights and {} levels",
            hunt.weights_scanned, hunt.levels_scanned
        )
    } else {
        let per_q: Vec<String> = cfg
            .equality_fields
            .iter()
            .map(|&q| {
                format!(
                    "q={q}: {}",
                    hunt.instances.iter().filter(|e| e.q == q).count()
                )
            })
            .collect();
        format!(
            "{} equality instances ({}) among {} weights; each threshold code is diameter perfect",
            hunt.instances.len(),
            per_q.join(", "),
            hunt.weights_scanned
        )
    });
    t.finish()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdCheck {
    #[serde(rename = "R")]
    pub r: usize,
    pub size: usize,
    pub d_weighted: u32,
    pub diameter_perfect: bool,
    /// Same product with `A*` from the clique oracle, when within budget.
    pub brute_diameter_perfect: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualityInstance {
    pub q: usize,
    pub weight: Vec<u32>,
    #[serde(rename = "S")]
    pub s: u32,
    pub case: CriterionCase,
    pub lhs: u64,
    pub codes: Vec<ThresholdCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualityHunt {
    pub weights_scanned: u64,
    pub levels_scanned: u64,
    pub instances: Vec<EqualityInstance>,
    /// Levels where the inequality fails outright.
    pub violations: Vec<String>,
}

/// Scans every valid weight with values up to `max_value` on each field for
/// equality in the diameter-perfect criterion, and builds and checks the
/// threshold codes in `F_q^n` for each hit.
pub fn search_equality(
    fields: &[usize],
    max_value: u32,
    n: usize,
    clique_budget: u64,
) -> Result<EqualityHunt> {
    let mut hunt = EqualityHunt {
        weights_scanned: 0,
        levels_scanned: 0,
        instances: Vec::new(),
        violations: Vec::new(),
    };
    for &q in fields {
        let f = FieldSpec::new(q)?;
        for w in enumerate_weights(&f, max_value) {
            hunt.weights_scanned += 1;
            for s in criterion_levels(&w) {
                hunt.levels_scanned += 1;
                let c = diameter_perfect_criterion(&w, s)?;
                if !c.holds {
                    hunt.violations.push(format!(
                        "q={q} w={:?} S={s}: lhs {} > {q}",
                        w.values(),
                        c.lhs
                    ));
                }
                if !c.equality {
                    continue;
                }
                let m = MetricSpace::chain(w.clone(), n)?;
                let mut codes = Vec::new();
                for r in 1..=n {
                    let code = construct_threshold_code(&m, s, r, u64::MAX)?;
                    let v = code.is_diameter_perfect()?;
                    let brute = match brute_a_star(&m, v.floor, clique_budget) {
                        Ok(a) => Some(a * v.size == v.space_size),
                        Err(Error::BudgetExceeded { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    codes.push(ThresholdCheck {
                        r,
                        size: code.len(),
                        d_weighted: v.d_weighted,
                        diameter_perfect: v.diameter_perfect,
                        brute_diameter_perfect: brute,
                    });
                }
                hunt.instances.push(EqualityInstance {
                    q,
                    weight: w.values().to_vec(),
                    s,
                    case: c.case,
                    lhs: c.lhs,
                    codes,
                });
            }
        }
    }
    Ok(hunt)
}

pub fn check_prime_field_strictness(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("prime-field-strictness");
    for &p in &cfg.prime_fields {
        let Some(ws) = t.guard(sweep_weights(cfg, p), || format!("q={p}")) else {
            continue;
        };
        if !FieldSpec::new(p).unwrap().is_prime_field() {
            t.check(false, || format!("q={p} is not prime"));
            continue;
        }
        let p64 = p as u64;
        for lw in &ws {
            let w = &lw.table;
            let st = w.stats();
            for s in criterion_levels(w) {
                let first = 1 + w.count_up_to(s - 1) as u64;
                let upper = upper_family(w, s).unwrap().cardinality as u64;
                let mut ok = first < p64 && upper < p64;
                let mut third = None;
                if s > st.archimedean_threshold {
                    let lower = lower_family(w, s - 1).unwrap().cardinality as u64;
                    let v = 1 + w.count_up_to(st.archimedean_threshold - 1) as u64 + lower;
                    ok &= v < p64;
                    third = Some(v);
                }
                t.check(ok, || {
                    format!(
                        "{} S={s}: values {first}, {upper}, {third:?} against p={p}",
                        lw.describe()
                    )
                });
            }
        }
    }
    t.finish()
}

pub fn check_ultrametric(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("ultrametric-iff-non-archimedean");
    for &q in cfg.fields.iter().filter(|&&q| q <= 7) {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        for n in (1..=3).filter(|&n| fits(q, n, cfg.triple_budget)) {
            for lw in &ws {
                let m = chain(&lw.table, n).unwrap();
                let Some(triple) = t
                    .guard(brute_ultrametric_violation(&m, cfg.triple_budget), || {
                        lw.describe()
                    })
                else {
                    continue;
                };
                let pairs = m.check_ultrametric(cfg.triple_budget).unwrap();
                let non_arch = m.stats().non_archimedean;
                t.check(
                    triple.is_none() == non_arch && pairs.is_ultrametric == non_arch,
                    || {
                        format!(
                            "{} n={n}: non-archimedean={non_arch}, triple scan {:?}",
                            lw.describe(),
                            triple
                        )
                    },
                );
            }
        }
    }
    t.finish()
}

/// Largest diameter excess `diam(B(0,D)) - D` over realizable `D`, with the radius.
fn ball_excess(m: &MetricSpace, radii: &[u32], budget: u64) -> Result<Option<(u32, u32)>> {
    for &d in radii {
        let b = ball(m, &m.space().zero(), d, budget)?;
        let dia = diameter(m, &b)?;
        if dia > d {
            return Ok(Some((d, dia)));
        }
    }
    Ok(None)
}

fn poset_radii(m: &MetricSpace, budget: u64) -> Result<Vec<u32>> {
    let mut out: BTreeSet<u32> = BTreeSet::new();
    for v in m.space().vectors(m.space().size_within(budget)?)? {
        out.insert(m.wp_weight(&v));
    }
    Ok(out.into_iter().collect())
}

pub fn check_ball_diameter_characterization(cfg: &SweepConfig) -> CheckOutcome {
    let mut t = Tally::new("ball-diameter-characterization");
    let mut non_chain = 0u64;
    for &q in &cfg.fields {
        let Some(ws) = t.guard(sweep_weights(cfg, q), || format!("q={q}")) else {
            continue;
        };
        let mut rng = rng_for(cfg.seed, "ball-centers", q);
        for n in (1..=3).filter(|&n| fits(q, n, cfg.triple_budget)) {
            for lw in &ws {
                let m = chain(&lw.table, n).unwrap();
                let radii = realizable_radii(&lw.table, n);
                if m.stats().non_archimedean {
                    let all: Vec<Vector> = m.space().vectors(cfg.triple_budget).unwrap().collect();
                    let centers: Vec<&Vector> =
                        (0..3).map(|_| &all[rng.gen_range(0..all.len())]).collect();
                    let bad = radii.iter().find_map(|&d| {
                        std::iter::once(&all[0])
                            .chain(centers.iter().copied())
                            .find_map(|x| {
                                let dia = diameter(&m, &ball(&m, x, d, cfg.triple_budget).unwrap())
                                    .unwrap();
                                (dia != d).then(|| format!("B({x},{d}) has diameter {dia}"))
                            })
                    });
                    t.check(bad.is_none(), || {
                        format!("{} n={n}: {}", lw.describe(), bad.unwrap())
                    });
                } else {
                    let excess = ball_excess(&m, &radii, cfg.triple_budget).unwrap();
                    t.check(excess.is_some(), || {
                        format!(
                            "{} n={n}: archimedean but every ball has diameter D",
                            lw.describe()
                        )
                    });
                }
            }
        }
        // Non-chain orders: some ball is wider than its radius.
        for n in (2..=4).filter(|&n| fits(q, n, cfg.non_chain_budget)) {
            for p in Poset::all_labeled(n)
                .unwrap()
                .into_iter()
                .filter(|p| !p.is_chain())
            {
                for lw in &ws {
                    let m = MetricSpace::new(p.clone(), lw.table.clone()).unwrap();
                    let radii = poset_radii(&m, cfg.non_chain_budget).unwrap();
                    let excess = ball_excess(&m, &radii, cfg.non_chain_budget).unwrap();
                    non_chain += 1;
                    t.check(excess.is_some(), || {
                        format!(
                            "{} covers={:?}: every ball has diameter D",
                            lw.describe(),
                            p.covers()
                        )
                    });
                }
            }
        }
    }
    t.note = Some(format!("{non_chain} non-chain (poset, weight) instances"));
    t.finish()
}

type CheckFn = fn(&SweepConfig) -> CheckOutcome;

fn check_fn(id: &str) -> CheckFn {
    match id {
        "field-axioms" => check_field_axioms,
        "weight-axioms" => check_weight_axioms,
        "poset-ideals" => check_poset_ideals,
        "wp-weight-triangle" => check_wp_weight_triangle,
        "chain-weight-fast-path" => check_chain_weight_fast_path,
        "naive-support-weight-regression" => check_naive_weight_regression,
        "naive-support-weight-recovery" => check_naive_weight_recovery,
        "distance-set-product-bound" => check_distance_set_product_bound,
        "radius-normalization" => check_radius_normalization,
        "ball-size-formula" => check_ball_size_formula,
        "minimum-distance-structure" => check_minimum_distance_structure,
        "packing-radius" => check_packing_radius,
        "mds-iff-perfect" => check_mds_iff_perfect,
        "anticode-upper-bound" => check_anticode_upper_bound,
        "d-optimality-equivalence" => check_d_optimality_equivalence,
        "subspace-ball" => check_subspace_ball,
        "singleton-equivalence" => check_singleton_equivalence,
        "mds-diameter-perfect" => check_mds_diameter_perfect,
        "power-of-q-classification" => check_power_of_q_classification,
        "anticode-size-formula" => check_anticode_size_formula,
        "anticode-classification" => check_anticode_classification,
        "diameter-perfect-criterion" => check_diameter_perfect_criterion,
        "prime-field-strictness" => check_prime_field_strictness,
        "ultrametric-iff-non-archimedean" => check_ultrametric,
        "ball-diameter-characterization" => check_ball_diameter_characterization,
        _ => unreachable!("unknown check id {id}"),
    }
}

/// Runs one check by id.
pub fn run_check(cfg: &SweepConfig, id: &str) -> Result<CheckOutcome> {
    if !CHECK_IDS.contains(&id) {
        return Err(Error::Validation(format!("unknown check id {id:?}")));
    }
    Ok(check_fn(id)(cfg))
}

/// Runs every selected check in the fixed order of [`CHECK_IDS`].
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let checks: Vec<CheckOutcome> = CHECK_IDS
        .iter()
        .filter(|id| cfg.wants(id))
        .map(|id| check_fn(id)(cfg))
        .collect();
    let passed = checks.iter().all(|c| c.status.is_ok());
    Ok(SweepReport {
        seed: cfg.seed,
        config: cfg.clone(),
        checks,
        passed,
    })
}
