use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wchain::anticode::{ball_size, normalize_radius, optimal_anticode_size};
use wchain::codes::{criterion_levels, diameter_perfect_criterion, Code};
use wchain::oracle::{brute_a_star, brute_ball_size, brute_min_distance};
use wchain::{CoordSet, FieldSpec, MetricSpace, Poset, Vector, WeightTable};

const FIELDS: [usize; 5] = [2, 3, 4, 5, 7];

fn weight(q: usize, seed: u64, max_value: u32) -> WeightTable {
    let f = FieldSpec::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightTable::random(&f, max_value, 10_000, &mut rng).expect("valid weight drawn")
}

fn any_weight() -> impl Strategy<Value = WeightTable> {
    (
        prop::sample::select(FIELDS.to_vec()),
        any::<u64>(),
        1u32..=6,
    )
        .prop_map(|(q, seed, v)| weight(q, seed, v))
}

fn vector(m: &MetricSpace, idx: &[usize]) -> Vector {
    let q = m.field().q();
    let coords: Vec<usize> = idx.iter().map(|i| i % q).collect();
    m.space().vector(&coords).unwrap()
}

/// Random strict relations on `n` points, oriented low label to high so the
/// result is acyclic.
fn any_poset(n: usize) -> impl Strategy<Value = Poset> {
    prop::collection::vec((0..n, 0..n), 0..=n * 2).prop_map(move |pairs| {
        let rel: Vec<(usize, usize)> = pairs
            .into_iter()
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        Poset::from_covers(n, &rel).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_size_matches_enumeration(w in any_weight(), n in 1usize..=3, frac in 0.0f64..=1.0) {
        let m = MetricSpace::chain(w.clone(), n).unwrap();
        let d = (frac * f64::from(n as u32 * w.max_weight())).round() as u32;
        let closed = ball_size(&w, n, d).unwrap().size;
        prop_assert_eq!(closed, brute_ball_size(&m, d, 1_000).unwrap());
    }

    #[test]
    fn normalized_radius_gives_the_same_ball(w in any_weight(), d in 0u32..40) {
        let r = normalize_radius(&w, d);
        prop_assert!(r.normalized <= d);
        prop_assert!(r.s < w.max_weight());
        prop_assert_eq!(ball_size(&w, 3, d).unwrap().size, ball_size(&w, 3, r.normalized).unwrap().size);
    }

    #[test]
    fn wp_weight_triangle_on_any_poset(
        w in any_weight(),
        p in any_poset(4),
        a in prop::collection::vec(0usize..7, 4),
        b in prop::collection::vec(0usize..7, 4),
    ) {
        let m = MetricSpace::new(p, w).unwrap();
        let (u, v) = (vector(&m, &a), vector(&m, &b));
        let s = m.space().add(&u, &v);
        prop_assert!(m.wp_weight(&s) <= m.wp_weight(&u) + m.wp_weight(&v));
        prop_assert_eq!(m.wp_distance(&u, &v), m.wp_distance(&v, &u));
    }

    #[test]
    fn chain_weight_agrees_with_definition(w in any_weight(), a in prop::collection::vec(0usize..7, 1..=4)) {
        let m = MetricSpace::chain(w, a.len()).unwrap();
        let u = vector(&m, &a);
        prop_assert_eq!(m.chain_weight(&u).unwrap(), m.wp_weight(&u));
    }

    #[test]
    fn floor_weight_is_monotone(w in any_weight(), n in 1usize..=4, d in 1u32..40) {
        let lo = w.floor_weight(n, d);
        prop_assert!(lo < d);
        prop_assert!(lo <= w.floor_weight(n, d + 1));
    }

    #[test]
    fn ideal_closure_is_a_closure(p in any_poset(5), bits in 0u32..32) {
        let x = CoordSet(bits);
        let c = p.ideal_closure(x).unwrap();
        prop_assert!(x.is_subset(c));
        prop_assert!(p.is_ideal(c));
        prop_assert_eq!(p.ideal_closure(c).unwrap(), c);
        prop_assert_eq!(p.ideal_closure(p.maximal(c)).unwrap(), c);
    }

    #[test]
    fn code_distance_structure(
        w in any_weight(),
        n in 1usize..=3,
        raw in prop::collection::vec(prop::collection::vec(0usize..7, 3), 2..=8),
    ) {
        let m = MetricSpace::chain(w.clone(), n).unwrap();
        let words: Vec<Vector> = raw.iter().map(|r| vector(&m, &r[..n])).collect();
        let code = Code::new(m.clone(), words).unwrap();
        prop_assume!(code.len() >= 2);
        let d = code.min_distances().unwrap();
        prop_assert_eq!(d.d_weighted, d.s_wc + (d.d_poset as u32 - 1) * w.max_weight());
        prop_assert_eq!(d.d_weighted, brute_min_distance(&m, code.words()).unwrap());
    }

    #[test]
    fn criterion_never_exceeds_q(w in any_weight()) {
        for s in criterion_levels(&w) {
            let c = diameter_perfect_criterion(&w, s).unwrap();
            prop_assert!(c.holds, "S={} lhs={} q={}", s, c.lhs, c.rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn anticode_size_matches_clique(w in any_weight(), n in 1usize..=2, frac in 0.0f64..=1.0) {
        let m = MetricSpace::chain(w.clone(), n).unwrap();
        let d = (frac * f64::from(n as u32 * w.max_weight())).round() as u32;
        let closed = optimal_anticode_size(&w, n, d).unwrap().a_star;
        prop_assert_eq!(closed, brute_a_star(&m, d, 125).unwrap());
    }
}

/// Over F_8 the closed form undercounts: dropping the lone low-weight
/// element admits three elements of weight 2 at pairwise distance 2.
#[test]
fn anticode_size_undercounts_on_f8() {
    let f = FieldSpec::new(8).unwrap();
    let w = WeightTable::new(f, vec![0, 2, 3, 1, 2, 2, 3, 3]).unwrap();
    let m = MetricSpace::chain(w.clone(), 1).unwrap();
    let r = optimal_anticode_size(&w, 1, 2).unwrap();
    assert_eq!((r.s, r.s_w, r.a_star), (2, 2, 2));
    assert_eq!(brute_a_star(&m, 2, 125).unwrap(), 4);
}
