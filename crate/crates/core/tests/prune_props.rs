mod common;

use proptest::prelude::*;
use qhorder::graph::{directed_cycle, disjoint_union, weak_components, Graph, Kind};
use qhorder::hom::find_hom;
use qhorder::prune::{
    prune_closure, replay, rule_pair_walk, rule_support, walk_table, Justification, Problem, PruneConfig, RuleKind,
    TraceEntry, Verdict, ZeroLedger,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random(seed: u64, directed: bool, n: usize, p: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = if directed { Kind::Directed } else { Kind::Undirected };
    common::random_graph(&mut rng, kind, n, p)
}

fn planted(seed: u64, directed: bool, nx: usize, ny: usize) -> (Graph, Graph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = if directed { Kind::Directed } else { Kind::Undirected };
    let y = common::random_graph(&mut rng, kind, ny, 0.5);
    let (x, f) = common::planted_instance(&mut rng, &y, nx, 0.7);
    (x, y, f)
}

const WALK_RULES: [RuleKind; 3] = [RuleKind::ClosedWalk, RuleKind::Support, RuleKind::PairWalk];

fn subset(mask: u8) -> Vec<RuleKind> {
    WALK_RULES.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| *r).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn walk_table_matches_matrix_powers(seed: u64, directed: bool, n in 0usize..7, bound in 0usize..20) {
        let g = random(seed, directed, n, 0.35);
        let t = walk_table(&g, bound);
        let naive = common::naive_walks(&g, bound);
        for (l, level) in naive.iter().enumerate() {
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(t.walk(u, v, l), level[u][v], "walk({}, {}, {})", u, v, l);
                }
            }
        }
    }

    #[test]
    fn witness_pairs_are_never_zeroed(seed: u64, directed: bool, nx in 1usize..7, ny in 1usize..6, mask in 1u8..8) {
        let (x, y, f) = planted(seed, directed, nx, ny);
        let cfg = PruneConfig::with_rules(&subset(mask));
        let l = prune_closure(&Problem::new(&x, &y), &cfg).unwrap();
        for (i, &t) in f.iter().enumerate() {
            prop_assert!(!l.is_zero(i, t));
        }
        prop_assert_eq!(l.verdict(), Verdict::Unknown);
    }

    #[test]
    fn more_rules_never_shrink_the_zero_set(seed: u64, directed: bool, nx in 1usize..6, ny in 1usize..6, a in 0u8..8, b in 0u8..8) {
        let (x, y) = (random(seed, directed, nx, 0.5), random(seed ^ 9, directed, ny, 0.4));
        let p = Problem::new(&x, &y);
        let small = prune_closure(&p, &PruneConfig::with_rules(&subset(a & b))).unwrap();
        let big = prune_closure(&p, &PruneConfig::with_rules(&subset(a | b))).unwrap();
        prop_assert!(small.zeros_subset_of(&big));
    }

    #[test]
    fn fixed_point_ignores_rule_order(seed: u64, directed: bool, nx in 1usize..6, ny in 1usize..6, perm in 0usize..6) {
        let (x, y) = (random(seed, directed, nx, 0.5), random(seed ^ 5, directed, ny, 0.4));
        let p = Problem::new(&x, &y);
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let reordered: Vec<RuleKind> = orders[perm].iter().map(|&i| WALK_RULES[i]).collect();
        let base = prune_closure(&p, &PruneConfig::with_rules(&WALK_RULES)).unwrap();
        let other = prune_closure(&p, &PruneConfig::with_rules(&reordered)).unwrap();
        prop_assert!(base.same_zeros(&other));
    }

    #[test]
    fn traces_replay(seed: u64, directed: bool, nx in 1usize..6, ny in 1usize..6, split: bool) {
        let x = random(seed, directed, nx, 0.7);
        let y = random(seed ^ 3, directed, ny, 0.3);
        let p = Problem::new(&x, &y);
        let cfg = PruneConfig { split_components: split, ..Default::default() };
        let l = prune_closure(&p, &cfg).unwrap();
        let again = replay(&p, &cfg, l.trace()).unwrap();
        prop_assert!(again.same_zeros(&l));
    }

    #[test]
    fn support_sweeps_reach_the_driver_fixed_point(seed: u64, directed: bool, nx in 1usize..6, ny in 1usize..6) {
        let (x, y) = (random(seed, directed, nx, 0.5), random(seed ^ 11, directed, ny, 0.35));
        let mut ledger = ZeroLedger::new(x.vertex_count(), y.vertex_count());
        loop {
            let new = rule_support(&x, &y, &ledger);
            if new.is_empty() {
                break;
            }
            for e in new {
                ledger.insert(e);
            }
        }
        let cfg = PruneConfig { split_components: false, ..PruneConfig::with_rules(&[RuleKind::Support]) };
        let driven = prune_closure(&Problem::new(&x, &y), &cfg).unwrap();
        prop_assert!(driven.same_zeros(&ledger));
    }

    #[test]
    fn component_split_matches_branches(seed: u64, nx in 1usize..5) {
        let x = random(seed, true, nx, 0.8);
        prop_assume!(weak_components(&x).len() == 1);
        let parts = [random(seed ^ 1, true, 3, 0.5), random(seed ^ 2, true, 3, 0.5)];
        let y = disjoint_union(&parts).unwrap();
        let whole = prune_closure(&Problem::new(&x, &y), &PruneConfig::default()).unwrap().verdict();
        let branches: Vec<Verdict> = parts
            .iter()
            .map(|part| prune_closure(&Problem::new(&x, part), &PruneConfig::default()).unwrap().verdict())
            .collect();
        if branches.iter().all(|v| *v == Verdict::Infeasible) {
            prop_assert_eq!(whole, Verdict::Infeasible);
        }
        if find_hom(&x, &y).unwrap().is_some() {
            prop_assert_eq!(whole, Verdict::Unknown);
        }
    }
}

#[test]
fn cycles_infeasible_exactly_without_divisibility() {
    for n in 2..=12 {
        for m in 2..=12 {
            let (cn, cm) = (directed_cycle(n).unwrap(), directed_cycle(m).unwrap());
            let cfg = PruneConfig { bound: Some(n * m), ..Default::default() };
            let l = prune_closure(&Problem::new(&cn, &cm), &cfg).unwrap();
            assert_eq!(l.verdict() == Verdict::Infeasible, n % m != 0, "C{n} -> C{m}");
        }
    }
}

#[test]
fn aligned_products_of_cycle_homs_are_not_flagged() {
    for (n, m) in [(2, 2), (4, 2)] {
        let (cn, cm) = (directed_cycle(n).unwrap(), directed_cycle(m).unwrap());
        let f = |i: usize| i % m;
        let pairs: Vec<_> = (0..n).flat_map(|a| (0..n).map(move |b| ((a, f(a)), (b, f(b))))).collect();
        assert!(rule_pair_walk(&cn, &cm, 4, &pairs).is_empty(), "C{n} -> C{m}");
    }
    // Off the homomorphism the lemma does flag products, e.g. at length 0.
    let c2 = directed_cycle(2).unwrap();
    let flagged = rule_pair_walk(&c2, &c2, 4, &[((0, 0), (0, 1))]);
    assert_eq!(flagged[0].length, 0);
}

#[test]
fn triangle_into_edge_is_infeasible_by_odd_closed_walk() {
    let k3 = Graph::from_parts(Kind::Undirected, &["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
    let k2 = Graph::from_parts(Kind::Undirected, &["u", "v"], &[("u", "v")]).unwrap();
    let l = prune_closure(&Problem::new(&k3, &k2), &PruneConfig::default()).unwrap();
    assert_eq!(l.verdict(), Verdict::Infeasible);
    assert!(l.trace().iter().all(|e| e.justification == Justification::ClosedWalk { length: 3 }));
}

#[test]
fn seeds_are_checked_on_replay() {
    let c3 = directed_cycle(3).unwrap();
    let cfg = PruneConfig { seeds: vec![(0, 1)], ..Default::default() };
    let p = Problem::new(&c3, &c3);
    let l = prune_closure(&p, &cfg).unwrap();
    assert!(l.is_zero(0, 1));
    let forged = [TraceEntry::new(0, 2, Justification::Seed)];
    assert!(replay(&p, &cfg, &forged).is_err());
}
