mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use chordtd::chordal::{dirac_check, is_chordal, maximal_cliques, minimal_separators};
use chordtd::covers::{cycle_with_z, derive_window, lift_clique, project_clique, Word};
use chordtd::generators::{random_chordal, random_graph};
use chordtd::graph::{Graph, VertexSet};
use chordtd::nested::{construct_n, construct_n_with, ConstructOptions};
use chordtd::separations::{beta, min_clique_separator, relate, Relation, Separation};
use chordtd::symmetry::{compose, Permutable};
use chordtd::treedec::{build_td_from_nested, induced_separations};

use common::*;

fn small_graph() -> impl Strategy<Value = Graph> {
    (3usize..=9, 0.1f64..0.8, any::<u64>()).prop_map(|(n, p, seed)| random_graph(n, p, seed))
}

fn chordal_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3usize..=max_n, 2usize..=5, any::<u64>()).prop_map(|(n, k, seed)| random_chordal(n, k, seed))
}

fn relabel(g: &Graph, p: &[usize]) -> Graph {
    let mut h = Graph::empty(g.n());
    for (u, v) in g.edges() {
        h.add_edge(p[u], p[v]).unwrap();
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vertex_set_order_matches_sorted_lists(a in proptest::collection::btree_set(0usize..200, 0..12),
                                             b in proptest::collection::btree_set(0usize..200, 0..12)) {
        let (x, y): (VertexSet, VertexSet) = (a.iter().copied().collect(), b.iter().copied().collect());
        let (va, vb): (Vec<usize>, Vec<usize>) = (a.into_iter().collect(), b.into_iter().collect());
        prop_assert_eq!(x.cmp(&y), va.cmp(&vb));
    }

    #[test]
    fn dirac_equivalence(g in small_graph()) {
        let chordal = is_chordal(&g).is_chordal();
        prop_assert_eq!(chordal, chordal_by_simplicial(&g));
        prop_assert_eq!(dirac_check(&g).0, chordal);
        let lib: BTreeSet<Set> = minimal_separators(&g).iter().map(set).collect();
        let brute: BTreeSet<Set> = brute_minimal_separators(&g).into_iter().collect();
        prop_assert_eq!(lib, brute);
    }

    #[test]
    fn menger_against_brute_force(g in small_graph(), xs in any::<u64>(), ys in any::<u64>()) {
        let pick = |bits: u64| -> VertexSet {
            let v = (bits as usize) % g.n();
            let mut k = VertexSet::singleton(v);
            for u in g.neighbors(v).iter() {
                if bits >> (8 + u) & 1 == 1 && k.iter().all(|w| g.has_edge(u, w)) {
                    k.insert(u);
                }
            }
            k
        };
        let (x, y) = (pick(xs), pick(ys));
        let m = min_clique_separator(&g, &x, &y);
        prop_assert_eq!(m.order, brute_min_separator_size(&g, &set(&x), &set(&y)));
        prop_assert_eq!(m.paths.len(), m.order);
    }

    #[test]
    fn full_components_have_a_complete_vertex(g in chordal_graph(12)) {
        for s in brute_minimal_separators(&g) {
            for c in full_components(&g, &s) {
                prop_assert!(c.iter().any(|&v| s.iter().all(|&u| adjacent(&g, u, v))));
            }
        }
    }

    #[test]
    fn bottleneck_members_are_tight_and_small(g in chordal_graph(16)) {
        let cliques = maximal_cliques(&g).unwrap();
        for a in 0..cliques.len() {
            for b in a + 1..cliques.len() {
                let bn = beta(&g, &cliques[a], &cliques[b]).unwrap();
                prop_assert!(bn.order < cliques[a].len().min(cliques[b].len()));
                for s in &bn.separations {
                    let (sa, sb) = (set(s.a()), set(s.b()));
                    prop_assert!(tight(&g, &sa, &sb));
                    prop_assert!(g.is_clique(&s.separator()));
                }
            }
        }
    }

    #[test]
    fn nontight_option_changes_nothing_on_chordal_graphs(g in chordal_graph(16)) {
        prop_assume!(g.is_connected());
        let mut opts = ConstructOptions::default();
        opts.beta.include_nontight = true;
        prop_assert_eq!(construct_n_with(&g, opts).unwrap().union, construct_n(&g).unwrap().union);
    }

    #[test]
    fn nested_set_is_relabeling_invariant(g in chordal_graph(14), seed in any::<u64>()) {
        prop_assume!(g.is_connected());
        let mut p: Vec<usize> = (0..g.n()).collect();
        let mut s = seed;
        for i in (1..p.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            p.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = relabel(&g, &p);
        let ng: BTreeSet<Separation> = construct_n(&g).unwrap().union.iter().map(|s| s.map(&p)).collect();
        prop_assert_eq!(ng, construct_n(&h).unwrap().union);
    }

    #[test]
    fn tree_of_nested_set_induces_it(g in chordal_graph(20)) {
        prop_assume!(g.is_connected());
        let n = construct_n(&g).unwrap().union;
        let td = build_td_from_nested(&g, &n).unwrap();
        let induced: BTreeSet<Separation> = induced_separations(&td).into_values().collect();
        prop_assert_eq!(td.len(), n.len() + 1);
        prop_assert_eq!(&induced, &n);
        for s in &n {
            for t in &n {
                prop_assert_eq!(relate(s, t), Relation::Nested);
            }
        }
    }

    #[test]
    fn permutation_action_composes(g in chordal_graph(12), a in any::<u64>(), b in any::<u64>()) {
        let shuffle = |mut s: u64| {
            let mut p: Vec<usize> = (0..g.n()).collect();
            for i in (1..p.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                p.swap(i, (s >> 33) as usize % (i + 1));
            }
            p
        };
        let (p, q) = (shuffle(a), shuffle(b));
        for s in construct_n(&g).map(|l| l.union).unwrap_or_default() {
            prop_assert_eq!(s.permute(&p).permute(&q), s.permute(&compose(&q, &p)));
        }
    }

    #[test]
    fn deck_translations_compose(a in proptest::collection::vec(-1i32..=1, 0..5),
                                 b in proptest::collection::vec(-1i32..=1, 0..5),
                                 x in 0usize..60) {
        let letters = |v: Vec<i32>| Word::from_letters(v.into_iter().filter(|&l| l != 0));
        let (a, b) = (letters(a), letters(b));
        let w = derive_window(&cycle_with_z(6), 6);
        let x = x % w.graph.n();
        if let Some(bx) = w.translate(&b, x) {
            if let Some(abx) = w.translate(&a, bx) {
                prop_assert_eq!(Some(abx), w.translate(&a.mul(&b), x));
            }
        }
        prop_assert_eq!(a.mul(&a.inverse()), Word::identity());
        // translations are graph automorphisms where defined
        for y in w.graph.neighbors(x).iter() {
            if let (Some(ax), Some(ay)) = (w.translate(&a, x), w.translate(&a, y)) {
                prop_assert!(w.graph.has_edge(ax, ay));
            }
        }
    }

    #[test]
    fn window_cliques_project_and_move_freely(edge in 0usize..6, sheet in -2i32..=2, shift in 1i32..=2) {
        let pres = cycle_with_z(6);
        let w = derive_window(&pres, 6);
        let (u, v) = pres.base.edges()[edge];
        let base_edge: VertexSet = [u, v].into_iter().collect();
        let through = w.lookup(&(u, Word::from_letters((0..sheet.abs()).map(|_| sheet.signum())))).unwrap();
        let lift = lift_clique(&w, &base_edge, through).unwrap();
        prop_assert_eq!(project_clique(&w, &lift).unwrap(), base_edge);
        let gamma = Word::from_letters((0..shift).map(|_| 1));
        let moved: Option<VertexSet> = lift.iter().map(|x| w.translate(&gamma, x)).collect();
        if let Some(m) = moved {
            prop_assert!(m.is_disjoint(&lift));
        }
    }
}
