//! The canonical nested set `N(G)` built level by level from the bottlenecks
//! of all pairs of distinct maximal cliques.
//!
//! For each order `k` (ascending) the bottlenecks of order `k` are collected,
//! their union `S^k` is formed, and from every bottleneck the members nested
//! with all lower levels and crossing the fewest members of `S^k` are kept.
//! No tie-breaking happens: every minimiser is kept.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::chordal::{is_chordal, maximal_cliques, maximal_cliques_general, minimal_separators};
use crate::graph::{Graph, VertexSet};
use crate::separations::{beta_with, SeparatorIndex, classify, relate, BetaOptions, Relation, Separation, SeparationError};
use crate::symmetry::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NestedError {
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph is not connected")]
    Disconnected,
    #[error("selected separations {0:?} and {1:?} cross")]
    NestednessViolation(Separation, Separation),
    #[error("no member of the bottleneck for cliques {0:?}, {1:?} survives selection")]
    EmptyBottleneckSelection(VertexSet, VertexSet),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

/// Number of members of `pool` that `s` crosses.
pub fn crossing_count(s: &Separation, pool: &BTreeSet<Separation>) -> usize {
    pool.iter().filter(|t| relate(s, t) == Relation::Crossing).count()
}

/// Output of the level construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedSetLevels {
    /// `k -> N^k(G)`
    pub levels: BTreeMap<usize, BTreeSet<Separation>>,
    /// `N(G)`
    pub union: BTreeSet<Separation>,
    /// For each member, the clique pairs (indices into `cliques`) whose
    /// bottleneck selected it.
    pub provenance: BTreeMap<Separation, Vec<(usize, usize)>>,
    pub cliques: Vec<VertexSet>,
    /// `k -> |S^k|`
    pub pool_sizes: BTreeMap<usize, usize>,
    /// Selected members dropped for crossing another selected member of the
    /// same level. Only non-chordal input in relaxed mode gets here.
    pub discarded: BTreeSet<Separation>,
}

impl NestedSetLevels {
    pub fn below(&self, k: usize) -> BTreeSet<Separation> {
        self.levels.range(..k).flat_map(|(_, l)| l.iter().cloned()).collect()
    }
}

/// Options for [`construct_n_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstructOptions {
    pub beta: BetaOptions,
}

/// `N(G)` for a connected chordal graph.
pub fn construct_n(g: &Graph) -> Result<NestedSetLevels, NestedError> {
    construct_n_with(g, ConstructOptions::default())
}

pub fn construct_n_with(g: &Graph, opts: ConstructOptions) -> Result<NestedSetLevels, NestedError> {
    if !g.is_connected() {
        return Err(NestedError::Disconnected);
    }
    let chordal = is_chordal(g).is_chordal();
    if !chordal && !opts.beta.allow_nonchordal {
        return Err(NestedError::NotChordal);
    }
    let cliques = if chordal {
        maximal_cliques(g).map_err(|_| NestedError::NotChordal)?
    } else {
        maximal_cliques_general(g)
    };
    let seps = if chordal {
        SeparatorIndex::new(g, &minimal_separators(g))
    } else {
        SeparatorIndex::empty()
    };
    let mut beta_opts = opts.beta;
    beta_opts.allow_nonchordal = !chordal;

    let pairs: Vec<(usize, usize)> = (0..cliques.len())
        .flat_map(|i| (i + 1..cliques.len()).map(move |j| (i, j)))
        .collect();
    let bottlenecks = pairs
        .par_iter()
        .map(|&(i, j)| beta_with(g, &cliques[i], &cliques[j], &seps, beta_opts).map(|b| ((i, j), b)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut by_order: BTreeMap<usize, Vec<((usize, usize), Vec<Separation>)>> = BTreeMap::new();
    for (pair, b) in bottlenecks {
        // bottlenecks without proper tight members only occur on non-chordal input
        if b.separations.is_empty() {
            continue;
        }
        by_order.entry(b.order).or_default().push((pair, b.separations));
    }

    let mut levels: BTreeMap<usize, BTreeSet<Separation>> = BTreeMap::new();
    let mut provenance: BTreeMap<Separation, Vec<(usize, usize)>> = BTreeMap::new();
    let mut pool_sizes = BTreeMap::new();
    let mut lower: Vec<Separation> = Vec::new();
    let mut discarded = BTreeSet::new();
    for (&k, group) in &by_order {
        let mut pool: Vec<&Separation> = group.iter().flat_map(|(_, s)| s.iter()).collect();
        pool.sort();
        pool.dedup();
        pool_sizes.insert(k, pool.len());
        let id = |s: &Separation| pool.binary_search(&s).expect("member of the pool");
        let crossings: Vec<usize> = pool
            .par_iter()
            .map(|s| pool.iter().filter(|t| relate(s, t) == Relation::Crossing).count())
            .collect();
        let nested_below: Vec<bool> = pool
            .par_iter()
            .map(|s| lower.iter().all(|t| relate(s, t) == Relation::Nested))
            .collect();
        let mut selected: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for ((i, j), members) in group {
            let candidates: Vec<usize> = members.iter().map(id).filter(|&m| nested_below[m]).collect();
            let Some(best) = candidates.iter().map(|&m| crossings[m]).min() else {
                if chordal {
                    return Err(NestedError::EmptyBottleneckSelection(cliques[*i].clone(), cliques[*j].clone()));
                }
                continue;
            };
            for m in candidates.into_iter().filter(|&m| crossings[m] == best) {
                selected.entry(m).or_default().push((*i, *j));
            }
        }
        let mut level = BTreeSet::new();
        for (m, pairs) in selected {
            level.insert(pool[m].clone());
            provenance.insert(pool[m].clone(), pairs);
        }
        let lv: Vec<Separation> = level.iter().cloned().collect();
        for (a, s) in lv.iter().enumerate() {
            for t in &lv[a + 1..] {
                if relate(s, t) == Relation::Crossing {
                    if chordal {
                        return Err(NestedError::NestednessViolation(s.clone(), t.clone()));
                    }
                    // without chordality nothing forces nestedness; both are
                    // dropped so the result stays invariant
                    level.remove(s);
                    level.remove(t);
                    discarded.insert(s.clone());
                    discarded.insert(t.clone());
                }
            }
        }
        lower.extend(level.iter().cloned());
        levels.insert(k, level);
    }
    let union: BTreeSet<Separation> = levels.values().flatten().cloned().collect();
    provenance.retain(|s, _| union.contains(s));
    Ok(NestedSetLevels {
        discarded,
        levels,
        union,
        provenance,
        cliques,
        pool_sizes,
    })
}

/// Outcome of [`verify_n`]; every list holds witnesses for a failed check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NestedReport {
    pub crossing_pairs: Vec<(Separation, Separation)>,
    pub not_tight: Vec<Separation>,
    pub non_clique_separators: Vec<Separation>,
    /// `(generator index, separation whose image is missing)`
    pub not_invariant: Vec<(usize, Separation)>,
    /// Pairs of maximal cliques no member distinguishes efficiently.
    pub undistinguished: Vec<(VertexSet, VertexSet)>,
    /// Largest number of separators containing a single vertex.
    pub max_separators_per_vertex: usize,
}

impl NestedReport {
    pub fn nested(&self) -> bool {
        self.crossing_pairs.is_empty()
    }
    pub fn tight_with_clique_separators(&self) -> bool {
        self.not_tight.is_empty() && self.non_clique_separators.is_empty()
    }
    pub fn invariant(&self) -> bool {
        self.not_invariant.is_empty()
    }
    pub fn distinguishes_all(&self) -> bool {
        self.undistinguished.is_empty()
    }
    pub fn ok(&self) -> bool {
        self.nested() && self.tight_with_clique_separators() && self.invariant() && self.distinguishes_all()
    }
}

/// Checks a set of separations against the properties `N(G)` must have:
/// nested, tight with clique separators, invariant under the given
/// automorphisms, and efficiently distinguishing every two maximal cliques.
pub fn verify_n(g: &Graph, n: &BTreeSet<Separation>, aut: &[Permutation]) -> NestedReport {
    let mut rep = NestedReport::default();
    let members: Vec<&Separation> = n.iter().collect();
    for (i, s) in members.iter().enumerate() {
        for t in &members[i + 1..] {
            if relate(s, t) == Relation::Crossing {
                rep.crossing_pairs.push(((*s).clone(), (*t).clone()));
            }
        }
        let c = classify(g, s);
        if !c.tight || !c.proper {
            rep.not_tight.push((*s).clone());
        }
        if !g.is_clique(&s.separator()) {
            rep.non_clique_separators.push((*s).clone());
        }
    }
    for (gi, perm) in aut.iter().enumerate() {
        for s in &members {
            if !n.contains(&s.map(perm)) {
                rep.not_invariant.push((gi, (*s).clone()));
            }
        }
    }
    let cliques = maximal_cliques_general(g);
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            let (x, y) = (&cliques[i], &cliques[j]);
            let k = crate::separations::min_clique_separator(g, x, y).order;
            if !members.iter().any(|s| s.order() == k && s.distinguishes(x, y)) {
                rep.undistinguished.push((x.clone(), y.clone()));
            }
        }
    }
    let mut per_vertex = vec![0usize; g.n()];
    for s in &members {
        for v in s.separator().iter() {
            per_vertex[v] += 1;
        }
    }
    rep.max_separators_per_vertex = per_vertex.into_iter().max().unwrap_or(0);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(t: usize) -> Graph {
        let mut g = Graph::with_vertices(["c"]);
        for i in 1..=t {
            let l = g.add_vertex(i.to_string());
            g.add_edge(0, l).unwrap();
        }
        g
    }

    fn star_split(g: &Graph, leaf: usize) -> Separation {
        let a: VertexSet = [0, leaf].into_iter().collect();
        let mut b = g.all();
        b.remove(leaf);
        Separation::new(g, a, b).unwrap()
    }

    fn all_star_separations(g: &Graph) -> BTreeSet<Separation> {
        let t = g.n() - 1;
        let mut pool = BTreeSet::new();
        for mask in 1..(1u32 << t) - 1 {
            let a: VertexSet = std::iter::once(0).chain((0..t).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)).collect();
            let b: VertexSet = std::iter::once(0).chain((0..t).filter(|i| mask >> i & 1 == 0).map(|i| i + 1)).collect();
            pool.insert(Separation::new(g, a, b).unwrap());
        }
        pool
    }

    #[test]
    fn crossing_counts() {
        let k14 = star(4);
        let s = star_split(&k14, 1);
        assert_eq!(crossing_count(&s, &BTreeSet::from([s.clone()])), 0);
        let pool = all_star_separations(&k14);
        assert_eq!(pool.len(), 7);
        assert_eq!(crossing_count(&s, &pool), 0);
        let bal = Separation::new(&k14, k14.set_of(&["c", "1", "2"]).unwrap(), k14.set_of(&["c", "3", "4"]).unwrap()).unwrap();
        assert_eq!(crossing_count(&bal, &pool), 2);
    }

    #[test]
    fn star_gives_star_splits() {
        for t in 3..=5 {
            let g = star(t);
            let n = construct_n(&g).unwrap();
            let expect: BTreeSet<Separation> = (1..=t).map(|l| star_split(&g, l)).collect();
            assert_eq!(n.union, expect, "t = {t}");
            assert_eq!(n.levels.keys().copied().collect::<Vec<_>>(), vec![1]);
        }
    }

    #[test]
    fn two_triangles_and_complete() {
        let g = Graph::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        let n = construct_n(&g).unwrap();
        let s = Separation::new(&g, g.set_of(&["a", "b", "c"]).unwrap(), g.set_of(&["b", "c", "d"]).unwrap()).unwrap();
        assert_eq!(n.union, BTreeSet::from([s.clone()]));
        assert_eq!(n.provenance[&s], vec![(0, 1)]);

        let mut k4 = Graph::empty(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v).unwrap();
            }
        }
        assert!(construct_n(&k4).unwrap().union.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let c4 = Graph::from_pairs(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        assert_eq!(construct_n(&c4), Err(NestedError::NotChordal));
        let two = Graph::from_pairs(&[("a", "b"), ("c", "d")]).unwrap();
        assert_eq!(construct_n(&two), Err(NestedError::Disconnected));
    }

    #[test]
    fn verification_and_mutation() {
        let g = star(3);
        let n = construct_n(&g).unwrap();
        let swaps: Vec<Permutation> = vec![vec![0, 2, 1, 3], vec![0, 1, 3, 2]];
        let rep = verify_n(&g, &n.union, &swaps);
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.max_separators_per_vertex, 3);

        let mut dropped = n.union.clone();
        dropped.remove(&star_split(&g, 3));
        let rep = verify_n(&g, &dropped, &swaps);
        assert!(!rep.invariant());
        // the two remaining splits still separate every pair of leaf edges
        assert!(rep.distinguishes_all());
        assert!(rep.nested());
        dropped.remove(&star_split(&g, 2));
        let rep = verify_n(&g, &dropped, &swaps);
        assert!(!rep.invariant());
        assert_eq!(rep.undistinguished.len(), 1);

        let tt = Graph::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        let n = construct_n(&tt).unwrap();
        // a<->d together with b<->c maps the single separation to itself with sides exchanged
        let rep = verify_n(&tt, &n.union, &[vec![3, 2, 1, 0]]);
        assert!(rep.ok());
    }
}
