//! Chordality recognition and the clique/separator structure of chordal graphs.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordalError {
    #[error("graph is not chordal (hole {0:?})")]
    NotChordal(Vec<usize>),
}

/// Outcome of a chordality test together with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chordality {
    /// Perfect elimination ordering: every vertex's later neighbours form a clique.
    Chordal(Vec<usize>),
    /// Induced cycle of length at least four.
    Hole(Vec<usize>),
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal(_))
    }
}

/// Maximum cardinality search. Returns vertices in elimination order, i.e. the
/// reverse of the visiting order, so that for chordal graphs the result is a
/// perfect elimination ordering.
pub fn mcs_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n + 1];
    buckets[0].extend(0..n);
    let mut top = 0;
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        while buckets[top].is_empty() {
            top -= 1;
        }
        let v = *buckets[top].iter().next().unwrap();
        buckets[top].remove(&v);
        done[v] = true;
        visit.push(v);
        for u in g.neighbors(v).iter() {
            if !done[u] {
                buckets[weight[u]].remove(&u);
                weight[u] += 1;
                buckets[weight[u]].insert(u);
                top = top.max(weight[u]);
            }
        }
    }
    visit.reverse();
    visit
}

/// Checks the perfect elimination property of `order`. Returns the first
/// vertex whose later neighbours are not a clique.
pub fn peo_violation(g: &Graph, order: &[usize]) -> Option<usize> {
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    order.iter().copied().find(|&v| {
        let later: VertexSet = g.neighbors(v).iter().filter(|&u| pos[u] > pos[v]).collect();
        !g.is_clique(&later)
    })
}

/// Searches for an induced cycle of length at least four. Returns `None` if
/// and only if `g` is chordal.
pub fn find_hole(g: &Graph) -> Option<Vec<usize>> {
    for v in g.vertices() {
        let nb = g.neighbors(v).to_vec();
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                if g.has_edge(x, y) {
                    continue;
                }
                let mut allowed = g.all().difference(&g.closed_neighborhood(&VertexSet::singleton(v)));
                allowed.insert(x);
                allowed.insert(y);
                if let Some(path) = g.shortest_path_within(x, y, &allowed) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

pub fn is_chordal(g: &Graph) -> Chordality {
    let order = mcs_order(g);
    match peo_violation(g, &order) {
        None => Chordality::Chordal(order),
        Some(_) => Chordality::Hole(find_hole(g).expect("failed elimination ordering implies a hole")),
    }
}

/// Maximal cliques of a chordal graph, read off a perfect elimination ordering.
pub fn maximal_cliques(g: &Graph) -> Result<Vec<VertexSet>, ChordalError> {
    let order = match is_chordal(g) {
        Chordality::Chordal(o) => o,
        Chordality::Hole(h) => return Err(ChordalError::NotChordal(h)),
    };
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let candidates: Vec<VertexSet> = order
        .iter()
        .map(|&v| {
            let mut c: VertexSet = g.neighbors(v).iter().filter(|&u| pos[u] > pos[v]).collect();
            c.insert(v);
            c
        })
        .collect();
    let mut out: Vec<VertexSet> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|d| d != *c && c.is_subset(d)))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Maximal cliques of an arbitrary graph (Bron–Kerbosch with pivoting).
pub fn maximal_cliques_general(g: &Graph) -> Vec<VertexSet> {
    fn expand(g: &Graph, r: &mut VertexSet, p: VertexSet, mut x: VertexSet, out: &mut Vec<VertexSet>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .union(&x)
            .iter()
            .max_by_key(|&u| p.intersection(g.neighbors(u)).len())
            .unwrap();
        let mut p = p;
        for v in p.difference(g.neighbors(pivot)).to_vec() {
            r.insert(v);
            expand(g, r, p.intersection(g.neighbors(v)), x.intersection(g.neighbors(v)), out);
            r.remove(v);
            p.remove(v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    if g.n() > 0 {
        expand(g, &mut VertexSet::new(), g.all(), VertexSet::new(), &mut out);
    }
    out.sort();
    out
}

/// All minimal separators, i.e. vertex sets with at least two full components.
///
/// Closure algorithm: seed with `N(C)` for the components `C` of `G - N[v]`,
/// then for each found `S` and `x ∈ S` add `N(C)` for the components of
/// `G - (S ∪ N(x))`, until nothing new appears.
pub fn minimal_separators(g: &Graph) -> Vec<VertexSet> {
    let mut found: BTreeSet<VertexSet> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let push = |s: VertexSet, found: &mut BTreeSet<VertexSet>, queue: &mut VecDeque<VertexSet>| {
        if found.insert(s.clone()) {
            queue.push_back(s);
        }
    };
    for v in g.vertices() {
        let closed = g.closed_neighborhood(&VertexSet::singleton(v));
        for c in g.components_within(&g.all().difference(&closed)) {
            push(g.neighborhood(&c), &mut found, &mut queue);
        }
    }
    while let Some(s) = queue.pop_front() {
        for x in s.iter() {
            let removed = s.union(g.neighbors(x));
            for c in g.components_within(&g.all().difference(&removed)) {
                push(g.neighborhood(&c), &mut found, &mut queue);
            }
        }
    }
    found
        .into_iter()
        .filter(|s| g.components_after_deletion(s).iter().filter(|(_, f)| *f).count() >= 2)
        .collect()
}

/// Dirac's criterion: chordal iff every minimal separator is a clique.
/// Returns the flag and a non-clique minimal separator on failure.
pub fn dirac_check(g: &Graph) -> (bool, Option<VertexSet>) {
    match minimal_separators(g).into_iter().find(|s| !g.is_clique(s)) {
        Some(s) => (false, Some(s)),
        None => (true, None),
    }
}

/// Whether `g` has no induced cycle longer than `r`; otherwise returns one.
pub fn is_r_chordal(g: &Graph, r: usize) -> (bool, Option<Vec<usize>>) {
    match long_induced_cycle(g, r) {
        Some(c) => (false, Some(c)),
        None => (true, None),
    }
}

/// Depth-first search over induced paths starting at their smallest vertex.
/// Reports the first induced cycle with more than `r` vertices.
fn long_induced_cycle(g: &Graph, r: usize) -> Option<Vec<usize>> {
    fn extend(g: &Graph, r: usize, path: &mut Vec<usize>, on_path: &mut VertexSet) -> Option<Vec<usize>> {
        let start = path[0];
        let last = *path.last().unwrap();
        for w in g.neighbors(last).iter() {
            if w <= start || on_path.contains(w) {
                continue;
            }
            // w may only touch the path at `last` and possibly at `start`.
            let touches: Vec<usize> = g.neighbors(w).intersection(on_path).to_vec();
            let closes = last != start && touches.contains(&start);
            let ok = touches.iter().all(|&t| t == last || t == start);
            if !ok {
                continue;
            }
            path.push(w);
            on_path.insert(w);
            if closes {
                if path.len() >= 4 && path.len() > r && path[1] < w {
                    return Some(path.clone());
                }
            } else if let Some(c) = extend(g, r, path, on_path) {
                return Some(c);
            }
            path.pop();
            on_path.remove(w);
        }
        None
    }
    for s in g.vertices() {
        let mut path = vec![s];
        let mut on = VertexSet::singleton(s);
        if let Some(c) = extend(g, r, &mut path, &mut on) {
            return Some(c);
        }
    }
    None
}

/// Failure witness for local chordality: a ball centre and a hole in its ball
/// (hole given in host indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalHole {
    pub center: usize,
    pub hole: Vec<usize>,
}

/// Whether every ball of radius `r/2` is chordal. The witness is the first
/// failing centre in canonical order.
pub fn is_r_locally_chordal(g: &Graph, r: usize) -> (bool, Option<LocalHole>) {
    let witnesses: Vec<Option<LocalHole>> = g
        .vertices()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&v| {
            let ball = g.ball(v, r);
            find_hole(&ball.subgraph).map(|h| LocalHole {
                center: v,
                hole: h.into_iter().map(|i| ball.host[i]).collect(),
            })
        })
        .collect();
    match witnesses.into_iter().flatten().next() {
        Some(w) => (false, Some(w)),
        None => (true, None),
    }
}
