//! Brute-force oracles shared by the integration suites. They use only the
//! graph's adjacency and plain collections.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use chordtd::graph::{Graph, VertexSet};

pub type Set = BTreeSet<usize>;

pub fn set(s: &VertexSet) -> Set {
    s.iter().collect()
}

pub fn adjacent(g: &Graph, u: usize, v: usize) -> bool {
    g.neighbors(u).contains(v)
}

/// Components of the subgraph induced on `allowed`.
pub fn components(g: &Graph, allowed: &Set) -> Vec<Set> {
    let mut seen = Set::new();
    let mut out = Vec::new();
    for &s in allowed {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = Set::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u).iter() {
                if allowed.contains(&v) && seen.insert(v) {
                    comp.insert(v);
                    queue.push_back(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

pub fn neighbourhood(g: &Graph, c: &Set) -> Set {
    c.iter().flat_map(|&u| g.neighbors(u).iter()).filter(|v| !c.contains(v)).collect()
}

pub fn is_clique(g: &Graph, s: &Set) -> bool {
    s.iter().all(|&u| s.iter().all(|&v| u == v || adjacent(g, u, v)))
}

fn all_vertices(g: &Graph) -> Set {
    (0..g.n()).collect()
}

/// Components of `G - s` whose neighbourhood is all of `s`.
pub fn full_components(g: &Graph, s: &Set) -> Vec<Set> {
    let rest: Set = all_vertices(g).difference(s).copied().collect();
    components(g, &rest).into_iter().filter(|c| &neighbourhood(g, c) == s).collect()
}

/// Every vertex set with at least two full components.
pub fn brute_minimal_separators(g: &Graph) -> Vec<Set> {
    let n = g.n();
    (0u32..1 << n)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect::<Set>())
        .filter(|s| full_components(g, s).len() >= 2)
        .collect()
}

/// Chordality by repeatedly deleting simplicial vertices.
pub fn chordal_by_simplicial(g: &Graph) -> bool {
    simplicial_order(g).is_some()
}

pub fn simplicial_order(g: &Graph) -> Option<Vec<usize>> {
    let mut left = all_vertices(g);
    let mut order = Vec::new();
    while !left.is_empty() {
        let v = *left.iter().find(|&&v| {
            let nb: Set = g.neighbors(v).iter().filter(|u| left.contains(u)).collect();
            is_clique(g, &nb)
        })?;
        left.remove(&v);
        order.push(v);
    }
    Some(order)
}

/// Whether `s` meets every path from `x` to `y`.
pub fn meets_all_paths(g: &Graph, s: &Set, x: &Set, y: &Set) -> bool {
    let rest: Set = all_vertices(g).difference(s).copied().collect();
    components(g, &rest).iter().all(|c| c.is_disjoint(x) || c.is_disjoint(y))
}

/// Smallest vertex set meeting every `x`-`y` path.
pub fn brute_min_separator_size(g: &Graph, x: &Set, y: &Set) -> usize {
    let n = g.n();
    let mut best = n;
    for m in 0u32..1 << n {
        let k = m.count_ones() as usize;
        if k >= best {
            continue;
        }
        let s: Set = (0..n).filter(|&v| m >> v & 1 == 1).collect();
        if meets_all_paths(g, &s, x, y) {
            best = k;
        }
    }
    best
}

/// Maximal cliques and a clique tree of a chordal graph: cliques read off a
/// simplicial elimination ordering, joined by a maximum-weight spanning tree
/// of the clique intersection graph.
pub fn clique_tree_oracle(g: &Graph) -> (Vec<Set>, Vec<(usize, usize)>) {
    let order = simplicial_order(g).expect("chordal");
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let candidates: Vec<Set> = order
        .iter()
        .map(|&v| {
            let mut c: Set = g.neighbors(v).iter().filter(|&u| pos[u] > pos[v]).collect();
            c.insert(v);
            c
        })
        .collect();
    let mut cliques: Vec<Set> = Vec::new();
    for c in &candidates {
        if !candidates.iter().any(|d| d != c && c.is_subset(d)) && !cliques.contains(c) {
            cliques.push(c.clone());
        }
    }
    let mut weighted = Vec::new();
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            let w = cliques[i].intersection(&cliques[j]).count();
            if w > 0 {
                weighted.push((w, i, j));
            }
        }
    }
    weighted.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut root: Vec<usize> = (0..cliques.len()).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        if root[x] != x {
            let r = find(root, root[x]);
            root[x] = r;
        }
        root[x]
    }
    let mut edges = Vec::new();
    for (_, i, j) in weighted {
        let (a, b) = (find(&mut root, i), find(&mut root, j));
        if a != b {
            root[a] = b;
            edges.push((i, j));
        }
    }
    (cliques, edges)
}

/// T1 and T2 for bags on a tree given by `edges`; also checks the tree.
pub fn td_valid(g: &Graph, bags: &[Set], edges: &[(usize, usize)]) -> bool {
    let t = bags.len();
    if edges.len() + 1 != t {
        return false;
    }
    let mut tree = Graph::empty(t);
    for &(a, b) in edges {
        tree.add_edge(a, b).expect("tree edge");
    }
    if components(&tree, &(0..t).collect()).len() != 1 {
        return false;
    }
    let covered_vertices = (0..g.n()).all(|v| bags.iter().any(|b| b.contains(&v)));
    let covered_edges = g.edges().iter().all(|&(u, v)| bags.iter().any(|b| b.contains(&u) && b.contains(&v)));
    let connected = (0..g.n()).all(|v| {
        let nodes: Set = (0..t).filter(|&i| bags[i].contains(&v)).collect();
        components(&tree, &nodes).len() <= 1
    });
    covered_vertices && covered_edges && connected
}

/// `{a, b}` and `{c, d}` are nested if some orientations satisfy
/// `a ⊆ c` and `b ⊇ d`.
pub fn nested(a: &Set, b: &Set, c: &Set, d: &Set) -> bool {
    [(a, b, c, d), (a, b, d, c), (b, a, c, d), (b, a, d, c)]
        .iter()
        .any(|(p, q, r, s)| p.is_subset(r) && s.is_subset(q))
}

/// Both strict sides contain a full component of `G - (A ∩ B)`.
pub fn tight(g: &Graph, a: &Set, b: &Set) -> bool {
    let sep: Set = a.intersection(b).copied().collect();
    let full = full_components(g, &sep);
    let strict_a: Set = a.difference(&sep).copied().collect();
    let strict_b: Set = b.difference(&sep).copied().collect();
    full.iter().any(|c| c.is_subset(&strict_a)) && full.iter().any(|c| c.is_subset(&strict_b))
}

/// `(A, B)` covers the vertices and no edge joins `A \ B` to `B \ A`.
pub fn is_separation(g: &Graph, a: &Set, b: &Set) -> bool {
    let all = all_vertices(g);
    let union: Set = a.union(b).copied().collect();
    union == all
        && g.edges().iter().all(|&(u, v)| {
            let (ua, ub) = (a.contains(&u), b.contains(&u));
            let (va, vb) = (a.contains(&v), b.contains(&v));
            !((ua && !ub && vb && !va) || (ub && !ua && va && !vb))
        })
}

pub fn is_automorphism(g: &Graph, p: &[usize]) -> bool {
    let image: Set = p.iter().copied().collect();
    image.len() == g.n()
        && p.len() == g.n()
        && g.edges().iter().all(|&(u, v)| adjacent(g, p[u], p[v]))
}

pub fn map(s: &Set, p: &[usize]) -> Set {
    s.iter().map(|&v| p[v]).collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}
