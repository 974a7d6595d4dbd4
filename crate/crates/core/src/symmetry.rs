//! Automorphism groups of small graphs by colour refinement and
//! individualisation, orbit closures, and the canonicity check for
//! tree-decompositions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::treedec::TreeDecomposition;

/// A vertex permutation: `p[v]` is the image of `v`.
pub type Permutation = Vec<usize>;

pub const DEFAULT_VERTEX_BOUND: usize = 64;
pub const GROUP_ORDER_BOUND: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("graph has {0} vertices, above the bound of {1}")]
    TooLarge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupOrder {
    Exact(u128),
    Large,
}

impl std::fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupOrder::Exact(n) => write!(f, "{n}"),
            GroupOrder::Large => write!(f, "large"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSet {
    pub generators: Vec<Permutation>,
    pub group_order: GroupOrder,
    /// Base points of the stabiliser chain and the orbit length at each level.
    pub base: Vec<usize>,
    pub orbit_lengths: Vec<usize>,
}

impl AutomorphismSet {
    pub fn trivial() -> Self {
        AutomorphismSet {
            generators: Vec::new(),
            group_order: GroupOrder::Exact(1),
            base: Vec::new(),
            orbit_lengths: Vec::new(),
        }
    }

    pub fn from_generators(generators: Vec<Permutation>) -> Self {
        AutomorphismSet {
            generators,
            group_order: GroupOrder::Large,
            base: Vec::new(),
            orbit_lengths: Vec::new(),
        }
    }
}

pub fn is_automorphism(g: &Graph, p: &[usize]) -> bool {
    if p.len() != g.n() {
        return false;
    }
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    g.vertices().all(|v| &g.neighbors(v).map(p) == g.neighbors(p[v]))
}

pub fn compose(outer: &[usize], inner: &[usize]) -> Permutation {
    inner.iter().map(|&v| outer[v]).collect()
}

pub fn inverse(p: &[usize]) -> Permutation {
    let mut inv = vec![0; p.len()];
    for (v, &w) in p.iter().enumerate() {
        inv[w] = v;
    }
    inv
}

type Trace = Vec<Vec<(u32, Vec<u32>, usize)>>;

/// Refines a colouring until stable. Colours are renamed by the rank of
/// their signature so that isomorphic inputs produce equal colourings and
/// equal traces.
fn refine(g: &Graph, mut colour: Vec<u32>) -> (Vec<u32>, Trace) {
    let mut trace = Vec::new();
    let mut classes = count_classes(&colour);
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = g
            .vertices()
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|u| colour[u]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let mut distinct: BTreeMap<&(u32, Vec<u32>), usize> = BTreeMap::new();
        for s in &sigs {
            *distinct.entry(s).or_default() += 1;
        }
        let rank: BTreeMap<&(u32, Vec<u32>), u32> = distinct.keys().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        trace.push(distinct.iter().map(|(s, &c)| (s.0, s.1.clone(), c)).collect());
        colour = sigs.iter().map(|s| rank[s]).collect();
        let now = distinct.len();
        if now == classes {
            return (colour, trace);
        }
        classes = now;
    }
}

fn count_classes(c: &[u32]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

fn individualise(colour: &[u32], v: usize) -> Vec<u32> {
    colour
        .iter()
        .enumerate()
        .map(|(u, &c)| 2 * c + u32::from(u == v))
        .collect()
}

fn is_discrete(c: &[u32]) -> bool {
    count_classes(c) == c.len()
}

/// First smallest non-singleton cell.
fn target_cell(c: &[u32]) -> Option<Vec<usize>> {
    let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &k) in c.iter().enumerate() {
        cells.entry(k).or_default().push(v);
    }
    cells.into_values().filter(|cell| cell.len() > 1).min_by_key(|cell| cell.len())
}

fn cell_of(c: &[u32], v: usize) -> Vec<usize> {
    (0..c.len()).filter(|&u| c[u] == c[v]).collect()
}

fn colouring_after(g: &Graph, points: &[usize]) -> (Vec<u32>, Vec<Trace>) {
    let (mut c, t) = refine(g, vec![0; g.n()]);
    let mut traces = vec![t];
    for &p in points {
        let (c2, t) = refine(g, individualise(&c, p));
        c = c2;
        traces.push(t);
    }
    (c, traces)
}

/// Searches for an automorphism extending the partial map `left[i] -> right[i]`.
fn extend(g: &Graph, left: &[u32], right: &[u32]) -> Option<Permutation> {
    if is_discrete(left) {
        let mut by_colour = vec![0usize; g.n()];
        for (v, &k) in right.iter().enumerate() {
            by_colour[k as usize] = v;
        }
        let p: Permutation = left.iter().map(|&k| by_colour[k as usize]).collect();
        return is_automorphism(g, &p).then_some(p);
    }
    let cell = target_cell(left)?;
    let v = cell[0];
    let rcell = cell_of(right, (0..right.len()).find(|&u| right[u] == left[v])?);
    let (l2, lt) = refine(g, individualise(left, v));
    for w in rcell {
        let (r2, rt) = refine(g, individualise(right, w));
        if rt == lt {
            if let Some(p) = extend(g, &l2, &r2) {
                return Some(p);
            }
        }
    }
    None
}

fn orbit_of(v: usize, gens: &[Permutation]) -> BTreeSet<usize> {
    let mut orbit = BTreeSet::from([v]);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for p in gens {
            if orbit.insert(p[x]) {
                queue.push_back(p[x]);
            }
        }
    }
    orbit
}

pub fn automorphism_generators(g: &Graph) -> Result<AutomorphismSet, SymmetryError> {
    automorphism_generators_bounded(g, DEFAULT_VERTEX_BOUND)
}

pub fn automorphism_generators_bounded(g: &Graph, bound: usize) -> Result<AutomorphismSet, SymmetryError> {
    if g.n() > bound {
        return Err(SymmetryError::TooLarge(g.n(), bound));
    }
    if g.n() == 0 {
        return Ok(AutomorphismSet::trivial());
    }
    let mut base = Vec::new();
    let (mut c, _) = refine(g, vec![0; g.n()]);
    while let Some(cell) = target_cell(&c) {
        base.push(cell[0]);
        c = refine(g, individualise(&c, cell[0])).0;
    }

    let mut gens: Vec<Permutation> = Vec::new();
    let mut orbit_lengths = vec![1; base.len()];
    for i in (0..base.len()).rev() {
        let (prefix, _) = colouring_after(g, &base[..i]);
        let (left, ltrace) = refine(g, individualise(&prefix, base[i]));
        let mut orbit = orbit_of(base[i], &gens);
        for w in cell_of(&prefix, base[i]) {
            if orbit.contains(&w) {
                continue;
            }
            let (right, rtrace) = refine(g, individualise(&prefix, w));
            if rtrace != ltrace {
                continue;
            }
            if let Some(p) = extend(g, &left, &right) {
                gens.push(p);
                orbit = orbit_of(base[i], &gens);
            }
        }
        orbit_lengths[i] = orbit.len();
    }
    let order = orbit_lengths
        .iter()
        .try_fold(1u128, |acc, &l| acc.checked_mul(l as u128))
        .filter(|&o| o <= GROUP_ORDER_BOUND)
        .map_or(GroupOrder::Large, GroupOrder::Exact);
    debug_assert!(gens.iter().all(|p| is_automorphism(g, p)));
    Ok(AutomorphismSet {
        generators: gens,
        group_order: order,
        base,
        orbit_lengths,
    })
}

/// Objects that automorphisms act on.
pub trait Permutable: Clone + Ord {
    fn permute(&self, p: &[usize]) -> Self;
}

impl Permutable for VertexSet {
    fn permute(&self, p: &[usize]) -> Self {
        self.map(p)
    }
}

impl Permutable for crate::separations::Separation {
    fn permute(&self, p: &[usize]) -> Self {
        self.map(p)
    }
}

impl Permutable for usize {
    fn permute(&self, p: &[usize]) -> Self {
        p[*self]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit<T> {
    /// Least member.
    pub representative: T,
    pub members: BTreeSet<T>,
}

/// Partitions the closure of `objects` under the generated group into
/// orbits, ordered by representative.
pub fn orbit_closure<T: Permutable>(aut: &AutomorphismSet, objects: &[T]) -> Vec<Orbit<T>> {
    let mut done: BTreeSet<T> = BTreeSet::new();
    let mut orbits = Vec::new();
    for o in objects {
        if done.contains(o) {
            continue;
        }
        let mut members = BTreeSet::from([o.clone()]);
        let mut queue = VecDeque::from([o.clone()]);
        while let Some(x) = queue.pop_front() {
            for p in &aut.generators {
                let y = x.permute(p);
                if members.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        done.extend(members.iter().cloned());
        orbits.push(Orbit {
            representative: members.iter().next().unwrap().clone(),
            members,
        });
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    orbits
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorAction {
    /// Induced tree automorphism `t -> phi(t)`, if one exists.
    pub tree_map: Option<Vec<usize>>,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicityReport {
    pub canonical: bool,
    pub actions: Vec<GeneratorAction>,
}

/// For each generator, searches for the tree automorphisms `phi` with
/// `gamma(V_t) = V_phi(t)`; records the first and whether it is unique.
pub fn verify_canonical_td(td: &TreeDecomposition, aut: &AutomorphismSet) -> CanonicityReport {
    let actions: Vec<GeneratorAction> = aut
        .generators
        .iter()
        .map(|gamma| {
            let found = tree_maps(td, gamma, 2);
            GeneratorAction {
                unique: found.len() == 1,
                tree_map: found.into_iter().next(),
            }
        })
        .collect();
    CanonicityReport {
        canonical: actions.iter().all(|a| a.tree_map.is_some()),
        actions,
    }
}

/// Up to `limit` tree automorphisms compatible with `gamma` on bags.
pub fn tree_maps(td: &TreeDecomposition, gamma: &[usize], limit: usize) -> Vec<Vec<usize>> {
    let t = &td.tree;
    let m = t.n();
    if m == 0 {
        return vec![Vec::new()];
    }
    let images: Vec<VertexSet> = td.bags.iter().map(|b| b.map(gamma)).collect();
    let candidates: Vec<Vec<usize>> = images
        .iter()
        .map(|img| (0..m).filter(|&s| &td.bags[s] == img).collect())
        .collect();
    // BFS order so that each node after the first has an assigned parent
    let mut order = vec![0];
    let mut parent = vec![usize::MAX; m];
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for y in t.neighbors(x).iter() {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    let mut phi = vec![usize::MAX; m];
    let mut used = vec![false; m];
    backtrack(t, &order, &parent, &candidates, 0, &mut phi, &mut used, &mut out, limit);
    out
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    t: &Graph,
    order: &[usize],
    parent: &[usize],
    cand: &[Vec<usize>],
    depth: usize,
    phi: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if depth == order.len() {
        out.push(phi.clone());
        return;
    }
    let x = order[depth];
    for &s in &cand[x] {
        if used[s] || (depth > 0 && !t.has_edge(phi[parent[x]], s)) {
            continue;
        }
        phi[x] = s;
        used[s] = true;
        backtrack(t, order, parent, cand, depth + 1, phi, used, out, limit);
        used[s] = false;
        phi[x] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separations::Separation;

    fn star(t: usize) -> Graph {
        let mut g = Graph::with_vertices(["c"]);
        for i in 1..=t {
            let l = g.add_vertex(i.to_string());
            g.add_edge(0, l).unwrap();
        }
        g
    }

    fn brute_force_order(g: &Graph) -> usize {
        fn rec(g: &Graph, p: &mut Vec<usize>, used: &mut Vec<bool>) -> usize {
            let v = p.len();
            if v == g.n() {
                return 1;
            }
            let mut total = 0;
            for w in 0..g.n() {
                if used[w] || g.degree(w) != g.degree(v) {
                    continue;
                }
                if (0..v).any(|u| g.has_edge(u, v) != g.has_edge(p[u], w)) {
                    continue;
                }
                used[w] = true;
                p.push(w);
                total += rec(g, p, used);
                p.pop();
                used[w] = false;
            }
            total
        }
        rec(g, &mut Vec::new(), &mut vec![false; g.n()])
    }

    #[test]
    fn small_groups() {
        let a = automorphism_generators(&star(3)).unwrap();
        assert_eq!(a.group_order, GroupOrder::Exact(6));
        assert!(a.generators.iter().all(|p| p[0] == 0));

        let tt = Graph::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        assert_eq!(automorphism_generators(&tt).unwrap().group_order, GroupOrder::Exact(4));

        // path 0-1-2-3-4-5 with a pendant at 2
        let asym = Graph::from_pairs(&[("0", "1"), ("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("2", "p")]).unwrap();
        let a = automorphism_generators(&asym).unwrap();
        assert_eq!(a.group_order, GroupOrder::Exact(1));
        assert!(a.generators.is_empty());
        assert_eq!(brute_force_order(&asym), 1);
    }

    #[test]
    fn order_matches_brute_force() {
        let mut cube = Graph::empty(8);
        for v in 0..8usize {
            for b in 0..3 {
                let w = v ^ (1 << b);
                if v < w {
                    cube.add_edge(v, w).unwrap();
                }
            }
        }
        let mut petersen = Graph::empty(10);
        for i in 0..5 {
            petersen.add_edge(i, (i + 1) % 5).unwrap();
            petersen.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
            petersen.add_edge(i, 5 + i).unwrap();
        }
        let mut c7 = Graph::empty(7);
        for i in 0..7 {
            c7.add_edge(i, (i + 1) % 7).unwrap();
        }
        for (g, expect) in [(cube, 48), (petersen, 120), (c7, 14)] {
            assert_eq!(brute_force_order(&g), expect);
            let a = automorphism_generators(&g).unwrap();
            assert_eq!(a.group_order, GroupOrder::Exact(expect as u128));
            assert!(a.generators.iter().all(|p| is_automorphism(&g, p)));
        }
        assert_eq!(automorphism_generators(&star(10)).unwrap().group_order, GroupOrder::Large);
        assert_eq!(automorphism_generators(&Graph::empty(65)), Err(SymmetryError::TooLarge(65, 64)));
    }

    #[test]
    fn orbits() {
        let g = star(3);
        let a = automorphism_generators(&g).unwrap();
        let splits: Vec<Separation> = (1..=3)
            .map(|l| {
                let mut b = g.all();
                b.remove(l);
                Separation::new(&g, [0, l].into_iter().collect(), b).unwrap()
            })
            .collect();
        let o = orbit_closure(&a, &splits);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].members.len(), 3);
        assert!(orbit_closure::<Separation>(&a, &[]).is_empty());

        let tt = Graph::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        let s = Separation::new(&tt, tt.set_of(&["a", "b", "c"]).unwrap(), tt.set_of(&["b", "c", "d"]).unwrap()).unwrap();
        let o = orbit_closure(&automorphism_generators(&tt).unwrap(), &[s]);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].members.len(), 1);
    }
}
