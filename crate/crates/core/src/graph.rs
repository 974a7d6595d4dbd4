//! Finite simple graphs with a fixed canonical vertex order.
//!
//! Vertex identifiers are opaque strings. Internally every vertex gets a dense
//! index in order of first appearance, and every set-valued output is emitted in
//! that order.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge at vertex `{0}`")]
    LoopEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("malformed graph json: {0}")]
    Json(String),
}

/// A set of vertex indices backed by a dense bitset.
///
/// Ordering compares the sorted element lists lexicographically, so that sets
/// print and sort the way a reader expects (`{0,5} < {1}`).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self { words: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            words: Vec::with_capacity(n.div_ceil(64)),
        }
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    /// `{0, 1, ..., n-1}`
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    pub fn contains(&self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        w < self.words.len() && self.words[w] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn union_with(&mut self, other: &Self) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    /// Image under a vertex permutation given as an index map.
    pub fn map(&self, perm: &[usize]) -> Self {
        self.iter().map(|v| perm[v]).collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl Ord for VertexSet {
    /// Lexicographic order of the sorted element lists, computed on words:
    /// at the least element `b` in exactly one set, the set holding `b` is
    /// smaller unless the other set has nothing beyond `b`.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.words.len().max(other.words.len());
        let word = |s: &VertexSet, i: usize| s.words.get(i).copied().unwrap_or(0);
        for i in 0..n {
            let (x, y) = (word(self, i), word(other, i));
            if x == y {
                continue;
            }
            let bit = (x ^ y).trailing_zeros();
            let above = |s: &VertexSet| {
                let rest = if bit == 63 { 0 } else { word(s, i) >> (bit + 1) };
                rest != 0 || s.words.iter().skip(i + 1).any(|&w| w != 0)
            };
            return if x >> bit & 1 == 1 {
                if above(other) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            } else if above(self) {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        Ordering::Equal
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Graph distance; `None` means the endpoints lie in different components.
pub type Distance = Option<usize>;

/// Finite simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<VertexSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.names)
            .field("edges", &self.edge_names())
            .finish()
    }
}

/// Wire format of a graph: `{"vertices": [...], "edges": [[u, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    #[serde(default)]
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl Graph {
    /// Graph on `n` vertices named `"0"`, ..., `"n-1"` with no edges.
    pub fn empty(n: usize) -> Self {
        Self::with_vertices((0..n).map(|i| i.to_string()))
    }

    pub fn with_vertices<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Graph {
            names: Vec::new(),
            index: HashMap::new(),
            adj: Vec::new(),
        };
        for name in names {
            g.add_vertex(name);
        }
        g
    }

    /// Adds a vertex if absent and returns its index.
    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        self.adj.push(VertexSet::new());
        i
    }

    /// Adds the edge `uv` by index. Duplicates collapse; loops are rejected.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        if u >= n {
            return Err(GraphError::IndexOutOfRange(u));
        }
        if v >= n {
            return Err(GraphError::IndexOutOfRange(v));
        }
        if u == v {
            return Err(GraphError::LoopEdge(self.names[u].clone()));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn add_edge_by_name(&mut self, u: &str, v: &str) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::LoopEdge(u.to_string()));
        }
        let a = self.add_vertex(u);
        let b = self.add_vertex(v);
        self.add_edge(a, b)
    }

    /// Builds a graph from identifier pairs plus explicitly declared isolated
    /// vertices. Declared vertices come first in the canonical order.
    pub fn from_edge_list<S: AsRef<str>>(
        isolated: &[S],
        pairs: &[(S, S)],
    ) -> Result<Self, GraphError> {
        let mut g = Graph::with_vertices(isolated.iter().map(|s| s.as_ref().to_string()));
        for (u, v) in pairs {
            g.add_edge_by_name(u.as_ref(), v.as_ref())?;
        }
        Ok(g)
    }

    /// Edge-list-only convenience used throughout the tests.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, GraphError> {
        Self::from_edge_list::<&str>(&[], pairs)
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let mut g = Graph::with_vertices(j.vertices.iter().cloned());
        for [u, v] in &j.edges {
            g.add_edge_by_name(u, v)?;
        }
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v)| [self.names[u].clone(), self.names[v].clone()])
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    /// Resolves a list of names into a vertex set.
    pub fn set_of(&self, names: &[&str]) -> Result<VertexSet, GraphError> {
        names.iter().map(|n| self.index_of(n)).collect()
    }

    pub fn set_names(&self, s: &VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Edges `(u, v)` with `u < v`, in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in self.vertices() {
            for v in self.adj[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn edge_names(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(u, v)| (self.names[u].clone(), self.names[v].clone()))
            .collect()
    }

    /// Open neighbourhood of a set: vertices outside `s` adjacent to some
    /// vertex of `s`.
    pub fn neighborhood(&self, s: &VertexSet) -> VertexSet {
        let mut n = VertexSet::new();
        for v in s.iter() {
            n.union_with(&self.adj[v]);
        }
        n.difference(s)
    }

    pub fn closed_neighborhood(&self, s: &VertexSet) -> VertexSet {
        self.neighborhood(s).union(s)
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| {
            let mut rest = s.clone();
            rest.remove(v);
            rest.is_subset(&self.adj[v])
        })
    }

    /// Induced subgraph on `s`, keeping names. Returns the subgraph and the map
    /// from subgraph indices back to host indices.
    pub fn induced(&self, s: &VertexSet) -> (Graph, Vec<usize>) {
        let back: Vec<usize> = s.to_vec();
        let mut sub = Graph::with_vertices(back.iter().map(|&v| self.names[v].clone()));
        let mut fwd = HashMap::with_capacity(back.len());
        for (i, &v) in back.iter().enumerate() {
            fwd.insert(v, i);
        }
        for (i, &v) in back.iter().enumerate() {
            for u in self.adj[v].iter() {
                if let Some(&j) = fwd.get(&u) {
                    if i < j {
                        sub.adj[i].insert(j);
                        sub.adj[j].insert(i);
                    }
                }
            }
        }
        (sub, back)
    }

    /// BFS distances from `src` (`None` for unreachable vertices).
    pub fn bfs(&self, src: usize) -> Vec<Distance> {
        self.bfs_within(src, &self.all(), usize::MAX)
    }

    /// BFS inside the vertex set `allowed`, stopping at depth `limit`.
    pub fn bfs_within(&self, src: usize, allowed: &VertexSet, limit: usize) -> Vec<Distance> {
        let mut dist = vec![None; self.n()];
        if !allowed.contains(src) {
            return dist;
        }
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du >= limit {
                continue;
            }
            for w in self.adj[u].iter() {
                if dist[w].is_none() && allowed.contains(w) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Distance {
        self.bfs(u)[v]
    }

    pub fn distance_by_name(&self, u: &str, v: &str) -> Result<Distance, GraphError> {
        let (a, b) = (self.index_of(u)?, self.index_of(v)?);
        Ok(self.distance(a, b))
    }

    /// Shortest path from `u` to `v` inside `allowed`, endpoints included.
    pub fn shortest_path_within(&self, u: usize, v: usize, allowed: &VertexSet) -> Option<Vec<usize>> {
        if !allowed.contains(u) || !allowed.contains(v) {
            return None;
        }
        let mut parent = vec![usize::MAX; self.n()];
        parent[u] = u;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                let mut path = vec![v];
                let mut cur = v;
                while cur != u {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.adj[x].iter() {
                if parent[w] == usize::MAX && allowed.contains(w) {
                    parent[w] = x;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Connected components of `G[allowed]`, each in canonical order, listed by
    /// smallest vertex.
    pub fn components_within(&self, allowed: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for v in allowed.iter() {
            if seen.contains(v) {
                continue;
            }
            let mut comp = VertexSet::singleton(v);
            let mut stack = vec![v];
            seen.insert(v);
            while let Some(u) = stack.pop() {
                for w in self.adj[u].iter() {
                    if allowed.contains(w) && seen.insert(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.all())
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Components of `G - x` together with whether each is full, i.e. has
    /// neighbourhood exactly `x` in `G`.
    pub fn components_after_deletion(&self, x: &VertexSet) -> Vec<(VertexSet, bool)> {
        let rest = self.all().difference(x);
        self.components_within(&rest)
            .into_iter()
            .map(|c| {
                let full = self.neighborhood(&c) == *x;
                (c, full)
            })
            .collect()
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.n()
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.is_connected() && self.edge_count() + 1 == self.n()
    }

    /// The ball of radius `radius2 / 2` around `v` (see [`Ball`]).
    pub fn ball(&self, v: usize, radius2: usize) -> Ball {
        let k = radius2 / 2;
        let dist = self.bfs_within(v, &self.all(), k);
        let set: VertexSet = dist
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some_and(|d| d <= k))
            .map(|(u, _)| u)
            .collect();
        let (subgraph, host) = self.induced(&set);
        Ball {
            center: v,
            radius2,
            vertices: set,
            subgraph,
            host,
        }
    }
}

/// Ball around a vertex with radius `radius2 / 2`.
///
/// For even `radius2 = 2k` this is the subgraph induced by the vertices at
/// distance at most `k`. For odd `radius2 = 2k + 1` it has the same vertex set
/// and all host edges among those vertices, which again is the induced
/// subgraph; edges that only reach vertices at distance `k + 1` are not part
/// of the ball.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: usize,
    pub radius2: usize,
    pub vertices: VertexSet,
    pub subgraph: Graph,
    /// `host[i]` is the host index of subgraph vertex `i`.
    pub host: Vec<usize>,
}

/// Label recorded in reports for the odd-radius ball convention.
pub const BALL_CONVENTION: &str = "odd radius (2k+1)/2: vertices within distance k, all host edges among them";

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_pairs(&[("a", "b"), ("b", "c")]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n).unwrap();
        }
        g
    }

    #[test]
    fn edge_list_builds_path() {
        let g = p3();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.names(), ["a", "b", "c"]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::from_pairs(&[("a", "b"), ("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn loops_rejected() {
        assert_eq!(
            Graph::from_pairs(&[("a", "a")]),
            Err(GraphError::LoopEdge("a".into()))
        );
    }

    #[test]
    fn isolated_vertices_come_first() {
        let g = Graph::from_edge_list(&["z"], &[("a", "b")]).unwrap();
        assert_eq!(g.names(), ["z", "a", "b"]);
        assert_eq!(g.degree(0), 0);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let bad = r#"{"vertices":["a"],"edges":[],"weights":[]}"#;
        assert!(matches!(Graph::from_json_str(bad), Err(GraphError::Json(_))));
        let good = r#"{"vertices":["a"],"edges":[["b","c"]]}"#;
        let g = Graph::from_json_str(good).unwrap();
        assert_eq!(g.names(), ["a", "b", "c"]);
    }

    #[test]
    fn distances() {
        let g = p3();
        assert_eq!(g.distance_by_name("a", "c").unwrap(), Some(2));
        assert_eq!(g.distance_by_name("b", "b").unwrap(), Some(0));
        let two = Graph::from_pairs(&[("a", "b"), ("c", "d")]).unwrap();
        assert_eq!(two.distance_by_name("a", "d").unwrap(), None);
        assert!(matches!(
            g.distance_by_name("a", "q"),
            Err(GraphError::UnknownVertex(_))
        ));
    }

    #[test]
    fn balls() {
        let c6 = cycle(6);
        let b = c6.ball(0, 4);
        assert_eq!(b.vertices.len(), 5);
        assert_eq!(b.subgraph.edge_count(), 4);
        assert!(b.subgraph.is_tree());
        assert_eq!(c6.ball(3, 0).vertices, VertexSet::singleton(3));

        let mut wheel = cycle(4);
        let h = wheel.add_vertex("h");
        for i in 0..4 {
            wheel.add_edge(h, i).unwrap();
        }
        let b = wheel.ball(h, 3);
        assert_eq!(b.vertices.len(), 5);
        assert_eq!(b.subgraph.edge_count(), 8);
    }

    #[test]
    fn components_and_fullness() {
        let g = p3();
        let b = g.set_of(&["b"]).unwrap();
        let comps = g.components_after_deletion(&b);
        assert_eq!(
            comps,
            vec![(VertexSet::singleton(0), true), (VertexSet::singleton(2), true)]
        );

        let c4 = Graph::from_pairs(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let comps = c4.components_after_deletion(&VertexSet::singleton(0));
        assert_eq!(comps, vec![(c4.set_of(&["b", "c", "d"]).unwrap(), true)]);

        let mut k4 = Graph::empty(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v).unwrap();
            }
        }
        assert_eq!(
            k4.components_after_deletion(&VertexSet::new()),
            vec![(VertexSet::full(4), true)]
        );
    }

    #[test]
    fn vertex_set_order_is_lexicographic() {
        let a: VertexSet = [0, 5].into_iter().collect();
        let b = VertexSet::singleton(1);
        assert!(a < b);
        assert!(VertexSet::new() < a);
        let mut c = VertexSet::singleton(130);
        c.remove(130);
        assert_eq!(c, VertexSet::new());
    }
}
