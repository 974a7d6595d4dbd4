//! Separations `{A, B}` of finite graphs, minimum vertex separators between
//! vertex sets, and the bottleneck sets of efficient clique distinguishers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::chordal::{is_chordal, minimal_separators};
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("sides do not form a separation: edge {0}-{1} joins the strict sides")]
    NotASeparation(usize, usize),
    #[error("a side of the separation is empty")]
    EmptySide,
    #[error("component {0:?} was not assigned to a side")]
    UnassignedComponent(VertexSet),
    #[error("graph is not chordal")]
    NotChordal,
    #[error("the two cliques are equal")]
    CliquesEqual,
    #[error("{0:?} is not a maximal clique")]
    NotAMaximalClique(VertexSet),
    #[error("bottleneck would contain {0} separations, above the limit {1}")]
    TooManySeparations(u128, u128),
    #[error("efficient separator of order {order} is not smaller than the cliques ({x} and {y})")]
    OrderBoundViolated { order: usize, x: usize, y: usize },
}

/// An unordered separation stored with the lexicographically smaller side first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Separation {
    a: VertexSet,
    b: VertexSet,
}

/// Relative position of two separations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Nested,
    Crossing,
}

impl Separation {
    /// Builds `{a, b}` after checking that it separates `g`.
    pub fn new(g: &Graph, a: VertexSet, b: VertexSet) -> Result<Self, SeparationError> {
        if a.is_empty() || b.is_empty() {
            return Err(SeparationError::EmptySide);
        }
        let s = Self::from_sides(a, b);
        s.validate(g)?;
        Ok(s)
    }

    /// Builds `{a, b}` without validation.
    pub fn from_sides(a: VertexSet, b: VertexSet) -> Self {
        if a <= b {
            Separation { a, b }
        } else {
            Separation { a: b, b: a }
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), SeparationError> {
        let all = g.all();
        if self.a.union(&self.b) != all {
            let missing = all.difference(&self.a.union(&self.b)).first().unwrap();
            return Err(SeparationError::NotASeparation(missing, missing));
        }
        let sa = self.a.difference(&self.b);
        let sb = self.b.difference(&self.a);
        for u in sa.iter() {
            if let Some(v) = g.neighbors(u).intersection(&sb).first() {
                return Err(SeparationError::NotASeparation(u, v));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> &VertexSet {
        &self.a
    }

    pub fn b(&self) -> &VertexSet {
        &self.b
    }

    pub fn sides(&self) -> (&VertexSet, &VertexSet) {
        (&self.a, &self.b)
    }

    pub fn separator(&self) -> VertexSet {
        self.a.intersection(&self.b)
    }

    pub fn order(&self) -> usize {
        self.separator().len()
    }

    pub fn is_proper(&self) -> bool {
        !self.a.is_subset(&self.b) && !self.b.is_subset(&self.a)
    }

    /// Whether `x` lies in one side and `y` in the other.
    pub fn distinguishes(&self, x: &VertexSet, y: &VertexSet) -> bool {
        (x.is_subset(&self.a) && y.is_subset(&self.b)) || (x.is_subset(&self.b) && y.is_subset(&self.a))
    }

    /// Image under a vertex permutation.
    pub fn map(&self, perm: &[usize]) -> Self {
        Self::from_sides(self.a.map(perm), self.b.map(perm))
    }

    pub fn relate(&self, other: &Separation) -> Relation {
        relate(self, other)
    }

    pub fn display(&self, g: &Graph) -> String {
        format!("({:?} | {:?})", g.set_names(&self.a), g.set_names(&self.b))
    }
}

/// Oriented comparison `(a, b) <= (c, d)`, i.e. `a ⊆ c` and `b ⊇ d`.
pub fn oriented_le(a: &VertexSet, b: &VertexSet, c: &VertexSet, d: &VertexSet) -> bool {
    a.is_subset(c) && d.is_subset(b)
}

/// Two separations are nested if some orientations satisfy `A ⊆ C` and `B ⊇ D`.
pub fn relate(s: &Separation, t: &Separation) -> Relation {
    let (a, b) = s.sides();
    let (c, d) = t.sides();
    if oriented_le(a, b, c, d) || oriented_le(a, b, d, c) || oriented_le(b, a, c, d) || oriented_le(b, a, d, c) {
        Relation::Nested
    } else {
        Relation::Crossing
    }
}

/// Order, properness and tightness of a separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationClassification {
    pub order: usize,
    pub proper: bool,
    pub tight: bool,
}

pub fn classify(g: &Graph, s: &Separation) -> SeparationClassification {
    let sep = s.separator();
    let sa = s.a.difference(&s.b);
    let sb = s.b.difference(&s.a);
    let full: Vec<VertexSet> = g
        .components_after_deletion(&sep)
        .into_iter()
        .filter_map(|(c, f)| f.then_some(c))
        .collect();
    let tight = full.iter().any(|c| c.is_subset(&sa)) && full.iter().any(|c| c.is_subset(&sb));
    SeparationClassification {
        order: sep.len(),
        proper: !sa.is_empty() && !sb.is_empty(),
        tight,
    }
}

/// Side for a component of `G - S` when assembling a separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Assembles the separation with separator `s` whose sides are `s` plus the
/// components assigned to them. Every component of `G - s` must be assigned.
pub fn separation_from_separator(
    g: &Graph,
    s: &VertexSet,
    assignment: &BTreeMap<VertexSet, Side>,
) -> Result<Separation, SeparationError> {
    let mut a = s.clone();
    let mut b = s.clone();
    for (c, _) in g.components_after_deletion(s) {
        match assignment.get(&c) {
            Some(Side::A) => a.union_with(&c),
            Some(Side::B) => b.union_with(&c),
            None => return Err(SeparationError::UnassignedComponent(c)),
        }
    }
    Separation::new(g, a, b)
}

// --- vertex-capacitated max flow -------------------------------------------

const INF: i32 = i32::MAX / 4;

/// Unit-vertex-capacity flow network: every vertex `v` becomes `v_in -> v_out`
/// with capacity one, every edge becomes two infinite arcs, the source feeds
/// every `x_in` and every `y_out` drains into the sink.
struct VertexFlow {
    head: Vec<usize>,
    cap: Vec<i32>,
    adj: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
}

impl VertexFlow {
    fn new(g: &Graph, x: &VertexSet, y: &VertexSet) -> Self {
        let n = g.n();
        let mut f = VertexFlow {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); 2 * n + 2],
            source: 2 * n,
            sink: 2 * n + 1,
        };
        for v in g.vertices() {
            f.arc(2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            f.arc(2 * u + 1, 2 * v, INF);
            f.arc(2 * v + 1, 2 * u, INF);
        }
        for v in x.iter() {
            f.arc(f.source, 2 * v, INF);
        }
        for v in y.iter() {
            f.arc(2 * v + 1, f.sink, INF);
        }
        f
    }

    fn arc(&mut self, from: usize, to: usize, cap: i32) {
        self.adj[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    fn augment(&mut self) -> bool {
        let mut via = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::from([self.source]);
        let mut seen = vec![false; self.adj.len()];
        seen[self.source] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let w = self.head[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = e;
                    if w == self.sink {
                        let mut cur = w;
                        while cur != self.source {
                            let e = via[cur];
                            self.cap[e] -= 1;
                            self.cap[e ^ 1] += 1;
                            cur = self.head[e ^ 1];
                        }
                        return true;
                    }
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn max_flow(&mut self) -> usize {
        let mut k = 0;
        while self.augment() {
            k += 1;
        }
        k
    }

    fn residual_reach(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let w = self.head[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Units of flow on the forward arc `e` (forward arcs have even ids).
    fn flow_on(&self, e: usize) -> i32 {
        self.cap[e ^ 1]
    }

    /// Decomposes the flow into vertex sequences. Circulations met along the
    /// way are cut out of the walk.
    fn paths(&mut self) -> Vec<Vec<usize>> {
        let mut used = vec![0i32; self.head.len()];
        let mut out = Vec::new();
        loop {
            let mut walk = vec![self.source];
            let mut cur = self.source;
            while cur != self.sink {
                let next = self.adj[cur]
                    .iter()
                    .copied()
                    .find(|&e| e % 2 == 0 && self.flow_on(e) - used[e] > 0);
                let Some(e) = next else { break };
                used[e] += 1;
                cur = self.head[e];
                if let Some(p) = walk.iter().position(|&w| w == cur) {
                    walk.truncate(p + 1);
                } else {
                    walk.push(cur);
                }
            }
            if cur != self.sink {
                break;
            }
            out.push(
                walk.into_iter()
                    .filter(|&w| w < self.source && w % 2 == 0)
                    .map(|w| w / 2)
                    .collect(),
            );
        }
        out
    }
}

/// Minimum `X`–`Y` separator with a matching family of disjoint paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSeparator {
    pub order: usize,
    pub separator: VertexSet,
    /// Vertex-disjoint `X`–`Y` paths; each meets `X` only in its first vertex
    /// and `Y` only in its last.
    pub paths: Vec<Vec<usize>>,
}

/// Menger: minimum size of a vertex set meeting every `X`–`Y` path, together
/// with a separator of that size and as many disjoint `X`–`Y` paths. Vertices
/// in `x ∩ y` are trivial paths and lie in every separator.
pub fn min_clique_separator(g: &Graph, x: &VertexSet, y: &VertexSet) -> MinSeparator {
    let mut flow = VertexFlow::new(g, x, y);
    let order = flow.max_flow();
    let reach = flow.residual_reach(flow.source);
    let separator: VertexSet = g.vertices().filter(|&v| reach[2 * v] && !reach[2 * v + 1]).collect();
    let paths = flow
        .paths()
        .into_iter()
        .map(|p| {
            // keep the segment from the last X vertex to the first Y vertex after it
            let first_y = p.iter().position(|&v| y.contains(v)).expect("flow path ends in Y");
            let last_x = p[..=first_y].iter().rposition(|&v| x.contains(v)).expect("flow path starts in X");
            p[last_x..=first_y].to_vec()
        })
        .collect();
    MinSeparator {
        order,
        separator,
        paths,
    }
}

/// Whether `s` meets every `X`–`Y` path.
pub fn separates_sets(g: &Graph, s: &VertexSet, x: &VertexSet, y: &VertexSet) -> bool {
    if !x.intersection(y).difference(s).is_empty() {
        return false;
    }
    let rest = g.all().difference(s);
    let x_rest = x.difference(s);
    let y_rest = y.difference(s);
    g.components_within(&rest)
        .iter()
        .all(|c| !(c.intersects(&x_rest) && c.intersects(&y_rest)))
}

/// All `X`–`Y` separators of minimum size that leave a vertex of `X` and a
/// vertex of `Y` outside the separator. (A set swallowing all of `X` meets
/// every `X`–`Y` path trivially; for maximal cliques of a chordal graph the
/// efficient order is below both clique sizes, so nothing is lost there.)
///
/// Minimum cuts of the split network correspond to residual-closed source
/// sets; these are enumerated by branching on strongly connected components of
/// the residual graph and mapped back to vertex sets.
pub fn enumerate_min_separators(g: &Graph, x: &VertexSet, y: &VertexSet) -> Vec<VertexSet> {
    let mut flow = VertexFlow::new(g, x, y);
    let order = flow.max_flow();
    let n_nodes = flow.adj.len();
    let (comp, n_comp) = residual_sccs(&flow);
    // condensed residual graph
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_comp];
    for u in 0..n_nodes {
        for &e in &flow.adj[u] {
            let w = flow.head[e];
            if flow.cap[e] > 0 && comp[u] != comp[w] {
                succ[comp[u]].insert(comp[w]);
            }
        }
    }
    let mut pred: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_comp];
    for (u, s) in succ.iter().enumerate() {
        for &w in s {
            pred[w].insert(u);
        }
    }
    let src = comp[flow.source];
    let snk = comp[flow.sink];

    // state: 1 = inside the source set, 2 = outside
    let mut state = vec![0u8; n_comp];
    fn close(start: usize, mark: u8, next: &[BTreeSet<usize>], state: &mut [u8]) -> bool {
        let mut stack = vec![start];
        let mut changed = Vec::new();
        while let Some(c) = stack.pop() {
            if state[c] == mark {
                continue;
            }
            if state[c] != 0 {
                for &c in &changed {
                    state[c] = 0;
                }
                return false;
            }
            state[c] = mark;
            changed.push(c);
            stack.extend(next[c].iter().copied());
        }
        true
    }
    assert!(close(src, 1, &succ, &mut state));
    assert!(close(snk, 2, &pred, &mut state));

    let mut results = BTreeSet::new();
    let mut stack = vec![state];
    while let Some(st) = stack.pop() {
        match st.iter().position(|&s| s == 0) {
            None => {
                let sep: VertexSet = g
                    .vertices()
                    .filter(|&v| st[comp[2 * v]] == 1 && st[comp[2 * v + 1]] == 2)
                    .collect();
                debug_assert_eq!(sep.len(), order);
                if !x.is_subset(&sep) && !y.is_subset(&sep) {
                    results.insert(sep);
                }
            }
            Some(c) => {
                let mut inc = st.clone();
                if close(c, 1, &succ, &mut inc) {
                    stack.push(inc);
                }
                let mut exc = st;
                if close(c, 2, &pred, &mut exc) {
                    stack.push(exc);
                }
            }
        }
    }
    results.into_iter().collect()
}

/// Tarjan's SCC algorithm on the residual graph (iterative).
fn residual_sccs(flow: &VertexFlow) -> (Vec<usize>, usize) {
    let n = flow.adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut n_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut i)) = call.last_mut() {
            if *i < flow.adj[u].len() {
                let e = flow.adj[u][*i];
                *i += 1;
                if flow.cap[e] <= 0 {
                    continue;
                }
                let w = flow.head[e];
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = n_comp;
                        if w == u {
                            break;
                        }
                    }
                    n_comp += 1;
                }
            }
        }
    }
    (comp, n_comp)
}

/// The separations efficiently distinguishing two maximal cliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bottleneck {
    pub x: VertexSet,
    pub y: VertexSet,
    pub order: usize,
    /// Sorted, duplicate-free.
    pub separations: Vec<Separation>,
}

/// Options for [`beta_with`].
#[derive(Debug, Clone, Copy)]
pub struct BetaOptions {
    /// Keep efficient distinguishers that are not tight.
    pub include_nontight: bool,
    /// Accept non-chordal graphs; separators are then found by flow
    /// enumeration and members need not have clique separators.
    pub allow_nonchordal: bool,
    /// Upper bound on the number of side assignments explored per separator.
    pub limit: u128,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions {
            include_nontight: false,
            allow_nonchordal: false,
            limit: 1 << 20,
        }
    }
}

/// A separator with the components of `G - S` and their fullness, computed
/// once and shared by all clique pairs.
#[derive(Debug, Clone)]
pub struct SeparatorEntry {
    pub separator: VertexSet,
    /// Component index per vertex; `usize::MAX` on the separator.
    label: Vec<usize>,
    pub components: Vec<(VertexSet, bool)>,
}

impl SeparatorEntry {
    pub fn new(g: &Graph, s: &VertexSet) -> Self {
        let components = g.components_after_deletion(s);
        let mut label = vec![usize::MAX; g.n()];
        for (i, (c, _)) in components.iter().enumerate() {
            for v in c.iter() {
                label[v] = i;
            }
        }
        SeparatorEntry {
            separator: s.clone(),
            label,
            components,
        }
    }

    /// Components met by `x` outside the separator.
    fn touched(&self, x: &VertexSet) -> BTreeSet<usize> {
        x.iter().map(|v| self.label[v]).filter(|&c| c != usize::MAX).collect()
    }

    /// Whether no component meets both `x` and `y`, and `x`, `y` only share
    /// separator vertices.
    pub fn separates(&self, x: &VertexSet, y: &VertexSet) -> bool {
        self.touched(x).is_disjoint(&self.touched(y))
    }
}

/// Minimal separators of a chordal graph, indexed for [`beta_with`].
#[derive(Debug, Clone)]
pub struct SeparatorIndex {
    pub entries: Vec<SeparatorEntry>,
}

impl SeparatorIndex {
    pub fn new(g: &Graph, seps: &[VertexSet]) -> Self {
        SeparatorIndex {
            entries: seps.iter().map(|s| SeparatorEntry::new(g, s)).collect(),
        }
    }

    pub fn empty() -> Self {
        SeparatorIndex { entries: Vec::new() }
    }
}

/// Tight separations of minimum order with `x` on one side and `y` on the other.
pub fn beta(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<Bottleneck, SeparationError> {
    if !is_chordal(g).is_chordal() {
        return Err(SeparationError::NotChordal);
    }
    let index = SeparatorIndex::new(g, &minimal_separators(g));
    beta_with(g, x, y, &index, BetaOptions::default())
}

/// [`beta`] with precomputed minimal separators (used only on chordal
/// inputs) and explicit options.
pub fn beta_with(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    index: &SeparatorIndex,
    opts: BetaOptions,
) -> Result<Bottleneck, SeparationError> {
    if x == y {
        return Err(SeparationError::CliquesEqual);
    }
    let order = min_clique_separator(g, x, y).order;
    let enumerated: Vec<SeparatorEntry>;
    let separators: Vec<&SeparatorEntry> = if opts.allow_nonchordal {
        enumerated = enumerate_min_separators(g, x, y).iter().map(|s| SeparatorEntry::new(g, s)).collect();
        enumerated.iter().collect()
    } else {
        // every efficient separator of two maximal cliques in a chordal graph
        // is a minimal separator
        index
            .entries
            .iter()
            .filter(|e| e.separator.len() == order && e.separates(x, y))
            .collect()
    };
    if !opts.allow_nonchordal && order >= x.len().min(y.len()) {
        return Err(SeparationError::OrderBoundViolated {
            order,
            x: x.len(),
            y: y.len(),
        });
    }
    let mut out = BTreeSet::new();
    for e in separators {
        out.extend(distinguishing_separations(e, x, y, opts)?);
    }
    Ok(Bottleneck {
        x: x.clone(),
        y: y.clone(),
        order,
        separations: out.into_iter().collect(),
    })
}

/// Proper separations with separator `e`, `x` in side A and `y` in side B,
/// restricted to tight ones unless `include_nontight`.
fn distinguishing_separations(
    e: &SeparatorEntry,
    x: &VertexSet,
    y: &VertexSet,
    opts: BetaOptions,
) -> Result<Vec<Separation>, SeparationError> {
    let tx = e.touched(x);
    let ty = e.touched(y);
    if !tx.is_disjoint(&ty) {
        return Ok(Vec::new());
    }
    let free: Vec<usize> = (0..e.components.len()).filter(|c| !tx.contains(c) && !ty.contains(c)).collect();
    let count = 1u128.checked_shl(free.len() as u32).unwrap_or(u128::MAX);
    if count > opts.limit {
        return Err(SeparationError::TooManySeparations(count, opts.limit));
    }
    let mut base_a = e.separator.clone();
    let mut base_b = e.separator.clone();
    for &c in &tx {
        base_a.union_with(&e.components[c].0);
    }
    for &c in &ty {
        base_b.union_with(&e.components[c].0);
    }
    let full_a = tx.iter().any(|&c| e.components[c].1);
    let full_b = ty.iter().any(|&c| e.components[c].1);
    let mut out = Vec::new();
    for mask in 0..count {
        let (mut fa, mut fb) = (full_a, full_b);
        let (mut na, mut nb) = (!tx.is_empty(), !ty.is_empty());
        for (i, &c) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                fa |= e.components[c].1;
                na = true;
            } else {
                fb |= e.components[c].1;
                nb = true;
            }
        }
        if !(na && nb) || !(opts.include_nontight || (fa && fb)) {
            continue;
        }
        let mut a = base_a.clone();
        let mut b = base_b.clone();
        for (i, &c) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.union_with(&e.components[c].0);
            } else {
                b.union_with(&e.components[c].0);
            }
        }
        out.push(Separation::from_sides(a, b));
    }
    Ok(out)
}
