//! Periodic covers given by voltage presentations over free groups, finite
//! windows of them, and everything computed on those windows: covering and
//! ball-preservation checks, clique lifting, the orbit-wise nested set,
//! folding into a graph-decomposition of the base, and r-acyclicity.
//!
//! A window vertex `(v, w)` is written `v@w`. The deck group acts by left
//! multiplication on the word, and the edge `uv` of the base lifts to the
//! edges `(u, w) -- (v, w * voltage(u, v))`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::chordal::{is_chordal, is_r_locally_chordal, maximal_cliques_general, Chordality};
use crate::generators::rng;
use crate::graph::{Graph, GraphError, GraphJson, VertexSet};
use crate::nested::{construct_n_with, ConstructOptions, NestedError, NestedSetLevels};
use crate::separations::{BetaOptions, Separation};
use crate::treedec::{build_td_from_nested, classify_td, induced_separations, TdClassification, TreeDecError, TreeDecomposition};

pub const MAX_RANK: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("cannot parse word {0:?}")]
    BadWord(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("window radius {radius} is below the required {needed}")]
    WindowTooSmall { radius: usize, needed: usize },
    #[error("deck group rank {0} exceeds the supported {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("window is disconnected; the voltages do not generate the deck group")]
    DisconnectedWindow,
    #[error("window is not chordal; hole {0:?}")]
    WindowNotChordal(Vec<String>),
    #[error("{0:?} is not a clique")]
    NotAClique(Vec<String>),
    #[error("lift leaves the trusted part of the window at {0}")]
    LiftCrossesBoundary(String),
    #[error("lift of a clique through {0} is not a clique")]
    LiftNotAClique(String),
    #[error("orbit representatives differ between radius {0} and {1}")]
    Unstable(usize, usize),
    #[error("deck action is inconsistent on the window: {0}")]
    ActionMismatch(String),
    #[error("orbit graph is not simple: {0}")]
    NonSimpleModel(String),
    #[error("exhaustive check needs {needed} subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error(transparent)]
    Nested(#[from] NestedError),
    #[error(transparent)]
    TreeDec(#[from] TreeDecError),
    #[error("invalid decomposition JSON: {0}")]
    Json(String),
}

/// A reduced word in a free group; letter `+(i+1)` is generator `i`,
/// `-(i+1)` its inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<i32>);

impl Ord for Word {
    /// Shortlex.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: i32) -> Self {
        Word(vec![l])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: i32) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Parses `z1 z2^-1`, `z^2`, `z1.z2` or `e` against generator names.
    pub fn parse(s: &str, gens: &[String]) -> Result<Word, CoverError> {
        let mut w = Word::identity();
        for tok in s.split(|c: char| c.is_whitespace() || c == '.').filter(|t| !t.is_empty()) {
            if tok == "e" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i32>().map_err(|_| CoverError::BadWord(s.to_string()))?),
                None => (tok, 1),
            };
            let g = gens.iter().position(|x| x == name).ok_or_else(|| CoverError::BadWord(s.to_string()))? as i32 + 1;
            for _ in 0..exp.unsigned_abs() {
                w.push(if exp > 0 { g } else { -g });
            }
        }
        Ok(w)
    }

    /// Generator names appearing in a word string, in order of appearance.
    fn names_in(s: &str) -> Vec<String> {
        s.split(|c: char| c.is_whitespace() || c == '.')
            .filter(|t| !t.is_empty() && *t != "e")
            .map(|t| t.split('^').next().unwrap_or(t).to_string())
            .collect()
    }

    pub fn display(&self, gens: &[String]) -> String {
        if self.0.is_empty() {
            return "e".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i32 * l.signum();
            let name = &gens[(l.unsigned_abs() - 1) as usize];
            parts.push(if run == 1 { name.clone() } else { format!("{name}^{run}") });
            i = j;
        }
        parts.join(".")
    }

    /// All reduced words of length at most `len` over `rank` generators, in
    /// shortlex order.
    pub fn ball(rank: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    if w.0.last() != Some(&-l) {
                        let mut x = w.clone();
                        x.0.push(l);
                        next.push(x);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltagePresentation {
    pub base: Graph,
    pub generators: Vec<String>,
    pub tree_edges: BTreeSet<(usize, usize)>,
    /// Voltage from `u` to `v` for `u < v`; absent means identity.
    pub voltage: BTreeMap<(usize, usize), Word>,
}

#[derive(Serialize, Deserialize)]
struct VoltageEntry {
    edge: [String; 2],
    word: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationJson {
    base: GraphJson,
    #[serde(default)]
    tree_edges: Option<Vec<[String; 2]>>,
    #[serde(default)]
    voltages: Vec<VoltageEntry>,
}

impl VoltagePresentation {
    /// Checks that `tree_edges` is a spanning tree of `base` carrying no
    /// voltage, and stores voltages in the `u < v` direction.
    pub fn new(
        base: Graph,
        generators: Vec<String>,
        tree_edges: BTreeSet<(usize, usize)>,
        voltages: Vec<((usize, usize), Word)>,
    ) -> Result<Self, CoverError> {
        let bad = |m: String| CoverError::InvalidPresentation(m);
        let mut tree = Graph::empty(base.n());
        for &(u, v) in &tree_edges {
            if !base.has_edge(u, v) {
                return Err(bad(format!("tree edge {}-{} is not a base edge", base.name(u), base.name(v))));
            }
            tree.add_edge(u, v)?;
        }
        if base.n() > 0 && !tree.is_tree() {
            return Err(bad("tree_edges do not form a spanning tree".into()));
        }
        let mut voltage = BTreeMap::new();
        for ((u, v), w) in voltages {
            if !base.has_edge(u, v) {
                return Err(bad(format!("voltage on non-edge {}-{}", base.name(u), base.name(v))));
            }
            let key = (u.min(v), u.max(v));
            if tree_edges.contains(&key) && !w.is_identity() {
                return Err(bad(format!("tree edge {}-{} carries a voltage", base.name(u), base.name(v))));
            }
            let w = if u < v { w } else { w.inverse() };
            if voltage.insert(key, w).is_some() {
                return Err(bad(format!("two voltages on {}-{}", base.name(u), base.name(v))));
            }
        }
        voltage.retain(|_, w| !w.is_identity());
        Ok(VoltagePresentation {
            base,
            generators,
            tree_edges,
            voltage,
        })
    }

    /// The trivial cover of `base`.
    pub fn identity(base: Graph) -> Self {
        let tree = bfs_tree(&base);
        VoltagePresentation::new(base, Vec::new(), tree, Vec::new()).expect("bfs tree is spanning")
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Voltage of the directed edge `u -> v`.
    pub fn voltage(&self, u: usize, v: usize) -> Word {
        match self.voltage.get(&(u.min(v), u.max(v))) {
            None => Word::identity(),
            Some(w) if u < v => w.clone(),
            Some(w) => w.inverse(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, CoverError> {
        let j: PresentationJson = serde_json::from_str(s).map_err(|e| CoverError::InvalidPresentation(e.to_string()))?;
        let base = Graph::from_json(&j.base)?;
        let mut generators: Vec<String> = Vec::new();
        for v in &j.voltages {
            for n in Word::names_in(&v.word) {
                if !generators.contains(&n) {
                    generators.push(n);
                }
            }
        }
        generators.sort();
        let tree_edges = match &j.tree_edges {
            Some(t) => t
                .iter()
                .map(|[u, v]| {
                    let (u, v) = (base.index_of(u)?, base.index_of(v)?);
                    Ok((u.min(v), u.max(v)))
                })
                .collect::<Result<BTreeSet<_>, CoverError>>()?,
            None => bfs_tree(&base),
        };
        let voltages = j
            .voltages
            .iter()
            .map(|e| Ok(((base.index_of(&e.edge[0])?, base.index_of(&e.edge[1])?), Word::parse(&e.word, &generators)?)))
            .collect::<Result<Vec<_>, CoverError>>()?;
        VoltagePresentation::new(base, generators, tree_edges, voltages)
    }

    pub fn to_json(&self) -> Value {
        let b = &self.base;
        json!({
            "base": b.to_json(),
            "tree_edges": self.tree_edges.iter().map(|&(u, v)| [b.name(u), b.name(v)]).collect::<Vec<_>>(),
            "voltages": self.voltage.iter().map(|(&(u, v), w)| json!({
                "edge": [b.name(u), b.name(v)],
                "word": w.display(&self.generators),
            })).collect::<Vec<_>>(),
        })
    }
}

fn bfs_tree(g: &Graph) -> BTreeSet<(usize, usize)> {
    let mut seen = vec![false; g.n()];
    let mut tree = BTreeSet::new();
    for s in g.vertices() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u).iter() {
                if !seen[v] {
                    seen[v] = true;
                    tree.insert((u.min(v), u.max(v)));
                    queue.push_back(v);
                }
            }
        }
    }
    tree
}

/// A point `(base vertex, word)` of the derived cover.
pub type Point = (usize, Word);

/// The part of the derived cover on words of length at most `radius`.
#[derive(Debug, Clone)]
pub struct CoverWindow {
    pub presentation: VoltagePresentation,
    pub radius: usize,
    pub graph: Graph,
    pub points: Vec<Point>,
    index: HashMap<Point, usize>,
    /// Vertices with a cover neighbour outside the window.
    pub boundary: VertexSet,
    /// Window distance to the boundary; `None` when unreachable or no boundary.
    pub depth: Vec<Option<usize>>,
}

impl CoverWindow {
    pub fn point(&self, x: usize) -> &Point {
        &self.points[x]
    }

    pub fn lookup(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn project(&self, x: usize) -> usize {
        self.points[x].0
    }

    pub fn project_set(&self, s: &VertexSet) -> VertexSet {
        s.iter().map(|x| self.project(x)).collect()
    }

    /// Whether every vertex within `margin` of `x` sees its whole cover
    /// neighbourhood inside the window.
    pub fn trusted(&self, x: usize, margin: usize) -> bool {
        self.depth[x].is_none_or(|d| d > margin)
    }

    pub fn trusted_set(&self, s: &VertexSet, margin: usize) -> bool {
        s.iter().all(|x| self.trusted(x, margin))
    }

    pub fn translate(&self, gamma: &Word, x: usize) -> Option<usize> {
        let (v, w) = &self.points[x];
        self.lookup(&(*v, gamma.mul(w)))
    }

    pub fn name_of(&self, p: &Point) -> String {
        format!("{}@{}", self.presentation.base.name(p.0), p.1.display(&self.presentation.generators))
    }

    /// Cover neighbours of a point, inside the window or not.
    pub fn cover_neighbours(&self, p: &Point) -> Vec<Point> {
        let pres = &self.presentation;
        pres.base
            .neighbors(p.0)
            .iter()
            .map(|u| (u, p.1.mul(&pres.voltage(p.0, u))))
            .collect()
    }
}

pub fn derive_window(pres: &VoltagePresentation, radius: usize) -> CoverWindow {
    let words = Word::ball(pres.rank(), radius);
    let mut points = Vec::with_capacity(words.len() * pres.base.n());
    for w in &words {
        for v in pres.base.vertices() {
            points.push((v, w.clone()));
        }
    }
    let index: HashMap<Point, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut graph = Graph::empty(0);
    for p in &points {
        graph.add_vertex(format!("{}@{}", pres.base.name(p.0), p.1.display(&pres.generators)));
    }
    let mut boundary = VertexSet::new();
    for (x, p) in points.iter().enumerate() {
        for u in pres.base.neighbors(p.0).iter() {
            let q = (u, p.1.mul(&pres.voltage(p.0, u)));
            match index.get(&q) {
                Some(&y) => {
                    if x < y {
                        graph.add_edge(x, y).expect("no loops in derived graph");
                    }
                }
                None => {
                    boundary.insert(x);
                }
            }
        }
    }
    let mut depth = vec![None; points.len()];
    let mut queue: VecDeque<usize> = boundary.iter().collect();
    for x in boundary.iter() {
        depth[x] = Some(0);
    }
    while let Some(x) = queue.pop_front() {
        let d = depth[x].expect("set");
        for y in graph.neighbors(x).iter() {
            if depth[y].is_none() {
                depth[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    CoverWindow {
        presentation: pres.clone(),
        radius,
        graph,
        points,
        index,
        boundary,
        depth,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub checked_vertices: usize,
    pub checked_cliques: usize,
    /// Vertices where incident edges do not project bijectively.
    pub not_locally_bijective: Vec<String>,
    /// Centres whose ball does not project isomorphically.
    pub ball_not_preserved: Vec<String>,
    /// `(clique, deck word)` with `K` meeting `gamma K`.
    pub clique_not_moved: Vec<(Vec<String>, String)>,
    /// `(clique, deck word)` whose closed neighbourhoods meet.
    pub neighbourhoods_meet: Vec<(Vec<String>, String)>,
    /// Cliques whose projection is not a clique or not injective.
    pub projection_not_bijective: Vec<Vec<String>>,
    /// Pairs of distinct vertices in one fibre at distance at most 2.
    pub close_fibre_pairs: Vec<(String, String)>,
}

impl CoverReport {
    pub fn covering(&self) -> bool {
        self.not_locally_bijective.is_empty()
    }
    pub fn ball_preserving(&self) -> bool {
        self.ball_not_preserved.is_empty()
    }
    pub fn free_on_cliques(&self) -> bool {
        self.clique_not_moved.is_empty() && self.neighbourhoods_meet.is_empty()
    }
    pub fn fibres_far(&self) -> bool {
        self.close_fibre_pairs.is_empty()
    }
    pub fn projections_bijective(&self) -> bool {
        self.projection_not_bijective.is_empty()
    }
    pub fn ok(&self) -> bool {
        self.covering() && self.ball_preserving() && self.free_on_cliques() && self.fibres_far() && self.projections_bijective()
    }
}

/// Deck words of length 1 and 2.
pub fn short_deck_words(rank: usize) -> Vec<Word> {
    Word::ball(rank, 2).into_iter().filter(|w| !w.is_identity()).collect()
}

/// Checks the covering map on the trusted part of the window: local
/// bijectivity, `r/2`-ball preservation, free action on cliques, and fibres
/// at distance more than 2.
pub fn verify_cover(pres: &VoltagePresentation, r: usize, radius: usize) -> Result<CoverReport, CoverError> {
    if pres.rank() > 0 && radius < r + 2 {
        return Err(CoverError::WindowTooSmall { radius, needed: r + 2 });
    }
    let w = derive_window(pres, radius);
    verify_cover_window(&w, r)
}

pub fn verify_cover_window(w: &CoverWindow, r: usize) -> Result<CoverReport, CoverError> {
    let base = &w.presentation.base;
    let k = r / 2;
    let margin = k.max(2);
    let trusted: Vec<usize> = w.graph.vertices().filter(|&x| w.trusted(x, margin)).collect();
    if trusted.is_empty() {
        return Err(CoverError::WindowTooSmall { radius: w.radius, needed: w.radius + 1 });
    }
    let mut rep = CoverReport {
        checked_vertices: trusted.len(),
        ..Default::default()
    };
    let name = |x: usize| w.graph.name(x).to_string();
    for &x in &trusted {
        let v = w.project(x);
        let images: Vec<usize> = w.graph.neighbors(x).iter().map(|y| w.project(y)).collect();
        let set: VertexSet = images.iter().copied().collect();
        if set.len() != images.len() || &set != base.neighbors(v) {
            rep.not_locally_bijective.push(name(x));
        }

        let ball = w.graph.ball(x, r);
        let image = base.ball(v, r);
        let projected: VertexSet = ball.vertices.iter().map(|y| w.project(y)).collect();
        let edges_match = ball.subgraph.edge_count() == image.subgraph.edge_count()
            && ball
                .subgraph
                .edges()
                .iter()
                .all(|&(a, b)| base.has_edge(w.project(ball.host[a]), w.project(ball.host[b])));
        if projected.len() != ball.vertices.len() || projected != image.vertices || !edges_match {
            rep.ball_not_preserved.push(name(x));
        }

        let near = w.graph.bfs_within(x, &w.graph.all(), 2);
        for (y, d) in near.iter().enumerate() {
            if y > x && d.is_some() && w.project(y) == v {
                rep.close_fibre_pairs.push((name(x), name(y)));
            }
        }
    }

    let interior: VertexSet = trusted.iter().copied().collect();
    let (sub, host) = w.graph.induced(&interior);
    let words = short_deck_words(w.presentation.rank());
    for c in maximal_cliques_general(&sub) {
        let clique: VertexSet = c.iter().map(|i| host[i]).collect();
        let names = w.graph.set_names(&clique);
        rep.checked_cliques += 1;
        let proj = w.project_set(&clique);
        if proj.len() != clique.len() || !base.is_clique(&proj) {
            rep.projection_not_bijective.push(names.clone());
        }
        let pts: BTreeSet<&Point> = clique.iter().map(|x| w.point(x)).collect();
        let closed = w.graph.closed_neighborhood(&clique);
        for gamma in &words {
            let moved: Vec<Point> = pts.iter().map(|(v, u)| (*v, gamma.mul(u))).collect();
            if moved.iter().any(|p| pts.contains(p)) {
                rep.clique_not_moved.push((names.clone(), gamma.display(&w.presentation.generators)));
            }
            let moved_idx: Option<VertexSet> = moved.iter().map(|p| w.lookup(p)).collect();
            if let Some(m) = moved_idx {
                if w.trusted_set(&m, 1) && closed.intersects(&w.graph.closed_neighborhood(&m)) {
                    rep.neighbourhoods_meet.push((names.clone(), gamma.display(&w.presentation.generators)));
                }
            }
        }
    }
    Ok(rep)
}

/// Projection of a window clique, checked to be a clique of the base on
/// which the projection is injective.
pub fn project_clique(w: &CoverWindow, k: &VertexSet) -> Result<VertexSet, CoverError> {
    if !w.graph.is_clique(k) {
        return Err(CoverError::NotAClique(w.graph.set_names(k)));
    }
    let p = w.project_set(k);
    if p.len() != k.len() || !w.presentation.base.is_clique(&p) {
        return Err(CoverError::NotAClique(w.presentation.base.set_names(&p)));
    }
    Ok(p)
}

/// The lift of the base clique `k` through the window vertex `through`.
pub fn lift_clique(w: &CoverWindow, k: &VertexSet, through: usize) -> Result<VertexSet, CoverError> {
    let base = &w.presentation.base;
    if !base.is_clique(k) {
        return Err(CoverError::NotAClique(base.set_names(k)));
    }
    let (x, word) = w.point(through).clone();
    if !k.contains(x) {
        return Err(CoverError::InvalidPresentation(format!(
            "{} does not lie over the clique",
            w.graph.name(through)
        )));
    }
    let mut lift = VertexSet::singleton(through);
    for y in k.iter().filter(|&y| y != x) {
        let p = (y, word.mul(&w.presentation.voltage(x, y)));
        let idx = w.lookup(&p).ok_or_else(|| CoverError::LiftCrossesBoundary(w.name_of(&p)))?;
        lift.insert(idx);
    }
    if !w.graph.is_clique(&lift) {
        return Err(CoverError::LiftNotAClique(w.graph.name(through).to_string()));
    }
    Ok(lift)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub lifts: usize,
    pub pairwise_disjoint: bool,
    pub closed_neighbourhoods_disjoint: bool,
}

/// All lifts of `k` through trusted vertices of the fibre over its least
/// vertex, with their pairwise disjointness.
pub fn lifts_of_clique(w: &CoverWindow, k: &VertexSet, margin: usize) -> Result<(Vec<VertexSet>, LiftReport), CoverError> {
    let x = k.first().ok_or_else(|| CoverError::NotAClique(Vec::new()))?;
    let mut lifts = Vec::new();
    for t in w.graph.vertices().filter(|&t| w.project(t) == x && w.trusted(t, margin)) {
        lifts.push(lift_clique(w, k, t)?);
    }
    let mut disjoint = true;
    let mut nb_disjoint = true;
    for i in 0..lifts.len() {
        for j in i + 1..lifts.len() {
            disjoint &= lifts[i].is_disjoint(&lifts[j]);
            nb_disjoint &= w.graph.closed_neighborhood(&lifts[i]).is_disjoint(&w.graph.closed_neighborhood(&lifts[j]));
        }
    }
    let rep = LiftReport {
        lifts: lifts.len(),
        pairwise_disjoint: disjoint,
        closed_neighbourhoods_disjoint: nb_disjoint,
    };
    Ok((lifts, rep))
}

/// Key of a finite configuration of points up to deck transformations:
/// translate so that some point of the anchor set sits on the identity word
/// and take the least result.
fn orbit_key<const N: usize>(w: &CoverWindow, anchor: &VertexSet, parts: [&VertexSet; N]) -> [Vec<Point>; N] {
    let mut best: Option<[Vec<Point>; N]> = None;
    for a in anchor.iter() {
        let shift = w.point(a).1.inverse();
        let cand: [Vec<Point>; N] = parts.map(|s| {
            let mut v: Vec<Point> = s.iter().map(|x| (w.point(x).0, shift.mul(&w.point(x).1))).collect();
            v.sort();
            v
        });
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.expect("anchor is nonempty")
}

/// Orbit key of a separation: its separator and the neighbours of the
/// separator on either strict side, sides unordered.
pub type SeparationKey = [Vec<Point>; 3];

pub fn separation_key(w: &CoverWindow, s: &Separation) -> SeparationKey {
    let sep = s.separator();
    let nb = w.graph.neighborhood(&sep);
    let a = nb.intersection(&s.a().difference(s.b()));
    let b = nb.intersection(&s.b().difference(s.a()));
    let k1 = orbit_key(w, &sep, [&sep, &a, &b]);
    let k2 = orbit_key(w, &sep, [&sep, &b, &a]);
    k1.min(k2)
}

pub fn bag_key(w: &CoverWindow, bag: &VertexSet) -> Vec<Point> {
    let [k] = orbit_key(w, bag, [bag]);
    k
}

#[derive(Debug, Clone)]
pub struct OrbitRepresentative {
    pub key: SeparationKey,
    pub order: usize,
    /// A member of the orbit inside the trusted part of the window.
    pub witness: Separation,
}

#[derive(Debug, Clone)]
pub struct PeriodicN {
    pub window: CoverWindow,
    pub levels: NestedSetLevels,
    pub representatives: Vec<OrbitRepresentative>,
    pub stable: bool,
    pub chordal: bool,
}

impl PeriodicN {
    pub fn describe(&self, rep: &OrbitRepresentative) -> String {
        let w = &self.window;
        let names = |v: &Vec<Point>| v.iter().map(|p| w.name_of(p)).collect::<Vec<_>>().join(",");
        format!("separator {{{}}} | sides {{{}}} / {{{}}}", names(&rep.key[0]), names(&rep.key[1]), names(&rep.key[2]))
    }
}

/// Margin (in window distance to the boundary) beyond which separators and
/// bags are trusted.
pub const TRUST_MARGIN: usize = 2;

fn window_n(w: &CoverWindow, allow_nonchordal: bool) -> Result<(NestedSetLevels, bool), CoverError> {
    if w.presentation.rank() > MAX_RANK {
        return Err(CoverError::RankTooLarge(w.presentation.rank()));
    }
    if !w.graph.is_connected() {
        return Err(CoverError::DisconnectedWindow);
    }
    let chordal = match is_chordal(&w.graph) {
        Chordality::Chordal(_) => true,
        Chordality::Hole(h) if !allow_nonchordal => {
            return Err(CoverError::WindowNotChordal(h.iter().map(|&x| w.graph.name(x).to_string()).collect()))
        }
        Chordality::Hole(_) => false,
    };
    let opts = ConstructOptions {
        beta: BetaOptions {
            allow_nonchordal,
            ..Default::default()
        },
    };
    Ok((construct_n_with(&w.graph, opts)?, chordal))
}

fn trusted_representatives(w: &CoverWindow, levels: &NestedSetLevels) -> Vec<OrbitRepresentative> {
    let mut reps: BTreeMap<SeparationKey, OrbitRepresentative> = BTreeMap::new();
    for s in &levels.union {
        if !w.trusted_set(&s.separator(), TRUST_MARGIN) {
            continue;
        }
        let key = separation_key(w, s);
        reps.entry(key.clone()).or_insert_with(|| OrbitRepresentative {
            key,
            order: s.order(),
            witness: s.clone(),
        });
    }
    reps.into_values().collect()
}

/// `N` of the window at radius `radius`, reduced to orbit representatives of
/// its trusted members, with a recomputation at `radius + 2` for stability.
pub fn periodic_n(pres: &VoltagePresentation, radius: usize) -> Result<PeriodicN, CoverError> {
    periodic_n_with(pres, radius, false)
}

pub fn periodic_n_with(pres: &VoltagePresentation, radius: usize, allow_nonchordal: bool) -> Result<PeriodicN, CoverError> {
    let window = derive_window(pres, radius);
    let (levels, chordal) = window_n(&window, allow_nonchordal)?;
    let representatives = trusted_representatives(&window, &levels);
    let stable = if pres.rank() == 0 {
        true
    } else {
        let wider = derive_window(pres, radius + 2);
        let (l2, _) = window_n(&wider, allow_nonchordal)?;
        let keys2: Vec<SeparationKey> = trusted_representatives(&wider, &l2).into_iter().map(|r| r.key).collect();
        keys2 == representatives.iter().map(|r| r.key.clone()).collect::<Vec<_>>()
    };
    Ok(PeriodicN {
        window,
        levels,
        representatives,
        stable,
        chordal,
    })
}

/// A co-part: a connected subgraph of the model graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Copart {
    pub nodes: VertexSet,
    pub edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDecomposition {
    pub model: Graph,
    pub bags: Vec<VertexSet>,
    /// Indexed by vertex of the decomposed graph.
    pub coparts: Vec<Copart>,
}

#[derive(Serialize, Deserialize)]
struct GdNodeJson {
    id: usize,
    bag: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CopartJson {
    nodes: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GdJson {
    nodes: Vec<GdNodeJson>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    coparts: Option<BTreeMap<String, CopartJson>>,
}

impl GraphDecomposition {
    /// Co-parts default to the full subgraphs `H[W_v]`.
    pub fn with_full_coparts(g: &Graph, model: Graph, bags: Vec<VertexSet>) -> Self {
        let coparts = g
            .vertices()
            .map(|v| {
                let nodes: VertexSet = (0..bags.len()).filter(|&h| bags[h].contains(v)).collect();
                let edges = model
                    .edges()
                    .into_iter()
                    .filter(|&(a, b)| nodes.contains(a) && nodes.contains(b))
                    .collect();
                Copart { nodes, edges }
            })
            .collect();
        GraphDecomposition { model, bags, coparts }
    }

    pub fn from_tree(g: &Graph, td: &TreeDecomposition) -> Self {
        Self::with_full_coparts(g, td.tree.clone(), td.bags.clone())
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        let coparts: serde_json::Map<String, Value> = self
            .coparts
            .iter()
            .enumerate()
            .map(|(v, c)| {
                (
                    g.name(v).to_string(),
                    json!({"nodes": c.nodes.to_vec(), "edges": c.edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()}),
                )
            })
            .collect();
        json!({
            "nodes": self.bags.iter().enumerate().map(|(id, b)| json!({"id": id, "bag": g.set_names(b)})).collect::<Vec<_>>(),
            "edges": self.model.edges().into_iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
            "coparts": coparts,
        })
    }

    pub fn from_json_str(g: &Graph, s: &str) -> Result<Self, CoverError> {
        let j: GdJson = serde_json::from_str(s).map_err(|e| CoverError::Json(e.to_string()))?;
        let n = j.nodes.len();
        let mut ids: Vec<usize> = j.nodes.iter().map(|x| x.id).collect();
        ids.sort_unstable();
        if ids != (0..n).collect::<Vec<_>>() {
            return Err(CoverError::Json("node ids must be 0..n-1".into()));
        }
        let mut bags = vec![VertexSet::new(); n];
        for node in &j.nodes {
            let names: Vec<&str> = node.bag.iter().map(String::as_str).collect();
            bags[node.id] = g.set_of(&names)?;
        }
        let mut model = Graph::empty(n);
        for &[a, b] in &j.edges {
            if a >= n || b >= n {
                return Err(CoverError::Json(format!("edge {a}-{b} out of range")));
            }
            model.add_edge(a, b).map_err(|e| CoverError::Json(e.to_string()))?;
        }
        let mut gd = Self::with_full_coparts(g, model, bags);
        if let Some(cp) = j.coparts {
            for (name, c) in cp {
                let v = g.index_of(&name)?;
                gd.coparts[v] = Copart {
                    nodes: c.nodes.iter().copied().collect(),
                    edges: c.edges.iter().map(|&[a, b]| (a.min(b), a.max(b))).collect(),
                };
            }
        }
        Ok(gd)
    }

    pub fn to_dot(&self, g: &Graph) -> String {
        let mut out = String::from("graph H {\n");
        for (h, b) in self.bags.iter().enumerate() {
            out.push_str(&format!("  h{h} [label=\"{}\"];\n", g.set_names(b).join(",")));
        }
        for (a, b) in self.model.edges() {
            out.push_str(&format!("  h{a} -- h{b};\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_graphml(&self, g: &Graph) -> String {
        let mut out = String::from(concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
            "  <key id=\"bag\" for=\"node\" attr.name=\"bag\" attr.type=\"string\"/>\n",
            "  <graph id=\"H\" edgedefault=\"undirected\">\n",
        ));
        for (h, b) in self.bags.iter().enumerate() {
            let label = g.set_names(b).join(",").replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
            out.push_str(&format!("    <node id=\"h{h}\"><data key=\"bag\">{label}</data></node>\n"));
        }
        for (a, b) in self.model.edges() {
            out.push_str(&format!("    <edge source=\"h{a}\" target=\"h{b}\"/>\n"));
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GdReport {
    pub uncovered_vertices: Vec<String>,
    pub uncovered_edges: Vec<(String, String)>,
    /// Vertices whose co-bag induces a disconnected subgraph of the model.
    pub disconnected_cobags: Vec<String>,
    /// Vertices whose co-part is not a connected spanning subgraph of its co-bag.
    pub bad_coparts: Vec<String>,
    pub into_cliques: bool,
    pub into_maximal_cliques: bool,
}

impl GdReport {
    pub fn h1(&self) -> bool {
        self.uncovered_vertices.is_empty() && self.uncovered_edges.is_empty()
    }
    pub fn h2(&self) -> bool {
        self.disconnected_cobags.is_empty() && self.bad_coparts.is_empty()
    }
}

pub fn verify_graph_decomposition(g: &Graph, gd: &GraphDecomposition) -> GdReport {
    let mut rep = GdReport::default();
    let h = &gd.model;
    for v in g.vertices() {
        let w: VertexSet = (0..gd.bags.len()).filter(|&x| gd.bags[x].contains(v)).collect();
        if w.is_empty() {
            rep.uncovered_vertices.push(g.name(v).to_string());
            continue;
        }
        if h.components_within(&w).len() != 1 {
            rep.disconnected_cobags.push(g.name(v).to_string());
        }
        let c = gd.coparts.get(v).cloned().unwrap_or_default();
        let mut sub = Graph::empty(h.n());
        let mut ok = c.nodes == w;
        for &(a, b) in &c.edges {
            ok &= a < h.n() && b < h.n() && h.has_edge(a, b) && w.contains(a) && w.contains(b);
            if ok {
                sub.add_edge(a, b).expect("checked");
            }
        }
        if !ok || sub.components_within(&w).len() != 1 {
            rep.bad_coparts.push(g.name(v).to_string());
        }
    }
    for (u, v) in g.edges() {
        if !gd.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
            rep.uncovered_edges.push((g.name(u).to_string(), g.name(v).to_string()));
        }
    }
    rep.into_cliques = gd.bags.iter().all(|b| g.is_clique(b));
    if rep.into_cliques {
        let max: BTreeSet<VertexSet> = maximal_cliques_general(g).into_iter().collect();
        let bags: BTreeSet<VertexSet> = gd.bags.iter().cloned().collect();
        rep.into_maximal_cliques = bags.len() == gd.bags.len() && bags == max;
    }
    rep
}

#[derive(Debug, Clone)]
pub struct Folded {
    pub gd: GraphDecomposition,
    /// Window node indices chosen to represent each model node.
    pub representatives: Vec<usize>,
    pub window_td: TreeDecomposition,
    pub window_classification: TdClassification,
}

/// Folds a deck-invariant decomposition of the window into a
/// graph-decomposition of the base: model nodes are orbits of trusted tree
/// nodes, model edges orbits of trusted tree edges, bags and co-parts the
/// projections.
pub fn fold(w: &CoverWindow, td: &TreeDecomposition) -> Result<Folded, CoverError> {
    let base = &w.presentation.base;
    let trusted_node = |t: usize| w.trusted_set(&td.bags[t], TRUST_MARGIN);
    let mut node_keys: BTreeMap<Vec<Point>, usize> = BTreeMap::new();
    let mut node_of: Vec<Option<usize>> = vec![None; td.len()];
    let mut reps = Vec::new();
    for t in 0..td.len() {
        if !trusted_node(t) {
            continue;
        }
        let key = bag_key(w, &td.bags[t]);
        let next = node_keys.len();
        let id = *node_keys.entry(key).or_insert_with(|| {
            reps.push(t);
            next
        });
        node_of[t] = Some(id);
    }
    let m = node_keys.len();
    if m == 0 {
        return Err(CoverError::WindowTooSmall { radius: w.radius, needed: w.radius + 2 });
    }

    let edge_key = |s: usize, t: usize| {
        let both = td.bags[s].union(&td.bags[t]);
        let [a, b] = orbit_key(w, &both, [&td.bags[s], &td.bags[t]]);
        let [c, d] = orbit_key(w, &both, [&td.bags[t], &td.bags[s]]);
        (a.clone().min(b.clone()), a.max(b)).min((c.clone().min(d.clone()), c.max(d)))
    };
    let mut edge_orbits: BTreeMap<(Vec<Point>, Vec<Point>), (usize, usize)> = BTreeMap::new();
    let mut incident: BTreeMap<usize, BTreeMap<usize, Vec<(Vec<Point>, Vec<Point>)>>> = BTreeMap::new();
    for (s, t) in td.edges() {
        let (Some(a), Some(b)) = (node_of[s], node_of[t]) else { continue };
        let key = edge_key(s, t);
        edge_orbits.insert(key.clone(), (a.min(b), a.max(b)));
        incident.entry(s).or_default().entry(a).or_default().push(key.clone());
        incident.entry(t).or_default().entry(b).or_default().push(key);
    }
    // interior nodes of one orbit must see the same edge orbits
    let mut pattern: BTreeMap<usize, Vec<(Vec<Point>, Vec<Point>)>> = BTreeMap::new();
    for t in 0..td.len() {
        let Some(h) = node_of[t] else { continue };
        if !td.tree.neighbors(t).iter().all(|u| node_of[u].is_some()) {
            continue;
        }
        let mut keys = incident.get(&t).and_then(|x| x.get(&h)).cloned().unwrap_or_default();
        keys.sort();
        match pattern.get(&h) {
            Some(p) if *p != keys => {
                return Err(CoverError::ActionMismatch(format!(
                    "nodes over bag {} have different neighbourhoods",
                    w.graph.set_names(&td.bags[t]).join(",")
                )))
            }
            Some(_) => {}
            None => {
                pattern.insert(h, keys);
            }
        }
    }
    if pattern.len() != m {
        return Err(CoverError::WindowTooSmall { radius: w.radius, needed: w.radius + 2 });
    }

    let mut model = Graph::empty(m);
    for (key, &(a, b)) in &edge_orbits {
        let label = || w.graph.set_names(&td.bags[reps[a]]).join(",");
        if a == b {
            return Err(CoverError::NonSimpleModel(format!("edge orbit {:?} is a loop at {}", key.0.len(), label())));
        }
        if model.has_edge(a, b) {
            return Err(CoverError::NonSimpleModel(format!("parallel edge orbits at {}", label())));
        }
        model.add_edge(a, b).expect("not a loop");
    }
    let mut bags = Vec::with_capacity(m);
    for &t in &reps {
        let p = w.project_set(&td.bags[t]);
        if p.len() != td.bags[t].len() {
            return Err(CoverError::ActionMismatch(format!(
                "bag {} does not project injectively",
                w.graph.set_names(&td.bags[t]).join(",")
            )));
        }
        bags.push(p);
    }

    let mut coparts = Vec::with_capacity(base.n());
    for v in base.vertices() {
        let lift = w.lookup(&(v, Word::identity())).expect("identity sheet is in every window");
        let nodes_t = td.nodes_of(lift);
        let mut c = Copart::default();
        for t in nodes_t.iter() {
            let h = node_of[t].ok_or_else(|| CoverError::LiftCrossesBoundary(w.graph.name(lift).to_string()))?;
            c.nodes.insert(h);
        }
        for (s, t) in td.edges() {
            if nodes_t.contains(s) && nodes_t.contains(t) {
                let (a, b) = (node_of[s].expect("trusted"), node_of[t].expect("trusted"));
                c.edges.insert((a.min(b), a.max(b)));
            }
        }
        coparts.push(c);
    }
    let window_classification = classify_td(&w.graph, td);
    Ok(Folded {
        gd: GraphDecomposition { model, bags, coparts },
        representatives: reps,
        window_td: td.clone(),
        window_classification,
    })
}

/// `N` of the window, its tree `T(N)`, and the fold of that tree.
pub fn fold_presentation(pres: &VoltagePresentation, radius: usize, allow_nonchordal: bool) -> Result<(PeriodicN, Folded), CoverError> {
    let pn = periodic_n_with(pres, radius, allow_nonchordal)?;
    let td = build_td_from_nested(&pn.window.graph, &pn.levels.union)?;
    let induced: BTreeSet<Separation> = induced_separations(&td).into_values().collect();
    debug_assert_eq!(induced, pn.levels.union);
    let folded = fold(&pn.window, &td)?;
    Ok((pn, folded))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcyclicityReport {
    pub acyclic: bool,
    pub exhaustive: bool,
    pub subsets_checked: u128,
    /// `(X, cycle of model nodes)`
    pub witness: Option<(Vec<String>, Vec<usize>)>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// A cycle in the union of the given co-parts, if any.
fn union_cycle(gd: &GraphDecomposition, xs: &[usize]) -> Option<Vec<usize>> {
    let mut edges = BTreeSet::new();
    for &x in xs {
        edges.extend(gd.coparts[x].edges.iter().copied());
    }
    let mut forest = Graph::empty(gd.model.n());
    for (a, b) in edges {
        if let Some(path) = forest.shortest_path_within(a, b, &forest.all()) {
            return Some(path);
        }
        forest.add_edge(a, b).expect("model edges are not loops");
    }
    None
}

/// Whether the union of any `r` co-parts is acyclic. Unions only grow with
/// `X`, so it suffices to test sets of size `min(r, |V|)`. Exhaustive when
/// that many subsets fit in `budget`; otherwise `budget` random subsets are
/// drawn, or [`CoverError::BudgetExceeded`] is returned when `exhaustive_only`.
pub fn r_acyclic_check(
    g: &Graph,
    gd: &GraphDecomposition,
    r: usize,
    budget: u128,
    seed: u64,
    exhaustive_only: bool,
) -> Result<AcyclicityReport, CoverError> {
    let n = g.n();
    let k = r.min(n);
    let needed = binomial(n, k);
    let witness = |xs: &[usize], cyc: Vec<usize>| Some((xs.iter().map(|&x| g.name(x).to_string()).collect(), cyc));
    if needed <= budget {
        let mut xs: Vec<usize> = (0..k).collect();
        let mut checked = 0u128;
        loop {
            checked += 1;
            if let Some(c) = union_cycle(gd, &xs) {
                return Ok(AcyclicityReport {
                    acyclic: false,
                    exhaustive: true,
                    subsets_checked: checked,
                    witness: witness(&xs, c),
                });
            }
            // next k-subset in lexicographic order
            let Some(i) = (0..k).rev().find(|&i| xs[i] < n - k + i) else { break };
            xs[i] += 1;
            for j in i + 1..k {
                xs[j] = xs[j - 1] + 1;
            }
        }
        return Ok(AcyclicityReport {
            acyclic: true,
            exhaustive: true,
            subsets_checked: checked,
            witness: None,
        });
    }
    if exhaustive_only {
        return Err(CoverError::BudgetExceeded { needed, budget });
    }
    let mut rand = rng(seed);
    let all: Vec<usize> = g.vertices().collect();
    for i in 0..budget {
        let xs: Vec<usize> = {
            let mut v: Vec<usize> = all.choose_multiple(&mut rand, k).copied().collect();
            v.sort_unstable();
            v
        };
        if let Some(c) = union_cycle(gd, &xs) {
            return Ok(AcyclicityReport {
                acyclic: false,
                exhaustive: false,
                subsets_checked: i + 1,
                witness: witness(&xs, c),
            });
        }
    }
    Ok(AcyclicityReport {
        acyclic: true,
        exhaustive: false,
        subsets_checked: budget,
        witness: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Report {
    pub r: usize,
    pub radius: usize,
    pub locally_chordal: bool,
    pub local_hole: Option<(String, Vec<String>)>,
    pub cover: CoverReport,
    pub window_chordal: bool,
    pub stable: bool,
    pub model_nodes: usize,
    pub model_edges: usize,
    pub gd: GdReport,
    pub window_into_cliques: bool,
    /// Local chordality agrees with the folded decomposition being into cliques.
    pub consistent: bool,
}

impl fmt::Display for Theorem3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={} L={}: locally chordal {}, window chordal {}, folded into cliques {}, consistent {}",
            self.r, self.radius, self.locally_chordal, self.window_chordal, self.gd.into_cliques, self.consistent
        )
    }
}

/// Local chordality of the base against the folded decomposition of the
/// supplied cover being into cliques.
pub fn theorem3_pipeline(pres: &VoltagePresentation, r: usize, radius: usize) -> Result<(Theorem3Report, Folded), CoverError> {
    let g = &pres.base;
    let (locally_chordal, hole) = is_r_locally_chordal(g, r);
    let local_hole = hole.map(|h| (g.name(h.center).to_string(), h.hole.iter().map(|&x| g.name(x).to_string()).collect()));
    let cover = verify_cover(pres, r, radius)?;
    let (pn, folded) = fold_presentation(pres, radius, true)?;
    let gd = verify_graph_decomposition(g, &folded.gd);
    let report = Theorem3Report {
        r,
        radius,
        locally_chordal,
        local_hole,
        cover,
        window_chordal: pn.chordal,
        stable: pn.stable,
        model_nodes: folded.gd.model.n(),
        model_edges: folded.gd.model.edge_count(),
        window_into_cliques: folded.window_classification.into_cliques,
        consistent: locally_chordal == gd.into_cliques,
        gd,
    };
    Ok((report, folded))
}

/// The cycle `C_n` with one co-tree edge carrying the generator `z`.
pub fn cycle_with_z(n: usize) -> VoltagePresentation {
    let base = crate::generators::cycle(n);
    let tree: BTreeSet<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let gens = vec!["z".to_string()];
    VoltagePresentation::new(base, gens, tree, vec![((n - 1, 0), Word::letter(1))]).expect("valid presentation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{two_triangles, wheel};

    fn gens(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn words() {
        let g = gens(&["z1", "z2"]);
        let w = Word::parse("z1 z2^-1", &g).unwrap();
        assert_eq!(w.letters(), &[1, -2]);
        assert_eq!(w.display(&g), "z1.z2^-1");
        assert_eq!(Word::parse("z1.z2^-1", &g).unwrap(), w);
        assert!(w.mul(&w.inverse()).is_identity());
        let z = gens(&["z"]);
        assert_eq!(Word::parse("z^2", &z).unwrap().display(&z), "z^2");
        assert_eq!(Word::parse("z z^-1", &z).unwrap(), Word::identity());
        assert_eq!(Word::parse("e", &z).unwrap().display(&z), "e");
        assert!(Word::parse("y", &z).is_err());
        assert_eq!(Word::ball(1, 2).len(), 5);
        assert_eq!(Word::ball(2, 2).len(), 17);
    }

    #[test]
    fn windows() {
        let w = derive_window(&cycle_with_z(6), 2);
        assert_eq!(w.graph.n(), 30);
        assert_eq!(w.graph.edge_count(), 29);
        assert!(w.graph.is_tree());
        assert_eq!(w.graph.name(0), "0@e");
        assert_eq!(w.boundary.len(), 2);

        let id = VoltagePresentation::identity(two_triangles());
        let w = derive_window(&id, 3);
        assert_eq!(w.graph.edge_count(), 5);
        assert!(w.boundary.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"base":{"edges":[["a","b"],["b","c"],["c","a"]]},"tree_edges":[["a","b"],["b","c"]],
                   "voltages":[{"edge":["c","a"],"word":"z"}]}"#;
        let p = VoltagePresentation::from_json_str(s).unwrap();
        assert_eq!(p.voltage(0, 2), Word::letter(-1));
        assert_eq!(VoltagePresentation::from_json_str(&p.to_json().to_string()).unwrap(), p);
        let bad = r#"{"base":{"edges":[["a","b"],["b","c"]]},"tree_edges":[["a","b"],["b","c"]],
                   "voltages":[{"edge":["a","b"],"word":"z"}]}"#;
        assert!(matches!(VoltagePresentation::from_json_str(bad), Err(CoverError::InvalidPresentation(_))));
    }

    #[test]
    fn cover_checks() {
        let rep = verify_cover(&cycle_with_z(6), 3, 5).unwrap();
        assert!(rep.ok(), "{rep:?}");
        let rep = verify_cover(&cycle_with_z(3), 3, 5).unwrap();
        assert!(!rep.ball_preserving());
        assert!(rep.covering() && rep.fibres_far());
        assert!(verify_cover(&VoltagePresentation::identity(wheel(4)), 3, 0).unwrap().ok());
        assert_eq!(
            verify_cover(&cycle_with_z(6), 3, 4).unwrap_err(),
            CoverError::WindowTooSmall { radius: 4, needed: 5 }
        );
    }

    #[test]
    fn lifting() {
        let w = derive_window(&cycle_with_z(6), 3);
        let e0 = w.lookup(&(0, Word::identity())).unwrap();
        let e1 = w.lookup(&(1, Word::identity())).unwrap();
        let edge: VertexSet = [e0, e1].into_iter().collect();
        assert_eq!(project_clique(&w, &edge).unwrap(), [0, 1].into_iter().collect());
        let z = Word::letter(1);
        let through = w.lookup(&(0, z.clone())).unwrap();
        let lift = lift_clique(&w, &[0, 1].into_iter().collect(), through).unwrap();
        assert_eq!(lift, [through, w.lookup(&(1, z)).unwrap()].into_iter().collect());
        let (lifts, rep) = lifts_of_clique(&w, &[0, 1].into_iter().collect(), 0).unwrap();
        assert!(lifts.len() >= 5);
        assert!(rep.pairwise_disjoint && rep.closed_neighbourhoods_disjoint);
        // the co-tree edge lifts across sheets
        let top = w.lookup(&(5, Word::identity())).unwrap();
        let lift = lift_clique(&w, &[0, 5].into_iter().collect(), top).unwrap();
        assert!(lift.contains(w.lookup(&(0, Word::letter(1))).unwrap()));
    }

    #[test]
    fn periodic_cycle() {
        let pn = periodic_n(&cycle_with_z(6), 4).unwrap();
        assert!(pn.stable);
        assert_eq!(pn.representatives.len(), 6);
        assert!(pn.representatives.iter().all(|r| r.order == 1 && r.key[0].len() == 1));
        let id = periodic_n(&VoltagePresentation::identity(two_triangles()), 2).unwrap();
        assert_eq!(id.representatives.len(), 1);
        let c3 = periodic_n(&cycle_with_z(3), 4).unwrap();
        assert!(c3.stable && c3.chordal);
        assert_eq!(c3.representatives.len(), 3);
        assert!(matches!(
            periodic_n(&VoltagePresentation::identity(wheel(4)), 1),
            Err(CoverError::WindowNotChordal(_))
        ));
    }

    #[test]
    fn folding_cycle() {
        let pres = cycle_with_z(6);
        let (_, f) = fold_presentation(&pres, 6, false).unwrap();
        let g = &pres.base;
        assert_eq!(f.gd.model.n(), 6);
        assert_eq!(f.gd.model.edge_count(), 6);
        assert!(f.gd.model.vertices().all(|h| f.gd.model.degree(h) == 2));
        let bags: BTreeSet<VertexSet> = f.gd.bags.iter().cloned().collect();
        let edges: BTreeSet<VertexSet> = g.edges().into_iter().map(|(u, v)| [u, v].into_iter().collect()).collect();
        assert_eq!(bags, edges);
        let rep = verify_graph_decomposition(g, &f.gd);
        assert!(rep.h1() && rep.h2() && rep.into_cliques && rep.into_maximal_cliques, "{rep:?}");
        assert!(f.window_classification.into_cliques);

        let r5 = r_acyclic_check(g, &f.gd, 5, 1 << 20, 1, true).unwrap();
        assert!(r5.acyclic && r5.exhaustive);
        let r6 = r_acyclic_check(g, &f.gd, 6, 1 << 20, 1, true).unwrap();
        assert!(!r6.acyclic);
        assert_eq!(r6.witness.as_ref().unwrap().1.len(), 6);
        let r3 = r_acyclic_check(g, &f.gd, 3, 1 << 20, 1, true).unwrap();
        assert!(r3.acyclic);
    }

    #[test]
    fn folding_identity() {
        let g = two_triangles();
        let (_, f) = fold_presentation(&VoltagePresentation::identity(g.clone()), 0, false).unwrap();
        assert_eq!(f.gd.model.n(), 2);
        assert_eq!(f.gd.model.edge_count(), 1);
        assert!(verify_graph_decomposition(&g, &f.gd).into_maximal_cliques);
        assert!(r_acyclic_check(&g, &f.gd, 4, 100, 0, true).unwrap().acyclic);
    }

    #[test]
    fn gd_mutations() {
        let pres = cycle_with_z(6);
        let (_, f) = fold_presentation(&pres, 6, false).unwrap();
        let g = &pres.base;
        let mut bad = f.gd.clone();
        bad.bags[0] = [0, 3].into_iter().collect();
        assert!(!verify_graph_decomposition(g, &bad).into_cliques);
        let mut bad = f.gd.clone();
        bad.coparts[0].edges.clear();
        let rep = verify_graph_decomposition(g, &bad);
        assert_eq!(rep.bad_coparts, vec!["0".to_string()]);
        let s = f.gd.to_json(g).to_string();
        assert_eq!(GraphDecomposition::from_json_str(g, &s).unwrap(), f.gd);
        assert!(f.gd.to_graphml(g).contains("<edge"));
    }

    #[test]
    fn theorem3() {
        let (r, _) = theorem3_pipeline(&cycle_with_z(6), 3, 6).unwrap();
        assert!(r.locally_chordal && r.gd.into_cliques && r.consistent && r.cover.ok());
        let (r, _) = theorem3_pipeline(&VoltagePresentation::identity(two_triangles()), 3, 0).unwrap();
        assert!(r.locally_chordal && r.gd.into_cliques && r.consistent);
        let (r, _) = theorem3_pipeline(&VoltagePresentation::identity(wheel(4)), 3, 0).unwrap();
        assert!(!r.locally_chordal && !r.gd.into_cliques && r.consistent && !r.window_chordal);
    }
}
