//! Tree-decompositions: validation, induced separations, the tree built
//! from a nested set of proper separations, classification, and the
//! contraction of a decomposition into cliques to one into maximal cliques.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chordal::maximal_cliques_general;
use crate::graph::{Graph, VertexSet};
use crate::separations::{oriented_le, relate, Relation, Separation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeDecError {
    #[error("decomposition tree is not a tree")]
    NotATree,
    #[error("bag count {bags} does not match tree size {nodes}")]
    BagCountMismatch { bags: usize, nodes: usize },
    #[error("separations {0:?} and {1:?} cross")]
    NotNested(Separation, Separation),
    #[error("separation {0:?} is not proper")]
    ImproperSeparation(Separation),
    #[error("{0:?} is not a clique")]
    NotAClique(VertexSet),
    #[error("no bag contains the clique {0:?}")]
    CliqueNotInBag(VertexSet),
    #[error("edge orbit {0:?} is not a matching in the current tree")]
    OrbitNotMatching(Vec<(usize, usize)>),
    #[error("graph is not connected")]
    PreconditionViolated,
    #[error("built tree does not realise the nested set: {0}")]
    BuildFailed(String),
    #[error("invalid decomposition JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Nodes are `0..bags.len()`.
    pub tree: Graph,
    pub bags: Vec<VertexSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TdReport {
    /// Edges of the graph not inside any bag.
    pub uncovered_edges: Vec<(usize, usize)>,
    /// Vertices in no bag.
    pub uncovered_vertices: Vec<usize>,
    /// Vertices whose node set is disconnected in the tree.
    pub disconnected: Vec<usize>,
}

impl TdReport {
    pub fn t1(&self) -> bool {
        self.uncovered_edges.is_empty() && self.uncovered_vertices.is_empty()
    }
    pub fn t2(&self) -> bool {
        self.disconnected.is_empty()
    }
    pub fn valid(&self) -> bool {
        self.t1() && self.t2()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TdClassification {
    pub regular: bool,
    pub point_finite: bool,
    pub into_cliques: bool,
    pub into_maximal_cliques: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrbitOrder {
    #[default]
    Canonical,
    Input,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: usize,
    bag: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdJson {
    nodes: Vec<NodeJson>,
    edges: Vec<[usize; 2]>,
}

impl TreeDecomposition {
    pub fn new(tree: Graph, bags: Vec<VertexSet>) -> Result<Self, TreeDecError> {
        if tree.n() != bags.len() {
            return Err(TreeDecError::BagCountMismatch {
                bags: bags.len(),
                nodes: tree.n(),
            });
        }
        if !tree.is_tree() {
            return Err(TreeDecError::NotATree);
        }
        Ok(TreeDecomposition { tree, bags })
    }

    pub fn from_edges(bags: Vec<VertexSet>, edges: &[(usize, usize)]) -> Result<Self, TreeDecError> {
        let mut tree = Graph::empty(bags.len());
        for &(s, t) in edges {
            if s >= bags.len() || t >= bags.len() || s == t {
                return Err(TreeDecError::NotATree);
            }
            tree.add_edge(s, t).map_err(|_| TreeDecError::NotATree)?;
        }
        if tree.edge_count() != edges.len() {
            return Err(TreeDecError::NotATree);
        }
        Self::new(tree, bags)
    }

    pub fn single_bag(g: &Graph) -> Self {
        TreeDecomposition {
            tree: Graph::empty(1),
            bags: vec![g.all()],
        }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.tree.edges()
    }

    pub fn adhesion(&self, s: usize, t: usize) -> VertexSet {
        self.bags[s].intersection(&self.bags[t])
    }

    /// Nodes whose bags contain `v`.
    pub fn nodes_of(&self, v: usize) -> VertexSet {
        (0..self.len()).filter(|&t| self.bags[t].contains(v)).collect()
    }

    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        let j = TdJson {
            nodes: self
                .bags
                .iter()
                .enumerate()
                .map(|(id, b)| NodeJson { id, bag: g.set_names(b) })
                .collect(),
            edges: self.edges().into_iter().map(|(s, t)| [s, t]).collect(),
        };
        serde_json::to_value(j).expect("serialisable")
    }

    pub fn from_json_str(g: &Graph, s: &str) -> Result<Self, TreeDecError> {
        let j: TdJson = serde_json::from_str(s).map_err(|e| TreeDecError::Json(e.to_string()))?;
        let mut ids: Vec<usize> = j.nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        if ids != (0..j.nodes.len()).collect::<Vec<_>>() {
            return Err(TreeDecError::Json("node ids must be 0..n-1".into()));
        }
        let mut bags = vec![VertexSet::new(); j.nodes.len()];
        for n in &j.nodes {
            let names: Vec<&str> = n.bag.iter().map(String::as_str).collect();
            bags[n.id] = g.set_of(&names).map_err(|e| TreeDecError::Json(e.to_string()))?;
        }
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(bags, &edges)
    }

    pub fn to_dot(&self, g: &Graph) -> String {
        let mut out = String::from("graph T {\n");
        for (t, b) in self.bags.iter().enumerate() {
            out.push_str(&format!("  t{t} [label=\"{}\"];\n", g.set_names(b).join(",")));
        }
        for (s, t) in self.edges() {
            out.push_str(&format!("  t{s} -- t{t} [label=\"{}\"];\n", g.set_names(&self.adhesion(s, t)).join(",")));
        }
        out.push_str("}\n");
        out
    }
}

/// Checks T1 and T2 exhaustively.
pub fn verify_td(g: &Graph, td: &TreeDecomposition) -> Result<TdReport, TreeDecError> {
    if td.tree.n() != td.bags.len() || !td.tree.is_tree() {
        return Err(TreeDecError::NotATree);
    }
    let mut rep = TdReport::default();
    for v in g.vertices() {
        let nodes = td.nodes_of(v);
        if nodes.is_empty() {
            rep.uncovered_vertices.push(v);
        } else if td.tree.components_within(&nodes).len() > 1 {
            rep.disconnected.push(v);
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
            rep.uncovered_edges.push((u, v));
        }
    }
    Ok(rep)
}

/// The separation induced by tree edge `st`: the unions of bags on either side.
pub fn induced_separation(td: &TreeDecomposition, s: usize, t: usize) -> Separation {
    let mut allowed = td.tree.all();
    allowed.remove(t);
    let side_s = td.tree.components_within(&allowed).into_iter().find(|c| c.contains(s)).unwrap_or_default();
    let (mut a, mut b) = (VertexSet::new(), VertexSet::new());
    for x in 0..td.len() {
        if side_s.contains(x) {
            a.union_with(&td.bags[x]);
        } else {
            b.union_with(&td.bags[x]);
        }
    }
    Separation::from_sides(a, b)
}

pub fn induced_separations(td: &TreeDecomposition) -> BTreeMap<(usize, usize), Separation> {
    td.edges().into_iter().map(|(s, t)| ((s, t), induced_separation(td, s, t))).collect()
}

/// `T(N)`: one node per consistent star of oriented separations, one edge per
/// member of `n`.
///
/// Oriented separations are taken as `(far, near)`. Two of them belong to the
/// same node when one is an immediate predecessor of the inverse of the other
/// in the orientation order; each member then joins the nodes of its two
/// orientations, and a node's bag is the intersection of its near sides.
pub fn build_td_from_nested(g: &Graph, n: &BTreeSet<Separation>) -> Result<TreeDecomposition, TreeDecError> {
    if !g.is_connected() {
        return Err(TreeDecError::PreconditionViolated);
    }
    let seps: Vec<&Separation> = n.iter().collect();
    for (i, s) in seps.iter().enumerate() {
        if !s.is_proper() {
            return Err(TreeDecError::ImproperSeparation((*s).clone()));
        }
        for t in &seps[i + 1..] {
            if relate(s, t) == Relation::Crossing {
                return Err(TreeDecError::NotNested((*s).clone(), (*t).clone()));
            }
        }
    }
    if seps.is_empty() {
        return Ok(TreeDecomposition::single_bag(g));
    }
    // oriented separation 2i = (A_i, B_i), 2i+1 = (B_i, A_i)
    let oriented: Vec<(&VertexSet, &VertexSet)> = seps
        .iter()
        .flat_map(|s| [(s.a(), s.b()), (s.b(), s.a())])
        .collect();
    let m = oriented.len();
    let lt = |x: usize, y: usize| x != y && oriented_le(oriented[x].0, oriented[x].1, oriented[y].0, oriented[y].1);
    let mut uf: Vec<usize> = (0..m).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        uf[x] = r;
        r
    }
    for x in 0..m {
        for y in 0..m {
            let inv = y ^ 1;
            if x / 2 == y / 2 || !lt(x, inv) {
                continue;
            }
            if (0..m).any(|z| z / 2 != x / 2 && z / 2 != y / 2 && lt(x, z) && lt(z, inv)) {
                continue;
            }
            let (rx, ry) = (find(&mut uf, x), find(&mut uf, y));
            uf[rx] = ry;
        }
    }
    let mut node_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class = vec![0; m];
    for (x, c) in class.iter_mut().enumerate() {
        let r = find(&mut uf, x);
        let next = node_of.len();
        *c = *node_of.entry(r).or_insert(next);
    }
    let nodes = node_of.len();
    let mut bags: Vec<Option<VertexSet>> = vec![None; nodes];
    for x in 0..m {
        let near = oriented[x].1;
        let bag = &mut bags[class[x]];
        *bag = Some(match bag.take() {
            None => near.clone(),
            Some(b) => b.intersection(near),
        });
    }
    let bags: Vec<VertexSet> = bags.into_iter().map(|b| b.unwrap_or_default()).collect();
    let edges: Vec<(usize, usize)> = (0..seps.len()).map(|i| (class[2 * i], class[2 * i + 1])).collect();
    let td = TreeDecomposition::from_edges(bags, &edges)
        .map_err(|e| TreeDecError::BuildFailed(format!("{e}")))?;
    for (i, &(s, t)) in edges.iter().enumerate() {
        if &induced_separation(&td, s, t) != seps[i] {
            return Err(TreeDecError::BuildFailed(format!("edge {s}-{t} does not induce {:?}", seps[i])));
        }
    }
    let rep = verify_td(g, &td)?;
    if !rep.valid() {
        return Err(TreeDecError::BuildFailed(format!("{rep:?}")));
    }
    Ok(td)
}

pub fn classify_td(g: &Graph, td: &TreeDecomposition) -> TdClassification {
    let regular = induced_separations(td).values().all(Separation::is_proper);
    let into_cliques = td.bags.iter().all(|b| g.is_clique(b));
    let maximal: BTreeSet<VertexSet> = if into_cliques {
        maximal_cliques_general(g).into_iter().collect()
    } else {
        BTreeSet::new()
    };
    let bag_set: BTreeSet<&VertexSet> = td.bags.iter().collect();
    let into_maximal_cliques =
        into_cliques && bag_set.len() == td.len() && td.len() == maximal.len() && td.bags.iter().all(|b| maximal.contains(b));
    TdClassification {
        regular,
        point_finite: true,
        into_cliques,
        into_maximal_cliques,
    }
}

/// A node whose bag contains the clique `k`.
pub fn clique_in_bag(g: &Graph, td: &TreeDecomposition, k: &VertexSet) -> Result<usize, TreeDecError> {
    if !g.is_clique(k) {
        return Err(TreeDecError::NotAClique(k.clone()));
    }
    (0..td.len())
        .find(|&t| k.is_subset(&td.bags[t]))
        .ok_or_else(|| TreeDecError::CliqueNotInBag(k.clone()))
}

/// Contracts tree edges orbit by orbit wherever one end's bag contains the
/// other's, merging bags by union. `orbits` partitions the tree edges; pass
/// singletons for the trivial group.
pub fn contract_to_maximal(
    td: &TreeDecomposition,
    orbits: &[Vec<(usize, usize)>],
    order: OrbitOrder,
) -> Result<TreeDecomposition, TreeDecError> {
    let norm = |(s, t): (usize, usize)| (s.min(t), s.max(t));
    let mut orbits: Vec<Vec<(usize, usize)>> = orbits
        .iter()
        .map(|o| {
            let mut o: Vec<_> = o.iter().copied().map(norm).collect();
            o.sort_unstable();
            o
        })
        .collect();
    if order == OrbitOrder::Canonical {
        orbits.sort();
    }
    let n = td.len();
    let mut uf: Vec<usize> = (0..n).collect();
    let mut bags = td.bags.clone();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        uf[x] = r;
        r
    }
    loop {
        let mut changed = false;
        for orbit in &orbits {
            let Some(&(s, t)) = orbit.first() else { continue };
            let (rs, rt) = (find(&mut uf, s), find(&mut uf, t));
            if rs == rt {
                continue;
            }
            if !bags[rs].is_subset(&bags[rt]) && !bags[rt].is_subset(&bags[rs]) {
                continue;
            }
            let mut touched = BTreeSet::new();
            for &(x, y) in orbit {
                let (rx, ry) = (find(&mut uf, x), find(&mut uf, y));
                if rx == ry || !touched.insert(rx) || !touched.insert(ry) {
                    return Err(TreeDecError::OrbitNotMatching(orbit.clone()));
                }
            }
            for &(x, y) in orbit {
                let (rx, ry) = (find(&mut uf, x), find(&mut uf, y));
                let merged = bags[rx].union(&bags[ry]);
                uf[rx] = ry;
                bags[ry] = merged;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut uf, x);
        let next = index.len();
        index.entry(r).or_insert(next);
    }
    let mut new_bags = vec![VertexSet::new(); index.len()];
    for (&r, &i) in &index {
        new_bags[i] = bags[r].clone();
    }
    let mut edges = BTreeSet::new();
    for (s, t) in td.edges() {
        let (a, b) = (index[&find(&mut uf, s)], index[&find(&mut uf, t)]);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    TreeDecomposition::from_edges(new_bags, &edges.into_iter().collect::<Vec<_>>())
}

pub fn singleton_orbits(td: &TreeDecomposition) -> Vec<Vec<(usize, usize)>> {
    td.edges().into_iter().map(|e| vec![e]).collect()
}

/// Edge orbits of the tree under tree automorphisms given as node maps.
pub fn edge_orbits(td: &TreeDecomposition, tree_maps: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in td.edges() {
        if seen.contains(&e) {
            continue;
        }
        let mut orbit = BTreeSet::from([e]);
        let mut stack = vec![e];
        while let Some((s, t)) = stack.pop() {
            for p in tree_maps {
                let (a, b) = (p[s], p[t]);
                let f = (a.min(b), a.max(b));
                if orbit.insert(f) {
                    stack.push(f);
                }
            }
        }
        seen.extend(orbit.iter().copied());
        out.push(orbit.into_iter().collect());
    }
    out
}

/// Given a connected graph and a decomposition whose parts are disjoint
/// unions of complete graphs, reports whether every bag is a single clique.
pub fn disjoint_union_bags_lemma_check(g: &Graph, td: &TreeDecomposition) -> Result<bool, TreeDecError> {
    if !g.is_connected() {
        return Err(TreeDecError::PreconditionViolated);
    }
    for b in &td.bags {
        let (h, _) = g.induced(b);
        if !h.components().iter().all(|c| h.is_clique(c)) {
            return Err(TreeDecError::PreconditionViolated);
        }
    }
    Ok(td.bags.iter().all(|b| g.is_clique(b)))
}
