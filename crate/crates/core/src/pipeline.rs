//! End-to-end runs over a single finite graph, producing the reports the
//! command-line tool prints.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::chordal::maximal_cliques;
use crate::graph::{Graph, VertexSet};
use crate::nested::{construct_n_with, verify_n, ConstructOptions, NestedError, NestedReport, NestedSetLevels};
use crate::separations::Separation;
use crate::symmetry::{automorphism_generators, verify_canonical_td, AutomorphismSet, CanonicityReport, SymmetryError};
use crate::treedec::{
    build_td_from_nested, classify_td, contract_to_maximal, edge_orbits, induced_separations, singleton_orbits, verify_td,
    OrbitOrder, TdClassification, TdReport, TreeDecError, TreeDecomposition,
};

pub const SCHEMA: &str = "v1";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Nested(#[from] NestedError),
    #[error(transparent)]
    TreeDec(#[from] TreeDecError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("t = {0} is outside 3..=6")]
    OutOfRange(usize),
}

#[derive(Debug, Clone)]
pub struct CanonicalTd {
    pub levels: NestedSetLevels,
    pub td: TreeDecomposition,
    pub td_report: TdReport,
    pub classification: TdClassification,
    pub nested_report: NestedReport,
    pub aut: AutomorphismSet,
    pub canonicity: CanonicityReport,
    /// Whether the induced separations of `td` are exactly `N(G)`.
    pub realises_n: bool,
}

impl CanonicalTd {
    pub fn ok(&self) -> bool {
        self.td_report.valid()
            && self.classification.regular
            && self.classification.into_cliques
            && self.nested_report.ok()
            && self.canonicity.canonical
            && self.realises_n
    }
}

pub fn separation_json(g: &Graph, s: &Separation) -> Value {
    json!({"A": g.set_names(s.a()), "B": g.set_names(s.b())})
}

pub fn permutation_json(g: &Graph, p: &[usize]) -> Value {
    Value::Object(
        p.iter()
            .enumerate()
            .map(|(v, &w)| (g.name(v).to_string(), Value::String(g.name(w).to_string())))
            .collect(),
    )
}

/// `N(G)`, its tree `T(N)`, and every check on them.
pub fn canonical_td(g: &Graph, opts: ConstructOptions) -> Result<CanonicalTd, PipelineError> {
    let levels = construct_n_with(g, opts)?;
    let td = build_td_from_nested(g, &levels.union)?;
    let td_report = verify_td(g, &td)?;
    let classification = classify_td(g, &td);
    let aut = automorphism_generators(g)?;
    let nested_report = verify_n(g, &levels.union, &aut.generators);
    let canonicity = verify_canonical_td(&td, &aut);
    let induced: BTreeSet<Separation> = induced_separations(&td).into_values().collect();
    let realises_n = induced == levels.union;
    Ok(CanonicalTd {
        levels,
        td,
        td_report,
        classification,
        nested_report,
        aut,
        canonicity,
        realises_n,
    })
}

impl CanonicalTd {
    pub fn to_json(&self, g: &Graph) -> Value {
        let levels: serde_json::Map<String, Value> = self
            .levels
            .levels
            .iter()
            .map(|(k, l)| (k.to_string(), l.iter().map(|s| separation_json(g, s)).collect()))
            .collect();
        let provenance: Vec<Value> = self
            .levels
            .provenance
            .iter()
            .map(|(s, pairs)| {
                json!({
                    "separation": separation_json(g, s),
                    "clique_pairs": pairs.iter().map(|&(i, j)| json!([
                        g.set_names(&self.levels.cliques[i]),
                        g.set_names(&self.levels.cliques[j]),
                    ])).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "schema": SCHEMA,
            "levels": levels,
            "provenance": provenance,
            "decomposition": self.td.to_json(g),
            "valid": self.td_report.valid(),
            "classification": self.classification,
            "nested": self.nested_report.nested(),
            "tight_clique_separators": self.nested_report.tight_with_clique_separators(),
            "invariant": self.nested_report.invariant(),
            "distinguishes_all_cliques": self.nested_report.distinguishes_all(),
            "realises_n": self.realises_n,
            "automorphism_group_order": self.aut.group_order.to_string(),
            "generators": self.aut.generators.iter().map(|p| permutation_json(g, p)).collect::<Vec<_>>(),
            "canonical": self.canonicity.canonical,
        })
    }
}

/// Contracts a decomposition into cliques towards one into maximal cliques.
/// With `canonical`, edge orbits come from the automorphism group's action on
/// the tree; otherwise every edge is its own orbit.
pub fn maximal_td(
    g: &Graph,
    opts: ConstructOptions,
    canonical: bool,
    order: OrbitOrder,
) -> Result<(CanonicalTd, TreeDecomposition), PipelineError> {
    let c = canonical_td(g, opts)?;
    let orbits = if canonical {
        let maps: Vec<Vec<usize>> = c.canonicity.actions.iter().filter_map(|a| a.tree_map.clone()).collect();
        edge_orbits(&c.td, &maps)
    } else {
        singleton_orbits(&c.td)
    };
    let out = contract_to_maximal(&c.td, &orbits, order)?;
    Ok((c, out))
}

/// Bags in sorted order, for comparing decompositions as multisets.
pub fn bag_multiset(td: &TreeDecomposition) -> Vec<VertexSet> {
    let mut b = td.bags.clone();
    b.sort();
    b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example51 {
    pub t: usize,
    pub candidate_trees: usize,
    pub valid: usize,
    pub canonical: usize,
    /// The decomposition of `N(K_{1,t})`: canonical, with centre bag `{c}`.
    pub star_canonical: bool,
    pub star_into_maximal_cliques: bool,
    pub star_centre_bag: Vec<String>,
}

impl Example51 {
    pub fn summary(&self) -> String {
        let verdict = if self.canonical == 0 {
            "no canonical tree-decomposition into maximal cliques exists"
        } else {
            "a canonical tree-decomposition into maximal cliques exists"
        };
        format!("{verdict} ({} candidate trees, {} canonical)", self.candidate_trees, self.canonical)
    }
}

/// Labelled trees on `t` nodes from Prüfer sequences.
pub fn labelled_trees(t: usize) -> Vec<Vec<(usize, usize)>> {
    if t < 2 {
        return vec![Vec::new()];
    }
    if t == 2 {
        return vec![vec![(0, 1)]];
    }
    let total = t.pow((t - 2) as u32);
    (0..total)
        .map(|mut code| {
            let mut seq = Vec::with_capacity(t - 2);
            for _ in 0..t - 2 {
                seq.push(code % t);
                code /= t;
            }
            let mut degree = vec![1usize; t];
            for &x in &seq {
                degree[x] += 1;
            }
            let mut edges = Vec::with_capacity(t - 1);
            for &x in &seq {
                let leaf = (0..t).find(|&v| degree[v] == 1).expect("a leaf exists");
                edges.push((leaf.min(x), leaf.max(x)));
                degree[leaf] -= 1;
                degree[x] -= 1;
            }
            let rest: Vec<usize> = (0..t).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            edges
        })
        .collect()
}

/// Every tree on the `t` maximal cliques of `K_{1,t}` is tested for
/// canonicity against the automorphism group.
pub fn reproduce_example_51(t: usize) -> Result<Example51, PipelineError> {
    if !(3..=6).contains(&t) {
        return Err(PipelineError::OutOfRange(t));
    }
    let g = crate::generators::star(t);
    let aut = automorphism_generators(&g)?;
    let cliques = maximal_cliques(&g).expect("stars are chordal");
    let trees = labelled_trees(t);
    let (mut valid, mut canonical) = (0, 0);
    for edges in &trees {
        let td = TreeDecomposition::from_edges(cliques.clone(), edges)?;
        if verify_td(&g, &td)?.valid() {
            valid += 1;
        }
        if verify_canonical_td(&td, &aut).canonical {
            canonical += 1;
        }
    }
    let star = canonical_td(&g, ConstructOptions::default())?;
    let centre = (0..star.td.len()).find(|&x| star.td.tree.degree(x) == t).expect("star tree");
    Ok(Example51 {
        t,
        candidate_trees: trees.len(),
        valid,
        canonical,
        star_canonical: star.canonicity.canonical,
        star_into_maximal_cliques: star.classification.into_maximal_cliques,
        star_centre_bag: g.set_names(&star.td.bags[centre]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{star, two_triangles};

    #[test]
    fn prufer_counts() {
        assert_eq!(labelled_trees(3).len(), 3);
        assert_eq!(labelled_trees(4).len(), 16);
        let distinct: BTreeSet<Vec<(usize, usize)>> = labelled_trees(5)
            .into_iter()
            .map(|mut e| {
                e.sort();
                e
            })
            .collect();
        assert_eq!(distinct.len(), 125);
    }

    #[test]
    fn star_pipeline() {
        let g = star(3);
        let c = canonical_td(&g, ConstructOptions::default()).unwrap();
        assert!(c.ok());
        assert_eq!(c.td.len(), 4);
        assert!(c.td.bags.contains(&g.set_of(&["c"]).unwrap()));
        let (_, m) = maximal_td(&g, ConstructOptions::default(), false, OrbitOrder::Canonical).unwrap();
        assert!(classify_td(&g, &m).into_maximal_cliques);
        assert!(matches!(
            maximal_td(&g, ConstructOptions::default(), true, OrbitOrder::Canonical),
            Err(PipelineError::TreeDec(TreeDecError::OrbitNotMatching(_)))
        ));
    }

    #[test]
    fn example_51() {
        for (t, n) in [(3, 3), (4, 16)] {
            let r = reproduce_example_51(t).unwrap();
            assert_eq!((r.candidate_trees, r.valid, r.canonical), (n, n, 0));
            assert!(r.star_canonical && !r.star_into_maximal_cliques);
            assert_eq!(r.star_centre_bag, vec!["c"]);
        }
        assert_eq!(
            reproduce_example_51(3).unwrap().summary(),
            "no canonical tree-decomposition into maximal cliques exists (3 candidate trees, 0 canonical)"
        );
        assert!(matches!(reproduce_example_51(2), Err(PipelineError::OutOfRange(2))));
    }

    #[test]
    fn two_triangles_pipeline() {
        let g = two_triangles();
        let c = canonical_td(&g, ConstructOptions::default()).unwrap();
        assert!(c.ok());
        assert!(c.classification.into_maximal_cliques);
        assert_eq!(c.to_json(&g)["schema"], "v1");
    }
}
