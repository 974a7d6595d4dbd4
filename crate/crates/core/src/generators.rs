//! Instance families used by the test suites and the `gen` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexSet};

pub const DEFAULT_SEED: u64 = 20240601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `K_{1,t}` with centre `c` and leaves `1..=t`.
pub fn star(t: usize) -> Graph {
    let mut g = Graph::with_vertices(["c"]);
    for i in 1..=t {
        let l = g.add_vertex(i.to_string());
        g.add_edge(0, l).expect("no loops");
    }
    g
}

/// Path on `n` vertices named `0..n`.
pub fn path(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for i in 1..n {
        g.add_edge(i - 1, i).expect("no loops");
    }
    g
}

/// Cycle on `n >= 3` vertices named `0..n`.
pub fn cycle(n: usize) -> Graph {
    let mut g = path(n);
    if n >= 3 {
        g.add_edge(n - 1, 0).expect("no loops");
    }
    g
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v).expect("no loops");
        }
    }
    g
}

/// Two triangles `abc`, `bcd` sharing the edge `bc`.
pub fn two_triangles() -> Graph {
    Graph::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).expect("valid")
}

/// A cycle `0..k` plus a hub `h` adjacent to all of it.
pub fn wheel(k: usize) -> Graph {
    let mut g = cycle(k);
    let h = g.add_vertex("h");
    for v in 0..k {
        g.add_edge(h, v).expect("no loops");
    }
    g
}

/// A random `k`-tree on `n >= k + 1` vertices: start from `K_{k+1}` and
/// attach each new vertex to a random `k`-clique.
pub fn ktree(n: usize, k: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let base = (k + 1).min(n);
    let mut g = complete(base);
    let mut cliques: Vec<Vec<usize>> = vec![(0..base).collect()];
    for v in base..n {
        let host = cliques.choose(&mut r).expect("nonempty").clone();
        let drop = r.gen_range(0..host.len());
        let attach: Vec<usize> = host.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &u)| u).collect();
        let w = g.add_vertex(v.to_string());
        for &u in &attach {
            g.add_edge(w, u).expect("no loops");
        }
        let mut c = attach;
        c.push(w);
        cliques.push(c);
    }
    g
}

/// A random connected chordal graph on `n` vertices built along a perfect
/// elimination ordering: each new vertex is joined to a random nonempty
/// subset of a random maximal clique, of size below `max_clique`.
pub fn random_chordal(n: usize, max_clique: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut g = Graph::empty(n.min(1));
    let mut cliques: Vec<VertexSet> = if n > 0 { vec![VertexSet::singleton(0)] } else { Vec::new() };
    for v in 1..n {
        let i = r.gen_range(0..cliques.len());
        let mut members = cliques[i].to_vec();
        members.shuffle(&mut r);
        let cap = members.len().min(max_clique.saturating_sub(1).max(1));
        let take = r.gen_range(1..=cap);
        let attach: VertexSet = members[..take].iter().copied().collect();
        let w = g.add_vertex(v.to_string());
        for u in attach.iter() {
            g.add_edge(w, u).expect("no loops");
        }
        if attach == cliques[i] {
            cliques.swap_remove(i);
        }
        let mut c = attach;
        c.insert(w);
        cliques.push(c);
    }
    g
}

/// A random graph with edge probability `p`, for non-chordal test inputs.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                g.add_edge(u, v).expect("no loops");
            }
        }
    }
    g
}
