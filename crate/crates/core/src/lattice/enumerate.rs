//! Enumeration of connected cubic graphs up to isomorphism by orderly edge
//! augmentation with canonical-augmentation pruning.
//!
//! Partial objects are degree-bounded (max degree 3) graphs on a fixed
//! vertex board. A child is accepted only when the edge just added lies in
//! the automorphism orbit of a canonically chosen deletion edge, so every
//! isomorphism class is produced from exactly one parent, exactly once.

use super::canon::{canonicalize, pair_orbits};
use super::planar::{is_planar, is_three_connected};
use super::Graph;
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Default enumeration budget for `n`; 16 and 18 need the long-run flag.
pub const ENUM_DEFAULT_BUDGET: usize = 14;
const ENUM_LONG_RUN_BUDGET: usize = 18;

#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    pub planar_only: bool,
    /// Additionally keep only 3-connected (polyhedral) graphs.
    pub three_connected_only: bool,
    /// Allow n in 16..=18.
    pub long_run: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            planar_only: false,
            three_connected_only: false,
            long_run: false,
        }
    }
}

/// All connected 3-regular simple graphs on `n` vertices, one canonical
/// representative per isomorphism class, sorted by canonical form.
pub fn enumerate_cubic(n: usize, planar_only: bool) -> Result<Vec<Graph>> {
    enumerate_cubic_with(
        n,
        &EnumerateOptions {
            planar_only,
            ..Default::default()
        },
    )
}

pub fn enumerate_cubic_with(n: usize, opts: &EnumerateOptions) -> Result<Vec<Graph>> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::invalid(format!(
            "cubic graphs need an even vertex count >= 4, got {n}"
        )));
    }
    let budget = if opts.long_run {
        ENUM_LONG_RUN_BUDGET
    } else {
        ENUM_DEFAULT_BUDGET
    };
    if n > budget {
        return Err(Error::budget(format!(
            "enumeration of n={n} exceeds budget {budget}{}",
            if opts.long_run {
                ""
            } else {
                " (pass the long-run flag for 16-18)"
            }
        )));
    }
    let target_edges = 3 * n / 2;
    let root = PartialGraph::empty(n);
    let mut out = grow(&root, n, target_edges, opts, 0);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Degree-annotated partial graph during generation.
#[derive(Clone)]
struct PartialGraph {
    graph: Graph,
    deg: Vec<usize>,
}

impl PartialGraph {
    fn empty(n: usize) -> Self {
        PartialGraph {
            graph: Graph::new(n, Vec::new()).unwrap(),
            deg: vec![0; n],
        }
    }

    fn with_edge(&self, u: usize, v: usize) -> Self {
        let mut edges = self.graph.edges().to_vec();
        edges.push((u, v));
        let graph = Graph::new(self.graph.n(), edges).unwrap();
        let mut deg = self.deg.clone();
        deg[u] += 1;
        deg[v] += 1;
        PartialGraph { graph, deg }
    }
}

/// Reject children that can no longer reach a connected cubic target.
fn viable(pg: &PartialGraph, target_edges: usize, planar_only: bool) -> bool {
    let g = &pg.graph;
    let n = g.n();
    let remaining = target_edges - g.num_edges();
    // component scan
    let adj = g.adjacency();
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0usize;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        ncomp += 1;
    }
    if ncomp > 1 && ncomp - 1 > remaining {
        return false;
    }
    // a saturated component that is not the whole board is dead
    if ncomp > 1 {
        let mut free = vec![0usize; ncomp];
        for v in 0..n {
            free[comp[v]] += 3 - pg.deg[v];
        }
        if free.iter().any(|&f| f == 0) {
            return false;
        }
    }
    if planar_only {
        // planarity is minor-closed: test the component holding new edges;
        // testing all components keeps it simple at this scale
        let mut verts_by_comp = vec![Vec::new(); ncomp];
        for v in 0..n {
            verts_by_comp[comp[v]].push(v);
        }
        for verts in verts_by_comp {
            if verts.len() < 5 {
                continue;
            }
            let index: std::collections::HashMap<usize, usize> =
                verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let edges: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .filter(|(a, _)| index.contains_key(a))
                .map(|&(a, b)| (index[&a], index[&b]))
                .collect();
            let sub = Graph::new(verts.len(), edges).unwrap();
            if !is_planar(&sub).unwrap_or(true) {
                return false;
            }
        }
    }
    true
}

fn grow(
    pg: &PartialGraph,
    n: usize,
    target_edges: usize,
    opts: &EnumerateOptions,
    depth: usize,
) -> Vec<Graph> {
    let g = &pg.graph;
    if g.num_edges() == target_edges {
        // degree sum forces 3-regularity here
        if !g.is_connected() {
            return Vec::new();
        }
        if opts.three_connected_only && !is_three_connected(g).unwrap_or(false) {
            return Vec::new();
        }
        return vec![canonicalize(g).graph];
    }

    let canon = canonicalize(g);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        if pg.deg[u] >= 3 {
            continue;
        }
        for v in (u + 1)..n {
            if pg.deg[v] < 3 && !g.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    let orbits = pair_orbits(n, &canon.generators, &candidates);
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, &p) in candidates.iter().enumerate() {
        if seen.insert(orbits[i]) {
            reps.push(p);
        }
    }

    let children: Vec<PartialGraph> = reps
        .into_iter()
        .filter_map(|(u, v)| {
            let child = pg.with_edge(u, v);
            if viable(&child, target_edges, opts.planar_only)
                && canonical_augmentation_ok(&child, (u, v))
            {
                Some(child)
            } else {
                None
            }
        })
        .collect();

    // parallelize shallow subtrees; merge order preserved, then sorted anyway
    let results: Vec<Vec<Graph>> = if depth < 3 && children.len() > 1 {
        children
            .par_iter()
            .map(|c| grow(c, n, target_edges, opts, depth + 1))
            .collect()
    } else {
        children
            .iter()
            .map(|c| grow(c, n, target_edges, opts, depth + 1))
            .collect()
    };
    results.into_iter().flatten().collect()
}

/// Accept the child iff the edge just added is in the same automorphism
/// orbit as the canonical deletion edge (the lexicographically last edge of
/// the canonical form, pulled back to child labels).
fn canonical_augmentation_ok(pg: &PartialGraph, added: (usize, usize)) -> bool {
    let canon = canonicalize(&pg.graph);
    let canon_edge = *canon
        .graph
        .edges()
        .last()
        .expect("child has at least one edge");
    let mut inv = vec![0usize; pg.graph.n()];
    for (old, &new) in canon.perm.iter().enumerate() {
        inv[new] = old;
    }
    let (a, b) = (inv[canon_edge.0], inv[canon_edge.1]);
    let target = (a.min(b), a.max(b));
    if target == added {
        return true;
    }
    let edges = pg.graph.edges();
    let orbits = pair_orbits(pg.graph.n(), &canon.generators, edges);
    let idx_added = edges.binary_search(&added).expect("added edge present");
    let idx_target = edges.binary_search(&target).expect("canonical edge present");
    orbits[idx_added] == orbits[idx_target]
}
