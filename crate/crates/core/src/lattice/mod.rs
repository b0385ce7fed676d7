//! Graph data model, geometry generators, graph-file ingestion, cubic-graph
//! enumeration, and classical frustration analysis.
//!
//! Vertices are `0..n`; edges are unordered pairs stored in a canonical order
//! (each pair ascending, list sorted) so equal graphs compare bit-identically.

mod canon;
mod enumerate;
mod io;
mod planar;

pub use canon::{are_isomorphic, automorphism_orbits, canonical_form};
pub use enumerate::{enumerate_cubic, enumerate_cubic_with, EnumerateOptions, ENUM_DEFAULT_BUDGET};
pub use io::{load_graphs, save_graphs, NamedGraph};
pub use planar::{is_planar, is_three_connected, k33_minor_oracle};

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Build a graph, validating simplicity and endpoint range. Edges are
    /// normalized to the canonical order regardless of input order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid(format!(
                    "duplicate edge ({},{})",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(Graph { n, edges: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Adjacency lists, neighbors ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn is_cubic(&self) -> bool {
        self.degrees().iter().all(|&d| d == 3)
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// BFS 2-coloring; `Some(colors)` iff bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let mut color: Vec<i8> = vec![-1; self.n];
        for start in 0..self.n {
            if color[start] >= 0 {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if color[w] < 0 {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        return None;
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c == 1).collect())
    }
}

/// Classical frustration summary at `B = 0`.
///
/// An edge is unsatisfied when its endpoints carry equal spins
/// (`z_i z_j = +1` for the antiferromagnet).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrustrationReport {
    pub bipartite: bool,
    /// Minimum number of unsatisfied edges over all 2^n assignments.
    pub min_violations: u32,
    /// Number of assignments attaining the minimum.
    pub classical_degeneracy: u64,
}

/// Hard cap for the exhaustive 2^n frustration scan.
pub const FRUSTRATION_BUDGET: usize = 26;

/// Exhaustive scan of all classical spin assignments.
pub fn frustration(g: &Graph) -> Result<FrustrationReport> {
    if g.n() > FRUSTRATION_BUDGET {
        return Err(Error::budget(format!(
            "frustration scan needs 2^{} assignments (limit 2^{FRUSTRATION_BUDGET})",
            g.n()
        )));
    }
    let masks: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(a, b)| (1usize << a) | (1usize << b))
        .collect();
    let total = 1usize << g.n();
    // Chunked so the reduction order is fixed regardless of thread count.
    let chunk = 1usize << 14;
    let per_chunk: Vec<(u32, u64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            let mut best = u32::MAX;
            let mut count = 0u64;
            for s in lo..hi {
                let mut viol = 0u32;
                for &m in &masks {
                    // endpoints equal <=> the two masked bits are both 0 or both 1
                    let bits = (s & m).count_ones();
                    viol += u32::from(bits != 1);
                }
                match viol.cmp(&best) {
                    std::cmp::Ordering::Less => {
                        best = viol;
                        count = 1;
                    }
                    std::cmp::Ordering::Equal => count += 1,
                    std::cmp::Ordering::Greater => {}
                }
            }
            (best, count)
        })
        .collect();
    let mut best = u32::MAX;
    let mut count = 0u64;
    for (b, c) in per_chunk {
        match b.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = b;
                count = c;
            }
            std::cmp::Ordering::Equal => count += c,
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok(FrustrationReport {
        bipartite: g.bipartition().is_some(),
        min_violations: best,
        classical_degeneracy: count,
    })
}

/// Exhaustive classical ground energy of `sum_E z_i z_j + b * sum_i z_i`
/// (spin convention `z = +1` for bit 0), with its degeneracy.
pub fn classical_ground(g: &Graph, b: f64) -> Result<(f64, u64)> {
    if g.n() > FRUSTRATION_BUDGET {
        return Err(Error::budget(format!(
            "classical scan over 2^{} assignments (limit 2^{FRUSTRATION_BUDGET})",
            g.n()
        )));
    }
    let n = g.n();
    let e = g.num_edges() as f64;
    let mut best = f64::INFINITY;
    let mut count = 0u64;
    for s in 0..(1usize << n) {
        let mut sat = 0i64; // edges with opposite endpoints
        for &(u, v) in g.edges() {
            sat += i64::from(((s >> u) ^ (s >> v)) & 1 == 1);
        }
        // zz sum = (#equal) - (#opposite) = E - 2*sat
        let zz = e - 2.0 * sat as f64;
        let mag = n as f64 - 2.0 * (s & ((1 << n) - 1)).count_ones() as f64;
        let energy = zz + b * mag;
        if energy < best - 1e-12 {
            best = energy;
            count = 1;
        } else if (energy - best).abs() <= 1e-12 {
            count += 1;
        }
    }
    Ok((best, count))
}

/// "Ladder on a circle": two rings of `n_total/2` vertices joined by rungs.
/// Inner ring takes vertices `0..n/2`, outer `n/2..n`, so tracing out one
/// ring is a contiguous-bit partial trace.
pub fn ladder_on_circle(n_total: usize) -> Result<Graph> {
    if n_total % 2 != 0 || n_total < 6 {
        return Err(Error::invalid(format!(
            "ladder needs an even vertex count >= 6, got {n_total}"
        )));
    }
    let h = n_total / 2;
    let mut edges = Vec::with_capacity(3 * h);
    for i in 0..h {
        edges.push((i, (i + 1) % h)); // inner ring
        edges.push((h + i, h + (i + 1) % h)); // outer ring
        edges.push((i, h + i)); // rung
    }
    Graph::new(n_total, edges)
}

/// Vertex set of the inner (`0..n/2`) or outer (`n/2..n`) ring of a ladder.
pub fn ring_block(n_total: usize, inner: bool) -> Vec<usize> {
    let h = n_total / 2;
    if inner {
        (0..h).collect()
    } else {
        (h..n_total).collect()
    }
}

/// Connected vertex set of the requested size grown by seeded-random BFS.
/// Deterministic for a given `(g, size, seed)`.
pub fn connected_block(g: &Graph, size: usize, seed: u64) -> Result<Vec<usize>> {
    if size == 0 || size > g.n() {
        return Err(Error::invalid(format!(
            "block size {size} out of range 1..={}",
            g.n()
        )));
    }
    if !g.is_connected() {
        return Err(Error::invalid("connected_block requires a connected graph"));
    }
    let adj = g.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..g.n());
    let mut in_block = vec![false; g.n()];
    let mut block = vec![start];
    in_block[start] = true;
    let mut frontier: Vec<usize> = adj[start].clone();
    while block.len() < size {
        frontier.retain(|&v| !in_block[v]);
        frontier.sort_unstable();
        frontier.dedup();
        let pick = frontier[rng.gen_range(0..frontier.len())];
        in_block[pick] = true;
        block.push(pick);
        frontier.extend(adj[pick].iter().copied().filter(|&w| !in_block[w]));
    }
    block.sort_unstable();
    Ok(block)
}

/// Scalable graph families used by the sweep module's scaling studies.
#[derive(Debug, Clone)]
pub enum GraphFamily {
    /// Non-frustrated ladders: rings of even length, `n = 0 mod 4`.
    LadderEven,
    /// Frustrated ladders: rings of odd length, `n = 2 mod 4`.
    LadderOdd,
    /// A fixed corpus of named graphs keyed by vertex count.
    Corpus {
        name: String,
        members: std::collections::BTreeMap<usize, Graph>,
    },
}

impl GraphFamily {
    pub fn name(&self) -> &str {
        match self {
            GraphFamily::LadderEven => "ladder_even",
            GraphFamily::LadderOdd => "ladder_odd",
            GraphFamily::Corpus { name, .. } => name,
        }
    }

    pub fn produce(&self, n: usize) -> Result<Graph> {
        match self {
            GraphFamily::LadderEven => {
                if n % 4 != 0 || n < 8 {
                    return Err(Error::invalid(format!(
                        "ladder_even needs n = 0 mod 4, n >= 8; got {n}"
                    )));
                }
                ladder_on_circle(n)
            }
            GraphFamily::LadderOdd => {
                if n % 4 != 2 || n < 6 {
                    return Err(Error::invalid(format!(
                        "ladder_odd needs n = 2 mod 4, n >= 6; got {n}"
                    )));
                }
                ladder_on_circle(n)
            }
            GraphFamily::Corpus { name, members } => members.get(&n).cloned().ok_or_else(|| {
                Error::invalid(format!("corpus {name} has no member with n={n}"))
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_canonical_edge_order() {
        let a = Graph::new(4, vec![(3, 2), (1, 0), (0, 2)]).unwrap();
        let b = Graph::new(4, vec![(0, 1), (2, 3), (2, 0)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges(), &[(0, 1), (0, 2), (2, 3)]);
    }

    #[test]
    fn graph_rejects_loops_dups_range() {
        assert!(Graph::new(3, vec![(1, 1)]).is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, vec![(0, 3)]).is_err());
    }

    #[test]
    fn ladder_prism_smallest() {
        let g = ladder_on_circle(6).unwrap();
        assert_eq!(g.num_edges(), 9);
        assert!(g.is_cubic());
        assert!(g.is_connected());
        assert!(ladder_on_circle(5).is_err());
        assert!(ladder_on_circle(4).is_err());
    }

    #[test]
    fn ladder_16_and_18() {
        let g16 = ladder_on_circle(16).unwrap();
        assert_eq!(g16.num_edges(), 24);
        assert!(g16.bipartition().is_some());
        let g18 = ladder_on_circle(18).unwrap();
        assert_eq!(g18.num_edges(), 27);
        assert!(g18.bipartition().is_none());
    }

    #[test]
    fn ladder_bipartite_iff_half_even() {
        for n in (6..=24).step_by(2) {
            let g = ladder_on_circle(n).unwrap();
            assert_eq!(g.bipartition().is_some(), (n / 2) % 2 == 0, "n={n}");
        }
    }

    #[test]
    fn frustration_ladder16() {
        let r = frustration(&ladder_on_circle(16).unwrap()).unwrap();
        assert!(r.bipartite);
        assert_eq!(r.min_violations, 0);
        assert_eq!(r.classical_degeneracy, 2);
    }

    #[test]
    fn frustration_ladder18() {
        let r = frustration(&ladder_on_circle(18).unwrap()).unwrap();
        assert!(!r.bipartite);
        assert_eq!(r.min_violations, 2);
        assert_eq!(r.classical_degeneracy % 2, 0);
    }

    #[test]
    fn frustration_k4() {
        let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let r = frustration(&k4).unwrap();
        assert_eq!(r.min_violations, 2); // max cut of K4 is 4 of 6 edges
        assert!(!r.bipartite);
    }

    #[test]
    fn frustration_zero_iff_bipartite_small() {
        for n in [6usize, 8, 10] {
            for g in enumerate_cubic(n, false).unwrap() {
                let r = frustration(&g).unwrap();
                assert_eq!(r.min_violations == 0, r.bipartite);
                assert_eq!(r.classical_degeneracy % 2, 0);
            }
        }
    }

    #[test]
    fn classical_ground_matches_frustration_at_b0() {
        let g = ladder_on_circle(10).unwrap();
        let r = frustration(&g).unwrap();
        let (e, deg) = classical_ground(&g, 0.0).unwrap();
        // energy = (#equal) - (#opposite) = 2*violations - E
        assert_eq!(e, 2.0 * r.min_violations as f64 - g.num_edges() as f64);
        assert_eq!(deg, r.classical_degeneracy);
    }

    #[test]
    fn connected_block_deterministic_and_connected() {
        let g = ladder_on_circle(16).unwrap();
        let b1 = connected_block(&g, 8, 42).unwrap();
        let b2 = connected_block(&g, 8, 42).unwrap();
        assert_eq!(b1, b2);
        assert_eq!(b1.len(), 8);
        // The block induces a connected subgraph.
        let set: std::collections::HashSet<_> = b1.iter().copied().collect();
        let sub_edges: Vec<_> = g
            .edges()
            .iter()
            .filter(|(a, b)| set.contains(a) && set.contains(b))
            .copied()
            .collect();
        let relabel: std::collections::HashMap<_, _> =
            b1.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let sub = Graph::new(
            8,
            sub_edges.iter().map(|&(a, b)| (relabel[&a], relabel[&b])),
        )
        .unwrap();
        assert!(sub.is_connected());
        let single = connected_block(&g, 1, 7).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single, connected_block(&g, 1, 7).unwrap());
    }

    #[test]
    fn ring_block_is_inner_ring() {
        assert_eq!(ring_block(16, true), (0..8).collect::<Vec<_>>());
        assert_eq!(ring_block(16, false), (8..16).collect::<Vec<_>>());
    }

    #[test]
    fn family_produce() {
        assert!(GraphFamily::LadderEven.produce(12).unwrap().is_cubic());
        assert!(GraphFamily::LadderEven.produce(10).is_err());
        assert!(GraphFamily::LadderOdd.produce(10).unwrap().is_cubic());
        assert!(GraphFamily::LadderOdd.produce(12).is_err());
    }
}
