//! Canonical labeling by iterative color refinement seeded by degree, with
//! backtracking individualization on refinement ties. Produces a canonical
//! relabeling plus automorphism generators (collected from equal-string
//! leaves of the search tree, with orbit pruning at the root branch).

use super::Graph;

#[derive(Debug, Clone)]
pub(crate) struct Canon {
    /// perm[old] = new label in the canonical graph.
    pub perm: Vec<usize>,
    pub graph: Graph,
    /// Automorphism generators in old labels.
    pub generators: Vec<Vec<usize>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(k: usize) -> Self {
        UnionFind {
            parent: (0..k).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Equitable refinement: repeatedly re-rank vertices by
/// (color, sorted multiset of neighbor colors) until stable.
fn refine(adj: &[Vec<usize>], colors: &mut [usize]) {
    let k = colors.len();
    loop {
        let mut sigs: Vec<(usize, Vec<usize>, usize)> = (0..k)
            .map(|v| {
                let mut nb: Vec<usize> = adj[v].iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb, v)
            })
            .collect();
        sigs.sort();
        let mut new_colors = vec![0usize; k];
        let mut rank = 0usize;
        for i in 0..k {
            if i > 0 && (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                rank += 1;
            }
            new_colors[sigs[i].2] = rank;
        }
        let old_count = colors.iter().max().map_or(0, |m| m + 1);
        if rank + 1 == old_count {
            return;
        }
        colors.copy_from_slice(&new_colors);
    }
}

/// Packed upper-triangular adjacency bits under a labeling.
fn label_string(adj: &[Vec<usize>], perm: &[usize], k: usize) -> Vec<u64> {
    let bits = k * (k - 1) / 2;
    let mut s = vec![0u64; bits.div_ceil(64)];
    let mut pos = vec![0usize; k];
    for (old, &new) in perm.iter().enumerate() {
        pos[new] = old;
    }
    let mut idx = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            if adj[pos[i]].contains(&pos[j]) {
                s[idx / 64] |= 1u64 << (idx % 64);
            }
            idx += 1;
        }
    }
    s
}

struct CompSearch<'a> {
    adj: &'a [Vec<usize>],
    k: usize,
    best: Option<(Vec<u64>, Vec<usize>)>,
    gens: Vec<Vec<usize>>,
    orbit: UnionFind,
}

impl<'a> CompSearch<'a> {
    fn leaf(&mut self, colors: &[usize]) {
        let perm = colors.to_vec();
        let s = label_string(self.adj, &perm, self.k);
        match &self.best {
            None => self.best = Some((s, perm)),
            Some((bs, bp)) => {
                use std::cmp::Ordering::*;
                match s.cmp(bs) {
                    Greater => self.best = Some((s, perm)),
                    Equal => {
                        // tau = bp^-1 . perm is an automorphism
                        let mut inv = vec![0usize; self.k];
                        for (old, &new) in bp.iter().enumerate() {
                            inv[new] = old;
                        }
                        let tau: Vec<usize> = (0..self.k).map(|v| inv[perm[v]]).collect();
                        if tau.iter().enumerate().any(|(v, &t)| v != t) {
                            for v in 0..self.k {
                                self.orbit.union(v, tau[v]);
                            }
                            self.gens.push(tau);
                        }
                    }
                    Less => {}
                }
            }
        }
    }

    fn search(&mut self, mut colors: Vec<usize>, depth: usize) {
        refine(self.adj, &mut colors);
        let num_colors = colors.iter().max().map_or(0, |m| m + 1);
        if num_colors == self.k {
            self.leaf(&colors);
            return;
        }
        // first non-singleton cell
        let mut counts = vec![0usize; num_colors];
        for &c in colors.iter() {
            counts[c] += 1;
        }
        let cell_color = (0..num_colors).find(|&c| counts[c] > 1).unwrap();
        let cell: Vec<usize> = (0..self.k).filter(|&v| colors[v] == cell_color).collect();
        let mut processed: Vec<usize> = Vec::new();
        for v in cell {
            if depth == 0 {
                let rv = self.orbit.find(v);
                if processed.iter().any(|&p| self.orbit.find(p) == rv) {
                    continue;
                }
                processed.push(v);
            }
            let mut c2 = colors.clone();
            c2[v] = num_colors; // individualize with a fresh highest color
            self.search(c2, depth + 1);
        }
    }
}

/// Canonical labeling of a connected induced subgraph given by `verts`
/// (local labels follow `verts` order). Returns (string, local perm, local gens).
fn canon_component(
    g: &Graph,
    verts: &[usize],
) -> (Vec<u64>, Vec<usize>, Vec<Vec<usize>>) {
    let k = verts.len();
    let index: std::collections::HashMap<usize, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in g.edges() {
        if let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) {
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
    }
    if k == 1 {
        return (Vec::new(), vec![0], Vec::new());
    }
    let mut search = CompSearch {
        adj: &adj,
        k,
        best: None,
        gens: Vec::new(),
        orbit: UnionFind::new(k),
    };
    let colors = vec![0usize; k];
    search.search(colors, 0);
    let (s, perm) = search.best.unwrap();
    (s, perm, search.gens)
}

fn components(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub(crate) fn canonicalize(g: &Graph) -> Canon {
    let comps = components(g);
    struct CompCanon {
        verts: Vec<usize>,
        string: Vec<u64>,
        perm: Vec<usize>,
        gens: Vec<Vec<usize>>,
    }
    let mut cc: Vec<CompCanon> = comps
        .into_iter()
        .map(|verts| {
            let (string, perm, gens) = canon_component(g, &verts);
            CompCanon {
                verts,
                string,
                perm,
                gens,
            }
        })
        .collect();
    // larger components first, then by string; equal components adjacent
    cc.sort_by(|a, b| {
        b.verts
            .len()
            .cmp(&a.verts.len())
            .then_with(|| a.string.cmp(&b.string))
    });

    let n = g.n();
    let mut perm = vec![0usize; n];
    let mut offset = 0usize;
    for c in &cc {
        for (i, &v) in c.verts.iter().enumerate() {
            perm[v] = offset + c.perm[i];
        }
        offset += c.verts.len();
    }

    let mut generators: Vec<Vec<usize>> = Vec::new();
    for (ci, c) in cc.iter().enumerate() {
        for gen in &c.gens {
            let mut global: Vec<usize> = (0..n).collect();
            // local gen maps local->local; lift through verts
            for (i, &v) in c.verts.iter().enumerate() {
                global[v] = c.verts[gen[i]];
            }
            generators.push(global);
        }
        // adjacent identical components: swap generator
        if ci + 1 < cc.len()
            && cc[ci].verts.len() == cc[ci + 1].verts.len()
            && cc[ci].string == cc[ci + 1].string
        {
            let d = &cc[ci + 1];
            let k = c.verts.len();
            let mut inv_d = vec![0usize; k];
            for (i, &p) in d.perm.iter().enumerate() {
                inv_d[p] = i;
            }
            let mut inv_c = vec![0usize; k];
            for (i, &p) in c.perm.iter().enumerate() {
                inv_c[p] = i;
            }
            let mut global: Vec<usize> = (0..n).collect();
            for (i, &v) in c.verts.iter().enumerate() {
                global[v] = d.verts[inv_d[c.perm[i]]];
            }
            for (j, &w) in d.verts.iter().enumerate() {
                global[w] = c.verts[inv_c[d.perm[j]]];
            }
            generators.push(global);
        }
    }

    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let graph = Graph::new(n, edges).expect("relabeling preserves validity");
    Canon {
        perm,
        graph,
        generators,
    }
}

/// Canonical representative of the isomorphism class of `g`.
pub fn canonical_form(g: &Graph) -> Graph {
    canonicalize(g).graph
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.n() != b.n() || a.num_edges() != b.num_edges() {
        return false;
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    canonical_form(a) == canonical_form(b)
}

/// Vertex orbits under the discovered automorphism group: orbit[v] is the
/// smallest vertex in v's orbit.
pub fn automorphism_orbits(g: &Graph) -> Vec<usize> {
    let canon = canonicalize(g);
    let mut uf = UnionFind::new(g.n());
    for gen in &canon.generators {
        for (v, &t) in gen.iter().enumerate() {
            uf.union(v, t);
        }
    }
    (0..g.n()).map(|v| uf.find(v)).collect()
}

/// Orbits of unordered candidate pairs under the same group; used by the
/// enumeration to deduplicate augmentations.
pub(crate) fn pair_orbits(n: usize, generators: &[Vec<usize>], pairs: &[(usize, usize)]) -> Vec<usize> {
    let index: std::collections::HashMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut uf = UnionFind::new(pairs.len());
    for gen in generators {
        debug_assert_eq!(gen.len(), n);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            let (x, y) = (gen[a], gen[b]);
            let img = (x.min(y), x.max(y));
            if let Some(&j) = index.get(&img) {
                uf.union(i, j);
            }
        }
    }
    (0..pairs.len()).map(|i| uf.find(i)).collect()
}
