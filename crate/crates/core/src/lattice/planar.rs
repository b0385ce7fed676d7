//! Planarity testing via the left-right criterion, an independent
//! K3,3-subdivision oracle for cubic graphs, and a 3-connectivity check.

use super::Graph;
use crate::error::{Error, Result};
use std::collections::HashMap;

type DirEdge = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    low: Option<DirEdge>,
    high: Option<DirEdge>,
}

impl Interval {
    const EMPTY: Interval = Interval {
        low: None,
        high: None,
    };

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    const EMPTY: ConflictPair = ConflictPair {
        left: Interval::EMPTY,
        right: Interval::EMPTY,
    };

    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

/// State of the left-right test (Brandes' formulation): a DFS orientation
/// pass computing lowpoints and nesting order, then a testing pass that
/// maintains a stack of conflict pairs of back-edge intervals.
struct LrState {
    adj: Vec<Vec<usize>>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<DirEdge>>,
    oriented: std::collections::HashSet<DirEdge>,
    lowpt: HashMap<DirEdge, usize>,
    lowpt2: HashMap<DirEdge, usize>,
    nesting: HashMap<DirEdge, usize>,
    ordered_adj: Vec<Vec<usize>>,
    stack: Vec<ConflictPair>,
    /// Stack height when the edge started processing (identity marker).
    stack_bottom: HashMap<DirEdge, usize>,
    lowpt_edge: HashMap<DirEdge, DirEdge>,
    reference: HashMap<DirEdge, Option<DirEdge>>,
}

impl LrState {
    fn lowpt_opt(&self, e: Option<DirEdge>) -> usize {
        e.map(|e| self.lowpt[&e]).unwrap_or(usize::MAX)
    }

    fn dfs_orientation(&mut self, root: usize) {
        let mut frames = vec![(root, 0usize)];
        while let Some(&(v, i)) = frames.last() {
            if i >= self.adj[v].len() {
                frames.pop();
                if let Some(pe) = self.parent_edge[v] {
                    self.finish_edge(pe.0, pe);
                }
                continue;
            }
            frames.last_mut().unwrap().1 += 1;
            let w = self.adj[v][i];
            if self.oriented.contains(&(v, w)) || self.oriented.contains(&(w, v)) {
                continue;
            }
            let e = (v, w);
            self.oriented.insert(e);
            let hv = self.height[v].unwrap();
            self.lowpt.insert(e, hv);
            self.lowpt2.insert(e, hv);
            if self.height[w].is_none() {
                // tree edge; finished when w's frame pops
                self.parent_edge[w] = Some(e);
                self.height[w] = Some(hv + 1);
                frames.push((w, 0));
            } else {
                self.lowpt.insert(e, self.height[w].unwrap());
                self.finish_edge(v, e);
            }
        }
    }

    /// Nesting depth of `e = (v, _)` and lowpoint propagation into the
    /// parent edge of `v`. Runs once per edge, post-order.
    fn finish_edge(&mut self, v: usize, e: DirEdge) {
        let hv = self.height[v].unwrap();
        let mut nest = 2 * self.lowpt[&e];
        if self.lowpt2[&e] < hv {
            nest += 1; // chordal
        }
        self.nesting.insert(e, nest);
        if let Some(pe) = self.parent_edge[v] {
            let (le, l2e) = (self.lowpt[&e], self.lowpt2[&e]);
            let (lp, l2p) = (self.lowpt[&pe], self.lowpt2[&pe]);
            use std::cmp::Ordering::*;
            match le.cmp(&lp) {
                Less => {
                    self.lowpt2.insert(pe, lp.min(l2e));
                    self.lowpt.insert(pe, le);
                }
                Greater => {
                    self.lowpt2.insert(pe, l2p.min(le));
                }
                Equal => {
                    self.lowpt2.insert(pe, l2p.min(l2e));
                }
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: DirEdge) -> bool {
        !i.is_empty() && self.lowpt[&i.high.unwrap()] > self.lowpt[&b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        self.lowpt_opt(p.left.low).min(self.lowpt_opt(p.right.low))
    }

    fn add_constraints(&mut self, ei: DirEdge, e: DirEdge) -> bool {
        let bottom = self.stack_bottom[&ei];
        let mut p = ConflictPair::EMPTY;
        // merge return edges of ei into p.right
        loop {
            let mut q = match self.stack.pop() {
                Some(q) => q,
                None => return false,
            };
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[&q.right.low.unwrap()] > self.lowpt[&e] {
                if p.right.is_empty() {
                    p.right.high = q.right.high;
                } else {
                    self.reference.insert(p.right.low.unwrap(), q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                // align with the parent's lowpoint edge
                self.reference
                    .insert(q.right.low.unwrap(), Some(self.lowpt_edge[&e]));
            }
            if self.stack.len() == bottom {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        loop {
            let top = match self.stack.last() {
                Some(t) => *t,
                None => break,
            };
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            self.reference.insert(p.right.low.unwrap(), q.right.high);
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left.high = q.left.high;
            } else {
                self.reference.insert(p.left.low.unwrap(), q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    /// Drop back edges that return exactly to `u` once its subtree is done.
    fn trim_back_edges(&mut self, u: usize) {
        let hu = self.height[u].unwrap();
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            self.stack.pop();
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if h.1 == u {
                    p.left.high = self.reference.get(&h).copied().flatten();
                } else {
                    break;
                }
            }
            if p.left.high.is_none() && p.left.low.is_some() {
                self.reference.insert(p.left.low.unwrap(), p.right.low);
                p.left.low = None;
            }
            while let Some(h) = p.right.high {
                if h.1 == u {
                    p.right.high = self.reference.get(&h).copied().flatten();
                } else {
                    break;
                }
            }
            if p.right.high.is_none() && p.right.low.is_some() {
                self.reference.insert(p.right.low.unwrap(), p.left.low);
                p.right.low = None;
            }
            self.stack.push(p);
        }
    }

    /// After the `i`-th outgoing edge `ei` of `v` is fully processed, fold
    /// its constraints into the parent edge of `v`.
    fn integrate(&mut self, v: usize, i: usize, ei: DirEdge) -> bool {
        // lowpt >= 0 = height(root), so this never fires at a DFS root and
        // parent_edge[v] is present when it does.
        if self.lowpt[&ei] < self.height[v].unwrap() {
            let e = self.parent_edge[v].expect("non-root by lowpt bound");
            if i == 0 {
                let le = self.lowpt_edge[&ei];
                self.lowpt_edge.insert(e, le);
            } else if !self.add_constraints(ei, e) {
                return false;
            }
        }
        true
    }

    fn dfs_testing(&mut self, root: usize) -> bool {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, i)) = frames.last() {
            if i < self.ordered_adj[v].len() {
                frames.last_mut().unwrap().1 += 1;
                let w = self.ordered_adj[v][i];
                let ei = (v, w);
                self.stack_bottom.insert(ei, self.stack.len());
                if self.parent_edge[w] == Some(ei) {
                    frames.push((w, 0));
                    continue; // integrate when w pops
                }
                self.lowpt_edge.insert(ei, ei);
                self.stack.push(ConflictPair {
                    left: Interval::EMPTY,
                    right: Interval {
                        low: Some(ei),
                        high: Some(ei),
                    },
                });
                if !self.integrate(v, i, ei) {
                    return false;
                }
                continue;
            }
            frames.pop();
            if let Some(e) = self.parent_edge[v] {
                let u = e.0;
                self.trim_back_edges(u);
                if self.lowpt[&e] < self.height[u].unwrap() {
                    let top = self.stack.last().copied().unwrap_or(ConflictPair::EMPTY);
                    let (hl, hr) = (top.left.high, top.right.high);
                    let r = if hl.is_some()
                        && (hr.is_none() || self.lowpt[&hl.unwrap()] > self.lowpt[&hr.unwrap()])
                    {
                        hl
                    } else {
                        hr
                    };
                    self.reference.insert(e, r);
                }
                let &(pv, pidx) = frames.last().expect("parent frame present");
                if !self.integrate(pv, pidx - 1, e) {
                    return false;
                }
            }
        }
        true
    }
}

/// Left-right planarity test. Requires a simple connected graph.
pub fn is_planar(g: &Graph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::invalid(
            "is_planar requires a connected graph; test components separately",
        ));
    }
    let n = g.n();
    let m = g.num_edges();
    if n < 5 {
        return Ok(true);
    }
    if m > 3 * n - 6 {
        return Ok(false);
    }
    let mut st = LrState {
        adj: g.adjacency(),
        height: vec![None; n],
        parent_edge: vec![None; n],
        oriented: Default::default(),
        lowpt: HashMap::new(),
        lowpt2: HashMap::new(),
        nesting: HashMap::new(),
        ordered_adj: vec![Vec::new(); n],
        stack: Vec::new(),
        stack_bottom: HashMap::new(),
        lowpt_edge: HashMap::new(),
        reference: HashMap::new(),
    };
    st.height[0] = Some(0);
    st.dfs_orientation(0);
    for v in 0..n {
        let mut outs: Vec<usize> = st.adj[v]
            .iter()
            .copied()
            .filter(|&w| st.oriented.contains(&(v, w)))
            .collect();
        outs.sort_by_key(|&w| st.nesting[&(v, w)]);
        st.ordered_adj[v] = outs;
    }
    Ok(st.dfs_testing(0))
}

/// Exhaustive search for a K3,3 subdivision: 6 branch vertices plus 9
/// internally vertex-disjoint paths. Independent planarity oracle for cubic
/// graphs, where planarity is equivalent to having no K3,3 topological minor
/// (a K5 subdivision would need degree-4 branch vertices).
pub fn k33_minor_oracle(g: &Graph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::invalid("k33_minor_oracle requires a connected graph"));
    }
    if g.degrees().iter().any(|&d| d > 3) {
        return Err(Error::invalid("k33_minor_oracle requires max degree <= 3"));
    }
    if g.n() > 14 {
        return Err(Error::budget(format!(
            "k33_minor_oracle exhaustive search limited to n <= 14, got {}",
            g.n()
        )));
    }
    let n = g.n();
    if n < 6 {
        return Ok(false);
    }
    let adj = g.adjacency();
    let verts: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 3).collect();
    let k = verts.len();
    if k < 6 {
        return Ok(false);
    }
    for a in 0..k {
        for b in (a + 1)..k {
            for c in (b + 1)..k {
                let left = [verts[a], verts[b], verts[c]];
                let rest: Vec<usize> = verts
                    .iter()
                    .copied()
                    .filter(|v| !left.contains(v))
                    .collect();
                let r = rest.len();
                for x in 0..r {
                    for y in (x + 1)..r {
                        for z in (y + 1)..r {
                            let right = [rest[x], rest[y], rest[z]];
                            if connects_k33(&adj, n, &left, &right) {
                                return Ok(true);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

fn connects_k33(adj: &[Vec<usize>], n: usize, left: &[usize; 3], right: &[usize; 3]) -> bool {
    let mut branch = vec![false; n];
    for &v in left.iter().chain(right.iter()) {
        branch[v] = true;
    }
    let pairs: Vec<(usize, usize)> = left
        .iter()
        .flat_map(|&l| right.iter().map(move |&r| (l, r)))
        .collect();
    let mut used = vec![false; n];
    solve_paths(adj, &branch, &pairs, 0, &mut used)
}

fn solve_paths(
    adj: &[Vec<usize>],
    branch: &[bool],
    pairs: &[(usize, usize)],
    idx: usize,
    used: &mut [bool],
) -> bool {
    if idx == pairs.len() {
        return true;
    }
    let (s, t) = pairs[idx];
    extend_path(adj, branch, pairs, idx, used, s, t)
}

fn extend_path(
    adj: &[Vec<usize>],
    branch: &[bool],
    pairs: &[(usize, usize)],
    idx: usize,
    used: &mut [bool],
    cur: usize,
    t: usize,
) -> bool {
    for &w in &adj[cur] {
        if w == t {
            if solve_paths(adj, branch, pairs, idx + 1, used) {
                return true;
            }
            continue;
        }
        if branch[w] || used[w] {
            continue;
        }
        used[w] = true;
        let found = extend_path(adj, branch, pairs, idx, used, w, t);
        used[w] = false;
        if found {
            return true;
        }
    }
    false
}

/// Vertex 3-connectivity by exhaustive small-separator search; adequate for
/// the n <= 20 graphs studied here.
pub fn is_three_connected(g: &Graph) -> Result<bool> {
    if g.n() < 4 || !g.is_connected() {
        return Ok(false);
    }
    let n = g.n();
    let adj = g.adjacency();
    let connected_without = |skip: &[usize]| -> bool {
        let mut seen = vec![false; n];
        for &s in skip {
            seen[s] = true;
        }
        let start = (0..n).find(|v| !seen[*v]).unwrap();
        let mut stack = vec![start];
        seen[start] = true;
        let mut cnt = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    cnt += 1;
                    stack.push(w);
                }
            }
        }
        cnt == n - skip.len()
    };
    for v in 0..n {
        if !connected_without(&[v]) {
            return Ok(false);
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !connected_without(&[u, v]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
