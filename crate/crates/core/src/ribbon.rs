//! Signed rotation systems (ribbon graphs) and their surface statistics.
//!
//! Half-edges are numbered so that edge `e` owns half-edges `2e` and `2e + 1`.
//! Each vertex lists its half-edges in counterclockwise order; an edge of
//! sign `-1` is a band with a half twist.

use thiserror::Error;

use crate::diagram::{Diagram, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonGraph {
    rotations: Vec<Vec<usize>>,
    signs: Vec<i8>,
}

/// Circle components of a pure diagram, split by bar parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CircleSummary {
    pub e: usize,
    pub o: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SurfaceStats {
    pub k: usize,
    pub n: usize,
    pub b: usize,
    pub t: u8,
}

impl SurfaceStats {
    /// Exponent of `z` in the monomial of this surface, `k - b + n`.
    pub fn z_exp(&self) -> i64 {
        self.k as i64 - self.b as i64 + self.n as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RibbonError {
    #[error("diagram still has classical crossing `{0}`")]
    NotPure(String),
    #[error("edge {0} does not exist")]
    UnknownEdge(usize),
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopEdge(usize),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("half-edge {0} is missing or listed more than once")]
    BadRotation(usize),
    #[error("sign {0} is not +1 or -1")]
    BadSign(i8),
}

struct UnionFind {
    parent: Vec<u32>,
    sets: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            sets: n,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        self.sets -= 1;
        true
    }
}

impl RibbonGraph {
    /// Builds a ribbon graph from vertex rotations and edge signs; every
    /// half-edge `0..2 * signs.len()` must appear in exactly one rotation.
    pub fn new(rotations: Vec<Vec<usize>>, signs: Vec<i8>) -> Result<Self, RibbonError> {
        if let Some(&s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(RibbonError::BadSign(s));
        }
        let mut seen = vec![false; 2 * signs.len()];
        for &h in rotations.iter().flatten() {
            match seen.get_mut(h) {
                Some(slot) if !*slot => *slot = true,
                _ => return Err(RibbonError::BadRotation(h)),
            }
        }
        if let Some(h) = seen.iter().position(|s| !s) {
            return Err(RibbonError::BadRotation(h));
        }
        Ok(RibbonGraph { rotations, signs })
    }

    pub fn num_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn num_edges(&self) -> usize {
        self.signs.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotations
    }

    pub fn sign(&self, e: usize) -> i8 {
        self.signs[e]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Vertex owning each half-edge.
    pub fn half_edge_vertices(&self) -> Vec<usize> {
        let mut owner = vec![0; 2 * self.signs.len()];
        for (v, rot) in self.rotations.iter().enumerate() {
            for &h in rot {
                owner[h] = v;
            }
        }
        owner
    }

    /// The two endpoint vertices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let owner = self.half_edge_vertices();
        (owner[2 * e], owner[2 * e + 1])
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    pub fn surface_stats(&self) -> SurfaceStats {
        self.stats_where(|_| true)
    }

    /// Statistics of the spanning subgraph on the edges with a set bit.
    pub fn stats_of_mask(&self, mask: u64) -> SurfaceStats {
        self.stats_where(|e| mask >> e & 1 == 1)
    }

    fn stats_where(&self, keep: impl Fn(usize) -> bool) -> SurfaceStats {
        let nv = self.rotations.len();
        let ne = self.signs.len();
        let mut owner = vec![usize::MAX; 2 * ne];
        // Boundary nodes are (half-edge, side) pairs, index 2h + side.
        let mut walk = UnionFind::new(4 * ne);
        let mut bare_vertices = 0;
        let mut kept_edges = 0;
        for (v, rot) in self.rotations.iter().enumerate() {
            let live: Vec<usize> = rot.iter().copied().filter(|&h| keep(h / 2)).collect();
            if live.is_empty() {
                bare_vertices += 1;
                continue;
            }
            for (i, &h) in live.iter().enumerate() {
                owner[h] = v;
                let next = live[(i + 1) % live.len()];
                walk.union((2 * h) as u32, (2 * next + 1) as u32);
            }
        }
        let mut comps = UnionFind::new(nv);
        let mut eps = vec![0i8; nv];
        let mut t = 0u8;
        for e in 0..ne {
            if !keep(e) {
                continue;
            }
            kept_edges += 1;
            let (h1, h2) = (2 * e, 2 * e + 1);
            if self.signs[e] > 0 {
                walk.union((2 * h1) as u32, (2 * h2 + 1) as u32);
                walk.union((2 * h1 + 1) as u32, (2 * h2) as u32);
            } else {
                walk.union((2 * h1) as u32, (2 * h2) as u32);
                walk.union((2 * h1 + 1) as u32, (2 * h2 + 1) as u32);
            }
            comps.union(owner[h1] as u32, owner[h2] as u32);
        }
        // Orientability: propagate vertex orientations along kept edges.
        if kept_edges > 0 {
            let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); nv];
            for e in (0..ne).filter(|&e| keep(e)) {
                let (u, v) = (owner[2 * e], owner[2 * e + 1]);
                adj[u].push((v, self.signs[e]));
                if u != v {
                    adj[v].push((u, self.signs[e]));
                }
            }
            let mut stack = Vec::new();
            'outer: for root in 0..nv {
                if eps[root] != 0 {
                    continue;
                }
                eps[root] = 1;
                stack.push(root);
                while let Some(u) = stack.pop() {
                    for &(v, s) in &adj[u] {
                        let want = eps[u] * s;
                        if eps[v] == 0 {
                            eps[v] = want;
                            stack.push(v);
                        } else if eps[v] != want {
                            t = 1;
                            break 'outer;
                        }
                    }
                }
            }
        }
        let used_nodes = 4 * kept_edges;
        let unused_nodes = 4 * ne - used_nodes;
        let b = walk.sets - unused_nodes + bare_vertices;
        let k = comps.sets;
        let n = kept_edges + k - nv;
        SurfaceStats { k, n, b, t }
    }

    /// The spanning subgraph on the chosen edges; edges are renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> RibbonGraph {
        let mut new_id = vec![usize::MAX; self.signs.len()];
        let mut signs = Vec::new();
        for (e, &s) in self.signs.iter().enumerate() {
            if keep[e] {
                new_id[e] = signs.len();
                signs.push(s);
            }
        }
        let rotations = self
            .rotations
            .iter()
            .map(|rot| {
                rot.iter()
                    .filter(|&&h| keep[h / 2])
                    .map(|&h| 2 * new_id[h / 2] + h % 2)
                    .collect()
            })
            .collect();
        RibbonGraph { rotations, signs }
    }

    /// All `2^E` spanning subgraphs, in order of the edge-subset bitmask.
    pub fn spanning_subgraphs(&self) -> impl Iterator<Item = RibbonGraph> + '_ {
        let ne = self.signs.len();
        assert!(ne < 64, "too many edges to enumerate subsets");
        (0..1u64 << ne).map(move |mask| {
            let keep: Vec<bool> = (0..ne).map(|e| mask >> e & 1 == 1).collect();
            self.restrict(&keep)
        })
    }

    pub fn delete(&self, e: usize) -> Result<RibbonGraph, RibbonError> {
        if e >= self.signs.len() {
            return Err(RibbonError::UnknownEdge(e));
        }
        let keep: Vec<bool> = (0..self.signs.len()).map(|i| i != e).collect();
        Ok(self.restrict(&keep))
    }

    /// Reverses the rotation at `v` and negates every non-loop edge at it.
    pub fn flip_vertex(&self, v: usize) -> Result<RibbonGraph, RibbonError> {
        if v >= self.rotations.len() {
            return Err(RibbonError::UnknownVertex(v));
        }
        let mut g = self.clone();
        g.rotations[v].reverse();
        let owner = self.half_edge_vertices();
        for e in 0..g.signs.len() {
            if (owner[2 * e] == v) != (owner[2 * e + 1] == v) {
                g.signs[e] = -g.signs[e];
            }
        }
        Ok(g)
    }

    /// Contracts a non-loop edge, untwisting it first by flipping its second
    /// endpoint when its sign is `-1`.
    pub fn contract(&self, e: usize) -> Result<RibbonGraph, RibbonError> {
        if e >= self.signs.len() {
            return Err(RibbonError::UnknownEdge(e));
        }
        let (u, v) = self.endpoints(e);
        if u == v {
            return Err(RibbonError::LoopEdge(e));
        }
        let g = if self.signs[e] < 0 {
            self.flip_vertex(v)?
        } else {
            self.clone()
        };
        let owner = g.half_edge_vertices();
        let (h1, h2) = if owner[2 * e] == u {
            (2 * e, 2 * e + 1)
        } else {
            (2 * e + 1, 2 * e)
        };
        let after = |rot: &[usize], h: usize| -> Vec<usize> {
            let i = rot.iter().position(|&x| x == h).unwrap();
            (1..rot.len()).map(|j| rot[(i + j) % rot.len()]).collect()
        };
        let mut merged = after(&g.rotations[u], h1);
        merged.extend(after(&g.rotations[v], h2));

        let renumber = |h: usize| {
            let edge = h / 2;
            let edge = if edge > e { edge - 1 } else { edge };
            2 * edge + h % 2
        };
        let mut rotations = Vec::with_capacity(g.rotations.len() - 1);
        for (w, rot) in g.rotations.iter().enumerate() {
            if w == v {
                continue;
            }
            let rot = if w == u { &merged } else { rot };
            rotations.push(rot.iter().map(|&h| renumber(h)).collect());
        }
        let mut signs = g.signs;
        signs.remove(e);
        Ok(RibbonGraph { rotations, signs })
    }
}

/// Erases virtual crossings and reads off the ribbon graph of a pure diagram.
pub fn to_ribbon(p: &Diagram) -> Result<(RibbonGraph, CircleSummary), RibbonError> {
    if let Some(n) = p.nodes().iter().find(|n| n.kind.is_crossing()) {
        return Err(RibbonError::NotPure(n.name.clone()));
    }
    let plan: Vec<Option<Vec<usize>>> = p
        .nodes()
        .iter()
        .map(|n| match n.kind {
            NodeKind::Virtual => Some(vec![2, 3, 0, 1]),
            _ => None,
        })
        .collect();
    let bare = if plan.iter().any(Option::is_some) {
        p.splice(&plan)
    } else {
        p.clone()
    };
    let mut rotations: Vec<Vec<usize>> = bare
        .nodes()
        .iter()
        .map(|n| vec![usize::MAX; n.kind.degree()])
        .collect();
    let mut signs = Vec::with_capacity(bare.arcs().len());
    for (e, arc) in bare.arcs().iter().enumerate() {
        for (side, end) in arc.ends.iter().enumerate() {
            rotations[end.node][end.slot] = 2 * e + side;
        }
        signs.push(if arc.bars % 2 == 0 { 1 } else { -1 });
    }
    let mut circles = CircleSummary::default();
    for c in bare.circles() {
        if c.bars % 2 == 0 {
            circles.e += 1;
        } else {
            circles.o += 1;
        }
    }
    Ok((RibbonGraph { rotations, signs }, circles))
}
