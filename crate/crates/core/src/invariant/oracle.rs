//! Reference formulas that avoid the ribbon-graph machinery, for
//! cross-checking: the classical Yamada polynomial via the h-polynomial of
//! each state, and the Z_S state value of a bar-free pure diagram.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use thiserror::Error;

use crate::diagram::{Diagram, NodeKind};
use crate::poly::{Mono, Poly};
use crate::states::{enumerate_states, Spin};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("virtual crossing `{0}` present")]
    Virtual(String),
    #[error("classical crossing `{0}` present")]
    Classical(String),
    #[error("bars present")]
    Bars,
}

/// Abstract multigraph of a state: vertex count, edge list, closed strands.
struct StateGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    closed: usize,
}

/// Follows strands through virtual crossings and smoothed classical
/// crossings; `spins` gives the smoothing of each classical crossing.
fn trace(d: &Diagram, spins: &HashMap<usize, Spin>) -> StateGraph {
    let mut mate: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for a in d.arcs() {
        let (x, y) = (
            (a.ends[0].node, a.ends[0].slot),
            (a.ends[1].node, a.ends[1].slot),
        );
        mate.insert(x, y);
        mate.insert(y, x);
    }
    // Slot a strand leaves from after entering a pass-through node.
    let through = |node: usize, slot: usize| -> Option<usize> {
        match d.nodes()[node].kind {
            NodeKind::Virtual => Some((slot + 2) % 4),
            NodeKind::Crossing => match spins[&node] {
                Spin::Plus => Some(slot ^ 1),
                Spin::Minus => Some(3 - slot),
                Spin::Zero => None,
            },
            NodeKind::Vertex(_) => None,
        }
    };
    let mut vertex_id = HashMap::new();
    for (i, n) in d.nodes().iter().enumerate() {
        let is_vertex = match n.kind {
            NodeKind::Vertex(_) => true,
            NodeKind::Crossing => spins[&i] == Spin::Zero,
            NodeKind::Virtual => false,
        };
        if is_vertex {
            let id = vertex_id.len();
            vertex_id.insert(i, id);
        }
    }
    let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
    let mut edges = Vec::new();
    let mut ends: Vec<(usize, usize)> = mate.keys().copied().collect();
    ends.sort();
    for &start in &ends {
        if !vertex_id.contains_key(&start.0) || seen.contains_key(&start) {
            continue;
        }
        seen.insert(start, true);
        let mut cur = mate[&start];
        while let Some(out) = through(cur.0, cur.1) {
            seen.insert(cur, true);
            seen.insert((cur.0, out), true);
            cur = mate[&(cur.0, out)];
        }
        seen.insert(cur, true);
        edges.push((vertex_id[&start.0], vertex_id[&cur.0]));
    }
    let mut closed = d.circles().len();
    for &start in &ends {
        if seen.contains_key(&start) {
            continue;
        }
        closed += 1;
        let mut cur = start;
        loop {
            seen.insert(cur, true);
            let out = through(cur.0, cur.1).expect("closed strand avoids vertices");
            seen.insert((cur.0, out), true);
            cur = mate[&(cur.0, out)];
            if cur == start {
                break;
            }
        }
    }
    StateGraph {
        vertices: vertex_id.len(),
        edges,
        closed,
    }
}

fn components(vertices: usize, edges: &[(usize, usize)], mask: u64) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut count = vertices;
    for (i, &(u, v)) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            let (ru, rv) = (root(&mut parent, u), root(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                count -= 1;
            }
        }
    }
    count
}

/// `h(S)(-1, y) = Σ_F (-1)^k(F) y^n(F)`, closed strands counted as loops on
/// their own degree-2 vertices.
fn h_poly(g: &StateGraph) -> Poly {
    let mut edges = g.edges.clone();
    let mut vertices = g.vertices;
    for _ in 0..g.closed {
        edges.push((vertices, vertices));
        vertices += 1;
    }
    let mut coeffs: BTreeMap<u32, i64> = BTreeMap::new();
    for mask in 0..1u64 << edges.len() {
        let k = components(vertices, &edges, mask);
        let n = mask.count_ones() as usize + k - vertices;
        *coeffs.entry(n as u32).or_default() += if k.is_multiple_of(2) { 1 } else { -1 };
    }
    let mut p = Poly::zero();
    for (n, c) in coeffs {
        p.add_term(Mono::new(0, n, 0, 0), BigInt::from(c));
    }
    p
}

/// The Yamada polynomial of a classical diagram without bars, in `a`.
pub fn yamada_oracle(d: &Diagram) -> Result<Poly, OracleError> {
    if let Some(n) = d.nodes().iter().find(|n| n.kind.is_virtual()) {
        return Err(OracleError::Virtual(n.name.clone()));
    }
    if d.stats().total_bars > 0 {
        return Err(OracleError::Bars);
    }
    let mut total = Poly::zero();
    for state in enumerate_states(d) {
        let spins: HashMap<usize, Spin> = state
            .assignment
            .iter()
            .map(|(name, s)| (d.node_index(name).unwrap(), *s))
            .collect();
        total += h_poly(&trace(d, &spins)).shift_a(state.weight_exp());
    }
    Ok(total.subst_y())
}

/// `Z_S(-y) = (-1-y)^u y^(-V) Σ_F (-y)^k(F) y^|F|` for a pure diagram
/// without bars, returned as a polynomial in `y`.
pub fn zs_oracle(p: &Diagram) -> Result<Poly, OracleError> {
    if let Some(n) = p.nodes().iter().find(|n| n.kind.is_crossing()) {
        return Err(OracleError::Classical(n.name.clone()));
    }
    if p.stats().total_bars > 0 {
        return Err(OracleError::Bars);
    }
    let g = trace(p, &HashMap::new());
    let mut by_exp: BTreeMap<i64, i64> = BTreeMap::new();
    for mask in 0..1u64 << g.edges.len() {
        let k = components(g.vertices, &g.edges, mask) as i64;
        let exp = k + mask.count_ones() as i64 - g.vertices as i64;
        *by_exp.entry(exp).or_default() += if k % 2 == 0 { 1 } else { -1 };
    }
    let mut sum = Poly::zero();
    for (e, c) in by_exp {
        let e = u32::try_from(e).expect("y exponent is a Betti number");
        sum.add_term(Mono::new(0, e, 0, 0), BigInt::from(c));
    }
    Ok(&(Poly::constant(-1) - Poly::y()).pow(g.closed as u32) * &sum)
}
