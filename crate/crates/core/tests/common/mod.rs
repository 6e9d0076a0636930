#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use twisted_graph::{Arc, Circle, Diagram, End, Node, NodeKind, Poly, RibbonGraph};

pub const CORPUS: &[&str] = &[
    "dot",
    "circle",
    "circlebar",
    "loop",
    "loopbar",
    "doubleloop",
    "twoloop",
    "theta_klein",
    "theta_v",
    "trefoil",
    "hopf",
    "hc2",
    "hc4",
];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.tgd"))
}

pub fn corpus(name: &str) -> Diagram {
    let text = std::fs::read_to_string(corpus_path(name)).unwrap();
    Diagram::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn y() -> Poly {
    Poly::y()
}

pub fn c(n: i64) -> Poly {
    Poly::constant(n)
}

pub fn zw() -> Poly {
    Poly::z() * Poly::w()
}

pub fn a_poly(coeffs: &[(i32, i64)]) -> Poly {
    Poly::from_a_coeffs(coeffs)
}

/// Expected R of the order-two handcuff diagram.
pub fn hc2_expected() -> Poly {
    let r4 = a_poly(&[
        (9, 1),
        (8, 8),
        (7, 28),
        (6, 56),
        (5, 70),
        (4, 56),
        (3, 28),
        (2, 8),
        (1, 1),
    ]);
    let r2 = a_poly(&[
        (8, -15),
        (7, -43),
        (6, -70),
        (5, -81),
        (4, -70),
        (3, -37),
        (2, -6),
        (9, -2),
        (1, 3),
        (0, 1),
    ]);
    let r0 = a_poly(&[
        (8, 6),
        (7, 14),
        (6, 13),
        (5, 11),
        (4, 14),
        (3, 10),
        (2, -1),
        (1, -3),
    ]);
    let inner = r4 * Poly::z().pow(4) + r2 * Poly::z().pow(2) + r0;
    -(Poly::a_pow(-5) * inner)
}

/// Genus of the rotation system read off the diagram with every node,
/// crossings included, treated as a vertex. Zero for a planar drawing.
pub fn drawing_genus(d: &Diagram) -> i64 {
    let n = d.nodes().len();
    let mut mate = std::collections::HashMap::new();
    for a in d.arcs() {
        mate.insert(
            (a.ends[0].node, a.ends[0].slot),
            (a.ends[1].node, a.ends[1].slot),
        );
        mate.insert(
            (a.ends[1].node, a.ends[1].slot),
            (a.ends[0].node, a.ends[0].slot),
        );
    }
    let mut seen = std::collections::HashSet::new();
    let mut faces = 0i64;
    for start in mate.keys().copied().collect::<Vec<_>>() {
        if seen.contains(&start) {
            continue;
        }
        faces += 1;
        let mut cur = start;
        loop {
            seen.insert(cur);
            let (node, slot) = mate[&cur];
            let deg = d.nodes()[node].kind.degree();
            cur = (node, (slot + deg - 1) % deg);
            if cur == start {
                break;
            }
        }
    }
    let mut comps = n as i64;
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for a in d.arcs() {
        let (u, v) = (
            root(&mut parent, a.ends[0].node),
            root(&mut parent, a.ends[1].node),
        );
        if u != v {
            parent[u] = v;
            comps -= 1;
        }
    }
    // Isolated degree-0 vertices bound one face each.
    faces += d
        .nodes()
        .iter()
        .filter(|x| x.kind == NodeKind::Vertex(0))
        .count() as i64;
    let (v, e) = (n as i64, d.arcs().len() as i64);
    (2 * comps - v + e - faces) / 2
}

/// Bounds for random diagrams.
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_classical: usize,
    pub max_virtual: usize,
    pub max_vertices: usize,
    /// Upper bound on half the total vertex degree.
    pub max_edges: usize,
    pub max_bars: u32,
}

pub const SMALL: Shape = Shape {
    max_classical: 3,
    max_virtual: 3,
    max_vertices: 3,
    max_edges: 6,
    max_bars: 2,
};

/// A uniformly wired diagram: random node counts and degrees, a random
/// perfect matching of all slots, random bars and possibly a circle.
pub fn random_diagram(rng: &mut impl Rng, shape: Shape) -> Diagram {
    let nc = rng.gen_range(0..=shape.max_classical);
    let nx = rng.gen_range(0..=shape.max_virtual);
    let nv = rng.gen_range(1..=shape.max_vertices.max(1));
    let mut degrees: Vec<usize> = Vec::new();
    let mut budget = 2 * shape.max_edges;
    for _ in 0..nv {
        let d = rng.gen_range(0..=budget.min(4));
        budget -= d;
        degrees.push(d);
    }
    if degrees.iter().sum::<usize>() % 2 == 1 {
        *degrees.iter_mut().find(|d| **d > 0).unwrap() -= 1;
    }
    let mut nodes = Vec::new();
    for (i, &d) in degrees.iter().enumerate() {
        nodes.push(Node::new(format!("v{i}"), NodeKind::Vertex(d)));
    }
    for i in 0..nc {
        nodes.push(Node::new(format!("c{i}"), NodeKind::Crossing));
    }
    for i in 0..nx {
        nodes.push(Node::new(format!("x{i}"), NodeKind::Virtual));
    }
    let mut slots: Vec<End> = nodes
        .iter()
        .enumerate()
        .flat_map(|(n, node)| (0..node.kind.degree()).map(move |s| End::new(n, s)))
        .collect();
    slots.shuffle(rng);
    let arcs = slots
        .chunks(2)
        .map(|p| Arc::new(p[0], p[1], rng.gen_range(0..=shape.max_bars)))
        .collect();
    let circles = if rng.gen_bool(0.2) {
        vec![Circle::new("k", rng.gen_range(0..=shape.max_bars))]
    } else {
        vec![]
    };
    let d = Diagram::from_parts(nodes, arcs, circles);
    assert!(d.is_valid(), "{:?}", d.validate());
    d
}

/// A random diagram whose drawing is planar, so its virtual crossings are
/// the only ones it needs. Found by rejection.
pub fn random_planar_diagram(rng: &mut impl Rng, shape: Shape) -> Diagram {
    loop {
        let d = random_diagram(rng, shape);
        if drawing_genus(&d) == 0 {
            return d;
        }
    }
}

pub fn without_bars(d: &Diagram) -> Diagram {
    let arcs = d
        .arcs()
        .iter()
        .map(|a| Arc::new(a.ends[0], a.ends[1], 0))
        .collect();
    let circles = d
        .circles()
        .iter()
        .map(|c| Circle::new(c.name.clone(), 0))
        .collect();
    Diagram::from_parts(d.nodes().to_vec(), arcs, circles)
}

/// A rotation system on `nv` vertices and `ne` edges with random signs.
pub fn random_ribbon(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> RibbonGraph {
    let nv = rng.gen_range(1..=max_vertices);
    let ne = rng.gen_range(0..=max_edges);
    let mut rotations = vec![Vec::new(); nv];
    for h in 0..2 * ne {
        rotations[rng.gen_range(0..nv)].push(h);
    }
    for r in &mut rotations {
        r.shuffle(rng);
    }
    let signs = (0..ne)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    RibbonGraph::new(rotations, signs).unwrap()
}

fn renamed(d: &Diagram, prefix: &str) -> (Vec<Node>, Vec<Circle>) {
    let nodes = d
        .nodes()
        .iter()
        .map(|n| Node::new(format!("{prefix}{}", n.name), n.kind))
        .collect();
    let circles = d
        .circles()
        .iter()
        .map(|c| Circle::new(format!("{prefix}{}", c.name), c.bars))
        .collect();
    (nodes, circles)
}

fn shifted(a: &Arc, by: usize) -> Arc {
    Arc::new(
        End::new(a.ends[0].node + by, a.ends[0].slot),
        End::new(a.ends[1].node + by, a.ends[1].slot),
        a.bars,
    )
}

pub fn disjoint_union(d1: &Diagram, d2: &Diagram) -> Diagram {
    let (mut nodes, mut circles) = renamed(d1, "l");
    let (n2, c2) = renamed(d2, "r");
    let off = nodes.len();
    nodes.extend(n2);
    circles.extend(c2);
    let mut arcs = d1.arcs().to_vec();
    arcs.extend(d2.arcs().iter().map(|a| shifted(a, off)));
    Diagram::from_parts(nodes, arcs, circles)
}

/// Identifies vertex `u` of `d1` with vertex `v` of `d2`: the merged
/// rotation lists the half-edges of `u` and then those of `v`.
pub fn vertex_sum(d1: &Diagram, u: usize, d2: &Diagram, v: usize) -> Diagram {
    let du = d1.degree(u);
    let dv = d2.degree(v);
    let joined = disjoint_union(d1, d2);
    let off = d1.nodes().len();
    let mut nodes = joined.nodes().to_vec();
    nodes[u].kind = NodeKind::Vertex(du + dv);
    let mut arcs: Vec<Arc> = joined.arcs().to_vec();
    for a in &mut arcs {
        for e in &mut a.ends {
            if e.node == off + v {
                *e = End::new(u, du + e.slot);
            }
        }
    }
    nodes.remove(off + v);
    for a in &mut arcs {
        for e in &mut a.ends {
            if e.node > off + v {
                e.node -= 1;
            }
        }
    }
    Diagram::from_parts(nodes, arcs, joined.circles().to_vec())
}

/// Joins vertex `u` of `d1` to vertex `v` of `d2` by a new edge, which is
/// then a cut edge.
pub fn bridge(d1: &Diagram, u: usize, d2: &Diagram, v: usize, bars: u32) -> Diagram {
    let joined = disjoint_union(d1, d2);
    let off = d1.nodes().len();
    let mut nodes = joined.nodes().to_vec();
    let (du, dv) = (d1.degree(u), d2.degree(v));
    nodes[u].kind = NodeKind::Vertex(du + 1);
    nodes[off + v].kind = NodeKind::Vertex(dv + 1);
    let mut arcs = joined.arcs().to_vec();
    arcs.push(Arc::new(End::new(u, du), End::new(off + v, dv), bars));
    Diagram::from_parts(nodes, arcs, joined.circles().to_vec())
}

/// Inserts a degree-2 vertex into arc `i`, or into the first circle when
/// `i` is out of range.
pub fn subdivide(d: &Diagram, i: usize) -> Diagram {
    let mut nodes = d.nodes().to_vec();
    let mut arcs = d.arcs().to_vec();
    let mut circles = d.circles().to_vec();
    let w = nodes.len();
    nodes.push(Node::new("sub", NodeKind::Vertex(2)));
    if i < arcs.len() {
        let a = arcs.remove(i);
        arcs.push(Arc::new(a.ends[0], End::new(w, 0), a.bars));
        arcs.push(Arc::new(End::new(w, 1), a.ends[1], 0));
    } else {
        let c = circles.remove(0);
        arcs.push(Arc::new(End::new(w, 0), End::new(w, 1), c.bars));
    }
    Diagram::from_parts(nodes, arcs, circles)
}

/// Arcs joining two distinct vertices directly.
pub fn vertex_edges(d: &Diagram) -> Vec<usize> {
    (0..d.arcs().len())
        .filter(|&i| {
            let a = &d.arcs()[i];
            let (u, v) = (a.ends[0].node, a.ends[1].node);
            u != v && d.nodes()[u].kind.is_vertex() && d.nodes()[v].kind.is_vertex()
        })
        .collect()
}

/// Removes arc `i` between two vertices, closing up their slot numbering.
pub fn delete_arc(d: &Diagram, i: usize) -> Diagram {
    let mut nodes = d.nodes().to_vec();
    let mut arcs = d.arcs().to_vec();
    let a = arcs.remove(i);
    for e in a.ends {
        let deg = nodes[e.node].kind.degree();
        nodes[e.node].kind = NodeKind::Vertex(deg - 1);
    }
    // Remove the higher slot first when both ends sit on one node.
    let mut gone = a.ends.to_vec();
    gone.sort_by_key(|e| std::cmp::Reverse(e.slot));
    for g in gone {
        for b in &mut arcs {
            for e in &mut b.ends {
                if e.node == g.node && e.slot > g.slot {
                    e.slot -= 1;
                }
            }
        }
    }
    Diagram::from_parts(nodes, arcs, d.circles().to_vec())
}

/// Contracts arc `i` between vertices `u` and `v`. An odd number of bars
/// is first removed by turning `v` over: its rotation is reversed and each
/// arc end at `v` gains a bar.
pub fn contract_arc(d: &Diagram, i: usize) -> Diagram {
    let mut arcs = d.arcs().to_vec();
    let a = arcs[i].clone();
    let (u, v) = (a.ends[0].node, a.ends[1].node);
    let (du, dv) = (d.degree(u), d.degree(v));
    if a.bars % 2 == 1 {
        for b in &mut arcs {
            for k in 0..2 {
                if b.ends[k].node == v {
                    b.ends[k].slot = (dv - b.ends[k].slot) % dv;
                    b.bars += 1;
                }
            }
        }
    }
    let a = arcs.remove(i);
    let (i_u, i_v) = (a.ends[0].slot, a.ends[1].slot);
    let mut nodes = d.nodes().to_vec();
    nodes[u].kind = NodeKind::Vertex(du + dv - 2);
    for b in &mut arcs {
        for e in &mut b.ends {
            if e.node == u {
                *e = End::new(u, (e.slot + du - i_u - 1) % du);
            } else if e.node == v {
                *e = End::new(u, du - 1 + (e.slot + dv - i_v - 1) % dv);
            }
        }
    }
    nodes.remove(v);
    for b in &mut arcs {
        for e in &mut b.ends {
            if e.node > v {
                e.node -= 1;
            }
        }
    }
    Diagram::from_parts(nodes, arcs, d.circles().to_vec())
}

pub mod checks {
    use super::*;
    use twisted_graph::invariant::oracle::{yamada_oracle, zs_oracle};
    use twisted_graph::states::resolve_crossing;
    use twisted_graph::{q_poly, r_poly, yamada_specialization, EvalOptions, Spin, Strategy};

    pub type Check = Result<(), String>;

    pub fn r(d: &Diagram) -> Poly {
        r_poly(d, &EvalOptions::default()).unwrap()
    }

    pub fn q(d: &Diagram) -> Poly {
        q_poly(d, &EvalOptions::default()).unwrap()
    }

    fn expect(ok: bool, what: &str, d: &Diagram) -> Check {
        if ok {
            Ok(())
        } else {
            Err(format!("{what} fails on\n{}", d.serialize()))
        }
    }

    fn first_vertex(d: &Diagram) -> Option<usize> {
        d.nodes().iter().position(|n| n.kind.is_vertex())
    }

    pub fn skein(d: &Diagram) -> Check {
        let Some(&c) = d.classical_crossings().first() else {
            return Ok(());
        };
        let rhs = Poly::a() * r(&resolve_crossing(d, c, Spin::Plus))
            + Poly::a_pow(-1) * r(&resolve_crossing(d, c, Spin::Minus))
            + r(&resolve_crossing(d, c, Spin::Zero));
        expect(r(d) == rhs, "skein", d)
    }

    /// R and, on pure diagrams, Q split over every edge between two vertices.
    pub fn contraction_deletion(d: &Diagram) -> Check {
        for e in vertex_edges(d) {
            let (c, del) = (contract_arc(d, e), delete_arc(d, e));
            expect(r(d) == r(&c) + r(&del), "R contraction/deletion", d)?;
            if d.is_pure() {
                expect(q(d) == q(&c) + q(&del), "Q contraction/deletion", d)?;
            }
        }
        Ok(())
    }

    pub fn disjoint_union_multiplies(d1: &Diagram, d2: &Diagram) -> Check {
        expect(
            r(&disjoint_union(d1, d2)) == r(d1) * r(d2),
            "disjoint union",
            d1,
        )
    }

    pub fn vertex_sum_negates_product(d1: &Diagram, d2: &Diagram) -> Check {
        let (Some(u), Some(v)) = (first_vertex(d1), first_vertex(d2)) else {
            return Ok(());
        };
        let s = vertex_sum(d1, u, d2, v);
        expect(r(&s) == -(r(d1) * r(d2)), "vertex sum", &s)
    }

    pub fn cut_edge_vanishes(d1: &Diagram, d2: &Diagram, bars: u32) -> Check {
        let (Some(u), Some(v)) = (first_vertex(d1), first_vertex(d2)) else {
            return Ok(());
        };
        let b = bridge(d1, u, d2, v, bars);
        expect(r(&b).is_zero(), "cut edge", &b)
    }

    pub fn degree_two_neutral(d: &Diagram, pick: usize) -> Check {
        let slots = d.arcs().len() + usize::from(!d.circles().is_empty());
        if slots == 0 {
            return Ok(());
        }
        let s = subdivide(d, pick % slots);
        expect(r(&s) == r(d), "degree-2 vertex (R)", d)?;
        if d.is_pure() {
            expect(q(&s) == q(d), "degree-2 vertex (Q)", d)?;
        }
        Ok(())
    }

    pub fn strategies_agree(d: &Diagram) -> Check {
        let cd = r_poly(
            d,
            &EvalOptions {
                strategy: Strategy::ContractDelete,
                parallel: false,
            },
        )
        .unwrap();
        let par = r_poly(
            d,
            &EvalOptions {
                strategy: Strategy::Brute,
                parallel: true,
            },
        )
        .unwrap();
        let brute = r(d);
        expect(brute == cd && brute == par, "strategy agreement", d)
    }

    pub fn yamada_matches(d: &Diagram) -> Check {
        let got = yamada_specialization(d, &EvalOptions::default()).unwrap();
        expect(got == yamada_oracle(d).unwrap(), "Yamada oracle", d)
    }

    pub fn zs_matches(d: &Diagram) -> Check {
        expect(q(d).at_z1_w1() == zs_oracle(d).unwrap(), "Z_S oracle", d)
    }

    pub fn z_degree_bound(d: &Diagram) -> Check {
        let bound = 2 * d.stats().num_virtual as u32;
        expect(
            r(d).z_degree().is_none_or(|z| z <= bound),
            "z-degree bound",
            d,
        )
    }

    pub fn ribbon_laws(g: &RibbonGraph) -> Check {
        let fail = |what: &str| Err(format!("{what} fails on {g:?}"));
        let s = g.surface_stats();
        if g.num_vertices() as i64 - g.num_edges() as i64 != s.k as i64 - s.n as i64 {
            return fail("Euler identity");
        }
        for v in 0..g.num_vertices() {
            if g.flip_vertex(v).unwrap().surface_stats() != s {
                return fail("vertex flip");
            }
        }
        let ne = g.num_edges();
        for e in (0..ne).filter(|&e| !g.is_loop(e)) {
            let c = g.contract(e).unwrap();
            for mask in (0..1u64 << ne).filter(|m| m & (1 << e) != 0) {
                let low = mask & ((1 << e) - 1);
                let high = (mask >> (e + 1)) << e;
                if g.stats_of_mask(mask) != c.stats_of_mask(low | high) {
                    return fail("contraction");
                }
            }
        }
        Ok(())
    }
}
