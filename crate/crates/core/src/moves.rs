//! Local moves on diagrams and a seeded random-move fuzzer.
//!
//! Moves are matched on the combinatorial encoding alone: node kinds, slot
//! adjacency and bar counts. Every site is described by a list of anchors
//! (node names, arc endpoints, slots and a variant number) that is enough to
//! replay the move on the same diagram.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{fresh_name, Arc, Diagram, End, Node, NodeKind};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    R1Plus,
    R1Minus,
    R2Plus,
    R2Minus,
    R3,
    R4,
    R5,
    V1Plus,
    V1Minus,
    V2Plus,
    V2Minus,
    V3,
    V4,
    V5,
    T1,
    T2Plus,
    T2Minus,
    T3,
    T4,
    /// Twisting two adjacent edges at a vertex through a virtual crossing.
    /// Not an equivalence of twisted graphs; only reachable when unsafe
    /// kinds are explicitly allowed.
    VirtualTwist,
}

use MoveKind::*;

impl MoveKind {
    pub const SAFE: [MoveKind; 19] = [
        R1Plus, R1Minus, R2Plus, R2Minus, R3, R4, R5, V1Plus, V1Minus, V2Plus, V2Minus, V3, V4, V5,
        T1, T2Plus, T2Minus, T3, T4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            R1Plus => "R1+",
            R1Minus => "R1-",
            R2Plus => "R2+",
            R2Minus => "R2-",
            R3 => "R3",
            R4 => "R4",
            R5 => "R5",
            V1Plus => "V1+",
            V1Minus => "V1-",
            V2Plus => "V2+",
            V2Minus => "V2-",
            V3 => "V3",
            V4 => "V4",
            V5 => "V5",
            T1 => "T1",
            T2Plus => "T2+",
            T2Minus => "T2-",
            T3 => "T3",
            T4 => "T4",
            VirtualTwist => "VI*",
        }
    }

    pub fn is_unsafe(self) -> bool {
        self == VirtualTwist
    }

    /// Kinds that change R by a unit `(-a)^n` rather than leaving it fixed.
    pub fn changes_r_by_unit(self) -> bool {
        matches!(self, R1Plus | R1Minus | R5)
    }

    pub fn inverse(self) -> MoveKind {
        match self {
            R1Plus => R1Minus,
            R1Minus => R1Plus,
            R2Plus => R2Minus,
            R2Minus => R2Plus,
            V1Plus => V1Minus,
            V1Minus => V1Plus,
            V2Plus => V2Minus,
            V2Minus => V2Plus,
            T2Plus => T2Minus,
            T2Minus => T2Plus,
            k => k,
        }
    }

    /// Parses a comma-separated list of kinds and groups. Groups: `safe`
    /// (the whole catalog of equivalence moves), `all` (the same, plus
    /// unsafe kinds when allowed), `exact` (kinds that fix R exactly),
    /// `classical`, `virtual`, `twisted`, and `R1`, `R2`, `V1`, `V2`, `T2`
    /// for both directions of a move.
    pub fn parse_set(list: &str, allow_unsafe: bool) -> Result<Vec<MoveKind>, MoveError> {
        let mut out = BTreeSet::new();
        for word in list.split(',').map(str::trim).filter(|w| !w.is_empty()) {
            let group: Vec<MoveKind> = match word.to_ascii_lowercase().as_str() {
                "safe" => MoveKind::SAFE.to_vec(),
                "all" => {
                    let mut v = MoveKind::SAFE.to_vec();
                    if allow_unsafe {
                        v.push(VirtualTwist);
                    }
                    v
                }
                "exact" => MoveKind::SAFE
                    .into_iter()
                    .filter(|k| !k.changes_r_by_unit())
                    .collect(),
                "classical" => vec![R1Plus, R1Minus, R2Plus, R2Minus, R3, R4, R5],
                "virtual" => vec![V1Plus, V1Minus, V2Plus, V2Minus, V3, V4, V5],
                "twisted" => vec![T1, T2Plus, T2Minus, T3, T4],
                "r1" => vec![R1Plus, R1Minus],
                "r2" => vec![R2Plus, R2Minus],
                "v1" => vec![V1Plus, V1Minus],
                "v2" => vec![V2Plus, V2Minus],
                "t2" => vec![T2Plus, T2Minus],
                _ => {
                    let k: MoveKind = word.parse()?;
                    if k.is_unsafe() && !allow_unsafe {
                        return Err(MoveError::UnsafeKind(word.to_string()));
                    }
                    vec![k]
                }
            };
            out.extend(group);
        }
        Ok(out.into_iter().collect())
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('−', "-").to_ascii_uppercase();
        MoveKind::SAFE
            .into_iter()
            .chain([VirtualTwist])
            .find(|k| k.name() == norm)
            .ok_or_else(|| MoveError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Node(String),
    /// A slot of a node, as a position rather than an arc.
    Slot(String, usize),
    /// The arc attached at this endpoint.
    Arc(String, usize),
    Circle(String),
    Variant(usize),
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Node(n) => write!(f, "node:{n}"),
            Anchor::Slot(n, s) => write!(f, "slot:{n}.{s}"),
            Anchor::Arc(n, s) => write!(f, "arc:{n}.{s}"),
            Anchor::Circle(n) => write!(f, "circle:{n}"),
            Anchor::Variant(v) => write!(f, "variant:{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub anchors: Vec<Anchor>,
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for a in &self.anchors {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("site `{0}` does not match the diagram")]
    StaleSite(String),
    #[error("unknown move kind `{0}`")]
    UnknownKind(String),
    #[error("move kind `{0}` is unsafe and must be enabled explicitly")]
    UnsafeKind(String),
}

fn node_name(d: &Diagram, i: usize) -> String {
    d.nodes[i].name.clone()
}

fn lookup(d: &Diagram, name: &str) -> usize {
    d.node_index(name).expect("anchor names an existing node")
}

fn end_of(d: &Diagram, name: &str, slot: usize) -> End {
    End::new(lookup(d, name), slot)
}

/// The canonical endpoint of an arc: the smaller (name, slot) of its ends.
fn canonical_end(d: &Diagram, a: &Arc) -> End {
    let key = |e: End| (d.nodes[e.node].name.as_str(), e.slot);
    if key(a.ends[0]) <= key(a.ends[1]) {
        a.ends[0]
    } else {
        a.ends[1]
    }
}

fn arc_anchor(d: &Diagram, e: End) -> Anchor {
    Anchor::Arc(node_name(d, e.node), e.slot)
}

fn slot_anchor(d: &Diagram, e: End) -> Anchor {
    Anchor::Slot(node_name(d, e.node), e.slot)
}

fn add4(s: usize, k: usize) -> usize {
    (s + k) % 4
}

/// Read-only view with slot incidence precomputed.
struct View<'a> {
    d: &'a Diagram,
    inc: Vec<Vec<(usize, usize)>>,
}

impl<'a> View<'a> {
    fn new(d: &'a Diagram) -> Self {
        View {
            d,
            inc: d.incidence(),
        }
    }

    fn arc(&self, e: End) -> usize {
        self.inc[e.node][e.slot].0
    }

    fn far(&self, e: End) -> End {
        let (a, side) = self.inc[e.node][e.slot];
        self.d.arcs[a].ends[1 - side]
    }

    fn bars(&self, e: End) -> u32 {
        self.d.arcs[self.arc(e)].bars
    }

    fn kind(&self, n: usize) -> NodeKind {
        self.d.nodes[n].kind
    }
}

fn add_node(d: &mut Diagram, kind: NodeKind) -> usize {
    let prefix = if kind.is_virtual() { "x" } else { "c" };
    let name = fresh_name(prefix, &d.names_in_use());
    d.nodes.push(Node::new(name, kind));
    d.nodes.len() - 1
}

/// Removes the arc attached at `e` and returns its far end and bar count.
fn take_arc(d: &mut Diagram, e: End) -> (End, u32) {
    let i = d
        .arcs
        .iter()
        .position(|a| a.ends.contains(&e))
        .expect("slot is attached");
    let a = d.arcs.swap_remove(i);
    let far = if a.ends[0] == e { a.ends[1] } else { a.ends[0] };
    (far, a.bars)
}

fn push_arc(d: &mut Diagram, a: End, b: End, bars: u32) {
    d.arcs.push(Arc::new(a, b, bars));
}

fn splice_nodes(d: &Diagram, removed: &[usize]) -> Diagram {
    let mut plan = vec![None; d.nodes.len()];
    for &n in removed {
        plan[n] = Some(vec![2, 3, 0, 1]);
    }
    d.splice(&plan)
}

fn is_four_valent(kind: NodeKind, classical: bool) -> bool {
    if classical {
        kind.is_crossing()
    } else {
        kind.is_virtual()
    }
}

pub fn find_sites(d: &Diagram, kind: MoveKind) -> Vec<MoveSite> {
    let v = View::new(d);
    let anchors: Vec<Vec<Anchor>> = match kind {
        R1Plus => kink_add_sites(&v, 4),
        V1Plus => kink_add_sites(&v, 2),
        R1Minus => kink_remove_sites(&v, true),
        V1Minus => kink_remove_sites(&v, false),
        R2Plus | V2Plus => bigon_add_sites(&v),
        R2Minus => bigon_remove_sites(&v, true),
        V2Minus => bigon_remove_sites(&v, false),
        R3 | V3 | V5 => triangle_sites(&v, kind)
            .into_iter()
            .map(|t| t.anchors(d))
            .collect(),
        R4 => vertex_pass_sites(&v, true)
            .into_iter()
            .map(|p| p.anchors(d))
            .collect(),
        V4 => vertex_pass_sites(&v, false)
            .into_iter()
            .map(|p| p.anchors(d))
            .collect(),
        R5 => twist_sites(&v, true),
        VirtualTwist => twist_sites(&v, false),
        T1 => bar_slide_sites(&v),
        T2Plus => bar_pair_sites(&v, 0),
        T2Minus => bar_pair_sites(&v, 2),
        T3 => flip_sites(&v, true),
        T4 => flip_sites(&v, false),
    };
    anchors
        .into_iter()
        .map(|anchors| MoveSite { kind, anchors })
        .collect()
}

pub fn apply_move(d: &Diagram, site: &MoveSite) -> Result<Diagram, MoveError> {
    if !find_sites(d, site.kind).contains(site) {
        return Err(MoveError::StaleSite(site.to_string()));
    }
    Ok(rewrite(d, site))
}

fn variant(site: &MoveSite) -> usize {
    site.anchors
        .iter()
        .find_map(|a| match a {
            Anchor::Variant(v) => Some(*v),
            _ => None,
        })
        .unwrap_or(0)
}

fn rewrite(d: &Diagram, site: &MoveSite) -> Diagram {
    let mut out = d.clone();
    let a = &site.anchors;
    match site.kind {
        R1Plus | V1Plus => {
            let kind = if site.kind == R1Plus {
                NodeKind::Crossing
            } else {
                NodeKind::Virtual
            };
            let (s, l0, l1, qs) =
                [(0, 2, 3, 1), (0, 2, 1, 3), (1, 3, 0, 2), (1, 3, 2, 0)][variant(site)];
            match &a[0] {
                Anchor::Arc(n, slot) => {
                    let p = end_of(&out, n, *slot);
                    let (q, bars) = take_arc(&mut out, p);
                    let c = add_node(&mut out, kind);
                    push_arc(&mut out, p, End::new(c, s), bars);
                    push_arc(&mut out, End::new(c, l0), End::new(c, l1), 0);
                    push_arc(&mut out, End::new(c, qs), q, 0);
                }
                Anchor::Circle(n) => {
                    let i = out.circles.iter().position(|c| &c.name == n).unwrap();
                    let circle = out.circles.remove(i);
                    let c = add_node(&mut out, kind);
                    push_arc(&mut out, End::new(c, s), End::new(c, qs), circle.bars);
                    push_arc(&mut out, End::new(c, l0), End::new(c, l1), 0);
                }
                _ => unreachable!(),
            }
            out
        }
        R1Minus | V1Minus | R2Minus | V2Minus => {
            let removed: Vec<usize> = a
                .iter()
                .filter_map(|x| match x {
                    Anchor::Node(n) => Some(lookup(&out, n)),
                    _ => None,
                })
                .collect();
            splice_nodes(&out, &removed)
        }
        R2Plus | V2Plus => {
            let kind = if site.kind == R2Plus {
                NodeKind::Crossing
            } else {
                NodeKind::Virtual
            };
            let (Anchor::Arc(n1, s1), Anchor::Arc(n2, s2)) = (&a[0], &a[1]) else {
                unreachable!()
            };
            let p1 = end_of(&out, n1, *s1);
            let pb = end_of(&out, n2, *s2);
            let (q1, b1) = take_arc(&mut out, p1);
            let (q2, b2) = take_arc(&mut out, pb);
            let p2 = pb;
            let c = add_node(&mut out, kind);
            let e = add_node(&mut out, kind);
            push_arc(&mut out, p1, End::new(c, 1), b1);
            push_arc(&mut out, End::new(c, 3), End::new(e, 1), 0);
            push_arc(&mut out, End::new(e, 3), q1, 0);
            push_arc(&mut out, p2, End::new(c, 2), b2);
            push_arc(&mut out, End::new(c, 0), End::new(e, 0), 0);
            push_arc(&mut out, End::new(e, 2), q2, 0);
            out
        }
        R3 | V3 | V5 => {
            let (Anchor::Node(n), Anchor::Slot(_, ua)) = (&a[0], &a[1]) else {
                unreachable!()
            };
            let view = View::new(d);
            let t = triangle_from(&view, lookup(d, n), *ua).expect("site was matched");
            slide_triangle(d, &t)
        }
        R4 | V4 => {
            let view = View::new(d);
            let (Anchor::Node(n), Anchor::Slot(_, i)) = (&a[0], &a[1]) else {
                unreachable!()
            };
            let pass = vertex_pass_from(&view, lookup(d, n), *i, variant(site), site.kind == R4)
                .expect("site was matched");
            pass_over_vertex(d, &pass)
        }
        R5 | VirtualTwist => {
            let kind = if site.kind == R5 {
                NodeKind::Crossing
            } else {
                NodeKind::Virtual
            };
            if variant(site) < 2 {
                let Anchor::Slot(n, i) = &a[1] else {
                    unreachable!()
                };
                twist(&out, lookup(&out, n), *i, variant(site), kind)
            } else {
                let (Anchor::Node(c), Anchor::Slot(n, j)) = (&a[0], &a[1]) else {
                    unreachable!()
                };
                untwist(&out, c, n, *j)
            }
        }
        T1 => {
            let Anchor::Slot(n, s) = &a[1] else {
                unreachable!()
            };
            let x = lookup(&out, n);
            let view = View::new(d);
            let from = view.arc(End::new(x, *s));
            let to = view.arc(End::new(x, add4(*s, 2)));
            out.arcs[from].bars -= 1;
            out.arcs[to].bars += 1;
            out
        }
        T2Plus | T2Minus => {
            let delta = |b: u32| if site.kind == T2Plus { b + 2 } else { b - 2 };
            match &a[0] {
                Anchor::Arc(n, s) => {
                    let e = end_of(&out, n, *s);
                    let i = View::new(d).arc(e);
                    out.arcs[i].bars = delta(out.arcs[i].bars);
                }
                Anchor::Circle(n) => {
                    let c = out.circles.iter_mut().find(|c| &c.name == n).unwrap();
                    c.bars = delta(c.bars);
                }
                _ => unreachable!(),
            }
            out
        }
        T3 | T4 => {
            let Anchor::Node(n) = &a[0] else {
                unreachable!()
            };
            let node = lookup(&out, n);
            let deg = out.degree(node);
            let relabel = |s: usize| {
                if site.kind == T3 {
                    s ^ 1
                } else {
                    (deg - s) % deg
                }
            };
            let inc = variant(site) == 0;
            for arc in &mut out.arcs {
                for i in 0..2 {
                    if arc.ends[i].node == node {
                        arc.ends[i].slot = relabel(arc.ends[i].slot);
                        if inc {
                            arc.bars += 1;
                        } else {
                            arc.bars -= 1;
                        }
                    }
                }
            }
            out
        }
    }
}

fn kink_add_sites(v: &View, variants: usize) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for a in &v.d.arcs {
        for p in a.ends {
            for k in 0..variants {
                out.push(vec![arc_anchor(v.d, p), Anchor::Variant(k)]);
            }
        }
    }
    for c in &v.d.circles {
        for k in 0..variants {
            out.push(vec![Anchor::Circle(c.name.clone()), Anchor::Variant(k)]);
        }
    }
    out
}

fn kink_remove_sites(v: &View, classical: bool) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for (n, node) in v.d.nodes.iter().enumerate() {
        if !is_four_valent(node.kind, classical) {
            continue;
        }
        for s in 0..4 {
            let e = End::new(n, s);
            let (o1, o2) = (End::new(n, add4(s, 2)), End::new(n, add4(s, 3)));
            let undoable = v.arc(o1) == v.arc(o2) || v.bars(o1) == 0 || v.bars(o2) == 0;
            if v.far(e) == End::new(n, add4(s, 1)) && v.bars(e) == 0 && undoable {
                out.push(vec![Anchor::Node(node.name.clone()), slot_anchor(v.d, e)]);
            }
        }
    }
    out
}

fn bigon_add_sites(v: &View) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for (i, a) in v.d.arcs.iter().enumerate() {
        for (j, b) in v.d.arcs.iter().enumerate() {
            if i == j {
                continue;
            }
            for p1 in a.ends {
                for p2 in b.ends {
                    out.push(vec![arc_anchor(v.d, p1), arc_anchor(v.d, p2)]);
                }
            }
        }
    }
    out
}

/// Bigons `c.x - e.(y+1)`, `c.(x+1) - e.y` with bar-free sides. Classical
/// bigons must carry one strand over at both crossings (`x` odd, `y` even).
fn bigon_remove_sites(v: &View, classical: bool) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (c, cn) in v.d.nodes.iter().enumerate() {
        if !is_four_valent(cn.kind, classical) {
            continue;
        }
        for x in 0..4 {
            if classical && x % 2 == 0 {
                continue;
            }
            let first = End::new(c, x);
            let f = v.far(first);
            if f.node == c || !is_four_valent(v.kind(f.node), classical) || v.bars(first) != 0 {
                continue;
            }
            let y = add4(f.slot, 3);
            if classical && y % 2 == 1 {
                continue;
            }
            let second = End::new(c, add4(x, 1));
            if v.far(second) != End::new(f.node, y) || v.bars(second) != 0 {
                continue;
            }
            // Only bigons an insertion could have produced: four separate
            // outer arcs, bar-free on the side of one of the two crossings.
            let e = f.node;
            let outer = [
                End::new(c, add4(x, 2)),
                End::new(c, add4(x, 3)),
                End::new(e, add4(y, 3)),
                End::new(e, add4(y, 2)),
            ];
            let arcs: BTreeSet<usize> = outer.iter().map(|&o| v.arc(o)).collect();
            let bare = |i: usize| v.bars(outer[i]) == 0 && v.bars(outer[i + 1]) == 0;
            if arcs.len() < 4 || !(bare(0) || bare(2)) {
                continue;
            }
            let key = {
                let (a1, a2) = (v.arc(first), v.arc(second));
                (a1.min(a2), a1.max(a2))
            };
            if seen.insert(key) {
                out.push(vec![
                    Anchor::Node(cn.name.clone()),
                    slot_anchor(v.d, first),
                    Anchor::Node(node_name(v.d, f.node)),
                    slot_anchor(v.d, End::new(f.node, y)),
                ]);
            }
        }
    }
    out
}

/// Three crossings around a triangular face; corner `i` uses slots
/// `u[i]` and `u[i] + 1`, and `u[i] + 1` is joined to `u[i+1]` of the next.
struct Triangle {
    nodes: [usize; 3],
    u: [usize; 3],
}

impl Triangle {
    fn anchors(&self, d: &Diagram) -> Vec<Anchor> {
        vec![
            Anchor::Node(node_name(d, self.nodes[0])),
            slot_anchor(d, End::new(self.nodes[0], self.u[0])),
        ]
    }
}

fn triangle_from(v: &View, ca: usize, ua: usize) -> Option<Triangle> {
    let mut nodes = [ca, 0, 0];
    let mut u = [ua, 0, 0];
    let step = |n: usize, s: usize| -> Option<End> {
        let e = End::new(n, add4(s, 1));
        let f = v.far(e);
        (v.bars(e) == 0 && v.kind(f.node).degree() == 4 && !v.kind(f.node).is_vertex()).then_some(f)
    };
    for i in 0..2 {
        let f = step(nodes[i], u[i])?;
        nodes[i + 1] = f.node;
        u[i + 1] = f.slot;
    }
    let back = step(nodes[2], u[2])?;
    let distinct = nodes[0] != nodes[1] && nodes[1] != nodes[2] && nodes[0] != nodes[2];
    (distinct && back == End::new(ca, ua)).then_some(Triangle { nodes, u })
}

fn triangle_sites(v: &View, kind: MoveKind) -> Vec<Triangle> {
    let mut out = Vec::new();
    for (ca, node) in v.d.nodes.iter().enumerate() {
        if node.kind.is_vertex() {
            continue;
        }
        for ua in 0..4 {
            let Some(t) = triangle_from(v, ca, ua) else {
                continue;
            };
            let names: Vec<&str> = t
                .nodes
                .iter()
                .map(|&n| v.d.nodes[n].name.as_str())
                .collect();
            if names[0] > names[1] || names[0] > names[2] {
                continue;
            }
            let classical = t.nodes.iter().filter(|&&n| v.kind(n).is_crossing()).count();
            let ok = match kind {
                V3 => classical == 0,
                V5 => classical == 1,
                _ => classical == 3 && has_top_strand(&t),
            };
            if ok {
                out.push(t);
            }
        }
    }
    out
}

/// Some strand of the triangle is over at both of its crossings.
fn has_top_strand(t: &Triangle) -> bool {
    (0..3).any(|i| {
        let j = (i + 1) % 3;
        add4(t.u[i], 1) % 2 == 1 && t.u[j] % 2 == 1
    })
}

/// Moves each triangle strand across the opposite crossing.
fn slide_triangle(d: &Diagram, t: &Triangle) -> Diagram {
    let mut map: HashMap<End, End> = HashMap::new();
    let mut internal = Vec::new();
    let mut fresh = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (ci, s) = (t.nodes[i], add4(t.u[i], 1));
        let (cj, tt) = (t.nodes[j], t.u[j]);
        internal.push(End::new(ci, s));
        map.insert(End::new(ci, add4(s, 2)), End::new(cj, tt));
        map.insert(End::new(cj, add4(tt, 2)), End::new(ci, s));
        fresh.push(Arc::new(
            End::new(ci, add4(s, 2)),
            End::new(cj, add4(tt, 2)),
            0,
        ));
    }
    let mut out = d.clone();
    out.arcs
        .retain(|a| !internal.iter().any(|e| a.ends.contains(e)));
    for a in &mut out.arcs {
        for e in &mut a.ends {
            if let Some(m) = map.get(e) {
                *e = *m;
            }
        }
    }
    out.arcs.extend(fresh);
    out
}

/// A strand crossing the half-edges `i .. i+m` of a vertex in turn.
struct VertexPass {
    vertex: usize,
    start: usize,
    len: usize,
    crossings: Vec<usize>,
    over: bool,
    entry: End,
    exit: End,
    entry_bars: u32,
    exit_bars: u32,
}

impl VertexPass {
    fn anchors(&self, d: &Diagram) -> Vec<Anchor> {
        vec![
            Anchor::Node(node_name(d, self.vertex)),
            slot_anchor(d, End::new(self.vertex, self.start)),
            Anchor::Variant(self.len),
        ]
    }
}

/// Matches crossings `x_k` on the block, each reading `[toward, in, away,
/// out]` counterclockwise from its slot joined to the vertex, linked
/// `out_k - in_(k+1)` without bars.
fn vertex_pass_from(
    v: &View,
    vertex: usize,
    start: usize,
    len: usize,
    classical: bool,
) -> Option<VertexPass> {
    let deg = v.kind(vertex).degree();
    let mut crossings = Vec::with_capacity(len);
    let mut toward = Vec::with_capacity(len);
    for k in 0..len {
        let e = End::new(vertex, (start + k) % deg);
        let f = v.far(e);
        if !is_four_valent(v.kind(f.node), classical)
            || v.bars(e) != 0
            || crossings.contains(&f.node)
        {
            return None;
        }
        crossings.push(f.node);
        toward.push(f.slot);
    }
    let over = toward[0] % 2 == 0;
    if classical && toward.iter().any(|t| (t % 2 == 0) != over) {
        return None;
    }
    for k in 0..len - 1 {
        let out = End::new(crossings[k], add4(toward[k], 3));
        if v.far(out) != End::new(crossings[k + 1], add4(toward[k + 1], 1)) || v.bars(out) != 0 {
            return None;
        }
    }
    let entry_end = End::new(crossings[0], add4(toward[0], 1));
    let exit_end = End::new(crossings[len - 1], add4(toward[len - 1], 3));
    let (entry, exit) = (v.far(entry_end), v.far(exit_end));
    let outside = |e: End| e.node != vertex && !crossings.contains(&e.node);
    if !outside(entry) || !outside(exit) {
        return None;
    }
    Some(VertexPass {
        vertex,
        start,
        len,
        crossings,
        over,
        entry,
        exit,
        entry_bars: v.bars(entry_end),
        exit_bars: v.bars(exit_end),
    })
}

fn vertex_pass_sites(v: &View, classical: bool) -> Vec<VertexPass> {
    let mut out = Vec::new();
    for (n, node) in v.d.nodes.iter().enumerate() {
        let NodeKind::Vertex(deg) = node.kind else {
            continue;
        };
        for start in 0..deg {
            for len in 1..deg {
                if let Some(p) = vertex_pass_from(v, n, start, len, classical) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Pulls the strand across the vertex so that it crosses the complementary
/// half-edges instead, in clockwise order.
fn pass_over_vertex(d: &Diagram, p: &VertexPass) -> Diagram {
    let kind = d.nodes[p.crossings[0]].kind;
    let vname = node_name(d, p.vertex);
    let (entry, exit) = (
        (node_name(d, p.entry.node), p.entry.slot),
        (node_name(d, p.exit.node), p.exit.slot),
    );
    let mut out = splice_nodes(d, &p.crossings);
    let vertex = lookup(&out, &vname);
    let entry = end_of(&out, &entry.0, entry.1);
    let exit = end_of(&out, &exit.0, exit.1);
    take_arc(&mut out, entry);
    // Right-hand form, counterclockwise from slot 0.
    let (away, inn, toward, outt) = if p.over || !kind.is_crossing() {
        (0, 1, 2, 3)
    } else {
        (1, 2, 3, 0)
    };
    let deg = out.degree(vertex);
    let mut prev = (entry, p.entry_bars);
    for k in 1..=deg - p.len {
        let j = (p.start + deg - k) % deg;
        let hv = End::new(vertex, j);
        let (far, bars) = take_arc(&mut out, hv);
        let y = add_node(&mut out, kind);
        push_arc(&mut out, hv, End::new(y, toward), 0);
        push_arc(&mut out, End::new(y, away), far, bars);
        push_arc(&mut out, prev.0, End::new(y, inn), prev.1);
        prev = (End::new(y, outt), 0);
    }
    push_arc(&mut out, prev.0, exit, p.exit_bars);
    out
}

fn twist_sites(v: &View, classical: bool) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for node in &v.d.nodes {
        let NodeKind::Vertex(deg) = node.kind else {
            continue;
        };
        if !twistable(deg, classical) {
            continue;
        }
        for i in 0..deg {
            let variants = if classical { 2 } else { 1 };
            for k in 0..variants {
                out.push(vec![
                    Anchor::Node(node.name.clone()),
                    Anchor::Slot(node.name.clone(), i),
                    Anchor::Variant(k),
                ]);
            }
        }
    }
    for (c, cn) in v.d.nodes.iter().enumerate() {
        if !is_four_valent(cn.kind, classical) {
            continue;
        }
        for s in 0..4 {
            let f = v.far(End::new(c, s));
            let NodeKind::Vertex(deg) = v.kind(f.node) else {
                continue;
            };
            if !twistable(deg, classical) || v.bars(End::new(c, s)) != 0 {
                continue;
            }
            let j = (f.slot + deg - 1) % deg;
            let g = End::new(c, add4(s, 1));
            if v.far(g) == End::new(f.node, j) && v.bars(g) == 0 {
                out.push(vec![
                    Anchor::Node(cn.name.clone()),
                    Anchor::Slot(node_name(v.d, f.node), j),
                    Anchor::Variant(2),
                ]);
            }
        }
    }
    out
}

/// R changes by more than a unit when edges at a vertex of degree four or
/// more are twisted, so the classical twist is limited to degree two and three.
fn twistable(deg: usize, classical: bool) -> bool {
    deg >= 2 && (!classical || deg <= 3)
}

/// Crosses the edges at slots `i` and `i + 1` of a vertex over each other.
fn twist(d: &Diagram, vertex: usize, i: usize, variant: usize, kind: NodeKind) -> Diagram {
    let mut out = d.clone();
    let deg = out.degree(vertex);
    let h1 = End::new(vertex, i);
    let h2 = End::new(vertex, (i + 1) % deg);
    let (r1, b1) = take_arc(&mut out, h1);
    let c = add_node(&mut out, kind);
    // Slots of the new crossing leading to each far end, and to the vertex.
    let (to_r1, to_r2, to_h2, to_h1) = if variant == 0 {
        (0, 1, 2, 3)
    } else {
        (3, 0, 1, 2)
    };
    if r1 == h2 {
        push_arc(&mut out, End::new(c, to_r1), End::new(c, to_r2), b1);
    } else {
        let (r2, b2) = take_arc(&mut out, h2);
        push_arc(&mut out, End::new(c, to_r1), r1, b1);
        push_arc(&mut out, End::new(c, to_r2), r2, b2);
    }
    push_arc(&mut out, h2, End::new(c, to_h2), 0);
    push_arc(&mut out, h1, End::new(c, to_h1), 0);
    out
}

fn untwist(d: &Diagram, crossing: &str, vertex: &str, j: usize) -> Diagram {
    let mut out = splice_nodes(d, &[lookup(d, crossing)]);
    let v = lookup(&out, vertex);
    let deg = out.degree(v);
    let k = (j + 1) % deg;
    for arc in &mut out.arcs {
        for e in &mut arc.ends {
            if e.node == v && (e.slot == j || e.slot == k) {
                e.slot = if e.slot == j { k } else { j };
            }
        }
    }
    out
}

fn bar_slide_sites(v: &View) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for (x, node) in v.d.nodes.iter().enumerate() {
        if !node.kind.is_virtual() {
            continue;
        }
        for s in 0..4 {
            let e = End::new(x, s);
            if v.bars(e) >= 1 && v.arc(e) != v.arc(End::new(x, add4(s, 2))) {
                out.push(vec![Anchor::Node(node.name.clone()), slot_anchor(v.d, e)]);
            }
        }
    }
    out
}

fn bar_pair_sites(v: &View, min_bars: u32) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for a in &v.d.arcs {
        if a.bars >= min_bars {
            out.push(vec![arc_anchor(v.d, canonical_end(v.d, a))]);
        }
    }
    for c in &v.d.circles {
        if c.bars >= min_bars {
            out.push(vec![Anchor::Circle(c.name.clone())]);
        }
    }
    out
}

/// Flipping a crossing (T3) or a vertex (T4) over: one bar is added to, or
/// removed from, every arm.
fn flip_sites(v: &View, crossing: bool) -> Vec<Vec<Anchor>> {
    let mut out = Vec::new();
    for (n, node) in v.d.nodes.iter().enumerate() {
        let applies = if crossing {
            node.kind.is_crossing()
        } else {
            node.kind.is_vertex() && node.kind.degree() > 0
        };
        if !applies {
            continue;
        }
        out.push(vec![Anchor::Node(node.name.clone()), Anchor::Variant(0)]);
        let mut need: HashMap<usize, u32> = HashMap::new();
        for s in 0..node.kind.degree() {
            *need.entry(v.arc(End::new(n, s))).or_default() += 1;
        }
        if need.iter().all(|(&a, &k)| v.d.arcs[a].bars >= k) {
            out.push(vec![Anchor::Node(node.name.clone()), Anchor::Variant(1)]);
        }
    }
    out
}

/// Upper bound on the work of evaluating R: `6^c · 2^(D/2)` for `c`
/// classical crossings and total vertex degree `D`.
pub fn evaluation_cost(d: &Diagram) -> f64 {
    let mut c = 0;
    let mut deg = 0;
    for n in &d.nodes {
        match n.kind {
            NodeKind::Crossing => c += 1,
            NodeKind::Vertex(k) => deg += k,
            NodeKind::Virtual => {}
        }
    }
    6f64.powi(c) * 2f64.powf(deg as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzStep {
    pub step: usize,
    pub kind: String,
    pub anchors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzLog {
    pub steps: Vec<FuzzStep>,
}

impl FuzzLog {
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("plain data") + "\n")
            .collect()
    }

    /// True if some applied move is only invariant up to a unit.
    pub fn needs_unit(&self) -> bool {
        self.steps.iter().any(|s| {
            s.kind
                .parse::<MoveKind>()
                .is_ok_and(|k| k.changes_r_by_unit())
        })
    }
}

/// Limits on how far the fuzzer may grow a diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzLimits {
    pub max_cost: f64,
    pub max_nodes: usize,
}

impl FuzzLimits {
    /// Room for a few extra crossings on small inputs, none beyond the
    /// starting cost on large ones.
    pub fn for_diagram(d: &Diagram) -> Self {
        FuzzLimits {
            max_cost: evaluation_cost(d).max(50_000.0),
            max_nodes: d.nodes.len() + 12,
        }
    }
}

/// Applies `length` random moves drawn from `kinds`, using the default
/// limits for `d`.
pub fn fuzz(d: &Diagram, length: usize, seed: u64, kinds: &[MoveKind]) -> (Diagram, FuzzLog) {
    fuzz_with_limits(d, length, seed, kinds, FuzzLimits::for_diagram(d))
}

/// Each step picks a kind uniformly among those with sites, then a site
/// uniformly; moves that would exceed `limits` are passed over. Steps where
/// nothing applies leave the diagram unchanged.
pub fn fuzz_with_limits(
    d: &Diagram,
    length: usize,
    seed: u64,
    kinds: &[MoveKind],
    limits: FuzzLimits,
) -> (Diagram, FuzzLog) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut log = FuzzLog::default();
    for step in 0..length {
        let mut options: Vec<Vec<MoveSite>> = kinds
            .iter()
            .map(|&k| find_sites(&cur, k))
            .filter(|s| !s.is_empty())
            .collect();
        while !options.is_empty() {
            let ki = rng.gen_range(0..options.len());
            let si = rng.gen_range(0..options[ki].len());
            let site = options[ki].swap_remove(si);
            if options[ki].is_empty() {
                options.swap_remove(ki);
            }
            let next = rewrite(&cur, &site);
            if next.nodes.len() <= limits.max_nodes && evaluation_cost(&next) <= limits.max_cost {
                log.steps.push(FuzzStep {
                    step,
                    kind: site.kind.name().to_string(),
                    anchors: site.anchors.iter().map(|a| a.to_string()).collect(),
                });
                cur = next;
                break;
            }
        }
    }
    (cur, log)
}

/// Whether R before and after a fuzz run agree as the applied moves demand.
pub fn invariance_holds(before: &Poly, after: &Poly, log: &FuzzLog) -> bool {
    if log.needs_unit() {
        before.equal_up_to_unit(after, false)
    } else {
        before == after
    }
}

/// Picks a random site of any of `kinds`, for tests and tools.
pub fn random_site(d: &Diagram, kinds: &[MoveKind], rng: &mut impl Rng) -> Option<MoveSite> {
    let mut all: Vec<MoveSite> = kinds.iter().flat_map(|&k| find_sites(d, k)).collect();
    all.shuffle(rng);
    all.pop()
}
