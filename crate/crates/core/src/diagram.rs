//! Combinatorial twisted graph diagrams and the line-oriented TGD text format.
//!
//! A diagram is a set of nodes (vertices, classical crossings, virtual
//! crossings), each with a counterclockwise sequence of slots, together with
//! arcs that pair the slots up and circle components that touch no node.
//! Classical crossings carry the over-strand on slots 1 and 3; virtual
//! crossings pass strands straight through (0-2 and 1-3).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Vertex(usize),
    Crossing,
    Virtual,
}

impl NodeKind {
    pub fn degree(&self) -> usize {
        match self {
            NodeKind::Vertex(d) => *d,
            NodeKind::Crossing | NodeKind::Virtual => 4,
        }
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self, NodeKind::Crossing)
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, NodeKind::Virtual)
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, NodeKind::Vertex(_))
    }

    /// Slot rotations that leave the node's meaning unchanged.
    pub(crate) fn symmetries(&self) -> Vec<usize> {
        match self {
            NodeKind::Vertex(d) => (0..(*d).max(1)).collect(),
            NodeKind::Crossing => vec![0, 2],
            NodeKind::Virtual => vec![0, 1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn new(name: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            name: name.into(),
            kind,
        }
    }
}

/// One end of an arc: a node index and a slot on that node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct End {
    pub node: usize,
    pub slot: usize,
}

impl End {
    pub fn new(node: usize, slot: usize) -> Self {
        End { node, slot }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub ends: [End; 2],
    pub bars: u32,
}

impl Arc {
    pub fn new(a: End, b: End, bars: u32) -> Self {
        Arc { ends: [a, b], bars }
    }

    pub fn is_loop_at(&self, node: usize) -> bool {
        self.ends[0].node == node && self.ends[1].node == node
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub name: String,
    pub bars: u32,
}

impl Circle {
    pub fn new(name: impl Into<String>, bars: u32) -> Self {
        Circle {
            name: name.into(),
            bars,
        }
    }
}

/// A problem found by [`Diagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("arc {arc} references unknown node index {node}")]
    UnknownNode { arc: usize, node: usize },
    #[error("arc {arc} uses slot {slot} of `{node}` which has only {degree} slots")]
    SlotOutOfRange {
        arc: usize,
        node: String,
        slot: usize,
        degree: usize,
    },
    #[error("slot {slot} of `{node}` is used by more than one arc end")]
    SlotUsedTwice { node: String, slot: usize },
    #[error("slot {slot} of `{node}` is not used by any arc")]
    SlotUnused { node: String, slot: usize },
    #[error("duplicate id `{id}`")]
    DuplicateId { id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown node `{name}`")]
    UnknownNode {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("invalid diagram: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Invalid(Vec<Violation>),
}

/// Element counts reported by [`Diagram::stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiagramStats {
    pub num_classical: usize,
    pub num_virtual: usize,
    pub num_vertices: usize,
    pub total_bars: u64,
    pub num_circles: usize,
}

/// An arc endpoint by node name.
type NamedEnd = (String, usize);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagram {
    pub(crate) nodes: Vec<Node>,
    pub(crate) arcs: Vec<Arc>,
    pub(crate) circles: Vec<Circle>,
}

/// Per node, per slot: the arc index and which end of that arc sits there.
pub(crate) type Incidence = Vec<Vec<(usize, usize)>>;

impl Diagram {
    /// Assembles a diagram without checking it; see [`Diagram::validate`].
    pub fn from_parts(nodes: Vec<Node>, arcs: Vec<Arc>, circles: Vec<Circle>) -> Self {
        Diagram {
            nodes,
            arcs,
            circles,
        }
    }

    /// Assembles a diagram and rejects it unless every invariant holds.
    pub fn try_from_parts(
        nodes: Vec<Node>,
        arcs: Vec<Arc>,
        circles: Vec<Circle>,
    ) -> Result<Self, Vec<Violation>> {
        let d = Diagram::from_parts(nodes, arcs, circles);
        let violations = d.validate();
        if violations.is_empty() {
            Ok(d)
        } else {
            Err(violations)
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.nodes[node].kind.degree()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.circles.is_empty()
    }

    /// True when no classical crossing is present.
    pub fn is_pure(&self) -> bool {
        !self.nodes.iter().any(|n| n.kind.is_crossing())
    }

    /// Indices of classical crossings, sorted by name.
    pub fn classical_crossings(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind.is_crossing())
            .collect();
        ids.sort_by(|&a, &b| self.nodes[a].name.cmp(&self.nodes[b].name));
        ids
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for id in self
            .nodes
            .iter()
            .map(|n| &n.name)
            .chain(self.circles.iter().map(|c| &c.name))
        {
            if !seen.insert(id.as_str()) {
                out.push(Violation::DuplicateId { id: id.clone() });
            }
        }
        let mut used: Vec<Vec<u32>> = self
            .nodes
            .iter()
            .map(|n| vec![0; n.kind.degree()])
            .collect();
        for (ai, arc) in self.arcs.iter().enumerate() {
            for end in arc.ends {
                let Some(node) = self.nodes.get(end.node) else {
                    out.push(Violation::UnknownNode {
                        arc: ai,
                        node: end.node,
                    });
                    continue;
                };
                let degree = node.kind.degree();
                if end.slot >= degree {
                    out.push(Violation::SlotOutOfRange {
                        arc: ai,
                        node: node.name.clone(),
                        slot: end.slot,
                        degree,
                    });
                    continue;
                }
                used[end.node][end.slot] += 1;
            }
        }
        for (ni, counts) in used.iter().enumerate() {
            for (slot, &c) in counts.iter().enumerate() {
                let node = self.nodes[ni].name.clone();
                match c {
                    0 => out.push(Violation::SlotUnused { node, slot }),
                    1 => {}
                    _ => out.push(Violation::SlotUsedTwice { node, slot }),
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn stats(&self) -> DiagramStats {
        let mut s = DiagramStats::default();
        for n in &self.nodes {
            match n.kind {
                NodeKind::Vertex(_) => s.num_vertices += 1,
                NodeKind::Crossing => s.num_classical += 1,
                NodeKind::Virtual => s.num_virtual += 1,
            }
        }
        s.total_bars = self.arcs.iter().map(|a| a.bars as u64).sum::<u64>()
            + self.circles.iter().map(|c| c.bars as u64).sum::<u64>();
        s.num_circles = self.circles.len();
        s
    }

    /// Sum of bars modulo two over all arcs and circles.
    pub fn bar_parity(&self) -> u32 {
        (self.stats().total_bars % 2) as u32
    }

    pub(crate) fn incidence(&self) -> Incidence {
        let mut inc: Incidence = self
            .nodes
            .iter()
            .map(|n| vec![(usize::MAX, 0); n.kind.degree()])
            .collect();
        for (ai, arc) in self.arcs.iter().enumerate() {
            for (side, end) in arc.ends.iter().enumerate() {
                inc[end.node][end.slot] = (ai, side);
            }
        }
        inc
    }

    /// The arc attached at `end` and the end at its far side.
    pub fn arc_at(&self, end: End) -> Option<(usize, End)> {
        self.arcs.iter().enumerate().find_map(|(ai, a)| {
            if a.ends[0] == end {
                Some((ai, a.ends[1]))
            } else if a.ends[1] == end {
                Some((ai, a.ends[0]))
            } else {
                None
            }
        })
    }

    pub(crate) fn names_in_use(&self) -> HashSet<String> {
        self.nodes
            .iter()
            .map(|n| n.name.clone())
            .chain(self.circles.iter().map(|c| c.name.clone()))
            .collect()
    }

    /// Removes the nodes that have a pairing in `plan` and joins their slots
    /// through according to it (`plan[node][slot]` is the slot the strand
    /// continues from). Bars along each joined chain are summed; chains that
    /// close up without meeting a kept node become circle components.
    pub(crate) fn splice(&self, plan: &[Option<Vec<usize>>]) -> Diagram {
        let inc = self.incidence();
        let removed = |n: usize| plan[n].is_some();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !removed(i) {
                remap[i] = nodes.len();
                nodes.push(n.clone());
            }
        }
        let fix = |e: End| End::new(remap[e.node], e.slot);
        let mut visited = vec![false; self.arcs.len()];
        let mut arcs = Vec::new();

        for (ai, arc) in self.arcs.iter().enumerate() {
            if visited[ai] {
                continue;
            }
            let [a, b] = arc.ends;
            if !removed(a.node) && !removed(b.node) {
                visited[ai] = true;
                arcs.push(Arc::new(fix(a), fix(b), arc.bars));
                continue;
            }
            let side = if !removed(a.node) {
                0
            } else if !removed(b.node) {
                1
            } else {
                continue;
            };
            visited[ai] = true;
            let start = arc.ends[side];
            let mut bars = arc.bars;
            let mut cur = arc.ends[1 - side];
            while removed(cur.node) {
                let next_slot = plan[cur.node].as_ref().unwrap()[cur.slot];
                let (aj, endj) = inc[cur.node][next_slot];
                visited[aj] = true;
                bars += self.arcs[aj].bars;
                cur = self.arcs[aj].ends[1 - endj];
            }
            arcs.push(Arc::new(fix(start), fix(cur), bars));
        }

        let mut taken = self.names_in_use();
        let mut circles = self.circles.clone();
        for ai in 0..self.arcs.len() {
            if visited[ai] {
                continue;
            }
            visited[ai] = true;
            let mut bars = self.arcs[ai].bars;
            let mut cur = self.arcs[ai].ends[1];
            loop {
                let next_slot = plan[cur.node].as_ref().unwrap()[cur.slot];
                let (aj, endj) = inc[cur.node][next_slot];
                if aj == ai {
                    break;
                }
                visited[aj] = true;
                bars += self.arcs[aj].bars;
                cur = self.arcs[aj].ends[1 - endj];
            }
            let name = fresh_name("o", &taken);
            taken.insert(name.clone());
            circles.push(Circle::new(name, bars));
        }
        Diagram {
            nodes,
            arcs,
            circles,
        }
    }

    /// Parses TGD text; the result has passed [`Diagram::validate`].
    pub fn parse(text: &str) -> Result<Diagram, ParseError> {
        parse_tgd(text)
    }

    /// Canonical TGD text: vertices, crossings, virtual crossings, arcs and
    /// circles, each group sorted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        let rank = |k: &NodeKind| match k {
            NodeKind::Vertex(_) => 0,
            NodeKind::Crossing => 1,
            NodeKind::Virtual => 2,
        };
        order.sort_by(|&a, &b| {
            let (na, nb) = (&self.nodes[a], &self.nodes[b]);
            (rank(&na.kind), &na.name).cmp(&(rank(&nb.kind), &nb.name))
        });
        for &i in &order {
            let n = &self.nodes[i];
            match n.kind {
                NodeKind::Vertex(d) => out.push_str(&format!("vertex {} {}\n", n.name, d)),
                NodeKind::Crossing => out.push_str(&format!("crossing {}\n", n.name)),
                NodeKind::Virtual => out.push_str(&format!("virtual {}\n", n.name)),
            }
        }
        let key = |e: End| (self.nodes[e.node].name.clone(), e.slot);
        let mut arcs: Vec<(NamedEnd, NamedEnd, u32)> = self
            .arcs
            .iter()
            .map(|a| {
                let (x, y) = (key(a.ends[0]), key(a.ends[1]));
                if x <= y {
                    (x, y, a.bars)
                } else {
                    (y, x, a.bars)
                }
            })
            .collect();
        arcs.sort();
        for ((n1, s1), (n2, s2), bars) in arcs {
            out.push_str(&format!("arc {n1}.{s1} {n2}.{s2}"));
            if bars > 0 {
                out.push_str(&format!(" bars {bars}"));
            }
            out.push('\n');
        }
        let mut circles: Vec<&Circle> = self.circles.iter().collect();
        circles.sort_by(|a, b| a.name.cmp(&b.name));
        for c in circles {
            out.push_str(&format!("circle {}", c.name));
            if c.bars > 0 {
                out.push_str(&format!(" bars {}", c.bars));
            }
            out.push('\n');
        }
        out
    }

    /// Isomorphism up to renaming, declaration order and the label rotations
    /// each node kind admits (any rotation of a vertex or virtual crossing,
    /// a half turn of a classical crossing).
    pub fn is_isomorphic(&self, other: &Diagram) -> bool {
        isomorphic(self, other)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for Diagram {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tgd(s)
    }
}

pub(crate) fn fresh_name(prefix: &str, taken: &HashSet<String>) -> String {
    (0..)
        .map(|i| format!("{prefix}{i}"))
        .find(|n| !taken.contains(n))
        .unwrap()
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains('.') && !s.starts_with('#')
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

/// Parses TGD text into a validated [`Diagram`].
pub fn parse_tgd(text: &str) -> Result<Diagram, ParseError> {
    struct RawArc<'a> {
        ends: [(Token<'a>, usize); 2],
        bars: u32,
    }
    let mut nodes = Vec::new();
    let mut circles = Vec::new();
    let mut raw_arcs = Vec::new();

    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        let syntax = |column: usize, message: String| ParseError::Syntax {
            line,
            column,
            message,
        };
        let end_col = content.chars().count() + 1;
        let name_at = |i: usize| -> Result<String, ParseError> {
            let t = toks
                .get(i)
                .ok_or_else(|| syntax(end_col, "expected a name".into()))?;
            if !valid_name(t.text) {
                return Err(syntax(t.column, format!("invalid name `{}`", t.text)));
            }
            Ok(t.text.to_string())
        };
        let int_at = |i: usize| -> Result<u32, ParseError> {
            let t = toks
                .get(i)
                .ok_or_else(|| syntax(end_col, "expected an integer".into()))?;
            t.text.parse::<u32>().map_err(|_| {
                syntax(
                    t.column,
                    format!("expected a nonnegative integer, found `{}`", t.text),
                )
            })
        };
        let bars_at = |i: usize| -> Result<u32, ParseError> {
            match toks.get(i) {
                None => Ok(0),
                Some(t) if t.text == "bars" => {
                    let b = int_at(i + 1)?;
                    if let Some(extra) = toks.get(i + 2) {
                        return Err(syntax(extra.column, format!("unexpected `{}`", extra.text)));
                    }
                    Ok(b)
                }
                Some(t) => Err(syntax(
                    t.column,
                    format!("expected `bars`, found `{}`", t.text),
                )),
            }
        };
        let no_more = |i: usize| -> Result<(), ParseError> {
            match toks.get(i) {
                None => Ok(()),
                Some(t) => Err(syntax(t.column, format!("unexpected `{}`", t.text))),
            }
        };
        match head.text {
            "vertex" => {
                let name = name_at(1)?;
                let d = int_at(2)?;
                no_more(3)?;
                nodes.push(Node::new(name, NodeKind::Vertex(d as usize)));
            }
            "crossing" => {
                let name = name_at(1)?;
                no_more(2)?;
                nodes.push(Node::new(name, NodeKind::Crossing));
            }
            "virtual" => {
                let name = name_at(1)?;
                no_more(2)?;
                nodes.push(Node::new(name, NodeKind::Virtual));
            }
            "circle" => {
                let name = name_at(1)?;
                let bars = bars_at(2)?;
                circles.push(Circle::new(name, bars));
            }
            "arc" => {
                let mut ends = Vec::with_capacity(2);
                for i in 1..3 {
                    let t = toks
                        .get(i)
                        .ok_or_else(|| syntax(end_col, "expected an endpoint NAME.SLOT".into()))?;
                    let Some((name, slot)) = t.text.rsplit_once('.') else {
                        return Err(syntax(
                            t.column,
                            format!("expected an endpoint NAME.SLOT, found `{}`", t.text),
                        ));
                    };
                    if !valid_name(name) {
                        return Err(syntax(t.column, format!("invalid name `{name}`")));
                    }
                    let slot: usize = slot.parse().map_err(|_| {
                        syntax(
                            t.column + name.chars().count() + 1,
                            format!("invalid slot `{slot}`"),
                        )
                    })?;
                    ends.push((
                        Token {
                            text: name,
                            column: t.column,
                        },
                        slot,
                    ));
                }
                let bars = bars_at(3)?;
                let e1 = ends.pop().unwrap();
                let e0 = ends.pop().unwrap();
                raw_arcs.push((
                    line,
                    RawArc {
                        ends: [e0, e1],
                        bars,
                    },
                ));
            }
            other => {
                return Err(syntax(
                    head.column,
                    format!("unknown declaration `{other}`"),
                ));
            }
        }
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        index.entry(n.name.as_str()).or_insert(i);
    }
    let mut arcs = Vec::with_capacity(raw_arcs.len());
    for (line, raw) in &raw_arcs {
        let mut ends = [End::new(0, 0); 2];
        for (k, (tok, slot)) in raw.ends.iter().enumerate() {
            let Some(&ni) = index.get(tok.text) else {
                return Err(ParseError::UnknownNode {
                    line: *line,
                    column: tok.column,
                    name: tok.text.to_string(),
                });
            };
            ends[k] = End::new(ni, *slot);
        }
        arcs.push(Arc::new(ends[0], ends[1], raw.bars));
    }
    Diagram::try_from_parts(nodes, arcs, circles).map_err(ParseError::Invalid)
}

fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    if a.nodes.len() != b.nodes.len()
        || a.arcs.len() != b.arcs.len()
        || a.circles.len() != b.circles.len()
    {
        return false;
    }
    let signature = |d: &Diagram| {
        let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
        for n in &d.nodes {
            *kinds.entry(format!("{:?}", n.kind)).or_default() += 1;
        }
        let mut circ: Vec<u32> = d.circles.iter().map(|c| c.bars).collect();
        circ.sort_unstable();
        let mut bars: Vec<u32> = d.arcs.iter().map(|x| x.bars).collect();
        bars.sort_unstable();
        (kinds, circ, bars)
    };
    if signature(a) != signature(b) {
        return false;
    }
    let inc_a = a.incidence();
    let inc_b = b.incidence();
    let mut map: Vec<Option<(usize, usize)>> = vec![None; a.nodes.len()];
    let mut used = vec![false; b.nodes.len()];
    iso_search(a, b, &inc_a, &inc_b, &mut map, &mut used)
}

fn iso_search(
    a: &Diagram,
    b: &Diagram,
    inc_a: &Incidence,
    inc_b: &Incidence,
    map: &mut Vec<Option<(usize, usize)>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(u) = map.iter().position(|m| m.is_none()) else {
        return true;
    };
    let kind = a.nodes[u].kind;
    for v in 0..b.nodes.len() {
        if used[v] || b.nodes[v].kind != kind {
            continue;
        }
        for r in kind.symmetries() {
            let snapshot_map = map.clone();
            let snapshot_used = used.clone();
            if iso_propagate(a, b, inc_a, inc_b, map, used, u, v, r)
                && iso_search(a, b, inc_a, inc_b, map, used)
            {
                return true;
            }
            *map = snapshot_map;
            *used = snapshot_used;
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn iso_propagate(
    a: &Diagram,
    b: &Diagram,
    inc_a: &Incidence,
    inc_b: &Incidence,
    map: &mut [Option<(usize, usize)>],
    used: &mut [bool],
    u: usize,
    v: usize,
    r: usize,
) -> bool {
    map[u] = Some((v, r));
    used[v] = true;
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        let (x2, rx) = map[x].unwrap();
        let d = a.degree(x);
        for s in 0..d {
            let (ai, side) = inc_a[x][s];
            let far = a.arcs[ai].ends[1 - side];
            let (bi, bside) = inc_b[x2][(s + rx) % d];
            if a.arcs[ai].bars != b.arcs[bi].bars {
                return false;
            }
            let far2 = b.arcs[bi].ends[1 - bside];
            let y = far.node;
            let dy = a.degree(y);
            match map[y] {
                Some((y2, ry)) => {
                    if y2 != far2.node || (far.slot + ry) % dy != far2.slot {
                        return false;
                    }
                }
                None => {
                    if used[far2.node] || b.nodes[far2.node].kind != a.nodes[y].kind {
                        return false;
                    }
                    let ry = (far2.slot + dy - far.slot) % dy;
                    if !a.nodes[y].kind.symmetries().contains(&ry) {
                        return false;
                    }
                    map[y] = Some((far2.node, ry));
                    used[far2.node] = true;
                    stack.push(y);
                }
            }
        }
    }
    true
}
