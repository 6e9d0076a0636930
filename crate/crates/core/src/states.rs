//! Spin states of classical crossings and their resolution into pure diagrams.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::diagram::{Diagram, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Plus,
    Minus,
    Zero,
}

impl Spin {
    pub const ALL: [Spin; 3] = [Spin::Plus, Spin::Minus, Spin::Zero];

    pub fn value(self) -> i32 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
            Spin::Zero => 0,
        }
    }

    /// Strand continuation through a smoothed crossing, or `None` for spin 0.
    pub(crate) fn pairing(self) -> Option<Vec<usize>> {
        match self {
            Spin::Plus => Some(vec![1, 0, 3, 2]),
            Spin::Minus => Some(vec![3, 2, 1, 0]),
            Spin::Zero => None,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Plus => "+",
            Spin::Minus => "-",
            Spin::Zero => "0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub assignment: BTreeMap<String, Spin>,
    pub p: usize,
    pub q: usize,
}

impl State {
    pub fn new(assignment: BTreeMap<String, Spin>) -> Self {
        let p = assignment.values().filter(|s| **s == Spin::Plus).count();
        let q = assignment.values().filter(|s| **s == Spin::Minus).count();
        State { assignment, p, q }
    }

    /// Exponent of `a` in the state weight.
    pub fn weight_exp(&self) -> i32 {
        self.p as i32 - self.q as i32
    }

    /// Spins in crossing-name order, e.g. `+-0`.
    pub fn spin_string(&self) -> String {
        self.assignment.values().map(|s| s.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("no spin assigned to crossing `{0}`")]
    Missing(String),
    #[error("`{0}` is not a classical crossing of the diagram")]
    Unknown(String),
}

/// All `3^c` states in lexicographic order over sorted crossing names,
/// spins ordered `+1, -1, 0`.
pub fn enumerate_states(d: &Diagram) -> States {
    let names: Vec<String> = d
        .classical_crossings()
        .into_iter()
        .map(|i| d.nodes()[i].name.clone())
        .collect();
    States {
        digits: vec![0; names.len()],
        names,
        done: false,
    }
}

pub struct States {
    names: Vec<String>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for States {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        if self.done {
            return None;
        }
        let assignment = self
            .names
            .iter()
            .zip(&self.digits)
            .map(|(n, &d)| (n.clone(), Spin::ALL[d]))
            .collect();
        let state = State::new(assignment);
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < 3 {
                break;
            }
            self.digits[i] = 0;
        }
        Some(state)
    }
}

/// Number of states without enumerating them.
pub fn state_count(d: &Diagram) -> u128 {
    3u128.pow(d.classical_crossings().len() as u32)
}

/// Smooths or vertexes every classical crossing as prescribed by `s`.
pub fn resolve(d: &Diagram, s: &State) -> Result<Diagram, StateError> {
    for name in s.assignment.keys() {
        match d.node_index(name) {
            Some(i) if d.nodes()[i].kind.is_crossing() => {}
            _ => return Err(StateError::Unknown(name.clone())),
        }
    }
    let mut spins = vec![None; d.nodes().len()];
    for i in d.classical_crossings() {
        let name = &d.nodes()[i].name;
        spins[i] = Some(
            *s.assignment
                .get(name)
                .ok_or_else(|| StateError::Missing(name.clone()))?,
        );
    }
    Ok(resolve_with(d, &spins))
}

/// Resolves a single crossing, leaving every other node in place.
pub fn resolve_crossing(d: &Diagram, crossing: usize, spin: Spin) -> Diagram {
    assert!(
        d.nodes()[crossing].kind.is_crossing(),
        "not a classical crossing"
    );
    let mut spins = vec![None; d.nodes().len()];
    spins[crossing] = Some(spin);
    resolve_with(d, &spins)
}

fn resolve_with(d: &Diagram, spins: &[Option<Spin>]) -> Diagram {
    let mut base = d.clone();
    for (i, s) in spins.iter().enumerate() {
        if *s == Some(Spin::Zero) {
            base.nodes[i].kind = NodeKind::Vertex(4);
        }
    }
    let plan: Vec<Option<Vec<usize>>> = spins.iter().map(|s| s.and_then(|s| s.pairing())).collect();
    if plan.iter().all(Option::is_none) {
        return base;
    }
    base.splice(&plan)
}
