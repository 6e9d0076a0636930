//! Exact computation of the R(a, z, w) polynomial of twisted graph diagrams.
//!
//! A [`Diagram`] is expanded into spin states ([`states`]), each state is read
//! as a signed ribbon graph ([`ribbon`]) whose surface statistics feed the
//! state polynomial Q, and the weighted sum over states gives R
//! ([`invariant`]). The [`moves`] module rewrites diagrams by local moves,
//! which is how invariance is exercised.

pub mod diagram;
pub mod invariant;
pub mod moves;
pub mod poly;
pub mod ribbon;
pub mod states;

pub use diagram::{
    parse_tgd, Arc, Circle, Diagram, DiagramStats, End, Node, NodeKind, ParseError, Violation,
};
pub use invariant::{
    m_poly, q_poly, r_poly, vcr_bound_of, vcr_lower_bound, yamada_specialization, EvalOptions,
    InvariantError, Strategy,
};
pub use moves::{apply_move, find_sites, fuzz, Anchor, FuzzLog, MoveError, MoveKind, MoveSite};
pub use poly::{Mono, Poly, UnitNormalForm};
pub use ribbon::{to_ribbon, CircleSummary, RibbonGraph, SurfaceStats};
pub use states::{enumerate_states, resolve, Spin, State};
