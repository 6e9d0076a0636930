//! The M, Q and R polynomials, the Yamada specialization and the
//! virtual-crossing-number bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::Diagram;
use crate::poly::{Mono, Poly};
use crate::ribbon::{to_ribbon, CircleSummary, RibbonError, RibbonGraph, SurfaceStats};
use crate::states::{enumerate_states, resolve, State};

pub mod oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Sum over every spanning subgraph.
    #[default]
    Brute,
    /// Recurse on non-loop edges, summing subgraphs only at loop bouquets.
    ContractDelete,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Brute => "brute",
            Strategy::ContractDelete => "contract-delete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub strategy: Strategy,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error("surface statistics {0:?} give a negative z exponent")]
    NegativeZ(SurfaceStats),
    #[error("ribbon graph has {0} edges, too many to enumerate")]
    TooLarge(usize),
}

/// `(-1)^k y^n z^(k-b+n) w^t`.
pub fn m_poly(s: &SurfaceStats) -> Result<Poly, InvariantError> {
    let z = s.z_exp();
    if z < 0 {
        return Err(InvariantError::NegativeZ(*s));
    }
    let c = if s.k.is_multiple_of(2) { 1 } else { -1 };
    Ok(Poly::term(c, Mono::new(0, s.n as u32, z as u32, s.t)))
}

/// Signed monomial tallies keyed by `(y, z, w)` exponents.
#[derive(Default)]
struct Tally(HashMap<(u32, u32, u8), i64>);

impl Tally {
    fn add(&mut self, s: &SurfaceStats) -> Result<(), InvariantError> {
        let z = s.z_exp();
        if z < 0 {
            return Err(InvariantError::NegativeZ(*s));
        }
        let sign = if s.k.is_multiple_of(2) { 1 } else { -1 };
        *self.0.entry((s.n as u32, z as u32, s.t)).or_default() += sign;
        Ok(())
    }

    fn into_poly(self) -> Poly {
        let mut p = Poly::zero();
        for ((y, z, w), c) in self.0 {
            p.add_term(Mono::new(0, y, z, w), BigInt::from(c));
        }
        p
    }
}

fn brute_tally(g: &RibbonGraph, tally: &mut Tally) -> Result<(), InvariantError> {
    let ne = g.num_edges();
    if ne >= 40 {
        return Err(InvariantError::TooLarge(ne));
    }
    for mask in 0..1u64 << ne {
        tally.add(&g.stats_of_mask(mask))?;
    }
    Ok(())
}

fn contract_delete_tally(g: &RibbonGraph, tally: &mut Tally) -> Result<(), InvariantError> {
    match (0..g.num_edges()).find(|&e| !g.is_loop(e)) {
        None => brute_tally(g, tally),
        Some(e) => {
            contract_delete_tally(&g.contract(e)?, tally)?;
            contract_delete_tally(&g.delete(e)?, tally)
        }
    }
}

/// `Σ M` over all spanning subgraphs, without the circle prefactor.
pub fn subgraph_sum(g: &RibbonGraph, strategy: Strategy) -> Result<Poly, InvariantError> {
    let mut tally = Tally::default();
    match strategy {
        Strategy::Brute => brute_tally(g, &mut tally)?,
        Strategy::ContractDelete => contract_delete_tally(g, &mut tally)?,
    }
    Ok(tally.into_poly())
}

/// `(-1 - y)^e (-1 - yzw)^o`.
pub fn circle_factor(c: &CircleSummary) -> Poly {
    let even = Poly::constant(-1) - Poly::y();
    let odd = Poly::constant(-1) - Poly::y() * Poly::z() * Poly::w();
    &even.pow(c.e as u32) * &odd.pow(c.o as u32)
}

/// Q of a pure diagram, as a polynomial in `y`, `z`, `w`.
pub fn q_poly(p: &Diagram, opts: &EvalOptions) -> Result<Poly, InvariantError> {
    let (g, circles) = to_ribbon(p)?;
    Ok(&circle_factor(&circles) * &subgraph_sum(&g, opts.strategy)?)
}

fn state_term(d: &Diagram, s: &State, opts: &EvalOptions) -> Result<Poly, InvariantError> {
    let pure = resolve(d, s).expect("state built from the diagram");
    Ok(q_poly(&pure, opts)?.shift_a(s.weight_exp()))
}

/// The state sum with `y` still formal: `Σ a^(p-q) Q(S)`.
pub fn r_poly_in_y(d: &Diagram, opts: &EvalOptions) -> Result<Poly, InvariantError> {
    let states: Vec<State> = enumerate_states(d).collect();
    let terms: Vec<Poly> = if opts.parallel {
        states
            .par_iter()
            .map(|s| state_term(d, s, opts))
            .collect::<Result<_, _>>()?
    } else {
        states
            .iter()
            .map(|s| state_term(d, s, opts))
            .collect::<Result<_, _>>()?
    };
    let mut sum = Poly::zero();
    for t in &terms {
        sum += t;
    }
    Ok(sum)
}

/// R(a, z, w).
pub fn r_poly(d: &Diagram, opts: &EvalOptions) -> Result<Poly, InvariantError> {
    Ok(r_poly_in_y(d, opts)?.subst_y())
}

/// R with `z = w = 1`.
pub fn yamada_specialization(d: &Diagram, opts: &EvalOptions) -> Result<Poly, InvariantError> {
    Ok(r_poly(d, opts)?.at_z1_w1())
}

/// `ceil(z-degree / 2)` of an already computed R, and 0 when R vanishes.
pub fn vcr_bound_of(r: &Poly) -> u32 {
    r.z_degree().map_or(0, |z| z.div_ceil(2))
}

pub fn vcr_lower_bound(d: &Diagram, opts: &EvalOptions) -> Result<u32, InvariantError> {
    Ok(vcr_bound_of(&r_poly(d, opts)?))
}
