//! Families, jump rates and moves of the q-Whittaker dynamics.
//!
//! A move shifts every particle of an up-family `V+_p` one site to the right.
//! `V+_p` is `p` together with the particles reached by repeatedly stepping to
//! the up-right neighbour while `F = 0`, i.e. the column of particles sitting
//! directly above `p`. `V-_p` follows `C = 0` downwards in the same way.

mod generator;
mod simulate;

pub use generator::Generator;
pub use simulate::{
    simulate, simulate_with, write_event_csv, Event, SimulationOptions, Trajectory,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::lattice::{Configuration, ParticleRef};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// A chain of vertically aligned particles on consecutive rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub direction: Direction,
    /// Root first, then outward along the chain.
    pub members: Vec<ParticleRef>,
}

impl Family {
    pub fn root(&self) -> ParticleRef {
        self.members[0]
    }

    /// The highest member of an up-family, or the lowest of a down-family.
    pub fn extreme(&self) -> ParticleRef {
        *self.members.last().expect("families are never empty")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn follow(
    config: &Configuration,
    p: ParticleRef,
    direction: Direction,
) -> Result<Family> {
    let n = config.torus().n() as usize;
    let mut members = vec![p];
    let mut cur = p;
    loop {
        let fr = config.frame(cur)?;
        let next = match direction {
            Direction::Up if fr.f == 0 => fr.p6,
            Direction::Down if fr.c == 0 => fr.p3,
            _ => break,
        };
        if members.len() == n || next == p {
            return Err(Error::SectorViolation(format!(
                "the {direction:?} chain from {p} closes a vertical loop, so the state is flat"
            )));
        }
        members.push(next);
        cur = next;
    }
    Ok(Family { direction, members })
}

pub fn family_up(config: &Configuration, p: ParticleRef) -> Result<Family> {
    follow(config, p, Direction::Up)
}

pub fn family_down(config: &Configuration, p: ParticleRef) -> Result<Family> {
    follow(config, p, Direction::Down)
}

/// Jump rate of the up-family rooted at `p`:
/// `a_r (1 - q^B)(1 - q^(D+1)) / (1 - q^(C+1))`, which vanishes when `B = 0`.
pub fn rate<S: Scalar>(config: &Configuration, p: ParticleRef, params: &GibbsParams<S>) -> Result<S> {
    let fr = config.frame(p)?;
    Ok(rate_from_gaps(params, p.row, fr.b, fr.c, fr.d))
}

pub(crate) fn rate_from_gaps<S: Scalar>(params: &GibbsParams<S>, row: u32, b: u32, c: u32, d: u32) -> S {
    if b == 0 {
        return S::zero();
    }
    params.activity(row).clone() * params.one_minus_q_pow(b as i64)
        * params.one_minus_q_pow(d as i64 + 1)
        / params.one_minus_q_pow(c as i64 + 1)
}

#[derive(Clone, Debug)]
pub struct Move<S> {
    pub family: Family,
    pub rate: S,
    pub successor: Configuration,
}

/// One move per particle with positive rate, in particle order.
pub fn enabled_moves<S: Scalar>(config: &Configuration, params: &GibbsParams<S>) -> Result<Vec<Move<S>>> {
    let mut moves = Vec::new();
    for p in config.particles() {
        let r = rate(config, p, params)?;
        if r.is_zero() {
            continue;
        }
        let family = family_up(config, p)?;
        let successor = apply_move(config, &family)?;
        moves.push(Move {
            family,
            rate: r,
            successor,
        });
    }
    Ok(moves)
}

/// Total exit rate and the roots with positive rate, without building successors.
pub(crate) fn enabled_rates<S: Scalar>(
    config: &Configuration,
    params: &GibbsParams<S>,
) -> Result<Vec<(ParticleRef, S)>> {
    let mut out = Vec::new();
    for p in config.particles() {
        let r = rate(config, p, params)?;
        if !r.is_zero() {
            out.push((p, r));
        }
    }
    Ok(out)
}

/// Shifts an up-family by one site to the right, top member first.
pub fn apply_move(config: &Configuration, family: &Family) -> Result<Configuration> {
    if family.direction != Direction::Up {
        return Err(Error::ContractViolation(
            "only up-families move to the right".into(),
        ));
    }
    let root = config.frame(family.root())?;
    if root.b == 0 {
        return Err(Error::ContractViolation(format!(
            "root {} has B = 0 and cannot move",
            family.root()
        )));
    }
    let mut next = config.clone();
    let top_down: Vec<ParticleRef> = family.members.iter().rev().copied().collect();
    next.shift_members(&top_down, 1);
    Ok(next)
}

/// A configuration that reaches `config` in one move.
#[derive(Clone, Debug)]
pub struct ReverseMove<S> {
    /// The particle `p` whose down-family `V-_p` is shifted left.
    pub particle: ParticleRef,
    pub family: Family,
    pub predecessor: Configuration,
    /// Rate of the forward move from `predecessor` back to `config`.
    pub rate: S,
}

/// For every particle `p`, the state obtained by shifting `V-_p` one site to
/// the left, when that state is interlaced. The rate is computed from the
/// gaps of the lowest member measured in `config`:
/// `a (1 - q^(B+1))(1 - q^D) / (1 - q^C)`.
pub fn reverse_moves<S: Scalar>(
    config: &Configuration,
    params: &GibbsParams<S>,
) -> Result<Vec<ReverseMove<S>>> {
    let mut out = Vec::new();
    for p in config.particles() {
        if let Some(rm) = reverse_move(config, p, params)? {
            out.push(rm);
        }
    }
    Ok(out)
}

pub fn reverse_move<S: Scalar>(
    config: &Configuration,
    p: ParticleRef,
    params: &GibbsParams<S>,
) -> Result<Option<ReverseMove<S>>> {
    let family = family_down(config, p)?;
    let lowest = family.extreme();
    let fr = config.frame(lowest)?;
    if fr.d == 0 || fr.c == 0 {
        return Ok(None);
    }
    let mut predecessor = config.clone();
    let bottom_up: Vec<ParticleRef> = family.members.iter().rev().copied().collect();
    predecessor.shift_members(&bottom_up, -1);
    if !predecessor.validate() {
        return Ok(None);
    }
    let forward = family_up(&predecessor, lowest)?;
    if forward.members != bottom_up {
        return Err(Error::Consistency(format!(
            "shifting V-_{p} left does not invert the up-move of {lowest}"
        )));
    }
    let rate = params.activity(lowest.row).clone()
        * params.one_minus_q_pow(fr.b as i64 + 1)
        * params.one_minus_q_pow(fr.d as i64)
        / params.one_minus_q_pow(fr.c as i64);
    Ok(Some(ReverseMove {
        particle: p,
        family,
        predecessor,
        rate,
    }))
}
