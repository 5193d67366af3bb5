use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::dynamics::{apply_move, family_up, Generator};
use crate::enumeration::{enumerate_sector_capped, DEFAULT_CANDIDATE_CAP};
use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::lattice::{relative_height, to_dimers, Configuration, Face, ParticleRef, Sector, Step};
use crate::scalar::Scalar;

/// Whether the positive-rate transition graph of the sector is strongly connected.
pub fn check_ergodicity<S: Scalar>(sector: &Sector, params: &GibbsParams<S>) -> Result<bool> {
    let states = enumerate_sector_capped(sector, DEFAULT_CANDIDATE_CAP)?;
    if states.is_empty() {
        return Err(Error::EmptyStates);
    }
    let g = Generator::build(&states, params)?;
    Ok(strongly_connected(&g.successors()))
}

/// Forward and backward reachability from node 0 both cover the graph.
pub fn strongly_connected(adjacency: &[Vec<usize>]) -> bool {
    let n = adjacency.len();
    if n <= 1 {
        return true;
    }
    let mut reverse = vec![Vec::new(); n];
    for (i, out) in adjacency.iter().enumerate() {
        for &j in out {
            reverse[j].push(i);
        }
    }
    let reach_all = |adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == n
    };
    reach_all(adjacency) && reach_all(&reverse)
}

/// One particle stepping from `from` to `from + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryMove {
    pub particle: ParticleRef,
    pub from: u32,
}

/// Which positive-height face starts each descent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConnectStart {
    #[default]
    FirstPositive,
    LastPositive,
}

pub fn connect(eta: &Configuration, target: &Configuration) -> Result<Vec<ElementaryMove>> {
    connect_from(eta, target, ConnectStart::FirstPositive)
}

/// Single-particle moves turning `eta` into `target`.
///
/// From a face of positive relative height, walk across edges that are empty
/// in the current state and have their white vertex on the left; the height
/// never decreases along the walk. Where the walk gets stuck all three such
/// edges are covered, so the particle on the face's left side can step right,
/// lowering the height there by one. Repeat until the height is flat.
pub fn connect_from(
    eta: &Configuration,
    target: &Configuration,
    start: ConnectStart,
) -> Result<Vec<ElementaryMove>> {
    if eta.torus() != target.torus() || eta.sector_index()? != target.sector_index()? {
        return Err(Error::MismatchedSectors);
    }
    let torus = eta.torus();
    let mut height = relative_height(eta, target)?;
    let mut current = eta.clone();
    let mut moves = Vec::new();
    let left_exits: Vec<Step> = Step::ALL
        .into_iter()
        .filter(|&s| Face::new(0, 0).crossing(&torus, s).1 < 0)
        .collect();

    loop {
        let first = {
            let mut positive = height.faces().filter(|&(_, h)| h > 0).map(|(f, _)| f);
            match start {
                ConnectStart::FirstPositive => positive.next(),
                ConnectStart::LastPositive => positive.last(),
            }
        };
        let Some(mut face) = first else { break };
        let cover = to_dimers(&current)?;
        let mut visited = HashSet::from([face]);
        while let Some(step) = left_exits.iter().copied().find(|&s| {
            let ((wx, wr, kind), _) = face.crossing(&torus, s);
            !cover.covers(wx, wr, kind)
        }) {
            face = face.step(&torus, step);
            if !visited.insert(face) {
                return Err(Error::Consistency(format!(
                    "descent path revisits face ({}, {})",
                    face.x, face.row
                )));
            }
        }
        let particle = current.particle_at(face.x, face.row).ok_or_else(|| {
            Error::Consistency(format!("stuck at face ({}, {}) with no particle", face.x, face.row))
        })?;
        let family = family_up(&current, particle)?;
        if family.len() != 1 {
            return Err(Error::Consistency(format!(
                "rotation at face ({}, {}) would move {} particles",
                face.x,
                face.row,
                family.len()
            )));
        }
        current = apply_move(&current, &family)?;
        moves.push(ElementaryMove {
            particle,
            from: face.x,
        });
        height.add(face, -1);
        if height.get(face) < 0 {
            return Err(Error::Consistency("relative height became negative".into()));
        }
    }
    if current != *target {
        return Err(Error::Consistency(
            "flat relative height but the states differ".into(),
        ));
    }
    Ok(moves)
}

/// Applies `moves` to `eta`, returning every intermediate state including
/// both ends. Each move must be a single-particle family with `B >= 1`.
pub fn replay(eta: &Configuration, moves: &[ElementaryMove]) -> Result<Vec<Configuration>> {
    let mut path = vec![eta.clone()];
    let mut current = eta.clone();
    for m in moves {
        if current.position(m.particle)? != m.from {
            return Err(Error::ContractViolation(format!(
                "particle {} is not at {}",
                m.particle, m.from
            )));
        }
        let family = family_up(&current, m.particle)?;
        if family.len() != 1 {
            return Err(Error::ContractViolation(format!(
                "particle {} does not move alone",
                m.particle
            )));
        }
        current = apply_move(&current, &family)?;
        if !current.validate() {
            return Err(Error::InvalidConfiguration);
        }
        path.push(current.clone());
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_sector;
    use crate::scalar::ratio;

    #[test]
    fn identity_needs_no_moves() {
        let c = Configuration::canonical(&Sector::new(5, 2, 2, 1).unwrap());
        assert!(connect(&c, &c).unwrap().is_empty());
    }

    #[test]
    fn all_pairs_connect_on_the_smallest_sector() {
        let states = enumerate_sector(&Sector::new(5, 2, 2, 1).unwrap()).unwrap();
        for a in &states {
            for b in &states {
                let moves = connect(a, b).unwrap();
                let path = replay(a, &moves).unwrap();
                assert_eq!(path.last().unwrap(), b);
                let total = relative_height(a, b).unwrap().total();
                assert_eq!(moves.len() as i64, total);
                let other = connect_from(a, b, ConnectStart::LastPositive).unwrap();
                assert_eq!(other.len(), moves.len());
            }
        }
    }

    #[test]
    fn ergodic_at_positive_and_zero_q() {
        let sector = Sector::new(4, 3, 2, 1).unwrap();
        assert!(check_ergodicity(&sector, &GibbsParams::homogeneous(ratio(1, 2), 3).unwrap()).unwrap());
        assert!(check_ergodicity(&sector, &GibbsParams::homogeneous(ratio(0, 1), 3).unwrap()).unwrap());
    }

    #[test]
    fn graph_connectivity_helper() {
        assert!(strongly_connected(&[vec![]]));
        assert!(strongly_connected(&[vec![1], vec![0]]));
        assert!(!strongly_connected(&[vec![1], vec![]]));
    }

    #[test]
    fn different_sectors_do_not_connect() {
        let a = Configuration::canonical(&Sector::new(7, 3, 2, 1).unwrap());
        let b = Configuration::canonical(&Sector::new(7, 3, 2, 2).unwrap());
        assert!(matches!(connect(&a, &b), Err(Error::MismatchedSectors)));
    }
}
