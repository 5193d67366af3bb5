//! Exhaustive enumeration of interlaced configurations on small tori.
//!
//! Rows are built bottom-up. Given row `i`, row `i + 1` is interlaced with it
//! exactly when each arc `[x_p, x_p1)` of row `i` holds one particle of row
//! `i + 1`, so the admissible next rows are the products of those arcs. The
//! last row must additionally interlace with row 0.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Occupation, Sector, Torus};

/// Default refusal threshold on `C(L, m1)^N`.
pub const DEFAULT_CANDIDATE_CAP: u128 = 10_000_000;

/// Environment variable that overrides the candidate cap.
pub const CAP_ENV_VAR: &str = "QWHITTAKER_MAX_CANDIDATES";

/// The cap from [`CAP_ENV_VAR`], or the default when unset.
pub fn candidate_cap_from_env() -> Result<u128> {
    match std::env::var(CAP_ENV_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("{CAP_ENV_VAR} = `{v}` is not an integer"))
        }),
        Err(_) => Ok(DEFAULT_CANDIDATE_CAP),
    }
}

/// All interlaced configurations of a torus, split by topological index.
///
/// Index 0 collects the flat configurations whose up-right loops do not wind
/// horizontally; they are valid states but form no admissible sector.
#[derive(Clone, Debug)]
pub struct SectorCensus {
    pub torus: Torus,
    pub sectors: BTreeMap<u32, Vec<Configuration>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorCount {
    pub m2: u32,
    pub admissible: bool,
    pub states: usize,
}

impl SectorCensus {
    pub fn total(&self) -> usize {
        self.sectors.values().map(Vec::len).sum()
    }

    pub fn get(&self, m2: u32) -> &[Configuration] {
        self.sectors.get(&m2).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn counts(&self) -> Vec<SectorCount> {
        self.sectors
            .iter()
            .map(|(&m2, states)| SectorCount {
                m2,
                admissible: Sector::from_torus(self.torus, m2).is_ok(),
                states: states.len(),
            })
            .collect()
    }
}

fn check_cap(torus: &Torus, cap: u128) -> Result<()> {
    let bound = torus.candidate_bound();
    if bound > cap {
        return Err(Error::CapExceeded { bound, cap });
    }
    Ok(())
}

pub fn enumerate_all(l: u32, n: u32, m1: u32) -> Result<SectorCensus> {
    enumerate_all_capped(Torus::new(l, n, m1)?, DEFAULT_CANDIDATE_CAP)
}

pub fn enumerate_all_capped(torus: Torus, cap: u128) -> Result<SectorCensus> {
    check_cap(&torus, cap)?;
    let mut found = BTreeSet::new();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(torus.n() as usize);
    for first in subsets(torus.l(), torus.m1()) {
        rows.push(first);
        extend(&torus, &mut rows, &mut found);
        rows.pop();
    }
    let mut sectors: BTreeMap<u32, Vec<Configuration>> = BTreeMap::new();
    for occupation in found {
        let config = Configuration::from_occupation(torus, &occupation)?;
        debug_assert!(config.validate());
        let m2 = config.sector_index()?;
        sectors.entry(m2).or_default().push(config);
    }
    Ok(SectorCensus { torus, sectors })
}

/// States of one sector, ordered by occupation encoding.
pub fn enumerate_sector(sector: &Sector) -> Result<Vec<Configuration>> {
    enumerate_sector_capped(sector, DEFAULT_CANDIDATE_CAP)
}

pub fn enumerate_sector_capped(sector: &Sector, cap: u128) -> Result<Vec<Configuration>> {
    let mut census = enumerate_all_capped(sector.torus(), cap)?;
    Ok(census.sectors.remove(&sector.m2()).unwrap_or_default())
}

fn extend(torus: &Torus, rows: &mut Vec<Vec<u32>>, found: &mut BTreeSet<Occupation>) {
    if rows.len() == torus.n() as usize {
        if interlaces(torus, &rows[rows.len() - 1], &rows[0]) {
            let config = Configuration::from_rows(torus.l(), torus.n(), rows.clone())
                .expect("rows are structurally valid");
            found.insert(config.occupation().clone());
        }
        return;
    }
    let below = rows[rows.len() - 1].clone();
    let arcs: Vec<(u32, u32)> = (0..below.len())
        .map(|j| (below[j], torus.forward(below[j], below[(j + 1) % below.len()])))
        .collect();
    let mut choice = vec![0u32; arcs.len()];
    loop {
        let mut row: Vec<u32> = arcs
            .iter()
            .zip(&choice)
            .map(|(&(start, _), &o)| (start + o) % torus.l())
            .collect();
        row.sort_unstable();
        rows.push(row);
        extend(torus, rows, found);
        rows.pop();
        // odometer over offsets in [0, arc length)
        let mut k = 0;
        loop {
            if k == choice.len() {
                return;
            }
            choice[k] += 1;
            if choice[k] < arcs[k].1 {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Whether `above` holds exactly one particle in each arc `[x_p, x_p1)` of `below`.
pub(crate) fn interlaces(torus: &Torus, below: &[u32], above: &[u32]) -> bool {
    (0..below.len()).all(|j| {
        let start = below[j];
        let span = torus.forward(start, below[(j + 1) % below.len()]);
        above
            .iter()
            .filter(|&&y| torus.forward(start, y) < span)
            .count()
            == 1
    })
}

/// All `k`-subsets of `0..n` in increasing lexicographic order.
pub(crate) fn subsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k as usize {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(4, 2)[0], vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let t = Torus::new(12, 6, 6).unwrap();
        assert!(matches!(
            enumerate_all_capped(t, DEFAULT_CANDIDATE_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn inadmissible_sector_request_is_an_error() {
        // 2/4 + 2/3 >= 1
        assert!(Sector::new(4, 3, 2, 2).is_err());
    }

    #[test]
    fn every_enumerated_state_validates() {
        let census = enumerate_all(5, 2, 2).unwrap();
        for (&m2, states) in &census.sectors {
            for s in states {
                assert!(s.validate());
                assert_eq!(s.sector_index().unwrap(), m2);
            }
        }
        assert!(!census.get(1).is_empty());
    }

    #[test]
    fn sector_order_is_by_occupation() {
        let states = enumerate_sector(&Sector::new(4, 3, 2, 1).unwrap()).unwrap();
        assert!(states.windows(2).all(|w| w[0].occupation() < w[1].occupation()));
    }
}
