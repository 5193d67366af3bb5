//! Brute-force oracles and sampling helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use qwhittaker::dynamics::{simulate_with, SimulationOptions};
use qwhittaker::{Configuration, GibbsParams, Sector};

/// All `k`-subsets of `0..l`, each sorted.
pub fn subsets(l: u32, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << l) {
        if mask.count_ones() == k {
            out.push((0..l).filter(|&x| mask >> x & 1 == 1).collect());
        }
    }
    out
}

/// Rows interlace when, merging both rows around the circle with a lower
/// particle placed before an upper one at the same site, the two kinds
/// alternate.
pub fn interlaced(below: &[u32], above: &[u32]) -> bool {
    let mut tokens: Vec<(u32, u8)> = below
        .iter()
        .map(|&x| (x, 0))
        .chain(above.iter().map(|&x| (x, 1)))
        .collect();
    tokens.sort_unstable();
    let n = tokens.len();
    (0..n).all(|i| tokens[i].1 != tokens[(i + 1) % n].1)
}

/// `m2` from the total distance from each particle to the first particle at
/// or to its right on the row above, which sums to `L·m2`.
pub fn sector_by_displacement(l: u32, rows: &[Vec<u32>]) -> u32 {
    let n = rows.len();
    let mut total = 0u32;
    for i in 0..n {
        let above = &rows[(i + 1) % n];
        for &x in &rows[i] {
            total += above.iter().map(|&y| (y + l - x) % l).min().unwrap();
        }
    }
    assert_eq!(total % l, 0, "displacement sum {total} is not a multiple of L = {l}");
    total / l
}

/// Rows of a configuration, each sorted.
pub type Rows = Vec<Vec<u32>>;

/// Every interlaced configuration with its sector index, by filtering the
/// full product of row subsets.
pub fn brute_force(l: u32, n: u32, m1: u32) -> (usize, Vec<(Rows, u32)>) {
    let rows = subsets(l, m1);
    let mut candidates = 0usize;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n as usize];
    loop {
        candidates += 1;
        let chosen: Rows = idx.iter().map(|&i| rows[i].clone()).collect();
        if (0..n as usize).all(|i| interlaced(&chosen[i], &chosen[(i + 1) % n as usize])) {
            let m2 = sector_by_displacement(l, &chosen);
            out.push((chosen, m2));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return (candidates, out);
            }
            idx[k] += 1;
            if idx[k] < rows.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn brute_force_sector(l: u32, n: u32, m1: u32, m2: u32) -> BTreeSet<Rows> {
    brute_force(l, n, m1)
        .1
        .into_iter()
        .filter(|(_, m)| *m == m2)
        .map(|(r, _)| r)
        .collect()
}

/// Admissible sectors small enough to explore by simulation.
pub const SAMPLE_SECTORS: &[(u32, u32, u32, u32)] = &[
    (5, 2, 2, 1),
    (4, 3, 2, 1),
    (7, 3, 2, 1),
    (7, 3, 2, 2),
    (8, 4, 3, 2),
    (9, 3, 3, 1),
    (12, 6, 4, 2),
    (12, 5, 5, 2),
    (10, 6, 3, 3),
];

/// The state reached after `events` jumps from the canonical configuration.
pub fn random_state(sector: (u32, u32, u32, u32), seed: u64, events: u64) -> Configuration {
    let (l, n, m1, m2) = sector;
    let s = Sector::new(l, n, m1, m2).unwrap();
    let start = Configuration::canonical(&s);
    if events == 0 {
        return start;
    }
    let params = GibbsParams::homogeneous(0.5, n).unwrap();
    let opts = SimulationOptions {
        t_max: 1e12,
        max_events: Some(events),
        record_events: false,
        track_occupation: false,
    };
    simulate_with(&start, &params, &opts, seed, |_, _| Ok(()))
        .unwrap()
        .final_state
}
