mod common;

use std::collections::BTreeSet;

use qwhittaker::enumeration::{enumerate_all, enumerate_sector};
use qwhittaker::{Configuration, Sector};

use common::{brute_force, brute_force_sector, interlaced, sector_by_displacement};

#[test]
fn interlacing_oracle_on_hand_cases() {
    assert!(interlaced(&[0, 2], &[1, 3]));
    assert!(interlaced(&[1, 3], &[0, 2]));
    assert!(interlaced(&[0, 1], &[0, 1]));
    assert!(!interlaced(&[0, 1], &[2, 3]));
    assert_eq!(sector_by_displacement(5, &[vec![0, 2], vec![1, 3]]), 1);
    assert_eq!(sector_by_displacement(5, &[vec![0, 1], vec![0, 1]]), 0);
}

#[test]
fn test_sectors_match_the_exhaustive_filter() {
    for (l, n, m1, m2, candidates) in [(5, 2, 2, 1, 100), (4, 3, 2, 1, 216)] {
        let (seen, _) = brute_force(l, n, m1);
        assert_eq!(seen, candidates);
        let expected = brute_force_sector(l, n, m1, m2);
        let got: BTreeSet<Vec<Vec<u32>>> = enumerate_sector(&Sector::new(l, n, m1, m2).unwrap())
            .unwrap()
            .iter()
            .map(Configuration::sorted_rows)
            .collect();
        assert_eq!(got, expected, "L={l} N={n} m1={m1} m2={m2}");
    }
}

#[test]
fn full_census_matches_on_several_tori() {
    for (l, n, m1) in [(5, 2, 2), (4, 3, 2), (6, 2, 3), (7, 3, 2), (5, 4, 2), (6, 3, 2)] {
        let census = enumerate_all(l, n, m1).unwrap();
        let (_, all) = brute_force(l, n, m1);
        assert_eq!(census.total(), all.len(), "L={l} N={n} m1={m1}");
        for (&m2, states) in &census.sectors {
            let got: BTreeSet<_> = states.iter().map(Configuration::sorted_rows).collect();
            let want: BTreeSet<_> = all
                .iter()
                .filter(|(_, m)| *m == m2)
                .map(|(r, _)| r.clone())
                .collect();
            assert_eq!(got, want, "L={l} N={n} m1={m1} m2={m2}");
            assert_eq!(got.len(), states.len(), "duplicates in L={l} N={n} m1={m1} m2={m2}");
        }
    }
}

#[test]
fn every_enumerated_state_reports_its_own_sector() {
    for (l, n, m1, m2) in [(7, 3, 2, 1), (7, 3, 2, 2), (6, 3, 2, 1)] {
        for s in enumerate_sector(&Sector::new(l, n, m1, m2).unwrap()).unwrap() {
            assert!(s.validate());
            assert_eq!(s.sector_index().unwrap(), m2);
            assert_eq!(sector_by_displacement(l, &s.sorted_rows()), m2);
        }
    }
}
