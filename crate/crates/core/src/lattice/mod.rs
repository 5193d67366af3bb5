//! Interlaced particle configurations on the `L × N` discrete torus.
//!
//! Row `i + 1` is the row *above* row `i`; rows and horizontal positions both
//! wrap. Each row holds `m1` particles. A particle is addressed by a
//! [`ParticleRef`] `(row, label)`, where labels are assigned once, in
//! increasing position order, when a configuration is built. Moves change
//! positions but never labels, so label `j + 1` is always the right
//! neighbour of label `j` on the same row.
//!
//! Every window test is done with forward distances on the circle
//! (`(to - from) mod L`), which anchors the comparison at the particle under
//! consideration and avoids ordering bugs across the seam at `x = 0`.

mod dimer;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::integer::gcd;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dimer::{
    relative_height, to_dimers, DimerCover, DimerKind, Face, FacePath, HeightMap, Step,
};

/// Torus dimensions and the number of particles per row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Torus {
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "N")]
    n: u32,
    m1: u32,
}

impl Torus {
    /// Rows are stored as one `u64` bitmask each.
    pub const MAX_WIDTH: u32 = 64;

    pub fn new(l: u32, n: u32, m1: u32) -> Result<Self> {
        if l > Self::MAX_WIDTH {
            return Err(Error::InvalidParameter(format!(
                "L = {l} exceeds the supported width {}",
                Self::MAX_WIDTH
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        if m1 <= 1 {
            return Err(Error::SectorBounds(format!(
                "m1 = {m1}: at least two particles per row are required (m1 > 1)"
            )));
        }
        if m1 >= l {
            return Err(Error::SectorBounds(format!(
                "m1 = {m1}: the row must not be full (m1 < L = {l})"
            )));
        }
        Ok(Torus { l, n, m1 })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    /// Total number of particles, `n1 = N·m1`.
    pub fn n1(&self) -> u32 {
        self.n * self.m1
    }

    /// `C(L, m1)^N`, the number of row-subset tuples, saturating at `u128::MAX`.
    pub fn candidate_bound(&self) -> u128 {
        let per_row = binomial(self.l as u128, self.m1 as u128);
        let mut bound: u128 = 1;
        for _ in 0..self.n {
            bound = bound.saturating_mul(per_row);
        }
        bound
    }

    /// Forward distance from `from` to `to` on the circle, in `[0, L)`.
    #[inline]
    pub fn forward(&self, from: u32, to: u32) -> u32 {
        (to + self.l - from) % self.l
    }

    #[inline]
    pub fn wrap_x(&self, x: i64) -> u32 {
        x.rem_euclid(self.l as i64) as u32
    }

    #[inline]
    pub fn row_above(&self, row: u32) -> u32 {
        (row + 1) % self.n
    }

    #[inline]
    pub fn row_below(&self, row: u32) -> u32 {
        (row + self.n - 1) % self.n
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Winding numbers of the loop of up-right neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Winding {
    pub nh: u32,
    pub nv: u32,
}

/// A topological sector `Ω(L, N; m1, m2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Sector {
    #[serde(flatten)]
    torus: Torus,
    m2: u32,
}

impl Sector {
    pub fn new(l: u32, n: u32, m1: u32, m2: u32) -> Result<Self> {
        Self::from_torus(Torus::new(l, n, m1)?, m2)
    }

    pub fn from_torus(torus: Torus, m2: u32) -> Result<Self> {
        let Torus { l, n, m1 } = torus;
        if m2 == 0 || m2 >= n {
            return Err(Error::SectorBounds(format!(
                "m2 = {m2}: the sector index must satisfy 1 <= m2 < N = {n}"
            )));
        }
        // m1/L + m2/N < 1  <=>  m1·N + m2·L < L·N
        let lhs = m1 as u64 * n as u64 + m2 as u64 * l as u64;
        let rhs = l as u64 * n as u64;
        if lhs >= rhs {
            let g = gcd(lhs, rhs);
            let sum = if rhs / g == 1 {
                format!("{}", lhs / g)
            } else {
                format!("{}/{}", lhs / g, rhs / g)
            };
            return Err(Error::SectorBounds(format!(
                "m1/L + m2/N = {m1}/{l} + {m2}/{n} = {sum}, but it must be < 1"
            )));
        }
        Ok(Sector { torus, m2 })
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn l(&self) -> u32 {
        self.torus.l
    }

    pub fn n(&self) -> u32 {
        self.torus.n
    }

    pub fn m1(&self) -> u32 {
        self.torus.m1
    }

    pub fn m2(&self) -> u32 {
        self.m2
    }

    /// Number of vertical dimers (particles).
    pub fn n1(&self) -> u32 {
        self.torus.n1()
    }

    /// Number of north-west dimers, `L·m2`.
    pub fn n2(&self) -> u32 {
        self.torus.l * self.m2
    }

    /// Winding numbers of the up-right loop; coprime, with `m2·nv = m1·nh`.
    pub fn winding(&self) -> Winding {
        let g = gcd(self.torus.m1, self.m2);
        Winding {
            nh: self.m2 / g,
            nv: self.torus.m1 / g,
        }
    }
}

/// A particle, addressed by its row and its (permanent) label within the row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParticleRef {
    pub row: u32,
    pub label: u32,
}

impl ParticleRef {
    pub fn new(row: u32, label: u32) -> Self {
        ParticleRef { row, label }
    }
}

impl fmt::Display for ParticleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.row, self.label)
    }
}

/// The six neighbours of a particle and the gaps to them.
///
/// Neighbours run clockwise from the right: `p1` right, `p2` down-right,
/// `p3` down-left, `p4` left, `p5` up-left, `p6` up-right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborFrame {
    pub p1: ParticleRef,
    pub p2: ParticleRef,
    pub p3: ParticleRef,
    pub p4: ParticleRef,
    pub p5: ParticleRef,
    pub p6: ParticleRef,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub f: u32,
}

/// Canonical occupation encoding: one `L`-bit word per row, row 0 first.
///
/// Ordering is lexicographic in the word vector, which fixes the state order
/// of every enumeration, generator and CSV in the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<u64>);

impl Occupation {
    pub fn words(&self) -> &[u64] {
        &self.0
    }

    pub fn row(&self, row: u32) -> u64 {
        self.0[row as usize]
    }

    pub fn is_set(&self, x: u32, row: u32) -> bool {
        self.0[row as usize] >> x & 1 == 1
    }

    /// Rows as zero-padded hex words joined by `:`.
    pub fn to_hex(&self, torus: &Torus) -> String {
        let width = torus.l.div_ceil(4) as usize;
        self.0
            .iter()
            .map(|w| format!("{w:0width$x}"))
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        text.split(':')
            .map(|w| {
                u64::from_str_radix(w, 16)
                    .map_err(|_| Error::Structural(format!("bad occupation word `{w}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Occupation)
    }

    /// Number of differing bits.
    pub fn hamming(&self, other: &Occupation) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

/// Serialized form: `{"L": 5, "N": 2, "rows": [[0, 2], [1, 3]]}`, positions sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationJson {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub rows: Vec<Vec<u32>>,
}

/// An interlaced particle configuration with labelled particles.
///
/// Equality, hashing and ordering go through the occupation function only, so
/// two configurations that differ by a cyclic relabelling compare equal.
#[derive(Clone, Debug)]
pub struct Configuration {
    torus: Torus,
    /// `rows[i][j]` is the position of label `j` on row `i`.
    rows: Vec<Vec<u32>>,
    occupation: Occupation,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.torus == other.torus && self.occupation == other.occupation
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.torus.hash(state);
        self.occupation.hash(state);
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.torus, &self.occupation).cmp(&(other.torus, &other.occupation))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.occupation.to_hex(&self.torus))
    }
}

impl Configuration {
    /// Builds a configuration from per-row positions. Rows are sorted and
    /// labelled in increasing order. Only structure is checked here; call
    /// [`validate`](Self::validate) for the interlacing constraints.
    pub fn from_rows(l: u32, n: u32, rows: Vec<Vec<u32>>) -> Result<Self> {
        if rows.len() != n as usize {
            return Err(Error::Structural(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        let m1 = rows[0].len() as u32;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() as u32 != m1) {
            return Err(Error::Structural(format!(
                "row {i} has {} particles, row 0 has {m1}",
                r.len()
            )));
        }
        let torus = Torus::new(l, n, m1)?;
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            if let Some(&x) = row.iter().find(|&&x| x >= l) {
                return Err(Error::Structural(format!(
                    "position {x} on row {i} is outside [0, {l})"
                )));
            }
            row.sort_unstable();
        }
        Ok(Self::from_parts(torus, rows))
    }

    pub fn from_occupation(torus: Torus, occupation: &Occupation) -> Result<Self> {
        if occupation.0.len() != torus.n as usize {
            return Err(Error::Structural(format!(
                "expected {} occupation words, found {}",
                torus.n,
                occupation.0.len()
            )));
        }
        let mut rows = Vec::with_capacity(torus.n as usize);
        for (i, &word) in occupation.0.iter().enumerate() {
            if torus.l < 64 && word >> torus.l != 0 {
                return Err(Error::Structural(format!("row {i} has bits beyond L")));
            }
            if word.count_ones() != torus.m1 {
                return Err(Error::Structural(format!(
                    "row {i} holds {} particles, expected {}",
                    word.count_ones(),
                    torus.m1
                )));
            }
            rows.push((0..torus.l).filter(|&x| word >> x & 1 == 1).collect());
        }
        Ok(Self::from_parts(torus, rows))
    }

    fn from_parts(torus: Torus, rows: Vec<Vec<u32>>) -> Self {
        let occupation = Occupation(
            rows.iter()
                .map(|r| r.iter().fold(0u64, |w, &x| w | 1u64 << x))
                .collect(),
        );
        Configuration {
            torus,
            rows,
            occupation,
        }
    }

    /// A deterministic member of `sector`.
    ///
    /// Row `i` holds the Beatty-type positions `⌈(j·L + s_i)/m1⌉ mod L`, where
    /// the row offsets `s_i = ⌊i·m2·L/N⌋` advance by at most `L - m1` per row.
    /// That bound keeps consecutive rows interlaced, and `s_N = m2·L`
    /// reproduces row 0 relabelled by `m2`, which closes the torus in sector `m2`.
    pub fn canonical(sector: &Sector) -> Self {
        let torus = sector.torus;
        let (l, n, m1) = (torus.l as i64, torus.n as i64, torus.m1 as i64);
        let m2 = sector.m2 as i64;
        let rows = (0..n)
            .map(|i| {
                let shift = (i * m2 * l).div_euclid(n);
                let mut row: Vec<u32> = (0..m1)
                    .map(|j| torus.wrap_x(div_ceil_i64(j * l + shift, m1)))
                    .collect();
                row.sort_unstable();
                row
            })
            .collect();
        Self::from_parts(torus, rows)
    }

    pub fn from_json(json: &ConfigurationJson) -> Result<Self> {
        Self::from_rows(json.l, json.n, json.rows.clone())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: ConfigurationJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> ConfigurationJson {
        ConfigurationJson {
            l: self.torus.l,
            n: self.torus.n,
            rows: self.sorted_rows(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("configuration serializes")
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn occupation(&self) -> &Occupation {
        &self.occupation
    }

    /// Positions indexed by label, per row.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn sorted_rows(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.sort_unstable();
                r
            })
            .collect()
    }

    pub fn particles(&self) -> impl Iterator<Item = ParticleRef> + '_ {
        (0..self.torus.n).flat_map(move |row| (0..self.torus.m1).map(move |label| ParticleRef { row, label }))
    }

    pub fn contains(&self, p: ParticleRef) -> bool {
        p.row < self.torus.n && p.label < self.torus.m1
    }

    pub fn position(&self, p: ParticleRef) -> Result<u32> {
        if !self.contains(p) {
            return Err(Error::InvalidParticle {
                row: p.row,
                label: p.label,
            });
        }
        Ok(self.rows[p.row as usize][p.label as usize])
    }

    #[inline]
    pub(crate) fn x(&self, p: ParticleRef) -> u32 {
        self.rows[p.row as usize][p.label as usize]
    }

    pub fn is_occupied(&self, x: u32, row: u32) -> bool {
        self.occupation.is_set(x, row)
    }

    /// The particle sitting at `(x, row)`, if any.
    pub fn particle_at(&self, x: u32, row: u32) -> Option<ParticleRef> {
        self.rows[row as usize]
            .iter()
            .position(|&y| y == x)
            .map(|label| ParticleRef {
                row,
                label: label as u32,
            })
    }

    #[inline]
    fn right_of(&self, p: ParticleRef) -> ParticleRef {
        ParticleRef {
            row: p.row,
            label: (p.label + 1) % self.torus.m1,
        }
    }

    #[inline]
    fn left_of(&self, p: ParticleRef) -> ParticleRef {
        ParticleRef {
            row: p.row,
            label: (p.label + self.torus.m1 - 1) % self.torus.m1,
        }
    }

    /// Checks that rows hold `m1` distinct, cyclically ordered particles and
    /// that every particle sees exactly one particle of the row below in
    /// `(x_p, x_p1]` and exactly one in `(x_p4, x_p]`.
    pub fn validate(&self) -> bool {
        let t = &self.torus;
        for (i, row) in self.rows.iter().enumerate() {
            if self.occupation.0[i].count_ones() != t.m1 {
                return false;
            }
            let turn: u32 = (0..row.len())
                .map(|j| t.forward(row[j], row[(j + 1) % row.len()]))
                .sum();
            if turn != t.l {
                return false;
            }
        }
        self.particles().all(|p| {
            let x = self.x(p);
            let x1 = self.x(self.right_of(p));
            let x4 = self.x(self.left_of(p));
            let below = &self.rows[t.row_below(p.row) as usize];
            let a_span = t.forward(x, x1);
            let d_span = t.forward(x4, x);
            let right = below
                .iter()
                .filter(|&&y| (1..=a_span).contains(&t.forward(x, y)))
                .count();
            let left = below
                .iter()
                .filter(|&&y| t.forward(y, x) < d_span)
                .count();
            right == 1 && left == 1
        })
    }

    /// The unique particle on `row` whose position `y` satisfies
    /// `lo <= dist(y) <= hi`.
    fn unique_in_window(
        &self,
        row: u32,
        lo: u32,
        hi: u32,
        dist: impl Fn(u32) -> u32,
    ) -> Result<(ParticleRef, u32)> {
        let mut found = None;
        for (label, &y) in self.rows[row as usize].iter().enumerate() {
            let d = dist(y);
            if (lo..=hi).contains(&d) {
                if found.is_some() {
                    return Err(Error::InvalidConfiguration);
                }
                found = Some((
                    ParticleRef {
                        row,
                        label: label as u32,
                    },
                    d,
                ));
            }
        }
        found.ok_or(Error::InvalidConfiguration)
    }

    /// Neighbours `p1..p6` and gaps `A..F` of particle `p`.
    pub fn frame(&self, p: ParticleRef) -> Result<NeighborFrame> {
        let x = self.position(p)?;
        let t = self.torus;
        let p1 = self.right_of(p);
        let p4 = self.left_of(p);
        let a_span = t.forward(x, self.x(p1));
        let d_span = t.forward(self.x(p4), x);
        if a_span == 0 || d_span == 0 {
            return Err(Error::InvalidConfiguration);
        }
        let below = t.row_below(p.row);
        let above = t.row_above(p.row);
        let (p2, b1) = self.unique_in_window(below, 1, a_span, |y| t.forward(x, y))?;
        let (p3, c) = self.unique_in_window(below, 0, d_span - 1, |y| t.forward(y, x))?;
        let (p5, e1) = self.unique_in_window(above, 1, d_span, |y| t.forward(y, x))?;
        let (p6, f) = self.unique_in_window(above, 0, a_span - 1, |y| t.forward(x, y))?;
        Ok(NeighborFrame {
            p1,
            p2,
            p3,
            p4,
            p5,
            p6,
            a: a_span - 1,
            b: b1 - 1,
            c,
            d: d_span - 1,
            e: e1 - 1,
            f,
        })
    }

    /// Winding numbers of the loop that starts at `start` and repeatedly steps
    /// to the up-right neighbour until it returns.
    pub fn winding_from(&self, start: ParticleRef) -> Result<Winding> {
        let t = self.torus;
        let mut cur = start;
        let mut steps: u64 = 0;
        let mut horizontal: u64 = 0;
        loop {
            let fr = self.frame(cur)?;
            steps += 1;
            horizontal += fr.f as u64;
            cur = fr.p6;
            if cur == start {
                break;
            }
            if steps > t.n1() as u64 {
                return Err(Error::Consistency(
                    "up-right neighbour walk did not close".into(),
                ));
            }
        }
        if !steps.is_multiple_of(t.n as u64) || !horizontal.is_multiple_of(t.l as u64) {
            return Err(Error::Consistency(format!(
                "closed up-right loop with displacement ({horizontal}, {steps}) is not a torus cycle"
            )));
        }
        Ok(Winding {
            nh: (horizontal / t.l as u64) as u32,
            nv: (steps / t.n as u64) as u32,
        })
    }

    pub fn winding(&self) -> Result<Winding> {
        if !self.validate() {
            return Err(Error::InvalidConfiguration);
        }
        self.winding_from(ParticleRef { row: 0, label: 0 })
    }

    /// The topological index `m2 = m1·Nh/Nv`. Zero for the flat
    /// configurations whose up-right loops do not wind horizontally.
    pub fn sector_index(&self) -> Result<u32> {
        let w = self.winding()?;
        let num = self.torus.m1 as u64 * w.nh as u64;
        if !num.is_multiple_of(w.nv as u64) {
            return Err(Error::Consistency(format!(
                "m1·Nh = {num} is not divisible by Nv = {}",
                w.nv
            )));
        }
        Ok((num / w.nv as u64) as u32)
    }

    pub fn sector_of(&self) -> Result<Sector> {
        let m2 = self.sector_index()?;
        Sector::from_torus(self.torus, m2).map_err(|e| {
            Error::SectorViolation(format!("configuration has m2 = {m2}: {e}"))
        })
    }

    /// Positions `x'` at which `p` may sit with every other particle fixed.
    pub fn allowed_positions(&self, p: ParticleRef) -> Result<Vec<u32>> {
        let fr = self.frame(p)?;
        let x = self.x(p) as i64;
        // Offsets relative to x_p: x_p3 and x_p5 + 1 bound from the left,
        // x_p2 - 1 and x_p6 from the right.
        let lo = -(fr.c as i64).min(fr.e as i64);
        let hi = (fr.b as i64).min(fr.f as i64);
        Ok((lo..=hi).map(|o| self.torus.wrap_x(x + o)).collect())
    }

    /// Copy with particle `p` placed at `x` (labels untouched).
    pub fn with_particle_at(&self, p: ParticleRef, x: u32) -> Result<Self> {
        let old = self.position(p)?;
        if x >= self.torus.l {
            return Err(Error::Structural(format!("position {x} outside [0, L)")));
        }
        let mut next = self.clone();
        next.set_position(p, old, x);
        Ok(next)
    }

    fn set_position(&mut self, p: ParticleRef, old: u32, new: u32) {
        self.rows[p.row as usize][p.label as usize] = new;
        let word = &mut self.occupation.0[p.row as usize];
        *word &= !(1u64 << old);
        *word |= 1u64 << new;
    }

    /// Shifts `members` by `delta` (±1) in the given order. The caller
    /// orders members so that no intermediate step makes two particles
    /// share a site.
    pub(crate) fn shift_members(&mut self, members: &[ParticleRef], delta: i64) {
        for &p in members {
            let old = self.x(p);
            let new = self.torus.wrap_x(old as i64 + delta);
            self.set_position(p, old, new);
        }
    }

    /// Every particle translated by `dx` along the rows.
    pub fn translated(&self, dx: u32) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| (x + dx) % self.torus.l).collect())
            .collect();
        Self::from_parts(self.torus, rows)
    }

    /// Row `i` moved to row `i + k`.
    pub fn rows_rotated(&self, k: u32) -> Self {
        let n = self.torus.n as usize;
        let k = k as usize % n;
        let rows = (0..n)
            .map(|i| self.rows[(i + n - k) % n].clone())
            .collect();
        Self::from_parts(self.torus, rows)
    }
}

fn div_ceil_i64(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Configuration {
        Configuration::from_rows(5, 2, vec![vec![0, 2], vec![1, 3]]).unwrap()
    }

    #[test]
    fn validates_hand_checked_example() {
        assert!(small().validate());
    }

    #[test]
    fn doubly_occupied_site_is_invalid() {
        let c = Configuration::from_rows(5, 2, vec![vec![0, 0], vec![1, 3]]).unwrap();
        assert!(!c.validate());
    }

    #[test]
    fn identical_rows_are_flat() {
        let c = Configuration::from_rows(5, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(c.validate());
        assert_eq!(c.sector_index().unwrap(), 0);
    }

    #[test]
    fn particle_left_of_the_arc_below_is_invalid() {
        // row 1 particle at 0 has nothing of row 0 in (0, 1]
        let c = Configuration::from_rows(5, 2, vec![vec![2, 3], vec![0, 1]]).unwrap();
        assert!(!c.validate());
    }

    #[test]
    fn malformed_rows_are_structural_errors() {
        assert!(matches!(
            Configuration::from_rows(5, 2, vec![vec![0, 2], vec![1]]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            Configuration::from_rows(5, 2, vec![vec![0, 2]]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            Configuration::from_rows(5, 2, vec![vec![0, 7], vec![1, 3]]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn frame_of_hand_checked_example() {
        let c = small();
        let fr = c.frame(ParticleRef::new(0, 0)).unwrap();
        assert_eq!((fr.a, fr.b, fr.c, fr.d, fr.e, fr.f), (1, 0, 2, 2, 1, 1));
        assert_eq!(fr.p1, fr.p4);
        assert_eq!(c.x(fr.p2), 1);
        assert_eq!(c.x(fr.p3), 3);
        assert_eq!(c.x(fr.p5), 3);
        assert_eq!(c.x(fr.p6), 1);
    }

    #[test]
    fn frame_rejects_unknown_particle() {
        assert!(matches!(
            small().frame(ParticleRef::new(0, 5)),
            Err(Error::InvalidParticle { .. })
        ));
    }

    #[test]
    fn sector_of_hand_checked_example() {
        let c = small();
        assert_eq!(c.winding().unwrap(), Winding { nh: 1, nv: 2 });
        let s = c.sector_of().unwrap();
        assert_eq!((s.m1(), s.m2()), (2, 1));
        for p in c.particles() {
            assert_eq!(c.winding_from(p).unwrap(), Winding { nh: 1, nv: 2 });
        }
    }

    #[test]
    fn sector_bounds_are_spelled_out() {
        let err = Sector::new(3, 3, 2, 1).unwrap_err().to_string();
        assert!(err.contains("2/3 + 1/3 = 1"), "{err}");
        assert!(Torus::new(5, 2, 1).unwrap_err().to_string().contains("m1 > 1"));
        assert!(Sector::new(5, 2, 2, 0).is_err());
        assert!(Sector::new(5, 2, 2, 2).is_err());
        assert!(Sector::new(5, 2, 2, 1).is_ok());
    }

    #[test]
    fn canonical_configurations_land_in_their_sector() {
        for l in 3..=12u32 {
            for n in 2..=6u32 {
                for m1 in 2..l {
                    for m2 in 1..n {
                        let Ok(sector) = Sector::new(l, n, m1, m2) else { continue };
                        let c = Configuration::canonical(&sector);
                        assert!(c.validate(), "L={l} N={n} m1={m1} m2={m2}: {c}");
                        assert_eq!(c.sector_of().unwrap(), sector);
                    }
                }
            }
        }
    }

    #[test]
    fn json_and_hex_round_trip() {
        let c = small();
        let text = c.to_json_string();
        assert_eq!(text, r#"{"L":5,"N":2,"rows":[[0,2],[1,3]]}"#);
        assert_eq!(Configuration::from_json_str(&text).unwrap(), c);
        let hex = c.occupation().to_hex(&c.torus());
        assert_eq!(hex, "05:0a");
        let back = Configuration::from_occupation(c.torus(), &Occupation::from_hex(&hex).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn allowed_positions_keep_interlacing() {
        let c = small();
        for p in c.particles() {
            let xs = c.allowed_positions(p).unwrap();
            assert!(xs.contains(&c.x(p)));
            for x in 0..5 {
                let moved = c.with_particle_at(p, x).unwrap();
                assert_eq!(moved.validate(), xs.contains(&x), "p={p} x={x}");
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(Torus::new(4, 3, 2).unwrap().candidate_bound(), 216);
    }
}
