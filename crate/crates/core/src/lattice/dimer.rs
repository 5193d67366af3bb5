//! Dimer covers of the periodized hexagonal lattice and height functions.
//!
//! Coordinates. Vertical edge `(x, i)` joins a white vertex `W(x, i)` at its
//! bottom to a black vertex `K(x, i)` at its top; a particle at `(x, i)` is a
//! dimer on that edge. Black `K(x, i)` is also joined to `W(x - 1, i + 1)`
//! (north-west edge) and to `W(x, i + 1)` (north-east edge). Every edge is
//! therefore named by its white endpoint and one [`DimerKind`]:
//!
//! ```text
//!          W(x-1,i+1)   W(x,i+1)
//!                 \      /
//!               NW \    / NE
//!                   K(x,i)
//!                     |  vertical
//!                   W(x,i)
//! ```
//!
//! Face `f(x, i)` is the hexagon whose left side is vertical edge `(x, i)`
//! and right side is vertical edge `(x + 1, i)`. Its top vertex is `W(x, i+1)`
//! and its bottom vertex is `K(x + 1, i - 1)`. Stepping between faces:
//!
//! | step      | target           | crossed edge   | sign |
//! |-----------|------------------|----------------|------|
//! | East      | `f(x+1, i)`      | V of `W(x+1,i)`  | +1 |
//! | West      | `f(x-1, i)`      | V of `W(x,i)`    | -1 |
//! | North     | `f(x, i+1)`      | NW of `W(x,i+1)` | -1 |
//! | South     | `f(x, i-1)`      | NW of `W(x,i)`   | +1 |
//! | NorthWest | `f(x-1, i+1)`    | NE of `W(x,i+1)` | +1 |
//! | SouthEast | `f(x+1, i-1)`    | NE of `W(x+1,i)` | -1 |
//!
//! The sign is +1 when the white endpoint lies on the right of the direction
//! of travel. North is the `+e2` direction of the particle picture.

use std::collections::VecDeque;

use serde::Serialize;

use super::{Configuration, ParticleRef, Torus};
use crate::error::{Error, Result};

/// Which edge at a white vertex is covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DimerKind {
    Vertical,
    Nw,
    Ne,
}

/// A perfect matching, stored as the covered edge at every white vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerCover {
    torus: Torus,
    /// Indexed by `row * L + x`.
    matched: Vec<DimerKind>,
}

/// Places a vertical dimer on every particle and completes the matching.
///
/// Between rows `i - 1` and `i`, take a particle `p` of row `i - 1` and its
/// up-right neighbour at `x_p + F_p`. White vertices `W(y, i)` with
/// `x_p <= y < x_p + F_p` pair north-west, those with
/// `x_p + F_p < y < x_p1` pair north-east. Invalid configurations are rejected.
pub fn to_dimers(config: &Configuration) -> Result<DimerCover> {
    if !config.validate() {
        return Err(Error::InvalidConfiguration);
    }
    let t = config.torus();
    let mut matched = vec![DimerKind::Vertical; (t.l() * t.n()) as usize];
    for p in config.particles() {
        let fr = config.frame(p)?;
        let x = config.x(p);
        let above = t.row_above(p.row);
        for offset in 0..=fr.a {
            if offset == fr.f {
                continue;
            }
            let y = (x + offset) % t.l();
            matched[(above * t.l() + y) as usize] = if offset < fr.f {
                DimerKind::Nw
            } else {
                DimerKind::Ne
            };
        }
    }
    Ok(DimerCover { torus: t, matched })
}

impl DimerCover {
    /// Builds a cover from the covered edge at every white vertex, indexed by
    /// `row * L + x`. The matching must be perfect.
    pub fn from_edges(torus: Torus, matched: Vec<DimerKind>) -> Result<Self> {
        if matched.len() != (torus.l() * torus.n()) as usize {
            return Err(Error::Structural(format!(
                "expected {} white vertices, found {}",
                torus.l() * torus.n(),
                matched.len()
            )));
        }
        let cover = DimerCover { torus, matched };
        if !cover.is_perfect() {
            return Err(Error::Structural("not a perfect matching".into()));
        }
        Ok(cover)
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn at(&self, x: u32, row: u32) -> DimerKind {
        self.matched[(row * self.torus.l() + x) as usize]
    }

    /// Whether edge `kind` at white vertex `(x, row)` is covered.
    pub fn covers(&self, x: u32, row: u32, kind: DimerKind) -> bool {
        self.at(x, row) == kind
    }

    /// Every black vertex is covered exactly once.
    pub fn is_perfect(&self) -> bool {
        let t = self.torus;
        let mut hits = vec![0u8; (t.l() * t.n()) as usize];
        for row in 0..t.n() {
            for x in 0..t.l() {
                let (bx, brow) = match self.at(x, row) {
                    DimerKind::Vertical => (x, row),
                    DimerKind::Nw => ((x + 1) % t.l(), t.row_below(row)),
                    DimerKind::Ne => (x, t.row_below(row)),
                };
                hits[(brow * t.l() + bx) as usize] += 1;
            }
        }
        hits.iter().all(|&h| h == 1)
    }

    pub fn count(&self, kind: DimerKind) -> u32 {
        self.matched.iter().filter(|&&k| k == kind).count() as u32
    }

    /// Vertical dimers on each row.
    pub fn vertical_per_row(&self) -> Vec<u32> {
        let l = self.torus.l();
        (0..self.torus.n())
            .map(|row| (0..l).filter(|&x| self.at(x, row) == DimerKind::Vertical).count() as u32)
            .collect()
    }

    /// North-west dimers in each `e2` column, i.e. along the North face loop
    /// starting at `f(x, ·)`.
    pub fn nw_per_column(&self) -> Vec<u32> {
        let n = self.torus.n();
        (0..self.torus.l())
            .map(|x| (0..n).filter(|&row| self.at(x, row) == DimerKind::Nw).count() as u32)
            .collect()
    }

    /// The particle configuration read off the vertical dimers.
    pub fn to_configuration(&self) -> Result<Configuration> {
        let t = self.torus;
        let rows = (0..t.n())
            .map(|row| {
                (0..t.l())
                    .filter(|&x| self.at(x, row) == DimerKind::Vertical)
                    .collect()
            })
            .collect();
        Configuration::from_rows(t.l(), t.n(), rows)
    }
}

/// A hexagonal face `f(x, row)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub x: u32,
    pub row: u32,
}

/// Unit steps between adjacent faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Step {
    East,
    West,
    North,
    South,
    NorthWest,
    SouthEast,
}

impl Step {
    pub const ALL: [Step; 6] = [
        Step::East,
        Step::West,
        Step::North,
        Step::South,
        Step::NorthWest,
        Step::SouthEast,
    ];

    /// Displacement `(dx, drow)` in lattice coordinates.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Step::East => (1, 0),
            Step::West => (-1, 0),
            Step::North => (0, 1),
            Step::South => (0, -1),
            Step::NorthWest => (-1, 1),
            Step::SouthEast => (1, -1),
        }
    }

    pub fn reverse(self) -> Step {
        match self {
            Step::East => Step::West,
            Step::West => Step::East,
            Step::North => Step::South,
            Step::South => Step::North,
            Step::NorthWest => Step::SouthEast,
            Step::SouthEast => Step::NorthWest,
        }
    }
}

impl Face {
    pub fn new(x: u32, row: u32) -> Self {
        Face { x, row }
    }

    pub fn step(self, torus: &Torus, step: Step) -> Face {
        let (dx, dr) = step.delta();
        Face {
            x: torus.wrap_x(self.x as i64 + dx),
            row: (self.row as i64 + dr).rem_euclid(torus.n() as i64) as u32,
        }
    }

    /// The edge crossed by `step`, as `(white x, white row, kind)`, and its sign.
    pub fn crossing(self, torus: &Torus, step: Step) -> ((u32, u32, DimerKind), i64) {
        let Face { x, row } = self;
        let right = (x + 1) % torus.l();
        let up = torus.row_above(row);
        match step {
            Step::East => ((right, row, DimerKind::Vertical), 1),
            Step::West => ((x, row, DimerKind::Vertical), -1),
            Step::North => ((x, up, DimerKind::Nw), -1),
            Step::South => ((x, row, DimerKind::Nw), 1),
            Step::NorthWest => ((x, up, DimerKind::Ne), 1),
            Step::SouthEast => ((right, row, DimerKind::Ne), -1),
        }
    }

    fn index(self, torus: &Torus) -> usize {
        (self.row * torus.l() + self.x) as usize
    }
}

/// A nearest-neighbour walk on faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacePath {
    pub start: Face,
    pub steps: Vec<Step>,
}

impl FacePath {
    pub fn new(start: Face, steps: Vec<Step>) -> Self {
        FacePath { start, steps }
    }

    /// Builds a path from a face sequence; consecutive faces must be adjacent.
    pub fn from_faces(torus: &Torus, faces: &[Face]) -> Result<Self> {
        let start = *faces.first().ok_or(Error::NonAdjacentStep { index: 0 })?;
        let steps = faces
            .windows(2)
            .enumerate()
            .map(|(index, w)| {
                Step::ALL
                    .into_iter()
                    .find(|&s| w[0].step(torus, s) == w[1])
                    .ok_or(Error::NonAdjacentStep { index })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FacePath { start, steps })
    }

    /// The `+e1` loop of `L` East steps.
    pub fn e1_loop(torus: &Torus, start: Face) -> Self {
        FacePath::new(start, vec![Step::East; torus.l() as usize])
    }

    /// The `+e2` loop of `N` North steps.
    pub fn e2_loop(torus: &Torus, start: Face) -> Self {
        FacePath::new(start, vec![Step::North; torus.n() as usize])
    }

    /// Starting on the face right of particle `p`, go North whenever that
    /// crosses no dimer and East otherwise, until back at the start. The
    /// faces visited right after each North step are the faces right of the
    /// successive up-right neighbours of `p`.
    pub fn gamma_loop(cover: &DimerCover, config: &Configuration, p: ParticleRef) -> Result<Self> {
        let t = cover.torus();
        let start = Face::new(config.position(p)?, p.row);
        let mut face = start;
        let mut steps = Vec::new();
        let limit = 2 * (t.l() * t.n()) as usize * t.n1() as usize;
        loop {
            let ((wx, wr, kind), _) = face.crossing(&t, Step::North);
            let step = if cover.covers(wx, wr, kind) {
                Step::East
            } else {
                Step::North
            };
            steps.push(step);
            face = face.step(&t, step);
            if face == start {
                break;
            }
            if steps.len() > limit {
                return Err(Error::Consistency("up-right face loop did not close".into()));
            }
        }
        Ok(FacePath { start, steps })
    }

    pub fn end(&self, torus: &Torus) -> Face {
        self.steps.iter().fold(self.start, |f, &s| f.step(torus, s))
    }

    pub fn is_closed(&self, torus: &Torus) -> bool {
        self.end(torus) == self.start
    }

    /// Net displacement in lattice coordinates, without wrapping.
    pub fn displacement(&self) -> (i64, i64) {
        self.steps.iter().fold((0, 0), |(x, y), s| {
            let (dx, dy) = s.delta();
            (x + dx, y + dy)
        })
    }

    /// Horizontal and vertical winding numbers of a closed path.
    pub fn winding(&self, torus: &Torus) -> Option<(i64, i64)> {
        if !self.is_closed(torus) {
            return None;
        }
        let (dx, dy) = self.displacement();
        Some((dx / torus.l() as i64, dy / torus.n() as i64))
    }

    /// Signed count of covered edges crossed by the path.
    ///
    /// On closed paths built from East/West/North/South steps only, the value
    /// depends on the winding numbers alone: every elementary square of that
    /// face grid encloses one white and one black vertex. Diagonal steps can
    /// enclose an unbalanced vertex set, which adds a cover-independent offset.
    pub fn height_along(&self, cover: &DimerCover) -> i64 {
        let t = cover.torus();
        let mut face = self.start;
        let mut h = 0;
        for &s in &self.steps {
            let ((wx, wr, kind), sign) = face.crossing(&t, s);
            if cover.covers(wx, wr, kind) {
                h += sign;
            }
            face = face.step(&t, s);
        }
        h
    }
}

/// A non-negative integer function on faces, indexed by `row * L + x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightMap {
    torus: Torus,
    values: Vec<i64>,
}

impl HeightMap {
    pub fn get(&self, face: Face) -> i64 {
        self.values[face.index(&self.torus)]
    }

    pub(crate) fn add(&mut self, face: Face, delta: i64) {
        let i = face.index(&self.torus);
        self.values[i] += delta;
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn total(&self) -> i64 {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn faces(&self) -> impl Iterator<Item = (Face, i64)> + '_ {
        let l = self.torus.l();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (Face::new(i as u32 % l, i as u32 / l), v))
    }

    /// Height difference along `path` read off this map.
    pub fn difference_along(&self, path: &FacePath) -> i64 {
        self.get(path.end(&self.torus)) - self.get(path.start)
    }
}

/// Height of `eta` relative to `other`: crossing an edge changes the height
/// by `sign · (1[e ∈ eta] - 1[e ∈ other])`. Normalised to have minimum zero.
/// The gradient is only closed when both configurations share a sector.
pub fn relative_height(eta: &Configuration, other: &Configuration) -> Result<HeightMap> {
    if eta.torus() != other.torus() {
        return Err(Error::MismatchedSectors);
    }
    let a = to_dimers(eta)?;
    let b = to_dimers(other)?;
    relative_height_of_covers(&a, &b)
}

pub(crate) fn relative_height_of_covers(a: &DimerCover, b: &DimerCover) -> Result<HeightMap> {
    let t = a.torus();
    let gradient = |face: Face, step: Step| {
        let ((wx, wr, kind), sign) = face.crossing(&t, step);
        sign * (a.covers(wx, wr, kind) as i64 - b.covers(wx, wr, kind) as i64)
    };
    let faces = (t.l() * t.n()) as usize;
    let mut values: Vec<Option<i64>> = vec![None; faces];
    let origin = Face::new(0, 0);
    values[origin.index(&t)] = Some(0);
    let mut queue = VecDeque::from([origin]);
    while let Some(face) = queue.pop_front() {
        let h = values[face.index(&t)].expect("queued faces have heights");
        for step in Step::ALL {
            let next = face.step(&t, step);
            let expected = h + gradient(face, step);
            match values[next.index(&t)] {
                None => {
                    values[next.index(&t)] = Some(expected);
                    queue.push_back(next);
                }
                Some(v) if v != expected => return Err(Error::MismatchedSectors),
                Some(_) => {}
            }
        }
    }
    let values: Vec<i64> = values.into_iter().map(|v| v.expect("face graph is connected")).collect();
    let min = *values.iter().min().expect("at least one face");
    Ok(HeightMap {
        torus: t,
        values: values.into_iter().map(|v| v - min).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Configuration;

    fn small() -> Configuration {
        Configuration::from_rows(5, 2, vec![vec![0, 2], vec![1, 3]]).unwrap()
    }

    #[test]
    fn hand_completed_cover_counts() {
        let cover = to_dimers(&small()).unwrap();
        assert!(cover.is_perfect());
        assert_eq!(cover.count(DimerKind::Vertical), 4);
        assert_eq!(cover.count(DimerKind::Nw), 5);
        assert_eq!(cover.count(DimerKind::Ne), 1);
        assert_eq!(cover.vertical_per_row(), vec![2, 2]);
        assert_eq!(cover.nw_per_column(), vec![1; 5]);
        // The single north-east dimer joins K(4, 0) to W(4, 1).
        assert_eq!(cover.at(4, 1), DimerKind::Ne);
    }

    #[test]
    fn cover_round_trips() {
        let c = small();
        assert_eq!(to_dimers(&c).unwrap().to_configuration().unwrap(), c);
    }

    #[test]
    fn canonical_loops() {
        let c = small();
        let t = c.torus();
        let cover = to_dimers(&c).unwrap();
        for row in 0..t.n() {
            for x in 0..t.l() {
                let f = Face::new(x, row);
                assert_eq!(FacePath::e1_loop(&t, f).height_along(&cover), 2);
                assert_eq!(FacePath::e2_loop(&t, f).height_along(&cover), -1);
            }
        }
        let gamma = FacePath::gamma_loop(&cover, &c, ParticleRef::new(0, 0)).unwrap();
        assert_eq!(gamma.winding(&t), Some((1, 2)));
        assert_eq!(gamma.height_along(&cover), 0);
    }

    #[test]
    fn loop_around_a_vertex_sees_its_dimer() {
        // East, NorthWest, South circles K(x+1, i) and crosses all three of its
        // edges with the white end on the right: exactly one is covered.
        let c = small();
        let t = c.torus();
        let cover = to_dimers(&c).unwrap();
        for row in 0..t.n() {
            for x in 0..t.l() {
                let path = FacePath::new(Face::new(x, row), vec![Step::East, Step::NorthWest, Step::South]);
                assert!(path.is_closed(&t));
                assert_eq!(path.height_along(&cover), 1);
            }
        }
    }

    #[test]
    fn non_adjacent_faces_are_rejected() {
        let t = small().torus();
        let err = FacePath::from_faces(&t, &[Face::new(0, 0), Face::new(1, 0), Face::new(3, 0)]);
        assert!(matches!(err, Err(Error::NonAdjacentStep { index: 1 })));
        let ok = FacePath::from_faces(&t, &[Face::new(0, 0), Face::new(1, 0), Face::new(0, 1)]).unwrap();
        assert_eq!(ok.steps, vec![Step::East, Step::NorthWest]);
    }

    #[test]
    fn relative_height_of_identical_configurations_vanishes() {
        let c = small();
        assert!(relative_height(&c, &c).unwrap().is_zero());
    }

    #[test]
    fn one_rotation_raises_one_face() {
        // Only the particle at x = 3 on row 1 can step: B = 1, F = 2.
        let c = small();
        let p = c.particle_at(3, 1).unwrap();
        let fr = c.frame(p).unwrap();
        assert!(fr.b >= 1 && fr.f >= 1);
        let rotated = c.with_particle_at(p, 4).unwrap();
        assert!(rotated.validate());
        let h = relative_height(&c, &rotated).unwrap();
        let raised: Vec<_> = h.faces().filter(|&(_, v)| v != 0).collect();
        assert_eq!(raised, vec![(Face::new(3, 1), 1)]);
    }
}
