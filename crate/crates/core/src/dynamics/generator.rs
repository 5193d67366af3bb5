use std::collections::HashMap;

use rayon::prelude::*;

use super::enabled_moves;
use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::lattice::{Configuration, Occupation};
use crate::scalar::Scalar;

/// Sparse rate matrix over an enumerated sector.
///
/// Row `i` holds the off-diagonal rates `L(i, j)` sorted by `j`; the diagonal
/// is minus the row's exit rate, so rows sum to zero.
#[derive(Clone, Debug)]
pub struct Generator<S> {
    states: Vec<Configuration>,
    index: HashMap<Occupation, usize>,
    rows: Vec<Vec<(usize, S)>>,
    diagonal: Vec<S>,
}

impl<S: Scalar> Generator<S> {
    /// Builds the generator; a move leaving `states`, or two roots reaching the
    /// same successor, is reported as a consistency failure.
    pub fn build(states: &[Configuration], params: &GibbsParams<S>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyStates);
        }
        let index: HashMap<Occupation, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.occupation().clone(), i))
            .collect();
        let rows: Vec<Vec<(usize, S)>> = states
            .par_iter()
            .map(|s| -> Result<Vec<(usize, S)>> {
                let mut row = Vec::new();
                for m in enabled_moves(s, params)? {
                    let j = *index.get(m.successor.occupation()).ok_or_else(|| {
                        Error::Consistency(format!(
                            "move of {} from {s} leaves the enumerated sector",
                            m.family.root()
                        ))
                    })?;
                    row.push((j, m.rate));
                }
                row.sort_by_key(|&(j, _)| j);
                if row.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::Consistency(format!(
                        "two families of {s} lead to the same successor"
                    )));
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let diagonal = rows
            .iter()
            .map(|row| -row.iter().fold(S::zero(), |acc, (_, r)| acc + r.clone()))
            .collect();
        Ok(Generator {
            states: states.to_vec(),
            index,
            rows,
            diagonal,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn index_of(&self, config: &Configuration) -> Option<usize> {
        self.index.get(config.occupation()).copied()
    }

    pub fn off_diagonal(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn diagonal(&self, i: usize) -> &S {
        &self.diagonal[i]
    }

    /// `L(i, j)`, zero when there is no move.
    pub fn entry(&self, i: usize, j: usize) -> S {
        if i == j {
            return self.diagonal[i].clone();
        }
        self.rows[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn exit_rate(&self, i: usize) -> S {
        -self.diagonal[i].clone()
    }

    /// Sum of row `i` including the diagonal, recomputed from the entries.
    pub fn row_sum(&self, i: usize) -> S {
        self.rows[i]
            .iter()
            .fold(self.diagonal[i].clone(), |acc, (_, r)| acc + r.clone())
    }

    pub fn transitions(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// The row vector `v L`.
    pub fn left_multiply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.len(), "vector length must match the state count");
        let mut out: Vec<S> = v
            .iter()
            .zip(&self.diagonal)
            .map(|(x, d)| x.clone() * d.clone())
            .collect();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, r) in row {
                out[*j] = out[*j].clone() + v[i].clone() * r.clone();
            }
        }
        out
    }

    /// Adjacency lists of the positive-rate transition graph.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, _)| j).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_sector;
    use crate::lattice::Sector;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn rows_sum_to_zero_and_off_diagonals_are_nonnegative() {
        let states = enumerate_sector(&Sector::new(5, 2, 2, 1).unwrap()).unwrap();
        let params = GibbsParams::new(ratio(1, 2), vec![ratio(1, 1), ratio(2, 1)]).unwrap();
        let g = Generator::build(&states, &params).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.row_sum(i), Rational::from_i64(0));
            assert!(g.off_diagonal(i).iter().all(|(_, r)| r.is_positive()));
        }
    }

    #[test]
    fn empty_state_list_is_refused() {
        let params = GibbsParams::homogeneous(0.5, 2).unwrap();
        assert!(matches!(Generator::build(&[], &params), Err(Error::EmptyStates)));
    }

    #[test]
    fn truncated_state_list_is_a_consistency_failure() {
        let states = enumerate_sector(&Sector::new(5, 2, 2, 1).unwrap()).unwrap();
        let params = GibbsParams::homogeneous(0.5, 2).unwrap();
        let err = Generator::build(&states[..states.len() - 1], &params).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }
}
