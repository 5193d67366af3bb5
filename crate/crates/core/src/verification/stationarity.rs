use serde::Serialize;

use crate::dynamics::{reverse_moves, Generator};
use crate::enumeration::{enumerate_sector_capped, DEFAULT_CANDIDATE_CAP};
use crate::error::{Error, Result};
use crate::gibbs::{measure_table, weight, GibbsParams};
use crate::lattice::{Configuration, Sector};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
    pub q: String,
    pub a: Vec<String>,
    pub mode: &'static str,
    pub states: usize,
    pub transitions: usize,
    /// `(πL)(η)` per state, in enumeration order.
    pub residuals: Vec<String>,
    pub max_residual: String,
    /// State where `|πL|` is largest.
    pub worst_state: String,
    /// Largest gap between `(πL)(η)/π(η)` and the same quantity rebuilt
    /// from predecessors and weight ratios.
    pub cross_check_gap: String,
    pub tolerance: f64,
    pub passed: bool,
}

/// `πL` for an arbitrary vector `π`.
pub fn stationarity_residuals<S: Scalar>(generator: &Generator<S>, pi: &[S]) -> Vec<S> {
    generator.left_multiply(pi)
}

/// `Σ_σ π(σ)/π(η) L(σ, η) - Σ_σ L(η, σ)`, with the entrance sum rebuilt from
/// the predecessors of `η` and full weight ratios instead of the generator.
pub fn entrance_minus_exit<S: Scalar>(config: &Configuration, params: &GibbsParams<S>) -> Result<S> {
    let w = weight(config, params)?;
    let mut entrance = S::zero();
    for rm in reverse_moves(config, params)? {
        entrance = entrance + weight(&rm.predecessor, params)? / w.clone() * rm.rate;
    }
    Ok(entrance - super::s1(config, params)?)
}

/// `π` with entry `index` multiplied by `factor`, renormalized.
pub fn perturbed_measure<S: Scalar>(pi: &[S], index: usize, factor: S) -> Vec<S> {
    let mut out = pi.to_vec();
    out[index] = out[index].clone() * factor;
    let z = out.iter().cloned().fold(S::zero(), |a, b| a + b);
    out.into_iter().map(|v| v / z.clone()).collect()
}

pub fn check_stationarity<S: Scalar>(
    sector: &Sector,
    params: &GibbsParams<S>,
    tolerance: f64,
) -> Result<StationarityReport> {
    check_stationarity_capped(sector, params, tolerance, DEFAULT_CANDIDATE_CAP)
}

/// Builds `π` and `L` on the enumerated sector and evaluates `πL`. Exact
/// backends pass only on an all-zero residual; floats pass below `tolerance`.
pub fn check_stationarity_capped<S: Scalar>(
    sector: &Sector,
    params: &GibbsParams<S>,
    tolerance: f64,
    cap: u128,
) -> Result<StationarityReport> {
    params.check_rows(sector.n())?;
    let states = enumerate_sector_capped(sector, cap)?;
    if states.is_empty() {
        return Err(Error::EmptyStates);
    }
    let table = measure_table(&states, params)?;
    let generator = Generator::build(&states, params)?;
    let residuals = stationarity_residuals(&generator, &table.probabilities);

    let mut max = S::zero();
    let mut worst = 0;
    let mut gap = S::zero();
    for (i, (r, s)) in residuals.iter().zip(&states).enumerate() {
        if r.abs() > max {
            max = r.abs();
            worst = i;
        }
        let via_predecessors = entrance_minus_exit(s, params)?;
        let via_generator = r.clone() / table.probabilities[i].clone();
        let d = (via_predecessors - via_generator).abs();
        if d > gap {
            gap = d;
        }
    }
    let passed = if S::EXACT {
        Scalar::is_zero(&max) && Scalar::is_zero(&gap)
    } else {
        max.to_f64() <= tolerance && gap.to_f64() <= tolerance
    };
    Ok(StationarityReport {
        l: sector.l(),
        n: sector.n(),
        m1: sector.m1(),
        m2: sector.m2(),
        q: params.q().to_text(),
        a: params.activities().iter().map(Scalar::to_text).collect(),
        mode: if S::EXACT { "rational" } else { "float" },
        states: states.len(),
        transitions: generator.transitions(),
        residuals: residuals.iter().map(Scalar::to_text).collect(),
        max_residual: max.to_text(),
        worst_state: states[worst].to_string(),
        cross_check_gap: gap.to_text(),
        tolerance: if S::EXACT { 0.0 } else { tolerance },
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_sector;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn exact_zero_on_the_smallest_sector() {
        let sector = Sector::new(5, 2, 2, 1).unwrap();
        let params = GibbsParams::homogeneous(ratio(1, 2), 2).unwrap();
        let report = check_stationarity(&sector, &params, 0.0).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.max_residual, "0");
        assert_eq!(report.mode, "rational");
    }

    #[test]
    fn float_mode_is_below_tolerance() {
        let sector = Sector::new(4, 3, 2, 1).unwrap();
        let params = GibbsParams::new(1.0 / 3.0, vec![1.0, 2.0, 0.5]).unwrap();
        let report = check_stationarity(&sector, &params, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.mode, "float");
    }

    #[test]
    fn perturbed_measure_is_not_stationary() {
        let sector = Sector::new(5, 2, 2, 1).unwrap();
        let params = GibbsParams::homogeneous(ratio(1, 2), 2).unwrap();
        let states = enumerate_sector(&sector).unwrap();
        let g = Generator::build(&states, &params).unwrap();
        let pi = measure_table(&states, &params).unwrap().probabilities;
        let bad = perturbed_measure(&pi, 0, ratio(2, 1));
        let r = stationarity_residuals(&g, &bad);
        assert!(r.iter().any(|v| !Scalar::is_zero(v)));
    }

    #[test]
    fn uniform_measure_fails_for_positive_q() {
        let sector = Sector::new(4, 3, 2, 1).unwrap();
        let params = GibbsParams::homogeneous(ratio(1, 2), 3).unwrap();
        let states = enumerate_sector(&sector).unwrap();
        let g = Generator::build(&states, &params).unwrap();
        let uniform = vec![ratio(1, states.len() as i64); states.len()];
        let r: Vec<Rational> = stationarity_residuals(&g, &uniform);
        assert!(r.iter().any(|v| !Scalar::is_zero(v)));
    }
}
