//! q-Pochhammer symbols and the Gibbs weights of interlaced configurations.

use std::fmt::Write as _;
use std::io;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, ParticleRef};
use crate::scalar::{Rational, Scalar};

/// The deformation parameter `q ∈ [0, 1)` and row activities `a_1..a_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsParams<S> {
    q: S,
    a: Vec<S>,
}

impl<S: Scalar> GibbsParams<S> {
    pub fn new(q: S, a: Vec<S>) -> Result<Self> {
        if q < S::zero() || q >= S::one() {
            return Err(Error::InvalidParameter(format!(
                "q = {} must lie in [0, 1)",
                q.to_text()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidParameter("no row activities given".into()));
        }
        if let Some(bad) = a.iter().find(|v| !v.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "row activity {} must be positive",
                bad.to_text()
            )));
        }
        Ok(GibbsParams { q, a })
    }

    /// All activities equal to one.
    pub fn homogeneous(q: S, n: u32) -> Result<Self> {
        Self::new(q, vec![S::one(); n as usize])
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn activities(&self) -> &[S] {
        &self.a
    }

    /// Activity of row `row`, 0-based; rows wrap.
    pub fn activity(&self, row: u32) -> &S {
        &self.a[row as usize % self.a.len()]
    }

    /// Checks that one activity is given per row.
    pub fn check_rows(&self, n: u32) -> Result<()> {
        if self.a.len() != n as usize {
            return Err(Error::InvalidParameter(format!(
                "{} row activities given for N = {n} rows",
                self.a.len()
            )));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> GibbsParams<f64> {
        GibbsParams {
            q: self.q.to_f64(),
            a: self.a.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `q^k` with `q^0 = 1` even at `q = 0`.
    pub fn q_pow(&self, k: i64) -> S {
        self.q.powi(k)
    }

    /// `1 - q^k`.
    pub fn one_minus_q_pow(&self, k: i64) -> S {
        S::one() - self.q.powi(k)
    }
}

/// `(q; q)_n = (1 - q)(1 - q^2)...(1 - q^n)`, with `(q; q)_0 = 1`.
pub fn q_pochhammer<S: Scalar>(q: &S, n: i64) -> Result<S> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "q-Pochhammer index n = {n} is negative"
        )));
    }
    Ok((1..=n).fold(S::one(), |acc, j| acc * (S::one() - q.powi(j))))
}

/// Memoized `(q; q)_n` for one fixed `q`.
#[derive(Clone, Debug)]
pub struct PochhammerTable<S> {
    q: S,
    values: Vec<S>,
}

impl<S: Scalar> PochhammerTable<S> {
    pub fn new(q: S) -> Self {
        PochhammerTable {
            q,
            values: vec![S::one()],
        }
    }

    pub fn get(&mut self, n: u32) -> S {
        while self.values.len() <= n as usize {
            let k = self.values.len() as i64;
            let next = self.values[self.values.len() - 1].clone() * (S::one() - self.q.powi(k));
            self.values.push(next);
        }
        self.values[n as usize].clone()
    }
}

/// Which pair of Pochhammer symbols sits in the denominator of each factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Denominator {
    /// `(q;q)_B (q;q)_C`
    #[default]
    BC,
    /// `(q;q)_E (q;q)_F`
    EF,
}

/// Equivalent ways of writing the weight. `alpha` replaces the activity
/// exponent `C_p` by `alpha·C_p - (1 - alpha)·B_p`; `alpha = 1` is the
/// standard form. All gauges give the same normalized measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightGauge {
    pub denominator: Denominator,
    pub alpha: i64,
}

impl Default for WeightGauge {
    fn default() -> Self {
        WeightGauge {
            denominator: Denominator::BC,
            alpha: 1,
        }
    }
}

/// Unnormalized Gibbs weight
/// `∏_p a_{r(p)}^{C_p} (q;q)_{A_p} / ((q;q)_{B_p} (q;q)_{C_p})`.
pub fn weight<S: Scalar>(config: &Configuration, params: &GibbsParams<S>) -> Result<S> {
    let mut table = PochhammerTable::new(params.q.clone());
    weight_with(config, params, WeightGauge::default(), &mut table)
}

pub fn weight_gauged<S: Scalar>(
    config: &Configuration,
    params: &GibbsParams<S>,
    gauge: WeightGauge,
) -> Result<S> {
    let mut table = PochhammerTable::new(params.q.clone());
    weight_with(config, params, gauge, &mut table)
}

pub fn weight_with<S: Scalar>(
    config: &Configuration,
    params: &GibbsParams<S>,
    gauge: WeightGauge,
    table: &mut PochhammerTable<S>,
) -> Result<S> {
    if !config.validate() {
        return Err(Error::InvalidConfiguration);
    }
    params.check_rows(config.torus().n())?;
    let mut w = S::one();
    for p in config.particles() {
        let fr = config.frame(p)?;
        let exponent = gauge.alpha * fr.c as i64 - (1 - gauge.alpha) * fr.b as i64;
        let denominator = match gauge.denominator {
            Denominator::BC => table.get(fr.b) * table.get(fr.c),
            Denominator::EF => table.get(fr.e) * table.get(fr.f),
        };
        w = w * params.activity(p.row).powi(exponent) * table.get(fr.a) / denominator;
    }
    Ok(w)
}

/// Natural logarithm of the weight, for tori where the plain product
/// under- or overflows.
pub fn log_weight(config: &Configuration, params: &GibbsParams<f64>) -> Result<f64> {
    if !config.validate() {
        return Err(Error::InvalidConfiguration);
    }
    params.check_rows(config.torus().n())?;
    let q = params.q;
    let l = config.torus().l() as usize;
    let mut log_poch = vec![0.0f64; l + 1];
    for k in 1..=l {
        log_poch[k] = log_poch[k - 1] + (-q.powi(k as i32)).ln_1p();
    }
    let mut acc = 0.0;
    for p in config.particles() {
        let fr = config.frame(p)?;
        acc += fr.c as f64 * params.activity(p.row).ln() + log_poch[fr.a as usize]
            - log_poch[fr.b as usize]
            - log_poch[fr.c as usize];
    }
    Ok(acc)
}

/// Weight, up to a factor independent of `p`'s position, of the conditional
/// law of `p` given every other particle:
/// `a_{r(p)}^{C} a_{r(p6)}^{F} (q;q)_A (q;q)_D / ((q;q)_B (q;q)_C (q;q)_E (q;q)_F)`.
pub fn conditional_weight<S: Scalar>(
    config: &Configuration,
    p: ParticleRef,
    params: &GibbsParams<S>,
) -> Result<S> {
    let fr = config.frame(p)?;
    params.check_rows(config.torus().n())?;
    let q = params.q();
    let poch = |n: u32| q_pochhammer(q, n as i64).expect("gap is non-negative");
    let above = config.torus().row_above(p.row);
    Ok(params.activity(p.row).powi(fr.c as i64)
        * params.activity(above).powi(fr.f as i64)
        * poch(fr.a)
        * poch(fr.d)
        / (poch(fr.b) * poch(fr.c) * poch(fr.e) * poch(fr.f)))
}

/// A weight in one of the supported representations.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Rational),
    Float(f64),
    /// Natural logarithm of the weight.
    Log(f64),
}

impl Weight {
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => Scalar::to_f64(r),
            Weight::Float(f) => *f,
            Weight::Log(l) => l.exp(),
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Weight::Log(l) => *l,
            other => other.to_f64().ln(),
        }
    }
}

/// Normalized Gibbs measure on an enumerated list of states.
#[derive(Clone, Debug)]
pub struct MeasureTable<S> {
    pub weights: Vec<S>,
    pub probabilities: Vec<S>,
    pub partition_function: S,
}

pub fn measure_table<S: Scalar>(
    states: &[Configuration],
    params: &GibbsParams<S>,
) -> Result<MeasureTable<S>> {
    measure_table_gauged(states, params, WeightGauge::default())
}

pub fn measure_table_gauged<S: Scalar>(
    states: &[Configuration],
    params: &GibbsParams<S>,
    gauge: WeightGauge,
) -> Result<MeasureTable<S>> {
    if states.is_empty() {
        return Err(Error::EmptyStates);
    }
    let mut table = PochhammerTable::new(params.q.clone());
    let weights = states
        .iter()
        .map(|s| weight_with(s, params, gauge, &mut table))
        .collect::<Result<Vec<S>>>()?;
    let z = weights.iter().cloned().fold(S::zero(), |acc, w| acc + w);
    let probabilities = weights.iter().map(|w| w.clone() / z.clone()).collect();
    Ok(MeasureTable {
        weights,
        probabilities,
        partition_function: z,
    })
}

/// Probabilities computed through log weights and a log-sum-exp shift.
pub fn measure_table_log(states: &[Configuration], params: &GibbsParams<f64>) -> Result<Vec<f64>> {
    if states.is_empty() {
        return Err(Error::EmptyStates);
    }
    let logs = states
        .iter()
        .map(|s| log_weight(s, params))
        .collect::<Result<Vec<f64>>>()?;
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = shifted.iter().sum();
    Ok(shifted.into_iter().map(|w| w / total).collect())
}

/// Writes `occupation-hex,weight-numerator,weight-denominator,probability-float`.
/// Float weights are written in the numerator column with denominator `1`.
pub fn write_measure_csv<S: Scalar, W: io::Write>(
    out: &mut W,
    states: &[Configuration],
    table: &MeasureTable<S>,
) -> Result<()> {
    let mut text = String::from("occupation-hex,weight-numerator,weight-denominator,probability-float\n");
    for ((state, w), p) in states.iter().zip(&table.weights).zip(&table.probabilities) {
        let hex = state.occupation().to_hex(&state.torus());
        let w_text = w.to_text();
        let (num, den) = match w_text.split_once('/') {
            Some((n, d)) => (n.to_string(), d.to_string()),
            None => (w_text, "1".to_string()),
        };
        writeln!(text, "{},{},{},{:?}", hex, num, den, p.to_f64())
            .expect("writing to a String cannot fail");
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn small() -> Configuration {
        Configuration::from_rows(5, 2, vec![vec![0, 2], vec![1, 3]]).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(q_pochhammer(&ratio(1, 3), 0).unwrap(), ratio(1, 1));
        assert_eq!(q_pochhammer(&ratio(1, 2), 2).unwrap(), ratio(3, 8));
        for n in 1..6 {
            assert_eq!(q_pochhammer(&ratio(0, 1), n).unwrap(), ratio(1, 1));
        }
        assert!(q_pochhammer(&ratio(1, 2), -1).is_err());
    }

    #[test]
    fn pochhammer_table_matches_direct_product() {
        let q = ratio(2, 7);
        let mut t = PochhammerTable::new(q.clone());
        for n in [5u32, 0, 3, 9, 1] {
            assert_eq!(t.get(n), q_pochhammer(&q, n as i64).unwrap());
        }
    }

    #[test]
    fn params_are_checked() {
        assert!(GibbsParams::new(ratio(1, 1), vec![ratio(1, 1)]).is_err());
        assert!(GibbsParams::new(ratio(-1, 2), vec![ratio(1, 1)]).is_err());
        assert!(GibbsParams::new(ratio(1, 2), vec![ratio(0, 1)]).is_err());
        assert!(GibbsParams::new(0.5, vec![1.0, 2.0]).is_ok());
        let p = GibbsParams::new(0.5, vec![1.0]).unwrap();
        assert!(weight(&small(), &p).is_err());
    }

    #[test]
    fn uniform_at_q_zero() {
        let p = GibbsParams::homogeneous(ratio(0, 1), 2).unwrap();
        assert_eq!(weight(&small(), &p).unwrap(), ratio(1, 1));
        for q in small().particles() {
            assert_eq!(conditional_weight(&small(), q, &p).unwrap(), ratio(1, 1));
        }
    }

    #[test]
    fn hand_computed_weight() {
        // Gaps (A, B, C): row 0 -> (1,0,2), (2,0,1); row 1 -> (1,0,1), (2,1,1).
        let q = ratio(1, 2);
        let p = GibbsParams::new(q.clone(), vec![ratio(1, 1), ratio(2, 1)]).unwrap();
        let poch = |n| q_pochhammer(&q, n).unwrap();
        let expected = (poch(1) / poch(2))
            * (poch(2) / poch(1))
            * (ratio(2, 1) * poch(1) / poch(1))
            * (ratio(2, 1) * poch(2) / (poch(1) * poch(1)));
        assert_eq!(weight(&small(), &p).unwrap(), expected);
    }

    #[test]
    fn exact_float_and_log_agree() {
        let p = GibbsParams::new(ratio(1, 3), vec![ratio(3, 2), ratio(1, 2)]).unwrap();
        let exact = Scalar::to_f64(&weight(&small(), &p).unwrap());
        let float = weight(&small(), &p.to_f64()).unwrap();
        let log = log_weight(&small(), &p.to_f64()).unwrap();
        assert!((exact - float).abs() <= 1e-12 * exact);
        assert!((Weight::Log(log).to_f64() - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn empty_states_are_rejected() {
        let p = GibbsParams::homogeneous(ratio(1, 2), 2).unwrap();
        assert!(matches!(measure_table(&[], &p), Err(Error::EmptyStates)));
    }
}
