//! Turning `--q` and `--a` strings into exact or floating parameters.
//!
//! `p/r` is exact and a decimal is a float. A bare integer carries no
//! precision and follows the others. Writing both `p/r` and a decimal in one
//! invocation is refused.

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::scalar::{Rational, ScalarInput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Debug)]
pub enum Params {
    Exact(GibbsParams<Rational>),
    Float(GibbsParams<f64>),
}

impl Params {
    pub fn mode(&self) -> Mode {
        match self {
            Params::Exact(_) => Mode::Rational,
            Params::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> GibbsParams<f64> {
        match self {
            Params::Exact(p) => p.to_f64(),
            Params::Float(p) => p.clone(),
        }
    }
}

/// Splits `1,2,1/2` into its entries; an absent list means all ones.
pub fn activity_strings(a: Option<&str>, n: u32) -> Vec<String> {
    match a {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => vec!["1".to_string(); n as usize],
    }
}

pub fn parse_params(q: &str, a: &[String], requested: Option<Mode>) -> Result<Params> {
    let texts: Vec<&str> = std::iter::once(q).chain(a.iter().map(String::as_str)).collect();
    let inputs = texts
        .iter()
        .map(|t| t.parse::<ScalarInput>())
        .collect::<Result<Vec<_>>>()?;
    let has_fraction = texts.iter().any(|t| t.contains('/'));
    let has_decimal = inputs.iter().any(|i| matches!(i, ScalarInput::Float(_)));
    if has_fraction && has_decimal {
        return Err(Error::InvalidParameter(
            "mixing p/r fractions with decimals is ambiguous; write all values in one form".into(),
        ));
    }
    let mode = match (requested, has_decimal) {
        (Some(Mode::Rational), true) => {
            return Err(Error::InvalidParameter(
                "--mode rational needs exact inputs (p/r or integers), not decimals".into(),
            ))
        }
        (Some(m), _) => m,
        (None, true) => Mode::Float,
        (None, false) => Mode::Rational,
    };
    let (q, a) = inputs.split_first().expect("q is always present");
    Ok(match mode {
        Mode::Rational => Params::Exact(GibbsParams::new(
            q.to_rational().expect("exact input"),
            a.iter().map(|x| x.to_rational().expect("exact input")).collect(),
        )?),
        Mode::Float => Params::Float(GibbsParams::new(
            q.to_f64(),
            a.iter().map(ScalarInput::to_f64).collect(),
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fractions_are_exact_and_decimals_float() {
        assert_eq!(parse_params("1/2", &strs(&["1", "1"]), None).unwrap().mode(), Mode::Rational);
        assert_eq!(parse_params("0.5", &strs(&["1", "1"]), None).unwrap().mode(), Mode::Float);
        assert_eq!(parse_params("0", &strs(&["1", "2"]), None).unwrap().mode(), Mode::Rational);
    }

    #[test]
    fn mixing_is_refused() {
        assert!(parse_params("1/2", &strs(&["0.5", "1"]), None).is_err());
        assert!(parse_params("0.5", &strs(&["1", "1"]), Some(Mode::Rational)).is_err());
    }

    #[test]
    fn exact_inputs_may_run_in_float() {
        let p = parse_params("1/2", &strs(&["1", "1"]), Some(Mode::Float)).unwrap();
        assert_eq!(p.mode(), Mode::Float);
    }

    #[test]
    fn out_of_range_q_is_refused() {
        assert!(parse_params("1", &strs(&["1"]), None).is_err());
        assert!(parse_params("-1/2", &strs(&["1"]), None).is_err());
    }
}
