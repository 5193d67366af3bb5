use serde::Serialize;

use super::entrance_term;
use crate::dynamics::{reverse_move, Family};
use crate::error::{Error, Result};
use crate::gibbs::{weight, GibbsParams};
use crate::lattice::{Configuration, ParticleRef};
use crate::scalar::Scalar;

/// Both sides of the per-particle balance
/// `π(η_p)/π(η) · L(η_p, η) = a_{r(p)+1} (1 - q^(A+1))(1 - q^E) / (1 - q^(F+1))`.
#[derive(Clone, Debug)]
pub struct BalanceCheck<S> {
    pub particle: ParticleRef,
    pub lhs: S,
    pub rhs: S,
    /// Whether `η_p` exists; when it does not, `lhs` is zero.
    pub has_predecessor: bool,
}

impl<S: Scalar> BalanceCheck<S> {
    pub fn difference(&self) -> S {
        (self.lhs.clone() - self.rhs.clone()).abs()
    }

    /// Exact equality, or relative difference below `tol` for floats.
    pub fn holds(&self, tol: f64) -> bool {
        if S::EXACT {
            return self.lhs == self.rhs;
        }
        let scale = self.lhs.to_f64().abs().max(self.rhs.to_f64().abs()).max(1.0);
        self.difference().to_f64() / scale <= tol
    }
}

/// Balance for one particle, computing `π(η_p)/π(η)` from the full weights.
/// Fails when `η_p` is not an interlaced configuration.
pub fn check_balance<S: Scalar>(
    config: &Configuration,
    p: ParticleRef,
    params: &GibbsParams<S>,
) -> Result<BalanceCheck<S>> {
    let check = balance_or_zero(config, p, params, &weight(config, params)?)?;
    if !check.has_predecessor {
        return Err(Error::MissingPredecessor {
            row: p.row,
            label: p.label,
        });
    }
    Ok(check)
}

fn balance_or_zero<S: Scalar>(
    config: &Configuration,
    p: ParticleRef,
    params: &GibbsParams<S>,
    w_eta: &S,
) -> Result<BalanceCheck<S>> {
    let rhs = entrance_term(config, p, params)?;
    match reverse_move(config, p, params)? {
        Some(rm) => {
            let lhs = weight(&rm.predecessor, params)? / w_eta.clone() * rm.rate;
            Ok(BalanceCheck {
                particle: p,
                lhs,
                rhs,
                has_predecessor: true,
            })
        }
        None => Ok(BalanceCheck {
            particle: p,
            lhs: S::zero(),
            rhs,
            has_predecessor: false,
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceSummary {
    pub pairs: usize,
    pub with_predecessor: usize,
    pub failures: usize,
    pub max_difference: String,
    /// First failing pair as `(state, particle)`.
    pub counterexample: Option<(String, String)>,
}

/// Balance on every `(state, particle)` pair; a particle without predecessor
/// contributes `lhs = 0`, so its `rhs` must vanish too.
pub fn balance_sweep<S: Scalar>(
    states: &[Configuration],
    params: &GibbsParams<S>,
    tol: f64,
) -> Result<BalanceSummary> {
    let mut summary = BalanceSummary {
        pairs: 0,
        with_predecessor: 0,
        failures: 0,
        max_difference: S::zero().to_text(),
        counterexample: None,
    };
    let mut max = S::zero();
    for s in states {
        let w = weight(s, params)?;
        for p in s.particles() {
            let check = balance_or_zero(s, p, params, &w)?;
            summary.pairs += 1;
            summary.with_predecessor += check.has_predecessor as usize;
            let d = check.difference();
            if d > max {
                max = d;
            }
            if !check.holds(tol) {
                summary.failures += 1;
                if summary.counterexample.is_none() {
                    summary.counterexample = Some((s.to_string(), p.to_string()));
                }
            }
        }
    }
    summary.max_difference = max.to_text();
    Ok(summary)
}

/// Closed form of `π(η_p)/π(η)` for the left shift of the down-family
/// `family` (members from `p` downwards), with gaps read in `η`:
/// `a_{r(p)+1}/a_{r(low)} (1 - q^C_low)/(1 - q^(F_p+1))
///  ∏_j (1 - q^(A_j+1))(1 - q^E_j) / ((1 - q^D_j)(1 - q^(B_j+1)))`.
pub fn reverse_weight_ratio<S: Scalar>(
    config: &Configuration,
    family: &Family,
    params: &GibbsParams<S>,
) -> Result<S> {
    let top = family.root();
    let low = family.extreme();
    let ft = config.frame(top)?;
    let fl = config.frame(low)?;
    let mut r = params.activity(config.torus().row_above(top.row)).clone()
        / params.activity(low.row).clone()
        * params.one_minus_q_pow(fl.c as i64)
        / params.one_minus_q_pow(ft.f as i64 + 1);
    for &m in &family.members {
        let fm = config.frame(m)?;
        r = r * params.one_minus_q_pow(fm.a as i64 + 1) * params.one_minus_q_pow(fm.e as i64)
            / (params.one_minus_q_pow(fm.d as i64) * params.one_minus_q_pow(fm.b as i64 + 1));
    }
    Ok(r)
}
