//! Machine checks of the stationarity argument.
//!
//! [`s1`] is the total exit rate of a state and [`s2`] the weighted entrance
//! rate; their equality for every state is what makes the Gibbs measure
//! invariant. The other submodules check the per-particle balance, the
//! algebraic identities behind `s1 = s2`, the full vector identity `πL = 0`,
//! and ergodicity together with an explicit connecting path.

mod balance;
mod ergodicity;
mod identity;
mod stationarity;

pub use balance::{balance_sweep, check_balance, reverse_weight_ratio, BalanceCheck, BalanceSummary};
pub use ergodicity::{
    check_ergodicity, connect, connect_from, replay, strongly_connected, ConnectStart,
    ElementaryMove,
};
pub use identity::{
    certify, derivative_terms, derivative_terms_at, derivative_terms_raw, random_identity_check, random_samples, substitutions,
    DerivativeTerms, FrameSample, IdentityReport, RawFrame,
};
pub use stationarity::{
    check_stationarity, check_stationarity_capped, entrance_minus_exit, perturbed_measure,
    stationarity_residuals, StationarityReport,
};

use crate::error::Result;
use crate::gibbs::GibbsParams;
use crate::lattice::Configuration;
use crate::scalar::Scalar;

/// `Σ_p a_{r(p)} (1 - q^B)(1 - q^(D+1)) / (1 - q^(C+1))`.
pub fn s1<S: Scalar>(config: &Configuration, params: &GibbsParams<S>) -> Result<S> {
    let mut total = S::zero();
    for p in config.particles() {
        total = total + crate::dynamics::rate(config, p, params)?;
    }
    Ok(total)
}

/// `Σ_p a_{r(p)+1} (1 - q^(A+1))(1 - q^E) / (1 - q^(F+1))`, rows wrapping.
pub fn s2<S: Scalar>(config: &Configuration, params: &GibbsParams<S>) -> Result<S> {
    let mut total = S::zero();
    for p in config.particles() {
        total = total + entrance_term(config, p, params)?;
    }
    Ok(total)
}

pub(crate) fn entrance_term<S: Scalar>(
    config: &Configuration,
    p: crate::lattice::ParticleRef,
    params: &GibbsParams<S>,
) -> Result<S> {
    let fr = config.frame(p)?;
    let above = config.torus().row_above(p.row);
    Ok(params.activity(above).clone()
        * params.one_minus_q_pow(fr.a as i64 + 1)
        * params.one_minus_q_pow(fr.e as i64)
        / params.one_minus_q_pow(fr.f as i64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_sector;
    use crate::lattice::Sector;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn s1_equals_s2_on_small_sectors() {
        for (sector, a) in [
            (Sector::new(5, 2, 2, 1).unwrap(), vec![ratio(1, 1), ratio(2, 1)]),
            (Sector::new(4, 3, 2, 1).unwrap(), vec![ratio(1, 1), ratio(2, 1), ratio(1, 2)]),
        ] {
            let params = GibbsParams::new(ratio(1, 3), a).unwrap();
            for s in enumerate_sector(&sector).unwrap() {
                assert_eq!(s1(&s, &params).unwrap(), s2(&s, &params).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn zero_q_counts_indicators() {
        let params = GibbsParams::<Rational>::homogeneous(ratio(0, 1), 2).unwrap();
        for s in enumerate_sector(&Sector::new(5, 2, 2, 1).unwrap()).unwrap() {
            let free_b = s.particles().filter(|&p| s.frame(p).unwrap().b >= 1).count();
            let free_e = s.particles().filter(|&p| s.frame(p).unwrap().e >= 1).count();
            assert_eq!(s1(&s, &params).unwrap(), Rational::from_i64(free_b as i64));
            assert_eq!(s2(&s, &params).unwrap(), Rational::from_i64(free_e as i64));
        }
    }
}
