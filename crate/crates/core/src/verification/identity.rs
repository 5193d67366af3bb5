//! The four derivative terms whose pairwise cancellation gives `s1 = s2`.
//!
//! Moving one particle `p` continuously by `s ∈ [0, 1]` changes `s1` by
//! `log q (a_r S10 + a_{r+1} S11)` and `s2` by `log q (a_r S20 + a_{r+1} S21)`.
//! [`derivative_terms_raw`] evaluates the terms from the gaps of `p` and its
//! neighbours; [`derivative_terms`] evaluates them after eliminating the
//! neighbour gaps, leaving `A..F` of `p` plus `B_p1` and `D_p5`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, ParticleRef};
use crate::scalar::{ratio, Rational, Scalar};

/// Gaps of one particle plus the two neighbour gaps that survive elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameSample {
    #[serde(serialize_with = "ser_text")]
    pub q: Rational,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub f: u32,
    pub b_p1: u32,
    pub d_p5: u32,
}

fn ser_text<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl FrameSample {
    /// Whether every eliminated neighbour gap is non-negative, as it is for
    /// gaps read off an actual configuration.
    pub fn is_physical(&self) -> bool {
        self.a >= self.b
            && self.a >= self.f
            && self.d >= self.e
            && self.d >= self.c
            && self.e + self.d_p5 >= self.d
    }

    fn signed(&self) -> [i64; 8] {
        [self.a, self.b, self.c, self.d, self.e, self.f, self.b_p1, self.d_p5].map(i64::from)
    }

    /// Largest exponent of `q` in the substituted terms.
    pub fn max_exponent(&self) -> i64 {
        let [a, b, c, d, e, f, bp1, dp5] = self.signed();
        [
            b,
            d + 1,
            c + 1,
            a + 1,
            bp1,
            a - b + 1,
            f + 1,
            f + e + 1,
            a - f,
            e,
            dp5 + 1,
            d - e + 1,
            b + c + 1,
            d - c,
            a + bp1 - b + 1,
            e + dp5 - d,
        ]
        .into_iter()
        .map(i64::abs)
        .max()
        .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTerms<S> {
    pub s10: S,
    pub s11: S,
    pub s20: S,
    pub s21: S,
}

impl<S: Scalar> DerivativeTerms<S> {
    pub fn first_difference(&self) -> S {
        self.s10.clone() - self.s20.clone()
    }

    pub fn second_difference(&self) -> S {
        self.s11.clone() - self.s21.clone()
    }
}

fn nonzero_denominators(exps: &[i64]) -> Result<()> {
    if let Some(k) = exps.iter().find(|&&k| k == 0) {
        return Err(Error::InvalidParameter(format!(
            "denominator 1 - q^{k} vanishes"
        )));
    }
    Ok(())
}

/// Substituted terms evaluated at `q`.
pub fn derivative_terms_at<S: Scalar>(q: &S, sample: &FrameSample) -> Result<DerivativeTerms<S>> {
    let [a, b, c, d, e, f, bp1, dp5] = sample.signed();
    nonzero_denominators(&[c + 1, a - b + 1, f + 1, d - e + 1])?;
    let p = |k: i64| q.powi(k);
    let om = |k: i64| S::one() - q.powi(k);
    let s10 = p(b) * om(d + 1) / om(c + 1) - p(d + 1) * om(b) / om(c + 1)
        + p(c + 1) * om(b) * om(d + 1) / (om(c + 1) * om(c + 1))
        + p(a + 1) * om(bp1) / om(a - b + 1);
    let s11 = -(p(f + 1) * om(f + e + 1) * om(a - f) / (om(f + 1) * om(f + 1)))
        - p(e) * om(dp5 + 1) / om(d - e + 1);
    let s20 = p(c + 1) * om(b + c + 1) * om(d - c) / (om(c + 1) * om(c + 1))
        + p(b) * om(a + bp1 - b + 1) / om(a - b + 1);
    let s21 = p(a + 1) * om(e) / om(f + 1) - p(e) * om(a + 1) / om(f + 1)
        - p(f + 1) * om(a + 1) * om(e) / (om(f + 1) * om(f + 1))
        - p(d + 1) * om(e + dp5 - d) / om(d - e + 1);
    Ok(DerivativeTerms { s10, s11, s20, s21 })
}

/// Substituted terms at the sample's own `q`.
pub fn derivative_terms(sample: &FrameSample) -> Result<DerivativeTerms<Rational>> {
    derivative_terms_at(&sample.q, sample)
}

/// Gaps of `p` and the neighbour gaps entering the unsubstituted terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RawFrame {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub f: u32,
    pub b_p1: u32,
    pub c_p1: u32,
    pub d_p1: u32,
    pub a_p2: u32,
    pub e_p2: u32,
    pub f_p2: u32,
    pub a_p3: u32,
    pub e_p3: u32,
    pub f_p3: u32,
    pub a_p4: u32,
    pub e_p4: u32,
    pub f_p4: u32,
    pub b_p5: u32,
    pub c_p5: u32,
    pub d_p5: u32,
    pub b_p6: u32,
    pub c_p6: u32,
    pub d_p6: u32,
}

impl RawFrame {
    pub fn of(config: &Configuration, p: ParticleRef) -> Result<Self> {
        let fr = config.frame(p)?;
        let f1 = config.frame(fr.p1)?;
        let f2 = config.frame(fr.p2)?;
        let f3 = config.frame(fr.p3)?;
        let f4 = config.frame(fr.p4)?;
        let f5 = config.frame(fr.p5)?;
        let f6 = config.frame(fr.p6)?;
        Ok(RawFrame {
            a: fr.a,
            b: fr.b,
            c: fr.c,
            d: fr.d,
            e: fr.e,
            f: fr.f,
            b_p1: f1.b,
            c_p1: f1.c,
            d_p1: f1.d,
            a_p2: f2.a,
            e_p2: f2.e,
            f_p2: f2.f,
            a_p3: f3.a,
            e_p3: f3.e,
            f_p3: f3.f,
            a_p4: f4.a,
            e_p4: f4.e,
            f_p4: f4.f,
            b_p5: f5.b,
            c_p5: f5.c,
            d_p5: f5.d,
            b_p6: f6.b,
            c_p6: f6.c,
            d_p6: f6.d,
        })
    }

    pub fn sample(&self, q: Rational) -> FrameSample {
        FrameSample {
            q,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
            e: self.e,
            f: self.f,
            b_p1: self.b_p1,
            d_p5: self.d_p5,
        }
    }
}

/// Each elimination rule as `(name, measured, predicted)`.
pub fn substitutions(raw: &RawFrame) -> Vec<(&'static str, i64, i64)> {
    let [a, b, c, d, e, f] = [raw.a, raw.b, raw.c, raw.d, raw.e, raw.f].map(i64::from);
    let (bp1, dp5) = (i64::from(raw.b_p1), i64::from(raw.d_p5));
    let m = |v: u32| i64::from(v);
    vec![
        ("D_p1 = A", m(raw.d_p1), a),
        ("C_p1 = A - B", m(raw.c_p1), a - b),
        ("C_p6 = F", m(raw.c_p6), f),
        ("D_p6 = E + F", m(raw.d_p6), e + f),
        ("B_p6 = A - F", m(raw.b_p6), a - f),
        ("B_p5 = E", m(raw.b_p5), e),
        ("C_p5 = D - E", m(raw.c_p5), d - e),
        ("A_p4 = D", m(raw.a_p4), d),
        ("F_p4 = D - E", m(raw.f_p4), d - e),
        ("E_p4 = E + D_p5 - D", m(raw.e_p4), e + dp5 - d),
        ("F_p3 = C", m(raw.f_p3), c),
        ("A_p3 = B + C", m(raw.a_p3), b + c),
        ("E_p3 = D - C", m(raw.e_p3), d - c),
        ("E_p2 = B", m(raw.e_p2), b),
        ("F_p2 = A - B", m(raw.f_p2), a - b),
        ("A_p2 = A + B_p1 - B", m(raw.a_p2), a + bp1 - b),
    ]
}

/// Unsubstituted terms, read from the neighbour gaps directly.
pub fn derivative_terms_raw<S: Scalar>(q: &S, raw: &RawFrame) -> Result<DerivativeTerms<S>> {
    let g = |v: u32| i64::from(v);
    nonzero_denominators(&[
        g(raw.c) + 1,
        g(raw.c_p1) + 1,
        g(raw.c_p6) + 1,
        g(raw.c_p5) + 1,
        g(raw.f_p3) + 1,
        g(raw.f_p2) + 1,
        g(raw.f) + 1,
        g(raw.f_p4) + 1,
    ])?;
    let p = |k: u32| q.powi(g(k));
    let p1 = |k: u32| q.powi(g(k) + 1);
    let om = |k: u32| S::one() - q.powi(g(k));
    let om1 = |k: u32| S::one() - q.powi(g(k) + 1);
    let s10 = p(raw.b) * om1(raw.d) / om1(raw.c) - p1(raw.d) * om(raw.b) / om1(raw.c)
        + p1(raw.c) * om(raw.b) * om1(raw.d) / (om1(raw.c) * om1(raw.c))
        + p1(raw.d_p1) * om(raw.b_p1) / om1(raw.c_p1);
    let s11 = -(p1(raw.c_p6) * om1(raw.d_p6) * om(raw.b_p6) / (om1(raw.c_p6) * om1(raw.c_p6)))
        - p(raw.b_p5) * om1(raw.d_p5) / om1(raw.c_p5);
    let s20 = p1(raw.f_p3) * om1(raw.a_p3) * om(raw.e_p3) / (om1(raw.f_p3) * om1(raw.f_p3))
        + p(raw.e_p2) * om1(raw.a_p2) / om1(raw.f_p2);
    let s21 = p1(raw.a) * om(raw.e) / om1(raw.f) - p(raw.e) * om1(raw.a) / om1(raw.f)
        - p1(raw.f) * om1(raw.a) * om(raw.e) / (om1(raw.f) * om1(raw.f))
        - p1(raw.a_p4) * om(raw.e_p4) / om1(raw.f_p4);
    Ok(DerivativeTerms { s10, s11, s20, s21 })
}

/// Proves both cancellations for the integers of `sample`, for every `q`.
///
/// After clearing the common denominator of each difference, which has at
/// most three factors `1 - q^k`, every term is a polynomial of degree at most
/// `5M` with `M` the largest exponent. A polynomial of that degree vanishing
/// at `6M + 1` distinct points of `(0, 1)` vanishes identically, so the check
/// evaluates at `q = 1/2, 1/3, ...`. Only physical samples are accepted,
/// which keeps every exponent non-negative.
pub fn certify(sample: &FrameSample) -> Result<bool> {
    if !sample.is_physical() {
        return Err(Error::InvalidParameter(
            "certification needs non-negative eliminated gaps".into(),
        ));
    }
    let points = 6 * sample.max_exponent() + 1;
    for k in 0..points {
        let q = ratio(1, k + 2);
        let t = derivative_terms_at(&q, sample)?;
        if !Scalar::is_zero(&t.first_difference()) || !Scalar::is_zero(&t.second_difference()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub max_int: u32,
    pub q_values: Vec<String>,
    pub seed: u64,
    pub first_failures: usize,
    pub second_failures: usize,
    pub counterexample: Option<FrameSample>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.first_failures == 0 && self.second_failures == 0
    }
}

/// Physical samples with integers in `[0, max_int]` and `q` drawn from `qs`.
pub fn random_samples(
    count: usize,
    max_int: u32,
    qs: &[Rational],
    seed: u64,
) -> Result<Vec<FrameSample>> {
    if qs.is_empty() {
        return Err(Error::InvalidParameter("no q values given".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || rng.random_range(0..=max_int);
        let s = FrameSample {
            q: Rational::from_i64(0),
            a: draw(),
            b: draw(),
            c: draw(),
            d: draw(),
            e: draw(),
            f: draw(),
            b_p1: draw(),
            d_p5: draw(),
        };
        if s.is_physical() {
            out.push(FrameSample {
                q: qs[rng.random_range(0..qs.len())].clone(),
                ..s
            });
        }
    }
    Ok(out)
}

/// Evaluates both differences exactly on [`random_samples`].
pub fn random_identity_check(
    samples: usize,
    max_int: u32,
    qs: &[Rational],
    seed: u64,
) -> Result<IdentityReport> {
    let mut report = IdentityReport {
        samples,
        max_int,
        q_values: qs.iter().map(ToString::to_string).collect(),
        seed,
        first_failures: 0,
        second_failures: 0,
        counterexample: None,
    };
    for sample in random_samples(samples, max_int, qs, seed)? {
        let t = derivative_terms(&sample)?;
        let first = !Scalar::is_zero(&t.first_difference());
        let second = !Scalar::is_zero(&t.second_difference());
        report.first_failures += first as usize;
        report.second_failures += second as usize;
        if (first || second) && report.counterexample.is_none() {
            report.counterexample = Some(sample);
        }
    }
    Ok(report)
}
