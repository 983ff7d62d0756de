//! The Exponential-Gamma(3, λ) lifetime distribution.
//!
//! f(x) = λ²/(1+λ) · (1 + λx²/2) · e^(−λx),  x > 0.
//!
//! Expanding the density shows it is the mixture
//! `w · Exp(λ) + (1 − w) · Gamma(3, λ)` with exponential weight `w = λ/(1+λ)`,
//! which gives an exact sampler with no inversion or rejection.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted rate. Above this `e^(−λx)` underflows for all but tiny `x`.
pub const MAX_RATE: f64 = 1e6;

/// A strictly positive, finite rate parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Rate(f64);

impl Rate {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= MAX_RATE {
            Ok(Self(value))
        } else {
            Err(Error::InvalidRate(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Rate {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Rate> for f64 {
    fn from(rate: Rate) -> f64 {
        rate.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A nonempty set of strictly positive, finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    label: String,
    values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidObservation { index, value });
        }
        Ok(Self {
            label: label.into(),
            values,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        crate::sum::neumaier(self.values.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Errors unless the sample is large enough for likelihood inference.
    pub fn require_inferable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::TooFewObservations {
                label: self.label.clone(),
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// Which mixture branch produced a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Exponential,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgdModel {
    lambda: Rate,
}

impl EgdModel {
    pub fn new(lambda: Rate) -> Self {
        Self { lambda }
    }

    pub fn with_rate(lambda: f64) -> Result<Self> {
        Rate::new(lambda).map(Self::new)
    }

    #[inline]
    pub fn rate(&self) -> Rate {
        self.lambda
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda.get()
    }

    /// Mixing weight of the exponential component, λ/(1+λ).
    pub fn exponential_weight(&self) -> f64 {
        let l = self.lambda();
        l / (1.0 + l)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let l = self.lambda();
        l * l / (1.0 + l) * (1.0 + 0.5 * l * x * x) * (-l * x).exp()
    }

    /// Log density for `x > 0`, evaluated term by term.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let l = self.lambda();
        2.0 * l.ln() - l.ln_1p() + (0.5 * l * x * x).ln_1p() - l * x
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let l = self.lambda();
        let t = l * x;
        // 2(1+λ)(1 − e^(−t)) − t(t+2)e^(−t), over 2(1+λ)
        let num = -2.0 * (1.0 + l) * (-t).exp_m1() - t * (t + 2.0) * (-t).exp();
        (num / (2.0 * (1.0 + l))).clamp(0.0, 1.0)
    }

    /// Survival function 1 − F(x), accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let l = self.lambda();
        let t = l * x;
        ((t * (t + 2.0) + 2.0 * l + 2.0) * (-t).exp() / (2.0 * (1.0 + l))).min(1.0)
    }

    /// Inverse CDF: bracket by doubling, bisect, then Newton-polish with the density.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        let mut lo = 0.0;
        let mut hi = 1.0 / self.lambda();
        while self.cdf(hi) <= p {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-6 * hi {
                break;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..50 {
            let resid = self.cdf(x) - p;
            if resid.abs() <= 1e-14 {
                break;
            }
            if resid < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let density = self.pdf(x);
            let mut next = x - resid / density;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == x {
                break;
            }
            x = next;
        }
        Ok(x)
    }

    /// (λ+3)/(λ(1+λ)).
    pub fn mean(&self) -> f64 {
        let l = self.lambda();
        (l + 3.0) / (l * (1.0 + l))
    }

    pub fn variance(&self) -> f64 {
        let l = self.lambda();
        let w = self.exponential_weight();
        let second = w * 2.0 / (l * l) + (1.0 - w) * 12.0 / (l * l);
        second - self.mean().powi(2)
    }

    fn exponential<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            // 1 − U lies in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            let x = -u.ln() / self.lambda();
            if x > 0.0 {
                return x;
            }
        }
    }

    /// One draw together with the mixture branch that produced it.
    pub fn draw_with_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, Branch) {
        if rng.random::<f64>() < self.exponential_weight() {
            (self.exponential(rng), Branch::Exponential)
        } else {
            let x = self.exponential(rng) + self.exponential(rng) + self.exponential(rng);
            (x, Branch::Gamma)
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw_with_branch(rng).0
    }

    /// `n` independent draws. Panics if `n == 0`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Sample {
        assert!(n > 0, "sample size must be positive");
        let values = (0..n).map(|_| self.draw(rng)).collect();
        Sample {
            label: String::new(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Quadrature;
    use crate::rng;

    fn model(l: f64) -> EgdModel {
        EgdModel::with_rate(l).unwrap()
    }

    #[test]
    fn rate_rejects_bad_values() {
        for v in [0.0, -1.0, f64::NAN, f64::INFINITY, 2e6] {
            assert!(Rate::new(v).is_err(), "{v}");
        }
        assert!(Rate::new(MAX_RATE).is_ok());
    }

    #[test]
    fn pdf_examples() {
        assert!((model(1.0).pdf(0.0) - 0.5).abs() < 1e-15);
        assert!((model(1.0).pdf(1.0) - 0.75 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((model(1.0).pdf(1.0) - 0.275_909_58).abs() < 1e-8);
        assert!((model(2.0).pdf(0.5) - 0.613_132_4).abs() < 1e-7);
        assert_eq!(model(1.0).pdf(-3.0), 0.0);
    }

    #[test]
    fn log_pdf_examples() {
        assert!((model(1.0).log_pdf(1.0) - (0.75f64.ln() - 1.0)).abs() < 1e-14);
        assert!((model(1.0).log_pdf(1e-300) - 0.5f64.ln()).abs() < 1e-14);
        // (λ/2)x² = 1 here, so the shape term is log 2
        let expected = 2.0 * 0.5f64.ln() - 1.5f64.ln() + 2.0f64.ln() - 1.0;
        assert!((model(0.5).log_pdf(2.0) - expected).abs() < 1e-14);
        for x in [0.01, 0.3, 2.0, 17.0] {
            let m = model(1.3);
            assert!((m.log_pdf(x) - m.pdf(x).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(model(1.5).cdf(0.0), 0.0);
        assert_eq!(model(1.5).cdf(-1.0), 0.0);
        let expected = 1.0 - 7.0 * (-1.0f64).exp() / 4.0;
        assert!((model(1.0).cdf(1.0) - expected).abs() < 1e-15);
        assert!((model(1.0).cdf(1.0) - 0.356_210_98).abs() < 1e-8);
        assert!((model(1.0).cdf(50.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_quadrature_of_pdf() {
        let m = model(1.0);
        let q = Quadrature::default().integrate(|x| m.pdf(x), 0.0, 1.0).unwrap();
        assert!((q.value - m.cdf(1.0)).abs() < 1e-13);
    }

    #[test]
    fn sf_complements_cdf() {
        let m = model(0.7);
        for x in [0.0, 0.1, 1.0, 10.0, 40.0] {
            assert!((m.sf(x) + m.cdf(x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quantile_examples() {
        let m = model(1.0);
        let x = m.quantile(m.cdf(2.0)).unwrap();
        assert!((x - 2.0).abs() < 1e-9);

        // independent bisection on the closed-form CDF
        let (mut lo, mut hi) = (0.0f64, 50.0f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            let f = 1.0 - (mid * (mid + 2.0) + 4.0) * (-mid).exp() / 4.0;
            if f < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let median = m.quantile(0.5).unwrap();
        assert!((median - lo).abs() < 1e-10);
        assert!((m.cdf(median) - 0.5).abs() <= 1e-12);

        let m = model(0.5);
        let x = m.quantile(0.999).unwrap();
        assert!(x.is_finite());
        assert!((m.cdf(x) - 0.999).abs() <= 1e-12);
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        let m = model(1.0);
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(m.quantile(p), Err(Error::InvalidProbability(_))));
        }
    }

    #[test]
    fn mean_examples() {
        assert!((model(1.0).mean() - 2.0).abs() < 1e-15);
        assert!((model(3.0).mean() - 0.5).abs() < 1e-15);
        assert!(model(100.0).mean() < 0.011);
    }

    #[test]
    fn mean_and_variance_match_quadrature() {
        let m = model(0.8);
        let q = Quadrature::default();
        let upper = 80.0 / m.lambda();
        let m1 = q.integrate(|x| x * m.pdf(x), 0.0, upper).unwrap().value;
        let m2 = q.integrate(|x| x * x * m.pdf(x), 0.0, upper).unwrap().value;
        assert!((m1 - m.mean()).abs() < 1e-10);
        assert!((m2 - m1 * m1 - m.variance()).abs() < 1e-9);
    }

    #[test]
    fn sample_is_reproducible() {
        let m = model(1.5);
        let a = m.sample(100_000, &mut rng::seeded(11));
        let b = m.sample(100_000, &mut rng::seeded(11));
        assert_eq!(a.values(), b.values());
        let c = m.sample(100, &mut rng::seeded(12));
        assert_ne!(&a.values()[..100], c.values());
    }

    #[test]
    fn sample_mean_is_close() {
        let m = model(1.0);
        let n = 1_000_000;
        let s = m.sample(n, &mut rng::seeded(2024));
        let se = (m.variance() / n as f64).sqrt();
        assert!((s.mean() - 2.0).abs() < 4.0 * se, "{}", s.mean());
    }

    #[test]
    fn sample_values_are_valid() {
        let s = model(1e5).sample(10_000, &mut rng::seeded(3));
        assert!(s.values().iter().all(|&x| x > 0.0 && x.is_finite()));
    }

    #[test]
    fn sample_rejects_bad_observations() {
        assert!(matches!(Sample::new("x", vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            Sample::new("x", vec![1.0, 0.0]),
            Err(Error::InvalidObservation { index: 1, .. })
        ));
        assert!(Sample::new("x", vec![1.0, f64::NAN]).is_err());
        let one = Sample::new("x", vec![1.0]).unwrap();
        assert!(matches!(
            one.require_inferable(),
            Err(Error::TooFewObservations { len: 1, .. })
        ));
    }
}
