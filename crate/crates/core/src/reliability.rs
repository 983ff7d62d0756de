//! Stress-strength reliability R = P(X > Y) for independent
//! X ~ EGD(3, λ₁) (strength) and Y ~ EGD(3, λ₂) (stress).

use serde::{Deserialize, Serialize};

use crate::distribution::{EgdModel, Rate};
use crate::error::Result;
use crate::quadrature::{Integral, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    /// Strength rate.
    pub lambda1: Rate,
    /// Stress rate.
    pub lambda2: Rate,
}

impl ParamPair {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        Ok(Self {
            lambda1: Rate::new(lambda1)?,
            lambda2: Rate::new(lambda2)?,
        })
    }

    pub fn from_rates(lambda1: Rate, lambda2: Rate) -> Self {
        Self { lambda1, lambda2 }
    }

    /// Exchanges the roles of strength and stress.
    pub fn swapped(self) -> Self {
        Self {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
        }
    }
}

/// Partial derivatives of R with respect to (λ₁, λ₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RGradient {
    pub d1: f64,
    pub d2: f64,
}

/// The five terms of 1 − R, each paired with the partial derivatives of its
/// logarithm.
///
/// With s = λ₁+λ₂, A = 1+λ₁, B = 1+λ₂:
///
/// ```text
/// T1 = λ₁²(λ₂² + λ₁λ₂ + λ₁) / (A B s³)
/// T2 = λ₁²λ₂ / (A B s²)
/// T3 = λ₁² / (A s)
/// T4 = 6λ₁³λ₂² / (A B s⁵)
/// T5 = 3λ₁³λ₂ / (A B s⁴)
/// ```
fn loss_terms(a: f64, b: f64) -> [(f64, f64, f64); 5] {
    let s = a + b;
    let ia = 1.0 / (1.0 + a);
    let ib = 1.0 / (1.0 + b);
    let is = 1.0 / s;
    let a2 = a * a;
    let a3 = a2 * a;
    let q = b * b + a * b + a;
    let common = a2 * ia * ib;

    let t1 = common * q * is.powi(3);
    let t2 = common * b * is.powi(2);
    let t3 = a2 * ia * is;
    let t4 = 6.0 * a3 * b * b * ia * ib * is.powi(5);
    let t5 = 3.0 * a3 * b * ia * ib * is.powi(4);

    [
        (
            t1,
            2.0 / a + (b + 1.0) / q - ia - 3.0 * is,
            (2.0 * b + a) / q - ib - 3.0 * is,
        ),
        (t2, 2.0 / a - ia - 2.0 * is, 1.0 / b - ib - 2.0 * is),
        (t3, 2.0 / a - ia - is, -is),
        (t4, 3.0 / a - ia - 5.0 * is, 2.0 / b - ib - 5.0 * is),
        (t5, 3.0 / a - ia - 4.0 * is, 1.0 / b - ib - 4.0 * is),
    ]
}

/// Closed-form R = P(X > Y).
pub fn r_closed_form(params: &ParamPair) -> f64 {
    let terms = loss_terms(params.lambda1.get(), params.lambda2.get());
    1.0 - terms.iter().map(|t| t.0).sum::<f64>()
}

/// Exact gradient of [`r_closed_form`].
pub fn r_gradient(params: &ParamPair) -> RGradient {
    let terms = loss_terms(params.lambda1.get(), params.lambda2.get());
    let (mut d1, mut d2) = (0.0, 0.0);
    for (t, dl1, dl2) in terms {
        d1 -= t * dl1;
        d2 -= t * dl2;
    }
    RGradient { d1, d2 }
}

/// R computed as ∫₀^∞ f_X(x) F_Y(x) dx by adaptive quadrature.
///
/// The range is truncated at U where the strength survival function, which
/// bounds the discarded tail, is below 1e-15. The returned error estimate
/// includes that bound.
pub fn r_numeric_integral(params: &ParamPair) -> Result<Integral> {
    let strength = EgdModel::new(params.lambda1);
    let stress = EgdModel::new(params.lambda2);
    let mut upper = 40.0 / params.lambda1.get().min(params.lambda2.get());
    while strength.sf(upper) > 1e-15 {
        upper *= 1.25;
    }
    let tail = strength.sf(upper);
    let quad = Quadrature::with_tolerances(1e-12, 0.0);
    let mut integral = quad.integrate(|x| strength.pdf(x) * stress.cdf(x), 0.0, upper)?;
    integral.error += tail;
    Ok(integral)
}

pub fn r_numeric_oracle(params: &ParamPair) -> Result<f64> {
    r_numeric_integral(params).map(|i| i.value)
}
