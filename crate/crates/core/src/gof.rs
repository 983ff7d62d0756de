//! Kolmogorov–Smirnov and Cramér–von Mises goodness-of-fit tests against a
//! fully specified continuous CDF.
//!
//! When the model parameter was estimated from the same data the p-values are
//! approximate (conservative); they are reported the same way regardless.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distribution::{EgdModel, Sample};
use crate::quadrature::Quadrature;

/// Below this sample size KS p-values use the exact finite-n distribution.
pub const KS_EXACT_MAX_N: usize = 100;

const SERIES_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub ks_stat: f64,
    pub ks_p: f64,
    pub cvm_stat: f64,
    pub cvm_p: f64,
    pub n: usize,
}

fn transformed<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Vec<f64> {
    let mut u: Vec<f64> = data.iter().map(|&x| cdf(x)).collect();
    u.sort_by(f64::total_cmp);
    u
}

/// D = maxᵢ max(i/n − uᵢ, uᵢ − (i−1)/n) over sorted probability-integral
/// transforms `u`.
pub fn ks_statistic(sorted_u: &[f64]) -> f64 {
    let n = sorted_u.len() as f64;
    sorted_u
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let i = i as f64;
            ((i + 1.0) / n - u).max(u - i / n)
        })
        .fold(0.0, f64::max)
}

/// W² = 1/(12n) + Σ (uᵢ − (2i−1)/(2n))².
pub fn cvm_statistic(sorted_u: &[f64]) -> f64 {
    let n = sorted_u.len() as f64;
    let sum: f64 = sorted_u
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let d = u - (2.0 * i as f64 + 1.0) / (2.0 * n);
            d * d
        })
        .sum();
    1.0 / (12.0 * n) + sum
}

pub fn ks_test_with<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> TestOutcome {
    let u = transformed(data, cdf);
    let statistic = ks_statistic(&u);
    TestOutcome {
        statistic,
        p_value: ks_p_value(statistic, u.len()),
    }
}

pub fn cvm_test_with<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> TestOutcome {
    let u = transformed(data, cdf);
    let statistic = cvm_statistic(&u);
    TestOutcome {
        statistic,
        p_value: cvm_asymptotic_sf(statistic),
    }
}

pub fn ks_test(data: &Sample, model: &EgdModel) -> TestOutcome {
    ks_test_with(data.values(), |x| model.cdf(x))
}

pub fn cvm_test(data: &Sample, model: &EgdModel) -> TestOutcome {
    cvm_test_with(data.values(), |x| model.cdf(x))
}

pub fn goodness_of_fit(data: &Sample, model: &EgdModel) -> GofResult {
    let ks = ks_test(data, model);
    let cvm = cvm_test(data, model);
    GofResult {
        ks_stat: ks.statistic,
        ks_p: ks.p_value,
        cvm_stat: cvm.statistic,
        cvm_p: cvm.p_value,
        n: data.len(),
    }
}

/// P(D_n ≥ d): exact for n below [`KS_EXACT_MAX_N`], asymptotic otherwise.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    if n < KS_EXACT_MAX_N {
        (1.0 - kolmogorov_exact_cdf(n, d)).clamp(0.0, 1.0)
    } else {
        kolmogorov_asymptotic_sf((n as f64).sqrt() * d)
    }
}

/// Limiting survival function of √n·D_n.
///
/// Uses 2Σ(−1)^(k−1) e^(−2k²z²) for z ≥ 1 and the Jacobi-theta form of the CDF
/// below that, where the alternating series converges slowly.
pub fn kolmogorov_asymptotic_sf(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.0 {
        let mut cdf = 0.0;
        let c = -PI * PI / (8.0 * z * z);
        for k in 1.. {
            let j = (2 * k - 1) as f64;
            let term = (c * j * j).exp();
            cdf += term;
            if term < SERIES_EPS {
                break;
            }
        }
        return (1.0 - (2.0 * PI).sqrt() / z * cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1.. {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * z * z).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < SERIES_EPS {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// P(D_n < d) by the Marsaglia–Tsang–Wang matrix-power method.
pub fn kolmogorov_exact_cdf(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    if d <= 0.5 / nf {
        return 0.0;
    }
    if d >= 1.0 {
        return 1.0;
    }
    let k = (nf * d).floor() as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;

    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                hm[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }

    let (q, mut exp10) = matrix_power(&hm, m, n);
    let mut s = q[(k - 1) * m + (k - 1)];
    for i in 1..=n {
        s = s * i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            exp10 -= 140;
        }
    }
    s * 10f64.powi(exp10)
}

fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                c[i * m + j] += aik * b[k * m + j];
            }
        }
    }
    c
}

/// `a^n` with a running power-of-ten exponent to avoid overflow.
fn matrix_power(a: &[f64], m: usize, n: usize) -> (Vec<f64>, i32) {
    if n == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e) = matrix_power(a, m, n / 2);
    let mut out = matmul(&half, &half, m);
    let mut exp10 = 2 * e;
    if n % 2 == 1 {
        out = matmul(a, &out, m);
    }
    if out[(m / 2) * m + m / 2] > 1e140 {
        for v in out.iter_mut() {
            *v *= 1e-140;
        }
        exp10 += 140;
    }
    (out, exp10)
}

/// K_ν(q) for q > 0 from ∫₀^∞ e^(−q cosh t) cosh(νt) dt.
fn bessel_k(nu: f64, q: f64) -> f64 {
    // beyond t_max the integrand is below e^(−60) relative to its peak
    let t_max = (1.0 + 60.0 / q).acosh() + 1.0;
    Quadrature::with_tolerances(0.0, 1e-13)
        .integrate(|t| (-q * (t.cosh() - 1.0)).exp() * (nu * t).cosh(), 0.0, t_max)
        .map(|i| i.value * (-q).exp())
        .unwrap_or(f64::NAN)
}

/// Limiting CDF of the Cramér–von Mises statistic W² (Anderson–Darling series).
pub fn cvm_asymptotic_cdf(w2: f64) -> f64 {
    if w2 <= 0.0 {
        return 0.0;
    }
    // Γ(k + ½)/Γ(k + 1), starting from √π at k = 0
    let mut ratio = PI.sqrt();
    let mut total = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        let y = 4.0 * kf + 1.0;
        let q = y * y / (16.0 * w2);
        let term = if q > 700.0 {
            0.0
        } else {
            ratio / (PI.powf(1.5) * w2.sqrt()) * y.sqrt() * (-q).exp() * bessel_k(0.25, q)
        };
        total += term;
        if term.abs() < SERIES_EPS {
            break;
        }
        ratio *= (kf + 0.5) / (kf + 1.0);
    }
    total.clamp(0.0, 1.0)
}

pub fn cvm_asymptotic_sf(w2: f64) -> f64 {
    1.0 - cvm_asymptotic_cdf(w2)
}
