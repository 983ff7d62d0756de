//! Stress-strength reliability R = P(X > Y) when strength and stress both
//! follow the Exponential-Gamma(3, λ) lifetime distribution.
//!
//! The crate covers the distribution itself, the closed-form reliability and
//! its gradient, maximum-likelihood fitting with delta-method intervals,
//! Kolmogorov–Smirnov / Cramér–von Mises goodness of fit, and a deterministic
//! Monte Carlo harness.

pub mod datasets;
pub mod distribution;
pub mod error;
pub mod gof;
pub mod inference;
pub mod normal;
pub mod quadrature;
pub mod reference;
pub mod reliability;
pub mod rng;
pub mod simulation;
pub mod sum;

pub use distribution::{Branch, EgdModel, Rate, Sample};
pub use error::{Error, Result};
pub use gof::{goodness_of_fit, GofResult, TestOutcome};
pub use inference::{
    estimate_r, expected_information, fit_mle, log_likelihood, neg_hessian, score, FitDiagnostics,
    FitOptions, FitResult, ReliabilityAnalysis, ReliabilityEstimate,
};
pub use reliability::{r_closed_form, r_gradient, r_numeric_oracle, ParamPair, RGradient};
pub use simulation::{run_cell, run_table, run_tables, SimulationRow, SimulationSpec, SimulationTable};
