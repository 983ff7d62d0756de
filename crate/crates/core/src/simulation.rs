//! Monte Carlo study of the rate estimators and the reliability interval.
//!
//! Each replication draws its samples from its own random stream keyed by
//! `(master_seed, λ₁, λ₂, n, m, replication)`. Replications run in parallel, but their
//! outcomes are aggregated in replication order with compensated sums, so the
//! output is identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{EgdModel, Rate};
use crate::error::{Error, Result};
use crate::inference::{fit_mle, fit_mle_with, moment_estimate, FitOptions, FitResult, ReliabilityEstimate};
use crate::reliability::{r_closed_form, ParamPair};
use crate::rng;
use crate::sum::neumaier;

pub const DEFAULT_REPLICATIONS: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;

/// Sample sizes (n = m) of the reference study.
pub const STUDY_SIZES: [usize; 6] = [10, 15, 25, 30, 50, 75];

/// (λ₁, λ₂) pairs of the reference study.
pub const STUDY_PARAMS: [(f64, f64); 3] = [(0.5, 1.5), (1.0, 1.5), (1.0, 0.5)];

/// A cell is flagged unreliable when at least this fraction of replications fail.
pub const UNRELIABLE_FAILURE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub lambda1: Rate,
    pub lambda2: Rate,
    pub sizes: Vec<(usize, usize)>,
    pub replications: usize,
    pub level: f64,
    pub master_seed: u64,
}

impl SimulationSpec {
    pub fn new(lambda1: f64, lambda2: f64, sizes: Vec<(usize, usize)>, master_seed: u64) -> Result<Self> {
        let spec = Self {
            lambda1: Rate::new(lambda1)?,
            lambda2: Rate::new(lambda2)?,
            sizes,
            replications: DEFAULT_REPLICATIONS,
            level: DEFAULT_LEVEL,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidSpec("replications must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidSpec("no sample sizes given".into()));
        }
        if let Some(&(n, m)) = self.sizes.iter().find(|&&(n, m)| n < 2 || m < 2) {
            return Err(Error::InvalidSpec(format!(
                "sample sizes must be at least 2, got ({n}, {m})"
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidLevel(self.level));
        }
        Ok(())
    }

    pub fn params(&self) -> ParamPair {
        ParamPair::from_rates(self.lambda1, self.lambda2)
    }
}

/// Replication mean of a quantity together with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McMean {
    pub mean: f64,
    pub se: f64,
}

impl McMean {
    fn of(values: &[f64]) -> Self {
        let k = values.len() as f64;
        let mean = neumaier(values.iter().copied()) / k;
        let se = if values.len() > 1 {
            let ss = neumaier(values.iter().map(|v| (v - mean) * (v - mean)));
            (ss / (k - 1.0)).sqrt() / k.sqrt()
        } else {
            0.0
        };
        Self { mean, se }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub n: usize,
    pub m: usize,
    pub mean_l1: f64,
    pub bias_l1: f64,
    pub mse_l1: f64,
    pub mean_l2: f64,
    pub bias_l2: f64,
    pub mse_l2: f64,
    /// Average of the per-replication (unclipped) interval endpoints.
    pub r_ci_low: f64,
    pub r_ci_high: f64,
    pub mean_r: f64,
    pub failures: usize,
    pub unreliable: bool,
    /// Monte Carlo standard errors of `mean_l1`, `mse_l1`, `mean_l2`, `mse_l2`.
    pub se_mean_l1: f64,
    pub se_mse_l1: f64,
    pub se_mean_l2: f64,
    pub se_mse_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTable {
    pub lambda1: f64,
    pub lambda2: f64,
    pub true_r: f64,
    pub replications: usize,
    pub level: f64,
    pub seed: u64,
    pub rows: Vec<SimulationRow>,
}

impl SimulationTable {
    pub fn unreliable_cells(&self) -> impl Iterator<Item = &SimulationRow> {
        self.rows.iter().filter(|r| r.unreliable)
    }
}

struct Replication {
    lambda1: f64,
    lambda2: f64,
    ci_low: f64,
    ci_high: f64,
    r_hat: f64,
}

fn fit_with_retry(data: &crate::distribution::Sample) -> Option<FitResult> {
    fit_mle(data).ok().or_else(|| {
        let opts = FitOptions {
            start: Some(2.0 * moment_estimate(data.mean())),
            ..FitOptions::default()
        };
        fit_mle_with(data, &opts).ok()
    })
}

fn replicate(spec: &SimulationSpec, n: usize, m: usize, r: u64) -> Option<Replication> {
    let cell = [
        spec.lambda1.get().to_bits(),
        spec.lambda2.get().to_bits(),
        n as u64,
        m as u64,
    ];
    let mut rng = rng::substream(spec.master_seed, &cell, r);
    let x = EgdModel::new(spec.lambda1).sample(n, &mut rng);
    let y = EgdModel::new(spec.lambda2).sample(m, &mut rng);
    let fx = fit_with_retry(&x)?;
    let fy = fit_with_retry(&y)?;
    let est = ReliabilityEstimate::from_fits(&fx, &fy, spec.level).ok()?;
    Some(Replication {
        lambda1: fx.lambda_hat.get(),
        lambda2: fy.lambda_hat.get(),
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        r_hat: est.r_hat,
    })
}

/// Runs every replication of one (n, m) cell.
pub fn run_cell(spec: &SimulationSpec, n: usize, m: usize) -> Result<SimulationRow> {
    spec.validate()?;
    if n < 2 || m < 2 {
        return Err(Error::InvalidSpec(format!(
            "sample sizes must be at least 2, got ({n}, {m})"
        )));
    }
    let outcomes: Vec<Option<Replication>> = (0..spec.replications as u64)
        .into_par_iter()
        .map(|r| replicate(spec, n, m, r))
        .collect();
    let ok: Vec<&Replication> = outcomes.iter().flatten().collect();
    let failures = outcomes.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::CellFailed { n, m });
    }

    let l1 = spec.lambda1.get();
    let l2 = spec.lambda2.get();
    let est1: Vec<f64> = ok.iter().map(|o| o.lambda1).collect();
    let est2: Vec<f64> = ok.iter().map(|o| o.lambda2).collect();
    let sq1: Vec<f64> = est1.iter().map(|e| (e - l1) * (e - l1)).collect();
    let sq2: Vec<f64> = est2.iter().map(|e| (e - l2) * (e - l2)).collect();
    let mean1 = McMean::of(&est1);
    let mean2 = McMean::of(&est2);
    let mse1 = McMean::of(&sq1);
    let mse2 = McMean::of(&sq2);
    let avg = |f: fn(&Replication) -> f64| neumaier(ok.iter().map(|o| f(o))) / ok.len() as f64;

    Ok(SimulationRow {
        n,
        m,
        mean_l1: mean1.mean,
        bias_l1: mean1.mean - l1,
        mse_l1: mse1.mean,
        mean_l2: mean2.mean,
        bias_l2: mean2.mean - l2,
        mse_l2: mse2.mean,
        r_ci_low: avg(|o| o.ci_low),
        r_ci_high: avg(|o| o.ci_high),
        mean_r: avg(|o| o.r_hat),
        failures,
        unreliable: failures as f64 >= UNRELIABLE_FAILURE_FRACTION * spec.replications as f64,
        se_mean_l1: mean1.se,
        se_mse_l1: mse1.se,
        se_mean_l2: mean2.se,
        se_mse_l2: mse2.se,
    })
}

pub fn run_table(spec: &SimulationSpec) -> Result<SimulationTable> {
    spec.validate()?;
    let rows = spec
        .sizes
        .iter()
        .map(|&(n, m)| run_cell(spec, n, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationTable {
        lambda1: spec.lambda1.get(),
        lambda2: spec.lambda2.get(),
        true_r: r_closed_form(&spec.params()),
        replications: spec.replications,
        level: spec.level,
        seed: spec.master_seed,
        rows,
    })
}

/// The spec of reference table `index` (1, 2 or 3).
pub fn study_spec(index: usize, seed: u64, replications: usize) -> Result<SimulationSpec> {
    let &(l1, l2) = index
        .checked_sub(1)
        .and_then(|i| STUDY_PARAMS.get(i))
        .ok_or_else(|| Error::InvalidSpec(format!("no reference table {index}")))?;
    let sizes = STUDY_SIZES.iter().map(|&s| (s, s)).collect();
    Ok(SimulationSpec::new(l1, l2, sizes, seed)?.with_replications(replications))
}

/// All three reference tables with the default replication count.
pub fn run_tables(seed: u64) -> Result<Vec<SimulationTable>> {
    run_tables_with(seed, DEFAULT_REPLICATIONS)
}

pub fn run_tables_with(seed: u64, replications: usize) -> Result<Vec<SimulationTable>> {
    (1..=STUDY_PARAMS.len())
        .map(|i| run_table(&study_spec(i, seed, replications)?))
        .collect()
}
