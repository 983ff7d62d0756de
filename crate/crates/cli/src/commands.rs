use anyhow::{Context, Result};
use egdss_core::reference::{self, TableRow};
use egdss_core::reliability::{r_closed_form, r_numeric_oracle, ParamPair};
use egdss_core::simulation::{run_table, study_spec, SimulationSpec, SimulationTable, DEFAULT_REPLICATIONS};
use egdss_core::{estimate_r, fit_mle, goodness_of_fit, EgdModel, FitResult, GofResult};
use serde::Serialize;
use serde_json::Value;

use crate::input::{load, InputRecord};
use crate::output::{pairs, sig, table};

/// A finished command: the JSON payload plus its text and CSV renderings.
pub struct Report {
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub result: Value,
    pub text: String,
    pub csv: String,
}

fn csv_of(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut cells = Vec::new();
    walk("", value, &mut cells);
    let (keys, vals): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn report<T: Serialize>(inputs: Vec<InputRecord>, seed: Option<u64>, result: &T, text: String) -> Result<Report> {
    let result = serde_json::to_value(result)?;
    let csv = csv_of(&result);
    Ok(Report { inputs, seed, result, text, csv })
}

fn fit_lines(fit: &FitResult) -> Vec<(&'static str, String)> {
    vec![
        ("lambda_hat", sig(fit.lambda_hat.get())),
        ("std_err", sig(fit.std_err)),
        ("loglik", sig(fit.loglik)),
        ("score", sig(fit.score_at_mle)),
        ("observed_info", sig(fit.observed_info)),
        ("iterations", fit.iterations.to_string()),
        ("converged", fit.converged.to_string()),
    ]
}

pub fn fit(data: &str) -> Result<Report> {
    let input = load(data, "data").context("input")?;
    let fit = fit_mle(&input.sample).context("fit")?;
    let mut lines = vec![("data", format!("{data} (n = {})", fit.n))];
    lines.extend(fit_lines(&fit));
    report(vec![input.record], None, &fit, pairs(&lines))
}

#[derive(Serialize)]
struct ReliabilityReport {
    lambda1: f64,
    lambda2: f64,
    r_closed_form: f64,
    r_quadrature: f64,
    abs_diff: f64,
}

pub fn reliability(lambda1: f64, lambda2: f64) -> Result<Report> {
    let params = ParamPair::new(lambda1, lambda2).context("parameters")?;
    let r = r_closed_form(&params);
    let q = r_numeric_oracle(&params).context("quadrature")?;
    let rep = ReliabilityReport {
        lambda1,
        lambda2,
        r_closed_form: r,
        r_quadrature: q,
        abs_diff: (r - q).abs(),
    };
    let text = pairs(&[
        ("lambda1", sig(lambda1)),
        ("lambda2", sig(lambda2)),
        ("R (closed form)", sig(r)),
        ("R (quadrature)", sig(q)),
        ("|difference|", sig(rep.abs_diff)),
    ]);
    report(vec![], None, &rep, text)
}

pub fn estimate(strength: &str, stress: &str, level: f64) -> Result<Report> {
    let x = load(strength, "strength").context("strength input")?;
    let y = load(stress, "stress").context("stress input")?;
    let a = estimate_r(&x.sample, &y.sample, level).context("estimation")?;
    let e = &a.estimate;
    let text = pairs(&[
        ("strength", format!("{strength} (n = {})", a.strength.n)),
        ("stress", format!("{stress} (n = {})", a.stress.n)),
        ("lambda1_hat", sig(e.lambda1_hat)),
        ("lambda2_hat", sig(e.lambda2_hat)),
        ("R_hat", sig(e.r_hat)),
        ("avar", sig(e.avar)),
        ("level", sig(e.level)),
        ("ci", format!("({}, {})", sig(e.ci_low), sig(e.ci_high))),
    ]);
    report(vec![x.record, y.record], None, &a, text)
}

#[derive(Serialize)]
struct GofReport {
    lambda_hat: f64,
    #[serde(flatten)]
    gof: GofResult,
}

pub fn gof(data: &str) -> Result<Report> {
    let input = load(data, "data").context("input")?;
    let fit = fit_mle(&input.sample).context("fit")?;
    let g = goodness_of_fit(&input.sample, &EgdModel::new(fit.lambda_hat));
    let text = pairs(&[
        ("data", format!("{data} (n = {})", g.n)),
        ("lambda_hat", sig(fit.lambda_hat.get())),
        ("KS", sig(g.ks_stat)),
        ("KS p-value", sig(g.ks_p)),
        ("CvM", sig(g.cvm_stat)),
        ("CvM p-value", sig(g.cvm_p)),
    ]);
    let rep = GofReport {
        lambda_hat: fit.lambda_hat.get(),
        gof: g,
    };
    report(vec![input.record], None, &rep, text)
}

pub const SIMULATION_CSV_HEADER: &str =
    "n,m,mean_l1,bias_l1,mse_l1,mean_l2,bias_l2,mse_l2,r_ci_low,r_ci_high,failures";

fn simulation_text(t: &SimulationTable) -> String {
    let header = [
        "n", "m", "mean_l1", "bias_l1", "mse_l1", "mean_l2", "bias_l2", "mse_l2", "r_ci_low", "r_ci_high",
        "failures",
    ];
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.m.to_string(),
                sig(r.mean_l1),
                sig(r.bias_l1),
                sig(r.mse_l1),
                sig(r.mean_l2),
                sig(r.bias_l2),
                sig(r.mse_l2),
                sig(r.r_ci_low),
                sig(r.r_ci_high),
                format!("{}{}", r.failures, if r.unreliable { " *" } else { "" }),
            ]
        })
        .collect();
    let mut out = format!(
        "lambda1 = {}, lambda2 = {}, R = {}, replications = {}, level = {}, seed = {}\n",
        sig(t.lambda1),
        sig(t.lambda2),
        sig(t.true_r),
        t.replications,
        sig(t.level),
        t.seed
    );
    out.push_str(&table(&header, &rows));
    if t.unreliable_cells().next().is_some() {
        out.push_str("* unreliable cell: too many failed fits\n");
    }
    out
}

fn simulation_csv(t: &SimulationTable) -> String {
    let mut out = format!("{SIMULATION_CSV_HEADER}\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n, r.m, r.mean_l1, r.bias_l1, r.mse_l1, r.mean_l2, r.bias_l2, r.mse_l2, r.r_ci_low, r.r_ci_high,
            r.failures
        ));
    }
    out
}

pub fn simulate(
    lambda1: f64,
    lambda2: f64,
    sizes: Vec<(usize, usize)>,
    reps: usize,
    level: f64,
    seed: u64,
) -> Result<Report> {
    let spec = SimulationSpec::new(lambda1, lambda2, sizes, seed)
        .map(|s| s.with_replications(reps).with_level(level))
        .and_then(|s| s.validate().map(|()| s))
        .context("simulation setup")?;
    let t = run_table(&spec).context("simulation")?;
    Ok(Report {
        inputs: vec![],
        seed: Some(seed),
        result: serde_json::to_value(&t)?,
        text: simulation_text(&t),
        csv: simulation_csv(&t),
    })
}

#[derive(Serialize)]
struct Comparison {
    quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    reproduced: f64,
    reference: f64,
    abs_diff: f64,
    /// Monte Carlo standard error of the reproduced value, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_se: Option<f64>,
}

impl Comparison {
    fn new(quantity: &str, size: Option<usize>, reproduced: f64, reference: f64, mc_se: Option<f64>) -> Self {
        Self {
            quantity: quantity.to_string(),
            size,
            reproduced,
            reference,
            abs_diff: (reproduced - reference).abs(),
            mc_se,
        }
    }
}

#[derive(Serialize)]
struct ReproReport {
    table: u8,
    comparisons: Vec<Comparison>,
}

fn simulation_comparisons(t: &SimulationTable, reference: &[TableRow]) -> Vec<Comparison> {
    let mut out = Vec::new();
    for (r, p) in t.rows.iter().zip(reference) {
        let n = Some(r.n);
        out.push(Comparison::new("mean_l1", n, r.mean_l1, p.mean_l1, Some(r.se_mean_l1)));
        out.push(Comparison::new("bias_l1", n, r.bias_l1, p.bias_l1, Some(r.se_mean_l1)));
        out.push(Comparison::new("mse_l1", n, r.mse_l1, p.mse_l1, Some(r.se_mse_l1)));
        out.push(Comparison::new("mean_l2", n, r.mean_l2, p.mean_l2, Some(r.se_mean_l2)));
        out.push(Comparison::new("bias_l2", n, r.bias_l2, p.bias_l2, Some(r.se_mean_l2)));
        out.push(Comparison::new("mse_l2", n, r.mse_l2, p.mse_l2, Some(r.se_mse_l2)));
        out.push(Comparison::new("r_ci_low", n, r.r_ci_low, p.ci.0, None));
        out.push(Comparison::new("r_ci_high", n, r.r_ci_high, p.ci.1, None));
    }
    out
}

fn data_comparisons() -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    let mut samples = Vec::new();
    let refs = [
        ("jute10", reference::JUTE10_LAMBDA, reference::JUTE10_KS, reference::JUTE10_CVM),
        ("jute20", reference::JUTE20_LAMBDA, reference::JUTE20_KS, reference::JUTE20_CVM),
    ];
    for (name, lambda, ks, cvm) in refs {
        let s = load(name, name).context("input")?.sample;
        let fit = fit_mle(&s).with_context(|| format!("fit {name}"))?;
        let g = goodness_of_fit(&s, &EgdModel::new(fit.lambda_hat));
        let q = |what: &str| format!("{name} {what}");
        out.push(Comparison::new(&q("lambda_hat"), None, fit.lambda_hat.get(), lambda, None));
        out.push(Comparison::new(&q("ks"), None, g.ks_stat, ks.0, None));
        out.push(Comparison::new(&q("ks_p"), None, g.ks_p, ks.1, None));
        out.push(Comparison::new(&q("cvm"), None, g.cvm_stat, cvm.0, None));
        out.push(Comparison::new(&q("cvm_p"), None, g.cvm_p, cvm.1, None));
        samples.push(s);
    }
    let a = estimate_r(&samples[0], &samples[1], 0.95).context("estimation")?;
    let e = a.estimate;
    out.push(Comparison::new("r_hat", None, e.r_hat, reference::JUTE_R_HAT, None));
    out.push(Comparison::new("r_ci_low", None, e.ci_low, reference::JUTE_R_CI.0, None));
    out.push(Comparison::new("r_ci_high", None, e.ci_high, reference::JUTE_R_CI.1, None));
    Ok(out)
}

pub fn repro(index: u8, seed: u64) -> Result<Report> {
    let (comparisons, seed, preamble) = match index {
        4 => (data_comparisons()?, None, "datasets jute10 (strength) and jute20 (stress)\n".to_string()),
        i => {
            let spec = study_spec(i as usize, seed, DEFAULT_REPLICATIONS).context("simulation setup")?;
            let t = run_table(&spec).context("simulation")?;
            let reference = reference::table(i as usize).context("reference table")?;
            let pre = format!(
                "lambda1 = {}, lambda2 = {}, R = {}, replications = {}, seed = {}\n",
                sig(t.lambda1),
                sig(t.lambda2),
                sig(t.true_r),
                t.replications,
                seed
            );
            (simulation_comparisons(&t, reference), Some(seed), pre)
        }
    };
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let optf = |x: Option<f64>| x.map(sig).unwrap_or_default();
    let rows: Vec<Vec<String>> = comparisons
        .iter()
        .map(|c| {
            vec![
                c.quantity.clone(),
                opt(c.size),
                sig(c.reproduced),
                sig(c.reference),
                sig(c.abs_diff),
                optf(c.mc_se),
            ]
        })
        .collect();
    let header = ["quantity", "size", "reproduced", "reference", "|diff|", "mc_se"];
    let text = preamble + &table(&header, &rows);
    let mut csv = String::from("quantity,size,reproduced,reference,abs_diff,mc_se\n");
    for c in &comparisons {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.quantity,
            opt(c.size),
            c.reproduced,
            c.reference,
            c.abs_diff,
            c.mc_se.map(|v| v.to_string()).unwrap_or_default()
        ));
    }
    let rep = ReproReport {
        table: index,
        comparisons,
    };
    Ok(Report {
        inputs: vec![],
        seed,
        result: serde_json::to_value(&rep)?,
        text,
        csv,
    })
}
