//! One function per subcommand; each wraps a single library operation in a report.

use anyhow::{bail, Result};
use bellman_riesz::bellman::QContext;
use bellman_riesz::estimates::{bilinear_lhs, representation_check, sweep_report, weighted_riesz_norm_on};
use bellman_riesz::gauss::{q2_characteristic, HermiteFunction, OneForm};
use bellman_riesz::report::{Check, VerificationReport};
use bellman_riesz::verify::{run_aux, run_suite};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;

/// Cauchy–Schwarz gives `P_t ω · P_t ω⁻¹ ≥ 1`; slack for quadrature rounding.
const PRODUCT_TOL: f64 = 1e-10;
/// Absolute slack of the Riesz-norm bound.
const NORM_TOL: f64 = 1e-6;

pub struct Outcome {
    pub report: VerificationReport,
    /// Alternative CSV rendering, when the subcommand has one.
    pub csv: Option<String>,
}

impl Outcome {
    fn json(report: VerificationReport) -> Self {
        Self { report, csv: None }
    }
}

fn to_value(v: &impl Serialize) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn report_for(cfg: &RunConfig) -> Result<VerificationReport> {
    Ok(VerificationReport::new(to_value(cfg)?))
}

pub fn verify_bellman(cfg: &RunConfig) -> Result<Outcome> {
    let mut report = run_suite(&cfg.verify_bellman)?;
    report.config_echo = to_value(cfg)?;
    Ok(Outcome::json(report))
}

pub fn aux_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let aux = &cfg.aux_bounds;
    if aux.q_list.is_empty() {
        bail!("aux_bounds.q_list must not be empty");
    }
    if aux.fd_step.is_nan() || aux.fd_step <= 0.0 {
        bail!("aux_bounds.fd_step must be > 0, got {}", aux.fd_step);
    }
    let mut report = report_for(cfg)?;
    let mut failures = Vec::new();
    for &q in &aux.q_list {
        let run = run_aux(&QContext::scalar(q)?, aux.grid, aux.fd_step)?;
        report.checks.push(run.size);
        report.checks.push(run.hessian);
        failures.extend(run.failures);
    }
    report.results = json!({ "failures": failures });
    Ok(Outcome::json(report))
}

pub fn a2(cfg: &RunConfig) -> Result<Outcome> {
    let weight = &cfg.a2.weight;
    let est = q2_characteristic(weight, &cfg.grid.build()?)?;
    let mut report = report_for(cfg)?;
    let mut check = Check::new("q2_product_ge_1");
    check.record(est.grid_min - 1.0, PRODUCT_TOL, &[est.argmax_x, est.argmax_t]);
    report.checks.push(check);
    report.results = json!({ "weight": weight, "estimate": est });
    Ok(Outcome::json(report))
}

pub fn riesz_norm(cfg: &RunConfig) -> Result<Outcome> {
    let c = &cfg.riesz_norm;
    let res = weighted_riesz_norm_on(&c.weight, c.n, &cfg.grid.build()?)?;
    let mut report = report_for(cfg)?;
    let mut check = Check::new("riesz_bound");
    let bound = bellman_riesz::estimates::RIESZ_CONSTANT * res.q2;
    check.record(bound - res.weighted_norm, NORM_TOL, &[c.n as f64]);
    report.checks.push(check);
    report.results = json!({ "weight": c.weight, "norm": res });
    Ok(Outcome::json(report))
}

pub fn embedding_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let c = &cfg.embedding;
    let f = HermiteFunction::new(c.f.clone())?;
    let g = OneForm::new(c.g.clone())?;
    let res = bilinear_lhs(&f, &g, &c.weight, &cfg.grid.build()?)?;
    let mut report = report_for(cfg)?;
    let mut check = Check::new("embedding_bound");
    check.record(res.bound - res.lhs, 0.0, &[]);
    report.checks.push(check);
    report.results = json!({ "weight": c.weight, "embedding": res });
    Ok(Outcome::json(report))
}

pub fn repr_check(cfg: &RunConfig) -> Result<Outcome> {
    let c = &cfg.repr_check;
    if c.n_list.is_empty() {
        bail!("repr_check.n_list must not be empty");
    }
    let mut report = report_for(cfg)?;
    let mut check = Check::new("representation");
    let mut rows = Vec::with_capacity(c.n_list.len());
    for &n in &c.n_list {
        let res = representation_check(n)?;
        check.record(c.tol - res.abs_gap, 0.0, &[n as f64]);
        rows.push(res);
    }
    report.checks.push(check);
    report.results = json!({ "checks": rows });
    Ok(Outcome::json(report))
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let c = &cfg.sweep;
    let sweep = sweep_report(c.family, &c.params, c.n, &cfg.grid.build()?, &c.ladder, c.ladder_tol)?;
    let mut report = report_for(cfg)?;
    report.checks.clone_from(&sweep.checks);
    let csv = Some(sweep.to_csv());
    report.results = to_value(&sweep)?;
    Ok(Outcome { report, csv })
}
