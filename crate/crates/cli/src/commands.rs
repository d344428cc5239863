//! The four subcommands.

use noonsim::analysis::{
    closed_form_probability, loss_adjusted_probability, resource_counts, sweep, verify_grid,
    AlphaPolicy, LossModel, SweepRow, Vary, VerifyReport,
};
use noonsim::pipelines::{run, Method, MethodConfig, NoonReport};
use serde::Serialize;

use crate::cli::{Format, GenerateArgs, LossArgs, ResourcesArgs, SweepArgs, VaryKind, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_float, fmt_opt};
use crate::output::{emit_json, emit_table, format_or, Table};

/// What the process should report once a command has written its output.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Mismatch,
}

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn loss_model(l: &LossArgs) -> CliResult<LossModel> {
    Ok(LossModel::new(l.eta_detector, l.eta_single_photon)?)
}

fn alpha_policy(alpha_sq: Option<f64>) -> AlphaPolicy {
    alpha_sq.map_or(AlphaPolicy::Optimal, AlphaPolicy::Fixed)
}

#[derive(Serialize)]
struct GenerateOutput {
    config: MethodConfig,
    report: NoonReport,
    loss: LossModel,
    loss_adjusted_probability: f64,
}

pub fn generate(a: &GenerateArgs) -> CliResult<Outcome> {
    let mut cfg = MethodConfig::new(a.method, a.d, a.n);
    if let Some(x) = a.alpha_sq {
        if !(x.is_finite() && x > 0.0) {
            return config_err(format!("--alpha-sq must be positive (got {x})"));
        }
        cfg = cfg.with_alpha_sq(x);
    }
    if let Some(c) = a.cutoff {
        cfg = cfg.with_cutoff(c);
    }
    if let Some(t) = a.tolerance {
        cfg = cfg.with_tolerance(t);
    }
    let loss = loss_model(&a.loss)?;
    let counts = resource_counts(a.method, a.d, a.n)?;
    let report = run(&cfg)?;
    let lossy = loss_adjusted_probability(report.generation_probability, &counts, &loss);

    match format_or(&a.out, Format::Json) {
        Format::Json => emit_json(
            &GenerateOutput {
                config: cfg,
                report,
                loss,
                loss_adjusted_probability: lossy,
            },
            &a.out,
        )?,
        Format::Csv => {
            let rows = report
                .component_amplitudes
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    vec![
                        (j + 1).to_string(),
                        fmt_float(c.re),
                        fmt_float(c.im),
                        fmt_float(c.norm_sqr()),
                    ]
                })
                .collect();
            emit_table(
                &Table {
                    header: vec!["mode", "re", "im", "probability"],
                    rows,
                },
                &a.out,
            )?
        }
    }
    Ok(Outcome::Ok)
}

const SWEEP_HEADER: [&str; 7] = [
    "method", "d", "N", "alpha_sq", "p_closed", "p_sim", "rel_err",
];

fn sweep_cells(r: &SweepRow) -> Vec<String> {
    vec![
        r.method.to_string(),
        r.d.to_string(),
        r.n_photons.to_string(),
        fmt_opt(r.alpha_sq),
        fmt_float(r.p_closed),
        fmt_opt(r.p_sim),
        fmt_opt(r.rel_err),
    ]
}

#[derive(Serialize)]
struct JsonRow {
    method: u8,
    d: usize,
    #[serde(rename = "N")]
    n: u32,
    alpha_sq: Option<f64>,
    p_closed: f64,
    p_sim: Option<f64>,
    rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
}

impl From<&SweepRow> for JsonRow {
    fn from(r: &SweepRow) -> Self {
        JsonRow {
            method: r.method.index(),
            d: r.d,
            n: r.n_photons,
            alpha_sq: r.alpha_sq,
            p_closed: r.p_closed,
            p_sim: r.p_sim,
            rel_err: r.rel_err,
            pass: None,
        }
    }
}

pub fn sweep_cmd(a: &SweepArgs) -> CliResult<Outcome> {
    let vary = match a.vary {
        VaryKind::D => {
            let (Some(n), Some((lo, hi))) = (a.n, a.d_range) else {
                return config_err("sweep --vary d needs --N and --d-range");
            };
            Vary::OverD {
                n_photons: n,
                d: lo..=hi,
            }
        }
        VaryKind::N => {
            let (Some(d), Some((lo, hi))) = (a.d, a.n_range) else {
                return config_err("sweep --vary N needs --d and --N-range");
            };
            Vary::OverN {
                d,
                n_photons: lo..=hi,
            }
        }
    };
    let rows = sweep(&a.methods.0, &vary, alpha_policy(a.alpha_sq))?;
    match format_or(&a.out, Format::Csv) {
        Format::Csv => emit_table(
            &Table {
                header: SWEEP_HEADER.to_vec(),
                rows: rows.iter().map(sweep_cells).collect(),
            },
            &a.out,
        )?,
        Format::Json => emit_json(&rows.iter().map(JsonRow::from).collect::<Vec<_>>(), &a.out)?,
    }
    Ok(Outcome::Ok)
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let perturbed: Vec<Method> = a
        .perturb_method
        .as_ref()
        .map(|m| m.0.clone())
        .unwrap_or_default();
    let scale = 1.0 + a.perturb_rel;
    let closed = |m: Method, d: usize, n: u32, alpha_sq: Option<f64>| {
        let p = closed_form_probability(m, d, n, alpha_sq)?;
        Ok(if perturbed.contains(&m) { p * scale } else { p })
    };
    let report = verify_grid(
        &a.methods.0,
        &a.d_values,
        &a.n_values,
        alpha_policy(a.alpha_sq),
        a.tolerance,
        &closed,
    )?;
    emit_verify(&report, a)?;
    let failed = report.failures().count();
    eprintln!(
        "verify: {}/{} points within relative tolerance {}",
        report.points.len() - failed,
        report.points.len(),
        fmt_float(a.tolerance)
    );
    Ok(if report.all_pass() {
        Outcome::Ok
    } else {
        Outcome::Mismatch
    })
}

fn emit_verify(report: &VerifyReport, a: &VerifyArgs) -> CliResult<()> {
    match format_or(&a.out, Format::Csv) {
        Format::Csv => {
            let mut header = SWEEP_HEADER.to_vec();
            header.push("pass");
            let rows = report
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.method.to_string(),
                        p.d.to_string(),
                        p.n_photons.to_string(),
                        fmt_opt(p.alpha_sq),
                        fmt_float(p.p_closed),
                        fmt_float(p.p_sim),
                        fmt_float(p.rel_err),
                        p.pass.to_string(),
                    ]
                })
                .collect();
            emit_table(&Table { header, rows }, &a.out)
        }
        Format::Json => {
            let rows: Vec<JsonRow> = report
                .points
                .iter()
                .map(|p| JsonRow {
                    method: p.method.index(),
                    d: p.d,
                    n: p.n_photons,
                    alpha_sq: p.alpha_sq,
                    p_closed: p.p_closed,
                    p_sim: Some(p.p_sim),
                    rel_err: Some(p.rel_err),
                    pass: Some(p.pass),
                })
                .collect();
            emit_json(&rows, &a.out)
        }
    }
}

#[derive(Serialize)]
struct ResourceRow {
    method: u8,
    d: usize,
    #[serde(rename = "N")]
    n: u32,
    beam_splitters: u64,
    phase_shifters: u64,
    spcd_detectors: u64,
    fock_inputs: u64,
    single_photon_inputs: u64,
    polarization_variant: bool,
    p_closed: f64,
    p_loss_adjusted: f64,
}

pub fn resources(a: &ResourcesArgs) -> CliResult<Outcome> {
    let loss = loss_model(&a.loss)?;
    if let Some(x) = a.alpha_sq.filter(|x| !(x.is_finite() && *x > 0.0)) {
        return config_err(format!("--alpha-sq must be positive (got {x})"));
    }
    let mut rows = Vec::new();
    for &m in &a.methods.0 {
        for &d in &a.d {
            for &n in &a.n {
                let rc = resource_counts(m, d, n)?;
                let p = closed_form_probability(m, d, n, a.alpha_sq)?;
                rows.push(ResourceRow {
                    method: m.index(),
                    d,
                    n,
                    beam_splitters: rc.beam_splitters,
                    phase_shifters: rc.phase_shifters,
                    spcd_detectors: rc.spcd_detectors,
                    fock_inputs: rc.fock_inputs,
                    single_photon_inputs: rc.single_photon_inputs,
                    polarization_variant: rc.polarization_variant,
                    p_closed: p,
                    p_loss_adjusted: loss_adjusted_probability(p, &rc, &loss),
                });
            }
        }
    }
    match format_or(&a.out, Format::Csv) {
        Format::Json => emit_json(&rows, &a.out)?,
        Format::Csv => emit_table(
            &Table {
                header: vec![
                    "method",
                    "d",
                    "N",
                    "beam_splitters",
                    "phase_shifters",
                    "spcd_detectors",
                    "fock_inputs",
                    "single_photon_inputs",
                    "polarization_variant",
                    "p_closed",
                    "p_loss_adjusted",
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.method.to_string(),
                            r.d.to_string(),
                            r.n.to_string(),
                            r.beam_splitters.to_string(),
                            r.phase_shifters.to_string(),
                            r.spcd_detectors.to_string(),
                            r.fock_inputs.to_string(),
                            r.single_photon_inputs.to_string(),
                            r.polarization_variant.to_string(),
                            fmt_float(r.p_closed),
                            fmt_float(r.p_loss_adjusted),
                        ]
                    })
                    .collect(),
            },
            &a.out,
        )?,
    }
    Ok(Outcome::Ok)
}
