//! Parameter sweeps and closed-form vs simulation checks.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pipelines::{run, Method, MethodConfig};

use super::{closed_form_probability, optimal_alpha_sq};

/// Largest `d` that sweeps still simulate.
pub const SIM_MAX_D: usize = 4;
/// Largest `N` that sweeps still simulate.
pub const SIM_MAX_N: u32 = 6;

pub const DEFAULT_VERIFY_D: [usize; 2] = [2, 4];
pub const DEFAULT_VERIFY_N: [u32; 5] = [2, 3, 4, 5, 6];

/// Which parameter a sweep varies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vary {
    OverD {
        n_photons: u32,
        d: RangeInclusive<usize>,
    },
    OverN {
        d: usize,
        n_photons: RangeInclusive<u32>,
    },
}

impl Vary {
    fn points(&self) -> Result<Vec<(usize, u32)>> {
        let pts: Vec<_> = match self {
            Vary::OverD { n_photons, d } => d.clone().map(|d| (d, *n_photons)).collect(),
            Vary::OverN { d, n_photons } => n_photons.clone().map(|n| (*d, n)).collect(),
        };
        if pts.is_empty() {
            return invalid("sweep range is empty");
        }
        if let Some((d, _)) = pts.iter().find(|(d, _)| *d < 2) {
            return invalid(format!("d must be at least 2 (got d = {d})"));
        }
        if pts.iter().any(|(_, n)| *n < 2) {
            return invalid("sweeps need N >= 2");
        }
        Ok(pts)
    }
}

/// Coherent intensity used for method 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaPolicy {
    /// `|α|² = N/d` at every point.
    Optimal,
    Fixed(f64),
}

impl AlphaPolicy {
    fn check(self) -> Result<()> {
        match self {
            AlphaPolicy::Fixed(a) if !(a.is_finite() && a > 0.0) => {
                invalid(format!("|alpha|^2 must be positive (got {a})"))
            }
            _ => Ok(()),
        }
    }

    fn alpha_sq(self, d: usize, n: u32) -> f64 {
        match self {
            AlphaPolicy::Optimal => optimal_alpha_sq(d, n),
            AlphaPolicy::Fixed(a) => a,
        }
    }
}

/// One sweep point. `alpha_sq` is set for method 1 only; `p_sim` and
/// `rel_err` only where the point is small enough to simulate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_photons: u32,
    pub alpha_sq: Option<f64>,
    pub p_closed: f64,
    pub p_sim: Option<f64>,
    pub rel_err: Option<f64>,
}

fn within_sim_limits(d: usize, n: u32) -> bool {
    d <= SIM_MAX_D && n <= SIM_MAX_N
}

fn simulate(method: Method, d: usize, n: u32, alpha_sq: Option<f64>) -> Result<f64> {
    let mut cfg = MethodConfig::new(method, d, n);
    if let Some(a) = alpha_sq {
        cfg = cfg.with_alpha_sq(a);
    }
    Ok(run(&cfg)?.generation_probability)
}

fn rel_err(sim: f64, closed: f64) -> f64 {
    if closed == 0.0 {
        sim.abs()
    } else {
        (sim - closed).abs() / closed.abs()
    }
}

fn normalized_methods(methods: &[Method]) -> Result<Vec<Method>> {
    if methods.is_empty() {
        return invalid("no methods selected");
    }
    let mut m = methods.to_vec();
    m.sort();
    m.dedup();
    Ok(m)
}

type ClosedForm<'a> = dyn Fn(Method, usize, u32, Option<f64>) -> Result<f64> + Sync + 'a;

fn evaluate(
    method: Method,
    d: usize,
    n: u32,
    alpha: AlphaPolicy,
    closed_form: &ClosedForm<'_>,
) -> Result<SweepRow> {
    let alpha_sq = (method == Method::M1).then(|| alpha.alpha_sq(d, n));
    let p_closed = closed_form(method, d, n, alpha_sq)?;
    let p_sim = if within_sim_limits(d, n) {
        Some(simulate(method, d, n, alpha_sq)?)
    } else {
        None
    };
    Ok(SweepRow {
        method,
        d,
        n_photons: n,
        alpha_sq,
        p_closed,
        p_sim,
        rel_err: p_sim.map(|s| rel_err(s, p_closed)),
    })
}

/// Tabulates generation probabilities over a range of `d` or `N`.
///
/// Rows come ordered by method, then by the varied parameter. Points outside
/// a method's domain (non-power-of-two `d` for the cascades) are skipped.
pub fn sweep(methods: &[Method], vary: &Vary, alpha: AlphaPolicy) -> Result<Vec<SweepRow>> {
    alpha.check()?;
    let methods = normalized_methods(methods)?;
    let points = vary.points()?;
    let jobs: Vec<(Method, usize, u32)> = methods
        .iter()
        .flat_map(|&m| points.iter().map(move |&(d, n)| (m, d, n)))
        .filter(|&(m, d, n)| m.check_domain(d, n).is_ok())
        .collect();
    jobs.into_par_iter()
        .map(|(m, d, n)| evaluate(m, d, n, alpha, &closed_form_probability))
        .collect()
}

/// One grid point of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyPoint {
    pub method: Method,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_photons: u32,
    pub alpha_sq: Option<f64>,
    pub p_closed: f64,
    pub p_sim: f64,
    pub rel_err: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub points: Vec<VerifyPoint>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyPoint> {
        self.points.iter().filter(|p| !p.pass)
    }
}

/// Simulates every valid `(method, d, N)` on the grid and compares the
/// probability against `closed_form` at relative tolerance `tolerance`.
///
/// The closed form is a parameter so callers can check a modified formula;
/// pass [`closed_form_probability`] for the reference one. Grid points
/// beyond the simulation limits are an error, not a skip.
pub fn verify_grid(
    methods: &[Method],
    d_values: &[usize],
    n_values: &[u32],
    alpha: AlphaPolicy,
    tolerance: f64,
    closed_form: &ClosedForm<'_>,
) -> Result<VerifyReport> {
    alpha.check()?;
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return invalid(format!("tolerance must be positive (got {tolerance})"));
    }
    let methods = normalized_methods(methods)?;
    if d_values.is_empty() || n_values.is_empty() {
        return invalid("verification grid is empty");
    }
    let mut jobs = Vec::new();
    for &m in &methods {
        for &d in d_values {
            for &n in n_values {
                if d < 2 || n < 1 {
                    return invalid(format!("invalid grid point d = {d}, N = {n}"));
                }
                if m.check_domain(d, n).is_err() {
                    continue;
                }
                if !within_sim_limits(d, n) {
                    return invalid(format!(
                        "grid point (method {m}, d = {d}, N = {n}) exceeds simulation limits \
                         (d <= {SIM_MAX_D}, N <= {SIM_MAX_N})"
                    ));
                }
                jobs.push((m, d, n));
            }
        }
    }
    if jobs.is_empty() {
        return invalid("no grid point lies in the selected methods' domains");
    }
    let points = jobs
        .into_par_iter()
        .map(|(m, d, n)| {
            let row = evaluate(m, d, n, alpha, closed_form)?;
            let (p_sim, err) = (
                row.p_sim.unwrap_or(f64::NAN),
                row.rel_err.unwrap_or(f64::NAN),
            );
            Ok(VerifyPoint {
                method: m,
                d,
                n_photons: n,
                alpha_sq: row.alpha_sq,
                p_closed: row.p_closed,
                p_sim,
                rel_err: err,
                pass: err <= tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { tolerance, points })
}
