//! End-to-end NOON state generation procedures.
//!
//! Each `run_method*` builds the optical circuit of one scheme, simulates it
//! exactly in Fock space and condenses the final heralded state into a
//! [`NoonReport`]. Amplitudes are never renormalized, so
//! `generation_probability` is the intrinsic success probability of the
//! scheme under ideal components.

mod cascade;
mod generators;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{apply_element, apply_fsf, Element};
use crate::error::{invalid, NoonError, Result};
use crate::fock::{FockState, OccupationVector};

pub use cascade::{binary_tree_schedule, run_method3, run_method4};
pub use generators::{
    generator_even, generator_kerr, generator_odd, polarization_summed, rotate_polarization,
};

/// Default tolerance for balance and residual checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Coherent inputs, Fock state filters, N-photon postselection.
    M1,
    /// Evenly split N-photon Fock state plus Fock state filters.
    M2,
    /// Cascaded linear entanglement generators fed with N-photon Fock states.
    M3,
    /// Cascaded cross-Kerr entanglement generators.
    M4,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::M1, Method::M2, Method::M3, Method::M4];

    pub fn index(self) -> u8 {
        match self {
            Method::M1 => 1,
            Method::M2 => 2,
            Method::M3 => 3,
            Method::M4 => 4,
        }
    }

    /// Whether the scheme only produces balanced states for `d = 2^n`.
    pub fn needs_power_of_two(self) -> bool {
        matches!(self, Method::M3 | Method::M4)
    }

    /// Checks `(d, N)` against the scheme's domain.
    pub fn check_domain(self, d: usize, n_photons: u32) -> Result<()> {
        if d < 2 {
            return invalid(format!("d must be at least 2 (got d = {d})"));
        }
        if n_photons < 1 {
            return invalid("N must be at least 1");
        }
        if self == Method::M3 && n_photons < 2 {
            return invalid(format!("method 3 needs N >= 2 (got N = {n_photons})"));
        }
        if self.needs_power_of_two() && !d.is_power_of_two() {
            return Err(NoonError::NotPowerOfTwo(d));
        }
        Ok(())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FromStr for Method {
    type Err = NoonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['M', 'm']) {
            "1" => Ok(Method::M1),
            "2" => Ok(Method::M2),
            "3" => Ok(Method::M3),
            "4" => Ok(Method::M4),
            _ => invalid(format!("unknown method '{s}' (expected 1, 2, 3 or 4)")),
        }
    }
}

/// Configuration of a single generation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_photons: u32,
    /// Coherent amplitude, method 1 only.
    pub alpha: Complex64,
    /// Per-mode Fock cutoff for the coherent inputs; defaults to `N`.
    pub per_mode_cutoff: Option<u32>,
    pub tolerance: f64,
}

impl MethodConfig {
    /// Config with the optimal coherent amplitude `|α|² = N/d`.
    pub fn new(method: Method, d: usize, n_photons: u32) -> Self {
        let alpha_sq = n_photons as f64 / d.max(1) as f64;
        MethodConfig {
            method,
            d,
            n_photons,
            alpha: Complex64::new(alpha_sq.sqrt(), 0.0),
            per_mode_cutoff: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Real, non-negative coherent amplitude with the given `|α|²`.
    pub fn with_alpha_sq(self, alpha_sq: f64) -> Self {
        self.with_alpha(Complex64::new(alpha_sq.max(0.0).sqrt(), 0.0))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.per_mode_cutoff = Some(cutoff);
        self
    }

    /// Number of filter blocks, `⌊N/2⌋`.
    pub fn filter_blocks(&self) -> u32 {
        self.n_photons / 2
    }

    pub fn validate(&self) -> Result<()> {
        self.method.check_domain(self.d, self.n_photons)?;
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return invalid(format!(
                "tolerance must be positive (got {})",
                self.tolerance
            ));
        }
        if self.method == Method::M1 {
            if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
                return invalid("coherent amplitude must be finite");
            }
            if let Some(cut) = self.per_mode_cutoff {
                if cut < self.n_photons {
                    return invalid(format!(
                        "per-mode cutoff {cut} is below N = {}; the NOON sector would be truncated",
                        self.n_photons
                    ));
                }
            }
        }
        Ok(())
    }
}

/// NOON content of a final state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoonReport {
    pub method: Option<Method>,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_photons: u32,
    /// Amplitude of `|0…N…0⟩` with the N photons in mode j, relative to the input.
    pub component_amplitudes: Vec<Complex64>,
    pub generation_probability: f64,
    /// Unit phases of the components relative to component 1.
    pub sign_pattern: Vec<Complex64>,
    /// Phase of component 1, in radians.
    pub global_phase: f64,
    pub balanced: bool,
    /// Squared norm of everything that is not a NOON component.
    pub residual_norm: f64,
    /// Set for N = 1 runs where the filter stage is empty.
    pub degenerate: bool,
}

impl NoonReport {
    /// `|c|` of the first component.
    pub fn common_magnitude(&self) -> f64 {
        self.component_amplitudes
            .first()
            .map(|c| c.norm())
            .unwrap_or(0.0)
    }

    /// Relative phase of component `j` to component 1 as a real sign, if it
    /// is within `tol` of ±1.
    pub fn real_sign(&self, j: usize, tol: f64) -> Option<i8> {
        let p = self.sign_pattern.get(j)?;
        if (p - 1.0).norm() < tol {
            Some(1)
        } else if (p + 1.0).norm() < tol {
            Some(-1)
        } else {
            None
        }
    }
}

/// Reads the d NOON components out of `state` and summarizes them.
pub fn extract_noon(state: &FockState, n_photons: u32, tolerance: f64) -> NoonReport {
    let d = state.mode_count();
    let component_amplitudes: Vec<Complex64> = (0..d)
        .map(|j| {
            state
                .amplitude(&OccupationVector::single(d, j, n_photons))
                .unwrap_or_default()
        })
        .collect();
    let generation_probability = component_amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let residual_norm = state
        .terms()
        .filter(|(occ, _)| !is_noon_term(occ, n_photons))
        .map(|(_, a)| a.norm_sqr())
        .sum();

    let first = component_amplitudes.first().copied().unwrap_or_default();
    let reference = if first.norm() > 0.0 {
        first / first.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sign_pattern = component_amplitudes
        .iter()
        .map(|c| {
            if c.norm() > 0.0 {
                (c / c.norm()) / reference
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let max_mag = component_amplitudes
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let balanced = max_mag > 0.0
        && component_amplitudes
            .iter()
            .all(|c| (c.norm() - first.norm()).abs() <= tolerance * max_mag);

    NoonReport {
        method: None,
        d,
        n_photons,
        component_amplitudes,
        generation_probability,
        sign_pattern,
        global_phase: if first.norm() > 0.0 { first.arg() } else { 0.0 },
        balanced,
        residual_norm,
        degenerate: false,
    }
}

fn is_noon_term(occ: &OccupationVector, n: u32) -> bool {
    let mut nonzero = occ.counts().iter().filter(|&&c| c != 0);
    match (nonzero.next(), nonzero.next()) {
        (Some(&c), None) => c == n,
        _ => false,
    }
}

/// Splits `|N⟩` evenly over `d` modes with a beam-splitter chain and
/// phase correction, giving amplitude `√(N!/∏n_j!) / d^{N/2}` on every
/// occupation of total `N`.
pub fn split_evenly(n_photons: u32, d: usize) -> Result<FockState> {
    if n_photons < 1 {
        return invalid("N must be at least 1");
    }
    if d < 2 {
        return invalid(format!("d must be at least 2 (got d = {d})"));
    }
    let mut state = FockState::fock(d, OccupationVector::single(d, 0, n_photons))?;
    // BS_j on (j-1, j) with T_j = 1/(d + 1 - j), 1-based j
    for j in 1..d {
        let t = 1.0 / (d + 1 - j) as f64;
        state = apply_element(
            &state,
            &Element::BeamSplitter {
                i: j - 1,
                j,
                theta: t.sqrt().acos(),
            },
        )?;
    }
    // each reflection added a factor i; undo with exp(-iπ/2 (j-1) n_j)
    for mode in 1..d {
        state = apply_element(
            &state,
            &Element::PhaseShifter {
                mode,
                phi: -FRAC_PI_2 * mode as f64,
            },
        )?;
    }
    Ok(state)
}

/// One filter block: `apply_fsf(·, k)` on each of the first `d` modes.
pub fn fsf_block(state: &FockState, d: usize, k: u32) -> Result<FockState> {
    let mut s = state.clone();
    for mode in 0..d {
        s = apply_fsf(&s, mode, k)?.state;
        if s.is_zero() {
            break;
        }
    }
    Ok(s)
}

/// Method 1 state after all `⌊N/2⌋` filter blocks, before postselection.
pub fn method1_filtered(cfg: &MethodConfig) -> Result<FockState> {
    cfg.validate()?;
    let cutoff = cfg.per_mode_cutoff.unwrap_or(cfg.n_photons);
    let single = FockState::coherent_truncated(cfg.alpha, cutoff);
    let mut state = single.clone();
    for _ in 1..cfg.d {
        state = state.tensor(&single);
    }
    for k in 1..=cfg.filter_blocks() {
        state = fsf_block(&state, cfg.d, k)?;
    }
    Ok(state)
}

pub fn run_method1(cfg: &MethodConfig) -> Result<NoonReport> {
    expect_method(cfg, Method::M1)?;
    let filtered = method1_filtered(cfg)?;
    let post = filtered.restrict_total_photons(cfg.n_photons);
    Ok(finish(cfg, &post))
}

pub fn run_method2(cfg: &MethodConfig) -> Result<NoonReport> {
    expect_method(cfg, Method::M2)?;
    cfg.validate()?;
    let mut state = split_evenly(cfg.n_photons, cfg.d)?;
    for k in 1..=cfg.filter_blocks() {
        state = fsf_block(&state, cfg.d, k)?;
    }
    Ok(finish(cfg, &state))
}

/// Dispatches on `cfg.method`.
pub fn run(cfg: &MethodConfig) -> Result<NoonReport> {
    match cfg.method {
        Method::M1 => run_method1(cfg),
        Method::M2 => run_method2(cfg),
        Method::M3 => run_method3(cfg),
        Method::M4 => run_method4(cfg),
    }
}

fn expect_method(cfg: &MethodConfig, m: Method) -> Result<()> {
    if cfg.method != m {
        return invalid(format!(
            "config selects method {} but method {} was run",
            cfg.method, m
        ));
    }
    Ok(())
}

fn finish(cfg: &MethodConfig, state: &FockState) -> NoonReport {
    let mut report = extract_noon(state, cfg.n_photons, cfg.tolerance);
    report.method = Some(cfg.method);
    report.d = cfg.d;
    report.degenerate = cfg.n_photons == 1;
    report
}

/// Phase `2πk/N` of the k-th generator sub-block.
fn sub_block_phase(k: u32, n_photons: u32) -> f64 {
    2.0 * PI * f64::from(k) / f64::from(n_photons)
}
