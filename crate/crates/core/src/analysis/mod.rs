//! Closed-form generation probabilities, resource counts and loss scaling.
//!
//! All probabilities are evaluated as logarithms and exponentiated once at
//! the end, so large-N sweeps never overflow a factorial.

mod sweep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pipelines::Method;

pub use sweep::{
    sweep, verify_grid, AlphaPolicy, SweepRow, Vary, VerifyPoint, VerifyReport, DEFAULT_VERIFY_D,
    DEFAULT_VERIFY_N, SIM_MAX_D, SIM_MAX_N,
};

/// `ln n!`. Exact product below 21, summed logarithms above.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= 20 {
        ((2..=u64::from(n)).product::<u64>() as f64).ln()
    } else {
        (2..=n).map(|k| f64::from(k).ln()).sum()
    }
}

fn ln_f(n: u32) -> f64 {
    ln_factorial(n)
}

fn blocks(n: u32) -> u32 {
    n / 2
}

/// Method 1 probability at coherent intensity `alpha_sq = |α|²`.
pub fn p_method1(d: usize, n: u32, alpha_sq: f64) -> f64 {
    if alpha_sq <= 0.0 {
        return 0.0;
    }
    let (df, nf, m) = (d as f64, f64::from(n), blocks(n));
    let ln_p = df.ln() - df * alpha_sq + nf * alpha_sq.ln() + 2.0 * ln_f(n - 1)
        - (nf + df) * f64::from(m + 1).ln()
        - ln_f(n)
        - 2.0 * ln_f(n - m - 1)
        - 2.0 * ln_f(m);
    ln_p.exp()
}

/// Method 1 probability at the optimum `|α|² = N/d`, written in the
/// independent closed form (not by substituting into [`p_method1`]).
pub fn p_method1_optimal(d: usize, n: u32) -> f64 {
    let (df, nf, m) = (d as f64, f64::from(n), blocks(n));
    let ln_p = -nf + (nf - 2.0) * nf.ln() + ln_f(n)
        - (nf - 1.0) * df.ln()
        - (nf + df) * f64::from(m + 1).ln()
        - 2.0 * ln_f(n - m - 1)
        - 2.0 * ln_f(m);
    ln_p.exp()
}

/// Method 2 probability, with `(N−1)!²` in the numerator.
pub fn p_method2(d: usize, n: u32) -> f64 {
    let (df, nf, m) = (d as f64, f64::from(n), blocks(n));
    let ln_p = 2.0 * ln_f(n - 1)
        - (nf - 1.0) * df.ln()
        - (nf + df) * f64::from(m + 1).ln()
        - 2.0 * ln_f(n - m - 1)
        - 2.0 * ln_f(m);
    ln_p.exp()
}

/// Method 3 probability, `d^{1−N} (N!/(2^N N^N))^{d−1}`, for either parity.
pub fn p_method3(d: usize, n: u32) -> f64 {
    let (df, nf) = (d as f64, f64::from(n));
    let per_generator = ln_f(n) - nf * 2f64.ln() - nf * nf.ln();
    ((1.0 - nf) * df.ln() + (df - 1.0) * per_generator).exp()
}

pub fn p_method4(d: usize) -> f64 {
    1.0 / d as f64
}

/// Generation probability of `method` for `d` modes and `n` photons.
///
/// Method 1 uses `alpha_sq` when given (must be positive) and the optimum
/// `N/d` otherwise; the other methods ignore it.
pub fn closed_form_probability(
    method: Method,
    d: usize,
    n: u32,
    alpha_sq: Option<f64>,
) -> Result<f64> {
    method.check_domain(d, n)?;
    Ok(match method {
        Method::M1 => match alpha_sq {
            Some(a) if a.is_finite() && a > 0.0 => p_method1(d, n, a),
            Some(a) => return invalid(format!("|alpha|^2 must be positive (got {a})")),
            None => p_method1_optimal(d, n),
        },
        Method::M2 => p_method2(d, n),
        Method::M3 => p_method3(d, n),
        Method::M4 => p_method4(d),
    })
}

pub fn optimal_alpha_sq(d: usize, n: u32) -> f64 {
    f64::from(n) / d as f64
}

/// Method 1 NOON component amplitude (every component shares it).
pub fn c_method1(d: usize, n: u32, alpha: Complex64) -> Complex64 {
    let (df, nf, m) = (d as f64, f64::from(n), blocks(n));
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag = ln_f(n - 1)
        - 0.5 * (nf + df) * f64::from(m + 1).ln()
        - 0.5 * ln_f(n)
        - ln_f(n - m - 1)
        - ln_f(m);
    (-df * alpha.norm_sqr() / 2.0).exp() * sign * ln_mag.exp() * alpha.powu(n)
}

/// Method 2 NOON component amplitude.
pub fn c_method2(d: usize, n: u32) -> f64 {
    let (df, nf, m) = (d as f64, f64::from(n), blocks(n));
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag = ln_f(n - 1)
        - 0.5 * nf * df.ln()
        - 0.5 * (nf + df) * f64::from(m + 1).ln()
        - ln_f(n - m - 1)
        - ln_f(m);
    sign * ln_mag.exp()
}

fn minus_i_pow(k: u32) -> Complex64 {
    Complex64::new(0.0, -1.0).powu(k)
}

/// `|c_3a| = √N! / (2^N N^{N/2})`: a generator splitting a full path.
pub fn c3a_magnitude(n: u32) -> f64 {
    let nf = f64::from(n);
    (0.5 * ln_f(n) - nf * 2f64.ln() - 0.5 * nf * nf.ln()).exp()
}

/// `|c_3b| = √N! / (2^{N/2} N^{N/2})`: a generator fed with an empty path.
pub fn c3b_magnitude(n: u32) -> f64 {
    let nf = f64::from(n);
    (0.5 * ln_f(n) - 0.5 * nf * 2f64.ln() - 0.5 * nf * nf.ln()).exp()
}

/// Even-N generator coefficient on `|N⟩` input, `(−i)^{N/2} √N!/(2^N N^{N/2})`.
pub fn c3a_even(n: u32) -> Complex64 {
    minus_i_pow(n / 2) * c3a_magnitude(n)
}

/// Even-N generator coefficient on `|0⟩` input, `(−i/2)^{N/2} √N!/N^{N/2}`.
pub fn c3b_even(n: u32) -> Complex64 {
    minus_i_pow(n / 2) * c3b_magnitude(n)
}

/// Odd-N generator coefficient on `|N⟩` input, `(−1)^N √N!/(2^N N^{N/2})`.
pub fn c3a_odd(n: u32) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * c3a_magnitude(n)
}

/// Common NOON amplitude magnitude after a `d = 2^n` cascade:
/// `|c_3a|^{log₂ d} |c_3b|^{d − log₂ d − 1}`.
pub fn cascade_magnitude(d: usize, n: u32) -> f64 {
    let levels = d.trailing_zeros() as i32;
    let empties = d as i32 - levels - 1;
    c3a_magnitude(n).powi(levels) * c3b_magnitude(n).powi(empties)
}

/// Large-N comparison of methods 2 and 1 (at its optimum).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRatio {
    /// `p₂ / p₁^opt = (N−1)! e^N / N^{N−1}`.
    pub ratio: f64,
    /// `√(2πN)`.
    pub stirling: f64,
}

impl AsymptoticRatio {
    pub fn normalized(&self) -> f64 {
        self.ratio / self.stirling
    }
}

pub fn asymptotic_ratio(n: u32) -> Result<AsymptoticRatio> {
    if n < 2 {
        return invalid(format!("asymptotic ratio needs N >= 2 (got {n})"));
    }
    let nf = f64::from(n);
    let ln_ratio = ln_f(n - 1) + nf - (nf - 1.0) * nf.ln();
    Ok(AsymptoticRatio {
        ratio: ln_ratio.exp(),
        stirling: (2.0 * std::f64::consts::PI * nf).sqrt(),
    })
}

/// Optical resources consumed by one run of a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub beam_splitters: u64,
    pub phase_shifters: u64,
    pub spcd_detectors: u64,
    pub fock_inputs: u64,
    pub single_photon_inputs: u64,
    /// Method 3 with odd N: polarization sub-blocks, twice the BS and PS
    /// of the even layout.
    pub polarization_variant: bool,
}

pub fn resource_counts(method: Method, d: usize, n: u32) -> Result<ResourceCount> {
    method.check_domain(d, n)?;
    let (d, n) = (d as u64, u64::from(n));
    let m = n / 2;
    let rc = |bs, ps, spcd, fock, single| ResourceCount {
        beam_splitters: bs,
        phase_shifters: ps,
        spcd_detectors: spcd,
        fock_inputs: fock,
        single_photon_inputs: single,
        polarization_variant: false,
    };
    Ok(match method {
        Method::M1 => rc(d * m, 0, d * m, 0, d * m),
        Method::M2 => rc(d * m + d - 1, d, d * m, 1, d * m),
        Method::M3 if n % 2 == 0 => rc(3 * n * (d - 1) / 2, n * (d - 1) / 2, n * (d - 1), d, 0),
        Method::M3 => ResourceCount {
            polarization_variant: true,
            ..rc(3 * n * (d - 1), n * (d - 1), n * (d - 1), d, 0)
        },
        Method::M4 => rc(4 * (d - 1), d - 1, d - 1, 1, d - 1),
    })
}

/// Detector and single-photon source efficiencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    pub eta_detector: f64,
    pub eta_single_photon: f64,
}

impl LossModel {
    pub fn new(eta_detector: f64, eta_single_photon: f64) -> Result<Self> {
        for (name, v) in [
            ("eta_detector", eta_detector),
            ("eta_single_photon", eta_single_photon),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("{name} must lie in [0, 1] (got {v})"));
            }
        }
        Ok(LossModel {
            eta_detector,
            eta_single_photon,
        })
    }

    pub fn lossless() -> Self {
        LossModel {
            eta_detector: 1.0,
            eta_single_photon: 1.0,
        }
    }
}

/// `p · η_D^x · η_1^y` with `x` detectors and `y` single-photon inputs.
pub fn loss_adjusted_probability(p: f64, rc: &ResourceCount, lm: &LossModel) -> f64 {
    p * lm.eta_detector.powf(rc.spcd_detectors as f64)
        * lm.eta_single_photon.powf(rc.single_photon_inputs as f64)
}
