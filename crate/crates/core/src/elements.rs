//! Optical elements and photon-counting projections.
//!
//! Beam splitters follow `U(θ) = exp[iθ(a†b + ab†)]`, so `a† ↦ cos θ a† + i sin θ b†`
//! and the reflected amplitude always carries `i sin θ`. Every sign in the
//! generation pipelines is derived from this one convention.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, NoonError, Result};
use crate::fock::{FockState, OccupationVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The horizontal and vertical submodes of one spatial path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizedPath {
    pub h: usize,
    pub v: usize,
}

impl PolarizedPath {
    pub fn new(h: usize, v: usize) -> Self {
        PolarizedPath { h, v }
    }

    /// Path whose submodes sit at `2p` and `2p + 1`.
    pub fn consecutive(path: usize) -> Self {
        PolarizedPath {
            h: 2 * path,
            v: 2 * path + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Element {
    /// Two-mode beam splitter with transmissivity `cos²θ`.
    BeamSplitter { i: usize, j: usize, theta: f64 },
    /// `exp(iφ n)` on one mode.
    PhaseShifter { mode: usize, phi: f64 },
    /// `exp(iχ n_i n_j)` between two modes.
    CrossKerr { i: usize, j: usize, chi: f64 },
    /// Transmits H, reflects V: V submodes of the two paths are exchanged
    /// and each reflected photon picks up a factor `i`.
    PolarizingBS { a: PolarizedPath, b: PolarizedPath },
}

impl Element {
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Element::BeamSplitter { i, j, .. } | Element::CrossKerr { i, j, .. } => vec![i, j],
            Element::PhaseShifter { mode, .. } => vec![mode],
            Element::PolarizingBS { a, b } => vec![a.h, a.v, b.h, b.v],
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            Element::BeamSplitter { theta, .. } => Some(theta),
            Element::PhaseShifter { phi, .. } => Some(phi),
            Element::CrossKerr { chi, .. } => Some(chi),
            Element::PolarizingBS { .. } => None,
        }
    }

    pub fn validate(&self, mode_count: usize) -> Result<()> {
        let modes = self.modes();
        for (k, &m) in modes.iter().enumerate() {
            if m >= mode_count {
                return Err(NoonError::InvalidMode {
                    mode: m,
                    mode_count,
                });
            }
            if modes[..k].contains(&m) {
                return Err(NoonError::RepeatedMode(m));
            }
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return invalid(format!("element angle must be finite, got {a}"));
            }
        }
        Ok(())
    }
}

/// Post-measurement state with the measured modes removed.
#[derive(Clone, Debug, PartialEq)]
pub struct HeraldedOutcome {
    /// Unnormalized; amplitudes stay relative to the pre-measurement input.
    pub state: FockState,
    /// Squared norm of `state` relative to the squared norm of the input.
    pub herald_probability: f64,
}

impl HeraldedOutcome {
    pub(crate) fn new(input: &FockState, state: FockState) -> Self {
        let denom = input.norm_sq();
        let herald_probability = if denom > 0.0 {
            state.norm_sq() / denom
        } else {
            0.0
        };
        HeraldedOutcome {
            state,
            herald_probability,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.state.is_zero()
    }
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// `⟨p,q| U(θ) |m,n⟩` for the two-mode beam splitter.
///
/// Expands `(cos θ a† + i sin θ b†)^m (cos θ b† + i sin θ a†)^n / √(m! n!)` and
/// reads off `√(p! q!)` times the `a†^p b†^q` coefficient. Zero unless
/// `p + q = m + n`.
pub fn bs_matrix_element(m: u32, n: u32, p: u32, q: u32, theta: f64) -> Complex64 {
    if p + q != m + n {
        return Complex64::new(0.0, 0.0);
    }
    let (s, c) = theta.sin_cos();
    // j photons of the first factor stay in a, p - j of the second land in a.
    let lo = p.saturating_sub(n);
    let hi = m.min(p);
    let mut sum = 0.0;
    for j in lo..=hi {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let cos_pow = (2 * j + n - p) as i32;
        let sin_pow = (m + p - 2 * j) as i32;
        sum += sign * binomial(m, j) * binomial(n, p - j) * c.powi(cos_pow) * s.powi(sin_pow);
    }
    let norm = (factorial(p) * factorial(q) / (factorial(m) * factorial(n))).sqrt();
    // i^{m+p} pulled out of the sum
    I.powu(m + p) * (sum * norm)
}

/// Applies one element to every term of `s`.
pub fn apply_element(s: &FockState, e: &Element) -> Result<FockState> {
    e.validate(s.mode_count())?;
    let mc = s.mode_count();
    let keep_norm = s.is_normalized();
    let out = match *e {
        Element::BeamSplitter { i, j, theta } => {
            let mut cache: HashMap<(u32, u32, u32), Complex64> = HashMap::new();
            s.map_terms(mc, keep_norm, |occ, amp, emit| {
                let (m, n) = (occ.get(i), occ.get(j));
                for p in 0..=m + n {
                    let q = m + n - p;
                    let el = *cache
                        .entry((m, n, p))
                        .or_insert_with(|| bs_matrix_element(m, n, p, q, theta));
                    if el.norm() == 0.0 {
                        continue;
                    }
                    let mut o = occ.clone();
                    o.counts_mut()[i] = p;
                    o.counts_mut()[j] = q;
                    emit(o, amp * el);
                }
            })
        }
        Element::PhaseShifter { mode, phi } => s.map_terms(mc, keep_norm, |occ, amp, emit| {
            let n = f64::from(occ.get(mode));
            emit(occ.clone(), amp * Complex64::from_polar(1.0, phi * n));
        }),
        Element::CrossKerr { i, j, chi } => s.map_terms(mc, keep_norm, |occ, amp, emit| {
            let nn = f64::from(occ.get(i)) * f64::from(occ.get(j));
            emit(occ.clone(), amp * Complex64::from_polar(1.0, chi * nn));
        }),
        Element::PolarizingBS { a, b } => s.map_terms(mc, keep_norm, |occ, amp, emit| {
            let (va, vb) = (occ.get(a.v), occ.get(b.v));
            let mut o = occ.clone();
            o.counts_mut()[a.v] = vb;
            o.counts_mut()[b.v] = va;
            emit(o, amp * I.powu(va + vb));
        }),
    };
    Ok(out)
}

/// Applies a sequence of elements in order.
pub fn apply_circuit(s: &FockState, elements: &[Element]) -> Result<FockState> {
    elements
        .iter()
        .try_fold(s.clone(), |acc, e| apply_element(&acc, e))
}

fn check_mode(s: &FockState, mode: usize) -> Result<()> {
    if mode >= s.mode_count() {
        return Err(NoonError::InvalidMode {
            mode,
            mode_count: s.mode_count(),
        });
    }
    Ok(())
}

fn remove_modes(occ: &OccupationVector, sorted_desc: &[usize]) -> OccupationVector {
    let mut counts = occ.clone().into_counts();
    for &m in sorted_desc {
        counts.remove(m);
    }
    OccupationVector::new(counts)
}

/// Ideal photon-number-resolving detection of `k` photons in `mode`.
pub fn project_photons(s: &FockState, mode: usize, k: u32) -> Result<HeraldedOutcome> {
    project_pattern(s, &[(mode, k)])
}

/// Coincidence detection: for each `(mode, k)` keep terms with exactly `k`
/// photons there, then delete all measured modes.
pub fn project_pattern(s: &FockState, pattern: &[(usize, u32)]) -> Result<HeraldedOutcome> {
    let mut modes: Vec<usize> = Vec::with_capacity(pattern.len());
    for &(m, _) in pattern {
        check_mode(s, m)?;
        if modes.contains(&m) {
            return Err(NoonError::RepeatedMode(m));
        }
        modes.push(m);
    }
    modes.sort_unstable_by(|a, b| b.cmp(a));
    let out = s.map_terms(s.mode_count() - modes.len(), false, |occ, amp, emit| {
        if pattern.iter().all(|&(m, k)| occ.get(m) == k) {
            emit(remove_modes(occ, &modes), amp);
        }
    });
    Ok(HeraldedOutcome::new(s, out))
}

/// A detector that sees the total count `k` over several modes and erases
/// which of them the photons occupied.
///
/// Terms that differ only in how the `k` photons were split over `modes`
/// are merged coherently. This is the herald used behind the polarizing
/// beam splitter, where one detector port collects an H photon from one
/// path or a V photon from the other.
pub fn project_total(s: &FockState, modes: &[usize], k: u32) -> Result<HeraldedOutcome> {
    let mut sorted: Vec<usize> = modes.to_vec();
    for (idx, &m) in modes.iter().enumerate() {
        check_mode(s, m)?;
        if modes[..idx].contains(&m) {
            return Err(NoonError::RepeatedMode(m));
        }
    }
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let out = s.map_terms(s.mode_count() - modes.len(), false, |occ, amp, emit| {
        if modes.iter().map(|&m| occ.get(m)).sum::<u32>() == k {
            emit(remove_modes(occ, &sorted), amp);
        }
    });
    Ok(HeraldedOutcome::new(s, out))
}

/// Appends `extra` as the trailing modes of `s`.
pub fn append_modes(s: &FockState, extra: &FockState) -> FockState {
    s.tensor(extra)
}

/// Beam-splitter angle that nulls the `k`-photon component: `T = k/(k+1)`.
pub fn fsf_angle(k: u32) -> f64 {
    (1.0 / f64::from(k).sqrt()).atan()
}

/// Fock state filter on `mode` removing its `k_filter`-photon component.
///
/// A single-photon ancilla is appended as the last mode, mixed on a beam
/// splitter with `θ = arctan(1/√k)`, and one photon is heralded there.
/// Amplitudes follow `C_n ↦ C_n cos^{n+1}θ (1 − n tan²θ)`.
pub fn apply_fsf(s: &FockState, mode: usize, k_filter: u32) -> Result<HeraldedOutcome> {
    check_mode(s, mode)?;
    if k_filter == 0 {
        return invalid("Fock state filter order must be at least 1");
    }
    let ancilla = s.mode_count();
    let joint = append_modes(s, &FockState::fock(1, [1])?);
    let mixed = apply_element(
        &joint,
        &Element::BeamSplitter {
            i: mode,
            j: ancilla,
            theta: fsf_angle(k_filter),
        },
    )?;
    let out = project_photons(&mixed, ancilla, 1)?;
    Ok(HeraldedOutcome::new(s, out.state))
}

/// Two-photon herald on a pair of taps, circuit route: phase `ψ` on
/// `tap_c`, a 50:50 beam splitter, then one photon on each detector.
pub fn two_photon_herald(
    s: &FockState,
    tap_b: usize,
    tap_c: usize,
    psi: f64,
) -> Result<HeraldedOutcome> {
    let mixed = apply_circuit(
        s,
        &[
            Element::PhaseShifter {
                mode: tap_c,
                phi: psi,
            },
            Element::BeamSplitter {
                i: tap_b,
                j: tap_c,
                theta: FRAC_PI_4,
            },
        ],
    )?;
    project_pattern(&mixed, &[(tap_b, 1), (tap_c, 1)])
}

/// Two-photon herald, projector route: applies
/// `(i/√2)(⟨20| + e^{2iψ}⟨02|)` on the taps directly.
pub fn two_photon_projector(
    s: &FockState,
    tap_b: usize,
    tap_c: usize,
    psi: f64,
) -> Result<HeraldedOutcome> {
    check_mode(s, tap_b)?;
    check_mode(s, tap_c)?;
    if tap_b == tap_c {
        return Err(NoonError::RepeatedMode(tap_b));
    }
    let mut taps = [tap_b, tap_c];
    taps.sort_unstable_by(|a, b| b.cmp(a));
    let pref = I / 2f64.sqrt();
    let second = Complex64::from_polar(1.0, 2.0 * psi);
    let out = s.map_terms(s.mode_count() - 2, false, |occ, amp, emit| {
        match (occ.get(tap_b), occ.get(tap_c)) {
            (2, 0) => emit(remove_modes(occ, &taps), amp * pref),
            (0, 2) => emit(remove_modes(occ, &taps), amp * pref * second),
            _ => {}
        }
    });
    Ok(HeraldedOutcome::new(s, out))
}
