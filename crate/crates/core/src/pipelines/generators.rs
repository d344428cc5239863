//! Two-path entanglement generators used by the cascaded schemes.
//!
//! Each generator takes the state, an input path and `N`, appends its own
//! resources, runs its heralded circuit and returns the state with exactly
//! one new path appended (the generator's fresh output). Taps and ancillas
//! are removed as soon as they are measured.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::elements::{
    apply_circuit, project_pattern, project_total, two_photon_herald, Element, HeraldedOutcome,
    PolarizedPath,
};
use crate::error::{invalid, NoonError, Result};
use crate::fock::{FockState, OccupationVector};

use super::sub_block_phase;

fn check_path(state: &FockState, mode: usize) -> Result<()> {
    if mode >= state.mode_count() {
        return Err(NoonError::InvalidMode {
            mode,
            mode_count: state.mode_count(),
        });
    }
    Ok(())
}

/// Even-N generator: `N/2` sub-blocks, each removing two photons from
/// either the input path or the generator's own `|N⟩` without revealing
/// which.
///
/// Sub-block `k` taps both paths with `T_k = (N−k)/(N−k+1)` and heralds
/// one photon on each output of a 50:50 splitter after a phase `2πk/N`.
/// On `|N⟩` input the two paths end in `c(|0N⟩ ± |N0⟩)`, `+` for
/// `N ≡ 2 (mod 4)` and `−` for `N ≡ 0 (mod 4)`.
pub fn generator_even(state: &FockState, path_a: usize, n_photons: u32) -> Result<HeraldedOutcome> {
    if n_photons == 0 || !n_photons.is_multiple_of(2) {
        return invalid(format!(
            "even-N generator called with N = {n_photons}; use generator_odd for odd N"
        ));
    }
    check_path(state, path_a)?;
    let fresh = state.mode_count();
    let mut s = state.tensor(&FockState::fock(1, [n_photons])?);
    for k in 1..=n_photons / 2 {
        let (tap_b, tap_c) = (s.mode_count(), s.mode_count() + 1);
        s = s.tensor(&FockState::vacuum(2));
        let t = f64::from(n_photons - k) / f64::from(n_photons - k + 1);
        let theta = t.sqrt().acos();
        s = apply_circuit(
            &s,
            &[
                Element::BeamSplitter {
                    i: path_a,
                    j: tap_b,
                    theta,
                },
                Element::BeamSplitter {
                    i: fresh,
                    j: tap_c,
                    theta,
                },
            ],
        )?;
        s = two_photon_herald(&s, tap_b, tap_c, sub_block_phase(k, n_photons))?.state;
        if s.is_zero() {
            break;
        }
    }
    Ok(HeraldedOutcome::new(state, s))
}

/// Odd-N generator on polarized paths: `N` sub-blocks, each removing one
/// photon.
///
/// The input path carries H photons; the generator's own `|N⟩` is V
/// polarized. Sub-block `k` taps both polarizations of both paths with
/// `T'_k = (2N−k)/(2N−k+1)`, applies `ψ_k = 2πk/N` to the second tap,
/// combines the taps on a polarizing beam splitter and heralds exactly one
/// photon on the port that collects the transmitted H tap and the reflected
/// V tap. That detector does not resolve polarization, so both branches
/// merge coherently. The other port is projected on vacuum.
///
/// The new path occupies submodes `(m, m+1)` where `m` is the input mode count.
pub fn generator_odd(
    state: &FockState,
    path_a: PolarizedPath,
    n_photons: u32,
) -> Result<HeraldedOutcome> {
    if n_photons % 2 != 1 {
        return invalid(format!(
            "odd-N generator called with N = {n_photons}; use generator_even for even N"
        ));
    }
    check_path(state, path_a.h)?;
    check_path(state, path_a.v)?;
    if path_a.h == path_a.v {
        return Err(NoonError::RepeatedMode(path_a.h));
    }
    let m = state.mode_count();
    let fresh = PolarizedPath::new(m, m + 1);
    let mut s = state.tensor(&FockState::fock(2, [0, n_photons])?);
    let two_n = 2 * n_photons;
    for k in 1..=n_photons {
        let base = s.mode_count();
        let tap_b = PolarizedPath::new(base, base + 1);
        let tap_c = PolarizedPath::new(base + 2, base + 3);
        s = s.tensor(&FockState::vacuum(4));
        let t = f64::from(two_n - k) / f64::from(two_n - k + 1);
        let theta = t.sqrt().acos();
        let psi = sub_block_phase(k, n_photons);
        let bs = |i, j| Element::BeamSplitter { i, j, theta };
        s = apply_circuit(
            &s,
            &[
                bs(path_a.h, tap_b.h),
                bs(path_a.v, tap_b.v),
                bs(fresh.h, tap_c.h),
                bs(fresh.v, tap_c.v),
                Element::PhaseShifter {
                    mode: tap_c.h,
                    phi: psi,
                },
                Element::PhaseShifter {
                    mode: tap_c.v,
                    phi: psi,
                },
                Element::PolarizingBS { a: tap_b, b: tap_c },
            ],
        )?;
        s = project_pattern(&s, &[(tap_c.h, 0), (tap_c.v, 0)])?.state;
        s = project_total(&s, &[tap_b.h, tap_b.v], 1)?.state;
        if s.is_zero() {
            break;
        }
    }
    Ok(HeraldedOutcome::new(state, s))
}

/// Half-wave plate swapping the H and V submodes of a path, written as a
/// beam splitter between them at `θ = π/2` (each photon picks up `i`).
pub fn rotate_polarization(state: &FockState, path: PolarizedPath) -> Result<FockState> {
    crate::elements::apply_element(
        state,
        &Element::BeamSplitter {
            i: path.h,
            j: path.v,
            theta: FRAC_PI_2,
        },
    )
}

/// Collapses consecutive (H, V) submode pairs into one mode per path whose
/// occupation is the polarization sum.
pub fn polarization_summed(state: &FockState) -> Result<FockState> {
    if !state.mode_count().is_multiple_of(2) {
        return invalid("polarized state must have an even number of submodes");
    }
    let paths = state.mode_count() / 2;
    FockState::from_terms(
        paths,
        state.terms().map(|(occ, amp)| {
            let counts: Vec<u32> = occ.counts().chunks(2).map(|hv| hv[0] + hv[1]).collect();
            (OccupationVector::new(counts), *amp)
        }),
        false,
    )
}

/// Cross-Kerr generator: a Mach–Zehnder on the input path and a fresh
/// vacuum mode, with a Kerr medium (`χ = π`) coupling its first arm to one
/// arm of a single-photon interferometer.
///
/// Appends modes `b` (fresh output), `c` (single photon) and `d`
/// (vacuum), applies `U_cd† U_ab† U_K U_ab U_cd` with 50:50 splitters,
/// gives the `N`-photon term in `b` a phase `−Nπ/2` (a `−π/2` shifter), then
/// heralds one photon in `c` and none in `d`.
/// `|N⟩` becomes `(|N0⟩ + |0N⟩)/2`; `|0⟩` passes with amplitude 1.
///
/// The circuit does not depend on `N`; the argument mirrors the other
/// generators.
pub fn generator_kerr(
    state: &FockState,
    path_a: usize,
    _n_photons: u32,
) -> Result<HeraldedOutcome> {
    check_path(state, path_a)?;
    let m = state.mode_count();
    let (b, c, d) = (m, m + 1, m + 2);
    let s = state.tensor(&FockState::fock(3, [0, 1, 0])?);
    let bs = |i, j, theta| Element::BeamSplitter { i, j, theta };
    let s = apply_circuit(
        &s,
        &[
            bs(c, d, FRAC_PI_4),
            bs(path_a, b, FRAC_PI_4),
            Element::CrossKerr {
                i: path_a,
                j: d,
                chi: PI,
            },
            bs(path_a, b, -FRAC_PI_4),
            bs(c, d, -FRAC_PI_4),
            Element::PhaseShifter {
                mode: b,
                phi: -FRAC_PI_2,
            },
        ],
    )?;
    let out = project_pattern(&s, &[(c, 1), (d, 0)])?;
    Ok(HeraldedOutcome::new(state, out.state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn even_generator_rejects_odd_n() {
        let s = FockState::fock(1, [3]).unwrap();
        assert!(generator_even(&s, 0, 3).is_err());
        assert!(generator_even(&s, 1, 2).is_err());
    }

    #[test]
    fn odd_generator_rejects_even_n() {
        let s = FockState::fock(2, [2, 0]).unwrap();
        assert!(generator_odd(&s, PolarizedPath::consecutive(0), 2).is_err());
    }

    #[test]
    fn kerr_generator_passes_vacuum() {
        let s = FockState::vacuum(1);
        let out = generator_kerr(&s, 0, 4).unwrap();
        assert_eq!(out.state.mode_count(), 2);
        assert!((out.state.amplitude(&[0, 0].into()).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((out.herald_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_moves_vertical_to_horizontal() {
        let s = FockState::fock(2, [0, 3]).unwrap();
        let r = rotate_polarization(&s, PolarizedPath::consecutive(0)).unwrap();
        assert_eq!(r.len(), 1);
        // i^3
        assert!((r.amplitude(&[3, 0].into()).unwrap() - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn polarization_sum_merges_submodes() {
        let s = FockState::fock(4, [0, 3, 1, 0]).unwrap();
        let p = polarization_summed(&s).unwrap();
        assert_eq!(p.mode_count(), 2);
        assert!((p.amplitude(&[3, 1].into()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }
}
