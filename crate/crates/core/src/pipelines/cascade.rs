//! Binary-tree cascades of entanglement generators (methods 3 and 4).

use crate::elements::PolarizedPath;
use crate::error::Result;
use crate::fock::FockState;

use super::generators::{
    generator_even, generator_kerr, generator_odd, polarization_summed, rotate_polarization,
};
use super::{expect_method, finish, Method, MethodConfig, NoonReport};

/// Input path of each of the `d − 1` generators, in application order.
///
/// Generators are applied level by level; at each level every existing path
/// (latest first) feeds one generator whose fresh output takes the next
/// unused index. For `d = 4` this is `[0, 1, 0]`: paths (1,2), then (2,3)
/// and (1,4) in 1-based labels. Every component passes through exactly
/// `log₂ d` splitting generators, which keeps the amplitudes balanced.
pub fn binary_tree_schedule(d: usize) -> Vec<usize> {
    let mut schedule = Vec::with_capacity(d.saturating_sub(1));
    let mut existing = 1;
    while existing < d {
        schedule.extend((0..existing).rev());
        existing *= 2;
    }
    schedule
}

pub fn run_method3(cfg: &MethodConfig) -> Result<NoonReport> {
    expect_method(cfg, Method::M3)?;
    cfg.validate()?;
    let n = cfg.n_photons;
    let final_state = if n.is_multiple_of(2) {
        let mut s = FockState::fock(1, [n])?;
        for src in binary_tree_schedule(cfg.d) {
            s = generator_even(&s, src, n)?.state;
            if s.is_zero() {
                return Ok(zero_report(cfg));
            }
        }
        s
    } else {
        // Path p lives on submodes (2p, 2p+1). Generator outputs are V
        // polarized and get rotated to H before feeding another generator.
        let mut s = FockState::fock(2, [n, 0])?;
        let mut vertical = vec![false];
        for src in binary_tree_schedule(cfg.d) {
            let path = PolarizedPath::consecutive(src);
            if vertical[src] {
                s = rotate_polarization(&s, path)?;
                vertical[src] = false;
            }
            s = generator_odd(&s, path, n)?.state;
            vertical.push(true);
            if s.is_zero() {
                return Ok(zero_report(cfg));
            }
        }
        polarization_summed(&s)?
    };
    Ok(finish(cfg, &final_state))
}

pub fn run_method4(cfg: &MethodConfig) -> Result<NoonReport> {
    expect_method(cfg, Method::M4)?;
    cfg.validate()?;
    let mut s = FockState::fock(1, [cfg.n_photons])?;
    for src in binary_tree_schedule(cfg.d) {
        s = generator_kerr(&s, src, cfg.n_photons)?.state;
        if s.is_zero() {
            return Ok(zero_report(cfg));
        }
    }
    Ok(finish(cfg, &s))
}

fn zero_report(cfg: &MethodConfig) -> NoonReport {
    finish(cfg, &FockState::zero(cfg.d))
}
