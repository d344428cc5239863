//! Sparse multimode Fock-space states.
//!
//! A [`FockState`] is a map from occupation vectors to complex amplitudes.
//! Heralded and postselected states are kept unnormalized: every amplitude
//! stays relative to the original input, so a squared norm read off at the
//! end of a pipeline is directly a success probability.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NoonError, Result};

/// Amplitudes with magnitude below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance on `|norm² - 1|` for states flagged as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Photon counts per mode, labelling one Fock basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        OccupationVector(counts)
    }

    /// The vacuum on `mode_count` modes.
    pub fn vacuum(mode_count: usize) -> Self {
        OccupationVector(vec![0; mode_count])
    }

    /// `photons` in mode `mode`, vacuum elsewhere.
    pub fn single(mode_count: usize, mode: usize, photons: u32) -> Self {
        let mut counts = vec![0; mode_count];
        counts[mode] = photons;
        OccupationVector(counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub(crate) fn into_counts(self) -> Vec<u32> {
        self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(counts: Vec<u32>) -> Self {
        OccupationVector(counts)
    }
}

impl From<&[u32]> for OccupationVector {
    fn from(counts: &[u32]) -> Self {
        OccupationVector(counts.to_vec())
    }
}

impl<const K: usize> From<[u32; K]> for OccupationVector {
    fn from(counts: [u32; K]) -> Self {
        OccupationVector(counts.to_vec())
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// One serialized term: occupation plus real and imaginary amplitude parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub occupation: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// A sparse superposition of Fock basis states over a fixed number of modes.
///
/// Values are immutable once built; every operation returns a new state.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    mode_count: usize,
    terms: BTreeMap<OccupationVector, Complex64>,
    normalized: bool,
}

impl FockState {
    /// Builds a state from raw terms, summing duplicates and pruning.
    ///
    /// `normalized` is only a declaration; it is dropped if the resulting
    /// squared norm is not within [`NORMALIZATION_TOLERANCE`] of one.
    pub fn from_terms<I>(mode_count: usize, terms: I, normalized: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != mode_count {
                return Err(NoonError::ModeCountMismatch {
                    expected: mode_count,
                    got: occ.len(),
                });
            }
            *map.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(Self::from_map(mode_count, map, normalized))
    }

    /// Internal constructor: keys are trusted to have the right length.
    pub(crate) fn from_map(
        mode_count: usize,
        mut terms: BTreeMap<OccupationVector, Complex64>,
        normalized: bool,
    ) -> Self {
        terms.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let mut state = FockState {
            mode_count,
            terms,
            normalized: false,
        };
        if normalized {
            state.normalized = (state.norm_sq() - 1.0).abs() <= NORMALIZATION_TOLERANCE;
        }
        state
    }

    /// The zero vector (no terms) on `mode_count` modes.
    pub fn zero(mode_count: usize) -> Self {
        FockState {
            mode_count,
            terms: BTreeMap::new(),
            normalized: false,
        }
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Self::basis(OccupationVector::vacuum(mode_count))
    }

    fn basis(occ: OccupationVector) -> Self {
        let mode_count = occ.len();
        let mut terms = BTreeMap::new();
        terms.insert(occ, Complex64::new(1.0, 0.0));
        FockState {
            mode_count,
            terms,
            normalized: true,
        }
    }

    /// The number state `|n_1, ..., n_d⟩` with unit amplitude.
    pub fn fock(mode_count: usize, occupation: impl Into<OccupationVector>) -> Result<Self> {
        let occ = occupation.into();
        if occ.len() != mode_count {
            return Err(NoonError::ModeCountMismatch {
                expected: mode_count,
                got: occ.len(),
            });
        }
        Ok(Self::basis(occ))
    }

    /// Single-mode coherent state `|α⟩` truncated after `cutoff` photons.
    ///
    /// Amplitudes are `exp(-|α|²/2) αⁿ/√n!`, built by the ratio recurrence
    /// `αⁿ⁺¹/√(n+1)!` so no factorial is ever formed. The result is marked
    /// unnormalized since truncation loses weight.
    pub fn coherent_truncated(alpha: Complex64, cutoff: u32) -> Self {
        let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut terms = BTreeMap::new();
        for n in 0..=cutoff {
            if n > 0 {
                amp = amp * alpha / f64::from(n).sqrt();
            }
            if amp.norm() == 0.0 {
                break;
            }
            terms.insert(OccupationVector(vec![n]), amp);
        }
        Self::from_map(1, terms, false)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Number of stored (non-pruned) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The zero vector, e.g. after a herald that cannot fire.
    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Stored amplitude for `occ`, or exactly zero if the term is absent.
    pub fn amplitude(&self, occ: &OccupationVector) -> Result<Complex64> {
        if occ.len() != self.mode_count {
            return Err(NoonError::ModeCountMismatch {
                expected: self.mode_count,
                got: occ.len(),
            });
        }
        Ok(self
            .terms
            .get(occ)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0)))
    }

    /// Joint state `self ⊗ other`; `other`'s modes follow `self`'s.
    pub fn tensor(&self, other: &FockState) -> FockState {
        let mut terms = BTreeMap::new();
        for (oa, aa) in &self.terms {
            for (ob, ab) in &other.terms {
                let mut counts = Vec::with_capacity(self.mode_count + other.mode_count);
                counts.extend_from_slice(oa.counts());
                counts.extend_from_slice(ob.counts());
                terms.insert(OccupationVector(counts), aa * ab);
            }
        }
        Self::from_map(
            self.mode_count + other.mode_count,
            terms,
            self.normalized && other.normalized,
        )
    }

    /// Keeps only terms whose total photon number equals `n_total`.
    pub fn restrict_total_photons(&self, n_total: u32) -> FockState {
        let terms = self
            .terms
            .iter()
            .filter(|(occ, _)| occ.total() == n_total)
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        Self::from_map(self.mode_count, terms, false)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> FockState {
        let terms = self
            .terms
            .iter()
            .map(|(o, a)| (o.clone(), a * factor))
            .collect();
        Self::from_map(self.mode_count, terms, false)
    }

    /// Applies `f` to every term, accumulating amplitudes that land on the
    /// same output occupation. Used by the element kernels.
    pub(crate) fn map_terms<F>(&self, mode_count: usize, normalized: bool, mut f: F) -> FockState
    where
        F: FnMut(&OccupationVector, Complex64, &mut dyn FnMut(OccupationVector, Complex64)),
    {
        let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            f(occ, *amp, &mut |o, a| {
                *out.entry(o).or_insert(Complex64::new(0.0, 0.0)) += a;
            });
        }
        Self::from_map(mode_count, out, normalized)
    }

    /// Serialization rows in canonical order.
    pub fn rows(&self) -> Vec<StateRow> {
        self.terms
            .iter()
            .map(|(o, a)| StateRow {
                occupation: o.counts().to_vec(),
                re: a.re,
                im: a.im,
            })
            .collect()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (occ, amp)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", amp.re, amp.im, occ)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fock_constructs_single_term() {
        let vac = FockState::fock(1, [0]).unwrap();
        assert_eq!(vac.len(), 1);
        assert!(vac.is_normalized());
        assert_relative_eq!(vac.norm_sq(), 1.0);

        let s = FockState::fock(2, [4, 0]).unwrap();
        assert_eq!(s.amplitude(&[4, 0].into()).unwrap(), c(1.0, 0.0));

        let s = FockState::fock(4, [0, 0, 0, 2]).unwrap();
        assert_eq!(s.amplitude(&[0, 0, 0, 2].into()).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn fock_rejects_length_mismatch() {
        assert_eq!(
            FockState::fock(3, [1, 0]),
            Err(NoonError::ModeCountMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn coherent_vacuum_limit() {
        let s = FockState::coherent_truncated(c(0.0, 0.0), 5);
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s.amplitude(&[0].into()).unwrap().re, 1.0);
    }

    #[test]
    fn coherent_amplitudes_match_poisson_formula() {
        let s = FockState::coherent_truncated(c(1.0, 0.0), 2);
        let e = (-0.5f64).exp();
        assert_relative_eq!(s.amplitude(&[0].into()).unwrap().re, e, epsilon = 1e-15);
        assert_relative_eq!(s.amplitude(&[1].into()).unwrap().re, e, epsilon = 1e-15);
        assert_relative_eq!(
            s.amplitude(&[2].into()).unwrap().re,
            e / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(!s.is_normalized());
        // 2.5 / e
        assert_relative_eq!(s.norm_sq(), 2.5 * (-1f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(s.norm_sq(), 0.919_698_602_928_605_5, epsilon = 1e-15);
    }

    #[test]
    fn coherent_norm_converges() {
        let s = FockState::coherent_truncated(c(1.0, 0.0), 20);
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_examples() {
        let v = FockState::vacuum(1);
        let vv = v.tensor(&v);
        assert_eq!(vv, FockState::fock(2, [0, 0]).unwrap());

        let s = FockState::fock(1, [2])
            .unwrap()
            .tensor(&FockState::fock(1, [1]).unwrap());
        assert_eq!(s.amplitude(&[2, 1].into()).unwrap(), c(1.0, 0.0));

        let h = 0.5f64.sqrt();
        let plus =
            FockState::from_terms(1, [([0].into(), c(h, 0.0)), ([1].into(), c(h, 0.0))], true)
                .unwrap();
        assert!(plus.is_normalized());
        let t = plus.tensor(&FockState::fock(1, [1]).unwrap());
        assert_eq!(t.mode_count(), 2);
        assert_relative_eq!(t.amplitude(&[0, 1].into()).unwrap().re, h);
        assert_relative_eq!(t.amplitude(&[1, 1].into()).unwrap().re, h);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn norm_sq_examples() {
        let s = FockState::from_terms(
            2,
            [([2, 0].into(), c(0.5, 0.0)), ([0, 2].into(), c(0.5, 0.0))],
            false,
        )
        .unwrap();
        assert_relative_eq!(s.norm_sq(), 0.5);
    }

    #[test]
    fn amplitude_is_total() {
        let s = FockState::fock(2, [4, 0]).unwrap();
        assert_eq!(s.amplitude(&[0, 4].into()).unwrap(), c(0.0, 0.0));
        assert!(s.amplitude(&[0, 4, 0].into()).is_err());
    }

    #[test]
    fn restrict_keeps_sector() {
        let s = FockState::from_terms(
            2,
            [([4, 0].into(), c(0.6, 0.0)), ([3, 0].into(), c(0.8, 0.0))],
            true,
        )
        .unwrap();
        let r = s.restrict_total_photons(4);
        assert_eq!(r.len(), 1);
        assert!(!r.is_normalized());
        assert_relative_eq!(r.amplitude(&[4, 0].into()).unwrap().re, 0.6);
        assert!(s.restrict_total_photons(9).is_zero());
    }

    #[test]
    fn tiny_amplitudes_are_pruned() {
        let s = FockState::from_terms(
            1,
            [([0].into(), c(1.0, 0.0)), ([1].into(), c(1e-15, 0.0))],
            false,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn rows_are_canonically_ordered() {
        let s = FockState::from_terms(
            2,
            [
                ([0, 2].into(), c(0.5, 0.0)),
                ([2, 0].into(), c(0.5, 0.0)),
                ([1, 1].into(), c(0.0, -0.5)),
            ],
            false,
        )
        .unwrap();
        let occs: Vec<_> = s.rows().into_iter().map(|r| r.occupation).collect();
        assert_eq!(occs, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
