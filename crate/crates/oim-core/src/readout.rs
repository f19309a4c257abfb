//! Phase-to-spin conversion and comparator-style sampling.
//!
//! Spins are encoded in relative phase: oscillator `i` reads +1 when its
//! phase sits within a quarter turn of the reference oscillator (mod pi)
//! and -1 otherwise. The comparator readout emulates the firmware, which
//! snapshots the zero-crossing comparators several times and takes a
//! majority vote.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::SpinConfig;

/// Residual threshold (radians) below which an oscillator counts as
/// settled onto a multiple of pi.
pub const SETTLE_THRESHOLD: f64 = 0.1;

/// Spins plus per-oscillator diagnostics from a phase snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutResult {
    pub spins: SpinConfig,
    /// Distance (radians) from each relative phase to the nearest
    /// multiple of pi; always in [0, pi/2].
    pub residuals: Vec<f64>,
    /// True when every residual is at most [`SETTLE_THRESHOLD`].
    pub settled: bool,
}

/// Converts phases to spins relative to oscillator `reference`.
///
/// `spins[i]` is +1 when `cos(phi_i - phi_ref) >= 0` (ties resolve to +1),
/// so the reference spin is always +1.
pub fn binarize(phases: &[f64], reference: usize) -> Result<ReadoutResult> {
    if reference >= phases.len() {
        return Err(Error::InvalidParam(format!(
            "reference oscillator {reference} out of range for n = {}",
            phases.len()
        )));
    }
    let ref_phase = phases[reference];
    let mut spins = Vec::with_capacity(phases.len());
    let mut residuals = Vec::with_capacity(phases.len());
    for &phi in phases {
        let delta = phi - ref_phase;
        spins.push(if delta.cos() >= 0.0 { 1 } else { -1 });
        let wrapped = delta.rem_euclid(PI);
        residuals.push(wrapped.min(PI - wrapped));
    }
    let settled = residuals.iter().all(|&r| r <= SETTLE_THRESHOLD);
    Ok(ReadoutResult {
        spins: SpinConfig::new(spins)?,
        residuals,
        settled,
    })
}

/// Emulates the firmware readout: `samples` comparator snapshots at
/// uniformly random waveform instants, each oscillator compared against
/// the reference (index 0), spin decided by majority agreement.
///
/// `samples` must be odd so the vote cannot tie.
pub fn comparator_readout(
    phases: &[f64],
    samples: usize,
    rng: &mut impl Rng,
) -> Result<SpinConfig> {
    if samples == 0 || samples.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!(
            "sample count must be odd and >= 1, got {samples}"
        )));
    }
    if phases.is_empty() {
        return Err(Error::InvalidParam("empty phase vector".into()));
    }
    let mut agreements = vec![0usize; phases.len()];
    for _ in 0..samples {
        let instant: f64 = rng.random::<f64>(); // fraction of one waveform cycle
        let ref_bit = (TAU * instant + phases[0]).cos() >= 0.0;
        for (i, &phi) in phases.iter().enumerate() {
            let bit = (TAU * instant + phi).cos() >= 0.0;
            if bit == ref_bit {
                agreements[i] += 1;
            }
        }
    }
    SpinConfig::new(
        agreements
            .iter()
            .map(|&a| if 2 * a > samples { 1 } else { -1 })
            .collect(),
    )
}

/// Counts binarized spin changes between consecutive trajectory samples
/// (Hamming distance summed over sample pairs).
pub fn bitflip_count(traj: &crate::dynamics::Trajectory, reference: usize) -> Result<usize> {
    if traj.samples.is_empty() {
        return Err(Error::InvalidParam("empty trajectory".into()));
    }
    let mut flips = 0;
    let mut prev = binarize(&traj.samples[0].phases, reference)?.spins;
    for sample in &traj.samples[1..] {
        let cur = binarize(&sample.phases, reference)?.spins;
        flips += prev
            .as_slice()
            .iter()
            .zip(cur.as_slice())
            .filter(|(a, b)| a != b)
            .count();
        prev = cur;
    }
    Ok(flips)
}
