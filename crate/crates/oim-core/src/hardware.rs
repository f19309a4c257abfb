//! Coupling-board emulation: programmable-resistor models, coupling
//! quantization, and the firmware chip/channel layout.
//!
//! Couplings are realized as conductances, `|J_ij| = 1 / (Kc * R_ij)`.
//! The board wires potentiometers across opposite oscillator terminals,
//! which realizes anti-phase (negative) couplings only; positive entries
//! are rejected unless software-signed mode is selected. Three resistor
//! models are supported: the 8-bit quad-channel digital potentiometer
//! actually used (257 steps plus disconnect) and the two rejected R/2R
//! ladder designs (parallel: nonlinear steps, series: linear but coarse).

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::IsingProblem;

/// Channels per potentiometer package.
pub const CHANNELS_PER_CHIP: usize = 4;

/// Oscillators on the physical board.
pub const BOARD_SPINS: usize = 8;

/// Embeds a problem onto a board with at least `min_spins` oscillators;
/// spins added by padding are disconnected from everything.
pub fn pad_to_board(p: &IsingProblem, min_spins: usize) -> IsingProblem {
    if p.n() >= min_spins {
        return p.clone();
    }
    let mut couplings = Array2::zeros((min_spins, min_spins));
    for i in 0..p.n() {
        for j in 0..p.n() {
            couplings[[i, j]] = p.coupling(i, j);
        }
    }
    IsingProblem::from_couplings(couplings).expect("padding preserves validity")
}

/// Which programmable-resistor implementation to emulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizerKind {
    /// 8-bit digital potentiometer: R = full_scale * code / 256 + wiper.
    Digipot8,
    /// Binary-weighted parallel ladder: G = code / (8 * unit).
    R2rParallel,
    /// Series ladder: R = unit * code.
    R2rSeries,
}

/// Resistor model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerModel {
    pub kind: QuantizerKind,
    /// Digipot full-scale resistance (ohms).
    pub full_scale_ohms: f64,
    /// Digipot wiper resistance (ohms).
    pub wiper_ohms: f64,
    /// Unit resistance of the R/2R ladders (ohms).
    pub unit_ohms: f64,
}

pub const DEFAULT_FULL_SCALE_OHMS: f64 = 10_000.0;
pub const DEFAULT_WIPER_OHMS: f64 = 75.0;
pub const DEFAULT_UNIT_OHMS: f64 = 10_000.0;

impl QuantizerModel {
    pub fn new(kind: QuantizerKind) -> Self {
        Self {
            kind,
            full_scale_ohms: DEFAULT_FULL_SCALE_OHMS,
            wiper_ohms: DEFAULT_WIPER_OHMS,
            unit_ohms: DEFAULT_UNIT_OHMS,
        }
    }

    pub fn digipot8() -> Self {
        Self::new(QuantizerKind::Digipot8)
    }

    pub fn r2r_parallel() -> Self {
        Self::new(QuantizerKind::R2rParallel)
    }

    pub fn r2r_series() -> Self {
        Self::new(QuantizerKind::R2rSeries)
    }

    fn validate(&self) -> Result<()> {
        if !(self.full_scale_ohms > 0.0 && self.wiper_ohms > 0.0 && self.unit_ohms > 0.0) {
            return Err(Error::InvalidParam(
                "quantizer resistances must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Inclusive range of finite (connected) codes for this variant.
    pub fn code_range(&self) -> (u16, u16) {
        match self.kind {
            QuantizerKind::Digipot8 => (0, 256),
            QuantizerKind::R2rParallel | QuantizerKind::R2rSeries => (1, 15),
        }
    }

    /// Every finite resistance level, indexed by code.
    pub fn levels(&self) -> Vec<f64> {
        let (lo, hi) = self.code_range();
        (lo..=hi)
            .map(|code| code_to_resistance(self, Code::Level(code)).unwrap())
            .collect()
    }
}

/// A potentiometer setting: a connected code or an open circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Disconnect,
    Level(u16),
}

/// Resistance (ohms) realized by a code; `Disconnect` is infinite.
pub fn code_to_resistance(m: &QuantizerModel, code: Code) -> Result<f64> {
    m.validate()?;
    let level = match code {
        Code::Disconnect => return Ok(f64::INFINITY),
        Code::Level(level) => level,
    };
    let (lo, hi) = m.code_range();
    match m.kind {
        QuantizerKind::Digipot8 => {
            if level > hi {
                return Err(Error::CodeOutOfRange {
                    code: level,
                    min: lo,
                    max: hi,
                });
            }
            Ok(m.full_scale_ohms * f64::from(level) / 256.0 + m.wiper_ohms)
        }
        QuantizerKind::R2rParallel => {
            // code 0 opens every branch switch, which is the disconnect
            if level == 0 {
                return Ok(f64::INFINITY);
            }
            if level > hi {
                return Err(Error::CodeOutOfRange {
                    code: level,
                    min: 0,
                    max: hi,
                });
            }
            let conductance = f64::from(level) / (8.0 * m.unit_ohms);
            Ok(1.0 / conductance)
        }
        QuantizerKind::R2rSeries => {
            if level < lo || level > hi {
                return Err(Error::CodeOutOfRange {
                    code: level,
                    min: lo,
                    max: hi,
                });
            }
            Ok(m.unit_ohms * f64::from(level))
        }
    }
}

/// Coupling magnitude realized by resistance `r_ohms` under gain
/// `coupling_gain`: `1 / (Kc * R)`. An open circuit couples nothing.
pub fn resistance_to_coupling(r_ohms: f64, coupling_gain: f64) -> Result<f64> {
    if !coupling_gain.is_finite() || coupling_gain <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "coupling gain must be > 0, got {coupling_gain}"
        )));
    }
    if r_ohms.is_infinite() && r_ohms > 0.0 {
        return Ok(0.0);
    }
    if !(r_ohms.is_finite() && r_ohms > 0.0) {
        return Err(Error::InvalidParam(format!(
            "resistance must be > 0, got {r_ohms}"
        )));
    }
    Ok(1.0 / (coupling_gain * r_ohms))
}

/// Whether positive (ferromagnetic) couplings are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// Reject positive couplings: the board only realizes anti-phase.
    HardwareFaithful,
    /// Quantize magnitudes and reapply signs in software.
    SoftwareSigned,
}

/// Codes for every unordered pair, in row-major upper-triangle order,
/// with the firmware chip/channel address of each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCodes {
    n: usize,
    kind: QuantizerKind,
    codes: Vec<Code>,
    chip_channel: Vec<(usize, usize)>,
}

impl CouplingCodes {
    fn new(n: usize, kind: QuantizerKind, codes: Vec<Code>) -> Self {
        debug_assert_eq!(codes.len(), n * (n - 1) / 2);
        let chip_channel = (0..codes.len())
            .map(|idx| (idx / CHANNELS_PER_CHIP, idx % CHANNELS_PER_CHIP))
            .collect();
        Self {
            n,
            kind,
            codes,
            chip_channel,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> QuantizerKind {
        self.kind
    }

    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn chip_channel(&self) -> &[(usize, usize)] {
        &self.chip_channel
    }

    /// Potentiometer packages needed for this problem size.
    pub fn chips_required(&self) -> usize {
        self.codes.len().div_ceil(CHANNELS_PER_CHIP)
    }
}

/// Quantization record for one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    /// `-1` encodes disconnect, matching the firmware convention.
    pub code: i32,
    pub resistance_ohms: f64,
    /// Requested coupling (signed).
    pub target: f64,
    /// Realized coupling (signed).
    pub quantized: f64,
    /// Relative coupling-magnitude error; 0 for exact and disconnected pairs.
    pub rel_err: f64,
    /// True when the target fell outside the representable range.
    pub clamped: bool,
}

/// Result of quantizing a problem onto a resistor model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeOutcome {
    pub codes: CouplingCodes,
    /// The problem actually realized by the quantized resistances.
    pub quantized: IsingProblem,
    /// Per-pair quantization report, in pair-index order.
    pub records: Vec<PairRecord>,
    pub max_rel_err: f64,
    pub clamped_pairs: usize,
}

/// Linear index of pair `(i, j)` in row-major upper-triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(Error::InvalidParam(format!(
            "pair ({i}, {j}) out of range for n = {n}; need i < j < n"
        )));
    }
    Ok(i * (2 * n - i - 1) / 2 + (j - i - 1))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

/// Nearest connected code for a target resistance, compared in coupling
/// (conductance) space; ties resolve toward the lower resistance.
/// Returns the code and whether the target had to be clamped.
fn nearest_code(m: &QuantizerModel, target_ohms: f64) -> (u16, bool) {
    let (lo, hi) = m.code_range();
    let continuous = match m.kind {
        QuantizerKind::Digipot8 => (target_ohms - m.wiper_ohms) * 256.0 / m.full_scale_ohms,
        QuantizerKind::R2rParallel => 8.0 * m.unit_ohms / target_ohms,
        QuantizerKind::R2rSeries => target_ohms / m.unit_ohms,
    };
    let clamped = continuous < f64::from(lo) || continuous > f64::from(hi);
    let below = (continuous.floor().max(f64::from(lo)) as u16).clamp(lo, hi);
    let above = (continuous.ceil().min(f64::from(hi)) as u16).clamp(lo, hi);
    if below == above {
        return (below, clamped);
    }
    let target_coupling = 1.0 / target_ohms;
    let err = |code: u16| {
        let r = code_to_resistance(m, Code::Level(code)).unwrap();
        (1.0 / r - target_coupling).abs()
    };
    let (err_below, err_above) = (err(below), err(above));
    let r_below = code_to_resistance(m, Code::Level(below)).unwrap();
    let r_above = code_to_resistance(m, Code::Level(above)).unwrap();
    let choice = if err_below < err_above {
        below
    } else if err_above < err_below {
        above
    } else if r_below <= r_above {
        below
    } else {
        above
    };
    (choice, clamped)
}

/// Quantizes every pair coupling onto the resistor grid.
///
/// For each nonzero `J_ij` the target resistance is `1 / (Kc * |J_ij|)`;
/// the nearest representable code is selected (clamped at the range ends)
/// and the realized problem is rebuilt from the actual resistances. Zero
/// couplings disconnect.
pub fn quantize_problem(
    p: &IsingProblem,
    m: &QuantizerModel,
    coupling_gain: f64,
    mode: SignMode,
) -> Result<QuantizeOutcome> {
    m.validate()?;
    if !coupling_gain.is_finite() || coupling_gain <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "coupling gain must be > 0, got {coupling_gain}"
        )));
    }
    let n = p.n();
    let mut codes = Vec::with_capacity(n * (n - 1) / 2);
    let mut records = Vec::with_capacity(n * (n - 1) / 2);
    let mut quantized = Array2::zeros((n, n));
    let mut max_rel_err = 0.0f64;
    let mut clamped_pairs = 0;

    for (i, j) in pairs(n) {
        let target = p.coupling(i, j);
        if mode == SignMode::HardwareFaithful && target > 0.0 {
            return Err(Error::SignConstraint {
                i,
                j,
                value: target,
            });
        }
        let (code, resistance_ohms, quantized_value, rel_err, clamped) = if target == 0.0 {
            (Code::Disconnect, f64::INFINITY, 0.0, 0.0, false)
        } else {
            let target_ohms = 1.0 / (coupling_gain * target.abs());
            let (level, clamped) = nearest_code(m, target_ohms);
            let r = code_to_resistance(m, Code::Level(level))?;
            let magnitude = resistance_to_coupling(r, coupling_gain)?;
            let rel_err = (magnitude - target.abs()).abs() / target.abs();
            (
                Code::Level(level),
                r,
                magnitude.copysign(target),
                rel_err,
                clamped,
            )
        };
        quantized[[i, j]] = quantized_value;
        quantized[[j, i]] = quantized_value;
        max_rel_err = max_rel_err.max(rel_err);
        clamped_pairs += usize::from(clamped);
        records.push(PairRecord {
            i,
            j,
            code: match code {
                Code::Disconnect => -1,
                Code::Level(level) => i32::from(level),
            },
            resistance_ohms,
            target,
            quantized: quantized_value,
            rel_err,
            clamped,
        });
        codes.push(code);
    }

    Ok(QuantizeOutcome {
        codes: CouplingCodes::new(n, m.kind, codes),
        quantized: IsingProblem::from_couplings(quantized)?,
        records,
        max_rel_err,
        clamped_pairs,
    })
}

/// One firmware register slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FirmwareSlot {
    pub chip: usize,
    pub channel: usize,
    pub i: usize,
    pub j: usize,
    /// `-1` (disconnected), `0` (lowest), up to the variant maximum.
    pub code: i32,
}

/// Lays codes out the way the firmware writes them: pair `(i, j)` at
/// linear index `idx`, chip `idx / 4`, channel `idx % 4`.
pub fn pack_codes(codes: &CouplingCodes) -> Vec<FirmwareSlot> {
    pairs(codes.n)
        .zip(&codes.codes)
        .enumerate()
        .map(|(idx, ((i, j), &code))| FirmwareSlot {
            chip: idx / CHANNELS_PER_CHIP,
            channel: idx % CHANNELS_PER_CHIP,
            i,
            j,
            code: match code {
                Code::Disconnect => -1,
                Code::Level(level) => i32::from(level),
            },
        })
        .collect()
}

/// CSV dump of a quantization outcome:
/// `chip,channel,i,j,code,R_ohms,J_target,J_quant,rel_err`.
pub fn codes_csv(outcome: &QuantizeOutcome) -> String {
    let mut out = String::from("chip,channel,i,j,code,R_ohms,J_target,J_quant,rel_err\n");
    let slots = pack_codes(&outcome.codes);
    for (slot, rec) in slots.iter().zip(&outcome.records) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            slot.chip,
            slot.channel,
            rec.i,
            rec.j,
            rec.code,
            rec.resistance_ohms,
            rec.target,
            rec.quantized,
            rec.rel_err
        ));
    }
    out
}
