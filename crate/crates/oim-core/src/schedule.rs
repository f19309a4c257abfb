//! Time-dependent annealing controls: coupling gain, SYNC gain, and
//! noise amplitude as piecewise-linear signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Instantaneous control values fed to the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    /// Global coupling gain K_c.
    pub coupling_gain: f64,
    /// Effective SYNC (sub-harmonic injection) amplitude K_s.
    pub sync_gain: f64,
    /// Additive noise amplitude.
    pub noise: f64,
}

/// One breakpoint of the piecewise-linear schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub t: f64,
    pub coupling_gain: f64,
    pub sync_gain: f64,
    pub noise: f64,
}

/// Final coupling gain of the default anneal.
pub const DEFAULT_COUPLING_GAIN_END: f64 = 3.0;

/// Piecewise-linear control schedule. Values interpolate linearly between
/// breakpoints and stay constant after the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    points: Vec<Breakpoint>,
}

impl Schedule {
    pub fn new(points: Vec<Breakpoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParam("schedule needs a breakpoint".into()));
        }
        if points[0].t != 0.0 {
            return Err(Error::InvalidParam(format!(
                "first breakpoint must be at t = 0, got {}",
                points[0].t
            )));
        }
        for pair in points.windows(2) {
            // NaN times fail this comparison too
            if pair[1].t.partial_cmp(&pair[0].t) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidParam(format!(
                    "breakpoint times must strictly increase ({} then {})",
                    pair[0].t, pair[1].t
                )));
            }
        }
        for bp in &points {
            if !(bp.t.is_finite() && bp.coupling_gain.is_finite() && bp.sync_gain.is_finite()) {
                return Err(Error::InvalidParam(
                    "breakpoint values must be finite".into(),
                ));
            }
            if !bp.noise.is_finite() || bp.noise < 0.0 {
                return Err(Error::InvalidParam(format!(
                    "noise amplitude must be finite and >= 0, got {}",
                    bp.noise
                )));
            }
        }
        Ok(Self { points })
    }

    /// Constant controls for all time.
    pub fn constant(coupling_gain: f64, sync_gain: f64, noise: f64) -> Result<Self> {
        Self::new(vec![Breakpoint {
            t: 0.0,
            coupling_gain,
            sync_gain,
            noise,
        }])
    }

    /// Coupling gain ramps linearly from `kc_start` to `kc_end` over
    /// `[0, t_end]` while the SYNC gain stays fixed; noise ramps
    /// `noise_start` to `noise_end`.
    pub fn ramp_coupling(
        kc_start: f64,
        kc_end: f64,
        sync_gain: f64,
        noise_start: f64,
        noise_end: f64,
        t_end: f64,
    ) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidParam(format!(
                "ramp needs t_end > 0, got {t_end}"
            )));
        }
        Self::new(vec![
            Breakpoint {
                t: 0.0,
                coupling_gain: kc_start,
                sync_gain,
                noise: noise_start,
            },
            Breakpoint {
                t: t_end,
                coupling_gain: kc_end,
                sync_gain,
                noise: noise_end,
            },
        ])
    }

    /// The default anneal: coupling gain ramps 0 to [`DEFAULT_COUPLING_GAIN_END`]
    /// while the SYNC gain holds at 1 and noise decays 0.5 to 0.
    ///
    /// The ramp endpoint is chosen so that, for order-one couplings, the
    /// coupling torque eventually overtakes the injection-locking barrier
    /// (which needs `Kc * |field| > 2 * Ks`); misaligned oscillators then
    /// destabilize and fall into the correct wells instead of freezing
    /// into their initial random binarization.
    pub fn default_anneal(t_end: f64) -> Result<Self> {
        Self::ramp_coupling(0.0, DEFAULT_COUPLING_GAIN_END, 1.0, 0.5, 0.0, t_end)
    }

    /// Hardware-style schedule: the board's resistive bias is not
    /// adjustable, so the coupling gain is pinned while the SYNC gain and
    /// noise follow the given `(t, sync_gain, noise)` breakpoints.
    pub fn hardware_mode(coupling_gain: f64, sync_points: &[(f64, f64, f64)]) -> Result<Self> {
        let points = sync_points
            .iter()
            .map(|&(t, sync_gain, noise)| Breakpoint {
                t,
                coupling_gain,
                sync_gain,
                noise,
            })
            .collect();
        Self::new(points)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.points
    }

    /// True when the coupling gain never changes (the hardware constraint).
    pub fn has_constant_coupling(&self) -> bool {
        self.points
            .iter()
            .all(|bp| bp.coupling_gain == self.points[0].coupling_gain)
    }

    /// Controls at time `t`: linear interpolation inside the breakpoint
    /// span, constant extrapolation after the last breakpoint.
    pub fn evaluate(&self, t: f64) -> Controls {
        let last = self.points.last().unwrap();
        if t >= last.t {
            return Controls {
                coupling_gain: last.coupling_gain,
                sync_gain: last.sync_gain,
                noise: last.noise,
            };
        }
        let hi = self.points.partition_point(|bp| bp.t <= t);
        let (a, b) = (&self.points[hi - 1], &self.points[hi]);
        let frac = (t - a.t) / (b.t - a.t);
        let lerp = |x: f64, y: f64| x + frac * (y - x);
        Controls {
            coupling_gain: lerp(a.coupling_gain, b.coupling_gain),
            sync_gain: lerp(a.sync_gain, b.sync_gain),
            noise: lerp(a.noise, b.noise),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    breakpoints: Vec<(f64, f64, f64, f64)>,
}

/// Parses the JSON schedule format `{"breakpoints": [[t, Kc, Ks, sigma], ...]}`.
pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let raw: ScheduleFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Schedule::new(
        raw.breakpoints
            .into_iter()
            .map(|(t, coupling_gain, sync_gain, noise)| Breakpoint {
                t,
                coupling_gain,
                sync_gain,
                noise,
            })
            .collect(),
    )
}

pub fn serialize_schedule(sch: &Schedule) -> String {
    let file = ScheduleFile {
        breakpoints: sch
            .points
            .iter()
            .map(|bp| (bp.t, bp.coupling_gain, bp.sync_gain, bp.noise))
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("schedule serialization cannot fail");
    out.push('\n');
    out
}
