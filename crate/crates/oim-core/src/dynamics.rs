//! SHIL Kuramoto phase dynamics and the Euler-Maruyama integrator.
//!
//! Each oscillator phase obeys
//!
//! ```text
//! dphi_i/dt = -Kc * sum_{j != i} J[i][j] sin(phi_i - phi_j)
//!             - Ks * sin(2 phi_i) + noise
//! ```
//!
//! which is the gradient flow `dphi/dt = -(1/2) grad E` of the energy
//!
//! ```text
//! E = -Kc * sum_{i != j} J[i][j] cos(phi_i - phi_j)
//!     - Ks * sum_i cos(2 phi_i)
//! ```
//!
//! With the SYNC term (Ks > 0) the relative phases become bistable at 0
//! and pi; at exactly binary phases E reduces to the Ising objective up
//! to the constant `-n * Ks`, so relaxing the network minimizes the
//! machine energy. Time is measured in oscillator cycles; one unit is
//! one nominal period. Phases are stored unwrapped and only reduced mod
//! pi at readout.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{cut_value, machine_energy, IsingProblem, SpinConfig, WeightedGraph};
use crate::readout::binarize;
use crate::schedule::{Controls, Schedule};

/// Oscillator phases (radians, unwrapped) at simulation time `t` (cycles).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub phases: Vec<f64>,
    pub t: f64,
}

/// How the initial phases are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPhases {
    /// Independent uniform draws on [0, 2*pi).
    UniformRandom,
    /// Caller-supplied phases.
    Given(Vec<f64>),
}

/// Integration parameters for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Fixed time step (cycles).
    pub dt: f64,
    /// Total simulated time (cycles).
    pub t_end: f64,
    /// Steps between recorded trajectory samples.
    pub sample_every: usize,
    /// Seed for initial phases and the noise stream.
    pub seed: u64,
    pub init: InitialPhases,
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 20.0;

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            sample_every: 10,
            seed: 0,
            init: InitialPhases::UniformRandom,
        }
    }
}

/// One recorded trajectory point.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub phases: Vec<f64>,
    /// Lyapunov energy at the controls in force at `t`.
    pub energy: f64,
    /// Cut value for MaxCut-derived problems, machine energy otherwise,
    /// both of the binarized snapshot.
    pub metric: f64,
    pub coupling_gain: f64,
    pub sync_gain: f64,
    pub noise: f64,
}

/// Sampled record of a run plus the exact final state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub final_state: PhaseState,
}

impl Trajectory {
    /// CSV export: `t,phi_0,...,phi_{n-1},E,metric,Kc,Ks,sigma`,
    /// one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.final_state.phases.len();
        let mut out = String::from("t");
        for i in 0..n {
            out.push_str(&format!(",phi_{i}"));
        }
        out.push_str(",E,metric,Kc,Ks,sigma\n");
        for s in &self.samples {
            out.push_str(&format!("{}", s.t));
            for phi in &s.phases {
                out.push_str(&format!(",{phi}"));
            }
            out.push_str(&format!(
                ",{},{},{},{},{}\n",
                s.energy, s.metric, s.coupling_gain, s.sync_gain, s.noise
            ));
        }
        out
    }
}

/// Which per-sample metric the trajectory records.
#[derive(Debug, Clone, Copy)]
pub enum TraceMetric<'a> {
    MachineEnergy,
    Cut(&'a WeightedGraph),
}

fn check_dims(p: &IsingProblem, len: usize) -> Result<()> {
    if len != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: len,
        });
    }
    Ok(())
}

/// Phase velocity of every oscillator under gains `(coupling_gain, sync_gain)`.
pub fn drift(
    phases: &[f64],
    p: &IsingProblem,
    coupling_gain: f64,
    sync_gain: f64,
) -> Result<Vec<f64>> {
    check_dims(p, phases.len())?;
    if !coupling_gain.is_finite() || !sync_gain.is_finite() {
        return Err(Error::InvalidParam("gains must be finite".into()));
    }
    let n = phases.len();
    let couplings = p.couplings();
    let mut velocity = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            if j != i {
                acc += couplings[[i, j]] * (phases[i] - phases[j]).sin();
            }
        }
        velocity[i] = -coupling_gain * acc - sync_gain * (2.0 * phases[i]).sin();
    }
    Ok(velocity)
}

/// Lyapunov energy of a phase configuration; non-increasing along the
/// noiseless dynamics.
pub fn lyapunov_energy(
    phases: &[f64],
    p: &IsingProblem,
    coupling_gain: f64,
    sync_gain: f64,
) -> Result<f64> {
    check_dims(p, phases.len())?;
    let n = phases.len();
    let couplings = p.couplings();
    let mut pair_sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j != i {
                pair_sum += couplings[[i, j]] * (phases[i] - phases[j]).cos();
            }
        }
    }
    let mut sync_sum = 0.0;
    for &phi in phases {
        sync_sum += (2.0 * phi).cos();
    }
    Ok(-coupling_gain * pair_sum - sync_gain * sync_sum)
}

/// The Lyapunov energy of a perfectly binarized configuration:
/// `coupling_gain * machine_energy - n * sync_gain`.
pub fn binarized_energy(
    s: &SpinConfig,
    p: &IsingProblem,
    coupling_gain: f64,
    sync_gain: f64,
) -> Result<f64> {
    check_dims(p, s.len())?;
    Ok(coupling_gain * machine_energy(p, s)? - sync_gain * (p.n() as f64))
}

/// One Euler-Maruyama step: `phi += drift * dt + noise * sqrt(dt) * xi`
/// with `xi` i.i.d. standard normal per component.
pub fn step(
    state: &PhaseState,
    p: &IsingProblem,
    controls: &Controls,
    dt: f64,
    rng: &mut impl Rng,
) -> Result<PhaseState> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParam(format!("dt must be > 0, got {dt}")));
    }
    if !controls.noise.is_finite() || controls.noise < 0.0 {
        return Err(Error::InvalidParam(format!(
            "noise amplitude must be >= 0, got {}",
            controls.noise
        )));
    }
    let velocity = drift(&state.phases, p, controls.coupling_gain, controls.sync_gain)?;
    let kick = controls.noise * dt.sqrt();
    let mut phases = Vec::with_capacity(state.phases.len());
    for (phi, v) in state.phases.iter().zip(&velocity) {
        let xi: f64 = rng.sample(StandardNormal);
        phases.push(phi + v * dt + kick * xi);
    }
    if phases.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { t: state.t });
    }
    Ok(PhaseState {
        phases,
        t: state.t + dt,
    })
}

/// Integrates the controlled SDE from `t = 0` to `t_end`, recording a
/// sample every `sample_every` steps plus the initial and final states.
pub fn simulate(
    p: &IsingProblem,
    schedule: &Schedule,
    params: &SimParams,
    metric: TraceMetric,
) -> Result<Trajectory> {
    if !params.dt.is_finite() || params.dt <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "dt must be > 0, got {}",
            params.dt
        )));
    }
    if !params.t_end.is_finite() || params.t_end <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "t_end must be > 0, got {}",
            params.t_end
        )));
    }
    if params.sample_every == 0 {
        return Err(Error::InvalidParam("sample_every must be >= 1".into()));
    }
    if let TraceMetric::Cut(g) = metric {
        if g.n() != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                got: g.n(),
            });
        }
    }

    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let phases = match &params.init {
        InitialPhases::UniformRandom => (0..n).map(|_| rng.random::<f64>() * TAU).collect(),
        InitialPhases::Given(given) => {
            check_dims(p, given.len())?;
            if given.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParam("initial phases must be finite".into()));
            }
            given.clone()
        }
    };
    let mut state = PhaseState { phases, t: 0.0 };

    let record = |state: &PhaseState, samples: &mut Vec<Sample>| -> Result<()> {
        let controls = schedule.evaluate(state.t);
        let energy = lyapunov_energy(&state.phases, p, controls.coupling_gain, controls.sync_gain)?;
        let snapshot = binarize(&state.phases, 0)?.spins;
        let metric_value = match metric {
            TraceMetric::MachineEnergy => machine_energy(p, &snapshot)?,
            TraceMetric::Cut(g) => cut_value(g, &snapshot)?,
        };
        samples.push(Sample {
            t: state.t,
            phases: state.phases.clone(),
            energy,
            metric: metric_value,
            coupling_gain: controls.coupling_gain,
            sync_gain: controls.sync_gain,
            noise: controls.noise,
        });
        Ok(())
    };

    let mut samples = Vec::new();
    record(&state, &mut samples)?;

    let t_tol = 1e-9 * params.t_end.max(1.0);
    let mut step_index: u64 = 0;
    while state.t < params.t_end - t_tol {
        let controls = schedule.evaluate(state.t);
        let dt_eff = params.dt.min(params.t_end - state.t);
        state = step(&state, p, &controls, dt_eff, &mut rng)?;
        step_index += 1;
        // keep sample times on the exact step grid instead of accumulating
        state.t = (step_index as f64 * params.dt).min(params.t_end);
        let finished = state.t >= params.t_end - t_tol;
        if finished {
            state.t = params.t_end;
        }
        if finished || step_index.is_multiple_of(params.sample_every as u64) {
            record(&state, &mut samples)?;
        }
    }

    Ok(Trajectory {
        samples,
        final_state: state,
    })
}
