//! Ground-truth solvers: exhaustive enumeration for small instances and
//! Tabu search for everything else.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{machine_energy, IsingProblem, SpinConfig};

/// Largest spin count accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_SPINS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Brute,
    Tabu,
}

/// Best configuration found by a reference solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub best: SpinConfig,
    pub best_machine_energy: f64,
    /// Cut value of `best`; filled in when the instance came from a graph.
    pub best_cut: Option<f64>,
    pub method: OracleMethod,
    /// Number of configurations examined.
    pub evaluations: u64,
}

/// `true` when `a` precedes `b` with +1 ordered before -1, so the
/// all-up configuration comes first. Used for deterministic tie-breaks.
fn lex_precedes(a: &SpinConfig, b: &SpinConfig) -> bool {
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Field at each spin, `h_i = sum_j J[i][j] s_j`; the per-flip energy
/// delta is `4 s_i h_i`.
fn local_fields(p: &IsingProblem, s: &SpinConfig) -> Vec<f64> {
    let n = p.n();
    let couplings = p.couplings();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| couplings[[i, j]] * f64::from(s.get(j)))
                .sum()
        })
        .collect()
}

fn apply_flip(p: &IsingProblem, s: &mut SpinConfig, fields: &mut [f64], flip: usize) {
    s.flip(flip);
    let couplings = p.couplings();
    let new_spin = f64::from(s.get(flip));
    for (j, field) in fields.iter_mut().enumerate() {
        if j != flip {
            *field += 2.0 * couplings[[j, flip]] * new_spin;
        }
    }
}

/// Exhaustively minimizes the machine energy over all configurations
/// with spin 0 pinned to +1 (global-flip symmetry halves the space).
///
/// Enumeration walks a Gray code so each candidate differs from the
/// previous one by a single flip, updated incrementally. Ties break
/// toward the lexicographically first configuration (+1 before -1).
pub fn brute_force(p: &IsingProblem) -> Result<OracleResult> {
    let n = p.n();
    if n > BRUTE_FORCE_MAX_SPINS {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_SPINS,
        });
    }
    let mut current = SpinConfig::all_up(n);
    let mut fields = local_fields(p, &current);
    let mut energy = machine_energy(p, &current)?;
    let mut best = current.clone();
    let mut best_energy = energy;

    let configs: u64 = 1 << (n - 1);
    for counter in 1..configs {
        // Gray code: flip the spin indexed by the lowest set bit, offset
        // by one so spin 0 stays pinned.
        let flip = counter.trailing_zeros() as usize + 1;
        let delta = 4.0 * f64::from(current.get(flip)) * fields[flip];
        apply_flip(p, &mut current, &mut fields, flip);
        energy += delta;
        if energy < best_energy || (energy == best_energy && lex_precedes(&current, &best)) {
            best_energy = energy;
            best = current.clone();
        }
    }

    // exact value of the winning configuration, free of incremental drift
    let best_machine_energy = machine_energy(p, &best)?;
    Ok(OracleResult {
        best,
        best_machine_energy,
        best_cut: None,
        method: OracleMethod::Brute,
        evaluations: configs,
    })
}

/// Tabu search parameters; defaults are sized for desk-scale instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TabuParams {
    pub iters: usize,
    pub tenure: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl TabuParams {
    pub fn defaults_for(n: usize, seed: u64) -> Self {
        Self {
            iters: 100 * n.max(1),
            tenure: 20.min(n.max(1)),
            restarts: 5,
            seed,
        }
    }
}

/// Single-flip Tabu search over the machine energy.
///
/// Every iteration scans all flips using incrementally maintained local
/// fields, applies the best admissible move (not tabu, or aspiring to a
/// new global best), and marks it tabu for `tenure` iterations.
/// Deterministic for a fixed seed; restarts reseed independently.
pub fn tabu_search(p: &IsingProblem, params: &TabuParams) -> Result<OracleResult> {
    if params.iters == 0 {
        return Err(Error::InvalidParam("tabu needs iters >= 1".into()));
    }
    if params.restarts == 0 {
        return Err(Error::InvalidParam("tabu needs restarts >= 1".into()));
    }
    let n = p.n();
    let mut best: Option<(f64, SpinConfig)> = None;
    let mut evaluations: u64 = 0;

    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(restart as u64));
        let mut current = SpinConfig::new(
            (0..n)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect(),
        )?;
        let mut fields = local_fields(p, &current);
        let mut energy = machine_energy(p, &current)?;
        let mut best_energy = energy;
        let mut best_config = current.clone();
        let mut tabu_until = vec![0usize; n];

        for iter in 1..=params.iters {
            let mut chosen: Option<(usize, f64)> = None;
            let mut fallback: Option<(usize, f64)> = None;
            for i in 0..n {
                let delta = 4.0 * f64::from(current.get(i)) * fields[i];
                evaluations += 1;
                let candidate_energy = energy + delta;
                let admissible = tabu_until[i] < iter || candidate_energy < best_energy - 1e-12;
                if admissible && chosen.is_none_or(|(_, d)| delta < d) {
                    chosen = Some((i, delta));
                }
                if fallback.is_none_or(|(_, d)| delta < d) {
                    fallback = Some((i, delta));
                }
            }
            // every move can be tabu when tenure ~ n; fall back to the
            // best move overall so the walk never stalls
            let (flip, delta) = chosen.or(fallback).expect("n >= 1");
            apply_flip(p, &mut current, &mut fields, flip);
            energy += delta;
            tabu_until[flip] = iter + params.tenure;
            if energy < best_energy - 1e-12
                || (energy < best_energy + 1e-12 && lex_precedes(&current, &best_config))
            {
                best_energy = energy;
                best_config = current.clone();
            }
        }

        let exact = machine_energy(p, &best_config)?;
        let better = match &best {
            None => true,
            Some((incumbent, config)) => {
                exact < *incumbent || (exact == *incumbent && lex_precedes(&best_config, config))
            }
        };
        if better {
            best = Some((exact, best_config));
        }
    }

    let (best_machine_energy, best) = best.expect("restarts >= 1");
    Ok(OracleResult {
        best,
        best_machine_energy,
        best_cut: None,
        method: OracleMethod::Tabu,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{
        cut_value, generate_instance, hamiltonian, maxcut_to_ising, InstanceKind, WeightedGraph,
    };
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Plain full enumeration over all 2^n configurations, recomputing the
    /// energy from scratch every time; the reference the reduced search is
    /// checked against.
    fn enumerate_unreduced(p: &IsingProblem) -> (f64, SpinConfig) {
        let n = p.n();
        let mut best_energy = f64::INFINITY;
        let mut best = SpinConfig::all_up(n);
        for mask in 0..(1u64 << n) {
            let s = SpinConfig::new(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect(),
            )
            .unwrap();
            let e = machine_energy(p, &s).unwrap();
            if e < best_energy || (e == best_energy && lex_precedes(&s, &best)) {
                best_energy = e;
                best = s;
            }
        }
        (best_energy, best)
    }

    fn star() -> (WeightedGraph, IsingProblem) {
        let g = generate_instance(InstanceKind::Star, 4, 0).unwrap();
        let p = maxcut_to_ising(&g);
        (g, p)
    }

    #[test]
    fn brute_force_star_ground_state() {
        let (g, p) = star();
        let res = brute_force(&p).unwrap();
        assert_eq!(res.best.as_slice(), &[1, 1, -1, 1]);
        assert_eq!(res.best_machine_energy, -6.0);
        assert_eq!(cut_value(&g, &res.best).unwrap(), 3.0);
        assert_eq!(res.evaluations, 8);
    }

    #[test]
    fn brute_force_single_edge() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let p = maxcut_to_ising(&g);
        let res = brute_force(&p).unwrap();
        assert_eq!(cut_value(&g, &res.best).unwrap(), 1.0);
    }

    #[test]
    fn brute_force_matches_unreduced_enumeration() {
        for seed in 0..4 {
            let g = generate_instance(InstanceKind::CompleteGaussian, 12, seed).unwrap();
            let p = maxcut_to_ising(&g);
            let reduced = brute_force(&p).unwrap();
            let (energy, config) = enumerate_unreduced(&p);
            assert_eq!(reduced.best_machine_energy, energy);
            assert_eq!(reduced.best, config);
        }
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let g = generate_instance(InstanceKind::Gnp { edge_prob: 0.2 }, 25, 0).unwrap();
        let p = maxcut_to_ising(&g);
        assert_eq!(
            brute_force(&p).unwrap_err(),
            Error::TooLarge { n: 25, max: 24 }
        );
    }

    #[test]
    fn brute_force_single_spin() {
        let p = IsingProblem::from_couplings(ndarray::Array2::zeros((1, 1))).unwrap();
        let res = brute_force(&p).unwrap();
        assert_eq!(res.best.as_slice(), &[1]);
        assert_eq!(res.best_machine_energy, 0.0);
    }

    #[test]
    fn tabu_solves_the_star_for_any_seed() {
        let (g, p) = star();
        for seed in 0..10 {
            let res = tabu_search(
                &p,
                &TabuParams {
                    iters: 100,
                    tenure: 4,
                    restarts: 1,
                    seed,
                },
            )
            .unwrap();
            assert_eq!(cut_value(&g, &res.best).unwrap(), 3.0);
        }
    }

    #[test]
    fn tabu_matches_brute_force_on_random_instances() {
        let mut hits = 0;
        let total = 10;
        for seed in 0..total {
            let g = generate_instance(InstanceKind::Gnp { edge_prob: 0.5 }, 10, seed).unwrap();
            let p = maxcut_to_ising(&g);
            let exact = brute_force(&p).unwrap();
            let tabu = tabu_search(&p, &TabuParams::defaults_for(10, seed)).unwrap();
            assert!(tabu.best_machine_energy >= exact.best_machine_energy - 1e-12);
            if (tabu.best_machine_energy - exact.best_machine_energy).abs() <= 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "tabu matched brute force on only {hits}/{total}");
    }

    #[test]
    fn flip_delta_matches_recomputed_energy() {
        let g = generate_instance(InstanceKind::CompleteGaussian, 9, 77).unwrap();
        let p = maxcut_to_ising(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..50 {
            let s = SpinConfig::new(
                (0..9)
                    .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                    .collect::<Vec<i8>>(),
            )
            .unwrap();
            let fields = local_fields(&p, &s);
            let flip = rng.random_range(0..9);
            let delta = 4.0 * f64::from(s.get(flip)) * fields[flip];
            let mut flipped = s.clone();
            flipped.flip(flip);
            let expected = machine_energy(&p, &flipped).unwrap() - machine_energy(&p, &s).unwrap();
            assert!(
                (delta - expected).abs() <= 1e-9 * expected.abs().max(1.0),
                "delta {delta} vs recomputed {expected}"
            );
        }
    }

    #[test]
    fn oracles_are_deterministic() {
        let g = generate_instance(InstanceKind::Gnp { edge_prob: 0.5 }, 14, 5).unwrap();
        let p = maxcut_to_ising(&g);
        let a = tabu_search(&p, &TabuParams::defaults_for(14, 33)).unwrap();
        let b = tabu_search(&p, &TabuParams::defaults_for(14, 33)).unwrap();
        assert_eq!(a, b);
        assert_eq!(brute_force(&p).unwrap(), brute_force(&p).unwrap());
    }

    #[test]
    fn tabu_never_beats_brute_force() {
        for seed in 20..25 {
            let g = generate_instance(InstanceKind::CompleteGaussian, 11, seed).unwrap();
            let p = maxcut_to_ising(&g);
            let exact = brute_force(&p).unwrap();
            let tabu = tabu_search(&p, &TabuParams::defaults_for(11, seed)).unwrap();
            assert!(tabu.best_machine_energy >= exact.best_machine_energy - 1e-12);
            // and the reported energies are exactly what the configs evaluate to
            assert_eq!(
                tabu.best_machine_energy,
                machine_energy(&p, &tabu.best).unwrap()
            );
            assert_eq!(
                exact.best_machine_energy,
                -hamiltonian(&p, &exact.best).unwrap()
            );
        }
    }
}
