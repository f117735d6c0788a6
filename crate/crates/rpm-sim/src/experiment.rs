//! Experiment drivers: the angle sweep behind the yield-vs-θ curve and
//! the single-angle dynamics comparison.
//!
//! Both drivers always produce the quantum and oracle series together —
//! the artifact of interest is their comparison, never one series alone.
//! Sweep angles are independent, so they run in parallel; results are
//! assembled in grid order, which keeps output deterministic regardless
//! of scheduling.

use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, Mode};
use crate::dilation::Measure;
use crate::evolve::{derived_seed, run_trajectory, EvolveError, TrajectoryRecord};
use crate::oracle::{initial_density, steady_state_yields, OracleError, Superoperator};
use crate::spin::{FieldParams, DIM, SINGLET_SHELF, TRIPLET_SHELF};

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

/// Which path produced a series — tagged into every emitted artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Dilated-circuit statevector path.
    Quantum,
    /// Master-equation reference path.
    Oracle,
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Quantum => write!(f, "quantum"),
            Source::Oracle => write!(f, "oracle"),
        }
    }
}

/// Singlet/triplet yields over a grid of field angles, from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldCurve {
    /// Field angles in radians.
    pub theta: Vec<f64>,
    /// Singlet-shelf population at the end of each run.
    pub singlet: Vec<f64>,
    /// Triplet-shelf population at the end of each run.
    pub triplet: Vec<f64>,
    /// Path that produced the numbers.
    pub source: Source,
}

impl YieldCurve {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Output of [`run_angle_sweep`]: both curves plus the indices where the
/// oracle's steady-state residual stayed above threshold at the horizon.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub quantum: YieldCurve,
    pub oracle: YieldCurve,
    /// Grid indices whose oracle yields are best-effort values taken at
    /// the horizon rather than converged steady states.
    pub unconverged: Vec<usize>,
}

/// Output of [`run_dynamics`]: matched time series from both paths.
#[derive(Debug, Clone)]
pub struct DynamicsResult {
    pub quantum: TrajectoryRecord,
    pub oracle: TrajectoryRecord,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn measure_for(cfg: &ExperimentConfig, seed: u64) -> Measure {
    match cfg.mode {
        Mode::Analytic => Measure::Analytic,
        Mode::Sampled => Measure::Sampled {
            shots: cfg.shots,
            seed,
        },
    }
}

/// Run both paths at every angle of the config's sweep grid.
///
/// Each angle evolves the circuit path to `t = n_steps·dt` and asks the
/// oracle for steady-state yields at the same horizon. A `NotConverged`
/// verdict is not fatal: the yields it carries are used and the index is
/// recorded in [`SweepResult::unconverged`]. Any other failure aborts
/// the sweep.
pub fn run_angle_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid = cfg.theta_grid();
    let horizon = cfg.n_steps as f64 * cfg.dt;

    // (quantum s, quantum t, oracle s, oracle t, oracle converged)
    let rows: Vec<(f64, f64, f64, f64, bool)> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &theta)| -> Result<_> {
            let p = FieldParams { theta, ..cfg.field };
            // Branch indices stay below the live-branch count, so a
            // sentinel branch id keeps sweep seeds disjoint from the
            // per-measurement seeds derived inside the trajectory.
            let seed = derived_seed(cfg.seed, index as u64, u64::MAX);
            let record = run_trajectory(&p, cfg.n_steps, cfg.dt, measure_for(cfg, seed))?;
            let (qs, qt) = record.final_yields();
            let (os, ot, converged) = match steady_state_yields(&p, horizon) {
                Ok((s, t)) => (s, t, true),
                Err(OracleError::NotConverged {
                    singlet, triplet, ..
                }) => (singlet, triplet, false),
                Err(other) => return Err(other.into()),
            };
            Ok((qs, qt, os, ot, converged))
        })
        .collect::<Result<_>>()?;

    let mut quantum = YieldCurve {
        theta: grid.clone(),
        singlet: Vec::with_capacity(rows.len()),
        triplet: Vec::with_capacity(rows.len()),
        source: Source::Quantum,
    };
    let mut oracle = YieldCurve {
        theta: grid,
        singlet: Vec::with_capacity(rows.len()),
        triplet: Vec::with_capacity(rows.len()),
        source: Source::Oracle,
    };
    let mut unconverged = Vec::new();
    for (index, (qs, qt, os, ot, converged)) in rows.into_iter().enumerate() {
        quantum.singlet.push(qs);
        quantum.triplet.push(qt);
        oracle.singlet.push(os);
        oracle.triplet.push(ot);
        if !converged {
            unconverged.push(index);
        }
    }
    Ok(SweepResult {
        quantum,
        oracle,
        unconverged,
    })
}

/// Run both paths at a single angle, recording every step.
///
/// The oracle series propagates the density matrix on the same time
/// grid as the circuit path, so the two records share their `times`.
pub fn run_dynamics(cfg: &ExperimentConfig, theta: f64) -> Result<DynamicsResult> {
    cfg.validate()?;
    let p = FieldParams { theta, ..cfg.field };
    let quantum = run_trajectory(&p, cfg.n_steps, cfg.dt, measure_for(cfg, cfg.seed))?;

    let sup = Superoperator::for_params(&p)?;
    let grid = sup.propagate_grid(&initial_density(), cfg.dt, cfg.n_steps)?;
    let mut oracle = TrajectoryRecord {
        times: quantum.times.clone(),
        diagonals: Vec::with_capacity(grid.len()),
        singlet_yield: Vec::with_capacity(grid.len()),
        triplet_yield: Vec::with_capacity(grid.len()),
    };
    for rho in &grid {
        let diag: Vec<f64> = (0..DIM).map(|k| rho[(k, k)].re).collect();
        oracle.singlet_yield.push(diag[SINGLET_SHELF]);
        oracle.triplet_yield.push(diag[TRIPLET_SHELF]);
        oracle.diagonals.push(diag);
    }
    Ok(DynamicsResult { quantum, oracle })
}
