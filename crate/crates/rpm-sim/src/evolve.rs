//! Weighted branch-ensemble evolution of the Kraus channel through the
//! dilation circuit.
//!
//! Instead of iterating density matrices, each pure component of the initial
//! state evolves as a tree of branches: one child per Kraus operator per
//! step, applied via the padded dilated unitaries. The channel's structure
//! keeps this tree thin — operators `E₁…E₈` land entirely on the shelf
//! states and annihilate each other, so a branch that has shelved once only
//! ever advances under `E₀` (exact identity there). After `n` steps there
//! are exactly `8n+1` live branches rather than `9ⁿ`.
//!
//! Populations are recovered by measuring the physical (first ten) indices
//! of every branch and summing with the decomposition weights. Branches are
//! kept in lineage-lexicographic order and summed sequentially, so analytic
//! results are reproducible bit for bit.

use crate::dilation::{
    apply_to_state, dilate, measure_populations, DilatedUnitary, DilationError, Measure,
};
use crate::kraus::{build_step, validate_completeness, ChannelError, KrausStep};
use crate::spin::{initial_state, FieldParams, DIM, SINGLET_SHELF, TRIPLET_SHELF};
use crate::linalg::CVector;
use thiserror::Error;

/// Branches whose physical-half squared norm falls below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Channel completeness defect above this aborts a trajectory.
pub const COMPLETENESS_FATAL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("BadDecomposition: {0}")]
    BadDecomposition(String),
    #[error("MismatchedDilation: dilation {index} does not embed its Kraus operator")]
    MismatchedDilation { index: usize },
    #[error("channel completeness defect {defect:.3e} exceeds {COMPLETENESS_FATAL:.0e}")]
    ChannelDefect { defect: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Dilation(#[from] DilationError),
}

pub type Result<T> = std::result::Result<T, EvolveError>;

/// One pure-state branch of the Kraus expansion.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Statevector at the padded circuit dimension; the physical state
    /// occupies the first [`DIM`] entries, the rest is dilation ancilla.
    pub state: CVector,
    /// Kraus indices applied so far, oldest first.
    pub lineage: Vec<u8>,
    /// Probability of the source pure component in the initial mixture.
    pub weight: f64,
    pub live: bool,
}

impl Branch {
    /// Squared norm of the physical (first [`DIM`]) entries.
    pub fn physical_norm_sq(&self) -> f64 {
        (0..DIM).map(|i| self.state[i].norm_sqr()).sum()
    }

    /// True once the branch has been routed onto a shelf by any of `E₁…E₈`.
    fn shelved(&self) -> bool {
        self.lineage.last().is_some_and(|&k| (1..=8).contains(&k))
    }
}

/// All live branches after `step_count` steps of duration `dt`.
#[derive(Debug, Clone)]
pub struct BranchEnsemble {
    pub branches: Vec<Branch>,
    pub step_count: usize,
    pub dt: f64,
}

impl BranchEnsemble {
    pub fn live_count(&self) -> usize {
        self.branches.iter().filter(|b| b.live).count()
    }
}

/// Populations and yields recorded along one trajectory, including the
/// initial time. `singlet_yield`/`triplet_yield` are the shelf populations
/// (`diagonals[·][8]` and `[9]`).
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub diagonals: Vec<Vec<f64>>,
    pub singlet_yield: Vec<f64>,
    pub triplet_yield: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn final_yields(&self) -> (f64, f64) {
        (
            *self.singlet_yield.last().expect("non-empty record"),
            *self.triplet_yield.last().expect("non-empty record"),
        )
    }
}

fn padded_dim() -> usize {
    (2 * DIM).next_power_of_two()
}

/// Start an ensemble from a pure-state decomposition of the initial density
/// matrix: positive weights summing to one, unit-norm states of dimension
/// [`DIM`].
pub fn init_ensemble(decomposition: &[(f64, CVector)]) -> Result<BranchEnsemble> {
    if decomposition.is_empty() {
        return Err(EvolveError::BadDecomposition("empty decomposition".into()));
    }
    let weight_sum: f64 = decomposition.iter().map(|(w, _)| w).sum();
    if (weight_sum - 1.0).abs() > 1e-12 {
        return Err(EvolveError::BadDecomposition(format!(
            "weights sum to {weight_sum}, expected 1"
        )));
    }
    let mut branches = Vec::with_capacity(decomposition.len());
    for (w, state) in decomposition {
        if !w.is_finite() || *w <= 0.0 {
            return Err(EvolveError::BadDecomposition(format!(
                "non-positive weight {w}"
            )));
        }
        if state.len() != DIM {
            return Err(EvolveError::BadDecomposition(format!(
                "state has dimension {}, expected {DIM}",
                state.len()
            )));
        }
        if (state.norm() - 1.0).abs() > 1e-12 {
            return Err(EvolveError::BadDecomposition(format!(
                "state norm {} is not 1",
                state.norm()
            )));
        }
        let mut padded = CVector::zeros(padded_dim());
        padded.rows_mut(0, DIM).copy_from(state);
        branches.push(Branch {
            state: padded,
            lineage: Vec::new(),
            weight: *w,
            live: true,
        });
    }
    Ok(BranchEnsemble {
        branches,
        step_count: 0,
        dt: 0.0,
    })
}

/// Advance every live branch by one channel step.
///
/// Each branch spawns one child per Kraus operator, except branches that
/// already shelved: those advance only under `E₀`, whose dilation is the
/// exact identity on shelf-supported states. Children below
/// [`PRUNE_THRESHOLD`] physical weight are dropped. The dilations must embed
/// exactly the operators of `step`, in order.
pub fn step_ensemble(
    ensemble: &BranchEnsemble,
    step: &KrausStep,
    dilations: &[DilatedUnitary],
) -> Result<BranchEnsemble> {
    for (index, e) in step.operators.iter().enumerate() {
        match dilations.get(index) {
            Some(d) if d.dilates(e) => {}
            _ => return Err(EvolveError::MismatchedDilation { index }),
        }
    }

    let mut next = Vec::with_capacity(8 + ensemble.branches.len());
    for branch in ensemble.branches.iter().filter(|b| b.live) {
        // Re-prepare (physical, 0, …, 0)ᵀ: ancilla amplitudes from the
        // previous application are not part of the physical state.
        let physical = branch.state.rows(0, DIM).into_owned();
        let kraus_range = if branch.shelved() { 0..1 } else { 0..9 };
        for k in kraus_range {
            let child_state = apply_to_state(&dilations[k], &physical)?;
            let weight_here: f64 = (0..DIM).map(|i| child_state[i].norm_sqr()).sum();
            if weight_here < PRUNE_THRESHOLD {
                continue;
            }
            let mut lineage = branch.lineage.clone();
            lineage.push(k as u8);
            next.push(Branch {
                state: child_state,
                lineage,
                weight: branch.weight,
                live: true,
            });
        }
    }
    Ok(BranchEnsemble {
        branches: next,
        step_count: ensemble.step_count + 1,
        dt: step.dt,
    })
}

/// Derive a per-branch, per-step sampling seed from the master seed.
/// SplitMix64-style finalizer: deterministic and uncorrelated across inputs.
/// Callers running many trajectories reuse it with their own index pair.
pub fn derived_seed(seed: u64, step: u64, branch: u64) -> u64 {
    let mut z = seed
        ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ branch.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Physical populations of the ensemble: weight-scaled first-half
/// populations summed over branches in stored order.
///
/// In sampled mode every branch draws its own shots with a seed derived from
/// the master seed, the current step count, and the branch position, so the
/// full trajectory is reproducible from one seed.
pub fn diag_populations(ensemble: &BranchEnsemble, measure: Measure) -> Vec<f64> {
    let mut totals = vec![0.0; DIM];
    for (index, branch) in ensemble.branches.iter().filter(|b| b.live).enumerate() {
        let branch_measure = match measure {
            Measure::Analytic => Measure::Analytic,
            Measure::Sampled { shots, seed } => Measure::Sampled {
                shots,
                seed: derived_seed(seed, ensemble.step_count as u64, index as u64),
            },
        };
        let result = measure_populations(&branch.state, branch_measure)
            .expect("live branches have positive norm");
        for (t, p) in totals.iter_mut().zip(result.physical(DIM)) {
            *t += branch.weight * p;
        }
    }
    totals
}

/// Run the full pipeline for the standard initial state: build the channel
/// for `p`, dilate its operators once, and iterate `n_steps` of duration
/// `dt`, recording populations at `t = 0` and after every step.
pub fn run_trajectory(
    p: &FieldParams,
    n_steps: usize,
    dt: f64,
    measure: Measure,
) -> Result<TrajectoryRecord> {
    assert!(n_steps >= 1, "need at least one step");
    let step = build_step(p, dt)?;
    let defect = validate_completeness(&step);
    if defect > COMPLETENESS_FATAL {
        return Err(EvolveError::ChannelDefect { defect });
    }
    let dilations: Vec<DilatedUnitary> = step
        .operators
        .iter()
        .map(dilate)
        .collect::<std::result::Result<_, _>>()?;

    let mut ensemble = init_ensemble(&[(1.0, initial_state())])?;
    let mut record = TrajectoryRecord {
        times: Vec::with_capacity(n_steps + 1),
        diagonals: Vec::with_capacity(n_steps + 1),
        singlet_yield: Vec::with_capacity(n_steps + 1),
        triplet_yield: Vec::with_capacity(n_steps + 1),
    };
    let mut push = |t: f64, e: &BranchEnsemble| {
        let diag = diag_populations(e, measure);
        record.times.push(t);
        record.singlet_yield.push(diag[SINGLET_SHELF]);
        record.triplet_yield.push(diag[TRIPLET_SHELF]);
        record.diagonals.push(diag);
    };

    push(0.0, &ensemble);
    for n in 1..=n_steps {
        ensemble = step_ensemble(&ensemble, &step, &dilations)?;
        push(n as f64 * dt, &ensemble);
    }
    Ok(record)
}
