//! Discretization of the open-system dynamics into a per-step Kraus set.
//!
//! Over one interval `dt` the decay channel is represented by nine operators:
//! `M₀ = √(I − kd·dt·Σₖ Pₖ†Pₖ)` and `Mₖ = √(kd·dt)·Pₖ` for the eight decay
//! projectors. Because `Σₖ Pₖ†Pₖ` is exactly the projector onto the spin
//! sector, the completeness sum `Σₖ Mₖ†Mₖ = I` holds exactly rather than to
//! first order in `dt`, so repeated application cannot drift the trace.
//!
//! The coherent precession over the same interval is folded in by
//! right-multiplying every decay operator with `U = exp(−i·H·dt/ħ)`,
//! giving the effective set `Eₖ = Mₖ·U` applied once per step.

use crate::linalg::{
    hermiticity_defect, psd_sqrt, unitary_exp, CMatrix, LinalgError, HERMITICITY_TOL,
};
use crate::spin::{build_hamiltonian, decay_projectors, FieldParams, InvalidParams, DIM, SPIN_DIM};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid step: kd*dt = {kd_dt} lies outside [0, 1]")]
    InvalidStep { kd_dt: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Params(#[from] InvalidParams),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// One time step of the quantum channel: the effective Kraus operators
/// `E₀…E₈` (decay composed with coherent evolution) plus the bare coherent
/// unitary for reference.
#[derive(Debug, Clone)]
pub struct KrausStep {
    /// Step duration in seconds.
    pub dt: f64,
    /// Effective Kraus operators `Eₖ = Mₖ·U`, ordered `E₀…E₈`.
    pub operators: Vec<CMatrix>,
    /// The coherent step unitary `U = exp(−i·H·dt/ħ)`.
    pub coherent_unitary: CMatrix,
}

impl KrausStep {
    /// Number of Kraus operators in the step.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

/// Decay-only Kraus set for one step: `[M₀, M₁…M₈]`.
///
/// `M₀` is diagonal — `√(1 − kd·dt)` on the spin sector and `1` on the
/// shelves — and each `Mₖ` is the corresponding projector scaled by
/// `√(kd·dt)`. Fails with `InvalidStep` when `kd·dt` falls outside `[0, 1]`,
/// where the square root would turn complex.
pub fn build_decay_kraus(kd: f64, dt: f64, projectors: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let kd_dt = kd * dt;
    if !kd_dt.is_finite() || !(0.0..=1.0).contains(&kd_dt) {
        return Err(ChannelError::InvalidStep { kd_dt });
    }
    let dim = projectors
        .first()
        .map(|p| p.nrows())
        .expect("at least one decay projector");

    let mut absorbed = CMatrix::zeros(dim, dim);
    for p in projectors {
        absorbed += p.adjoint() * p;
    }
    let m0 = psd_sqrt(&(CMatrix::identity(dim, dim) - absorbed.scale(kd_dt)))?;

    let root = kd_dt.sqrt();
    let mut ops = Vec::with_capacity(projectors.len() + 1);
    ops.push(m0);
    ops.extend(projectors.iter().map(|p| p.scale(root)));
    Ok(ops)
}

/// Coherent step unitary `U = exp(−i·H·dt/ħ)` for a 10×10 Hamiltonian whose
/// shelf rows and columns are zero.
///
/// Only the spin block is exponentiated; the shelf block of the result is
/// the identity *exactly*, with exact zeros coupling spin to shelf. That
/// exactness is what later makes products of shelving Kraus operators vanish
/// identically instead of to rounding error.
pub fn coherent_step_unitary(h: &CMatrix, dt: f64, hbar: f64) -> Result<CMatrix> {
    assert_eq!(h.nrows(), DIM, "Hamiltonian must be {DIM}x{DIM}");
    let defect = hermiticity_defect(h);
    if defect > HERMITICITY_TOL * h.norm().max(1.0) {
        return Err(LinalgError::NotHermitian { defect }.into());
    }
    let spin_block = h.view((0, 0), (SPIN_DIM, SPIN_DIM)).into_owned();
    let u_spin = unitary_exp(&spin_block, dt / hbar)?;
    let mut u = CMatrix::identity(DIM, DIM);
    u.view_mut((0, 0), (SPIN_DIM, SPIN_DIM)).copy_from(&u_spin);
    Ok(u)
}

/// Compose decay with the coherent unitary: `Eₖ = Mₖ·U` (the unitary acts
/// first within each step).
pub fn compose_effective(decay: &[CMatrix], u: &CMatrix, dt: f64) -> KrausStep {
    KrausStep {
        dt,
        operators: decay.iter().map(|m| m * u).collect(),
        coherent_unitary: u.clone(),
    }
}

/// Frobenius defect `‖Σₖ Eₖ†Eₖ − I‖` of the completeness relation. Callers
/// treat anything above 1e-10 as fatal.
pub fn validate_completeness(step: &KrausStep) -> f64 {
    let dim = step.operators[0].nrows();
    let mut sum = CMatrix::zeros(dim, dim);
    for e in &step.operators {
        sum += e.adjoint() * e;
    }
    (sum - CMatrix::identity(dim, dim)).norm()
}

/// Full pipeline from physical parameters to the effective step: builds the
/// Hamiltonian, its step unitary, the decay set, and composes them.
pub fn build_step(p: &FieldParams, dt: f64) -> Result<KrausStep> {
    let h = build_hamiltonian(p)?;
    let u = coherent_step_unitary(&h, dt, p.hbar)?;
    let decay = build_decay_kraus(p.kd, dt, &decay_projectors())?;
    Ok(compose_effective(&decay, &u, dt))
}
