//! Helpers shared by the integration-test targets. Each target compiles
//! its own copy, so not every helper is used by every target.
#![allow(dead_code)]

use rand::Rng;
use rpm_sim::{C64, CMatrix};

/// One dense channel application: ρ → Σₖ Eₖ ρ Eₖ†.
///
/// Deliberately the textbook sum, independent of the branch-ensemble
/// machinery it is used to check.
pub fn apply_channel_dense(ops: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for e in ops {
        out += e * rho * e.adjoint();
    }
    out
}

/// Iterate the dense channel n times from ρ₀.
pub fn iterate_channel(ops: &[CMatrix], rho0: &CMatrix, n: usize) -> CMatrix {
    let mut rho = rho0.clone();
    for _ in 0..n {
        rho = apply_channel_dense(ops, &rho);
    }
    rho
}

/// Random unit-trace positive-semidefinite matrix: A·A† normalized.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let trace: f64 = (0..dim).map(|k| rho[(k, k)].re).sum();
    rho.scale(1.0 / trace)
}
