//! Simulator for the radical-pair mechanism of the avian magnetic
//! compass, computing singlet/triplet product yields two independent
//! ways and comparing them:
//!
//! 1. **Quantum path** — the open-system dynamics are discretized into a
//!    Kraus channel, each Kraus operator is embedded in a unitary by
//!    Sz.-Nagy dilation, and the resulting circuit is emulated as a
//!    statevector branch ensemble with analytic or shot-sampled
//!    measurement ([`kraus`], [`dilation`], [`evolve`]).
//! 2. **Oracle path** — the same Lindblad master equation is solved
//!    exactly through its vectorized Liouvillian, with `expm` and RK4 as
//!    mutually checking integrators ([`oracle`]).
//!
//! The model is a three-spin-½ system — two radical electrons, one of
//! them hyperfine-coupled to a nucleus — in a static field of angle θ,
//! plus two absorbing shelves that collect singlet and triplet decay
//! products. Shelf populations are the yields a compass would read out.
//!
//! # State space
//!
//! All operators act on a fixed 10-dimensional basis:
//!
//! | index | state | | index | state |
//! |-------|-------|-|-------|-------|
//! | 0 | s, ↑  | | 5 | t0, ↓ |
//! | 1 | t0, ↑ | | 6 | t+, ↓ |
//! | 2 | t+, ↑ | | 7 | t−, ↓ |
//! | 3 | t−, ↑ | | 8 | singlet shelf |
//! | 4 | s, ↓  | | 9 | triplet shelf |
//!
//! where `s`/`t0`/`t±` are the electron-pair singlet–triplet states and
//! ↑/↓ the nuclear spin ([`spin::SpinBasis`]).
//!
//! # Quickstart
//!
//! Evolve the standard initial state (singlet ⊗ nuclear superposition)
//! a few steps along both paths:
//!
//! ```
//! use rpm_sim::{FieldParams, Measure, run_trajectory};
//! use rpm_sim::oracle::{initial_density, Superoperator};
//!
//! let p = FieldParams::default(); // reference parameter set, θ = π/2
//! let record = run_trajectory(&p, 5, 5e-5, Measure::Analytic)?;
//! let (singlet, triplet) = record.final_yields();
//! assert!(singlet > 0.0 && triplet > 0.0 && singlet + triplet < 1.0);
//!
//! let oracle = Superoperator::for_params(&p)?;
//! let grid = oracle.propagate_grid(&initial_density(), 5e-5, 5)?;
//! let exact_singlet = grid.last().unwrap()[(8, 8)].re;
//! // The discretized channel tracks the exact solution only coarsely at
//! // this step size; see the guide's accuracy chapter for the full story.
//! assert!((singlet - exact_singlet).abs() < 0.2);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! Or run the full experiment layer the CLI exposes:
//!
//! ```
//! use rpm_sim::{ExperimentConfig, run_angle_sweep};
//!
//! let cfg = ExperimentConfig { theta_points: 5, ..ExperimentConfig::default() };
//! let sweep = run_angle_sweep(&cfg)?;
//! assert_eq!(sweep.quantum.len(), 5);
//! assert_eq!(sweep.oracle.len(), 5);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod config;
pub mod dilation;
pub mod evolve;
pub mod experiment;
pub mod kraus;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod spin;

pub use config::{ExperimentConfig, Mode, Overrides};
pub use dilation::{dilate, DilatedUnitary, Measure};
pub use evolve::{run_trajectory, TrajectoryRecord};
pub use experiment::{
    run_angle_sweep, run_dynamics, DynamicsResult, Source, SweepResult, YieldCurve,
};
pub use kraus::{build_step, KrausStep};
pub use linalg::{C64, CMatrix, CVector};
pub use oracle::{steady_state_yields, Superoperator};
pub use spin::FieldParams;

/// Every fenced Rust block in the guide compiles and runs as a doctest,
/// so the book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/kraus-channel.md")]
    mod kraus_channel {}
    #[doc = include_str!("../../../book/src/dilation.md")]
    mod dilation {}
    #[doc = include_str!("../../../book/src/branch-evolution.md")]
    mod branch_evolution {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    mod accuracy {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
