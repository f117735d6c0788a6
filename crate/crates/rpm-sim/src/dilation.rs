//! Unitary dilation of Kraus contractions, statevector application, and
//! measurement.
//!
//! A contraction `M` (operator norm ≤ 1) embeds into the unitary
//!
//! ```text
//! U = | M        D_{M†} |        D_M   = √(I − M†M)
//!     | D_M      −M†    |        D_{M†} = √(I − M·M†)
//! ```
//!
//! so that applying `U` to `(v, 0)ᵀ` leaves `M·v` in the first block. The
//! 2n-dimensional dilation is further padded with an identity block up to the
//! next power of two, which is the statevector dimension of the emulated
//! qubit register (20 → 32, i.e. five qubits for this model). The physical
//! space always occupies the lowest indices.
//!
//! Measurement reads populations either analytically (`|vᵢ|²`) or by
//! shot sampling. Sampling draws from the normalized population distribution
//! via cumulative-table inversion using the ChaCha12 generator seeded through
//! `seed_from_u64` (SplitMix64 expansion), so results are reproducible
//! bit-for-bit for a given seed.

use crate::linalg::{psd_sqrt, CMatrix, CVector, LinalgError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("operator norm exceeds one, cannot dilate: {0}")]
    NormExceedsOne(LinalgError),
    #[error("dimension mismatch: state has {got} entries, expected {base} or {padded}")]
    DimensionMismatch { got: usize, base: usize, padded: usize },
    #[error("cannot shot-sample a zero state")]
    ZeroState,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, DilationError>;

/// How to read out populations from a statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Exact populations `|vᵢ|²`.
    Analytic,
    /// Empirical frequencies from `shots` draws of the seeded generator,
    /// scaled by the squared norm of the measured state.
    Sampled { shots: u64, seed: u64 },
}

/// Populations over every basis state of the measured vector, together with
/// the mode (and, for sampling, shots and seed) that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult {
    pub populations: Vec<f64>,
    pub mode: Measure,
}

impl MeasurementResult {
    /// The physical populations: entries below `base_dim`. The remainder is
    /// dilation-ancilla weight.
    pub fn physical(&self, base_dim: usize) -> &[f64] {
        &self.populations[..base_dim]
    }
}

/// A Kraus contraction embedded in a unitary, stored both at its native
/// doubled dimension and padded up to the qubit-register dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedUnitary {
    base_dim: usize,
    matrix: CMatrix,
    padded_dim: usize,
    padded_matrix: CMatrix,
}

impl DilatedUnitary {
    /// Dimension n of the dilated operator.
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// The 2n×2n dilation.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Statevector dimension: next power of two at or above 2n.
    pub fn padded_dim(&self) -> usize {
        self.padded_dim
    }

    /// The dilation extended by an identity block to `padded_dim`.
    pub fn padded_matrix(&self) -> &CMatrix {
        &self.padded_matrix
    }

    /// True when the top-left block equals `m` entry for entry. The dilation
    /// stores the operator verbatim, so exact comparison is the right test.
    pub fn dilates(&self, m: &CMatrix) -> bool {
        let n = self.base_dim;
        m.nrows() == n
            && m.ncols() == n
            && (0..n).all(|r| (0..n).all(|c| self.matrix[(r, c)] == m[(r, c)]))
    }
}

/// Build the unitary dilation of a contraction.
///
/// Fails with `NormExceedsOne` when `I − M†M` has an eigenvalue below the
/// rounding floor, i.e. the operator norm genuinely exceeds 1.
pub fn dilate(m: &CMatrix) -> Result<DilatedUnitary> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        }
        .into());
    }
    let n = m.nrows();
    let eye = CMatrix::identity(n, n);
    let defect = |g: CMatrix| {
        psd_sqrt(&(&eye - g)).map_err(|e| match e {
            LinalgError::NegativeEigenvalue { .. } => DilationError::NormExceedsOne(e),
            other => DilationError::Linalg(other),
        })
    };
    let d_m = defect(m.adjoint() * m)?;
    let d_mdag = defect(m * m.adjoint())?;

    let mut matrix = CMatrix::zeros(2 * n, 2 * n);
    matrix.view_mut((0, 0), (n, n)).copy_from(m);
    matrix.view_mut((0, n), (n, n)).copy_from(&d_mdag);
    matrix.view_mut((n, 0), (n, n)).copy_from(&d_m);
    matrix.view_mut((n, n), (n, n)).copy_from(&(-m.adjoint()));

    let (padded_dim, padded_matrix) = pad_matrix(&matrix);
    Ok(DilatedUnitary {
        base_dim: n,
        matrix,
        padded_dim,
        padded_matrix,
    })
}

fn pad_matrix(matrix: &CMatrix) -> (usize, CMatrix) {
    let dim = matrix.nrows();
    let padded_dim = dim.next_power_of_two();
    let mut padded = CMatrix::identity(padded_dim, padded_dim);
    padded.view_mut((0, 0), (dim, dim)).copy_from(matrix);
    (padded_dim, padded)
}

/// Recompute the qubit-register padding of a dilation. Idempotent: dilations
/// from [`dilate`] are already padded.
pub fn pad_to_qubits(d: &DilatedUnitary) -> DilatedUnitary {
    let (padded_dim, padded_matrix) = pad_matrix(&d.matrix);
    DilatedUnitary {
        base_dim: d.base_dim,
        matrix: d.matrix.clone(),
        padded_dim,
        padded_matrix,
    }
}

/// Apply the padded dilation to a state given at either the base dimension
/// (zero-extended into the ancilla space) or the full padded dimension.
pub fn apply_to_state(d: &DilatedUnitary, v: &CVector) -> Result<CVector> {
    let padded = if v.len() == d.base_dim {
        let mut ext = CVector::zeros(d.padded_dim);
        ext.rows_mut(0, d.base_dim).copy_from(v);
        ext
    } else if v.len() == d.padded_dim {
        v.clone()
    } else {
        return Err(DilationError::DimensionMismatch {
            got: v.len(),
            base: d.base_dim,
            padded: d.padded_dim,
        });
    };
    Ok(&d.padded_matrix * padded)
}

/// Read populations from a statevector.
///
/// Analytic mode returns `|vᵢ|²` per index. Sampled mode draws `shots`
/// indices from the normalized distribution and returns empirical
/// frequencies scaled by `‖v‖²`, so both modes estimate the same quantity
/// for sub-normalized states.
pub fn measure_populations(v: &CVector, measure: Measure) -> Result<MeasurementResult> {
    let populations = match measure {
        Measure::Analytic => v.iter().map(|z| z.norm_sqr()).collect(),
        Measure::Sampled { shots, seed } => {
            let weights: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(DilationError::ZeroState);
            }
            let cumulative: Vec<f64> = weights
                .iter()
                .scan(0.0, |acc, w| {
                    *acc += w / total;
                    Some(*acc)
                })
                .collect();
            let last_supported = weights
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("nonzero total implies support");

            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut counts = vec![0u64; v.len()];
            for _ in 0..shots {
                let u: f64 = rng.gen();
                let idx = cumulative.partition_point(|&c| c <= u);
                counts[idx.min(last_supported)] += 1;
            }
            counts
                .iter()
                .map(|&c| total * (c as f64 / shots as f64))
                .collect()
        }
    };
    Ok(MeasurementResult {
        populations,
        mode: measure,
    })
}

/// Dump a matrix as text for external inspection: one line per row, columns
/// separated by spaces, each entry written as `re,im` with 17 significant
/// digits (lossless for f64).
pub fn write_matrix_file(m: &CMatrix, path: &Path) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{:.16e},{:.16e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    out.flush()
}
