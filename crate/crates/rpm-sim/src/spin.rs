//! The radical-pair spin model: two electron spins and one nuclear spin,
//! extended by two absorbing shelf states that collect reaction products.
//!
//! Everything downstream depends on one fixed basis ordering of the
//! 10-dimensional state space:
//!
//! | index | state      | | index | state      |
//! |-------|------------|-|-------|------------|
//! | 0     | s, ↑       | | 5     | t0, ↓      |
//! | 1     | t0, ↑      | | 6     | t+, ↓      |
//! | 2     | t+, ↑      | | 7     | t−, ↓      |
//! | 3     | t−, ↑      | | 8     | S shelf    |
//! | 4     | s, ↓       | | 9     | T shelf    |
//!
//! where s/t are electron singlet/triplet states and the arrow is the nuclear
//! spin. The shelf populations are the singlet and triplet yields.
//!
//! Internally the Hamiltonian is assembled on the three-spin product basis
//! (electron 1 ⊗ electron 2 ⊗ nucleus, each ordered ↑ then ↓), where
//! Kronecker products are natural, and then conjugated into the
//! singlet–triplet basis above, where the decay operators are natural.

use crate::linalg::{kron, CMatrix, CVector, C64};
use thiserror::Error;

/// Full dimension including the two shelves.
pub const DIM: usize = 10;
/// Dimension of the spin sector (indices 0..8).
pub const SPIN_DIM: usize = 8;
/// Index of the singlet shelf state.
pub const SINGLET_SHELF: usize = 8;
/// Index of the triplet shelf state.
pub const TRIPLET_SHELF: usize = 9;

/// Number of decay channels (one per spin basis state).
pub const N_DECAY: usize = 8;

#[derive(Debug, Error)]
#[error("invalid field parameters: {0}")]
pub struct InvalidParams(pub String);

/// Physical constants and geometry of the model.
///
/// The hyperfine tensor is diagonal, `A = diag(ax, ay, az)`, coupling the
/// nuclear spin to electron 1 only. The magnetic field has magnitude `b0`
/// and direction `(cos φ sin θ, sin φ sin θ, cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    /// Hyperfine tensor x component (Tesla).
    pub ax: f64,
    /// Hyperfine tensor y component (Tesla).
    pub ay: f64,
    /// Hyperfine tensor z component (Tesla).
    pub az: f64,
    /// Magnetic field magnitude (Tesla).
    pub b0: f64,
    /// Polar angle of the field against the molecular z axis (radians).
    pub theta: f64,
    /// Azimuthal angle of the field (radians).
    pub phi: f64,
    /// Electron gyromagnetic energy per field unit, ½·μ₀·g (Joule/Tesla).
    pub gamma: f64,
    /// Reduced Planck constant used by the model (Joule·second). The default
    /// is deliberately 100× the SI value so that the coherent precession
    /// (γ·b0/ħ ≈ 4.4e4 rad/s) and the decay rate act on comparable
    /// timescales; override it for strict SI dynamics.
    pub hbar: f64,
    /// Decay rate of every spin basis state into its shelf (1/second).
    pub kd: f64,
}

impl Default for FieldParams {
    /// Standard avian-compass parameter set: axial hyperfine coupling
    /// `ax = ay = az/2 = 1e-4 T`, geomagnetic field `5e-5 T`, `γ = 9.27e-24
    /// J/T`, `ħ = 1.05457e-32 J·s`, `φ = 0`, `k_d = 1e4 /s`, and `θ = π/2`.
    fn default() -> Self {
        FieldParams {
            ax: 1e-4,
            ay: 1e-4,
            az: 2e-4,
            b0: 5e-5,
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            gamma: 9.27e-24,
            hbar: 1.05457e-32,
            kd: 1e4,
        }
    }
}

impl FieldParams {
    /// Default parameters with the polar angle replaced.
    pub fn with_theta(theta: f64) -> Self {
        FieldParams {
            theta,
            ..FieldParams::default()
        }
    }

    /// Default parameters with an axial hyperfine coupling `ax = ay = az/2`
    /// rebuilt around the given x component.
    pub fn with_axial_coupling(ax: f64) -> Self {
        FieldParams {
            ax,
            ay: ax,
            az: 2.0 * ax,
            ..FieldParams::default()
        }
    }

    /// Magnetic field vector in Tesla.
    pub fn field_vector(&self) -> [f64; 3] {
        [
            self.b0 * self.phi.cos() * self.theta.sin(),
            self.b0 * self.phi.sin() * self.theta.sin(),
            self.b0 * self.theta.cos(),
        ]
    }

    pub fn validate(&self) -> Result<(), InvalidParams> {
        let fields = [
            ("ax", self.ax),
            ("ay", self.ay),
            ("az", self.az),
            ("b0", self.b0),
            ("theta", self.theta),
            ("phi", self.phi),
            ("gamma", self.gamma),
            ("hbar", self.hbar),
            ("kd", self.kd),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(InvalidParams(format!("{name} must be finite")));
            }
        }
        if self.b0 < 0.0 {
            return Err(InvalidParams("b0 must be non-negative".into()));
        }
        if self.kd < 0.0 {
            return Err(InvalidParams("kd must be non-negative".into()));
        }
        if self.hbar <= 0.0 {
            return Err(InvalidParams("hbar must be positive".into()));
        }
        Ok(())
    }
}

/// The fixed basis convention: state labels plus the unitary mapping the
/// three-spin product basis onto the singlet–triplet ⊗ nuclear basis.
#[derive(Debug, Clone)]
pub struct SpinBasis {
    labels: [&'static str; DIM],
    product_to_st: CMatrix,
}

impl SpinBasis {
    pub fn standard() -> Self {
        let one = C64::new(1.0, 0.0);
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

        // Product index = 4·e1 + 2·e2 + nucleus with ↑ = 0, ↓ = 1.
        // Column j holds the j-th singlet–triplet basis ket.
        let mut w = CMatrix::zeros(SPIN_DIM, SPIN_DIM);
        let mut set = |col: usize, entries: &[(usize, C64)]| {
            for &(row, v) in entries {
                w[(row, col)] = v;
            }
        };
        set(0, &[(2, r), (4, -r)]); // |s,↑⟩  = (|↑↓⟩−|↓↑⟩)/√2 ⊗ |↑⟩
        set(1, &[(2, r), (4, r)]); //  |t0,↑⟩ = (|↑↓⟩+|↓↑⟩)/√2 ⊗ |↑⟩
        set(2, &[(0, one)]); //         |t+,↑⟩ = |↑↑⟩ ⊗ |↑⟩
        set(3, &[(6, one)]); //         |t−,↑⟩ = |↓↓⟩ ⊗ |↑⟩
        set(4, &[(3, r), (5, -r)]); //  |s,↓⟩
        set(5, &[(3, r), (5, r)]); //   |t0,↓⟩
        set(6, &[(1, one)]); //         |t+,↓⟩
        set(7, &[(7, one)]); //         |t−,↓⟩

        SpinBasis {
            labels: [
                "s,up", "t0,up", "t+,up", "t-,up", "s,dn", "t0,dn", "t+,dn", "t-,dn", "S", "T",
            ],
            product_to_st: w,
        }
    }

    /// Label of basis state `index`.
    pub fn label(&self, index: usize) -> &'static str {
        self.labels[index]
    }

    /// The 8×8 unitary whose columns are the singlet–triplet kets expressed
    /// in the product basis.
    pub fn change_of_basis(&self) -> &CMatrix {
        &self.product_to_st
    }

    /// Conjugate an 8×8 product-basis operator into the singlet–triplet
    /// basis and embed it into the 10-dimensional space with zero rows and
    /// columns on the shelves.
    pub fn embed_spin_operator(&self, product_op: &CMatrix) -> CMatrix {
        let st = self.product_to_st.adjoint() * product_op * &self.product_to_st;
        let mut full = CMatrix::zeros(DIM, DIM);
        full.view_mut((0, 0), (SPIN_DIM, SPIN_DIM)).copy_from(&st);
        full
    }
}

fn pauli(axis: usize) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        0 => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        1 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        2 => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => unreachable!("axis must be 0, 1 or 2"),
    }
}

fn spin_half(axis: usize) -> CMatrix {
    pauli(axis).scale(0.5)
}

/// Hamiltonian of the radical pair in the 10-dimensional basis (Joules).
///
/// `H = γ·[Î·A·Ŝ₁ + B·(Ŝ₁ + Ŝ₂)]` with spin operators `σ/2`, assembled on
/// the product basis and conjugated into the singlet–triplet basis; the
/// shelf rows and columns are identically zero.
pub fn build_hamiltonian(p: &FieldParams) -> Result<CMatrix, InvalidParams> {
    p.validate()?;
    let i2 = CMatrix::identity(2, 2);
    let b = p.field_vector();
    let a = [p.ax, p.ay, p.az];

    let mut h8 = CMatrix::zeros(SPIN_DIM, SPIN_DIM);
    for axis in 0..3 {
        let s = spin_half(axis);
        // Hyperfine: electron 1 couples to the nucleus.
        h8 += kron(&kron(&s, &i2), &s).scale(p.gamma * a[axis]);
        // Zeeman term for both electrons.
        h8 += kron(&kron(&s, &i2), &i2).scale(p.gamma * b[axis]);
        h8 += kron(&kron(&i2, &s), &i2).scale(p.gamma * b[axis]);
    }

    Ok(SpinBasis::standard().embed_spin_operator(&h8))
}

/// The eight decay operators `|shelf⟩⟨spin state|`, one per spin basis
/// state: singlet states feed the S shelf, triplet states the T shelf.
pub fn decay_projectors() -> Vec<CMatrix> {
    let one = C64::new(1.0, 0.0);
    (0..N_DECAY)
        .map(|source| {
            let shelf = if source % 4 == 0 {
                SINGLET_SHELF
            } else {
                TRIPLET_SHELF
            };
            let mut p = CMatrix::zeros(DIM, DIM);
            p[(shelf, source)] = one;
            p
        })
        .collect()
}

/// Initial state: electron singlet ⊗ nuclear (|↑⟩ − |↓⟩)/√2, i.e. amplitude
/// +1/√2 on |s,↑⟩ and −1/√2 on |s,↓⟩.
pub fn initial_state() -> CVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(DIM);
    v[0] = C64::new(r, 0.0);
    v[4] = C64::new(-r, 0.0);
    v
}
