//! The collective rotation `U = U₂U₃⋯U_N` with
//! `U_i = exp(δ_i (σ₊⁽¹⁾σ₋⁽ⁱ⁾ − σ₋⁽¹⁾σ₊⁽ⁱ⁾))`, `δ_i = −arctan(1/√(i−1))`.
//!
//! On the one-excitation sector `U` is an orthogonal rotation of the atomic
//! block that maps the first atom onto the symmetric (bright) state
//! `(1/√N) Σ_h |atom h⟩`. In the rotated frame only atom 1 couples to the
//! cavity (with `√N ε`) and decays (with `NΓ`); atoms `2..N` are dark.
//!
//! Atom labels in the formulas above are 1-based; code indices are 0-based.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::GeneratorSpec;
use crate::model::SystemParams;
use crate::space::{self, DensityMatrix};
use crate::CMatrix;

/// Matrix form of `U` on the truncated space.
#[derive(Debug, Clone)]
pub struct TransformU {
    n_atoms: usize,
    matrix: CMatrix,
    /// `δ_i` for `i = 2..N` (1-based atom labels).
    angles: Vec<f64>,
}

impl TransformU {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    fn check_dim(&self, m: &CMatrix) -> Result<()> {
        let d = space::dim(self.n_atoms);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
        Ok(())
    }

    /// `U† A U`.
    pub fn conjugate_operator(&self, op: &CMatrix) -> Result<CMatrix> {
        self.check_dim(op)?;
        Ok(self.matrix.adjoint() * op * &self.matrix)
    }

    /// `ρ̃ = U† ρ U`.
    pub fn forward(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::new_unchecked(self.conjugate_operator(rho.matrix())?))
    }
}

/// Rotation generator angle for 1-based atom label `i ≥ 2`.
fn delta(i: usize) -> f64 {
    -(1.0 / ((i - 1) as f64).sqrt()).atan()
}

/// Builds `U` as the ordered product of plane rotations. `N = 1` gives the
/// identity.
pub fn build_u(n_atoms: usize) -> TransformU {
    let d = space::dim(n_atoms);
    let mut u = CMatrix::identity(d, d);
    let mut angles = Vec::with_capacity(n_atoms.saturating_sub(1));
    // Right-multiplying by each factor in turn gives U₂U₃⋯U_N.
    for i in 2..=n_atoms {
        let dl = delta(i);
        angles.push(dl);
        let (s, c) = dl.sin_cos();
        // exp(δ G) with G = |a1⟩⟨ai| − |ai⟩⟨a1| acts on the (a1, ai) plane as
        // [[c, s], [−s, c]].
        let (p, q) = (1, i);
        for r in 0..d {
            let up = u[(r, p)];
            let uq = u[(r, q)];
            u[(r, p)] = up * c - uq * s;
            u[(r, q)] = up * s + uq * c;
        }
    }
    TransformU {
        n_atoms,
        matrix: u,
        angles,
    }
}

/// `ρ = U ρ̃ U†`, the inverse of [`TransformU::forward`].
pub fn back_transform(rho_tilde: &DensityMatrix, u: &TransformU) -> Result<DensityMatrix> {
    u.check_dim(rho_tilde.matrix())?;
    Ok(DensityMatrix::new_unchecked(
        &u.matrix * rho_tilde.matrix() * u.matrix.adjoint(),
    ))
}

/// Rotated-frame Hamiltonian `H̃_AC + H̃_LS` with the vacuum offset kept:
/// atom 1 couples to the cavity with `√N ε`, and carries the collective shift
/// `N Ω_L`; atoms `2..N` are uncoupled.
pub fn transformed_hamiltonian(params: &SystemParams) -> CMatrix {
    transformed_hamiltonian_in_frame(params, 0.0)
        + CMatrix::from_diagonal_element(
            space::dim(params.n_atoms),
            space::dim(params.n_atoms),
            Complex64::new(space::vacuum_energy(params), 0.0),
        )
}

/// [`transformed_hamiltonian`] without the vacuum offset, in the frame
/// rotating at `frame_freq · N̂`.
pub fn transformed_hamiltonian_in_frame(params: &SystemParams, frame_freq: f64) -> CMatrix {
    let n = params.n_atoms;
    let d = space::dim(n);
    let mut h = CMatrix::zeros(d, d);
    for a in 1..=n {
        h[(a, a)] = Complex64::new(params.atomic_freq - frame_freq, 0.0);
    }
    h[(1, 1)] += Complex64::new(n as f64 * params.lamb_shift, 0.0);
    h[(n + 1, n + 1)] = Complex64::new(params.cavity_freq - frame_freq, 0.0);
    let g = Complex64::new(params.eps_eff(), 0.0);
    h[(1, n + 1)] = g;
    h[(n + 1, 1)] = g;
    h
}

/// Rotated-frame decay matrix: `diag(NΓ, 0, …, 0)`.
pub fn transformed_gamma_matrix(params: &SystemParams) -> DMatrix<f64> {
    let n = params.n_atoms;
    let mut g = DMatrix::zeros(n, n);
    g[(0, 0)] = n as f64 * params.atomic_rate;
    g
}

/// Generator of the rotated-frame master equation (point-like atoms), in the
/// frame rotating at the cavity frequency.
pub fn transformed_generator(params: &SystemParams) -> Result<GeneratorSpec> {
    params.validate()?;
    GeneratorSpec::new(
        transformed_hamiltonian_in_frame(params, params.cavity_freq),
        params.cavity_rate,
        transformed_gamma_matrix(params),
        false,
    )
}
