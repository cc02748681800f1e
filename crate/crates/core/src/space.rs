//! The zero/one-excitation sector and operators restricted to it.
//!
//! Basis ordering (0-based linear index):
//!
//! | index      | state                                   |
//! |------------|-----------------------------------------|
//! | `0`        | cavity vacuum, all atoms ground         |
//! | `h + 1`    | cavity vacuum, atom `h` excited (`h < N`) |
//! | `N + 1`    | one photon, all atoms ground            |
//!
//! Products of single-atom ladder operators that pass through the
//! two-excitation sector are not representable here; hopping terms
//! `σ₊⁽ⁱ⁾σ₋⁽ʲ⁾` are built directly by [`hop`].

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DissipationKernel, SystemParams};
use crate::{CMatrix, CVector};

/// One basis vector of the truncated space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    Vacuum,
    /// Atom `h` (0-based) excited.
    AtomExcited(usize),
    Photon,
}

impl BasisState {
    pub fn index(self, n_atoms: usize) -> usize {
        match self {
            BasisState::Vacuum => 0,
            BasisState::AtomExcited(h) => h + 1,
            BasisState::Photon => n_atoms + 1,
        }
    }

    pub fn from_index(index: usize, n_atoms: usize) -> Result<Self> {
        match index {
            0 => Ok(BasisState::Vacuum),
            i if i <= n_atoms => Ok(BasisState::AtomExcited(i - 1)),
            i if i == n_atoms + 1 => Ok(BasisState::Photon),
            i => Err(Error::IndexOutOfRange { index: i, n: n_atoms + 2 }),
        }
    }

    /// Whether atom `atom` is excited in this basis state.
    pub fn atom_excited(self, atom: usize) -> bool {
        matches!(self, BasisState::AtomExcited(h) if h == atom)
    }

    /// Number of excitations (photons plus excited atoms).
    pub fn excitations(self) -> usize {
        match self {
            BasisState::Vacuum => 0,
            _ => 1,
        }
    }
}

/// Hilbert space dimension `N + 2`.
pub fn dim(n_atoms: usize) -> usize {
    n_atoms + 2
}

pub fn basis_vector(n_atoms: usize, state: BasisState) -> CVector {
    let mut v = CVector::zeros(dim(n_atoms));
    v[state.index(n_atoms)] = Complex64::new(1.0, 0.0);
    v
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_atom(atom: usize, n_atoms: usize) -> Result<()> {
    if atom >= n_atoms {
        Err(Error::IndexOutOfRange { index: atom, n: n_atoms })
    } else {
        Ok(())
    }
}

/// `σ₋⁽ⁱ⁾`: single entry `⟨vac|σ₋|atom i⟩ = 1`.
pub fn lowering_op(atom: usize, n_atoms: usize) -> Result<CMatrix> {
    check_atom(atom, n_atoms)?;
    let mut m = CMatrix::zeros(dim(n_atoms), dim(n_atoms));
    m[(0, atom + 1)] = one();
    Ok(m)
}

/// `σ₊⁽ⁱ⁾ = (σ₋⁽ⁱ⁾)†`.
pub fn raising_op(atom: usize, n_atoms: usize) -> Result<CMatrix> {
    Ok(lowering_op(atom, n_atoms)?.adjoint())
}

/// `σ₊⁽ⁱ⁾σ₋⁽ʲ⁾`, moving the excitation from atom `j` to atom `i`.
pub fn hop(i: usize, j: usize, n_atoms: usize) -> Result<CMatrix> {
    check_atom(i, n_atoms)?;
    check_atom(j, n_atoms)?;
    let mut m = CMatrix::zeros(dim(n_atoms), dim(n_atoms));
    m[(i + 1, j + 1)] = one();
    Ok(m)
}

/// `σ_z⁽ⁱ⁾`: `+1` when atom `i` is excited, `−1` otherwise.
pub fn sigma_z(atom: usize, n_atoms: usize) -> Result<CMatrix> {
    check_atom(atom, n_atoms)?;
    let d = dim(n_atoms);
    Ok(CMatrix::from_fn(d, d, |r, c| {
        if r != c {
            Complex64::new(0.0, 0.0)
        } else if r == atom + 1 {
            one()
        } else {
            -one()
        }
    }))
}

/// Cavity annihilation operator `α`: single entry `⟨vac|α|photon⟩ = 1`.
pub fn photon_annihilation(n_atoms: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim(n_atoms), dim(n_atoms));
    m[(0, n_atoms + 1)] = one();
    m
}

/// Excitation number `N̂`: 0 on the vacuum, 1 elsewhere.
pub fn excitation_number(n_atoms: usize) -> CMatrix {
    let d = dim(n_atoms);
    let mut diag = CVector::from_element(d, one());
    diag[0] = Complex64::new(0.0, 0.0);
    CMatrix::from_diagonal(&diag)
}

/// Collective spin operators of the atomic sample.
#[derive(Debug, Clone)]
pub struct CollectiveSpin {
    /// `S_z = ½ Σ σ_z⁽ⁱ⁾`.
    pub sz: CMatrix,
    /// `S₋ = Σ σ₋⁽ⁱ⁾`.
    pub s_minus: CMatrix,
    /// `S² = S₊S₋ + S_z(S_z − 1)`.
    pub s_squared: CMatrix,
}

pub fn collective_spin_ops(n_atoms: usize) -> CollectiveSpin {
    let d = dim(n_atoms);
    let half_n = n_atoms as f64 / 2.0;
    let sz = CMatrix::from_fn(d, d, |r, c| {
        if r != c {
            Complex64::new(0.0, 0.0)
        } else if (1..=n_atoms).contains(&r) {
            Complex64::new(1.0 - half_n, 0.0)
        } else {
            Complex64::new(-half_n, 0.0)
        }
    });
    let mut s_minus = CMatrix::zeros(d, d);
    for h in 0..n_atoms {
        s_minus[(0, h + 1)] = one();
    }
    let id = CMatrix::identity(d, d);
    let s_squared = s_minus.adjoint() * &s_minus + &sz * (&sz - id);
    CollectiveSpin {
        sz,
        s_minus,
        s_squared,
    }
}

/// Ground-state energy `−Nω₀/2` of the bare Hamiltonian.
pub fn vacuum_energy(params: &SystemParams) -> f64 {
    -(params.n_atoms as f64) * params.atomic_freq / 2.0
}

/// Atom-cavity Hamiltonian with the vacuum energy removed and a frame rotating
/// at `frame_freq · N̂`: diagonal `(0, ω₀ − f, …, ω₀ − f, ω − f)`, coupling `ε`
/// between every atomic state and the photon state.
///
/// Entries are assembled from differences of the input frequencies, never by
/// subtracting large offsets from a built matrix.
pub fn hamiltonian_ac_in_frame(params: &SystemParams, frame_freq: f64) -> CMatrix {
    let n = params.n_atoms;
    let d = dim(n);
    let mut h = CMatrix::zeros(d, d);
    let atom = Complex64::new(params.atomic_freq - frame_freq, 0.0);
    let photon = n + 1;
    for a in 1..=n {
        h[(a, a)] = atom;
        h[(a, photon)] = Complex64::new(params.coupling, 0.0);
        h[(photon, a)] = Complex64::new(params.coupling, 0.0);
    }
    h[(photon, photon)] = Complex64::new(params.cavity_freq - frame_freq, 0.0);
    h
}

/// Atom-cavity Hamiltonian `ωα†α + (ω₀/2)Σσ_z + ε Σ(ασ₊ + h.c.)`, including
/// the `−Nω₀/2` vacuum offset.
pub fn hamiltonian_ac(params: &SystemParams) -> CMatrix {
    let d = dim(params.n_atoms);
    let offset = Complex64::new(vacuum_energy(params), 0.0);
    hamiltonian_ac_in_frame(params, 0.0) + CMatrix::from_diagonal_element(d, d, offset)
}

/// Bath-induced shift Hamiltonian `Σ_ij Ω_ij σ₊⁽ⁱ⁾σ₋⁽ʲ⁾`.
pub fn lamb_shift_h(params: &SystemParams, kernel: &DissipationKernel) -> Result<CMatrix> {
    let n = params.n_atoms;
    if kernel.n_atoms() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: kernel.n_atoms(),
        });
    }
    let d = dim(n);
    let mut h = CMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            h[(i + 1, j + 1)] = Complex64::new(kernel.shift_matrix[(i, j)], 0.0);
        }
    }
    Ok(h)
}

/// `AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise `|A − B|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Tolerances for [`DensityMatrix::check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-9,
            positivity: 1e-9,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Wraps `m` after checking the invariants at the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, StateTolerance::default())
    }

    pub fn with_tolerance(m: CMatrix, tol: StateTolerance) -> Result<Self> {
        let rho = Self(m);
        rho.check(tol)?;
        Ok(rho)
    }

    /// Wraps without validation. Callers that produce states by construction
    /// (closed-form solutions, exact transforms) check invariants separately.
    pub fn new_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn projector(n_atoms: usize, state: BasisState) -> Self {
        let v = basis_vector(n_atoms, state);
        Self(&v * v.adjoint())
    }

    /// Equal mixture of single-atom excitations, `(1/N) Σ_h |atom h⟩⟨atom h|`.
    pub fn uniform_atomic_mixture(n_atoms: usize) -> Self {
        let d = dim(n_atoms);
        let w = Complex64::new(1.0 / n_atoms as f64, 0.0);
        Self(CMatrix::from_fn(d, d, |r, c| {
            if r == c && (1..=n_atoms).contains(&r) {
                w
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_atoms(&self) -> usize {
        self.dim() - 2
    }

    pub fn get(&self, a: BasisState, b: BasisState) -> Complex64 {
        let n = self.n_atoms();
        self.0[(a.index(n), b.index(n))]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.0, &self.0.adjoint())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn check(&self, tol: StateTolerance) -> Result<()> {
        if !self.0.is_square() || self.0.nrows() < 3 {
            return Err(Error::InvariantViolation(format!(
                "density matrix must be square with dimension >= 3, got {:?}",
                self.0.shape()
            )));
        }
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("non-finite density matrix entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > tol.hermiticity {
            return Err(Error::InvariantViolation(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvariantViolation(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -tol.positivity {
            return Err(Error::InvariantViolation(format!("minimum eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `tr(A ρ)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        (op * &self.0).trace()
    }
}
