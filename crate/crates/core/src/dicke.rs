//! Collective-spin analysis of the long-time state and no-click conditioning.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::trapped_states;
use crate::error::{Error, Result};
use crate::space::{self, collective_spin_ops, BasisState, DensityMatrix};
use crate::CMatrix;

/// Dicke characterisation of an asymptotic state
/// `w |vac⟩⟨vac| + (1 − w) ρ_mix`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DickeReport {
    pub n_atoms: usize,
    /// `S` solving `S(S+1) = tr(S² ρ_mix)`.
    pub s_quantum_number: f64,
    /// `tr(S_z ρ_mix)`.
    pub sz_eigenvalue: f64,
    /// `‖S₋|φ_T⁽ʰ⁾⟩‖` for every trapped state.
    pub s_minus_norms: Vec<f64>,
    /// `max|S² ρ_mix S² − (S(S+1))² ρ_mix|` with `S = (N−2)/2`.
    pub s_squared_residual: f64,
    /// `max|S_z ρ_mix S_z − S² ρ_mix|` with `S = (N−2)/2`.
    pub sz_residual: f64,
    pub vacuum_weight: f64,
    /// Total atomic excitation probability.
    pub trapping_probability: f64,
}

/// Splits `ρ` into its vacuum weight and the normalised remainder `ρ_mix`
/// and evaluates the collective-spin identities on `ρ_mix`.
pub fn analyze_asymptotic(rho: &DensityMatrix, n_atoms: usize) -> Result<DickeReport> {
    if n_atoms < 2 {
        return Err(Error::InvalidArgument("Dicke analysis needs at least two atoms".into()));
    }
    if rho.n_atoms() != n_atoms {
        return Err(Error::DimensionMismatch {
            expected: space::dim(n_atoms),
            found: rho.dim(),
        });
    }
    let w = rho.matrix()[(0, 0)].re;
    if !(0.0..1.0).contains(&w) {
        return Err(Error::NonAsymptotic(format!("vacuum weight {w} outside [0, 1)")));
    }
    let mut mix = rho.matrix().clone();
    mix[(0, 0)] -= Complex64::new(w, 0.0);
    mix /= Complex64::new(1.0 - w, 0.0);

    let spin = collective_spin_ops(n_atoms);
    let s2_mean = (&spin.s_squared * &mix).trace().re;
    let s_quantum_number = 0.5 * ((1.0 + 4.0 * s2_mean).max(0.0).sqrt() - 1.0);
    let sz_eigenvalue = (&spin.sz * &mix).trace().re;

    let s = (n_atoms as f64 - 2.0) / 2.0;
    let s_eig = Complex64::new((s * (s + 1.0)).powi(2), 0.0);
    let s_squared_dev = &spin.s_squared * &mix * &spin.s_squared - &mix * s_eig;
    let sz_dev = &spin.sz * &mix * &spin.sz - &mix * Complex64::new(s * s, 0.0);

    let s_minus_norms = trapped_states(n_atoms)
        .iter()
        .map(|v| (&spin.s_minus * v).norm())
        .collect();
    let trapping_probability = (1..=n_atoms).map(|h| rho.matrix()[(h, h)].re).sum();

    Ok(DickeReport {
        n_atoms,
        s_quantum_number,
        sz_eigenvalue,
        s_minus_norms,
        s_squared_residual: space::max_abs(&s_squared_dev),
        sz_residual: space::max_abs(&sz_dev),
        vacuum_weight: w,
        trapping_probability,
    })
}

/// Restriction of `ρ` to the one-excitation sector, renormalised.
pub fn conditioned_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.n_atoms();
    let d = rho.dim();
    let survival = 1.0 - rho.matrix()[(0, 0)].re;
    if !(survival > 0.0) {
        return Err(Error::UndefinedConditional);
    }
    let vac = BasisState::Vacuum.index(n);
    let scale = Complex64::new(1.0 / survival, 0.0);
    let m = CMatrix::from_fn(d, d, |r, c| {
        if r == vac || c == vac {
            Complex64::new(0.0, 0.0)
        } else {
            rho.matrix()[(r, c)] * scale
        }
    });
    Ok(DensityMatrix::new_unchecked(m))
}
