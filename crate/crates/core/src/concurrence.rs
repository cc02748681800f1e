//! Pairwise entanglement of the atomic sample.
//!
//! Two routes are provided and kept independent:
//!
//! - the generic Wootters concurrence of a pair reduced density matrix
//!   obtained by partial trace ([`pair_reduced_density`], [`wootters_concurrence`]);
//! - the closed form for the equal-mixture dynamics, conditioned on the
//!   excitation not having left the system ([`conditional_pair_concurrence`]).

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;

use crate::analytic::{analytic_coefficients, state_from_coefficients, AnalyticState};
use crate::dicke::conditioned_state;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::space::{BasisState, DensityMatrix};

/// Two-atom state on `{|−−⟩, |+−⟩, |−+⟩, |++⟩}`, where the first label is atom
/// `i` and the second atom `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub matrix: Matrix4<Complex64>,
}

const GG: usize = 0;
const EG: usize = 1;
const GE: usize = 2;

impl PairState {
    /// Both atoms in the ground state.
    pub fn p_gg(&self) -> f64 {
        self.matrix[(GG, GG)].re
    }

    /// Atom `i` excited, atom `j` ground.
    pub fn p_eg(&self) -> f64 {
        self.matrix[(EG, EG)].re
    }

    /// Atom `i` ground, atom `j` excited.
    pub fn p_ge(&self) -> f64 {
        self.matrix[(GE, GE)].re
    }

    /// Coherence `⟨+−|ρ|−+⟩`.
    pub fn coherence(&self) -> Complex64 {
        self.matrix[(EG, GE)]
    }

    /// One-excitation X-form state with populations `(p_gg, p_eg, p_ge, 0)`
    /// and coherence `χ`.
    pub fn x_state(p_gg: f64, p_eg: f64, p_ge: f64, chi: Complex64) -> Self {
        let mut m = Matrix4::zeros();
        m[(GG, GG)] = Complex64::new(p_gg, 0.0);
        m[(EG, EG)] = Complex64::new(p_eg, 0.0);
        m[(GE, GE)] = Complex64::new(p_ge, 0.0);
        m[(EG, GE)] = chi;
        m[(GE, EG)] = chi.conj();
        Self { matrix: m }
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-9 {
            return Err(Error::InvariantViolation(format!("pair state not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::InvariantViolation(format!("pair state trace {tr}")));
        }
        let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let min = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::InvariantViolation(format!("pair state eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Which pair basis state (if any) and which environment configuration a
/// basis state of the full space corresponds to.
fn split(state: BasisState, i: usize, j: usize) -> (usize, EnvState) {
    match state {
        BasisState::Vacuum => (GG, EnvState::Ground),
        BasisState::Photon => (GG, EnvState::Photon),
        BasisState::AtomExcited(h) if h == i => (EG, EnvState::Ground),
        BasisState::AtomExcited(h) if h == j => (GE, EnvState::Ground),
        BasisState::AtomExcited(h) => (GG, EnvState::Atom(h)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnvState {
    Ground,
    Photon,
    Atom(usize),
}

/// Reduced state of atoms `i < j` (0-based), tracing out the cavity and the
/// other `N − 2` atoms.
pub fn pair_reduced_density(rho: &DensityMatrix, i: usize, j: usize) -> Result<PairState> {
    let n = rho.n_atoms();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    if i >= j {
        return Err(Error::InvalidArgument(format!("pair indices must satisfy i < j, got ({i}, {j})")));
    }
    let d = rho.dim();
    let labels: Vec<(usize, EnvState)> = (0..d)
        .map(|a| BasisState::from_index(a, n).map(|s| split(s, i, j)))
        .collect::<Result<_>>()?;
    let mut m = Matrix4::zeros();
    for (a, &(pa, ea)) in labels.iter().enumerate() {
        for (b, &(pb, eb)) in labels.iter().enumerate() {
            if ea == eb {
                m[(pa, pb)] += rho.matrix()[(a, b)];
            }
        }
    }
    Ok(PairState { matrix: m })
}

/// `σ_y ⊗ σ_y`, which is real.
fn spin_flip() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Decreasing eigenvalues of `R = ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn wootters_eigenvalues(pair: &PairState) -> Result<[f64; 4]> {
    pair.validate()?;
    let flip = spin_flip();
    let rho = &pair.matrix;
    let r = rho * (flip * rho.conjugate() * flip);
    let schur = Schur::try_new(r, f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    let mut ev = [0.0; 4];
    for (k, slot) in ev.iter_mut().enumerate() {
        let z = t[(k, k)];
        if z.re < -1e-12 {
            return Err(Error::InvariantViolation(format!(
                "spin-flip product has negative eigenvalue {z}"
            )));
        }
        *slot = z.re.max(0.0);
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)`.
pub fn wootters_concurrence(pair: &PairState) -> Result<f64> {
    let ev = wootters_eigenvalues(pair)?;
    let s = ev.map(f64::sqrt);
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Wootters concurrence of atoms `i < j` after conditioning `ρ` (original
/// frame) on the excitation still being in the system.
pub fn conditioned_wootters(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    let cond = conditioned_state(rho)?;
    wootters_concurrence(&pair_reduced_density(&cond, i, j)?)
}

/// Closed-form conditional pair concurrence
/// `2|ρ̃₂₂ − ρ̃N+1,N+1| / (N Σ_{i≥2} ρ̃_ii)`.
pub fn conditional_pair_concurrence(state: &AnalyticState) -> Result<f64> {
    let n = state.n_atoms;
    if n < 2 {
        return Err(Error::InvalidArgument("pair concurrence needs at least two atoms".into()));
    }
    let survival = state.survival();
    if !(survival > 0.0) {
        return Err(Error::UndefinedConditional);
    }
    Ok(2.0 * (state.rho22 - state.rho_hh).abs() / (n as f64 * survival))
}

/// Sum over all `N(N−1)/2` pairs of a pair-independent concurrence.
pub fn total_binary_concurrence(c_pair: f64, n_atoms: usize) -> f64 {
    let n = n_atoms as f64;
    n * (n - 1.0) / 2.0 * c_pair
}

/// Closed form `(N−1)|ρ̃₂₂ − ρ̃N+1,N+1| / Σ_{i≥2} ρ̃_ii` of the total binary
/// concurrence.
pub fn total_binary_concurrence_closed(state: &AnalyticState) -> Result<f64> {
    let n = state.n_atoms;
    if n < 2 {
        return Err(Error::InvalidArgument("pair concurrence needs at least two atoms".into()));
    }
    let survival = state.survival();
    if !(survival > 0.0) {
        return Err(Error::UndefinedConditional);
    }
    Ok((n as f64 - 1.0) * (state.rho22 - state.rho_hh).abs() / survival)
}

/// Conditional pair and total binary concurrence over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceTrace {
    pub times: Vec<f64>,
    pub c_pair: Vec<f64>,
    pub c_bt: Vec<f64>,
}

impl ConcurrenceTrace {
    /// Evaluates the closed forms on `times`.
    pub fn from_analytic(params: &SystemParams, times: &[f64]) -> Result<Self> {
        params.validate()?;
        let co = analytic_coefficients(params);
        let mut c_pair = Vec::with_capacity(times.len());
        let mut c_bt = Vec::with_capacity(times.len());
        for &t in times {
            let st = state_from_coefficients(&co, t);
            let c = conditional_pair_concurrence(&st)?;
            c_pair.push(c);
            c_bt.push(total_binary_concurrence(c, params.n_atoms));
        }
        Ok(Self {
            times: times.to_vec(),
            c_pair,
            c_bt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::analytic_state;
    use crate::{CMatrix, CVector};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_pair_is_ground() {
        let rho = DensityMatrix::projector(4, BasisState::Vacuum);
        let pair = pair_reduced_density(&rho, 1, 3).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = c(1.0);
        assert_eq!(pair.matrix, expected);
    }

    #[test]
    fn symmetric_two_atom_state_is_bell_like() {
        let mut psi = CVector::zeros(4);
        psi[1] = c(std::f64::consts::FRAC_1_SQRT_2);
        psi[2] = c(std::f64::consts::FRAC_1_SQRT_2);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let pair = pair_reduced_density(&rho, 0, 1).unwrap();
        assert!((pair.coherence() - c(0.5)).norm() < 1e-15);
        assert!((pair.p_eg() - 0.5).abs() < 1e-15);
        assert!((pair.p_ge() - 0.5).abs() < 1e-15);
        assert!(pair.p_gg().abs() < 1e-15);
        assert!((wootters_concurrence(&pair).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_collects_environment_populations() {
        // Diagonal state: vacuum 0.1, atoms 0.2/0.3/0.15, photon 0.25.
        let diag = [0.1, 0.2, 0.3, 0.15, 0.25];
        let mut m = CMatrix::from_diagonal(&CVector::from_iterator(5, diag.iter().map(|&x| c(x))));
        m[(1, 3)] = Complex64::new(0.05, 0.02);
        m[(3, 1)] = Complex64::new(0.05, -0.02);
        m[(0, 1)] = c(0.01);
        m[(1, 0)] = c(0.01);
        let rho = DensityMatrix::new(m).unwrap();
        let pair = pair_reduced_density(&rho, 0, 2).unwrap();
        assert!((pair.p_gg() - (0.1 + 0.3 + 0.25)).abs() < 1e-15);
        assert!((pair.p_eg() - 0.2).abs() < 1e-15);
        assert!((pair.p_ge() - 0.15).abs() < 1e-15);
        assert_eq!(pair.coherence(), Complex64::new(0.05, 0.02));
        // Vacuum/atom coherence survives only when the environment matches.
        assert_eq!(pair.matrix[(0, 1)], c(0.01));
        assert_eq!(pair.matrix[(3, 3)], c(0.0));
    }

    #[test]
    fn pair_index_errors() {
        let rho = DensityMatrix::uniform_atomic_mixture(3);
        assert!(pair_reduced_density(&rho, 1, 1).is_err());
        assert!(pair_reduced_density(&rho, 2, 1).is_err());
        assert!(pair_reduced_density(&rho, 0, 3).is_err());
    }

    #[test]
    fn product_states_have_zero_concurrence() {
        // |+⟩|−⟩ and a mixed product of single-qubit states.
        let pure = PairState::x_state(0.0, 1.0, 0.0, c(0.0));
        assert!(wootters_concurrence(&pure).unwrap() < 1e-12);
        let (p, q) = (0.3, 0.6);
        let mut m = Matrix4::zeros();
        // diag(p_i^- p_j^-, p_i^+ p_j^-, p_i^- p_j^+, p_i^+ p_j^+)
        m[(0, 0)] = c((1.0 - p) * (1.0 - q));
        m[(1, 1)] = c(p * (1.0 - q));
        m[(2, 2)] = c((1.0 - p) * q);
        m[(3, 3)] = c(p * q);
        assert!(wootters_concurrence(&PairState { matrix: m }).unwrap() < 1e-12);
    }

    #[test]
    fn x_state_concurrence_is_twice_coherence() {
        for (pgg, p, chi) in [(0.4, 0.3, Complex64::new(0.2, 0.0)), (0.0, 0.5, Complex64::new(0.1, 0.3)), (0.8, 0.1, Complex64::new(0.0, -0.05))] {
            let pair = PairState::x_state(pgg, p, p, chi);
            let cw = wootters_concurrence(&pair).unwrap();
            assert!((cw - 2.0 * chi.norm()).abs() < 1e-12, "{cw} vs {}", 2.0 * chi.norm());
        }
    }

    #[test]
    fn rejects_invalid_pairs() {
        let mut bad = PairState::x_state(0.5, 0.25, 0.25, c(0.0));
        bad.matrix[(0, 1)] = c(0.1);
        assert!(wootters_concurrence(&bad).is_err());
        let neg = PairState::x_state(1.2, -0.1, -0.1, c(0.0));
        assert!(wootters_concurrence(&neg).is_err());
    }

    #[test]
    fn closed_form_limits() {
        for n in [2, 3, 5, 10] {
            let p = SystemParams::figure(n);
            let st0 = analytic_state(&p, 0.0).unwrap();
            assert_eq!(conditional_pair_concurrence(&st0).unwrap(), 0.0);
            let late = analytic_state(&p, 60.0 * p.tau_ac()).unwrap();
            let nf = n as f64;
            let c_late = conditional_pair_concurrence(&late).unwrap();
            assert!((c_late - 2.0 / (nf * (nf - 1.0))).abs() < 1e-12);
            assert!((total_binary_concurrence(c_late, n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_total_matches_pair_sum() {
        let p = SystemParams::figure(7);
        for i in 0..40 {
            let st = analytic_state(&p, i as f64 * 0.37 * p.tau_ac()).unwrap();
            let cp = conditional_pair_concurrence(&st).unwrap();
            let total = total_binary_concurrence_closed(&st).unwrap();
            assert!((total_binary_concurrence(cp, 7) - total).abs() < 1e-12);
        }
        assert_eq!(total_binary_concurrence(0.25, 2), 0.25);
    }

    #[test]
    fn conditional_needs_survival() {
        let st = AnalyticState {
            n_atoms: 3,
            time: 0.0,
            rho11: 1.0,
            rho_hh: 0.0,
            rho22: 0.0,
            rho_2_n2: c(0.0),
            rho_n2_n2: 0.0,
        };
        assert!(matches!(conditional_pair_concurrence(&st), Err(Error::UndefinedConditional)));
        let one = analytic_state(&SystemParams::figure(1), 0.0).unwrap();
        assert!(conditional_pair_concurrence(&one).is_err());
    }
}
