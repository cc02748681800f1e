//! Master-equation generator and fixed-step RK4 propagation.
//!
//! The generator is
//!
//! ```text
//! dρ/dt = −i[H, ρ] + k(2αρα† − α†αρ − ρα†α)
//!       + Σ_ij Γ_ij (2σ₋⁽ⁱ⁾ρσ₊⁽ʲ⁾ − σ₊⁽ⁱ⁾σ₋⁽ʲ⁾ρ − ρσ₊⁽ⁱ⁾σ₋⁽ʲ⁾)
//! ```
//!
//! with the diagonal and off-diagonal collective sums merged into one sum over
//! the full decay matrix. The collective term is diagonalised once,
//! `Γ = Σ_m λ_m v_m v_mᵀ`, giving jump operators `L_m = Σ_i v_m,i σ₋⁽ⁱ⁾`.
//!
//! Propagation is deliberately plain: no renormalisation of trace or
//! positivity. A state that drifts is reported as an error.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DissipationKernel, SystemParams};
use crate::space::{self, DensityMatrix};
use crate::CMatrix;

/// Decay channels with `|λ| ≤ DROP_RELATIVE · max|λ|` are numerical noise of
/// the eigen-decomposition and are discarded.
const DROP_RELATIVE: f64 = 1e-13;

/// A single Lindblad channel `rate · (2LρL† − L†Lρ − ρL†L)`.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    pub rate: f64,
    pub op: CMatrix,
}

/// Everything needed to evaluate the generator on a density matrix.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    hamiltonian: CMatrix,
    cavity_rate: f64,
    gamma_matrix: DMatrix<f64>,
    channels: Vec<JumpChannel>,
    /// Nonzero entries `(column, value)` of channels of the form `|vac⟩⟨v|`,
    /// for which `LρL†` reduces to the scalar `⟨v|ρ|v⟩`.
    vacuum_rows: Vec<Option<Vec<(usize, Complex64)>>>,
    /// `H − i Σ rate L†L`.
    effective: CMatrix,
    norm_bound: f64,
}

impl GeneratorSpec {
    /// Builds the generator from a Hamiltonian on the `N + 2` space, the cavity
    /// rate and the `N × N` collective decay matrix.
    ///
    /// The decay matrix must be symmetric and positive semidefinite (down to
    /// `−1e-12` relative to its largest entry) unless `allow_indefinite` is set.
    pub fn new(
        hamiltonian: CMatrix,
        cavity_rate: f64,
        gamma_matrix: DMatrix<f64>,
        allow_indefinite: bool,
    ) -> Result<Self> {
        let n = gamma_matrix.nrows();
        if !gamma_matrix.is_square() {
            return Err(Error::InvalidArgument("decay matrix must be square".into()));
        }
        if !hamiltonian.is_square() || hamiltonian.nrows() != space::dim(n) {
            return Err(Error::DimensionMismatch {
                expected: space::dim(n),
                found: hamiltonian.nrows(),
            });
        }
        if !(cavity_rate.is_finite() && cavity_rate >= 0.0) {
            return Err(Error::InvalidArgument(format!("cavity rate {cavity_rate}")));
        }
        let scale = gamma_matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if (&gamma_matrix - gamma_matrix.transpose()).iter().any(|v| v.abs() > 1e-12 * scale) {
            return Err(Error::InvalidArgument("decay matrix must be symmetric".into()));
        }

        let mut channels = Vec::new();
        if cavity_rate > 0.0 {
            channels.push(JumpChannel {
                rate: cavity_rate,
                op: space::photon_annihilation(n),
            });
        }
        if scale > 0.0 {
            let eig = gamma_matrix.clone().symmetric_eigen();
            let max_ev = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let min_ev = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if !allow_indefinite && min_ev < -1e-12 * scale {
                return Err(Error::InvalidArgument(format!(
                    "decay matrix is not positive semidefinite (eigenvalue {min_ev:e}); \
                     pass allow_indefinite to propagate anyway"
                )));
            }
            for (m, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda.abs() <= DROP_RELATIVE * max_ev {
                    continue;
                }
                let mut op = CMatrix::zeros(space::dim(n), space::dim(n));
                for i in 0..n {
                    op[(0, i + 1)] = Complex64::new(eig.eigenvectors[(i, m)], 0.0);
                }
                channels.push(JumpChannel { rate: lambda, op });
            }
        }

        let mut effective = hamiltonian.clone();
        for ch in &channels {
            effective -= (ch.op.adjoint() * &ch.op) * Complex64::new(0.0, ch.rate);
        }
        let norm_bound = 2.0 * effective.norm()
            + channels
                .iter()
                .map(|ch| 2.0 * ch.rate.abs() * ch.op.norm_squared())
                .sum::<f64>();

        let vacuum_rows = channels.iter().map(|ch| vacuum_row(&ch.op)).collect();

        Ok(Self {
            hamiltonian,
            cavity_rate,
            gamma_matrix,
            channels,
            vacuum_rows,
            effective,
            norm_bound,
        })
    }

    /// Generator for the model `H_AC + H_LS` with cavity and collective atomic
    /// losses, expressed in the frame rotating at the cavity frequency.
    ///
    /// The frame rotation `exp(iωN̂t)` leaves every element inside an
    /// excitation sector unchanged; only vacuum/one-excitation coherences pick
    /// up a phase. Removing the optical frequency keeps the RK4 step bounded by
    /// the coupling and detuning scales.
    pub fn from_params(params: &SystemParams, kernel: &DissipationKernel) -> Result<Self> {
        Self::in_frame(params, kernel, params.cavity_freq, false)
    }

    /// As [`GeneratorSpec::from_params`], with an explicit frame frequency and
    /// the option to accept an indefinite decay matrix.
    pub fn in_frame(
        params: &SystemParams,
        kernel: &DissipationKernel,
        frame_freq: f64,
        allow_indefinite: bool,
    ) -> Result<Self> {
        params.validate()?;
        let h = space::hamiltonian_ac_in_frame(params, frame_freq) + space::lamb_shift_h(params, kernel)?;
        Self::new(h, params.cavity_rate, kernel.gamma_matrix.clone(), allow_indefinite)
    }

    pub fn n_atoms(&self) -> usize {
        self.gamma_matrix.nrows()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn cavity_rate(&self) -> f64 {
        self.cavity_rate
    }

    pub fn gamma_matrix(&self) -> &DMatrix<f64> {
        &self.gamma_matrix
    }

    /// Jump channels actually used: the cavity (if `k > 0`) followed by the
    /// nonzero eigen-channels of the decay matrix.
    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    /// Upper bound on the generator's operator norm (Frobenius based).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        // −i H_eff ρ plus its adjoint is exactly Hermitian for Hermitian ρ.
        let a = (&self.effective * rho) * Complex64::new(0.0, -1.0);
        let mut out = &a + a.adjoint();
        for (ch, row) in self.channels.iter().zip(&self.vacuum_rows) {
            match row {
                Some(v) => {
                    let mut jump = Complex64::new(0.0, 0.0);
                    for &(i, vi) in v {
                        for &(j, vj) in v {
                            jump += vi * rho[(i, j)] * vj.conj();
                        }
                    }
                    out[(0, 0)] += Complex64::new(2.0 * ch.rate * jump.re, 0.0);
                }
                None => {
                    let b = (&ch.op * rho) * ch.op.adjoint();
                    out += (&b + b.adjoint()) * Complex64::new(ch.rate, 0.0);
                }
            }
        }
        out
    }
}

fn vacuum_row(op: &CMatrix) -> Option<Vec<(usize, Complex64)>> {
    let zero = Complex64::new(0.0, 0.0);
    if op.rows(1, op.nrows() - 1).iter().any(|z| *z != zero) {
        return None;
    }
    Some((0..op.ncols()).filter(|&c| op[(0, c)] != zero).map(|c| (c, op[(0, c)])).collect())
}

/// `dρ/dt` for the given generator.
pub fn apply_generator(spec: &GeneratorSpec, rho: &DensityMatrix) -> Result<CMatrix> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho.dim(),
        });
    }
    Ok(spec.apply_matrix(rho.matrix()))
}

/// Probability that the excitation is still in the system, `1 − ⟨vac|ρ|vac⟩`.
pub fn survival_probability(rho: &DensityMatrix) -> f64 {
    1.0 - rho.matrix()[(0, 0)].re
}

/// Step control and invariant checks for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    /// Fixed step in seconds. `None` picks `step_factor / norm_bound`.
    pub step: Option<f64>,
    /// Default accuracy target `h · ‖L‖`.
    pub step_factor: f64,
    /// Stability limit on `h · ‖L‖`; larger explicit steps are rejected.
    pub max_step_factor: f64,
    /// Most negative eigenvalue tolerated at an output time.
    pub positivity_floor: f64,
    /// Largest tolerated `|tr ρ − 1|` at an output time.
    pub trace_tolerance: f64,
    /// Skip the per-output eigenvalue check (indefinite decay matrices).
    pub check_positivity: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            step: None,
            step_factor: 0.01,
            max_step_factor: 0.1,
            positivity_floor: -1e-6,
            trace_tolerance: 1e-9,
            check_positivity: true,
        }
    }
}

/// States on an output time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Step actually used (the largest substep over all intervals).
    pub step: f64,
    /// Most negative eigenvalue seen at the output times.
    pub min_eigenvalue: f64,
    /// Largest `|tr ρ − 1|` seen at the output times.
    pub max_trace_drift: f64,
}

fn rk4_step(spec: &GeneratorSpec, rho: &CMatrix, h: f64) -> CMatrix {
    let half = Complex64::new(h / 2.0, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = spec.apply_matrix(rho);
    let k2 = spec.apply_matrix(&(rho + &k1 * half));
    let k3 = spec.apply_matrix(&(rho + &k2 * half));
    let k4 = spec.apply_matrix(&(rho + &k3 * full));
    let two = Complex64::new(2.0, 0.0);
    rho + (k1 + &k2 * two + &k3 * two + k4) * Complex64::new(h / 6.0, 0.0)
}

/// Step-doubling estimate of the local error of one RK4 step of size `h`:
/// `‖ρ_{2×h/2} − ρ_h‖_max / 15`.
pub fn step_doubling_error(spec: &GeneratorSpec, rho: &DensityMatrix, h: f64) -> Result<f64> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho.dim(),
        });
    }
    let one = rk4_step(spec, rho.matrix(), h);
    let two = rk4_step(spec, &rk4_step(spec, rho.matrix(), h / 2.0), h / 2.0);
    Ok(space::max_abs_diff(&one, &two) / 15.0)
}

/// Integrates `ρ₀` (given at `times[0]`) over the strictly increasing grid.
pub fn propagate(
    spec: &GeneratorSpec,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rho0.dim(),
        });
    }
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    let bound = spec.norm_bound();
    let max_step = if bound > 0.0 {
        opts.max_step_factor / bound
    } else {
        f64::INFINITY
    };
    let h_target = match opts.step {
        Some(h) => {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
            }
            if h > max_step {
                return Err(Error::StepTooLarge { step: h, bound: max_step });
            }
            h
        }
        None if bound > 0.0 => opts.step_factor.min(opts.max_step_factor) / bound,
        None => f64::INFINITY,
    };

    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        step: 0.0,
        min_eigenvalue: f64::INFINITY,
        max_trace_drift: 0.0,
    };
    let mut rho = rho0.matrix().clone();
    let record = |traj: &mut Trajectory, m: &CMatrix, t: f64| -> Result<()> {
        let state = DensityMatrix::new_unchecked(m.clone());
        let drift = (state.trace() - Complex64::new(1.0, 0.0)).norm();
        traj.max_trace_drift = traj.max_trace_drift.max(drift);
        if drift > opts.trace_tolerance {
            return Err(Error::InvariantViolation(format!("trace drift {drift:e} at t = {t:e} s")));
        }
        if opts.check_positivity {
            let min = state.min_eigenvalue();
            traj.min_eigenvalue = traj.min_eigenvalue.min(min);
            if min < opts.positivity_floor {
                return Err(Error::InvariantViolation(format!(
                    "minimum eigenvalue {min:e} at t = {t:e} s"
                )));
            }
        }
        traj.states.push(state);
        Ok(())
    };
    record(&mut traj, &rho, times[0])?;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let substeps = if h_target.is_finite() {
            // Guard against 10.000000001 → 11 from rounding of exact multiples.
            ((dt / h_target) * (1.0 - 1e-12)).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = dt / substeps as f64;
        traj.step = traj.step.max(h);
        for _ in 0..substeps {
            rho = rk4_step(spec, &rho, h);
        }
        record(&mut traj, &rho, w[1])?;
    }
    Ok(traj)
}
