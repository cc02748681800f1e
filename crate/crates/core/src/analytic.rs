//! Closed-form rotated-frame solution for the equal mixture of single-atom
//! excitations, and its asymptotic limit.
//!
//! In the rotated frame only atom 1 and the cavity form a damped
//! Jaynes-Cummings pair. With `Δ = ω̃₀ − ω + iA₋`, `A₋ = k − NΓ` and
//! `a + ib = √(Δ² + 4ε_eff²)` (principal branch), the nonzero elements are
//!
//! ```text
//! ρ̃₂₂     = e^{−(k+NΓ)t} / (2N(a²+b²)) · [ (a²+b²+|Δ|²) cosh bt + (a²+b²−|Δ|²) cos at
//!                                      − 2(b(ω̃₀−ω) − aA₋) sin at + 2(a(ω̃₀−ω) + bA₋) sinh bt ]
//! ρ̃₂,N+2  = ε_eff e^{−(k+NΓ)t} / (N(a²+b²)) · [ (a+ib)(i sin at + sinh bt) + Δ(cosh bt − cos at) ]
//! ρ̃N+2,N+2 = 2ε_eff² e^{−(k+NΓ)t} / (N(a²+b²)) · [ cosh bt − cos at ]
//! ```
//!
//! The dark atoms keep `ρ̃_hh = 1/N` and the vacuum completes the trace.
//! `b` is signed: the odd terms above require `a + ib` to be an actual square
//! root, so `b` carries the sign of `(ω̃₀ − ω) A₋`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::space::{self, DensityMatrix};
use crate::transform::{back_transform, build_u};
use crate::{CMatrix, CVector};

/// Time-independent quantities entering the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCoefficients {
    pub n_atoms: usize,
    /// `√N ε` (rad/s).
    pub eps_eff: f64,
    /// `A₋ = k − NΓ` (1/s).
    pub a_minus: f64,
    /// `ω̃₀ = ω₀ + NΩ_L` (rad/s).
    pub omega0_tilde: f64,
    /// `ω̃₀ − ω` (rad/s), formed from the inputs directly.
    pub detuning: f64,
    /// `Δ = ω̃₀ − ω + iA₋`.
    pub delta_c: Complex64,
    /// `Re √(Δ² + 4ε_eff²)`, always `≥ 0`.
    pub a: f64,
    /// `Im √(Δ² + 4ε_eff²)`; `≥ 0` whenever `a = 0`.
    pub b: f64,
    /// `k + NΓ` (1/s).
    pub total_rate: f64,
    /// `1 / (k + NΓ)` (s).
    pub tau_ac: f64,
}

impl AnalyticCoefficients {
    /// `a + ib`.
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }
}

pub fn analytic_coefficients(params: &SystemParams) -> AnalyticCoefficients {
    let n = params.n_atoms as f64;
    let eps_eff = params.eps_eff();
    let a_minus = params.cavity_rate - n * params.atomic_rate;
    let omega0_tilde = params.omega0_tilde();
    // (ω₀ − ω) + NΩ_L keeps precision when both frequencies are optical.
    let detuning = (params.atomic_freq - params.cavity_freq) + n * params.lamb_shift;
    let delta_c = Complex64::new(detuning, a_minus);
    let z = delta_c * delta_c + Complex64::new(4.0 * eps_eff * eps_eff, 0.0);
    let root = z.sqrt();
    let (a, b) = if root.re == 0.0 { (0.0, root.im.abs()) } else { (root.re, root.im) };
    let total_rate = params.total_rate();
    AnalyticCoefficients {
        n_atoms: params.n_atoms,
        eps_eff,
        a_minus,
        omega0_tilde,
        detuning,
        delta_c,
        a,
        b,
        total_rate,
        tau_ac: 1.0 / total_rate,
    }
}

/// Nonzero elements of the rotated-frame density matrix at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticState {
    pub n_atoms: usize,
    pub time: f64,
    /// Vacuum population `ρ̃₁₁`.
    pub rho11: f64,
    /// Population of each dark atom `ρ̃_hh`, `h = 3..N+1` (`1/N`).
    pub rho_hh: f64,
    /// Bright-atom population `ρ̃₂₂`.
    pub rho22: f64,
    /// Bright-atom / photon coherence `ρ̃₂,N+2`.
    pub rho_2_n2: Complex64,
    /// Photon population `ρ̃N+2,N+2`.
    pub rho_n2_n2: f64,
}

impl AnalyticState {
    /// Probability that the excitation is still stored: `Σ_{i≥2} ρ̃_ii`.
    pub fn survival(&self) -> f64 {
        self.rho22 + (self.n_atoms as f64 - 1.0) * self.rho_hh + self.rho_n2_n2
    }

    /// Full `(N+2) × (N+2)` rotated-frame matrix.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let n = self.n_atoms;
        let d = space::dim(n);
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = Complex64::new(self.rho11, 0.0);
        m[(1, 1)] = Complex64::new(self.rho22, 0.0);
        for h in 2..=n {
            m[(h, h)] = Complex64::new(self.rho_hh, 0.0);
        }
        m[(1, n + 1)] = self.rho_2_n2;
        m[(n + 1, 1)] = self.rho_2_n2.conj();
        m[(n + 1, n + 1)] = Complex64::new(self.rho_n2_n2, 0.0);
        DensityMatrix::new_unchecked(m)
    }

    /// Smallest eigenvalue, from the block structure (vacuum, dark atoms, and
    /// the bright-atom / photon 2×2 block).
    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.rho22 + self.rho_n2_n2);
        let half_gap = (0.25 * (self.rho22 - self.rho_n2_n2).powi(2) + self.rho_2_n2.norm_sqr()).sqrt();
        let mut min = self.rho11.min(mean - half_gap);
        if self.n_atoms >= 2 {
            min = min.min(self.rho_hh);
        }
        min
    }
}

/// Evaluates the closed-form solution at `t ≥ 0`.
pub fn analytic_state(params: &SystemParams, t: f64) -> Result<AnalyticState> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    let co = analytic_coefficients(params);
    Ok(state_from_coefficients(&co, t))
}

/// Closed form at `t` for precomputed coefficients.
pub fn state_from_coefficients(co: &AnalyticCoefficients, t: f64) -> AnalyticState {
    let n = co.n_atoms as f64;
    let gamma = co.total_rate;
    let (a, b) = (co.a, co.b);
    let s = a * a + b * b;
    let i = Complex64::new(0.0, 1.0);
    let damp = (-gamma * t).exp();

    let (rho22, rho_2_n2, rho_n2_n2) = if t == 0.0 {
        (1.0 / n, Complex64::new(0.0, 0.0), 0.0)
    } else if s > 1e-24 * scale_sq(co) {
        // e^{−γt} cosh(bt) etc., with the exponentials merged so that large
        // times give 0 rather than ∞·0.
        let up = ((b - gamma) * t).exp();
        let down = (-(b + gamma) * t).exp();
        let ch = 0.5 * (up + down);
        let sh = 0.5 * (up - down);
        let (sin_at, cos_at) = (a * t).sin_cos();
        let cs = damp * cos_at;
        let sn = damp * sin_at;
        let d2 = co.delta_c.norm_sqr();
        let (det, am) = (co.detuning, co.a_minus);

        let r22 = ((s + d2) * ch + (s - d2) * cs - 2.0 * (b * det - a * am) * sn
            + 2.0 * (a * det + b * am) * sh)
            / (2.0 * n * s);
        let r2p = (co.omega() * (i * sn + sh) + co.delta_c * (ch - cs)) * (co.eps_eff / (n * s));
        let rpp = 2.0 * co.eps_eff * co.eps_eff / (n * s) * (ch - cs);
        (r22, r2p, rpp)
    } else {
        // Critical damping, a + ib = 0: the bright amplitude is
        // e^{−γt/2}(1 − iΔt/2) and the photon amplitude −i ε_eff t e^{−γt/2}.
        let atom = Complex64::new(1.0, 0.0) - i * co.delta_c * (t / 2.0);
        let photon = -i * (co.eps_eff * t);
        let r22 = damp * atom.norm_sqr() / n;
        let r2p = atom * photon.conj() * (damp / n);
        let rpp = damp * photon.norm_sqr() / n;
        (r22, r2p, rpp)
    };

    let rho_hh = 1.0 / n;
    let rho11 = 1.0 - (rho22 + (n - 1.0) * rho_hh + rho_n2_n2);
    AnalyticState {
        n_atoms: co.n_atoms,
        time: t,
        rho11,
        rho_hh,
        rho22,
        rho_2_n2,
        rho_n2_n2,
    }
}

fn scale_sq(co: &AnalyticCoefficients) -> f64 {
    co.detuning * co.detuning + co.a_minus * co.a_minus + 4.0 * co.eps_eff * co.eps_eff
}

/// Rotated-frame limit `t ≫ τ_AC`: `diag(1/N, 0, 1/N, …, 1/N, 0)`.
pub fn asymptotic_state(n_atoms: usize) -> DensityMatrix {
    let d = space::dim(n_atoms);
    let w = 1.0 / n_atoms as f64;
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = Complex64::new(w, 0.0);
    for h in 2..=n_atoms {
        m[(h, h)] = Complex64::new(w, 0.0);
    }
    DensityMatrix::new_unchecked(m)
}

/// The subradiant states `|ψ_T⁽ʰ⁾⟩ ∝ (N−1)|atom h⟩ − Σ_{j≠h} |atom j⟩`, one per
/// atom, each normalised. They sum to zero, so they span only `N − 1`
/// dimensions. Empty for `N = 1`.
pub fn trapped_states(n_atoms: usize) -> Vec<CVector> {
    if n_atoms < 2 {
        return Vec::new();
    }
    let nf = n_atoms as f64;
    let norm = 1.0 / (nf * (nf - 1.0)).sqrt();
    (0..n_atoms)
        .map(|h| {
            let mut v = CVector::zeros(space::dim(n_atoms));
            for j in 0..n_atoms {
                let amp = if j == h { nf - 1.0 } else { -1.0 };
                v[j + 1] = Complex64::new(amp * norm, 0.0);
            }
            v
        })
        .collect()
}

/// `ρ_mix = (1/N) Σ_h |ψ_T⁽ʰ⁾⟩⟨ψ_T⁽ʰ⁾|`, the normalised trapped mixture.
pub fn rho_mix(n_atoms: usize) -> Result<DensityMatrix> {
    if n_atoms < 2 {
        return Err(Error::InvalidArgument("trapped states need at least two atoms".into()));
    }
    let d = space::dim(n_atoms);
    let w = Complex64::new(1.0 / n_atoms as f64, 0.0);
    let m = trapped_states(n_atoms)
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, v| acc + v * v.adjoint() * w);
    Ok(DensityMatrix::new_unchecked(m))
}

/// Original-frame stationary state `(1/N)|vac⟩⟨vac| + ((N−1)/N) ρ_mix`, built
/// from the trapped states (not from `U`).
pub fn stationary_state(n_atoms: usize) -> Result<DensityMatrix> {
    let nf = n_atoms as f64;
    let mix = rho_mix(n_atoms)?;
    let mut m = mix.into_matrix() * Complex64::new((nf - 1.0) / nf, 0.0);
    m[(0, 0)] += Complex64::new(1.0 / nf, 0.0);
    Ok(DensityMatrix::new_unchecked(m))
}

/// Original-frame analytic state `U ρ̃(t) U†`.
pub fn analytic_state_original(params: &SystemParams, t: f64) -> Result<DensityMatrix> {
    let st = analytic_state(params, t)?;
    back_transform(&st.to_density_matrix(), &build_u(params.n_atoms))
}

/// First time `20 τ_AC · 2^m` at which `max|ρ̃(t) − ρ̃(t/2)| ≤ 1e-8`.
pub fn asymptotic_time(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    let co = analytic_coefficients(params);
    if !(co.total_rate > 0.0) {
        return Err(Error::InvalidArgument(
            "a closed system (k = Γ = 0) has no asymptotic regime".into(),
        ));
    }
    let mut t = 20.0 * co.tau_ac;
    for _ in 0..16 {
        let late = state_from_coefficients(&co, t).to_density_matrix();
        let early = state_from_coefficients(&co, t / 2.0).to_density_matrix();
        if space::max_abs_diff(late.matrix(), early.matrix()) <= 1e-8 {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::NonAsymptotic(format!(
        "no convergence up to t = {t:e} s (b = {:e}, k + NΓ = {:e})",
        co.b, co.total_rate
    )))
}
