//! Physical parameters, atom placement and the collective decay kernels.
//!
//! The atomic bath is common to all atoms. Its spectral correlation tensor
//! `Γ_ij` and the bath-induced dipole shifts `Ω_ij` depend only on the
//! separation `r_ij` and on the angle between the transition dipole and
//! `r_ij`, through the dimensionless argument `x = ω₀ r_ij / c`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Below this argument the near-field bracket is evaluated by its Taylor
/// series; the closed form cancels two `1/x²` terms.
const NEAR_FIELD_SERIES_CUTOFF: f64 = 1e-2;

/// Physical constants of one run. Frequencies in rad/s, rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Number of atoms `N`.
    pub n_atoms: usize,
    /// Atom-cavity coupling `ε`.
    pub coupling: f64,
    /// Cavity loss rate `k`.
    pub cavity_rate: f64,
    /// Single-atom spontaneous emission rate `Γ`.
    pub atomic_rate: f64,
    /// Cavity mode frequency `ω`.
    pub cavity_freq: f64,
    /// Atomic transition frequency `ω₀`.
    pub atomic_freq: f64,
    /// Point-like limit `Ω_L` of the bath-induced dipole shift.
    #[serde(default)]
    pub lamb_shift: f64,
}

impl SystemParams {
    /// Validated constructor with `Ω_L = 0`.
    pub fn new(
        n_atoms: usize,
        coupling: f64,
        cavity_rate: f64,
        atomic_rate: f64,
        cavity_freq: f64,
        atomic_freq: f64,
    ) -> Result<Self> {
        let p = Self {
            n_atoms,
            coupling,
            cavity_rate,
            atomic_rate,
            cavity_freq,
            atomic_freq,
            lamb_shift: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Reference parameter set used by the bundled scenarios:
    /// `ε = 1e5`, `k = 1e4`, `Γ = 1e3`, `ω = ω₀ = 1e14`.
    pub fn figure(n_atoms: usize) -> Self {
        Self {
            n_atoms,
            coupling: 1e5,
            cavity_rate: 1e4,
            atomic_rate: 1e3,
            cavity_freq: 1e14,
            atomic_freq: 1e14,
            lamb_shift: 0.0,
        }
    }

    pub fn with_lamb_shift(mut self, lamb_shift: f64) -> Self {
        self.lamb_shift = lamb_shift;
        self
    }

    /// Every violated invariant as `(field, message)`.
    pub fn issues(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.n_atoms < 1 {
            out.push(("n_atoms", "must be at least 1".to_string()));
        }
        let nonneg = [
            ("coupling", self.coupling),
            ("cavity_rate", self.cavity_rate),
            ("atomic_rate", self.atomic_rate),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                out.push((name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("cavity_freq", self.cavity_freq), ("atomic_freq", self.atomic_freq)] {
            if !(v.is_finite() && v > 0.0) {
                out.push((name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !self.lamb_shift.is_finite() {
            out.push(("lamb_shift", "must be finite".to_string()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.issues().first() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::InvalidArgument(format!("{field}: {msg}"))),
        }
    }

    /// Dressed atomic frequency `ω̃₀ = ω₀ + N Ω_L`.
    pub fn omega0_tilde(&self) -> f64 {
        self.atomic_freq + self.n_atoms as f64 * self.lamb_shift
    }

    /// Collective coupling `√N ε` of the bright atomic mode.
    pub fn eps_eff(&self) -> f64 {
        (self.n_atoms as f64).sqrt() * self.coupling
    }

    /// Total damping rate `k + NΓ`.
    pub fn total_rate(&self) -> f64 {
        self.cavity_rate + self.n_atoms as f64 * self.atomic_rate
    }

    /// Transient time scale `τ_AC = 1 / (k + NΓ)`; infinite for a closed system.
    pub fn tau_ac(&self) -> f64 {
        1.0 / self.total_rate()
    }
}

/// Explicit atom positions with a common transition dipole direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomGeometry {
    /// Atom positions in meters.
    pub positions: Vec<[f64; 3]>,
    /// Unit vector along the transition dipole.
    pub dipole_direction: [f64; 3],
}

impl AtomGeometry {
    pub fn new(positions: Vec<[f64; 3]>, dipole_direction: [f64; 3]) -> Result<Self> {
        let g = Self {
            positions,
            dipole_direction,
        };
        if let Some(msg) = g.issues().into_iter().next() {
            return Err(Error::InvalidArgument(msg));
        }
        Ok(g)
    }

    /// Atoms evenly spaced along `axis`, with the dipole along the same axis.
    ///
    /// `x_spacing` is the dimensionless separation `ω₀ d / c` of neighbours.
    pub fn chain(n_atoms: usize, x_spacing: f64, atomic_freq: f64, axis: [f64; 3]) -> Result<Self> {
        let norm = norm3(axis);
        if norm == 0.0 {
            return Err(Error::InvalidArgument("chain axis must be nonzero".into()));
        }
        let unit = axis.map(|c| c / norm);
        let spacing = x_spacing * SPEED_OF_LIGHT / atomic_freq;
        let positions = (0..n_atoms)
            .map(|i| unit.map(|c| c * spacing * i as f64))
            .collect();
        Self::new(positions, unit)
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub(crate) fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = norm3(self.dipole_direction);
        if (n - 1.0).abs() > 1e-12 {
            out.push(format!("dipole_direction must have unit norm, got {n}"));
        }
        if self
            .positions
            .iter()
            .flatten()
            .chain(self.dipole_direction.iter())
            .any(|c| !c.is_finite())
        {
            out.push("coordinates must be finite".into());
        }
        out
    }

    /// Separation `r_ij` and `d̂·r̂_ij`.
    fn pair(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let n = self.n_atoms();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "kernel requires distinct atoms, got i = j = {i}"
            )));
        }
        let (a, b) = (self.positions[i], self.positions[j]);
        let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let r = norm3(diff);
        let cos = if r > 0.0 {
            dot3(diff, self.dipole_direction) / r
        } else {
            0.0
        };
        Ok((r, cos))
    }
}

/// Where the atoms sit: everything within `r ≪ c/ω₀`, or explicit positions.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    PointLike,
    Explicit(AtomGeometry),
}

/// Collective decay matrix `Γ_ij` and dipole shift matrix `Ω_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationKernel {
    pub gamma_matrix: DMatrix<f64>,
    pub shift_matrix: DMatrix<f64>,
}

impl DissipationKernel {
    pub fn n_atoms(&self) -> usize {
        self.gamma_matrix.nrows()
    }

    /// Smallest eigenvalue of the decay matrix.
    pub fn min_gamma_eigenvalue(&self) -> f64 {
        self.gamma_matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Near-field bracket `cos x / x² − sin x / x³`.
fn near_field_decay(x: f64) -> f64 {
    if x < NEAR_FIELD_SERIES_CUTOFF {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45_360.0
    } else {
        x.cos() / (x * x) - x.sin() / (x * x * x)
    }
}

/// Normalised collective decay `f_ij`, so that `Γ_ij = Γ f_ij` for `i ≠ j`.
///
/// Tends to 1 as the atoms approach each other and to 0 as they separate.
pub fn dissipation_kernel_f(geometry: &AtomGeometry, atomic_freq: f64, i: usize, j: usize) -> Result<f64> {
    let (r, cos) = geometry.pair(i, j)?;
    if r == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "atoms {i} and {j} coincide; use the point-like geometry instead"
        )));
    }
    let x = atomic_freq * r / SPEED_OF_LIGHT;
    let c2 = cos * cos;
    Ok(1.5 * ((1.0 - c2) * x.sin() / x + (1.0 - 3.0 * c2) * near_field_decay(x)))
}

/// Bath-induced dipole-dipole shift `Ω_ij` (rad/s) for `i ≠ j`.
///
/// Diverges as `r⁻³`; coincident atoms are rejected.
pub fn dipole_shift_omega(
    geometry: &AtomGeometry,
    atomic_freq: f64,
    atomic_rate: f64,
    i: usize,
    j: usize,
) -> Result<f64> {
    let (r, cos) = geometry.pair(i, j)?;
    if r == 0.0 {
        return Err(Error::SingularKernel { i, j });
    }
    let x = atomic_freq * r / SPEED_OF_LIGHT;
    let c2 = cos * cos;
    let far = (c2 - 1.0) * x.cos() / x;
    let near = (1.0 - 3.0 * c2) * (x.sin() / (x * x) + x.cos() / (x * x * x));
    Ok(0.75 * atomic_rate * (far + near))
}

/// Builds `Γ_ij` and `Ω_ij` for the given geometry.
///
/// In the point-like limit every entry of both matrices, diagonal included,
/// takes its common limiting value (`Γ` and `Ω_L`), so the shift Hamiltonian
/// is `Ω_L S₊S₋`. For explicit geometries the diagonal of `Ω_ij` is zero: the
/// single-atom self shift is part of `ω₀`.
pub fn build_kernel(params: &SystemParams, geometry: &Geometry) -> Result<DissipationKernel> {
    params.validate()?;
    let n = params.n_atoms;
    match geometry {
        Geometry::PointLike => Ok(DissipationKernel {
            gamma_matrix: DMatrix::from_element(n, n, params.atomic_rate),
            shift_matrix: DMatrix::from_element(n, n, params.lamb_shift),
        }),
        Geometry::Explicit(geom) => {
            if geom.n_atoms() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: geom.n_atoms(),
                });
            }
            if let Some(msg) = geom.issues().into_iter().next() {
                return Err(Error::InvalidArgument(msg));
            }
            let mut gamma = DMatrix::from_element(n, n, 0.0);
            let mut shift = DMatrix::from_element(n, n, 0.0);
            for i in 0..n {
                gamma[(i, i)] = params.atomic_rate;
                for j in (i + 1)..n {
                    let g = params.atomic_rate * dissipation_kernel_f(geom, params.atomic_freq, i, j)?;
                    let s = dipole_shift_omega(geom, params.atomic_freq, params.atomic_rate, i, j)?;
                    gamma[(i, j)] = g;
                    gamma[(j, i)] = g;
                    shift[(i, j)] = s;
                    shift[(j, i)] = s;
                }
            }
            Ok(DissipationKernel {
                gamma_matrix: gamma,
                shift_matrix: shift,
            })
        }
    }
}

/// Single-atom emission rate from the transition dipole, `4π ħ ω₀³ |d|² / (3c³)`,
/// in SI constants exactly as written.
pub fn gamma_from_dipole(atomic_freq: f64, dipole_norm: f64) -> f64 {
    4.0 * std::f64::consts::PI * HBAR * atomic_freq.powi(3) * dipole_norm * dipole_norm
        / (3.0 * SPEED_OF_LIGHT.powi(3))
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
