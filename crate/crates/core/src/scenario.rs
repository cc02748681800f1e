//! Scenario files: parsing, validation, execution and table emission.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "name": "fig1",
//!   "params": { "n_atoms": 3, "coupling": 1e5, "cavity_rate": 1e4,
//!               "atomic_rate": 1e3, "cavity_freq": 1e14, "atomic_freq": 1e14 },
//!   "geometry": "point_like",
//!   "time": { "t_max_tau": 20, "n_points": 4001 },
//!   "engine": "both",
//!   "outputs": ["concurrence_pair", "survival", "dicke_report"]
//! }
//! ```
//!
//! `geometry` is `"point_like"`, `{"positions": [...], "dipole_direction": [...]}`
//! or `{"chain": {"x_spacing": x, "axis": [...]}}`. `time` takes exactly one of
//! `t_max` (seconds) and `t_max_tau` (multiples of `τ_AC`), plus `n_points`
//! and an optional `spacing` (`linear` or `log`, with `log_decades`).
//!
//! Every run starts from the equal mixture `(1/N) Σ_h |atom h⟩⟨atom h|`.
//!
//! Output columns, after `time_s`, follow the order of `outputs`:
//!
//! - `rho_elements`: rotated-frame elements `rt_vac`, `rt_bright`, `rt_dark`
//!   (first dark atom, `0` for `N = 1`), `rt_photon`, and the bright/photon
//!   coherence as `rt_bright_photon_re`, `rt_bright_photon_im`;
//! - `concurrence_pair`: `c_pair`, the conditional concurrence of atoms 1, 2;
//! - `concurrence_total`: `c_bt`, summed over all pairs;
//! - `survival`: `survival`, `1 − ⟨vac|ρ|vac⟩`;
//! - `dicke_report`: no column; a JSON report of the final state.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_coefficients, state_from_coefficients, AnalyticState};
use crate::concurrence::{
    conditional_pair_concurrence, conditioned_wootters, pair_reduced_density,
    total_binary_concurrence_closed, wootters_concurrence,
};
use crate::dicke::{analyze_asymptotic, conditioned_state, DickeReport};
use crate::error::{ConfigIssue, Error, Result};
use crate::lindblad::{propagate, GeneratorSpec, PropagateOptions};
use crate::model::{build_kernel, AtomGeometry, Geometry, SystemParams};
use crate::space::{self, DensityMatrix};
use crate::transform::{back_transform, build_u, TransformU};

/// Most negative eigenvalue accepted in any emitted state.
pub const POSITIVITY_FLOOR: f64 = -1e-9;
/// Largest `|tr ρ − 1|` accepted in any emitted state.
pub const TRACE_TOLERANCE: f64 = 1e-9;

const BUNDLED: &[(&str, &str)] = &[
    ("fig1", include_str!("../scenarios/fig1.json")),
    ("fig2", include_str!("../scenarios/fig2.json")),
    ("fig3", include_str!("../scenarios/fig3.json")),
    ("fig4", include_str!("../scenarios/fig4.json")),
    ("fig5", include_str!("../scenarios/fig5.json")),
    ("fig6", include_str!("../scenarios/fig6.json")),
    ("distant", include_str!("../scenarios/distant.json")),
    ("single-channel-k", include_str!("../scenarios/single-channel-k.json")),
    ("single-channel-gamma", include_str!("../scenarios/single-channel-gamma.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Ode,
    Both,
}

impl Engine {
    fn uses_analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    fn uses_ode(self) -> bool {
        matches!(self, Engine::Ode | Engine::Both)
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "ode" => Ok(Engine::Ode),
            "both" => Ok(Engine::Both),
            other => Err(Error::InvalidArgument(format!(
                "unknown engine {other:?} (expected analytic, ode or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    RhoElements,
    ConcurrencePair,
    ConcurrenceTotal,
    Survival,
    DickeReport,
}

impl Output {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Output::RhoElements => &[
                "rt_vac",
                "rt_bright",
                "rt_dark",
                "rt_photon",
                "rt_bright_photon_re",
                "rt_bright_photon_im",
            ],
            Output::ConcurrencePair => &["c_pair"],
            Output::ConcurrenceTotal => &["c_bt"],
            Output::Survival => &["survival"],
            Output::DickeReport => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_tau: Option<f64>,
    pub n_points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Decades spanned by a log grid ending at `t_max`.
    #[serde(default = "default_log_decades")]
    pub log_decades: f64,
}

fn default_log_decades() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    /// Neighbour separation in units of `c/ω₀`.
    pub x_spacing: f64,
    /// Chain axis; the dipole points along it.
    pub axis: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometryConfig {
    Named(String),
    Chain { chain: ChainConfig },
    Explicit(AtomGeometry),
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig::Named("point_like".into())
    }
}

impl GeometryConfig {
    fn is_point_like(&self) -> bool {
        matches!(self, GeometryConfig::Named(s) if s == "point_like")
    }

    fn resolve(&self, params: &SystemParams) -> Result<Geometry> {
        match self {
            GeometryConfig::Named(s) if s == "point_like" => Ok(Geometry::PointLike),
            GeometryConfig::Named(s) => Err(Error::InvalidArgument(format!("unknown geometry {s:?}"))),
            GeometryConfig::Chain { chain } => Ok(Geometry::Explicit(AtomGeometry::chain(
                params.n_atoms,
                chain.x_spacing,
                params.atomic_freq,
                chain.axis,
            )?)),
            GeometryConfig::Explicit(g) => Ok(Geometry::Explicit(g.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub params: SystemParams,
    #[serde(default)]
    pub geometry: GeometryConfig,
    pub time: TimeConfig,
    pub engine: Engine,
    pub outputs: Vec<Output>,
    /// Fixed RK4 step in seconds; default is chosen from the generator norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode_step: Option<f64>,
}

fn issue(field: impl Into<String>, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue {
        field: field.into(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    /// Parses and validates a JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::Config(vec![issue(format!("{}:{}", e.line(), e.column()), e.to_string())])
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// A bundled scenario by name.
    pub fn bundled(name: &str) -> Option<Self> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_json_str(text).expect("bundled scenario is valid"))
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Every violation, each tagged with its field path.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            out.push(issue("name", "must be non-empty and use only [A-Za-z0-9_-]"));
        }
        for (field, msg) in self.params.issues() {
            out.push(issue(format!("params.{field}"), msg));
        }
        let n = self.params.n_atoms;

        match &self.geometry {
            GeometryConfig::Named(s) if s != "point_like" => {
                out.push(issue("geometry", format!("unknown geometry {s:?} (expected \"point_like\")")));
            }
            GeometryConfig::Named(_) => {}
            GeometryConfig::Chain { chain } => {
                if !(chain.x_spacing.is_finite() && chain.x_spacing > 0.0) {
                    out.push(issue("geometry.chain.x_spacing", "must be finite and > 0"));
                }
                if chain.axis.iter().any(|c| !c.is_finite()) || chain.axis.iter().all(|&c| c == 0.0) {
                    out.push(issue("geometry.chain.axis", "must be a finite nonzero vector"));
                }
            }
            GeometryConfig::Explicit(g) => {
                for msg in g.issues() {
                    out.push(issue("geometry", msg));
                }
                if g.n_atoms() != n {
                    out.push(issue(
                        "geometry.positions",
                        format!("has {} atoms but params.n_atoms is {n}", g.n_atoms()),
                    ));
                }
                for i in 0..g.positions.len() {
                    for j in i + 1..g.positions.len() {
                        if g.positions[i] == g.positions[j] {
                            out.push(issue(
                                format!("geometry.positions[{j}]"),
                                format!("coincides with atom {i}"),
                            ));
                        }
                    }
                }
            }
        }

        let t = &self.time;
        match (t.t_max, t.t_max_tau) {
            (Some(_), Some(_)) | (None, None) => {
                out.push(issue("time", "exactly one of t_max and t_max_tau is required"));
            }
            (Some(v), None) if !(v.is_finite() && v > 0.0) => {
                out.push(issue("time.t_max", "must be finite and > 0"));
            }
            (None, Some(v)) => {
                if !(v.is_finite() && v > 0.0) {
                    out.push(issue("time.t_max_tau", "must be finite and > 0"));
                }
                if !(self.params.total_rate() > 0.0) {
                    out.push(issue("time.t_max_tau", "needs k + NΓ > 0"));
                }
            }
            _ => {}
        }
        if t.n_points < 2 {
            out.push(issue("time.n_points", "must be at least 2"));
        }
        if t.spacing == Spacing::Log && !(t.log_decades.is_finite() && t.log_decades > 0.0) {
            out.push(issue("time.log_decades", "must be finite and > 0"));
        }

        if self.engine.uses_analytic() && !self.geometry.is_point_like() {
            out.push(issue(
                "engine",
                "the analytic solution requires point_like geometry; use engine \"ode\"",
            ));
        }

        if self.outputs.is_empty() {
            out.push(issue("outputs", "must list at least one output"));
        }
        let mut seen = HashSet::new();
        for (k, o) in self.outputs.iter().enumerate() {
            if !seen.insert(*o) {
                out.push(issue(format!("outputs[{k}]"), "duplicate output"));
            }
            let needs_pair = matches!(
                o,
                Output::ConcurrencePair | Output::ConcurrenceTotal | Output::DickeReport
            );
            if needs_pair && n < 2 {
                out.push(issue(format!("outputs[{k}]"), "needs at least two atoms"));
            }
        }

        if let Some(h) = self.ode_step {
            if !(h.is_finite() && h > 0.0) {
                out.push(issue("ode_step", "must be finite and > 0"));
            }
        }
        out
    }

    /// End of the time grid in seconds.
    pub fn t_max(&self) -> f64 {
        match (self.time.t_max, self.time.t_max_tau) {
            (Some(t), _) => t,
            (None, Some(m)) => m * self.params.tau_ac(),
            (None, None) => f64::NAN,
        }
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.time.n_points;
        let t_max = self.t_max();
        let last = (n - 1) as f64;
        match self.time.spacing {
            Spacing::Linear => (0..n).map(|i| t_max * i as f64 / last).collect(),
            Spacing::Log => (0..n)
                .map(|i| t_max * 10f64.powf(-self.time.log_decades * (1.0 - i as f64 / last)))
                .collect(),
        }
    }

    fn column_names(&self) -> Vec<&'static str> {
        let mut cols = vec!["time_s"];
        for o in &self.outputs {
            cols.extend_from_slice(o.columns());
        }
        cols
    }
}

/// Names of the bundled scenarios.
pub fn list_scenarios() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Raw JSON of a bundled scenario.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Reads and validates a configuration file, returning all violations.
pub fn validate(path: &Path) -> Result<Vec<ConfigIssue>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    match ScenarioConfig::from_json_str(&text) {
        Ok(_) => Ok(Vec::new()),
        Err(Error::Config(issues)) => Ok(issues),
        Err(e) => Err(e),
    }
}

/// A numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(file_name: String, columns: &[&str]) -> Self {
        Self {
            file_name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// CSV text: header, then one row per time, `{:.16e}` floats, `\n` endings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}")))
                .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("ASCII output")
    }
}

/// Everything produced by one scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub name: String,
    /// Main table; analytic values when both engines ran.
    pub table: Table,
    /// ODE table when both engines ran.
    pub ode_table: Option<Table>,
    /// `time_s, max_abs_dev` between the two engines' rotated-frame states.
    pub comparison: Option<Table>,
    pub dicke: Option<DickeReport>,
    /// Original-frame state at the last time point of the main run.
    pub final_state: DensityMatrix,
    /// Most negative eigenvalue over every emitted state of every engine.
    pub min_eigenvalue: f64,
    /// Largest `|tr ρ − 1|` over every emitted state of every engine.
    pub max_trace_drift: f64,
}

impl ScenarioOutput {
    pub fn tables(&self) -> Vec<&Table> {
        std::iter::once(&self.table)
            .chain(self.ode_table.as_ref())
            .chain(self.comparison.as_ref())
            .collect()
    }

    /// Writes all tables and the Dicke report into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let p = path.display().to_string();
            move |source| Error::Io { path: p, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for t in self.tables() {
            let path = dir.join(&t.file_name);
            std::fs::write(&path, t.to_csv()).map_err(io(&path))?;
            written.push(path);
        }
        if let Some(rep) = &self.dicke {
            let path = dir.join(format!("{}_dicke.json", self.name));
            let mut text = serde_json::to_string_pretty(rep).expect("report serialises");
            text.push('\n');
            std::fs::write(&path, text).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// One state per time point plus what is needed to fill the columns.
struct EngineRun {
    /// Rotated-frame states.
    rotated: Vec<DensityMatrix>,
    /// Original-frame states (ODE runs only).
    original: Option<Vec<DensityMatrix>>,
    /// Closed-form values (analytic runs only).
    analytic: Option<Vec<AnalyticState>>,
    final_original: DensityMatrix,
    min_eigenvalue: f64,
    max_trace_drift: f64,
}

/// Checks trace and positivity and returns `(trace drift, min eigenvalue)`.
fn check_invariants(trace: Complex64, min: f64, t: f64) -> Result<(f64, f64)> {
    let drift = (trace - Complex64::new(1.0, 0.0)).norm();
    if drift > TRACE_TOLERANCE {
        return Err(Error::InvariantViolation(format!("trace drift {drift:e} at t = {t:e} s")));
    }
    if min < POSITIVITY_FLOOR {
        return Err(Error::InvariantViolation(format!("minimum eigenvalue {min:e} at t = {t:e} s")));
    }
    Ok((drift, min))
}

fn run_analytic(params: &SystemParams, times: &[f64], u: &TransformU) -> Result<EngineRun> {
    let co = analytic_coefficients(params);
    let mut rotated = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    let (mut min_eigenvalue, mut max_trace_drift) = (f64::INFINITY, 0.0f64);
    for &t in times {
        let st = state_from_coefficients(&co, t);
        let rt = st.to_density_matrix();
        // U is unitary, so both frames share trace and spectrum.
        let (drift, min) = check_invariants(rt.trace(), st.min_eigenvalue(), t)?;
        max_trace_drift = max_trace_drift.max(drift);
        min_eigenvalue = min_eigenvalue.min(min);
        rotated.push(rt);
        states.push(st);
    }
    let final_original = back_transform(rotated.last().expect("non-empty grid"), u)?;
    Ok(EngineRun {
        rotated,
        original: None,
        analytic: Some(states),
        final_original,
        min_eigenvalue,
        max_trace_drift,
    })
}

fn run_ode(cfg: &ScenarioConfig, times: &[f64], u: &TransformU) -> Result<EngineRun> {
    let params = &cfg.params;
    let geometry = cfg.geometry.resolve(params)?;
    let kernel = build_kernel(params, &geometry)?;
    let spec = GeneratorSpec::from_params(params, &kernel)?;
    let opts = PropagateOptions {
        step: cfg.ode_step,
        positivity_floor: POSITIVITY_FLOOR,
        trace_tolerance: TRACE_TOLERANCE,
        check_positivity: true,
        ..PropagateOptions::default()
    };
    let rho0 = DensityMatrix::uniform_atomic_mixture(params.n_atoms);
    let prepend = times[0] > 0.0;
    let grid: Vec<f64> = if prepend {
        std::iter::once(0.0).chain(times.iter().copied()).collect()
    } else {
        times.to_vec()
    };
    let traj = propagate(&spec, &rho0, &grid, &opts)?;
    let original: Vec<DensityMatrix> = traj.states.into_iter().skip(usize::from(prepend)).collect();
    let rotated = original.iter().map(|r| u.forward(r)).collect::<Result<_>>()?;
    Ok(EngineRun {
        rotated,
        final_original: original.last().expect("non-empty grid").clone(),
        original: Some(original),
        analytic: None,
        min_eigenvalue: traj.min_eigenvalue,
        max_trace_drift: traj.max_trace_drift,
    })
}

fn fill_table(cfg: &ScenarioConfig, file_name: String, times: &[f64], run: &EngineRun) -> Result<Table> {
    let n = cfg.params.n_atoms;
    let mut table = Table::new(file_name, &cfg.column_names());
    for (k, &t) in times.iter().enumerate() {
        let rt = run.rotated[k].matrix();
        let orig = run.original.as_ref().map(|o| &o[k]);
        let mut row = vec![t];
        for o in &cfg.outputs {
            match o {
                Output::RhoElements => {
                    let dark = if n >= 2 { rt[(2, 2)].re } else { 0.0 };
                    let coh = rt[(1, n + 1)];
                    row.extend([rt[(0, 0)].re, rt[(1, 1)].re, dark, rt[(n + 1, n + 1)].re, coh.re, coh.im]);
                }
                Output::ConcurrencePair => row.push(match (&run.analytic, orig) {
                    (Some(states), _) => conditional_pair_concurrence(&states[k])?,
                    (None, Some(orig)) => conditioned_wootters(orig, 0, 1)?,
                    (None, None) => unreachable!("every run keeps one representation"),
                }),
                Output::ConcurrenceTotal => row.push(match (&run.analytic, orig) {
                    (Some(states), _) => total_binary_concurrence_closed(&states[k])?,
                    (None, Some(orig)) => {
                        let cond = conditioned_state(orig)?;
                        let mut total = 0.0;
                        for i in 0..n {
                            for j in i + 1..n {
                                total += wootters_concurrence(&pair_reduced_density(&cond, i, j)?)?;
                            }
                        }
                        total
                    }
                    (None, None) => unreachable!("every run keeps one representation"),
                }),
                // U fixes the vacuum, so the rotated-frame entry is frame independent.
                Output::Survival => row.push(1.0 - rt[(0, 0)].re),
                Output::DickeReport => {}
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Runs a validated scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    run_inner(cfg).map_err(|e| e.in_scenario(&cfg.name))
}

fn run_inner(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let times = cfg.time_grid();
    let u = build_u(cfg.params.n_atoms);
    let analytic = if cfg.engine.uses_analytic() {
        Some(run_analytic(&cfg.params, &times, &u)?)
    } else {
        None
    };
    let ode = if cfg.engine.uses_ode() {
        Some(run_ode(cfg, &times, &u)?)
    } else {
        None
    };

    let main_run = analytic.as_ref().or(ode.as_ref()).expect("at least one engine");
    let runs = || analytic.iter().chain(ode.iter());
    let min_eigenvalue = runs().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min);
    let max_trace_drift = runs().map(|r| r.max_trace_drift).fold(0.0, f64::max);

    let table = fill_table(cfg, format!("{}.csv", cfg.name), &times, main_run)?;
    let (ode_table, comparison) = match (&analytic, &ode) {
        (Some(a), Some(o)) => {
            let ode_table = fill_table(cfg, format!("{}_ode.csv", cfg.name), &times, o)?;
            let mut cmp = Table::new(format!("{}_compare.csv", cfg.name), &["time_s", "max_abs_dev"]);
            for (k, &t) in times.iter().enumerate() {
                let dev = space::max_abs_diff(a.rotated[k].matrix(), o.rotated[k].matrix());
                cmp.rows.push(vec![t, dev]);
            }
            (Some(ode_table), Some(cmp))
        }
        _ => (None, None),
    };

    let dicke = if cfg.outputs.contains(&Output::DickeReport) {
        Some(analyze_asymptotic(&main_run.final_original, cfg.params.n_atoms)?)
    } else {
        None
    };

    Ok(ScenarioOutput {
        name: cfg.name.clone(),
        table,
        ode_table,
        comparison,
        dicke,
        final_state: main_run.final_original.clone(),
        min_eigenvalue,
        max_trace_drift,
    })
}

/// Deterministic `N = 2, 3` operator matrices for external cross-checks,
/// as JSON `{name: [[re, im], ...] row-major}`.
pub fn operator_fixtures(n_atoms: usize) -> Result<String> {
    let params = SystemParams::figure(n_atoms);
    let kernel = build_kernel(&params, &Geometry::PointLike)?;
    let spin = space::collective_spin_ops(n_atoms);
    let mut entries: Vec<(String, crate::CMatrix)> = vec![
        ("u".into(), build_u(n_atoms).matrix().clone()),
        ("s_z".into(), spin.sz),
        ("s_minus".into(), spin.s_minus),
        ("s_squared".into(), spin.s_squared),
        ("photon_annihilation".into(), space::photon_annihilation(n_atoms)),
        ("excitation_number".into(), space::excitation_number(n_atoms)),
        ("hamiltonian_ac_in_frame".into(), space::hamiltonian_ac_in_frame(&params, params.cavity_freq)),
    ];
    for i in 0..n_atoms {
        entries.push((format!("lowering_{i}"), space::lowering_op(i, n_atoms)?));
    }
    let gamma: DMatrix<f64> = kernel.gamma_matrix;
    entries.push(("gamma_matrix".into(), gamma.map(|x| Complex64::new(x, 0.0))));
    let map: serde_json::Map<String, serde_json::Value> = entries
        .into_iter()
        .map(|(k, m)| {
            let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect();
            (k, serde_json::to_value(rows).expect("serialisable"))
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&map).expect("serialisable");
    text.push('\n');
    Ok(text)
}
