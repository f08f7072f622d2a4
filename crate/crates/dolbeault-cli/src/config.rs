//! Experiment configuration: JSON schema, validation, and builders that turn
//! declarative specs into grid-resident fields.

use std::sync::Arc;

use dolbeault::pluri::KahlerPatch;
use dolbeault::sampling::random_beltrami;
use dolbeault::{BeltramiField, FormField, ScalarField, TorusGrid, TorusMap};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Error that should terminate with exit code 2 (invalid configuration).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyOps,
    Extend,
    PqExtend,
    Beltrami,
    PluriCheck,
    Bench,
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Command::VerifyOps => "verify-ops",
            Command::Extend => "extend",
            Command::PqExtend => "pq-extend",
            Command::Beltrami => "beltrami",
            Command::PluriCheck => "pluri-check",
            Command::Bench => "bench",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub points: usize,
}

/// One Fourier mode of a trigonometric polynomial: coefficient (re + i·im)
/// attached to e^{i k·x} with one integer frequency per grid axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    pub modes: Vec<Mode>,
}

impl TrigPoly {
    pub fn empty() -> Self {
        TrigPoly { modes: Vec::new() }
    }
}

/// Deformation-field specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiSpec {
    /// φ = 0.
    Zero,
    /// Constant coefficients, row-major [re, im] pairs, n² entries.
    Constant { entries: Vec<[f64; 2]> },
    /// φ pulled back from the map w = z + perturbation, one trigonometric
    /// polynomial per complex coordinate.
    FromMap { components: Vec<TrigPoly> },
    /// Seeded band-limited random field scaled to the requested sup norm.
    RandomBandLimited { seed: u64, band: i64, amplitude: f64 },
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::Zero
    }
}

/// Constant-coefficient (p, q)-form: one [i-mask, j-mask, re, im] entry per
/// nonzero component (masks are bit sets over the complex coordinates).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FormComponent {
    pub i_mask: u32,
    pub j_mask: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub p: usize,
    pub q: usize,
    pub components: Vec<FormComponent>,
}

/// Kähler-potential specification: ψ = Re Σ c_k e^{i k·x}. Empty modes give
/// the flat patch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub potential: TrigPoly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub grid: GridSpec,
    #[serde(default)]
    pub phi: PhiSpec,
    #[serde(default)]
    pub form: Option<FormSpec>,
    #[serde(default)]
    pub patch: Option<PatchSpec>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_m() -> usize {
    1
}
fn default_tol() -> f64 {
    dolbeault::extension::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    dolbeault::extension::DEFAULT_MAX_ITER
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))
    }

    /// Fills every optional field so the report echo carries no silent
    /// defaults, and validates cross-field consistency.
    pub fn resolved(mut self) -> Result<Self, ConfigError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return cfg_err(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.max_iter == 0 {
            return cfg_err("max-iter must be positive");
        }
        if self.m == 0 {
            return cfg_err("the canonical power m must be ≥ 1");
        }
        let n = self.grid.n;
        if self.form.is_none() {
            self.form = Some(default_form(n, self.command)?);
        }
        if self.patch.is_none() {
            self.patch = Some(PatchSpec { potential: TrigPoly::empty() });
        }
        if self.command == Command::Beltrami && n != 1 {
            return cfg_err("the beltrami command solves on one complex dimension only");
        }
        Ok(self)
    }

    pub fn grid(&self) -> Result<Arc<TorusGrid>, ConfigError> {
        TorusGrid::new(self.grid.n, self.grid.points).map_err(|e| ConfigError(e.to_string()))
    }
}

/// The seed form each command starts from when the config does not override
/// it: the holomorphic volume form for extension-type commands.
fn default_form(n: usize, command: Command) -> Result<FormSpec, ConfigError> {
    let full = (1u32 << n) - 1;
    match command {
        Command::PqExtend => cfg_err("pq-extend requires an explicit form spec"),
        _ => Ok(FormSpec {
            p: n,
            q: 0,
            components: vec![FormComponent { i_mask: full, j_mask: 0, re: 1.0, im: 0.0 }],
        }),
    }
}

/// Samples a trigonometric polynomial pointwise (exact for band-limited
/// synthesis up to rounding).
pub fn build_scalar(
    grid: &Arc<TorusGrid>,
    poly: &TrigPoly,
    real_part: bool,
) -> Result<ScalarField, ConfigError> {
    let axes = grid.axes();
    let cap = grid.max_band();
    for mode in &poly.modes {
        if mode.k.len() != axes {
            return cfg_err(format!(
                "mode frequency {:?} must have {} axes",
                mode.k, axes
            ));
        }
        if mode.k.iter().any(|&f| f.abs() > cap) {
            return cfg_err(format!(
                "mode frequency {:?} exceeds the grid band limit {cap}",
                mode.k
            ));
        }
    }
    let modes: Vec<(Vec<i64>, Complex64)> = poly
        .modes
        .iter()
        .map(|m| (m.k.clone(), Complex64::new(m.re, m.im)))
        .collect();
    let field = ScalarField::from_fn(grid, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &modes {
            let phase: f64 = k.iter().zip(x).map(|(&f, &xi)| f as f64 * xi).sum();
            acc += c * Complex64::new(phase.cos(), phase.sin());
        }
        if real_part {
            Complex64::new(acc.re, 0.0)
        } else {
            acc
        }
    });
    Ok(field)
}

/// The deformation field plus, when it came from a map, the map itself
/// (needed for the log-determinant identity checks).
pub fn build_phi(
    grid: &Arc<TorusGrid>,
    spec: &PhiSpec,
) -> Result<(BeltramiField, Option<TorusMap>), ConfigError> {
    let n = grid.complex_dim();
    match spec {
        PhiSpec::Zero => Ok((BeltramiField::zeros(grid, 1), None)),
        PhiSpec::Constant { entries } => {
            if entries.len() != n * n {
                return cfg_err(format!(
                    "constant phi needs {} entries for n = {n}, got {}",
                    n * n,
                    entries.len()
                ));
            }
            let values: Vec<Complex64> =
                entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let phi = BeltramiField::constant_matrix(grid, &values)
                .map_err(|e| ConfigError(e.to_string()))?;
            Ok((phi, None))
        }
        PhiSpec::FromMap { components } => {
            if components.len() != n {
                return cfg_err(format!(
                    "from-map phi needs {n} perturbation components, got {}",
                    components.len()
                ));
            }
            let pert = components
                .iter()
                .map(|poly| build_scalar(grid, poly, false))
                .collect::<Result<Vec<_>, _>>()?;
            let map = TorusMap::new(grid, pert).map_err(|e| ConfigError(e.to_string()))?;
            let phi = map
                .beltrami(dolbeault::deformation::DEFAULT_JACOBIAN_FLOOR)
                .map_err(|e| ConfigError(e.to_string()))?;
            Ok((phi, Some(map)))
        }
        PhiSpec::RandomBandLimited { seed, band, amplitude } => {
            if *amplitude < 0.0 {
                return cfg_err("random phi amplitude must be non-negative");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((random_beltrami(grid, *band, *amplitude, &mut rng), None))
        }
    }
}

pub fn build_form(grid: &Arc<TorusGrid>, spec: &FormSpec) -> Result<FormField, ConfigError> {
    let n = grid.complex_dim();
    if spec.p > n || spec.q > n {
        return cfg_err(format!("bidegree ({}, {}) exceeds n = {n}", spec.p, spec.q));
    }
    let mut form = FormField::zeros(grid, spec.p, spec.q);
    for comp in &spec.components {
        if comp.i_mask >= (1 << n)
            || comp.j_mask >= (1 << n)
            || comp.i_mask.count_ones() as usize != spec.p
            || comp.j_mask.count_ones() as usize != spec.q
        {
            return cfg_err(format!(
                "component masks ({:#b}, {:#b}) do not match bidegree ({}, {})",
                comp.i_mask, comp.j_mask, spec.p, spec.q
            ));
        }
        form.set_component(
            comp.i_mask,
            comp.j_mask,
            ScalarField::constant(grid, Complex64::new(comp.re, comp.im)),
        );
    }
    Ok(form)
}

/// Builds the metric patch and enforces the positivity-margin guard: weakly
/// positive patches (margin ≤ 0.1) are rejected as configuration errors
/// before any solver runs on them.
pub fn build_patch(grid: &Arc<TorusGrid>, spec: &PatchSpec) -> Result<KahlerPatch, ConfigError> {
    if spec.potential.modes.is_empty() {
        return Ok(KahlerPatch::flat(grid));
    }
    let psi = build_scalar(grid, &spec.potential, true)?;
    let patch = KahlerPatch::from_potential(grid, &psi).map_err(|e| ConfigError(e.to_string()))?;
    if patch.margin() <= 0.1 {
        return cfg_err(format!(
            "patch positivity margin {:.3} is below the 0.1 guard",
            patch.margin()
        ));
    }
    Ok(patch)
}
