//! JSON run configuration. Complex numbers are `[re, im]` pairs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bc_algebra::{normalize_bc, BcError, CanonicalBc, RawBc};
use crate::potential_rep::{Component, PotentialError, PotentialSpec};
use crate::spectral_solver::{PiecewiseFn, SolverError};
use crate::C64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Bc(#[from] BcError),
}

impl From<PotentialError> for ConfigError {
    fn from(e: PotentialError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

impl From<SolverError> for ConfigError {
    fn from(e: SolverError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx(pub [f64; 2]);

impl From<Cx> for C64 {
    fn from(c: Cx) -> Self {
        C64::new(c.0[0], c.0[1])
    }
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum BcConfig {
    /// Rows `[a₁₁, a₁₂, a₁₃, a₁₄]` acting on `(y₁(0), y₁(π), y₂(0), y₂(π))`.
    Raw([[Cx; 4]; 2]),
    Canonical { b: Cx, a: Cx, d: Cx, c: Cx },
}

impl BcConfig {
    pub fn canonical(&self) -> Result<CanonicalBc, BcError> {
        match self {
            BcConfig::Raw(rows) => {
                let r = [0, 1].map(|i| rows[i].map(C64::from));
                normalize_bc(&RawBc::new(r)?)
            }
            BcConfig::Canonical { b, a, d, c } => CanonicalBc::new((*b).into(), (*a).into(), (*d).into(), (*c).into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum ComponentConfig {
    Zero,
    /// Harmonic (as a string key) to coefficient.
    Fourier(BTreeMap<String, Cx>),
    Samples(Vec<Cx>),
}

impl ComponentConfig {
    fn build(&self) -> Result<Component, ConfigError> {
        Ok(match self {
            ComponentConfig::Zero => Component::Zero,
            ComponentConfig::Fourier(map) => {
                let mut modes = Vec::with_capacity(map.len());
                for (k, v) in map {
                    let m: i64 = k
                        .trim()
                        .parse()
                        .map_err(|_| ConfigError::Invalid(format!("harmonic key {k:?} is not an integer")))?;
                    modes.push((m, C64::from(*v)));
                }
                Component::fourier(&modes)?
            }
            ComponentConfig::Samples(s) => Component::samples(s.iter().map(|&c| c.into()).collect())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RandomTrigConfig {
    pub seed: u64,
    #[serde(default = "default_max_harmonic")]
    pub max_harmonic: i64,
    #[serde(default = "default_random_norm")]
    pub norm: f64,
}

fn default_max_harmonic() -> i64 {
    8
}

fn default_random_norm() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialConfig {
    Random {
        #[serde(rename = "randomTrig")]
        random_trig: RandomTrigConfig,
    },
    Components {
        #[serde(rename = "P", default = "zero_component")]
        p: ComponentConfig,
        #[serde(rename = "Q", default = "zero_component")]
        q: ComponentConfig,
    },
}

fn zero_component() -> ComponentConfig {
    ComponentConfig::Zero
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig::Components { p: ComponentConfig::Zero, q: ComponentConfig::Zero }
    }
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec, ConfigError> {
        match self {
            PotentialConfig::Random { random_trig } => {
                Ok(PotentialSpec::random_trig(random_trig.seed, random_trig.max_harmonic, random_trig.norm)?)
            }
            PotentialConfig::Components { p, q } => Ok(PotentialSpec::new(p.build()?, q.build()?)),
        }
    }
}

/// Bounded-variation test functions used by the convergence experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum FunctionConfig {
    Step { x0: f64, left: [f64; 2], right: [f64; 2] },
    /// `F(x) = x` on `[0, x0)` and `x − π` on `[x0, π]` in both components.
    Sawtooth { x0: f64 },
    /// Segments `(start, end, [f(start), f(end)], [g(start), g(end)])` covering `[0, π]`.
    PiecewiseLinear { segments: Vec<(f64, f64, [f64; 2], [f64; 2])> },
}

impl Default for FunctionConfig {
    fn default() -> Self {
        FunctionConfig::Step { x0: 1.0, left: [1.0, 0.5], right: [-0.5, 1.0] }
    }
}

impl FunctionConfig {
    pub fn build(&self) -> Result<PiecewiseFn, ConfigError> {
        Ok(match self {
            FunctionConfig::Step { x0, left, right } => {
                check_interior(*x0)?;
                PiecewiseFn::step(*x0, *left, *right)?
            }
            FunctionConfig::Sawtooth { x0 } => {
                check_interior(*x0)?;
                PiecewiseFn::piecewise_linear(&[
                    (0.0, *x0, [0.0, *x0], [0.0, *x0]),
                    (*x0, PI, [*x0 - PI, 0.0], [*x0 - PI, 0.0]),
                ])?
            }
            FunctionConfig::PiecewiseLinear { segments } => PiecewiseFn::piecewise_linear(segments)?,
        })
    }
}

fn check_interior(x0: f64) -> Result<(), ConfigError> {
    if x0 > 0.0 && x0 < PI {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("breakpoint {x0} must lie in (0, pi)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReconstructionConfig {
    #[serde(default = "default_recon_nmax")]
    pub n_max: Vec<i64>,
    #[serde(default = "default_orderings")]
    pub orderings: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub function: FunctionConfig,
}

fn default_recon_nmax() -> Vec<i64> {
    vec![8, 16, 32]
}

fn default_orderings() -> usize {
    20
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self { n_max: default_recon_nmax(), orderings: default_orderings(), seed: 0, function: FunctionConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PointwiseConfig {
    #[serde(default = "default_mps")]
    pub mps: i64,
    #[serde(default = "default_points")]
    pub points: Vec<f64>,
    #[serde(default)]
    pub function: FunctionConfig,
}

fn default_mps() -> i64 {
    2048
}

fn default_points() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, PI]
}

impl Default for PointwiseConfig {
    fn default() -> Self {
        Self { mps: default_mps(), points: default_points(), function: FunctionConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EquiconvergenceConfig {
    #[serde(default = "default_equi_n", rename = "N")]
    pub n: Vec<i64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_equi_function")]
    pub function: FunctionConfig,
}

fn default_equi_n() -> Vec<i64> {
    vec![4, 8, 16]
}

fn default_grid_points() -> usize {
    257
}

fn default_equi_function() -> FunctionConfig {
    FunctionConfig::Step { x0: 1.0, left: [1.0, 1.0], right: [0.0, 0.0] }
}

impl Default for EquiconvergenceConfig {
    fn default() -> Self {
        Self { n: default_equi_n(), grid_points: default_grid_points(), function: default_equi_function() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub bc: BcConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(rename = "M", default = "default_m")]
    pub m: i64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_contour_nodes")]
    pub contour_nodes: usize,
    #[serde(default = "default_rect_order")]
    pub rect_order: usize,
    /// Largest `|n|` for projection tables; defaults to `M/2`.
    #[serde(default)]
    pub n_max: Option<i64>,
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
    #[serde(default)]
    pub pointwise: PointwiseConfig,
    #[serde(default)]
    pub equiconvergence: EquiconvergenceConfig,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_m() -> i64 {
    64
}

fn default_threshold() -> f64 {
    crate::localization::DEFAULT_THRESHOLD
}

fn default_contour_nodes() -> usize {
    crate::resolvent_proj::DEFAULT_DISC_NODES
}

fn default_rect_order() -> usize {
    crate::resolvent_proj::DEFAULT_RECT_ORDER
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: {
                let full = e.to_string();
                full.rsplit_once(" at line ").map_or(full.clone(), |(head, _)| head.to_string())
            },
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_truncation(self.m)?;
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ConfigError::Invalid(format!("threshold {} must lie in (0, 1)", self.threshold)));
        }
        if self.contour_nodes < 8 || self.contour_nodes % 2 != 0 {
            return Err(ConfigError::Invalid("contourNodes must be an even number >= 8".into()));
        }
        if self.rect_order < 4 || self.rect_order % 2 != 0 {
            return Err(ConfigError::Invalid("rectOrder must be an even number >= 4".into()));
        }
        if let Some(n) = self.n_max {
            if n < 2 || n > self.m / 2 {
                return Err(ConfigError::Invalid(format!("nMax {n} must lie in [2, M/2]")));
            }
        }
        if self.reconstruction.orderings == 0 && !self.reconstruction.n_max.is_empty() {
            return Err(ConfigError::Invalid("reconstruction.orderings must be positive".into()));
        }
        if self.pointwise.mps < 2 {
            return Err(ConfigError::Invalid("pointwise.mps must be at least 2".into()));
        }
        if self.pointwise.points.iter().any(|x| !(0.0..=PI).contains(x)) {
            return Err(ConfigError::Invalid("pointwise.points must lie in [0, pi]".into()));
        }
        if self.equiconvergence.grid_points < 2 {
            return Err(ConfigError::Invalid("equiconvergence.gridPoints must be at least 2".into()));
        }
        Ok(())
    }

    /// Replaces the truncation and re-validates.
    pub fn with_truncation(mut self, m: i64) -> Result<Self, ConfigError> {
        self.m = m;
        if let Some(n) = self.n_max {
            self.n_max = Some(n.min(m / 2));
        }
        self.validate()?;
        Ok(self)
    }

    pub fn n_max(&self) -> i64 {
        self.n_max.unwrap_or(self.m / 2)
    }
}

pub fn check_truncation(m: i64) -> Result<(), ConfigError> {
    if m % 2 != 0 || !(8..=1024).contains(&m) {
        return Err(ConfigError::Invalid(format!("M = {m} must be even with 8 <= M <= 1024")));
    }
    Ok(())
}
