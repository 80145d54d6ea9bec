//! End-to-end runs behind the `dirac` commands.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bc_algebra::BcError;
use crate::config::{ConfigError, RunConfig};
use crate::free_basis::{BasisError, BasisFamily, Truncation};
use crate::localization::{make_plan, LocalizationError, LocalizationPlan, PlanOptions};
use crate::potential_rep::{build_w_table, PotentialError, WTable};
use crate::report::{self, ClassifyReport, EquiconvergenceRow, PlanJson, PointwiseRow, ReconstructionRow};
use crate::resolvent_proj::{bari_markus_with, BariMarkus, ProjectionEngine, ProjectionError, QuadratureOptions, TruncatedOperator};
use crate::spectral_solver::{self, SolverError, SpectrumReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Bc(#[from] BcError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("basis construction failed: {0}")]
    Basis(BasisError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl From<BasisError> for PipelineError {
    fn from(e: BasisError) -> Self {
        match e {
            BasisError::Bc(b) => PipelineError::Bc(b),
            other => PipelineError::Basis(other),
        }
    }
}

impl PipelineError {
    /// 1 config, 2 boundary conditions, 3 localization, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(ConfigError::Bc(_)) | PipelineError::Bc(_) => 2,
            PipelineError::Config(_) | PipelineError::Output(_) => 1,
            PipelineError::Localization(LocalizationError::Basis(BasisError::Bc(_))) => 2,
            PipelineError::Localization(_) => 3,
            PipelineError::Potential(PotentialError::InvalidSpec(_)) => 1,
            PipelineError::Potential(_) | PipelineError::Projection(_) | PipelineError::Solver(_) | PipelineError::Basis(_) => 4,
        }
    }
}

fn output<T>(r: report::ReportResult, value: T) -> Result<T, PipelineError> {
    r.map(|_| value).map_err(|e| PipelineError::Output(e.to_string()))
}

/// Everything needed downstream of the configuration.
pub struct Setup {
    pub config: RunConfig,
    pub family: BasisFamily,
    pub table: WTable,
    pub plan: LocalizationPlan,
    pub operator: TruncatedOperator,
}

impl Setup {
    pub fn new(config: RunConfig) -> Result<Self, PipelineError> {
        let family = BasisFamily::new(config.bc.canonical()?)?;
        let potential = config.potential.build()?;
        let table = build_w_table(&family, &potential, config.m)?;
        let options = PlanOptions { threshold: config.threshold, ..PlanOptions::default() };
        let plan = make_plan(&family, &table, options)?;
        let operator = TruncatedOperator::assemble(&family, &table, config.m);
        Ok(Self { config, family, table, plan, operator })
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { disc_nodes: self.config.contour_nodes, rect_order: self.config.rect_order }
    }

    pub fn engines(&self) -> Result<(ProjectionEngine, ProjectionEngine), PipelineError> {
        let q = self.quadrature();
        Ok((ProjectionEngine::new(&self.operator, q)?, ProjectionEngine::new(&self.operator.free_part(), q)?))
    }

    pub fn bari_markus(&self, engine: &ProjectionEngine, free: &ProjectionEngine) -> Result<BariMarkus, PipelineError> {
        let n_max = self.config.n_max();
        if n_max <= self.plan.n {
            return Err(PipelineError::Localization(LocalizationError::NoFiniteN {
                limit: n_max,
                worst: self.plan.worst_boundary_value,
            }));
        }
        Ok(bari_markus_with(engine, free, &self.family, &self.plan, n_max, &self.plan.riesz)?)
    }
}

pub fn classify(config: &RunConfig, out: Option<&Path>) -> Result<ClassifyReport, PipelineError> {
    let bc = config.bc.canonical()?;
    let rep = report::classify_report(&bc)?;
    if let Some(dir) = out {
        ensure_dir(dir)?;
        output(report::write_json(&dir.join("classify.json"), &rep), ())?;
    }
    Ok(rep)
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Output(format!("{}: {e}", dir.display())))
}

pub fn write_plan(setup: &Setup, dir: &Path) -> Result<(), PipelineError> {
    ensure_dir(dir)?;
    output(report::write_json(&dir.join("plan.json"), &PlanJson::from(&setup.plan)), ())
}

/// `plan.json`, `spectrum.csv` and `deviations.csv`.
pub fn spectrum(config: RunConfig, dir: &Path) -> Result<SpectrumReport, PipelineError> {
    let setup = Setup::new(config)?;
    write_plan(&setup, dir)?;
    let mut rep = spectral_solver::eigensolve(&setup.family, &setup.operator, &setup.plan)?;
    if setup.config.n_max() > setup.plan.n {
        let (engine, free) = setup.engines()?;
        let bm = setup.bari_markus(&engine, &free)?;
        rep = rep.with_kappas(&bm);
    }
    output(report::write_rows(&dir.join("spectrum.csv"), &report::spectrum_rows(&rep)), ())?;
    output(report::write_rows(&dir.join("deviations.csv"), &report::deviation_rows(&rep)), rep)
}

pub struct ProjectionsOutput {
    pub bari_markus: BariMarkus,
    pub reconstruction: Vec<ReconstructionRow>,
}

/// `plan.json`, `bari_markus.csv` and `reconstruction.csv`.
pub fn projections(config: RunConfig, dir: &Path) -> Result<ProjectionsOutput, PipelineError> {
    let setup = Setup::new(config)?;
    write_plan(&setup, dir)?;
    let (engine, free) = setup.engines()?;
    let bm = setup.bari_markus(&engine, &free)?;
    output(report::write_rows(&dir.join("bari_markus.csv"), &report::bari_markus_rows(&bm)), ())?;

    let rc = &setup.config.reconstruction;
    let f = rc.function.build()?;
    let rect = engine.project(setup.plan.rect.into())?;
    let tr = Truncation::new(setup.plan.m);
    let mut rows = Vec::new();
    for &n_max in &rc.n_max {
        if n_max <= setup.plan.n || n_max > setup.config.n_max() {
            continue;
        }
        let refs = spectral_solver::projection_refs(&rect, &bm.projections, n_max);
        let r = spectral_solver::reconstruct(&setup.family, tr, &refs, &f, rc.orderings, rc.seed);
        rows.push(ReconstructionRow { n_max, l2_error: r.l2_error, tail_energy: r.tail_energy, ordering_spread: r.ordering_spread });
    }
    output(report::write_rows(&dir.join("reconstruction.csv"), &rows), ())?;
    Ok(ProjectionsOutput { bari_markus: bm, reconstruction: rows })
}

pub struct ConvergeOutput {
    pub pointwise: Vec<PointwiseRow>,
    pub equiconvergence: Vec<EquiconvergenceRow>,
}

/// `pointwise.csv` (free expansion) and `equiconvergence.csv`.
pub fn converge(config: RunConfig, dir: &Path) -> Result<ConvergeOutput, PipelineError> {
    ensure_dir(dir)?;
    let family = BasisFamily::new(config.bc.canonical()?)?;
    let pc = &config.pointwise;
    let f = pc.function.build()?;
    let sums = spectral_solver::pointwise_partial_sums(&family, &f, &pc.points, pc.mps);
    let (at0, at_pi) = spectral_solver::endpoint_limits(&family.bc, &f);
    let pointwise: Vec<PointwiseRow> = pc
        .points
        .iter()
        .zip(&sums)
        .map(|(&x, &s)| {
            let limit = if x == 0.0 {
                at0
            } else if x == PI {
                at_pi
            } else {
                spectral_solver::interior_limit(&f, x)
            };
            PointwiseRow::new(x, s, limit)
        })
        .collect();
    output(report::write_rows(&dir.join("pointwise.csv"), &pointwise), ())?;

    let setup = Setup::new(config)?;
    write_plan(&setup, dir)?;
    let (engine, free) = setup.engines()?;
    let ec = &setup.config.equiconvergence;
    let g = ec.function.build()?;
    let grid: Vec<f64> = (0..ec.grid_points).map(|i| PI * i as f64 / (ec.grid_points - 1) as f64).collect();
    let mut equiconvergence = Vec::new();
    for &n in &ec.n {
        let gap = spectral_solver::equiconvergence_gap(&setup.family, &engine, &free, &setup.plan, &g, n, &grid)?;
        equiconvergence.push(EquiconvergenceRow { n, gap });
    }
    output(report::write_rows(&dir.join("equiconvergence.csv"), &equiconvergence), ())?;
    Ok(ConvergeOutput { pointwise, equiconvergence })
}

/// Output directory from the command line, the config, or `out/`.
pub fn output_dir(cli: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    cli.or_else(|| config.out.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"))
}
