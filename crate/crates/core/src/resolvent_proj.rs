//! The truncated operator in Φ-coordinates, its resolvent (dense and as a
//! `K_λ`-series) and Riesz projections by contour quadrature.

use ndarray::{s, Array2};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::free_basis::{BasisFamily, RieszConstants, Truncation};
use crate::linalg::{self, CMat, Schur};
use crate::localization::{Disc, LocalizationPlan, Rect};
use crate::potential_rep::WTable;
use crate::quadrature::{graded_breaks, ContourRule};
use crate::C64;

/// Condition estimate above which a resolvent is reported as near-singular.
pub const COND_MAX: f64 = 1e12;
pub const DEFAULT_DISC_NODES: usize = 64;
pub const DEFAULT_RECT_ORDER: usize = 32;
/// Largest accepted change between the coarse and fine quadrature rules.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Largest accepted deviation of a disc trace from its expected dimension.
pub const DIMENSION_TOL: f64 = 1e-4;
/// Contours closer than this to an eigenvalue are rejected.
pub const CONTOUR_CLEARANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("NearSingular: condition estimate {cond:.3e} at lambda = {lambda}")]
    NearSingular { lambda: C64, cond: f64 },
    #[error("SeriesInadmissible: ||K V K||*_HS = {norm:.6} >= 1")]
    SeriesInadmissible { norm: f64 },
    #[error("QuadratureDivergence: refining the rule changed the projection by {change:.3e}")]
    QuadratureDivergence { change: f64 },
    #[error("DimensionMismatch: disc n = {n} (branch {branch:?}) has trace {trace} but {expected} was expected")]
    DimensionMismatch { n: i64, branch: Option<usize>, trace: C64, expected: usize },
    #[error("contour passes within {dist:.3e} of the eigenvalue {eigenvalue}")]
    ContourHitsSpectrum { eigenvalue: C64, dist: f64 },
    #[error("truncation mismatch: operator has M = {op}, plan has M = {plan}")]
    TruncationMismatch { op: i64, plan: i64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl From<linalg::LapackError> for ProjectionError {
    fn from(e: linalg::LapackError) -> Self {
        ProjectionError::Linalg(e.to_string())
    }
}

/// `D + W` on the span of `φ^μ_k`, `|k| ≤ M`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub tr: Truncation,
    pub d: CMat,
    pub w: CMat,
    pub a: CMat,
    pub is_free: bool,
    pub jordan: bool,
    free_values: Vec<C64>,
}

impl TruncatedOperator {
    /// Assembles the operator for truncation `m ≤ table.m`.
    pub fn assemble(fam: &BasisFamily, table: &WTable, m: i64) -> Self {
        assert!(m <= table.m, "the W-table must cover |j + k| <= 2M");
        let tr = Truncation::new(m);
        let n = tr.dim();
        let d = free_matrix(fam, tr);
        let w = Array2::from_shape_fn((n, n), |(r, c)| {
            let (mu, j) = tr.entry(r);
            let (nu, k) = tr.entry(c);
            table.get(mu, nu, j + k)
        });
        let is_free = w.iter().all(|z| *z == C64::new(0.0, 0.0));
        let a = &d + &w;
        Self { tr, d, w, a, is_free, jordan: fam.is_jordan(), free_values: free_diag(fam, tr) }
    }

    pub fn free(fam: &BasisFamily, m: i64) -> Self {
        let tr = Truncation::new(m);
        let n = tr.dim();
        let d = free_matrix(fam, tr);
        Self {
            tr,
            a: d.clone(),
            d,
            w: Array2::zeros((n, n)),
            is_free: true,
            jordan: fam.is_jordan(),
            free_values: free_diag(fam, tr),
        }
    }

    /// The unperturbed operator on the same truncation.
    pub fn free_part(&self) -> Self {
        let n = self.dim();
        Self {
            tr: self.tr,
            a: self.d.clone(),
            d: self.d.clone(),
            w: Array2::zeros((n, n)),
            is_free: true,
            jordan: self.jordan,
            free_values: self.free_values.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.tr.dim()
    }

    pub fn m(&self) -> i64 {
        self.tr.m
    }

    /// Diagonal of `D`, i.e. the free eigenvalues in coordinate order.
    pub fn free_values(&self) -> &[C64] {
        &self.free_values
    }
}

fn free_diag(fam: &BasisFamily, tr: Truncation) -> Vec<C64> {
    (0..tr.dim())
        .map(|i| {
            let (mu, k) = tr.entry(i);
            fam.lambda0(mu, k)
        })
        .collect()
}

fn free_matrix(fam: &BasisFamily, tr: Truncation) -> CMat {
    let n = tr.dim();
    let mut d = Array2::zeros((n, n));
    for (i, v) in free_diag(fam, tr).into_iter().enumerate() {
        d[[i, i]] = v;
    }
    if fam.is_jordan() {
        for k in tr.ks() {
            d[[tr.index(0, k), tr.index(1, k)]] = C64::new(0.0, -1.0);
        }
    }
    d
}

/// Dense `(λ − D − W)⁻¹`.
pub fn resolvent_apply(op: &TruncatedOperator, lambda: C64) -> Result<CMat, ProjectionError> {
    let shifted = Array2::from_diag_elem(op.dim(), lambda) - &op.a;
    let (inv, rcond) = linalg::inverse_with_rcond(&shifted)?;
    let cond = if rcond > 0.0 { 1.0 / rcond } else { f64::INFINITY };
    if cond > COND_MAX {
        return Err(ProjectionError::NearSingular { lambda, cond });
    }
    Ok(inv)
}

/// Square root with argument in `[−π, π)`, halved.
pub fn sqrt_branch(z: C64) -> C64 {
    let (r, mut phi) = z.to_polar();
    if phi >= std::f64::consts::PI {
        phi -= 2.0 * std::f64::consts::PI;
    }
    C64::from_polar(r.sqrt(), 0.5 * phi)
}

/// `K_λ`, a square root of the free resolvent commuting with `D`.
pub fn k_matrix(op: &TruncatedOperator, lambda: C64) -> CMat {
    let n = op.dim();
    let mut k = Array2::zeros((n, n));
    for (i, &v) in op.free_values.iter().enumerate() {
        k[[i, i]] = C64::new(1.0, 0.0) / sqrt_branch(lambda - v);
    }
    if op.jordan {
        for kk in op.tr.ks() {
            let (i0, i1) = (op.tr.index(0, kk), op.tr.index(1, kk));
            let d = lambda - op.free_values[i0];
            let sq = sqrt_branch(d);
            k[[i0, i1]] = C64::new(0.0, -0.5) / (d * sq);
        }
    }
    k
}

#[derive(Debug, Clone)]
pub struct SeriesResolvent {
    pub matrix: CMat,
    /// `‖K_λWK_λ‖_F`, used as the contraction factor `q`.
    pub q: f64,
    /// `Σ |w(j+k)|²|K_jj|²|K_kk|²`, square-rooted.
    pub hs_definition: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Partial sum `K Σ_{s=0}^{s_max} (KWK)^s K`.
pub fn series_resolvent(op: &TruncatedOperator, lambda: C64, s_max: usize) -> Result<SeriesResolvent, ProjectionError> {
    let k = k_matrix(op, lambda);
    let kwk = k.dot(&op.w).dot(&k);
    let q = linalg::frobenius(&kwk);
    let diag: Vec<f64> = (0..op.dim()).map(|i| k[[i, i]].norm_sqr()).collect();
    let hs_definition = op
        .w
        .indexed_iter()
        .map(|((r, c), z)| z.norm_sqr() * diag[r] * diag[c])
        .sum::<f64>()
        .sqrt();
    if q >= 1.0 {
        return Err(ProjectionError::SeriesInadmissible { norm: q });
    }
    let n = op.dim();
    let mut acc: CMat = Array2::eye(n);
    let mut term: CMat = Array2::eye(n);
    for _ in 0..s_max {
        term = term.dot(&kwk);
        acc = acc + &term;
    }
    let matrix = k.dot(&acc).dot(&k);
    let k_norm = k_operator_bound(op, &k);
    let tail_bound = q.powi(s_max as i32 + 1) / (1.0 - q) * k_norm * k_norm;
    Ok(SeriesResolvent { matrix, q, hs_definition, tail_bound, terms: s_max })
}

fn k_operator_bound(op: &TruncatedOperator, k: &CMat) -> f64 {
    op.tr
        .ks()
        .map(|kk| {
            let (i0, i1) = (op.tr.index(0, kk), op.tr.index(1, kk));
            let block = k.slice(s![i0..=i1, i0..=i1]);
            if op.jordan {
                block.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            } else {
                block[[0, 0]].norm().max(block[[1, 1]].norm())
            }
        })
        .fold(0.0, f64::max)
}

/// Smallest number of series terms whose tail bound is below `tol`.
pub fn series_terms_for(op: &TruncatedOperator, lambda: C64, tol: f64) -> Result<usize, ProjectionError> {
    let probe = series_resolvent(op, lambda, 0)?;
    let (q, base) = (probe.q, probe.tail_bound / probe.q.max(f64::MIN_POSITIVE));
    if q == 0.0 {
        return Ok(0);
    }
    let mut s = 0usize;
    while base * q.powi(s as i32 + 1) >= tol {
        s += 1;
        if s > 10_000 {
            return Err(ProjectionError::SeriesInadmissible { norm: q });
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Contour {
    Disc { center: C64, radius: f64 },
    Rectangle { center: f64, half_width: f64, half_height: f64 },
}

impl Contour {
    pub fn contains(&self, z: C64) -> bool {
        match *self {
            Contour::Disc { center, radius } => (z - center).norm() < radius,
            Contour::Rectangle { center, half_width, half_height } => {
                (z.re - center).abs() < half_width && z.im.abs() < half_height
            }
        }
    }

    pub fn distance_to_boundary(&self, z: C64) -> f64 {
        match *self {
            Contour::Disc { center, radius } => ((z - center).norm() - radius).abs(),
            Contour::Rectangle { .. } => {
                let v = self.vertices();
                (0..4).map(|s| segment_distance(v[s], v[(s + 1) % 4], z).0).fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn vertices(&self) -> [C64; 4] {
        match *self {
            Contour::Rectangle { center, half_width, half_height } => {
                Rect { center_re: center, half_width, half_height }.vertices()
            }
            Contour::Disc { .. } => unreachable!("discs have no vertices"),
        }
    }
}

impl From<Disc> for Contour {
    fn from(d: Disc) -> Self {
        Contour::Disc { center: d.center, radius: d.radius }
    }
}

impl From<Rect> for Contour {
    fn from(r: Rect) -> Self {
        Contour::Rectangle { center: r.center_re, half_width: r.half_width, half_height: r.half_height }
    }
}

/// Distance from `z` to the segment `[a, b]` and the parameter of the closest point.
fn segment_distance(a: C64, b: C64, z: C64) -> (f64, f64) {
    let d = b - a;
    let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    ((a + d * t - z).norm(), t)
}

#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    pub coords: CMat,
    pub contour: Contour,
    pub trace: C64,
    /// Coordinate Frobenius norm.
    pub hs_norm_star: f64,
    /// Frobenius change between the coarse and fine quadrature rules.
    pub quadrature_change: f64,
}

impl ProjectionMatrix {
    pub fn new(coords: CMat, contour: Contour, quadrature_change: f64) -> Self {
        let trace = coords.diag().iter().copied().sum();
        let hs_norm_star = linalg::frobenius(&coords);
        Self { coords, contour, trace, hs_norm_star, quadrature_change }
    }

    /// `‖P² − P‖_F / ‖P‖_F`, or the absolute defect when `P = 0`.
    pub fn idempotency_defect(&self) -> f64 {
        let d = linalg::frobenius(&(self.coords.dot(&self.coords) - &self.coords));
        if self.hs_norm_star > 0.0 {
            d / self.hs_norm_star
        } else {
            d
        }
    }

    /// Distance of the trace from the nearest integer, including `|Im trace|`.
    pub fn trace_defect(&self) -> f64 {
        (self.trace.re - self.trace.re.round()).abs().max(self.trace.im.abs())
    }

    pub fn rank(&self) -> usize {
        self.trace.re.round().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub disc_nodes: usize,
    pub rect_order: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { disc_nodes: DEFAULT_DISC_NODES, rect_order: DEFAULT_RECT_ORDER }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    /// Free operator: exact residues of the 2×2 blocks.
    Blocks,
    Schur(Schur),
}

/// Computes Riesz projections of one truncated operator.
#[derive(Debug, Clone)]
pub struct ProjectionEngine {
    engine: Engine,
    tr: Truncation,
    eigenvalues: Vec<C64>,
    free_values: Vec<C64>,
    pub options: QuadratureOptions,
}

impl ProjectionEngine {
    pub fn new(op: &TruncatedOperator, options: QuadratureOptions) -> Result<Self, ProjectionError> {
        assert!(options.disc_nodes >= 4 && options.disc_nodes % 2 == 0, "disc node count must be even");
        if op.is_free {
            Ok(Self {
                engine: Engine::Blocks,
                tr: op.tr,
                eigenvalues: op.free_values.clone(),
                free_values: op.free_values.clone(),
                options,
            })
        } else {
            let schur = Schur::new(&op.a)?;
            let eigenvalues = schur.eigenvalues();
            Ok(Self { engine: Engine::Schur(schur), tr: op.tr, eigenvalues, free_values: op.free_values.clone(), options })
        }
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.tr.dim()
    }

    fn check_clearance(&self, contour: &Contour) -> Result<(), ProjectionError> {
        for &e in &self.eigenvalues {
            let dist = contour.distance_to_boundary(e);
            if dist < CONTOUR_CLEARANCE {
                return Err(ProjectionError::ContourHitsSpectrum { eigenvalue: e, dist });
            }
        }
        Ok(())
    }

    /// `(1/2πi)∮ (λ − A)⁻¹ dλ` over the contour.
    pub fn project(&self, contour: Contour) -> Result<ProjectionMatrix, ProjectionError> {
        self.check_clearance(&contour)?;
        match &self.engine {
            Engine::Blocks => Ok(ProjectionMatrix::new(self.block_projection(&contour), contour, 0.0)),
            Engine::Schur(schur) => match contour {
                Contour::Disc { center, radius } => self.disc_projection(schur, contour, center, radius),
                Contour::Rectangle { .. } => self.rect_projection(schur, contour),
            },
        }
    }

    fn block_projection(&self, contour: &Contour) -> CMat {
        let n = self.dim();
        let mut p = Array2::zeros((n, n));
        for (i, &v) in self.free_values.iter().enumerate() {
            if contour.contains(v) {
                p[[i, i]] = C64::new(1.0, 0.0);
            }
        }
        p
    }

    fn disc_projection(&self, schur: &Schur, contour: Contour, center: C64, radius: f64) -> Result<ProjectionMatrix, ProjectionError> {
        let rule = ContourRule::circle(center, radius, self.options.disc_nodes);
        let (mut ev_n, mut ev_w, mut od_n, mut od_w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (q, (z, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            if q % 2 == 0 {
                ev_n.push(*z);
                ev_w.push(*w);
            } else {
                od_n.push(*z);
                od_w.push(*w);
            }
        }
        let even = schur.weighted_resolvent_sum(&ev_n, &ev_w)?;
        let odd = schur.weighted_resolvent_sum(&od_n, &od_w)?;
        // The half rule is 2·even; its distance to the full rule is |odd − even|.
        let change = even.iter().zip(&odd).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let full: Vec<C64> = even.iter().zip(&odd).map(|(a, b)| a + b).collect();
        if change > QUADRATURE_TOL {
            return Err(ProjectionError::QuadratureDivergence { change });
        }
        Ok(ProjectionMatrix::new(schur.back_transform(&full), contour, change))
    }

    fn rect_projection(&self, schur: &Schur, contour: Contour) -> Result<ProjectionMatrix, ProjectionError> {
        let v = contour.vertices();
        let breaks: Vec<Vec<f64>> = (0..4)
            .map(|s| {
                let (a, b) = (v[s], v[(s + 1) % 4]);
                let len = (b - a).norm();
                let (dist, t_near) = self
                    .eigenvalues
                    .iter()
                    .map(|&e| segment_distance(a, b, e))
                    .fold((f64::INFINITY, 0.5), |acc, x| if x.0 < acc.0 { x } else { acc });
                let h0 = (0.5 * dist).clamp(1e-3, len);
                graded_breaks(len, t_near, h0, 2.0, len.max(1.0))
            })
            .collect();
        let order = self.options.rect_order;
        let fine = ContourRule::polygon(&v, &breaks, order);
        let coarse = ContourRule::polygon(&v, &breaks, (order / 2).max(2));
        let fs = schur.weighted_resolvent_sum(&fine.nodes, &fine.weights)?;
        let cs = schur.weighted_resolvent_sum(&coarse.nodes, &coarse.weights)?;
        let change = fs.iter().zip(&cs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        if change > QUADRATURE_TOL {
            return Err(ProjectionError::QuadratureDivergence { change });
        }
        Ok(ProjectionMatrix::new(schur.back_transform(&fs), contour, change))
    }
}

/// Expected trace of a localization disc.
pub fn expected_disc_dimension(fam: &BasisFamily) -> usize {
    if fam.is_strict() {
        1
    } else {
        2
    }
}

/// A projection for one localization disc.
#[derive(Debug, Clone)]
pub struct DiscProjection {
    pub disc: Disc,
    pub projection: ProjectionMatrix,
}

/// Projections for the trusted discs with `N < |n| ≤ n_max`, ordered as the plan.
pub fn disc_projections(
    engine: &ProjectionEngine,
    plan: &LocalizationPlan,
    n_max: i64,
) -> Result<Vec<DiscProjection>, ProjectionError> {
    if engine.tr.m != plan.m {
        return Err(ProjectionError::TruncationMismatch { op: engine.tr.m, plan: plan.m });
    }
    if n_max > plan.trusted_half_band() {
        return Err(ProjectionError::InvalidRange(format!("n_max = {n_max} exceeds the trusted band M/2 = {}", plan.m / 2)));
    }
    plan.discs
        .par_iter()
        .filter(|d| d.m.abs() <= n_max)
        .map(|&disc| engine.project(disc.into()).map(|projection| DiscProjection { disc, projection }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BariMarkusRow {
    pub n: i64,
    pub branch: Option<usize>,
    pub trace: C64,
    pub hs_norm_star: f64,
    pub op_norm_estimate: f64,
    pub running_sum: f64,
}

#[derive(Debug, Clone)]
pub struct BariMarkus {
    pub rows: Vec<BariMarkusRow>,
    pub projections: Vec<DiscProjection>,
    pub free_projections: Vec<DiscProjection>,
}

impl BariMarkus {
    pub fn total(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.running_sum)
    }
}

/// `‖P_n − P⁰_n‖*_HS` for every trusted disc with `N < |n| ≤ n_max`.
pub fn bari_markus_sums(
    op: &TruncatedOperator,
    fam: &BasisFamily,
    plan: &LocalizationPlan,
    n_max: i64,
    options: QuadratureOptions,
) -> Result<BariMarkus, ProjectionError> {
    let engine = ProjectionEngine::new(op, options)?;
    let free = ProjectionEngine::new(&op.free_part(), options)?;
    bari_markus_with(&engine, &free, fam, plan, n_max, &plan.riesz)
}

pub fn bari_markus_with(
    engine: &ProjectionEngine,
    free: &ProjectionEngine,
    fam: &BasisFamily,
    plan: &LocalizationPlan,
    n_max: i64,
    riesz: &RieszConstants,
) -> Result<BariMarkus, ProjectionError> {
    if n_max <= plan.n {
        return Err(ProjectionError::InvalidRange(format!("n_max = {n_max} must exceed N = {}", plan.n)));
    }
    let projections = disc_projections(engine, plan, n_max)?;
    let free_projections = disc_projections(free, plan, n_max)?;
    let expected = expected_disc_dimension(fam);
    let mut rows = Vec::with_capacity(projections.len());
    let mut running = 0.0;
    for (p, p0) in projections.iter().zip(&free_projections) {
        let trace = p.projection.trace;
        if (trace - expected as f64).norm() > DIMENSION_TOL {
            return Err(ProjectionError::DimensionMismatch { n: p.disc.m, branch: p.disc.branch, trace, expected });
        }
        let hs = linalg::frobenius(&(&p.projection.coords - &p0.projection.coords));
        running += hs * hs;
        rows.push(BariMarkusRow {
            n: p.disc.m,
            branch: p.disc.branch,
            trace,
            hs_norm_star: hs,
            op_norm_estimate: hs * riesz.kappa(),
            running_sum: running,
        });
    }
    Ok(BariMarkus { rows, projections, free_projections })
}

/// Coordinate projection onto the eigenvalues of `A` captured by the given contours.
pub fn captured_identity(engine: &ProjectionEngine, contours: &[Contour]) -> usize {
    engine.eigenvalues().iter().filter(|&&e| contours.iter().any(|c| c.contains(e))).count()
}
