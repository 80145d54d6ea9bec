//! Eigensolution of the truncated operator, assignment of eigenvalues to the
//! localization contours, eigenvalue deviations, reconstruction from
//! projections and pointwise partial sums of the spectral decomposition.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bc_algebra::CanonicalBc;
use crate::expoly::ExpPoly;
use crate::free_basis::{BasisFamily, Truncation};
use crate::linalg::{self, CMat};
use crate::localization::LocalizationPlan;
use crate::quadrature::RealRule;
use crate::resolvent_proj::{
    BariMarkus, Contour, DiscProjection, ProjectionEngine, ProjectionError, ProjectionMatrix, TruncatedOperator,
};
use crate::C64;

/// Smallest accepted `|⟨ψ, φ̃⟩|` in the deviation quotient.
pub const DEGENERATE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("ProjectionDegenerate: |<psi, phi~>| = {magnitude:.3e} for n = {n}, branch {branch}")]
    ProjectionDegenerate { n: i64, branch: usize, magnitude: f64 },
    #[error("the deviation quotient needs strictly regular boundary conditions")]
    NotStrictlyRegular,
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "region", rename_all = "camelCase")]
pub enum Assignment {
    Disc { n: i64, branch: Option<usize> },
    Rectangle,
    /// Inside the trusted band but in no contour.
    Unassigned,
    OuterBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssignedEigenvalue {
    pub value: C64,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscCount {
    pub n: i64,
    pub branch: Option<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub n: i64,
    pub branch: usize,
    pub lambda: C64,
    /// `λ_{n,α} − n − τ_α`.
    pub delta: C64,
    pub kappa: Option<f64>,
    pub count: usize,
    pub running_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<AssignedEigenvalue>,
    pub disc_counts: Vec<DiscCount>,
    pub rect_count: usize,
    pub unassigned: usize,
    pub deviations: Vec<DeviationRow>,
}

impl SpectrumReport {
    /// Eigenvalues inside the trusted band `|Re λ − c| < M/2 + 1`.
    pub fn trusted_count(&self) -> usize {
        self.eigenvalues.iter().filter(|e| e.assignment != Assignment::OuterBand).count()
    }

    pub fn deviation_sum(&self) -> f64 {
        self.deviations.last().map_or(0.0, |d| d.running_sum)
    }

    /// Attaches `κ_{n,α}` estimates from a Bari–Markus table.
    pub fn with_kappas(mut self, bm: &BariMarkus) -> Self {
        for d in &mut self.deviations {
            let row = bm
                .rows
                .iter()
                .find(|r| r.n == d.n && (r.branch.is_none() || r.branch == Some(d.branch)));
            d.kappa = row.map(|r| r.op_norm_estimate);
        }
        self
    }
}

/// Dense eigenvalues of `D + W`, assigned to the plan's contours.
pub fn eigensolve(fam: &BasisFamily, op: &TruncatedOperator, plan: &LocalizationPlan) -> Result<SpectrumReport, SolverError> {
    let mut values: Vec<C64> = if op.is_free {
        op.free_values().to_vec()
    } else {
        linalg::eigenvalues(&op.a).map_err(|e| SolverError::Linalg(e.to_string()))?.to_vec()
    };
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(assign(fam, &values, plan))
}

/// Assignment for a given list of eigenvalues.
pub fn assign(fam: &BasisFamily, values: &[C64], plan: &LocalizationPlan) -> SpectrumReport {
    let center = plan.rect.center_re;
    let band = (plan.trusted_half_band() + 1) as f64;
    let eigenvalues: Vec<AssignedEigenvalue> = values
        .iter()
        .map(|&value| {
            let assignment = if let Some(d) = plan.discs.iter().find(|d| d.contains(value)) {
                Assignment::Disc { n: d.m, branch: d.branch }
            } else if plan.rect.contains(value) {
                Assignment::Rectangle
            } else if (value.re - center).abs() < band {
                Assignment::Unassigned
            } else {
                Assignment::OuterBand
            };
            AssignedEigenvalue { value, assignment }
        })
        .collect();
    let disc_counts: Vec<DiscCount> = plan
        .discs
        .iter()
        .map(|d| DiscCount {
            n: d.m,
            branch: d.branch,
            count: eigenvalues
                .iter()
                .filter(|e| e.assignment == Assignment::Disc { n: d.m, branch: d.branch })
                .count(),
        })
        .collect();
    let rect_count = eigenvalues.iter().filter(|e| e.assignment == Assignment::Rectangle).count();
    let unassigned = eigenvalues.iter().filter(|e| e.assignment == Assignment::Unassigned).count();

    let mut deviations = Vec::new();
    let mut running = 0.0;
    for d in &plan.discs {
        let inside: Vec<C64> = eigenvalues
            .iter()
            .filter(|e| e.assignment == Assignment::Disc { n: d.m, branch: d.branch })
            .map(|e| e.value)
            .collect();
        for (slot, &lambda) in inside.iter().enumerate() {
            let branch = d.branch.unwrap_or(slot.min(1));
            let delta = lambda - fam.lambda0(branch, d.m);
            running += delta.norm_sqr();
            deviations.push(DeviationRow { n: d.m, branch, lambda, delta, kappa: None, count: inside.len(), running_sum: running });
        }
    }
    SpectrumReport { eigenvalues, disc_counts, rect_count, unassigned, deviations }
}

/// `λ_{n,α} − λ⁰_{n,α} = ⟨Vψ, φ̃^α_n⟩ / ⟨ψ, φ̃^α_n⟩` with `ψ = P_{n,α} φ^α_n`.
pub fn deviation_via_projection(
    fam: &BasisFamily,
    op: &TruncatedOperator,
    projection: &ProjectionMatrix,
    n: i64,
    alpha: usize,
) -> Result<C64, SolverError> {
    if !fam.is_strict() {
        return Err(SolverError::NotStrictlyRegular);
    }
    let idx = op.tr.index(alpha, n);
    let psi = projection.coords.column(idx).to_owned();
    let denom = psi[idx];
    if denom.norm() < DEGENERATE_TOL {
        return Err(SolverError::ProjectionDegenerate { n, branch: alpha, magnitude: denom.norm() });
    }
    let num: C64 = op.w.row(idx).iter().zip(psi.iter()).map(|(a, b)| a * b).sum();
    Ok(num / denom)
}

/// A vector function on `[0, π]` that is a finite sum of exponential
/// polynomials on each piece between consecutive breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    breaks: Vec<f64>,
    pieces: Vec<[Vec<ExpPoly>; 2]>,
}

impl PiecewiseFn {
    /// `breaks` runs from `0` to `π`; `pieces[i]` lives on `[breaks[i], breaks[i+1]]`.
    pub fn new(breaks: Vec<f64>, pieces: Vec<[Vec<ExpPoly>; 2]>) -> Result<Self, SolverError> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(SolverError::InvalidFunction("need one piece per interval".into()));
        }
        if breaks[0] != 0.0 || (breaks[breaks.len() - 1] - PI).abs() > 1e-15 {
            return Err(SolverError::InvalidFunction("breakpoints must span [0, pi]".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SolverError::InvalidFunction("breakpoints must increase".into()));
        }
        for piece in &pieces {
            if piece.iter().flatten().any(|t| t.degree() > 2) {
                return Err(SolverError::InvalidFunction("piece degree must be at most 2".into()));
            }
        }
        Ok(Self { breaks, pieces })
    }

    /// A single smooth piece.
    pub fn smooth(first: Vec<ExpPoly>, second: Vec<ExpPoly>) -> Self {
        Self { breaks: vec![0.0, PI], pieces: vec![[first, second]] }
    }

    /// Scalar piecewise-polynomial `F` embedded as `(F, F)`.
    pub fn scalar(breaks: Vec<f64>, pieces: Vec<ExpPoly>) -> Result<Self, SolverError> {
        let vec_pieces = pieces.into_iter().map(|p| [vec![p], vec![p]]).collect();
        Self::new(breaks, vec_pieces)
    }

    /// Step with value `left` on `[0, x0)` and `right` on `[x0, π]`, per component.
    pub fn step(x0: f64, left: [f64; 2], right: [f64; 2]) -> Result<Self, SolverError> {
        let c = |v: f64| vec![ExpPoly::constant(C64::new(v, 0.0))];
        Self::new(vec![0.0, x0, PI], vec![[c(left[0]), c(left[1])], [c(right[0]), c(right[1])]])
    }

    /// Linear interpolation through `(x, values)` with independent jumps:
    /// each `segments[i] = (x_start, x_end, [f_start, f_end], [g_start, g_end])`.
    pub fn piecewise_linear(segments: &[(f64, f64, [f64; 2], [f64; 2])]) -> Result<Self, SolverError> {
        let mut breaks = vec![segments.first().map_or(0.0, |s| s.0)];
        let mut pieces = Vec::new();
        for &(a, b, f, g) in segments {
            let lin = |v: [f64; 2]| {
                let slope = (v[1] - v[0]) / (b - a);
                vec![ExpPoly::linear(C64::new(v[0] - slope * a, 0.0), C64::new(slope, 0.0), C64::new(0.0, 0.0))]
            };
            pieces.push([lin(f), lin(g)]);
            breaks.push(b);
        }
        Self::new(breaks, pieces)
    }

    /// `Σ_β c_β φ_β` on the whole interval.
    pub fn from_coordinates(fam: &BasisFamily, tr: Truncation, coords: &[C64]) -> Self {
        let mut first = Vec::new();
        let mut second = Vec::new();
        for (idx, &c) in coords.iter().enumerate() {
            if c != C64::new(0.0, 0.0) {
                let (mu, k) = tr.entry(idx);
                let p = fam.phi(mu, k);
                first.push(p[0].scale(c));
                second.push(p[1].scale(c));
            }
        }
        Self::smooth(first, second)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    fn piece_index(&self, x: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    fn eval_piece(&self, i: usize, x: f64) -> [C64; 2] {
        let p = &self.pieces[i];
        [p[0].iter().map(|t| t.eval(x)).sum(), p[1].iter().map(|t| t.eval(x)).sum()]
    }

    /// Value at `x`; right-continuous at interior breakpoints.
    pub fn eval(&self, x: f64) -> [C64; 2] {
        self.eval_piece(self.piece_index(x), x)
    }

    pub fn left_limit(&self, x: f64) -> [C64; 2] {
        let i = self.breaks.partition_point(|&b| b < x);
        self.eval_piece(i.saturating_sub(1).min(self.pieces.len() - 1), x)
    }

    pub fn right_limit(&self, x: f64) -> [C64; 2] {
        self.eval(x)
    }

    /// `⟨self, g⟩ = (1/π)∫ (f₁ḡ₁ + f₂ḡ₂)`.
    pub fn inner_with(&self, g: &[ExpPoly; 2]) -> C64 {
        let gc = [g[0].conj(), g[1].conj()];
        let mut acc = C64::new(0.0, 0.0);
        for (i, piece) in self.pieces.iter().enumerate() {
            let (a, b) = (self.breaks[i], self.breaks[i + 1]);
            for c in 0..2 {
                for t in &piece[c] {
                    acc += (*t * gc[c]).integral(a, b);
                }
            }
        }
        acc / PI
    }

    /// `‖self‖²` by Gauss–Legendre on each piece.
    pub fn norm_sqr(&self, panels_per_piece: usize) -> f64 {
        let mut acc = 0.0;
        for (i, _) in self.pieces.iter().enumerate() {
            let rule = RealRule::composite(&linspace(self.breaks[i], self.breaks[i + 1], panels_per_piece), 16);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = self.eval_piece(i, x);
                acc += w * (v[0].norm_sqr() + v[1].norm_sqr());
            }
        }
        acc / PI
    }

    /// Φ̃-coordinates `⟨f, φ̃_β⟩` on the truncation.
    pub fn coordinates(&self, fam: &BasisFamily, tr: Truncation) -> Vec<C64> {
        (0..tr.dim())
            .map(|idx| {
                let (mu, k) = tr.entry(idx);
                self.inner_with(&fam.phi_tilde(mu, k))
            })
            .collect()
    }
}

fn linspace(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect()
}

/// `Σ_β u_β φ_β(x)`.
pub fn synthesize(fam: &BasisFamily, tr: Truncation, coords: &[C64], x: f64) -> [C64; 2] {
    let mut out = [C64::new(0.0, 0.0); 2];
    for (idx, &c) in coords.iter().enumerate() {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        let (mu, k) = tr.entry(idx);
        let v = fam.eval_phi(mu, k, x);
        out[0] += c * v[0];
        out[1] += c * v[1];
    }
    out
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub coords: Vec<C64>,
    pub nodes: Vec<f64>,
    pub values: Vec<[C64; 2]>,
    /// `‖f − Sf‖` by quadrature on the grid.
    pub l2_error: f64,
    /// `‖Σ_{β} (c − Sc)_β φ_β‖`, the energy of the coordinates not captured.
    pub tail_energy: f64,
    /// Largest coordinate change over all random summation orders.
    pub ordering_spread: f64,
}

/// Applies `S_N + Σ P_n` to `f` and measures the error in several ways.
pub fn reconstruct(
    fam: &BasisFamily,
    tr: Truncation,
    projections: &[&ProjectionMatrix],
    f: &PiecewiseFn,
    orderings: usize,
    seed: u64,
) -> Reconstruction {
    let c = Array1::from(f.coordinates(fam, tr));
    let parts: Vec<Array1<C64>> = projections.iter().map(|p| p.coords.dot(&c)).collect();
    let sum_in = |order: &[usize]| {
        let mut acc = Array1::<C64>::zeros(tr.dim());
        for &i in order {
            acc += &parts[i];
        }
        acc
    };
    let natural: Vec<usize> = (0..parts.len()).collect();
    let u = sum_in(&natural);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spread = 0.0f64;
    for _ in 0..orderings {
        let mut order = natural.clone();
        order.shuffle(&mut rng);
        let other = sum_in(&order);
        let diff = (&other - &u).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        spread = spread.max(diff);
    }

    let rule = RealRule::on_interval_with_breaks(4 * tr.modes().max(16), 16, f.breaks());
    let basis = fam.sample_basis(tr, &rule);
    let sv = basis.dot(&u);
    let nodes = rule.nodes.clone();
    let mut values = Vec::with_capacity(nodes.len());
    let mut err2 = 0.0;
    for (q, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let s = [sv[2 * q], sv[2 * q + 1]];
        let fx = f.eval(x);
        err2 += w * ((fx[0] - s[0]).norm_sqr() + (fx[1] - s[1]).norm_sqr());
        values.push(s);
    }
    let residual = &c - &u;
    let g = fam.gram_matrix_exact(tr);
    let tail2 = quadratic_form(&g, &residual).max(0.0);
    Reconstruction {
        coords: u.to_vec(),
        nodes,
        values,
        l2_error: (err2 / PI).sqrt(),
        tail_energy: tail2.sqrt(),
        ordering_spread: spread,
    }
}

fn quadratic_form(g: &CMat, v: &Array1<C64>) -> f64 {
    let gv = g.dot(v);
    v.iter().zip(gv.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
}

/// Symmetric partial sum `Σ_{|m| ≤ mps} Σ_μ ⟨F, φ̃^μ_m⟩ φ^μ_m(x)` of the free expansion.
pub fn pointwise_partial_sum(fam: &BasisFamily, f: &PiecewiseFn, x: f64, mps: i64) -> [C64; 2] {
    let mut out = [C64::new(0.0, 0.0); 2];
    let mut k = -mps + (mps.rem_euclid(2));
    while k <= mps {
        for mu in 0..2 {
            let c = f.inner_with(&fam.phi_tilde(mu, k));
            let v = fam.eval_phi(mu, k, x);
            out[0] += c * v[0];
            out[1] += c * v[1];
        }
        k += 2;
    }
    out
}

/// Partial sums at many points at once, sharing the coefficients.
pub fn pointwise_partial_sums(fam: &BasisFamily, f: &PiecewiseFn, xs: &[f64], mps: i64) -> Vec<[C64; 2]> {
    let tr = Truncation::new(mps - mps.rem_euclid(2));
    let coords = f.coordinates(fam, tr);
    xs.iter().map(|&x| synthesize(fam, tr, &coords, x)).collect()
}

/// Limit of the partial sums at an interior point: the average of the one-sided limits.
pub fn interior_limit(f: &PiecewiseFn, x: f64) -> [C64; 2] {
    let (l, r) = (f.left_limit(x), f.right_limit(x));
    [(l[0] + r[0]) * 0.5, (l[1] + r[1]) * 0.5]
}

/// Limits of the partial sums at `x = 0` and `x = π` for the canonical
/// condition `(b, a, d, c)`.
pub fn endpoint_limits(bc: &CanonicalBc, f: &PiecewiseFn) -> ([C64; 2], [C64; 2]) {
    let (b, a, d, c) = (bc.b(), bc.a(), bc.d(), bc.c());
    let den = b * c - a * d;
    let at0 = f.eval(0.0);
    let at_pi = f.left_limit(PI);
    let (f0, g0, fp, gp) = (at0[0], at0[1], at_pi[0], at_pi[1]);
    let zero = [(f0 - b * fp - a * g0) * 0.5, (d / den * f0 + g0 - b / den * gp) * 0.5];
    let pi = [(-c / den * f0 + fp + a / den * gp) * 0.5, (-d * fp - c * g0 + gp) * 0.5];
    (zero, pi)
}

/// `sup_x |(S_N − S⁰_N)(F, F)|(x)` over `grid`.
pub fn equiconvergence_gap(
    fam: &BasisFamily,
    engine: &ProjectionEngine,
    free: &ProjectionEngine,
    plan: &LocalizationPlan,
    f: &PiecewiseFn,
    n: i64,
    grid: &[f64],
) -> Result<f64, SolverError> {
    let tr = Truncation::new(plan.m);
    let rect: Contour = plan.with_rect_n(n).rect.into();
    let s = engine.project(rect)?;
    let s0 = free.project(rect)?;
    let c = Array1::from(f.coordinates(fam, tr));
    let diff: Array2<C64> = &s.coords - &s0.coords;
    let u = diff.dot(&c);
    let u = u.to_vec();
    Ok(grid
        .iter()
        .map(|&x| {
            let v = synthesize(fam, tr, &u, x);
            (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
        })
        .fold(0.0, f64::max))
}

/// The partial sums one level below the rectangle: disc projections with `|n| ≤ n_max`
/// together with the rectangle projection.
pub fn projection_refs<'a>(rect: &'a ProjectionMatrix, discs: &'a [DiscProjection], n_max: i64) -> Vec<&'a ProjectionMatrix> {
    std::iter::once(rect)
        .chain(discs.iter().filter(|d| d.disc.m.abs() <= n_max).map(|d| &d.projection))
        .collect()
}
