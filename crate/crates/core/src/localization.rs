//! Localization geometry: strips, discs and the rectangle `R_NT`, the
//! dominating Hilbert–Schmidt sums, and the automatic choice of `N` and `T`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bc_algebra::Taus;
use crate::free_basis::{BasisError, BasisFamily, RieszConstants};
use crate::potential_rep::WTable;
use crate::C64;

/// Default bound on `κ·‖K_λVK_λ‖*_HS`.
pub const DEFAULT_THRESHOLD: f64 = 0.9;
/// Smallest admissible denominator `|λ − τ_μ − j|`.
pub const POLE_TOL: f64 = 1e-12;
/// Disc radius for regular but not strictly regular conditions.
pub const NON_STRICT_RADIUS: f64 = 0.25;
/// Constant of the strip/disc bound for strictly regular conditions is `(30/ρ)²`;
/// this is the corresponding constant for the four-fold single-τ sum.
pub const NON_STRICT_DISC_CONSTANT: f64 = 960.0;
/// Constants of the bounds `C‖r‖²/T` above the rectangle.
pub const STRICT_RECT_CONSTANT: f64 = 384.0;
pub const NON_STRICT_RECT_CONSTANT: f64 = 96.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalizationError {
    #[error("PoleHit: lambda = {lambda} lies within {dist:e} of a free eigenvalue")]
    PoleHit { lambda: C64, dist: f64 },
    #[error("NoFiniteN: no even N below {limit} satisfies the localization bounds (worst boundary value {worst:.3e})")]
    NoFiniteN { limit: i64, worst: f64 },
    #[error("truncation M = {0} is too small for localization (need M >= 8)")]
    TruncationTooSmall(i64),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// A real sequence on `2ℤ` with finite support `|m| ≤ half_range`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenSeq {
    pub half_range: i64,
    /// `values[(m + half_range)/2]`.
    pub values: Vec<f64>,
}

impl EvenSeq {
    pub fn new(half_range: i64, values: Vec<f64>) -> Self {
        assert!(half_range % 2 == 0 && values.len() == (half_range + 1) as usize);
        Self { half_range, values }
    }

    pub fn from_fn(half_range: i64, f: impl FnMut(i64) -> f64) -> Self {
        let values = (-half_range..=half_range).step_by(2).map(f).collect();
        Self::new(half_range, values)
    }

    pub fn from_table(wt: &WTable) -> Self {
        Self::new(wt.range(), wt.r.clone())
    }

    pub fn get(&self, m: i64) -> f64 {
        if m % 2 != 0 || m.abs() > self.half_range {
            0.0
        } else {
            self.values[((m + self.half_range) / 2) as usize]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    /// `E_m(r)² = Σ_{|j| ≥ m} r(j)²`.
    pub fn tail_sqr(&self, m: i64) -> f64 {
        let m = m.abs();
        (-self.half_range..=self.half_range)
            .step_by(2)
            .filter(|j| j.abs() >= m)
            .map(|j| self.get(j).powi(2))
            .sum()
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self { half_range: self.half_range, values: self.values.iter().map(|x| x * f).collect() }
    }
}

/// `D(j) = Σ_μ 1/|λ − τ_μ − j|`, doubled for a single τ.
fn denominators(taus: &Taus, lambda: C64, m: i64) -> Result<Vec<f64>, LocalizationError> {
    let mut out = Vec::with_capacity((m + 1) as usize);
    for j in (-m..=m).step_by(2) {
        let mut acc = 0.0;
        let pairs: &[C64] = match taus {
            Taus::Pair(t1, t2) => &[*t1, *t2],
            Taus::Single(t) => &[*t, *t],
        };
        for &t in pairs {
            let dist = (lambda - t - j as f64).norm();
            if dist < POLE_TOL {
                return Err(LocalizationError::PoleHit { lambda, dist });
            }
            acc += 1.0 / dist;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `Σ_{μ,ν} Σ_{|j|,|k| ≤ M} r(j+k)² / (|λ − τ_μ − j||λ − τ_ν − k|)`; for a
/// single τ this is four times the single-branch sum.
pub fn hs_weighted_sum(r: &EvenSeq, taus: &Taus, lambda: C64, m: i64) -> Result<f64, LocalizationError> {
    let d = denominators(taus, lambda, m)?;
    let n = d.len();
    let mut total = 0.0;
    for (a, da) in d.iter().enumerate() {
        let j = 2 * a as i64 - m;
        let mut row = 0.0;
        for (b, db) in d.iter().enumerate().take(n) {
            let k = 2 * b as i64 - m;
            let rv = r.get(j + k);
            row += rv * rv * db;
        }
        total += row * da;
    }
    Ok(total)
}

/// Both sides of the two inequalities of the summation inequalities:
/// `Σ_{k≠n} r(n+k)²/|n−k| ≤ ‖r‖²/|n| + E_{|n|}²` and
/// `Σ_{i,k≠n} r(i+k)²/(|n−i||n−k|) ≤ 12(‖r‖²/√|n| + E_{|n|}²)`.
/// The double sum is evaluated in closed form over all of `2ℤ × 2ℤ`.
pub fn check_t1_t2(r: &EvenSeq, n: i64) -> (f64, f64, f64, f64) {
    assert!(n != 0 && n % 2 == 0, "n must be a non-zero even integer");
    let norm2 = r.norm_sqr();
    let tail2 = r.tail_sqr(n);
    let mut lhs1 = 0.0;
    let mut lhs2 = 0.0;
    for s in (-r.half_range..=r.half_range).step_by(2) {
        let rv = r.get(s);
        if rv == 0.0 {
            continue;
        }
        let k = s - n;
        if k != n {
            lhs1 += rv * rv / (n - k).abs() as f64;
        }
        lhs2 += rv * rv * pair_sum_coefficient(s, n);
    }
    let rhs1 = norm2 / n.abs() as f64 + tail2;
    let rhs2 = 12.0 * (norm2 / (n.abs() as f64).sqrt() + tail2);
    (lhs1, rhs1, lhs2, rhs2)
}

/// `Σ_{i+k=s; i,k ≠ n} 1/(|n−i||n−k|)` over even `i`.
pub fn pair_sum_coefficient(s: i64, n: i64) -> f64 {
    let delta = ((s - 2 * n) / 2).unsigned_abs() as usize;
    if delta == 0 {
        return PI * PI / 12.0;
    }
    let h = |k: usize| (1..=k).map(|i| 1.0 / i as f64).sum::<f64>();
    (h(delta) + h(delta - 1)) / (2.0 * delta as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
    pub m: i64,
    /// Branch for strictly regular conditions; `None` for the merged discs.
    pub branch: Option<usize>,
}

impl Disc {
    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn boundary_points(&self, count: usize) -> Vec<C64> {
        (0..count)
            .map(|j| self.center + C64::from_polar(self.radius, 2.0 * PI * (j as f64 + 0.5) / count as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub center_re: f64,
    pub half_width: f64,
    pub half_height: f64,
}

impl Rect {
    pub fn contains(&self, z: C64) -> bool {
        (z.re - self.center_re).abs() < self.half_width && z.im.abs() < self.half_height
    }

    /// Counter-clockwise vertices starting from the lower-left corner.
    pub fn vertices(&self) -> [C64; 4] {
        let (c, w, h) = (self.center_re, self.half_width, self.half_height);
        [C64::new(c - w, -h), C64::new(c + w, -h), C64::new(c + w, h), C64::new(c - w, h)]
    }

    /// `per_side` points on each side; vertical sides are sampled densely
    /// near the real axis.
    pub fn boundary_points(&self, per_side: usize) -> Vec<C64> {
        let (c, w, h) = (self.center_re, self.half_width, self.half_height);
        let mut pts = Vec::with_capacity(4 * per_side);
        for j in 0..per_side {
            let t = (j as f64 + 0.5) / per_side as f64;
            let x = c - w + 2.0 * w * t;
            pts.push(C64::new(x, -h));
            pts.push(C64::new(x, h));
            let s = 2.0 * j as f64 / (per_side - 1).max(1) as f64 - 1.0;
            let y = h * s * s.abs();
            pts.push(C64::new(c - w, y));
            pts.push(C64::new(c + w, y));
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationPlan {
    pub n: i64,
    pub t: f64,
    /// Height from the closed-form formula `2·max(|Im τ|, C·κ_safe·‖r‖²)`.
    pub t_formula: f64,
    pub rho: f64,
    pub rect: Rect,
    /// Discs for `N < |m| ≤ M/2`, ordered by `|m|`, then sign, then branch.
    pub discs: Vec<Disc>,
    /// Smallest `N` certified by the closed-form bound, if one exists within `|m| ≤ 4M`.
    pub n_certificate: Option<i64>,
    pub kappa: f64,
    pub riesz: RieszConstants,
    pub threshold: f64,
    pub m: i64,
    /// Largest `κ²·hs_weighted_sum` over all sampled boundary points.
    pub worst_boundary_value: f64,
    pub strict: bool,
}

impl LocalizationPlan {
    pub fn trusted_half_band(&self) -> i64 {
        self.m / 2
    }

    pub fn disc(&self, m: i64, branch: Option<usize>) -> Option<&Disc> {
        self.discs.iter().find(|d| d.m == m && d.branch == branch)
    }

    /// Number of free eigenvalues (with multiplicity) inside the rectangle.
    pub fn free_rect_count(&self, fam: &BasisFamily) -> usize {
        let spec = fam.free_spectrum(self.m);
        spec.eigenvalues
            .iter()
            .filter(|e| self.rect.contains(e.value))
            .map(|e| e.algebraic as usize)
            .sum()
    }

    /// Same plan with a different rectangle half-width `n + 1`.
    pub fn with_rect_n(&self, n: i64) -> LocalizationPlan {
        let mut p = self.clone();
        p.n = n;
        p.rect.half_width = (n + 1) as f64;
        p.discs = self.discs.iter().copied().filter(|d| d.m.abs() > n).collect();
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOptions {
    pub threshold: f64,
    pub disc_samples: usize,
    pub rect_samples: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD, disc_samples: 16, rect_samples: 64 }
    }
}

/// Discs centred at `τ_μ + m` (or `τ⋆ + m`) for `lo < |m| ≤ hi`.
pub fn disc_family(fam: &BasisFamily, lo: i64, hi: i64) -> Vec<Disc> {
    let mut out = Vec::new();
    let mut mm = lo + 2 - (lo % 2);
    while mm <= hi {
        for m in [-mm, mm] {
            match fam.cd.taus {
                Taus::Pair(..) => {
                    let radius = fam.cd.rho.expect("strictly regular data carries rho");
                    for mu in 0..2 {
                        out.push(Disc { center: fam.lambda0(mu, m), radius, m, branch: Some(mu) });
                    }
                }
                Taus::Single(_) => {
                    out.push(Disc { center: fam.lambda0(0, m), radius: NON_STRICT_RADIUS, m, branch: None });
                }
            }
        }
        mm += 2;
    }
    out
}

/// Right-hand side of the disc bound for `|m|`.
pub fn disc_bound(r: &EvenSeq, rho: f64, strict: bool, m: i64) -> f64 {
    let c = if strict { (30.0 / rho).powi(2) } else { NON_STRICT_DISC_CONSTANT };
    c * (r.norm_sqr() / (m.abs() as f64).sqrt() + r.tail_sqr(m))
}

/// Selects `T` and the smallest practical even `N`.
pub fn make_plan(fam: &BasisFamily, wt: &WTable, options: PlanOptions) -> Result<LocalizationPlan, LocalizationError> {
    let m = wt.m;
    if m < 8 {
        return Err(LocalizationError::TruncationTooSmall(m));
    }
    let thr = options.threshold;
    let thr2 = thr * thr;
    let riesz = fam.riesz_constants(m)?;
    let kappa = riesz.kappa();
    let k2 = kappa * kappa;
    let r = EvenSeq::from_table(wt);
    let r2 = r.norm_sqr();
    let strict = fam.is_strict();
    let taus = fam.cd.taus;
    let rho = fam.cd.rho.unwrap_or(NON_STRICT_RADIUS);
    let rect_const = if strict { STRICT_RECT_CONSTANT } else { NON_STRICT_RECT_CONSTANT };
    let max_im = taus.max_abs_im();
    let t_formula = 2.0 * max_im.max(rect_const * 2.0 * kappa * r2);
    let t_cert = rect_const * k2 * r2 / thr2 * (1.0 + 1e-9);
    let t = t_formula.max(t_cert).max(max_im + 1.0);

    let n_certificate = {
        let mut found = None;
        let mut n = 2;
        while n + 2 <= 4 * m {
            if k2 * disc_bound(&r, rho, strict, n + 2) < thr2 {
                found = Some(n);
                break;
            }
            n += 2;
        }
        found
    };

    let half = m / 2;
    let center_re = taus.center_re();
    // Largest sampled value per disc, for every disc in the trusted band.
    let all_discs = disc_family(fam, 0, half);
    let disc_values: Vec<f64> = all_discs
        .par_iter()
        .map(|d| -> Result<f64, LocalizationError> {
            let mut worst = 0.0f64;
            for z in d.boundary_points(options.disc_samples) {
                worst = worst.max(k2 * hs_weighted_sum(&r, &taus, z, m)?);
            }
            Ok(worst)
        })
        .collect::<Result<_, _>>()?;
    let per_side = (options.rect_samples / 4).max(2);
    let mut worst_seen = 0.0f64;
    let mut n = 2;
    while n < half {
        let discs_ok = all_discs
            .iter()
            .zip(&disc_values)
            .filter(|(d, _)| d.m.abs() > n)
            .all(|(_, &val)| val < thr2);
        if discs_ok {
            let rect = Rect { center_re, half_width: (n + 1) as f64, half_height: t };
            let rect_vals: Vec<f64> = rect
                .boundary_points(per_side)
                .par_iter()
                .map(|&z| hs_weighted_sum(&r, &taus, z, m).map(|s| k2 * s))
                .collect::<Result<_, _>>()?;
            let rect_worst = rect_vals.iter().copied().fold(0.0, f64::max);
            if rect_worst < thr2 {
                let disc_worst = all_discs
                    .iter()
                    .zip(&disc_values)
                    .filter(|(d, _)| d.m.abs() > n)
                    .map(|(_, &v)| v)
                    .fold(0.0, f64::max);
                let discs = all_discs.iter().copied().filter(|d| d.m.abs() > n).collect();
                return Ok(LocalizationPlan {
                    n,
                    t,
                    t_formula,
                    rho,
                    rect,
                    discs,
                    n_certificate,
                    kappa,
                    riesz,
                    threshold: thr,
                    m,
                    worst_boundary_value: rect_worst.max(disc_worst),
                    strict,
                });
            }
            worst_seen = worst_seen.max(rect_worst);
        }
        n += 2;
    }
    let worst = disc_values.iter().copied().fold(worst_seen, f64::max);
    Err(LocalizationError::NoFiniteN { limit: half, worst })
}
