//! The potential `v = [[0, P], [Q, 0]]` and the Fourier matrix elements of
//! `V` in Φ-coordinates.
//!
//! With amplitudes `a^ν` of Φ and `b^μ` of Φ̃, every element depends on
//! `j + k` only:
//!
//! ```text
//! ⟨Vφ^ν_k, φ̃^μ_j⟩ = w^{μν}(j+k) = ĝP(−(j+k)) + ĥQ(j+k),
//! g^{μν} = a^ν₂ · conj(b^μ₁),   h^{μν} = a^ν₁ · conj(b^μ₂),
//! ```
//!
//! where `f̂(m) = (1/π)∫₀^π f(x) e^{−imx} dx`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expoly::ExpPoly;
use crate::free_basis::BasisFamily;
use crate::quadrature::{EvenFourier, RealRule};
use crate::C64;

/// Default grid exponent: the standard grid has `2^12 + 1` points.
pub const DEFAULT_GRID_Q: u32 = 12;
/// Fast/slow validation tolerance.
pub const FAST_SLOW_TOL: f64 = 1e-8;
/// Number of random `(j, k)` pairs used to validate the fast path.
pub const VALIDATION_PAIRS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("FastSlowMismatch: fast and direct matrix elements differ by {diff:e} at (mu={mu}, nu={nu}, j={j}, k={k})")]
    FastSlowMismatch { mu: usize, nu: usize, j: i64, k: i64, diff: f64 },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
}

/// One off-diagonal entry of the potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Zero,
    /// Coefficients on `{e^{imx} : m even}`.
    Fourier(BTreeMap<i64, C64>),
    /// Samples on the closed uniform grid `x_j = jπ/n`, `j = 0..=n`.
    Samples(Vec<C64>),
}

impl Component {
    pub fn fourier(modes: &[(i64, C64)]) -> Result<Self, PotentialError> {
        let mut map = BTreeMap::new();
        for &(m, c) in modes {
            if m % 2 != 0 {
                return Err(PotentialError::InvalidSpec(format!("odd harmonic {m}")));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(PotentialError::InvalidSpec("non-finite coefficient".into()));
            }
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(Component::Fourier(map))
    }

    pub fn samples(values: Vec<C64>) -> Result<Self, PotentialError> {
        let n = values.len().saturating_sub(1);
        if !n.is_power_of_two() || n < 64 {
            return Err(PotentialError::InvalidSpec(format!(
                "sample count {} is not 2^q + 1 with q >= 6",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PotentialError::InvalidSpec("non-finite sample".into()));
        }
        Ok(Component::Samples(values))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Component::Zero => true,
            Component::Fourier(m) => m.values().all(|c| c.norm() == 0.0),
            Component::Samples(s) => s.iter().all(|c| c.norm() == 0.0),
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Component::Zero => C64::new(0.0, 0.0),
            Component::Fourier(m) => m.iter().map(|(&k, &c)| c * C64::from_polar(1.0, k as f64 * x)).sum(),
            Component::Samples(s) => interpolate(s, x),
        }
    }

    /// `q`-th derivative; exact for Fourier components only.
    fn derivative(&self, q: usize, x: f64) -> Option<C64> {
        match self {
            Component::Zero => Some(C64::new(0.0, 0.0)),
            Component::Fourier(m) => Some(
                m.iter()
                    .map(|(&k, &c)| c * C64::new(0.0, k as f64).powu(q as u32) * C64::from_polar(1.0, k as f64 * x))
                    .sum(),
            ),
            Component::Samples(_) => None,
        }
    }

    /// `‖·‖` under the normalized inner product `(1/π)∫₀^π`.
    pub fn norm(&self) -> f64 {
        match self {
            Component::Zero => 0.0,
            Component::Fourier(m) => m.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            Component::Samples(s) => {
                let n = s.len() - 1;
                let ef = EvenFourier::new(n);
                let sq: Vec<C64> = s.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
                ef.coefficients(&sq, 0)[0].re.max(0.0).sqrt()
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Component::Zero => 0.0,
            Component::Fourier(m) => m.values().map(|c| c.norm()).sum(),
            Component::Samples(s) => s.iter().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }

    fn scaled(&self, f: f64) -> Component {
        match self {
            Component::Zero => Component::Zero,
            Component::Fourier(m) => Component::Fourier(m.iter().map(|(&k, &c)| (k, c * f)).collect()),
            Component::Samples(s) => Component::Samples(s.iter().map(|c| c * f).collect()),
        }
    }

    fn samples_on(&self, n: usize) -> Result<Vec<C64>, PotentialError> {
        match self {
            Component::Samples(s) if s.len() != n + 1 => Err(PotentialError::InvalidSpec(format!(
                "sample count {} does not match the standard grid ({} points)",
                s.len(),
                n + 1
            ))),
            Component::Samples(s) => Ok(s.clone()),
            _ => Ok((0..=n).map(|j| self.eval(PI * j as f64 / n as f64)).collect()),
        }
    }
}

/// Local Lagrange interpolation of degree 9 on the uniform grid.
fn interpolate(s: &[C64], x: f64) -> C64 {
    const WIDTH: usize = 10;
    let n = s.len() - 1;
    let h = PI / n as f64;
    let t = (x / h).clamp(0.0, n as f64);
    let nearest = t.round();
    if (t - nearest).abs() < 1e-12 {
        return s[nearest as usize];
    }
    let start = ((t.floor() as i64) - (WIDTH as i64 / 2 - 1)).clamp(0, (n + 1 - WIDTH) as i64) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..WIDTH {
        let xi = (start + i) as f64;
        let mut li = 1.0;
        for j in 0..WIDTH {
            if j != i {
                let xj = (start + j) as f64;
                li *= (t - xj) / (xi - xj);
            }
        }
        acc += s[start + i] * li;
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub p: Component,
    pub q: Component,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self { p: Component::Zero, q: Component::Zero }
    }

    pub fn new(p: Component, q: Component) -> Self {
        Self { p, q }
    }

    /// `P = p_coeff·e^{i m x}`, `Q = q_coeff·e^{i m x}`.
    pub fn single_mode(m: i64, p_coeff: C64, q_coeff: C64) -> Result<Self, PotentialError> {
        Ok(Self {
            p: Component::fourier(&[(m, p_coeff)])?,
            q: Component::fourier(&[(m, q_coeff)])?,
        })
    }

    /// `Q = conj(P)`, which makes `v` Hermitian pointwise.
    pub fn hermitian(p: &[(i64, C64)]) -> Result<Self, PotentialError> {
        let q: Vec<(i64, C64)> = p.iter().map(|&(m, c)| (-m, c.conj())).collect();
        Ok(Self { p: Component::fourier(p)?, q: Component::fourier(&q)? })
    }

    /// Random trigonometric polynomial with even harmonics `|m| ≤ max_harmonic`,
    /// scaled so that `‖P‖² + ‖Q‖² = norm²`.
    pub fn random_trig(seed: u64, max_harmonic: i64, norm: f64) -> Result<Self, PotentialError> {
        if max_harmonic < 0 || max_harmonic % 2 != 0 || !(norm >= 0.0) {
            return Err(PotentialError::InvalidSpec("random potential needs an even harmonic bound and norm >= 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> Vec<(i64, C64)> {
            (-max_harmonic..=max_harmonic)
                .step_by(2)
                .map(|m| (m, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect()
        };
        let (p, q) = (draw(), draw());
        let total: f64 = p.iter().chain(&q).map(|(_, c)| c.norm_sqr()).sum();
        let f = if total > 0.0 { norm / total.sqrt() } else { 0.0 };
        let scale = |v: Vec<(i64, C64)>| v.into_iter().map(|(m, c)| (m, c * f)).collect::<Vec<_>>();
        Ok(Self { p: Component::fourier(&scale(p))?, q: Component::fourier(&scale(q))? })
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// `‖v‖ = (‖P‖² + ‖Q‖²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.p.norm().powi(2) + self.q.norm().powi(2)).sqrt()
    }

    /// `ζ·v`.
    pub fn scaled(&self, zeta: f64) -> Self {
        Self { p: self.p.scaled(zeta), q: self.q.scaled(zeta) }
    }
}

/// Sequences `w^{μν}(m)`, `|m| ≤ 2M`, with the dominating sequence `r` and its tails.
#[derive(Debug, Clone, Serialize)]
pub struct WTable {
    /// Truncation `M`; sequences cover `|m| ≤ 2M`.
    pub m: i64,
    /// `w[μ][ν][(m + 2M)/2]`.
    pub w: [[Vec<C64>; 2]; 2],
    /// `r[(m + 2M)/2] = max_{μν} |w^{μν}(m)|`.
    pub r: Vec<f64>,
    /// `tails[m/2] = E_m(r)` for `m = 0, 2, …, 2M`.
    pub tails: Vec<f64>,
    pub norm: f64,
    /// `sup|g^{μν}|·‖P‖ + sup|h^{μν}|·‖Q‖`, the Parseval-type bound on `‖w^{μν}‖`.
    pub parseval_bound: [[f64; 2]; 2],
    /// Largest fast/slow discrepancy seen during validation.
    pub validation_error: f64,
}

impl WTable {
    pub fn range(&self) -> i64 {
        2 * self.m
    }

    fn slot(&self, m: i64) -> Option<usize> {
        if m % 2 != 0 || m.abs() > 2 * self.m {
            None
        } else {
            Some(((m + 2 * self.m) / 2) as usize)
        }
    }

    /// `w^{μν}(m)`, zero outside the computed range.
    pub fn get(&self, mu: usize, nu: usize, m: i64) -> C64 {
        self.slot(m).map_or(C64::new(0.0, 0.0), |s| self.w[mu][nu][s])
    }

    pub fn r_at(&self, m: i64) -> f64 {
        self.slot(m).map_or(0.0, |s| self.r[s])
    }

    /// `E_m(r)` for `m ≥ 0`; zero beyond the computed range.
    pub fn tail(&self, m: i64) -> f64 {
        let m = m.unsigned_abs() as usize;
        let idx = m.div_ceil(2);
        self.tails.get(idx).copied().unwrap_or(0.0)
    }

    /// `‖w^{μν}‖_{ℓ²}` over the computed range.
    pub fn seq_norm(&self, mu: usize, nu: usize) -> f64 {
        self.w[mu][nu].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().all(|&x| x == 0.0)
    }
}

/// Envelopes `(g^{μν}, h^{μν})` as exponential polynomials.
pub fn envelopes(fam: &BasisFamily, mu: usize, nu: usize) -> (ExpPoly, ExpPoly) {
    let g = fam.amplitude(nu, 1) * fam.dual_amplitude(mu, 0).conj();
    let h = fam.amplitude(nu, 0) * fam.dual_amplitude(mu, 1).conj();
    (g, h)
}

fn sup_on_interval(f: &ExpPoly) -> f64 {
    (0..=512).map(|i| f.eval(PI * i as f64 / 512.0).norm()).fold(0.0, f64::max)
}

/// Direct quadrature of `⟨Vφ^ν_k, φ̃^μ_j⟩` from the basis evaluators.
pub fn v_matrix_element(fam: &BasisFamily, v: &PotentialSpec, mu: usize, nu: usize, j: i64, k: i64) -> C64 {
    if v.is_zero() {
        return C64::new(0.0, 0.0);
    }
    let panels = 64usize.max(((j.abs() + k.abs()) as f64 * PI / 8.0).ceil() as usize);
    let rule = RealRule::on_interval(panels, 16);
    let phi = fam.phi(nu, k);
    let tilde = fam.phi_tilde(mu, j);
    rule.integrate(|x| {
        let f = [phi[0].eval(x), phi[1].eval(x)];
        let g = [tilde[0].eval(x), tilde[1].eval(x)];
        v.p.eval(x) * f[1] * g[0].conj() + v.q.eval(x) * f[0] * g[1].conj()
    }) / PI
}

/// Fourier coefficients of `env·comp` for `|m| ≤ 2M`, indexed by `m/2 + M`.
fn product_coefficients(ef: &EvenFourier, env: &ExpPoly, comp: &Component, m: i64) -> Result<Vec<C64>, PotentialError> {
    let n = ef.grid_size();
    let half_band = m as usize;
    if comp.is_zero() {
        return Ok(vec![C64::new(0.0, 0.0); 2 * half_band + 1]);
    }
    let vals = comp.samples_on(n)?;
    let samples: Vec<C64> = vals
        .iter()
        .enumerate()
        .map(|(j, &p)| env.eval(PI * j as f64 / n as f64) * p)
        .collect();
    const ORDERS: usize = 12;
    let exact = |x: f64| -> Option<Vec<C64>> {
        (0..ORDERS)
            .map(|q| {
                let mut acc = C64::new(0.0, 0.0);
                let mut binom = 1.0;
                for p in 0..=q {
                    acc += env.derivative(p, x) * comp.derivative(q - p, x)? * binom;
                    binom = binom * (q - p) as f64 / (p + 1) as f64;
                }
                Some(acc)
            })
            .collect()
    };
    match (exact(0.0), exact(PI)) {
        (Some(l), Some(r)) => Ok(ef.coefficients_with_derivatives(&samples, half_band, &l, &r)),
        _ => Ok(ef.coefficients(&samples, half_band)),
    }
}

fn validation_pairs(m: i64, count: usize) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_7ab1e);
    let half = m / 2;
    (0..count)
        .map(|_| (2 * rng.gen_range(-half..=half), 2 * rng.gen_range(-half..=half)))
        .collect()
}

/// Builds the table on the standard grid with `2^q + 1` points.
pub fn build_w_table(fam: &BasisFamily, v: &PotentialSpec, m: i64) -> Result<WTable, PotentialError> {
    build_w_table_on_grid(fam, v, m, DEFAULT_GRID_Q)
}

pub fn build_w_table_on_grid(fam: &BasisFamily, v: &PotentialSpec, m: i64, grid_q: u32) -> Result<WTable, PotentialError> {
    if m < 0 || m % 2 != 0 {
        return Err(PotentialError::InvalidSpec(format!("truncation {m} must be a non-negative even integer")));
    }
    let len = (2 * m + 1) as usize;
    let zero_seq = || vec![C64::new(0.0, 0.0); len];
    let mut w = [[zero_seq(), zero_seq()], [zero_seq(), zero_seq()]];
    let mut parseval_bound = [[0.0; 2]; 2];
    let (pn, qn) = (v.p.norm(), v.q.norm());
    if !v.is_zero() {
        let n = 1usize << grid_q;
        if (2 * m) as usize >= n {
            return Err(PotentialError::InvalidSpec(format!("grid 2^{grid_q} too coarse for truncation {m}")));
        }
        let ef = EvenFourier::new(n);
        for mu in 0..2 {
            for nu in 0..2 {
                let (g, h) = envelopes(fam, mu, nu);
                let gp = product_coefficients(&ef, &g, &v.p, m)?;
                let hq = product_coefficients(&ef, &h, &v.q, m)?;
                // w(m) = ĝP(−m) + ĥQ(m); slot s ↔ frequency 2s − 2M.
                for s in 0..len {
                    w[mu][nu][s] = gp[len - 1 - s] + hq[s];
                }
                parseval_bound[mu][nu] = sup_on_interval(&g) * pn + sup_on_interval(&h) * qn;
            }
        }
    }
    let r: Vec<f64> = (0..len)
        .map(|s| (0..4).map(|t| w[t / 2][t % 2][s].norm()).fold(0.0, f64::max))
        .collect();
    let mut tails = vec![0.0; (m + 1) as usize];
    let mut acc = 0.0;
    for idx in (0..=m as usize).rev() {
        let mm = 2 * idx as i64;
        let plus = r[((mm + 2 * m) / 2) as usize];
        acc += plus * plus;
        if mm != 0 {
            let minus = r[((-mm + 2 * m) / 2) as usize];
            acc += minus * minus;
        }
        tails[idx] = acc.sqrt();
    }
    let norm = tails[0];
    let mut table = WTable { m, w, r, tails, norm, parseval_bound, validation_error: 0.0 };
    if !v.is_zero() {
        let mut worst = 0.0f64;
        for (j, k) in validation_pairs(m, VALIDATION_PAIRS) {
            for mu in 0..2 {
                for nu in 0..2 {
                    let slow = v_matrix_element(fam, v, mu, nu, j, k);
                    let diff = (slow - table.get(mu, nu, j + k)).norm();
                    worst = worst.max(diff);
                    if diff > FAST_SLOW_TOL {
                        return Err(PotentialError::FastSlowMismatch { mu, nu, j, k, diff });
                    }
                }
            }
        }
        table.validation_error = worst;
    }
    Ok(table)
}
