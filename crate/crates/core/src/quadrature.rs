//! Quadrature rules on `[0, π]` and in the complex plane, plus the
//! endpoint-corrected FFT used for even-frequency Fourier coefficients.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use rustfft::FftPlanner;

use crate::C64;

/// Reference Gauss–Legendre nodes and weights on `[-1, 1]`, sorted by node.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order must be positive"));
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// A set of real nodes with weights.
#[derive(Debug, Clone)]
pub struct RealRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RealRule {
    /// Composite Gauss–Legendre rule with `order` nodes on each panel
    /// between consecutive `breaks`.
    pub fn composite(breaks: &[f64], order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * breaks.len());
        let mut weights = Vec::with_capacity(order * breaks.len());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Self { nodes, weights }
    }

    /// Composite rule on `[0, π]` with `panels` equal panels.
    pub fn on_interval(panels: usize, order: usize) -> Self {
        let breaks: Vec<f64> = (0..=panels).map(|i| PI * i as f64 / panels as f64).collect();
        Self::composite(&breaks, order)
    }

    /// Composite rule on `[0, π]` whose panels are additionally split at the
    /// given interior points.
    pub fn on_interval_with_breaks(panels: usize, order: usize, extra: &[f64]) -> Self {
        let mut breaks: Vec<f64> = (0..=panels).map(|i| PI * i as f64 / panels as f64).collect();
        breaks.extend(extra.iter().copied().filter(|x| *x > 0.0 && *x < PI));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        Self::composite(&breaks, order)
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// Nodes `z_q` and weights `ω_q` of a complex contour rule, so that
/// `(1/2πi)∮ f(λ) dλ ≈ Σ ω_q f(z_q)`.
#[derive(Debug, Clone)]
pub struct ContourRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl ContourRule {
    /// Trapezoidal rule on the circle `|λ − center| = radius`.
    pub fn circle(center: C64, radius: f64, q: usize) -> Self {
        let mut nodes = Vec::with_capacity(q);
        let mut weights = Vec::with_capacity(q);
        for j in 0..q {
            let theta = 2.0 * PI * j as f64 / q as f64;
            let e = C64::from_polar(radius, theta);
            nodes.push(center + e);
            // dλ = i e dθ, and 1/(2πi) · i e · 2π/q = e/q.
            weights.push(e / q as f64);
        }
        Self { nodes, weights }
    }

    /// Counter-clockwise polygonal contour with Gauss–Legendre panels.
    /// Each side is subdivided at the given parameter breakpoints in `[0, 1]`.
    pub fn polygon(vertices: &[C64], side_breaks: &[Vec<f64>], order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let n = vertices.len();
        for s in 0..n {
            let (z0, z1) = (vertices[s], vertices[(s + 1) % n]);
            let dz = z1 - z0;
            for pair in side_breaks[s].windows(2) {
                let (t0, t1) = (pair[0], pair[1]);
                let half = 0.5 * (t1 - t0);
                let mid = 0.5 * (t0 + t1);
                for (xi, wi) in x.iter().zip(&w) {
                    let t = mid + half * xi;
                    nodes.push(z0 + dz * t);
                    weights.push(dz * (half * wi) / C64::new(0.0, 2.0 * PI));
                }
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Breakpoints in `[0, 1]` for a side of length `len` whose closest approach
/// to the spectrum is at parameter `t_near`, with panels growing
/// geometrically away from it; `h0` is the size of the innermost panels.
pub fn graded_breaks(len: f64, t_near: f64, h0: f64, ratio: f64, max_panel: f64) -> Vec<f64> {
    let mut pts = vec![t_near * len];
    // Walk towards both ends.
    for dir in [-1.0f64, 1.0] {
        let mut pos = t_near * len;
        let mut h = h0;
        loop {
            let next = pos + dir * h;
            if (dir < 0.0 && next <= 1e-12) || (dir > 0.0 && next >= len - 1e-12) {
                break;
            }
            pts.push(next);
            pos = next;
            h = (h * ratio).min(max_panel);
        }
    }
    pts.push(0.0);
    pts.push(len);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * len.max(1.0));
    pts.into_iter().map(|p| p / len).collect()
}

/// Bernoulli numbers `B₂, B₄, …, B₁₂`.
const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Finite-difference weights (Fornberg) for derivatives of order
/// `0..=max_deriv` at `x0` from samples at `xs`. Returns `w[m][j]`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Fourier coefficients `f̂(m) = (1/π)∫₀^π f(x) e^{−imx} dx` for even `m` with
/// `|m| ≤ 2·half_band`, from samples of `f` on the closed uniform grid with
/// `n + 1` points (`n` a power of two). The trapezoid sum is evaluated by FFT
/// and corrected with Euler–Maclaurin endpoint terms whose derivatives are
/// either supplied exactly or estimated by one-sided finite differences.
pub struct EvenFourier {
    n: usize,
    fft: Arc<dyn rustfft::Fft<f64>>,
    stencil: Vec<Vec<f64>>,
    stencil_len: usize,
}

/// Number of Euler–Maclaurin correction terms.
const EM_TERMS: usize = 6;
const MAX_DERIV: usize = 2 * EM_TERMS - 1;

impl EvenFourier {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 64, "grid size must be a power of two ≥ 64");
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let stencil_len = 16;
        let xs: Vec<f64> = (0..stencil_len).map(|j| j as f64).collect();
        let stencil = fornberg_weights(0.0, &xs, MAX_DERIV);
        Self { n, fft, stencil, stencil_len }
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    /// Endpoint derivatives `f^{(p)}(0)` and `f^{(p)}(π)`, `p = 0..=11`,
    /// estimated from the samples.
    pub fn endpoint_derivatives(&self, samples: &[C64]) -> ([C64; MAX_DERIV + 1], [C64; MAX_DERIV + 1]) {
        let n = self.n;
        let h = PI / n as f64;
        let mut left = [C64::new(0.0, 0.0); MAX_DERIV + 1];
        let mut right = [C64::new(0.0, 0.0); MAX_DERIV + 1];
        for p in 0..=MAX_DERIV {
            let scale = h.powi(p as i32);
            let mut l = C64::new(0.0, 0.0);
            let mut r = C64::new(0.0, 0.0);
            for j in 0..self.stencil_len {
                let w = self.stencil[p][j];
                l += samples[j] * w;
                // Mirror the stencil: the offset of −jh flips the sign of odd derivatives.
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                r += samples[n - j] * (w * sign);
            }
            left[p] = l / scale;
            right[p] = r / scale;
        }
        left[0] = samples[0];
        right[0] = samples[n];
        (left, right)
    }

    /// Coefficients indexed by `m/2 + half_band`, from samples and
    /// endpoint-derivative estimates.
    pub fn coefficients(&self, samples: &[C64], half_band: usize) -> Vec<C64> {
        let (left, right) = self.endpoint_derivatives(samples);
        self.coefficients_with_derivatives(samples, half_band, &left, &right)
    }

    pub fn coefficients_with_derivatives(
        &self,
        samples: &[C64],
        half_band: usize,
        left: &[C64],
        right: &[C64],
    ) -> Vec<C64> {
        let n = self.n;
        assert_eq!(samples.len(), n + 1, "sample count must match the grid");
        assert!(half_band < n / 2, "frequency band exceeds the grid resolution");
        let h = PI / n as f64;
        let mut buf: Vec<C64> = samples[..n].to_vec();
        self.fft.process(&mut buf);
        let endpoint = (samples[n] - samples[0]) * 0.5;
        let mut out = Vec::with_capacity(2 * half_band + 1);
        for l in -(half_band as i64)..=(half_band as i64) {
            let m = 2 * l;
            // e^{−imx_j} with x_j = jπ/n and m = 2l is the DFT kernel at index l.
            let idx = l.rem_euclid(n as i64) as usize;
            let trap = (buf[idx] + endpoint) * h;
            let im = C64::new(0.0, -(m as f64));
            let mut corr = C64::new(0.0, 0.0);
            let mut hpow = h * h;
            let mut fact = 2.0;
            for k in 1..=EM_TERMS {
                let q = 2 * k - 1;
                let dq = leibniz_with_phase(right, q, im) - leibniz_with_phase(left, q, im);
                corr += dq * (BERNOULLI_EVEN[k - 1] * hpow / fact);
                hpow *= h * h;
                fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
            }
            out.push((trap - corr) / PI);
        }
        out
    }
}

/// `q`-th derivative of `f(x) e^{−imx}` at an endpoint where the phase equals one,
/// given `f^{(p)}` there; `im = −i m`.
fn leibniz_with_phase(derivs: &[C64], q: usize, im: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut binom = 1.0;
    let mut pow = C64::new(1.0, 0.0);
    // Σ_p C(q,p) f^{(p)} (−im)^{q−p}, accumulated from p = q downwards.
    for p in (0..=q).rev() {
        acc += derivs[p] * pow * binom;
        pow *= im;
        binom = binom * p as f64 / (q - p + 1) as f64;
    }
    acc
}
