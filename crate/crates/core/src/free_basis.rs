//! The free eigen/associated system Φ, its biorthogonal system Φ̃, the
//! isomorphism `A` with `Φ = A(E)`, the free spectrum and Riesz constants.
//!
//! Every basis element has the form
//! `φ^ν_k(x) = (a^ν₁(x) e^{−ikx}, a^ν₂(x) e^{ikx})` with amplitudes that are
//! exponential polynomials of degree at most one, and likewise
//! `φ̃^μ_j(x) = (b^μ₁(x) e^{−ijx}, b^μ₂(x) e^{ijx})`. Branch `0` is φ¹ and
//! branch `1` is φ² (the associated function in the Jordan cases).

use std::f64::consts::PI;

use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

use crate::bc_algebra::{self, BcClass, BcError, CanonicalBc, CharData, Taus, VectorData};
use crate::expoly::ExpPoly;
use crate::linalg;
use crate::quadrature::RealRule;
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("GridNotReflective: sample grid is not symmetric under x -> pi - x")]
    GridNotReflective,
    #[error("NonPositiveGram: smallest Gram eigenvalue {0:e} is not positive")]
    NonPositiveGram(f64),
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Bc(#[from] BcError),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Index layout of the truncated coordinate space `{(μ, k) : k even, |k| ≤ M}`,
/// ordered by `k` with the two branches adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub m: i64,
}

impl Truncation {
    pub fn new(m: i64) -> Self {
        assert!(m >= 0 && m % 2 == 0, "truncation must be a non-negative even integer");
        Self { m }
    }

    /// Number of even `k` with `|k| ≤ M`.
    pub fn modes(&self) -> usize {
        (self.m + 1) as usize
    }

    pub fn dim(&self) -> usize {
        2 * self.modes()
    }

    pub fn index(&self, mu: usize, k: i64) -> usize {
        debug_assert!(k % 2 == 0 && k.abs() <= self.m && mu < 2);
        2 * ((k + self.m) / 2) as usize + mu
    }

    pub fn entry(&self, idx: usize) -> (usize, i64) {
        (idx % 2, 2 * (idx / 2) as i64 - self.m)
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        let m = self.m;
        (-m..=m).step_by(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeEigenvalue {
    pub value: C64,
    pub k: i64,
    /// `Some(branch)` for strictly regular conditions, `None` when both
    /// branches share the eigenvalue.
    pub branch: Option<usize>,
    pub algebraic: u8,
    pub geometric: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeSpectrum {
    pub eigenvalues: Vec<FreeEigenvalue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszConstants {
    pub norm_a: f64,
    pub norm_a_inv: f64,
    pub m: i64,
}

impl RieszConstants {
    pub fn kappa(&self) -> f64 {
        self.norm_a * self.norm_a_inv
    }
}

#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub bc: CanonicalBc,
    pub cd: CharData,
    pub vd: VectorData,
    pub class: BcClass,
    amp: [[ExpPoly; 2]; 2],
    dual: [[ExpPoly; 2]; 2],
}

impl BasisFamily {
    pub fn new(bc: CanonicalBc) -> Result<Self, BasisError> {
        let class = bc_algebra::classify(&bc);
        let cd = bc_algebra::char_data(&bc)?;
        let vd = bc_algebra::eigen_vectors(&bc, &cd)?;
        let (amp, dual) = if class.is_jordan() {
            jordan_amplitudes(&cd, &vd)
        } else {
            simple_amplitudes(&cd, &vd)
        };
        Ok(Self { bc, cd, vd, class, amp, dual })
    }

    pub fn tau(&self, mu: usize) -> C64 {
        self.cd.taus.branch(mu)
    }

    pub fn is_strict(&self) -> bool {
        self.class.is_strict()
    }

    pub fn is_jordan(&self) -> bool {
        self.class.is_jordan()
    }

    /// Free eigenvalue `τ_μ + k`.
    pub fn lambda0(&self, mu: usize, k: i64) -> C64 {
        self.tau(mu) + k as f64
    }

    /// Amplitude `a^ν_c` (component `c`) without the `e^{∓ikx}` factor.
    pub fn amplitude(&self, nu: usize, c: usize) -> ExpPoly {
        self.amp[nu][c]
    }

    /// Dual amplitude `b^μ_c`.
    pub fn dual_amplitude(&self, mu: usize, c: usize) -> ExpPoly {
        self.dual[mu][c]
    }

    pub fn phi(&self, mu: usize, k: i64) -> [ExpPoly; 2] {
        let ik = I * k as f64;
        [self.amp[mu][0].shift_rate(-ik), self.amp[mu][1].shift_rate(ik)]
    }

    pub fn phi_tilde(&self, mu: usize, j: i64) -> [ExpPoly; 2] {
        let ij = I * j as f64;
        [self.dual[mu][0].shift_rate(-ij), self.dual[mu][1].shift_rate(ij)]
    }

    pub fn eval_phi(&self, mu: usize, k: i64, x: f64) -> [C64; 2] {
        let p = self.phi(mu, k);
        [p[0].eval(x), p[1].eval(x)]
    }

    pub fn eval_phi_tilde(&self, mu: usize, k: i64, x: f64) -> [C64; 2] {
        let p = self.phi_tilde(mu, k);
        [p[0].eval(x), p[1].eval(x)]
    }

    pub fn adjoint_bc(&self) -> CanonicalBc {
        bc_algebra::adjoint_bc(&self.bc)
    }

    /// `A(f, g)` on a reflection-symmetric grid.
    pub fn apply_a(&self, xs: &[f64], fg: &[[C64; 2]]) -> Result<Vec<[C64; 2]>, BasisError> {
        check_grid(xs, fg.len())?;
        let n = xs.len();
        Ok((0..n)
            .map(|j| {
                let x = xs[j];
                let r = fg[n - 1 - j];
                [
                    self.amp[0][0].eval(x) * r[0] + self.amp[1][0].eval(x) * r[1],
                    self.amp[0][1].eval(x) * fg[j][0] + self.amp[1][1].eval(x) * fg[j][1],
                ]
            })
            .collect())
    }

    /// `A⁻¹(u)`: at each `x` the pair `(f(x), g(x))` solves the 2×2 system
    /// formed by the first component at `π − x` and the second at `x`.
    pub fn apply_a_inv(&self, xs: &[f64], u: &[[C64; 2]]) -> Result<Vec<[C64; 2]>, BasisError> {
        check_grid(xs, u.len())?;
        let n = xs.len();
        Ok((0..n)
            .map(|j| {
                let x = xs[j];
                let xr = xs[n - 1 - j];
                let m00 = self.amp[0][0].eval(xr);
                let m01 = self.amp[1][0].eval(xr);
                let m10 = self.amp[0][1].eval(x);
                let m11 = self.amp[1][1].eval(x);
                let det = m00 * m11 - m01 * m10;
                let r0 = u[n - 1 - j][0];
                let r1 = u[j][1];
                [(m11 * r0 - m01 * r1) / det, (m00 * r1 - m10 * r0) / det]
            })
            .collect())
    }

    /// Gram matrix `G_{αβ} = ⟨φ_β, φ_α⟩` of the truncated system by quadrature.
    pub fn gram_matrix(&self, tr: Truncation, rule: &RealRule) -> Array2<C64> {
        let vals = self.sample_basis(tr, rule);
        // G = Φᴴ W Φ with Φ the (node × component, basis) value matrix.
        let weighted = Array2::from_shape_fn(vals.dim(), |(r, c)| vals[[r, c]] * (rule.weights[r / 2] / PI));
        linalg::conj_transpose(&weighted).dot(&vals)
    }

    /// Values `φ^μ_k` at each rule node: rows `2·node + component`.
    pub fn sample_basis(&self, tr: Truncation, rule: &RealRule) -> Array2<C64> {
        let nodes = &rule.nodes;
        let mut out = Array2::zeros((2 * nodes.len(), tr.dim()));
        for idx in 0..tr.dim() {
            let (mu, k) = tr.entry(idx);
            let p = self.phi(mu, k);
            for (r, &x) in nodes.iter().enumerate() {
                out[[2 * r, idx]] = p[0].eval(x);
                out[[2 * r + 1, idx]] = p[1].eval(x);
            }
        }
        out
    }

    /// Exact Gram matrix of the truncated system. Entries depend on `(μ, ν, k − j)`
    /// only, so `4(2M + 1)` closed-form integrals suffice.
    pub fn gram_matrix_exact(&self, tr: Truncation) -> Array2<C64> {
        let m = tr.m;
        let mut table = vec![[[C64::new(0.0, 0.0); 2]; 2]; (2 * m + 1) as usize];
        for (slot, diff) in (-2 * m..=2 * m).step_by(2).enumerate() {
            for (mu, row) in table[slot].iter_mut().enumerate() {
                for (nu, cell) in row.iter_mut().enumerate() {
                    *cell = inner_exact(&self.phi(nu, diff), &self.phi(mu, 0));
                }
            }
        }
        Array2::from_shape_fn((tr.dim(), tr.dim()), |(r, c)| {
            let (mu, j) = tr.entry(r);
            let (nu, k) = tr.entry(c);
            table[((k - j + 2 * m) / 2) as usize][mu][nu]
        })
    }

    /// Extreme singular values of the synthesis map on the truncated span,
    /// from the exact Gram matrix.
    pub fn riesz_constants(&self, m: i64) -> Result<RieszConstants, BasisError> {
        assert!(m >= 8 && m % 2 == 0, "truncation must be even and at least 8");
        let g = self.gram_matrix_exact(Truncation::new(m));
        let ev = linalg::hermitian_eigenvalues(&g).map_err(|e| BasisError::Linalg(e.to_string()))?;
        let lmin = ev.iter().copied().fold(f64::INFINITY, f64::min);
        let lmax = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lmin > 0.0) {
            return Err(BasisError::NonPositiveGram(lmin));
        }
        Ok(RieszConstants { norm_a: lmax.sqrt(), norm_a_inv: 1.0 / lmin.sqrt(), m })
    }

    pub fn free_spectrum(&self, m: i64) -> FreeSpectrum {
        let tr = Truncation::new(m);
        let mut eigenvalues = Vec::new();
        match self.cd.taus {
            Taus::Pair(..) => {
                for k in tr.ks() {
                    for mu in 0..2 {
                        eigenvalues.push(FreeEigenvalue {
                            value: self.lambda0(mu, k),
                            k,
                            branch: Some(mu),
                            algebraic: 1,
                            geometric: 1,
                        });
                    }
                }
            }
            Taus::Single(_) => {
                let geometric = if self.is_jordan() { 1 } else { 2 };
                for k in tr.ks() {
                    eigenvalues.push(FreeEigenvalue {
                        value: self.lambda0(0, k),
                        k,
                        branch: None,
                        algebraic: 2,
                        geometric,
                    });
                }
            }
        }
        eigenvalues.sort_by(|x, y| x.value.re.total_cmp(&y.value.re).then(x.value.im.total_cmp(&y.value.im)));
        FreeSpectrum { eigenvalues }
    }
}

/// Inner product `⟨f, g⟩ = (1/π)∫₀^π (f₁ ḡ₁ + f₂ ḡ₂) dx` of exponential-polynomial pairs.
pub fn inner_exact(f: &[ExpPoly; 2], g: &[ExpPoly; 2]) -> C64 {
    ((f[0] * g[0].conj()).integral(0.0, PI) + (f[1] * g[1].conj()).integral(0.0, PI)) / PI
}

fn check_grid(xs: &[f64], len: usize) -> Result<(), BasisError> {
    if xs.len() != len {
        return Err(BasisError::LengthMismatch { got: len, expected: xs.len() });
    }
    let n = xs.len();
    let reflective = (0..n).all(|j| (xs[j] + xs[n - 1 - j] - PI).abs() <= 1e-13);
    if !reflective {
        return Err(BasisError::GridNotReflective);
    }
    Ok(())
}

/// The standard closed uniform grid with `2^q + 1` points on `[0, π]`.
pub fn standard_grid(q: u32) -> Vec<f64> {
    let n = 1usize << q;
    (0..=n).map(|j| PI * j as f64 / n as f64).collect()
}

type Amplitudes = ([[ExpPoly; 2]; 2], [[ExpPoly; 2]; 2]);

fn simple_amplitudes(cd: &CharData, vd: &VectorData) -> Amplitudes {
    let zero = C64::new(0.0, 0.0);
    let primes = [
        vd.alpha_prime.expect("dual vectors"),
        vd.beta_prime.expect("dual vectors"),
    ];
    let vecs = [vd.alpha, vd.beta];
    let mut amp = [[ExpPoly::ZERO; 2]; 2];
    let mut dual = [[ExpPoly::ZERO; 2]; 2];
    for nu in 0..2 {
        let tau = cd.taus.branch(nu);
        let e = (I * tau * PI).exp();
        amp[nu][0] = ExpPoly::linear(vecs[nu][0] * e, zero, -I * tau);
        amp[nu][1] = ExpPoly::linear(vecs[nu][1], zero, I * tau);
        let tb = tau.conj();
        let eb = (I * tb * PI).exp();
        dual[nu][0] = ExpPoly::linear(primes[nu][0].conj() * eb, zero, -I * tb);
        dual[nu][1] = ExpPoly::linear(primes[nu][1].conj(), zero, I * tb);
    }
    (amp, dual)
}

fn jordan_amplitudes(cd: &CharData, vd: &VectorData) -> Amplitudes {
    let zero = C64::new(0.0, 0.0);
    let tau = cd.taus.branch(0);
    let (al, be) = (vd.alpha, vd.beta);
    let e = (I * tau * PI).exp();
    let amp = [
        [
            ExpPoly::linear(al[0] * e, zero, -I * tau),
            ExpPoly::linear(al[1], zero, I * tau),
        ],
        [
            ExpPoly::linear(be[0] * e, -al[0] * e, -I * tau),
            ExpPoly::linear(be[1], al[1], I * tau),
        ],
    ];
    let tb = tau.conj();
    let eb = (I * tb * PI).exp();
    let dinv = 1.0 / vd.delta.expect("Jordan data carries Delta").conj();
    let (ac, bc) = (al.map(|z| z.conj()), be.map(|z| z.conj()));
    let dual = [
        [
            ExpPoly::linear((bc[1] + ac[1] * PI) * dinv * eb, -ac[1] * dinv * eb, -I * tb),
            ExpPoly::linear(-(bc[0] - ac[0] * PI) * dinv, -ac[0] * dinv, I * tb),
        ],
        [
            ExpPoly::linear(-ac[1] * dinv * eb, zero, -I * tb),
            ExpPoly::linear(ac[0] * dinv, zero, I * tb),
        ],
    ];
    (amp, dual)
}
