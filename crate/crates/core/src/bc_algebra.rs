//! Boundary-condition algebra: canonical form, regularity classes,
//! characteristic roots, τ branches, adjoint conditions and the
//! eigen/associated vectors of the reduced matrix `A₂₃ = [b a; d c]`.
//!
//! A boundary condition is written as two rows acting on
//! `(y₁(0), y₁(π), y₂(0), y₂(π))`. After normalization it reads
//!
//! ```text
//! y₁(0) + b y₁(π) + a y₂(0)           = 0
//!         d y₁(π) + c y₂(0) + y₂(π)   = 0
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

/// Regularity tolerance on `|bc − ad|`.
pub const EPS_REG: f64 = 1e-12;
/// Strict-regularity tolerance, relative to the largest parameter magnitude.
pub const EPS_SR: f64 = 1e-10;
/// Largest admissible condition number of the eigenvector matrix `[α β]`.
pub const EIGVEC_COND_MAX: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BcError {
    #[error("SingularA14: the minor of columns (1,4) vanishes (|det| = {det:e})")]
    SingularA14 { det: f64 },
    #[error("NotRegular: |bc - ad| = {value:e} is below the regularity tolerance")]
    NotRegular { value: f64 },
    #[error("ZeroRoot: tau branch requested for z = 0")]
    ZeroRoot,
    #[error("IllConditionedEigvec: condition number of [alpha beta] is {cond:e}")]
    IllConditionedEigvec { cond: f64 },
    #[error("InvalidBc: {0}")]
    Invalid(String),
}

/// Raw 2×4 boundary-condition table, rows `(a₁ b₁ a₂ b₂)` and `(c₁ d₁ c₂ d₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawBc {
    pub rows: [[C64; 4]; 2],
}

impl RawBc {
    pub fn new(rows: [[C64; 4]; 2]) -> Result<Self, BcError> {
        for row in &rows {
            if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(BcError::Invalid("non-finite entry".into()));
            }
            if row.iter().all(|z| z.norm() == 0.0) {
                return Err(BcError::Invalid("zero row".into()));
            }
        }
        Ok(Self { rows })
    }

    pub fn from_real(rows: [[f64; 4]; 2]) -> Result<Self, BcError> {
        Self::new(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    /// Left-multiplies the table by a 2×2 matrix.
    pub fn left_mul(&self, g: [[C64; 2]; 2]) -> RawBc {
        let mut rows = [[C64::new(0.0, 0.0); 4]; 2];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = g[i][0] * self.rows[0][j] + g[i][1] * self.rows[1][j];
            }
        }
        RawBc { rows }
    }
}

/// Normalized regular boundary condition `(b, a, d, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CanonicalParts", into = "CanonicalParts")]
pub struct CanonicalBc {
    b: C64,
    a: C64,
    d: C64,
    c: C64,
}

#[derive(Serialize, Deserialize)]
struct CanonicalParts {
    b: C64,
    a: C64,
    d: C64,
    c: C64,
}

impl TryFrom<CanonicalParts> for CanonicalBc {
    type Error = BcError;
    fn try_from(p: CanonicalParts) -> Result<Self, BcError> {
        CanonicalBc::new(p.b, p.a, p.d, p.c)
    }
}

impl From<CanonicalBc> for CanonicalParts {
    fn from(bc: CanonicalBc) -> Self {
        CanonicalParts { b: bc.b, a: bc.a, d: bc.d, c: bc.c }
    }
}

impl CanonicalBc {
    pub fn new(b: C64, a: C64, d: C64, c: C64) -> Result<Self, BcError> {
        if [b, a, d, c].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(BcError::Invalid("non-finite parameter".into()));
        }
        let det = (b * c - a * d).norm();
        if det <= EPS_REG {
            return Err(BcError::NotRegular { value: det });
        }
        Ok(Self { b, a, d, c })
    }

    pub fn real(b: f64, a: f64, d: f64, c: f64) -> Result<Self, BcError> {
        Self::new(b.into(), a.into(), d.into(), c.into())
    }

    pub fn b(&self) -> C64 {
        self.b
    }
    pub fn a(&self) -> C64 {
        self.a
    }
    pub fn d(&self) -> C64 {
        self.d
    }
    pub fn c(&self) -> C64 {
        self.c
    }

    /// `|A₂₃| = bc − ad`.
    pub fn det(&self) -> C64 {
        self.b * self.c - self.a * self.d
    }

    /// The reduced matrix `A₂₃ = [b a; d c]`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.b, self.a], [self.d, self.c]]
    }

    fn scale(&self) -> f64 {
        [self.b, self.a, self.d, self.c]
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max)
    }

    /// Residuals of both canonical rows for boundary values
    /// `y₁(0), y₁(π), y₂(0), y₂(π)`.
    pub fn residuals(&self, y: [C64; 4]) -> [C64; 2] {
        [
            y[0] + self.b * y[1] + self.a * y[2],
            self.d * y[1] + self.c * y[2] + y[3],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonStrictKind {
    PeriodicType,
    CaseI,
    CaseII,
    CaseIII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcClass {
    StrictlyRegular { dirichlet_type: bool },
    RegularNotStrict { kind: NonStrictKind },
    Degenerate,
}

impl BcClass {
    pub fn is_strict(&self) -> bool {
        matches!(self, BcClass::StrictlyRegular { .. })
    }

    /// Jordan cases carry one eigenvector and one associated vector per eigenvalue.
    pub fn is_jordan(&self) -> bool {
        matches!(
            self,
            BcClass::RegularNotStrict {
                kind: NonStrictKind::CaseI | NonStrictKind::CaseII | NonStrictKind::CaseIII
            }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            BcClass::StrictlyRegular { .. } => "strictly-regular",
            BcClass::RegularNotStrict { kind: NonStrictKind::PeriodicType } => "periodic-type",
            BcClass::RegularNotStrict { kind: NonStrictKind::CaseI } => "jordan-case-i",
            BcClass::RegularNotStrict { kind: NonStrictKind::CaseII } => "jordan-case-ii",
            BcClass::RegularNotStrict { kind: NonStrictKind::CaseIII } => "jordan-case-iii",
            BcClass::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Roots {
    Distinct(C64, C64),
    Double(C64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Taus {
    Pair(C64, C64),
    Single(C64),
}

impl Taus {
    /// τ of branch `mu ∈ {0, 1}`; both branches share τ⋆ in the non-strict case.
    pub fn branch(&self, mu: usize) -> C64 {
        match *self {
            Taus::Pair(t1, t2) => {
                if mu == 0 {
                    t1
                } else {
                    t2
                }
            }
            Taus::Single(t) => t,
        }
    }

    /// Real part of the centre of the spectral rectangle.
    pub fn center_re(&self) -> f64 {
        match *self {
            Taus::Pair(t1, t2) => 0.5 * (t1.re + t2.re),
            Taus::Single(t) => t.re,
        }
    }

    pub fn max_abs_im(&self) -> f64 {
        match *self {
            Taus::Pair(t1, t2) => t1.im.abs().max(t2.im.abs()),
            Taus::Single(t) => t.im.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharData {
    pub roots: Roots,
    pub taus: Taus,
    /// Disc radius; present only for strictly regular conditions.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorData {
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
    pub alpha_prime: Option<[C64; 2]>,
    pub beta_prime: Option<[C64; 2]>,
    pub delta: Option<C64>,
}

/// Reduces a raw table to canonical form via `A₁₄⁻¹ A₂₃`.
pub fn normalize_bc(raw: &RawBc) -> Result<CanonicalBc, BcError> {
    let r = &raw.rows;
    let a14 = [[r[0][0], r[0][3]], [r[1][0], r[1][3]]];
    let a23 = [[r[0][1], r[0][2]], [r[1][1], r[1][2]]];
    let max_entry = r.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let det = a14[0][0] * a14[1][1] - a14[0][1] * a14[1][0];
    if det.norm() <= 1e-12 * max_entry * max_entry {
        return Err(BcError::SingularA14 { det: det.norm() });
    }
    let inv = [
        [a14[1][1] / det, -a14[0][1] / det],
        [-a14[1][0] / det, a14[0][0] / det],
    ];
    let m = mat2_mul(inv, a23);
    CanonicalBc::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

pub fn classify(bc: &CanonicalBc) -> BcClass {
    let s = bc.scale();
    let tol = EPS_SR * s;
    if bc.det().norm() <= EPS_REG {
        return BcClass::Degenerate;
    }
    let disc = discriminant(bc);
    if disc.norm() > EPS_SR * s * s {
        return BcClass::StrictlyRegular {
            dirichlet_type: (bc.b + bc.c).norm() <= tol,
        };
    }
    let a_zero = bc.a.norm() <= tol;
    let d_zero = bc.d.norm() <= tol;
    let kind = if a_zero && d_zero && (bc.b - bc.c).norm() <= tol {
        NonStrictKind::PeriodicType
    } else if a_zero {
        NonStrictKind::CaseI
    } else if d_zero {
        NonStrictKind::CaseII
    } else {
        NonStrictKind::CaseIII
    };
    BcClass::RegularNotStrict { kind }
}

/// `(b − c)² + 4ad`, the discriminant of the characteristic quadratic.
pub fn discriminant(bc: &CanonicalBc) -> C64 {
    let bmc = bc.b - bc.c;
    bmc * bmc + 4.0 * bc.a * bc.d
}

/// Roots of `z² + (b+c)z + (bc − ad) = 0`.
pub fn char_roots(bc: &CanonicalBc) -> Roots {
    let bsum = bc.b + bc.c;
    match classify(bc) {
        BcClass::StrictlyRegular { .. } => {
            let sq = discriminant(bc).sqrt();
            let sign = if ((-bsum).conj() * sq).re >= 0.0 { 1.0 } else { -1.0 };
            let z1 = (-bsum + sign * sq) * 0.5;
            let z2 = bc.det() / z1;
            Roots::Distinct(z1, z2)
        }
        _ => Roots::Double(-bsum * 0.5),
    }
}

/// `τ = Arg z / π − i ln|z| / π` with `Arg ∈ (−π, π]`.
pub fn tau_branch(z: C64) -> Result<C64, BcError> {
    let r = z.norm();
    if r == 0.0 {
        return Err(BcError::ZeroRoot);
    }
    let mut arg = z.im.atan2(z.re);
    if arg <= -PI {
        arg = PI;
    }
    Ok(C64::new(arg / PI, -r.ln() / PI))
}

/// Full characteristic data: roots, τ values and disc radius.
pub fn char_data(bc: &CanonicalBc) -> Result<CharData, BcError> {
    match char_roots(bc) {
        Roots::Distinct(z1, z2) => {
            let t1 = tau_branch(z1)?;
            let mut t2 = tau_branch(z2)?;
            if (t1.re - t2.re).abs() > 1.0 {
                let shifted = [t2 + 2.0, t2 - 2.0]
                    .into_iter()
                    .filter(|t| (t1.re - t.re).abs() <= 1.0)
                    .min_by(|x, y| x.re.abs().total_cmp(&y.re.abs()));
                if let Some(t) = shifted {
                    t2 = t;
                }
            }
            let diff = t1 - t2;
            let rho = (1.0 - diff.re.abs() / 2.0).min(diff.norm() / 2.0);
            Ok(CharData {
                roots: Roots::Distinct(z1, z2),
                taus: Taus::Pair(t1, t2),
                rho: Some(rho),
            })
        }
        Roots::Double(z) => Ok(CharData {
            roots: Roots::Double(z),
            taus: Taus::Single(tau_branch(z)?),
            rho: None,
        }),
    }
}

/// Entries of `(S⁻¹)*` for `S = [b a; d c]`.
pub fn adjoint_bc(bc: &CanonicalBc) -> CanonicalBc {
    let det = bc.det().conj();
    CanonicalBc {
        b: bc.c.conj() / det,
        a: -bc.d.conj() / det,
        d: -bc.a.conj() / det,
        c: bc.b.conj() / det,
    }
}

pub fn eigen_vectors(bc: &CanonicalBc, cd: &CharData) -> Result<VectorData, BcError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match (classify(bc), cd.roots) {
        (BcClass::StrictlyRegular { .. }, Roots::Distinct(z1, z2)) => {
            let alpha = kernel_vector(bc, z1);
            let beta = kernel_vector(bc, z2);
            let m = [[alpha[0], beta[0]], [alpha[1], beta[1]]];
            let cond = cond2(m);
            if !(cond <= EIGVEC_COND_MAX) {
                return Err(BcError::IllConditionedEigvec { cond });
            }
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let alpha_prime = [m[1][1] / det, -m[0][1] / det];
            let beta_prime = [-m[1][0] / det, m[0][0] / det];
            Ok(VectorData {
                alpha,
                beta,
                alpha_prime: Some(alpha_prime),
                beta_prime: Some(beta_prime),
                delta: None,
            })
        }
        (BcClass::RegularNotStrict { kind }, _) => {
            let (alpha, beta) = match kind {
                NonStrictKind::PeriodicType => {
                    return Ok(VectorData {
                        alpha: [one, zero],
                        beta: [zero, one],
                        alpha_prime: Some([one, zero]),
                        beta_prime: Some([zero, one]),
                        delta: None,
                    })
                }
                NonStrictKind::CaseI => ([zero, bc.d], [PI * bc.b, zero]),
                NonStrictKind::CaseII => ([bc.a, zero], [zero, PI * bc.b]),
                NonStrictKind::CaseIII => ([bc.a, (bc.c - bc.b) * 0.5], [zero, PI * bc.b]),
            };
            let delta = alpha[0] * beta[1] - alpha[1] * beta[0] + PI * alpha[0] * alpha[1];
            Ok(VectorData {
                alpha,
                beta,
                alpha_prime: None,
                beta_prime: None,
                delta: Some(delta),
            })
        }
        _ => Err(BcError::Invalid(
            "characteristic data inconsistent with the boundary condition".into(),
        )),
    }
}

/// Kernel vector of `A₂₃ + zI`, normalized so that its first
/// largest-magnitude component equals one.
fn kernel_vector(bc: &CanonicalBc, z: C64) -> [C64; 2] {
    let (p, q) = (bc.b + z, bc.a);
    let (r, s) = (bc.d, bc.c + z);
    let v1 = [q, -p];
    let v2 = [s, -r];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let v = if n1 >= n2 { v1 } else { v2 };
    let pivot = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    [v[0] / pivot, v[1] / pivot]
}

pub(crate) fn mat2_mul(x: [[C64; 2]; 2], y: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Spectral condition number of a 2×2 complex matrix.
pub fn cond2(m: [[C64; 2]; 2]) -> f64 {
    let fro2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let smax2 = 0.5 * (fro2 + disc);
    let smin2 = det * det / smax2;
    (smax2 / smin2).sqrt()
}
