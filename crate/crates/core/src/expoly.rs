//! Exponential polynomials `p(x)·e^{s x}` with `deg p ≤ 3` and their exact
//! integrals over subintervals.

use std::ops::Mul;

use crate::C64;

pub const MAX_DEGREE: usize = 3;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPoly {
    /// Coefficients of `p` in the monomial basis, lowest degree first.
    pub coef: [C64; MAX_DEGREE + 1],
    pub rate: C64,
}

impl ExpPoly {
    pub const ZERO: ExpPoly = ExpPoly { coef: [ZERO; MAX_DEGREE + 1], rate: ZERO };

    pub fn new(coef: &[C64], rate: C64) -> Self {
        assert!(coef.len() <= MAX_DEGREE + 1, "degree exceeds {MAX_DEGREE}");
        let mut c = [ZERO; MAX_DEGREE + 1];
        c[..coef.len()].copy_from_slice(coef);
        Self { coef: c, rate }
    }

    pub fn linear(c0: C64, c1: C64, rate: C64) -> Self {
        Self::new(&[c0, c1], rate)
    }

    pub fn constant(c0: C64) -> Self {
        Self::new(&[c0], ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coef.iter().rposition(|z| *z != ZERO).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> C64 {
        let p = self.coef.iter().rev().fold(ZERO, |acc, &c| acc * x + c);
        p * (self.rate * x).exp()
    }

    /// `q`-th derivative at `x`.
    pub fn derivative(&self, q: usize, x: f64) -> C64 {
        let mut poly = self.coef;
        for _ in 0..q {
            let mut next = [ZERO; MAX_DEGREE + 1];
            for i in 0..=MAX_DEGREE {
                next[i] = self.rate * poly[i];
                if i < MAX_DEGREE {
                    next[i] += (i + 1) as f64 * poly[i + 1];
                }
            }
            poly = next;
        }
        let p = poly.iter().rev().fold(ZERO, |acc, &c| acc * x + c);
        p * (self.rate * x).exp()
    }

    pub fn conj(&self) -> Self {
        Self { coef: self.coef.map(|z| z.conj()), rate: self.rate.conj() }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { coef: self.coef.map(|z| z * k), rate: self.rate }
    }

    /// Multiplies by `e^{s x}`.
    pub fn shift_rate(&self, s: C64) -> Self {
        Self { coef: self.coef, rate: self.rate + s }
    }

    /// `∫_a^b p(x) e^{s x} dx`, exact up to rounding.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        let deg = self.degree();
        let mut acc = ZERO;
        let moments = exp_moments(self.rate, a, b, deg);
        for n in 0..=deg {
            acc += self.coef[n] * moments[n];
        }
        acc
    }
}

impl Mul for ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: ExpPoly) -> ExpPoly {
        let (da, db) = (self.degree(), rhs.degree());
        assert!(da + db <= MAX_DEGREE, "product degree exceeds {MAX_DEGREE}");
        let mut coef = [ZERO; MAX_DEGREE + 1];
        for i in 0..=da {
            for j in 0..=db {
                coef[i + j] += self.coef[i] * rhs.coef[j];
            }
        }
        ExpPoly { coef, rate: self.rate + rhs.rate }
    }
}

/// `∫_a^b xⁿ e^{s x} dx` for `n = 0..=deg`.
pub fn exp_moments(s: C64, a: f64, b: f64, deg: usize) -> [C64; MAX_DEGREE + 1] {
    let mut out = [ZERO; MAX_DEGREE + 1];
    let span = a.abs().max(b.abs());
    let sl = s.norm() * span;
    if sl < 2.0 {
        // Power series of the exponential; terms shrink like (|s| span)^p / p!.
        for (n, slot) in out.iter_mut().enumerate().take(deg + 1) {
            let mut term_coeff = C64::new(1.0, 0.0);
            let mut acc = ZERO;
            let mut p = 0usize;
            loop {
                let e = (n + p + 1) as i32;
                let piece = (b.powi(e) - a.powi(e)) / e as f64;
                let term = term_coeff * piece;
                acc += term;
                if term.norm() <= 1e-18 * acc.norm().max(1e-300) || p > 60 {
                    break;
                }
                p += 1;
                term_coeff *= s / p as f64;
            }
            *slot = acc;
        }
        return out;
    }
    // Integration by parts: Iₙ = [xⁿ e^{sx}/s]_a^b − (n/s) Iₙ₋₁.
    let (ea, eb) = ((s * a).exp(), (s * b).exp());
    let inv_s = 1.0 / s;
    out[0] = (eb - ea) * inv_s;
    for n in 1..=deg {
        let boundary = eb * b.powi(n as i32) - ea * a.powi(n as i32);
        out[n] = (boundary - n as f64 * out[n - 1]) * inv_s;
    }
    out
}
