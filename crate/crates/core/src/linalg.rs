//! Dense complex linear algebra helpers on top of LAPACK.

use std::os::raw::{c_char, c_int};

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{EigVals, EigValsh, FactorizeInto, InverseInto, ReciprocalConditionNum, UPLO};

use crate::C64;

pub type CMat = Array2<C64>;

#[derive(Debug, Clone, thiserror::Error)]
#[error("LAPACK failure in {routine}: info = {info}")]
pub struct LapackError {
    pub routine: &'static str,
    pub info: i32,
}

/// LU inverse together with the reciprocal 1-norm condition estimate.
pub fn inverse_with_rcond(a: &CMat) -> Result<(CMat, f64), LapackError> {
    let lu = a
        .to_owned()
        .factorize_into()
        .map_err(|_| LapackError { routine: "zgetrf", info: -1 })?;
    let rcond = lu.rcond().map_err(|_| LapackError { routine: "zgecon", info: -1 })?;
    let inv = lu.inv_into().map_err(|_| LapackError { routine: "zgetri", info: -1 })?;
    Ok((inv, rcond))
}

pub fn eigenvalues(a: &CMat) -> Result<Array1<C64>, LapackError> {
    a.eigvals().map_err(|_| LapackError { routine: "zgeev", info: -1 })
}

pub fn hermitian_eigenvalues(a: &CMat) -> Result<Array1<f64>, LapackError> {
    a.eigvalsh(UPLO::Upper)
        .map_err(|_| LapackError { routine: "zheev", info: -1 })
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conj_transpose(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Complex Schur decomposition `A = U T Uᴴ` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: CMat,
    pub u: CMat,
    /// Column-major copy of `T`, kept for repeated triangular solves.
    t_colmajor: Vec<C64>,
}

impl Schur {
    pub fn new(a: &CMat) -> Result<Self, LapackError> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let mut buf: Vec<C64> = a.t().iter().copied().collect();
        let nn = n as c_int;
        let mut sdim: c_int = 0;
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut vs = vec![C64::new(0.0, 0.0); n * n];
        let mut rwork = vec![0.0f64; n.max(1)];
        let mut bwork = vec![0 as c_int; n.max(1)];
        let mut info: c_int = 0;
        let mut query = C64::new(0.0, 0.0);
        let lwork_query: c_int = -1;
        let jobvs = b'V' as c_char;
        let sort = b'N' as c_char;
        // SAFETY: all buffers are sized per the LAPACK contract and Complex64
        // has the same layout as the bindgen complex type.
        unsafe {
            lapack_sys::zgees_(
                &jobvs,
                &sort,
                None,
                &nn,
                buf.as_mut_ptr() as *mut _,
                &nn,
                &mut sdim,
                w.as_mut_ptr() as *mut _,
                vs.as_mut_ptr() as *mut _,
                &nn,
                &mut query as *mut C64 as *mut _,
                &lwork_query,
                rwork.as_mut_ptr(),
                bwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(LapackError { routine: "zgees", info });
        }
        let lwork = (query.re as usize).max(2 * n).max(1);
        let mut work = vec![C64::new(0.0, 0.0); lwork];
        let lw = lwork as c_int;
        unsafe {
            lapack_sys::zgees_(
                &jobvs,
                &sort,
                None,
                &nn,
                buf.as_mut_ptr() as *mut _,
                &nn,
                &mut sdim,
                w.as_mut_ptr() as *mut _,
                vs.as_mut_ptr() as *mut _,
                &nn,
                work.as_mut_ptr() as *mut _,
                &lw,
                rwork.as_mut_ptr(),
                bwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(LapackError { routine: "zgees", info });
        }
        for j in 0..n {
            for i in (j + 1)..n {
                buf[j * n + i] = C64::new(0.0, 0.0);
            }
        }
        let t = Array2::from_shape_vec((n, n).f(), buf.clone())
            .expect("shape")
            .as_standard_layout()
            .to_owned();
        let u = Array2::from_shape_vec((n, n).f(), vs)
            .expect("shape")
            .as_standard_layout()
            .to_owned();
        Ok(Self { t, u, t_colmajor: buf })
    }

    /// An already upper-triangular matrix is its own Schur form.
    pub fn from_upper_triangular(t: &CMat) -> Self {
        let n = t.nrows();
        let t_colmajor: Vec<C64> = t.t().iter().copied().collect();
        Self { t: t.clone(), u: Array2::eye(n), t_colmajor }
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diag().to_vec()
    }

    /// Accumulates `Σ_q ω_q (z_q − T)⁻¹` in column-major upper-triangular
    /// storage, one triangular inversion per node.
    pub fn weighted_resolvent_sum(&self, nodes: &[C64], weights: &[C64]) -> Result<Vec<C64>, LapackError> {
        let n = self.dim();
        let mut acc = vec![C64::new(0.0, 0.0); n * n];
        let mut work = vec![C64::new(0.0, 0.0); n * n];
        for (&z, &w) in nodes.iter().zip(weights) {
            self.shifted_inverse_into(z, &mut work)?;
            for j in 0..n {
                let col = j * n;
                for i in 0..=j {
                    acc[col + i] += w * work[col + i];
                }
            }
        }
        Ok(acc)
    }

    /// Writes `(z − T)⁻¹` into `out` (column-major, upper triangle valid).
    pub fn shifted_inverse_into(&self, z: C64, out: &mut [C64]) -> Result<(), LapackError> {
        let n = self.dim();
        for j in 0..n {
            let col = j * n;
            for i in 0..=j {
                out[col + i] = -self.t_colmajor[col + i];
            }
            out[col + j] += z;
        }
        let nn = n as c_int;
        let mut info: c_int = 0;
        let uplo = b'U' as c_char;
        let diag = b'N' as c_char;
        // SAFETY: `out` holds an n×n column-major matrix.
        unsafe {
            lapack_sys::ztrtri_(&uplo, &diag, &nn, out.as_mut_ptr() as *mut _, &nn, &mut info);
        }
        if info != 0 {
            return Err(LapackError { routine: "ztrtri", info });
        }
        Ok(())
    }

    /// `U X Uᴴ` for an upper-triangular `X` given in column-major storage.
    pub fn back_transform(&self, x_colmajor: &[C64]) -> CMat {
        let n = self.dim();
        let x = Array2::from_shape_fn((n, n), |(i, j)| {
            if i <= j {
                x_colmajor[j * n + i]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ux = self.u.dot(&x);
        ux.dot(&conj_transpose(&self.u))
    }
}
