//! Hermitian eigenvalues through LAPACK (`zhbev` for banded, `zheev` for
//! dense input). Eigenvectors are never requested.

use std::os::raw::c_char;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Links the system OpenBLAS, which ships the LAPACK routines below.
extern crate openblas_src;

const JOB_NONE: c_char = b'N' as c_char;
const UPPER: c_char = b'U' as c_char;

/// Eigenvalues (ascending) of an `n × n` Hermitian band matrix with `kd`
/// super-diagonals, given in LAPACK upper band storage:
/// `ab[kd + i − j + j·(kd+1)] = A[i][j]` for `j − kd ≤ i ≤ j`.
pub(crate) fn band_eigenvalues(n: usize, kd: usize, ab: &mut [Complex64]) -> Result<Vec<f64>> {
    assert_eq!(ab.len(), n * (kd + 1));
    let mut w = vec![0.0; n];
    let mut z = [Complex64::new(0.0, 0.0)];
    let mut work = vec![Complex64::new(0.0, 0.0); n.max(1)];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let (n_i, kd_i, ldab) = (n as i32, kd as i32, (kd + 1) as i32);
    let mut info = 0;
    // SAFETY: buffer sizes follow the zhbev contract checked above; Complex64
    // is layout-compatible with LAPACK's double complex.
    unsafe {
        lapack_sys::zhbev_(
            &JOB_NONE,
            &UPPER,
            &n_i,
            &kd_i,
            ab.as_mut_ptr() as *mut _,
            &ldab,
            w.as_mut_ptr(),
            z.as_mut_ptr() as *mut _,
            &1,
            work.as_mut_ptr() as *mut _,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zhbev",
            info,
        });
    }
    Ok(w)
}

/// Eigenvalues (ascending) of a dense `n × n` Hermitian matrix stored in
/// either row- or column-major order (the transpose is the conjugate, which
/// has the same spectrum). The input is overwritten.
pub(crate) fn dense_eigenvalues(n: usize, a: &mut [Complex64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut w = vec![0.0; n];
    let n_i = n as i32;
    let lda = n.max(1) as i32;
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0;

    let mut query = [Complex64::new(0.0, 0.0)];
    // SAFETY: workspace query, lwork = −1.
    unsafe {
        lapack_sys::zheev_(
            &JOB_NONE,
            &UPPER,
            &n_i,
            a.as_mut_ptr() as *mut _,
            &lda,
            w.as_mut_ptr(),
            query.as_mut_ptr() as *mut _,
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheev",
            info,
        });
    }
    let lwork = (query[0].re as usize).max(2 * n).max(1);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork];
    let lwork_i = lwork as i32;
    // SAFETY: sizes as required by zheev.
    unsafe {
        lapack_sys::zheev_(
            &JOB_NONE,
            &UPPER,
            &n_i,
            a.as_mut_ptr() as *mut _,
            &lda,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheev",
            info,
        });
    }
    Ok(w)
}
