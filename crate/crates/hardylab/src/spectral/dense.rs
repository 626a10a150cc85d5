//! Dense symmetric eigendecomposition through LAPACK's divide-and-conquer
//! driver (dsyevd).

use crate::error::{Error, Result};

/// Full decomposition of a symmetric matrix given in a column-major n×n
/// buffer (the lower triangle is referenced). On return the buffer holds the
/// eigenvectors column by column and the eigenvalues come back ascending.
pub fn symmetric_eigen_inplace(n: usize, a: &mut [f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = vec![0.0f64; n];
    let nn = n as i32;
    let jobz = b'V' as i8;
    let uplo = b'L' as i8;
    let mut info: i32 = 0;
    unsafe {
        let mut wkopt = 0.0f64;
        let mut iwkopt: i32 = 0;
        let query: i32 = -1;
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            &mut wkopt,
            &query,
            &mut iwkopt,
            &query,
            &mut info,
        );
        if info != 0 {
            return Err(Error::Eigensolve(format!(
                "dsyevd workspace query failed: info = {info}"
            )));
        }
        let lwork = wkopt as i32;
        let liwork = iwkopt;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolve(format!("dsyevd failed: info = {info}")));
    }
    Ok(w)
}
