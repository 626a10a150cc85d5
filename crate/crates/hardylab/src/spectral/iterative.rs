//! Deterministic iterative solvers for large masked grids: preconditioned
//! conjugate gradients and block inverse subspace iteration for the lowest
//! eigenpairs of a symmetric positive definite operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::dense::symmetric_eigen_inplace;

/// Conjugate gradients for SPD `apply`, optionally Jacobi-preconditioned.
/// Deterministic for fixed inputs. Returns the iteration count.
pub fn cg_solve(
    apply: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    inv_diag: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let precond = |r: &[f64], z: &mut [f64]| match inv_diag {
        Some(d) => {
            for ((zi, &ri), &di) in z.iter_mut().zip(r).zip(d) {
                *zi = ri * di;
            }
        }
        None => z.copy_from_slice(r),
    };
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if norm(&r) <= rel_tol * bnorm {
            return Ok(it);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NoConvergence(format!(
                "cg: operator not positive definite (p·Ap = {pap})"
            )));
        }
        let alpha = rz / pap;
        for ((xi, &pi), (ri, &api)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    if norm(&r) <= rel_tol * bnorm * 10.0 {
        return Ok(max_iter);
    }
    Err(Error::NoConvergence(format!(
        "cg: residual {} after {max_iter} iterations (target {})",
        norm(&r) / bnorm,
        rel_tol
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Column views into a column-major block.
fn col(block: &[f64], n: usize, j: usize) -> &[f64] {
    &block[j * n..(j + 1) * n]
}

fn col_mut(block: &mut [f64], n: usize, j: usize) -> &mut [f64] {
    &mut block[j * n..(j + 1) * n]
}

/// Modified Gram-Schmidt, two passes. Columns that collapse are re-seeded
/// deterministically.
fn orthonormalize(block: &mut [f64], n: usize, b: usize, rng: &mut ChaCha8Rng) {
    for j in 0..b {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = dot(col(block, n, i), col(block, n, j));
                let (head, tail) = block.split_at_mut(j * n);
                let ci = &head[i * n..(i + 1) * n];
                for (t, &s) in tail[..n].iter_mut().zip(ci) {
                    *t -= proj * s;
                }
            }
        }
        let nrm = norm(col(block, n, j));
        if nrm < 1e-14 {
            for v in col_mut(block, n, j) {
                *v = rng.gen_range(-1.0..1.0);
            }
            let nrm2 = norm(col(block, n, j));
            for v in col_mut(block, n, j) {
                *v /= nrm2;
            }
        } else {
            for v in col_mut(block, n, j) {
                *v /= nrm;
            }
        }
    }
}

pub struct LowestEigen {
    pub values: Vec<f64>,
    /// Column-major n×k eigenvector block.
    pub vectors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sweeps: usize,
}

/// Lowest k eigenpairs of a SPD operator by block inverse subspace iteration
/// with Rayleigh-Ritz extraction. `solve` applies the operator inverse
/// (typically CG); `apply` the operator itself.
pub fn lowest_eigenpairs(
    apply: &dyn Fn(&[f64], &mut [f64]),
    solve: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    n: usize,
    k: usize,
    tol: f64,
    max_sweeps: usize,
    seed: u64,
) -> Result<LowestEigen> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of an operator of dimension {n}"
        )));
    }
    let b = (k + 3).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut x = vec![0.0f64; n * b];
    for v in x.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    orthonormalize(&mut x, n, b, &mut rng);
    let mut theta = vec![0.0f64; b];
    let mut residuals = vec![f64::INFINITY; k];
    let mut work = vec![0.0f64; n];
    for sweep in 1..=max_sweeps {
        // inverse power step
        let mut y = vec![0.0f64; n * b];
        for j in 0..b {
            let sol = solve(col(&x, n, j))?;
            col_mut(&mut y, n, j).copy_from_slice(&sol);
        }
        orthonormalize(&mut y, n, b, &mut rng);
        // Rayleigh-Ritz on the block
        let mut my = vec![0.0f64; n * b];
        for j in 0..b {
            apply(col(&y, n, j), &mut work);
            col_mut(&mut my, n, j).copy_from_slice(&work);
        }
        let mut t = vec![0.0f64; b * b];
        for jj in 0..b {
            for ii in 0..b {
                t[jj * b + ii] = dot(col(&y, n, ii), col(&my, n, jj));
            }
        }
        // symmetrize small asymmetries before the dense solve
        for jj in 0..b {
            for ii in 0..jj {
                let s = 0.5 * (t[jj * b + ii] + t[ii * b + jj]);
                t[jj * b + ii] = s;
                t[ii * b + jj] = s;
            }
        }
        let vals = symmetric_eigen_inplace(b, &mut t)?;
        theta.copy_from_slice(&vals);
        // rotate: X = Y · S
        let mut xnew = vec![0.0f64; n * b];
        for jj in 0..b {
            let target = col_mut(&mut xnew, n, jj);
            for ii in 0..b {
                let s = t[jj * b + ii];
                if s != 0.0 {
                    for (tv, &yv) in target.iter_mut().zip(col(&y, n, ii)) {
                        *tv += s * yv;
                    }
                }
            }
        }
        x = xnew;
        // residuals of the k wanted pairs
        let mut done = true;
        for j in 0..k {
            apply(col(&x, n, j), &mut work);
            let mut r2 = 0.0;
            for (wv, &xv) in work.iter().zip(col(&x, n, j)) {
                let r = wv - theta[j] * xv;
                r2 += r * r;
            }
            residuals[j] = r2.sqrt();
            if residuals[j] > tol * theta[j].abs().max(1.0) {
                done = false;
            }
        }
        if done {
            let mut vectors = vec![0.0f64; n * k];
            vectors.copy_from_slice(&x[..n * k]);
            return Ok(LowestEigen {
                values: theta[..k].to_vec(),
                vectors,
                residuals,
                sweeps: sweep,
            });
        }
    }
    Err(Error::NoConvergence(format!(
        "subspace iteration: residuals {residuals:?} after {max_sweeps} sweeps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn chain_apply(n: usize) -> impl Fn(&[f64], &mut [f64]) {
        move |u: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                out[i] = 2.0 * u[i] - left - right;
            }
        }
    }

    #[test]
    fn cg_solves_the_chain() {
        let n = 200;
        let apply = chain_apply(n);
        let b: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let mut x = vec![0.0; n];
        cg_solve(&apply, &b, &mut x, None, 1e-12, 10 * n).unwrap();
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        for (a, bb) in ax.iter().zip(&b) {
            assert_relative_eq!(a, bb, max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn subspace_iteration_matches_closed_form() {
        let n = 150;
        let apply = chain_apply(n);
        let solve = |b: &[f64]| -> Result<Vec<f64>> {
            let mut x = vec![0.0; n];
            cg_solve(&apply, b, &mut x, None, 1e-13, 20 * n)?;
            Ok(x)
        };
        let out = lowest_eigenpairs(&apply, &solve, n, 4, 1e-10, 200, 7).unwrap();
        for (j, &lam) in out.values.iter().enumerate() {
            let want = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_relative_eq!(lam, want, max_relative = 1e-9);
        }
        // determinism
        let again = lowest_eigenpairs(&apply, &solve, n, 4, 1e-10, 200, 7).unwrap();
        assert_eq!(out.values, again.values);
        assert_eq!(out.vectors, again.vectors);
    }
}
