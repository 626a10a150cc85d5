//! Eigendecomposition of assembled operators, fractional powers (H+a)^p via
//! the spectral calculus, heat-semigroup diagonals, eigenvalue counting and
//! the variational Hardy-constant estimate.

pub mod cache;
pub mod dense;
pub mod iterative;

use crate::error::{Error, Result};
use crate::geometry::DistanceField;
use crate::operator::EllipticOperator;

/// Problems up to this dimension run the dense LAPACK path even for partial
/// spectra; beyond it, full decompositions are refused and partial requests
/// go through the iterative backend.
pub const DENSE_PARTIAL_MAX: usize = 2_600;
pub const DENSE_FULL_MAX: usize = 13_000;

/// Residual and orthonormality budgets from the eigen-system contract.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveCount {
    All,
    Lowest(usize),
}

/// Sorted eigenvalues with σ²-orthonormal eigenvectors in the node basis.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Column-major n×m block; column k is the eigenvector φ_k.
    vectors: Vec<f64>,
    /// Quadrature weights σ²h^dim of the source operator.
    pub weights: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub op_ref: String,
}

impl EigenSystem {
    pub fn is_full(&self) -> bool {
        self.m == self.n
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn weighted_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((&a, &b), &w)| a * b * w)
            .sum()
    }

    pub fn weighted_norm(&self, f: &[f64]) -> f64 {
        self.weighted_inner(f, f).sqrt()
    }

    /// Expansion coefficients ⟨f, φ_k⟩_σ for all computed modes.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let wf: Vec<f64> = f.iter().zip(&self.weights).map(|(&x, &w)| x * w).collect();
        (0..self.m)
            .map(|k| self.vector(k).iter().zip(&wf).map(|(&p, &q)| p * q).sum())
            .collect()
    }

    fn require_full(&self) -> Result<()> {
        if !self.is_full() {
            return Err(Error::PartialDecomposition {
                have: self.m,
                need: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
        weights: Vec<f64>,
        n: usize,
        m: usize,
        op_ref: String,
    ) -> Self {
        EigenSystem {
            eigenvalues,
            vectors,
            weights,
            n,
            m,
            op_ref,
        }
    }

    pub(crate) fn raw_vectors(&self) -> &[f64] {
        &self.vectors
    }

    #[cfg(test)]
    pub(crate) fn raw_vectors_mut(&mut self) -> &mut [f64] {
        &mut self.vectors
    }
}

/// Reference string of the full decomposition of an operator, for cache
/// lookups.
pub fn full_op_ref(op: &EllipticOperator) -> String {
    op_ref_of(op, op.n)
}

fn op_ref_of(op: &EllipticOperator, m: usize) -> String {
    format!(
        "{}|{}|h={:.12e}|n={}|m={}",
        op.domain.name,
        op.kind.label(),
        op.domain.spacing,
        op.n,
        m
    )
}

/// Sign convention: make the first component exceeding 1e-12 of the column's
/// max positive.
fn fix_signs(vectors: &mut [f64], n: usize, m: usize) {
    for k in 0..m {
        let colv = &mut vectors[k * n..(k + 1) * n];
        let maxabs = colv.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let lead = colv.iter().find(|v| v.abs() > 1e-12 * maxabs);
        if let Some(&v) = lead {
            if v < 0.0 {
                colv.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
}

/// Eigendecomposition in the σ²-weighted inner product. Dense LAPACK on the
/// similarity-symmetrized matrix by default; a deterministic block inverse
/// subspace iteration handles partial spectra on grids too large for dense
/// work.
pub fn eigensolve(op: &EllipticOperator, count: SolveCount) -> Result<EigenSystem> {
    let n = op.n;
    if n == 0 {
        return Err(Error::EmptyRegion("eigensolve on empty domain".into()));
    }
    let m = match count {
        SolveCount::All => n,
        SolveCount::Lowest(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidParameter(format!(
                    "requested {k} modes of an operator of dimension {n}"
                )));
            }
            k
        }
    };
    let dense = match count {
        SolveCount::All => {
            if n > DENSE_FULL_MAX {
                return Err(Error::Eigensolve(format!(
                    "full decomposition of dimension {n} exceeds the dense limit {DENSE_FULL_MAX}; request a partial spectrum"
                )));
            }
            true
        }
        SolveCount::Lowest(_) => n <= DENSE_PARTIAL_MAX,
    };
    let sqrt_w = op.sqrt_weights();
    let (values, mut sym_vectors) = if dense {
        let mut a = op.symmetrized_dense().into_raw_vec_and_offset().0;
        let w = dense::symmetric_eigen_inplace(n, &mut a)?;
        a.truncate(n * m);
        (w[..m].to_vec(), a)
    } else {
        let sym = op.symmetrized_sparse();
        let inv_diag: Vec<f64> = sym.diag.iter().map(|&d| 1.0 / d).collect();
        let apply = move |u: &[f64], out: &mut [f64]| sym.apply_into(u, out);
        let apply_ref: &dyn Fn(&[f64], &mut [f64]) = &apply;
        let solve = |b: &[f64]| -> Result<Vec<f64>> {
            let mut x = vec![0.0; b.len()];
            iterative::cg_solve(apply_ref, b, &mut x, Some(&inv_diag), 1e-12, 40 * n)?;
            Ok(x)
        };
        let out = iterative::lowest_eigenpairs(apply_ref, &solve, n, m, 1e-10, 400, 0x5eed)?;
        (out.values, out.vectors)
    };
    fix_signs(&mut sym_vectors, n, m);
    // map back to the node basis: φ = u / √w
    let mut vectors = sym_vectors;
    for k in 0..m {
        for (v, &sw) in vectors[k * n..(k + 1) * n].iter_mut().zip(&sqrt_w) {
            *v /= sw;
        }
    }
    let eig = EigenSystem::from_parts(values, vectors, op.weights.clone(), n, m, op_ref_of(op, m));
    validate(&eig, op)?;
    Ok(eig)
}

/// Eigen-system contract: positive bottom eigenvalue, small residuals,
/// unit σ-norms and orthogonality across near-degenerate neighbors.
fn validate(eig: &EigenSystem, op: &EllipticOperator) -> Result<()> {
    if eig.eigenvalues[0] <= 0.0 {
        return Err(Error::Eigensolve(format!(
            "nonpositive bottom eigenvalue {} on a Dirichlet domain",
            eig.eigenvalues[0]
        )));
    }
    for k in 0..eig.m {
        let phi = eig.vector(k);
        let lam = eig.eigenvalues[k];
        let hphi = op.apply(phi);
        let mut r2 = 0.0;
        for ((&hv, &pv), &w) in hphi.iter().zip(phi).zip(&eig.weights) {
            let r = hv - lam * pv;
            r2 += r * r * w;
        }
        if r2.sqrt() > RESIDUAL_TOL * lam.abs().max(1.0) {
            return Err(Error::Eigensolve(format!(
                "residual {} for mode {k} (lambda = {lam}) exceeds budget",
                r2.sqrt()
            )));
        }
        let nrm = eig.weighted_norm(phi);
        if (nrm - 1.0).abs() > ORTHO_TOL {
            return Err(Error::Eigensolve(format!(
                "mode {k} has weighted norm {nrm}, expected 1"
            )));
        }
        if k + 1 < eig.m {
            let ip = eig.weighted_inner(phi, eig.vector(k + 1));
            if ip.abs() > ORTHO_TOL {
                return Err(Error::Eigensolve(format!(
                    "modes {k},{} not orthogonal: inner product {ip}",
                    k + 1
                )));
            }
        }
    }
    Ok(())
}

/// (H+a)^p f through the spectral calculus. Needs the full decomposition.
pub fn fractional_apply(eig: &EigenSystem, p: f64, a: f64, f: &[f64]) -> Result<Vec<f64>> {
    eig.require_full()?;
    if f.len() != eig.n {
        return Err(Error::DimensionMismatch {
            expected: eig.n,
            got: f.len(),
        });
    }
    if p == 0.0 {
        return Ok(f.to_vec());
    }
    let needs_positive = p < 0.0 || p.fract() != 0.0;
    if needs_positive && eig.eigenvalues[0] + a <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "(lambda_1 + a) = {} <= 0 with non-integral or negative power {p}",
            eig.eigenvalues[0] + a
        )));
    }
    let coeffs = eig.coefficients(f);
    let mut out = vec![0.0; eig.n];
    for (k, (&lam, &coeff)) in eig.eigenvalues.iter().zip(&coeffs).enumerate() {
        let factor = (lam + a).powf(p) * coeff;
        if factor != 0.0 {
            for (o, &v) in out.iter_mut().zip(eig.vector(k)) {
                *o += factor * v;
            }
        }
    }
    Ok(out)
}

/// ‖(H+a)f‖_σ and ‖(H+a)^{1/c}f‖_σ, the two operator factors of the decay
/// bounds, evaluated from the spectral expansion.
pub fn operator_factor_norms(eig: &EigenSystem, a: f64, c: f64, f: &[f64]) -> Result<(f64, f64)> {
    eig.require_full()?;
    let coeffs = eig.coefficients(f);
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (k, &g) in coeffs.iter().enumerate() {
        let la = eig.eigenvalues[k] + a;
        s1 += la * la * g * g;
        s2 += la.powf(2.0 / c) * g * g;
    }
    Ok((s1.sqrt(), s2.sqrt()))
}

/// ‖(H+shift)^p f‖_σ from the spectral expansion.
pub fn shifted_power_norm(eig: &EigenSystem, shift: f64, p: f64, f: &[f64]) -> Result<f64> {
    eig.require_full()?;
    let coeffs = eig.coefficients(f);
    let mut s = 0.0;
    for (k, &g) in coeffs.iter().enumerate() {
        s += (eig.eigenvalues[k] + shift).powf(2.0 * p) * g * g;
    }
    Ok(s.sqrt())
}

/// Per-node heat-kernel diagonal K(t,x,x) = Σ e^{−λ_n t}|φ_n(x)|².
pub fn heat_diag(eig: &EigenSystem, t: f64) -> Result<Vec<f64>> {
    eig.require_full()?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "heat time must be positive, got {t}"
        )));
    }
    let mut out = vec![0.0; eig.n];
    for k in 0..eig.m {
        let w = (-eig.eigenvalues[k] * t).exp();
        if w == 0.0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(eig.vector(k)) {
            *o += w * v * v;
        }
    }
    Ok(out)
}

/// Σ e^{−λ_n t} over the computed spectrum.
pub fn heat_trace(eig: &EigenSystem, t: f64) -> f64 {
    eig.eigenvalues.iter().map(|&l| (-l * t).exp()).sum()
}

/// N(λ) = #{n : λ_n < λ}. λ must stay below the top of the computed spectrum.
pub fn counting(eig: &EigenSystem, lambda: f64) -> Result<usize> {
    if lambda >= eig.lambda_max() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} is not below the top computed eigenvalue {}",
            eig.lambda_max()
        )));
    }
    Ok(eig.eigenvalues.iter().take_while(|&&l| l < lambda).count())
}

/// N(ε,λ) = Σ_{λ_n<λ} Σ_{strip} |φ_n|² σ² h^dim with the strip taken on the
/// effective distance d/d_scale.
pub fn strip_counting(
    eig: &EigenSystem,
    dist: &DistanceField,
    eps: f64,
    lambda: f64,
    d_scale: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let nlam = counting(eig, lambda)?;
    let strip: Vec<usize> = dist
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, &d)| (d / d_scale < eps).then_some(i))
        .collect();
    let mut total = 0.0;
    for k in 0..nlam {
        let phi = eig.vector(k);
        total += strip
            .iter()
            .map(|&i| phi[i] * phi[i] * eig.weights[i])
            .sum::<f64>();
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct HardyEstimate {
    pub c_num: f64,
    pub theta_min: f64,
    pub residual: f64,
    pub backend: String,
}

/// Best discrete Hardy constant: solves the generalized symmetric problem
/// (H+a)f = θ·d̃⁻²f in the weighted inner product and returns c_num =
/// θ_min^{−1/2}. d̃ is the operator's effective distance (d/α for divergence
/// form).
pub fn estimate_hardy_constant(
    op: &EllipticOperator,
    dist: &DistanceField,
) -> Result<HardyEstimate> {
    estimate_hardy_constant_with(op, dist, op.distance_scale())
}

pub fn estimate_hardy_constant_with(
    op: &EllipticOperator,
    dist: &DistanceField,
    d_scale: f64,
) -> Result<HardyEstimate> {
    let n = op.n;
    let a = op.hardy_a;
    let d: Vec<f64> = dist.values.iter().map(|&v| v / d_scale).collect();
    if d.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidField(
            "distance field must be positive".into(),
        ));
    }
    if n <= DENSE_PARTIAL_MAX {
        // dense congruence: G = diag(d)·(M + aI)·diag(d)
        let mut g = op.symmetrized_dense().into_raw_vec_and_offset().0;
        for i in 0..n {
            g[i * n + i] += a;
        }
        for jc in 0..n {
            for ir in 0..n {
                g[jc * n + ir] *= d[ir] * d[jc];
            }
        }
        let w = dense::symmetric_eigen_inplace(n, &mut g)?;
        let theta = w[0];
        if !(theta > 0.0) {
            return Err(Error::Eigensolve(format!(
                "generalized Hardy problem returned nonpositive theta = {theta}"
            )));
        }
        return Ok(HardyEstimate {
            c_num: theta.powf(-0.5),
            theta_min: theta,
            residual: 0.0,
            backend: "dense".into(),
        });
    }
    let sym = op.symmetrized_sparse();
    let mut diag_shift = sym.diag.clone();
    for v in diag_shift.iter_mut() {
        *v += a;
    }
    let couplings = sym.couplings.clone();
    let apply_m = move |u: &[f64], out: &mut [f64]| {
        for (o, (&dg, &x)) in out.iter_mut().zip(diag_shift.iter().zip(u)) {
            *o = dg * x;
        }
        for &(i, j, mij) in &couplings {
            out[i] += mij * u[j];
            out[j] += mij * u[i];
        }
    };
    let apply_m_ref: &dyn Fn(&[f64], &mut [f64]) = &apply_m;
    let dd = d.clone();
    let apply_g = move |u: &[f64], out: &mut [f64]| {
        let du: Vec<f64> = u.iter().zip(&dd).map(|(&x, &s)| x * s).collect();
        apply_m_ref(&du, out);
        for (o, &s) in out.iter_mut().zip(&dd) {
            *o *= s;
        }
    };
    let inv_diag: Vec<f64> = {
        let sym2 = op.symmetrized_sparse();
        sym2.diag.iter().map(|&x| 1.0 / (x + a)).collect()
    };
    let d2 = d.clone();
    let solve_g = move |b: &[f64]| -> Result<Vec<f64>> {
        // G y = b  ⇔  (M+aI)(d∘y) = b/d
        let rhs: Vec<f64> = b.iter().zip(&d2).map(|(&x, &s)| x / s).collect();
        let mut z = vec![0.0; b.len()];
        iterative::cg_solve(apply_m_ref, &rhs, &mut z, Some(&inv_diag), 1e-8, 60 * n)?;
        Ok(z.iter().zip(&d2).map(|(&x, &s)| x / s).collect())
    };
    // Rayleigh quotients approach θ_min from above; the achieved residual is
    // recorded in the estimate.
    let out = iterative::lowest_eigenpairs(&apply_g, &solve_g, n, 1, 1e-4, 600, 0x4a11)?;
    let theta = out.values[0];
    if !(theta > 0.0) {
        return Err(Error::Eigensolve(format!(
            "generalized Hardy problem returned nonpositive theta = {theta}"
        )));
    }
    Ok(HardyEstimate {
        c_num: theta.powf(-0.5),
        theta_min: theta,
        residual: out.residuals[0],
        backend: "subspace-cg".into(),
    })
}
