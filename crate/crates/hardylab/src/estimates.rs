//! Boundary-decay weights ω, τ, μ and the inequality checks: the Hardy
//! inequality itself, the boundary-strip mass and gradient bounds with their
//! explicit constants c₀ = c^{2+2/c} and c₁ = c^{2/c}(1+(1+c)^{2+2/c}), the
//! monotone-weight corollary, per-eigenfunction specializations, and
//! least-squares power-law exponent fits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DistanceField;
use crate::operator::EllipticOperator;
use crate::spectral::{operator_factor_norms, shifted_power_norm, EigenSystem};

/// One inequality instance: lhs ≤ rhs expected, ratio = lhs/rhs, pass when
/// ratio ≤ 1 + tol.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub domain: String,
    pub operator: String,
    pub c: f64,
    pub a: f64,
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tol: f64,
    pub pass: bool,
    /// Test-vector id and any extra parameters (n, t, λ, γ).
    pub detail: String,
}

impl BoundReport {
    pub fn new(
        name: &str,
        op: &EllipticOperator,
        eps: f64,
        lhs: f64,
        rhs: f64,
        tol: f64,
        detail: String,
    ) -> Result<Self> {
        if !(lhs >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name}: lhs = {lhs} negative"
            )));
        }
        if !(rhs > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name}: rhs = {rhs} not positive"
            )));
        }
        let ratio = lhs / rhs;
        Ok(BoundReport {
            name: name.to_string(),
            domain: op.domain.name.clone(),
            operator: op.kind.label(),
            c: op.hardy_c,
            a: op.hardy_a,
            eps,
            lhs,
            rhs,
            ratio,
            tol,
            pass: ratio <= 1.0 + tol,
            detail,
        })
    }
}

/// Least-squares power-law fit of value against ε.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub log_constant: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// c₀ = c^{2+2/c}.
pub fn c0(c: f64) -> f64 {
    c.powf(2.0 + 2.0 / c)
}

/// c₁ = c^{2/c} + c^{2/c}(1+c)^{2+2/c}.
pub fn c1(c: f64) -> f64 {
    c.powf(2.0 / c) * (1.0 + (1.0 + c).powf(2.0 + 2.0 / c))
}

/// ω(x) = max{d(x), ε}^{−1/c}.
pub fn weight_omega(dist: &DistanceField, eps: f64, c: f64) -> Vec<f64> {
    dist.values
        .iter()
        .map(|&d| d.max(eps).powf(-1.0 / c))
        .collect()
}

/// τ: ε^{−1/c} in the strip, linear ramp down across ε < d ≤ (1+c)ε, zero
/// beyond; |∇τ| ≤ c⁻¹ε^{−1−1/c}.
pub fn weight_tau(dist: &DistanceField, eps: f64, c: f64) -> Vec<f64> {
    dist.values
        .iter()
        .map(|&d| {
            if d <= eps {
                eps.powf(-1.0 / c)
            } else if d <= (1.0 + c) * eps {
                eps.powf(-1.0 - 1.0 / c) / c * ((1.0 + c) * eps - d)
            } else {
                0.0
            }
        })
        .collect()
}

/// μ: 0 in the strip, (d−ε)/ε across ε < d ≤ 2ε, 1 beyond; 0 ≤ μ ≤ 1 with
/// |∇μ| ≤ ε⁻¹ and support inside {d > ε}.
pub fn cutoff_mu(dist: &DistanceField, eps: f64) -> Vec<f64> {
    dist.values
        .iter()
        .map(|&d| {
            if d <= eps {
                0.0
            } else if d <= 2.0 * eps {
                (d - eps) / eps
            } else {
                1.0
            }
        })
        .collect()
}

/// A test vector with its two precomputed operator factors
/// ‖(H+a)f‖_σ and ‖(H+a)^{1/c}f‖_σ.
#[derive(Debug, Clone)]
pub struct DomainVector {
    pub f: Vec<f64>,
    pub label: String,
    pub factor_h: f64,
    pub factor_frac: f64,
}

pub fn prepare_vector(
    op: &EllipticOperator,
    eig: &EigenSystem,
    f: Vec<f64>,
    label: &str,
) -> Result<DomainVector> {
    op.check_len(&f)?;
    if op.weighted_norm(&f) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (factor_h, factor_frac) = operator_factor_norms(eig, op.hardy_a, op.hardy_c, &f)?;
    Ok(DomainVector {
        f,
        label: label.to_string(),
        factor_h,
        factor_frac,
    })
}

/// Effective distances d̃ = d / distance_scale for the operator's Hardy pair.
fn effective_distances(op: &EllipticOperator, dist: &DistanceField) -> Vec<f64> {
    let s = op.distance_scale();
    dist.values.iter().map(|&d| d / s).collect()
}

/// Σ_{d̃<ε} |f|²/d̃² σ²h^dim and Σ_{d̃<ε} |f|² σ²h^dim.
fn strip_sums(op: &EllipticOperator, deff: &[f64], f: &[f64], eps: f64) -> (f64, f64) {
    let mut d2 = 0.0;
    let mut mass = 0.0;
    for (i, &d) in deff.iter().enumerate() {
        if d < eps {
            let m = f[i] * f[i] * op.weights[i];
            mass += m;
            d2 += m / (d * d);
        }
    }
    (d2, mass)
}

/// Face-based gradient energy restricted to faces whose endpoints all lie in
/// the strip (exterior endpoints count as d = 0); the face weight is σ² only,
/// so this measures ∫_{strip}|∇f|²σ².
fn strip_gradient(op: &EllipticOperator, deff: &[f64], f: &[f64], eps: f64) -> f64 {
    let h = op.domain.spacing;
    let hscale = h.powi(op.domain.dim as i32 - 2);
    let mut sum = 0.0;
    for face in &op.faces {
        let in_i = deff[face.i] < eps;
        let (fj, in_j) = match face.j {
            Some(j) => (f[j], deff[j] < eps),
            None => (0.0, true),
        };
        if in_i && in_j {
            let df = f[face.i] - fj;
            sum += face.sigma2 * hscale * df * df;
        }
    }
    sum
}

/// The Hardy inequality itself: Σ|f|²/d̃²σ² ≤ c²(Q(f) + a‖f‖²).
pub fn verify_hi(
    op: &EllipticOperator,
    dist: &DistanceField,
    f: &[f64],
    tol: f64,
    label: &str,
) -> Result<BoundReport> {
    op.check_len(f)?;
    let nrm = op.weighted_norm(f);
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let deff = effective_distances(op, dist);
    let lhs: f64 = deff
        .iter()
        .enumerate()
        .map(|(i, &d)| f[i] * f[i] / (d * d) * op.weights[i])
        .sum();
    let c = op.hardy_c;
    let rhs = c * c * (op.quadratic_form(f) + op.hardy_a * nrm * nrm);
    BoundReport::new("hi", op, f64::NAN, lhs, rhs, tol, label.to_string())
}

/// Strip decay pair: (d⁻²-weighted strip integral vs c₀ε^{2/c}·F,
/// plain strip mass vs c₀ε^{2+2/c}·F) with F = ‖(H+a)f‖‖(H+a)^{1/c}f‖.
pub fn verify_thm4(
    op: &EllipticOperator,
    dist: &DistanceField,
    vec: &DomainVector,
    eps: f64,
    tol: f64,
) -> Result<(BoundReport, BoundReport)> {
    let deff = effective_distances(op, dist);
    let (lhs_d2, lhs_mass) = strip_sums(op, &deff, &vec.f, eps);
    let c = op.hardy_c;
    let factor = vec.factor_h * vec.factor_frac;
    let strip_d2 = BoundReport::new(
        "thm4_strip_d2",
        op,
        eps,
        lhs_d2,
        c0(c) * eps.powf(2.0 / c) * factor,
        tol,
        vec.label.clone(),
    )?;
    let strip_mass = BoundReport::new(
        "thm4_strip_mass",
        op,
        eps,
        lhs_mass,
        c0(c) * eps.powf(2.0 + 2.0 / c) * factor,
        tol,
        vec.label.clone(),
    )?;
    Ok((strip_d2, strip_mass))
}

/// Strip gradient bound: ∫_{strip}|∇f|²σ² ≤ c₁ε^{2/c}·F.
pub fn verify_thm6(
    op: &EllipticOperator,
    dist: &DistanceField,
    vec: &DomainVector,
    eps: f64,
    tol: f64,
) -> Result<BoundReport> {
    let deff = effective_distances(op, dist);
    let lhs = strip_gradient(op, &deff, &vec.f, eps);
    let c = op.hardy_c;
    let rhs = c1(c) * eps.powf(2.0 / c) * vec.factor_h * vec.factor_frac;
    BoundReport::new("thm6_strip_grad", op, eps, lhs, rhs, tol, vec.label.clone())
}

/// Monotone-weight bound with g(s) = s^{−γ} − δ^{−γ} on (0, δ]:
/// Σ g(d̃)|f|²σ² ≤ c₀·γδ^{2+2/c−γ}/(2+2/c−γ)·F.
pub fn verify_cor5(
    op: &EllipticOperator,
    dist: &DistanceField,
    vec: &DomainVector,
    gamma: f64,
    delta: f64,
    tol: f64,
) -> Result<BoundReport> {
    let c = op.hardy_c;
    let p = 2.0 + 2.0 / c;
    if !(gamma >= 1e-3) || gamma >= p {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in [1e-3, {p}), got {gamma}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let deff = effective_distances(op, dist);
    let mut lhs = 0.0;
    for (i, &d) in deff.iter().enumerate() {
        if d < delta {
            let g = d.powf(-gamma) - delta.powf(-gamma);
            lhs += g * vec.f[i] * vec.f[i] * op.weights[i];
        }
    }
    let s_integral = gamma * delta.powf(p - gamma) / (p - gamma);
    let rhs = c0(c) * s_integral * vec.factor_h * vec.factor_frac;
    BoundReport::new(
        "cor5_gweight",
        op,
        delta,
        lhs,
        rhs,
        tol,
        format!("{}|gamma={gamma}", vec.label),
    )
}

/// Eigenfunction specialization: the operator factor collapses to
/// (λ+a)^{1+1/c}; also the interpolation cross-check c²ε²(λ+a) and the
/// trivial unit cap.
#[derive(Debug, Clone)]
pub struct EigenfunctionReports {
    pub mass: BoundReport,
    pub grad: BoundReport,
    pub interp: BoundReport,
    pub unit_cap: BoundReport,
}

pub fn verify_eigenfunction(
    op: &EllipticOperator,
    eig: &EigenSystem,
    dist: &DistanceField,
    n: usize,
    eps: f64,
    tol: f64,
) -> Result<EigenfunctionReports> {
    if n == 0 || n > eig.m {
        return Err(Error::InvalidParameter(format!(
            "eigenfunction index {n} out of range 1..={}",
            eig.m
        )));
    }
    let lam = eig.eigenvalues[n - 1];
    let phi = eig.vector(n - 1);
    let c = op.hardy_c;
    let a = op.hardy_a;
    let deff = effective_distances(op, dist);
    let (_, lhs_mass) = strip_sums(op, &deff, phi, eps);
    let lhs_grad = strip_gradient(op, &deff, phi, eps);
    let lam_pow = (lam + a).powf(1.0 + 1.0 / c);
    let label = format!("phi_{n}");
    let mass = BoundReport::new(
        "cor7_mass",
        op,
        eps,
        lhs_mass,
        c0(c) * eps.powf(2.0 + 2.0 / c) * lam_pow,
        tol,
        label.clone(),
    )?;
    let grad = BoundReport::new(
        "cor7_grad",
        op,
        eps,
        lhs_grad,
        c1(c) * eps.powf(2.0 / c) * lam_pow,
        tol,
        label.clone(),
    )?;
    let interp = BoundReport::new(
        "cor7_interp",
        op,
        eps,
        lhs_mass,
        c * c * eps * eps * (lam + a),
        tol,
        label.clone(),
    )?;
    let unit_cap = BoundReport::new("cor7_unit_cap", op, eps, lhs_mass, 1.0, tol, label)?;
    Ok(EigenfunctionReports {
        mass,
        grad,
        interp,
        unit_cap,
    })
}

/// |⟨Hf, ω²f⟩ + s‖ωf‖²| ≤ c^{2/c}‖(H+s)f‖‖(H+a)^{1/c}f‖.
#[allow(clippy::too_many_arguments)]
pub fn lemma1_check(
    op: &EllipticOperator,
    eig: &EigenSystem,
    dist: &DistanceField,
    f: &[f64],
    eps: f64,
    s: f64,
    tol: f64,
    label: &str,
) -> Result<BoundReport> {
    op.check_len(f)?;
    if op.weighted_norm(f) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let scale = op.distance_scale();
    let deff = DistanceField {
        values: dist.values.iter().map(|&d| d / scale).collect(),
        source: dist.source.clone(),
    };
    let omega = weight_omega(&deff, eps, op.hardy_c);
    let hf = op.apply(f);
    let of: Vec<f64> = omega.iter().zip(f).map(|(&w, &x)| w * w * x).collect();
    let lhs_inner = op.weighted_inner(&hf, &of);
    let omega_f_norm2: f64 = omega
        .iter()
        .zip(f)
        .zip(&op.weights)
        .map(|((&w, &x), &q)| w * w * x * x * q)
        .sum();
    let lhs = (lhs_inner + s * omega_f_norm2).abs();
    let c = op.hardy_c;
    let rhs = c.powf(2.0 / c)
        * shifted_power_norm(eig, s, 1.0, f)?
        * shifted_power_norm(eig, op.hardy_a, 1.0 / c, f)?;
    BoundReport::new(
        "lemma1_operator",
        op,
        eps,
        lhs,
        rhs,
        tol,
        format!("{label}|s={s}"),
    )
}

/// Q(μf) ≤ 2‖μ‖∞²Q(f) + 2‖∇μ‖∞²‖f‖² with the discrete full-gradient sup
/// (per node: Σ_axis max incident slope²).
pub fn lemma2_check(
    op: &EllipticOperator,
    field: &[f64],
    f: &[f64],
    tol: f64,
    label: &str,
) -> Result<BoundReport> {
    op.check_len(f)?;
    op.check_len(field)?;
    let nrm = op.weighted_norm(f);
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mf: Vec<f64> = field.iter().zip(f).map(|(&m, &x)| m * x).collect();
    let lhs = op.quadratic_form(&mf);
    let sup_mu = field.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let grad_sup2 = discrete_gradient_sup2(op, field);
    let rhs = 2.0 * sup_mu * sup_mu * op.quadratic_form(f) + 2.0 * grad_sup2 * nrm * nrm;
    BoundReport::new(
        "lemma2_product",
        op,
        f64::NAN,
        lhs,
        rhs,
        tol,
        label.to_string(),
    )
}

/// max over nodes of Σ_axis (max incident |Δg|/h)², the discrete |∇g|²_∞.
/// Faces to the exterior extend g by its interior value (weights vanish at
/// the boundary in the checks that use this).
fn discrete_gradient_sup2(op: &EllipticOperator, g: &[f64]) -> f64 {
    let h = op.domain.spacing;
    let dim = op.domain.dim;
    let n = op.n;
    // per node and axis, track the largest slope among incident faces
    let mut slopes = vec![[0.0f64; 2]; n];
    let offsets = op.domain.forward_offsets();
    for (k, &flat) in op.domain.interior.iter().enumerate() {
        for (axis, &off) in offsets.iter().enumerate() {
            for nb in [flat + off, flat - off] {
                if let Some(j) = op.domain.interior_index(nb) {
                    let s = (g[k] - g[j]).abs() / h;
                    if s > slopes[k][axis] {
                        slopes[k][axis] = s;
                    }
                }
            }
        }
    }
    slopes
        .iter()
        .map(|s| s[..dim].iter().map(|x| x * x).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Σ ω²|f|²/(c²d̃²)σ² ≤ c^{2/c}‖(H+a)f‖‖(H+a)^{1/c}f‖ + Σ|∇ω|²|f|²σ², the
/// gradient term summed over faces with the symmetric-mean |f|² allocation.
pub fn lemma3_check(
    op: &EllipticOperator,
    dist: &DistanceField,
    vec: &DomainVector,
    eps: f64,
    tol: f64,
) -> Result<BoundReport> {
    let c = op.hardy_c;
    let deff = effective_distances(op, dist);
    let deff_field = DistanceField {
        values: deff.clone(),
        source: dist.source.clone(),
    };
    let omega = weight_omega(&deff_field, eps, c);
    let f = &vec.f;
    let lhs: f64 = deff
        .iter()
        .enumerate()
        .map(|(i, &d)| omega[i] * omega[i] * f[i] * f[i] / (c * c * d * d) * op.weights[i])
        .sum();
    // face sum Σ stiff·(Δω)²·(f_i²+f_j²)/2 dominates the exact correction
    // Σ stiff·(Δω)²·f_i f_j of the discrete product-rule identity
    let mut grad_term = 0.0;
    for face in &op.faces {
        if let Some(j) = face.j {
            let dw = omega[face.i] - omega[j];
            grad_term += face.stiff * dw * dw * 0.5 * (f[face.i] * f[face.i] + f[j] * f[j]);
        }
        // exterior faces: ω extends by its interior value, contributing zero
    }
    let rhs = c.powf(2.0 / c) * vec.factor_h * vec.factor_frac + grad_term;
    BoundReport::new("lemma3_weighted", op, eps, lhs, rhs, tol, vec.label.clone())
}

/// Least-squares slope of log(value) against log(ε) inside the window.
pub fn fit_exponent(points: &[(f64, f64)], window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    let selected: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, _)| *e >= lo && *e <= hi)
        .cloned()
        .collect();
    if selected.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 points in the window [{lo}, {hi}], have {}",
            selected.len()
        )));
    }
    for &(e, v) in &selected {
        if !(v > 0.0) {
            return Err(Error::Fit(format!("nonpositive value {v} at eps = {e}")));
        }
    }
    let xs: Vec<f64> = selected.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = selected.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate window: all eps equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ExponentFit {
        exponent: slope,
        log_constant: intercept,
        r_squared,
        window,
    })
}
