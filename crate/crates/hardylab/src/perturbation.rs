//! Eigenvalue drift under inward domain shrinking: tables of λ_n on the
//! shrunk regions {d > ε}, fitted decay rates against the ε^{2/c} bound, and
//! the cutoff-function energy/norm lemmas feeding that bound.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{c0, c1, cutoff_mu, fit_exponent, BoundReport, DomainVector, ExponentFit};
use crate::geometry::{inner_region, DistanceField, GridDomain};
use crate::operator::{EllipticOperator, OperatorSpec};
use crate::spectral::{eigensolve, EigenSystem, SolveCount};

/// λ_n(U_ε) for n ≤ n_max over an ε list, plus the ε = 0 baseline.
#[derive(Debug, Clone, Serialize)]
pub struct ShrinkTable {
    pub domain: String,
    pub operator: String,
    pub hardy_c: f64,
    pub eps: Vec<f64>,
    pub baseline: Vec<f64>,
    /// lambdas[k][j] = λ_{j+1}(U_{eps[k]}).
    pub lambdas: Vec<Vec<f64>>,
}

/// Re-assemble the operator recipe on each shrunk mask {d > ε} (same grid,
/// coefficients restricted by positional sampling) and record the lowest
/// n_max eigenvalues. Per-ε eigensolves are independent; `jobs > 1` runs
/// them on scoped threads with results keyed by position, so the table is
/// identical for any job count.
pub fn shrink_and_solve(
    domain: &Arc<GridDomain>,
    dist: &DistanceField,
    op_spec: &OperatorSpec,
    hardy_c: f64,
    eps_list: &[f64],
    n_max: usize,
    jobs: usize,
) -> Result<ShrinkTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let base_op = op_spec.assemble(domain, Some(hardy_c.max(2.0)), None)?;
    let base_eig = eigensolve(&base_op, SolveCount::Lowest(n_max))?;
    let baseline = base_eig.eigenvalues.clone();
    let mut eps_sorted: Vec<f64> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let solve_one = |eps: f64| -> Result<Vec<f64>> {
        if eps == 0.0 {
            return Ok(baseline.clone());
        }
        let shrunk = Arc::new(inner_region(domain, dist, eps)?);
        if shrunk.node_count() < n_max {
            return Err(Error::EmptyRegion(format!(
                "{}: only {} interior nodes left at eps = {eps}, need {n_max}",
                shrunk.name,
                shrunk.node_count()
            )));
        }
        let op = op_spec.assemble(&shrunk, Some(hardy_c.max(2.0)), None)?;
        Ok(eigensolve(&op, SolveCount::Lowest(n_max))?.eigenvalues)
    };
    let lambdas: Vec<Vec<f64>> = if jobs <= 1 || eps_sorted.len() <= 1 {
        let mut rows = Vec::with_capacity(eps_sorted.len());
        for &eps in &eps_sorted {
            rows.push(solve_one(eps)?);
        }
        rows
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<Result<Vec<f64>>>>> = eps_sorted
            .iter()
            .map(|_| std::sync::Mutex::new(None))
            .collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(eps_sorted.len()) {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if k >= eps_sorted.len() {
                        break;
                    }
                    let row = solve_one(eps_sorted[k]);
                    *slots[k].lock().unwrap() = Some(row);
                });
            }
        });
        let mut rows = Vec::with_capacity(eps_sorted.len());
        for slot in slots {
            rows.push(slot.into_inner().unwrap().expect("worker filled slot")?);
        }
        rows
    };
    Ok(ShrinkTable {
        domain: domain.name.clone(),
        operator: op_spec.label(),
        hardy_c,
        eps: eps_sorted,
        baseline,
        lambdas,
    })
}

/// Per-mode outcome of the shrink-rate check: gap_n(ε) = λ_n(U_ε) − λ_n(U)
/// must vanish at least as fast as ε^{2/c}, i.e. carry a fitted exponent
/// ≥ 2/c − slack, with the empirical constant ĉ_n = max gap/ε^{2/c}.
#[derive(Debug, Clone, Serialize)]
pub struct ShrinkRate {
    pub n: usize,
    pub fit: ExponentFit,
    pub c_hat: f64,
    pub rate_target: f64,
    pub pass: bool,
}

pub fn verify_thm11(
    table: &ShrinkTable,
    fit_window: (f64, f64),
    rate_slack: f64,
) -> Result<Vec<ShrinkRate>> {
    let c = table.hardy_c;
    let rate_target = 2.0 / c - rate_slack;
    let n_max = table.baseline.len();
    let mut out = Vec::with_capacity(n_max);
    for j in 0..n_max {
        let mut points = Vec::new();
        let mut c_hat = 0.0f64;
        for (k, &eps) in table.eps.iter().enumerate() {
            if eps == 0.0 {
                continue;
            }
            let gap = table.lambdas[k][j] - table.baseline[j];
            if gap < -1e-8 * table.baseline[j].abs().max(1.0) {
                return Err(Error::NoConvergence(format!(
                    "non-monotone gap {gap} for mode {} at eps = {eps}",
                    j + 1
                )));
            }
            let gap = gap.max(0.0);
            points.push((eps, gap));
            c_hat = c_hat.max(gap / eps.powf(2.0 / c));
        }
        let fit = fit_exponent(&points, fit_window)?;
        // sandwich: the reported constant really dominates every swept gap
        for &(eps, gap) in &points {
            debug_assert!(gap <= c_hat * eps.powf(2.0 / c) * (1.0 + 1e-12));
        }
        out.push(ShrinkRate {
            n: j + 1,
            fit: fit.clone(),
            c_hat,
            rate_target,
            pass: fit.exponent >= rate_target,
        });
    }
    Ok(out)
}

/// Explicit constants for the cutoff lemmas, aggregated from the strip
/// bounds over the shell {ε < d < 2ε}:
/// c₂ = 2^{1+2/c}(c₁ + 4c₀) and c₃ = (c₀·2^{2+2/c})^{1/2}.
pub fn c2(c: f64) -> f64 {
    2.0f64.powf(1.0 + 2.0 / c) * (c1(c) + 4.0 * c0(c))
}

pub fn c3(c: f64) -> f64 {
    (c0(c) * 2.0f64.powf(2.0 + 2.0 / c)).sqrt()
}

/// Cutoff energy and norm bounds:
/// Q(μf) ≤ Q(f) + ε^{2/c}c₂‖(H+a)f‖‖(H+a)^{1/c}f‖ and
/// ‖μf‖ ≥ ‖f‖ − c₃ε^{1+1/c}(‖(H+a)f‖‖(H+a)^{1/c}f‖)^{1/2}.
pub fn verify_lemma9_10(
    op: &EllipticOperator,
    eig: &EigenSystem,
    dist: &DistanceField,
    vec: &DomainVector,
    eps: f64,
    tol: f64,
) -> Result<(BoundReport, BoundReport)> {
    let _ = eig;
    let scale = op.distance_scale();
    let deff = DistanceField {
        values: dist.values.iter().map(|&d| d / scale).collect(),
        source: dist.source.clone(),
    };
    if eps >= 0.5 * deff.max() {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} at or beyond max d̃/2 = {}: the cutoff support is empty",
            0.5 * deff.max()
        )));
    }
    let mu = cutoff_mu(&deff, eps);
    let f = &vec.f;
    let muf: Vec<f64> = mu.iter().zip(f).map(|(&m, &x)| m * x).collect();
    let c = op.hardy_c;
    let factor = vec.factor_h * vec.factor_frac;
    let q_bound = BoundReport::new(
        "lemma9_energy",
        op,
        eps,
        op.quadratic_form(&muf),
        op.quadratic_form(f) + eps.powf(2.0 / c) * c2(c) * factor,
        tol,
        format!("{}|c2={}", vec.label, c2(c)),
    )?;
    let norm_f = op.weighted_norm(f);
    let norm_muf = op.weighted_norm(&muf);
    let deficit = (norm_f - norm_muf).max(0.0);
    let norm_bound = BoundReport::new(
        "lemma10_norm",
        op,
        eps,
        deficit,
        c3(c) * eps.powf(1.0 + 1.0 / c) * factor.sqrt(),
        tol,
        format!("{}|c3={}", vec.label, c3(c)),
    )?;
    Ok((q_bound, norm_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::prepare_vector;
    use crate::geometry::{build_domain, distance_to_boundary, DomainSpec, Generator};
    use crate::operator::{CoeffSpec, PotentialSpec, SigmaSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn interval_domain(h: f64) -> (Arc<GridDomain>, DistanceField) {
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Interval { length: 1.0 },
                    resolution: h,
                },
                200_000,
            )
            .unwrap(),
        );
        let dist = distance_to_boundary(&dom);
        (dom, dist)
    }

    fn laplacian_spec() -> OperatorSpec {
        OperatorSpec::WeightedLaplacian {
            sigma: SigmaSpec::One,
            potential: PotentialSpec::Zero,
        }
    }

    #[test]
    fn interval_shrunk_eigenvalue_matches_closed_form() {
        let h = 1.0 / 512.0;
        let (dom, dist) = interval_domain(h);
        let table =
            shrink_and_solve(&dom, &dist, &laplacian_spec(), 2.0, &[0.0, 0.01], 1, 1).unwrap();
        // continuum: λ₁(U_0.01) = π²/0.98² = 10.27666…
        let lam = table.lambdas[1][0];
        assert_relative_eq!(lam, PI * PI / (0.98 * 0.98), max_relative = 0.01);
        // ε = 0 row is the baseline
        assert_eq!(table.lambdas[0], table.baseline);
    }

    #[test]
    fn aligned_eps_makes_gaps_sharp() {
        // ε = kh: the shrunk interval is exactly the width-(1−2ε) grid interval
        let h = 1.0 / 512.0;
        let (dom, dist) = interval_domain(h);
        let eps: Vec<f64> = [8usize, 16, 32].iter().map(|&k| k as f64 * h).collect();
        let table = shrink_and_solve(&dom, &dist, &laplacian_spec(), 2.0, &eps, 3, 2).unwrap();
        for (k, &e) in table.eps.iter().enumerate() {
            for j in 0..3 {
                let kk = (j + 1) as f64;
                let want = kk * kk * PI * PI * ((1.0 - 2.0 * e).powi(-2) - 1.0);
                let gap = table.lambdas[k][j] - table.baseline[j];
                assert_relative_eq!(gap, want, max_relative = 0.02);
            }
        }
    }

    #[test]
    fn thm11_rate_on_the_interval() {
        let h = 1.0 / 512.0;
        let (dom, dist) = interval_domain(h);
        let eps: Vec<f64> = [2usize, 3, 4, 6, 8, 11, 16]
            .iter()
            .map(|&k| k as f64 * h)
            .collect();
        let table = shrink_and_solve(&dom, &dist, &laplacian_spec(), 2.0, &eps, 3, 2).unwrap();
        let rates = verify_thm11(&table, (0.0, 1.0), 0.1).unwrap();
        for r in &rates {
            assert!(r.pass, "mode {} exponent {}", r.n, r.fit.exponent);
            // the interval rate is sharp: exponent ≈ 1 = 2/c
            assert!(
                (r.fit.exponent - 1.0).abs() < 0.05,
                "exponent {}",
                r.fit.exponent
            );
            // ĉ_n ≈ 4π²n² from the expansion of the shrunk eigenvalue
            let want = 4.0 * PI * PI * (r.n * r.n) as f64;
            assert!(
                r.c_hat > 0.8 * want && r.c_hat < 1.5 * want,
                "c_hat {}",
                r.c_hat
            );
        }
    }

    #[test]
    fn square_shrunk_eigenvalue_closed_form() {
        let h = 1.0 / 32.0;
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Rectangle { lx: 1.0, ly: 1.0 },
                    resolution: h,
                },
                200_000,
            )
            .unwrap(),
        );
        let dist = distance_to_boundary(&dom);
        let eps = 2.0 * h; // aligned
        let table = shrink_and_solve(&dom, &dist, &laplacian_spec(), 2.0, &[eps], 1, 1).unwrap();
        let want = 2.0 * PI * PI / (1.0 - 2.0 * eps).powi(2);
        assert_relative_eq!(table.lambdas[0][0], want, max_relative = 0.01);
    }

    #[test]
    fn divergence_form_shrink_keeps_rate() {
        // checkerboard α = 2 on the square: rate target 1/α − 0.1 = 0.4
        let h = 1.0 / 32.0;
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Rectangle { lx: 1.0, ly: 1.0 },
                    resolution: h,
                },
                200_000,
            )
            .unwrap(),
        );
        let dist = distance_to_boundary(&dom);
        let spec = OperatorSpec::DivergenceForm {
            coeff: CoeffSpec::Checkerboard {
                alpha: 2.0,
                cells: 4,
            },
        };
        let eps: Vec<f64> = [1usize, 2, 3, 4].iter().map(|&k| k as f64 * h).collect();
        let table = shrink_and_solve(&dom, &dist, &spec, 4.0, &eps, 1, 1).unwrap();
        let rates = verify_thm11(&table, (0.0, 1.0), 0.1).unwrap();
        assert!(rates[0].pass, "exponent {}", rates[0].fit.exponent);
        assert!(rates[0].fit.exponent >= 0.4);
    }

    #[test]
    fn lemma9_10_bounds_and_limits() {
        let h = 1.0 / 256.0;
        let (dom, dist) = interval_domain(h);
        let op = laplacian_spec().assemble(&dom, None, None).unwrap();
        let eig = eigensolve(&op, SolveCount::All).unwrap();
        let phi1 = eig.vector(0).to_vec();
        let v = prepare_vector(&op, &eig, phi1, "phi_1").unwrap();
        for eps in [0.02, 0.05, 0.1] {
            let (q, nb) = verify_lemma9_10(&op, &eig, &dist, &v, eps, 0.0).unwrap();
            assert!(q.pass, "lemma9 ratio {} at eps {eps}", q.ratio);
            assert!(nb.pass, "lemma10 ratio {} at eps {eps}", nb.ratio);
        }
        // explicit closed-form rhs for lemma10 on an eigenfunction
        let (_, nb) = verify_lemma9_10(&op, &eig, &dist, &v, 0.02, 0.0).unwrap();
        let lam = eig.eigenvalues[0];
        assert_relative_eq!(
            nb.rhs,
            c3(2.0) * 0.02f64.powf(1.5) * lam.powf(0.75),
            max_relative = 1e-9
        );
        // cutoff support empties out beyond max d/2
        assert!(verify_lemma9_10(&op, &eig, &dist, &v, 0.3, 0.0).is_err());
        // ε → 0: ‖μf‖ → ‖f‖
        let mut prev_deficit = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025, 0.0125] {
            let (_, nb) = verify_lemma9_10(&op, &eig, &dist, &v, eps, 0.0).unwrap();
            assert!(nb.lhs <= prev_deficit);
            prev_deficit = nb.lhs;
        }
        assert!(prev_deficit < 1e-3);
    }

    #[test]
    fn lemma10_deficit_decays_faster_than_lemma9() {
        // the norm deficit (ε^{1+1/c} scale) must vanish faster than the
        // energy deficit (ε^{2/c} scale) as ε → 0
        let h = 1.0 / 512.0;
        let (dom, dist) = interval_domain(h);
        let op = laplacian_spec().assemble(&dom, None, None).unwrap();
        let eig = eigensolve(&op, SolveCount::All).unwrap();
        let phi1 = eig.vector(0).to_vec();
        let v = prepare_vector(&op, &eig, phi1, "phi_1").unwrap();
        let f = &v.f;
        let mut e_points = Vec::new();
        let mut n_points = Vec::new();
        for k in [8usize, 12, 17, 24, 34, 48] {
            let eps = (k as f64 + 0.5) * h;
            let mu = cutoff_mu(&dist, eps);
            let muf: Vec<f64> = mu.iter().zip(f).map(|(&m, &x)| m * x).collect();
            let energy_deficit = (op.quadratic_form(&muf) - op.quadratic_form(f)).max(1e-300);
            let norm_deficit = (op.weighted_norm(f) - op.weighted_norm(&muf)).max(1e-300);
            e_points.push((eps, energy_deficit));
            n_points.push((eps, norm_deficit));
        }
        let e_fit = fit_exponent(&e_points, (0.0, 1.0)).unwrap();
        let n_fit = fit_exponent(&n_points, (0.0, 1.0)).unwrap();
        assert!(
            n_fit.exponent > e_fit.exponent + 0.5,
            "norm exponent {} vs energy exponent {}",
            n_fit.exponent,
            e_fit.exponent
        );
        // energy deficit scales like ε^{2/c} = ε (sharp), norm like ε³
        assert!((e_fit.exponent - 1.0).abs() < 0.2);
        assert!((n_fit.exponent - 3.0).abs() < 0.3);
    }
}
