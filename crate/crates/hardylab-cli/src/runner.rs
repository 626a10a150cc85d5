//! Campaign orchestration: builds the domain and operator once, computes the
//! shared spectral data lazily, dispatches the requested checks and collects
//! their reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hardylab::estimates::{
    fit_exponent, lemma3_check, prepare_vector, verify_cor5, verify_eigenfunction, verify_hi,
    verify_thm4, verify_thm6, BoundReport, DomainVector, ExponentFit,
};
use hardylab::geometry::{build_domain, distance_to_boundary, DistanceField, GridDomain};
use hardylab::kernels::{
    gram_projection_norm2, halfline_reference, ultracontractivity_check, verify_ker1, verify_ker2,
    verify_thm16, weyl_bracket, HeatReport,
};
use hardylab::operator::{EllipticOperator, OperatorSpec};
use hardylab::perturbation::{
    shrink_and_solve, verify_lemma9_10, verify_thm11, ShrinkRate, ShrinkTable,
};
use hardylab::spectral::{
    cache, counting, eigensolve, fractional_apply, full_op_ref, EigenSystem, SolveCount,
};

use crate::config::Config;

/// Fatal campaign failure with its process exit classification.
#[derive(Debug)]
pub enum RunError {
    /// Configuration or domain-construction problem (exit 2).
    Config(String),
    /// Numerical failure inside a check (exit 3).
    Numerical(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone)]
pub struct NamedFit {
    pub name: String,
    pub fit: ExponentFit,
    pub target: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOutcome {
    pub check: String,
    pub pass: bool,
    pub vacuous: bool,
    pub bound_reports: Vec<BoundReport>,
    pub heat_reports: Vec<HeatReport>,
    pub fits: Vec<NamedFit>,
    pub shrink: Option<(ShrinkTable, Vec<ShrinkRate>)>,
    pub scalars: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    fn named(check: &str) -> Self {
        CheckOutcome {
            check: check.to_string(),
            pass: true,
            ..Default::default()
        }
    }

    fn fold_reports(&mut self) {
        if !self.bound_reports.iter().all(|r| r.pass) {
            self.pass = false;
        }
        if !self.heat_reports.iter().all(|r| r.pass) {
            self.pass = false;
        }
        if !self.fits.iter().all(|f| f.pass) {
            self.pass = false;
        }
        if let Some((_, rates)) = &self.shrink {
            if !rates.iter().all(|r| r.pass) {
                self.pass = false;
            }
        }
        if self.bound_reports.is_empty()
            && self.heat_reports.is_empty()
            && self.fits.is_empty()
            && self.shrink.is_none()
            && self.scalars.is_empty()
        {
            self.vacuous = true;
        }
    }
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub name: String,
    pub seed: u64,
    pub domain_name: String,
    pub dim: usize,
    pub resolution: f64,
    pub interior_nodes: usize,
    pub max_distance: f64,
    pub operator_label: String,
    pub hardy_c: f64,
    pub hardy_a: f64,
    pub checks: Vec<CheckOutcome>,
}

impl CampaignOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.vacuous || c.pass)
    }
}

struct Ctx {
    cfg: Config,
    domain: Arc<GridDomain>,
    dist: DistanceField,
    op: EllipticOperator,
    op_spec: OperatorSpec,
    eig: Option<Arc<EigenSystem>>,
    vectors: Option<Arc<Vec<DomainVector>>>,
    cache_dir: Option<PathBuf>,
    jobs: usize,
}

impl Ctx {
    fn h_eff(&self) -> f64 {
        self.domain.spacing / self.op.distance_scale()
    }

    fn max_deff(&self) -> f64 {
        self.dist.max() / self.op.distance_scale()
    }

    fn strip_tol(&self, eps: f64) -> f64 {
        self.cfg.tolerances.c_tol * self.h_eff() / eps
    }

    /// Half-cell-aligned geometric ε schedule (descending), in effective
    /// distance units: ε = (k+½)·h̃ with k from 0.2·max d̃ down to 3.5h̃.
    fn strip_schedule(&self) -> Vec<f64> {
        if let Some(eps) = &self.cfg.sweep.eps {
            let mut v = eps.clone();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return v;
        }
        let h = self.h_eff();
        let eps_max = 0.2 * self.max_deff();
        let k_max = (eps_max / h - 0.5).floor() as i64;
        let k_min = 3i64;
        if k_max < k_min {
            return Vec::new();
        }
        geometric_ks(k_max, k_min, self.cfg.sweep.eps_points)
            .into_iter()
            .map(|k| (k as f64 + 0.5) * h)
            .collect()
    }

    /// Grid-aligned shrink schedule (plain d units): ε = k·h, descending,
    /// from max d/20 down to 2h. Grid alignment makes the shrunk masks exact
    /// grid regions (no mask-quantization bias in the gaps), and the small
    /// ε ceiling keeps the gap curve in its leading power-law regime.
    fn shrink_schedule(&self) -> Vec<f64> {
        if let Some(eps) = &self.cfg.sweep.shrink_eps {
            let mut v = eps.clone();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return v;
        }
        let h = self.domain.spacing;
        let k_max = (self.dist.max() / 20.0 / h).floor() as i64;
        let k_min = 2i64;
        if k_max < k_min {
            return Vec::new();
        }
        geometric_ks(k_max, k_min, self.cfg.sweep.eps_points)
            .into_iter()
            .map(|k| k as f64 * h)
            .collect()
    }

    fn ensure_eig(&mut self) -> Result<Arc<EigenSystem>, RunError> {
        if let Some(eig) = &self.eig {
            return Ok(eig.clone());
        }
        let op_ref = full_op_ref(&self.op);
        if let Some(dir) = &self.cache_dir {
            if let Ok(Some(cached)) = cache::load(dir, &op_ref) {
                let arc = Arc::new(cached);
                self.eig = Some(arc.clone());
                return Ok(arc);
            }
        }
        let eig = eigensolve(&self.op, SolveCount::All)
            .map_err(|e| RunError::Numerical(e.to_string()))?;
        if let Some(dir) = &self.cache_dir {
            cache::save(&eig, dir).map_err(|e| RunError::Numerical(e.to_string()))?;
        }
        let arc = Arc::new(eig);
        self.eig = Some(arc.clone());
        Ok(arc)
    }

    /// Test vectors: eigenfunctions up to n_max, seeded random vectors pushed
    /// through (H+a)⁻¹, and optionally the 1D boundary profile.
    fn ensure_vectors(&mut self) -> Result<Arc<Vec<DomainVector>>, RunError> {
        if let Some(v) = &self.vectors {
            return Ok(v.clone());
        }
        let eig = self.ensure_eig()?;
        let mut out = Vec::new();
        let n_eigen = self.cfg.sweep.n_max.min(eig.m);
        let numerical = |e: hardylab::Error| RunError::Numerical(e.to_string());
        for n in 1..=n_eigen {
            let phi = eig.vector(n - 1).to_vec();
            out.push(prepare_vector(&self.op, &eig, phi, &format!("phi_{n}")).map_err(numerical)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.campaign.seed);
        for k in 0..self.cfg.sweep.random_vectors {
            let g: Vec<f64> = (0..self.op.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = fractional_apply(&eig, -1.0, self.op.hardy_a, &g).map_err(numerical)?;
            out.push(prepare_vector(&self.op, &eig, f, &format!("random_{k}")).map_err(numerical)?);
        }
        if self.cfg.sweep.boundary_profile {
            if let Some(profile) = self.op.boundary_profile() {
                out.push(
                    prepare_vector(&self.op, &eig, profile, "boundary_profile")
                        .map_err(numerical)?,
                );
            }
        }
        let arc = Arc::new(out);
        self.vectors = Some(arc.clone());
        Ok(arc)
    }
}

fn geometric_ks(k_max: i64, k_min: i64, points: usize) -> Vec<i64> {
    let points = points.max(2);
    let mut ks = Vec::new();
    if k_max == k_min {
        return vec![k_max];
    }
    let ratio = (k_min as f64 / k_max as f64).powf(1.0 / (points as f64 - 1.0));
    for j in 0..points {
        let k = (k_max as f64 * ratio.powi(j as i32)).round() as i64;
        let k = k.clamp(k_min, k_max);
        if ks.last() != Some(&k) {
            ks.push(k);
        }
    }
    ks
}

pub fn run_campaign(
    cfg: &Config,
    out_dir: &Path,
    jobs: usize,
) -> Result<CampaignOutcome, RunError> {
    let config_err = |e: hardylab::Error| RunError::Config(e.to_string());
    let domain =
        Arc::new(build_domain(&cfg.domain.to_spec(), cfg.campaign.node_cap).map_err(config_err)?);
    let dist = distance_to_boundary(&domain);
    let op_spec = cfg.operator.to_spec().map_err(RunError::Config)?;
    let op = op_spec
        .assemble(&domain, cfg.operator.c, cfg.operator.a)
        .map_err(config_err)?;
    let cache_dir = cfg.campaign.use_cache.then(|| out_dir.join("cache"));
    let mut ctx = Ctx {
        cfg: cfg.clone(),
        domain,
        dist,
        op,
        op_spec,
        eig: None,
        vectors: None,
        cache_dir,
        jobs: jobs.max(1),
    };
    let mut names = cfg.checks.names.clone();
    names.sort();
    let mut checks = Vec::new();
    for name in &names {
        checks.push(run_check(&mut ctx, name)?);
    }
    Ok(CampaignOutcome {
        name: cfg.campaign.name.clone(),
        seed: cfg.campaign.seed,
        domain_name: ctx.domain.name.clone(),
        dim: ctx.domain.dim,
        resolution: ctx.domain.spacing,
        interior_nodes: ctx.domain.node_count(),
        max_distance: ctx.dist.max(),
        operator_label: ctx.op.kind.label(),
        hardy_c: ctx.op.hardy_c,
        hardy_a: ctx.op.hardy_a,
        checks,
    })
}

fn run_check(ctx: &mut Ctx, name: &str) -> Result<CheckOutcome, RunError> {
    let numerical = |e: hardylab::Error| RunError::Numerical(e.to_string());
    let mut out = CheckOutcome::named(name);
    match name {
        "hi" => {
            let vectors = ctx.ensure_vectors()?;
            for v in vectors.iter() {
                out.bound_reports
                    .push(verify_hi(&ctx.op, &ctx.dist, &v.f, 1e-9, &v.label).map_err(numerical)?);
            }
        }
        "thm4" => {
            let vectors = ctx.ensure_vectors()?;
            let schedule = ctx.strip_schedule();
            if schedule.is_empty() {
                out.notes
                    .push("empty eps schedule: grid too coarse for strips".into());
            }
            for v in vectors.iter() {
                let mut d2_points = Vec::new();
                for &eps in &schedule {
                    let (d2, mass) = verify_thm4(&ctx.op, &ctx.dist, v, eps, ctx.strip_tol(eps))
                        .map_err(numerical)?;
                    d2_points.push((eps, d2.lhs));
                    out.bound_reports.push(d2);
                    out.bound_reports.push(mass);
                }
                if v.label == "boundary_profile" {
                    profile_reproduction(ctx, &d2_points, &mut out);
                }
            }
        }
        "thm6" => {
            let vectors = ctx.ensure_vectors()?;
            let schedule = ctx.strip_schedule();
            for v in vectors.iter() {
                for &eps in &schedule {
                    out.bound_reports.push(
                        verify_thm6(&ctx.op, &ctx.dist, v, eps, ctx.strip_tol(eps))
                            .map_err(numerical)?,
                    );
                }
            }
        }
        "cor5" => {
            let vectors = ctx.ensure_vectors()?;
            let delta = 0.5 * ctx.max_deff();
            let p = 2.0 + 2.0 / ctx.op.hardy_c;
            for v in vectors.iter() {
                for gamma in [0.5, 1.0, 2.0] {
                    if gamma >= p {
                        continue;
                    }
                    out.bound_reports.push(
                        verify_cor5(&ctx.op, &ctx.dist, v, gamma, delta, ctx.strip_tol(delta))
                            .map_err(numerical)?,
                    );
                }
            }
        }
        "cor7" => {
            let eig = ctx.ensure_eig()?;
            let schedule = ctx.strip_schedule();
            let n_eigen = ctx.cfg.sweep.n_max.min(eig.m);
            for n in 1..=n_eigen {
                for &eps in &schedule {
                    let reps =
                        verify_eigenfunction(&ctx.op, &eig, &ctx.dist, n, eps, ctx.strip_tol(eps))
                            .map_err(numerical)?;
                    out.bound_reports.push(reps.mass);
                    out.bound_reports.push(reps.grad);
                    out.bound_reports.push(reps.interp);
                    out.bound_reports.push(reps.unit_cap);
                }
            }
        }
        "lemma3" => {
            let vectors = ctx.ensure_vectors()?;
            let schedule = ctx.strip_schedule();
            for v in vectors.iter() {
                for &eps in schedule.iter().take(3) {
                    out.bound_reports.push(
                        lemma3_check(&ctx.op, &ctx.dist, v, eps, ctx.strip_tol(eps))
                            .map_err(numerical)?,
                    );
                }
            }
        }
        "lemma9_10" => {
            let eig = ctx.ensure_eig()?;
            let vectors = ctx.ensure_vectors()?;
            let cap = 0.5 * ctx.max_deff();
            let schedule: Vec<f64> = ctx
                .strip_schedule()
                .into_iter()
                .filter(|&e| e < cap)
                .collect();
            for v in vectors.iter() {
                for &eps in &schedule {
                    let (q, nb) =
                        verify_lemma9_10(&ctx.op, &eig, &ctx.dist, v, eps, ctx.strip_tol(eps))
                            .map_err(numerical)?;
                    out.bound_reports.push(q);
                    out.bound_reports.push(nb);
                }
            }
            // crucial-order note: the norm deficit must decay faster than the
            // energy deficit; record both fitted exponents on φ₁
            if let Some(v) = vectors.iter().find(|v| v.label == "phi_1") {
                let mut e_pts = Vec::new();
                let mut n_pts = Vec::new();
                for &eps in &schedule {
                    let mu = hardylab::estimates::cutoff_mu(
                        &DistanceField {
                            values: ctx
                                .dist
                                .values
                                .iter()
                                .map(|&d| d / ctx.op.distance_scale())
                                .collect(),
                            source: ctx.dist.source.clone(),
                        },
                        eps,
                    );
                    let muf: Vec<f64> = mu.iter().zip(&v.f).map(|(&m, &x)| m * x).collect();
                    let de = ctx.op.quadratic_form(&muf) - ctx.op.quadratic_form(&v.f);
                    let dn = ctx.op.weighted_norm(&v.f) - ctx.op.weighted_norm(&muf);
                    if de > 0.0 && dn > 0.0 {
                        e_pts.push((eps, de));
                        n_pts.push((eps, dn));
                    }
                }
                if e_pts.len() >= 4 {
                    if let (Ok(ef), Ok(nf)) = (
                        fit_exponent(&e_pts, (0.0, f64::INFINITY)),
                        fit_exponent(&n_pts, (0.0, f64::INFINITY)),
                    ) {
                        let ok = nf.exponent > ef.exponent;
                        out.fits.push(NamedFit {
                            name: "lemma9_energy_deficit".into(),
                            fit: ef,
                            target: None,
                            pass: true,
                        });
                        out.fits.push(NamedFit {
                            name: "lemma10_norm_deficit".into(),
                            fit: nf,
                            target: None,
                            pass: ok,
                        });
                        out.notes.push(format!(
                            "norm deficit decays faster than energy deficit: {ok}"
                        ));
                    }
                }
            }
        }
        "thm11" => {
            let schedule = ctx.shrink_schedule();
            if schedule.len() < 4 {
                out.vacuous = true;
                out.notes.push(format!(
                    "only {} shrink eps values available; need 4 for a rate fit",
                    schedule.len()
                ));
                return Ok(out);
            }
            let n_max = ctx.cfg.sweep.n_max.max(1);
            let table = shrink_and_solve(
                &ctx.domain,
                &ctx.dist,
                &ctx.op_spec,
                ctx.op.hardy_c,
                &schedule,
                n_max,
                ctx.jobs,
            )
            .map_err(numerical)?;
            let rates = verify_thm11(&table, (0.0, f64::INFINITY), ctx.cfg.tolerances.rate_slack)
                .map_err(numerical)?;
            out.shrink = Some((table, rates));
        }
        "ker1" => {
            let eig = ctx.ensure_eig()?;
            let h = ctx.domain.spacing;
            let alpha = ctx.op.hardy_c / 2.0;
            let c0v = hardylab::estimates::c0(ctx.op.hardy_c);
            let c2_ref = (4.0 * std::f64::consts::PI).powf(-(ctx.domain.dim as f64) / 2.0);
            let Some(&eps) = ctx.strip_schedule().first() else {
                out.notes.push("empty eps schedule".into());
                out.vacuous = true;
                return Ok(out);
            };
            // deterministic source sample: deepest node, a near-boundary
            // node, and the median index
            let (mut y_deep, mut y_near) = (0usize, 0usize);
            for (i, &d) in ctx.dist.values.iter().enumerate() {
                if d > ctx.dist.values[y_deep] {
                    y_deep = i;
                }
                if d < ctx.dist.values[y_near] {
                    y_near = i;
                }
            }
            let sources = [y_deep, y_near, ctx.op.n / 2];
            let t_list: Vec<f64> = ctx
                .cfg
                .sweep
                .t
                .iter()
                .cloned()
                .filter(|&t| t >= 20.0 * h * h && t <= 1.0)
                .collect();
            for &t in &t_list {
                for &y in &sources {
                    out.heat_reports.push(
                        verify_ker1(
                            &eig,
                            &ctx.dist,
                            y,
                            eps,
                            t,
                            c0v,
                            alpha,
                            ctx.op.hardy_a,
                            c2_ref,
                            ctx.domain.dim,
                            ctx.op.distance_scale(),
                            ctx.strip_tol(eps),
                        )
                        .map_err(numerical)?,
                    );
                }
                out.heat_reports.push(
                    ultracontractivity_check(&eig, t, c2_ref, ctx.domain.dim, h, 0.01)
                        .map_err(numerical)?,
                );
            }
            if t_list.is_empty() {
                out.notes.push("no lattice-resolved t in (0, 1]".into());
            }
        }
        "ker2" => {
            let eig = ctx.ensure_eig()?;
            let alpha = ctx.op.hardy_c / 2.0;
            let c0v = hardylab::estimates::c0(ctx.op.hardy_c);
            let mut eps_list = ctx.strip_schedule();
            eps_list.reverse(); // ascending for readable fits
            let t_list: Vec<f64> = ctx
                .cfg
                .sweep
                .t
                .iter()
                .cloned()
                .filter(|&t| t > 0.0 && t <= 1.0)
                .collect();
            if eps_list.is_empty() || t_list.is_empty() {
                out.vacuous = true;
                out.notes.push("empty eps or t schedule".into());
                return Ok(out);
            }
            let tol = ctx.strip_tol(*eps_list.first().unwrap());
            let outcome = verify_ker2(
                &eig,
                &ctx.dist,
                &eps_list,
                &t_list,
                c0v,
                alpha,
                ctx.op.hardy_a,
                ctx.domain.dim,
                ctx.op.distance_scale(),
                tol,
            )
            .map_err(numerical)?;
            out.heat_reports = outcome.reports;
            let eps_target = 2.0 + 1.0 / alpha - 0.1;
            let eps_max = eps_list.iter().cloned().fold(0.0f64, f64::max);
            for (t, fit) in outcome.eps_fits {
                // the ε-power law is the ε → 0 statement at fixed t; across
                // the crossover ε² ~ t the strip swallows the kernel's decay
                // layer and the local slope genuinely drops, so the target
                // binds only inside the ε² ≤ t/4 regime
                let in_regime = eps_max * eps_max <= t / 4.0;
                if !in_regime {
                    out.notes.push(format!(
                        "eps-exponent at t = {t} is informational: eps^2/t reaches {:.3}",
                        eps_max * eps_max / t
                    ));
                }
                let pass = !in_regime || fit.exponent >= eps_target;
                out.fits.push(NamedFit {
                    name: format!("ker2_eps_exponent[t={t}]"),
                    fit,
                    target: in_regime.then_some(eps_target),
                    pass,
                });
            }
            for (eps, fit) in outcome.t_fits {
                out.fits.push(NamedFit {
                    name: format!("ker2_t_exponent[eps={eps}]"),
                    fit,
                    target: None,
                    pass: true,
                });
            }
            out.scalars.insert("c4_hat".into(), outcome.c4_hat);
        }
        "thm16" => {
            let eig = ctx.ensure_eig()?;
            let alpha = ctx.op.hardy_c / 2.0;
            let c0v = hardylab::estimates::c0(ctx.op.hardy_c);
            let lambdas = match &ctx.cfg.sweep.lambda {
                Some(l) => l.clone(),
                None => default_lambdas(&eig),
            };
            let schedule = ctx.strip_schedule();
            for &lambda in &lambdas {
                if counting(&eig, lambda).is_err() {
                    out.notes
                        .push(format!("lambda {lambda} above the computed spectrum"));
                    out.pass = false;
                    continue;
                }
                for &eps in &schedule {
                    out.heat_reports.push(
                        verify_thm16(
                            &eig,
                            &ctx.dist,
                            eps,
                            lambda,
                            c0v,
                            alpha,
                            ctx.op.hardy_a,
                            ctx.op.distance_scale(),
                            ctx.strip_tol(eps),
                        )
                        .map_err(numerical)?,
                    );
                    let g2 = gram_projection_norm2(
                        &eig,
                        &ctx.dist,
                        eps,
                        lambda,
                        ctx.op.distance_scale(),
                    )
                    .map_err(numerical)?;
                    let rhs = c0v
                        * eps.powf(2.0 + 1.0 / alpha)
                        * (lambda + ctx.op.hardy_a).powf(1.0 + 1.0 / (2.0 * alpha));
                    out.heat_reports.push(HeatReport {
                        name: "thm16_gram_norm".into(),
                        t: f64::NAN,
                        eps_or_lambda: lambda,
                        lhs: g2,
                        rhs,
                        ratio: if rhs > 0.0 { g2 / rhs } else { 0.0 },
                        tol: ctx.strip_tol(eps),
                        pass: rhs <= 0.0 || g2 / rhs <= 1.0 + ctx.strip_tol(eps),
                        detail: format!("eps={eps}"),
                    });
                }
            }
        }
        "weyl" => {
            let eig = ctx.ensure_eig()?;
            let (a1, a2) = weyl_bracket(&eig, ctx.domain.dim).map_err(numerical)?;
            out.scalars.insert("weyl_a1".into(), a1);
            out.scalars.insert("weyl_a2".into(), a2);
            let l1 = eig.eigenvalues[0];
            out.pass = a1 > 0.0 && a1 <= l1 && l1 <= a2;
            out.notes.push(format!(
                "a1 = {a1}, a2 = {a2} over the lower two-thirds of {} modes",
                eig.m
            ));
        }
        "hardy_constant" => {
            let est = hardylab::spectral::estimate_hardy_constant(&ctx.op, &ctx.dist)
                .map_err(numerical)?;
            out.scalars.insert("c_num".into(), est.c_num);
            out.scalars.insert("theta_min".into(), est.theta_min);
            out.scalars.insert("residual".into(), est.residual);
            let cap = ctx.op.hardy_c * (1.0 + ctx.cfg.tolerances.hardy_slack);
            out.pass = est.c_num <= cap;
            out.notes.push(format!(
                "c_num = {:.6} vs hardy c = {} (cap {:.4}), backend {}",
                est.c_num, ctx.op.hardy_c, cap, est.backend
            ));
        }
        "halfline" => {
            let band = ctx.cfg.tolerances.halfline_band;
            for j in 0..5 {
                let eps = 1e-3 * 10f64.powf(j as f64 / 2.0);
                for scale in [100.0, 1000.0] {
                    let t = scale * eps * eps;
                    let (exact, asym) = halfline_reference(eps, t).map_err(numerical)?;
                    let ratio = exact / asym;
                    out.heat_reports.push(HeatReport {
                        name: "halfline_reference".into(),
                        t,
                        eps_or_lambda: eps,
                        lhs: exact,
                        rhs: asym,
                        ratio,
                        tol: band,
                        pass: (ratio - 1.0).abs() <= band,
                        detail: format!("eps2_over_t={}", eps * eps / t),
                    });
                }
            }
        }
        other => {
            return Err(RunError::Config(format!("unknown check {other:?}")));
        }
    }
    out.fold_reports();
    Ok(out)
}

/// The 1D weighted operator's boundary profile has the closed-form strip
/// integral ∫_{d<ε}(|f|²/d²)σ² = ε^{3−α}/(3−α) for ε < 1: check each swept ε
/// against it (two-sided, 1%) and fit the ε-exponent (target 3−α = 2+2/c).
fn profile_reproduction(ctx: &Ctx, d2_points: &[(f64, f64)], out: &mut CheckOutcome) {
    let hardylab::operator::OperatorKind::OneDWeighted { alpha_w } = ctx.op.kind else {
        return;
    };
    let p = 3.0 - alpha_w;
    for &(eps, lhs) in d2_points {
        if eps >= 1.0 {
            continue;
        }
        let rhs = eps.powf(p) / p;
        let ratio = lhs / rhs;
        out.bound_reports.push(BoundReport {
            name: "profile_strip_closed_form".into(),
            domain: ctx.domain.name.clone(),
            operator: ctx.op.kind.label(),
            c: ctx.op.hardy_c,
            a: ctx.op.hardy_a,
            eps,
            lhs,
            rhs,
            ratio,
            tol: 0.01,
            pass: (ratio - 1.0).abs() <= 0.01,
            detail: "boundary_profile".into(),
        });
    }
    let in_range: Vec<(f64, f64)> = d2_points
        .iter()
        .filter(|(e, _)| *e < 1.0)
        .cloned()
        .collect();
    if in_range.len() >= 4 {
        if let Ok(fit) = fit_exponent(&in_range, (0.0, f64::INFINITY)) {
            let pass = (fit.exponent - p).abs() <= 0.05;
            out.fits.push(NamedFit {
                name: format!("profile_strip_d2_exponent_expected_{p}"),
                fit,
                target: Some(p),
                pass,
            });
        }
    }
}

/// Default spectral-density thresholds: midpoints above the 1st, 4th and
/// 10th computed eigenvalues.
fn default_lambdas(eig: &EigenSystem) -> Vec<f64> {
    let mut out = Vec::new();
    for k in [1usize, 4, 10] {
        if k < eig.m {
            out.push(0.5 * (eig.eigenvalues[k - 1] + eig.eigenvalues[k]));
        }
    }
    out
}
