//! Report emission: CSV tables, a versioned JSON summary and a human-readable
//! text summary, all written atomically (temp file + rename).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::runner::{CampaignOutcome, CheckOutcome};

pub const SCHEMA_VERSION: u32 = 1;

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "".to_string()
    } else {
        format!("{x}")
    }
}

pub fn bounds_csv(outcome: &CampaignOutcome) -> String {
    let mut s = String::from("name,domain,operator,c,a,eps,lhs,rhs,ratio,pass,tol\n");
    for check in &outcome.checks {
        for r in &check.bound_reports {
            let _ = writeln!(
                s,
                "{}[{}],{},{},{},{},{},{},{},{},{},{}",
                r.name,
                r.detail,
                r.domain,
                r.operator,
                fmt_f64(r.c),
                fmt_f64(r.a),
                fmt_f64(r.eps),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.ratio),
                r.pass,
                fmt_f64(r.tol)
            );
        }
    }
    s
}

pub fn heat_csv(outcome: &CampaignOutcome) -> String {
    let mut s = String::from("name,domain,operator,t,eps_or_lambda,lhs,rhs,ratio,pass\n");
    for check in &outcome.checks {
        for r in &check.heat_reports {
            let _ = writeln!(
                s,
                "{}[{}],{},{},{},{},{},{},{},{}",
                r.name,
                r.detail,
                outcome.domain_name,
                outcome.operator_label,
                fmt_f64(r.t),
                fmt_f64(r.eps_or_lambda),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.ratio),
                r.pass
            );
        }
    }
    s
}

pub fn shrink_csv(outcome: &CampaignOutcome) -> String {
    let mut s = String::from("domain,operator,n,eps,lambda,gap\n");
    for check in &outcome.checks {
        if let Some((table, _rates)) = &check.shrink {
            for (k, &eps) in table.eps.iter().enumerate() {
                for (j, &lam) in table.lambdas[k].iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        table.domain,
                        table.operator,
                        j + 1,
                        eps,
                        lam,
                        lam - table.baseline[j]
                    );
                }
            }
        }
    }
    s
}

pub fn summary_json(outcome: &CampaignOutcome) -> Result<String> {
    let value = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "campaign": outcome.name,
        "seed": outcome.seed,
        "domain": {
            "name": outcome.domain_name,
            "dim": outcome.dim,
            "resolution": outcome.resolution,
            "interior_nodes": outcome.interior_nodes,
            "max_distance": outcome.max_distance,
        },
        "operator": {
            "label": outcome.operator_label,
            "hardy_c": outcome.hardy_c,
            "hardy_a": outcome.hardy_a,
        },
        "pass": outcome.pass(),
        "checks": outcome.checks.iter().map(check_json).collect::<Vec<_>>(),
    });
    Ok(format!("{:#}\n", value))
}

fn check_json(check: &CheckOutcome) -> serde_json::Value {
    let worst = check
        .bound_reports
        .iter()
        .map(|r| r.ratio)
        .chain(check.heat_reports.iter().map(|r| r.ratio))
        .fold(f64::NEG_INFINITY, f64::max);
    serde_json::json!({
        "check": check.check,
        "pass": check.pass,
        "vacuous": check.vacuous,
        "bound_reports": check.bound_reports,
        "heat_reports": check.heat_reports,
        "worst_ratio": if worst.is_finite() { Some(worst) } else { None },
        "fits": check.fits.iter().map(|nf| serde_json::json!({
            "name": nf.name,
            "exponent": nf.fit.exponent,
            "log_constant": nf.fit.log_constant,
            "r_squared": nf.fit.r_squared,
            "window": nf.fit.window,
            "target": nf.target,
            "pass": nf.pass,
        })).collect::<Vec<_>>(),
        "shrink": check.shrink.as_ref().map(|(table, rates)| serde_json::json!({
            "table": table,
            "rates": rates,
        })),
        "scalars": check.scalars,
        "notes": check.notes,
    })
}

pub fn summary_text(outcome: &CampaignOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "campaign {}  (seed {})", outcome.name, outcome.seed);
    let _ = writeln!(
        s,
        "domain {}  h = {}  interior nodes = {}  max d = {:.6}",
        outcome.domain_name, outcome.resolution, outcome.interior_nodes, outcome.max_distance
    );
    let _ = writeln!(
        s,
        "operator {}  c = {}  a = {}",
        outcome.operator_label, outcome.hardy_c, outcome.hardy_a
    );
    let _ = writeln!(s);
    for check in &outcome.checks {
        let status = if check.vacuous {
            "VACUOUS"
        } else if check.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let worst = check
            .bound_reports
            .iter()
            .map(|r| r.ratio)
            .chain(check.heat_reports.iter().map(|r| r.ratio))
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = write!(s, "{status:8} {:14}", check.check);
        if worst.is_finite() {
            let _ = write!(s, " worst ratio {worst:.6}");
        }
        let _ = writeln!(s);
        for nf in &check.fits {
            let _ = writeln!(
                s,
                "         fit {}: exponent {:.4} (r2 {:.4}){}",
                nf.name,
                nf.fit.exponent,
                nf.fit.r_squared,
                match nf.target {
                    Some(t) =>
                        format!(" target >= {t:.4}: {}", if nf.pass { "ok" } else { "MISS" }),
                    None => String::new(),
                }
            );
        }
        if let Some((_table, rates)) = &check.shrink {
            for r in rates {
                let _ = writeln!(
                    s,
                    "         mode {}: gap exponent {:.4} (target >= {:.4}, c_hat {:.4}) {}",
                    r.n,
                    r.fit.exponent,
                    r.rate_target,
                    r.c_hat,
                    if r.pass { "ok" } else { "MISS" }
                );
            }
        }
        for (k, v) in &check.scalars {
            let _ = writeln!(s, "         {k} = {v}");
        }
        for note in &check.notes {
            let _ = writeln!(s, "         note: {note}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "overall: {}",
        if outcome.pass() { "PASS" } else { "FAIL" }
    );
    s
}

/// Write the campaign's requested outputs; returns the file list.
pub fn write_outputs(
    outcome: &CampaignOutcome,
    dir: &Path,
    formats: &[String],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let base = dir.join(&outcome.name);
    let has_bounds = outcome.checks.iter().any(|c| !c.bound_reports.is_empty());
    let has_heat = outcome.checks.iter().any(|c| !c.heat_reports.is_empty());
    let has_shrink = outcome.checks.iter().any(|c| c.shrink.is_some());
    if formats.iter().any(|f| f == "csv") {
        if has_bounds {
            let p = base.with_file_name(format!("{}_bounds.csv", outcome.name));
            write_atomic(&p, &bounds_csv(outcome))?;
            written.push(p);
        }
        if has_heat {
            let p = base.with_file_name(format!("{}_heat.csv", outcome.name));
            write_atomic(&p, &heat_csv(outcome))?;
            written.push(p);
        }
        if has_shrink {
            let p = base.with_file_name(format!("{}_shrink.csv", outcome.name));
            write_atomic(&p, &shrink_csv(outcome))?;
            written.push(p);
        }
    }
    if formats.iter().any(|f| f == "json") {
        let p = base.with_file_name(format!("{}_summary.json", outcome.name));
        write_atomic(&p, &summary_json(outcome)?)?;
        written.push(p);
    }
    if formats.iter().any(|f| f == "summary") {
        let p = base.with_file_name(format!("{}_summary.txt", outcome.name));
        write_atomic(&p, &summary_text(outcome))?;
        written.push(p);
    }
    Ok(written)
}
