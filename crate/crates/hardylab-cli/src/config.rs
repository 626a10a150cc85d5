//! Campaign configuration: a single TOML file with nested sections. Unknown
//! keys are rejected.

use serde::{Deserialize, Serialize};

use hardylab::geometry::{DomainSpec, Generator};
use hardylab::operator::{CoeffSpec, OperatorSpec, PotentialSpec, SigmaSpec};

pub const ALL_CHECKS: &[&str] = &[
    "hi",
    "thm4",
    "thm6",
    "cor5",
    "cor7",
    "lemma3",
    "lemma9_10",
    "thm11",
    "ker1",
    "ker2",
    "thm16",
    "weyl",
    "hardy_constant",
    "halfline",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub campaign: CampaignSection,
    pub domain: DomainSection,
    pub operator: OperatorSection,
    #[serde(default)]
    pub sweep: SweepSection,
    pub checks: ChecksSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_node_cap")]
    pub node_cap: usize,
    #[serde(default)]
    pub use_cache: bool,
}

fn default_node_cap() -> usize {
    hardylab::geometry::DEFAULT_NODE_CAP
}

// deny_unknown_fields cannot ride along with flatten; [domain] keys are
// validated by hand in parse_config instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSection {
    #[serde(flatten)]
    pub generator: Generator,
    pub resolution: f64,
}

impl DomainSection {
    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            generator: self.generator.clone(),
            resolution: self.resolution,
        }
    }
}

/// Operator recipe plus optional Hardy (c, a) overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub kind: OperatorKindSection,
    #[serde(default)]
    pub sigma: Option<SigmaSpec>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub alpha_w: Option<f64>,
    #[serde(default)]
    pub coeff: Option<CoeffSpec>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKindSection {
    WeightedLaplacian,
    OneDWeighted,
    DivergenceForm,
}

impl OperatorSection {
    pub fn to_spec(&self) -> Result<OperatorSpec, String> {
        match self.kind {
            OperatorKindSection::WeightedLaplacian => {
                if self.alpha_w.is_some() || self.coeff.is_some() {
                    return Err(
                        "weighted_laplacian takes sigma/potential, not alpha_w/coeff".into(),
                    );
                }
                Ok(OperatorSpec::WeightedLaplacian {
                    sigma: self.sigma.unwrap_or(SigmaSpec::One),
                    potential: self.potential.unwrap_or(PotentialSpec::Zero),
                })
            }
            OperatorKindSection::OneDWeighted => {
                if self.sigma.is_some() || self.potential.is_some() || self.coeff.is_some() {
                    return Err("one_d_weighted takes alpha_w only".into());
                }
                let alpha_w = self
                    .alpha_w
                    .ok_or_else(|| "one_d_weighted needs alpha_w".to_string())?;
                Ok(OperatorSpec::OneDWeighted { alpha_w })
            }
            OperatorKindSection::DivergenceForm => {
                if self.sigma.is_some() || self.potential.is_some() || self.alpha_w.is_some() {
                    return Err("divergence_form takes coeff only".into());
                }
                Ok(OperatorSpec::DivergenceForm {
                    coeff: self
                        .coeff
                        .ok_or_else(|| "divergence_form needs coeff".to_string())?,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Explicit strip ε list; omitted means the auto half-cell-aligned
    /// schedule.
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    /// Explicit shrink ε list for the eigenvalue-drift check; omitted means
    /// the auto grid-aligned schedule.
    #[serde(default)]
    pub shrink_eps: Option<Vec<f64>>,
    /// Target point count of the auto ε schedules.
    #[serde(default = "default_eps_points")]
    pub eps_points: usize,
    #[serde(default = "default_t_list")]
    pub t: Vec<f64>,
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_random_vectors")]
    pub random_vectors: usize,
    /// Include the 1D weighted operator's boundary-profile reference vector.
    #[serde(default)]
    pub boundary_profile: bool,
}

fn default_eps_points() -> usize {
    6
}

fn default_t_list() -> Vec<f64> {
    vec![0.05, 0.1, 0.5, 1.0]
}

fn default_n_max() -> usize {
    10
}

fn default_random_vectors() -> usize {
    5
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps: None,
            shrink_eps: None,
            eps_points: default_eps_points(),
            t: default_t_list(),
            lambda: None,
            n_max: default_n_max(),
            random_vectors: default_random_vectors(),
            boundary_profile: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_out_dir() -> String {
    "out".into()
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into(), "summary".into()]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_out_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Strip pass tolerance is c_tol·(h/ε).
    #[serde(default = "default_c_tol")]
    pub c_tol: f64,
    /// Shrink-rate pass threshold is 2/c − rate_slack.
    #[serde(default = "default_rate_slack")]
    pub rate_slack: f64,
    /// hardy_constant passes when c_num ≤ c·(1 + hardy_slack).
    #[serde(default = "default_hardy_slack")]
    pub hardy_slack: f64,
    /// Two-sided band for the half-line reference ratio.
    #[serde(default = "default_halfline_band")]
    pub halfline_band: f64,
}

fn default_c_tol() -> f64 {
    2.0
}

fn default_rate_slack() -> f64 {
    0.1
}

fn default_hardy_slack() -> f64 {
    0.025
}

fn default_halfline_band() -> f64 {
    0.02
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            c_tol: default_c_tol(),
            rate_slack: default_rate_slack(),
            hardy_slack: default_hardy_slack(),
            halfline_band: default_halfline_band(),
        }
    }
}

/// Parse and validate a config document. All failures here are configuration
/// errors (process exit code 2).
// the `!(x > 0.0)` guards reject NaN as well
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn parse_config(text: &str) -> Result<Config, String> {
    let cfg: Config = toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
    // the [domain] table is flattened, so unknown keys are rejected manually
    let raw: toml::Value = toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
    if let Some(domain) = raw.get("domain").and_then(|d| d.as_table()) {
        let allowed: &[&str] = match &cfg.domain.generator {
            Generator::Interval { .. } | Generator::HalflineTruncated { .. } => {
                &["kind", "length", "resolution"]
            }
            Generator::Rectangle { .. } => &["kind", "lx", "ly", "resolution"],
            Generator::Disk { .. } => &["kind", "radius", "resolution"],
            Generator::Lshape { .. } => &["kind", "length", "resolution"],
            Generator::SlitSquare { .. } => &["kind", "length", "slit_len", "resolution"],
            Generator::KochPrefractal { .. } => &["kind", "level", "resolution"],
            Generator::MaskFile { .. } => &["kind", "path", "resolution"],
        };
        for key in domain.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(format!("unknown key {key:?} in [domain]"));
            }
        }
    }
    if cfg.campaign.name.is_empty() {
        return Err("campaign.name must not be empty".into());
    }
    if !cfg
        .campaign
        .name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(format!(
            "campaign.name {:?} must be alphanumeric with - or _",
            cfg.campaign.name
        ));
    }
    if cfg.checks.names.is_empty() {
        return Err("checks.names is empty: nothing to verify".into());
    }
    for name in &cfg.checks.names {
        if !ALL_CHECKS.contains(&name.as_str()) {
            return Err(format!(
                "unknown check {name:?}; known checks: {}",
                ALL_CHECKS.join(", ")
            ));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for name in &cfg.checks.names {
        if !seen.insert(name.clone()) {
            return Err(format!("duplicate check {name:?}"));
        }
    }
    if !(cfg.domain.resolution > 0.0) {
        return Err(format!(
            "domain.resolution must be positive, got {}",
            cfg.domain.resolution
        ));
    }
    cfg.operator.to_spec()?;
    for (field, list) in [
        ("eps", &cfg.sweep.eps),
        ("shrink_eps", &cfg.sweep.shrink_eps),
    ] {
        if let Some(eps) = list {
            if eps.iter().any(|&e| !(e > 0.0)) {
                return Err(format!("sweep.{field} entries must be positive"));
            }
        }
    }
    for f in &cfg.output.formats {
        if !["csv", "json", "summary"].contains(&f.as_str()) {
            return Err(format!("unknown output format {f:?}"));
        }
    }
    Ok(cfg)
}
