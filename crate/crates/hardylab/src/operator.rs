//! Assembly of the discrete self-adjoint operators: weighted Laplacians
//! −σ⁻²∇·(σ²∇f)+Vf, the 1D weighted operator with σ(x) = x^{α/2}, and
//! divergence-form operators with measurable diagonal coefficients, together
//! with their quadratic forms and σ²-weighted inner products.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridDomain, HardyClass};

/// Pointwise weight σ on the full grid (exterior values are needed where a
/// face touches the boundary).
#[derive(Debug, Clone)]
pub struct WeightField {
    pub sigma: Vec<f64>,
    pub description: String,
}

/// Nonnegative potential per interior node.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub v: Vec<f64>,
}

impl PotentialField {
    pub fn zero(n: usize) -> Self {
        PotentialField { v: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        PotentialField { v: vec![c; n] }
    }
}

/// Weight generators expressible in campaign configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaSpec {
    One,
    /// σ(x) = x^{alpha_w/2} as a function of the first coordinate.
    Power {
        alpha_w: f64,
    },
}

impl SigmaSpec {
    fn eval(&self, p: [f64; 2]) -> f64 {
        match self {
            SigmaSpec::One => 1.0,
            SigmaSpec::Power { alpha_w } => p[0].max(0.0).powf(0.5 * alpha_w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant { value: f64 },
}

/// Diagonal coefficient generators for divergence-form operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffSpec {
    Identity,
    Scalar {
        value: f64,
    },
    Diag {
        ax: f64,
        ay: f64,
    },
    /// Alternating diag(1,1) / diag(α²,α²) cells of edge length 1/cells,
    /// anchored at the coordinate origin (restriction-stable).
    Checkerboard {
        alpha: f64,
        cells: u32,
    },
}

impl CoeffSpec {
    /// Coefficient along `axis` sampled at a face midpoint.
    fn eval(&self, p: [f64; 2], axis: usize) -> f64 {
        match self {
            CoeffSpec::Identity => 1.0,
            CoeffSpec::Scalar { value } => *value,
            CoeffSpec::Diag { ax, ay } => {
                if axis == 0 {
                    *ax
                } else {
                    *ay
                }
            }
            CoeffSpec::Checkerboard { alpha, cells } => {
                let c = *cells as f64;
                let ix = (p[0] * c).floor() as i64;
                let iy = (p[1] * c).floor() as i64;
                if (ix + iy).rem_euclid(2) == 0 {
                    1.0
                } else {
                    alpha * alpha
                }
            }
        }
    }

    /// Ellipticity constant α with 1 ≤ a(x) ≤ α², or an error when the
    /// generator leaves [1, ∞).
    pub fn ellipticity(&self) -> Result<f64> {
        let check = |lo: f64, hi: f64| -> Result<f64> {
            if lo < 1.0 {
                return Err(Error::InvalidField(format!(
                    "coefficient lower bound {lo} < 1 violates ellipticity normalization"
                )));
            }
            Ok(hi.sqrt())
        };
        match self {
            CoeffSpec::Identity => Ok(1.0),
            CoeffSpec::Scalar { value } => check(*value, *value),
            CoeffSpec::Diag { ax, ay } => check(ax.min(*ay), ax.max(*ay)),
            CoeffSpec::Checkerboard { alpha, cells } => {
                if *alpha < 1.0 {
                    return Err(Error::InvalidField(format!(
                        "checkerboard alpha {alpha} must be >= 1"
                    )));
                }
                if *cells == 0 {
                    return Err(Error::InvalidField("checkerboard needs cells >= 1".into()));
                }
                Ok(*alpha)
            }
        }
    }
}

/// Operator recipe; positional sampling makes re-assembly on a shrunk mask
/// the restriction of the same coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    WeightedLaplacian {
        sigma: SigmaSpec,
        potential: PotentialSpec,
    },
    OneDWeighted {
        alpha_w: f64,
    },
    DivergenceForm {
        coeff: CoeffSpec,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    WeightedLaplacian,
    OneDWeighted { alpha_w: f64 },
    DivergenceForm { alpha: f64 },
}

impl OperatorKind {
    pub fn label(&self) -> String {
        match self {
            OperatorKind::WeightedLaplacian => "weighted_laplacian".into(),
            OperatorKind::OneDWeighted { alpha_w } => format!("one_d_weighted({alpha_w})"),
            OperatorKind::DivergenceForm { alpha } => format!("divergence_form(alpha={alpha})"),
        }
    }
}

/// One lattice face. `j = None` marks a face to an exterior (Dirichlet) node.
#[derive(Debug, Clone, Copy)]
pub struct Face {
    pub i: usize,
    pub j: Option<usize>,
    /// σ² sampled on the face.
    pub sigma2: f64,
    /// Divergence-form coefficient along the face axis (1 otherwise).
    pub acoef: f64,
    /// Full stiffness weight σ²·a·h^{dim−2}.
    pub stiff: f64,
}

/// Discrete self-adjoint operator in the σ²-weighted inner product.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    pub domain: Arc<GridDomain>,
    pub kind: OperatorKind,
    pub hardy_c: f64,
    pub hardy_a: f64,
    pub faces: Vec<Face>,
    /// Quadrature weight σ²·h^dim per interior node.
    pub weights: Vec<f64>,
    pub potential: Vec<f64>,
    pub n: usize,
}

impl OperatorSpec {
    pub fn label(&self) -> String {
        match self {
            OperatorSpec::WeightedLaplacian { sigma, potential } => {
                format!("weighted_laplacian(sigma={sigma:?},v={potential:?})")
            }
            OperatorSpec::OneDWeighted { alpha_w } => format!("one_d_weighted({alpha_w})"),
            OperatorSpec::DivergenceForm { coeff } => format!("divergence_form({coeff:?})"),
        }
    }

    /// Assemble on a domain, with optional Hardy (c, a) overrides. The c
    /// override also unlocks derived or mask-file domains whose Hardy class
    /// is unknown.
    pub fn assemble(
        &self,
        domain: &Arc<GridDomain>,
        c_override: Option<f64>,
        a_override: Option<f64>,
    ) -> Result<EllipticOperator> {
        if let Some(c) = c_override {
            if c < 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "hardy c must be >= 2, got {c}"
                )));
            }
        }
        let mut op = match self {
            OperatorSpec::WeightedLaplacian { sigma, potential } => {
                let sig = WeightField {
                    sigma: (0..domain.shape[0] * domain.shape[1])
                        .map(|flat| sigma.eval(domain.position(flat)))
                        .collect(),
                    description: format!("{sigma:?}"),
                };
                if matches!(sigma, SigmaSpec::Power { .. }) {
                    return Err(Error::InvalidField(
                        "power-law sigma is only supported by the one_d_weighted kind \
                         (faces need midpoint sampling near the singular node)"
                            .into(),
                    ));
                }
                let v = match potential {
                    PotentialSpec::Zero => PotentialField::zero(domain.node_count()),
                    PotentialSpec::Constant { value } => {
                        PotentialField::constant(domain.node_count(), *value)
                    }
                };
                assemble_weighted_laplacian_with(domain, &sig, &v, c_override)?
            }
            OperatorSpec::OneDWeighted { alpha_w } => {
                if domain.dim != 1 {
                    return Err(Error::InvalidSpec(
                        "one_d_weighted needs a 1D domain".into(),
                    ));
                }
                assemble_1d_weighted_on(domain, *alpha_w)?
            }
            OperatorSpec::DivergenceForm { coeff } => {
                assemble_divergence_form_with(domain, *coeff, c_override)?
            }
        };
        if let Some(c) = c_override {
            op.hardy_c = c;
        }
        if let Some(a) = a_override {
            if a < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "hardy a must be >= 0, got {a}"
                )));
            }
            op.hardy_a = a;
        }
        Ok(op)
    }
}

fn hardy_c_for(domain: &GridDomain) -> Result<f64> {
    match domain.hardy_class {
        HardyClass::Convex => Ok(2.0),
        HardyClass::SimplyConnected2D => Ok(4.0),
        HardyClass::Unknown => Err(Error::InvalidSpec(format!(
            "{}: no Hardy constant known for this domain; supply an explicit c",
            domain.name
        ))),
    }
}

fn face_scale(domain: &GridDomain) -> f64 {
    // h^{dim-2}: 1/h in 1D, 1 in 2D
    domain.spacing.powi(domain.dim as i32 - 2)
}

/// Enumerate lattice faces once: each interior node contributes its +axis
/// faces, plus any −axis faces to exterior nodes.
fn enumerate_faces(
    domain: &GridDomain,
    mut sigma2_at: impl FnMut([f64; 2]) -> f64,
    mut acoef_at: impl FnMut([f64; 2], usize) -> f64,
) -> Vec<Face> {
    let hscale = face_scale(domain);
    let h = domain.spacing;
    let mut faces = Vec::new();
    for (k, &flat) in domain.interior.iter().enumerate() {
        let p = domain.position(flat);
        for (axis, off) in domain.forward_offsets().into_iter().enumerate() {
            // +axis face
            let mid_plus = {
                let mut m = p;
                m[axis] += 0.5 * h;
                m
            };
            let s2 = sigma2_at(mid_plus);
            let a = acoef_at(mid_plus, axis);
            faces.push(Face {
                i: k,
                j: domain.interior_index(flat + off),
                sigma2: s2,
                acoef: a,
                stiff: s2 * a * hscale,
            });
            // −axis face only when the neighbor is exterior (else the
            // neighbor's +axis enumeration covers it)
            if domain.interior_index(flat - off).is_none() {
                let mid_minus = {
                    let mut m = p;
                    m[axis] -= 0.5 * h;
                    m
                };
                let s2 = sigma2_at(mid_minus);
                let a = acoef_at(mid_minus, axis);
                faces.push(Face {
                    i: k,
                    j: None,
                    sigma2: s2,
                    acoef: a,
                    stiff: s2 * a * hscale,
                });
            }
        }
    }
    faces
}

/// Weighted Laplacian −σ⁻²∇·(σ²∇f)+Vf with face σ² by geometric mean of the
/// adjacent node values.
pub fn assemble_weighted_laplacian(
    domain: &Arc<GridDomain>,
    sigma: &WeightField,
    v: &PotentialField,
) -> Result<EllipticOperator> {
    assemble_weighted_laplacian_with(domain, sigma, v, None)
}

fn assemble_weighted_laplacian_with(
    domain: &Arc<GridDomain>,
    sigma: &WeightField,
    v: &PotentialField,
    c_hint: Option<f64>,
) -> Result<EllipticOperator> {
    let n = domain.node_count();
    if sigma.sigma.len() != domain.shape[0] * domain.shape[1] {
        return Err(Error::DimensionMismatch {
            expected: domain.shape[0] * domain.shape[1],
            got: sigma.sigma.len(),
        });
    }
    if v.v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.v.len(),
        });
    }
    for &flat in domain.interior.iter().chain(domain.boundary_nodes.iter()) {
        if !(sigma.sigma[flat] > 0.0) {
            return Err(Error::InvalidField(format!(
                "sigma must be positive on interior and boundary nodes, found {} at node {flat}",
                sigma.sigma[flat]
            )));
        }
    }
    if let Some(bad) = v.v.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidField(format!(
            "potential must be >= 0, found {bad}"
        )));
    }
    let h = domain.spacing;
    let vol = h.powi(domain.dim as i32);
    let weights: Vec<f64> = domain
        .interior
        .iter()
        .map(|&flat| sigma.sigma[flat] * sigma.sigma[flat] * vol)
        .collect();
    // geometric mean on faces: σ_f² = σ_i · σ_j, looked up from the face
    // midpoint's two adjacent nodes
    let hh = h;
    let dom = domain.clone();
    let sig = sigma.sigma.clone();
    let sigma2_at = move |mid: [f64; 2]| -> f64 {
        let fx = (mid[0] - dom.origin[0]) / hh;
        let fy = (mid[1] - dom.origin[1]) / hh;
        let (ix0, iy0) = (fx.floor() as usize, fy.floor() as usize);
        let (ix1, iy1) = (fx.ceil() as usize, fy.ceil() as usize);
        let a = sig[ix0 + iy0 * dom.shape[0]];
        let b = sig[ix1 + iy1 * dom.shape[0]];
        a * b
    };
    let faces = enumerate_faces(domain, sigma2_at, |_, _| 1.0);
    let c = match c_hint {
        Some(c) => c,
        None => hardy_c_for(domain)?,
    };
    Ok(EllipticOperator {
        domain: domain.clone(),
        kind: OperatorKind::WeightedLaplacian,
        hardy_c: c,
        hardy_a: 0.0,
        faces,
        weights,
        potential: v.v.clone(),
        n,
    })
}

/// The 1D weighted operator −x^{−α}(x^{α}f′)′ on (0, L) truncated with a
/// Dirichlet condition at L. Faces sample σ² = x^α at the face midpoint, which
/// keeps the weight positive next to the singular node at x = 0. Carries
/// c = 2/(1−α), a = 0.
pub fn assemble_1d_weighted(alpha_w: f64, length: f64, h: f64) -> Result<EllipticOperator> {
    let spec = crate::geometry::DomainSpec {
        generator: crate::geometry::Generator::HalflineTruncated { length },
        resolution: h,
    };
    let domain = Arc::new(crate::geometry::build_domain(&spec, usize::MAX)?);
    assemble_1d_weighted_on(&domain, alpha_w)
}

fn assemble_1d_weighted_on(domain: &Arc<GridDomain>, alpha_w: f64) -> Result<EllipticOperator> {
    if !(0.0..1.0).contains(&alpha_w) {
        return Err(Error::InvalidParameter(format!(
            "alpha_w must lie in [0,1), got {alpha_w}"
        )));
    }
    let h = domain.spacing;
    let weights: Vec<f64> = domain
        .interior
        .iter()
        .map(|&flat| domain.position(flat)[0].powf(alpha_w) * h)
        .collect();
    let sigma2_at = move |mid: [f64; 2]| mid[0].max(0.0).powf(alpha_w);
    let faces = enumerate_faces(domain, sigma2_at, |_, _| 1.0);
    Ok(EllipticOperator {
        domain: domain.clone(),
        kind: OperatorKind::OneDWeighted { alpha_w },
        hardy_c: 2.0 / (1.0 - alpha_w),
        hardy_a: 0.0,
        faces,
        weights,
        potential: vec![0.0; domain.node_count()],
        n: domain.node_count(),
    })
}

/// Divergence-form operator −Σ ∂_i(a^{ii} ∂_j f) with σ = 1 and diagonal
/// face-sampled coefficients. Carries c = 2α for the rescaled distance d/α.
pub fn assemble_divergence_form(
    domain: &Arc<GridDomain>,
    coeff: CoeffSpec,
) -> Result<EllipticOperator> {
    assemble_divergence_form_with(domain, coeff, None)
}

fn assemble_divergence_form_with(
    domain: &Arc<GridDomain>,
    coeff: CoeffSpec,
    c_hint: Option<f64>,
) -> Result<EllipticOperator> {
    let alpha = coeff.ellipticity()?;
    let h = domain.spacing;
    let vol = h.powi(domain.dim as i32);
    let n = domain.node_count();
    let weights = vec![vol; n];
    let amin2 = 1.0 - 1e-12;
    let amax2 = alpha * alpha * (1.0 + 1e-12);
    let mut violation = None;
    let faces = enumerate_faces(
        domain,
        |_| 1.0,
        |mid, axis| {
            let a = coeff.eval(mid, axis);
            if !(amin2..=amax2).contains(&a) && violation.is_none() {
                violation = Some((mid, a));
            }
            a
        },
    );
    if let Some((mid, a)) = violation {
        return Err(Error::InvalidField(format!(
            "ellipticity violated: a = {a} at face midpoint {mid:?} outside [1, {}]",
            alpha * alpha
        )));
    }
    let c = match (c_hint, domain.hardy_class) {
        (Some(c), _) => c,
        (None, HardyClass::Convex | HardyClass::SimplyConnected2D) => 2.0 * alpha,
        (None, HardyClass::Unknown) => {
            return Err(Error::InvalidSpec(format!(
                "{}: divergence form needs a domain with a known Hardy class or an explicit c",
                domain.name
            )))
        }
    };
    Ok(EllipticOperator {
        domain: domain.clone(),
        kind: OperatorKind::DivergenceForm { alpha },
        hardy_c: c.max(2.0),
        hardy_a: 0.0,
        faces,
        weights,
        potential: vec![0.0; n],
        n,
    })
}

impl EllipticOperator {
    pub fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        Ok(())
    }

    /// H f in the node basis.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n);
        let mut out: Vec<f64> = self
            .potential
            .iter()
            .zip(f)
            .map(|(&v, &fi)| v * fi)
            .collect();
        let hscale = 1.0; // stiffness already carries h^{dim-2}
        for face in &self.faces {
            let fj = face.j.map_or(0.0, |j| f[j]);
            let flux = face.stiff * hscale * (f[face.i] - fj);
            out[face.i] += flux / self.weights[face.i];
            if let Some(j) = face.j {
                out[j] -= flux / self.weights[j];
            }
        }
        out
    }

    /// Q(f) = Σ_faces σ²a|Δf/h|²h^dim + Σ V|f|²σ²h^dim (Dirichlet: exterior 0).
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n);
        let mut q = 0.0;
        for face in &self.faces {
            let fj = face.j.map_or(0.0, |j| f[j]);
            let d = f[face.i] - fj;
            q += face.stiff * d * d;
        }
        for (k, &v) in self.potential.iter().enumerate() {
            q += v * f[k] * f[k] * self.weights[k];
        }
        q
    }

    pub fn weighted_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n);
        assert_eq!(g.len(), self.n);
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((&a, &b), &w)| a * b * w)
            .sum()
    }

    pub fn weighted_norm(&self, f: &[f64]) -> f64 {
        self.weighted_inner(f, f).sqrt()
    }

    /// Similarity-symmetrized dense matrix M = D·H·D⁻¹, D = diag(σ h^{dim/2}).
    pub fn symmetrized_dense(&self) -> Array2<f64> {
        let n = self.n;
        let sqrt_w: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let mut m = Array2::<f64>::zeros((n, n));
        for (k, &v) in self.potential.iter().enumerate() {
            m[(k, k)] = v;
        }
        for face in &self.faces {
            let i = face.i;
            m[(i, i)] += face.stiff / self.weights[i];
            if let Some(j) = face.j {
                m[(j, j)] += face.stiff / self.weights[j];
                let off = -face.stiff / (sqrt_w[i] * sqrt_w[j]);
                m[(i, j)] += off;
                m[(j, i)] += off;
            }
        }
        m
    }

    /// Sparse view of the symmetrized operator for iterative solvers:
    /// (diagonal, interior-interior couplings).
    pub fn symmetrized_sparse(&self) -> SymmetrizedOp {
        let n = self.n;
        let sqrt_w: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let mut diag = self.potential.clone();
        let mut couplings = Vec::new();
        for face in &self.faces {
            let i = face.i;
            diag[i] += face.stiff / self.weights[i];
            if let Some(j) = face.j {
                diag[j] += face.stiff / self.weights[j];
                couplings.push((i, j, -face.stiff / (sqrt_w[i] * sqrt_w[j])));
            }
        }
        SymmetrizedOp { n, diag, couplings }
    }

    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// Effective distance rescaling for the Hardy pair: d̃ = d/α for
    /// divergence-form operators, d otherwise.
    pub fn distance_scale(&self) -> f64 {
        match self.kind {
            OperatorKind::DivergenceForm { alpha } => alpha,
            _ => 1.0,
        }
    }

    /// The distinguished boundary-profile vector of the 1D weighted operator:
    /// x^{2−α} cut off smoothly on [1,2], zero beyond. Its strip integral
    /// ∫_{x<ε}(|f|²/d²)σ² equals ε^{3−α}/(3−α) exactly for ε < 1.
    pub fn boundary_profile(&self) -> Option<Vec<f64>> {
        let OperatorKind::OneDWeighted { alpha_w } = self.kind else {
            return None;
        };
        let p = 2.0 - alpha_w;
        Some(
            self.domain
                .interior
                .iter()
                .map(|&flat| {
                    let x = self.domain.position(flat)[0];
                    let cut = if x <= 1.0 {
                        1.0
                    } else if x >= 2.0 {
                        0.0
                    } else {
                        let s = 2.0 - x;
                        s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
                    };
                    x.powf(p) * cut
                })
                .collect(),
        )
    }
}

/// Symmetric operator in the similarity-transformed basis, stored as diagonal
/// plus interior-interior couplings.
#[derive(Debug, Clone)]
pub struct SymmetrizedOp {
    pub n: usize,
    pub diag: Vec<f64>,
    pub couplings: Vec<(usize, usize, f64)>,
}

impl SymmetrizedOp {
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        for (o, (&d, &x)) in out.iter_mut().zip(self.diag.iter().zip(u)) {
            *o = d * x;
        }
        for &(i, j, m) in &self.couplings {
            out[i] += m * u[j];
            out[j] += m * u[i];
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(u, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, distance_to_boundary, DomainSpec, Generator};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn interval(h: f64) -> Arc<GridDomain> {
        Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Interval { length: 1.0 },
                    resolution: h,
                },
                100_000,
            )
            .unwrap(),
        )
    }

    fn laplacian(domain: &Arc<GridDomain>) -> EllipticOperator {
        let spec = OperatorSpec::WeightedLaplacian {
            sigma: SigmaSpec::One,
            potential: PotentialSpec::Zero,
        };
        spec.assemble(domain, None, None).unwrap()
    }

    fn seeded_vec(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn tridiagonal_action_on_interval() {
        let dom = interval(0.25);
        let op = laplacian(&dom);
        let f = vec![1.0, 2.0, -1.0];
        let hf = op.apply(&f);
        let h2 = 0.25 * 0.25;
        let want = [
            (2.0 * 1.0 - 0.0 - 2.0) / h2,
            (2.0 * 2.0 - 1.0 + 1.0) / h2,
            (-2.0 * 1.0 - 2.0 - 0.0) / h2,
        ];
        for (a, b) in hf.iter().zip(want.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn discrete_sine_is_an_eigenvector() {
        let h = 0.25;
        let dom = interval(h);
        let op = laplacian(&dom);
        let f: Vec<f64> = dom
            .interior
            .iter()
            .map(|&flat| (std::f64::consts::PI * dom.position(flat)[0]).sin())
            .collect();
        let lam = (2.0 - 2.0 * (std::f64::consts::PI * h).cos()) / (h * h);
        assert_relative_eq!(lam, 9.372583002030478, max_relative = 1e-12);
        let hf = op.apply(&f);
        for (a, b) in hf.iter().zip(f.iter()) {
            assert_relative_eq!(a, &(lam * b), max_relative = 1e-11);
        }
        // Q(f)/‖f‖² equals the discrete eigenvalue
        let q = op.quadratic_form(&f);
        let nrm2 = op.weighted_inner(&f, &f);
        assert_relative_eq!(q / nrm2, lam, max_relative = 1e-12);
    }

    #[test]
    fn constant_potential_shifts_the_form() {
        let dom = interval(0.125);
        let base = laplacian(&dom);
        let shifted = OperatorSpec::WeightedLaplacian {
            sigma: SigmaSpec::One,
            potential: PotentialSpec::Constant { value: 3.5 },
        }
        .assemble(&dom, None, None)
        .unwrap();
        let f = seeded_vec(dom.node_count(), 7);
        let n2 = base.weighted_inner(&f, &f);
        assert_relative_eq!(
            shifted.quadratic_form(&f),
            base.quadratic_form(&f) + 3.5 * n2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quadrature_of_one_and_cauchy_schwarz() {
        let dom = interval(0.25);
        let op = laplacian(&dom);
        let ones = vec![1.0; 3];
        assert_relative_eq!(op.weighted_inner(&ones, &ones), 0.75);
        let f = seeded_vec(3, 1);
        let g = seeded_vec(3, 2);
        assert!(
            op.weighted_inner(&f, &g).abs() <= op.weighted_norm(&f) * op.weighted_norm(&g) + 1e-15
        );
    }

    #[test]
    fn quadratic_homogeneity_and_nonnegativity() {
        let dom = interval(0.1);
        let op = laplacian(&dom);
        let f = seeded_vec(dom.node_count(), 3);
        let f2: Vec<f64> = f.iter().map(|x| 2.0 * x).collect();
        assert_relative_eq!(
            op.quadratic_form(&f2),
            4.0 * op.quadratic_form(&f),
            max_relative = 1e-12
        );
        assert!(op.quadratic_form(&f) >= 0.0);
        assert_relative_eq!(op.quadratic_form(&vec![0.0; op.n]), 0.0);
    }

    #[test]
    fn self_adjoint_in_weighted_inner_product() {
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Rectangle { lx: 1.0, ly: 1.0 },
                    resolution: 0.125,
                },
                100_000,
            )
            .unwrap(),
        );
        let op = laplacian(&dom);
        let f = seeded_vec(op.n, 4);
        let g = seeded_vec(op.n, 5);
        let hf = op.apply(&f);
        let hg = op.apply(&g);
        assert_relative_eq!(
            op.weighted_inner(&hf, &g),
            op.weighted_inner(&f, &hg),
            max_relative = 1e-11
        );
        // ⟨Hf,f⟩ agrees with the face-sum form
        assert_relative_eq!(
            op.weighted_inner(&hf, &f),
            op.quadratic_form(&f),
            max_relative = 1e-11
        );
    }

    #[test]
    fn symmetrized_matrix_is_exactly_symmetric() {
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Lshape { length: 2.0 },
                    resolution: 0.25,
                },
                100_000,
            )
            .unwrap(),
        );
        let op = laplacian(&dom);
        let m = op.symmetrized_dense();
        for i in 0..op.n {
            for j in 0..i {
                let denom = m[(i, j)].abs().max(1.0);
                assert!(
                    (m[(i, j)] - m[(j, i)]).abs() <= 1e-12 * denom,
                    "asymmetry at ({i},{j})"
                );
            }
        }
        // sparse and dense agree on a random vector
        let u = seeded_vec(op.n, 6);
        let sp = op.symmetrized_sparse();
        let dense = m.dot(&ndarray::Array1::from_vec(u.clone()));
        let sparse = sp.apply(&u);
        for (a, b) in dense.iter().zip(sparse.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // consistency: u^T M u with u = √w·f equals Q(f)
        let f = seeded_vec(op.n, 8);
        let sw = op.sqrt_weights();
        let u: Vec<f64> = f.iter().zip(&sw).map(|(x, s)| x * s).collect();
        let mu = sp.apply(&u);
        let utmu: f64 = u.iter().zip(&mu).map(|(a, b)| a * b).sum();
        assert_relative_eq!(utmu, op.quadratic_form(&f), max_relative = 1e-11);
    }

    #[test]
    fn one_d_weighted_reduces_to_laplacian_at_alpha_zero() {
        let op_w = assemble_1d_weighted(0.0, 1.0, 0.125).unwrap();
        let dom = interval(0.125);
        let op_l = laplacian(&dom);
        let f = seeded_vec(op_l.n, 9);
        let a = op_w.apply(&f);
        let b = op_l.apply(&f);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_relative_eq!(x, y, max_relative = 1e-12);
        }
        assert_relative_eq!(op_w.hardy_c, 2.0);
    }

    #[test]
    fn one_d_weighted_hardy_constant_and_validation() {
        let op = assemble_1d_weighted(0.5, 3.0, 0.25).unwrap();
        assert_relative_eq!(op.hardy_c, 4.0);
        assert!(assemble_1d_weighted(1.0, 3.0, 0.25).is_err());
        assert!(assemble_1d_weighted(-0.1, 3.0, 0.25).is_err());
    }

    #[test]
    fn weighted_norm_riemann_sum_converges() {
        // σ(x) = x^{1/4}: ‖1‖² = Σ x_i^{1/2} h → ∫₀^L √x dx
        let length: f64 = 3.0;
        let exact = 2.0 / 3.0 * length.powf(1.5);
        let mut prev_err = f64::INFINITY;
        for h in [1.0 / 64.0, 1.0 / 256.0] {
            let op = assemble_1d_weighted(0.5, length, h).unwrap();
            let ones = vec![1.0; op.n];
            let err = (op.weighted_inner(&ones, &ones) - exact).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 5e-3);
    }

    #[test]
    fn boundary_profile_strip_integral_closed_form() {
        // ∫_{x<ε}(|f|²/d²)σ² = ε^{3−α}/(3−α) for the profile, ε < 1
        let h = 1.0 / 1024.0;
        let op = assemble_1d_weighted(0.5, 3.0, h).unwrap();
        let f = op.boundary_profile().unwrap();
        let dist = distance_to_boundary(&op.domain);
        for k in [20usize, 64, 204] {
            let eps = (k as f64 + 0.5) * h;
            let mut lhs = 0.0;
            for (i, &d) in dist.values.iter().enumerate() {
                if d < eps {
                    lhs += f[i] * f[i] / (d * d) * op.weights[i];
                }
            }
            let want = eps.powf(2.5) / 2.5;
            assert_relative_eq!(lhs, want, max_relative = 5e-3);
        }
    }

    #[test]
    fn divergence_form_identity_matches_laplacian() {
        let dom = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Rectangle { lx: 1.0, ly: 1.0 },
                    resolution: 0.125,
                },
                100_000,
            )
            .unwrap(),
        );
        let div = assemble_divergence_form(&dom, CoeffSpec::Identity).unwrap();
        let lap = laplacian(&dom);
        let f = seeded_vec(div.n, 10);
        for (a, b) in div.apply(&f).iter().zip(lap.apply(&f).iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        assert_relative_eq!(div.hardy_c, 2.0);
    }

    #[test]
    fn divergence_form_scalar_scales_and_checkerboard_brackets() {
        let dom = interval(1.0 / 32.0);
        let scaled = assemble_divergence_form(&dom, CoeffSpec::Scalar { value: 4.0 }).unwrap();
        let lap = laplacian(&dom);
        let f = seeded_vec(scaled.n, 11);
        for (a, b) in scaled.apply(&f).iter().zip(lap.apply(&f).iter()) {
            assert_relative_eq!(a, &(4.0 * b), max_relative = 1e-12);
        }
        assert_relative_eq!(scaled.hardy_c, 4.0); // c = 2α = 2·2
        assert_relative_eq!(scaled.distance_scale(), 2.0);

        let sq = Arc::new(
            build_domain(
                &DomainSpec {
                    generator: Generator::Rectangle { lx: 1.0, ly: 1.0 },
                    resolution: 1.0 / 16.0,
                },
                100_000,
            )
            .unwrap(),
        );
        let cb = assemble_divergence_form(
            &sq,
            CoeffSpec::Checkerboard {
                alpha: 2.0,
                cells: 4,
            },
        )
        .unwrap();
        let lap2 = laplacian(&sq);
        for seed in 12..20 {
            let f = seeded_vec(cb.n, seed);
            let qi = lap2.quadratic_form(&f);
            let qa = cb.quadratic_form(&f);
            assert!(qi <= qa * (1.0 + 1e-12));
            assert!(qa <= 4.0 * qi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ellipticity_violations_are_rejected() {
        let dom = interval(0.125);
        assert!(assemble_divergence_form(&dom, CoeffSpec::Scalar { value: 0.5 }).is_err());
        assert!(matches!(
            CoeffSpec::Checkerboard {
                alpha: 0.9,
                cells: 4
            }
            .ellipticity(),
            Err(Error::InvalidField(_))
        ));
        assert!(matches!(
            CoeffSpec::Diag { ax: 0.5, ay: 2.0 }.ellipticity(),
            Err(Error::InvalidField(_))
        ));
    }

    #[test]
    fn hardy_overrides_validated() {
        let dom = interval(0.125);
        let spec = OperatorSpec::WeightedLaplacian {
            sigma: SigmaSpec::One,
            potential: PotentialSpec::Zero,
        };
        let op = spec.assemble(&dom, Some(4.0), Some(1.0)).unwrap();
        assert_relative_eq!(op.hardy_c, 4.0);
        assert_relative_eq!(op.hardy_a, 1.0);
        assert!(spec.assemble(&dom, Some(1.5), None).is_err());
        assert!(spec.assemble(&dom, None, Some(-1.0)).is_err());
    }
}
