//! Discrete domains: masked uniform grids over 1D intervals and 2D regions
//! with polygonal, circular or prefractal boundaries, exact distance-to-boundary
//! fields, shrunk regions and boundary strips.

pub mod shapes;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use shapes::{BoundaryGeometry, Segment};

pub const DEFAULT_NODE_CAP: usize = 20_000;

/// Hardy-constant class of a generator's geometry, used when assembling
/// operators: convex regions get c = 2, simply connected planar regions c = 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HardyClass {
    Convex,
    SimplyConnected2D,
    Unknown,
}

/// Built-in domain generators. Lengths and radii are in length units; the
/// Koch prefractal has unit side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Interval {
        length: f64,
    },
    /// Truncation of the half-line (0, ∞) to (0, length) with a Dirichlet
    /// condition at both ends; the distance field measures to the origin only.
    HalflineTruncated {
        length: f64,
    },
    Rectangle {
        lx: f64,
        ly: f64,
    },
    Disk {
        radius: f64,
    },
    Lshape {
        length: f64,
    },
    SlitSquare {
        length: f64,
        slit_len: f64,
    },
    KochPrefractal {
        level: u32,
    },
    MaskFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub generator: Generator,
    /// Target grid spacing h.
    pub resolution: f64,
}

/// Masked uniform lattice. Node (ix, iy) sits at `origin + h·(ix, iy)`;
/// flat index = ix + iy·shape[0]. 1D grids have shape[1] = 1.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub dim: usize,
    pub shape: [usize; 2],
    pub spacing: f64,
    pub origin: [f64; 2],
    /// Flat indices of interior nodes, ascending.
    pub interior: Vec<usize>,
    /// Flat index -> interior ordinal, or -1.
    index_of: Vec<i64>,
    /// Exterior nodes with at least one interior lattice neighbor.
    pub boundary_nodes: BTreeSet<usize>,
    pub name: String,
    pub boundary: BoundaryGeometry,
    pub hardy_class: HardyClass,
}

impl GridDomain {
    pub fn node_count(&self) -> usize {
        self.interior.len()
    }

    pub fn position(&self, flat: usize) -> [f64; 2] {
        let ix = flat % self.shape[0];
        let iy = flat / self.shape[0];
        [
            self.origin[0] + ix as f64 * self.spacing,
            self.origin[1] + iy as f64 * self.spacing,
        ]
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        self.index_of[flat] >= 0
    }

    /// Interior ordinal of a flat node index, if interior.
    pub fn interior_index(&self, flat: usize) -> Option<usize> {
        let k = self.index_of[flat];
        (k >= 0).then_some(k as usize)
    }

    /// Flat indices of the 2·dim lattice neighbors of an interior node.
    /// Padding guarantees these never leave the grid.
    pub fn neighbors(&self, flat: usize) -> Vec<usize> {
        let nx = self.shape[0];
        let mut out = vec![flat - 1, flat + 1];
        if self.dim == 2 {
            out.push(flat - nx);
            out.push(flat + nx);
        }
        out
    }

    /// Offsets to the +axis neighbors (one per axis), for face enumeration.
    pub fn forward_offsets(&self) -> Vec<usize> {
        if self.dim == 1 {
            vec![1]
        } else {
            vec![1, self.shape[0]]
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn from_mask(
        dim: usize,
        shape: [usize; 2],
        spacing: f64,
        origin: [f64; 2],
        mask: &[bool],
        name: String,
        boundary: BoundaryGeometry,
        hardy_class: HardyClass,
    ) -> Result<Self> {
        let nx = shape[0];
        let ny = shape[1];
        assert_eq!(mask.len(), nx * ny);
        // interior must not touch the grid edge: the mask needs an exterior pad
        for iy in 0..ny {
            for ix in 0..nx {
                if mask[ix + iy * nx]
                    && (ix == 0 || ix + 1 == nx || (dim == 2 && (iy == 0 || iy + 1 == ny)))
                {
                    return Err(Error::InvalidSpec(format!(
                        "interior node ({ix},{iy}) touches the grid edge; mask lacks an exterior pad"
                    )));
                }
            }
        }
        let mut interior = Vec::new();
        let mut index_of = vec![-1i64; nx * ny];
        for (flat, &m) in mask.iter().enumerate() {
            if m {
                index_of[flat] = interior.len() as i64;
                interior.push(flat);
            }
        }
        if interior.is_empty() {
            return Err(Error::EmptyRegion(format!("{name}: no interior nodes")));
        }
        let mut boundary_nodes = BTreeSet::new();
        for &flat in &interior {
            let mut nbrs = vec![flat - 1, flat + 1];
            if dim == 2 {
                nbrs.push(flat - nx);
                nbrs.push(flat + nx);
            }
            for nb in nbrs {
                if index_of[nb] < 0 {
                    boundary_nodes.insert(nb);
                }
            }
        }
        Ok(GridDomain {
            dim,
            shape,
            spacing,
            origin,
            interior,
            index_of,
            boundary_nodes,
            name,
            boundary,
            hardy_class,
        })
    }

    /// True when the interior is 4-connected (2-connected in 1D).
    pub fn is_connected(&self) -> bool {
        if self.interior.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.index_of.len()];
        let mut stack = vec![self.interior[0]];
        seen[self.interior[0]] = true;
        let mut count = 0usize;
        while let Some(flat) = stack.pop() {
            count += 1;
            for nb in self.neighbors(flat) {
                if self.is_interior(nb) && !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        count == self.interior.len()
    }
}

/// Per-interior-node distance to the domain's boundary set.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub values: Vec<f64>,
    pub source: String,
}

impl DistanceField {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn float_label(x: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{x}");
    s
}

/// Build a masked grid for the given spec. A node is interior when it lies
/// strictly inside the generator geometry and at distance ≥ h/2 from the
/// boundary set, which guarantees d ≥ h/2 on the interior.
pub fn build_domain(spec: &DomainSpec, node_cap: usize) -> Result<GridDomain> {
    let h = spec.resolution;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "resolution must be positive, got {h}"
        )));
    }
    let empty_is_coarse = |e: Error| match e {
        Error::EmptyRegion(msg) => Error::TooCoarse(format!("empty interior: {msg}")),
        other => other,
    };
    let built: Result<GridDomain> = (|| match &spec.generator {
        Generator::Interval { length } => build_1d(*length, h, false),
        Generator::HalflineTruncated { length } => build_1d(*length, h, true),
        Generator::Rectangle { lx, ly } => {
            require_positive(&[("lx", *lx), ("ly", *ly)])?;
            let verts = [[0.0, 0.0], [*lx, 0.0], [*lx, *ly], [0.0, *ly]];
            let segs = shapes::segments_of_polygon(&verts);
            build_2d_polygon(
                segs,
                move |p: [f64; 2]| p[0] > 0.0 && p[0] < *lx && p[1] > 0.0 && p[1] < *ly,
                h,
                format!("rectangle({}x{})", float_label(*lx), float_label(*ly)),
                HardyClass::Convex,
                true,
            )
        }
        Generator::Disk { radius } => {
            require_positive(&[("radius", *radius)])?;
            let r = *radius;
            let center = [r, r];
            let mask_fn = move |p: [f64; 2]| {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                (dx * dx + dy * dy).sqrt() < r
            };
            let bbox = ([0.0, 0.0], [2.0 * r, 2.0 * r]);
            build_2d(
                BoundaryGeometry::Circle { center, radius: r },
                mask_fn,
                bbox,
                h,
                format!("disk(R={})", float_label(r)),
                HardyClass::Convex,
                true,
            )
        }
        Generator::Lshape { length } => {
            require_positive(&[("length", *length)])?;
            let l = *length;
            let m = 0.5 * l;
            let verts = shapes::lshape_vertices(l);
            let segs = shapes::segments_of_polygon(&verts);
            build_2d_polygon(
                segs,
                move |p: [f64; 2]| {
                    p[0] > 0.0 && p[0] < l && p[1] > 0.0 && p[1] < l && !(p[0] >= m && p[1] >= m)
                },
                h,
                format!("lshape(L={})", float_label(l)),
                HardyClass::SimplyConnected2D,
                true,
            )
        }
        Generator::SlitSquare { length, slit_len } => {
            require_positive(&[("length", *length), ("slit_len", *slit_len)])?;
            if *slit_len >= *length {
                return Err(Error::InvalidSpec(format!(
                    "slit length {slit_len} must be shorter than the square side {length}"
                )));
            }
            let l = *length;
            let mid = 0.5 * l;
            let verts = [[0.0, 0.0], [l, 0.0], [l, l], [0.0, l]];
            let mut segs = shapes::segments_of_polygon(&verts);
            segs.push(Segment::new([0.0, mid], [*slit_len, mid]));
            build_2d_polygon(
                segs,
                move |p: [f64; 2]| p[0] > 0.0 && p[0] < l && p[1] > 0.0 && p[1] < l,
                h,
                format!(
                    "slit_square(L={},slit={})",
                    float_label(l),
                    float_label(*slit_len)
                ),
                HardyClass::SimplyConnected2D,
                true,
            )
        }
        Generator::KochPrefractal { level } => {
            if *level > 4 {
                return Err(Error::InvalidSpec(format!(
                    "koch level {level} out of range [0,4]"
                )));
            }
            let seg_len = 3.0_f64.powi(-(*level as i32));
            if h > seg_len / 3.0 {
                return Err(Error::TooCoarse(format!(
                    "koch level {level}: h = {h} does not resolve boundary segments of length {seg_len} (need h <= {})",
                    seg_len / 3.0
                )));
            }
            let verts = shapes::koch_vertices(*level);
            let segs = shapes::segments_of_polygon(&verts);
            let inside = move |p: [f64; 2]| shapes::point_in_polygon(p, &verts);
            // bounding box of the snowflake of unit side
            let s3 = 3.0_f64.sqrt();
            let bbox = (
                [-s3 / 6.0, -s3 / 6.0],
                [1.0 + s3 / 6.0, s3 / 2.0 + s3 / 6.0],
            );
            build_2d(
                BoundaryGeometry::Segments(segs),
                inside,
                bbox,
                h,
                format!("koch(level={level})"),
                HardyClass::SimplyConnected2D,
                true,
            )
        }
        Generator::MaskFile { path } => read_mask_file(path, h),
    })();
    let domain = built.map_err(empty_is_coarse)?;
    if domain.node_count() > node_cap {
        return Err(Error::NodeCapExceeded {
            got: domain.node_count(),
            cap: node_cap,
        });
    }
    Ok(domain)
}

fn require_positive(params: &[(&str, f64)]) -> Result<()> {
    for (name, v) in params {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

fn build_1d(length: f64, h: f64, halfline: bool) -> Result<GridDomain> {
    require_positive(&[("length", length)])?;
    let n_cells = (length / h).round() as usize;
    let shape = [n_cells + 1, 1];
    let mut mask = vec![false; shape[0]];
    let boundary = if halfline {
        // distance measures to the genuine half-line boundary {0} only
        BoundaryGeometry::Segments(vec![Segment::new([0.0, 0.0], [0.0, 0.0])])
    } else {
        BoundaryGeometry::Segments(vec![
            Segment::new([0.0, 0.0], [0.0, 0.0]),
            Segment::new([length, 0.0], [length, 0.0]),
        ])
    };
    for (i, m) in mask.iter_mut().enumerate() {
        let x = i as f64 * h;
        let inside = x > 0.0 && x < length;
        if !inside {
            continue;
        }
        let d_dirichlet = x.min(length - x);
        *m = d_dirichlet >= 0.5 * h - 1e-12 * length;
    }
    let name = if halfline {
        format!("halfline(L={})", float_label(length))
    } else {
        format!("interval(L={})", float_label(length))
    };
    GridDomain::from_mask(
        1,
        shape,
        h,
        [0.0, 0.0],
        &mask,
        name,
        boundary,
        HardyClass::Convex,
    )
}

fn build_2d_polygon(
    segs: Vec<Segment>,
    inside: impl Fn([f64; 2]) -> bool,
    h: f64,
    name: String,
    class: HardyClass,
    check_connected: bool,
) -> Result<GridDomain> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for s in &segs {
        for p in [s.a, s.b] {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    build_2d(
        BoundaryGeometry::Segments(segs),
        inside,
        (lo, hi),
        h,
        name,
        class,
        check_connected,
    )
}

fn build_2d(
    boundary: BoundaryGeometry,
    inside: impl Fn([f64; 2]) -> bool,
    bbox: ([f64; 2], [f64; 2]),
    h: f64,
    name: String,
    class: HardyClass,
    check_connected: bool,
) -> Result<GridDomain> {
    let (lo, hi) = bbox;
    let origin = [
        ((lo[0] / h).floor() - 2.0) * h,
        ((lo[1] / h).floor() - 2.0) * h,
    ];
    let shape = [
        ((hi[0] - origin[0]) / h).ceil() as usize + 3,
        ((hi[1] - origin[1]) / h).ceil() as usize + 3,
    ];
    let mut mask = vec![false; shape[0] * shape[1]];
    for iy in 0..shape[1] {
        for ix in 0..shape[0] {
            let p = [origin[0] + ix as f64 * h, origin[1] + iy as f64 * h];
            if !inside(p) {
                continue;
            }
            let d = boundary.distance(p).expect("analytic boundary");
            if d >= 0.5 * h - 1e-12 {
                mask[ix + iy * shape[0]] = true;
            }
        }
    }
    let domain = GridDomain::from_mask(2, shape, h, origin, &mask, name, boundary, class)?;
    if check_connected && !domain.is_connected() {
        return Err(Error::TooCoarse(format!(
            "{}: interior mask is disconnected at h = {h}; refine the resolution",
            domain.name
        )));
    }
    Ok(domain)
}

/// Exact distance from every interior node to the domain's boundary set.
/// Analytic boundaries use brute force over all segments; derived masks use
/// the exterior boundary nodes.
pub fn distance_to_boundary(domain: &GridDomain) -> DistanceField {
    let values: Vec<f64> = match &domain.boundary {
        BoundaryGeometry::ExteriorNodes => {
            let pts: Vec<[f64; 2]> = domain
                .boundary_nodes
                .iter()
                .map(|&flat| domain.position(flat))
                .collect();
            domain
                .interior
                .iter()
                .map(|&flat| {
                    let p = domain.position(flat);
                    pts.iter()
                        .map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        }
        geom => domain
            .interior
            .iter()
            .map(|&flat| {
                geom.distance(domain.position(flat))
                    .expect("analytic boundary")
            })
            .collect(),
    };
    let source = match &domain.boundary {
        BoundaryGeometry::Segments(_) => "segments",
        BoundaryGeometry::Circle { .. } => "circle",
        BoundaryGeometry::ExteriorNodes => "exterior-nodes",
    };
    DistanceField {
        values,
        source: format!("{}:{}", domain.name, source),
    }
}

/// The shrunk region {x ∈ U : d(x) > ε} on the same grid. Disconnected
/// results keep all components. Empty results are an error.
pub fn inner_region(domain: &GridDomain, dist: &DistanceField, eps: f64) -> Result<GridDomain> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    let mut mask = vec![false; domain.index_of.len()];
    for (k, &flat) in domain.interior.iter().enumerate() {
        if dist.values[k] > eps {
            mask[flat] = true;
        }
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::EmptyRegion(format!(
            "{}: eps = {eps} >= max d = {}",
            domain.name,
            dist.max()
        )));
    }
    GridDomain::from_mask(
        domain.dim,
        domain.shape,
        domain.spacing,
        domain.origin,
        &mask,
        format!("{}|eps={}", domain.name, float_label(eps)),
        BoundaryGeometry::ExteriorNodes,
        HardyClass::Unknown,
    )
}

/// Interior ordinals of the boundary strip {x : d(x) < ε}.
pub fn strip_indices(dist: &DistanceField, eps: f64) -> Vec<usize> {
    dist.values
        .iter()
        .enumerate()
        .filter_map(|(k, &d)| (d < eps).then_some(k))
        .collect()
}

/// Plain-text mask format: header "dim shape h", then rows of 0/1 characters
/// (2D rows are y slices, x ascending within a row).
pub fn write_mask_file(domain: &GridDomain, path: &std::path::Path) -> Result<()> {
    let mut out = String::new();
    if domain.dim == 1 {
        let _ = writeln!(out, "1 {} {}", domain.shape[0], domain.spacing);
        for ix in 0..domain.shape[0] {
            out.push(if domain.is_interior(ix) { '1' } else { '0' });
        }
        out.push('\n');
    } else {
        let _ = writeln!(
            out,
            "2 {} {} {}",
            domain.shape[0], domain.shape[1], domain.spacing
        );
        for iy in 0..domain.shape[1] {
            for ix in 0..domain.shape[0] {
                out.push(if domain.is_interior(ix + iy * domain.shape[0]) {
                    '1'
                } else {
                    '0'
                });
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn read_mask_file(path: &std::path::Path, resolution: f64) -> Result<GridDomain> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MaskFile(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MaskFile("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_err = |what: &str| Error::MaskFile(format!("bad header field: {what}"));
    let dim: usize = fields
        .first()
        .ok_or_else(|| parse_err("dim"))?
        .parse()
        .map_err(|_| parse_err("dim"))?;
    if dim != 1 && dim != 2 {
        return Err(Error::MaskFile(format!("dim must be 1 or 2, got {dim}")));
    }
    if fields.len() != dim + 2 {
        return Err(Error::MaskFile(format!(
            "header needs dim, {dim} shape value(s) and h"
        )));
    }
    let mut shape = [1usize; 2];
    for k in 0..dim {
        shape[k] = fields[1 + k].parse().map_err(|_| parse_err("shape"))?;
    }
    let h: f64 = fields[dim + 1].parse().map_err(|_| parse_err("h"))?;
    if !(h > 0.0) {
        return Err(Error::MaskFile(format!("h must be positive, got {h}")));
    }
    if (h - resolution).abs() > 1e-9 * h.max(resolution) {
        return Err(Error::MaskFile(format!(
            "file spacing {h} does not match requested resolution {resolution}"
        )));
    }
    let rows: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
    let expected_rows = if dim == 1 { 1 } else { shape[1] };
    if rows.len() != expected_rows {
        return Err(Error::MaskFile(format!(
            "expected {expected_rows} mask rows, found {}",
            rows.len()
        )));
    }
    let mut mask = vec![false; shape[0] * shape[1]];
    for (iy, row) in rows.iter().enumerate() {
        let row = row.trim();
        if row.len() != shape[0] {
            return Err(Error::MaskFile(format!(
                "row {iy} has {} characters, expected {}",
                row.len(),
                shape[0]
            )));
        }
        for (ix, ch) in row.chars().enumerate() {
            mask[ix + iy * shape[0]] = match ch {
                '0' => false,
                '1' => true,
                other => {
                    return Err(Error::MaskFile(format!(
                        "row {iy} column {ix}: expected 0/1, found {other:?}"
                    )))
                }
            };
        }
    }
    let name = format!(
        "mask({})",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    );
    GridDomain::from_mask(
        dim,
        shape,
        h,
        [0.0, 0.0],
        &mask,
        name,
        BoundaryGeometry::ExteriorNodes,
        HardyClass::Unknown,
    )
}
