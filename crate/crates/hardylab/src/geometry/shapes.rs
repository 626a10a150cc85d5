//! Boundary geometry primitives: segment sets, circles, polygon predicates and
//! the Koch prefractal construction.

/// Closed straight segment between two points. Degenerate segments (a == b)
/// are allowed and act as points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        hypot2(self.b[0] - self.a[0], self.b[1] - self.a[1])
    }

    /// Euclidean distance from `p` to the nearest point of the segment.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let dx = self.b[0] - self.a[0];
        let dy = self.b[1] - self.a[1];
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return hypot2(p[0] - self.a[0], p[1] - self.a[1]);
        }
        let t = ((p[0] - self.a[0]) * dx + (p[1] - self.a[1]) * dy) / len2;
        let t = t.clamp(0.0, 1.0);
        let qx = self.a[0] + t * dx;
        let qy = self.a[1] + t * dy;
        hypot2(p[0] - qx, p[1] - qy)
    }
}

fn hypot2(x: f64, y: f64) -> f64 {
    (x * x + y * y).sqrt()
}

/// How a domain describes the set its distance function measures to.
#[derive(Debug, Clone)]
pub enum BoundaryGeometry {
    /// Explicit segment set (polygons, slits, degenerate points).
    Segments(Vec<Segment>),
    /// Circle of the given radius; distance is radius − |p − center| inside.
    Circle { center: [f64; 2], radius: f64 },
    /// No analytic description; fall back to the domain's exterior boundary
    /// nodes (derived masks, mask files).
    ExteriorNodes,
}

impl BoundaryGeometry {
    /// Distance from `p` to the boundary set, for the analytic variants.
    /// Returns `None` for `ExteriorNodes`.
    pub fn distance(&self, p: [f64; 2]) -> Option<f64> {
        match self {
            BoundaryGeometry::Segments(segs) => segs
                .iter()
                .map(|s| s.distance(p))
                .fold(None, |acc: Option<f64>, d| {
                    Some(acc.map_or(d, |m| m.min(d)))
                }),
            BoundaryGeometry::Circle { center, radius } => {
                Some((radius - hypot2(p[0] - center[0], p[1] - center[1])).abs())
            }
            BoundaryGeometry::ExteriorNodes => None,
        }
    }
}

/// Even-odd crossing test. Points on edges give an arbitrary parity; callers
/// must separately reject points too close to the boundary.
pub fn point_in_polygon(p: [f64; 2], vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi[1] > p[1]) != (vj[1] > p[1]) {
            let x_cross = vi[0] + (p[1] - vi[1]) / (vj[1] - vi[1]) * (vj[0] - vi[0]);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Signed area via the shoelace formula (positive for counterclockwise).
pub fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

pub fn segments_of_polygon(vertices: &[[f64; 2]]) -> Vec<Segment> {
    let n = vertices.len();
    (0..n)
        .map(|i| Segment::new(vertices[i], vertices[(i + 1) % n]))
        .collect()
}

/// Vertices of the L-shaped region: the square (0,L)² minus its closed
/// upper-right quadrant, traversed counterclockwise.
pub fn lshape_vertices(length: f64) -> Vec<[f64; 2]> {
    let l = length;
    let m = 0.5 * length;
    vec![[0.0, 0.0], [l, 0.0], [l, m], [m, m], [m, l], [0.0, l]]
}

/// Koch prefractal boundary built on an equilateral triangle of unit side,
/// vertices (0,0), (1,0), (1/2, √3/2), traversed counterclockwise. Each
/// refinement level replaces every segment by the 4-segment Koch generator
/// with the bump pointing outward, so a side consists of 4^level segments of
/// length 3^(−level).
pub fn koch_vertices(level: u32) -> Vec<[f64; 2]> {
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * 3.0_f64.sqrt()]];
    let mut verts: Vec<[f64; 2]> = tri.to_vec();
    for _ in 0..level {
        let mut next = Vec::with_capacity(verts.len() * 4);
        let n = verts.len();
        for i in 0..n {
            let p = verts[i];
            let q = verts[(i + 1) % n];
            let dx = q[0] - p[0];
            let dy = q[1] - p[1];
            let u = [p[0] + dx / 3.0, p[1] + dy / 3.0];
            let v = [p[0] + 2.0 * dx / 3.0, p[1] + 2.0 * dy / 3.0];
            // For a counterclockwise boundary the interior lies to the left of
            // the travel direction, so the outward bump apex sits to the right:
            // midpoint + (√3/6)·|pq| in the (dy, −dx) direction.
            let apex = [
                p[0] + 0.5 * dx + dy * 3.0_f64.sqrt() / 6.0,
                p[1] + 0.5 * dy - dx * 3.0_f64.sqrt() / 6.0,
            ];
            next.push(p);
            next.push(u);
            next.push(apex);
            next.push(v);
        }
        verts = next;
    }
    verts
}
