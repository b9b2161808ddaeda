//! Conforming triangular meshes with duplicated fracture-wall nodes.
//!
//! The mesh stage produces a triangulation of the mechanical window that
//! conforms to every fracture segment, then splits the node fan at each
//! fracture node so the two walls can displace independently: interior
//! fracture nodes become a master/slave pair, intersections of two fractures
//! become four nodes (one per quadrant), and fracture tips stay single,
//! giving the "seam" representation of a fracture in a rock mass.

mod duplicate;
mod flow_graph;
mod interchange;
mod triangulate;

pub use duplicate::duplicate_fracture_nodes;
pub use flow_graph::{build_flow_graph, CellEnd, FlowCell, FlowGraph};
pub use interchange::{read_mesh, write_mesh};
pub use triangulate::triangulate;

use crate::error::{Error, Result};
use crate::geometry::{Rect, Vec2};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Side of an axis-aligned window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    /// Midpoint of this side of `window`.
    pub fn midpoint<S: Scalar>(self, window: &Rect<S>) -> Vec2<S> {
        let c = window.center();
        match self {
            Side::Left => Vec2::new(window.min.x, c.y),
            Side::Right => Vec2::new(window.max.x, c.y),
            Side::Bottom => Vec2::new(c.x, window.min.y),
            Side::Top => Vec2::new(c.x, window.max.y),
        }
    }

    /// Whether `p` lies on this side of `window` within `tol`.
    pub fn contains_point<S: Scalar>(self, window: &Rect<S>, p: Vec2<S>, tol: S) -> bool {
        let on_line = match self {
            Side::Left => (p.x - window.min.x).abs() <= tol,
            Side::Right => (p.x - window.max.x).abs() <= tol,
            Side::Bottom => (p.y - window.min.y).abs() <= tol,
            Side::Top => (p.y - window.max.y).abs() <= tol,
        };
        on_line && window.contains(p, tol)
    }
}

/// A mesh edge lying on a fracture segment (pre-duplication geometry).
/// Nodes are ordered along the parent segment's direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractureEdge {
    pub nodes: [usize; 2],
    pub segment: usize,
}

/// A coincident master/slave edge pair created by node duplication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractureFace<S> {
    pub master: [usize; 2],
    pub slave: [usize; 2],
    pub segment: usize,
    /// Unit normal pointing from the master side to the slave side.
    pub normal: Vec2<S>,
    pub length: S,
    pub midpoint: Vec2<S>,
}

/// Triangular mesh conforming to a fracture network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConformingMesh<S> {
    pub nodes: Vec<Vec2<S>>,
    /// Node index triples, positively oriented.
    pub triangles: Vec<[usize; 3]>,
    /// Conforming edges on fracture segments. After duplication these carry
    /// the master-side node ids.
    pub fracture_edges: Vec<FractureEdge>,
    /// Master/slave pairs; empty before duplication.
    pub fracture_faces: Vec<FractureFace<S>>,
    /// Boundary mid-side nodes eligible for displacement constraints.
    pub constrained_nodes: Vec<usize>,
    pub mech_window: Rect<S>,
    /// Canonical (pre-duplication) node id per node; identity for originals.
    pub canonical: Vec<usize>,
    pub duplicated: bool,
}

impl<S: Scalar> ConformingMesh<S> {
    pub fn signed_area(&self, t: usize) -> S {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        (pb - pa).cross(pc - pa) * S::of(0.5)
    }

    pub fn centroid(&self, t: usize) -> Vec2<S> {
        let [a, b, c] = self.triangles[t];
        (self.nodes[a] + self.nodes[b] + self.nodes[c]) / S::of(3.0)
    }

    /// Minimum interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> S {
        let mut best = S::of(180.0);
        for t in 0..self.triangles.len() {
            best = best.min(self.triangle_min_angle_deg(t));
        }
        best
    }

    fn triangle_min_angle_deg(&self, t: usize) -> S {
        let [a, b, c] = self.triangles[t];
        let p = [self.nodes[a], self.nodes[b], self.nodes[c]];
        let mut worst = S::of(180.0);
        for k in 0..3 {
            let u = p[(k + 1) % 3] - p[k];
            let v = p[(k + 2) % 3] - p[k];
            let cosv = u.dot(v) / (u.norm() * v.norm());
            let ang = cosv.max(-S::one()).min(S::one()).acos().to_degrees();
            worst = worst.min(ang);
        }
        worst
    }

    /// Groups nodes whose undeformed coordinates are bitwise identical and
    /// returns for each node the smallest id of its group. Coincident groups
    /// are exactly the duplicated fracture nodes.
    pub fn coincident_groups(&self) -> Vec<usize> {
        let mut first: HashMap<(u64, u64), usize> = HashMap::new();
        let mut canon = vec![0usize; self.nodes.len()];
        for (i, p) in self.nodes.iter().enumerate() {
            let id = *first.entry(p.bits()).or_insert(i);
            canon[i] = id;
        }
        canon
    }

    /// Structural invariants common to both mesh stages.
    pub fn validate_base(&self) -> Result<()> {
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= self.nodes.len() {
                    return Err(Error::TopologyError(format!(
                        "triangle {t} references node {v} out of range"
                    )));
                }
            }
            if self.signed_area(t) <= S::zero() {
                return Err(Error::SingularElement(t));
            }
        }
        for (i, e) in self.fracture_edges.iter().enumerate() {
            if e.nodes[0] == e.nodes[1] {
                return Err(Error::TopologyError(format!("fracture edge {i} is degenerate")));
            }
        }
        Ok(())
    }

    /// Node-multiplicity census on a duplicated mesh: interior fracture nodes
    /// appear twice, n-way junction nodes n times, tips once; master and
    /// slave coordinates coincide bitwise; no triangle owns both a master and
    /// its paired slave node.
    pub fn validate_census(&self) -> Result<()> {
        if !self.duplicated {
            return Err(Error::TopologyError(
                "census requires a duplicated mesh".into(),
            ));
        }
        self.validate_base()?;
        let canon = self.coincident_groups();
        // Incident face sub-edges per canonical junction.
        let mut incident: HashMap<usize, usize> = HashMap::new();
        for f in &self.fracture_faces {
            let (a, b) = (canon[f.master[0]], canon[f.master[1]]);
            let (sa, sb) = (canon[f.slave[0]], canon[f.slave[1]]);
            if (sa, sb) != (a, b) {
                return Err(Error::TopologyError(
                    "master and slave edges of a face do not coincide".into(),
                ));
            }
            if self.nodes[f.master[0]] != self.nodes[f.slave[0]]
                || self.nodes[f.master[1]] != self.nodes[f.slave[1]]
            {
                return Err(Error::TopologyError(
                    "master/slave node coordinates differ before deformation".into(),
                ));
            }
            *incident.entry(a).or_insert(0) += 1;
            *incident.entry(b).or_insert(0) += 1;
        }
        // Multiplicity = number of distinct node ids per canonical group.
        let mut copies: HashMap<usize, usize> = HashMap::new();
        for &c in &canon {
            *copies.entry(c).or_insert(0) += 1;
        }
        for (&c, &k) in &incident {
            let m = copies.get(&c).copied().unwrap_or(0);
            let expected = if k <= 1 { 1 } else { k };
            if m != expected {
                return Err(Error::TopologyError(format!(
                    "node at {:?} has {k} incident fracture edges but {m} copies (expected {expected})",
                    self.nodes[c]
                )));
            }
        }
        // No triangle may reference both walls of one face pair.
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for f in &self.fracture_faces {
            for k in 0..2 {
                let (m, s) = (f.master[k], f.slave[k]);
                if m != s {
                    pairs.push((m.min(s), m.max(s)));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &(m, s) in &pairs {
                if tri.contains(&m) && tri.contains(&s) {
                    return Err(Error::TopologyError(format!(
                        "triangle {t} spans the fracture: owns both {m} and {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sum of conforming fracture-edge lengths per network segment.
    pub fn segment_coverage(&self, n_segments: usize) -> Vec<S> {
        let mut cover = vec![S::zero(); n_segments];
        let source: Vec<(usize, S)> = if self.duplicated {
            self.fracture_faces
                .iter()
                .map(|f| (f.segment, f.length))
                .collect()
        } else {
            self.fracture_edges
                .iter()
                .map(|e| {
                    (
                        e.segment,
                        self.nodes[e.nodes[0]].dist(self.nodes[e.nodes[1]]),
                    )
                })
                .collect()
        };
        for (s, len) in source {
            if s < n_segments {
                cover[s] = cover[s] + len;
            }
        }
        cover
    }
}

/// Census summary used by the `mesh-only` subcommand and the test suites.
#[derive(Debug, Clone, Serialize)]
pub struct MeshCensus {
    pub nodes: usize,
    pub triangles: usize,
    pub fracture_faces: usize,
    pub min_angle_deg: f64,
    /// multiplicity -> number of canonical fracture nodes with that many copies
    pub multiplicity_histogram: Vec<(usize, usize)>,
}

pub fn census<S: Scalar>(mesh: &ConformingMesh<S>) -> MeshCensus {
    let canon = mesh.coincident_groups();
    let mut copies: HashMap<usize, usize> = HashMap::new();
    for &c in &canon {
        *copies.entry(c).or_insert(0) += 1;
    }
    let mut on_fracture: std::collections::HashSet<usize> = std::collections::HashSet::new();
    for f in &mesh.fracture_faces {
        for &n in f.master.iter().chain(f.slave.iter()) {
            on_fracture.insert(canon[n]);
        }
    }
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for c in on_fracture {
        *hist.entry(copies[&c]).or_insert(0) += 1;
    }
    let mut multiplicity_histogram: Vec<(usize, usize)> = hist.into_iter().collect();
    multiplicity_histogram.sort_unstable();
    MeshCensus {
        nodes: mesh.nodes.len(),
        triangles: mesh.triangles.len(),
        fracture_faces: mesh.fracture_faces.len(),
        min_angle_deg: mesh.min_angle_deg().as_f64(),
        multiplicity_histogram,
    }
}
