//! Fracture-wall node duplication.
//!
//! Each mesh node lying on a fracture is split into one copy per angular
//! sector of its triangle fan, where sectors are separated by the incident
//! fracture edges: interior nodes get a master and a slave copy, X
//! intersections four copies, T junctions three. Fracture tips keep a single
//! node, which ties the two walls together at the seam ends.

use super::{ConformingMesh, FractureEdge, FractureFace};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::HashMap;

/// Relative tie tolerance for the side classification cross product.
const SIDE_TIE_TOL: f64 = 1e-14;

pub fn duplicate_fracture_nodes<S: Scalar>(mesh: &ConformingMesh<S>) -> Result<ConformingMesh<S>> {
    if mesh.duplicated {
        return Err(Error::TopologyError("mesh is already duplicated".into()));
    }
    mesh.validate_base()?;

    let n_nodes = mesh.nodes.len();
    // Undirected edge -> adjacent triangles.
    let mut tris_of_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            tris_of_edge.entry(key(a, b)).or_default().push(t);
        }
    }
    let is_fracture_edge: std::collections::HashSet<(usize, usize)> = mesh
        .fracture_edges
        .iter()
        .map(|e| key(e.nodes[0], e.nodes[1]))
        .collect();
    for e in &mesh.fracture_edges {
        let k = key(e.nodes[0], e.nodes[1]);
        let adj = tris_of_edge.get(&k).map_or(0, |v| v.len());
        if adj != 2 {
            return Err(Error::TopologyError(format!(
                "fracture edge {:?} has {adj} adjacent triangles, expected 2",
                e.nodes
            )));
        }
    }
    // Mesh boundary nodes (endpoints of edges with a single adjacent triangle).
    let mut on_boundary = vec![false; n_nodes];
    for (&(a, b), tris) in &tris_of_edge {
        if tris.len() == 1 {
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
    }
    // Incident fracture edges per node.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (ei, e) in mesh.fracture_edges.iter().enumerate() {
        incident[e.nodes[0]].push(ei);
        incident[e.nodes[1]].push(ei);
    }
    let mut tris_of_node: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            tris_of_node[v].push(t);
        }
    }

    let mut nodes = mesh.nodes.clone();
    let mut triangles = mesh.triangles.clone();
    let mut canonical: Vec<usize> = (0..n_nodes).collect();

    for v in 0..n_nodes {
        let k_frac = incident[v].len();
        if k_frac < 2 {
            continue; // tips and plain nodes stay single
        }
        if on_boundary[v] {
            return Err(Error::TopologyError(format!(
                "fracture junction at node {v} lies on the domain boundary"
            )));
        }
        // Partition the fan: triangles sharing a non-fracture edge at v are
        // in the same sector.
        let fan = &tris_of_node[v];
        let mut uf = UnionFind::new(fan.len());
        let fan_pos: HashMap<usize, usize> =
            fan.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        for (i, &t) in fan.iter().enumerate() {
            let tri = mesh.triangles[t];
            for j in 0..3 {
                let (a, b) = (tri[j], tri[(j + 1) % 3]);
                if a != v && b != v {
                    continue;
                }
                let k = key(a, b);
                if is_fracture_edge.contains(&k) {
                    continue;
                }
                for &other in &tris_of_edge[&k] {
                    if let Some(&oi) = fan_pos.get(&other) {
                        uf.union(i, oi);
                    }
                }
            }
        }
        let mut sector_of = vec![usize::MAX; fan.len()];
        let mut n_sectors = 0;
        for i in 0..fan.len() {
            let root = uf.find(i);
            if sector_of[root] == usize::MAX {
                sector_of[root] = n_sectors;
                n_sectors += 1;
            }
            sector_of[i] = sector_of[root];
        }
        if n_sectors != k_frac {
            return Err(Error::TopologyError(format!(
                "node {v}: fan splits into {n_sectors} sectors but {k_frac} fracture edges meet there"
            )));
        }
        // Sector 0 keeps the original node id; the rest get copies.
        let mut node_of_sector = vec![v; n_sectors];
        for s in 1..n_sectors {
            node_of_sector[s] = nodes.len();
            nodes.push(mesh.nodes[v]);
            canonical.push(v);
        }
        for (i, &t) in fan.iter().enumerate() {
            let replacement = node_of_sector[sector_of[i]];
            if replacement != v {
                for slot in triangles[t].iter_mut() {
                    if *slot == v {
                        *slot = replacement;
                    }
                }
            }
        }
    }

    // Build face pairs. Edge node ids as seen by each side's triangle; the
    // master side has negative cross product of the (segment-oriented) edge
    // direction with the vector to the triangle centroid.
    let mut fracture_faces = Vec::with_capacity(mesh.fracture_edges.len());
    let mut master_edges = Vec::with_capacity(mesh.fracture_edges.len());
    for e in &mesh.fracture_edges {
        let [u, w] = e.nodes;
        let adj = &tris_of_edge[&key(u, w)];
        let (pu, pw) = (mesh.nodes[u], mesh.nodes[w]);
        let dir = pw - pu;
        let mid = (pu + pw) * S::of(0.5);
        let mut master: Option<[usize; 2]> = None;
        let mut slave: Option<[usize; 2]> = None;
        for &t in adj {
            let c = mesh.centroid(t);
            let cross = dir.cross(c - mid);
            if cross.abs() <= S::of(SIDE_TIE_TOL) * dir.norm() * (c - mid).norm() {
                return Err(Error::TopologyError(format!(
                    "triangle {t} centroid is collinear with fracture edge {:?}",
                    e.nodes
                )));
            }
            // Node ids on this side, post-reassignment.
            let tri = triangles[t];
            let find = |orig: usize| {
                tri.iter()
                    .copied()
                    .find(|&n| canonical[n] == orig)
                    .expect("edge endpoint missing from adjacent triangle")
            };
            let pair = [find(u), find(w)];
            if cross < S::zero() {
                master = Some(pair);
            } else {
                slave = Some(pair);
            }
        }
        let (master, slave) = match (master, slave) {
            (Some(m), Some(s)) => (m, s),
            _ => {
                return Err(Error::TopologyError(format!(
                    "fracture edge {:?} does not have one triangle on each side",
                    e.nodes
                )))
            }
        };
        let normal = dir.perp().normalized();
        fracture_faces.push(FractureFace {
            master,
            slave,
            segment: e.segment,
            normal,
            length: dir.norm(),
            midpoint: mid,
        });
        master_edges.push(FractureEdge {
            nodes: master,
            segment: e.segment,
        });
    }

    let out = ConformingMesh {
        nodes,
        triangles,
        fracture_edges: master_edges,
        fracture_faces,
        constrained_nodes: mesh.constrained_nodes.clone(),
        mech_window: mesh.mech_window,
        canonical,
        duplicated: true,
    };
    out.validate_census()?;
    Ok(out)
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
