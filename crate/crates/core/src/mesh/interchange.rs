//! Text interchange format for duplicated meshes, so externally generated
//! meshes can be imported as long as they pass the same invariant census.
//!
//! Sections, in order:
//! ```text
//! NODES
//! id x y
//! TRIANGLES
//! id n1 n2 n3
//! FRACTURE_FACES
//! master_n1 master_n2 slave_n1 slave_n2 segment_id
//! CONSTRAINED
//! node_id
//! ```
//! `#` starts a comment; blank lines are ignored.

use super::{ConformingMesh, FractureEdge, FractureFace, Side};
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::fmt::Write as _;

pub fn write_mesh<S: Scalar>(mesh: &ConformingMesh<S>) -> String {
    let mut out = String::new();
    out.push_str("NODES\n");
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(out, "{i} {} {}", p.x, p.y).unwrap();
    }
    out.push_str("TRIANGLES\n");
    for (i, t) in mesh.triangles.iter().enumerate() {
        writeln!(out, "{i} {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out.push_str("FRACTURE_FACES\n");
    for f in &mesh.fracture_faces {
        writeln!(
            out,
            "{} {} {} {} {}",
            f.master[0], f.master[1], f.slave[0], f.slave[1], f.segment
        )
        .unwrap();
    }
    out.push_str("CONSTRAINED\n");
    for &n in &mesh.constrained_nodes {
        writeln!(out, "{n}").unwrap();
    }
    out
}

/// Parses and fully validates a duplicated mesh: structural invariants, the
/// node-multiplicity census, and reconstruction of face normals from the
/// slave-side triangle positions.
pub fn read_mesh<S: Scalar>(text: &str, path: &str) -> Result<ConformingMesh<S>> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Nodes,
        Triangles,
        Faces,
        Constrained,
    }
    let mut section = Section::None;
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    let mut raw_faces: Vec<[usize; 5]> = Vec::new();
    let mut constrained_nodes = Vec::new();
    let err = |line: usize, message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        section = match line {
            "NODES" => {
                section = Section::Nodes;
                continue;
            }
            "TRIANGLES" => {
                section = Section::Triangles;
                continue;
            }
            "FRACTURE_FACES" => {
                section = Section::Faces;
                continue;
            }
            "CONSTRAINED" => {
                section = Section::Constrained;
                continue;
            }
            _ => section,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let ints = |want: usize| -> Result<Vec<usize>> {
            if fields.len() != want {
                return Err(err(ln + 1, format!("expected {want} fields, found {}", fields.len())));
            }
            fields
                .iter()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|e| err(ln + 1, format!("bad integer {f:?}: {e}")))
                })
                .collect()
        };
        match section {
            Section::None => return Err(err(ln + 1, "data before any section header".into())),
            Section::Nodes => {
                if fields.len() != 3 {
                    return Err(err(ln + 1, format!("expected `id x y`, found {} fields", fields.len())));
                }
                let id: usize = fields[0]
                    .parse()
                    .map_err(|e| err(ln + 1, format!("bad id: {e}")))?;
                if id != nodes.len() {
                    return Err(err(ln + 1, format!("node ids must be sequential; expected {}", nodes.len())));
                }
                let x: f64 = fields[1]
                    .parse()
                    .map_err(|e| err(ln + 1, format!("bad x: {e}")))?;
                let y: f64 = fields[2]
                    .parse()
                    .map_err(|e| err(ln + 1, format!("bad y: {e}")))?;
                nodes.push(crate::geometry::Vec2::new(S::of(x), S::of(y)));
            }
            Section::Triangles => {
                let v = ints(4)?;
                if v[0] != triangles.len() {
                    return Err(err(ln + 1, format!("triangle ids must be sequential; expected {}", triangles.len())));
                }
                triangles.push([v[1], v[2], v[3]]);
            }
            Section::Faces => {
                let v = ints(5)?;
                raw_faces.push([v[0], v[1], v[2], v[3], v[4]]);
            }
            Section::Constrained => {
                let v = ints(1)?;
                constrained_nodes.push(v[0]);
            }
        }
    }
    if nodes.is_empty() || triangles.is_empty() {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            message: "mesh must contain NODES and TRIANGLES sections".into(),
        });
    }
    let mech_window = Rect::bounding(nodes.iter().copied()).unwrap();

    // Rebuild face metadata: lengths, midpoints, and normals oriented from
    // the master side toward the slave-side triangles.
    let mut tris_of_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            tris_of_edge
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push(t);
        }
    }
    let mut fracture_faces = Vec::with_capacity(raw_faces.len());
    let mut fracture_edges = Vec::with_capacity(raw_faces.len());
    for (k, &[m1, m2, s1, s2, seg]) in raw_faces.iter().enumerate() {
        for &n in &[m1, m2, s1, s2] {
            if n >= nodes.len() {
                return Err(Error::TopologyError(format!(
                    "face {k} references node {n} out of range"
                )));
            }
        }
        let (pa, pb) = (nodes[m1], nodes[m2]);
        let dir = pb - pa;
        let length = dir.norm();
        if length <= S::zero() {
            return Err(Error::TopologyError(format!("face {k} has zero length")));
        }
        let midpoint = (pa + pb) * S::of(0.5);
        let mut normal = dir.perp().normalized();
        // Orient master -> slave using a slave-side triangle when the walls
        // are actually split (not a tip-to-tip degenerate face).
        let slave_tri = tris_of_edge
            .get(&(s1.min(s2), s1.max(s2)))
            .and_then(|v| v.first())
            .copied();
        if let Some(t) = slave_tri {
            let tri = triangles[t];
            let c = (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) / S::of(3.0);
            if normal.dot(c - midpoint) < S::zero() && (s1, s2) != (m1, m2) {
                normal = -normal;
            }
        }
        fracture_faces.push(FractureFace {
            master: [m1, m2],
            slave: [s1, s2],
            segment: seg,
            normal,
            length,
            midpoint,
        });
        fracture_edges.push(FractureEdge {
            nodes: [m1, m2],
            segment: seg,
        });
    }

    let mut mesh = ConformingMesh {
        nodes,
        triangles,
        fracture_edges,
        fracture_faces,
        constrained_nodes,
        mech_window,
        canonical: Vec::new(),
        duplicated: true,
    };
    mesh.canonical = mesh.coincident_groups();
    mesh.validate_census()?;
    let tol = S::of(1e-9);
    for &n in &mesh.constrained_nodes {
        if n >= mesh.nodes.len() {
            return Err(Error::TopologyError(format!(
                "constrained node {n} out of range"
            )));
        }
        let p = mesh.nodes[n];
        let on_side = Side::ALL
            .iter()
            .any(|s| s.contains_point(&mesh.mech_window, p, tol));
        if !on_side {
            return Err(Error::TopologyError(format!(
                "constrained node {n} does not lie on the domain boundary"
            )));
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_garbage() {
        assert!(read_mesh::<f64>("NODES\n0 0\n", "t").is_err());
        assert!(read_mesh::<f64>("0 0 0\n", "t").is_err());
    }
}
