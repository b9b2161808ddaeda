//! The 1D virtual-cell flow graph on the fracture skeleton.
//!
//! Each fracture face inside the flow window becomes a "virtual cell": a
//! one-dimensional control volume along the fracture with pore volume but no
//! area in the 2D mesh. Cell ends meeting at a point form either a simple
//! two-cell connection or an intersection group that is later eliminated by
//! the star-delta transformation. Fracture portions in the buffer zone carry
//! no cells.

use super::{ConformingMesh, Side};
use crate::error::{Error, Result};
use crate::geometry::{Rect, Vec2};
use crate::network::FractureNetwork;
use crate::scalar::Scalar;
use serde::Serialize;
use std::collections::HashMap;

const GEOM_TOL: f64 = 1e-9;

/// One end of a virtual cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellEnd<S> {
    /// Canonical mesh node at this end; junction identity key.
    pub node: usize,
    pub point: Vec2<S>,
    /// Flow-window sides this end touches (within 1e-9 m); up to two at a
    /// window corner.
    pub sides: Vec<Side>,
}

/// A fracture sub-segment acting as a 1D flow control volume.
#[derive(Debug, Clone, Serialize)]
pub struct FlowCell<S> {
    /// Index of the originating fracture face in the mesh.
    pub face: usize,
    pub segment: usize,
    pub length: S,
    pub centroid: Vec2<S>,
    pub ends: [CellEnd<S>; 2],
}

/// Cell connectivity of the fracture network restricted to the flow window.
#[derive(Debug, Clone, Serialize)]
pub struct FlowGraph<S> {
    pub cells: Vec<FlowCell<S>>,
    /// Two cell-ends meeting at a point: (cell, end) pairs.
    pub connections: Vec<[(usize, usize); 2]>,
    /// Three or more cell-ends meeting at a point.
    pub intersection_groups: Vec<Vec<(usize, usize)>>,
    /// Cell ends on the flow-window boundary, tagged by side.
    pub boundary_cells: Vec<(usize, usize, Side)>,
    pub flow_window: Rect<S>,
}

impl<S: Scalar> FlowGraph<S> {
    /// Sum of cell lengths per network segment (diagnostics and census).
    pub fn cell_length_by_fracture(&self, network: &FractureNetwork<S>) -> Vec<S> {
        let mut out = vec![S::zero(); network.fractures.len()];
        for c in &self.cells {
            let f = network.segments[c.segment].fracture;
            out[f] = out[f] + c.length;
        }
        out
    }
}

/// Builds the flow graph from a duplicated mesh. A face becomes a cell when
/// its midpoint lies in the closed flow window; forced nodes at the
/// flow-window boundary (inserted during triangulation) guarantee faces never
/// straddle the window edge.
pub fn build_flow_graph<S: Scalar>(
    mesh: &ConformingMesh<S>,
    network: &FractureNetwork<S>,
    flow_window: &Rect<S>,
) -> Result<FlowGraph<S>> {
    if !mesh.duplicated {
        return Err(Error::TopologyError(
            "flow graph requires a duplicated mesh".into(),
        ));
    }
    let tol = S::of(GEOM_TOL);
    let mut cells = Vec::new();
    for (fi, f) in mesh.fracture_faces.iter().enumerate() {
        if !flow_window.contains(f.midpoint, tol) {
            continue;
        }
        let ends = [f.master[0], f.master[1]].map(|n| {
            let point = mesh.nodes[n];
            let sides: Vec<Side> = Side::ALL
                .into_iter()
                .filter(|s| s.contains_point(flow_window, point, tol))
                .collect();
            CellEnd {
                node: mesh.canonical[n],
                point,
                sides,
            }
        });
        cells.push(FlowCell {
            face: fi,
            segment: f.segment,
            length: f.length,
            centroid: f.midpoint,
            ends,
        });
    }
    let _ = network;
    // Group cell ends by canonical junction node.
    let mut at_node: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut boundary_cells = Vec::new();
    for (ci, c) in cells.iter().enumerate() {
        for (ei, end) in c.ends.iter().enumerate() {
            at_node.entry(end.node).or_default().push((ci, ei));
            for &s in &end.sides {
                boundary_cells.push((ci, ei, s));
            }
        }
    }
    let mut connections = Vec::new();
    let mut intersection_groups = Vec::new();
    let mut junctions: Vec<(usize, Vec<(usize, usize)>)> = at_node.into_iter().collect();
    junctions.sort_by_key(|&(n, _)| n);
    for (_, mut members) in junctions {
        members.sort_unstable();
        match members.len() {
            0 | 1 => {}
            2 => connections.push([members[0], members[1]]),
            _ => intersection_groups.push(members),
        }
    }
    boundary_cells.sort_by_key(|&(c, e, s)| (c, e, s.name()));
    Ok(FlowGraph {
        cells,
        connections,
        intersection_groups,
        boundary_cells,
        flow_window: *flow_window,
    })
}
