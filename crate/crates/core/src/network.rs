//! Fracture network ingestion: file parsing, point merging, splitting at
//! mutual intersections, polyline simplification and domain construction.

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segment_intersection, Rect, SegSeg, Vec2};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

/// Coordinate merge tolerance in meters. Points closer than this are treated
/// as the same network vertex.
pub const MERGE_TOL: f64 = 1e-9;

/// Tolerance for the "intersection point lies on both segments" invariant.
pub const ON_SEGMENT_TOL: f64 = 1e-12;

/// Minimum padding applied to degenerate (zero-extent) bounding boxes.
pub const DEGENERATE_PAD: f64 = 1e-6;

/// Straight piece of a fracture between two network vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// Endpoint indices into [`FractureNetwork::points`].
    pub a: usize,
    pub b: usize,
    /// Parent fracture id.
    pub fracture: usize,
}

/// Crossing of two fractures, recorded against one incident segment of each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection<S> {
    pub seg_a: usize,
    pub seg_b: usize,
    pub point: Vec2<S>,
}

/// A 2D fracture network of polyline fractures linearized into segments.
///
/// Fractures are split at every mutual intersection on construction, so
/// segments never cross except at shared endpoints. Shared endpoints are
/// bitwise identical because every vertex is an index into one point pool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FractureNetwork<S> {
    /// Shared vertex pool (meters).
    pub points: Vec<Vec2<S>>,
    /// Per fracture: ordered vertex indices of its polyline.
    pub fractures: Vec<Vec<usize>>,
    /// Straight segments covering all fractures.
    pub segments: Vec<Segment>,
    /// Mutual intersections between distinct fractures.
    pub intersections: Vec<Intersection<S>>,
}

/// Input formats for [`load_network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkFormat {
    /// Plain text, one segment per line: `x1 y1 x2 y2 fracture_id`.
    SegmentList,
    /// JSON: a top-level list of fractures, each a list of `[x, y]` pairs.
    PolylineJson,
}

/// Deduplicates points within `MERGE_TOL` using a uniform grid.
struct PointPool<S> {
    points: Vec<Vec2<S>>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl<S: Scalar> PointPool<S> {
    fn new() -> Self {
        Self {
            points: Vec::new(),
            grid: HashMap::new(),
        }
    }

    fn cell(p: Vec2<S>) -> (i64, i64) {
        let g = 4.0 * MERGE_TOL;
        ((p.x.as_f64() / g).floor() as i64, (p.y.as_f64() / g).floor() as i64)
    }

    fn insert(&mut self, p: Vec2<S>) -> usize {
        let (cx, cy) = Self::cell(p);
        let tol = S::of(MERGE_TOL);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if self.points[id].dist(p) <= tol {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.grid.entry((cx, cy)).or_default().push(id);
        id
    }
}

impl<S: Scalar> FractureNetwork<S> {
    /// Builds a network from raw polylines: merges coincident points, rejects
    /// degenerate segments and splits all fractures at mutual intersections.
    pub fn from_polylines(polylines: Vec<Vec<Vec2<S>>>) -> Result<Self> {
        let mut pool = PointPool::new();
        let mut fractures: Vec<Vec<usize>> = Vec::new();
        for (fi, poly) in polylines.iter().enumerate() {
            if poly.len() < 2 {
                return Err(Error::DegenerateGeometry(format!(
                    "fracture {fi} has fewer than 2 points"
                )));
            }
            let mut ids = Vec::with_capacity(poly.len());
            for &p in poly {
                let id = pool.insert(p);
                // Repeated vertices collapse; drop consecutive duplicates.
                if ids.last() != Some(&id) {
                    ids.push(id);
                }
            }
            if ids.len() < 2 {
                return Err(Error::DegenerateGeometry(format!(
                    "fracture {fi} collapses to a point after merging"
                )));
            }
            fractures.push(ids);
        }
        let mut net = Self {
            points: pool.points,
            fractures,
            segments: Vec::new(),
            intersections: Vec::new(),
        };
        net.rebuild_segments();
        net.split_at_intersections()?;
        net.validate()?;
        Ok(net)
    }

    fn rebuild_segments(&mut self) {
        self.segments.clear();
        for (fi, poly) in self.fractures.iter().enumerate() {
            for w in poly.windows(2) {
                self.segments.push(Segment {
                    a: w[0],
                    b: w[1],
                    fracture: fi,
                });
            }
        }
    }

    /// Inserts intersection vertices into every fracture polyline so that
    /// segments only meet at shared endpoints, and records the crossings.
    fn split_at_intersections(&mut self) -> Result<()> {
        let tol = S::of(MERGE_TOL);
        // Collect split points per fracture edge (by polyline position) and
        // crossing events between fracture pairs.
        let mut pool = PointPool::new();
        for &p in &self.points {
            pool.insert(p);
        }
        // (fracture, edge index within polyline) -> [(param t, point id)]
        let mut splits: HashMap<(usize, usize), Vec<(S, usize)>> = HashMap::new();
        let mut events: Vec<(usize, usize, usize)> = Vec::new(); // (frac_a, frac_b, point id)
        let edges: Vec<(usize, usize, usize, usize)> = self
            .fractures
            .iter()
            .enumerate()
            .flat_map(|(fi, poly)| {
                poly.windows(2)
                    .enumerate()
                    .map(move |(ei, w)| (fi, ei, w[0], w[1]))
                    .collect::<Vec<_>>()
            })
            .collect();
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (fa, ea, a1, a2) = edges[i];
                let (fb, eb, b1, b2) = edges[j];
                if a1 == b1 || a1 == b2 || a2 == b1 || a2 == b2 {
                    continue; // already joined at a shared vertex
                }
                let r = segment_intersection(
                    self.points[a1],
                    self.points[a2],
                    self.points[b1],
                    self.points[b2],
                    tol,
                );
                match r {
                    SegSeg::None => {}
                    SegSeg::CollinearOverlap => {
                        return Err(Error::DegenerateGeometry(format!(
                            "fractures {fa} and {fb} contain collinear overlapping segments"
                        )));
                    }
                    SegSeg::Point { p, t, u } => {
                        let pid = pool.insert(p);
                        // Snap to an existing endpoint when within tolerance.
                        let interior_a = pid != a1 && pid != a2;
                        let interior_b = pid != b1 && pid != b2;
                        if interior_a {
                            splits.entry((fa, ea)).or_default().push((t, pid));
                        }
                        if interior_b {
                            splits.entry((fb, eb)).or_default().push((u, pid));
                        }
                        if fa != fb {
                            events.push((fa, fb, pid));
                        }
                    }
                }
            }
        }
        self.points = pool.points;
        if splits.is_empty() && events.is_empty() {
            return Ok(());
        }
        // Insert split vertices into the polylines, ordered along each edge.
        let mut new_fractures = Vec::with_capacity(self.fractures.len());
        for (fi, poly) in self.fractures.iter().enumerate() {
            let mut out = Vec::with_capacity(poly.len());
            for (ei, w) in poly.windows(2).enumerate() {
                out.push(w[0]);
                if let Some(list) = splits.get_mut(&(fi, ei)) {
                    list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                    for &(_, pid) in list.iter() {
                        if out.last() != Some(&pid) {
                            out.push(pid);
                        }
                    }
                }
            }
            let last = *poly.last().unwrap();
            if out.last() != Some(&last) {
                out.push(last);
            }
            new_fractures.push(out);
        }
        self.fractures = new_fractures;
        self.rebuild_segments();
        // Map crossing events to post-split segment ids: for each event pick
        // one incident segment of each fracture.
        let mut by_point: HashMap<usize, HashMap<usize, usize>> = HashMap::new();
        for (si, s) in self.segments.iter().enumerate() {
            for v in [s.a, s.b] {
                by_point
                    .entry(v)
                    .or_default()
                    .entry(s.fracture)
                    .or_insert(si);
            }
        }
        events.sort();
        events.dedup();
        self.intersections.clear();
        for (fa, fb, pid) in events {
            let at = &by_point[&pid];
            let (sa, sb) = (at[&fa], at[&fb]);
            self.intersections.push(Intersection {
                seg_a: sa.min(sb),
                seg_b: sa.max(sb),
                point: self.points[pid],
            });
        }
        Ok(())
    }

    /// Checks the structural invariants; called by every constructor path.
    pub fn validate(&self) -> Result<()> {
        for (si, s) in self.segments.iter().enumerate() {
            if self.points[s.a].dist(self.points[s.b]) <= S::zero() {
                return Err(Error::DegenerateGeometry(format!(
                    "segment {si} has zero length"
                )));
            }
        }
        let tol = S::of(ON_SEGMENT_TOL);
        for x in &self.intersections {
            for si in [x.seg_a, x.seg_b] {
                let s = &self.segments[si];
                let d = point_segment_distance(x.point, self.points[s.a], self.points[s.b]);
                if d > tol {
                    return Err(Error::DegenerateGeometry(format!(
                        "intersection point not on segment {si} (distance {d:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn segment_length(&self, si: usize) -> S {
        let s = &self.segments[si];
        self.points[s.a].dist(self.points[s.b])
    }

    /// Total polyline length of one fracture.
    pub fn trace_length(&self, fracture: usize) -> S {
        self.fractures[fracture]
            .windows(2)
            .map(|w| self.points[w[0]].dist(self.points[w[1]]))
            .fold(S::zero(), |a, b| a + b)
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Vertices used by more than one fracture or more than two segments;
    /// protected from removal during simplification.
    fn junction_vertices(&self) -> Vec<bool> {
        let mut seg_count = vec![0usize; self.points.len()];
        let mut frac_of: Vec<Option<usize>> = vec![None; self.points.len()];
        let mut shared = vec![false; self.points.len()];
        for s in &self.segments {
            for v in [s.a, s.b] {
                seg_count[v] += 1;
                match frac_of[v] {
                    None => frac_of[v] = Some(s.fracture),
                    Some(f) if f != s.fracture => shared[v] = true,
                    _ => {}
                }
            }
        }
        (0..self.points.len())
            .map(|v| shared[v] || seg_count[v] > 2)
            .collect()
    }
}

/// Polyline simplification within a chord tolerance.
///
/// Every fracture polyline is replaced by a subset of its vertices such that
/// the maximum deviation of the removed vertices from the straightened chords
/// is at most `chord_tol`. Junction vertices (shared with other fractures)
/// are never removed, so connectivity and intersections are preserved.
pub fn linearize<S: Scalar>(network: &FractureNetwork<S>, chord_tol: S) -> Result<FractureNetwork<S>> {
    if chord_tol <= S::zero() {
        return Err(Error::InvalidParameter(
            "chord_tol must be positive".into(),
        ));
    }
    let protected = network.junction_vertices();
    let mut fractures = Vec::with_capacity(network.fractures.len());
    for poly in &network.fractures {
        let mut kept = Vec::with_capacity(poly.len());
        let mut start = 0;
        kept.push(poly[0]);
        for i in 1..poly.len() {
            let is_break = i == poly.len() - 1 || protected[poly[i]];
            if is_break {
                douglas_peucker(&network.points, &poly[start..=i], chord_tol, &mut kept);
                start = i;
            }
        }
        fractures.push(kept);
    }
    let mut out = FractureNetwork {
        points: network.points.clone(),
        fractures,
        segments: Vec::new(),
        intersections: network.intersections.clone(),
    };
    out.rebuild_segments();
    out.validate()?;
    Ok(out)
}

/// Appends the Douglas-Peucker simplification of `poly` (skipping its first
/// vertex, which the caller already emitted) to `kept`.
fn douglas_peucker<S: Scalar>(
    points: &[Vec2<S>],
    poly: &[usize],
    tol: S,
    kept: &mut Vec<usize>,
) {
    if poly.len() <= 2 {
        kept.extend(&poly[1..]);
        return;
    }
    let (a, b) = (points[poly[0]], points[*poly.last().unwrap()]);
    let mut worst = (S::zero(), 0usize);
    for (i, &v) in poly[1..poly.len() - 1].iter().enumerate() {
        let d = point_segment_distance(points[v], a, b);
        if d > worst.0 {
            worst = (d, i + 1);
        }
    }
    if worst.0 <= tol {
        kept.push(*poly.last().unwrap());
    } else {
        douglas_peucker(points, &poly[..=worst.1], tol, kept);
        douglas_peucker(points, &poly[worst.1..], tol, kept);
    }
}

/// Simulation domain: a flow window bounding the network and a larger
/// mechanical window including a buffer that suppresses boundary effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain<S> {
    pub flow_window: Rect<S>,
    pub mech_window: Rect<S>,
    pub buffer_fraction: S,
}

impl<S: Scalar> Domain<S> {
    /// Explicit windows; `mech_window` must contain `flow_window` (they may
    /// coincide, in which case fractures are allowed to touch the boundary).
    pub fn with_windows(flow_window: Rect<S>, mech_window: Rect<S>) -> Result<Self> {
        if flow_window.width() <= S::zero() || flow_window.height() <= S::zero() {
            return Err(Error::InvalidParameter(
                "flow window has non-positive extent".into(),
            ));
        }
        let ok = mech_window == flow_window || mech_window.strictly_contains(&flow_window);
        if !ok {
            return Err(Error::InvalidParameter(
                "mech window must equal or strictly contain the flow window".into(),
            ));
        }
        Ok(Self {
            flow_window,
            mech_window,
            buffer_fraction: S::zero(),
        })
    }
}

/// Builds the domain from the tight bounding box of the network plus a
/// buffer of `buffer_fraction` times the larger window extent on each side.
/// Degenerate boxes (collinear networks) are padded by `DEGENERATE_PAD`.
pub fn build_domain<S: Scalar>(
    network: &FractureNetwork<S>,
    buffer_fraction: S,
) -> Result<Domain<S>> {
    if buffer_fraction < S::zero() {
        return Err(Error::InvalidParameter(
            "buffer_fraction must be non-negative".into(),
        ));
    }
    let used: Vec<Vec2<S>> = network
        .segments
        .iter()
        .flat_map(|s| [network.points[s.a], network.points[s.b]])
        .collect();
    let mut flow = Rect::bounding(used).ok_or(Error::EmptyNetwork)?;
    let pad = S::of(DEGENERATE_PAD);
    if flow.width() <= S::zero() {
        flow.min.x = flow.min.x - pad;
        flow.max.x = flow.max.x + pad;
    }
    if flow.height() <= S::zero() {
        flow.min.y = flow.min.y - pad;
        flow.max.y = flow.max.y + pad;
    }
    let buffer = buffer_fraction * flow.width().max(flow.height());
    let mech = flow.expand(buffer);
    Ok(Domain {
        flow_window: flow,
        mech_window: mech,
        buffer_fraction,
    })
}

/// Reads a network file in the given format.
pub fn load_network<S: Scalar>(path: impl AsRef<Path>, format: NetworkFormat) -> Result<FractureNetwork<S>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        NetworkFormat::SegmentList => parse_segment_list(&text, &name),
        NetworkFormat::PolylineJson => parse_polyline_json(&text, &name),
    }
}

/// Parses the segment-list format: one segment per line,
/// `x1 y1 x2 y2 fracture_id`, `#` starts a comment, whitespace-delimited.
/// Segments sharing a fracture id are chained into polylines where their
/// endpoints coincide; otherwise they stay separate pieces of one fracture.
pub fn parse_segment_list<S: Scalar>(text: &str, path: &str) -> Result<FractureNetwork<S>> {
    let mut raw: Vec<(i64, Vec2<S>, Vec2<S>)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                path: path.into(),
                line: ln + 1,
                message: format!("expected 5 fields `x1 y1 x2 y2 fracture_id`, found {}", fields.len()),
            });
        }
        let mut nums = [0f64; 4];
        for (k, f) in fields[..4].iter().enumerate() {
            nums[k] = f.parse::<f64>().map_err(|e| Error::Parse {
                path: path.into(),
                line: ln + 1,
                message: format!("bad coordinate {f:?}: {e}"),
            })?;
        }
        let id = fields[4].parse::<i64>().map_err(|e| Error::Parse {
            path: path.into(),
            line: ln + 1,
            message: format!("bad fracture id {:?}: {e}", fields[4]),
        })?;
        raw.push((
            id,
            Vec2::new(S::of(nums[0]), S::of(nums[1])),
            Vec2::new(S::of(nums[2]), S::of(nums[3])),
        ));
    }
    // Group by fracture id (in first-seen order), chaining consecutive
    // segments whose endpoints touch into polylines.
    let mut order: Vec<i64> = Vec::new();
    let mut groups: HashMap<i64, Vec<(Vec2<S>, Vec2<S>)>> = HashMap::new();
    for (id, a, b) in raw {
        if !groups.contains_key(&id) {
            order.push(id);
        }
        groups.entry(id).or_default().push((a, b));
    }
    let tol = S::of(MERGE_TOL);
    let mut polylines: Vec<Vec<Vec2<S>>> = Vec::new();
    for id in order {
        let segs = &groups[&id];
        let mut current: Vec<Vec2<S>> = Vec::new();
        for &(a, b) in segs {
            if let Some(&last) = current.last() {
                if last.dist(a) <= tol {
                    current.push(b);
                    continue;
                }
                polylines.push(std::mem::take(&mut current));
            }
            current.push(a);
            current.push(b);
        }
        if !current.is_empty() {
            polylines.push(current);
        }
    }
    FractureNetwork::from_polylines(polylines)
}

/// Parses the polyline-json format: a top-level list of fractures, each a
/// list of `[x, y]` pairs in meters.
pub fn parse_polyline_json<S: Scalar>(text: &str, path: &str) -> Result<FractureNetwork<S>> {
    let data: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.into(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let polylines = data
        .into_iter()
        .map(|poly| {
            poly.into_iter()
                .map(|[x, y]| Vec2::new(S::of(x), S::of(y)))
                .collect()
        })
        .collect();
    FractureNetwork::from_polylines(polylines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    #[test]
    fn single_segment() {
        let net = parse_segment_list::<f64>("0 0 1 0 0\n", "test").unwrap();
        assert_eq!(net.fractures.len(), 1);
        assert_eq!(net.segments.len(), 1);
        assert_eq!(net.intersections.len(), 0);
    }

    #[test]
    fn crossing_segments_split() {
        let net =
            parse_segment_list::<f64>("0 0 2 0 0\n1 -1 1 1 1\n", "test").unwrap();
        assert_eq!(net.fractures.len(), 2);
        assert_eq!(net.segments.len(), 4, "each fracture splits at the crossing");
        assert_eq!(net.intersections.len(), 1);
        let x = net.intersections[0];
        assert_relative_eq!(x.point.x, 1.0);
        assert_relative_eq!(x.point.y, 0.0);
        // The crossing vertex is shared bitwise by all four segments.
        let deg = net
            .segments
            .iter()
            .filter(|s| net.points[s.a] == x.point || net.points[s.b] == x.point)
            .count();
        assert_eq!(deg, 4);
    }

    #[test]
    fn zero_length_rejected() {
        let err = parse_segment_list::<f64>("0 0 0 0 0\n", "test").unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)), "{err}");
    }

    #[test]
    fn t_junction_splits_crossed_segment() {
        let net = parse_segment_list::<f64>("0 0 2 0 0\n1 0 1 1 1\n", "test").unwrap();
        // Horizontal fracture splits into two, vertical abuts at (1, 0).
        assert_eq!(net.segments.len(), 3);
        assert_eq!(net.intersections.len(), 1);
    }

    #[test]
    fn comment_and_blank_lines() {
        let net = parse_segment_list::<f64>(
            "# header\n\n0 0 1 0 0  # trailing\n",
            "test",
        )
        .unwrap();
        assert_eq!(net.segments.len(), 1);
    }

    #[test]
    fn polyline_json_round() {
        let net = parse_polyline_json::<f64>("[[[0,0],[1,0],[1,1]]]", "test").unwrap();
        assert_eq!(net.fractures.len(), 1);
        assert_eq!(net.segments.len(), 2);
    }

    #[test]
    fn merge_close_points() {
        let net = parse_segment_list::<f64>(
            "0 0 1 0 0\n1.0000000001 0 2 0 1\n",
            "test",
        )
        .unwrap();
        // Endpoints 1e-10 apart merge into one vertex.
        assert_eq!(net.points.len(), 3);
    }

    #[test]
    fn linearize_flattens_within_tolerance() {
        let net = FractureNetwork::from_polylines(vec![vec![
            v(0.0, 0.0),
            v(0.5, 0.1),
            v(1.0, 0.0),
        ]])
        .unwrap();
        let flat = linearize(&net, 0.2).unwrap();
        assert_eq!(flat.segments.len(), 1, "deviation 0.1 <= 0.2 drops the midpoint");
        let kept = linearize(&net, 0.05).unwrap();
        assert_eq!(kept.segments.len(), 2, "deviation 0.1 > 0.05 keeps the midpoint");
    }

    #[test]
    fn linearize_straight_is_identity() {
        let net =
            FractureNetwork::from_polylines(vec![vec![v(0.0, 0.0), v(1.0, 0.0)]]).unwrap();
        let out = linearize(&net, 0.5).unwrap();
        assert_eq!(out.fractures, net.fractures);
    }

    #[test]
    fn linearize_idempotent() {
        let net = FractureNetwork::from_polylines(vec![vec![
            v(0.0, 0.0),
            v(0.3, 0.05),
            v(0.5, 0.2),
            v(0.8, 0.1),
            v(1.0, 0.0),
        ]])
        .unwrap();
        let once = linearize(&net, 0.08).unwrap();
        let twice = linearize(&once, 0.08).unwrap();
        assert_eq!(once.fractures, twice.fractures);
    }

    #[test]
    fn linearize_keeps_junctions() {
        let net = parse_segment_list::<f64>(
            "0 0 1 0.05 0\n1 0.05 2 0 0\n1 0.05 1 1 1\n",
            "test",
        )
        .unwrap();
        // The kink at (1, 0.05) is a junction with fracture 1: must survive.
        let out = linearize(&net, 1.0).unwrap();
        assert_eq!(out.fractures[0].len(), 3);
    }

    #[test]
    fn domain_from_bbox() {
        let net = parse_segment_list::<f64>("0 0 3 0 0\n0 0 0 2 1\n", "test").unwrap();
        let d = build_domain(&net, 0.5).unwrap();
        assert_relative_eq!(d.flow_window.min.x, 0.0);
        assert_relative_eq!(d.flow_window.max.x, 3.0);
        assert_relative_eq!(d.mech_window.min.x, -1.5);
        assert_relative_eq!(d.mech_window.max.x, 4.5);
        assert_relative_eq!(d.mech_window.min.y, -1.5);
        assert_relative_eq!(d.mech_window.max.y, 3.5);
    }

    #[test]
    fn domain_zero_buffer() {
        let net = parse_segment_list::<f64>("0 0 3 0 0\n0 0 0 2 1\n", "test").unwrap();
        let d = build_domain(&net, 0.0).unwrap();
        assert_eq!(d.flow_window, d.mech_window);
    }

    #[test]
    fn degenerate_bbox_padded() {
        let net = parse_segment_list::<f64>("0 0 1 0 0\n", "test").unwrap();
        let d = build_domain(&net, 0.0).unwrap();
        assert!(d.flow_window.height() >= 2.0 * DEGENERATE_PAD * 0.99);
        assert_relative_eq!(d.flow_window.width(), 1.0);
    }

    #[test]
    fn empty_network_rejected() {
        let net = FractureNetwork::<f64> {
            points: vec![],
            fractures: vec![],
            segments: vec![],
            intersections: vec![],
        };
        assert!(matches!(build_domain(&net, 0.5), Err(Error::EmptyNetwork)));
    }

    #[test]
    fn intersections_translation_invariant() {
        let base = "0 0 2 0 0\n1 -1 1 1 1\n0.5 -1 0.5 1 2\n";
        let shifted = "10 -3 12 -3 0\n11 -4 11 -2 1\n10.5 -4 10.5 -2 2\n";
        let a = parse_segment_list::<f64>(base, "a").unwrap();
        let b = parse_segment_list::<f64>(shifted, "b").unwrap();
        assert_eq!(a.intersections.len(), b.intersections.len());
    }
}
