//! Constrained Delaunay triangulation of the mechanical window, conforming
//! to all fracture segments, with Ruppert-style quality refinement.

use super::{ConformingMesh, FractureEdge, Side};
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Rect, Vec2};
use crate::network::{Domain, FractureNetwork};
use crate::scalar::Scalar;
use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, SpadeNum,
    Triangulation,
};

/// Minimum acceptable interior angle of any triangle, in degrees.
pub const MIN_ANGLE_DEG: f64 = 15.0;

/// Angle limit requested from the refinement (stricter than the acceptance
/// threshold so the census has margin).
const REFINE_ANGLE_DEG: f64 = 27.0;

/// Two fractures closer than this without touching make constraint
/// enforcement hopeless at any reasonable mesh size.
pub const MIN_FEATURE_SEPARATION: f64 = 1e-6;

const GEOM_TOL: f64 = 1e-9;

/// Builds a triangulation of `domain.mech_window` in which every fracture
/// segment is a union of triangle edges, boundary-side midpoints are mesh
/// nodes, and fracture segments carry explicit nodes where they cross the
/// flow-window boundary. The result is the pre-duplication mesh.
pub fn triangulate<S>(
    domain: &Domain<S>,
    network: &FractureNetwork<S>,
    target_edge_length: S,
) -> Result<ConformingMesh<S>>
where
    S: Scalar + SpadeNum,
{
    if target_edge_length <= S::zero() {
        return Err(Error::InvalidParameter(
            "target_edge_length must be positive".into(),
        ));
    }
    let window = domain.mech_window;
    let tol = S::of(GEOM_TOL);
    for (si, s) in network.segments.iter().enumerate() {
        for p in [network.points[s.a], network.points[s.b]] {
            if !window.contains(p, tol) {
                return Err(Error::MeshFailure(format!(
                    "segment {si} endpoint {:?} lies outside the mechanical window",
                    p
                )));
            }
        }
    }
    check_feature_separation(network)?;

    let h = target_edge_length;
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<S>> =
        ConstrainedDelaunayTriangulation::new();

    // Window boundary: corners, side midpoints, fracture tips touching the
    // side, then uniform subdivision of the gaps.
    for side in Side::ALL {
        let (a, b) = side_corners(&window, side);
        let mut forced: Vec<Vec2<S>> = vec![side.midpoint(&window)];
        for s in &network.segments {
            for p in [network.points[s.a], network.points[s.b]] {
                if side.contains_point(&window, p, tol) {
                    forced.push(p);
                }
            }
        }
        insert_chain(&mut cdt, a, b, &forced, h)?;
    }
    // Fracture segments, with forced nodes where they cross the flow window
    // boundary so flow cells never straddle the buffer.
    for s in &network.segments {
        let (a, b) = (network.points[s.a], network.points[s.b]);
        let forced = flow_boundary_crossings(a, b, &domain.flow_window);
        insert_chain(&mut cdt, a, b, &forced, h)?;
    }

    // Quality refinement; constraint edges may be split, splits stay
    // constraints.
    let mech_area = window.width() * window.height();
    let target_area = S::of(3f64.sqrt() / 4.0) * h * h;
    let budget = (mech_area / target_area).as_f64().ceil() as usize * 8 + 20_000;
    let params = RefinementParameters::<S>::new()
        .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
        .with_max_allowed_area(target_area)
        .with_max_additional_vertices(budget);
    let refinement = cdt.refine(params);
    if !refinement.refinement_complete {
        return Err(Error::MeshFailure(
            "refinement did not reach the requested quality; \
             reduce target_edge_length or simplify the network"
                .into(),
        ));
    }

    extract_mesh(&cdt, domain, network)
}

fn side_corners<S: Scalar>(window: &Rect<S>, side: Side) -> (Vec2<S>, Vec2<S>) {
    let Rect { min, max } = *window;
    match side {
        Side::Left => (Vec2::new(min.x, min.y), Vec2::new(min.x, max.y)),
        Side::Right => (Vec2::new(max.x, min.y), Vec2::new(max.x, max.y)),
        Side::Bottom => (Vec2::new(min.x, min.y), Vec2::new(max.x, min.y)),
        Side::Top => (Vec2::new(min.x, max.y), Vec2::new(max.x, max.y)),
    }
}

/// Parameters where the open segment (a, b) crosses the flow-window boundary.
fn flow_boundary_crossings<S: Scalar>(a: Vec2<S>, b: Vec2<S>, flow: &Rect<S>) -> Vec<Vec2<S>> {
    let mut out = Vec::new();
    let d = b - a;
    let eps = S::of(1e-12);
    let mut push = |t: S| {
        if t > eps && t < S::one() - eps {
            out.push(a + d * t);
        }
    };
    if d.x != S::zero() {
        for x in [flow.min.x, flow.max.x] {
            let t = (x - a.x) / d.x;
            let y = a.y + d.y * t;
            if y >= flow.min.y - eps && y <= flow.max.y + eps {
                push(t);
            }
        }
    }
    if d.y != S::zero() {
        for y in [flow.min.y, flow.max.y] {
            let t = (y - a.y) / d.y;
            let x = a.x + d.x * t;
            if x >= flow.min.x - eps && x <= flow.max.x + eps {
                push(t);
            }
        }
    }
    out
}

/// Inserts the constrained polyline a -> (forced interior points) -> b,
/// subdividing every piece to the target length.
fn insert_chain<S>(
    cdt: &mut ConstrainedDelaunayTriangulation<Point2<S>>,
    a: Vec2<S>,
    b: Vec2<S>,
    forced: &[Vec2<S>],
    h: S,
) -> Result<()>
where
    S: Scalar + SpadeNum,
{
    let len = a.dist(b);
    let mut stops: Vec<(S, Vec2<S>)> = vec![(S::zero(), a), (S::one(), b)];
    let eps = S::of(1e-12);
    for &p in forced {
        let t = crate::geometry::project_parameter(p, a, b);
        if t > eps && t < S::one() - eps && !stops.iter().any(|&(_, q)| q == p) {
            stops.push((t, p));
        }
    }
    stops.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut prev: Option<Vec2<S>> = None;
    for w in stops.windows(2) {
        let (p, q) = (w[0].1, w[1].1);
        let piece = p.dist(q);
        if piece <= S::zero() {
            continue;
        }
        let n = (piece / h).as_f64().ceil().max(1.0) as usize;
        for k in 0..=n {
            let point = if k == 0 {
                p
            } else if k == n {
                q
            } else {
                p.lerp(q, S::of(k as f64 / n as f64))
            };
            if let Some(last) = prev {
                if last != point {
                    cdt.add_constraint_edge(
                        Point2::new(last.x, last.y),
                        Point2::new(point.x, point.y),
                    )
                    .map_err(|e| Error::MeshFailure(format!("constraint insertion: {e:?}")))?;
                }
            }
            prev = Some(point);
        }
    }
    let _ = len;
    Ok(())
}

/// Pairwise separation preflight: non-touching segments closer than
/// `MIN_FEATURE_SEPARATION` are rejected.
fn check_feature_separation<S: Scalar>(network: &FractureNetwork<S>) -> Result<()> {
    let min_sep = S::of(MIN_FEATURE_SEPARATION);
    let segs = &network.segments;
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            let (s, t) = (&segs[i], &segs[j]);
            if s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b {
                continue;
            }
            let (pa, pb) = (network.points[s.a], network.points[s.b]);
            let (qa, qb) = (network.points[t.a], network.points[t.b]);
            // Disjoint segments attain their minimum distance at an endpoint.
            let d = point_segment_distance(pa, qa, qb)
                .min(point_segment_distance(pb, qa, qb))
                .min(point_segment_distance(qa, pa, pb))
                .min(point_segment_distance(qb, pa, pb));
            if d < min_sep {
                return Err(Error::MeshFailure(format!(
                    "segments {i} and {j} are {d:e} m apart without touching; \
                     closer than the {MIN_FEATURE_SEPARATION:e} m separation limit"
                )));
            }
        }
    }
    Ok(())
}

fn extract_mesh<S>(
    cdt: &ConstrainedDelaunayTriangulation<Point2<S>>,
    domain: &Domain<S>,
    network: &FractureNetwork<S>,
) -> Result<ConformingMesh<S>>
where
    S: Scalar + SpadeNum,
{
    let window = domain.mech_window;
    let tol = S::of(GEOM_TOL);
    // spade vertex indices are dense for append-only triangulations, but map
    // defensively through a lookup anyway.
    let mut index_of = vec![usize::MAX; cdt.num_vertices()];
    let mut nodes: Vec<Vec2<S>> = Vec::with_capacity(cdt.num_vertices());
    for (k, v) in cdt.vertices().enumerate() {
        let p = v.position();
        index_of[v.index()] = k;
        nodes.push(Vec2::new(p.x, p.y));
    }
    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    for f in cdt.inner_faces() {
        let [a, b, c] = f.vertices().map(|v| index_of[v.index()]);
        let (pa, pb, pc) = (nodes[a], nodes[b], nodes[c]);
        if (pb - pa).cross(pc - pa) > S::zero() {
            triangles.push([a, b, c]);
        } else {
            triangles.push([a, c, b]);
        }
    }

    // Classify constraint edges: window boundary or fracture segment; orient
    // fracture edges along their parent segment.
    let mut fracture_edges = Vec::new();
    for e in cdt.undirected_edges() {
        if !cdt.is_constraint_edge(e.fix()) {
            continue;
        }
        let [va, vb] = e.vertices().map(|v| index_of[v.index()]);
        let (pa, pb) = (nodes[va], nodes[vb]);
        let mid = (pa + pb) * S::of(0.5);
        let on_boundary = Side::ALL
            .iter()
            .any(|s| s.contains_point(&window, mid, tol));
        if on_boundary {
            continue;
        }
        let mut best: Option<(S, usize)> = None;
        for (si, s) in network.segments.iter().enumerate() {
            let d = point_segment_distance(mid, network.points[s.a], network.points[s.b]);
            if d <= tol && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, si));
            }
        }
        let Some((_, si)) = best else {
            return Err(Error::TopologyError(format!(
                "constraint edge at {mid:?} lies on no fracture segment and no boundary"
            )));
        };
        let s = &network.segments[si];
        let dir = network.points[s.b] - network.points[s.a];
        let ordered = if (pb - pa).dot(dir) >= S::zero() {
            [va, vb]
        } else {
            [vb, va]
        };
        fracture_edges.push(FractureEdge {
            nodes: ordered,
            segment: si,
        });
    }
    fracture_edges.sort_by_key(|e| (e.segment, e.nodes));

    // The four side midpoints must be mesh nodes.
    let mut constrained_nodes = Vec::with_capacity(4);
    for side in Side::ALL {
        let m = side.midpoint(&window);
        let found = nodes.iter().position(|&p| p.dist(m) <= tol);
        match found {
            Some(id) => constrained_nodes.push(id),
            None => return Err(Error::MissingMidNode(side.name())),
        }
    }

    let canonical = (0..nodes.len()).collect();
    let mesh = ConformingMesh {
        nodes,
        triangles,
        fracture_edges,
        fracture_faces: Vec::new(),
        constrained_nodes,
        mech_window: window,
        canonical,
        duplicated: false,
    };
    mesh.validate_base()?;

    let min_angle = mesh.min_angle_deg();
    if min_angle < S::of(MIN_ANGLE_DEG) {
        return Err(Error::MeshFailure(format!(
            "minimum triangle angle {min_angle:.2} deg below {MIN_ANGLE_DEG} deg"
        )));
    }
    // Conformity: every segment fully covered by constraint edges.
    let cover = mesh.segment_coverage(network.segments.len());
    for (si, &len) in cover.iter().enumerate() {
        let want = network.segment_length(si);
        if (len - want).abs() > S::of(1e-9) + S::of(1e-12) * want {
            return Err(Error::MeshFailure(format!(
                "segment {si} covered by edges of total length {len:e}, expected {want:e}"
            )));
        }
    }
    Ok(mesh)
}
