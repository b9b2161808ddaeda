//! Planar geometry primitives: points, axis-aligned rectangles and segment
//! intersection math used by the network and meshing stages.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// 2D point / vector, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is
    /// counter-clockwise from `self`.
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> S {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Self) -> S {
        (self - o).norm()
    }

    /// Left-hand perpendicular (rotation by +90 degrees).
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n)
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self) * t
    }

    /// Exact bit pattern of both coordinates, used as a hash key where
    /// coincidence must be bitwise (undeformed master/slave nodes).
    pub fn bits(self) -> (u64, u64) {
        (self.x.as_f64().to_bits(), self.y.as_f64().to_bits())
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Mul<S> for Vec2<S> {
    type Output = Self;
    fn mul(self, s: S) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<S: Scalar> Div<S> for Vec2<S> {
    type Output = Self;
    fn div(self, s: S) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<S: Scalar> Neg for Vec2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<S> {
    pub min: Vec2<S>,
    pub max: Vec2<S>,
}

impl<S: Scalar> Rect<S> {
    pub fn new(min: Vec2<S>, max: Vec2<S>) -> Self {
        Self { min, max }
    }

    pub fn from_corners(x0: S, y0: S, x1: S, y1: S) -> Self {
        Self::new(Vec2::new(x0, y0), Vec2::new(x1, y1))
    }

    pub fn width(&self) -> S {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> S {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Vec2<S> {
        (self.min + self.max) * S::of(0.5)
    }

    pub fn contains(&self, p: Vec2<S>, tol: S) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    /// Grows the rectangle by `d` on every side.
    pub fn expand(&self, d: S) -> Self {
        let v = Vec2::new(d, d);
        Self::new(self.min - v, self.max + v)
    }

    /// Strict containment of `inner` with positive margin on all four sides.
    pub fn strictly_contains(&self, inner: &Rect<S>) -> bool {
        self.min.x < inner.min.x
            && self.min.y < inner.min.y
            && self.max.x > inner.max.x
            && self.max.y > inner.max.y
    }

    /// Bounding box of a point set; `None` when empty.
    pub fn bounding(points: impl IntoIterator<Item = Vec2<S>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first, first);
        for p in it {
            r.min.x = r.min.x.min(p.x);
            r.min.y = r.min.y.min(p.y);
            r.max.x = r.max.x.max(p.x);
            r.max.y = r.max.y.max(p.y);
        }
        Some(r)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance<S: Scalar>(p: Vec2<S>, a: Vec2<S>, b: Vec2<S>) -> S {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == S::zero() {
        return p.dist(a);
    }
    let t = (p - a).dot(ab) / len2;
    let t = t.max(S::zero()).min(S::one());
    p.dist(a + ab * t)
}

/// Parameter of the orthogonal projection of `p` onto the line through `a`
/// and `b` (0 at `a`, 1 at `b`), unclamped.
pub fn project_parameter<S: Scalar>(p: Vec2<S>, a: Vec2<S>, b: Vec2<S>) -> S {
    let ab = b - a;
    (p - a).dot(ab) / ab.dot(ab)
}

/// Outcome of intersecting two segments that do not share an endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegSeg<S> {
    None,
    /// Proper or touching intersection; parameters along each segment in [0, 1].
    Point { p: Vec2<S>, t: S, u: S },
    /// Segments are collinear and overlap over more than a point.
    CollinearOverlap,
}

/// Intersects segments `[p1, p2]` and `[q1, q2]`. `tol` is an absolute
/// distance tolerance for touching configurations.
pub fn segment_intersection<S: Scalar>(
    p1: Vec2<S>,
    p2: Vec2<S>,
    q1: Vec2<S>,
    q2: Vec2<S>,
    tol: S,
) -> SegSeg<S> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.cross(d2);
    let len1 = d1.norm();
    let len2 = d2.norm();
    // Parallel when the cross product is small relative to the segment lengths.
    if denom.abs() <= S::of(1e-14) * len1 * len2 {
        // Collinear test: q1 on the line through p1,p2?
        let off = (q1 - p1).cross(d1.normalized()).abs();
        if off > tol {
            return SegSeg::None;
        }
        // Collinear. Overlap beyond a single touching point?
        let ta = project_parameter(q1, p1, p2);
        let tb = project_parameter(q2, p1, p2);
        let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
        let eps = tol / len1;
        if hi < -eps || lo > S::one() + eps {
            return SegSeg::None;
        }
        let ov = hi.min(S::one()) - lo.max(S::zero());
        if ov * len1 > tol {
            return SegSeg::CollinearOverlap;
        }
        return SegSeg::None;
    }
    let t = (q1 - p1).cross(d2) / denom;
    let u = (q1 - p1).cross(d1) / denom;
    let et = tol / len1;
    let eu = tol / len2;
    if t < -et || t > S::one() + et || u < -eu || u > S::one() + eu {
        return SegSeg::None;
    }
    let t = t.max(S::zero()).min(S::one());
    let u = u.max(S::zero()).min(S::one());
    SegSeg::Point {
        p: p1 + d1 * t,
        t,
        u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cross_point() {
        let r = segment_intersection::<f64>(
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            1e-9,
        );
        match r {
            SegSeg::Point { p, t, u } => {
                assert_relative_eq!(p.x, 1.0);
                assert_relative_eq!(p.y, 0.0);
                assert_relative_eq!(t, 0.5);
                assert_relative_eq!(u, 0.5);
            }
            _ => panic!("expected point, got {r:?}"),
        }
    }

    #[test]
    fn disjoint_segments() {
        let r = segment_intersection::<f64>(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            1e-9,
        );
        assert_eq!(r, SegSeg::None);
    }

    #[test]
    fn collinear_overlap_detected() {
        let r = segment_intersection::<f64>(
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(3.0, 0.0),
            1e-9,
        );
        assert_eq!(r, SegSeg::CollinearOverlap);
    }

    #[test]
    fn point_distance() {
        let d = point_segment_distance(
            Vec2::new(0.5, 0.1_f64),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
        );
        assert_relative_eq!(d, 0.1);
    }
}
