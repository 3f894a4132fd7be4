use super::{GeomError, EPS_GEO};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in the plane, world units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product; positive when `o` is CCW of `self`.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// CCW perpendicular (rotate by +90 degrees).
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn from_angle(a: f64) -> Point2 {
        Point2::new(a.cos(), a.sin())
    }

    #[inline]
    pub fn rotated(self, a: f64) -> Point2 {
        let (s, c) = a.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn scaled(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, k: f64) -> Point2 {
        self.scaled(k)
    }
}

/// Signed area of a closed vertex loop (positive for CCW).
pub fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * acc
}

/// Centroid of a polygonal region (not the vertex average).
pub fn polygon_centroid(pts: &[Point2]) -> Point2 {
    let n = pts.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.cross(q);
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let a = 0.5 * a;
    Point2::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// A simple polygon, stored CCW with positive area.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        polygon_centroid(&self.vertices)
    }

    pub fn aabb(&self) -> (Point2, Point2) {
        aabb_of(&self.vertices)
    }

    /// Applies `f` to every vertex. The mapping must preserve simplicity and
    /// orientation (translations, rotations, uniform positive scaling).
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
        }
    }
}

pub(crate) fn aabb_of(pts: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Do the open segments (a,b) and (c,d) properly cross or improperly overlap?
/// Shared endpoints between adjacent edges are handled by the caller.
fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    let eps = EPS_GEO;
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    // Collinear overlap counts as self-intersection.
    let on = |p: Point2, q: Point2, r: Point2| -> bool {
        (q - p).cross(r - p).abs() <= eps
            && r.x >= p.x.min(q.x) - eps
            && r.x <= p.x.max(q.x) + eps
            && r.y >= p.y.min(q.y) - eps
            && r.y <= p.y.max(q.y) + eps
    };
    if d1.abs() <= eps && d2.abs() <= eps {
        // Same supporting line: overlap iff projections overlap beyond a point.
        let dir = b - a;
        let t = |p: Point2| dir.dot(p - a);
        let (s0, s1) = (t(c).min(t(d)), t(c).max(t(d)));
        let (r0, r1) = (0.0f64.min(dir.norm_sq()), 0.0f64.max(dir.norm_sq()));
        return s1.min(r1) - s0.max(r0) > eps * dir.norm();
    }
    // Touching at an interior point counts too.
    (d1.abs() <= eps && on(a, b, c))
        || (d2.abs() <= eps && on(a, b, d))
        || (d3.abs() <= eps && on(c, d, a))
        || (d4.abs() <= eps && on(c, d, b))
}

/// Validates raw vertices into a normalized CCW simple [`Polygon`].
///
/// Drops duplicate consecutive vertices (tolerance 1e-9), fixes clockwise
/// orientation, and rejects self-intersecting or degenerate loops.
pub fn validate_polygon(raw: &[Point2]) -> Result<Polygon, GeomError> {
    if raw.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let mut pts: Vec<Point2> = Vec::with_capacity(raw.len());
    for &p in raw {
        if pts.last().map_or(true, |&q| (p - q).norm() > EPS_GEO) {
            pts.push(p);
        }
    }
    while pts.len() >= 2 && (pts[0] - *pts.last().unwrap()).norm() <= EPS_GEO {
        pts.pop();
    }
    if pts.len() < 3 {
        return Err(GeomError::TooFewVertices);
    }
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            // Skip edges sharing a vertex with edge i.
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(GeomError::SelfIntersecting);
            }
        }
    }
    let area = signed_area(&pts);
    if area.abs() <= EPS_GEO {
        return Err(GeomError::DegenerateArea);
    }
    if area < 0.0 {
        pts.reverse();
    }
    Ok(Polygon { vertices: pts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn accepts_ccw_square_unchanged() {
        let p = validate_polygon(&square()).unwrap();
        assert_eq!(p.vertices(), square().as_slice());
        assert!((p.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reverses_cw_square() {
        let mut cw = square();
        cw.reverse();
        let p = validate_polygon(&cw).unwrap();
        assert!(p.area() > 0.0);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn rejects_bowtie() {
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert_eq!(validate_polygon(&bowtie), Err(GeomError::SelfIntersecting));
    }

    #[test]
    fn rejects_too_few_and_degenerate() {
        assert_eq!(
            validate_polygon(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]),
            Err(GeomError::TooFewVertices)
        );
        let line = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert_eq!(validate_polygon(&line), Err(GeomError::DegenerateArea));
    }

    #[test]
    fn drops_duplicate_consecutive_vertices() {
        let mut pts = square();
        pts.insert(1, Point2::new(1.0 + 1e-12, 0.0));
        let p = validate_polygon(&pts).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn centroid_of_square() {
        let p = validate_polygon(&square()).unwrap();
        let c = p.centroid();
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 0.5).abs() < 1e-12);
    }
}
