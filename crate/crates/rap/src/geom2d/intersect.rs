use super::decomp::Shape;
use super::poly::Point2;
use super::EPS_GEO;

/// Strict separating-axis test on translated convex loops. Returns `true`
/// only when the open interiors overlap; shared boundary is not intersection.
pub fn convex_interiors_intersect(
    a: &[Point2],
    ta: Point2,
    b: &[Point2],
    tb: Point2,
    tol: f64,
) -> bool {
    !has_separating_axis(a, ta, b, tb, tol)
}

fn has_separating_axis(a: &[Point2], ta: Point2, b: &[Point2], tb: Point2, tol: f64) -> bool {
    axis_separated(a, ta, b, tb, tol) || axis_separated(b, tb, a, ta, tol)
}

/// Tries the edge normals of `a` as separating axes.
fn axis_separated(a: &[Point2], ta: Point2, b: &[Point2], tb: Point2, tol: f64) -> bool {
    let n = a.len();
    for i in 0..n {
        let e = a[(i + 1) % n] - a[i];
        let len = e.norm();
        if len <= EPS_GEO {
            continue;
        }
        // Outward normal of a CCW loop.
        let nx = e.y / len;
        let ny = -e.x / len;
        let face = nx * (a[i].x + ta.x) + ny * (a[i].y + ta.y);
        let mut min_b = f64::INFINITY;
        for q in b {
            let d = nx * (q.x + tb.x) + ny * (q.y + tb.y);
            if d < min_b {
                min_b = d;
            }
        }
        if min_b >= face - tol {
            return true;
        }
    }
    false
}

/// Is `p` inside the closed convex loop (within `tol`)?
pub fn convex_contains_point(poly: &[Point2], p: Point2, tol: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let e = poly[(i + 1) % n] - poly[i];
        let len = e.norm();
        if len <= EPS_GEO {
            continue;
        }
        if e.cross(p - poly[i]) / len < -tol {
            return false;
        }
    }
    true
}

/// Is `p` in the open interior, by at least `margin`?
pub fn convex_strictly_contains(poly: &[Point2], p: Point2, margin: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let e = poly[(i + 1) % n] - poly[i];
        let len = e.norm();
        if len <= EPS_GEO {
            continue;
        }
        if e.cross(p - poly[i]) / len <= margin {
            return false;
        }
    }
    true
}

/// Euclidean distance between two translated convex loops as closed sets.
pub fn convex_distance(a: &[Point2], ta: Point2, b: &[Point2], tb: Point2) -> f64 {
    if convex_interiors_intersect(a, ta, b, tb, 0.0) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let na = a.len();
    let nb = b.len();
    for i in 0..na {
        let p = a[i] + ta;
        for j in 0..nb {
            let q0 = b[j] + tb;
            let q1 = b[(j + 1) % nb] + tb;
            best = best.min(point_segment_distance(p, q0, q1));
        }
    }
    for j in 0..nb {
        let p = b[j] + tb;
        for i in 0..na {
            let q0 = a[i] + ta;
            let q1 = a[(i + 1) % na] + ta;
            best = best.min(point_segment_distance(p, q0, q1));
        }
    }
    best
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sq();
    if denom <= EPS_GEO * EPS_GEO {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / denom).clamp(0.0, 1.0);
    (p - (a + ab.scaled(t))).norm()
}

#[inline]
fn aabbs_disjoint(a: &Shape, ta: Point2, b: &Shape, tb: Point2, pad: f64) -> bool {
    let (alo, ahi) = a.aabb();
    let (blo, bhi) = b.aabb();
    ahi.x + ta.x + pad < blo.x + tb.x
        || bhi.x + tb.x + pad < alo.x + ta.x
        || ahi.y + ta.y + pad < blo.y + tb.y
        || bhi.y + tb.y + pad < alo.y + ta.y
}

/// Do the open interiors of two translated shapes overlap?
/// Contact and sliding (shared boundary) is not intersection.
pub fn interiors_intersect(a: &Shape, ta: Point2, b: &Shape, tb: Point2) -> bool {
    if aabbs_disjoint(a, ta, b, tb, EPS_GEO) {
        return false;
    }
    for pa in a.pieces() {
        for pb in b.pieces() {
            let (alo, ahi) = pa.aabb();
            let (blo, bhi) = pb.aabb();
            if ahi.x + ta.x + EPS_GEO < blo.x + tb.x
                || bhi.x + tb.x + EPS_GEO < alo.x + ta.x
                || ahi.y + ta.y + EPS_GEO < blo.y + tb.y
                || bhi.y + tb.y + EPS_GEO < alo.y + ta.y
            {
                continue;
            }
            if convex_interiors_intersect(pa.vertices(), ta, pb.vertices(), tb, EPS_GEO) {
                return true;
            }
        }
    }
    false
}

/// Euclidean distance between two translated shapes as closed sets;
/// zero iff they touch or overlap.
pub fn shape_distance(a: &Shape, ta: Point2, b: &Shape, tb: Point2) -> f64 {
    let mut best = f64::INFINITY;
    for pa in a.pieces() {
        for pb in b.pieces() {
            let d = convex_distance(pa.vertices(), ta, pb.vertices(), tb);
            if d < best {
                best = d;
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{convex_decompose, validate_polygon};
    use crate::rng::CounterRng;

    fn square_at(x: f64, y: f64) -> Shape {
        let p = validate_polygon(&[
            Point2::new(x, y),
            Point2::new(x + 1.0, y),
            Point2::new(x + 1.0, y + 1.0),
            Point2::new(x, y + 1.0),
        ])
        .unwrap();
        convex_decompose(&p)
    }

    #[test]
    fn shared_edge_is_not_intersection() {
        let a = square_at(0.0, 0.0);
        let b = square_at(1.0, 0.0);
        assert!(!interiors_intersect(&a, Point2::ZERO, &b, Point2::ZERO));
        assert_eq!(shape_distance(&a, Point2::ZERO, &b, Point2::ZERO), 0.0);
    }

    #[test]
    fn overlap_by_tenth_intersects() {
        let a = square_at(0.0, 0.0);
        let b = square_at(0.9, 0.0);
        assert!(interiors_intersect(&a, Point2::ZERO, &b, Point2::ZERO));
        assert_eq!(shape_distance(&a, Point2::ZERO, &b, Point2::ZERO), 0.0);
    }

    #[test]
    fn half_apart_is_clear() {
        let a = square_at(0.0, 0.0);
        let b = square_at(1.5, 0.0);
        assert!(!interiors_intersect(&a, Point2::ZERO, &b, Point2::ZERO));
        let d = shape_distance(&a, Point2::ZERO, &b, Point2::ZERO);
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_gap_is_sqrt_two() {
        // Second square offset (1,1) beyond the corner: corner-to-corner gap.
        let a = square_at(0.0, 0.0);
        let b = square_at(2.0, 2.0);
        let d = shape_distance(&a, Point2::ZERO, &b, Point2::ZERO);
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-9, "d={d}");
        // Brute-force oracle over densely sampled boundary point pairs.
        let mut oracle = f64::INFINITY;
        let steps = 200;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let pa = Point2::new(1.0, t); // right edge of a near corner
            let pa2 = Point2::new(t, 1.0); // top edge
            for j in 0..=steps {
                let s = j as f64 / steps as f64;
                let pb = Point2::new(2.0, 2.0 + s);
                let pb2 = Point2::new(2.0 + s, 2.0);
                for &u in &[pa, pa2] {
                    for &v in &[pb, pb2] {
                        oracle = oracle.min((u - v).norm());
                    }
                }
            }
        }
        assert!((d - oracle).abs() < 1e-6);
    }

    #[test]
    fn symmetric_and_translation_invariant() {
        let mut rng = CounterRng::new(99);
        let a = square_at(0.0, 0.0);
        let b = square_at(1.3, 0.7);
        for _ in 0..50 {
            let t = Point2::new(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
            let ab = interiors_intersect(&a, t, &b, t);
            let ba = interiors_intersect(&b, t, &a, t);
            assert_eq!(ab, ba);
            let d0 = shape_distance(&a, Point2::ZERO, &b, Point2::ZERO);
            let d1 = shape_distance(&a, t, &b, t);
            assert!((d0 - d1).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_zero_iff_not_separated() {
        let a = square_at(0.0, 0.0);
        for dx in [0.0, 0.5, 0.999, 1.0, 1.001, 1.7] {
            let b = square_at(dx, 0.0);
            let d = shape_distance(&a, Point2::ZERO, &b, Point2::ZERO);
            let touching_or_less = dx <= 1.0 + 1e-12;
            assert_eq!(d == 0.0, touching_or_less, "dx={dx} d={d}");
        }
    }

    #[test]
    fn moving_one_shape_changes_distance_lipschitz() {
        let mut rng = CounterRng::new(123);
        let a = square_at(0.0, 0.0);
        let b = square_at(3.0, 1.0);
        let d0 = shape_distance(&a, Point2::ZERO, &b, Point2::ZERO);
        for _ in 0..100 {
            let v = Point2::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            let d1 = shape_distance(&a, Point2::ZERO, &b, v);
            assert!((d1 - d0).abs() <= v.norm() + 1e-9);
        }
    }
}
