use super::decomp::ConvexPiece;
use super::poly::Point2;
use super::EPS_GEO;

/// Minkowski sum of two convex CCW polygons by the edge-angle merge.
///
/// The result is convex CCW with at most `|p| + |q|` vertices.
pub fn minkowski_sum_convex(p: &ConvexPiece, q: &ConvexPiece) -> ConvexPiece {
    let a = reorder_lowest(p.vertices());
    let b = reorder_lowest(q.vertices());
    let (na, nb) = (a.len(), b.len());
    let mut out: Vec<Point2> = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        out.push(a[i % na] + b[j % nb]);
        let ea = a[(i + 1) % na] - a[i % na];
        let eb = b[(j + 1) % nb] - b[j % nb];
        let cr = ea.cross(eb);
        if i >= na {
            j += 1;
        } else if j >= nb {
            i += 1;
        } else if cr > EPS_GEO {
            i += 1;
        } else if cr < -EPS_GEO {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    ConvexPiece::new(compress_collinear(out))
}

/// `-P`: vertex-wise negation. A point reflection is a half-turn rotation,
/// so the loop stays CCW; only the starting vertex is re-canonicalized.
pub fn reflect_origin(p: &ConvexPiece) -> ConvexPiece {
    let v: Vec<Point2> = p.vertices().iter().map(|&pt| -pt).collect();
    ConvexPiece::new(reorder_lowest(&v))
}

/// Rotates the loop so it starts at the lexicographically lowest (y, x) vertex.
fn reorder_lowest(pts: &[Point2]) -> Vec<Point2> {
    let mut best = 0;
    for i in 1..pts.len() {
        if pts[i].y < pts[best].y || (pts[i].y == pts[best].y && pts[i].x < pts[best].x) {
            best = i;
        }
    }
    let mut v = pts.to_vec();
    v.rotate_left(best);
    v
}

fn compress_collinear(pts: Vec<Point2>) -> Vec<Point2> {
    let n = pts.len();
    if n <= 3 {
        return pts;
    }
    let mut out: Vec<Point2> = Vec::with_capacity(n);
    for i in 0..n {
        let prev = *out.last().unwrap_or(&pts[(i + n - 1) % n]);
        let cur = pts[i];
        let next = pts[(i + 1) % n];
        let e1 = cur - prev;
        let e2 = next - cur;
        if (cur - prev).norm() <= EPS_GEO {
            continue;
        }
        if e1.cross(e2).abs() <= EPS_GEO * (e1.norm() * e2.norm()).max(1.0) && e1.dot(e2) > 0.0 {
            continue;
        }
        out.push(cur);
    }
    if out.len() >= 3 {
        out
    } else {
        pts
    }
}
