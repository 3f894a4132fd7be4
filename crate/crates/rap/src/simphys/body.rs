use crate::geom2d::{Point2, Shape};

/// A rigid body built from convex pieces. Dynamic bodies keep their local
/// frame at the compound centroid; static bodies keep world coordinates with
/// an identity pose and never move.
#[derive(Clone, Debug)]
pub struct RigidBody {
    /// Convex loops in the body frame.
    pieces: Vec<Vec<Point2>>,
    pub pos: Point2,
    pub angle: f64,
    pub vel: Point2,
    pub omega: f64,
    pub force: Point2,
    pub torque: f64,
    pub mass: f64,
    pub inertia: f64,
    pub inv_mass: f64,
    pub inv_inertia: f64,
    pub is_static: bool,
    /// Radius of the enclosing circle around the body origin.
    pub radius: f64,
    /// World-space piece cache, valid after `update_cache`.
    world_pieces: Vec<Vec<Point2>>,
    world_aabb: (Point2, Point2),
}

impl RigidBody {
    /// Builds a body from shapes at their world placements (unit density).
    /// A dynamic body is re-rooted at its compound centroid.
    pub fn from_shapes<'a>(shapes: impl IntoIterator<Item = &'a Shape>, is_static: bool) -> Self {
        let shapes: Vec<&Shape> = shapes.into_iter().collect();
        let mut area = 0.0;
        let mut weighted = Point2::ZERO;
        for s in &shapes {
            let a = s.area();
            area += a;
            let c = s.source().centroid();
            weighted = weighted + c.scaled(a);
        }
        let centroid = weighted.scaled(1.0 / area);
        let origin = if is_static { Point2::ZERO } else { centroid };
        let mut pieces = Vec::new();
        let mut inertia_origin = 0.0;
        for s in &shapes {
            for p in s.pieces() {
                let local: Vec<Point2> = p.vertices().iter().map(|&v| v - origin).collect();
                inertia_origin += polygon_inertia_about_origin(&local);
                pieces.push(local);
            }
        }
        let mass = area; // density 1
        let inertia = inertia_origin; // already about the body origin
        let radius = pieces
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        let mut body = Self {
            pieces,
            pos: origin,
            angle: 0.0,
            vel: Point2::ZERO,
            omega: 0.0,
            force: Point2::ZERO,
            torque: 0.0,
            mass,
            inertia,
            inv_mass: if is_static { 0.0 } else { 1.0 / mass },
            inv_inertia: if is_static { 0.0 } else { 1.0 / inertia },
            is_static,
            radius,
            world_pieces: Vec::new(),
            world_aabb: (Point2::ZERO, Point2::ZERO),
        };
        body.update_cache();
        body
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn update_cache(&mut self) {
        let (s, c) = self.angle.sin_cos();
        let rot = |v: Point2| Point2::new(c * v.x - s * v.y, s * v.x + c * v.y) + self.pos;
        self.world_pieces = self
            .pieces
            .iter()
            .map(|p| p.iter().map(|&v| rot(v)).collect())
            .collect();
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.world_pieces {
            for v in p {
                lo.x = lo.x.min(v.x);
                lo.y = lo.y.min(v.y);
                hi.x = hi.x.max(v.x);
                hi.y = hi.y.max(v.y);
            }
        }
        self.world_aabb = (lo, hi);
    }

    pub fn world_pieces(&self) -> &[Vec<Point2>] {
        &self.world_pieces
    }

    pub fn world_aabb(&self) -> (Point2, Point2) {
        self.world_aabb
    }

    /// Velocity of the material point at world position `p`.
    #[inline]
    pub fn velocity_at(&self, p: Point2) -> Point2 {
        let r = p - self.pos;
        self.vel + r.perp().scaled(self.omega)
    }
}

/// Second moment of area of a CCW polygon about the coordinate origin
/// (density 1): the standard shoelace-style accumulation.
fn polygon_inertia_about_origin(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.cross(q);
        acc += w * (p.dot(p) + p.dot(q) + q.dot(q));
    }
    acc / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{convex_decompose, validate_polygon};

    fn square_shape(x: f64, y: f64, w: f64, h: f64) -> Shape {
        let p = validate_polygon(&[
            Point2::new(x, y),
            Point2::new(x + w, y),
            Point2::new(x + w, y + h),
            Point2::new(x, y + h),
        ])
        .unwrap();
        convex_decompose(&p)
    }

    #[test]
    fn unit_square_mass_properties() {
        let s = square_shape(3.0, 5.0, 1.0, 1.0);
        let b = RigidBody::from_shapes([&s], false);
        assert!((b.mass - 1.0).abs() < 1e-12);
        assert!((b.pos.x - 3.5).abs() < 1e-12 && (b.pos.y - 5.5).abs() < 1e-12);
        // Unit square about its centroid: I = (w^2 + h^2) m / 12 = 1/6.
        assert!((b.inertia - 1.0 / 6.0).abs() < 1e-9, "I={}", b.inertia);
    }

    #[test]
    fn compound_body_mass_adds() {
        let s1 = square_shape(0.0, 0.0, 1.0, 1.0);
        let s2 = square_shape(1.0, 0.0, 1.0, 1.0);
        let b = RigidBody::from_shapes([&s1, &s2], false);
        assert!((b.mass - 2.0).abs() < 1e-12);
        assert!((b.pos.x - 1.0).abs() < 1e-12);
        // 2x1 rectangle about centroid: m (w^2+h^2)/12 = 2*(4+1)/12 = 5/6.
        assert!((b.inertia - 5.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn static_body_keeps_world_frame() {
        let s = square_shape(2.0, 2.0, 1.0, 1.0);
        let b = RigidBody::from_shapes([&s], true);
        assert_eq!(b.pos, Point2::ZERO);
        assert_eq!(b.inv_mass, 0.0);
        let (lo, hi) = b.world_aabb();
        assert!((lo.x - 2.0).abs() < 1e-12 && (hi.x - 3.0).abs() < 1e-12);
    }
}
