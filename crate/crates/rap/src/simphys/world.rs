use super::body::RigidBody;
use crate::geom2d::Point2;

/// Contact-solver constants, echoed into reports. Box2D-like defaults.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PhysicsParams {
    pub friction: f64,
    pub restitution: f64,
    pub baumgarte: f64,
    pub slop: f64,
    pub velocity_iterations: usize,
    pub position_iterations: usize,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            friction: 0.3,
            restitution: 0.0,
            baumgarte: 0.2,
            slop: 0.005,
            velocity_iterations: 8,
            position_iterations: 3,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Contact {
    point: Point2,
    /// Unit normal pointing from body `a` toward body `b`.
    normal: Point2,
    separation: f64,
}

#[derive(Clone, Copy, Debug)]
struct VelocityConstraint {
    a: usize,
    b: usize,
    r_a: Point2,
    r_b: Point2,
    normal: Point2,
    mass_n: f64,
    mass_t: f64,
    /// Minimum admissible post-solve normal velocity (speculative closing).
    target_vn: f64,
    acc_n: f64,
    acc_t: f64,
}

/// A small rigid-body world: semi-implicit Euler, SAT clip manifolds
/// (at most two points per convex pair), sequential impulses with Coulomb
/// friction and zero restitution, and non-linear positional correction.
#[derive(Clone, Debug)]
pub struct World {
    pub bodies: Vec<RigidBody>,
    pub params: PhysicsParams,
}

impl World {
    pub fn new(bodies: Vec<RigidBody>, params: PhysicsParams) -> Self {
        Self { bodies, params }
    }

    pub fn step(&mut self, dt: f64) {
        // Integrate forces.
        for b in &mut self.bodies {
            if b.is_static {
                continue;
            }
            b.vel = b.vel + b.force.scaled(b.inv_mass * dt);
            b.omega += b.torque * b.inv_inertia * dt;
        }
        // Contact generation with a speculative margin so fast approaches
        // land on the surface instead of tunneling through it.
        let mut constraints = Vec::new();
        for i in 0..self.bodies.len() {
            for j in i + 1..self.bodies.len() {
                if self.bodies[i].is_static && self.bodies[j].is_static {
                    continue;
                }
                let rel = (self.bodies[i].vel - self.bodies[j].vel).norm()
                    + self.bodies[i].omega.abs() * self.bodies[i].radius
                    + self.bodies[j].omega.abs() * self.bodies[j].radius;
                let margin = self.params.slop + rel * dt;
                for c in pair_contacts(&self.bodies[i], &self.bodies[j], margin) {
                    constraints.push(self.prepare(i, j, &c, dt));
                }
            }
        }
        // Velocity solve.
        for _ in 0..self.params.velocity_iterations {
            for vc in &mut constraints {
                solve_velocity(&mut self.bodies, vc, self.params.friction);
            }
        }
        // Integrate velocities.
        for b in &mut self.bodies {
            if b.is_static {
                continue;
            }
            b.pos = b.pos + b.vel.scaled(dt);
            b.angle += b.omega * dt;
            b.update_cache();
        }
        // Positional correction (non-linear Gauss-Seidel on fresh manifolds).
        for _ in 0..self.params.position_iterations {
            let mut any = false;
            for i in 0..self.bodies.len() {
                for j in i + 1..self.bodies.len() {
                    if self.bodies[i].is_static && self.bodies[j].is_static {
                        continue;
                    }
                    for c in pair_contacts(&self.bodies[i], &self.bodies[j], 0.0) {
                        if c.separation < -self.params.slop {
                            self.correct_position(i, j, &c);
                            any = true;
                        }
                    }
                    if any {
                        if !self.bodies[i].is_static {
                            self.bodies[i].update_cache();
                        }
                        if !self.bodies[j].is_static {
                            self.bodies[j].update_cache();
                        }
                    }
                }
            }
            if !any {
                break;
            }
        }
        for b in &mut self.bodies {
            b.force = Point2::ZERO;
            b.torque = 0.0;
        }
    }

    fn prepare(&self, i: usize, j: usize, c: &Contact, dt: f64) -> VelocityConstraint {
        let a = &self.bodies[i];
        let b = &self.bodies[j];
        let r_a = c.point - a.pos;
        let r_b = c.point - b.pos;
        let n = c.normal;
        let t = n.perp();
        let kn = a.inv_mass
            + b.inv_mass
            + a.inv_inertia * r_a.cross(n) * r_a.cross(n)
            + b.inv_inertia * r_b.cross(n) * r_b.cross(n);
        let kt = a.inv_mass
            + b.inv_mass
            + a.inv_inertia * r_a.cross(t) * r_a.cross(t)
            + b.inv_inertia * r_b.cross(t) * r_b.cross(t);
        VelocityConstraint {
            a: i,
            b: j,
            r_a,
            r_b,
            normal: n,
            mass_n: if kn > 0.0 { 1.0 / kn } else { 0.0 },
            mass_t: if kt > 0.0 { 1.0 / kt } else { 0.0 },
            target_vn: if c.separation > 0.0 {
                -c.separation / dt
            } else {
                0.0
            },
            acc_n: 0.0,
            acc_t: 0.0,
        }
    }

    fn correct_position(&mut self, i: usize, j: usize, c: &Contact) {
        let (inv_ma, inv_ia) = (self.bodies[i].inv_mass, self.bodies[i].inv_inertia);
        let (inv_mb, inv_ib) = (self.bodies[j].inv_mass, self.bodies[j].inv_inertia);
        let r_a = c.point - self.bodies[i].pos;
        let r_b = c.point - self.bodies[j].pos;
        let n = c.normal;
        let correction = (self.params.baumgarte * (c.separation + self.params.slop))
            .clamp(-0.2, 0.0);
        let k = inv_ma
            + inv_mb
            + inv_ia * r_a.cross(n) * r_a.cross(n)
            + inv_ib * r_b.cross(n) * r_b.cross(n);
        if k <= 0.0 {
            return;
        }
        let impulse = -correction / k;
        let p = n.scaled(impulse);
        let a = &mut self.bodies[i];
        a.pos = a.pos - p.scaled(a.inv_mass);
        a.angle -= a.inv_inertia * r_a.cross(p);
        let b = &mut self.bodies[j];
        b.pos = b.pos + p.scaled(b.inv_mass);
        b.angle += b.inv_inertia * r_b.cross(p);
    }

    /// Deepest interpenetration over all body pairs (0 when separated).
    pub fn max_penetration(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.bodies.len() {
            for j in i + 1..self.bodies.len() {
                for c in pair_contacts(&self.bodies[i], &self.bodies[j], 0.0) {
                    worst = worst.max(-c.separation);
                }
            }
        }
        worst
    }
}

fn aabb_overlap(a: (Point2, Point2), b: (Point2, Point2), margin: f64) -> bool {
    a.0.x - margin <= b.1.x
        && b.0.x - margin <= a.1.x
        && a.0.y - margin <= b.1.y
        && b.0.y - margin <= a.1.y
}

fn pair_contacts(a: &RigidBody, b: &RigidBody, margin: f64) -> Vec<Contact> {
    let mut out = Vec::new();
    if !aabb_overlap(a.world_aabb(), b.world_aabb(), margin) {
        return out;
    }
    for pa in a.world_pieces() {
        for pb in b.world_pieces() {
            collide_convex(pa, pb, margin, &mut out);
        }
    }
    out
}

/// Greatest separation of `b` from `a` over `a`'s face normals.
fn max_separation(a: &[Point2], b: &[Point2]) -> (f64, usize) {
    let n = a.len();
    let mut best = f64::NEG_INFINITY;
    let mut best_edge = 0;
    for i in 0..n {
        let v0 = a[i];
        let e = a[(i + 1) % n] - v0;
        let len = e.norm();
        if len <= 1e-12 {
            continue;
        }
        let nx = e.y / len;
        let ny = -e.x / len;
        let mut min_d = f64::INFINITY;
        for q in b {
            let d = nx * (q.x - v0.x) + ny * (q.y - v0.y);
            if d < min_d {
                min_d = d;
            }
        }
        if min_d > best {
            best = min_d;
            best_edge = i;
        }
    }
    (best, best_edge)
}

/// SAT + reference-edge clipping manifold (Box2D style, at most 2 points).
fn collide_convex(a: &[Point2], b: &[Point2], margin: f64, out: &mut Vec<Contact>) {
    let (sep_a, edge_a) = max_separation(a, b);
    if sep_a > margin {
        return;
    }
    let (sep_b, edge_b) = max_separation(b, a);
    if sep_b > margin {
        return;
    }
    let (ref_poly, inc_poly, ref_edge, flip) = if sep_b > sep_a + 1e-10 {
        (b, a, edge_b, true)
    } else {
        (a, b, edge_a, false)
    };
    let n = ref_poly.len();
    let v0 = ref_poly[ref_edge];
    let v1 = ref_poly[(ref_edge + 1) % n];
    let edge = v1 - v0;
    let len = edge.norm();
    if len <= 1e-12 {
        return;
    }
    let tangent = edge.scaled(1.0 / len);
    let normal = Point2::new(tangent.y, -tangent.x); // outward for CCW
    // Incident edge: most anti-parallel on the other polygon.
    let m = inc_poly.len();
    let mut inc_i = 0;
    let mut best_dot = f64::INFINITY;
    for i in 0..m {
        let e = inc_poly[(i + 1) % m] - inc_poly[i];
        let el = e.norm();
        if el <= 1e-12 {
            continue;
        }
        let ni = Point2::new(e.y / el, -e.x / el);
        let d = ni.dot(normal);
        if d < best_dot {
            best_dot = d;
            inc_i = i;
        }
    }
    let mut p0 = inc_poly[inc_i];
    let mut p1 = inc_poly[(inc_i + 1) % m];
    // Clip to the reference edge's side planes.
    if !clip(&mut p0, &mut p1, -tangent.x, -tangent.y, -tangent.dot(v0)) {
        return;
    }
    if !clip(&mut p0, &mut p1, tangent.x, tangent.y, tangent.dot(v1)) {
        return;
    }
    for p in [p0, p1] {
        let sep = normal.dot(p - v0);
        if sep <= margin {
            out.push(Contact {
                point: p,
                normal: if flip { -normal } else { normal },
                separation: sep,
            });
        }
    }
}

/// Clips segment [p0, p1] to the half-plane `dot((dx,dy), p) <= offset`.
fn clip(p0: &mut Point2, p1: &mut Point2, dx: f64, dy: f64, offset: f64) -> bool {
    let d0 = dx * p0.x + dy * p0.y - offset;
    let d1 = dx * p1.x + dy * p1.y - offset;
    if d0 <= 0.0 && d1 <= 0.0 {
        return true;
    }
    if d0 > 0.0 && d1 > 0.0 {
        return false;
    }
    let t = d0 / (d0 - d1);
    let mid = *p0 + (*p1 - *p0).scaled(t);
    if d0 > 0.0 {
        *p0 = mid;
    } else {
        *p1 = mid;
    }
    true
}

fn solve_velocity(bodies: &mut [RigidBody], vc: &mut VelocityConstraint, friction: f64) {
    let (ai, bi) = (vc.a, vc.b);
    // Normal impulse with accumulated clamping.
    let v_rel = rel_velocity(bodies, vc);
    let vn = v_rel.dot(vc.normal);
    let lambda = -(vn - vc.target_vn) * vc.mass_n;
    let new_acc = (vc.acc_n + lambda).max(0.0);
    let delta = new_acc - vc.acc_n;
    vc.acc_n = new_acc;
    apply(bodies, ai, bi, vc, vc.normal.scaled(delta));
    // Friction clamped by the accumulated normal impulse.
    let v_rel = rel_velocity(bodies, vc);
    let t = vc.normal.perp();
    let vt = v_rel.dot(t);
    let lambda_t = -vt * vc.mass_t;
    let max_f = friction * vc.acc_n;
    let new_acc_t = (vc.acc_t + lambda_t).clamp(-max_f, max_f);
    let delta_t = new_acc_t - vc.acc_t;
    vc.acc_t = new_acc_t;
    apply(bodies, ai, bi, vc, t.scaled(delta_t));
}

#[inline]
fn rel_velocity(bodies: &[RigidBody], vc: &VelocityConstraint) -> Point2 {
    let a = &bodies[vc.a];
    let b = &bodies[vc.b];
    (b.vel + vc.r_b.perp().scaled(b.omega)) - (a.vel + vc.r_a.perp().scaled(a.omega))
}

#[inline]
fn apply(bodies: &mut [RigidBody], ai: usize, bi: usize, vc: &VelocityConstraint, p: Point2) {
    let a = &mut bodies[ai];
    a.vel = a.vel - p.scaled(a.inv_mass);
    a.omega -= a.inv_inertia * vc.r_a.cross(p);
    let b = &mut bodies[bi];
    b.vel = b.vel + p.scaled(b.inv_mass);
    b.omega += b.inv_inertia * vc.r_b.cross(p);
}
