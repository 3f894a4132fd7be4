use super::body::RigidBody;
use super::trial::OperationSetup;
use crate::geom2d::{wrap_angle, Point2};
use crate::rng::CounterRng;

/// Proportional path-tracking gains. Forces are mass-normalized
/// (accelerations), so one set of gains covers bodies of any size.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ControllerParams {
    /// Proportional gain, 1/s^2.
    pub kp: f64,
    /// Damping gain, 1/s.
    pub kd: f64,
    /// Angular proportional gain, 1/s^2.
    pub k_theta: f64,
    /// Angular damping gain, 1/s.
    pub k_omega: f64,
    /// Reference-point speed along the path, units/s.
    pub v_ref: f64,
    /// Force clamp per unit mass, units/s^2.
    pub f_max: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        // Noise scales with the commanded force, so the loop is only stable
        // for soft gains at eta = 9; these keep free-space tracking reliable
        // while tight insertions still fail under noise.
        Self {
            kp: 5.0,
            kd: 2.0,
            k_theta: 50.0,
            k_omega: 10.0,
            v_ref: 2.0,
            f_max: 200.0,
        }
    }
}

/// Perpendicular actuation-noise amplitude, dimensionless.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NoiseParams {
    pub eta: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { eta: 9.0 }
    }
}

/// PD wrench tracking the straight reference path of `setup` at time `t_now`.
///
/// The reference point moves from the start pose toward the goal at `v_ref`
/// and stops there; force is clamped to `mass * f_max`. Rotational force only
/// corrects the orientation (PD about the goal angle).
pub fn control_wrench(
    body: &RigidBody,
    setup: &OperationSetup,
    t_now: f64,
    params: &ControllerParams,
) -> (Point2, f64) {
    let along = (params.v_ref * t_now).min(setup.path_len);
    let reference = setup.start_pos + setup.path_unit().scaled(along);
    let mut force =
        ((reference - body.pos).scaled(params.kp) - body.vel.scaled(params.kd)).scaled(body.mass);
    let fmax = body.mass * params.f_max;
    let mag = force.norm();
    if mag > fmax {
        force = force.scaled(fmax / mag);
    }
    let ang_err = wrap_angle(body.angle - setup.goal_angle);
    let torque = body.inertia * (-params.k_theta * ang_err - params.k_omega * body.omega);
    (force, torque)
}

/// Adds the uniform perpendicular noise component: `f + u * perp(f)/|f|`,
/// `u ~ U[-eta*|f|, eta*|f|]`. Zero force stays zero. Returns the noisy
/// force and the drawn `u` (for traces). Draws exactly one value.
pub fn perturb_force(f: Point2, noise: &NoiseParams, rng: &mut CounterRng) -> (Point2, f64) {
    let mag = f.norm();
    let u = rng.uniform(-noise.eta * mag, noise.eta * mag);
    if mag <= 0.0 {
        return (Point2::ZERO, 0.0);
    }
    let n_hat = f.perp().scaled(1.0 / mag);
    (f + n_hat.scaled(u), u)
}
