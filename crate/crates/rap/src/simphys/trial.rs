use super::body::RigidBody;
use super::controller::{control_wrench, perturb_force, ControllerParams, NoiseParams};
use super::world::{PhysicsParams, World};
use crate::blocking::{Assembly, Partition, Subassembly};
use crate::geom2d::{norm_angle, shape_distance, wrap_angle, Point2, Shape};
use crate::rng::CounterRng;
use rayon::prelude::*;
use serde::Serialize;

/// Everything one Monte Carlo evaluation needs. All values are config, not
/// hard-coded: they assume the normalized 10-unit world.
#[derive(Clone, Debug, Serialize)]
pub struct TrialConfig {
    pub dt: f64,
    pub max_steps: usize,
    pub trials: usize,
    /// Start gap beyond bounding-box clearance along the motion, world units.
    pub d0: f64,
    pub eps_pos: f64,
    pub eps_rot: f64,
    pub seed: u64,
    pub controller: ControllerParams,
    pub noise: NoiseParams,
    pub physics: PhysicsParams,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 60.0,
            max_steps: 2000,
            trials: 100,
            d0: 1.0,
            eps_pos: 0.05,
            eps_rot: 2f64.to_radians(),
            seed: 0,
            controller: ControllerParams::default(),
            noise: NoiseParams::default(),
            physics: PhysicsParams::default(),
        }
    }
}

/// Monte Carlo success fraction of one assembly operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustnessScore {
    pub value: f64,
    pub successes: usize,
    pub trials: usize,
}

/// A fully placed single-operation scene: the static subassembly at its
/// assembly pose, the moving one approaching from a separated start pose
/// along a straight path.
#[derive(Clone, Debug)]
pub struct OperationSetup {
    pub static_shapes: Vec<Shape>,
    pub moving_shapes: Vec<Shape>,
    /// Goal position of the moving body's centroid.
    pub goal_pos: Point2,
    pub goal_angle: f64,
    pub start_pos: Point2,
    pub path_len: f64,
    /// Direction of the mating motion (start -> goal), radians.
    pub mating_dir: f64,
}

impl OperationSetup {
    pub fn path_unit(&self) -> Point2 {
        if self.path_len.abs() <= 1e-12 {
            Point2::from_angle(self.mating_dir)
        } else {
            (self.goal_pos - self.start_pos).scaled(1.0 / self.path_len)
        }
    }
}

/// Places the moving subassembly for the trial start: the goal pose is
/// translated back along the mating direction by the minimal `t` that leaves
/// a gap of exactly `d0` between the direction-aligned bounding boxes.
pub fn make_operation_setup(a: &Assembly, p: &Partition, cfg: &TrialConfig) -> OperationSetup {
    setup_for_masks(a, p.s1, p.s2, p.direction, cfg)
}

/// Same, from raw masks and a disassembly (escape) direction.
pub fn setup_for_masks(
    a: &Assembly,
    s1: Subassembly,
    s2: Subassembly,
    escape_dir: f64,
    cfg: &TrialConfig,
) -> OperationSetup {
    let mating = norm_angle(escape_dir + std::f64::consts::PI);
    let e = Point2::from_angle(mating);
    let moving_shapes: Vec<Shape> = s1
        .iter()
        .filter(|&i| i < a.len())
        .map(|i| a.parts()[i].shape.clone())
        .collect();
    let static_shapes: Vec<Shape> = s2
        .iter()
        .filter(|&i| i < a.len())
        .map(|i| a.parts()[i].shape.clone())
        .collect();
    let proj = |shapes: &[Shape], unit: Point2| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in shapes {
            for piece in s.pieces() {
                for v in piece.vertices() {
                    let d = v.dot(unit);
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        (lo, hi)
    };
    let (_, moving_hi) = proj(&moving_shapes, e);
    let (static_lo, _) = proj(&static_shapes, e);
    let t = moving_hi - static_lo + cfg.d0;
    // Goal position: compound centroid of the moving shapes.
    let mut area = 0.0;
    let mut weighted = Point2::ZERO;
    for s in &moving_shapes {
        let w = s.area();
        area += w;
        weighted = weighted + s.source().centroid().scaled(w);
    }
    let goal_pos = weighted.scaled(1.0 / area);
    let start_pos = goal_pos - e.scaled(t);
    OperationSetup {
        static_shapes,
        moving_shapes,
        goal_pos,
        goal_angle: 0.0,
        start_pos,
        path_len: t.abs(),
        mating_dir: mating,
    }
}

/// One step of a trial trace.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub angle: f64,
    pub fx: f64,
    pub fy: f64,
    pub noise_u: f64,
}

/// Runs one noisy trial. Success as soon as the moving body is within
/// `eps_pos` / `eps_rot` of the goal pose. Deterministic given the RNG
/// stream: one noise draw per control step, keyed by the step index.
pub fn run_trial(
    setup: &OperationSetup,
    cfg: &TrialConfig,
    rng: &mut CounterRng,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> bool {
    let static_body = RigidBody::from_shapes(setup.static_shapes.iter(), true);
    let mut moving = RigidBody::from_shapes(setup.moving_shapes.iter(), false);
    moving.pos = setup.start_pos;
    moving.update_cache();
    let mut world = World::new(vec![static_body, moving], cfg.physics);
    for step in 0..cfg.max_steps {
        let t_now = step as f64 * cfg.dt;
        let (f, tau) = control_wrench(&world.bodies[1], setup, t_now, &cfg.controller);
        let (f, u) = perturb_force(f, &cfg.noise, rng);
        world.bodies[1].force = f;
        world.bodies[1].torque = tau;
        world.step(cfg.dt);
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TraceRow {
                t: t_now + cfg.dt,
                x: world.bodies[1].pos.x,
                y: world.bodies[1].pos.y,
                angle: world.bodies[1].angle,
                fx: f.x,
                fy: f.y,
                noise_u: u,
            });
        }
        let pos_ok = (world.bodies[1].pos - setup.goal_pos).norm() <= cfg.eps_pos;
        let rot_ok = wrap_angle(world.bodies[1].angle - setup.goal_angle).abs() <= cfg.eps_rot;
        if pos_ok && rot_ok {
            return true;
        }
    }
    false
}

/// Monte Carlo score of a prepared setup: `cfg.trials` independent trials
/// with per-trial streams `hash(seed, trial)`, evaluated in parallel. The
/// count of successes is order-independent, so the score is bit-stable.
pub fn score_setup(setup: &OperationSetup, cfg: &TrialConfig) -> RobustnessScore {
    let successes = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = CounterRng::from_parts(cfg.seed, &[trial as u64]);
            run_trial(setup, cfg, &mut rng, None) as usize
        })
        .sum();
    RobustnessScore {
        value: successes as f64 / cfg.trials as f64,
        successes,
        trials: cfg.trials,
    }
}

/// Scores a partition of an assembly (builds the setup, then simulates).
pub fn robustness_score(a: &Assembly, p: &Partition, cfg: &TrialConfig) -> RobustnessScore {
    let setup = make_operation_setup(a, p, cfg);
    score_setup(&setup, cfg)
}

/// Analytic baseline: the average minimum distance between the two
/// subassemblies over `samples` equally spaced poses along the mating path.
pub fn clearance_score(a: &Assembly, p: &Partition, cfg: &TrialConfig, samples: usize) -> f64 {
    let setup = make_operation_setup(a, p, cfg);
    clearance_of_setup(&setup, samples)
}

pub fn clearance_of_setup(setup: &OperationSetup, samples: usize) -> f64 {
    debug_assert!(samples >= 2);
    let mut acc = 0.0;
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let pos = setup.start_pos + (setup.goal_pos - setup.start_pos).scaled(t);
        let offset = pos - setup.goal_pos;
        let mut min_d = f64::INFINITY;
        for ms in &setup.moving_shapes {
            for ss in &setup.static_shapes {
                min_d = min_d.min(shape_distance(ms, offset, ss, Point2::ZERO));
                if min_d == 0.0 {
                    break;
                }
            }
        }
        acc += min_d;
    }
    acc / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::validate_polygon;

    fn asm_two_squares_vertical() -> Assembly {
        // Moving square [0,1]^2, static square [0,1] x [2,3]: identical
        // extents along the x axis.
        let sq = |x: f64, y: f64| {
            validate_polygon(&[
                Point2::new(x, y),
                Point2::new(x + 1.0, y),
                Point2::new(x + 1.0, y + 1.0),
                Point2::new(x, y + 1.0),
            ])
            .unwrap()
        };
        Assembly::new(
            "pair",
            vec![("m".into(), sq(0.0, 0.0)), ("s".into(), sq(0.0, 2.0))],
        )
        .unwrap()
    }

    #[test]
    fn start_offset_is_extent_overlap_plus_gap() {
        let a = asm_two_squares_vertical();
        let cfg = TrialConfig {
            d0: 1.0,
            ..TrialConfig::default()
        };
        // Mating along +x (escape_dir pi means mating 0).
        let setup = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        // Moving extent on x: [0,1], static extent: [0,1]; t = 1 - 0 + 1 = 2.
        assert!((setup.path_len - 2.0).abs() < 1e-9, "t={}", setup.path_len);
        assert!((setup.start_pos.x - (0.5 - 2.0)).abs() < 1e-9);
        assert!((setup.start_pos.y - 0.5).abs() < 1e-9);
    }

    #[test]
    fn mirrored_direction_mirrors_offset() {
        let a = asm_two_squares_vertical();
        let cfg = TrialConfig::default();
        let east = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        let west = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            0.0,
            &cfg,
        );
        assert!((east.start_pos.x - 0.5 + east.path_len).abs() < 1e-9);
        assert!((west.start_pos.x - 0.5 - west.path_len).abs() < 1e-9);
        assert!((east.path_len - west.path_len).abs() < 1e-9);
    }

    #[test]
    fn compound_moving_subassembly_uses_union_bbox() {
        let sq = |x: f64, y: f64| {
            validate_polygon(&[
                Point2::new(x, y),
                Point2::new(x + 1.0, y),
                Point2::new(x + 1.0, y + 1.0),
                Point2::new(x, y + 1.0),
            ])
            .unwrap()
        };
        let a = Assembly::new(
            "three",
            vec![
                ("m1".into(), sq(0.0, 0.0)),
                ("m2".into(), sq(1.0, 0.0)),
                ("s".into(), sq(3.0, 0.0)),
            ],
        )
        .unwrap();
        let cfg = TrialConfig::default();
        let setup = setup_for_masks(
            &a,
            Subassembly::from_mask(0b011),
            Subassembly::single(2),
            std::f64::consts::PI,
            &cfg,
        );
        // Moving union extent on x: [0,2] -> hi = 2; static lo = 3;
        // t = 2 - 3 + 1 = 0: union bbox already exactly d0 away.
        assert!(setup.path_len.abs() < 1e-9, "t={}", setup.path_len);
    }

    #[test]
    fn same_seed_reproduces_trajectory() {
        let a = asm_two_squares_vertical();
        let cfg = TrialConfig {
            max_steps: 200,
            ..TrialConfig::default()
        };
        let setup = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        let mut r1 = CounterRng::from_parts(9, &[0]);
        let mut r2 = CounterRng::from_parts(9, &[0]);
        let s1 = run_trial(&setup, &cfg, &mut r1, Some(&mut t1));
        let s2 = run_trial(&setup, &cfg, &mut r2, Some(&mut t2));
        assert_eq!(s1, s2);
        assert_eq!(t1.len(), t2.len());
        for (a, b) in t1.iter().zip(t2.iter()) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.angle.to_bits(), b.angle.to_bits());
        }
    }

    #[test]
    fn score_is_success_fraction_and_deterministic() {
        let a = asm_two_squares_vertical();
        let cfg = TrialConfig {
            trials: 8,
            max_steps: 600,
            seed: 42,
            ..TrialConfig::default()
        };
        let setup = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        let s1 = score_setup(&setup, &cfg);
        let s2 = score_setup(&setup, &cfg);
        assert_eq!(s1, s2);
        assert_eq!(s1.trials, 8);
        assert!((s1.value - s1.successes as f64 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn trial_order_independence() {
        let a = asm_two_squares_vertical();
        let cfg = TrialConfig {
            trials: 6,
            max_steps: 400,
            seed: 5,
            ..TrialConfig::default()
        };
        let setup = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        let forward: Vec<bool> = (0..cfg.trials)
            .map(|t| {
                let mut rng = CounterRng::from_parts(cfg.seed, &[t as u64]);
                run_trial(&setup, &cfg, &mut rng, None)
            })
            .collect();
        let mut backward: Vec<bool> = (0..cfg.trials)
            .rev()
            .map(|t| {
                let mut rng = CounterRng::from_parts(cfg.seed, &[t as u64]);
                run_trial(&setup, &cfg, &mut rng, None)
            })
            .collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }

    #[test]
    fn clearance_constant_gap() {
        // Hand-built setup: the moving square slides parallel to a tall wall
        // with a constant gap of 2, so the average distance is exactly 2.
        let shape = |pts: &[(f64, f64)]| {
            crate::geom2d::convex_decompose(
                &validate_polygon(&pts.iter().map(|&(x, y)| Point2::new(x, y)).collect::<Vec<_>>())
                    .unwrap(),
            )
        };
        let moving = shape(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let wall = shape(&[(3.0, -8.0), (4.0, -8.0), (4.0, 8.0), (3.0, 8.0)]);
        let setup = OperationSetup {
            static_shapes: vec![wall],
            moving_shapes: vec![moving],
            goal_pos: Point2::new(0.5, 0.5),
            goal_angle: 0.0,
            start_pos: Point2::new(0.5, 5.5),
            path_len: 5.0,
            mating_dir: -std::f64::consts::FRAC_PI_2,
        };
        let c = clearance_of_setup(&setup, 301);
        assert!((c - 2.0).abs() < 1e-9, "clearance={c}");
    }

    #[test]
    fn clearance_linear_decrease_averages_half() {
        // Distance decreasing linearly from 3 to 0 must average 1.5.
        let sq = |x: f64, y: f64| {
            validate_polygon(&[
                Point2::new(x, y),
                Point2::new(x + 1.0, y),
                Point2::new(x + 1.0, y + 1.0),
                Point2::new(x, y + 1.0),
            ])
            .unwrap()
        };
        let a = Assembly::new(
            "approach",
            vec![("m".into(), sq(0.0, 0.0)), ("s".into(), sq(1.0, 0.0))],
        )
        .unwrap();
        let cfg = TrialConfig {
            d0: 3.0,
            ..TrialConfig::default()
        };
        // Moving square mates eastward into contact with the static square.
        let setup = setup_for_masks(
            &a,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        assert!((setup.path_len - 3.0).abs() < 1e-9);
        let c = clearance_of_setup(&setup, 301);
        assert!((c - 1.5).abs() < 0.01, "clearance={c}");
    }
}
