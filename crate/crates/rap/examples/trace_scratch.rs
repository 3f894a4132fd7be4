// Scratch: inspect single-trial trajectories while tuning the controller.

use rap::blocking::{Assembly, Subassembly};
use rap::geom2d::Point2;
use rap::rng::CounterRng;
use rap::simphys::{run_trial, setup_for_masks, NoiseParams, TrialConfig};

fn sq(x: f64, y: f64, w: f64, h: f64) -> Vec<Point2> {
    vec![
        Point2::new(x, y),
        Point2::new(x + w, y),
        Point2::new(x + w, y + h),
        Point2::new(x, y + h),
    ]
}

fn main() {
    let free = Assembly::from_raw(
        "free",
        vec![
            ("m".into(), sq(0.0, 0.0, 2.0, 2.0)),
            ("s".into(), sq(7.0, 0.0, 2.0, 2.0)),
        ],
    )
    .unwrap();
    for eta in [0.0, 1.0, 3.0, 9.0] {
        let cfg = TrialConfig {
            seed: 7,
            noise: NoiseParams { eta },
            ..TrialConfig::default()
        };
        let setup = setup_for_masks(
            &free,
            Subassembly::single(0),
            Subassembly::single(1),
            std::f64::consts::PI,
            &cfg,
        );
        let mut trace = Vec::new();
        let mut rng = CounterRng::from_parts(cfg.seed, &[0]);
        let ok = run_trial(&setup, &cfg, &mut rng, Some(&mut trace));
        println!(
            "eta={eta}: success={ok} goal=({:.2},{:.2}) start=({:.2},{:.2})",
            setup.goal_pos.x, setup.goal_pos.y, setup.start_pos.x, setup.start_pos.y
        );
        for (i, row) in trace.iter().enumerate() {
            if i % 200 == 0 || i + 1 == trace.len() {
                let d = ((row.x - setup.goal_pos.x).powi(2) + (row.y - setup.goal_pos.y).powi(2))
                    .sqrt();
                println!(
                    "  t={:6.2} pos=({:7.3},{:7.3}) dist={:7.4} angle={:6.3} f=({:8.2},{:8.2})",
                    row.t, row.x, row.y, d, row.angle, row.fx, row.fy
                );
            }
        }
    }
}
