// Scratch driver for tuning simulator behavior. Not part of the deliverable
// examples; exercised manually during development.

use rap::blocking::{Assembly, Subassembly};
use rap::geom2d::Point2;
use rap::simphys::{clearance_of_setup, score_setup, setup_for_masks, TrialConfig};
use std::time::Instant;

fn sq(x: f64, y: f64, w: f64, h: f64) -> Vec<Point2> {
    vec![
        Point2::new(x, y),
        Point2::new(x + w, y),
        Point2::new(x + w, y + h),
        Point2::new(x, y + h),
    ]
}

fn main() {
    let cfg = TrialConfig {
        seed: 7,
        ..TrialConfig::default()
    };

    // 1. Free space: two unit squares far apart (10-unit world scale-ish).
    let free = Assembly::from_raw(
        "free",
        vec![
            ("m".into(), sq(0.0, 0.0, 2.0, 2.0)),
            ("s".into(), sq(7.0, 0.0, 2.0, 2.0)),
        ],
    )
    .unwrap();
    let setup = setup_for_masks(
        &free,
        Subassembly::single(0),
        Subassembly::single(1),
        std::f64::consts::PI,
        &cfg,
    );
    let t0 = Instant::now();
    let s = score_setup(&setup, &cfg);
    println!(
        "free-space: score={} ({}/{})  [{:?}] path_len={:.2}",
        s.value,
        s.successes,
        s.trials,
        t0.elapsed(),
        setup.path_len
    );

    // 2. Wall-blocked: goal behind a wall spanning the approach corridor.
    let wall = Assembly::from_raw(
        "wall",
        vec![
            ("m".into(), sq(0.0, 0.0, 2.0, 2.0)),
            ("w".into(), sq(4.0, -8.0, 1.0, 18.0)),
        ],
    )
    .unwrap();
    // Mating eastward: the wall sits between start and goal? goal is at the
    // original placement (west of wall), start further west; wall never
    // crossed. Instead aim THROUGH the wall: goal east of wall.
    let mut setup_w = setup_for_masks(
        &wall,
        Subassembly::single(0),
        Subassembly::single(1),
        std::f64::consts::PI,
        &cfg,
    );
    // Start west of the wall, goal east of it: force the corridor through.
    setup_w.goal_pos = Point2::new(8.0, 1.0);
    setup_w.start_pos = Point2::new(-2.0, 1.0);
    setup_w.path_len = 10.0;
    let s = score_setup(&setup_w, &cfg);
    println!("wall-blocked: score={} ({}/{})", s.value, s.successes, s.trials);

    // 3. Peg-in-hole with three slot widths (peg 2 wide, depth 2).
    for extra in [0.2, 0.6, 1.2] {
        let w = 2.0 + extra;
        let half = w / 2.0;
        // Slot formed by two towers on a base; peg goal is inside the slot.
        let parts = vec![
            ("peg".into(), sq(-1.0, 0.0, 2.0, 2.0)),
            ("left".into(), sq(-4.0 - half, 0.0, 4.0, 4.0)),
            ("right".into(), sq(half, 0.0, 4.0, 4.0)),
            ("base".into(), sq(-4.0 - half, -1.0, 8.0 + w, 1.0)),
        ];
        let asm = Assembly::from_raw("peg", parts).unwrap();
        let setup = setup_for_masks(
            &asm,
            Subassembly::single(0),
            Subassembly::from_mask(0b1110),
            std::f64::consts::FRAC_PI_2,
            &cfg,
        );
        let t0 = Instant::now();
        let s = score_setup(&setup, &cfg);
        println!(
            "peg-in-hole w={w:.1}: score={} ({}/{}) clearance={:.3} [{:?}]",
            s.value,
            s.successes,
            s.trials,
            clearance_of_setup(&setup, 101),
            t0.elapsed()
        );
    }

    // 4. Funnel guide: V-walls leading to the goal (low clearance).
    let funnel = Assembly::from_raw(
        "funnel",
        vec![
            ("m".into(), sq(-1.0, 0.0, 2.0, 2.0)),
            (
                "lw".into(),
                vec![
                    Point2::new(-1.2, 0.0),
                    Point2::new(-1.2, 2.2),
                    Point2::new(-4.0, 6.0),
                    Point2::new(-5.5, 6.0),
                    Point2::new(-5.5, 0.0),
                ],
            ),
            (
                "rw".into(),
                vec![
                    Point2::new(1.2, 0.0),
                    Point2::new(5.5, 0.0),
                    Point2::new(5.5, 6.0),
                    Point2::new(4.0, 6.0),
                    Point2::new(1.2, 2.2),
                ],
            ),
        ],
    )
    .unwrap();
    let setup_f = setup_for_masks(
        &funnel,
        Subassembly::single(0),
        Subassembly::from_mask(0b110),
        std::f64::consts::FRAC_PI_2,
        &cfg,
    );
    let t0 = Instant::now();
    let s = score_setup(&setup_f, &cfg);
    println!(
        "funnel: score={} ({}/{}) clearance={:.3} [{:?}]",
        s.value,
        s.successes,
        s.trials,
        clearance_of_setup(&setup_f, 101),
        t0.elapsed()
    );

    // 5. Ledge trap: goal on a narrow peak; deviations slide away.
    let trap = Assembly::from_raw(
        "trap",
        vec![
            ("m".into(), sq(-1.0, 4.0, 2.0, 2.0)),
            (
                "peak".into(),
                vec![
                    Point2::new(-6.0, 0.0),
                    Point2::new(6.0, 0.0),
                    Point2::new(1.1, 4.0),
                    Point2::new(-1.1, 4.0),
                ],
            ),
        ],
    )
    .unwrap();
    let setup_t = setup_for_masks(
        &trap,
        Subassembly::single(0),
        Subassembly::single(1),
        std::f64::consts::FRAC_PI_2,
        &cfg,
    );
    let s = score_setup(&setup_t, &cfg);
    println!(
        "peak-trap: score={} ({}/{}) clearance={:.3}",
        s.value,
        s.successes,
        s.trials,
        clearance_of_setup(&setup_t, 101)
    );
}
