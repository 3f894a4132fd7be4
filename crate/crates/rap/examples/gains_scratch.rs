// Scratch: doorway-trap and wall-glide geometry calibration.

use rap::blocking::{Assembly, Subassembly};
use rap::geom2d::Point2;
use rap::simphys::{clearance_of_setup, score_setup, setup_for_masks, ControllerParams, TrialConfig};

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
        controller: ControllerParams { kp: 5.0, kd: 2.0, k_theta: 50.0, k_omega: 10.0, v_ref: 2.0, f_max: 200.0 },
        ..TrialConfig::default()
    };

    // A: tall open approach, then full passage through a tight slit in a
    // thick wall; goal cavity below the wall.
    for (slit_w, wall_t) in [(2.05, 1.5), (2.05, 2.5), (2.1, 2.5), (2.15, 2.5), (2.3, 2.5)] {
        let half: f64 = slit_w / 2.0;
        let parts = vec![
            ("peg".into(), sq(-1.0, 0.0, 2.0, 2.0)),        // goal below wall
            ("lwall".into(), sq(-6.0, 3.0, 6.0 - half, wall_t)),
            ("rwall".into(), sq(half, 3.0, 6.0 - half, wall_t)),
            ("base".into(), sq(-6.0, -1.0, 12.0, 1.0)),
        ];
        let asm = Assembly::from_raw("door", parts).unwrap();
        let setup = setup_for_masks(&asm, Subassembly::single(0), Subassembly::from_mask(0b1110), std::f64::consts::FRAC_PI_2, &cfg);
        let s = score_setup(&setup, &cfg);
        println!("doorway w={slit_w} t={wall_t}: score={:.2} clearance={:.3} path={:.1}",
            s.value, clearance_of_setup(&setup, 301), setup.path_len);
    }

    // B: glide down along a tall wall face into a loose corner pocket.
    {
        let parts = vec![
            ("m".into(), sq(0.0, 0.0, 2.0, 2.0)),
            ("wall".into(), sq(2.1, 0.0, 1.0, 9.0)),   // tall wall right of goal
            ("base".into(), sq(-4.0, -1.0, 8.0, 1.0)), // floor under goal
        ];
        let asm = Assembly::from_raw("glide", parts).unwrap();
        let setup = setup_for_masks(&asm, Subassembly::single(0), Subassembly::from_mask(0b110), std::f64::consts::FRAC_PI_2, &cfg);
        let s = score_setup(&setup, &cfg);
        println!("wall-glide: score={:.2} clearance={:.3} path={:.1}",
            s.value, clearance_of_setup(&setup, 301), setup.path_len);
    }
}
