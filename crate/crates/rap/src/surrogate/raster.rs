use crate::blocking::{Assembly, Partition};
use crate::geom2d::Point2;
use crate::simphys::{make_operation_setup, OperationSetup, TrialConfig};

pub const IMG_SIZE: usize = 64;
/// Values per image pair: 2 channels of 64x64.
pub const IMG_PIXELS: usize = 2 * IMG_SIZE * IMG_SIZE;
const MARGIN: f64 = 4.0;
const STATIC_INTENSITY: f32 = 0.5;
const MOVING_INTENSITY: f32 = 1.0;

/// A 2-channel grayscale raster: channel 0 is the start scene (subassemblies
/// separated), channel 1 the goal scene (assembled). Intensities in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct ImagePair {
    /// Channel-major `[2][64][64]`.
    pub data: Vec<f32>,
}

impl ImagePair {
    pub fn channel(&self, i: usize) -> &[f32] {
        &self.data[i * IMG_SIZE * IMG_SIZE..(i + 1) * IMG_SIZE * IMG_SIZE]
    }

    pub fn at(&self, channel: usize, row: usize, col: usize) -> f32 {
        self.data[channel * IMG_SIZE * IMG_SIZE + row * IMG_SIZE + col]
    }
}

/// Rasterizes the operation of a partition: the scene is rotated so the
/// mating motion points straight down in the image, fitted (shared across
/// both channels) into the frame with a 4-pixel margin, and filled by
/// scanline with pixel-center sampling. The moving subassembly renders at
/// intensity 1.0, the static one at 0.5, background 0.
pub fn rasterize(a: &Assembly, p: &Partition, cfg: &TrialConfig) -> ImagePair {
    rasterize_setup(&make_operation_setup(a, p, cfg))
}

pub fn rasterize_setup(setup: &OperationSetup) -> ImagePair {
    // Rotate the whole scene so the mating direction maps to straight down
    // (image rows grow downward; the y-flip below turns math angle 270 into
    // screen-down).
    let rho = -std::f64::consts::FRAC_PI_2 - setup.mating_dir;
    let rot = |p: Point2| p.rotated(rho);
    let start_offset = setup.start_pos - setup.goal_pos;

    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |p: Point2| {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    };
    for s in &setup.static_shapes {
        for v in s.source().vertices() {
            grow(rot(*v));
        }
    }
    for s in &setup.moving_shapes {
        for v in s.source().vertices() {
            grow(rot(*v));
            grow(rot(*v + start_offset));
        }
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (IMG_SIZE as f64 - 2.0 * MARGIN) / span;
    let cx = 0.5 * (lo.x + hi.x);
    let cy = 0.5 * (lo.y + hi.y);
    let half = IMG_SIZE as f64 / 2.0;
    let to_px = move |p: Point2| -> (f64, f64) {
        let r = p.rotated(rho);
        (half + (r.x - cx) * scale, half - (r.y - cy) * scale)
    };

    let mut data = vec![0.0f32; IMG_PIXELS];
    {
        let (ch0, ch1) = data.split_at_mut(IMG_SIZE * IMG_SIZE);
        for s in &setup.static_shapes {
            fill_polygon(ch0, s.source().vertices(), Point2::ZERO, STATIC_INTENSITY, &to_px);
            fill_polygon(ch1, s.source().vertices(), Point2::ZERO, STATIC_INTENSITY, &to_px);
        }
        for s in &setup.moving_shapes {
            fill_polygon(ch0, s.source().vertices(), start_offset, MOVING_INTENSITY, &to_px);
            fill_polygon(ch1, s.source().vertices(), Point2::ZERO, MOVING_INTENSITY, &to_px);
        }
    }
    ImagePair { data }
}

/// Even-odd scanline fill with pixel-center sampling.
fn fill_polygon(
    img: &mut [f32],
    vertices: &[Point2],
    offset: Point2,
    intensity: f32,
    to_px: &impl Fn(Point2) -> (f64, f64),
) {
    let pts: Vec<(f64, f64)> = vertices.iter().map(|&v| to_px(v + offset)).collect();
    let n = pts.len();
    let mut xs: Vec<f64> = Vec::with_capacity(8);
    for row in 0..IMG_SIZE {
        let yc = row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % n];
            if (y0 <= yc) != (y1 <= yc) {
                xs.push(x0 + (yc - y0) * (x1 - x0) / (y1 - y0));
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in xs.chunks_exact(2) {
            let c0 = (pair[0] - 0.5).ceil().max(0.0) as usize;
            let c1f = (pair[1] - 0.5).ceil();
            if c1f <= 0.0 {
                continue;
            }
            let c1 = (c1f as usize).min(IMG_SIZE);
            for c in c0..c1 {
                let px = &mut img[row * IMG_SIZE + c];
                if intensity > *px {
                    *px = intensity;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::{build_blocking_table, build_ndbg, find_partitions, Assembly};
    use crate::geom2d::validate_polygon;

    fn stacked_pair() -> Assembly {
        let sq = |x: f64, y: f64, s: f64| {
            validate_polygon(&[
                Point2::new(x, y),
                Point2::new(x + s, y),
                Point2::new(x + s, y + s),
                Point2::new(x, y + s),
            ])
            .unwrap()
        };
        // Static below, moving on top (touching).
        Assembly::new(
            "stack",
            vec![("top".into(), sq(0.0, 2.0, 2.0)), ("bottom".into(), sq(0.0, 0.0, 2.0))],
        )
        .unwrap()
    }

    fn center_of_mass(img: &ImagePair, channel: usize, intensity: f32) -> (f64, f64) {
        let mut sum_r = 0.0;
        let mut sum_c = 0.0;
        let mut count = 0.0;
        for r in 0..IMG_SIZE {
            for c in 0..IMG_SIZE {
                if (img.at(channel, r, c) - intensity).abs() < 1e-6 {
                    sum_r += r as f64;
                    sum_c += c as f64;
                    count += 1.0;
                }
            }
        }
        (sum_r / count, sum_c / count)
    }

    #[test]
    fn north_escape_renders_moving_above_translating_down() {
        let a = stacked_pair();
        let t = build_blocking_table(&a).unwrap();
        let ndbg = build_ndbg(&t);
        let ps = find_partitions(&t, &ndbg, a.full_mask());
        // Take the partition where the top part escapes north.
        let p = ps
            .iter()
            .find(|p| {
                p.s1.mask() == 0b01
                    && (p.direction - std::f64::consts::FRAC_PI_2).abs() < 1e-6
            })
            .expect("north escape for the top square");
        let img = rasterize(&a, p, &TrialConfig::default());
        // Moving part above the static part in both channels.
        for ch in 0..2 {
            let (mr, _) = center_of_mass(&img, ch, MOVING_INTENSITY);
            let (sr, _) = center_of_mass(&img, ch, STATIC_INTENSITY);
            assert!(mr < sr, "channel {ch}: moving row {mr} not above static {sr}");
        }
        // Start is farther above than goal: smaller row in channel 0.
        let (start_r, _) = center_of_mass(&img, 0, MOVING_INTENSITY);
        let (goal_r, _) = center_of_mass(&img, 1, MOVING_INTENSITY);
        assert!(start_r < goal_r);
    }

    #[test]
    fn rasterization_is_deterministic() {
        let a = stacked_pair();
        let t = build_blocking_table(&a).unwrap();
        let ndbg = build_ndbg(&t);
        let ps = find_partitions(&t, &ndbg, a.full_mask());
        let img1 = rasterize(&a, &ps[0], &TrialConfig::default());
        let img2 = rasterize(&a, &ps[0], &TrialConfig::default());
        assert_eq!(img1, img2);
    }

    #[test]
    fn intensities_are_the_three_levels() {
        let a = stacked_pair();
        let t = build_blocking_table(&a).unwrap();
        let ndbg = build_ndbg(&t);
        let ps = find_partitions(&t, &ndbg, a.full_mask());
        let img = rasterize(&a, &ps[0], &TrialConfig::default());
        for &v in &img.data {
            assert!(v == 0.0 || v == STATIC_INTENSITY || v == MOVING_INTENSITY);
        }
        // Both bodies actually appear.
        assert!(img.data.iter().any(|&v| v == STATIC_INTENSITY));
        assert!(img.data.iter().any(|&v| v == MOVING_INTENSITY));
    }

    #[test]
    fn rotating_the_scene_changes_nothing_up_to_resampling() {
        let a = stacked_pair();
        let t = build_blocking_table(&a).unwrap();
        let ndbg = build_ndbg(&t);
        let ps = find_partitions(&t, &ndbg, a.full_mask());
        let p = &ps[0];
        let base = rasterize(&a, p, &TrialConfig::default());
        for phi_deg in [30.0f64, 90.0, 217.0] {
            let phi = phi_deg.to_radians();
            let rotated_parts: Vec<(String, crate::geom2d::Polygon)> = a
                .parts()
                .iter()
                .map(|part| (part.id.clone(), part.polygon.map(|v| v.rotated(phi))))
                .collect();
            let ra = Assembly::new("rot", rotated_parts).unwrap();
            let rt = build_blocking_table(&ra).unwrap();
            let rndbg = build_ndbg(&rt);
            let rps = find_partitions(&rt, &rndbg, ra.full_mask());
            let rp = rps
                .iter()
                .find(|q| {
                    q.s1 == p.s1
                        && (crate::geom2d::norm_angle(q.direction - p.direction - phi)
                            .min(crate::geom2d::TAU
                                - crate::geom2d::norm_angle(q.direction - p.direction - phi)))
                            < 1e-3
                })
                .expect("rotated twin partition");
            let rimg = rasterize(&ra, rp, &TrialConfig::default());
            let mad: f64 = base
                .data
                .iter()
                .zip(rimg.data.iter())
                .map(|(x, y)| (x - y).abs() as f64)
                .sum::<f64>()
                / IMG_PIXELS as f64;
            assert!(mad <= 0.03, "phi={phi_deg}: mad={mad}");
        }
    }
}
