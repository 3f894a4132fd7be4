//! Blocked-direction arcs, the non-directional blocking graph over the circle
//! of translation directions, per-cell directional blocking graphs, and
//! extraction of valid two-handed partitions.
//!
//! For an ordered part pair `(p, q)`, `D(p, q)` is the set of directions along
//! which translating `p` arbitrarily far collides with the interior of `q`.
//! It is computed from Minkowski sums of the convex decomposition pieces: a
//! direction is blocked iff the open ray from the origin enters the interior
//! of `Q_j + (-P_i)` for some piece pair. Grazing (boundary-only) directions
//! are excluded, so sliding contact stays legal.

mod graph;
mod ndbg;
mod partition;

pub use graph::{scc_condense, Condensation, Dbg};
pub use ndbg::{build_ndbg, Cell, CellKind, Ndbg};
pub use partition::{all_partitions, find_partitions, partition_for_cell, Partition};

use crate::geom2d::{
    convex_strictly_contains, interiors_intersect, minkowski_sum_convex, norm_angle,
    reflect_origin, validate_polygon, Arc, ArcSet, GeomError, Point2, Polygon, Shape, EPS_ANG,
    EPS_GEO, TAU,
};
use crate::geom2d::convex_decompose;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockingError {
    #[error("parts {0} and {1} have overlapping interiors")]
    OverlappingParts(usize, usize),
    #[error("assemblies are limited to 64 parts")]
    TooManyParts,
    #[error("assembly must have at least one part")]
    Empty,
    #[error("part {id}: {source}")]
    BadPart { id: String, source: GeomError },
}

/// One rigid part: a validated polygon and its convex decomposition.
#[derive(Clone, Debug)]
pub struct Part {
    pub id: String,
    pub polygon: Polygon,
    pub shape: Shape,
}

/// A collection of parts in fixed relative placements with pairwise disjoint
/// interiors (contact allowed).
#[derive(Clone, Debug)]
pub struct Assembly {
    pub name: String,
    parts: Vec<Part>,
}

impl Assembly {
    pub fn new(name: impl Into<String>, parts: Vec<(String, Polygon)>) -> Result<Self, BlockingError> {
        if parts.is_empty() {
            return Err(BlockingError::Empty);
        }
        if parts.len() > 64 {
            return Err(BlockingError::TooManyParts);
        }
        let parts: Vec<Part> = parts
            .into_iter()
            .map(|(id, polygon)| {
                let shape = convex_decompose(&polygon);
                Part { id, polygon, shape }
            })
            .collect();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if interiors_intersect(
                    &parts[i].shape,
                    Point2::ZERO,
                    &parts[j].shape,
                    Point2::ZERO,
                ) {
                    return Err(BlockingError::OverlappingParts(i, j));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            parts,
        })
    }

    /// Builds from raw vertex lists, validating each polygon.
    pub fn from_raw(
        name: impl Into<String>,
        parts: Vec<(String, Vec<Point2>)>,
    ) -> Result<Self, BlockingError> {
        let mut out = Vec::with_capacity(parts.len());
        for (id, raw) in parts {
            let polygon = validate_polygon(&raw).map_err(|source| BlockingError::BadPart {
                id: id.clone(),
                source,
            })?;
            out.push((id, polygon));
        }
        Self::new(name, out)
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn full_mask(&self) -> Subassembly {
        Subassembly::full(self.parts.len())
    }

    /// Bounding box over all parts.
    pub fn aabb(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.parts {
            let (l, h) = p.shape.aabb();
            lo.x = lo.x.min(l.x);
            lo.y = lo.y.min(l.y);
            hi.x = hi.x.max(h.x);
            hi.y = hi.y.max(h.y);
        }
        (lo, hi)
    }

    /// Translates the bounding-box center to the origin and uniformly scales
    /// so the larger bounding-box dimension equals 10 world units. Fixed
    /// physics constants and raster margins assume this frame.
    pub fn normalized(&self) -> Assembly {
        let (lo, hi) = self.aabb();
        let c = Point2::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
        let dim = (hi.x - lo.x).max(hi.y - lo.y);
        let k = if dim > EPS_GEO { 10.0 / dim } else { 1.0 };
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let polygon = p.polygon.map(|v| (v - c).scaled(k));
                let shape = convex_decompose(&polygon);
                Part {
                    id: p.id.clone(),
                    polygon,
                    shape,
                }
            })
            .collect();
        Assembly {
            name: self.name.clone(),
            parts,
        }
    }
}

/// A nonempty subset of part indices, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subassembly(u64);

impl Subassembly {
    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn single(i: usize) -> Self {
        Self(1u64 << i)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << n) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1u64 << i) != 0
    }

    pub fn union(self, o: Subassembly) -> Subassembly {
        Subassembly(self.0 | o.0)
    }

    pub fn minus(self, o: Subassembly) -> Subassembly {
        Subassembly(self.0 & !o.0)
    }

    pub fn is_subset_of(self, o: Subassembly) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 & (1u64 << i) != 0)
    }

    /// Lowest part index present (panics on empty).
    pub fn min_part(self) -> usize {
        self.0.trailing_zeros() as usize
    }
}

impl std::fmt::Display for Subassembly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

/// Snaps an angle onto the `EPS_ANG` grid, normalized to `[0, 2*pi)`.
pub fn snap_angle(a: f64) -> f64 {
    norm_angle((norm_angle(a) / EPS_ANG).round() * EPS_ANG)
}

/// Integer grid index of an angle, for hashing/deduplication keys.
pub fn quantize_angle(a: f64) -> i64 {
    (norm_angle(a) / EPS_ANG).round() as i64
}

/// Blocked directions for moving `p` (arbitrarily far) against static `q`,
/// both taken at their stored placements.
///
/// Per convex piece pair the blocked set is the open arc of directions whose
/// ray from the origin enters the interior of `Q_j + (-P_i)`; the union over
/// piece pairs is returned as maximal disjoint arcs. Endpoints are snapped to
/// the `EPS_ANG` grid so arrangement construction can dedupe them exactly.
pub fn blocking_arcs(p: &Shape, q: &Shape) -> Result<ArcSet, BlockingError> {
    let mut arcs: Vec<Arc> = Vec::new();
    for pi in p.pieces() {
        let neg_pi = reflect_origin(pi);
        for qj in q.pieces() {
            let m = minkowski_sum_convex(qj, &neg_pi);
            if convex_strictly_contains(m.vertices(), Point2::ZERO, EPS_GEO) {
                return Err(BlockingError::OverlappingParts(usize::MAX, usize::MAX));
            }
            if let Some((start, end)) = entering_cone(m.vertices()) {
                arcs.push(Arc::open(snap_angle(start), snap_angle(end)));
            }
        }
    }
    Ok(ArcSet::from_arcs(arcs))
}

/// The open cone of directions whose positive ray enters the interior of a
/// convex polygon not containing the origin in its interior: the angular hull
/// of the vertex directions. Returns `None` for a degenerate (empty) cone.
fn entering_cone(m: &[Point2]) -> Option<(f64, f64)> {
    let mut angles: Vec<f64> = m
        .iter()
        .filter(|v| v.norm() > EPS_GEO)
        .map(|v| norm_angle(v.angle()))
        .collect();
    if angles.len() < 2 {
        return None;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    if angles.len() < 2 {
        return None;
    }
    // Largest gap between consecutive direction angles; the hull is its
    // complement. Width cannot exceed pi since the origin is not interior.
    let n = angles.len();
    let mut best_gap = -1.0;
    let mut hull_start = 0.0;
    let mut hull_end = 0.0;
    for i in 0..n {
        let a = angles[i];
        let b = angles[(i + 1) % n];
        let gap = norm_angle(b - a);
        let gap = if i + 1 == n { TAU - (a - angles[0]) } else { gap };
        if gap > best_gap {
            best_gap = gap;
            hull_start = b;
            hull_end = a;
        }
    }
    let width = TAU - best_gap;
    if width <= EPS_ANG {
        return None;
    }
    Some((hull_start, hull_end))
}

/// Blocked-direction arcs for every ordered part pair of an assembly.
#[derive(Clone, Debug)]
pub struct BlockingTable {
    n: usize,
    arcs: Vec<ArcSet>, // row-major [p * n + q]
}

impl BlockingTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `D(p, q)` for `p != q`.
    pub fn entry(&self, p: usize, q: usize) -> &ArcSet {
        debug_assert_ne!(p, q);
        &self.arcs[p * self.n + q]
    }

    /// Union of `D(p, q)` over all `p` in `s1`, `q` in `s2`: directions along
    /// which `s1` cannot translate away as a rigid unit.
    pub fn blocked_for(&self, s1: Subassembly, s2: Subassembly) -> ArcSet {
        let mut acc = ArcSet::empty();
        for p in s1.iter().filter(|&p| p < self.n) {
            for q in s2.iter().filter(|&q| q < self.n) {
                if p != q {
                    acc = acc.union(self.entry(p, q));
                }
            }
        }
        acc
    }

    /// Largest number of arcs stored for any single ordered pair.
    pub fn max_arcs_per_pair(&self) -> usize {
        self.arcs.iter().map(|s| s.arcs().len()).max().unwrap_or(0)
    }
}

/// Computes one orientation per unordered pair and derives the reverse by a
/// half-turn rotation (antisymmetry `D(q, p) = D(p, q) + pi`).
pub fn build_blocking_table(a: &Assembly) -> Result<BlockingTable, BlockingError> {
    let n = a.len();
    let mut arcs = vec![ArcSet::empty(); n * n];
    for p in 0..n {
        for q in p + 1..n {
            let d = blocking_arcs(&a.parts()[p].shape, &a.parts()[q].shape).map_err(|e| {
                match e {
                    BlockingError::OverlappingParts(_, _) => BlockingError::OverlappingParts(p, q),
                    other => other,
                }
            })?;
            arcs[q * n + p] = d.rotated(std::f64::consts::PI);
            arcs[p * n + q] = d;
        }
    }
    Ok(BlockingTable { n, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn square_poly(x: f64, y: f64, w: f64, h: f64) -> Polygon {
        validate_polygon(&[
            Point2::new(x, y),
            Point2::new(x + w, y),
            Point2::new(x + w, y + h),
            Point2::new(x, y + h),
        ])
        .unwrap()
    }

    fn shape(p: &Polygon) -> Shape {
        convex_decompose(p)
    }

    fn rad(deg: f64) -> f64 {
        deg.to_radians()
    }

    #[test]
    fn separated_squares_blocked_cone() {
        // A at [0,1]^2, B at [2,3]x[0,1]: D(A,B) is the open arc (-45, 45).
        let a = shape(&square_poly(0.0, 0.0, 1.0, 1.0));
        let b = shape(&square_poly(2.0, 0.0, 1.0, 1.0));
        let d = blocking_arcs(&a, &b).unwrap();
        assert_eq!(d.arcs().len(), 1);
        let arc = d.arcs()[0];
        assert!((arc.start() - rad(315.0)).abs() < 1e-6, "start {}", arc.start());
        assert!((arc.end() - rad(45.0)).abs() < 1e-6);
        assert!(!arc.start_closed() && !arc.end_closed());
        assert!(d.contains(0.0));
        // Grazing endpoints (queried at their snapped grid values) are open.
        assert!(!d.contains(arc.end()));
        assert!(!d.contains(arc.start()));
        assert!(!d.contains(rad(90.0)));
    }

    #[test]
    fn antisymmetry_by_half_turn() {
        let a = shape(&square_poly(0.0, 0.0, 1.0, 1.0));
        let b = shape(&square_poly(2.0, 0.0, 1.0, 1.0));
        let dab = blocking_arcs(&a, &b).unwrap();
        let dba = blocking_arcs(&b, &a).unwrap();
        let rotated = dab.rotated(std::f64::consts::PI);
        let mut rng = crate::rng::CounterRng::new(3);
        for _ in 0..720 {
            let t = rng.uniform(0.0, TAU);
            assert_eq!(dba.contains(t), rotated.contains(t));
        }
    }

    #[test]
    fn sharing_edge_half_circle_sliding_allowed() {
        let a = shape(&square_poly(0.0, 0.0, 1.0, 1.0));
        let b = shape(&square_poly(1.0, 0.0, 1.0, 1.0));
        let d = blocking_arcs(&a, &b).unwrap();
        assert_eq!(d.arcs().len(), 1);
        let arc = d.arcs()[0];
        assert!((arc.start() - rad(270.0)).abs() < 1e-6);
        assert!((arc.end() - rad(90.0)).abs() < 1e-6);
        // Straight up slides along the contact edge and is not blocked.
        assert!(!d.contains(arc.end()));
        assert!(d.contains(rad(0.0)));
        assert!(!d.contains(rad(180.0)));
        assert!((d.measure() - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn overlapping_parts_rejected() {
        let a = shape(&square_poly(0.0, 0.0, 1.0, 1.0));
        let b = shape(&square_poly(0.5, 0.0, 1.0, 1.0));
        assert!(matches!(
            blocking_arcs(&a, &b),
            Err(BlockingError::OverlappingParts(_, _))
        ));
    }

    #[test]
    fn one_part_table_is_empty() {
        let asm = Assembly::new("one", vec![("a".into(), square_poly(0.0, 0.0, 1.0, 1.0))]).unwrap();
        let t = build_blocking_table(&asm).unwrap();
        assert_eq!(t.n(), 1);
    }

    #[test]
    fn three_collinear_touching_squares() {
        let asm = Assembly::new(
            "row3",
            vec![
                ("a".into(), square_poly(0.0, 0.0, 1.0, 1.0)),
                ("b".into(), square_poly(1.0, 0.0, 1.0, 1.0)),
                ("c".into(), square_poly(2.0, 0.0, 1.0, 1.0)),
            ],
        )
        .unwrap();
        let t = build_blocking_table(&asm).unwrap();
        // Touching pairs block a half circle; the far pair (gap 1) blocks the
        // 90-degree cone subtended by its Minkowski sum. None are Full.
        for (p, q, want) in [
            (0usize, 1usize, 180.0f64),
            (1, 0, 180.0),
            (1, 2, 180.0),
            (2, 1, 180.0),
            (0, 2, 90.0),
            (2, 0, 90.0),
        ] {
            let d = t.entry(p, q);
            assert!(!d.is_full());
            assert!(
                (d.measure() - rad(want)).abs() < 1e-6,
                "D({p},{q}) measure {} want {want} deg",
                d.measure().to_degrees()
            );
        }
        // Part 0 moving east is blocked by both others; west is free.
        assert!(t.entry(0, 1).contains(0.0));
        assert!(t.entry(0, 2).contains(0.0));
        assert!(!t.entry(0, 1).contains(rad(180.0)));
    }

    #[test]
    fn no_full_entries_on_valid_assembly() {
        let asm = Assembly::new(
            "pair",
            vec![
                ("a".into(), square_poly(0.0, 0.0, 1.0, 1.0)),
                ("b".into(), square_poly(1.5, 0.3, 1.0, 1.0)),
            ],
        )
        .unwrap();
        let t = build_blocking_table(&asm).unwrap();
        assert!(!t.entry(0, 1).is_full());
        assert!(!t.entry(1, 0).is_full());
    }

    #[test]
    fn overlapping_assembly_construction_fails() {
        let r = Assembly::new(
            "bad",
            vec![
                ("a".into(), square_poly(0.0, 0.0, 2.0, 2.0)),
                ("b".into(), square_poly(1.0, 1.0, 2.0, 2.0)),
            ],
        );
        assert!(matches!(r, Err(BlockingError::OverlappingParts(0, 1))));
    }

    #[test]
    fn normalization_centers_and_scales() {
        let asm = Assembly::new(
            "norm",
            vec![
                ("a".into(), square_poly(10.0, 10.0, 2.0, 1.0)),
                ("b".into(), square_poly(14.0, 10.0, 2.0, 1.0)),
            ],
        )
        .unwrap();
        let n = asm.normalized();
        let (lo, hi) = n.aabb();
        assert!((hi.x - lo.x - 10.0).abs() < 1e-9);
        assert!((lo.x + hi.x).abs() < 1e-9);
        assert!((lo.y + hi.y).abs() < 1e-9);
    }
}
