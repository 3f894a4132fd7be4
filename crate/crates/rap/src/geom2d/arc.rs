use super::{norm_angle, TAU};

/// Comparison slack for angle identity inside arc arithmetic. Distinct
/// endpoints produced by the blocking stage sit on an `EPS_ANG` grid, so the
/// slack only has to absorb float round-off, staying far below grid spacing.
const EPS_C: f64 = 1e-12;
/// Slack for membership queries at arc endpoints.
const EPS_Q: f64 = 1e-9;

/// A connected subset of the unit circle, traversed CCW from `start` over
/// `span` radians, with per-endpoint openness.
///
/// `span == 2*pi` with both endpoints closed is the full circle; with both
/// open it is the circle minus the single point `start`. `span == 0` (both
/// endpoints closed) is a single point — such degenerate arcs arise as
/// complements of touching open arcs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: f64,
    span: f64,
    start_closed: bool,
    end_closed: bool,
}

impl Arc {
    pub fn new(start: f64, span: f64, start_closed: bool, end_closed: bool) -> Self {
        assert!((0.0..=TAU).contains(&span), "span out of range: {span}");
        let start = norm_angle(start);
        if span >= TAU {
            // A full span including either endpoint covers everything.
            if start_closed || end_closed {
                return Self {
                    start: 0.0,
                    span: TAU,
                    start_closed: true,
                    end_closed: true,
                };
            }
            return Self {
                start,
                span: TAU,
                start_closed: false,
                end_closed: false,
            };
        }
        if span <= 0.0 {
            return Self {
                start,
                span: 0.0,
                start_closed: true,
                end_closed: true,
            };
        }
        Self {
            start,
            span,
            start_closed,
            end_closed,
        }
    }

    /// Open arc from `start` CCW to `end`.
    pub fn open(start: f64, end: f64) -> Self {
        let span = norm_angle(end - start);
        let span = if span == 0.0 { TAU } else { span };
        Self::new(start, span, false, false)
    }

    /// Closed arc from `start` CCW to `end`.
    pub fn closed(start: f64, end: f64) -> Self {
        let span = norm_angle(end - start);
        let span = if span == 0.0 { TAU } else { span };
        Self::new(start, span, true, true)
    }

    pub fn full() -> Self {
        Self::new(0.0, TAU, true, true)
    }

    pub fn point(at: f64) -> Self {
        Self::new(at, 0.0, true, true)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        norm_angle(self.start + self.span)
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn start_closed(&self) -> bool {
        self.start_closed
    }

    pub fn end_closed(&self) -> bool {
        self.end_closed
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU && self.start_closed
    }

    pub fn is_point(&self) -> bool {
        self.span == 0.0
    }

    /// The CCW bisector of the arc.
    pub fn midpoint(&self) -> f64 {
        norm_angle(self.start + 0.5 * self.span)
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = norm_angle(theta - self.start);
        if self.span >= TAU {
            if self.start_closed {
                return true; // full circle
            }
            return t > EPS_Q && t < TAU - EPS_Q; // circle minus `start`
        }
        if t <= EPS_Q || t >= TAU - EPS_Q {
            return self.start_closed;
        }
        if (t - self.span).abs() <= EPS_Q {
            return self.end_closed;
        }
        t < self.span
    }
}

/// Line-cut representation over `[0, 2*pi]` used by the set algebra.
#[derive(Clone, Copy, Debug)]
struct Seg {
    a: f64,
    b: f64,
    ac: bool,
    bc: bool,
}

/// A set of pairwise disjoint, maximal arcs, sorted by start angle.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![Arc::full()],
        }
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut segs = Vec::new();
        for arc in arcs {
            arc_to_segs(&arc, &mut segs);
        }
        rewrap(union_segs(segs))
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(theta))
    }

    /// Union with a single arc.
    pub fn union_arc(&self, arc: Arc) -> ArcSet {
        Self::from_arcs(self.arcs.iter().copied().chain(std::iter::once(arc)))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        Self::from_arcs(self.arcs.iter().chain(other.arcs.iter()).copied())
    }

    /// Set complement on the circle. Endpoint openness flips; a pair of open
    /// arcs touching at a point leaves a degenerate point arc in the
    /// complement.
    pub fn complement(&self) -> ArcSet {
        if self.is_empty() {
            return ArcSet::full();
        }
        if self.is_full() {
            return ArcSet::empty();
        }
        let n = self.arcs.len();
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            let cur = &self.arcs[i];
            let next = &self.arcs[(i + 1) % n];
            let gap_start = cur.end();
            let gap_span = if n == 1 {
                TAU - cur.span()
            } else {
                norm_angle(next.start() - gap_start)
            };
            gaps.push(Arc::new(
                gap_start,
                gap_span,
                !cur.end_closed(),
                !next.start_closed(),
            ));
        }
        ArcSet::from_arcs(gaps)
    }

    /// All finite endpoint angles (point arcs contribute one).
    pub fn endpoint_angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for a in &self.arcs {
            if a.is_full() {
                continue;
            }
            out.push(a.start());
            if !a.is_point() && a.span() < TAU {
                out.push(a.end());
            }
        }
        out
    }

    /// Rotates the whole set by `delta` radians.
    pub fn rotated(&self, delta: f64) -> ArcSet {
        ArcSet::from_arcs(self.arcs.iter().map(|a| {
            Arc::new(
                norm_angle(a.start() + delta),
                a.span(),
                a.start_closed(),
                a.end_closed(),
            )
        }))
    }

    /// Total angular measure.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.span()).sum()
    }

    /// The connected arc containing `theta`, if any.
    pub fn component_containing(&self, theta: f64) -> Option<Arc> {
        self.arcs.iter().copied().find(|a| a.contains(theta))
    }
}

fn arc_to_segs(arc: &Arc, out: &mut Vec<Seg>) {
    if arc.span() >= TAU {
        if arc.start_closed() {
            out.push(Seg {
                a: 0.0,
                b: TAU,
                ac: true,
                bc: true,
            });
        } else {
            // Circle minus the point at `start`.
            let s = arc.start();
            if s <= EPS_C {
                out.push(Seg {
                    a: 0.0,
                    b: TAU,
                    ac: false,
                    bc: false,
                });
            } else {
                out.push(Seg {
                    a: 0.0,
                    b: s,
                    ac: true,
                    bc: false,
                });
                out.push(Seg {
                    a: s,
                    b: TAU,
                    ac: false,
                    bc: true,
                });
            }
        }
        return;
    }
    let end_abs = arc.start() + arc.span();
    if end_abs <= TAU + EPS_C {
        out.push(Seg {
            a: arc.start(),
            b: end_abs.min(TAU),
            ac: arc.start_closed(),
            bc: arc.end_closed(),
        });
    } else {
        out.push(Seg {
            a: arc.start(),
            b: TAU,
            ac: arc.start_closed(),
            bc: true,
        });
        out.push(Seg {
            a: 0.0,
            b: end_abs - TAU,
            ac: true,
            bc: arc.end_closed(),
        });
    }
}

fn union_segs(mut segs: Vec<Seg>) -> Vec<Seg> {
    if segs.is_empty() {
        return segs;
    }
    segs.sort_by(|x, y| {
        x.a.partial_cmp(&y.a)
            .unwrap()
            .then_with(|| y.ac.cmp(&x.ac))
            .then_with(|| y.b.partial_cmp(&x.b).unwrap())
    });
    let mut out: Vec<Seg> = Vec::with_capacity(segs.len());
    let mut cur = segs[0];
    for &next in &segs[1..] {
        if next.a < cur.b - EPS_C {
            // Proper overlap.
            if (next.a - cur.a).abs() <= EPS_C {
                cur.ac |= next.ac;
            }
            if next.b > cur.b + EPS_C {
                cur.b = next.b;
                cur.bc = next.bc;
            } else if (next.b - cur.b).abs() <= EPS_C {
                cur.bc |= next.bc;
            }
        } else if (next.a - cur.b).abs() <= EPS_C {
            // Touching: merge only if the junction point is covered.
            if cur.bc || next.ac {
                if next.b > cur.b + EPS_C {
                    cur.b = next.b;
                    cur.bc = next.bc;
                } else {
                    cur.bc = cur.bc || next.bc || next.ac;
                }
            } else {
                out.push(cur);
                cur = next;
            }
        } else {
            out.push(cur);
            cur = next;
        }
    }
    out.push(cur);
    out
}

fn rewrap(segs: Vec<Seg>) -> ArcSet {
    if segs.is_empty() {
        return ArcSet::empty();
    }
    if segs.len() == 1 && segs[0].a <= EPS_C && segs[0].b >= TAU - EPS_C {
        let s = segs[0];
        if s.ac || s.bc {
            return ArcSet::full();
        }
        return ArcSet {
            arcs: vec![Arc::new(0.0, TAU, false, false)],
        };
    }
    let mut segs = segs;
    let mut wrapped: Option<Arc> = None;
    let first_at_zero = segs.first().map(|s| s.a <= EPS_C).unwrap_or(false);
    let last_at_tau = segs.last().map(|s| s.b >= TAU - EPS_C).unwrap_or(false);
    if segs.len() >= 2 && first_at_zero && last_at_tau {
        let first = segs[0];
        let last = *segs.last().unwrap();
        if first.ac || last.bc {
            // Junction at angle zero is covered: stitch across the cut.
            wrapped = Some(Arc::new(
                last.a,
                (TAU - last.a) + first.b,
                last.ac,
                first.bc,
            ));
            segs.remove(0);
            segs.pop();
        }
    }
    let mut arcs: Vec<Arc> = segs
        .into_iter()
        .map(|s| Seg_to_arc(s))
        .collect();
    if let Some(w) = wrapped {
        arcs.push(w);
    }
    arcs.sort_by(|x, y| x.start().partial_cmp(&y.start()).unwrap());
    ArcSet { arcs }
}

#[allow(non_snake_case)]
fn Seg_to_arc(s: Seg) -> Arc {
    let span = (s.b - s.a).max(0.0);
    if span <= EPS_C {
        Arc::point(s.a)
    } else {
        Arc::new(s.a, span, s.ac, s.bc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rad(deg: f64) -> f64 {
        deg.to_radians()
    }

    #[test]
    fn wraparound_union_merges() {
        let s = ArcSet::from_arcs([Arc::open(rad(350.0), rad(10.0)), Arc::open(rad(5.0), rad(20.0))]);
        assert_eq!(s.arcs().len(), 1);
        let a = s.arcs()[0];
        assert!((a.start() - rad(350.0)).abs() < 1e-12);
        assert!((a.span() - rad(30.0)).abs() < 1e-12);
        assert!(s.contains(rad(0.0)));
        assert!(s.contains(rad(8.0)));
        assert!(!s.contains(rad(30.0)));
    }

    #[test]
    fn complement_of_symmetric_arc() {
        let s = ArcSet::from_arcs([Arc::open(rad(-45.0), rad(45.0))]);
        let c = s.complement();
        assert_eq!(c.arcs().len(), 1);
        let a = c.arcs()[0];
        assert!((a.start() - rad(45.0)).abs() < 1e-12);
        assert!((a.end() - rad(315.0)).abs() < 1e-12);
        assert!(a.start_closed() && a.end_closed());
        assert!(c.contains(rad(180.0)));
        assert!(!c.contains(rad(0.0)));
        assert!(c.contains(rad(45.0))); // closed endpoint of the complement
    }

    #[test]
    fn midpoint_of_quarter_arc() {
        let a = Arc::open(rad(90.0), rad(180.0));
        assert!((a.midpoint() - rad(135.0)).abs() < 1e-12);
    }

    #[test]
    fn midpoint_wraps() {
        let a = Arc::open(rad(350.0), rad(10.0));
        assert!((a.midpoint() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn touching_open_arcs_keep_point_hole() {
        let s = ArcSet::from_arcs([Arc::open(0.0, rad(90.0)), Arc::open(rad(90.0), rad(180.0))]);
        assert_eq!(s.arcs().len(), 2, "open arcs must not merge across a hole");
        assert!(!s.contains(rad(90.0)));
        assert!(s.contains(rad(89.9)) && s.contains(rad(90.1)));
        // Covering the hole with a point merges everything.
        let filled = s.union_arc(Arc::point(rad(90.0)));
        assert_eq!(filled.arcs().len(), 1);
        assert!(filled.contains(rad(90.0)));
        // Complement of the holed set contains the hole as a point arc.
        let c = s.complement();
        assert!(c.contains(rad(90.0)));
        assert!(c.arcs().iter().any(|a| a.is_point()));
    }

    #[test]
    fn complement_involution() {
        let cases = vec![
            ArcSet::empty(),
            ArcSet::full(),
            ArcSet::from_arcs([Arc::open(rad(10.0), rad(80.0))]),
            ArcSet::from_arcs([Arc::open(rad(300.0), rad(40.0)), Arc::closed(rad(90.0), rad(120.0))]),
            ArcSet::from_arcs([Arc::open(0.0, rad(90.0)), Arc::open(rad(90.0), rad(180.0))]),
            ArcSet::from_arcs([Arc::point(rad(33.0))]),
        ];
        for s in cases {
            let cc = s.complement().complement();
            let mut rng = crate::rng::CounterRng::new(4242);
            for _ in 0..1000 {
                let t = rng.uniform(0.0, TAU);
                assert_eq!(s.contains(t), cc.contains(t), "mismatch at {t}");
            }
            // Also probe exactly at endpoints.
            for a in s.arcs() {
                for t in [a.start(), a.end(), a.midpoint()] {
                    assert_eq!(s.contains(t), cc.contains(t), "endpoint mismatch at {t}");
                }
            }
        }
    }

    #[test]
    fn union_commutative_associative_on_samples() {
        let a = ArcSet::from_arcs([Arc::open(rad(350.0), rad(30.0))]);
        let b = ArcSet::from_arcs([Arc::closed(rad(20.0), rad(200.0))]);
        let c = ArcSet::from_arcs([Arc::open(rad(180.0), rad(355.0))]);
        let ab_c = a.union(&b).union(&c);
        let a_bc = a.union(&b.union(&c));
        let ba = b.union(&a);
        let ab = a.union(&b);
        let mut rng = crate::rng::CounterRng::new(7);
        for _ in 0..1000 {
            let t = rng.uniform(0.0, TAU);
            assert_eq!(ab.contains(t), ba.contains(t));
            assert_eq!(ab_c.contains(t), a_bc.contains(t));
        }
        // a ∪ b ∪ c covers everything here.
        assert!(ab_c.is_full());
    }

    #[test]
    fn rotation_preserves_membership() {
        let s = ArcSet::from_arcs([Arc::open(rad(10.0), rad(60.0)), Arc::open(rad(200.0), rad(290.0))]);
        let r = s.rotated(std::f64::consts::PI);
        let mut rng = crate::rng::CounterRng::new(11);
        for _ in 0..500 {
            let t = rng.uniform(0.0, TAU);
            assert_eq!(s.contains(t), r.contains(norm_angle(t + std::f64::consts::PI)));
        }
        assert!((s.measure() - r.measure()).abs() < 1e-9);
    }

    #[test]
    fn full_minus_point_behaves() {
        let s = ArcSet::from_arcs([Arc::new(rad(90.0), TAU, false, false)]);
        assert!(!s.is_full());
        assert!(!s.contains(rad(90.0)));
        assert!(s.contains(rad(91.0)));
        let c = s.complement();
        assert_eq!(c.arcs().len(), 1);
        assert!(c.arcs()[0].is_point());
        assert!(c.contains(rad(90.0)));
    }
}
