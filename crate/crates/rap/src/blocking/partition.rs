use super::graph::{dbg_for, scc_condense, Condensation};
use super::ndbg::{Cell, Ndbg};
use super::{quantize_angle, BlockingTable, Subassembly};
use crate::geom2d::Arc;

/// A candidate two-handed operation: `s1` translates along `direction` while
/// `s2` stays fixed; `valid_range` is the maximal connected direction arc for
/// this split around the originating cell.
#[derive(Clone, Debug)]
pub struct Partition {
    pub s1: Subassembly,
    pub s2: Subassembly,
    /// Disassembly (escape) direction of `s1`, radians.
    pub direction: f64,
    pub valid_range: Arc,
    /// Angle of the NDBG cell this partition came from (tie-break key).
    pub cell_angle: f64,
}

impl Partition {
    pub fn parent(&self) -> Subassembly {
        self.s1.union(self.s2)
    }

    /// Deduplication / memoization key.
    pub fn key(&self) -> (u64, u64, i64) {
        (self.s1.mask(), self.s2.mask(), quantize_angle(self.direction))
    }
}

/// The single partition extracted from one cell's DBG, if any.
///
/// `s1` is the sink SCC whose smallest part index is minimal; the direction
/// is the midpoint of the maximal valid arc around the cell representative
/// (the representative itself when nothing blocks this split anywhere, or
/// when the range degenerates to the single grazing angle).
pub fn partition_for_cell(t: &BlockingTable, s: Subassembly, cell: &Cell) -> Option<Partition> {
    let dbg = dbg_for(t, s, cell.representative);
    let cond = scc_condense(&dbg);
    if cond.len() <= 1 {
        return None;
    }
    let sink = *cond
        .sinks()
        .iter()
        .min_by_key(|&&c| cond.comps[c][0])
        .expect("a DAG has at least one sink");
    let s1 = cond.comp_mask(sink);
    finish_partition(t, s, s1, cell)
}

fn finish_partition(
    t: &BlockingTable,
    s: Subassembly,
    s1: Subassembly,
    cell: &Cell,
) -> Option<Partition> {
    let s2 = s.minus(s1);
    if s1.is_empty() || s2.is_empty() {
        return None;
    }
    let blocked = t.blocked_for(s1, s2);
    let free = blocked.complement();
    let rep = cell.representative;
    if free.is_full() {
        return Some(Partition {
            s1,
            s2,
            direction: rep,
            valid_range: Arc::full(),
            cell_angle: rep,
        });
    }
    let range = free.component_containing(rep)?;
    let direction = if range.is_point() { rep } else { range.midpoint() };
    Some(Partition {
        s1,
        s2,
        direction,
        valid_range: range,
        cell_angle: rep,
    })
}

/// One candidate per NDBG cell, deduplicated by `(s1, s2, direction)` with
/// the first (lowest cell angle) occurrence kept. Order is deterministic.
pub fn find_partitions(t: &BlockingTable, ndbg: &Ndbg, s: Subassembly) -> Vec<Partition> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    if s.len() < 2 {
        return out;
    }
    for cell in ndbg.cells() {
        if let Some(p) = partition_for_cell(t, s, cell) {
            if seen.insert(p.key()) {
                out.push(p);
            }
        }
    }
    out
}

/// Every closed set per cell (unions of SCCs with no outgoing condensation
/// edges into the complement), capped per cell. Returns the partitions and
/// whether any cell was truncated.
pub fn all_partitions(
    t: &BlockingTable,
    ndbg: &Ndbg,
    s: Subassembly,
    cap: usize,
) -> (Vec<Partition>, bool) {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut truncated = false;
    if s.len() < 2 {
        return (out, truncated);
    }
    for cell in ndbg.cells() {
        let dbg = dbg_for(t, s, cell.representative);
        let cond = scc_condense(&dbg);
        if cond.len() <= 1 {
            continue;
        }
        let (sets, cell_truncated) = closed_sets(&cond, cap);
        truncated |= cell_truncated;
        for s1 in sets {
            if let Some(p) = finish_partition(t, s, s1, cell)
                .filter(|p| seen.insert(p.key()))
            {
                out.push(p);
            }
        }
    }
    (out, truncated)
}

/// Proper nonempty unions of condensation components with no outgoing edges,
/// enumerated in ascending component-subset order, capped.
fn closed_sets(cond: &Condensation, cap: usize) -> (Vec<Subassembly>, bool) {
    let k = cond.len();
    debug_assert!(k >= 2);
    if k > 24 {
        // Pathological; fall back to single sink closure to stay bounded.
        let sink = *cond.sinks().first().expect("sink");
        return (vec![cond.comp_mask(sink)], true);
    }
    let mut out = Vec::new();
    let mut truncated = false;
    let limit = (1u32 << k) - 1;
    for subset in 1..limit {
        let closed = (0..k)
            .filter(|&c| subset & (1 << c) != 0)
            .all(|c| cond.dag[c].iter().all(|&d| subset & (1 << d) != 0));
        if !closed {
            continue;
        }
        if out.len() == cap {
            truncated = true;
            break;
        }
        let mut mask = Subassembly::from_mask(0);
        for c in 0..k {
            if subset & (1 << c) != 0 {
                mask = mask.union(cond.comp_mask(c));
            }
        }
        out.push(mask);
    }
    (out, truncated)
}
