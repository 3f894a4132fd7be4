use super::cache::ScoreCache;
use super::{AssemblySequence, Operation, PlanContext, PlanError};
use crate::blocking::{all_partitions, Partition, Subassembly};
use std::collections::HashMap;

/// Exhaustive-optimal search: a dynamic program over subassembly masks.
/// `best(S) = 1` for single parts, else the maximum over every partition
/// (all closed sets per NDBG cell, capped) of `r(op) * best(S1) * best(S2)`.
/// Simulator scores come from the shared memo cache; the argmax sequence is
/// reconstructed deterministically (first-best in candidate order).
pub fn optimal_search(
    ctx: &PlanContext,
    cache: &ScoreCache,
    per_cell_cap: usize,
    subassembly_cap: usize,
) -> Result<(AssemblySequence, bool), PlanError> {
    let full = ctx.assembly.full_mask();
    // Enumerate reachable subassemblies and their candidate partitions.
    let mut partitions: HashMap<u64, Vec<Partition>> = HashMap::new();
    let mut truncated_any = false;
    let mut queue = vec![full];
    while let Some(sub) = queue.pop() {
        if sub.len() < 2 || partitions.contains_key(&sub.mask()) {
            continue;
        }
        if partitions.len() >= subassembly_cap {
            return Err(PlanError::CapExceeded(partitions.len()));
        }
        let (cands, truncated) = all_partitions(&ctx.table, &ctx.ndbg, sub, per_cell_cap);
        truncated_any |= truncated;
        for p in &cands {
            queue.push(p.s1);
            queue.push(p.s2);
        }
        partitions.insert(sub.mask(), cands);
    }
    // Score every distinct operation up front (parallel, order-free).
    let mut keys: Vec<(Subassembly, Subassembly, f64)> = Vec::new();
    let mut masks: Vec<u64> = partitions.keys().copied().collect();
    masks.sort_unstable();
    for &m in &masks {
        for p in &partitions[&m] {
            keys.push((p.s1, p.s2, p.direction));
        }
    }
    cache.score_many(ctx.assembly, &ctx.cfg, keys.into_iter());

    // DP over masks by increasing popcount; None marks infeasible.
    let mut order = masks.clone();
    order.sort_by_key(|m| m.count_ones());
    let mut best: HashMap<u64, Option<(f64, usize)>> = HashMap::new();
    for &m in &order {
        let sub = Subassembly::from_mask(m);
        if sub.len() < 2 {
            continue;
        }
        let cands = &partitions[&m];
        let mut best_here: Option<(f64, usize)> = None;
        for (i, p) in cands.iter().enumerate() {
            let r = cache.score(ctx.assembly, &ctx.cfg, p.s1, p.s2, p.direction);
            let b1 = subtree_best(&best, p.s1);
            let b2 = subtree_best(&best, p.s2);
            let (Some(b1), Some(b2)) = (b1, b2) else {
                continue;
            };
            let value = r * b1 * b2;
            if best_here.map_or(true, |(v, _)| value > v) {
                best_here = Some((value, i));
            }
        }
        best.insert(m, best_here);
    }
    let Some(Some(_)) = best.get(&full.mask()).copied().or(if full.len() == 1 {
        Some(Some((1.0, 0)))
    } else {
        None
    }) else {
        return Err(PlanError::Infeasible(full.mask()));
    };

    // Reconstruct the argmax tree in pre-order.
    let mut steps = Vec::new();
    let mut stack = vec![full];
    while let Some(sub) = stack.pop() {
        if sub.len() < 2 {
            continue;
        }
        let (_, idx) = best[&sub.mask()].expect("feasible by construction");
        let p = &partitions[&sub.mask()][idx];
        let r = cache.score(ctx.assembly, &ctx.cfg, p.s1, p.s2, p.direction);
        steps.push((Operation::from_partition(p), r));
        stack.push(p.s2);
        stack.push(p.s1);
    }
    let total = AssemblySequence::recompute_total(&steps);
    Ok((AssemblySequence { steps, total }, truncated_any))
}

fn subtree_best(best: &HashMap<u64, Option<(f64, usize)>>, sub: Subassembly) -> Option<f64> {
    if sub.len() == 1 {
        return Some(1.0);
    }
    best.get(&sub.mask()).copied().flatten().map(|(v, _)| v)
}
