use super::cache::ScoreCache;
use super::{PlanContext, PlanError};
use crate::blocking::{all_partitions, Assembly, Partition};
use crate::simphys::TrialConfig;
use crate::surrogate::{label_from_score, rasterize, Dataset, DatasetRecord, IMG_PIXELS};

#[derive(Clone, Debug, Default)]
pub struct DatasetGenStats {
    pub records: usize,
    pub high: usize,
    pub truncated: bool,
    pub per_assembly: Vec<(String, usize)>,
}

/// Generates a labeled dataset: breadth-first over the subassemblies
/// reachable from each full assembly, enumerating every (capped) closed-set
/// partition per NDBG cell, deduplicating operations, simulating each once,
/// and rasterizing its start/goal image pair.
///
/// Deterministic for a fixed seed: traversal order is deterministic and each
/// operation's trials draw from streams keyed by the operation itself.
pub fn dataset_generate(
    assemblies: &[&Assembly],
    cfg: &TrialConfig,
    per_cell_cap: usize,
    subassembly_cap: usize,
) -> Result<(Dataset, DatasetGenStats), PlanError> {
    let mut dataset = Dataset::default();
    let mut stats = DatasetGenStats::default();
    for &assembly in assemblies {
        let ctx = PlanContext::new(assembly, cfg.clone())?;
        let mut ops: Vec<Partition> = Vec::new();
        let mut seen_ops = std::collections::HashSet::new();
        let mut visited = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(assembly.full_mask());
        visited.insert(assembly.full_mask().mask());
        while let Some(sub) = queue.pop_front() {
            if sub.len() < 2 {
                continue;
            }
            if visited.len() > subassembly_cap {
                stats.truncated = true;
                break;
            }
            let (cands, truncated) = all_partitions(&ctx.table, &ctx.ndbg, sub, per_cell_cap);
            stats.truncated |= truncated;
            for p in cands {
                for child in [p.s1, p.s2] {
                    if child.len() >= 2 && visited.insert(child.mask()) {
                        queue.push_back(child);
                    }
                }
                if seen_ops.insert(p.key()) {
                    ops.push(p);
                }
            }
        }
        let scores = cache_scores(&ctx, &ops);
        let base_index = dataset.records.len();
        for (i, (p, score)) in ops.iter().zip(scores.iter()).enumerate() {
            let label = label_from_score(*score).expect("simulator scores are in [0,1]");
            let img = rasterize(assembly, p, cfg);
            debug_assert_eq!(img.data.len(), IMG_PIXELS);
            dataset.images.extend_from_slice(&img.data);
            dataset.records.push(DatasetRecord {
                schema_version: 1,
                assembly: assembly.name.clone(),
                subassembly_mask: p.parent().mask(),
                s1_mask: p.s1.mask(),
                direction_rad: p.direction,
                score: *score,
                label,
                image_index: base_index + i,
            });
            if label == crate::surrogate::Label::High {
                stats.high += 1;
            }
        }
        stats
            .per_assembly
            .push((assembly.name.clone(), ops.len()));
        stats.records += ops.len();
    }
    Ok((dataset, stats))
}

fn cache_scores(ctx: &PlanContext, ops: &[Partition]) -> Vec<f64> {
    let cache = ScoreCache::new();
    cache.score_many(
        ctx.assembly,
        &ctx.cfg,
        ops.iter().map(|p| (p.s1, p.s2, p.direction)),
    )
}
