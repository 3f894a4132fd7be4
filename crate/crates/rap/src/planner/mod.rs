//! The greedy assembly-by-disassembly planner: one NDBG build per assembly,
//! one candidate partition per cell at every node, and a pluggable scorer
//! that picks the most robust candidate (classifier-first with simulator
//! fallback, simulator-only, clearance, or uniform random). Also the
//! exhaustive-optimal subset search, the random-sequence baseline, and
//! dataset generation over all reachable partitions.

mod cache;
mod dataset_gen;
mod optimal;

pub use cache::ScoreCache;
pub use dataset_gen::{dataset_generate, DatasetGenStats};
pub use optimal::optimal_search;

use crate::blocking::{
    build_blocking_table, build_ndbg, find_partitions, Assembly, BlockingError, BlockingTable,
    Ndbg, Partition, Subassembly,
};
use crate::simphys::TrialConfig;
use crate::surrogate::{rasterize, CnnModel, Prediction};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("subassembly {0:#x} admits no partition; no one-step translation sequence exists")]
    Infeasible(u64),
    #[error("search cap exceeded ({0} subassemblies)")]
    CapExceeded(usize),
    #[error(transparent)]
    Blocking(#[from] BlockingError),
}

/// A chosen two-handed operation: `s1` separates from `s2` along `direction`
/// (their union is `parent`).
#[derive(Clone, Debug)]
pub struct Operation {
    pub parent: Subassembly,
    pub s1: Subassembly,
    pub s2: Subassembly,
    pub direction: f64,
}

impl Operation {
    pub fn from_partition(p: &Partition) -> Self {
        Self {
            parent: p.parent(),
            s1: p.s1,
            s2: p.s2,
            direction: p.direction,
        }
    }
}

/// A full disassembly sequence (pre-order over the recursion tree) with the
/// simulator ground-truth score of every step. `total` is the product.
#[derive(Clone, Debug)]
pub struct AssemblySequence {
    pub steps: Vec<(Operation, f64)>,
    pub total: f64,
}

impl AssemblySequence {
    pub fn recompute_total(steps: &[(Operation, f64)]) -> f64 {
        steps.iter().map(|(_, r)| *r).product()
    }
}

/// How `select_best_partition` scores candidates.
pub enum ScorerKind<'m> {
    /// Classify every candidate with the CNN; pick the most confident High,
    /// falling back to simulating all candidates when none is High.
    SurrogateFirst { model: &'m CnnModel },
    /// Simulate every candidate and take the best score.
    SimulatorOnly,
    /// Average-minimum-distance analytic score.
    Clearance { samples: usize },
    /// Uniform choice among the candidates, seeded.
    Random { seed: u64 },
}

impl ScorerKind<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            ScorerKind::SurrogateFirst { .. } => "cnn",
            ScorerKind::SimulatorOnly => "sim",
            ScorerKind::Clearance { .. } => "clearance",
            ScorerKind::Random { .. } => "random",
        }
    }
}

/// Everything derived once per assembly before planning.
pub struct PlanContext<'a> {
    pub assembly: &'a Assembly,
    pub table: BlockingTable,
    pub ndbg: Ndbg,
    pub cfg: TrialConfig,
}

impl<'a> PlanContext<'a> {
    pub fn new(assembly: &'a Assembly, cfg: TrialConfig) -> Result<Self, BlockingError> {
        let table = build_blocking_table(assembly)?;
        let ndbg = build_ndbg(&table);
        Ok(Self {
            assembly,
            table,
            ndbg,
            cfg,
        })
    }

    pub fn candidates(&self, sub: Subassembly) -> Vec<Partition> {
        find_partitions(&self.table, &self.ndbg, sub)
    }
}

/// Execution counters and provenance for one planning run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PlanReport {
    pub assembly: String,
    pub scorer: String,
    pub seed: u64,
    /// Wall time; zero unless the caller opted into timing capture.
    pub wall_time_s: f64,
    /// Simulator executions (cache misses) attributable to this run.
    pub sim_calls: usize,
    /// CNN predictions issued.
    pub surrogate_calls: usize,
    /// Nodes where the surrogate classified nothing High and the planner
    /// fell back to simulating all candidates.
    pub fallback_nodes: usize,
    pub per_step_candidates: Vec<usize>,
    pub config: TrialConfig,
}

/// Among High predictions, the index with the strictly highest confidence
/// (first wins on ties, which keeps the lowest cell angle). `None` when no
/// candidate is High.
pub fn choose_high_confidence(predictions: &[Prediction]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in predictions.iter().enumerate() {
        if p.label == crate::surrogate::Label::High
            && best.map_or(true, |(_, c)| p.confidence > c)
        {
            best = Some((i, p.confidence));
        }
    }
    best.map(|(i, _)| i)
}

/// Index of the strictly largest score; first wins on ties.
pub fn argmax_score(scores: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    best
}

/// Runs the greedy recursion over one assembly. Every emitted step is scored
/// by the simulator afterwards (ground truth for the report) regardless of
/// which scorer chose it.
pub fn plan(
    ctx: &PlanContext,
    scorer: &ScorerKind,
    cache: &ScoreCache,
) -> Result<(AssemblySequence, PlanReport), PlanError> {
    let mut ops: Vec<Operation> = Vec::new();
    let mut per_step_candidates = Vec::new();
    let mut surrogate_calls = 0usize;
    let mut fallback_nodes = 0usize;
    let sim_calls_before = cache.sim_calls();
    let mut stack = vec![ctx.assembly.full_mask()];
    while let Some(sub) = stack.pop() {
        if sub.len() < 2 {
            continue;
        }
        let cands = ctx.candidates(sub);
        if cands.is_empty() {
            return Err(PlanError::Infeasible(sub.mask()));
        }
        per_step_candidates.push(cands.len());
        let chosen = select_best_partition(
            ctx,
            scorer,
            cache,
            &cands,
            sub,
            &mut surrogate_calls,
            &mut fallback_nodes,
        );
        let p = &cands[chosen];
        ops.push(Operation::from_partition(p));
        // Pre-order: recurse into s1 first (LIFO stack: push s2 first).
        stack.push(p.s2);
        stack.push(p.s1);
    }
    // Ground truth: simulator scores for every emitted operation.
    let scores = cache.score_many(ctx.assembly, &ctx.cfg, ops.iter().map(op_key_parts));
    let steps: Vec<(Operation, f64)> = ops.into_iter().zip(scores).collect();
    let total = AssemblySequence::recompute_total(&steps);
    let report = PlanReport {
        assembly: ctx.assembly.name.clone(),
        scorer: scorer.name().to_string(),
        seed: ctx.cfg.seed,
        wall_time_s: 0.0,
        sim_calls: cache.sim_calls() - sim_calls_before,
        surrogate_calls,
        fallback_nodes,
        per_step_candidates,
        config: ctx.cfg.clone(),
    };
    Ok((AssemblySequence { steps, total }, report))
}

fn op_key_parts(op: &Operation) -> (Subassembly, Subassembly, f64) {
    (op.s1, op.s2, op.direction)
}

fn select_best_partition(
    ctx: &PlanContext,
    scorer: &ScorerKind,
    cache: &ScoreCache,
    cands: &[Partition],
    sub: Subassembly,
    surrogate_calls: &mut usize,
    fallback_nodes: &mut usize,
) -> usize {
    match scorer {
        ScorerKind::SurrogateFirst { model } => {
            let predictions: Vec<Prediction> = cands
                .par_iter()
                .map(|p| model.predict(&rasterize(ctx.assembly, p, &ctx.cfg)))
                .collect();
            *surrogate_calls += predictions.len();
            if let Some(i) = choose_high_confidence(&predictions) {
                return i;
            }
            *fallback_nodes += 1;
            let scores = cache.score_many(
                ctx.assembly,
                &ctx.cfg,
                cands.iter().map(|p| (p.s1, p.s2, p.direction)),
            );
            argmax_score(&scores)
        }
        ScorerKind::SimulatorOnly => {
            let scores = cache.score_many(
                ctx.assembly,
                &ctx.cfg,
                cands.iter().map(|p| (p.s1, p.s2, p.direction)),
            );
            argmax_score(&scores)
        }
        ScorerKind::Clearance { samples } => {
            let scores: Vec<f64> = cands
                .par_iter()
                .map(|p| crate::simphys::clearance_score(ctx.assembly, p, &ctx.cfg, *samples))
                .collect();
            argmax_score(&scores)
        }
        ScorerKind::Random { seed } => {
            let mut rng = crate::rng::CounterRng::from_parts(*seed, &[0x5e1ec7, sub.mask()]);
            rng.below(cands.len())
        }
    }
}

/// Product of per-step simulator scores for an explicit sequence.
pub fn sequence_score(
    assembly: &Assembly,
    steps: &[Operation],
    cfg: &TrialConfig,
    cache: &ScoreCache,
) -> (Vec<f64>, f64) {
    let scores = cache.score_many(assembly, cfg, steps.iter().map(op_key_parts));
    let total = scores.iter().product();
    (scores, total)
}

/// `k` independent uniformly random sequences; reports their mean product
/// score and the individual scores.
pub fn random_baseline(
    ctx: &PlanContext,
    k: usize,
    seed: u64,
    cache: &ScoreCache,
) -> Result<(f64, Vec<f64>), PlanError> {
    let mut totals = Vec::with_capacity(k);
    for run in 0..k {
        let scorer = ScorerKind::Random {
            seed: crate::rng::hash2(seed, run as u64),
        };
        let (seq, _) = plan(ctx, &scorer, cache)?;
        totals.push(seq.total);
    }
    let mean = totals.iter().sum::<f64>() / k as f64;
    Ok((mean, totals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{validate_polygon, Point2};
    use crate::surrogate::Label;

    pub(crate) fn sq(x: f64, y: f64, w: f64, h: f64) -> Vec<Point2> {
        vec![
            Point2::new(x, y),
            Point2::new(x + w, y),
            Point2::new(x + w, y + h),
            Point2::new(x, y + h),
        ]
    }

    fn asm(name: &str, parts: Vec<(&str, Vec<Point2>)>) -> Assembly {
        Assembly::new(
            name,
            parts
                .into_iter()
                .map(|(id, pts)| (id.to_string(), validate_polygon(&pts).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn quick_cfg() -> TrialConfig {
        TrialConfig {
            trials: 4,
            max_steps: 500,
            seed: 3,
            ..TrialConfig::default()
        }
    }

    #[test]
    fn one_part_assembly_plans_empty() {
        let a = asm("one", vec![("a", sq(0.0, 0.0, 2.0, 2.0))]);
        let ctx = PlanContext::new(&a, quick_cfg()).unwrap();
        let cache = ScoreCache::new();
        let (seq, report) = plan(&ctx, &ScorerKind::SimulatorOnly, &cache).unwrap();
        assert!(seq.steps.is_empty());
        assert_eq!(seq.total, 1.0);
        assert_eq!(report.sim_calls, 0);
    }

    #[test]
    fn three_parts_two_steps() {
        let a = asm(
            "row",
            vec![
                ("a", sq(0.0, 0.0, 2.0, 2.0)),
                ("b", sq(2.5, 0.0, 2.0, 2.0)),
                ("c", sq(5.0, 0.0, 2.0, 2.0)),
            ],
        );
        let ctx = PlanContext::new(&a, quick_cfg()).unwrap();
        let cache = ScoreCache::new();
        let (seq, report) = plan(&ctx, &ScorerKind::SimulatorOnly, &cache).unwrap();
        assert_eq!(seq.steps.len(), 2, "n - 1 steps");
        assert!(
            (seq.total - seq.steps.iter().map(|(_, r)| r).product::<f64>()).abs() < 1e-15
        );
        for (op, _) in &seq.steps {
            assert_eq!(op.parent.mask(), op.s1.mask() | op.s2.mask());
            assert_eq!(op.s1.mask() & op.s2.mask(), 0);
        }
        assert_eq!(report.per_step_candidates.len(), 2);
    }

    #[test]
    fn surrogate_rule_examples() {
        use crate::surrogate::Prediction;
        let preds = vec![
            Prediction {
                label: Label::NotHigh,
                confidence: 0.9,
            },
            Prediction {
                label: Label::High,
                confidence: 0.6,
            },
            Prediction {
                label: Label::High,
                confidence: 0.8,
            },
        ];
        assert_eq!(choose_high_confidence(&preds), Some(2));
        let none = vec![
            Prediction {
                label: Label::NotHigh,
                confidence: 0.99,
            };
            3
        ];
        assert_eq!(choose_high_confidence(&none), None);
        let single = vec![Prediction {
            label: Label::High,
            confidence: 0.51,
        }];
        assert_eq!(choose_high_confidence(&single), Some(0));
    }

    #[test]
    fn argmax_breaks_ties_to_first() {
        assert_eq!(argmax_score(&[0.2, 0.9, 0.9]), 1);
        assert_eq!(argmax_score(&[0.5]), 0);
        assert_eq!(argmax_score(&[0.0, 0.0, 0.0]), 0);
    }

    #[test]
    fn sequence_score_is_product() {
        let r = [1.0f64, 0.5, 0.14];
        let total: f64 = r.iter().product();
        assert!((total - 0.07).abs() < 1e-12);
        let ones = [1.0f64; 5];
        assert_eq!(ones.iter().product::<f64>(), 1.0);
        let with_zero = [0.9f64, 0.0, 1.0];
        assert_eq!(with_zero.iter().product::<f64>(), 0.0);
    }

    #[test]
    fn random_baseline_reproducible_and_bounded() {
        let a = asm(
            "pair",
            vec![("a", sq(0.0, 0.0, 2.0, 2.0)), ("b", sq(3.0, 0.0, 2.0, 2.0))],
        );
        let ctx = PlanContext::new(&a, quick_cfg()).unwrap();
        let cache = ScoreCache::new();
        let (mean1, runs1) = random_baseline(&ctx, 3, 11, &cache).unwrap();
        let (mean2, runs2) = random_baseline(&ctx, 3, 11, &cache).unwrap();
        assert_eq!(mean1, mean2);
        assert_eq!(runs1, runs2);
        let max = runs1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(mean1 <= max + 1e-12);
    }

    #[test]
    fn plan_determinism() {
        let a = asm(
            "row",
            vec![
                ("a", sq(0.0, 0.0, 2.0, 2.0)),
                ("b", sq(2.5, 0.0, 2.0, 2.0)),
                ("c", sq(5.0, 0.0, 2.0, 2.0)),
            ],
        );
        let ctx = PlanContext::new(&a, quick_cfg()).unwrap();
        let (s1, r1) = plan(&ctx, &ScorerKind::SimulatorOnly, &ScoreCache::new()).unwrap();
        let (s2, r2) = plan(&ctx, &ScorerKind::SimulatorOnly, &ScoreCache::new()).unwrap();
        assert_eq!(s1.steps.len(), s2.steps.len());
        for ((o1, v1), (o2, v2)) in s1.steps.iter().zip(s2.steps.iter()) {
            assert_eq!(o1.s1, o2.s1);
            assert_eq!(o1.direction.to_bits(), o2.direction.to_bits());
            assert_eq!(v1.to_bits(), v2.to_bits());
        }
        assert_eq!(r1.sim_calls, r2.sim_calls);
    }
}
