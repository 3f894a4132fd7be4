use crate::blocking::{quantize_angle, Assembly, Partition, Subassembly};
use crate::rng::derive_stream;
use crate::simphys::{robustness_score, TrialConfig};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Memoized simulator scores keyed by `(s1, s2, direction)` with the
/// direction quantized on the angular grid.
///
/// A score is a pure function of the key: each operation draws its trials
/// from the stream `hash(cfg.seed, s1, s2, direction)`, so the cached value
/// never depends on evaluation order, sharing, or thread scheduling. The
/// miss counter tracks actual simulator executions.
#[derive(Default)]
pub struct ScoreCache {
    map: Mutex<HashMap<(u64, u64, i64), f64>>,
    misses: AtomicUsize,
}

impl ScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Simulator executions so far (cache misses).
    pub fn sim_calls(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(s1: Subassembly, s2: Subassembly, direction: f64) -> (u64, u64, i64) {
        (s1.mask(), s2.mask(), quantize_angle(direction))
    }

    /// The per-operation trial configuration: same physics, but an
    /// independent RNG stream derived from the operation key.
    fn op_cfg(cfg: &TrialConfig, key: (u64, u64, i64)) -> TrialConfig {
        let mut op_cfg = cfg.clone();
        op_cfg.seed = derive_stream(cfg.seed, &[key.0, key.1, key.2 as u64]);
        op_cfg
    }

    /// Scores one operation, memoized.
    pub fn score(
        &self,
        assembly: &Assembly,
        cfg: &TrialConfig,
        s1: Subassembly,
        s2: Subassembly,
        direction: f64,
    ) -> f64 {
        let key = Self::key(s1, s2, direction);
        if let Some(&v) = self.map.lock().unwrap().get(&key) {
            return v;
        }
        let partition = synthetic_partition(s1, s2, direction);
        let score = robustness_score(assembly, &partition, &Self::op_cfg(cfg, key));
        let mut map = self.map.lock().unwrap();
        if map.insert(key, score.value).is_none() {
            self.misses.fetch_add(1, Ordering::Relaxed);
        }
        score.value
    }

    /// Scores a batch in parallel, preserving order.
    pub fn score_many(
        &self,
        assembly: &Assembly,
        cfg: &TrialConfig,
        ops: impl Iterator<Item = (Subassembly, Subassembly, f64)>,
    ) -> Vec<f64> {
        let ops: Vec<(Subassembly, Subassembly, f64)> = ops.collect();
        ops.par_iter()
            .map(|&(s1, s2, d)| self.score(assembly, cfg, s1, s2, d))
            .collect()
    }
}

/// Rebuilds a partition value from its key parts for the simulator (the
/// valid range is irrelevant to scoring).
fn synthetic_partition(s1: Subassembly, s2: Subassembly, direction: f64) -> Partition {
    Partition {
        s1,
        s2,
        direction,
        valid_range: crate::geom2d::Arc::full(),
        cell_angle: direction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{validate_polygon, Point2};

    fn pair() -> Assembly {
        let sq = |x: f64| {
            validate_polygon(&[
                Point2::new(x, 0.0),
                Point2::new(x + 2.0, 0.0),
                Point2::new(x + 2.0, 2.0),
                Point2::new(x, 2.0),
            ])
            .unwrap()
        };
        Assembly::new("pair", vec![("a".into(), sq(0.0)), ("b".into(), sq(3.0))]).unwrap()
    }

    #[test]
    fn memoizes_and_counts_misses() {
        let a = pair();
        let cfg = TrialConfig {
            trials: 2,
            max_steps: 300,
            ..TrialConfig::default()
        };
        let cache = ScoreCache::new();
        let s1 = Subassembly::single(0);
        let s2 = Subassembly::single(1);
        let v1 = cache.score(&a, &cfg, s1, s2, std::f64::consts::PI);
        let v2 = cache.score(&a, &cfg, s1, s2, std::f64::consts::PI);
        assert_eq!(v1, v2);
        assert_eq!(cache.sim_calls(), 1);
        // A direction differing below the angular grid resolution hits.
        let v3 = cache.score(&a, &cfg, s1, s2, std::f64::consts::PI + 1e-9);
        assert_eq!(v1, v3);
        assert_eq!(cache.sim_calls(), 1);
        let _ = cache.score(&a, &cfg, s2, s1, 0.0);
        assert_eq!(cache.sim_calls(), 2);
    }

    #[test]
    fn values_independent_of_evaluation_order() {
        let a = pair();
        let cfg = TrialConfig {
            trials: 4,
            max_steps: 300,
            seed: 12,
            ..TrialConfig::default()
        };
        let ops = [
            (Subassembly::single(0), Subassembly::single(1), std::f64::consts::PI),
            (Subassembly::single(1), Subassembly::single(0), 0.0),
        ];
        let c1 = ScoreCache::new();
        let forward: Vec<f64> = ops
            .iter()
            .map(|&(s1, s2, d)| c1.score(&a, &cfg, s1, s2, d))
            .collect();
        let c2 = ScoreCache::new();
        let mut backward: Vec<f64> = ops
            .iter()
            .rev()
            .map(|&(s1, s2, d)| c2.score(&a, &cfg, s1, s2, d))
            .collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }
}
