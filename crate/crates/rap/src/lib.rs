//! Robust two-handed assembly sequence planning for planar polygonal assemblies.
//!
//! The pipeline: [`blocking`] builds a non-directional blocking graph over the
//! circle of translation directions and extracts candidate partitions,
//! [`simphys`] scores a partition's mating motion by Monte Carlo simulation
//! under actuation noise, [`surrogate`] trains a convolutional classifier that
//! predicts which operations are highly robust from start/goal rasters, and
//! [`planner`] runs the greedy assembly-by-disassembly search with either the
//! classifier or the simulator in the loop.
//!
//! See the `examples/` directory for runnable tours of each capability; the
//! `rap` binary exposes the same operations as subcommands.

pub mod blocking;
pub mod cli;
pub mod geom2d;
pub mod planner;
pub mod rng;
pub mod simphys;
pub mod surrogate;

pub use blocking::{Assembly, BlockingTable, Ndbg, Partition, Subassembly};
pub use planner::{AssemblySequence, PlanReport, ScorerKind};
pub use simphys::{RobustnessScore, TrialConfig};
pub use surrogate::{CnnModel, ImagePair, Label};
