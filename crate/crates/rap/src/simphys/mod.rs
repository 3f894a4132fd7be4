//! Deterministic-under-seed 2D rigid-body simulation of a single assembly
//! operation: a proportional path-tracking controller drives the moving
//! subassembly from a separated start pose to its assembled pose while
//! uniform perpendicular actuation noise disturbs every control step.
//! The robustness score of the operation is the success fraction over
//! independent Monte Carlo trials.

mod body;
mod controller;
mod trial;
mod world;

pub use body::RigidBody;
pub use controller::{control_wrench, perturb_force, ControllerParams, NoiseParams};
pub use trial::{
    clearance_of_setup, clearance_score, make_operation_setup, robustness_score, run_trial,
    score_setup, setup_for_masks, OperationSetup, RobustnessScore, TraceRow, TrialConfig,
};
pub use world::{PhysicsParams, World};
