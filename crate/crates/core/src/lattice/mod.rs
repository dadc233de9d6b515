//! Simple random walk on Z²: local times, lattice discs, and the exact
//! Green's function of the walk killed on leaving a disc.

mod green;
mod point;
mod walk;

pub use green::{
    geometric_visit_moment, hitting_prob_zero, kac_moment_lattice, lattice_green_exact, origin_visit_samples,
    Estimate, GreenOptions, LatticeGreen,
};
pub use point::{LatticeDisc, LatticePoint, UNIT_STEPS};
pub use walk::{local_time_field, run_until_exit, simulate_srw, ExitRecord, LocalTimeField, Positions, StepSource, WalkRun};
