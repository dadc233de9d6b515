//! Intersection local times: products of lattice local times, the
//! kernel-smoothed continuum estimator, annulus excursion counting, scale
//! schedules, and the perfect / admissible point detectors.

mod estimator;
mod excursion;
mod kernel;
mod perfect;
mod product;
mod schedule;

pub use estimator::{intersection_local_time_continuum, intersection_sample_weights, intersection_wx};
pub use excursion::{
    count_zones, excursion_count, lattice_excursion_count, ExcursionCounter, ExcursionMode, LatticeAnnulus, Zone,
};
pub use kernel::{KernelProfile, KernelSpec};
pub use perfect::{admissible_test, perfect_point_test, AdmissibleReport, PerfectPointReport};
pub use product::{product_local_time, ProductField};
pub use schedule::{
    factorial_radius, factorial_target, lattice_radii, make_schedule, ScaleSchedule, ScheduleEntry, ScheduleKind,
};
