//! Simulation and exact numerics for thick points of planar random walks,
//! Brownian motion and stable processes.
//!
//! The crate is organized by object: lattice walks and their Green's
//! functions ([`lattice`]), continuous planar paths and occupation measures
//! ([`paths`]), intersection local times and excursion counts
//! ([`intersection`]), thick-point statistics ([`spectra`]), continuum
//! kernels ([`operators`]) and the experiment runner ([`harness`]).

pub mod bins;
pub mod error;
pub mod harness;
pub mod intersection;
pub mod lattice;
pub mod operators;
pub mod paths;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use intersection::{KernelSpec, ProductField};
pub use lattice::{Estimate, LatticePoint, LocalTimeField, WalkRun};
pub use paths::{KSet, PlanarPath, Point2};
pub use spectra::{SpectrumCurve, ThickCount, TheoryLaw};
