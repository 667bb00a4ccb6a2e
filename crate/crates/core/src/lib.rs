//! Entanglement harvesting by a pair of Unruh-DeWitt detectors coupled to a
//! massless scalar field in 1+1 dimensions, in free space or in front of a
//! static, Carlitz-Willey or black-hole-collapse mirror.
//!
//! All quantities are reported per unit squared coupling and in units of the
//! switching width.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appendix;
pub mod correlators;
pub mod detectors;
pub mod entanglement;
pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod trajectories;

pub use correlators::{
    Background, Coupling, CorrelatorRequest, DerivativeRoute, Event, PointValue, Regulators,
};
pub use detectors::{DetectorPair, DetectorSpec, Ordering};
pub use entanglement::{
    concurrence, harvest, local_term, negativity, nonlocal_term, DensityMatrix2Q, Estimate,
    HarvestResult, Warning,
};
pub use error::{HarvestError, Result};
pub use quadrature::{QuadResult, QuadSpec};
pub use trajectories::MirrorTrajectory;
