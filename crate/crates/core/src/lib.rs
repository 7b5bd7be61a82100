//! Solver library for the joint design of a transit-centric multimodal
//! mobility system: transit line frequencies, AMoD fleet sizing and
//! allocation, and AMoD pricing, with passenger mode/route choice modeled
//! by logit-family models.
//!
//! The pipeline is:
//!
//! 1. [`model`] — network, demand, route and feasibility domain model;
//! 2. [`choice`] — fares, route utilities, MNL / nested-logit choice
//!    probabilities and their design gradients;
//! 3. [`lp`] — the inner boarding-flow LP, the per-iteration trust-region
//!    LP, and a self-contained simplex backend;
//! 4. [`optim`] — the successive-linearization design loop with
//!    multi-start;
//! 5. [`eval`] — true (nonlinear-choice) design evaluation, report
//!    metrics and brute-force verification oracles;
//! 6. [`io`] / [`sweep`] — scenario bundles, demand generation, design
//!    files and the sensitivity-sweep harness.

// Index-style loops mirror the time-by-entity structure of the math and
// stay; the flagged alternatives read worse here.
#![allow(clippy::needless_range_loop)]

pub mod choice;
pub mod error;
pub mod eval;
pub mod io;
pub mod lp;
pub mod mat;
pub mod model;
pub mod optim;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use mat::Mat;
pub use model::{
    Budgets, Commute, CommuteKind, CommuteRoute, DesignPoint, Leg, LegIndex, LegMode, LegRef,
    LineKind, ModeClass, Scenario, SharedTrip, StationRegion, TimeGrid, TransitLine,
    ValidationReport, Violation,
};
