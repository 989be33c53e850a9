//! Drone delivery planning with battery-energy-aware routing.
//!
//! A plan is a [`SolutionString`] that partitions the delivery locations into
//! depot-to-depot routes. [`cost`] prices it, [`anneal`] searches for good
//! plans, [`oracle`] finds exact optima on tiny instances and [`milp`] exports
//! the equivalent mixed-integer program.

pub mod anneal;
pub mod battery;
pub mod cost;
pub mod energy;
pub mod harness;
pub mod milp;
pub mod error;
pub mod oracle;
pub mod scenario;
pub mod schedule;
pub mod solution;

pub use cost::{cost, cost_with, CostBreakdown, CostOptions, Evaluator, Objective};
pub use error::{Error, Result};
pub use scenario::{BatteryType, Params, Point, Scenario};
pub use solution::SolutionString;
