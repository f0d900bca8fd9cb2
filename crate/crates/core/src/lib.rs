//! Dynamic treedepth maintenance with long path and long cycle detection.
//!
//! The entry points are [`dynamic::TdStructure`] for treedepth under edge
//! updates, [`postpone::LongPath`] and [`postpone::LongCycle`] for the
//! detection problems, and [`oracle`] for brute-force references.

pub mod cores;
pub mod cycle;
pub mod dynamic;
pub mod forest;
pub mod graph;
pub mod linkcut;
pub mod obstructions;
pub mod oracle;
pub mod partition;
pub mod paths;
pub mod postpone;
pub mod scheme;
pub mod solver;
mod store;

pub use forest::ElimForest;
pub use graph::{Graph, Vid};
