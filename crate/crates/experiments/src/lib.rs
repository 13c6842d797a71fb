//! Experiments and golden-value regressions over the max k-cut game
//! engine. Each experiment returns an [`report::ExperimentReport`] that is
//! fully determined by its config.

pub mod config;
pub mod dynamics_sweep;
pub mod er;
pub mod figure1;
pub mod fuzz;
pub mod report;
pub mod sweep;
pub mod table1;
pub mod theorems;
pub mod triangle;

pub use report::ExperimentReport;
