//! Experiment orchestration for the online min-sum set cover toolkit:
//! simulation, audit, oracle and lower-bound runs, plus their report files.

pub mod config;
pub mod report;
pub mod runs;
