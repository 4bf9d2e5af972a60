//! Random instance generation, counterexample search and ratio maximization.

pub mod campaign;
pub mod generate;
pub mod optimize;
pub mod registry;

pub use campaign::{replay, run_eq33, search_counterexample, SearchConfig, SearchReport};
pub use generate::{InstanceGenerator, Sample, ValueDistribution, WeightMode};
pub use optimize::{maximize_ratio, OptReport, OptTarget, TraceRow};
pub use registry::{evaluate, sample_instance, InequalityId, SuiteParams};
