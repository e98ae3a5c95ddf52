//! Exact simulation of the configuration model.

mod eea;
mod empirical;
mod matching;
mod rng;
mod sequence;

pub use eea::{check_record, eea_run, extract_components, ComponentRecord, ComponentSummary, ExplorationRecord, Explorer, StepKind};
pub use empirical::empirical_path;
pub use matching::{component_sizes, sample_multigraph};
pub use rng::replication_rng;
pub use sequence::{DegreeSequence, ParityAdjustment};
