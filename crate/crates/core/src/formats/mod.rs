//! File formats read and written by the scenario runner.

pub mod polyline;
pub mod report;
pub mod scenario;

pub use polyline::{parse_polyline, read_loops, write_polyline};
pub use report::{Check, Comparison, RunReport};
pub use scenario::{LoopSpec, Scenario, Task};
