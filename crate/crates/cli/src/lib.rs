pub mod report;
pub mod scenario;

pub use report::{Report, Verdict};
pub use scenario::{run_scenario, RunOptions, ScenarioError};
