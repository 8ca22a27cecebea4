//! Verification of the tester and corrector contracts, exact and sampled,
//! plus the parameter calculators.
//!
//! Exact sweeps run in parallel and collect their per-item results in input
//! order before reducing, so reports do not depend on the thread count.

mod corruption;
pub mod params;
mod report;
mod stats;
mod testability;
mod verify;

pub use corruption::{error_patterns, patterns_up_to, CorruptionKind, CorruptionModel};
pub use report::{write_reports_csv, write_reports_json, Counterexample, ReportKind, VerificationReport, REPORT_HEADER};
pub use stats::{clopper_pearson, Estimate, CONFIDENCE};
pub use testability::{measure_testability, measure_testability_mc, Testability};
pub use verify::{
    monte_carlo_success, nested_success_probability, nested_success_probability_for, simulate, soundness_sweep,
    verify_completeness, write_simulation_csv, SimulationRow, SweepOptions,
};
