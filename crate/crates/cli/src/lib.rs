//! Verification harness for the identities in `curvlab-core`: tensor fixture
//! files, suite runners and deterministic JSON/CSV reports.

pub mod config;
pub mod fixture;
pub mod report;
pub mod suite;

pub use config::{ConfigError, Format, Suite, SuiteConfig};
pub use fixture::{emit_fixture, FixtureError, FixtureKind, FixtureParams, TensorFile};
pub use report::{Case, Detail, Summary, VerificationReport};
pub use suite::{run_suite, RunError};

/// Environment variable capping the worker thread count (0 or unset means
/// the rayon default).
pub const THREADS_ENV: &str = "CURVLAB_THREADS";
