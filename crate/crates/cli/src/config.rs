use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use curvlab_core::sphere::MAX_ORACLE_DIM;

/// A verification suite. The declaration order is the report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Suite {
    Projection,
    KahlerMean,
    KahlerL2,
    HermitianMean,
    HermitianL2,
    Bisectional,
    BisectionalMean,
    ZeroHsc,
    TraceTable,
    Variance,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 10] = [
        Suite::Projection,
        Suite::KahlerMean,
        Suite::KahlerL2,
        Suite::HermitianMean,
        Suite::HermitianL2,
        Suite::Bisectional,
        Suite::BisectionalMean,
        Suite::ZeroHsc,
        Suite::TraceTable,
        Suite::Variance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Projection => "projection",
            Suite::KahlerMean => "kahler-mean",
            Suite::KahlerL2 => "kahler-l2",
            Suite::HermitianMean => "hermitian-mean",
            Suite::HermitianL2 => "hermitian-l2",
            Suite::Bisectional => "bisectional",
            Suite::BisectionalMean => "bisectional-mean",
            Suite::ZeroHsc => "zero-hsc",
            Suite::TraceTable => "trace-table",
            Suite::Variance => "variance",
            Suite::All => "all",
        }
    }

    /// The concrete suites this selection expands to.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::CONCRETE.to_vec(),
            other => vec![other],
        }
    }

    /// Stable index used to key RNG streams.
    pub fn stream_index(self) -> u64 {
        self as u64
    }

    /// Whether the suite needs a Kähler tensor.
    pub fn needs_kahler(self) -> bool {
        matches!(
            self,
            Suite::KahlerMean | Suite::KahlerL2 | Suite::Bisectional | Suite::BisectionalMean | Suite::Variance
        )
    }

    /// Whether failures in this suite affect the exit status. The bisectional
    /// suite adjudicates between two closed forms and never gates.
    pub fn gates_exit(self) -> bool {
        self != Suite::Bisectional
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub format: Format,
    /// Destination of the report; `None` is standard output.
    pub output: Option<PathBuf>,
    /// Tensor file to verify instead of random draws.
    pub fixture: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            n_list: vec![1, 2, 3, 4],
            trials: 20,
            mc_samples: 0,
            seed: 42,
            rel_tol: 1e-10,
            format: Format::Json,
            output: None,
            fixture: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("n list is empty")]
    EmptyDimensions,
    #[error("n = {0} is outside 1..={MAX_ORACLE_DIM}")]
    Dimension(usize),
    #[error("trials must be at least 1")]
    Trials,
    #[error("mc-samples must be 0 (skip) or at least 2, got {0}")]
    McSamples(usize),
    #[error("rel-tol must be finite and positive, got {0}")]
    RelTol(f64),
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(ConfigError::EmptyDimensions);
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0 || n > MAX_ORACLE_DIM) {
            return Err(ConfigError::Dimension(n));
        }
        if self.trials == 0 {
            return Err(ConfigError::Trials);
        }
        if self.mc_samples == 1 {
            return Err(ConfigError::McSamples(self.mc_samples));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(ConfigError::RelTol(self.rel_tol));
        }
        Ok(())
    }

    /// Sorted, deduplicated dimensions.
    pub fn dimensions(&self) -> Vec<usize> {
        let mut dims = self.n_list.clone();
        dims.sort_unstable();
        dims.dedup();
        dims
    }
}
