use stefan_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_NON_CONVERGENCE: u8 = 2;
pub const EXIT_INVALID_CONFIG: u8 = 3;
pub const EXIT_HYPOTHESIS: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: CoreError,
    },

    /// A numerical failure on a problem whose existence certificate does not hold.
    #[error("{stage}: {source} (existence hypotheses do not hold: {failed})")]
    Hypothesis {
        stage: &'static str,
        failed: String,
        #[source]
        source: CoreError,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn core(stage: &'static str, source: CoreError) -> Self {
        CliError::Core { stage, source }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_INVALID_CONFIG,
            CliError::Hypothesis { .. } => EXIT_HYPOTHESIS,
            CliError::Core { source, .. } if is_numerical(source) => EXIT_NON_CONVERGENCE,
            CliError::Core { source, .. } => match source {
                CoreError::Io(_) | CoreError::Csv(_) => EXIT_OTHER,
                _ => EXIT_INVALID_CONFIG,
            },
            CliError::Io { .. } | CliError::Output(_) => EXIT_OTHER,
        }
    }
}

/// Failures of the solve itself, as opposed to bad input.
pub fn is_numerical(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::InnerNonConvergence { .. }
            | CoreError::NoSignChange { .. }
            | CoreError::NoRoot { .. }
            | CoreError::KernelOverflow { .. }
            | CoreError::NonFinite { .. }
            | CoreError::ContractionUndefined(_)
            | CoreError::Instability { .. }
    )
}
