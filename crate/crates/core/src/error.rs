use thiserror::Error;

/// Errors raised by the solver, the instance model and the oracles.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HlfError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("diagonal entry {index} disagrees with b")]
    DiagonalMismatch { index: usize },

    #[error("grid side {side} does not match problem size {n}")]
    GridSizeMismatch { side: usize, n: usize },

    #[error("grid metadata present but edges do not form the all-connected {side}x{side} grid")]
    NotAGrid { side: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("q(x) is odd on a kernel vector; input is corrupted")]
    OddQuadraticForm,

    #[error("linear system for the particular solution is inconsistent")]
    InconsistentSystem,

    #[error("binary rank {r} exceeds enumeration cap {cap}; raise it with --cap or HLF_MAX_R")]
    RankCapExceeded { r: usize, cap: usize },

    #[error("problem size {n} exceeds the {what} cap of {cap}")]
    SizeCapExceeded {
        n: usize,
        cap: usize,
        what: &'static str,
    },

    #[error("kernel dimension {dim} is too large for exhaustive checking and linearity was not verified")]
    KernelTooLarge { dim: usize },

    #[error("chunk [{start}, {start}+{count}) is outside [0, {total})")]
    ChunkOutOfRange { start: u64, count: u64, total: u64 },

    #[error("domain error: {0}")]
    Domain(String),
}

impl HlfError {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            HlfError::DimensionMismatch { .. } => "dimension_mismatch",
            HlfError::IndexOutOfRange { .. } => "index_out_of_range",
            HlfError::NotSymmetric { .. } => "not_symmetric",
            HlfError::DiagonalMismatch { .. } => "diagonal_mismatch",
            HlfError::GridSizeMismatch { .. } => "grid_size_mismatch",
            HlfError::NotAGrid { .. } => "not_a_grid",
            HlfError::Parse(_) => "parse",
            HlfError::OddQuadraticForm => "odd_quadratic_form",
            HlfError::InconsistentSystem => "inconsistent_system",
            HlfError::RankCapExceeded { .. } => "rank_cap_exceeded",
            HlfError::SizeCapExceeded { .. } => "size_cap_exceeded",
            HlfError::KernelTooLarge { .. } => "kernel_too_large",
            HlfError::ChunkOutOfRange { .. } => "chunk_out_of_range",
            HlfError::Domain(_) => "domain",
        }
    }

    /// True for the resource-cap family of errors.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            HlfError::RankCapExceeded { .. }
                | HlfError::SizeCapExceeded { .. }
                | HlfError::KernelTooLarge { .. }
        )
    }
}

pub type Result<T, E = HlfError> = std::result::Result<T, E>;
