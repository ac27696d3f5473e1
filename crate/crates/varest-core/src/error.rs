use alloc::string::String;

/// Errors raised by population construction, sampling, estimator
/// evaluation and the MSE theory.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Population too small or without variation in `y` or `x`.
    #[error("degenerate population: {0}")]
    DegeneratePopulation(&'static str),

    /// Sample size outside `[2, N]`.
    #[error("invalid design: sample size {n} not in [2, {population_size}]")]
    InvalidDesign { n: usize, population_size: usize },

    /// Exhaustive enumeration would exceed the configured cap.
    #[error("C({population_size},{n}) = {combinations} subsets exceeds the enumeration cap {cap}")]
    TooManyCombinations {
        population_size: usize,
        n: usize,
        combinations: u128,
        cap: u64,
    },

    /// A sample on which the requested estimator is undefined
    /// (typically `sx2 = 0` under a ratio-type estimator).
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    /// An estimator specification that violates its own constraints.
    #[error("invalid estimator spec: {0}")]
    InvalidSpec(String),

    /// A real-power evaluation left its domain (negative base with a
    /// fractional exponent, or a non-finite result).
    #[error("numerical domain error: {0}")]
    NumericalDomain(&'static str),

    /// A closed-form optimum whose normal equations are singular.
    #[error("singular optimum: {0}")]
    SingularOptimum(&'static str),

    /// The auxiliary variable carries no usable information
    /// (`beta2x_star = 0`).
    #[error("degenerate auxiliary variable: {0}")]
    DegenerateAuxiliary(&'static str),

    /// A parameter search grid with no evaluable points.
    #[error("empty search grid")]
    EmptyGrid,

    /// Population parameters that contradict a moment inequality or a
    /// cross-field identity.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for failures caused by the drawn sample rather than by the
    /// inputs; these are the errors an `allow_partial` run may skip.
    pub fn is_sample_driven(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSample(_) | Error::NumericalDomain(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
