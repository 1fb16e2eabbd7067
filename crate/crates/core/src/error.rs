use thiserror::Error;

/// Errors raised by the closed forms, solvers and the scattering machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `x` lies within the exclusion radius of a divergence of the closed form.
    #[error(
        "x = {x} lies within the exclusion radius of the singularity at {singularity}; regrid"
    )]
    SingularPoint { x: f64, singularity: f64 },

    /// A finite-difference step reaches too close to a singularity.
    #[error("step h = {h} exceeds a tenth of the distance {distance} to the nearest singularity")]
    StepTooLarge { h: f64, distance: f64 },

    /// `x` is outside the cell on which a closed form is defined.
    #[error("x = {x} is outside the valid cell ({lo}, {hi})")]
    DomainViolation { x: f64, lo: f64, hi: f64 },

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("need at least {needed} eigenvalues, report has {available}")]
    InsufficientEigenvalues { needed: usize, available: usize },

    #[error("evanescent exponent {exponent} overflows double precision")]
    EvanescentOverflow { exponent: f64 },

    #[error("local basis Wronskian {wronskian:e} at x = {x} is degenerate")]
    DegenerateMatch { x: f64, wronskian: f64 },

    #[error("slice refinement up to {slices} slices still changes T by {change:e}")]
    SliceTooCoarse { slices: usize, change: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
