use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
///
/// Validation problems (`InvalidParam`, `WindowTooLarge`, `DegenerateGap`)
/// mean the request itself was malformed; numerical problems
/// (`NumericalFailure`, `NearSingular`, `WindingUnstable`) mean a
/// well-formed computation could not be completed to tolerance.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Band endpoints failed the ordering/disjointness requirements.
    #[error("invalid band set: {0}")]
    InvalidBands(String),

    /// The discriminant has a double root at tolerance: two bands touch and
    /// the gap between them is closed.
    #[error("degenerate gap: discriminant double root near {location:.12e}; merge the adjacent bands")]
    DegenerateGap { location: f64 },

    /// A perturbation window does not fit inside the truncated index range.
    #[error("perturbation window [-{half_width}, {half_width}] does not fit in a truncation of size {size}")]
    WindowTooLarge { half_width: i64, size: usize },

    /// An iterative eigenvalue computation ran out of its iteration budget.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A linear solve met a pivot too small to trust.
    #[error("near-singular solve: {0}")]
    NearSingular(String),

    /// Argument-principle winding could not be evaluated reliably even after
    /// shrinking the contour.
    #[error("unstable winding number near {center}: {reason}; retry with a smaller radius")]
    WindingUnstable { center: num_complex::Complex64, reason: String },

    /// A growth certificate failed its sample-grid validation.
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
}
