//! Exact-arithmetic toolkit for counting rational points of bounded height
//! inside shrinking windows around the distinguished point `Q = [1:1]x[1:1]`
//! of the del Pezzo surface obtained by blowing up `P^1 x P^1` in the three
//! points `[1:0]x[1:0]`, `[0:1]x[1:0]`, `[1:0]x[0:1]`.
//!
//! The crate is organised around seven concerns:
//!
//! * [`rat`] — a small checked-`i128` rational type plus the integer
//!   power-comparison helpers used for exact window membership tests;
//! * [`surface`] — projective point pairs, the anticanonical height, the
//!   affine chart at `Q`, the region decomposition, and the thin-set test;
//! * [`curves`] — curve descriptors, approximation constants, membership
//!   tests for the accumulating lines and the nodal/cuspidal quintic
//!   families, and the empirical approximation-exponent estimator;
//! * [`pell`] — the rational parametrization of off-line points, gcd
//!   profiles, the associated quadratic families `C3*X^2 + D`, and the
//!   divisibility translation that turns point counting into congruence
//!   counting;
//! * [`congruence`] — root counting for quadratic congruences, average
//!   orders, root sequences, star discrepancy, and windowed central counts;
//! * [`zoom`] — the two independent window enumerators (brute force and
//!   parametric), bucketed count reports, threshold statistics, and
//!   exponent regression;
//! * [`toric`] — complete smooth fans for the relevant surfaces, positive
//!   relations, Cox-coordinate inequalities, and admissible multidegrees.
//!
//! Every membership decision (window, region, thin set, height bound) is
//! made in exact integer or rational arithmetic. Floating point appears
//! only in display output, regression slopes and provably conservative
//! loop-bound prefilters whose results are re-checked exactly.

pub mod congruence;
pub mod curves;
pub mod pell;
pub mod rat;
pub mod surface;
pub mod toric;
pub mod zoom;

/// Crate-wide error type. Each operation documents which variants it can
/// produce.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The point is one of the three blown-up base points, where the
    /// anticanonical height is undefined.
    #[error("point is one of the three blown-up base points")]
    BlownUpPoint,
    /// An intermediate integer value exceeded the supported 128-bit width
    /// (or a coordinate exceeded the documented input cap).
    #[error("integer overflow: value exceeds the supported 128-bit width")]
    Overflow,
    /// The affine chart at Q requires y != 0 and t != 0.
    #[error("point lies outside the affine chart (y=0 or t=0)")]
    OffChart,
    /// A rational parameter hit a pole of the parametrization.
    #[error("parameter is a pole of the parametrization")]
    PoleParameter,
    /// Too few usable points to run the estimator.
    #[error("fewer than {min} usable points supplied")]
    TooFewPoints { min: usize },
    /// Degenerate parametrization parameters (u = v, or bv = au, or a = b).
    #[error("degenerate parametrization parameters")]
    DegenerateParams,
    /// The chart point is not interior to one of the four open sectors.
    #[error("chart point is not interior to any of the four open sectors")]
    NotInRegion,
    /// Family parameters outside the positivity domain.
    #[error("parameters outside the positivity domain of the family")]
    OutOfDomain,
    /// The operation is only defined in a different region.
    #[error("record is not in the region required by this operation")]
    WrongRegion,
    /// Empty input sequence.
    #[error("empty input sequence")]
    EmptySequence,
    /// The counting window is empty or inverted.
    #[error("invalid counting window (need theta2 < theta1 <= A)")]
    BadWindow,
    /// The rescaled window would leave the chart of validity.
    #[error("window radius epsilon * B^(-1/r) is not < 1; the chart would be left")]
    WindowTooLarge,
    /// The parametric enumerator only supports the critical zoom factor.
    #[error("parametric enumeration requires zoom factor r = 5/2")]
    UnsupportedZoomFactor,
    /// Not one of the built-in surface names.
    #[error("unknown surface name {0:?}")]
    UnknownSurface(String),
    /// A user-supplied fan failed validation.
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    /// Regression input is degenerate (fewer than 3 points or zero counts).
    #[error("degenerate regression series")]
    DegenerateSeries,
    /// Empty input where a nonempty list is required.
    #[error("empty input")]
    EmptyInput,
    /// The two enumeration strategies disagreed.
    #[error("enumeration strategies disagree: {missing} missing, {extra} extra")]
    OracleMismatch { missing: usize, extra: usize },
}
