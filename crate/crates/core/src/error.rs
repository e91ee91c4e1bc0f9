use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found:?}")]
    Dimension { expected: &'static str, found: (usize, usize) },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// The block spectrum is complex: `(ħω − ε)² − 4ρ²(n+1) < 0`.
    #[error("complex spectrum in block n={n}: discriminant {discriminant}")]
    ComplexSpectrum { n: usize, discriminant: f64 },

    /// `ħω − ε ≥ 2ρ√(n+1)` does not hold (or `ħω ≤ ε`).
    #[error("outside reality domain in block n={n}: sin α would be {sin_alpha}")]
    RealityViolated { n: usize, sin_alpha: f64 },

    #[error("value {value} outside the admissible range [{min}, {max}] for {what}")]
    OutOfRange { what: &'static str, value: f64, min: f64, max: f64 },

    /// η-norm vanished or went negative (null direction of a singular metric).
    #[error("degenerate eta-norm {value}")]
    DegenerateNorm { value: f64 },

    #[error("singular point: {0}")]
    SingularPoint(&'static str),
}
