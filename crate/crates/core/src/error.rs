use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level index {index} beyond custom table of length {len}")]
    IndexBeyondTable { index: usize, len: usize },

    #[error("level-sequence limit unavailable for a finite table")]
    LimitUnavailable,

    #[error("index {index} beyond computed moment range (n_max = {n_max})")]
    IndexBeyondComputed { index: usize, n_max: usize },

    #[error("no closed-form measure known for this spectrum")]
    NoClosedFormMeasure,

    #[error("quadrature not converged: error estimate {error:e} above tolerance {tol:e} after {panels} panels")]
    QuadratureNotConverged { error: f64, tol: f64, panels: usize },

    #[error("label J = {j} outside [0, {j_star}) for this spectrum")]
    OutOfDomain { j: f64, j_star: f64 },

    #[error("series not certified within n_cap = {n_cap} terms (best relative tail {best:e})")]
    CapExceeded { n_cap: usize, best: f64 },

    #[error("states built on different spectra")]
    SpectrumMismatch,

    #[error("levels {n} and {m} degenerate within tolerance (|e_n - e_m| = {gap:e})")]
    DegeneratePair { n: usize, m: usize, gap: f64 },

    #[error("variance bound violated at J = {j}: v = {v}, bound = {bound}")]
    BoundViolated { j: f64, v: f64, bound: f64 },

    #[error("series term overflowed f64 range at n = {n}")]
    Overflow { n: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("time grid must be strictly increasing")]
    InvalidTimeGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
