use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("unmatched pole in gamma numerator at {re}{im:+}i")]
    Infinity { re: f64, im: f64 },

    #[error("series did not converge within {max_terms} terms")]
    Convergence { max_terms: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate connection: a - b = {0} is an integer")]
    Degenerate(f64),

    #[error("coefficient singularity: factor `{factor}` = {value:e}")]
    CoefficientSingularity { factor: &'static str, value: f64 },

    #[error("argument {0} outside the domain r > 0")]
    Domain(f64),

    #[error("denominator polynomial vanishes at y = {0}")]
    DenominatorZero(f64),

    #[error("m-dependent bracket denominator vanishes at k = {0}")]
    BracketZero(f64),

    #[error("S-matrix value not unimodular: |S| = {0}")]
    NonUnitary(f64),

    #[error("ill-conditioned phase extraction: condition number {0:.1}")]
    IllConditioned(f64),

    #[error("potential has not reached its plateau at r = {r}: deviation {deviation:e}")]
    NoPlateau { r: f64, deviation: f64 },

    #[error("no sign change of the matching function in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("numerical overflow during radial integration at r = {0}")]
    Overflow(f64),

    #[error("invalid family parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
