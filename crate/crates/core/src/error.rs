use thiserror::Error;

/// Errors raised by scenario construction, beamforming and the game analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("SNR is ambiguous: direct distances differ across links ({min} m vs {max} m)")]
    AmbiguousSnr { min: f64, max: f64 },

    #[error("degenerate channel: direct channel of link {link} has zero norm")]
    DegenerateChannel { link: usize },

    #[error("Wiener filter needs a positive noise power, got {0}")]
    SingularMatrix(f64),

    #[error("noise power must be positive, got {0}")]
    InvalidNoise(f64),

    #[error("invalid deviation: {0}")]
    InvalidDeviation(String),

    #[error("{what} needs enumeration over {links} links, above the cap of {cap}")]
    TooManyLinks { what: &'static str, links: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
