use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{p}/{q} is not a reduced fraction with positive denominator")]
    NotCoprime { p: i64, q: i64 },

    #[error("angle {alpha} is an integer multiple of pi; use frft_multiple_pi")]
    MultipleOfPi { alpha: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("signal has unbounded support: {0}")]
    UnboundedSupport(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("window [{window_lo}, {window_hi}] does not cover the support [{support_lo}, {support_hi}]")]
    Truncated {
        window_lo: f64,
        window_hi: f64,
        support_lo: f64,
        support_hi: f64,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("bundle covers the torus: section measure {measure} >= 1")]
    CoversTorus { measure: f64 },

    #[error("truncation tail {tail:e} exceeds {threshold:e}; increase m_range beyond {m_range}")]
    TailTooLarge {
        tail: f64,
        threshold: f64,
        m_range: i64,
    },

    #[error("level {level:e} not attained within scan range {range}: max |u^| = {last:e} on the last quarter; widen the scan range")]
    LevelUnattained { level: f64, range: f64, last: f64 },

    #[error("phase {index} has modulus {modulus}, expected 1")]
    NonUnimodular { index: usize, modulus: f64 },

    #[error("achieved error {achieved:e} exceeds epsilon {epsilon:e} at angle {angle} ({diagnostics})")]
    EpsilonNotAchieved {
        angle: f64,
        achieved: f64,
        epsilon: f64,
        diagnostics: String,
    },
}
