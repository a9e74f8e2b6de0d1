use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why an energy was rejected by the effective-quantity calculations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutsideReason {
    /// `E` lies in the scaled support hull `[λ v_-, λ v_+]`.
    InsideSupport { lo: f64, hi: f64 },
    /// The harmonic average satisfies `|h| >= 2`.
    HarmonicTooLarge { h: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy {energy} is outside the effective band: {reason}")]
    OutsideBand { energy: f64, reason: OutsideReason },

    #[error("inverse moment vanishes at energy {energy}; the harmonic average is a signed infinity")]
    InfiniteHarmonic { energy: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid growth law: {0}")]
    InvalidLaw(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular shell {shell} at energy {energy}: inverse mean of the shell vanishes")]
    SingularShell { shell: u64, energy: f64 },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("need at least {needed} trials, got {got}")]
    InsufficientTrials { needed: usize, got: usize },

    #[error("degenerate denominator in truncated m-function at z = {re}{im:+}i")]
    DegenerateDenominator { re: f64, im: f64 },
}

impl std::fmt::Display for OutsideReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutsideReason::InsideSupport { lo, hi } => {
                write!(f, "inside the scaled support [{lo}, {hi}]")
            }
            OutsideReason::HarmonicTooLarge { h } => write!(f, "|h| = {} >= 2", h.abs()),
        }
    }
}
