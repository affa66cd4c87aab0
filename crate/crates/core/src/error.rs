use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its physical domain.
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value produced while {0}")]
    NonFinite(&'static str),

    #[error("gate window collects no emission (integrated weight {0:e})")]
    DegenerateGate(f64),

    #[error("matrix is not a physical state: eigenvalue {0:e}")]
    NonPhysical(f64),

    #[error("no sudden change of the optimal measurement in [{lo}, {hi}] K")]
    NoSuddenChange { lo: f64, hi: f64 },

    #[error("concurrence still positive at {hi} K")]
    NoDeathInRange { hi: f64 },

    #[error("concurrence already zero at {lo} K")]
    AlreadyDead { lo: f64 },

    #[error("target T_c = {target} K not bracketed by kappa_ref in [{lo:e}, {hi:e}] 1/ns")]
    NotBracketed { target: f64, lo: f64, hi: f64 },

    #[error("malformed state matrix: {0}")]
    Format(String),

    #[error("at {axis} = {value}: {source}")]
    AtPoint {
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn at(self, axis: &'static str, value: f64) -> Self {
        Error::AtPoint {
            axis,
            value,
            source: Box::new(self),
        }
    }
}
