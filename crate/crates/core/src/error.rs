use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency must be non-negative, got {0}")]
    NegativeFrequency(f64),

    #[error("characteristic function evaluated at the kernel pole (|lambda + {order}| = {distance:e})")]
    Pole { order: u32, distance: f64 },

    #[error("crossing at omega = {omega} is tangential (transversality expression {value:e})")]
    Degenerate { omega: f64, value: f64 },

    #[error("point at omega = {omega} is not on the Hopf set (residual {residual:e})")]
    OffCurve { omega: f64, residual: f64 },

    #[error("step size {step} too large: {reason}")]
    StepTooLarge { step: f64, reason: String },

    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },

    #[error("root finder failed: {0}")]
    RootFinder(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
