//! Crate-wide error type.

use chrono::NaiveDate;
use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by the pricing, estimation, and ingestion layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Instrument carries non-vanilla features and cannot be priced here.
    #[error("rejected instrument {bond_id}: {reason}")]
    RejectedInstrument { bond_id: String, reason: String },

    /// Valuation date is on or after the maturity date.
    #[error("instrument {bond_id} has matured at valuation date {valuation_date}")]
    MaturedInstrument {
        bond_id: String,
        valuation_date: NaiveDate,
    },

    /// Generic domain violation (invalid argument or state).
    #[error("{0}")]
    Domain(String),

    /// A panel with zero observations was supplied where data is required.
    #[error("empty panel: at least one observation is required")]
    EmptyPanel,

    /// Two observations for the same bond on the same date.
    #[error("duplicate observation for bond {bond_id} on {trade_date}")]
    DuplicateObservation {
        bond_id: String,
        trade_date: NaiveDate,
    },

    /// Normal equations are singular or too ill-conditioned to trust.
    #[error("rank-deficient design: {detail}; fit_rwls handles N < K-1")]
    RankDeficient { detail: String },

    /// Posterior inverse-gamma scale collapsed to a non-positive value.
    #[error("non-positive posterior scale gamma*={gamma:e}: prior and data scales are inconsistent")]
    NegativeScale { gamma: f64 },

    /// Inverse-gamma variance is undefined for shape <= 2.
    #[error("inverse-gamma variance undefined: shape {shape} must exceed 2")]
    UndefinedVariance { shape: f64 },

    /// Filter states must be appended in strictly increasing date order.
    #[error("state date {date} is not after the last stored state {last}")]
    OutOfOrderState { date: NaiveDate, last: NaiveDate },

    /// A fitted discount value was non-positive where a yield was required.
    #[error("discount value {value:e} at tenor {tenor} is not positive")]
    DiscountViolation { tenor: f64, value: f64 },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Record-level parse or validation failure (strict ingest mode).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Shorthand for a [`Error::Domain`] with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
