//! Issuer discount functions, yield curves, and default spreads from daily
//! bond prices.
//!
//! The pipeline: parse issue and price files ([`ingest`]), build vanilla
//! on-the-run cash-flow panels ([`cashflow`]), assemble the weighted,
//! constraint-reduced exponential-spline design ([`basis`]), estimate the
//! discount coefficients with a ladder of estimators — OLS / WLS / ridge
//! ([`lsq`]) and conjugate Normal-Inverse-Gamma regression ([`bayes`]) —
//! evolve the posterior day over day with a zero-drift state-space filter
//! ([`statespace`]), and transform fitted discounts into zero yields,
//! default spreads over Treasury, integrated risk scores, and predictive
//! confidence bands ([`curves`]). [`synth`] generates seeded universes with
//! known ground truth for recovery testing.
//!
//! All numeric code is generic over the scalar type through
//! [`Real`](scalar::Real); `f64` aliases for the main types are exported at
//! the crate root.

// Validation deliberately writes `!(x > zero)` instead of `x <= zero`:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bayes;
pub mod cashflow;
pub mod curves;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod lsq;
pub mod numfmt;
pub mod scalar;
pub mod special;
pub mod statespace;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` aliases for the common entry types.
pub type BondInstrument64 = cashflow::BondInstrument<f64>;
pub type CashFlowSequence64 = cashflow::CashFlowSequence<f64>;
pub type PriceObservation64 = cashflow::PriceObservation<f64>;
pub type BasisConfig64 = basis::BasisConfig<f64>;
pub type BasisDesign64 = basis::BasisDesign<f64>;
pub type PointFit64 = lsq::PointFit<f64>;
pub type NigParams64 = bayes::NigParams<f64>;
pub type PredictiveT64 = bayes::PredictiveT<f64>;
pub type FilterConfig64 = statespace::FilterConfig<f64>;
pub type IssuerTrack64 = statespace::IssuerTrack<f64>;
pub type TenorGrid64 = curves::TenorGrid<f64>;
pub type TreasuryCurve64 = curves::TreasuryCurve<f64>;
pub type SpreadCurve64 = curves::SpreadCurve<f64>;
