//! Day-over-day evolution of an issuer posterior.
//!
//! The coefficient process is modeled as a zero-drift random walk: the
//! previous posterior becomes the next prior with its location untouched,
//! its covariance weakened by a small ridge bump, and its inverse-gamma leg
//! re-parameterized by moment matching so that the implied mean of sigma^2
//! grows by the variance amplifier `delta_sq` and its variance by the
//! floor `epsilon`. The two guards keep long filters stable: `delta_sq`
//! prevents the posterior variance from collapsing to zero under repeated
//! conditioning, `epsilon` prevents the variance-of-variance from collapsing
//! and dragging unbounded confidence growth along with it.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::basis::BasisDesign;
use crate::bayes::{posterior_update, NigParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Filter hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig<T> {
    /// Per-state additive inflation of the mean of sigma^2
    /// (squared price units).
    pub delta_sq: T,
    /// Per-state additive inflation of the variance of sigma^2.
    pub epsilon: T,
    /// Ridge added to the propagated covariance; 0 disables the repair
    /// (identity propagation, mainly for diagnostics).
    pub ridge_bump: T,
    /// Scale `delta_sq` linearly by the number of calendar days between
    /// states (random-walk variance is linear in time). Off by default:
    /// missing trading days are simply absent states.
    pub scale_delta_by_elapsed_days: bool,
}

impl<T: Real> Default for FilterConfig<T> {
    fn default() -> Self {
        FilterConfig {
            delta_sq: T::of(1e-4),
            epsilon: T::of(1e-6),
            ridge_bump: T::of(1e-3),
            scale_delta_by_elapsed_days: false,
        }
    }
}

impl<T: Real> FilterConfig<T> {
    pub fn new(delta_sq: T, epsilon: T, ridge_bump: T) -> Result<Self> {
        if !(delta_sq >= T::zero()) || !(epsilon >= T::zero()) || !(ridge_bump >= T::zero()) {
            return Err(Error::domain(
                "filter hyperparameters must be non-negative",
            ));
        }
        Ok(FilterConfig {
            delta_sq,
            epsilon,
            ridge_bump,
            scale_delta_by_elapsed_days: false,
        })
    }
}

/// Propagate yesterday's posterior into today's prior.
///
/// Location is carried unchanged (martingale); covariance gains
/// `ridge_bump * I`; the inverse-gamma parameters are moment-matched so the
/// shifted distribution has mean `gamma/(shape-1) + delta_sq` and variance
/// `var(sigma^2) + epsilon`. Requires `shape > 2` so the variance exists.
pub fn propagate_prior<T: Real>(
    prev_posterior: &NigParams<T>,
    cfg: &FilterConfig<T>,
) -> Result<NigParams<T>> {
    propagate_prior_scaled(prev_posterior, cfg, 1)
}

/// [`propagate_prior`] with `delta_sq` multiplied by `elapsed_days`
/// (used when `scale_delta_by_elapsed_days` is on).
pub fn propagate_prior_scaled<T: Real>(
    prev_posterior: &NigParams<T>,
    cfg: &FilterConfig<T>,
    elapsed_days: i64,
) -> Result<NigParams<T>> {
    let two = T::of(2.0);
    if !(prev_posterior.ig_shape() > two) {
        return Err(Error::UndefinedVariance {
            shape: prev_posterior.ig_shape().to_f64_lossy(),
        });
    }
    let delta = if cfg.scale_delta_by_elapsed_days {
        cfg.delta_sq * T::of(elapsed_days.max(1) as f64)
    } else {
        cfg.delta_sq
    };
    let mean = prev_posterior.sigma_sq_mean();
    let var = prev_posterior.sigma_sq_variance();
    let shifted_mean = mean + delta;
    let shifted_var = var + cfg.epsilon;
    let shape = shifted_mean * shifted_mean / shifted_var + two;
    let scale = shifted_mean * (shape - T::one());
    NigParams::new(
        prev_posterior.mu().to_vec(),
        prev_posterior
            .lambda()
            .add_scaled_identity(cfg.ridge_bump),
        shape,
        scale,
    )
}

/// One filtered state: date, posterior, and how many observations fed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackState<T> {
    pub date: NaiveDate,
    pub posterior: NigParams<T>,
    pub n_obs: usize,
}

/// Ordered filtered history for one issuer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuerTrack<T> {
    issuer_id: String,
    config: FilterConfig<T>,
    states: Vec<TrackState<T>>,
}

/// File format tag and version for serialized tracks.
pub const TRACK_FORMAT: &str = "spreadfit-track";
pub const TRACK_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TrackFile<T> {
    format: String,
    version: u32,
    track: IssuerTrack<T>,
}

impl<T: Real> IssuerTrack<T> {
    pub fn issuer_id(&self) -> &str {
        &self.issuer_id
    }

    pub fn config(&self) -> &FilterConfig<T> {
        &self.config
    }

    pub fn states(&self) -> &[TrackState<T>] {
        &self.states
    }

    pub fn last(&self) -> &TrackState<T> {
        self.states.last().expect("tracks are never empty")
    }

    /// Append the next state: propagate the last posterior to `state_date`
    /// and condition on the (possibly empty) design.
    pub fn filter_step(&mut self, design: &BasisDesign<T>, state_date: NaiveDate) -> Result<()> {
        let last = self.last();
        if state_date <= last.date {
            return Err(Error::OutOfOrderState {
                date: state_date,
                last: last.date,
            });
        }
        let elapsed = (state_date - last.date).num_days();
        let prior = propagate_prior_scaled(&last.posterior, &self.config, elapsed)?;
        let posterior = if design.n_obs() == 0 {
            prior
        } else {
            posterior_update(&prior, design)?
        };
        self.states.push(TrackState {
            date: state_date,
            posterior,
            n_obs: design.n_obs(),
        });
        Ok(())
    }

    /// Serialize as a self-describing, versioned JSON document. Floats are
    /// written with a lossless decimal encoding so a round trip is exact.
    pub fn to_json_string(&self) -> Result<String>
    where
        T: Serialize,
    {
        Ok(serde_json::to_string_pretty(&TrackFile {
            format: TRACK_FORMAT.to_string(),
            version: TRACK_FORMAT_VERSION,
            track: self.clone(),
        })?)
    }

    /// Parse and re-validate a serialized track.
    pub fn from_json_str(s: &str) -> Result<Self>
    where
        T: serde::de::DeserializeOwned,
    {
        let file: TrackFile<T> = serde_json::from_str(s)?;
        if file.format != TRACK_FORMAT {
            return Err(Error::Parse(format!(
                "unexpected track format '{}'",
                file.format
            )));
        }
        if file.version != TRACK_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported track version {} (expected {TRACK_FORMAT_VERSION})",
                file.version
            )));
        }
        let track = file.track;
        if track.states.is_empty() {
            return Err(Error::Parse("track holds no states".to_string()));
        }
        let mut prev: Option<NaiveDate> = None;
        for state in &track.states {
            state.posterior.validate()?;
            if !(state.posterior.ig_shape() > T::of(2.0)) {
                return Err(Error::UndefinedVariance {
                    shape: state.posterior.ig_shape().to_f64_lossy(),
                });
            }
            if let Some(p) = prev {
                if state.date <= p {
                    return Err(Error::Parse(format!(
                        "track states out of order at {}",
                        state.date
                    )));
                }
            }
            prev = Some(state.date);
        }
        Ok(track)
    }
}

/// Start a track from the first non-empty panel: the initial state is the
/// default-style prior conditioned on `first_design`.
pub fn initialize_track<T: Real>(
    issuer_id: impl Into<String>,
    first_design: &BasisDesign<T>,
    cfg: FilterConfig<T>,
    prior: &NigParams<T>,
    state_date: NaiveDate,
) -> Result<IssuerTrack<T>> {
    if first_design.n_obs() == 0 {
        return Err(Error::EmptyPanel);
    }
    let posterior = posterior_update(prior, first_design)?;
    Ok(IssuerTrack {
        issuer_id: issuer_id.into(),
        config: cfg,
        states: vec![TrackState {
            date: state_date,
            posterior,
            n_obs: first_design.n_obs(),
        }],
    })
}
