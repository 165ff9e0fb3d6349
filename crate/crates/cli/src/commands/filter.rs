//! `spreadfit filter`: day-over-day posterior filtering per issuer, with
//! a resumable track file and a band time series for plotting.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use clap::Args;
use rayon::prelude::*;

use spreadfit::basis::{build_design, BasisConfig, BasisDesign, WeightScheme};
use spreadfit::bayes::default_prior;
use spreadfit::curves::{integrated_risk, spread_curve, IssuerFit, TenorGrid, TreasuryCurve};
use spreadfit::ingest::{build_panels, trade_dates, Panel, ValuationConfig};
use spreadfit::numfmt::fmt12;
use spreadfit::statespace::{initialize_track, FilterConfig, IssuerTrack};

use super::{parse_date, with_pool, CliError, CliResult, CommonArgs};
use crate::output::atomic_write;

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// First state date (defaults to the earliest price date)
    #[arg(long, value_name = "DATE")]
    pub from: Option<String>,

    /// Last state date (defaults to the latest price date)
    #[arg(long, value_name = "DATE")]
    pub to: Option<String>,

    /// Per-state variance amplifier (squared price units)
    #[arg(long = "delta-sq", default_value_t = 1e-4)]
    pub delta_sq: f64,

    /// Variance-of-variance floor
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,

    /// Continue from an existing track file in the output directory
    #[arg(long)]
    pub resume: bool,
}

/// Per-issuer filtering over the dated panels.
fn filter_issuer(
    issuer_id: &str,
    dated_panels: &BTreeMap<NaiveDate, Option<&Panel>>,
    basis: &BasisConfig<f64>,
    weights: WeightScheme,
    filter_cfg: &FilterConfig<f64>,
    lambda: f64,
    resume_from: Option<IssuerTrack<f64>>,
) -> Result<IssuerTrack<f64>, spreadfit::Error> {
    let mut track = resume_from;
    for (&date, panel) in dated_panels {
        let design = match panel {
            Some(p) => build_design(&p.members, basis, weights)?,
            None => BasisDesign::empty(basis),
        };
        match &mut track {
            None => {
                if design.n_obs() == 0 {
                    continue; // wait for the first date with data
                }
                let prior = default_prior(basis.k(), lambda)?;
                track = Some(initialize_track(
                    issuer_id,
                    &design,
                    filter_cfg.clone(),
                    &prior,
                    date,
                )?);
            }
            Some(t) => {
                if date <= t.last().date {
                    continue; // already covered (resume overlap)
                }
                t.filter_step(&design, date)?;
            }
        }
    }
    track.ok_or_else(|| {
        spreadfit::Error::domain(format!("issuer {issuer_id}: no dates with data in range"))
    })
}

/// Band time series: one row per (state, tenor), plus the 5y integrated
/// risk for that state.
fn timeseries_csv(
    track: &IssuerTrack<f64>,
    basis: &BasisConfig<f64>,
    treasury_knots: &[(f64, f64)],
    level: f64,
) -> Result<String, spreadfit::Error> {
    let grid = TenorGrid::default();
    let mut out = String::from("state_date,tenor,spread,band_lo,band_hi,risk_5y\n");
    for state in track.states() {
        let treasury = TreasuryCurve::tabulated(state.date, treasury_knots.to_vec())?;
        let curve = spread_curve(
            track.issuer_id().to_string(),
            IssuerFit::Posterior(&state.posterior),
            basis,
            &treasury,
            &grid,
            level,
        )?;
        let risk5 = integrated_risk(&curve, 5.0).map(fmt12).unwrap_or_default();
        let cell = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
        for p in &curve.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                state.date,
                p.tenor,
                cell(p.spread),
                cell(p.band_lo),
                cell(p.band_hi),
                risk5
            ));
        }
    }
    Ok(out)
}

pub fn run(args: FilterArgs) -> CliResult {
    let inputs = args.common.load()?;
    let filter_cfg = {
        let mut c = FilterConfig::new(args.delta_sq, args.epsilon, 1e-3)
            .map_err(|e| CliError::validation(format!("--delta-sq/--epsilon: {e}")))?;
        c.scale_delta_by_elapsed_days = false;
        c
    };

    let all_dates = trade_dates(&inputs.prices);
    if all_dates.is_empty() {
        return Err(CliError::validation("--prices file holds no records"));
    }
    let from = match &args.from {
        Some(s) => parse_date(s, "--from")?,
        None => all_dates[0],
    };
    let to = match &args.to {
        Some(s) => parse_date(s, "--to")?,
        None => *all_dates.last().unwrap(),
    };
    if to < from {
        return Err(CliError::validation(format!(
            "--to {to} precedes --from {from}"
        )));
    }
    let dates: Vec<NaiveDate> = all_dates
        .into_iter()
        .filter(|d| *d >= from && *d <= to)
        .collect();
    if dates.is_empty() {
        return Err(CliError::validation(format!(
            "no trade dates between {from} and {to}"
        )));
    }

    // Panels per date; every issuer seen anywhere gets a (possibly empty)
    // slot on every date.
    let vcfg = ValuationConfig {
        accrual: inputs.accrual,
        mode: inputs.mode,
        buckets: None,
    };
    let mut builds = Vec::with_capacity(dates.len());
    for &d in &dates {
        let b = build_panels(&inputs.issues, &inputs.prices, d, &vcfg)
            .map_err(|e| CliError::data(format!("panel assembly on {d}: {e}")))?;
        builds.push(b);
    }
    let mut issuers: Vec<String> = builds
        .iter()
        .flat_map(|b| b.panels.iter().map(|p| p.issuer_id.clone()))
        .collect();
    issuers.sort();
    issuers.dedup();
    if issuers.is_empty() {
        return Err(CliError::validation("no usable observations in range"));
    }

    let results: Vec<(String, Result<(), String>)> = with_pool(args.common.jobs, || {
        issuers
            .par_iter()
            .map(|issuer_id| {
                let outcome = (|| -> Result<(), String> {
                    let dated: BTreeMap<NaiveDate, Option<&Panel>> = dates
                        .iter()
                        .zip(&builds)
                        .map(|(&d, b)| {
                            (d, b.panels.iter().find(|p| &p.issuer_id == issuer_id))
                        })
                        .collect();
                    let dir = args.common.out.join(issuer_id);
                    let track_path = dir.join("track.json");
                    let resume_from = if args.resume && track_path.exists() {
                        let text =
                            std::fs::read_to_string(&track_path).map_err(|e| e.to_string())?;
                        let track =
                            IssuerTrack::<f64>::from_json_str(&text).map_err(|e| e.to_string())?;
                        log::info!(
                            "issuer {issuer_id}: resuming from {} states (last {})",
                            track.states().len(),
                            track.last().date
                        );
                        Some(track)
                    } else {
                        None
                    };
                    let track = filter_issuer(
                        issuer_id,
                        &dated,
                        &inputs.basis,
                        inputs.weights,
                        &filter_cfg,
                        args.common.lambda,
                        resume_from,
                    )
                    .map_err(|e| e.to_string())?;
                    let ts =
                        timeseries_csv(&track, &inputs.basis, &inputs.treasury_knots, args.common.level)
                            .map_err(|e| e.to_string())?;
                    atomic_write(&track_path, &track.to_json_string().map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    atomic_write(&dir.join("timeseries.csv"), &ts).map_err(|e| e.to_string())?;
                    Ok(())
                })();
                (issuer_id.clone(), outcome)
            })
            .collect()
    })?;

    let mut failures = Vec::new();
    for (issuer, outcome) in results {
        if let Err(e) = outcome {
            log::error!("issuer {issuer}: {e}");
            failures.push(format!("{issuer}: {e}"));
        }
    }
    if !failures.is_empty() && args.common.strict {
        return Err(CliError::data(failures.join("; ")));
    }
    Ok(())
}
