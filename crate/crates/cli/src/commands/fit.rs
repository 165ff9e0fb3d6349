//! `spreadfit fit`: single-date spread curves per issuer.

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use rayon::prelude::*;

use spreadfit::basis::{build_design, BasisConfig, BasisDesign, WeightScheme};
use spreadfit::bayes::{default_prior, posterior_update, NigParams};
use spreadfit::curves::{spread_curve, IssuerFit, SpreadCurve, TenorGrid, TreasuryCurve};
use spreadfit::ingest::{build_panels, trade_dates, Panel, ValuationConfig};
use spreadfit::lsq::{design_condition_number, fit_ols, fit_rwls, fit_wls};
use spreadfit::numfmt::round12;

use super::{parse_date, with_pool, CliError, CliResult, CommonArgs};
use crate::output::atomic_write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Ols,
    Wls,
    Rwls,
    Bayes,
}

impl Estimator {
    fn name(self) -> &'static str {
        match self {
            Estimator::Ols => "ols",
            Estimator::Wls => "wls",
            Estimator::Rwls => "rwls",
            Estimator::Bayes => "bayes",
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Point or Bayesian estimator for the curve coefficients
    #[arg(long, value_enum, default_value_t = Estimator::Rwls)]
    pub estimator: Estimator,

    /// Trade date to fit (defaults to the single date in the price file)
    #[arg(long = "as-of", value_name = "DATE")]
    pub as_of: Option<String>,
}

/// Resolve the single fitting date from the flag or the price file.
fn resolve_as_of(args: &FitArgs, dates: &[NaiveDate]) -> CliResult<NaiveDate> {
    if let Some(s) = &args.as_of {
        return parse_date(s, "--as-of");
    }
    match dates {
        [] => Err(CliError::validation(
            "--prices file holds no records; cannot infer --as-of",
        )),
        [single] => Ok(*single),
        many => Err(CliError::validation(format!(
            "--prices spans {} dates; pass --as-of to pick one",
            many.len()
        ))),
    }
}

pub(crate) enum FittedCurve {
    Point(Vec<f64>),
    Posterior(NigParams<f64>),
}

/// Fit one issuer panel and derive its spread curve.
pub(crate) fn fit_panel(
    panel: &Panel,
    basis: &BasisConfig<f64>,
    weights: WeightScheme,
    estimator: Estimator,
    lambda: f64,
    level: f64,
    treasury: &TreasuryCurve<f64>,
) -> Result<(FittedCurve, SpreadCurve<f64>, BasisDesign<f64>), spreadfit::Error> {
    let design = build_design(&panel.members, basis, weights)?;
    let grid = TenorGrid::default();
    match estimator {
        Estimator::Bayes => {
            let prior = default_prior(basis.k(), lambda)?;
            let posterior = posterior_update(&prior, &design)?;
            let curve = spread_curve(
                panel.issuer_id.clone(),
                IssuerFit::Posterior(&posterior),
                basis,
                treasury,
                &grid,
                level,
            )?;
            Ok((FittedCurve::Posterior(posterior), curve, design))
        }
        point => {
            let fit = match point {
                Estimator::Ols => fit_ols(&design)?,
                Estimator::Wls => fit_wls(&design)?,
                Estimator::Rwls => fit_rwls(&design, lambda)?,
                Estimator::Bayes => unreachable!(),
            };
            let curve = spread_curve(
                panel.issuer_id.clone(),
                IssuerFit::Point(&fit.beta_full),
                basis,
                treasury,
                &grid,
                level,
            )?;
            Ok((FittedCurve::Point(fit.beta_full), curve, design))
        }
    }
}

/// Diagnostics document written alongside each spread.csv.
pub(crate) fn curve_json(
    curve: &SpreadCurve<f64>,
    fitted: &FittedCurve,
    design: &BasisDesign<f64>,
    basis: &BasisConfig<f64>,
    estimator: &str,
    lambda: f64,
    level: f64,
) -> serde_json::Value {
    let beta_full: Vec<f64> = match fitted {
        FittedCurve::Point(beta) => beta.clone(),
        FittedCurve::Posterior(p) => {
            spreadfit::basis::recover_full_beta(p.mu())
        }
    };
    let posterior = match fitted {
        FittedCurve::Point(_) => serde_json::Value::Null,
        FittedCurve::Posterior(p) => serde_json::json!({
            "mu": p.mu().iter().map(|v| round12(*v)).collect::<Vec<_>>(),
            "lambda": p.lambda().to_rows().iter()
                .map(|r| r.iter().map(|v| round12(*v)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "ig_shape": round12(p.ig_shape()),
            "ig_scale": round12(p.ig_scale()),
        }),
    };
    let mut risk = serde_json::Map::new();
    for &(h, r) in &curve.risk_to {
        risk.insert(format!("{h}"), serde_json::json!(round12(r)));
    }
    serde_json::json!({
        "issuer_id": curve.issuer_id,
        "as_of": curve.as_of.to_string(),
        "estimator": estimator,
        "n_obs": design.n_obs(),
        "k": basis.k(),
        "alpha_decay": basis.basis_decay(),
        "lambda": lambda,
        "level": level,
        "condition_number": design_condition_number(design).map(round12),
        "beta_full": beta_full.iter().map(|v| round12(*v)).collect::<Vec<_>>(),
        "posterior": posterior,
        "discount_violations": curve.violations.iter().map(|v| round12(*v)).collect::<Vec<_>>(),
        "risk_to": risk,
    })
}

pub fn run(args: FitArgs) -> CliResult {
    let inputs = args.common.load()?;
    let as_of = resolve_as_of(&args, &trade_dates(&inputs.prices))?;
    let treasury = args.common.treasury_for(&inputs.treasury_knots, as_of)?;
    let vcfg = ValuationConfig {
        accrual: inputs.accrual,
        mode: inputs.mode,
        buckets: None,
    };
    let build = build_panels(&inputs.issues, &inputs.prices, as_of, &vcfg)
        .map_err(|e| CliError::data(format!("panel assembly: {e}")))?;
    if build.tally.total() > 0 {
        log::info!(
            "kept {} price records, excluded {:?}",
            build.kept,
            build.tally
        );
    }
    if build.panels.is_empty() {
        return Err(CliError::validation(format!(
            "no usable observations on {as_of}"
        )));
    }

    let results: Vec<(String, Result<(), String>)> = with_pool(args.common.jobs, || {
        build
            .panels
            .par_iter()
            .map(|panel| {
                let outcome = fit_panel(
                    panel,
                    &inputs.basis,
                    inputs.weights,
                    args.estimator,
                    args.common.lambda,
                    args.common.level,
                    &treasury,
                )
                .map_err(|e| e.to_string())
                .and_then(|(fitted, curve, design)| {
                    let dir = args.common.out.join(&panel.issuer_id);
                    let doc = curve_json(
                        &curve,
                        &fitted,
                        &design,
                        &inputs.basis,
                        args.estimator.name(),
                        args.common.lambda,
                        args.common.level,
                    );
                    atomic_write(&dir.join("spread.csv"), &curve.to_csv_string())
                        .map_err(|e| e.to_string())?;
                    let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
                    atomic_write(&dir.join("curve.json"), &json).map_err(|e| e.to_string())?;
                    Ok(())
                });
                (panel.issuer_id.clone(), outcome)
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
