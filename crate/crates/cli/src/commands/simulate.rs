//! `spreadfit simulate`: synthetic universe generation from a TOML spec.

use std::path::PathBuf;

use clap::Args;

use spreadfit::curves::TenorGrid;
use spreadfit::synth::{generate_universe, treasury_csv, SynthOptions};

use super::{CliError, CliResult};
use crate::output::atomic_write;
use crate::simspec::SimSpec;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML spec describing the issuer, treasury, and state count
    #[arg(value_name = "SPEC")]
    pub spec: PathBuf,

    /// Output directory for issues/prices/treasury/truth CSVs
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Override the spec's RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: SimulateArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| {
        CliError::validation(format!("spec file {}: {e}", args.spec.display()))
    })?;
    let spec = SimSpec::parse(&text).map_err(CliError::validation)?;
    let start = spec.start().map_err(CliError::validation)?;
    let treasury = spec.treasury_curve(start).map_err(CliError::validation)?;
    let issuer_spec = spec.issuer_spec(args.seed);
    let opts = SynthOptions {
        start_date: Some(start),
        coupon_freq: spec.coupon_freq,
        ..SynthOptions::default()
    };
    let universe = generate_universe(&issuer_spec, &treasury, spec.n_states, &opts)
        .map_err(|e| CliError::validation(format!("spec: {e}")))?;

    let grid = TenorGrid::default();
    let tre = treasury_csv(&treasury, &grid)
        .map_err(|e| CliError::validation(format!("treasury: {e}")))?;
    let write = |name: &str, content: &str| {
        atomic_write(&args.out.join(name), content)
            .map_err(|e| CliError::validation(format!("writing {name}: {e}")))
    };
    write("issues.csv", &universe.issues_csv())?;
    write("prices.csv", &universe.prices_csv())?;
    write("treasury.csv", &tre)?;
    write("truth.csv", &universe.truth_csv())?;
    Ok(())
}
