//! Subcommand implementations and shared plumbing.

pub mod filter;
pub mod fit;
pub mod simulate;

use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::Args;

use spreadfit::basis::{BasisConfig, WeightScheme};
use spreadfit::cashflow::AccrualConvention;
use spreadfit::curves::TreasuryCurve;
use spreadfit::ingest::{
    read_issues, read_prices, read_treasury_table, IssueRecord, ParseMode, PriceRecord,
};

/// Exit codes: 2 for validation problems, 3 for data problems in strict
/// mode. Success is 0.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Data(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Data(m) => m,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Flags shared by `fit` and `filter`.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Issue descriptor CSV
    #[arg(long, value_name = "FILE")]
    pub issues: PathBuf,

    /// Daily clean-price CSV
    #[arg(long, value_name = "FILE")]
    pub prices: PathBuf,

    /// Tabulated Treasury zero-yield CSV (tenor_years,zero_yield)
    #[arg(long, value_name = "FILE")]
    pub treasury: PathBuf,

    /// Output directory (one subdirectory per issuer)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Ridge strength / prior precision scale
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    /// Credible level for confidence bands
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    /// Number of basis functions
    #[arg(long = "K", default_value_t = 8, value_name = "K")]
    pub k: usize,

    /// Basis decay rate per year
    #[arg(long = "alpha-decay", default_value_t = 0.05)]
    pub alpha_decay: f64,

    /// Observation weights: inverse-term | proportional-term | uniform
    #[arg(long, default_value = "inverse-term")]
    pub weights: String,

    /// Accrued-interest convention: remaining | elapsed
    #[arg(long, default_value = "remaining")]
    pub accrual: String,

    /// Treat data problems as hard errors (exit 3)
    #[arg(long)]
    pub strict: bool,

    /// Number of parallel issuer workers
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

pub struct LoadedInputs {
    pub issues: Vec<IssueRecord>,
    pub prices: Vec<PriceRecord>,
    pub treasury_knots: Vec<(f64, f64)>,
    pub basis: BasisConfig<f64>,
    pub weights: WeightScheme,
    pub accrual: AccrualConvention,
    pub mode: ParseMode,
}

impl CommonArgs {
    pub fn parse_mode(&self) -> ParseMode {
        if self.strict {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        }
    }

    /// Validate flags and load the three input files.
    pub fn load(&self) -> CliResult<LoadedInputs> {
        let basis = BasisConfig::new(self.k, self.alpha_decay)
            .map_err(|e| CliError::validation(format!("--K/--alpha-decay: {e}")))?;
        let weights = WeightScheme::parse(&self.weights)
            .map_err(|e| CliError::validation(format!("--weights: {e}")))?;
        let accrual = AccrualConvention::parse(&self.accrual)
            .map_err(|e| CliError::validation(format!("--accrual: {e}")))?;
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(CliError::validation(format!(
                "--level must lie in (0, 1), got {}",
                self.level
            )));
        }
        // Negated form also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.lambda > 0.0) {
            return Err(CliError::validation(format!(
                "--lambda must be positive, got {}",
                self.lambda
            )));
        }
        let mode = self.parse_mode();
        let issues_file = open(&self.issues, "--issues")?;
        let (issues, _) = read_issues(issues_file, mode)
            .map_err(|e| data_or_validation(e, self.strict, "--issues"))?;
        let prices_file = open(&self.prices, "--prices")?;
        let (prices, _) = read_prices(prices_file, mode)
            .map_err(|e| data_or_validation(e, self.strict, "--prices"))?;
        let treasury_file = open(&self.treasury, "--treasury")?;
        let treasury_knots = read_treasury_table(treasury_file, mode)
            .map_err(|e| CliError::validation(format!("--treasury: {e}")))?;
        if treasury_knots.is_empty() {
            return Err(CliError::validation(
                "--treasury file holds no usable knots",
            ));
        }
        Ok(LoadedInputs {
            issues,
            prices,
            treasury_knots,
            basis,
            weights,
            accrual,
            mode,
        })
    }

    pub fn treasury_for(&self, knots: &[(f64, f64)], as_of: NaiveDate) -> CliResult<TreasuryCurve<f64>> {
        TreasuryCurve::tabulated(as_of, knots.to_vec())
            .map_err(|e| CliError::validation(format!("--treasury: {e}")))
    }
}

fn open(path: &Path, flag: &str) -> CliResult<File> {
    File::open(path)
        .map_err(|e| CliError::validation(format!("{flag} file {}: {e}", path.display())))
}

fn data_or_validation(e: spreadfit::Error, strict: bool, flag: &str) -> CliError {
    if strict {
        CliError::data(format!("{flag}: {e}"))
    } else {
        CliError::validation(format!("{flag}: {e}"))
    }
}

/// Run `body` on a rayon pool sized by `--jobs` (or the default pool).
pub fn with_pool<T: Send>(jobs: Option<usize>, body: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::validation(format!("--jobs: {e}")))?;
            Ok(pool.install(body))
        }
        None => Ok(body()),
    }
}

/// Parse an ISO date flag.
pub fn parse_date(s: &str, flag: &str) -> CliResult<NaiveDate> {
    s.parse()
        .map_err(|e| CliError::validation(format!("{flag} '{s}': {e}")))
}
