//! CSV ingestion and panel assembly.
//!
//! Three file formats, all UTF-8 CSV with a header row, columns matched by
//! name (extra columns ignored), ISO-8601 dates, decimals for rates:
//!
//! - `issues.csv`: bond_id, issuer_id, issue_date, maturity_date,
//!   coupon_rate, coupon_freq, face, callable, convertible, variable_rate,
//!   senior
//! - `prices.csv`: bond_id, trade_date, clean_price (per 100 face)
//! - `treasury.csv`: tenor_years, zero_yield
//!
//! Panel assembly filters to vanilla, on-the-run bonds as of a single
//! date, computes dirty prices, and accounts for every excluded record in
//! a reason-coded tally.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::cashflow::{
    accrued_for_bond, generate_schedule, AccrualConvention, BondFlags, BondInstrument,
    CashFlowSequence, PriceObservation,
};
use crate::error::{Error, Result};

/// Standard original-term buckets (years) for on-the-run grouping.
pub const STANDARD_BUCKETS: [f64; 8] = [1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 20.0, 30.0];

/// Accepted coupon frequencies.
pub const VALID_FREQUENCIES: [u32; 5] = [0, 1, 2, 4, 12];

/// Parse strictness: lenient skips bad records with a warning, strict
/// turns the first bad record into an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Lenient,
    Strict,
}

/// One row of `issues.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub bond_id: String,
    pub issuer_id: String,
    pub issue_date: NaiveDate,
    pub maturity_date: NaiveDate,
    pub coupon_rate: f64,
    pub coupon_freq: u32,
    pub face: f64,
    pub callable: bool,
    pub convertible: bool,
    pub variable_rate: bool,
    pub senior: bool,
}

impl IssueRecord {
    pub fn flags(&self) -> BondFlags {
        BondFlags {
            callable: self.callable,
            convertible: self.convertible,
            variable_rate: self.variable_rate,
            senior: self.senior,
        }
    }

    pub fn is_vanilla(&self) -> bool {
        self.flags().is_vanilla()
    }

    /// Record-level validity beyond what serde enforces.
    fn check(&self) -> Result<()> {
        if self.maturity_date <= self.issue_date {
            return Err(Error::Parse(format!(
                "bond {}: maturity {} not after issue {}",
                self.bond_id, self.maturity_date, self.issue_date
            )));
        }
        if !(self.coupon_rate >= 0.0) || !self.coupon_rate.is_finite() {
            return Err(Error::Parse(format!(
                "bond {}: bad coupon rate {}",
                self.bond_id, self.coupon_rate
            )));
        }
        if !VALID_FREQUENCIES.contains(&self.coupon_freq) {
            return Err(Error::Parse(format!(
                "bond {}: coupon frequency {} not one of {:?}",
                self.bond_id, self.coupon_freq, VALID_FREQUENCIES
            )));
        }
        if !(self.face > 0.0) || !self.face.is_finite() {
            return Err(Error::Parse(format!(
                "bond {}: bad face {}",
                self.bond_id, self.face
            )));
        }
        Ok(())
    }

    /// Priceable instrument normalized to 100 face.
    pub fn to_instrument_per100(&self) -> Result<BondInstrument<f64>> {
        BondInstrument::new(
            self.bond_id.clone(),
            self.issuer_id.clone(),
            self.issue_date,
            self.maturity_date,
            self.coupon_rate,
            self.coupon_freq,
            100.0,
            self.flags(),
        )
    }

    pub fn original_term_years(&self) -> f64 {
        crate::cashflow::year_fraction(self.issue_date, self.maturity_date)
    }
}

/// One row of `prices.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub bond_id: String,
    pub trade_date: NaiveDate,
    pub clean_price: f64,
}

impl PriceRecord {
    fn check(&self) -> Result<()> {
        if !(self.clean_price > 0.0) || !self.clean_price.is_finite() {
            return Err(Error::Parse(format!(
                "bond {} on {}: bad clean price {}",
                self.bond_id, self.trade_date, self.clean_price
            )));
        }
        Ok(())
    }
}

fn read_records<T, R>(reader: R, mode: ParseMode, what: &str) -> Result<(Vec<T>, Vec<String>)>
where
    T: serde::de::DeserializeOwned,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (i, row) in rdr.deserialize::<T>().enumerate() {
        match row {
            Ok(rec) => out.push(rec),
            Err(e) => {
                let msg = format!("{what} row {}: {e}", i + 2);
                match mode {
                    ParseMode::Strict => return Err(Error::Parse(msg)),
                    ParseMode::Lenient => {
                        log::warn!("{msg}");
                        warnings.push(msg);
                    }
                }
            }
        }
    }
    Ok((out, warnings))
}

/// Read and validate `issues.csv`.
pub fn read_issues(reader: impl Read, mode: ParseMode) -> Result<(Vec<IssueRecord>, Vec<String>)> {
    let (rows, mut warnings) = read_records::<IssueRecord, _>(reader, mode, "issues.csv")?;
    let mut out = Vec::with_capacity(rows.len());
    for rec in rows {
        match rec.check() {
            Ok(()) => out.push(rec),
            Err(e) => match mode {
                ParseMode::Strict => return Err(e),
                ParseMode::Lenient => {
                    log::warn!("{e}");
                    warnings.push(e.to_string());
                }
            },
        }
    }
    Ok((out, warnings))
}

/// Read and validate `prices.csv`.
pub fn read_prices(reader: impl Read, mode: ParseMode) -> Result<(Vec<PriceRecord>, Vec<String>)> {
    let (rows, mut warnings) = read_records::<PriceRecord, _>(reader, mode, "prices.csv")?;
    let mut out = Vec::with_capacity(rows.len());
    for rec in rows {
        match rec.check() {
            Ok(()) => out.push(rec),
            Err(e) => match mode {
                ParseMode::Strict => return Err(e),
                ParseMode::Lenient => {
                    log::warn!("{e}");
                    warnings.push(e.to_string());
                }
            },
        }
    }
    Ok((out, warnings))
}

#[derive(Debug, Deserialize)]
struct TreasuryRow {
    tenor_years: f64,
    zero_yield: f64,
}

/// Read `treasury.csv` knots (tenor_years, zero_yield).
pub fn read_treasury_table(reader: impl Read, mode: ParseMode) -> Result<Vec<(f64, f64)>> {
    let (rows, _) = read_records::<TreasuryRow, _>(reader, mode, "treasury.csv")?;
    let mut knots: Vec<(f64, f64)> = rows.into_iter().map(|r| (r.tenor_years, r.zero_yield)).collect();
    knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(knots)
}

/// Keep only the most recent issue per original-term bucket.
///
/// Bonds are grouped by original term rounded to the nearest bucket; within
/// each bucket the issue with the latest `issue_date <= as_of` survives.
/// Equal issue dates keep the lexicographically smallest bond_id. Applying
/// the filter twice changes nothing.
pub fn select_on_the_run(
    issues: &[IssueRecord],
    as_of: NaiveDate,
    buckets: &[f64],
) -> Vec<IssueRecord> {
    let mut winners: BTreeMap<String, &IssueRecord> = BTreeMap::new();
    for rec in issues {
        if rec.issue_date > as_of {
            continue;
        }
        let term = rec.original_term_years();
        let bucket = buckets
            .iter()
            .copied()
            .min_by(|a, b| {
                let da = (term - a).abs();
                let db = (term - b).abs();
                da.partial_cmp(&db)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    // Ties round toward the smaller bucket.
                    .then(a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
            })
            .unwrap_or(term);
        let key = format!("{bucket}");
        match winners.get(&key) {
            Some(current) => {
                let newer = rec.issue_date > current.issue_date
                    || (rec.issue_date == current.issue_date && rec.bond_id < current.bond_id);
                if newer {
                    winners.insert(key, rec);
                }
            }
            None => {
                winners.insert(key, rec);
            }
        }
    }
    let mut out: Vec<IssueRecord> = winners.into_values().cloned().collect();
    out.sort_by(|a, b| a.bond_id.cmp(&b.bond_id));
    out
}

/// Why price records were dropped during panel assembly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExclusionTally {
    /// Trade date differs from the panel date.
    pub off_date: usize,
    /// bond_id absent from the issue file.
    pub unresolved: usize,
    /// Callable / convertible / variable-rate / junior bonds.
    pub non_vanilla: usize,
    /// Matured (or not yet issued) at the panel date.
    pub matured: usize,
    /// Second and later price rows for one bond on one date.
    pub duplicate_price: usize,
    /// Dropped by the on-the-run filter.
    pub off_the_run: usize,
    /// Failed dirty-price construction (bad clean price or schedule).
    pub invalid: usize,
}

impl ExclusionTally {
    pub fn total(&self) -> usize {
        self.off_date
            + self.unresolved
            + self.non_vanilla
            + self.matured
            + self.duplicate_price
            + self.off_the_run
            + self.invalid
    }
}

/// One issuer's observations on one date, vanilla and on-the-run.
#[derive(Debug, Clone)]
pub struct Panel {
    pub issuer_id: String,
    pub as_of: NaiveDate,
    pub members: Vec<(PriceObservation<f64>, CashFlowSequence<f64>)>,
}

/// Panel-assembly output: panels plus the exclusion accounting.
#[derive(Debug, Clone)]
pub struct PanelBuild {
    pub panels: Vec<Panel>,
    pub tally: ExclusionTally,
    /// Number of price records that made it into panels.
    pub kept: usize,
}

/// Valuation-level settings for panel assembly.
#[derive(Debug, Clone, Copy, Default)]
pub struct ValuationConfig {
    pub accrual: AccrualConvention,
    pub mode: ParseMode,
    /// Override of the on-the-run bucket scheme (standard buckets when
    /// empty).
    pub buckets: Option<&'static [f64]>,
}

/// Assemble per-issuer panels for a single date.
///
/// Every input price record is either kept or counted in exactly one tally
/// bucket, so `kept + tally.total() == prices.len()`. Panels are sorted by
/// issuer, members by bond id.
pub fn build_panels(
    issues: &[IssueRecord],
    prices: &[PriceRecord],
    as_of: NaiveDate,
    cfg: &ValuationConfig,
) -> Result<PanelBuild> {
    let strict = matches!(cfg.mode, ParseMode::Strict);
    let buckets: &[f64] = cfg.buckets.unwrap_or(&STANDARD_BUCKETS);
    let by_id: BTreeMap<&str, &IssueRecord> = issues
        .iter()
        .map(|r| (r.bond_id.as_str(), r))
        .collect();

    let mut tally = ExclusionTally::default();
    // bond_id -> candidate price, deduplicated first.
    let mut candidate: BTreeMap<&str, &PriceRecord> = BTreeMap::new();
    for rec in prices {
        if rec.trade_date != as_of {
            tally.off_date += 1;
            continue;
        }
        if candidate.contains_key(rec.bond_id.as_str()) {
            if strict {
                return Err(Error::DuplicateObservation {
                    bond_id: rec.bond_id.clone(),
                    trade_date: rec.trade_date,
                });
            }
            log::warn!("duplicate price for {} on {}; keeping the first", rec.bond_id, as_of);
            tally.duplicate_price += 1;
            continue;
        }
        candidate.insert(&rec.bond_id, rec);
    }

    // Resolve and filter to vanilla, live bonds grouped by issuer.
    let mut by_issuer: BTreeMap<&str, Vec<(&IssueRecord, &PriceRecord)>> = BTreeMap::new();
    for (bond_id, price) in candidate {
        let Some(issue) = by_id.get(bond_id) else {
            if strict {
                return Err(Error::Parse(format!(
                    "price for unknown bond {bond_id} on {as_of}"
                )));
            }
            log::warn!("price for unknown bond {bond_id}; skipped");
            tally.unresolved += 1;
            continue;
        };
        if !issue.is_vanilla() {
            tally.non_vanilla += 1;
            continue;
        }
        if as_of >= issue.maturity_date || issue.issue_date > as_of {
            tally.matured += 1;
            continue;
        }
        by_issuer
            .entry(issue.issuer_id.as_str())
            .or_default()
            .push((issue, price));
    }

    let mut panels = Vec::new();
    let mut kept = 0usize;
    for (issuer_id, rows) in by_issuer {
        let issues_here: Vec<IssueRecord> =
            rows.iter().map(|(i, _)| (*i).clone()).collect();
        let on_run = select_on_the_run(&issues_here, as_of, buckets);
        let mut members = Vec::new();
        for (issue, price) in rows {
            if !on_run.iter().any(|r| r.bond_id == issue.bond_id) {
                tally.off_the_run += 1;
                continue;
            }
            let built = (|| -> Result<(PriceObservation<f64>, CashFlowSequence<f64>)> {
                let instrument = issue.to_instrument_per100()?;
                let schedule = generate_schedule(&instrument, as_of)?;
                let accrued = accrued_for_bond(&instrument, &schedule, cfg.accrual)?;
                let obs =
                    PriceObservation::new(issue.bond_id.clone(), as_of, price.clean_price, accrued)?;
                Ok((obs, schedule))
            })();
            match built {
                Ok(pair) => {
                    members.push(pair);
                    kept += 1;
                }
                Err(e) => {
                    if strict {
                        return Err(e);
                    }
                    log::warn!("bond {} dropped: {e}", issue.bond_id);
                    tally.invalid += 1;
                }
            }
        }
        if !members.is_empty() {
            members.sort_by(|a, b| a.0.bond_id.cmp(&b.0.bond_id));
            panels.push(Panel {
                issuer_id: issuer_id.to_string(),
                as_of,
                members,
            });
        }
    }
    panels.sort_by(|a, b| a.issuer_id.cmp(&b.issuer_id));
    Ok(PanelBuild {
        panels,
        tally,
        kept,
    })
}

/// All distinct trade dates in a price file, ascending.
pub fn trade_dates(prices: &[PriceRecord]) -> Vec<NaiveDate> {
    let mut dates: Vec<NaiveDate> = prices.iter().map(|p| p.trade_date).collect();
    dates.sort();
    dates.dedup();
    dates
}
