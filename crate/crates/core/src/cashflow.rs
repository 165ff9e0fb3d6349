//! Cash-flow schedules, accrued interest, and present value for vanilla
//! bonds.
//!
//! A vanilla bond (fixed coupon, senior, no optionality or convertibility)
//! has a fully deterministic payment schedule, so pricing reduces to an
//! inner product between the remaining payments and a discount function.
//! Year fractions are ACT/365 throughout; coupon times step back from the
//! maturity year-fraction in increments of `1/coupon_freq` years.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Days-per-year for the fixed ACT/365 convention.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// ACT/365 year fraction between two dates (negative when `to < from`).
pub fn year_fraction(from: NaiveDate, to: NaiveDate) -> f64 {
    (to - from).num_days() as f64 / DAYS_PER_YEAR
}

/// Optionality / seniority flags carried by an instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondFlags {
    pub callable: bool,
    pub convertible: bool,
    pub variable_rate: bool,
    pub senior: bool,
}

impl BondFlags {
    /// Plain senior fixed-coupon debt.
    pub fn vanilla() -> Self {
        BondFlags {
            callable: false,
            convertible: false,
            variable_rate: false,
            senior: true,
        }
    }

    pub fn is_vanilla(&self) -> bool {
        !self.callable && !self.convertible && !self.variable_rate && self.senior
    }

    /// Human-readable list of the features that disqualify the bond.
    pub fn non_vanilla_reason(&self) -> String {
        let mut parts = Vec::new();
        if self.callable {
            parts.push("callable");
        }
        if self.convertible {
            parts.push("convertible");
        }
        if self.variable_rate {
            parts.push("variable-rate");
        }
        if !self.senior {
            parts.push("not senior");
        }
        parts.join(", ")
    }
}

/// Static description of one bond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondInstrument<T> {
    pub bond_id: String,
    pub issuer_id: String,
    pub issue_date: NaiveDate,
    pub maturity_date: NaiveDate,
    /// Annual coupon rate as a fraction of face (0.05 = 5%).
    pub coupon_rate: T,
    /// Coupon payments per year; 0 means zero-coupon.
    pub coupon_freq: u32,
    pub face: T,
    pub flags: BondFlags,
}

impl<T: Real> BondInstrument<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        bond_id: impl Into<String>,
        issuer_id: impl Into<String>,
        issue_date: NaiveDate,
        maturity_date: NaiveDate,
        coupon_rate: T,
        coupon_freq: u32,
        face: T,
        flags: BondFlags,
    ) -> Result<Self> {
        let bond_id = bond_id.into();
        if maturity_date <= issue_date {
            return Err(Error::domain(format!(
                "bond {bond_id}: maturity {maturity_date} not after issue {issue_date}"
            )));
        }
        if !(coupon_rate >= T::zero()) || !coupon_rate.is_finite() {
            return Err(Error::domain(format!(
                "bond {bond_id}: coupon rate {coupon_rate} must be a finite non-negative fraction"
            )));
        }
        if !(face > T::zero()) || !face.is_finite() {
            return Err(Error::domain(format!(
                "bond {bond_id}: face {face} must be positive"
            )));
        }
        Ok(BondInstrument {
            bond_id,
            issuer_id: issuer_id.into(),
            issue_date,
            maturity_date,
            coupon_rate,
            coupon_freq,
            face,
            flags,
        })
    }

    pub fn is_vanilla(&self) -> bool {
        self.flags.is_vanilla()
    }

    /// Original term at issue, in ACT/365 years.
    pub fn original_term_years(&self) -> f64 {
        year_fraction(self.issue_date, self.maturity_date)
    }

    /// Same instrument rescaled to a face of 100, so cash flows and quoted
    /// per-100 prices share units.
    pub fn normalized_to_100(&self) -> Self {
        let mut b = self.clone();
        b.face = T::of(100.0);
        b
    }
}

/// Remaining payment schedule, time-indexed in years from the valuation
/// date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashFlowSequence<T> {
    times: Vec<T>,
    amounts: Vec<T>,
}

impl<T: Real> CashFlowSequence<T> {
    /// Validated constructor: times strictly increasing and positive,
    /// amounts strictly positive, at least one payment.
    pub fn new(times: Vec<T>, amounts: Vec<T>) -> Result<Self> {
        if times.is_empty() || times.len() != amounts.len() {
            return Err(Error::domain(
                "cash-flow sequence needs matching, non-empty times and amounts",
            ));
        }
        let mut prev = T::zero();
        for &t in &times {
            if !(t > prev) || !t.is_finite() {
                return Err(Error::domain(
                    "cash-flow times must be strictly increasing and positive",
                ));
            }
            prev = t;
        }
        if amounts.iter().any(|&c| !(c > T::zero()) || !c.is_finite()) {
            return Err(Error::domain("cash-flow amounts must be strictly positive"));
        }
        Ok(CashFlowSequence { times, amounts })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn amounts(&self) -> &[T] {
        &self.amounts
    }

    /// Time of the final payment (the maturity year-fraction).
    pub fn final_time(&self) -> T {
        *self.times.last().expect("non-empty by construction")
    }

    /// Schedule with all amounts multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        CashFlowSequence::new(
            self.times.clone(),
            self.amounts.iter().map(|&c| c * factor).collect(),
        )
    }
}

/// How a partial coupon accrues between payment dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AccrualConvention {
    /// Coupon times the fraction of the period still remaining
    /// (`t_next / t_coupon`). The default.
    #[default]
    RemainingFraction,
    /// Coupon times the fraction of the period already elapsed
    /// (`(t_coupon - t_next) / t_coupon`), the common market convention.
    ElapsedFraction,
}

impl AccrualConvention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "remaining" => Ok(AccrualConvention::RemainingFraction),
            "elapsed" => Ok(AccrualConvention::ElapsedFraction),
            other => Err(Error::domain(format!(
                "unknown accrual convention '{other}' (expected 'remaining' or 'elapsed')"
            ))),
        }
    }
}

/// One priced bond observation: clean quote plus computed dirty price,
/// both per 100 face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceObservation<T> {
    pub bond_id: String,
    pub trade_date: NaiveDate,
    pub clean_price: T,
    pub dirty_price: T,
    /// Echo of the (normalized) regression weight once a design has been
    /// built; 1 until then.
    pub weight: T,
}

impl<T: Real> PriceObservation<T> {
    pub fn new(
        bond_id: impl Into<String>,
        trade_date: NaiveDate,
        clean_price: T,
        accrued: T,
    ) -> Result<Self> {
        let bond_id = bond_id.into();
        let dirty = clean_price + accrued;
        if !(clean_price > T::zero()) || !clean_price.is_finite() {
            return Err(Error::domain(format!(
                "bond {bond_id}: clean price {clean_price} must be positive and finite"
            )));
        }
        if !(dirty > T::zero()) || !dirty.is_finite() {
            return Err(Error::domain(format!(
                "bond {bond_id}: dirty price {dirty} must be positive and finite"
            )));
        }
        Ok(PriceObservation {
            bond_id,
            trade_date,
            clean_price,
            dirty_price: dirty,
            weight: T::one(),
        })
    }
}

/// Build the remaining cash-flow schedule of a vanilla bond as seen from
/// `valuation_date`.
///
/// Coupon amounts are `face * coupon_rate / coupon_freq`; the face is added
/// to the final payment. Payments at or before the valuation date are
/// dropped. A zero coupon frequency (or a zero coupon rate) produces the
/// single terminal payment.
pub fn generate_schedule<T: Real>(
    bond: &BondInstrument<T>,
    valuation_date: NaiveDate,
) -> Result<CashFlowSequence<T>> {
    if !bond.is_vanilla() {
        return Err(Error::RejectedInstrument {
            bond_id: bond.bond_id.clone(),
            reason: bond.flags.non_vanilla_reason(),
        });
    }
    if valuation_date >= bond.maturity_date {
        return Err(Error::MaturedInstrument {
            bond_id: bond.bond_id.clone(),
            valuation_date,
        });
    }
    let t_maturity = T::of(year_fraction(valuation_date, bond.maturity_date));
    let coupon = if bond.coupon_freq == 0 {
        T::zero()
    } else {
        bond.face * bond.coupon_rate / T::of(bond.coupon_freq as f64)
    };
    if bond.coupon_freq == 0 || coupon == T::zero() {
        return CashFlowSequence::new(vec![t_maturity], vec![bond.face]);
    }
    // Times are generated as (t_M * freq - i) / freq so the strict-positivity
    // cut sees the same rounded product a ceil(t_M * freq) count rule does.
    let freq = T::of(bond.coupon_freq as f64);
    let scaled = t_maturity * freq;
    let mut times = Vec::new();
    let mut step = 0u64;
    loop {
        let numer = scaled - T::of(step as f64);
        if !(numer > T::zero()) {
            break;
        }
        times.push(numer / freq);
        step += 1;
    }
    times.reverse();
    let n = times.len();
    let mut amounts = vec![coupon; n];
    amounts[n - 1] = amounts[n - 1] + bond.face;
    CashFlowSequence::new(times, amounts)
}

/// Value of a partial coupon.
///
/// `c_next` is the next coupon amount, `t_next` the time until it pays, and
/// `t_coupon` the full coupon period, all non-negative with
/// `t_next <= t_coupon`.
pub fn accrued_interest<T: Real>(
    c_next: T,
    t_next: T,
    t_coupon: T,
    convention: AccrualConvention,
) -> Result<T> {
    if !(t_coupon > T::zero()) || t_next < T::zero() || c_next < T::zero() {
        return Err(Error::domain(format!(
            "accrued interest needs c_next >= 0, 0 <= t_next <= t_coupon, t_coupon > 0 \
             (got c_next={c_next}, t_next={t_next}, t_coupon={t_coupon})"
        )));
    }
    if t_next > t_coupon {
        return Err(Error::domain(format!(
            "time to next coupon {t_next} exceeds the coupon period {t_coupon}"
        )));
    }
    let frac = match convention {
        AccrualConvention::RemainingFraction => t_next / t_coupon,
        AccrualConvention::ElapsedFraction => (t_coupon - t_next) / t_coupon,
    };
    Ok(c_next * frac)
}

/// Accrued interest implied by a bond and its remaining schedule.
///
/// Zero-coupon instruments accrue nothing.
pub fn accrued_for_bond<T: Real>(
    bond: &BondInstrument<T>,
    schedule: &CashFlowSequence<T>,
    convention: AccrualConvention,
) -> Result<T> {
    if bond.coupon_freq == 0 || bond.coupon_rate == T::zero() {
        return Ok(T::zero());
    }
    let c_next = bond.face * bond.coupon_rate / T::of(bond.coupon_freq as f64);
    let t_coupon = T::one() / T::of(bond.coupon_freq as f64);
    // The schedule's first time can equal t_coupon only up to rounding;
    // clamp the hairline overshoot rather than erroring.
    let t_next = schedule.times()[0].min(t_coupon);
    accrued_interest(c_next, t_next, t_coupon, convention)
}

/// Present value of a schedule under a discount function handle:
/// the inner product `sum_t c_t * d(t)`.
pub fn present_value<T: Real>(cf: &CashFlowSequence<T>, d: impl Fn(T) -> T) -> Result<T> {
    if cf.is_empty() {
        return Err(Error::domain("present value of an empty schedule"));
    }
    Ok(cf
        .times()
        .iter()
        .zip(cf.amounts())
        .map(|(&t, &c)| c * d(t))
        .sum())
}
