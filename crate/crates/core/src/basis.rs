//! Vasicek exponential basis, basis-price matrices, and the weighted,
//! constraint-reduced regression design shared by every estimator.
//!
//! The discount model is `d(t) = sum_k beta_k * exp(-alpha * k * t)` with
//! `sum_k beta_k = 1` so that `d(0) = 1` exactly. The sum-to-one constraint
//! is folded into the data: subtracting the K-th basis-price column from the
//! target and from the remaining columns turns the constrained K-dimensional
//! problem into an unconstrained (K-1)-dimensional one, with
//! `beta_K = 1 - sum(beta_reduced)` recovered afterwards.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::cashflow::{CashFlowSequence, PriceObservation};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Basis dimension and decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig<T> {
    k: usize,
    basis_decay: T,
}

impl<T: Real> Default for BasisConfig<T> {
    fn default() -> Self {
        BasisConfig {
            k: 8,
            basis_decay: T::of(0.05),
        }
    }
}

impl<T: Real> BasisConfig<T> {
    pub fn new(k: usize, basis_decay: T) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("basis size K={k} must be at least 2")));
        }
        if !(basis_decay > T::zero()) || !basis_decay.is_finite() {
            return Err(Error::domain(format!(
                "basis decay rate {basis_decay} must be positive"
            )));
        }
        Ok(BasisConfig { k, basis_decay })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basis_decay(&self) -> T {
        self.basis_decay
    }
}

/// Observation weighting applied when assembling a design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightScheme {
    /// `w = 1 / t_maturity`: long bonds carry more price variance, so they
    /// are down-weighted. The default.
    #[default]
    InverseTerm,
    /// `w = t_maturity`: the opposite reading, kept for comparison.
    ProportionalTerm,
    /// Equal weights.
    Uniform,
}

impl WeightScheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inverse-term" => Ok(WeightScheme::InverseTerm),
            "proportional-term" => Ok(WeightScheme::ProportionalTerm),
            "uniform" => Ok(WeightScheme::Uniform),
            other => Err(Error::domain(format!(
                "unknown weight scheme '{other}' \
                 (expected 'inverse-term', 'proportional-term', or 'uniform')"
            ))),
        }
    }
}

/// Basis function `phi_k(t) = exp(-alpha * k * t)`, `k` in `1..=K`.
pub fn basis_fn<T: Real>(k: usize, t: T, cfg: &BasisConfig<T>) -> Result<T> {
    if k == 0 || k > cfg.k {
        return Err(Error::domain(format!(
            "basis index {k} outside 1..={}",
            cfg.k
        )));
    }
    if t < T::zero() {
        return Err(Error::domain(format!("basis time {t} must be non-negative")));
    }
    Ok((-cfg.basis_decay * T::of(k as f64) * t).exp())
}

/// Discount value `phi_t . beta` for a full K-vector of coefficients.
///
/// Callers are expected to pass coefficients with `sum(beta) = 1`; the
/// result then equals 1 at `t = 0` up to accumulation error. Values outside
/// [0, 1] are returned as-is (the curves layer flags them).
pub fn discount_value<T: Real>(beta: &[T], t: T, cfg: &BasisConfig<T>) -> T {
    debug_assert_eq!(beta.len(), cfg.k);
    let mut d = T::zero();
    for (i, &b) in beta.iter().enumerate() {
        d = d + b * (-cfg.basis_decay * T::of((i + 1) as f64) * t).exp();
    }
    d
}

/// Basis price vector: entry `k` is the present value of the schedule under
/// basis function `phi_k`.
pub fn basis_price_vector<T: Real>(cf: &CashFlowSequence<T>, cfg: &BasisConfig<T>) -> Vec<T> {
    (1..=cfg.k)
        .map(|k| {
            let rate = cfg.basis_decay * T::of(k as f64);
            cf.times()
                .iter()
                .zip(cf.amounts())
                .map(|(&t, &c)| c * (-rate * t).exp())
                .sum()
        })
        .collect()
}

/// Recover the full K-vector from the reduced one:
/// `beta_K = 1 - sum(beta_reduced)`. The result sums to 1 by construction.
pub fn recover_full_beta<T: Real>(reduced: &[T]) -> Vec<T> {
    let mut full = reduced.to_vec();
    let sum: T = reduced.iter().copied().sum();
    full.push(T::one() - sum);
    full
}

/// Reduced regressor for a unit zero-coupon payment at tenor `t`:
/// `(phi_k(t) - phi_K(t))` for `k = 1..K-1`. Used to read the fitted
/// discount value (and its posterior) at an arbitrary tenor.
pub fn reduced_zero_coupon_row<T: Real>(t: T, cfg: &BasisConfig<T>) -> Vec<T> {
    let phi_last = (-cfg.basis_decay * T::of(cfg.k as f64) * t).exp();
    (1..cfg.k)
        .map(|k| (-cfg.basis_decay * T::of(k as f64) * t).exp() - phi_last)
        .collect()
}

/// Normalize raw weights to mean 1 (scale-invariant: `c * w` and `w`
/// normalize identically).
pub fn normalize_weights<T: Real>(raw: &[T]) -> Result<Vec<T>> {
    if raw.is_empty() {
        return Err(Error::EmptyPanel);
    }
    if raw.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
        return Err(Error::domain("weights must be positive and finite"));
    }
    let sum: T = raw.iter().copied().sum();
    let n = T::of(raw.len() as f64);
    Ok(raw.iter().map(|&w| w * n / sum).collect())
}

/// Weighted, constraint-reduced regression inputs for one issuer on one
/// date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDesign<T> {
    y: Vec<T>,
    x: Mat<T>,
    w_diag: Vec<T>,
    raw_b: Mat<T>,
    bond_ids: Vec<String>,
    k: usize,
}

impl<T: Real> BasisDesign<T> {
    /// Design with zero observations (used by the state-space filter on
    /// dates with no trades).
    pub fn empty(cfg: &BasisConfig<T>) -> Self {
        BasisDesign {
            y: Vec::new(),
            x: Mat::zeros(0, cfg.k - 1),
            w_diag: Vec::new(),
            raw_b: Mat::zeros(0, cfg.k),
            bond_ids: Vec::new(),
            k: cfg.k,
        }
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fewer observations than free parameters (K-1); the ladder then
    /// requires ridge or Bayesian estimation.
    pub fn is_underdetermined(&self) -> bool {
        self.n_obs() < self.k - 1
    }

    /// Weighted target `sqrt(W) (p - B_K)`.
    pub fn y(&self) -> &[T] {
        &self.y
    }

    /// Weighted reduced design `sqrt(W) [B_1 - B_K, ..., B_{K-1} - B_K]`.
    pub fn x(&self) -> &Mat<T> {
        &self.x
    }

    /// Normalized observation weights (mean 1).
    pub fn weights(&self) -> &[T] {
        &self.w_diag
    }

    /// Unweighted N x K basis-price matrix.
    pub fn raw_b(&self) -> &Mat<T> {
        &self.raw_b
    }

    pub fn bond_ids(&self) -> &[String] {
        &self.bond_ids
    }

    /// Dirty prices reconstructed from the weighted target.
    pub fn dirty_prices(&self) -> Vec<T> {
        (0..self.n_obs())
            .map(|n| self.y[n] / self.w_diag[n].sqrt() + self.raw_b.get(n, self.k - 1))
            .collect()
    }

    /// Row subset in the given order, preserving the original normalized
    /// weights (no renormalization, so fits on subsets stay comparable).
    pub fn subset(&self, indices: &[usize]) -> Result<BasisDesign<T>> {
        for &i in indices {
            if i >= self.n_obs() {
                return Err(Error::domain(format!(
                    "subset index {i} out of range for {} observations",
                    self.n_obs()
                )));
            }
        }
        let pick_mat = |m: &Mat<T>| {
            Mat::from_fn(indices.len(), m.ncols(), |r, c| m.get(indices[r], c))
        };
        Ok(BasisDesign {
            y: indices.iter().map(|&i| self.y[i]).collect(),
            x: pick_mat(&self.x),
            w_diag: indices.iter().map(|&i| self.w_diag[i]).collect(),
            raw_b: pick_mat(&self.raw_b),
            bond_ids: indices.iter().map(|&i| self.bond_ids[i].clone()).collect(),
            k: self.k,
        })
    }
}

/// Assemble the weighted, constraint-reduced design from priced schedules.
///
/// All observations must share a trade date and carry distinct bond ids.
/// `N < K-1` is permitted (and logged); the ridge/Bayesian estimators
/// handle that regime.
pub fn build_design<T: Real>(
    observations: &[(PriceObservation<T>, CashFlowSequence<T>)],
    cfg: &BasisConfig<T>,
    scheme: WeightScheme,
) -> Result<BasisDesign<T>> {
    if observations.is_empty() {
        return Err(Error::EmptyPanel);
    }
    let trade_date: NaiveDate = observations[0].0.trade_date;
    let mut seen: Vec<&str> = Vec::with_capacity(observations.len());
    for (obs, _) in observations {
        if obs.trade_date != trade_date {
            return Err(Error::domain(format!(
                "mixed trade dates in one panel: {} vs {}",
                trade_date, obs.trade_date
            )));
        }
        if seen.contains(&obs.bond_id.as_str()) {
            return Err(Error::DuplicateObservation {
                bond_id: obs.bond_id.clone(),
                trade_date,
            });
        }
        seen.push(&obs.bond_id);
    }

    let n = observations.len();
    let k = cfg.k;
    let raw_weights: Vec<T> = observations
        .iter()
        .map(|(_, cf)| match scheme {
            WeightScheme::InverseTerm => T::one() / cf.final_time(),
            WeightScheme::ProportionalTerm => cf.final_time(),
            WeightScheme::Uniform => T::one(),
        })
        .collect();
    let w_diag = normalize_weights(&raw_weights)?;

    let mut raw_b = Mat::zeros(n, k);
    for (row, (_, cf)) in observations.iter().enumerate() {
        let bp = basis_price_vector(cf, cfg);
        for (col, &v) in bp.iter().enumerate() {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "basis price for bond {} is not positive and finite",
                    observations[row].0.bond_id
                )));
            }
            raw_b.set(row, col, v);
        }
    }

    let mut y = Vec::with_capacity(n);
    let mut x = Mat::zeros(n, k - 1);
    for row in 0..n {
        let sqrt_w = w_diag[row].sqrt();
        let b_last = raw_b.get(row, k - 1);
        y.push(sqrt_w * (observations[row].0.dirty_price - b_last));
        for col in 0..(k - 1) {
            x.set(row, col, sqrt_w * (raw_b.get(row, col) - b_last));
        }
    }

    let design = BasisDesign {
        y,
        x,
        w_diag,
        raw_b,
        bond_ids: observations.iter().map(|(o, _)| o.bond_id.clone()).collect(),
        k,
    };
    if design.is_underdetermined() {
        log::warn!(
            "design has N={} observations for K-1={} parameters; \
             closed-form least squares will be rank deficient",
            design.n_obs(),
            k - 1
        );
    }
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cashflow::{generate_schedule, present_value, BondFlags, BondInstrument};
    use chrono::NaiveDate;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn cfg(k: usize) -> BasisConfig<f64> {
        BasisConfig::new(k, 0.05).unwrap()
    }

    fn two_year_per100(valuation: NaiveDate) -> CashFlowSequence<f64> {
        let bond = BondInstrument::new(
            "B",
            "ISS",
            date(2022, 6, 15),
            date(2026, 6, 15),
            0.05,
            2,
            100.0,
            BondFlags::vanilla(),
        )
        .unwrap();
        generate_schedule(&bond, valuation).unwrap()
    }

    #[test]
    fn basis_fn_values() {
        let c = cfg(8);
        assert_eq!(basis_fn(3, 0.0, &c).unwrap(), 1.0);
        let v = basis_fn(2, 10.0, &c).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let v = basis_fn(1, 20.0, &c).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert!(basis_fn(0, 1.0, &c).is_err());
        assert!(basis_fn(9, 1.0, &c).is_err());
        assert!(basis_fn(1, -0.5, &c).is_err());
    }

    #[test]
    fn discount_value_examples() {
        let c = cfg(8);
        let mut e1 = vec![0.0; 8];
        e1[0] = 1.0;
        let v = discount_value(&e1, 10.0, &c);
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);

        let mut half = vec![0.0; 8];
        half[0] = 0.5;
        half[1] = 0.5;
        let v = discount_value(&half, 10.0, &c);
        let want = 0.5 * (-0.5f64).exp() + 0.5 * (-1.0f64).exp();
        assert!((v - want).abs() < 1e-15);
        assert!((want - 0.48720).abs() < 1e-5);

        // At t = 0 every basis function is 1, so any sum-to-one beta gives 1.
        let beta = vec![0.3, -0.2, 0.5, 0.1, 0.05, 0.15, 0.2, -0.1];
        let s: f64 = beta.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((discount_value(&beta, 0.0, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_price_vector_single_flow() {
        let c = cfg(3);
        let cf = CashFlowSequence::new(vec![1.0], vec![100.0]).unwrap();
        let bp = basis_price_vector(&cf, &c);
        let want = [
            100.0 * (-0.05f64).exp(),
            100.0 * (-0.10f64).exp(),
            100.0 * (-0.15f64).exp(),
        ];
        for (got, want) in bp.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_price_vector_matches_present_value_exactly() {
        let c = cfg(4);
        let cf = two_year_per100(date(2024, 6, 15));
        let bp = basis_price_vector(&cf, &c);
        for k in 1..=4usize {
            let pv = present_value(&cf, |t| basis_fn(k, t, &c).unwrap()).unwrap();
            assert_eq!(bp[k - 1], pv, "column {k}");
        }
        // Brute-force four-term check of the first column on the 2y 5% bond.
        let want: f64 = 2.5 * (-0.025f64).exp()
            + 2.5 * (-0.05f64).exp()
            + 2.5 * (-0.075f64).exp()
            + 102.5 * (-0.1f64).exp();
        assert!((bp[0] - want).abs() < 1e-12);
        assert!((want - 99.8815424).abs() < 1e-7);
    }

    #[test]
    fn recover_full_beta_sums_to_one() {
        let full = recover_full_beta(&[0.2, 0.3, -0.1]);
        assert_eq!(full.len(), 4);
        let s: f64 = full.iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    fn obs(
        bond_id: &str,
        trade: NaiveDate,
        dirty: f64,
        cf: &CashFlowSequence<f64>,
    ) -> (PriceObservation<f64>, CashFlowSequence<f64>) {
        (
            PriceObservation::new(bond_id, trade, dirty, 0.0).unwrap(),
            cf.clone(),
        )
    }

    #[test]
    fn smallest_design_shape() {
        let c = cfg(2);
        let trade = date(2024, 6, 15);
        let cf = two_year_per100(trade);
        let panel = vec![obs("B1", trade, 101.0, &cf)];
        let d = build_design(&panel, &c, WeightScheme::Uniform).unwrap();
        assert_eq!(d.n_obs(), 1);
        assert_eq!(d.x().ncols(), 1);
        let b = basis_price_vector(&cf, &c);
        assert!((d.x().get(0, 0) - (b[0] - b[1])).abs() < 1e-12);
        assert!((d.y()[0] - (101.0 - b[1])).abs() < 1e-12);
    }

    #[test]
    fn exact_one_by_one_inversion() {
        // A bond priced exactly under beta = e1 must invert to beta = (1, 0).
        let c = cfg(2);
        let trade = date(2024, 6, 15);
        let cf = two_year_per100(trade);
        let beta_true = [1.0, 0.0];
        let price = discount_price(&cf, &beta_true, &c);
        let panel = vec![obs("B1", trade, price, &cf)];
        let d = build_design(&panel, &c, WeightScheme::Uniform).unwrap();
        let beta_reduced = d.y()[0] / d.x().get(0, 0);
        assert!((beta_reduced - 1.0).abs() < 1e-12);
        let full = recover_full_beta(&[beta_reduced]);
        assert!((full[1]).abs() < 1e-12);
    }

    fn discount_price(cf: &CashFlowSequence<f64>, beta: &[f64], c: &BasisConfig<f64>) -> f64 {
        present_value(cf, |t| discount_value(beta, t, c)).unwrap()
    }

    #[test]
    fn inverse_term_weight_ratio() {
        let c = cfg(3);
        let trade = date(2024, 6, 15);
        let two = CashFlowSequence::new(vec![2.0], vec![100.0]).unwrap();
        let ten = CashFlowSequence::new(vec![10.0], vec![100.0]).unwrap();
        let panel = vec![obs("B2", trade, 90.0, &two), obs("B10", trade, 60.0, &ten)];
        let d = build_design(&panel, &c, WeightScheme::InverseTerm).unwrap();
        let ratio = d.weights()[0] / d.weights()[1];
        assert!((ratio - 5.0).abs() < 1e-12);
        // Normalized to mean 1.
        let mean = (d.weights()[0] + d.weights()[1]) / 2.0;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_and_mixed_date_errors() {
        let c = cfg(3);
        let trade = date(2024, 6, 15);
        let cf = two_year_per100(trade);
        let dup = vec![obs("B1", trade, 101.0, &cf), obs("B1", trade, 102.0, &cf)];
        assert!(matches!(
            build_design(&dup, &c, WeightScheme::Uniform),
            Err(Error::DuplicateObservation { .. })
        ));
        let mut mixed = vec![obs("B1", trade, 101.0, &cf)];
        mixed.push(obs("B2", date(2024, 6, 16), 101.0, &cf));
        assert!(build_design(&mixed, &c, WeightScheme::Uniform).is_err());
        let empty: Vec<(PriceObservation<f64>, CashFlowSequence<f64>)> = vec![];
        assert!(matches!(
            build_design(&empty, &c, WeightScheme::Uniform),
            Err(Error::EmptyPanel)
        ));
    }

    #[test]
    fn weight_normalization_is_scale_invariant() {
        let w = vec![0.5, 1.5, 4.0];
        let scaled: Vec<f64> = w.iter().map(|x| x * 123.456).collect();
        let a = normalize_weights(&w).unwrap();
        let b = normalize_weights(&scaled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn subset_preserves_rows_and_weights() {
        let c = cfg(3);
        let trade = date(2024, 6, 15);
        let cf2 = CashFlowSequence::new(vec![2.0], vec![100.0]).unwrap();
        let cf5 = CashFlowSequence::new(vec![5.0], vec![100.0]).unwrap();
        let cf9 = CashFlowSequence::new(vec![9.0], vec![100.0]).unwrap();
        let panel = vec![
            obs("A", trade, 90.0, &cf2),
            obs("B", trade, 80.0, &cf5),
            obs("C", trade, 70.0, &cf9),
        ];
        let d = build_design(&panel, &c, WeightScheme::InverseTerm).unwrap();
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.n_obs(), 2);
        assert_eq!(s.bond_ids(), &["C".to_string(), "A".to_string()]);
        assert_eq!(s.weights()[0], d.weights()[2]);
        assert_eq!(s.y()[1], d.y()[0]);
        assert!(d.subset(&[3]).is_err());
    }
}
