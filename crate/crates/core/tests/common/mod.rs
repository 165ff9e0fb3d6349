//! Shared helpers for the integration tests.
#![allow(dead_code)]

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use spreadfit::basis::{basis_price_vector, build_design, discount_value, BasisConfig, WeightScheme};
use spreadfit::cashflow::{CashFlowSequence, PriceObservation};
use spreadfit::linalg::{lu_solve, Mat};
use spreadfit::BasisDesign64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trade_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 6, 14).unwrap()
}

/// Random bond-like schedule: 1-4 coupon-style flows plus a terminal one.
pub fn random_schedule(rng: &mut ChaCha8Rng) -> CashFlowSequence<f64> {
    let term = rng.gen_range(0.5..30.0);
    let n_flows = rng.gen_range(1..=4usize);
    let mut times: Vec<f64> = (0..n_flows)
        .map(|i| term * (i as f64 + 1.0) / n_flows as f64)
        .collect();
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut amounts: Vec<f64> = times.iter().map(|_| rng.gen_range(0.5..6.0)).collect();
    let last = amounts.len() - 1;
    amounts[last] += 100.0;
    CashFlowSequence::new(times, amounts).unwrap()
}

/// Panel of random schedules priced under a known full beta, plus optional
/// Gaussian noise on the dirty price.
pub fn synthetic_panel(
    rng: &mut ChaCha8Rng,
    n: usize,
    beta_true: &[f64],
    cfg: &BasisConfig<f64>,
    noise_sd: f64,
) -> Vec<(PriceObservation<f64>, CashFlowSequence<f64>)> {
    (0..n)
        .map(|i| {
            let cf = random_schedule(rng);
            let mut price: f64 = cf
                .times()
                .iter()
                .zip(cf.amounts())
                .map(|(&t, &c)| c * discount_value(beta_true, t, cfg))
                .sum();
            if noise_sd > 0.0 {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                price += noise_sd * z;
            }
            // Pathological draws (tiny price, deep noise tail) are floored;
            // truth-recovery tests run at zero noise where this never fires.
            price = price.max(0.01);
            (
                PriceObservation::new(format!("B{i}"), trade_date(), price, 0.0).unwrap(),
                cf,
            )
        })
        .collect()
}

/// Random full beta: positive entries summing to one, so the implied
/// discount function (and hence every price) stays strictly positive.
pub fn random_full_beta(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut beta: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = beta.iter().sum();
    for b in &mut beta {
        *b /= sum;
    }
    beta
}

/// Random design built through the production path.
pub fn random_design(
    rng: &mut ChaCha8Rng,
    n: usize,
    cfg: &BasisConfig<f64>,
    noise_sd: f64,
    scheme: WeightScheme,
) -> BasisDesign64 {
    let beta = random_full_beta(rng, cfg.k());
    let panel = synthetic_panel(rng, n, &beta, cfg, noise_sd);
    build_design(&panel, cfg, scheme).unwrap()
}

/// Independent oracle: solve `min ||y - B beta||^2` subject to
/// `sum(beta) = 1` directly through its KKT system
/// `[2 B^T B, 1; 1^T, 0] [beta; nu] = [2 B^T y; 1]`.
pub fn kkt_constrained_ls(b: &Mat<f64>, y: &[f64]) -> Vec<f64> {
    let k = b.ncols();
    let gram = b.gram();
    let bty = b.t_matvec(y);
    let mut kkt = Mat::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            kkt.set(i, j, 2.0 * gram.get(i, j));
        }
        kkt.set(i, k, 1.0);
        kkt.set(k, i, 1.0);
    }
    let mut rhs = vec![0.0; k + 1];
    for (r, v) in rhs.iter_mut().zip(&bty) {
        *r = 2.0 * v;
    }
    rhs[k] = 1.0;
    let sol = lu_solve(&kkt, &rhs).expect("KKT system solvable");
    sol[..k].to_vec()
}

/// Max absolute difference between two equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Basis-price row plus dirty price for one schedule/beta pair (scalar
/// loops only, no linalg).
pub fn priced_row(
    cf: &CashFlowSequence<f64>,
    beta: &[f64],
    cfg: &BasisConfig<f64>,
) -> (Vec<f64>, f64) {
    let row = basis_price_vector(cf, cfg);
    let price = cf
        .times()
        .iter()
        .zip(cf.amounts())
        .map(|(&t, &c)| c * discount_value(beta, t, cfg))
        .sum();
    (row, price)
}
