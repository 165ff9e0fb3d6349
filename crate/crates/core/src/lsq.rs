//! Closed-form least-squares estimators over a [`BasisDesign`]: OLS, WLS,
//! and ridge-weighted least squares.
//!
//! All three solve normal equations on the weighted, constraint-reduced
//! design, so the weights and the sum-to-one constraint are already baked
//! into `y` and `X`. OLS and WLS share a code path (an OLS design simply
//! has uniform weights); ridge adds `lambda * I` and therefore works in the
//! `N < K-1` regime corporate issuers live in.

use serde::{Deserialize, Serialize};

use crate::basis::{recover_full_beta, BasisDesign};
use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eigenvalues, Cholesky};
use crate::scalar::Real;

/// Condition-number ceiling for the unregularized normal equations.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Default ridge strength on the weight-normalized design.
pub const DEFAULT_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitMethod {
    Ols,
    Wls,
    Rwls,
}

/// Point estimate of the basis coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFit<T> {
    /// Solution in the reduced (K-1)-dimensional space.
    pub beta_reduced: Vec<T>,
    /// Full K-vector with the sum-to-one constraint restored.
    pub beta_full: Vec<T>,
    /// Raw dirty-price residuals, one per observation.
    pub residuals: Vec<T>,
    pub method: FitMethod,
    /// Ridge strength (0 for OLS/WLS).
    pub lambda: T,
}

fn solve_normal_equations<T: Real>(
    design: &BasisDesign<T>,
    ridge: Option<T>,
    method: FitMethod,
) -> Result<PointFit<T>> {
    let p = design.k() - 1;
    if design.n_obs() == 0 {
        return Err(Error::EmptyPanel);
    }
    let gram = design.x().gram();
    let (a, lambda) = match ridge {
        Some(l) => (gram.add_scaled_identity(l), l),
        None => {
            if design.n_obs() < p {
                return Err(Error::RankDeficient {
                    detail: format!("N={} < K-1={}", design.n_obs(), p),
                });
            }
            let eigs = sym_eigenvalues(&gram);
            let min = eigs[0];
            let max = eigs[p - 1];
            if !(min > T::zero()) || max / min > T::of(CONDITION_LIMIT) {
                return Err(Error::RankDeficient {
                    detail: format!(
                        "normal equations condition number {:e} exceeds {CONDITION_LIMIT:e}",
                        (max / min).to_f64_lossy()
                    ),
                });
            }
            (gram, T::zero())
        }
    };
    let chol = Cholesky::factor(&a).ok_or_else(|| Error::RankDeficient {
        detail: "normal equations are not positive definite".to_string(),
    })?;
    let beta_reduced = chol.solve(&design.x().t_matvec(design.y()));
    let beta_full = recover_full_beta(&beta_reduced);
    let fitted = design.raw_b().matvec(&beta_full);
    let residuals = design
        .dirty_prices()
        .iter()
        .zip(&fitted)
        .map(|(&p, &f)| p - f)
        .collect();
    Ok(PointFit {
        beta_reduced,
        beta_full,
        residuals,
        method,
        lambda,
    })
}

/// Ordinary least squares. Expects a design built with uniform weights;
/// on a weighted design it coincides with [`fit_wls`].
pub fn fit_ols<T: Real>(design: &BasisDesign<T>) -> Result<PointFit<T>> {
    solve_normal_equations(design, None, FitMethod::Ols)
}

/// Weighted least squares (weights already embedded in the design).
pub fn fit_wls<T: Real>(design: &BasisDesign<T>) -> Result<PointFit<T>> {
    solve_normal_equations(design, None, FitMethod::Wls)
}

/// Ridge-weighted least squares: `(X^T X + lambda I)^{-1} X^T y`.
///
/// Always succeeds for `lambda > 0`, including `N < K-1`.
pub fn fit_rwls<T: Real>(design: &BasisDesign<T>, lambda: T) -> Result<PointFit<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "ridge strength lambda={lambda} must be positive"
        )));
    }
    solve_normal_equations(design, Some(lambda), FitMethod::Rwls)
}

/// Condition number of the unregularized normal equations, for diagnostics.
/// `None` when the design is empty.
pub fn design_condition_number<T: Real>(design: &BasisDesign<T>) -> Option<T> {
    if design.n_obs() == 0 {
        return None;
    }
    Some(crate::linalg::spd_condition(&design.x().gram()))
}

/// Grid-search helper for the ridge strength over user-supplied folds.
///
/// For each candidate `lambda`, fits on the complement of every fold and
/// accumulates the weighted squared prediction error on the held-out rows.
/// Returns the winning lambda and the per-candidate scores.
pub fn select_lambda<T: Real>(
    design: &BasisDesign<T>,
    lambdas: &[T],
    folds: &[Vec<usize>],
) -> Result<(T, Vec<T>)> {
    if lambdas.is_empty() {
        return Err(Error::domain("no ridge candidates supplied"));
    }
    if folds.is_empty() {
        return Err(Error::domain("no cross-validation folds supplied"));
    }
    let n = design.n_obs();
    let prices = design.dirty_prices();
    let mut scores = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut sse = T::zero();
        for fold in folds {
            if fold.is_empty() {
                return Err(Error::domain("empty cross-validation fold"));
            }
            let train: Vec<usize> = (0..n).filter(|i| !fold.contains(i)).collect();
            if train.is_empty() {
                return Err(Error::domain("a fold covers every observation"));
            }
            let fit = fit_rwls(&design.subset(&train)?, lambda)?;
            for &i in fold {
                if i >= n {
                    return Err(Error::domain(format!("fold index {i} out of range")));
                }
                let fitted = dot(design.raw_b().row(i), &fit.beta_full);
                let r = prices[i] - fitted;
                sse = sse + design.weights()[i] * r * r;
            }
        }
        scores.push(sse);
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = i;
        }
    }
    Ok((lambdas[best], scores))
}
