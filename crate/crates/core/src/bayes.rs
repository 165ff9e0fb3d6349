//! Conjugate Normal-Inverse-Gamma regression over a [`BasisDesign`].
//!
//! The model places a joint NIG prior on the reduced coefficients and the
//! observation variance: `beta | sigma^2 ~ N(mu, sigma^2 Lambda)` and
//! `sigma^2 ~ InvGamma(shape, scale)`. Conjugacy gives closed-form
//! posterior updates and Student-t predictives, and with `mu_0 = 0`,
//! `Lambda_0 = lambda^{-1} I` the posterior mean is exactly the ridge
//! solution — the identity the estimator ladder is built around.

use serde::{Deserialize, Serialize};

use crate::basis::BasisDesign;
use crate::error::{Error, Result};
use crate::linalg::{dot, quadratic_form, sym_eigenvalues, Cholesky, Mat};
use crate::scalar::Real;
use crate::special::student_t_quantile;

/// Default prior shape: barely above the point where the variance of
/// sigma^2 exists.
pub const DEFAULT_PRIOR_SHAPE: f64 = 2.01;

/// Normal-Inverse-Gamma parameters (prior or posterior).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NigParams<T> {
    mu: Vec<T>,
    lambda: Mat<T>,
    ig_shape: T,
    ig_scale: T,
}

impl<T: Real> NigParams<T> {
    /// Validated constructor: `lambda` must be symmetric (1e-10) and
    /// positive definite, the inverse-gamma parameters positive.
    pub fn new(mu: Vec<T>, lambda: Mat<T>, ig_shape: T, ig_scale: T) -> Result<Self> {
        let params = NigParams {
            mu,
            lambda,
            ig_shape,
            ig_scale,
        };
        params.validate()?;
        Ok(params)
    }

    /// Re-check the invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        let p = self.mu.len();
        if self.lambda.nrows() != p || self.lambda.ncols() != p {
            return Err(Error::domain(format!(
                "scale matrix is {}x{} but the location has length {p}",
                self.lambda.nrows(),
                self.lambda.ncols()
            )));
        }
        if !self.lambda.is_well_formed() || self.mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite posterior parameters"));
        }
        if self.lambda.max_symmetry_gap() > T::of(1e-10) {
            return Err(Error::domain("scale matrix is not symmetric"));
        }
        if Cholesky::factor(&self.lambda).is_none() {
            return Err(Error::domain("scale matrix is not positive definite"));
        }
        if !(self.ig_shape > T::zero()) || !(self.ig_scale > T::zero()) {
            return Err(Error::domain(format!(
                "inverse-gamma parameters must be positive (shape={}, scale={})",
                self.ig_shape, self.ig_scale
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Location vector (reduced coefficients).
    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    /// Scaled covariance matrix.
    pub fn lambda(&self) -> &Mat<T> {
        &self.lambda
    }

    pub fn ig_shape(&self) -> T {
        self.ig_shape
    }

    pub fn ig_scale(&self) -> T {
        self.ig_scale
    }

    /// Posterior mean of sigma^2, defined for shape > 1.
    pub fn sigma_sq_mean(&self) -> T {
        self.ig_scale / (self.ig_shape - T::one())
    }

    /// Posterior variance of sigma^2, defined for shape > 2.
    pub fn sigma_sq_variance(&self) -> T {
        let m = self.sigma_sq_mean();
        m * m / (self.ig_shape - T::of(2.0))
    }

    /// Smallest eigenvalue of the scale matrix.
    pub fn min_eigenvalue(&self) -> T {
        sym_eigenvalues(&self.lambda)[0]
    }
}

/// Default prior for a basis of size `k`: symmetric location `1/K` in each
/// reduced coordinate, `Lambda_0 = lambda^{-1} I`, shape 2.01, and scale
/// chosen so the prior mean of sigma^2 is one squared price unit.
pub fn default_prior<T: Real>(k: usize, lambda: T) -> Result<NigParams<T>> {
    if k < 2 {
        return Err(Error::domain(format!("basis size K={k} must be at least 2")));
    }
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "prior ridge strength lambda={lambda} must be positive"
        )));
    }
    let shape = T::of(DEFAULT_PRIOR_SHAPE);
    NigParams::new(
        vec![T::one() / T::of(k as f64); k - 1],
        Mat::scaled_identity(k - 1, T::one() / lambda),
        shape,
        shape - T::one(),
    )
}

/// Conjugate posterior update.
///
/// An empty design returns the prior unchanged. The posterior precision
/// factor is reused for the location solve, the explicit covariance, and
/// the `mu*^T Lambda*^{-1} mu*` term of the scale update.
pub fn posterior_update<T: Real>(
    prior: &NigParams<T>,
    design: &BasisDesign<T>,
) -> Result<NigParams<T>> {
    let n = design.n_obs();
    if n == 0 {
        return Ok(prior.clone());
    }
    let p = prior.dim();
    if design.k() - 1 != p {
        return Err(Error::domain(format!(
            "design has K-1={} parameters but the prior has {p}",
            design.k() - 1
        )));
    }
    let prior_chol = Cholesky::factor(prior.lambda())
        .ok_or_else(|| Error::domain("prior scale matrix is not positive definite"))?;
    let lambda0_inv = prior_chol.inverse();
    let precision = design
        .x()
        .gram()
        .add(&lambda0_inv)
        .symmetrized();
    let chol = Cholesky::factor(&precision)
        .ok_or_else(|| Error::domain("posterior precision is not positive definite"))?;
    let l0i_mu0 = lambda0_inv.matvec(prior.mu());
    let mut rhs = design.x().t_matvec(design.y());
    for (r, m) in rhs.iter_mut().zip(&l0i_mu0) {
        *r = *r + *m;
    }
    let mu_star = chol.solve(&rhs);
    let lambda_star = chol.inverse().symmetrized();

    let half = T::of(0.5);
    let shape_star = prior.ig_shape() + half * T::of(n as f64);
    let y_sq = dot(design.y(), design.y());
    let prior_quad = dot(prior.mu(), &l0i_mu0);
    let post_quad = quadratic_form(&precision, &mu_star);
    let scale_star = prior.ig_scale() + half * (y_sq + prior_quad - post_quad);
    if !(scale_star > T::zero()) {
        return Err(Error::NegativeScale {
            gamma: scale_star.to_f64_lossy(),
        });
    }
    NigParams::new(mu_star, lambda_star, shape_star, scale_star)
}

/// Student-t predictive distribution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictiveT<T> {
    pub dof: T,
    pub location: T,
    /// Standard-deviation-like scale (non-negative).
    pub scale: T,
}

/// Predictive distribution of a new observation at regressor `x_new`:
/// Student-t with `2 * shape` degrees of freedom, location `x^T mu`, and
/// squared scale `(scale/shape) * (1 + x^T Lambda x)`.
pub fn predictive<T: Real>(posterior: &NigParams<T>, x_new: &[T]) -> PredictiveT<T> {
    debug_assert_eq!(x_new.len(), posterior.dim());
    let quad = quadratic_form(posterior.lambda(), x_new);
    let s2 = posterior.ig_scale() / posterior.ig_shape() * (T::one() + quad);
    PredictiveT {
        dof: T::of(2.0) * posterior.ig_shape(),
        location: dot(x_new, posterior.mu()),
        scale: s2.max(T::zero()).sqrt(),
    }
}

/// Posterior distribution of the linear functional `x^T beta` itself
/// (no observation-noise term) — what curve confidence bands are built
/// from.
pub fn posterior_functional<T: Real>(posterior: &NigParams<T>, x: &[T]) -> PredictiveT<T> {
    debug_assert_eq!(x.len(), posterior.dim());
    let quad = quadratic_form(posterior.lambda(), x);
    let s2 = posterior.ig_scale() / posterior.ig_shape() * quad;
    PredictiveT {
        dof: T::of(2.0) * posterior.ig_shape(),
        location: dot(x, posterior.mu()),
        scale: s2.max(T::zero()).sqrt(),
    }
}

/// Central credible interval `location ± t_{dof,(1+level)/2} * scale`.
pub fn credible_interval<T: Real>(pred: &PredictiveT<T>, level: T) -> Result<(T, T)> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::domain(format!(
            "credible level {level} outside (0, 1)"
        )));
    }
    if !(pred.dof > T::zero()) {
        return Err(Error::domain(format!(
            "degrees of freedom {} must be positive",
            pred.dof
        )));
    }
    if pred.scale == T::zero() {
        return Ok((pred.location, pred.location));
    }
    let q = student_t_quantile((T::one() + level) * T::of(0.5), pred.dof)?;
    let half_width = q * pred.scale;
    Ok((pred.location - half_width, pred.location + half_width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_design, discount_value, BasisConfig, WeightScheme};
    use crate::cashflow::{CashFlowSequence, PriceObservation};
    use crate::lsq::fit_rwls;
    use chrono::NaiveDate;

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 6, 14).unwrap()
    }

    fn cfg(k: usize) -> BasisConfig<f64> {
        BasisConfig::new(k, 0.05).unwrap()
    }

    fn panel(
        terms: &[f64],
        beta_true: &[f64],
        cfg: &BasisConfig<f64>,
        bump: f64,
    ) -> Vec<(PriceObservation<f64>, CashFlowSequence<f64>)> {
        terms
            .iter()
            .enumerate()
            .map(|(i, &term)| {
                let cf = CashFlowSequence::new(vec![term * 0.5, term], vec![3.0, 103.0]).unwrap();
                let price: f64 = cf
                    .times()
                    .iter()
                    .zip(cf.amounts())
                    .map(|(&t, &c)| c * discount_value(beta_true, t, cfg))
                    .sum::<f64>()
                    + bump * ((i % 3) as f64 - 1.0);
                (
                    PriceObservation::new(format!("B{i}"), date(), price, 0.0).unwrap(),
                    cf,
                )
            })
            .collect()
    }

    fn beta4() -> Vec<f64> {
        vec![0.35, 0.3, 0.2, 0.15]
    }

    #[test]
    fn empty_update_is_identity() {
        let prior = default_prior::<f64>(8, 1.0).unwrap();
        let d = BasisDesign::empty(&cfg(8));
        let post = posterior_update(&prior, &d).unwrap();
        assert_eq!(post, prior);
    }

    #[test]
    fn ridge_identity_with_zero_mean_prior() {
        let c = cfg(4);
        let obs = panel(&[1.0, 3.0, 8.0, 15.0, 25.0], &beta4(), &c, 0.2);
        let d = build_design(&obs, &c, WeightScheme::InverseTerm).unwrap();
        let lambda = 0.7;
        let prior = NigParams::new(
            vec![0.0; 3],
            Mat::scaled_identity(3, 1.0 / lambda),
            2.01,
            1.01,
        )
        .unwrap();
        let post = posterior_update(&prior, &d).unwrap();
        let ridge = fit_rwls(&d, lambda).unwrap();
        for (a, b) in post.mu().iter().zip(&ridge.beta_reduced) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn shape_update_counts_half_n() {
        let c = cfg(4);
        let obs = panel(&[1.0, 2.0, 4.0, 7.0, 12.0, 20.0], &beta4(), &c, 0.1);
        let d = build_design(&obs, &c, WeightScheme::Uniform).unwrap();
        let prior = NigParams::new(vec![0.0; 3], Mat::identity(3), 2.0, 1.0).unwrap();
        let post = posterior_update(&prior, &d).unwrap();
        assert_eq!(post.ig_shape(), 5.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn scale_update_matches_scalar_evaluation() {
        // Independent scalar-loop evaluation of the scale update on a
        // small random-ish design.
        let c = cfg(3);
        let obs = panel(&[2.0, 5.0, 9.0, 14.0], &[0.5, 0.3, 0.2], &c, 0.3);
        let d = build_design(&obs, &c, WeightScheme::Uniform).unwrap();
        let prior = NigParams::new(
            vec![0.2, -0.1],
            Mat::from_rows(&[vec![0.5, 0.1], vec![0.1, 0.4]]),
            2.5,
            1.5,
        )
        .unwrap();
        let post = posterior_update(&prior, &d).unwrap();

        // Scalar path: build everything with plain loops.
        let n = d.n_obs();
        let p = 2;
        let l0 = [[0.5, 0.1], [0.1, 0.4]];
        let det = l0[0][0] * l0[1][1] - l0[0][1] * l0[1][0];
        let l0inv = [
            [l0[1][1] / det, -l0[0][1] / det],
            [-l0[1][0] / det, l0[0][0] / det],
        ];
        let mu0 = [0.2, -0.1];
        let mut a = [[0.0f64; 2], [0.0f64; 2]];
        for i in 0..p {
            for j in 0..p {
                a[i][j] = l0inv[i][j];
                for r in 0..n {
                    a[i][j] += d.x().get(r, i) * d.x().get(r, j);
                }
            }
        }
        let mut rhs = [0.0f64; 2];
        for i in 0..p {
            for r in 0..n {
                rhs[i] += d.x().get(r, i) * d.y()[r];
            }
            for j in 0..p {
                rhs[i] += l0inv[i][j] * mu0[j];
            }
        }
        // 2x2 solve.
        let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let mu_star = [
            (a[1][1] * rhs[0] - a[0][1] * rhs[1]) / det_a,
            (-a[1][0] * rhs[0] + a[0][0] * rhs[1]) / det_a,
        ];
        let yty: f64 = d.y().iter().map(|v| v * v).sum();
        let mut quad0 = 0.0;
        let mut quad1 = 0.0;
        for i in 0..p {
            for j in 0..p {
                quad0 += mu0[i] * l0inv[i][j] * mu0[j];
                quad1 += mu_star[i] * a[i][j] * mu_star[j];
            }
        }
        let want = 1.5 + 0.5 * (yty + quad0 - quad1);
        assert!((post.ig_scale() - want).abs() < 1e-9, "{} vs {want}", post.ig_scale());
        for i in 0..p {
            assert!((post.mu()[i] - mu_star[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn predictive_at_origin_is_pure_noise() {
        let prior = NigParams::<f64>::new(vec![0.3, -0.2], Mat::identity(2), 3.0, 2.0).unwrap();
        let pred = predictive(&prior, &[0.0, 0.0]);
        assert_eq!(pred.location, 0.0);
        assert_eq!(pred.dof, 6.0);
        assert!((pred.scale * pred.scale - 2.0 / 3.0).abs() < 1e-14);
        // Scale is never below the pure-noise floor.
        let pred2 = predictive(&prior, &[1.5, -2.0]);
        assert!(pred2.scale * pred2.scale >= 2.0 / 3.0);
    }

    #[test]
    fn held_out_prediction_within_three_scales() {
        let c = cfg(4);
        let beta = beta4();
        let all = panel(&[1.0, 2.0, 3.0, 5.0, 7.0, 9.0, 12.0, 16.0, 22.0, 30.0], &beta, &c, 0.0);
        let d_all = build_design(&all, &c, WeightScheme::Uniform).unwrap();
        let train: Vec<usize> = (0..9).collect();
        let d = d_all.subset(&train).unwrap();
        let prior = default_prior::<f64>(4, 1.0).unwrap();
        let post = posterior_update(&prior, &d).unwrap();
        // Held-out row 9: weighted regressor and weighted target.
        let x_new: Vec<f64> = d_all.x().row(9).to_vec();
        let pred = predictive(&post, &x_new);
        let y_true = d_all.y()[9];
        assert!(
            (pred.location - y_true).abs() <= 3.0 * pred.scale,
            "location {} target {} scale {}",
            pred.location,
            y_true,
            pred.scale
        );
    }

    #[test]
    fn credible_interval_reference_widths() {
        let pred = PredictiveT::<f64> {
            dof: 4.0,
            location: 10.0,
            scale: 2.0,
        };
        let (lo, hi) = credible_interval(&pred, 0.95).unwrap();
        let half = (hi - lo) / 2.0;
        assert!((half - 2.7764451052 * 2.0).abs() < 1e-6);
        assert!(((hi + lo) / 2.0 - 10.0).abs() < 1e-12);

        let wide = PredictiveT::<f64> {
            dof: 1e6,
            location: 0.0,
            scale: 1.0,
        };
        let (lo, hi) = credible_interval(&wide, 0.95).unwrap();
        assert!((hi - 1.95996).abs() < 1e-4);
        assert!((lo + 1.95996).abs() < 1e-4);

        // Vanishing level degenerates to the location (quantile resolution
        // near the median is ~1e-8).
        let (lo, hi) = credible_interval(&pred, 1e-12).unwrap();
        assert!((lo - 10.0).abs() < 1e-6 && (hi - 10.0).abs() < 1e-6);

        assert!(credible_interval(&pred, 0.0).is_err());
        assert!(credible_interval(&pred, 1.0).is_err());
    }

    #[test]
    fn posterior_mean_minimizes_penalized_objective() {
        let c = cfg(4);
        let obs = panel(&[1.0, 3.0, 8.0, 15.0], &beta4(), &c, 0.4);
        let d = build_design(&obs, &c, WeightScheme::Uniform).unwrap();
        let prior = NigParams::new(
            vec![0.1, 0.2, -0.05],
            Mat::scaled_identity(3, 0.8),
            2.5,
            1.2,
        )
        .unwrap();
        let post = posterior_update(&prior, &d).unwrap();
        let chol = Cholesky::factor(prior.lambda()).unwrap();
        let l0inv = chol.inverse();
        let objective = |b: &[f64]| -> f64 {
            let fitted = d.x().matvec(b);
            let sse: f64 = d
                .y()
                .iter()
                .zip(&fitted)
                .map(|(y, f)| (y - f) * (y - f))
                .sum();
            let diff: Vec<f64> = b.iter().zip(prior.mu()).map(|(x, m)| x - m).collect();
            sse + quadratic_form(&l0inv, &diff)
        };
        let at_opt = objective(post.mu());
        for i in 0..3 {
            for step in [-1e-4, 1e-4] {
                let mut b = post.mu().to_vec();
                b[i] += step;
                assert!(objective(&b) >= at_opt - 1e-12);
            }
        }
    }

    #[test]
    fn nig_validation_rejects_bad_parameters() {
        assert!(NigParams::new(vec![0.0], Mat::identity(2), 2.0, 1.0).is_err());
        let mut asym = Mat::identity(2);
        asym.set(0, 1, 0.5);
        assert!(NigParams::new(vec![0.0, 0.0], asym, 2.0, 1.0).is_err());
        let mut indef = Mat::identity(2);
        indef.set(1, 1, -1.0);
        assert!(NigParams::new(vec![0.0, 0.0], indef, 2.0, 1.0).is_err());
        assert!(NigParams::new(vec![0.0, 0.0], Mat::identity(2), 0.0, 1.0).is_err());
        assert!(NigParams::new(vec![0.0, 0.0], Mat::identity(2), 2.0, -1.0).is_err());
    }
}
