//! Polynomial trend estimation with AIC degree selection.
//!
//! Trends are fit on the raw time steps `n = 1..N`. Coefficients are also
//! reported on time rescaled to `s = (n - 1) / (N - 1)` in `[0, 1]`, which is
//! the form the icon discriminator consumes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::CleanDataset;
use crate::error::{Result, TrecError};

/// Lower bound applied to the residual variance before taking its log.
pub const SIGMA2_FLOOR: f64 = 1e-12;

pub const CANDIDATE_DEGREES: [usize; 3] = [1, 2, 3];

pub const BAND_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub fitted: Vec<f64>,
    pub rss: f64,
    /// Maximum-likelihood residual variance `rss / N`, floored at [`SIGMA2_FLOOR`].
    pub sigma2: f64,
    pub sigma2_clamped: bool,
    pub loglik: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    /// Canonical variable name; empty for fits made outside a dataset.
    pub variable: String,
    pub degree: usize,
    /// Coefficients on raw time steps, constant term first.
    pub beta: Vec<f64>,
    /// Coefficients on time rescaled to [0, 1], zero above `degree`.
    pub gamma: [f64; 4],
    pub sigma2: f64,
    pub sigma2_clamped: bool,
    pub loglik: f64,
    pub aic: f64,
    pub fitted: Vec<f64>,
    pub band_lower: Vec<f64>,
    pub band_upper: Vec<f64>,
}

impl TrendFit {
    pub fn len(&self) -> usize {
        self.fitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitted.is_empty()
    }

    /// Number of regression coefficients.
    pub fn n_coefficients(&self) -> usize {
        self.degree + 1
    }

    /// Residual sum of squares implied by the stored variance.
    fn rss(&self) -> f64 {
        self.sigma2 * self.len() as f64
    }
}

/// AIC parameter count: the regression coefficients plus the residual variance.
pub fn parameter_count(degree: usize) -> usize {
    degree + 2
}

pub fn aic(loglik: f64, degree: usize) -> f64 {
    -2.0 * loglik + 2.0 * parameter_count(degree) as f64
}

/// Gaussian maximized log-likelihood for residual variance `sigma2`.
pub fn log_likelihood(n: usize, sigma2: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + 1.0 + sigma2.ln())
}

/// Polynomial design on steps `1..=n` with column `k` divided by `n^k`.
/// Scaling keeps the QR well conditioned; [`unscale`] maps coefficients back.
struct Design {
    z: DMatrix<f64>,
    scale: Vec<f64>,
}

impl Design {
    fn new(n: usize, p: usize) -> Self {
        let nf = n as f64;
        let scale: Vec<f64> = (0..p).map(|k| nf.powi(k as i32)).collect();
        let z = DMatrix::from_fn(n, p, |i, k| ((i + 1) as f64 / nf).powi(k as i32));
        Design { z, scale }
    }

    /// Upper-triangular R of the thin QR, after a rank check.
    fn qr(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let qr = self.z.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let diag_max = r.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * diag_max) {
            return Err(TrecError::Numeric("rank-deficient polynomial design".into()));
        }
        Ok((q, r))
    }

    fn unscale(&self, coef: &DVector<f64>) -> Vec<f64> {
        coef.iter().zip(&self.scale).map(|(c, s)| c / s).collect()
    }
}

/// Least-squares polynomial fit of `y` on steps `1..=N`, solved through a QR
/// decomposition of the design.
pub fn ols_fit(y: &[f64], degree: usize) -> Result<OlsFit> {
    let n = y.len();
    let p = degree + 1;
    if n < degree + 2 {
        return Err(TrecError::InvalidArgument(format!(
            "degree {degree} needs at least {} time steps, found {n}",
            degree + 2
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(TrecError::Numeric("non-finite observation".into()));
    }
    let design = Design::new(n, p);
    let (q, r) = design.qr()?;
    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| TrecError::Numeric("singular triangular factor".into()))?;
    let fitted_v = &design.z * &coef;
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let raw = rss / n as f64;
    let sigma2_clamped = raw < SIGMA2_FLOOR;
    let sigma2 = raw.max(SIGMA2_FLOOR);
    Ok(OlsFit {
        beta: design.unscale(&coef),
        fitted,
        rss,
        sigma2,
        sigma2_clamped,
        loglik: log_likelihood(n, sigma2),
    })
}

/// Re-expresses raw-step coefficients on `s = (n - 1) / (N - 1)` by expanding
/// `n = 1 + (N - 1) s` binomially. Entries above the degree stay exactly zero.
pub fn standardized_coefficients(beta: &[f64], n: usize) -> [f64; 4] {
    assert!(beta.len() <= 4, "at most cubic");
    let h = (n as f64) - 1.0;
    let mut gamma = [0.0; 4];
    for (k, b) in beta.iter().enumerate() {
        for (l, g) in gamma.iter_mut().enumerate().take(k + 1) {
            *g += b * binomial(k, l) * h.powi(l as i32);
        }
    }
    gamma
}

fn binomial(k: usize, l: usize) -> f64 {
    (0..l).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Evaluates a polynomial in `s` (constant first).
pub fn eval_poly(coef: &[f64], s: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// Pointwise 95% confidence band for the mean trend:
/// `fitted ± t(0.975, N-p) * s * sqrt(z' (Z'Z)^-1 z)` with `s^2 = N sigma2 / (N - p)`.
pub fn trend_band(fit: &TrendFit) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = fit.len();
    let p = fit.n_coefficients();
    if n <= p {
        return Err(TrecError::InvalidArgument(format!(
            "band needs residual degrees of freedom (N = {n}, p = {p})"
        )));
    }
    let df = (n - p) as f64;
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| TrecError::Numeric(e.to_string()))?
        .inverse_cdf(0.5 + BAND_LEVEL / 2.0);
    let s = (fit.rss() / df).sqrt();

    let design = Design::new(n, p);
    let (_, r) = design.qr()?;
    let rt = r.transpose();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for (i, f) in fit.fitted.iter().enumerate() {
        let z = design.z.row(i).transpose();
        // leverage = |R^-T z|^2
        let w = rt
            .solve_lower_triangular(&z)
            .ok_or_else(|| TrecError::Numeric("singular triangular factor".into()))?;
        let half = t * s * w.norm();
        lower.push(f - half);
        upper.push(f + half);
    }
    Ok((lower, upper))
}

/// Fits every candidate degree the series length allows and keeps the
/// minimum-AIC fit; ties go to the smaller degree.
pub fn select_degree(y: &[f64]) -> Result<TrendFit> {
    let n = y.len();
    let mut best: Option<(usize, OlsFit, f64)> = None;
    for degree in CANDIDATE_DEGREES.into_iter().filter(|d| n >= d + 2) {
        let fit = ols_fit(y, degree)?;
        let a = aic(fit.loglik, degree);
        if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
            best = Some((degree, fit, a));
        }
    }
    let (degree, ols, aic) = best.ok_or_else(|| {
        TrecError::InvalidArgument(format!("need at least 3 time steps, found {n}"))
    })?;
    let mut fit = TrendFit {
        variable: String::new(),
        degree,
        gamma: standardized_coefficients(&ols.beta, n),
        beta: ols.beta,
        sigma2: ols.sigma2,
        sigma2_clamped: ols.sigma2_clamped,
        loglik: ols.loglik,
        aic,
        fitted: ols.fitted,
        band_lower: Vec::new(),
        band_upper: Vec::new(),
    };
    let (lower, upper) = trend_band(&fit)?;
    fit.band_lower = lower;
    fit.band_upper = upper;
    Ok(fit)
}

/// One fit per retained variable, in dataset order.
pub fn fit_all(d: &CleanDataset) -> Result<Vec<TrendFit>> {
    d.variables
        .iter()
        .map(|v| {
            let mut fit = select_degree(&v.values).map_err(|e| e.for_variable(&v.name))?;
            fit.variable = v.name.clone();
            Ok(fit)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    /// Explicit (Z'Z)^-1 Z'Y with Gauss-Jordan inversion on the unscaled design.
    fn normal_equation_oracle(y: &[f64], degree: usize) -> Vec<f64> {
        let n = y.len();
        let p = degree + 1;
        let z: Vec<Vec<f64>> = (1..=n)
            .map(|t| (0..p).map(|k| (t as f64).powi(k as i32)).collect())
            .collect();
        let mut a = vec![vec![0.0; 2 * p]; p];
        for i in 0..p {
            for j in 0..p {
                a[i][j] = z.iter().map(|row| row[i] * row[j]).sum();
            }
            a[i][p + i] = 1.0;
        }
        for col in 0..p {
            let piv = (col..p)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for row in 0..p {
                if row != col {
                    let f = a[row][col];
                    let pivot_row = a[col].clone();
                    for (v, pv) in a[row].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let zty: Vec<f64> = (0..p)
            .map(|k| z.iter().zip(y).map(|(row, yv)| row[k] * yv).sum())
            .collect();
        (0..p)
            .map(|i| (0..p).map(|j| a[i][p + j] * zty[j]).sum())
            .collect()
    }

    #[test]
    fn exact_line() {
        let y: Vec<f64> = (1..=10).map(|n| 2.0 * n as f64).collect();
        let f = ols_fit(&y, 1).unwrap();
        assert!(f.beta[0].abs() < 1e-12);
        assert!((f.beta[1] - 2.0).abs() < 1e-12);
        assert!(f.sigma2_clamped);
        assert_eq!(f.sigma2, SIGMA2_FLOOR);
        assert!(f.fitted.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn zero_data() {
        let f = ols_fit(&[0.0; 8], 1).unwrap();
        assert_eq!(f.beta, vec![0.0, 0.0]);
    }

    #[test]
    fn too_short_for_degree() {
        assert!(matches!(
            ols_fit(&[1.0, 2.0, 3.0, 4.0], 3),
            Err(TrecError::InvalidArgument(_))
        ));
    }

    #[test]
    fn noisy_cubic_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let y: Vec<f64> = (1..=30)
            .map(|n| {
                let n = n as f64;
                0.3 - 0.2 * n + 0.05 * n * n - 0.001 * n.powi(3) + noise.sample(&mut rng)
            })
            .collect();
        let f = ols_fit(&y, 3).unwrap();
        let oracle = normal_equation_oracle(&y, 3);
        for (b, o) in f.beta.iter().zip(&oracle) {
            assert!((b - o).abs() <= 1e-8 * o.abs().max(1e-12), "{b} vs {o}");
        }
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for degree in 1..=3 {
            let y: Vec<f64> = (0..25).map(|_| rng.random_range(-2.0..2.0)).collect();
            let f = ols_fit(&y, degree).unwrap();
            for k in 0..=degree {
                let scale = 25f64.powi(k as i32);
                let dot: f64 = (1..=25)
                    .zip(&y)
                    .zip(&f.fitted)
                    .map(|((n, yv), fv)| (n as f64).powi(k as i32) / scale * (yv - fv))
                    .sum();
                assert!(dot.abs() < 1e-8, "degree {degree} column {k}: {dot}");
            }
        }
    }

    #[test]
    fn loglik_matches_pointwise_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = ols_fit(&y, 2).unwrap();
        let sd = f.sigma2.sqrt();
        let pointwise: f64 = y
            .iter()
            .zip(&f.fitted)
            .map(|(yv, fv)| {
                let r = (yv - fv) / sd;
                -0.5 * r * r - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            })
            .sum();
        assert!((f.loglik - pointwise).abs() < 1e-6);
    }

    #[test]
    fn standardized_line() {
        let n = 12;
        let g = standardized_coefficients(&[0.0, 2.0], n);
        assert_eq!(g, [2.0, 2.0 * (n as f64 - 1.0), 0.0, 0.0]);
    }

    #[test]
    fn standardized_cubic_agrees_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.random_range(5..60);
            let beta: Vec<f64> = (0..4)
                .map(|k| rng.random_range(-1.0..1.0) / (n as f64).powi(k))
                .collect();
            let g = standardized_coefficients(&beta, n);
            for t in 1..=n {
                let s = (t - 1) as f64 / (n - 1) as f64;
                let raw = eval_poly(&beta, t as f64);
                assert!((eval_poly(&g, s) - raw).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_line_selects_degree_one() {
        let y: Vec<f64> = (1..=20).map(|n| n as f64).collect();
        let mean = 10.5;
        let sd = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 19.0).sqrt();
        let z: Vec<f64> = y.iter().map(|v| (v - mean) / sd).collect();
        let fit = select_degree(&z).unwrap();
        assert_eq!(fit.degree, 1);
        assert_eq!(fit.gamma[2], 0.0);
        assert_eq!(fit.gamma[3], 0.0);
        let widest = fit
            .band_lower
            .iter()
            .zip(&fit.band_upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max);
        assert!(widest < 1e-4, "{widest}");
    }

    #[test]
    fn selected_aic_is_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let y: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fit = select_degree(&y).unwrap();
            for d in CANDIDATE_DEGREES {
                let other = ols_fit(&y, d).unwrap();
                assert!(fit.aic <= aic(other.loglik, d));
            }
            assert!((fit.aic - (-2.0 * fit.loglik + 2.0 * (fit.degree + 2) as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_signal_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 20;
        let shape: Vec<f64> = (0..n)
            .map(|i| {
                let x = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
                x.powi(3) - 0.6 * x
            })
            .collect();
        let mean = shape.iter().sum::<f64>() / n as f64;
        let var = shape.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let noise = Normal::new(0.0, (var / 10.0).sqrt()).unwrap();
        let hits = (0..200)
            .filter(|_| {
                let y: Vec<f64> = shape.iter().map(|v| v + noise.sample(&mut rng)).collect();
                select_degree(&y).unwrap().degree == 3
            })
            .count();
        assert!(hits >= 190, "{hits}/200");
    }

    #[test]
    fn band_symmetric_and_widest_at_ends() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<f64> = (1..=21)
            .map(|n| 0.1 * n as f64 + rng.random_range(-0.5..0.5))
            .collect();
        let ols = ols_fit(&y, 1).unwrap();
        let fit = TrendFit {
            variable: "x".into(),
            degree: 1,
            gamma: standardized_coefficients(&ols.beta, 21),
            beta: ols.beta,
            sigma2: ols.sigma2,
            sigma2_clamped: false,
            loglik: ols.loglik,
            aic: 0.0,
            fitted: ols.fitted.clone(),
            band_lower: vec![],
            band_upper: vec![],
        };
        let (lo, hi) = trend_band(&fit).unwrap();
        let width: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
        for ((l, h), f) in lo.iter().zip(&hi).zip(&ols.fitted) {
            assert!(((f - l) - (h - f)).abs() < 1e-12);
            assert!(l <= f && f <= h);
        }
        assert!(width[0] > width[10]);
        assert!(width[20] > width[10]);
        // leverage of a line is minimized at the time mean (step 11)
        let min_at = width
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(min_at, 10);
    }

    #[test]
    fn band_needs_residual_df() {
        let fit = TrendFit {
            variable: String::new(),
            degree: 3,
            beta: vec![0.0; 4],
            gamma: [0.0; 4],
            sigma2: 1.0,
            sigma2_clamped: false,
            loglik: 0.0,
            aic: 0.0,
            fitted: vec![0.0; 4],
            band_lower: vec![],
            band_upper: vec![],
        };
        assert!(trend_band(&fit).is_err());
    }
}
