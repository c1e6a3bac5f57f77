//! Multinomial logistic discriminator with a reference category.
//!
//! Categories 1..3 carry parameter vectors `theta[j]`; category 4 is the
//! reference with linear score fixed at zero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::catalog::eligible_icons;
use super::FeatureVector;
use crate::error::{Result, TrecError};
use crate::rough::RoughGroup;

pub const N_FEATURES: usize = 7;
pub const N_CATEGORIES: usize = 4;
const N_PARAMS: usize = N_FEATURES * (N_CATEGORIES - 1);

pub type Theta = [[f64; N_FEATURES]; N_CATEGORIES - 1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub samples: usize,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub ridge: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IconModel {
    pub group: RoughGroup,
    pub theta: Theta,
    pub category_icons: [u8; N_CATEGORIES],
    pub meta: TrainingMeta,
}

impl IconModel {
    /// Model with all parameters zero (uniform probabilities).
    pub fn zero(group: RoughGroup) -> Self {
        IconModel {
            group,
            theta: [[0.0; N_FEATURES]; N_CATEGORIES - 1],
            category_icons: eligible_icons(group),
            meta: TrainingMeta {
                samples: 0,
                converged: false,
                iterations: 0,
                gradient_norm: f64::NAN,
                ridge: 0.0,
                seed: None,
            },
        }
    }

    pub fn probabilities(&self, x: &FeatureVector) -> [f64; N_CATEGORIES] {
        cell_probabilities(&self.theta, x)
    }

    /// Category index with the highest probability; ties go to the lower icon id.
    pub fn predict_category(&self, x: &FeatureVector) -> usize {
        let p = self.probabilities(x);
        let mut best = 0;
        for j in 1..N_CATEGORIES {
            let better = p[j] > p[best]
                || (p[j] == p[best] && self.category_icons[j] < self.category_icons[best]);
            if better {
                best = j;
            }
        }
        best
    }

    pub fn predict_icon(&self, x: &FeatureVector) -> u8 {
        self.category_icons[self.predict_category(x)]
    }
}

/// Fraction of `data` whose predicted icon equals its label.
pub fn accuracy(model: &IconModel, data: &[(FeatureVector, u8)]) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let hits = data
        .iter()
        .filter(|(x, icon)| model.predict_icon(x) == *icon)
        .count();
    hits as f64 / data.len() as f64
}

/// Linear scores `(theta_1'x, theta_2'x, theta_3'x, 0)`.
pub fn linear_scores(theta: &Theta, x: &FeatureVector) -> [f64; N_CATEGORIES] {
    let mut s = [0.0; N_CATEGORIES];
    for (j, t) in theta.iter().enumerate() {
        s[j] = t.iter().zip(&x.0).map(|(a, b)| a * b).sum();
    }
    s
}

/// Softmax over the linear scores with the reference score included,
/// shifted by the maximum score before exponentiating.
pub fn cell_probabilities(theta: &Theta, x: &FeatureVector) -> [f64; N_CATEGORIES] {
    let s = linear_scores(theta, x);
    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p = s.map(|v| (v - max).exp());
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

/// A labelled training example: features and category index `0..4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: FeatureVector,
    pub category: usize,
}

fn log_sum_exp(s: &[f64; N_CATEGORIES]) -> f64 {
    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Penalized log-likelihood `sum_i log pi_{i,a_i} - ridge/2 |theta|^2`.
pub fn log_likelihood(theta: &Theta, data: &[Example], ridge: f64) -> f64 {
    let ll: f64 = data
        .iter()
        .map(|e| {
            let s = linear_scores(theta, &e.x);
            s[e.category] - log_sum_exp(&s)
        })
        .sum();
    ll - 0.5 * ridge * theta.iter().flatten().map(|v| v * v).sum::<f64>()
}

/// Gradient of [`log_likelihood`] with respect to theta.
pub fn gradient(theta: &Theta, data: &[Example], ridge: f64) -> Theta {
    let mut g = [[0.0; N_FEATURES]; N_CATEGORIES - 1];
    for e in data {
        let p = cell_probabilities(theta, &e.x);
        for (j, gj) in g.iter_mut().enumerate() {
            let r = f64::from(u8::from(e.category == j)) - p[j];
            for (gk, xk) in gj.iter_mut().zip(&e.x.0) {
                *gk += r * xk;
            }
        }
    }
    for (gj, tj) in g.iter_mut().zip(theta) {
        for (gk, tk) in gj.iter_mut().zip(tj) {
            *gk -= ridge * tk;
        }
    }
    g
}

/// Negative Hessian of the penalized log-likelihood (positive definite when ridge > 0).
fn neg_hessian(theta: &Theta, data: &[Example], ridge: f64) -> DMatrix<f64> {
    let mut h = DMatrix::<f64>::zeros(N_PARAMS, N_PARAMS);
    for e in data {
        let p = cell_probabilities(theta, &e.x);
        for j in 0..N_CATEGORIES - 1 {
            for l in 0..N_CATEGORIES - 1 {
                let w = p[j] * (f64::from(u8::from(j == l)) - p[l]);
                if w == 0.0 {
                    continue;
                }
                for a in 0..N_FEATURES {
                    for b in 0..N_FEATURES {
                        h[(j * N_FEATURES + a, l * N_FEATURES + b)] += w * e.x.0[a] * e.x.0[b];
                    }
                }
            }
        }
    }
    for i in 0..N_PARAMS {
        h[(i, i)] += ridge;
    }
    h
}

fn flatten(t: &Theta) -> DVector<f64> {
    DVector::from_iterator(N_PARAMS, t.iter().flatten().copied())
}

fn unflatten(v: &DVector<f64>) -> Theta {
    let mut t = [[0.0; N_FEATURES]; N_CATEGORIES - 1];
    for (i, val) in v.iter().enumerate() {
        t[i / N_FEATURES][i % N_FEATURES] = *val;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Ridge penalty; keeps the maximizer finite under separation.
    pub ridge: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            ridge: 1e-4,
            max_iter: 200,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Training {
    pub model: IconModel,
    /// Penalized log-likelihood after each accepted step, starting at theta = 0.
    pub trace: Vec<f64>,
}

/// Maximum-likelihood fit by damped Newton iterations from theta = 0.
/// Labels are icon ids and must belong to the group's eligible set.
pub fn train(group: RoughGroup, data: &[(FeatureVector, u8)], config: &TrainConfig) -> Result<Training> {
    let icons = eligible_icons(group);
    let examples: Vec<Example> = data
        .iter()
        .map(|(x, icon)| {
            icons
                .iter()
                .position(|i| i == icon)
                .map(|category| Example { x: *x, category })
                .ok_or_else(|| {
                    TrecError::InvalidArgument(format!("icon {icon} is not eligible for group {group}"))
                })
        })
        .collect::<Result<_>>()?;
    let missing: Vec<u8> = icons
        .iter()
        .enumerate()
        .filter(|(j, _)| !examples.iter().any(|e| e.category == *j))
        .map(|(_, i)| *i)
        .collect();
    if !missing.is_empty() {
        return Err(TrecError::EmptyCategory { icons: missing });
    }

    let ridge = config.ridge;
    let mut theta: Theta = [[0.0; N_FEATURES]; N_CATEGORIES - 1];
    let mut objective = log_likelihood(&theta, &examples, ridge);
    let mut trace = vec![objective];
    let mut grad = flatten(&gradient(&theta, &examples, ridge));
    let mut iterations = 0;

    while grad.norm() > config.tol && iterations < config.max_iter {
        iterations += 1;
        let h = neg_hessian(&theta, &examples, ridge);
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => h
                .lu()
                .solve(&grad)
                .ok_or_else(|| TrecError::Numeric("singular Hessian in icon training".into()))?,
        };
        let current = flatten(&theta);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = unflatten(&(&current + &step * t));
            let value = log_likelihood(&candidate, &examples, ridge);
            if value >= objective {
                theta = candidate;
                objective = value;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(objective);
        grad = flatten(&gradient(&theta, &examples, ridge));
    }

    let gradient_norm = grad.norm();
    if theta.iter().flatten().any(|v| !v.is_finite()) {
        return Err(TrecError::Numeric("icon training diverged".into()));
    }
    Ok(Training {
        model: IconModel {
            group,
            theta,
            category_icons: icons,
            meta: TrainingMeta {
                samples: examples.len(),
                converged: gradient_norm <= config.tol,
                iterations,
                gradient_norm,
                ridge,
                seed: None,
            },
        },
        trace,
    })
}
