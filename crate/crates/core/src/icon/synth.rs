//! Synthetic labelled trends for training icon discriminators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::catalog::{eligible_icons, shape_series};
use super::{build_features, FeatureVector};
use crate::error::{Result, TrecError};
use crate::rough::{default_targets, nearest_of_three, score_trend, RoughGroup, TargetPair};
use crate::trend::{select_degree, TrendFit};

/// Minimum mean squared distance between an icon-10 curve and every
/// canonical shape of its group.
pub const UNKNOWN_MIN_MSD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_per_icon: usize,
    pub noise_sd: f64,
    pub n_steps: usize,
    pub seed: u64,
    /// Each curve is the unit-scale shape times a factor drawn uniformly
    /// from this range.
    pub amplitude: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_per_icon: 100,
            noise_sd: 0.15,
            n_steps: 20,
            seed: 7,
            amplitude: (0.8, 1.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthExample {
    pub icon: u8,
    /// Noise-free curve the series was drawn around.
    pub curve: Vec<f64>,
    pub series: Vec<f64>,
    pub fit: TrendFit,
}

/// Noisy series around each eligible icon's shape, `n_per_icon` per icon, in
/// category order, each scaled by a random amplitude. Icon-10 curves are
/// random cubics, centred and rescaled to unit root mean square,
/// kept only when the three-group rule with default targets places them in
/// `group` and they are far from all of the group's canonical shapes.
pub fn synth_trends(group: RoughGroup, config: &SynthConfig) -> Result<Vec<SynthExample>> {
    if config.n_steps < 5 {
        return Err(TrecError::InvalidArgument(format!(
            "synthetic series need at least 5 steps, got {}",
            config.n_steps
        )));
    }
    if !(config.noise_sd >= 0.0 && config.noise_sd.is_finite()) {
        return Err(TrecError::InvalidArgument(format!(
            "noise_sd must be finite and non-negative, got {}",
            config.noise_sd
        )));
    }
    let (lo, hi) = config.amplitude;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(TrecError::InvalidArgument(format!(
            "amplitude range must satisfy 0 < low <= high, got ({lo}, {hi})"
        )));
    }
    let n = config.n_steps;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.noise_sd).expect("validated");
    let icons = eligible_icons(group);
    let targets = default_targets(n)?;
    let shapes: Vec<Vec<f64>> = icons
        .iter()
        .filter_map(|&id| shape_series(id, n))
        .collect();

    let mut out = Vec::with_capacity(icons.len() * config.n_per_icon);
    for &icon in &icons {
        for _ in 0..config.n_per_icon {
            let unit = match shape_series(icon, n) {
                Some(c) => c,
                None => unknown_curve(&mut rng, group, &targets, &shapes),
            };
            let a = if lo < hi { rng.random_range(lo..=hi) } else { lo };
            let curve: Vec<f64> = unit.iter().map(|v| a * v).collect();
            let series: Vec<f64> = curve.iter().map(|c| c + noise.sample(&mut rng)).collect();
            let fit = select_degree(&series)?;
            out.push(SynthExample {
                icon,
                curve,
                series,
                fit,
            });
        }
    }
    Ok(out)
}

fn unknown_curve(
    rng: &mut ChaCha8Rng,
    group: RoughGroup,
    targets: &TargetPair,
    shapes: &[Vec<f64>],
) -> Vec<f64> {
    let n = targets.t1.len();
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let raw: Vec<f64> = (0..n)
            .map(|i| {
                let s = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
                c[0] + c[1] * s + c[2] * s * s + c[3] * s * s * s
            })
            .collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let rms = (raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
        if rms < 1e-6 {
            continue;
        }
        let curve: Vec<f64> = raw.iter().map(|v| (v - mean) / rms).collect();
        if nearest_of_three(&score_trend("", &curve, targets)) != group {
            continue;
        }
        let far = shapes.iter().all(|shape| {
            let msd = curve
                .iter()
                .zip(shape)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / n as f64;
            msd >= UNKNOWN_MIN_MSD
        });
        if far {
            return curve;
        }
    }
}

/// Labelled feature vectors for [`super::logistic::train`].
pub fn synth_training_set(group: RoughGroup, config: &SynthConfig) -> Result<Vec<(FeatureVector, u8)>> {
    Ok(synth_trends(group, config)?
        .iter()
        .map(|e| (build_features(&e.fit), e.icon))
        .collect())
}
