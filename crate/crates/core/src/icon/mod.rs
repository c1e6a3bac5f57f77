//! Icon assignment: linear-trend override rules in front of a per-group
//! multinomial logistic discriminator.

pub mod catalog;
pub mod logistic;
pub mod model_file;
pub mod synth;

use serde::{Deserialize, Serialize};

pub use catalog::{
    eligible_icons, icon, profile_value, shape_coefficients, shape_series, shape_value, Icon, ICONS, UNKNOWN_ICON,
};
pub use logistic::{accuracy, cell_probabilities, train, IconModel, TrainConfig, Training, TrainingMeta};
pub use model_file::{load_model, model_file_name, read_model, save_model, write_model};
pub use synth::{synth_trends, synth_training_set, SynthConfig, SynthExample};

use crate::error::{Result, TrecError};
use crate::rough::RoughGroup;
use crate::trend::TrendFit;

/// Flat-group linear trends with `|gamma_1|` at or below this get icon 1.
pub const FLAT_SLOPE_THRESHOLD: f64 = 0.1;

/// `(1, [degree = 1], [degree = 2], gamma_0, gamma_1, gamma_2, gamma_3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; 7]);

impl FeatureVector {
    pub fn new(degree: usize, gamma: [f64; 4]) -> Self {
        let d1 = if degree == 1 { 1.0 } else { 0.0 };
        let d2 = if degree == 2 { 1.0 } else { 0.0 };
        FeatureVector([1.0, d1, d2, gamma[0], gamma[1], gamma[2], gamma[3]])
    }
}

pub fn build_features(fit: &TrendFit) -> FeatureVector {
    FeatureVector::new(fit.degree, fit.gamma)
}

/// Icon fixed by the linear-trend rules, if one applies.
pub fn override_icon(group: RoughGroup, fit: &TrendFit) -> Option<u8> {
    if fit.degree != 1 {
        return None;
    }
    let slope = fit.gamma[1];
    match group {
        RoughGroup::Upward if slope > 0.0 => Some(4),
        RoughGroup::Downward if slope < 0.0 => Some(7),
        RoughGroup::Flat if slope.abs() <= FLAT_SLOPE_THRESHOLD => Some(1),
        _ => None,
    }
}

pub fn assign_icon(group: RoughGroup, fit: &TrendFit, model: &IconModel) -> Result<u8> {
    if model.group != group {
        return Err(TrecError::GroupMismatch {
            model: model.group.to_string(),
            requested: group.to_string(),
        });
    }
    Ok(override_icon(group, fit).unwrap_or_else(|| model.predict_icon(&build_features(fit))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(degree: usize, gamma: [f64; 4]) -> TrendFit {
        TrendFit {
            variable: "V1".into(),
            degree,
            beta: vec![0.0; degree + 1],
            gamma,
            sigma2: 0.1,
            sigma2_clamped: false,
            loglik: 0.0,
            aic: 0.0,
            fitted: vec![0.0; 10],
            band_lower: vec![0.0; 10],
            band_upper: vec![0.0; 10],
        }
    }

    #[test]
    fn features_layout() {
        assert_eq!(
            build_features(&fit(1, [0.3, -0.7, 0.0, 0.0])).0,
            [1.0, 1.0, 0.0, 0.3, -0.7, 0.0, 0.0]
        );
        let x = build_features(&fit(2, [0.0, 1.0, 2.0, 0.0])).0;
        assert_eq!((x[1], x[2]), (0.0, 1.0));
        let x = build_features(&fit(3, [0.0, 1.0, 2.0, 3.0])).0;
        assert_eq!((x[1], x[2]), (0.0, 0.0));
    }

    #[test]
    fn paper_overrides() {
        let m = |g| IconModel::zero(g);
        let up = RoughGroup::Upward;
        assert_eq!(assign_icon(up, &fit(1, [0.0, 0.8, 0.0, 0.0]), &m(up)).unwrap(), 4);
        let flat = RoughGroup::Flat;
        assert_eq!(assign_icon(flat, &fit(1, [0.0, 0.05, 0.0, 0.0]), &m(flat)).unwrap(), 1);
        let down = RoughGroup::Downward;
        assert_eq!(assign_icon(down, &fit(1, [0.0, -2.0, 0.0, 0.0]), &m(down)).unwrap(), 7);
    }

    #[test]
    fn non_override_uses_model() {
        // zero model: all probabilities tie, lowest icon id wins
        let down = RoughGroup::Downward;
        assert_eq!(
            assign_icon(down, &fit(3, [0.0, -1.0, 0.5, 0.2]), &IconModel::zero(down)).unwrap(),
            2
        );
        let mut m = IconModel::zero(down);
        m.theta[2][0] = 5.0; // category 3 -> icon 8
        assert_eq!(assign_icon(down, &fit(3, [0.0, -1.0, 0.5, 0.2]), &m).unwrap(), 8);
        // upward-sloping linear trend in Downward group falls through
        assert_eq!(assign_icon(down, &fit(1, [0.0, 0.4, 0.0, 0.0]), &m).unwrap(), 8);
    }

    #[test]
    fn group_mismatch() {
        let e = assign_icon(
            RoughGroup::Downward,
            &fit(2, [0.0; 4]),
            &IconModel::zero(RoughGroup::Upward),
        )
        .unwrap_err();
        assert!(matches!(e, TrecError::GroupMismatch { .. }));
    }
}
