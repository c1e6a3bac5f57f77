//! The ten icons, their group eligibility and canonical shapes.
//!
//! Each icon has a profile, a polynomial of degree at most two on `s` in
//! `[0, 1]` spanning `[-1, 1]`. The canonical shape is the profile centred
//! and scaled to unit root mean square over `[0, 1]`, which puts it on the
//! scale of a trend fitted to standardized data.

use crate::rough::RoughGroup;

/// Icon meaning "none of the canonical shapes fits".
pub const UNKNOWN_ICON: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Icon {
    pub id: u8,
    pub glyph: &'static str,
    pub description: &'static str,
    /// Profile coefficients on `s`, constant first. `None` for icon 10.
    pub profile: Option<[f64; 3]>,
}

pub const ICONS: [Icon; 10] = [
    Icon { id: 1, glyph: "→", description: "flat", profile: Some([0.0, 0.0, 0.0]) },
    Icon { id: 2, glyph: "⤵", description: "decelerating decrease", profile: Some([1.0, -4.0, 2.0]) },
    Icon { id: 3, glyph: "⤴", description: "accelerating increase", profile: Some([-1.0, 0.0, 2.0]) },
    Icon { id: 4, glyph: "↗", description: "linear increase", profile: Some([-1.0, 2.0, 0.0]) },
    Icon { id: 5, glyph: "↱", description: "decelerating increase", profile: Some([-1.0, 4.0, -2.0]) },
    Icon { id: 6, glyph: "∩", description: "hump", profile: Some([-1.0, 8.0, -8.0]) },
    Icon { id: 7, glyph: "↘", description: "linear decrease", profile: Some([1.0, -2.0, 0.0]) },
    Icon { id: 8, glyph: "↴", description: "accelerating decrease", profile: Some([1.0, 0.0, -2.0]) },
    Icon { id: 9, glyph: "∪", description: "dip", profile: Some([1.0, -8.0, 8.0]) },
    Icon { id: 10, glyph: "?", description: "no canonical shape", profile: None },
];

pub fn icon(id: u8) -> Option<&'static Icon> {
    ICONS.iter().find(|i| i.id == id)
}

/// The four icons a group's discriminator chooses from, in category order.
/// The last entry (icon 10) is the reference category.
pub fn eligible_icons(group: RoughGroup) -> [u8; 4] {
    match group {
        RoughGroup::Upward => [3, 4, 5, UNKNOWN_ICON],
        RoughGroup::Downward => [2, 7, 8, UNKNOWN_ICON],
        RoughGroup::Flat => [1, 6, 9, UNKNOWN_ICON],
    }
}

fn eval(c: [f64; 3], s: f64) -> f64 {
    c[0] + c[1] * s + c[2] * s * s
}

/// Profile of `id` evaluated at `s`, for drawing.
pub fn profile_value(id: u8, s: f64) -> Option<f64> {
    icon(id)?.profile.map(|c| eval(c, s))
}

/// Canonical shape coefficients: the profile with zero mean and unit root
/// mean square over `[0, 1]`. The flat profile stays zero.
pub fn shape_coefficients(id: u8) -> Option<[f64; 3]> {
    let [a, b, c] = icon(id)?.profile?;
    let mean = a + b / 2.0 + c / 3.0;
    let a = a - mean;
    let msq = a * a + b * b / 3.0 + c * c / 5.0 + a * b + 2.0 * a * c / 3.0 + b * c / 2.0;
    if msq < 1e-15 {
        return Some([0.0; 3]);
    }
    let k = msq.sqrt().recip();
    Some([a * k, b * k, c * k])
}

/// Canonical shape of `id` evaluated at `s`.
pub fn shape_value(id: u8, s: f64) -> Option<f64> {
    shape_coefficients(id).map(|c| eval(c, s))
}

/// Canonical shape sampled at `n` equally spaced points of `[0, 1]`.
pub fn shape_series(id: u8, n: usize) -> Option<Vec<f64>> {
    let c = shape_coefficients(id)?;
    Some(
        (0..n)
            .map(|i| eval(c, i as f64 / (n - 1) as f64))
            .collect(),
    )
}
