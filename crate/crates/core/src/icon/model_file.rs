//! Plain-text icon model files.
//!
//! ```text
//! trec-icon-model 1
//! group Upward
//! icons 3 4 5 10
//! theta1 <7 numbers>
//! theta2 <7 numbers>
//! theta3 <7 numbers>
//! samples 400
//! converged true
//! iterations 23
//! gradient_norm <number>
//! ridge <number>
//! seed 7            (or "seed none")
//! end
//! ```
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::catalog::eligible_icons;
use super::logistic::{IconModel, Theta, TrainingMeta, N_FEATURES};
use crate::error::{Result, TrecError};
use crate::rough::RoughGroup;

pub const MODEL_SCHEMA: &str = "trec-icon-model";
pub const MODEL_VERSION: u32 = 1;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn save_model(model: &IconModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_SCHEMA} {MODEL_VERSION}");
    let _ = writeln!(out, "group {}", model.group);
    let icons: Vec<String> = model.category_icons.iter().map(u8::to_string).collect();
    let _ = writeln!(out, "icons {}", icons.join(" "));
    for (j, row) in model.theta.iter().enumerate() {
        let vals: Vec<String> = row.iter().map(|v| num(*v)).collect();
        let _ = writeln!(out, "theta{} {}", j + 1, vals.join(" "));
    }
    let m = &model.meta;
    let _ = writeln!(out, "samples {}", m.samples);
    let _ = writeln!(out, "converged {}", m.converged);
    let _ = writeln!(out, "iterations {}", m.iterations);
    let _ = writeln!(out, "gradient_norm {}", num(m.gradient_norm));
    let _ = writeln!(out, "ridge {}", num(m.ridge));
    match m.seed {
        Some(s) => {
            let _ = writeln!(out, "seed {s}");
        }
        None => out.push_str("seed none\n"),
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let (i, line) = self
            .inner
            .next()
            .ok_or_else(|| TrecError::Schema(format!("truncated model file: missing '{key}'")))?;
        let (k, rest) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
        if k != key {
            return Err(TrecError::Schema(format!(
                "line {}: expected '{key}', found '{k}'",
                i + 1
            )));
        }
        Ok(rest.trim())
    }
}

fn parse<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| TrecError::Schema(format!("bad value for {key}: '{s}'")))
}

pub fn load_model(text: &str) -> Result<IconModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let version: u32 = parse("version", lines.field(MODEL_SCHEMA)?)?;
    if version != MODEL_VERSION {
        return Err(TrecError::Schema(format!(
            "unsupported model version {version} (expected {MODEL_VERSION})"
        )));
    }
    let group: RoughGroup = lines
        .field("group")?
        .parse()
        .map_err(|e: TrecError| TrecError::Schema(e.to_string()))?;
    let icons: Vec<u8> = lines
        .field("icons")?
        .split_whitespace()
        .map(|s| parse("icons", s))
        .collect::<Result<_>>()?;
    if icons.as_slice() != eligible_icons(group) {
        return Err(TrecError::Schema(format!(
            "icons {icons:?} do not match the eligible set for {group}"
        )));
    }
    let mut theta: Theta = [[0.0; N_FEATURES]; 3];
    for (j, row) in theta.iter_mut().enumerate() {
        let key = format!("theta{}", j + 1);
        let vals: Vec<f64> = lines
            .field(&key)?
            .split_whitespace()
            .map(|s| parse(&key, s))
            .collect::<Result<_>>()?;
        if vals.len() != N_FEATURES || vals.iter().any(|v| !v.is_finite()) {
            return Err(TrecError::Schema(format!(
                "{key} needs {N_FEATURES} finite values"
            )));
        }
        row.copy_from_slice(&vals);
    }
    let samples = parse("samples", lines.field("samples")?)?;
    let converged = parse("converged", lines.field("converged")?)?;
    let iterations = parse("iterations", lines.field("iterations")?)?;
    let gradient_norm = parse("gradient_norm", lines.field("gradient_norm")?)?;
    let ridge = parse("ridge", lines.field("ridge")?)?;
    let seed = match lines.field("seed")? {
        "none" => None,
        s => Some(parse("seed", s)?),
    };
    lines.field("end")?;
    Ok(IconModel {
        group,
        theta,
        category_icons: eligible_icons(group),
        meta: TrainingMeta {
            samples,
            converged,
            iterations,
            gradient_norm,
            ridge,
            seed,
        },
    })
}

pub fn write_model(model: &IconModel, path: &Path) -> Result<()> {
    fs::write(path, save_model(model)).map_err(|e| TrecError::io(path, e))
}

pub fn read_model(path: &Path) -> Result<IconModel> {
    if !path.exists() {
        return Err(TrecError::MissingModel(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| TrecError::io(path, e))?;
    load_model(&text)
}

/// File name of a group's model inside a model directory.
pub fn model_file_name(group: RoughGroup) -> String {
    format!("{}.model", group.as_str().to_ascii_lowercase())
}
