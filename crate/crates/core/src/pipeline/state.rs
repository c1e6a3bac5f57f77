//! The state carried between the three workflow steps.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{prepare, CleanDataset, TimeSeriesDataset};
use crate::error::{Result, TrecError};
use crate::icon::{assign_icon, IconModel};
use crate::multi::{classify_to_targets, GroupTargets, TargetAssignment};
use crate::report::{summary_table, SummaryTable};
use crate::rough::{
    centroid_cluster, classify_by_sign, default_targets, discriminant_scores, find_fit, user_targets,
    DiscriminantResult, GroupCount, RoughGroup, TargetPair,
};
use crate::trend::{fit_all, TrendFit, CANDIDATE_DEGREES};

pub const STATE_SCHEMA: &str = "trec-state";
pub const STATE_VERSION: u32 = 1;

/// Selected degree of each variable as a 0/1 row over degrees 1..=3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimRow {
    pub variable: String,
    pub dim: [u8; 3],
}

/// Standardized-time coefficients gamma_0..gamma_3 of each variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefRow {
    pub variable: String,
    pub gamma: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoughConfig {
    pub groups: GroupCount,
    pub clustering: bool,
    /// Variables whose trends replace the default targets.
    pub pvar: Option<(String, String)>,
}

impl Default for RoughConfig {
    fn default() -> Self {
        RoughConfig {
            groups: GroupCount::Two,
            clustering: true,
            pvar: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughStep {
    pub config: RoughConfig,
    pub targets: TargetPair,
    pub result: DiscriminantResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetStep {
    /// Targets as requested on the command line.
    pub requested: Vec<GroupTargets>,
    pub assignment: TargetAssignment,
    /// Icon of every classified variable.
    pub icons: BTreeMap<String, u8>,
    pub summary: SummaryTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineState {
    pub schema: String,
    pub version: u32,
    /// File name of the ingested table.
    pub input: String,
    pub data: CleanDataset,
    pub fits: Vec<TrendFit>,
    pub dim: Vec<DimRow>,
    pub coef: Vec<CoefRow>,
    pub rough: Option<RoughStep>,
    pub targets: Option<TargetStep>,
}

/// Icon models by group; a group's model is only needed when it has targets.
pub type IconModels = BTreeMap<RoughGroup, IconModel>;

impl PipelineState {
    /// Cleans the dataset and fits every trend.
    pub fn from_dataset(input: &str, raw: &TimeSeriesDataset) -> Result<Self> {
        let data = prepare(raw)?;
        let fits = fit_all(&data)?;
        let dim = fits
            .iter()
            .map(|f| DimRow {
                variable: f.variable.clone(),
                dim: CANDIDATE_DEGREES.map(|d| u8::from(d == f.degree)),
            })
            .collect();
        let coef = fits
            .iter()
            .map(|f| CoefRow {
                variable: f.variable.clone(),
                gamma: f.gamma,
            })
            .collect();
        Ok(PipelineState {
            schema: STATE_SCHEMA.to_string(),
            version: STATE_VERSION,
            input: input.to_string(),
            data,
            fits,
            dim,
            coef,
            rough: None,
            targets: None,
        })
    }

    /// Rough classification; discards any earlier target step.
    pub fn classify_rough(&mut self, config: &RoughConfig) -> Result<&RoughStep> {
        if self.fits.is_empty() {
            return Err(TrecError::MissingStep("trend fits"));
        }
        let targets = match &config.pvar {
            None => default_targets(self.data.len())?,
            Some((a, b)) => user_targets((a, b), &self.fits)?,
        };
        let scored = discriminant_scores(&self.fits, &targets)?;
        let result = if config.clustering {
            centroid_cluster(&scored, config.groups)?
        } else {
            classify_by_sign(&scored, config.groups)?
        };
        self.targets = None;
        Ok(self.rough.insert(RoughStep {
            config: config.clone(),
            targets,
            result,
        }))
    }

    /// Rough groups that need an icon model for `requested`.
    pub fn groups_needing_models(&self, requested: &[GroupTargets]) -> Vec<RoughGroup> {
        let Some(rough) = &self.rough else {
            return Vec::new();
        };
        RoughGroup::ALL
            .into_iter()
            .filter(|g| {
                !rough.result.members(*g).is_empty()
                    && requested.iter().any(|t| t.group == *g && !t.targets.is_empty())
            })
            .collect()
    }

    /// Nearest-target classification and icon assignment.
    pub fn assign_targets(&mut self, requested: &[GroupTargets], models: &IconModels) -> Result<&TargetStep> {
        let rough = self.rough.as_ref().ok_or(TrecError::MissingStep("rough groups"))?;
        let assignment = classify_to_targets(&self.fits, &rough.result, requested)?;
        let mut icons = BTreeMap::new();
        for m in &assignment.memberships {
            let model = models.get(&m.group).ok_or_else(|| {
                TrecError::InvalidArgument(format!("no icon model loaded for {}", m.group))
            })?;
            for v in &m.members {
                let fit = find_fit(&self.fits, v)?;
                icons.insert(v.clone(), assign_icon(m.group, fit, model)?);
            }
        }
        let summary = summary_table(&assignment, &icons)?;
        Ok(self.targets.insert(TargetStep {
            requested: requested.to_vec(),
            assignment,
            icons,
            summary,
        }))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state is serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            schema: String,
            version: u32,
        }
        let header: Header = serde_json::from_str(text)
            .map_err(|e| TrecError::Schema(format!("not a pipeline state: {e}")))?;
        if header.schema != STATE_SCHEMA {
            return Err(TrecError::Schema(format!(
                "expected schema '{STATE_SCHEMA}', found '{}'",
                header.schema
            )));
        }
        if header.version != STATE_VERSION {
            return Err(TrecError::Schema(format!(
                "unsupported state version {} (this build reads version {STATE_VERSION})",
                header.version
            )));
        }
        serde_json::from_str(text).map_err(|e| TrecError::Schema(format!("malformed pipeline state: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| TrecError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| TrecError::io(path, e))?;
        Self::from_json(&text)
    }
}
