//! Nearest-target classification inside each rough group.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrecError};
use crate::rough::{divergence, find_fit, DiscriminantResult, RoughGroup};
use crate::trend::TrendFit;

/// User-designated target variables for one rough group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTargets {
    pub group: RoughGroup,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub group: RoughGroup,
    pub target: String,
    /// Includes the target itself, in fit order.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub variable: String,
    pub target: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetAssignment {
    pub group_targets: Vec<GroupTargets>,
    pub memberships: Vec<Membership>,
    pub divergences: Vec<Divergence>,
    /// Rough groups with members but no targets; left unclassified.
    pub unclassified: Vec<GroupTargets>,
    pub warnings: Vec<String>,
}

impl TargetAssignment {
    pub fn target_of(&self, variable: &str) -> Option<&str> {
        self.memberships
            .iter()
            .find(|m| m.members.iter().any(|v| v == variable))
            .map(|m| m.target.as_str())
    }

    pub fn divergence(&self, variable: &str, target: &str) -> Option<f64> {
        self.divergences
            .iter()
            .find(|d| d.variable == variable && d.target == target)
            .map(|d| d.value)
    }
}

/// Assigns every variable of a targeted rough group to the target with the
/// smallest divergence; ties go to the earliest-listed target. Target names
/// are resolved case-insensitively to canonical names.
pub fn classify_to_targets(
    fits: &[TrendFit],
    rough: &DiscriminantResult,
    tvar: &[GroupTargets],
) -> Result<TargetAssignment> {
    let mut group_targets: Vec<GroupTargets> = Vec::new();
    for gt in tvar {
        if group_targets.iter().any(|g| g.group == gt.group) {
            return Err(TrecError::InvalidArgument(format!(
                "targets for {} given more than once",
                gt.group
            )));
        }
        let mut resolved = Vec::with_capacity(gt.targets.len());
        for name in &gt.targets {
            let fit = find_fit(fits, name)?;
            let actual = rough.group_of(&fit.variable).ok_or_else(|| {
                TrecError::InvalidArgument(format!("{} has no rough group", fit.variable))
            })?;
            if actual != gt.group {
                return Err(TrecError::InvalidArgument(format!(
                    "target {} belongs to {actual}, not {}",
                    fit.variable, gt.group
                )));
            }
            if !resolved.contains(&fit.variable) {
                resolved.push(fit.variable.clone());
            }
        }
        group_targets.push(GroupTargets {
            group: gt.group,
            targets: resolved,
        });
    }

    let mut memberships = Vec::new();
    let mut divergences = Vec::new();
    let mut unclassified = Vec::new();
    let mut warnings = Vec::new();

    for group in RoughGroup::ALL {
        let members = rough.members(group);
        if members.is_empty() {
            continue;
        }
        let targets = match group_targets.iter().find(|g| g.group == group) {
            Some(g) if !g.targets.is_empty() => &g.targets,
            Some(_) => {
                return Err(TrecError::InvalidArgument(format!(
                    "group {group} has members but an empty target list"
                )))
            }
            None => {
                warnings.push(format!("no targets given for {group}; group left unclassified"));
                unclassified.push(GroupTargets {
                    group,
                    targets: members.iter().map(|s| s.to_string()).collect(),
                });
                continue;
            }
        };
        let target_fits: Vec<&TrendFit> = targets
            .iter()
            .map(|t| find_fit(fits, t))
            .collect::<Result<_>>()?;
        let mut buckets: Vec<Vec<String>> = vec![Vec::new(); targets.len()];
        for fit in fits.iter().filter(|f| members.contains(&f.variable.as_str())) {
            let mut best = (f64::INFINITY, 0);
            for (i, tf) in target_fits.iter().enumerate() {
                let value = divergence(&fit.fitted, &tf.fitted);
                divergences.push(Divergence {
                    variable: fit.variable.clone(),
                    target: tf.variable.clone(),
                    value,
                });
                if value < best.0 {
                    best = (value, i);
                }
            }
            buckets[best.1].push(fit.variable.clone());
        }
        for (target, members) in targets.iter().zip(buckets) {
            memberships.push(Membership {
                group,
                target: target.clone(),
                members,
            });
        }
    }

    Ok(TargetAssignment {
        group_targets,
        memberships,
        divergences,
        unclassified,
        warnings,
    })
}

/// Parses `Group=name,name,...`.
pub fn parse_group_targets(spec: &str) -> Result<GroupTargets> {
    const GRAMMAR: &str = "expected GROUP=NAME[,NAME...] with GROUP one of Upward, Downward, Flat";
    let (group, names) = spec
        .split_once('=')
        .ok_or_else(|| TrecError::InvalidArgument(format!("malformed target '{spec}': {GRAMMAR}")))?;
    let group: RoughGroup = group
        .parse()
        .map_err(|_| TrecError::InvalidArgument(format!("malformed target '{spec}': {GRAMMAR}")))?;
    let targets: Vec<String> = names.split(',').map(|s| s.trim().to_string()).collect();
    if targets.iter().any(String::is_empty) {
        return Err(TrecError::InvalidArgument(format!(
            "malformed target '{spec}': {GRAMMAR}"
        )));
    }
    Ok(GroupTargets { group, targets })
}
