//! Two-category discriminant scoring and rough (Upward / Flat / Downward)
//! grouping of estimated trends.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::{centroid_linkage, Dendrogram};
use crate::error::{Result, TrecError};
use crate::trend::TrendFit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoughGroup {
    Upward,
    Flat,
    Downward,
}

impl RoughGroup {
    pub const ALL: [RoughGroup; 3] = [RoughGroup::Upward, RoughGroup::Flat, RoughGroup::Downward];

    pub fn as_str(self) -> &'static str {
        match self {
            RoughGroup::Upward => "Upward",
            RoughGroup::Flat => "Flat",
            RoughGroup::Downward => "Downward",
        }
    }
}

impl fmt::Display for RoughGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for RoughGroup {
    type Err = TrecError;

    fn from_str(s: &str) -> Result<Self> {
        RoughGroup::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                TrecError::InvalidArgument(format!(
                    "unknown group '{s}'; expected Upward, Flat or Downward"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupCount {
    Two,
    Three,
}

impl GroupCount {
    pub fn get(self) -> usize {
        match self {
            GroupCount::Two => 2,
            GroupCount::Three => 3,
        }
    }

    pub fn labels(self) -> &'static [RoughGroup] {
        match self {
            GroupCount::Two => &[RoughGroup::Upward, RoughGroup::Downward],
            GroupCount::Three => &RoughGroup::ALL,
        }
    }
}

impl TryFrom<usize> for GroupCount {
    type Error = TrecError;

    fn try_from(k: usize) -> Result<Self> {
        match k {
            2 => Ok(GroupCount::Two),
            3 => Ok(GroupCount::Three),
            _ => Err(TrecError::InvalidArgument(format!(
                "groups must be 2 or 3, got {k}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetSource {
    Default,
    User(String, String),
}

/// Reference trends: `t1` increasing (Upward side), `t2` decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPair {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub source: TargetSource,
}

/// Squared divergence `sum_n (target(n) - trend(n))^2`.
pub fn divergence(trend: &[f64], target: &[f64]) -> f64 {
    trend
        .iter()
        .zip(target)
        .map(|(a, b)| (b - a) * (b - a))
        .sum()
}

/// Lines from -1 to +1 over `n` steps, and the mirror image.
pub fn default_targets(n: usize) -> Result<TargetPair> {
    if n < 2 {
        return Err(TrecError::InvalidArgument(format!(
            "default targets need at least 2 steps, got {n}"
        )));
    }
    let t1: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect();
    let t2 = t1.iter().map(|v| -v).collect();
    Ok(TargetPair {
        t1,
        t2,
        source: TargetSource::Default,
    })
}

/// Looks a fit up by canonical name, ignoring ASCII case (`v2` finds `V2`).
pub fn find_fit<'a>(fits: &'a [TrendFit], name: &str) -> Result<&'a TrendFit> {
    fits.iter()
        .find(|f| f.variable == name)
        .or_else(|| fits.iter().find(|f| f.variable.eq_ignore_ascii_case(name)))
        .ok_or_else(|| TrecError::UnknownVariable {
            name: name.to_string(),
            available: fits.iter().map(|f| f.variable.clone()).collect(),
        })
}

/// Uses the fitted trends of two variables as the reference pair.
pub fn user_targets(pvar: (&str, &str), fits: &[TrendFit]) -> Result<TargetPair> {
    let first = find_fit(fits, pvar.0)?;
    let second = find_fit(fits, pvar.1)?;
    if first.variable == second.variable {
        return Err(TrecError::InvalidArgument(format!(
            "pvar needs two different variables, got {} twice",
            first.variable
        )));
    }
    Ok(TargetPair {
        t1: first.fitted.clone(),
        t2: second.fitted.clone(),
        source: TargetSource::User(first.variable.clone(), second.variable.clone()),
    })
}

/// Discriminant score of one trend, with the divergences it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTrend {
    pub variable: String,
    /// `L(t : T2) - L(t : T1)`; positive means closer to the increasing target.
    pub score: f64,
    pub to_t1: f64,
    pub to_t2: f64,
    /// Divergence to the zero trend.
    pub to_flat: f64,
}

pub fn discriminant_scores(fits: &[TrendFit], targets: &TargetPair) -> Result<Vec<ScoredTrend>> {
    let n = targets.t1.len();
    if targets.t2.len() != n {
        return Err(TrecError::LengthMismatch {
            expected: n,
            found: targets.t2.len(),
        });
    }
    fits.iter()
        .map(|f| {
            if f.fitted.len() != n {
                return Err(TrecError::LengthMismatch {
                    expected: n,
                    found: f.fitted.len(),
                }
                .for_variable(&f.variable));
            }
            Ok(score_trend(&f.variable, &f.fitted, targets))
        })
        .collect()
}

/// Scores one trend against a target pair of the same length.
pub fn score_trend(variable: &str, trend: &[f64], targets: &TargetPair) -> ScoredTrend {
    let to_t1 = divergence(trend, &targets.t1);
    let to_t2 = divergence(trend, &targets.t2);
    ScoredTrend {
        variable: variable.to_string(),
        score: to_t2 - to_t1,
        to_t1,
        to_t2,
        to_flat: trend.iter().map(|v| v * v).sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    DiscriminantOnly,
    Clustering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assigned {
    pub variable: String,
    pub score: f64,
    pub group: RoughGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantResult {
    pub method: Method,
    pub groups: GroupCount,
    pub assignments: Vec<Assigned>,
    pub dendrogram: Option<Dendrogram>,
    /// Requested labels that received no variables.
    pub not_applicable: Vec<RoughGroup>,
}

impl DiscriminantResult {
    pub fn group_of(&self, variable: &str) -> Option<RoughGroup> {
        self.assignments
            .iter()
            .find(|a| a.variable == variable)
            .map(|a| a.group)
    }

    pub fn members(&self, group: RoughGroup) -> Vec<&str> {
        self.assignments
            .iter()
            .filter(|a| a.group == group)
            .map(|a| a.variable.as_str())
            .collect()
    }

    fn new(method: Method, groups: GroupCount, assignments: Vec<Assigned>) -> Self {
        let not_applicable = groups
            .labels()
            .iter()
            .copied()
            .filter(|g| !assignments.iter().any(|a| a.group == *g))
            .collect();
        DiscriminantResult {
            method,
            groups,
            assignments,
            dendrogram: None,
            not_applicable,
        }
    }
}

/// Two groups: Upward iff the score is strictly positive. Three groups: the
/// nearest of {T1, zero trend, T2}, ties resolved Flat, then Downward.
pub fn classify_by_sign(scored: &[ScoredTrend], groups: GroupCount) -> Result<DiscriminantResult> {
    if scored.is_empty() {
        return Err(TrecError::InvalidArgument("no trends to classify".into()));
    }
    let assignments = scored
        .iter()
        .map(|s| {
            let group = match groups {
                GroupCount::Two if s.score > 0.0 => RoughGroup::Upward,
                GroupCount::Two => RoughGroup::Downward,
                GroupCount::Three => nearest_of_three(s),
            };
            Assigned {
                variable: s.variable.clone(),
                score: s.score,
                group,
            }
        })
        .collect();
    Ok(DiscriminantResult::new(
        Method::DiscriminantOnly,
        groups,
        assignments,
    ))
}

/// Three-group rule for a single scored trend.
pub fn nearest_of_three(s: &ScoredTrend) -> RoughGroup {
    let candidates = [
        (s.to_flat, RoughGroup::Flat),
        (s.to_t2, RoughGroup::Downward),
        (s.to_t1, RoughGroup::Upward),
    ];
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.0 < best.0 {
            best = *c;
        }
    }
    best.1
}

/// Centroid-linkage clustering of the scores, cut into `k` clusters. The
/// cluster with the highest mean score is Upward, the lowest Downward, and
/// the middle one (k = 3) Flat. Equal means rank by smallest member index.
pub fn centroid_cluster(scored: &[ScoredTrend], k: GroupCount) -> Result<DiscriminantResult> {
    let kk = k.get();
    if scored.len() < kk {
        return Err(TrecError::InvalidArgument(format!(
            "clustering into {kk} groups needs at least {kk} variables, found {}",
            scored.len()
        )));
    }
    let names: Vec<String> = scored.iter().map(|s| s.variable.clone()).collect();
    let scores: Vec<f64> = scored.iter().map(|s| s.score).collect();
    let dendrogram = centroid_linkage(&names, &scores)?;
    let mut clusters = dendrogram.cut(kk)?;
    let mean = |c: &Vec<usize>| c.iter().map(|&i| scores[i]).sum::<f64>() / c.len() as f64;
    clusters.sort_by(|a, b| mean(a).total_cmp(&mean(b)).then(a[0].cmp(&b[0])));

    let ranked: &[RoughGroup] = match k {
        GroupCount::Two => &[RoughGroup::Downward, RoughGroup::Upward],
        GroupCount::Three => &[RoughGroup::Downward, RoughGroup::Flat, RoughGroup::Upward],
    };
    let mut label = vec![RoughGroup::Flat; scored.len()];
    for (cluster, group) in clusters.iter().zip(ranked) {
        for &i in cluster {
            label[i] = *group;
        }
    }
    let assignments = scored
        .iter()
        .zip(label)
        .map(|(s, group)| Assigned {
            variable: s.variable.clone(),
            score: s.score,
            group,
        })
        .collect();
    let mut result = DiscriminantResult::new(Method::Clustering, k, assignments);
    result.dendrogram = Some(dendrogram);
    Ok(result)
}
