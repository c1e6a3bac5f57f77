//! Target summary table: one row per target with its members and icon.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrecError};
use crate::icon::icon;
use crate::multi::TargetAssignment;
use crate::rough::RoughGroup;

/// Row order of the summary table.
pub const SUMMARY_GROUP_ORDER: [RoughGroup; 3] =
    [RoughGroup::Downward, RoughGroup::Upward, RoughGroup::Flat];

const HEADER: [&str; 4] = ["target", "group", "members", "icon"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub target: String,
    pub group: RoughGroup,
    /// Variables nearest to this target, the target included.
    pub members: Vec<String>,
    pub icon: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Comma-separated text; members are joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.target.as_str(),
                r.group.as_str(),
                &r.members.join(";"),
                &r.icon.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| TrecError::Parse(e.to_string()))?;
        if header.iter().ne(HEADER) {
            return Err(TrecError::Parse(format!(
                "summary header must be {}",
                HEADER.join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| TrecError::Parse(e.to_string()))?;
            let cell = |c: usize, message: String| TrecError::Cell {
                row,
                column: c + 1,
                message,
            };
            let group: RoughGroup = rec[1].parse().map_err(|e: TrecError| cell(1, e.to_string()))?;
            let icon: u8 = rec[3]
                .parse()
                .map_err(|_| cell(3, format!("'{}' is not an icon id", &rec[3])))?;
            let members = if rec[2].is_empty() {
                Vec::new()
            } else {
                rec[2].split(';').map(str::to_string).collect()
            };
            rows.push(SummaryRow {
                target: rec[0].to_string(),
                group,
                members,
                icon,
            });
        }
        Ok(SummaryTable { rows })
    }
}

/// Rows ordered Downward, Upward, Flat and, within a group, by target order.
pub fn summary_table(assignment: &TargetAssignment, icons: &BTreeMap<String, u8>) -> Result<SummaryTable> {
    let mut rows = Vec::with_capacity(assignment.memberships.len());
    for group in SUMMARY_GROUP_ORDER {
        for m in assignment.memberships.iter().filter(|m| m.group == group) {
            let id = *icons.get(&m.target).ok_or_else(|| {
                TrecError::InvalidArgument(format!("no icon assigned to target {}", m.target))
            })?;
            if icon(id).is_none() {
                return Err(TrecError::InvalidArgument(format!(
                    "target {} has unknown icon id {id}",
                    m.target
                )));
            }
            rows.push(SummaryRow {
                target: m.target.clone(),
                group,
                members: m.members.clone(),
                icon: id,
            });
        }
    }
    Ok(SummaryTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi::{GroupTargets, Membership};

    fn membership(group: RoughGroup, target: &str, members: &[&str]) -> Membership {
        Membership {
            group,
            target: target.into(),
            members: members.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn example() -> (TargetAssignment, BTreeMap<String, u8>) {
        let a = TargetAssignment {
            group_targets: vec![
                GroupTargets {
                    group: RoughGroup::Downward,
                    targets: vec!["V1".into(), "V6".into(), "V9".into()],
                },
                GroupTargets {
                    group: RoughGroup::Upward,
                    targets: vec!["V8".into()],
                },
                GroupTargets {
                    group: RoughGroup::Flat,
                    targets: vec!["V2".into()],
                },
            ],
            memberships: vec![
                membership(RoughGroup::Upward, "V8", &["V5", "V7", "V8"]),
                membership(RoughGroup::Flat, "V2", &["V2"]),
                membership(RoughGroup::Downward, "V1", &["V1"]),
                membership(RoughGroup::Downward, "V6", &["V3", "V4", "V6"]),
                membership(RoughGroup::Downward, "V9", &["V9"]),
            ],
            divergences: vec![],
            unclassified: vec![],
            warnings: vec![],
        };
        let icons = [("V1", 7), ("V6", 8), ("V9", 2), ("V8", 4), ("V2", 1)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        (a, icons)
    }

    #[test]
    fn five_rows_down_up_flat() {
        let (a, icons) = example();
        let t = summary_table(&a, &icons).unwrap();
        let order: Vec<&str> = t.rows.iter().map(|r| r.target.as_str()).collect();
        assert_eq!(order, ["V1", "V6", "V9", "V8", "V2"]);
        let groups: Vec<RoughGroup> = t.rows.iter().map(|r| r.group).collect();
        assert_eq!(groups.iter().filter(|g| **g == RoughGroup::Downward).count(), 3);
    }

    #[test]
    fn absent_flat_group_has_no_rows() {
        let (mut a, icons) = example();
        a.memberships.retain(|m| m.group != RoughGroup::Flat);
        let t = summary_table(&a, &icons).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.rows.iter().all(|r| r.group != RoughGroup::Flat));
    }

    #[test]
    fn csv_round_trip() {
        let (a, icons) = example();
        let t = summary_table(&a, &icons).unwrap();
        let text = t.to_csv();
        assert!(text.starts_with("target,group,members,icon\nV1,Downward,V1,7\n"));
        assert_eq!(SummaryTable::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn missing_icon_is_an_error() {
        let (a, mut icons) = example();
        icons.remove("V9");
        let e = summary_table(&a, &icons).unwrap_err();
        assert!(e.to_string().contains("V9"));
    }
}
