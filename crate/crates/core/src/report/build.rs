//! Figure specs for each pipeline output, and writing them to disk.

use std::fs;
use std::path::{Path, PathBuf};

use super::figure::{
    render_figure, Band, FigureContent, FigureKind, FigureSpec, IconRow, PageSize, Panel, PlotSeries,
    SeriesStyle,
};
use super::summary::SummaryTable;
use crate::dataset::{CleanDataset, TimeSeriesDataset};
use crate::error::{Result, TrecError};
use crate::rough::{find_fit, DiscriminantResult};
use crate::trend::TrendFit;

fn panels(kind: FigureKind, title: &str, time_labels: &[f64], panels: Vec<Panel>) -> FigureSpec {
    FigureSpec {
        kind,
        title: title.to_string(),
        page_size: PageSize::default(),
        time_labels: time_labels.to_vec(),
        content: FigureContent::Panels(panels),
    }
}

fn titled(canonical: &str, original: &str) -> String {
    if canonical == original {
        canonical.to_string()
    } else {
        format!("{canonical} ({original})")
    }
}

/// One panel per input column, gaps left where values are missing.
pub fn raw_data_figure(data: &TimeSeriesDataset) -> FigureSpec {
    let ps = data
        .series
        .iter()
        .map(|s| Panel {
            title: titled(&s.canonical_name(), &s.name),
            series: vec![PlotSeries {
                label: s.name.clone(),
                style: SeriesStyle::Data,
                values: s.values.clone(),
            }],
            bands: vec![],
            legend: false,
        })
        .collect();
    panels(FigureKind::RawData, "Raw data", &data.time_labels, ps)
}

pub fn std_data_figure(data: &CleanDataset) -> FigureSpec {
    let ps = data
        .variables
        .iter()
        .map(|v| Panel {
            title: titled(&v.name, &v.original),
            series: vec![PlotSeries::dense(&v.name, SeriesStyle::Data, &v.values)],
            bands: vec![],
            legend: false,
        })
        .collect();
    panels(FigureKind::StdData, "Standardized data", &data.time_labels, ps)
}

/// Standardized data with its trend and 95% band, one panel per variable.
pub fn trend_panel_figure(data: &CleanDataset, fits: &[TrendFit]) -> Result<FigureSpec> {
    let ps = fits
        .iter()
        .map(|f| {
            let v = data.variable(&f.variable).ok_or_else(|| {
                TrecError::InvalidArgument(format!("no data for fitted variable {}", f.variable))
            })?;
            Ok(Panel {
                title: format!("{} (degree {})", titled(&v.name, &v.original), f.degree),
                series: vec![
                    PlotSeries::dense("data", SeriesStyle::Data, &v.values),
                    PlotSeries::dense("trend", SeriesStyle::Trend, &f.fitted),
                ],
                bands: vec![Band {
                    lower: f.band_lower.clone(),
                    upper: f.band_upper.clone(),
                }],
                legend: false,
            })
        })
        .collect::<Result<_>>()?;
    Ok(panels(
        FigureKind::TrendPanel,
        "Standardized data and estimated trends",
        &data.time_labels,
        ps,
    ))
}

/// Every estimated trend overlaid in a single panel.
pub fn trend_overlay_figure(time_labels: &[f64], fits: &[TrendFit]) -> FigureSpec {
    let series = fits
        .iter()
        .enumerate()
        .map(|(i, f)| PlotSeries::dense(&f.variable, SeriesStyle::Member(i), &f.fitted))
        .collect();
    let panel = Panel {
        title: String::new(),
        series,
        bands: vec![],
        legend: true,
    };
    panels(FigureKind::TrendOverlay, "Estimated trends", time_labels, vec![panel])
}

/// One panel per non-empty rough group, member trends overlaid.
pub fn group_panel_figure(
    time_labels: &[f64],
    fits: &[TrendFit],
    rough: &DiscriminantResult,
) -> Result<FigureSpec> {
    let mut ps = Vec::new();
    for group in rough.groups.labels() {
        let members = rough.members(*group);
        if members.is_empty() {
            continue;
        }
        let series = members
            .iter()
            .enumerate()
            .map(|(i, m)| Ok(PlotSeries::dense(m, SeriesStyle::Member(i), &find_fit(fits, m)?.fitted)))
            .collect::<Result<_>>()?;
        ps.push(Panel {
            title: format!("{group} ({})", members.len()),
            series,
            bands: vec![],
            legend: true,
        });
    }
    Ok(panels(FigureKind::GroupPanel, "Rough groups", time_labels, ps))
}

/// `None` when the grouping was not made by clustering.
pub fn dendrogram_figure(rough: &DiscriminantResult) -> Option<FigureSpec> {
    let tree = rough.dendrogram.clone()?;
    let scores = tree
        .leaves
        .iter()
        .map(|leaf| {
            rough
                .assignments
                .iter()
                .find(|a| &a.variable == leaf)
                .map_or(f64::NAN, |a| a.score)
        })
        .collect();
    Some(FigureSpec {
        kind: FigureKind::Dendrogram,
        title: "Centroid-linkage dendrogram of discriminant scores".into(),
        page_size: PageSize::default(),
        time_labels: vec![],
        content: FigureContent::Dendrogram { tree, scores },
    })
}

pub fn icon_table_figure(table: &SummaryTable, time_labels: &[f64], fits: &[TrendFit]) -> Result<FigureSpec> {
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let members = r
                .members
                .iter()
                .map(|m| Ok((m.clone(), find_fit(fits, m)?.fitted.clone())))
                .collect::<Result<_>>()?;
            Ok(IconRow {
                target: r.target.clone(),
                group: r.group,
                icon: r.icon,
                members,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FigureSpec {
        kind: FigureKind::IconTable,
        title: "Assigned icons".into(),
        page_size: PageSize::default(),
        time_labels: time_labels.to_vec(),
        content: FigureContent::IconTable(rows),
    })
}

/// File names for the rendered pages of `spec`.
pub fn figure_file_names(spec: &FigureSpec) -> Vec<String> {
    let pages = spec.page_count();
    let paged = |stem: &str| (1..=pages).map(|p| format!("{stem}_{p}.svg")).collect();
    match spec.kind {
        FigureKind::RawData => paged("fig_rawdata"),
        FigureKind::StdData => paged("fig_stddata"),
        FigureKind::TrendPanel => paged("fig_ctrend"),
        FigureKind::TrendOverlay => vec!["fig_trend.svg".into()],
        FigureKind::GroupPanel => vec!["fig_groups.svg".into()],
        FigureKind::Dendrogram => vec!["fig_dendrogram.svg".into()],
        FigureKind::IconTable => vec!["fig_icons.svg".into()],
    }
}

/// Renders `spec` into `dir` and returns the paths written.
pub fn write_figure(spec: &FigureSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let pages = render_figure(spec)?;
    let mut written = Vec::with_capacity(pages.len());
    for (page, name) in pages.iter().zip(figure_file_names(spec)) {
        let path = dir.join(name);
        fs::write(&path, page).map_err(|e| TrecError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
