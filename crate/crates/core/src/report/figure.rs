//! Figure descriptions and their SVG rendering.

use serde::{Deserialize, Serialize};

use super::svg::{Anchor, Svg, AXIS_COLOR, BAND_COLOR, BAND_OPACITY, DATA_COLOR, TREND_COLOR};
use crate::cluster::Dendrogram;
use crate::dataset::format_label;
use crate::error::{Result, TrecError};
use crate::icon::{icon, profile_value};
use crate::rough::RoughGroup;

/// Panels per page; pages hold a grid of at most 4 x 4.
pub const MAX_PANELS_PER_PAGE: usize = 16;
const GRID: usize = 4;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22",
    "#7f7f7f", "#d62728",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureKind {
    RawData,
    StdData,
    TrendOverlay,
    TrendPanel,
    GroupPanel,
    Dendrogram,
    IconTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageSize {
    pub width: f64,
    pub height: f64,
}

impl Default for PageSize {
    fn default() -> Self {
        PageSize {
            width: 1200.0,
            height: 900.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesStyle {
    /// Observations, red.
    Data,
    /// Estimated trend, black.
    Trend,
    /// One of several overlaid trends, coloured by index.
    Member(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub label: String,
    pub style: SeriesStyle,
    /// `None` leaves a gap.
    pub values: Vec<Option<f64>>,
}

impl PlotSeries {
    pub fn dense(label: &str, style: SeriesStyle, values: &[f64]) -> Self {
        PlotSeries {
            label: label.to_string(),
            style,
            values: values.iter().copied().map(Some).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub title: String,
    pub series: Vec<PlotSeries>,
    pub bands: Vec<Band>,
    /// Draw a legend of series labels.
    pub legend: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IconRow {
    pub target: String,
    pub group: RoughGroup,
    pub icon: u8,
    /// Member trends; the target's own trend is drawn in black.
    pub members: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FigureContent {
    Panels(Vec<Panel>),
    Dendrogram { tree: Dendrogram, scores: Vec<f64> },
    IconTable(Vec<IconRow>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub title: String,
    pub page_size: PageSize,
    /// x-axis labels shared by every panel.
    pub time_labels: Vec<f64>,
    pub content: FigureContent,
}

impl FigureSpec {
    /// Number of SVG pages [`render_figure`] produces.
    pub fn page_count(&self) -> usize {
        match &self.content {
            FigureContent::Panels(p) => p.len().div_ceil(MAX_PANELS_PER_PAGE),
            _ => 1,
        }
    }
}

/// Renders one SVG document per page.
pub fn render_figure(spec: &FigureSpec) -> Result<Vec<String>> {
    let n = spec.time_labels.len();
    match &spec.content {
        FigureContent::Panels(panels) => {
            if panels.is_empty() {
                return Err(TrecError::InvalidArgument("figure has no panels".into()));
            }
            for p in panels {
                if p.series.is_empty() {
                    return Err(TrecError::InvalidArgument(format!(
                        "panel '{}' has no series",
                        p.title
                    )));
                }
                let lens = p
                    .series
                    .iter()
                    .map(|s| s.values.len())
                    .chain(p.bands.iter().flat_map(|b| [b.lower.len(), b.upper.len()]));
                for len in lens {
                    if len != n {
                        return Err(TrecError::LengthMismatch {
                            expected: n,
                            found: len,
                        });
                    }
                }
            }
            let pages = panels.len().div_ceil(MAX_PANELS_PER_PAGE);
            Ok(panels
                .chunks(MAX_PANELS_PER_PAGE)
                .enumerate()
                .map(|(i, chunk)| render_panel_page(spec, chunk, i + 1, pages))
                .collect())
        }
        FigureContent::Dendrogram { tree, scores } => {
            if tree.n_leaves() == 0 {
                return Err(TrecError::InvalidArgument("dendrogram has no leaves".into()));
            }
            if scores.len() != tree.n_leaves() {
                return Err(TrecError::LengthMismatch {
                    expected: tree.n_leaves(),
                    found: scores.len(),
                });
            }
            Ok(vec![render_dendrogram(spec, tree, scores)])
        }
        FigureContent::IconTable(rows) => {
            if rows.is_empty() {
                return Err(TrecError::InvalidArgument("icon table has no rows".into()));
            }
            for r in rows {
                if icon(r.icon).is_none() {
                    return Err(TrecError::InvalidArgument(format!("unknown icon id {}", r.icon)));
                }
                if r.members.is_empty() {
                    return Err(TrecError::InvalidArgument(format!(
                        "target {} has no member trends",
                        r.target
                    )));
                }
                for (_, t) in &r.members {
                    if t.len() != n {
                        return Err(TrecError::LengthMismatch {
                            expected: n,
                            found: t.len(),
                        });
                    }
                }
            }
            Ok(vec![render_icon_table(spec, rows)])
        }
    }
}

struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

fn grid_shape(count: usize) -> (usize, usize) {
    let cols = (1..=GRID).find(|c| c * c >= count).unwrap_or(GRID);
    (cols, count.div_ceil(cols))
}

fn page_title(spec: &FigureSpec, page: usize, pages: usize) -> String {
    if pages > 1 {
        format!("{} ({page}/{pages})", spec.title)
    } else {
        spec.title.clone()
    }
}

fn render_panel_page(spec: &FigureSpec, panels: &[Panel], page: usize, pages: usize) -> String {
    let PageSize { width, height } = spec.page_size;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 28.0, 18.0, Anchor::Middle, &page_title(spec, page, pages));
    let (cols, rows) = grid_shape(panels.len());
    let top = 44.0;
    let cell_w = width / cols as f64;
    let cell_h = (height - top) / rows as f64;
    for (i, panel) in panels.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        let frame = Frame {
            x: c as f64 * cell_w + 48.0,
            y: top + r as f64 * cell_h + 22.0,
            w: cell_w - 64.0,
            h: cell_h - 56.0,
        };
        draw_panel(&mut svg, &frame, panel, &spec.time_labels);
    }
    svg.finish()
}

fn value_range<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn style_color(style: SeriesStyle) -> &'static str {
    match style {
        SeriesStyle::Data => DATA_COLOR,
        SeriesStyle::Trend => TREND_COLOR,
        SeriesStyle::Member(i) => PALETTE[i % PALETTE.len()],
    }
}

fn draw_panel(svg: &mut Svg, f: &Frame, panel: &Panel, labels: &[f64]) {
    let (ylo, yhi) = value_range(
        panel
            .series
            .iter()
            .flat_map(|s| s.values.iter().flatten())
            .chain(panel.bands.iter().flat_map(|b| b.lower.iter().chain(&b.upper))),
    );
    let n = labels.len();
    let xs = |i: usize| {
        if n > 1 {
            f.x + f.w * i as f64 / (n - 1) as f64
        } else {
            f.x + f.w / 2.0
        }
    };
    let ys = |v: f64| f.y + f.h * (yhi - v) / (yhi - ylo);

    svg.text(f.x + f.w / 2.0, f.y - 8.0, 12.0, Anchor::Middle, &panel.title);
    svg.rect(f.x, f.y, f.w, f.h, "none", AXIS_COLOR);
    if ylo < 0.0 && yhi > 0.0 {
        svg.polyline(&[(f.x, ys(0.0)), (f.x + f.w, ys(0.0))], AXIS_COLOR, 0.5, Some("2,3"));
    }
    if let (Some(first), Some(last)) = (labels.first(), labels.last()) {
        svg.text(f.x, f.y + f.h + 14.0, 10.0, Anchor::Start, &format_label(*first));
        svg.text(f.x + f.w, f.y + f.h + 14.0, 10.0, Anchor::End, &format_label(*last));
    }
    svg.text(f.x - 4.0, f.y + 10.0, 10.0, Anchor::End, &format!("{yhi:.2}"));
    svg.text(f.x - 4.0, f.y + f.h, 10.0, Anchor::End, &format!("{ylo:.2}"));

    for b in &panel.bands {
        let mut pts: Vec<(f64, f64)> = b.upper.iter().enumerate().map(|(i, v)| (xs(i), ys(*v))).collect();
        pts.extend(b.lower.iter().enumerate().rev().map(|(i, v)| (xs(i), ys(*v))));
        svg.polygon(&pts, BAND_COLOR, BAND_OPACITY);
    }
    for s in &panel.series {
        let color = style_color(s.style);
        let width = if s.style == SeriesStyle::Trend { 1.8 } else { 1.2 };
        let mut run: Vec<(f64, f64)> = Vec::new();
        for (i, v) in s.values.iter().enumerate() {
            match v {
                Some(v) if v.is_finite() => run.push((xs(i), ys(*v))),
                _ => flush_run(svg, &mut run, color, width),
            }
        }
        flush_run(svg, &mut run, color, width);
    }
    if panel.legend {
        for (k, s) in panel.series.iter().enumerate() {
            let y = f.y + 12.0 + 13.0 * k as f64;
            let x = f.x + f.w - 60.0;
            svg.line(x, y - 4.0, x + 16.0, y - 4.0, style_color(s.style), 2.0);
            svg.text(x + 20.0, y, 10.0, Anchor::Start, &s.label);
        }
    }
}

fn flush_run(svg: &mut Svg, run: &mut Vec<(f64, f64)>, color: &str, width: f64) {
    match run.len() {
        0 => {}
        1 => svg.circle(run[0].0, run[0].1, 1.5, color),
        _ => svg.polyline(run, color, width, None),
    }
    run.clear();
}

fn render_dendrogram(spec: &FigureSpec, tree: &Dendrogram, scores: &[f64]) -> String {
    let PageSize { width, height } = spec.page_size;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 28.0, 18.0, Anchor::Middle, &spec.title);
    let n = tree.n_leaves();
    let f = Frame {
        x: 80.0,
        y: 60.0,
        w: width - 120.0,
        h: height - 160.0,
    };
    let max_h = tree.merges.iter().map(|m| m.height).fold(0.0, f64::max);
    let max_h = if max_h > 0.0 { max_h } else { 1.0 };
    let ys = |h: f64| f.y + f.h * (1.0 - h / max_h);

    // x position of every node, leaves spaced evenly in plotting order
    let mut x = vec![0.0; n + tree.merges.len()];
    for (pos, leaf) in tree.leaf_order().iter().enumerate() {
        x[*leaf] = f.x + f.w * (pos as f64 + 0.5) / n as f64;
    }
    let mut height = vec![0.0; n + tree.merges.len()];
    for (i, m) in tree.merges.iter().enumerate() {
        let node = n + i;
        x[node] = (x[m.left] + x[m.right]) / 2.0;
        height[node] = m.height;
        let (xl, xr) = (x[m.left], x[m.right]);
        let pts = [
            (xl, ys(height[m.left])),
            (xl, ys(m.height)),
            (xr, ys(m.height)),
            (xr, ys(height[m.right])),
        ];
        svg.polyline(&pts, TREND_COLOR, 1.2, None);
    }
    svg.line(f.x - 10.0, f.y, f.x - 10.0, f.y + f.h, AXIS_COLOR, 1.0);
    svg.text(f.x - 14.0, f.y + 4.0, 10.0, Anchor::End, &format!("{max_h:.2}"));
    svg.text(f.x - 14.0, f.y + f.h + 4.0, 10.0, Anchor::End, "0.00");
    svg.text(f.x - 50.0, f.y + f.h / 2.0, 11.0, Anchor::Middle, "height");
    for leaf in 0..n {
        svg.text(x[leaf], f.y + f.h + 18.0, 11.0, Anchor::Middle, &tree.leaves[leaf]);
        svg.text(x[leaf], f.y + f.h + 32.0, 9.0, Anchor::Middle, &format!("{:.2}", scores[leaf]));
    }
    svg.text(f.x + f.w / 2.0, f.y + f.h + 52.0, 11.0, Anchor::Middle, "discriminant score");
    svg.finish()
}

fn render_icon_table(spec: &FigureSpec, rows: &[IconRow]) -> String {
    let PageSize { width, .. } = spec.page_size;
    let row_h = 90.0;
    let top = 80.0;
    let height = top + row_h * rows.len() as f64 + 20.0;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 28.0, 18.0, Anchor::Middle, &spec.title);
    let cols = [40.0, 0.2 * width, 0.38 * width, 0.75 * width];
    for (c, head) in cols.iter().zip(["target", "group", "trend", "icon"]) {
        svg.text(*c, top - 16.0, 13.0, Anchor::Start, head);
    }
    svg.line(30.0, top - 8.0, width - 30.0, top - 8.0, AXIS_COLOR, 1.0);
    let n = spec.time_labels.len();
    for (k, r) in rows.iter().enumerate() {
        let y0 = top + row_h * k as f64;
        let mid = y0 + row_h / 2.0;
        svg.text(cols[0], mid + 5.0, 13.0, Anchor::Start, &r.target);
        svg.text(cols[1], mid + 5.0, 13.0, Anchor::Start, r.group.as_str());

        let thumb = Frame {
            x: cols[2],
            y: y0 + 10.0,
            w: cols[3] - cols[2] - 40.0,
            h: row_h - 20.0,
        };
        svg.rect(thumb.x, thumb.y, thumb.w, thumb.h, "none", AXIS_COLOR);
        let (lo, hi) = value_range(r.members.iter().flat_map(|(_, t)| t.iter()));
        let px = |i: usize| thumb.x + thumb.w * i as f64 / (n.max(2) - 1) as f64;
        let py = |v: f64| thumb.y + thumb.h * (hi - v) / (hi - lo);
        let mut ordered: Vec<&(String, Vec<f64>)> = r.members.iter().filter(|(m, _)| *m != r.target).collect();
        ordered.extend(r.members.iter().filter(|(m, _)| *m == r.target));
        for (name, t) in ordered {
            let pts: Vec<(f64, f64)> = t.iter().enumerate().map(|(i, v)| (px(i), py(*v))).collect();
            if *name == r.target {
                svg.polyline(&pts, TREND_COLOR, 2.0, None);
            } else {
                svg.polyline(&pts, BAND_COLOR, 1.2, Some("4,3"));
            }
        }

        let box_x = cols[3];
        let size = row_h - 24.0;
        svg.rect(box_x, y0 + 12.0, size, size, "none", AXIS_COLOR);
        match icon(r.icon).and_then(|i| i.profile) {
            Some(_) => {
                let pts: Vec<(f64, f64)> = (0..=40)
                    .map(|i| {
                        let v = profile_value(r.icon, i as f64 / 40.0).unwrap_or(0.0);
                        (
                            box_x + 8.0 + (size - 16.0) * i as f64 / 40.0,
                            y0 + 12.0 + size / 2.0 - v * (size / 2.0 - 8.0),
                        )
                    })
                    .collect();
                svg.polyline(&pts, TREND_COLOR, 2.5, None);
            }
            None => svg.text(box_x + size / 2.0, y0 + 12.0 + size * 0.7, size * 0.6, Anchor::Middle, "?"),
        }
        let desc = icon(r.icon).map(|i| i.description).unwrap_or("");
        svg.text(box_x + size + 12.0, mid + 5.0, 12.0, Anchor::Start, &format!("{} {desc}", r.icon));
    }
    svg.finish()
}
