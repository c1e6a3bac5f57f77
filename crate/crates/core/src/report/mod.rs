//! SVG figures and the target summary table.

mod build;
mod figure;
mod summary;
pub mod svg;

pub use build::{
    dendrogram_figure, figure_file_names, group_panel_figure, icon_table_figure, raw_data_figure,
    std_data_figure, trend_overlay_figure, trend_panel_figure, write_figure,
};
pub use figure::{
    render_figure, Band, FigureContent, FigureKind, FigureSpec, IconRow, PageSize, Panel, PlotSeries,
    SeriesStyle, MAX_PANELS_PER_PAGE,
};
pub use summary::{summary_table, SummaryRow, SummaryTable, SUMMARY_GROUP_ORDER};
