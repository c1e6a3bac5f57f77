//! Renders a hand-built small-multiples figure: twenty noisy quadratics with
//! fitted trends and bands, which paginates into two SVG pages.
//!
//! cargo run --example render_figures [-- out_dir]

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use trec::report::{render_figure, Band, FigureContent, FigureKind, FigureSpec, PageSize, Panel, PlotSeries, SeriesStyle};
use trec::trend::select_degree;

fn main() -> trec::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    fs::create_dir_all(&out).expect("output directory");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.3).expect("valid sd");
    let n = 25;
    let labels: Vec<f64> = (0..n).map(|i| 2000.0 + i as f64).collect();

    let mut panels = Vec::new();
    for k in 0..20 {
        let curve = (k as f64 - 10.0) / 10.0;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                curve * (2.0 * s - 1.0).powi(2) + s + noise.sample(&mut rng)
            })
            .collect();
        let fit = select_degree(&y)?;
        panels.push(Panel {
            title: format!("series {} (degree {})", k + 1, fit.degree),
            series: vec![
                PlotSeries::dense("data", SeriesStyle::Data, &y),
                PlotSeries::dense("trend", SeriesStyle::Trend, &fit.fitted),
            ],
            bands: vec![Band {
                lower: fit.band_lower.clone(),
                upper: fit.band_upper.clone(),
            }],
            legend: false,
        });
    }
    let spec = FigureSpec {
        kind: FigureKind::TrendPanel,
        title: "Quadratic family".into(),
        page_size: PageSize::default(),
        time_labels: labels,
        content: FigureContent::Panels(panels),
    };
    for (i, page) in render_figure(&spec)?.iter().enumerate() {
        let path = out.join(format!("family_{}.svg", i + 1));
        fs::write(&path, page).expect("writable output");
        println!("wrote {}", path.display());
    }
    Ok(())
}
