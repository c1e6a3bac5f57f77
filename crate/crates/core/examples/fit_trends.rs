//! Ingests the bundled dataset, standardizes it and selects a polynomial
//! trend for every variable by AIC.
//!
//! cargo run --example fit_trends [-- path/to/data.csv]

use std::fs;

use trec::dataset::{parse_dataset, prepare, CsvFormat};
use trec::trend::{fit_all, CANDIDATE_DEGREES};

fn main() -> trec::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.csv").to_string());
    let text = fs::read_to_string(&path).expect("readable input");
    let raw = parse_dataset(&text, CsvFormat::default())?;
    let clean = prepare(&raw)?;

    for m in &clean.name_map {
        println!("{:<14} -> {}", m.original, m.canonical);
    }
    if !clean.removed.is_empty() {
        println!("removed: {}", clean.removed.join(", "));
    }
    println!();
    println!("{:<4} {:>6} {:>10}  gamma_0..gamma_3", "var", "degree", "AIC");
    for fit in fit_all(&clean)? {
        let g: Vec<String> = fit.gamma.iter().map(|v| format!("{v:7.3}")).collect();
        println!("{:<4} {:>6} {:>10.3}  {}", fit.variable, fit.degree, fit.aic, g.join(" "));
    }
    println!("\ncandidate degrees: {CANDIDATE_DEGREES:?}");
    Ok(())
}
