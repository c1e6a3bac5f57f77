//! Scores each trend with the discriminant function and splits the
//! variables into two or three rough groups without clustering.
//!
//! cargo run --example rough_classify

use std::fs;

use trec::dataset::{parse_dataset, prepare, CsvFormat};
use trec::rough::{classify_by_sign, default_targets, discriminant_scores, GroupCount};
use trec::trend::fit_all;

fn main() -> trec::Result<()> {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.csv")).expect("bundled data");
    let clean = prepare(&parse_dataset(&text, CsvFormat::default())?)?;
    let fits = fit_all(&clean)?;
    let targets = default_targets(clean.len())?;
    let scored = discriminant_scores(&fits, &targets)?;

    println!("{:<4} {:>9} {:>9} {:>9} {:>9}", "var", "D", "L(T1)", "L(T2)", "L(0)");
    for s in &scored {
        println!(
            "{:<4} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            s.variable, s.score, s.to_t1, s.to_t2, s.to_flat
        );
    }
    for k in [GroupCount::Two, GroupCount::Three] {
        let result = classify_by_sign(&scored, k)?;
        println!("\n{} groups:", k.get());
        for g in k.labels() {
            println!("  {g:<9} {}", result.members(*g).join(", "));
        }
        for g in &result.not_applicable {
            println!("  {g} is not applicable");
        }
    }
    Ok(())
}
