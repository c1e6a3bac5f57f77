//! Centroid-linkage clustering of discriminant scores, printed as a merge
//! table, a bracketed tree and the two- and three-cluster cuts.
//!
//! cargo run --example cluster_dendrogram

use std::fs;

use trec::cluster::centroid_linkage;
use trec::dataset::{parse_dataset, prepare, CsvFormat};
use trec::rough::{centroid_cluster, default_targets, discriminant_scores, GroupCount};
use trec::trend::fit_all;

fn main() -> trec::Result<()> {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.csv")).expect("bundled data");
    let clean = prepare(&parse_dataset(&text, CsvFormat::default())?)?;
    let fits = fit_all(&clean)?;
    let scored = discriminant_scores(&fits, &default_targets(clean.len())?)?;

    let names: Vec<String> = scored.iter().map(|s| s.variable.clone()).collect();
    let scores: Vec<f64> = scored.iter().map(|s| s.score).collect();
    let tree = centroid_linkage(&names, &scores)?;
    let n = tree.n_leaves();
    let label = |node: usize| if node < n { tree.leaves[node].clone() } else { format!("#{node}") };
    println!("step  left  right  height  size");
    for (i, m) in tree.merges.iter().enumerate() {
        println!("{:>4}  {:>4}  {:>5}  {:>6.2}  {:>4}", n + i, label(m.left), label(m.right), m.height, m.size);
    }
    println!("\n{}", tree.to_text());

    for k in [GroupCount::Two, GroupCount::Three] {
        let result = centroid_cluster(&scored, k)?;
        println!("\nk = {}:", k.get());
        for g in k.labels() {
            println!("  {g:<9} {}", result.members(*g).join(", "));
        }
    }
    Ok(())
}
