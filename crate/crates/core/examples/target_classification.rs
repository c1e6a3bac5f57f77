//! Assigns every variable of a rough group to its nearest target trend and
//! labels it with an icon from the bundled models.
//!
//! cargo run --example target_classification

use std::fs;

use trec::dataset::{parse_dataset, CsvFormat};
use trec::multi::parse_group_targets;
use trec::pipeline::{default_model_dir, load_models, summary_text, PipelineState, RoughConfig};
use trec::rough::GroupCount;

fn main() -> trec::Result<()> {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.csv")).expect("bundled data");
    let raw = parse_dataset(&text, CsvFormat::default())?;
    let mut state = PipelineState::from_dataset("example.csv", &raw)?;
    state.classify_rough(&RoughConfig {
        groups: GroupCount::Three,
        ..RoughConfig::default()
    })?;

    let targets = ["Downward=V1,V6,V9", "Upward=V8", "Flat=V2"]
        .iter()
        .map(|s| parse_group_targets(s))
        .collect::<trec::Result<Vec<_>>>()?;
    let models = load_models(&default_model_dir(), &state.groups_needing_models(&targets))?;
    let step = state.assign_targets(&targets, &models)?;

    for d in &step.assignment.divergences {
        println!("L({} : {}) = {:.3}", d.variable, d.target, d.value);
    }
    println!();
    println!("{}", summary_text(&step.summary));
    Ok(())
}
