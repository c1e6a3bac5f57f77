//! Trains the three icon discriminators on synthetic trends and reports
//! held-out accuracy on an independent draw.
//!
//! cargo run --release --example train_icon_model [-- out_dir]

use std::path::PathBuf;

use trec::icon::{accuracy, model_file_name, synth_training_set, SynthConfig, TrainConfig};
use trec::pipeline::{cmd_train_icons, TrainingSource};
use trec::rough::RoughGroup;

fn main() -> trec::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "trained_models".into()));
    let synth = SynthConfig::default();
    for group in RoughGroup::ALL {
        let path = out.join(model_file_name(group));
        let (training, report) =
            cmd_train_icons(group, &TrainingSource::Synthetic(synth), &TrainConfig::default(), &path)?;
        print!("{}", report.text());
        let holdout = synth_training_set(
            group,
            &SynthConfig {
                seed: synth.seed + 1000,
                ..synth
            },
        )?;
        println!(
            "  held-out accuracy {:.3}, written to {}",
            accuracy(&training.model, &holdout),
            path.display()
        );
    }
    Ok(())
}
