//! The three-step workflow: trend estimation, rough grouping, and target
//! classification with icon assignment, linked by a saved state file.

mod commands;
mod state;

pub use commands::{
    cmd_train_icons, cmd_trec1, cmd_trec2, cmd_trec3, default_model_dir, load_models,
    read_labeled_features, resolve_model_dir, summary_text, StepReport, TrainingSource, MODEL_DIR_ENV,
    STATE_FILE, SUMMARY_FILE,
};
pub use state::{
    CoefRow, DimRow, IconModels, PipelineState, RoughConfig, RoughStep, TargetStep, STATE_SCHEMA,
    STATE_VERSION,
};
