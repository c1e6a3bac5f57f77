//! File-level entry points for the workflow steps and model training.

use std::fs;
use std::path::{Path, PathBuf};

use super::state::{IconModels, PipelineState, RoughConfig};
use crate::dataset::{parse_dataset, CsvFormat};
use crate::error::{Result, TrecError};
use crate::icon::{
    model_file_name, read_model, synth_training_set, train, write_model, FeatureVector, SynthConfig,
    TrainConfig, Training,
};
use crate::multi::GroupTargets;
use crate::report::{
    dendrogram_figure, group_panel_figure, icon_table_figure, raw_data_figure, std_data_figure,
    trend_overlay_figure, trend_panel_figure, write_figure, SummaryTable,
};
use crate::rough::RoughGroup;

pub const STATE_FILE: &str = "trec_state.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MODEL_DIR_ENV: &str = "TREC_MODEL_DIR";

/// Messages for the user and the files a step wrote.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub messages: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl StepReport {
    pub fn text(&self) -> String {
        let mut s = self.messages.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        s
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| TrecError::io(dir, e))
}

fn remove_stale(dir: &Path, name: &str) -> Result<()> {
    let path = dir.join(name);
    match fs::remove_file(&path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(TrecError::io(&path, e)),
        _ => Ok(()),
    }
}

fn state_dir(state_path: &Path) -> PathBuf {
    match state_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn format_for(path: &Path) -> CsvFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("tsv") || e.eq_ignore_ascii_case("tab") => CsvFormat { delimiter: b'\t' },
        _ => CsvFormat::default(),
    }
}

fn list_block(messages: &mut Vec<String>, heading: &str, items: &[String]) {
    messages.push(heading.to_string());
    if items.is_empty() {
        messages.push("  (none)".to_string());
    }
    messages.extend(items.iter().map(|i| format!("  {i}")));
}

/// Ingests `input`, fits trends and writes the state and the step-one figures.
pub fn cmd_trec1(input: &Path, out_dir: &Path) -> Result<(PipelineState, StepReport)> {
    let text = fs::read_to_string(input).map_err(|e| TrecError::io(input, e))?;
    let raw = parse_dataset(&text, format_for(input))?;
    let name = input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let state = PipelineState::from_dataset(&name, &raw)?;

    create_dir(out_dir)?;
    let mut report = StepReport::default();
    let map: Vec<String> = state
        .data
        .name_map
        .iter()
        .map(|m| format!("{} -> {}", m.original, m.canonical))
        .collect();
    list_block(&mut report.messages, "Variable names:", &map);
    list_block(
        &mut report.messages,
        "The following variable(s) is/are removed:",
        &state.data.removed,
    );
    report.messages.extend(state.data.warnings.iter().map(|w| format!("warning: {w}")));

    let state_path = out_dir.join(STATE_FILE);
    state.save(&state_path)?;
    report.files.push(state_path);
    for spec in [
        raw_data_figure(&raw),
        std_data_figure(&state.data),
        trend_panel_figure(&state.data, &state.fits)?,
        trend_overlay_figure(&state.data.time_labels, &state.fits),
    ] {
        report.files.extend(write_figure(&spec, out_dir)?);
    }
    Ok((state, report))
}

/// Rough classification of a saved state. Figures go next to the state file
/// unless `out_dir` is given.
pub fn cmd_trec2(
    state_path: &Path,
    config: &RoughConfig,
    out_dir: Option<&Path>,
) -> Result<(PipelineState, StepReport)> {
    let mut state = PipelineState::load(state_path)?;
    let out_dir = out_dir.map_or_else(|| state_dir(state_path), Path::to_path_buf);
    create_dir(&out_dir)?;
    let step = state.classify_rough(config)?.clone();

    let mut report = StepReport::default();
    for group in step.result.groups.labels() {
        let members = step.result.members(*group);
        if !members.is_empty() {
            report.messages.push(format!("{group}: {}", members.join(", ")));
        }
    }
    if !step.result.not_applicable.is_empty() {
        let names: Vec<String> = step.result.not_applicable.iter().map(|g| g.to_string()).collect();
        list_block(
            &mut report.messages,
            "The following group(s) is/are not applicable:",
            &names,
        );
    }

    state.save(state_path)?;
    report.files.push(state_path.to_path_buf());
    for stale in ["fig_dendrogram.svg", "fig_icons.svg", SUMMARY_FILE] {
        remove_stale(&out_dir, stale)?;
    }
    let groups = group_panel_figure(&state.data.time_labels, &state.fits, &step.result)?;
    report.files.extend(write_figure(&groups, &out_dir)?);
    if let Some(tree) = dendrogram_figure(&step.result) {
        report.files.extend(write_figure(&tree, &out_dir)?);
    }
    Ok((state, report))
}

/// `--model-dir`, then `TREC_MODEL_DIR`, then the models bundled with the crate.
pub fn resolve_model_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    match std::env::var_os(MODEL_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => default_model_dir(),
    }
}

pub fn default_model_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}

pub fn load_models(dir: &Path, groups: &[RoughGroup]) -> Result<IconModels> {
    let mut models = IconModels::new();
    for g in groups {
        let model = read_model(&dir.join(model_file_name(*g)))?;
        if model.group != *g {
            return Err(TrecError::GroupMismatch {
                model: model.group.to_string(),
                requested: g.to_string(),
            });
        }
        models.insert(*g, model);
    }
    Ok(models)
}

/// Target classification and icon assignment of a saved state.
pub fn cmd_trec3(
    state_path: &Path,
    targets: &[GroupTargets],
    model_dir: &Path,
    out_dir: Option<&Path>,
) -> Result<(PipelineState, StepReport)> {
    if targets.is_empty() {
        return Err(TrecError::InvalidArgument(
            "at least one target group is required (GROUP=NAME[,NAME...])".into(),
        ));
    }
    let mut state = PipelineState::load(state_path)?;
    let out_dir = out_dir.map_or_else(|| state_dir(state_path), Path::to_path_buf);
    create_dir(&out_dir)?;
    if state.rough.is_none() {
        return Err(TrecError::MissingStep("rough groups"));
    }
    let models = load_models(model_dir, &state.groups_needing_models(targets))?;
    let step = state.assign_targets(targets, &models)?.clone();

    let mut report = StepReport::default();
    report
        .messages
        .extend(step.assignment.warnings.iter().map(|w| format!("warning: {w}")));
    report.messages.push(summary_text(&step.summary));

    state.save(state_path)?;
    report.files.push(state_path.to_path_buf());
    let summary_path = out_dir.join(SUMMARY_FILE);
    fs::write(&summary_path, step.summary.to_csv()).map_err(|e| TrecError::io(&summary_path, e))?;
    report.files.push(summary_path);
    remove_stale(&out_dir, "fig_icons.svg")?;
    if !step.summary.is_empty() {
        let spec = icon_table_figure(&step.summary, &state.data.time_labels, &state.fits)?;
        report.files.extend(write_figure(&spec, &out_dir)?);
    }
    Ok((state, report))
}

/// Fixed-width text rendering of the summary table.
pub fn summary_text(table: &SummaryTable) -> String {
    let mut lines = vec![format!("{:<10} {:<9} {:>4}  members", "target", "group", "icon")];
    for r in &table.rows {
        lines.push(format!(
            "{:<10} {:<9} {:>4}  {}",
            r.target,
            r.group.as_str(),
            r.icon,
            r.members.join(", ")
        ));
    }
    lines.join("\n")
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainingSource {
    Synthetic(SynthConfig),
    /// CSV with columns `icon,degree,gamma0,gamma1,gamma2,gamma3`.
    Labeled(PathBuf),
}

pub fn read_labeled_features(path: &Path) -> Result<Vec<(FeatureVector, u8)>> {
    const HEADER: [&str; 6] = ["icon", "degree", "gamma0", "gamma1", "gamma2", "gamma3"];
    let text = fs::read_to_string(path).map_err(|e| TrecError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| TrecError::Parse(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(TrecError::Parse(format!(
            "labelled feature file header must be {}",
            HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| TrecError::Parse(e.to_string()))?;
        let cell = |c: usize| TrecError::Cell {
            row,
            column: c + 1,
            message: format!("'{}' is not a valid {}", &rec[c], HEADER[c]),
        };
        let icon: u8 = rec[0].parse().map_err(|_| cell(0))?;
        let degree: usize = rec[1].parse().map_err(|_| cell(1))?;
        if !(1..=3).contains(&degree) {
            return Err(cell(1));
        }
        let mut gamma = [0.0; 4];
        for (k, g) in gamma.iter_mut().enumerate() {
            *g = rec[k + 2]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| cell(k + 2))?;
        }
        out.push((FeatureVector::new(degree, gamma), icon));
    }
    Ok(out)
}

/// Trains one group's discriminator and writes the model file.
pub fn cmd_train_icons(
    group: RoughGroup,
    source: &TrainingSource,
    config: &TrainConfig,
    out: &Path,
) -> Result<(Training, StepReport)> {
    let (data, seed) = match source {
        TrainingSource::Synthetic(cfg) => (synth_training_set(group, cfg)?, Some(cfg.seed)),
        TrainingSource::Labeled(path) => (read_labeled_features(path)?, None),
    };
    let mut training = train(group, &data, config)?;
    training.model.meta.seed = seed;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_model(&training.model, out)?;

    let m = &training.model.meta;
    let mut report = StepReport::default();
    report.messages.push(format!(
        "{group}: {} examples, {} after {} iteration(s), gradient norm {:.3e}",
        m.samples,
        if m.converged { "converged" } else { "NOT converged" },
        m.iterations,
        m.gradient_norm
    ));
    if let (Some(first), Some(last)) = (training.trace.first(), training.trace.last()) {
        report
            .messages
            .push(format!("penalized log-likelihood {first:.4} -> {last:.4}"));
    }
    report.files.push(out.to_path_buf());
    Ok((training, report))
}
