use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trec::icon::{SynthConfig, TrainConfig};
use trec::multi::{parse_group_targets, GroupTargets};
use trec::pipeline::{
    cmd_train_icons, cmd_trec1, cmd_trec2, cmd_trec3, resolve_model_dir, RoughConfig, StepReport,
    TrainingSource,
};
use trec::rough::{GroupCount, RoughGroup};
use trec::TrecError;

#[derive(Parser)]
#[command(name = "trec", version, about = "Trend estimation and classification for multivariate time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standardize the data, fit polynomial trends and write the state file.
    Trec1 {
        /// CSV (or .tsv) with time labels in the first column.
        input: PathBuf,
        #[arg(long, default_value = "trec_out")]
        out: PathBuf,
    },
    /// Split the trends into rough groups.
    Trec2 {
        #[command(flatten)]
        state: StateArgs,
        /// Number of rough groups.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        groups: u8,
        /// Group by the discriminant rule alone instead of clustering.
        #[arg(long)]
        no_clustering: bool,
        /// Two variables whose trends replace the default targets, as A,B.
        #[arg(long, value_name = "A,B", value_parser = parse_pvar)]
        pvar: Option<(String, String)>,
    },
    /// Classify each group against target variables and assign icons.
    Trec3 {
        #[command(flatten)]
        state: StateArgs,
        /// GROUP=NAME[,NAME...]; repeat once per group.
        #[arg(long = "targets", value_name = "GROUP=NAMES", value_parser = parse_targets, required = true)]
        targets: Vec<GroupTargets>,
        /// Directory holding upward.model, downward.model and flat.model.
        #[arg(long)]
        model_dir: Option<PathBuf>,
    },
    /// Train one group's icon discriminator.
    TrainIcons {
        /// Upward, Downward or Flat.
        #[arg(long, value_parser = parse_group)]
        group: RoughGroup,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        /// Labelled features (icon,degree,gamma0..gamma3) instead of synthetic data.
        #[arg(long, conflicts_with_all = ["n_per_icon", "noise_sd", "seed", "n_steps", "amplitude_min", "amplitude_max"])]
        labeled: Option<PathBuf>,
        #[arg(long, default_value_t = SynthConfig::default().n_per_icon)]
        n_per_icon: usize,
        #[arg(long, default_value_t = SynthConfig::default().noise_sd)]
        noise_sd: f64,
        #[arg(long, default_value_t = SynthConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = SynthConfig::default().n_steps)]
        n_steps: usize,
        #[arg(long, default_value_t = SynthConfig::default().amplitude.0)]
        amplitude_min: f64,
        #[arg(long, default_value_t = SynthConfig::default().amplitude.1)]
        amplitude_max: f64,
        #[arg(long, default_value_t = TrainConfig::default().ridge)]
        ridge: f64,
    },
}

#[derive(Args)]
struct StateArgs {
    /// State file written by trec1.
    #[arg(long, default_value = "trec_out/trec_state.json")]
    state: PathBuf,
    /// Output directory; defaults to the state file's directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pvar(s: &str) -> Result<(String, String), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err("expected two variable names as A,B".into()),
    }
}

fn parse_targets(s: &str) -> Result<GroupTargets, String> {
    parse_group_targets(s).map_err(|e| e.to_string())
}

fn parse_group(s: &str) -> Result<RoughGroup, String> {
    s.parse().map_err(|e: TrecError| e.to_string())
}

fn run(command: Command) -> trec::Result<StepReport> {
    match command {
        Command::Trec1 { input, out } => cmd_trec1(&input, &out).map(|(_, r)| r),
        Command::Trec2 {
            state,
            groups,
            no_clustering,
            pvar,
        } => {
            let config = RoughConfig {
                groups: GroupCount::try_from(groups as usize)?,
                clustering: !no_clustering,
                pvar,
            };
            cmd_trec2(&state.state, &config, state.out.as_deref()).map(|(_, r)| r)
        }
        Command::Trec3 {
            state,
            targets,
            model_dir,
        } => {
            let dir = resolve_model_dir(model_dir.as_deref());
            cmd_trec3(&state.state, &targets, &dir, state.out.as_deref()).map(|(_, r)| r)
        }
        Command::TrainIcons {
            group,
            out,
            labeled,
            n_per_icon,
            noise_sd,
            seed,
            n_steps,
            amplitude_min,
            amplitude_max,
            ridge,
        } => {
            let source = match labeled {
                Some(path) => TrainingSource::Labeled(path),
                None => TrainingSource::Synthetic(SynthConfig {
                    n_per_icon,
                    noise_sd,
                    n_steps,
                    seed,
                    amplitude: (amplitude_min, amplitude_max),
                }),
            };
            let config = TrainConfig {
                ridge,
                ..TrainConfig::default()
            };
            cmd_train_icons(group, &source, &config, &out).map(|(_, r)| r)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.text());
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
