//! Runs the three workflow steps on the bundled dataset exactly as the
//! command-line tool does, writing state, figures and summary.csv.
//!
//! cargo run --example full_workflow [-- out_dir]

use std::path::{Path, PathBuf};

use trec::multi::parse_group_targets;
use trec::pipeline::{cmd_trec1, cmd_trec2, cmd_trec3, resolve_model_dir, RoughConfig, STATE_FILE};
use trec::rough::GroupCount;

fn main() -> trec::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "trec_out".into()));
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example.csv");
    let state = out.join(STATE_FILE);

    println!("== trec1");
    let (_, report) = cmd_trec1(&input, &out)?;
    print!("{}", report.text());

    for groups in [GroupCount::Two, GroupCount::Three] {
        println!("\n== trec2 --groups {}", groups.get());
        let config = RoughConfig {
            groups,
            ..RoughConfig::default()
        };
        let (_, report) = cmd_trec2(&state, &config, None)?;
        print!("{}", report.text());
    }

    println!("\n== trec3");
    let targets = ["Downward=V1,V6,V9", "Upward=V8", "Flat=V2"]
        .iter()
        .map(|s| parse_group_targets(s))
        .collect::<trec::Result<Vec<_>>>()?;
    let (_, report) = cmd_trec3(&state, &targets, &resolve_model_dir(None), None)?;
    print!("{}", report.text());
    for f in report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
