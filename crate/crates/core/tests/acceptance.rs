//! Acceptance criteria. Runs every check, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use trec::icon::logistic::{cell_probabilities, gradient, log_likelihood, Example, Theta};
use trec::icon::{
    accuracy, assign_icon, read_model, synth_training_set, FeatureVector, IconModel, SynthConfig,
    TrainConfig,
};
use trec::pipeline::{cmd_train_icons, TrainingSource};
use trec::report::SummaryTable;
use trec::rough::{centroid_cluster, score_trend, GroupCount, RoughGroup, ScoredTrend, TargetPair, TargetSource};
use trec::trend::{ols_fit, select_degree, TrendFit};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        o.pass = false;
    }
    o.detail = format!("{}; {:.2}s (limit {:.0}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs_f64());
    o
}

// ---------------------------------------------------------------- 1

/// Exact (Z'Z)^-1 Z'Y in rational arithmetic on the raw design n^k.
fn exact_normal_equations(y: &[f64], degree: usize) -> Vec<f64> {
    let p = degree + 1;
    let n = y.len();
    let pow = |t: usize, k: usize| BigRational::from_integer(BigInt::from(t).pow(k as u32));
    let yq: Vec<BigRational> = y.iter().map(|v| BigRational::from_float(*v).expect("finite")).collect();
    let mut a: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..p)
                .map(|j| (1..=n).map(|t| pow(t, i + j)).fold(BigRational::zero(), |s, v| s + v))
                .collect();
            row.push((1..=n).map(|t| pow(t, i) * &yq[t - 1]).fold(BigRational::zero(), |s, v| s + v));
            row
        })
        .collect();
    for col in 0..p {
        let piv = (col..p).find(|&r| !a[r][col].is_zero()).expect("non-singular");
        a.swap(col, piv);
        for r in 0..p {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..=p {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    (0..p)
        .map(|i| (&a[i][p] / &a[i][i]).to_f64().expect("representable"))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut fit_time = Duration::ZERO;
    let mut o = {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            let n = [10, 20, 50][trial % 3];
            let degree = 1 + trial % 3;
            let c: Vec<f64> = (0..=degree).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n)
                .map(|i| {
                    let s = i as f64 / (n - 1) as f64;
                    c.iter().rev().fold(0.0, |acc, ck| acc * s + ck) + noise.sample(&mut rng)
                })
                .collect();
            let start = Instant::now();
            let fit = ols_fit(&y, degree).expect("fit");
            fit_time += start.elapsed();
            for (b, o) in fit.beta.iter().zip(exact_normal_equations(&y, degree)) {
                worst = worst.max((b - o).abs() / o.abs());
            }
        }
        outcome(worst <= 1e-8, format!("max relative error {worst:.2e} (tolerance 1e-8)"))
    };
    // only the fits count against the budget, not the rational oracle
    o.pass &= fit_time < Duration::from_secs(1);
    o.detail = format!("{}; fits took {:.3}s (limit 1s)", o.detail, fit_time.as_secs_f64());
    o
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(5), || {
        let n = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut rates = Vec::new();
        for degree in 1..=3usize {
            let mut hits = 0;
            for _ in 0..200 {
                // coefficients on s in [-1, 1], leading one bounded away from zero
                let mut c: Vec<f64> = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
                let lead: f64 = rng.random_range(1.0..2.0);
                c.push(if rng.random_bool(0.5) { lead } else { -lead });
                let signal: Vec<f64> = (0..n)
                    .map(|i| {
                        let s = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
                        c.iter().rev().fold(0.0, |acc, ck| acc * s + ck)
                    })
                    .collect();
                let mean = signal.iter().sum::<f64>() / n as f64;
                let var = signal.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
                let noise = Normal::new(0.0, (var / 10.0).sqrt()).unwrap();
                let y: Vec<f64> = signal.iter().map(|v| v + noise.sample(&mut rng)).collect();
                if select_degree(&y).expect("fit").degree == degree {
                    hits += 1;
                }
            }
            rates.push(hits as f64 / 200.0);
        }
        let pass = rates.iter().all(|r| *r >= 0.95);
        outcome(
            pass,
            format!(
                "recovery rate by degree 1/2/3 = {:.3}/{:.3}/{:.3} (need >= 0.95 each)",
                rates[0], rates[1], rates[2]
            ),
        )
    })
}

// ---------------------------------------------------------------- 3

fn pair(t1: Vec<f64>, t2: Vec<f64>) -> TargetPair {
    TargetPair {
        t1,
        t2,
        source: TargetSource::User("T1".into(), "T2".into()),
    }
}

fn criterion_3() -> Outcome {
    let fixed = score_trend("t", &[0.0, 0.0, 1.0], &pair(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, -1.0])).score;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(3..40);
        let mut draw = || -> Vec<f64> { (0..n).map(|_| rng.random_range(-3.0..3.0)).collect() };
        let (t, a, b) = (draw(), draw(), draw());
        let d = score_trend("t", &t, &pair(a.clone(), b.clone())).score;
        let swapped = score_trend("t", &t, &pair(b, a)).score;
        worst = worst.max((d + swapped).abs());
    }
    outcome(
        fixed == 4.0 && worst <= 1e-12,
        format!("fixture D = {fixed}; max |D + D_swapped| = {worst:.1e} (tolerance 1e-12)"),
    )
}

// ---------------------------------------------------------------- 4

/// Plain agglomeration: every step recomputes all centroid distances from
/// member lists and merges the closest pair, ties to the pair whose smallest
/// members are lexicographically first.
fn brute_force_partition(scores: &[f64], k: usize) -> BTreeSet<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = (0..scores.len()).map(|i| vec![i]).collect();
    let mean = |c: &Vec<usize>| c.iter().map(|&i| scores[i]).sum::<f64>() / c.len() as f64;
    while clusters.len() > k {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in 0..clusters.len() {
                if a == b {
                    continue;
                }
                let d = (mean(&clusters[a]) - mean(&clusters[b])).abs();
                let key = {
                    let (x, y) = (clusters[a][0], clusters[b][0]);
                    (x.min(y), x.max(y))
                };
                if best.is_none_or(|(bd, bk, _, _)| d < bd || (d == bd && key < bk)) {
                    best = Some((d, key, a, b));
                }
            }
        }
        let (_, _, a, b) = best.unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let merged = clusters.remove(hi);
        clusters[lo].extend(merged);
        clusters[lo].sort_unstable();
    }
    clusters.into_iter().collect()
}

fn criterion_4() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mismatches = 0;
        let mut checked = 0;
        for set in 0..200 {
            let size = rng.random_range(3..=8);
            // every fifth set uses small integers so exact ties occur
            let scores: Vec<f64> = (0..size)
                .map(|_| {
                    if set % 5 == 0 {
                        rng.random_range(-3i32..=3) as f64
                    } else {
                        rng.random_range(-50.0..50.0)
                    }
                })
                .collect();
            let scored: Vec<ScoredTrend> = scores
                .iter()
                .enumerate()
                .map(|(i, s)| ScoredTrend {
                    variable: format!("V{}", i + 1),
                    score: *s,
                    to_t1: 0.0,
                    to_t2: 0.0,
                    to_flat: 0.0,
                })
                .collect();
            for k in [GroupCount::Two, GroupCount::Three] {
                let result = centroid_cluster(&scored, k).expect("cluster");
                let got: BTreeSet<Vec<usize>> = k
                    .labels()
                    .iter()
                    .map(|g| {
                        result
                            .assignments
                            .iter()
                            .enumerate()
                            .filter(|(_, a)| a.group == *g)
                            .map(|(i, _)| i)
                            .collect::<Vec<_>>()
                    })
                    .filter(|c| !c.is_empty())
                    .collect();
                checked += 1;
                if got != brute_force_partition(&scores, k.get()) {
                    mismatches += 1;
                }
            }
        }
        outcome(mismatches == 0, format!("{mismatches} mismatches in {checked} partitions"))
    })
}

// ---------------------------------------------------------------- 5

fn random_theta(rng: &mut ChaCha8Rng, scale: f64) -> Theta {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-scale..scale)))
}

fn random_x(rng: &mut ChaCha8Rng) -> FeatureVector {
    let degree = rng.random_range(1..=3);
    FeatureVector::new(degree, std::array::from_fn(|_| rng.random_range(-5.0..5.0)))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_sum: f64 = 0.0;
    for _ in 0..1000 {
        let theta = random_theta(&mut rng, 10.0);
        let p = cell_probabilities(&theta, &random_x(&mut rng));
        worst_sum = worst_sum.max((p.iter().sum::<f64>() - 1.0).abs());
    }

    let mut worst_grad: f64 = 0.0;
    for _ in 0..20 {
        let theta = random_theta(&mut rng, 1.0);
        let data: Vec<Example> = (0..30)
            .map(|_| Example {
                x: random_x(&mut rng),
                category: rng.random_range(0..4),
            })
            .collect();
        let g = gradient(&theta, &data, 1e-4);
        let h = 1e-5;
        for j in 0..3 {
            for f in 0..7 {
                let mut plus = theta;
                let mut minus = theta;
                plus[j][f] += h;
                minus[j][f] -= h;
                let fd = (log_likelihood(&plus, &data, 1e-4) - log_likelihood(&minus, &data, 1e-4)) / (2.0 * h);
                let rel = (g[j][f] - fd).abs() / g[j][f].abs().max(fd.abs()).max(1e-8);
                worst_grad = worst_grad.max(rel);
            }
        }
    }

    let uniform = cell_probabilities(&[[0.0; 7]; 3], &FeatureVector::new(2, [0.3, -1.0, 2.0, 0.0]));
    let pass = worst_sum <= 1e-12 && worst_grad < 1e-5 && uniform == [0.25; 4];
    outcome(
        pass,
        format!(
            "max |sum p - 1| = {worst_sum:.1e}; max gradient relative error = {worst_grad:.1e}; theta=0 gives {uniform:?}"
        ),
    )
}

// ---------------------------------------------------------------- 6

fn linear_fit(slope: f64) -> TrendFit {
    TrendFit {
        variable: "V1".into(),
        degree: 1,
        beta: vec![0.0, slope],
        gamma: [0.0, slope, 0.0, 0.0],
        sigma2: 0.1,
        sigma2_clamped: false,
        loglik: 0.0,
        aic: 0.0,
        fitted: vec![0.0; 10],
        band_lower: vec![0.0; 10],
        band_upper: vec![0.0; 10],
    }
}

fn criterion_6() -> Outcome {
    const SLOPES: [f64; 9] = [-1.0, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 1.0];
    let mut failures = Vec::new();
    for group in RoughGroup::ALL {
        // every category score far below the reference: the discriminator says 10
        let mut model = IconModel::zero(group);
        for row in model.theta.iter_mut() {
            row[0] = -50.0;
        }
        for slope in SLOPES {
            let expected = match group {
                RoughGroup::Upward if slope > 0.0 => 4,
                RoughGroup::Downward if slope < 0.0 => 7,
                RoughGroup::Flat if slope.abs() <= 0.1 => 1,
                _ => 10,
            };
            let got = assign_icon(group, &linear_fit(slope), &model).expect("assign");
            if got != expected {
                failures.push(format!("{group} slope {slope}: {got} != {expected}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "27 group/slope cases match".to_string()
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7(dir: &Path) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for group in RoughGroup::ALL {
        let cfg = SynthConfig {
            n_per_icon: 100,
            noise_sd: 0.15,
            seed: 7,
            ..SynthConfig::default()
        };
        let path = dir.join(format!("{group}.model"));
        let start = Instant::now();
        cmd_train_icons(group, &TrainingSource::Synthetic(cfg), &TrainConfig::default(), &path).expect("train");
        let secs = start.elapsed().as_secs_f64();
        let model = read_model(&path).expect("model file");
        let holdout = synth_training_set(group, &SynthConfig { seed: 20_240_607, ..cfg }).expect("holdout");
        let acc = accuracy(&model, &holdout);
        pass &= acc >= 0.90 && secs < 30.0;
        parts.push(format!("{group} {acc:.3} in {secs:.2}s"));
    }
    outcome(pass, format!("held-out accuracy {} (need >= 0.90, < 30s each)", parts.join(", ")))
}

// ---------------------------------------------------------------- 8, 9

fn bundled_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example.csv")
}

fn trec(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_trec"))
        .args(args)
        .env_remove("TREC_MODEL_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if out.status.success() {
        Ok(stdout)
    } else {
        Err(format!("trec {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

fn group_line<'a>(stdout: &'a str, group: &str) -> &'a str {
    stdout
        .lines()
        .find(|l| l.starts_with(&format!("{group}:")))
        .unwrap_or("")
}

fn contains_var(line: &str, var: &str) -> bool {
    line.split([':', ',', ' ']).any(|t| t == var)
}

const DECLARED: [&str; 9] = [
    "trec_state.json",
    "fig_rawdata_1.svg",
    "fig_stddata_1.svg",
    "fig_ctrend_1.svg",
    "fig_trend.svg",
    "fig_groups.svg",
    "fig_dendrogram.svg",
    "fig_icons.svg",
    "summary.csv",
];

/// Runs the whole workflow into `dir`; returns notes on what went wrong.
fn workflow(dir: &Path) -> Result<Vec<String>, String> {
    let d = dir.to_str().unwrap();
    let state = dir.join("trec_state.json");
    let s = state.to_str().unwrap();
    let mut problems = Vec::new();

    let out = trec(&["trec1", bundled_data().to_str().unwrap(), "--out", d])?;
    if !out.contains("The following variable(s) is/are removed:") {
        problems.push("trec1 removed-variable report missing".to_string());
    }
    let state_json = fs::read_to_string(&state).map_err(|e| e.to_string())?;
    if state_json.matches("\"degree\":").count() != 9 {
        problems.push("state does not hold 9 fits".to_string());
    }

    for (groups, clustering) in [("2", true), ("2", false), ("3", false), ("3", true)] {
        let mut args = vec!["trec2", "--state", s, "--groups", groups];
        if !clustering {
            args.push("--no-clustering");
        }
        let out = trec(&args)?;
        let up = contains_var(group_line(&out, "Upward"), "V2");
        let flat = contains_var(group_line(&out, "Flat"), "V2");
        let expect_up = groups == "2";
        if up != expect_up || flat == expect_up {
            problems.push(format!(
                "groups={groups} clustering={clustering}: V2 upward={up} flat={flat}"
            ));
        }
        if clustering != dir.join("fig_dendrogram.svg").exists() {
            problems.push(format!("dendrogram presence wrong for clustering={clustering}"));
        }
    }

    trec(&[
        "trec3",
        "--state",
        s,
        "--targets",
        "Downward=V1,V6,V9",
        "--targets",
        "Upward=V8",
        "--targets",
        "Flat=V2",
    ])?;
    let summary = SummaryTable::from_csv(&fs::read_to_string(dir.join("summary.csv")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let groups: Vec<RoughGroup> = summary.rows.iter().map(|r| r.group).collect();
    let expected_groups = [
        RoughGroup::Downward,
        RoughGroup::Downward,
        RoughGroup::Downward,
        RoughGroup::Upward,
        RoughGroup::Flat,
    ];
    if groups != expected_groups {
        problems.push(format!("summary groups {groups:?}"));
    }
    for f in DECLARED {
        if !dir.join(f).exists() {
            problems.push(format!("{f} missing"));
        }
    }
    Ok(problems)
}

fn criterion_8(dir: &Path) -> Outcome {
    timed(Duration::from_secs(10), || match workflow(dir) {
        Ok(p) if p.is_empty() => outcome(
            true,
            format!("{} files written; V2 Upward with 2 groups, Flat with 3", DECLARED.len()),
        ),
        Ok(p) => outcome(false, p.join("; ")),
        Err(e) => outcome(false, e),
    })
}

fn criterion_9(first: &Path, second: &Path) -> Outcome {
    if let Err(e) = workflow(second) {
        return outcome(false, e);
    }
    let mut names: Vec<String> = fs::read_dir(first)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| fs::read(first.join(n)).ok() != fs::read(second.join(n)).ok())
        .collect();
    outcome(
        differing.is_empty(),
        format!("{} files compared, {} differ {:?}", names.len(), differing.len(), differing),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let (models, run1, run2) = (tmp.path().join("models"), tmp.path().join("run1"), tmp.path().join("run2"));
    fs::create_dir_all(&models).unwrap();

    let results = [
        ("1 OLS matches exact normal equations", criterion_1()),
        ("2 AIC degree recovery at SNR 10", criterion_2()),
        ("3 discriminant fixture and swap antisymmetry", criterion_3()),
        ("4 clustering matches brute-force agglomeration", criterion_4()),
        ("5 multinomial logistic probabilities and gradient", criterion_5()),
        ("6 linear-trend override rules", criterion_6()),
        ("7 synthetic icon accuracy", criterion_7(&models)),
        ("8 end-to-end workflow", criterion_8(&run1)),
        ("9 byte-identical rerun", criterion_9(&run1, &run2)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
