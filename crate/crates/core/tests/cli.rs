use std::path::Path;
use std::process::{Command, Output};

use offlang::cli::manifest::{sha256_file, Manifest};
use offlang::corpus::{labeled_to_tsv, parse_labeled_tsv, reported_stats, write_labeled_tsv, Language, Split};
use offlang::synth::{corpus_with_stats, flip_labels, separable_corpus, toy_corpus};

fn offlang(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_offlang"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn assert_ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

// small encoder so CLI training stays quick
const SMALL_CONFIG: &str = r#"
[encoder]
hidden_size = 32
layers = 1
heads = 2
ff_size = 64
max_len = 32

[train]
learning_rate = 0.001
batch_size = 8
epochs = 3

[grid]
learning_rates = [0.001, 0.0005]
batch_sizes = [8, 16]
"#;

#[test]
fn stats_on_greek_training_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let stats = reported_stats(Language::El, Split::Train).unwrap();
    let input = dir.path().join("el_train.tsv");
    write_labeled_tsv(&corpus_with_stats(Language::El, Split::Train, stats, 3), &input).unwrap();
    let out = offlang(&["stats", "--language", "el", "--input", input.to_str().unwrap()], dir.path());
    assert_ok(&out);
    assert_eq!(stdout(&out).trim(), "{off=1989, not=5005, total=6994}");
    assert!(dir.path().join("stats.json").exists());
}

#[test]
fn augment_quadruples_rows_with_mock_provider() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("da.tsv");
    std::fs::write(
        &input,
        "id\ttext\tlabel\n1\tdu er dum\tOFF\n2\thej med dig\tNOT\n3\tgod dag\tNOT\n4\tklap i\tOFF\n5\ttak\tNOT\n",
    )
    .unwrap();
    let out = offlang(
        &["augment", "--language", "da", "--provider", "mock", "--pivots", "en,fr,de", "--input", input.to_str().unwrap()],
        dir.path(),
    );
    assert_ok(&out);
    let text = std::fs::read_to_string(dir.path().join("augmented.tsv")).unwrap();
    let corpus = parse_labeled_tsv(&text, Language::Da, Split::Train).unwrap();
    assert_eq!(corpus.len(), 20);
    let off = corpus.labels().iter().filter(|l| l.as_str() == "OFF").count();
    assert_eq!(off, 8);
}

#[test]
fn usage_and_config_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(offlang(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(offlang(&["stats", "--bogus-flag"], dir.path()).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    let out = offlang(&["--config", missing.to_str().unwrap(), "stats", "--bundled"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    let out = offlang(&["--config", bad.to_str().unwrap(), "stats", "--bundled"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = offlang(&["stats", "--input", dir.path().join("absent.tsv").to_str().unwrap()], dir.path());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn manifest_checksums_match_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let cfg = config.to_str().unwrap();
    assert_ok(&offlang(&["--config", cfg, "train", "--bundled", "--language", "da", "--seed", "1"], dir.path()));
    assert_ok(&offlang(&["--config", cfg, "evaluate", "--bundled", "--language", "da", "--seed", "1"], dir.path()));
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.subcommand, "evaluate");
    let names: Vec<&str> = manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
    for expected in ["checkpoint.json", "vocab.tsv", "loss.csv", "report.json", "report.tsv", "predictions.tsv"] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    for a in &manifest.artifacts {
        assert_eq!(sha256_file(&dir.path().join(&a.path)).unwrap(), a.sha256, "{}", a.path);
    }
    assert!(!manifest.inputs.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config_fingerprint"].as_str().unwrap(), manifest.config_fingerprint);
    let loss = std::fs::read_to_string(dir.path().join("loss.csv")).unwrap();
    assert_eq!(loss.lines().next(), Some("epoch,mean_loss"));
    assert_eq!(loss.lines().count(), 4);
}

#[test]
fn reported_baseline_table_lists_all_languages() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&offlang(&["evaluate", "--baseline", "reported"], dir.path()));
    let table = std::fs::read_to_string(dir.path().join("table2.tsv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "System\tTurkish\tArabic\tGreek\tDanish\tEnglish");
    assert!(lines[1].ends_with("0.4435\t0.4441\t0.4575\t0.4668\t0.4193"), "{}", lines[1]);
}

#[test]
fn gridsearch_and_english_ablation_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let cfg = config.to_str().unwrap();
    let clean = dir.path().join("clean.tsv");
    let weak = dir.path().join("weak.tsv");
    let test = dir.path().join("test.tsv");
    std::fs::write(&clean, labeled_to_tsv(&toy_corpus(1)).unwrap()).unwrap();
    std::fs::write(&weak, labeled_to_tsv(&flip_labels(&toy_corpus(101), 0.2, 1).unwrap()).unwrap()).unwrap();
    std::fs::write(&test, labeled_to_tsv(&separable_corpus(100, 1001, "t-")).unwrap()).unwrap();

    let out = offlang(
        &["--config", cfg, "gridsearch", "--language", "en", "--train", clean.to_str().unwrap(), "--validation", test.to_str().unwrap()],
        dir.path(),
    );
    assert_ok(&out);
    let grid: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid.json")).unwrap()).unwrap();
    assert_eq!(grid["cells"].as_array().map(|c| c.len()), Some(4), "{grid}");

    let out = offlang(
        &[
            "--config", cfg, "ablate", "--kind", "english", "--language", "en",
            "--train", clean.to_str().unwrap(),
            "--weak", weak.to_str().unwrap(),
            "--test", test.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_ok(&out);
    let table = std::fs::read_to_string(dir.path().join("table3.tsv")).unwrap();
    let rows: Vec<&str> = table.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(rows, ["System", "\u{2212}OLID", "\u{2212}Weak", "Dual"]);
}
