use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lyricstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyricstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn jsonl_song(id: &str, year: i32, cohort: &str, lyrics: &str) -> String {
    serde_json::json!({
        "id": id, "title": "t", "artist": "a", "year": year, "cohort": cohort,
        "duration_seconds": 200.0, "lyrics": lyrics,
    })
    .to_string()
}

/// Ingests `lines` as JSONL and returns (temp dir, output dir).
fn ingest_lines(lines: &[String]) -> (TempDir, PathBuf, Output) {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("songs.jsonl");
    fs::write(&input, lines.join("\n")).unwrap();
    let out = dir.path().join("build");
    let result = lyricstat(&["ingest", "--input", path(&input), "--out", path(&out)]);
    (dir, out, result)
}

fn small_corpus() -> Vec<String> {
    vec![
        jsonl_song("a", 1965, "popular", "Rock and roll\nI love the blues\nRock and roll"),
        jsonl_song("b", 1965, "other", "Damn the rain\n[Chorus]\nlove love love"),
        jsonl_song("c", 1975, "popular", "blues blues rock\nbaby baby"),
    ]
}

#[test]
fn ingest_writes_cache_rejects_and_digest() {
    let (_dir, out, result) = ingest_lines(&small_corpus());
    assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
    for f in ["corpus.cache", "rejects.jsonl", "ingest.config.json", "ingest.config.sha256"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let digest = fs::read_to_string(out.join("ingest.config.sha256")).unwrap();
    assert_eq!(digest.trim().len(), 64);
    assert_eq!(fs::read_to_string(out.join("rejects.jsonl")).unwrap(), "");
}

#[test]
fn unreadable_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let result = lyricstat(&[
        "ingest",
        "--input",
        path(&dir.path().join("missing.jsonl")),
        "--out",
        path(&dir.path().join("out")),
    ]);
    assert_eq!(code(&result), 1);
    assert!(String::from_utf8_lossy(&result.stderr).contains("missing.jsonl"));
}

#[test]
fn mostly_malformed_input_exits_two_with_partial_cache() {
    let mut lines = small_corpus()[..2].to_vec();
    lines.extend(["{not json".to_owned(), "{}".to_owned(), r#"{"id":"x"}"#.to_owned()]);
    let (_dir, out, result) = ingest_lines(&lines);
    assert_eq!(code(&result), 2);
    let cache = fs::read_to_string(out.join("corpus.cache")).unwrap();
    assert_eq!(cache.lines().count(), 3, "header plus two songs");
    assert_eq!(fs::read_to_string(out.join("rejects.jsonl")).unwrap().lines().count(), 3);
}

#[test]
fn style_tables_are_deterministic_and_follow_flags() {
    let (dir, out, _) = ingest_lines(&small_corpus());
    let cache = out.join("corpus.cache");
    let run = |name: &str, extra: &[&str]| {
        let target = dir.path().join(name);
        let mut args = vec!["style", "--cache", path(&cache), "--out", path(&target)];
        args.extend_from_slice(extra);
        let result = lyricstat(&args);
        assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
        target
    };
    let first = run("s1", &[]);
    let second = run("s2", &[]);
    for f in ["per_song.csv", "aggregate.csv", "top_words.csv", "rank_series.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
    let ranks = fs::read_to_string(first.join("rank_series.csv")).unwrap();
    assert_eq!(ranks, "word,year,rank\nrock,1965,2\nrock,1975,3\nblues,1965,4\nblues,1975,2\n");

    let custom = run("s3", &["--words", "Love", "--cohort", "all", "--top-k", "1", "--year", "1965"]);
    let ranks = fs::read_to_string(custom.join("rank_series.csv")).unwrap();
    assert_eq!(ranks, "word,year,rank\nlove,1965,1\n");
    let top = fs::read_to_string(custom.join("top_words.csv")).unwrap();
    assert_eq!(top, "year,cohort,rank,word,count\n1965,all,1,love,4\n");
}

#[test]
fn top_k_hundred_gives_hundred_rows() {
    let lyrics: Vec<String> = (0..30)
        .map(|line| (0..10).map(|w| format!("word{}x", line * 10 + w)).collect::<Vec<_>>().join(" "))
        .collect();
    let songs = vec![
        jsonl_song("big", 1965, "popular", &lyrics.join("\n")),
        jsonl_song("other", 1965, "other", "elsewhere"),
    ];
    let (dir, out, _) = ingest_lines(&songs);
    let target = dir.path().join("style");
    let result = lyricstat(&[
        "style",
        "--cache",
        path(&out.join("corpus.cache")),
        "--out",
        path(&target),
        "--top-k",
        "100",
        "--year",
        "1965",
        "--cohort",
        "popular",
    ]);
    assert_eq!(code(&result), 0);
    let top = fs::read_to_string(target.join("top_words.csv")).unwrap();
    assert_eq!(top.lines().count(), 101);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let (dir, out, _) = ingest_lines(&small_corpus());
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"style": {"top_k": 1, "cohort": "all", "words": ["baby"]}}"#).unwrap();
    let target = dir.path().join("style");
    let result = lyricstat(&[
        "style",
        "--cache",
        path(&out.join("corpus.cache")),
        "--out",
        path(&target),
        "--config",
        path(&config),
        "--top-k",
        "2",
    ]);
    assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
    let echo = fs::read_to_string(target.join("style.config.json")).unwrap();
    assert!(echo.contains("\"top_k\": 2") && echo.contains("\"baby\""));
    let top = fs::read_to_string(target.join("top_words.csv")).unwrap();
    assert_eq!(top.lines().count(), 1 + 2 * 2);

    fs::write(&config, r#"{"style": {"top_kk": 1}}"#).unwrap();
    let result = lyricstat(&["style", "--cache", path(&out.join("corpus.cache")), "--out", path(&target), "--config", path(&config)]);
    assert_eq!(code(&result), 1);
}

#[test]
fn style_without_cache_exits_one() {
    let dir = TempDir::new().unwrap();
    let result = lyricstat(&["style", "--cache", path(&dir.path().join("nope")), "--out", path(dir.path())]);
    assert_eq!(code(&result), 1);
}

#[test]
fn deterministic_training_is_byte_identical() {
    let songs: Vec<String> = (0..40)
        .map(|i| jsonl_song(&format!("s{i}"), 2000, "other", "sun moon star sky\nsun moon star sky rain"))
        .collect();
    let (dir, out, _) = ingest_lines(&songs);
    let cache = out.join("corpus.cache");
    let train = |name: &str| {
        let target = dir.path().join(name);
        let result = lyricstat(&[
            "train", "--cache", path(&cache), "--out", path(&target), "--dim", "8", "--epochs", "2", "--seed", "7",
            "--deterministic",
        ]);
        assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
        fs::read(target.join("vectors.txt")).unwrap()
    };
    let first = train("t1");
    assert_eq!(first, train("t2"));
    assert!(String::from_utf8_lossy(&first).starts_with("5 8\n"));

    let no_seed = lyricstat(&["train", "--cache", path(&cache), "--out", path(&dir.path().join("t3"))]);
    assert_eq!(code(&no_seed), 1);
    assert!(String::from_utf8_lossy(&no_seed.stderr).contains("--seed"));
}

fn weat_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let vectors = dir.join("v.txt");
    fs::write(
        &vectors,
        "rose 1 0.1 0\ntulip 0.9 0.2 0\nlily 0.95 0 0.1\nant 0 1 0.1\nflea 0.1 0.9 0\ngnat 0 0.95 0.2\n\
         joy 1 0.05 0\nlove 0.9 0 0.05\nagony 0.05 1 0\nfilth 0 0.9 0.1\n",
    )
    .unwrap();
    let tests = dir.join("tests.json");
    fs::write(
        &tests,
        r#"[
          {"name": "small", "targets_x": ["rose", "tulip", "lily"], "targets_y": ["ant", "flea", "gnat"],
           "attributes_a": ["joy", "love"], "attributes_b": ["agony", "filth"]},
          {"name": "missing", "targets_x": ["orchid", "rose"], "targets_y": ["wasp", "ant"],
           "attributes_a": ["joy", "love"], "attributes_b": ["agony", "filth"]}
        ]"#,
    )
    .unwrap();
    (vectors, tests)
}

#[test]
fn weat_exact_run_reports_per_test_errors() {
    let dir = TempDir::new().unwrap();
    let (vectors, tests) = weat_fixture(dir.path());
    let out = dir.path().join("weat");
    let result = lyricstat(&["weat", "--vectors", path(&vectors), "--tests", path(&tests), "--out", path(&out), "--exact"]);
    assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
    let csv = fs::read_to_string(out.join("weat_results.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    let small: Vec<_> = lines[1].split(',').collect();
    assert_eq!(small[0], "small");
    assert!(small[1].parse::<f64>().unwrap() > 1.5);
    assert_eq!(small[3], "0");
    assert_eq!(small[4], "exact");
    assert_eq!(&small[5..9], ["3/3", "3/3", "2/2", "2/2"]);
    assert!(lines[2].starts_with("missing,,,,,1/2,1/2,2/2,2/2,orchid;wasp,"));
    assert!(String::from_utf8_lossy(&result.stdout).contains("small"));
    assert!(out.join("weat_summary.txt").exists());
    assert!(out.join("weat.config.sha256").exists());
}

#[test]
fn weat_monte_carlo_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let (vectors, tests) = weat_fixture(dir.path());
    let out = dir.path().join("weat");
    let base = ["weat", "--vectors", path(&vectors), "--tests", path(&tests), "--out", path(&out)];
    assert_eq!(code(&lyricstat(&base)), 1);
    let mut seeded = base.to_vec();
    seeded.extend(["--samples", "5000", "--seed", "3"]);
    assert_eq!(code(&lyricstat(&seeded)), 0);
    let csv = fs::read_to_string(out.join("weat_results.csv")).unwrap();
    assert!(csv.contains("monte_carlo(n=5000;seed=3)"));
}

#[test]
fn version_and_usage() {
    let v = lyricstat(&["version"]);
    assert_eq!(code(&v), 0);
    assert!(String::from_utf8_lossy(&v.stdout).starts_with("lyricstat "));
    assert_eq!(code(&lyricstat(&["ingest"])), 1);
    assert_eq!(code(&lyricstat(&["--help"])), 0);
}
