use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mini_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/mini_corpus.jsonl")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stopwords-rmt"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn ok(out: Output) -> Output {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn pipeline(out: &Path, extra: &[&str]) {
    let corpus = mini_corpus();
    let mut args = vec![
        "pipeline",
        "--input",
        s(&corpus),
        "--output",
        s(out),
        "--min-articles",
        "50",
    ];
    args.extend_from_slice(extra);
    ok(cli(&args));
}

#[test]
fn separate_stages_reproduce_the_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let whole = tmp.path().join("whole");
    let staged = tmp.path().join("staged");
    pipeline(&whole, &["--dump-histograms", "flagged", "--threads", "3"]);

    let corpus = mini_corpus();
    let common = [
        "--output",
        s(&staged),
        "--min-articles",
        "50",
        "--threads",
        "2",
    ];
    ok(cli(
        &[&["ingest", "--input", s(&corpus)][..], &common].concat()
    ));
    ok(cli(&[&["fit"][..], &common].concat()));
    ok(cli(&[
        &["select", "--dump-histograms", "flagged"][..],
        &common,
    ]
    .concat()));

    let mut names: Vec<String> = fs::read_dir(&whole)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") || n.ends_with(".txt"))
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n.starts_with("hist_")));
    for name in &names {
        assert_eq!(
            fs::read(whole.join(name)).unwrap(),
            fs::read(staged.join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn fit_accepts_a_hand_written_series_table() {
    let tmp = tempfile::tempdir().unwrap();
    let docs = tmp.path().join("docs");
    fs::create_dir(&docs).unwrap();
    // "x" gaps per document: 1 and 3, 2, 4 and 4, 1, 5, 2 and 2
    let texts = [
        "x x y z x",
        "x y x",
        "x y y y x y y y x",
        "x x",
        "x y y y y x",
        "x y x y x",
    ];
    for (i, t) in texts.iter().enumerate() {
        fs::write(docs.join(format!("d{i}.txt")), t).unwrap();
    }
    let from_corpus = tmp.path().join("from_corpus");
    let flags = [
        "--top-n",
        "1",
        "--min-articles",
        "2",
        "--poly-degree",
        "3",
        "--no-emd",
        "--bins",
        "10",
    ];
    ok(cli(&[
        &["ingest", "--input", s(&docs), "--output", s(&from_corpus)][..],
        &flags,
    ]
    .concat()));
    ok(cli(
        &[&["fit", "--output", s(&from_corpus)][..], &flags].concat()
    ));

    let expected = "word,article_id,avg_distance,article_length\n\
                    x,d0,2,5\nx,d1,2,3\nx,d2,4,9\nx,d3,1,2\nx,d4,5,6\nx,d5,2,5\n";
    assert_eq!(
        fs::read_to_string(from_corpus.join("series.csv")).unwrap(),
        expected
    );

    let hand = tmp.path().join("hand");
    fs::create_dir(&hand).unwrap();
    let series = hand.join("series.csv");
    fs::write(&series, expected).unwrap();
    ok(cli(&[
        &["fit", "--series", s(&series), "--output", s(&hand)][..],
        &flags,
    ]
    .concat()));
    let fits = fs::read_to_string(hand.join("fits.csv")).unwrap();
    assert_eq!(
        fits,
        fs::read_to_string(from_corpus.join("fits.csv")).unwrap()
    );
    assert!(fits.lines().nth(1).unwrap().ends_with(",ok"), "{fits}");
}

#[test]
fn a_higher_percentile_flags_more_words() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    pipeline(&out, &["--threads", "2"]);
    let stdout = ok(cli(&["select", "--output", s(&out), "--percentile", "50"])).stdout;
    assert!(String::from_utf8_lossy(&stdout).contains("select:"));

    let report = read_json(&out.join("report.json"));
    let fitted = report["fitted"].as_u64().unwrap();
    let flagged = report["flagged"].as_u64().unwrap();
    assert_eq!(report["percentile"], 50.0);
    // linear interpolation at p=50 with distinct errors flags ceil((n-1)/2)
    assert_eq!(flagged, (fitted - 1).div_ceil(2));
    let listed = fs::read_to_string(out.join("stopwords.txt"))
        .unwrap()
        .lines()
        .count() as u64;
    assert_eq!(listed, flagged);
}

#[test]
fn corrupted_header_names_the_line_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    pipeline(&out, &[]);
    let fits = out.join("fits.csv");
    let text = fs::read_to_string(&fits)
        .unwrap()
        .replacen(",mse,", ",mse_typo,", 1);
    fs::write(&fits, text).unwrap();

    let res = cli(&["select", "--output", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("select stage failed"), "{err}");
    assert!(
        err.contains("fits.csv:1:") && err.contains("`mse`"),
        "{err}"
    );
}

#[test]
fn truncated_row_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let series = tmp.path().join("series.csv");
    fs::write(
        &series,
        "word,article_id,avg_distance,article_length\nx,d0,2,5\nx,d1,2\n",
    )
    .unwrap();
    let res = cli(&["fit", "--series", s(&series), "--output", s(tmp.path())]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("series.csv:3:"), "{err}");
}

#[test]
fn missing_input_is_a_usage_error_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("no_such_corpus.jsonl");
    let res = cli(&[
        "pipeline",
        "--input",
        s(&missing),
        "--output",
        s(tmp.path()),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains(s(&missing)));
}

#[test]
fn bad_config_values_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    fs::write(&conf, "percentile = 10\nbogus_key = 3\n").unwrap();
    let res = cli(&["pipeline", "--config", s(&conf)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("bogus_key"));

    let res = cli(&[
        "pipeline",
        "--input",
        s(&mini_corpus()),
        "--poly-degree",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(cli(&["pipeline", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let conf = tmp.path().join("run.conf");
    fs::write(
        &conf,
        format!(
            "# mini run\ninput_path = {}\noutput_dir = {}\nmin_articles = 50\npercentile = 50\nthreads = 2\n",
            mini_corpus().display(),
            out.display()
        ),
    )
    .unwrap();
    ok(cli(&[
        "pipeline",
        "--config",
        s(&conf),
        "--percentile",
        "20",
    ]));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["percentile"], 20.0);
    assert_eq!(report["config"]["percentile"], "20");
    assert_eq!(report["config"]["min_articles"], "50");
}

#[test]
fn disabling_emd_shows_in_the_report_and_stays_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<PathBuf> = ["emd_a", "emd_b", "plain_a", "plain_b"]
        .iter()
        .map(|n| tmp.path().join(n))
        .collect();
    pipeline(&runs[0], &["--threads", "1"]);
    pipeline(&runs[1], &["--threads", "4"]);
    pipeline(&runs[2], &["--threads", "1", "--no-emd"]);
    pipeline(&runs[3], &["--threads", "4", "--no-emd"]);

    let emd = read_json(&runs[0].join("report.json"));
    let plain = read_json(&runs[2].join("report.json"));
    assert_eq!(emd["fit"]["settings"]["emd_enabled"], true);
    assert_eq!(plain["fit"]["settings"]["emd_enabled"], false);
    assert_eq!(plain["config"]["emd_enabled"], "false");
    for pair in runs.chunks(2) {
        assert_eq!(
            fs::read(pair[0].join("stopwords.csv")).unwrap(),
            fs::read(pair[1].join("stopwords.csv")).unwrap()
        );
    }
}

#[test]
fn unfolded_dumps_are_written_for_listed_words() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    pipeline(
        &out,
        &["--dump-unfolded", "the,of", "--dump-histograms", "the"],
    );
    let dump = fs::read_to_string(out.join("unfolded_the.csv")).unwrap();
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("index,value,spacing"));
    let rows: Vec<&str> = lines.collect();
    let spacings: Vec<f64> = rows
        .iter()
        .filter_map(|l| l.split(',').nth(2).filter(|s| !s.is_empty()))
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(spacings.len(), rows.len() - 1);
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    assert!((mean - 1.0).abs() < 1e-9);
    assert!(out.join("unfolded_of.csv").exists());
    assert!(out.join("hist_the.csv").exists());
    assert!(!out.join("hist_of.csv").exists());
}
