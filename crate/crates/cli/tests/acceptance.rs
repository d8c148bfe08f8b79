//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! ```text
//! cargo test -p stopwords-rmt --test acceptance
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stopwords_rmt_core::*;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Composite Simpson on [0, 60] after substituting x = t^4, which smooths
/// the x^q behaviour at the origin.
fn integrate(f: impl Fn(f64) -> f64) -> f64 {
    let g = |t: f64| 4.0 * t.powi(3) * f(t.powi(4));
    let (a, b, n) = (0.0, 60f64.powf(0.25), 4_000usize);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * g(a + i as f64 * h)
        })
        .sum();
    (g(a) + inner + g(b)) * h / 3.0
}

fn ac1_normalization() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for i in 0..=12 {
        let q = i as f64 / 10.0;
        let mass = integrate(|x| brody_pdf(x, q).unwrap());
        let mean = integrate(|x| x * brody_pdf(x, q).unwrap());
        worst = worst.max((mass - 1.0).abs()).max((mean - 1.0).abs());
    }
    let elapsed = start.elapsed();
    ensure(
        worst < 1e-6 && elapsed < Duration::from_secs(1),
        format!("max |integral - 1| = {worst:.2e} (tol 1e-6), {elapsed:.2?} (limit 1 s)"),
    )
}

fn ac2_limits() -> Outcome {
    let (mut p, mut w) = (0.0_f64, 0.0_f64);
    for i in 0..=50_000 {
        let x = 5.0 * i as f64 / 50_000.0;
        p = p.max((brody_pdf(x, 0.0).unwrap() - (-x).exp()).abs());
        let wigner = PI / 2.0 * x * (-PI * x * x / 4.0).exp();
        w = w.max((brody_pdf(x, 1.0).unwrap() - wigner).abs());
    }
    ensure(
        p < 1e-12 && w < 1e-12,
        format!("sup |P_0 - e^-x| = {p:.2e}, sup |P_1 - wigner| = {w:.2e} (tol 1e-12)"),
    )
}

fn ac3_recovery() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, q_true) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let mut rng = seeded(300 + k as u64);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| brody_inverse_cdf(open_unit(&mut rng), q_true).unwrap())
            .collect();
        let hist = make_histogram(&draws, 300, 5.0).unwrap();
        let fit = fit_brody(&hist, &FitOptions::default()).unwrap();
        ok &= (fit.q - q_true).abs() <= 0.05 && fit.mse < 5e-3;
        parts.push(format!("{q_true}->{:.3} (mse {:.1e})", fit.q, fit.mse));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    ensure(
        ok,
        format!("{}; {elapsed:.2?} (limit 10 s)", parts.join(", ")),
    )
}

fn brute_force_gaps(tokens: &[&str], word: &str) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..tokens.len() {
        if tokens[i] != word {
            continue;
        }
        if let Some(d) = tokens[i + 1..].iter().position(|t| *t == word) {
            out.push(d + 1);
        }
    }
    out
}

fn ac4_spacing_oracle() -> Outcome {
    const ALPHABET: [&str; 5] = ["a", "b", "c", "d", "e"];
    let mut rng = seeded(4);
    let mut mismatches = 0;
    let mut checked = 0;
    for doc_id in 0..1000 {
        let len = rng.random_range(0..=50);
        let mut sentences = vec![Vec::new()];
        for _ in 0..len {
            sentences
                .last_mut()
                .unwrap()
                .push(ALPHABET[rng.random_range(0..5)].to_string());
            if rng.random_bool(0.2) {
                sentences.push(Vec::new());
            }
        }
        let doc = Document::from_sentences(format!("d{doc_id}"), sentences.clone());
        let flat: Vec<&str> = sentences.iter().flatten().map(String::as_str).collect();
        for word in ALPHABET {
            checked += 2;
            if article_gaps(&doc, word, GapScope::Article) != brute_force_gaps(&flat, word) {
                mismatches += 1;
            }
            let per_sentence: Vec<usize> = sentences
                .iter()
                .flat_map(|s| {
                    let t: Vec<&str> = s.iter().map(String::as_str).collect();
                    brute_force_gaps(&t, word)
                })
                .collect();
            if article_gaps(&doc, word, GapScope::Sentence) != per_sentence {
                mismatches += 1;
            }
        }
    }
    ensure(
        mismatches == 0,
        format!("{mismatches} mismatches over {checked} (document, word, scope) checks"),
    )
}

fn ks_exponential(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x).exp();
            (cdf - i as f64 / n)
                .abs()
                .max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max)
}

fn ac5_unfolding() -> Outcome {
    let mut rng = seeded(5);
    let values: Vec<f64> = (0..100_000).map(|_| -open_unit(&mut rng).ln()).collect();
    let weights = vec![1.0; values.len()];
    let std = standardize_weighted("x", values, weights).unwrap();
    let u = unfold(&std, 7).unwrap();
    let ks = ks_exponential(&u.spacings);
    let mean = u.spacings.iter().sum::<f64>() / u.spacings.len() as f64;
    ensure(
        ks < 0.03 && (mean - 1.0).abs() < 1e-12,
        format!(
            "KS = {ks:.4} (tol 0.03), spacing mean - 1 = {:.1e}",
            mean - 1.0
        ),
    )
}

fn ac6_emd() -> Outcome {
    let mut rng = seeded(6);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(8..=600);
        let f1: f64 = rng.random_range(0.02..0.5);
        let f2: f64 = rng.random_range(0.002..0.05);
        let slope: f64 = rng.random_range(-0.05..0.05);
        let mut walk = 0.0;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64;
                walk += rng.random_range(-0.3..0.3);
                (f1 * t).sin() + 2.0 * (f2 * t).cos() + slope * t + walk
            })
            .collect();
        let r = emd_decompose(&x, &EmdConfig::default()).unwrap();
        let back = r.reconstruct();
        for (a, b) in back.iter().zip(&x) {
            worst = worst.max((a - b).abs());
        }
    }
    let ramp: Vec<f64> = (0..200).map(|i| 0.5 * i as f64 - 3.0).collect();
    let ramp_imfs = emd_decompose(&ramp, &EmdConfig::default())
        .unwrap()
        .imfs
        .len();
    ensure(
        worst < 1e-8 && ramp_imfs == 0,
        format!("max reconstruction error {worst:.1e} (tol 1e-8), ramp IMFs = {ramp_imfs}"),
    )
}

fn mini_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/mini_corpus.jsonl")
}

fn run_cli(out: &Path, extra: &[&str]) -> Result<Duration, String> {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_stopwords-rmt"))
        .arg("pipeline")
        .arg("--input")
        .arg(mini_corpus())
        .arg("--output")
        .arg(out)
        .args(["--min-articles", "50"])
        .args(extra)
        .env("RUST_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !output.status.success() {
        return Err(String::from_utf8_lossy(&output.stderr).into_owned());
    }
    Ok(elapsed)
}

struct Row {
    word: String,
    beta: Option<f64>,
    mse: Option<f64>,
    flagged: bool,
}

fn read_stopwords(path: &Path) -> Vec<Row> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let num = |i: usize| (!r[i].is_empty()).then(|| r[i].parse::<f64>().unwrap());
            Row {
                word: r[0].to_owned(),
                beta: num(4),
                mse: num(5),
                flagged: &r[6] == "true",
            }
        })
        .collect()
}

fn ac7_percentile(dir: &Path) -> Outcome {
    let out = dir.join("ac7");
    let elapsed = run_cli(&out, &["--threads", "1"])?;
    let rows = read_stopwords(&out.join("stopwords.csv"));
    let mut mses: Vec<f64> = rows.iter().filter_map(|r| r.mse).collect();
    mses.sort_by(f64::total_cmp);
    let n = mses.len();
    if n < 2 {
        return Err(format!("only {n} fitted words"));
    }
    let h = (n - 1) as f64 * 0.10;
    let (lo, frac) = (h.floor() as usize, h - h.floor());
    let threshold = mses[lo] + frac * (mses[(lo + 1).min(n - 1)] - mses[lo]);
    let expected = mses.iter().filter(|&&m| m < threshold).count();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let distinct = mses.windows(2).all(|w| w[0] < w[1]);
    let ceil_rule = ((n - 1) as f64 * 0.10).ceil() as usize;
    let ok = flagged == expected
        && (!distinct || flagged == ceil_rule)
        && rows
            .iter()
            .all(|r| r.flagged == r.mse.is_some_and(|m| m < threshold))
        && elapsed < Duration::from_secs(60);
    ensure(
        ok,
        format!(
            "{flagged} of {n} fitted words flagged, expected {expected} (ceil rule {ceil_rule}); {elapsed:.2?} (limit 60 s)"
        ),
    )
}

fn ac8_determinism(dir: &Path) -> Outcome {
    let a = dir.join("ac8_t1");
    let b = dir.join("ac8_t8");
    run_cli(&a, &["--threads", "1"])?;
    run_cli(&b, &["--threads", "8"])?;
    let mut same = Vec::new();
    for name in ["stopwords.csv", "stopwords.txt", "fits.csv", "series.csv"] {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| e.to_string())?;
        same.push((name, x == y));
    }
    ensure(
        same.iter().all(|(_, s)| *s),
        same.iter()
            .map(|(n, s)| format!("{n}: {}", if *s { "identical" } else { "DIFFERS" }))
            .collect::<Vec<_>>()
            .join(", "),
    )
}

fn ac9_dumps(dir: &Path) -> Outcome {
    let out = dir.join("ac9");
    run_cli(&out, &["--threads", "2", "--dump-histograms", "flagged"])?;
    let rows = read_stopwords(&out.join("stopwords.csv"));
    let mut worst = 0.0_f64;
    let mut files = 0;
    for row in rows.iter().filter(|r| r.flagged) {
        let q = row.beta.ok_or("flagged word without beta")?;
        let path = out.join(format!("hist_{}.csv", row.word));
        let mut reader =
            csv::Reader::from_path(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        for rec in reader.records() {
            let rec = rec.unwrap();
            let v: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
            let x = v[0];
            worst = worst
                .max((v[2] - brody_pdf(x, q).unwrap()).abs())
                .max((v[3] - (-x).exp()).abs())
                .max((v[4] - PI / 2.0 * x * (-PI * x * x / 4.0).exp()).abs());
        }
        files += 1;
    }
    ensure(
        files > 0 && worst < 1e-12,
        format!("{files} histogram dumps, max column deviation {worst:.1e} (tol 1e-12)"),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let dir = tmp.path();
    let criteria: Vec<(&str, &str, Check)> = vec![
        (
            "AC1",
            "Brody normalization and unit mean",
            Box::new(ac1_normalization),
        ),
        ("AC2", "Poisson and Wigner limits", Box::new(ac2_limits)),
        ("AC3", "parameter recovery", Box::new(ac3_recovery)),
        ("AC4", "spacing oracle", Box::new(ac4_spacing_oracle)),
        ("AC5", "unfolding sanity", Box::new(ac5_unfolding)),
        ("AC6", "EMD identity", Box::new(ac6_emd)),
        (
            "AC7",
            "percentile construction on the mini corpus",
            Box::new(|| ac7_percentile(dir)),
        ),
        (
            "AC8",
            "thread-count determinism",
            Box::new(|| ac8_determinism(dir)),
        ),
        (
            "AC9",
            "histogram dump fidelity",
            Box::new(|| ac9_dumps(dir)),
        ),
    ];
    let mut failed = 0;
    for (id, name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
