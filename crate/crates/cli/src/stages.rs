//! The three resumable stages and their composition.
//!
//! ```text
//! ingest: corpus        -> vocabulary.csv, series.csv, ingest.json
//! fit:    series.csv    -> fits.csv, fit.json
//! select: fits.csv      -> stopwords.csv, stopwords.txt, report.json, dumps
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stopwords_rmt_core::{
    analyze_series, plot_rows, select_stopwords, AnalysisParams, BrodyFit, EmdConfig,
    Error as CoreError, FitOptions, SeriesAccumulator, SpacingSample, SpacingSeries,
    VocabularyCounter, WordStats,
};

use crate::config::{PipelineConfig, WordSelection};
use crate::corpus_io::CorpusSource;
use crate::error::{CliError, InStage, StageError};
use crate::tables::{self, FitRecord, FitSummary, SeriesTable};

pub const SERIES_FILE: &str = "series.csv";
pub const VOCABULARY_FILE: &str = "vocabulary.csv";
pub const INGEST_META_FILE: &str = "ingest.json";
pub const FITS_FILE: &str = "fits.csv";
pub const FIT_META_FILE: &str = "fit.json";
pub const STOPWORDS_CSV: &str = "stopwords.csv";
pub const STOPWORDS_TXT: &str = "stopwords.txt";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub documents: usize,
    pub tokens: u64,
    pub vocabulary_size: usize,
    pub words_with_samples: usize,
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ingest: {} documents, {} tokens, {} vocabulary words, {} with spacing samples",
            self.documents, self.tokens, self.vocabulary_size, self.words_with_samples
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitStageSummary {
    pub words: usize,
    pub fitted: usize,
    pub skipped: usize,
}

impl fmt::Display for FitStageSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fit: {} words processed, {} fitted, {} skipped",
            self.words, self.fitted, self.skipped
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectSummary {
    pub words: usize,
    pub fitted: usize,
    pub flagged: usize,
    pub threshold: f64,
    pub percentile: f64,
}

impl fmt::Display for SelectSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "select: {} words, {} fitted, {} flagged (mse < {} at the {}th percentile)",
            self.words, self.fitted, self.flagged, self.threshold, self.percentile
        )
    }
}

/// Analysis settings recorded by `fit` so later stages reproduce its numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub min_articles: usize,
    pub poly_degree: usize,
    pub emd_enabled: bool,
    pub n_bins: usize,
    pub max_spacing: f64,
    pub min_fit_samples: usize,
}

impl FitSettings {
    fn from_config(cfg: &PipelineConfig) -> Self {
        Self {
            min_articles: cfg.min_articles,
            poly_degree: cfg.poly_degree,
            emd_enabled: cfg.emd_enabled,
            n_bins: cfg.n_bins,
            max_spacing: cfg.max_spacing,
            min_fit_samples: cfg.effective_min_fit_samples(),
        }
    }

    fn params(&self) -> AnalysisParams<f64> {
        AnalysisParams {
            min_articles: self.min_articles,
            poly_degree: self.poly_degree,
            emd: self.emd_enabled.then(EmdConfig::default),
            n_bins: self.n_bins,
            max_spacing: self.max_spacing,
            fit: FitOptions {
                min_retained: Some(self.min_fit_samples),
                ..FitOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FitMeta {
    summary: FitStageSummary,
    settings: FitSettings,
}

fn create_dir(dir: &Path) -> Result<(), StageError> {
    fs::create_dir_all(dir).map_err(|e| StageError::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), StageError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| StageError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, StageError> {
    let text = fs::read_to_string(path).map_err(|e| StageError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| StageError::Parse {
        path: path.to_owned(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().unwrap_or(Path::new(".")).join(name)
}

/// Tokenizes the corpus, ranks its vocabulary and writes every word's
/// spacing series.
pub fn ingest(cfg: &PipelineConfig) -> Result<IngestSummary, CliError> {
    const STAGE: &str = "ingest";
    let (input, format) = cfg.resolved_input()?;
    let source = CorpusSource::new(&input, format);
    let tokenizer = cfg.tokenizer();
    create_dir(&cfg.output_dir).in_stage(STAGE)?;

    let mut counter = VocabularyCounter::new();
    source
        .for_each_document(&tokenizer, |doc| counter.add_document(&doc))
        .in_stage(STAGE)?;
    let (documents, tokens) = (counter.documents(), counter.tokens());
    let vocab = counter.finish(cfg.top_n).in_stage(STAGE)?;
    info!(
        "vocabulary of {} words from {documents} documents",
        vocab.len()
    );

    let mut acc = SeriesAccumulator::<f64>::new(&vocab, cfg.gap_scope);
    source
        .for_each_document(&tokenizer, |doc| acc.add_document(&doc))
        .in_stage(STAGE)?;
    let series = acc.finish();

    let out = &cfg.output_dir;
    tables::write_vocabulary(&out.join(VOCABULARY_FILE), vocab.entries()).in_stage(STAGE)?;
    tables::write_series(
        &out.join(SERIES_FILE),
        series
            .iter()
            .map(|s| (s.word.as_str(), s.samples.as_slice())),
    )
    .in_stage(STAGE)?;

    let summary = IngestSummary {
        documents,
        tokens,
        vocabulary_size: vocab.len(),
        words_with_samples: series.iter().filter(|s| !s.samples.is_empty()).count(),
    };
    let meta = json!({
        "summary": summary,
        "settings": {
            "input_path": input.display().to_string(),
            "input_format": format.to_string(),
            "top_n": cfg.top_n,
            "gap_scope": cfg.gap_scope.to_string(),
            "keep_digits": cfg.keep_digits,
        },
    });
    write_json(&out.join(INGEST_META_FILE), &meta).in_stage(STAGE)?;
    Ok(summary)
}

/// Series in rank order. A sibling `vocabulary.csv` supplies ranks and
/// words without samples; otherwise ranks follow first appearance.
fn ranked_series(series_path: &Path) -> Result<SeriesTable, StageError> {
    let mut series = tables::read_series(series_path)?;
    let vocab_path = sibling(series_path, VOCABULARY_FILE);
    if !vocab_path.exists() {
        return Ok(series);
    }
    let vocab = tables::read_vocabulary(&vocab_path)?;
    let mut by_word: BTreeMap<String, Vec<SpacingSample<f64>>> = series.drain(..).collect();
    let mut ordered: SeriesTable = vocab
        .into_iter()
        .map(|(w, _)| {
            let samples = by_word.remove(&w).unwrap_or_default();
            (w, samples)
        })
        .collect();
    if !by_word.is_empty() {
        warn!(
            "{} series words missing from {}",
            by_word.len(),
            vocab_path.display()
        );
        ordered.extend(by_word);
    }
    Ok(ordered)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, StageError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| StageError::io("thread pool", std::io::Error::other(e)))
}

/// Runs the per-word analysis for every series and writes `fits.csv`.
pub fn fit(cfg: &PipelineConfig, series_path: &Path) -> Result<FitStageSummary, CliError> {
    const STAGE: &str = "fit";
    let series = ranked_series(series_path).in_stage(STAGE)?;
    create_dir(&cfg.output_dir).in_stage(STAGE)?;
    let settings = FitSettings::from_config(cfg);
    let params = settings.params();

    let pool = thread_pool(cfg.threads).in_stage(STAGE)?;
    let records: Vec<FitRecord> = pool.install(|| {
        series
            .par_iter()
            .enumerate()
            .map(|(i, (word, samples))| analyze_record(i + 1, word, samples, &params))
            .collect()
    });

    tables::write_fits(&cfg.output_dir.join(FITS_FILE), &records).in_stage(STAGE)?;
    let fitted = records.iter().filter(|r| r.outcome.is_ok()).count();
    let summary = FitStageSummary {
        words: records.len(),
        fitted,
        skipped: records.len() - fitted,
    };
    let meta = FitMeta {
        summary: summary.clone(),
        settings,
    };
    write_json(&cfg.output_dir.join(FIT_META_FILE), &meta).in_stage(STAGE)?;
    Ok(summary)
}

fn analyze_record(
    rank: usize,
    word: &str,
    samples: &[SpacingSample<f64>],
    params: &AnalysisParams<f64>,
) -> FitRecord {
    let n_articles = samples.len();
    let series = SpacingSeries {
        word: word.to_owned(),
        samples: samples.to_vec(),
    };
    let (n_spacings, outcome) = match analyze_series(&series, params) {
        Ok(a) => (
            a.unfolded.spacings.len(),
            Ok(FitSummary {
                retained: a.histogram.retained_samples,
                beta: a.fit.q,
                beta_clamped: a.fit.q_clamped,
                b: a.fit.b,
                mse: a.fit.mse,
            }),
        ),
        Err(e) => {
            if n_articles == 0 {
                (0, Err("no samples".to_owned()))
            } else {
                if matches!(e, CoreError::InsufficientSamples { .. }) {
                    debug!("skipping {word:?}: {e}");
                } else {
                    warn!("skipping {word:?}: {e}");
                }
                (n_articles - 1, Err(e.to_string()))
            }
        }
    };
    FitRecord {
        word: word.to_owned(),
        rank,
        n_articles,
        n_spacings,
        outcome,
    }
}

/// Thresholds the fits into the stop-word list and writes the report and
/// any requested per-word dumps.
///
/// Dumps recompute the analysis from `series_path` with the settings stored
/// in the sibling `fit.json` (falling back to `cfg`).
pub fn select(
    cfg: &PipelineConfig,
    fits_path: &Path,
    series_path: Option<&Path>,
) -> Result<SelectSummary, CliError> {
    const STAGE: &str = "select";
    let records = tables::read_fits(fits_path).in_stage(STAGE)?;
    create_dir(&cfg.output_dir).in_stage(STAGE)?;

    let fit_meta_path = sibling(fits_path, FIT_META_FILE);
    let fit_meta: Option<FitMeta> = if fit_meta_path.exists() {
        Some(read_json(&fit_meta_path).in_stage(STAGE)?)
    } else {
        None
    };
    let settings = fit_meta
        .as_ref()
        .map_or_else(|| FitSettings::from_config(cfg), |m| m.settings.clone());

    let mut fits = BTreeMap::new();
    let mut stats = BTreeMap::new();
    for r in &records {
        stats.insert(
            r.word.clone(),
            WordStats {
                rank: r.rank,
                n_articles: r.n_articles,
                n_spacings: r.n_spacings,
            },
        );
        if let Ok(f) = &r.outcome {
            fits.insert(
                r.word.clone(),
                BrodyFit {
                    q: f.beta,
                    q_clamped: f.beta_clamped,
                    b: f.b,
                    mse: f.mse,
                    n_bins: settings.n_bins,
                    max_x: settings.max_spacing,
                },
            );
        }
    }
    let report =
        select_stopwords(&fits, &stats, cfg.percentile, cfg.percentile_method).in_stage(STAGE)?;

    let out = &cfg.output_dir;
    tables::write_stopwords_csv(&out.join(STOPWORDS_CSV), &report).in_stage(STAGE)?;
    tables::write_stopwords_txt(&out.join(STOPWORDS_TXT), &report).in_stage(STAGE)?;

    let flagged: Vec<&str> = report.stopwords().collect();
    let dump_hist = selected_words(&cfg.dump_histograms, &flagged);
    let dump_unfolded = selected_words(&cfg.dump_unfolded, &flagged);
    if !dump_hist.is_empty() || !dump_unfolded.is_empty() {
        let series_path = series_path
            .map(Path::to_path_buf)
            .unwrap_or_else(|| sibling(fits_path, SERIES_FILE));
        write_dumps(
            cfg,
            &series_path,
            &settings,
            &fits,
            &dump_hist,
            &dump_unfolded,
        )
        .in_stage(STAGE)?;
    }

    let summary = SelectSummary {
        words: report.rows.len(),
        fitted: report.fitted_count(),
        flagged: flagged.len(),
        threshold: report.threshold,
        percentile: report.percentile,
    };

    let ingest_meta_path = sibling(fits_path, INGEST_META_FILE);
    let ingest_meta: Option<Value> = if ingest_meta_path.exists() {
        Some(read_json(&ingest_meta_path).in_stage(STAGE)?)
    } else {
        None
    };
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "word": r.word,
                "rank": r.rank,
                "n_articles": r.n_articles,
                "n_spacings": r.n_spacings,
                "beta": r.beta,
                "mse": r.mse,
                "is_stopword": r.is_stopword,
            })
        })
        .collect();
    let doc = json!({
        "threshold": report.threshold,
        "percentile": report.percentile,
        "percentile_method": report.method.to_string(),
        "words": summary.words,
        "fitted": summary.fitted,
        "flagged": summary.flagged,
        "config": cfg.to_entries(),
        "fit": fit_meta,
        "ingest": ingest_meta,
        "rows": rows,
    });
    write_json(&out.join(REPORT_FILE), &doc).in_stage(STAGE)?;
    Ok(summary)
}

fn selected_words(sel: &WordSelection, flagged: &[&str]) -> Vec<String> {
    match sel {
        WordSelection::None => Vec::new(),
        WordSelection::Flagged => flagged.iter().map(|w| w.to_string()).collect(),
        WordSelection::Words(w) => w.clone(),
    }
}

fn write_dumps(
    cfg: &PipelineConfig,
    series_path: &Path,
    settings: &FitSettings,
    fits: &BTreeMap<String, BrodyFit<f64>>,
    hist_words: &[String],
    unfolded_words: &[String],
) -> Result<(), StageError> {
    let wanted: HashSet<&str> = hist_words
        .iter()
        .chain(unfolded_words)
        .map(String::as_str)
        .collect();
    let series = tables::read_series(series_path)?;
    let params = settings.params();
    for (word, samples) in series {
        if !wanted.contains(word.as_str()) {
            continue;
        }
        let Some(fit) = fits.get(&word) else {
            warn!("no fit for {word:?}; nothing to dump");
            continue;
        };
        let analysis = analyze_series(
            &SpacingSeries {
                word: word.clone(),
                samples,
            },
            &params,
        )?;
        if hist_words.contains(&word) {
            let rows = plot_rows(&analysis.histogram, fit.q)?;
            tables::write_histogram_dump(
                &cfg.output_dir.join(tables::dump_name("hist", &word)),
                &rows,
            )?;
        }
        if unfolded_words.contains(&word) {
            tables::write_unfolded_dump(
                &cfg.output_dir.join(tables::dump_name("unfolded", &word)),
                &analysis.unfolded,
            )?;
        }
    }
    Ok(())
}

/// `ingest`, `fit` and `select` back to back in the output directory.
pub fn run_pipeline(
    cfg: &PipelineConfig,
) -> Result<(IngestSummary, FitStageSummary, SelectSummary), CliError> {
    let ingest = ingest(cfg)?;
    let series = cfg.output_dir.join(SERIES_FILE);
    let fit = fit(cfg, &series)?;
    let select = select(cfg, &cfg.output_dir.join(FITS_FILE), Some(&series))?;
    Ok((ingest, fit, select))
}
