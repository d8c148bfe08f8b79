//! Run configuration: a line-based `key = value` file overlaid by flags.
//!
//! Keys match the field names of [`PipelineConfig`]. Blank lines and lines
//! starting with `#` are ignored. Flags always win over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use stopwords_rmt_core::brody::{DEFAULT_BINS, DEFAULT_MAX_SPACING};
use stopwords_rmt_core::corpus::{DEFAULT_MIN_ARTICLES, DEFAULT_TOP_N};
use stopwords_rmt_core::selection::DEFAULT_PERCENTILE;
use stopwords_rmt_core::spectral::DEFAULT_POLY_DEGREE;
use stopwords_rmt_core::{
    AnalysisParams, EmdConfig, FitOptions, GapScope, PercentileMethod, TokenizerConfig,
};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    TxtDir,
    Jsonl,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::TxtDir => "txt-dir",
            InputFormat::Jsonl => "jsonl",
        })
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "txt-dir" => Ok(Self::TxtDir),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(format!("expected txt-dir or jsonl, got {other:?}")),
        }
    }
}

/// Which words get per-word debug dumps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WordSelection {
    #[default]
    None,
    Flagged,
    Words(Vec<String>),
}

impl WordSelection {
    pub fn is_none(&self) -> bool {
        matches!(self, WordSelection::None)
    }
}

impl fmt::Display for WordSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordSelection::None => f.write_str("none"),
            WordSelection::Flagged => f.write_str("flagged"),
            WordSelection::Words(w) => f.write_str(&w.join(",")),
        }
    }
}

impl FromStr for WordSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "none" | "" => Ok(Self::None),
            "flagged" => Ok(Self::Flagged),
            list => {
                let words: Vec<String> = list
                    .split(',')
                    .map(|w| w.trim().to_owned())
                    .filter(|w| !w.is_empty())
                    .collect();
                if words.is_empty() {
                    Err("empty word list".into())
                } else {
                    Ok(Self::Words(words))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input_path: Option<PathBuf>,
    /// `None` picks `txt-dir` for directories and `jsonl` otherwise.
    pub input_format: Option<InputFormat>,
    pub top_n: usize,
    pub gap_scope: GapScope,
    pub keep_digits: bool,
    pub min_articles: usize,
    pub n_bins: usize,
    pub max_spacing: f64,
    pub percentile: f64,
    pub percentile_method: PercentileMethod,
    pub poly_degree: usize,
    pub emd_enabled: bool,
    /// Minimum in-window spacings for a fit; `None` means
    /// `min(n_bins, min_articles - 1)`.
    pub min_fit_samples: Option<usize>,
    pub threads: usize,
    pub output_dir: PathBuf,
    pub dump_histograms: WordSelection,
    pub dump_unfolded: WordSelection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input_path: None,
            input_format: None,
            top_n: DEFAULT_TOP_N,
            gap_scope: GapScope::Article,
            keep_digits: false,
            min_articles: DEFAULT_MIN_ARTICLES,
            n_bins: DEFAULT_BINS,
            max_spacing: DEFAULT_MAX_SPACING,
            percentile: DEFAULT_PERCENTILE,
            percentile_method: PercentileMethod::Linear,
            poly_degree: DEFAULT_POLY_DEGREE,
            emd_enabled: true,
            min_fit_samples: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_dir: PathBuf::from("out"),
            dump_histograms: WordSelection::None,
            dump_unfolded: WordSelection::None,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "input_path",
    "input_format",
    "top_n",
    "gap_scope",
    "keep_digits",
    "min_articles",
    "n_bins",
    "max_spacing",
    "percentile",
    "percentile_method",
    "poly_degree",
    "emd_enabled",
    "min_fit_samples",
    "threads",
    "output_dir",
    "dump_histograms",
    "dump_unfolded",
];

/// Raw `key -> value` pairs prior to validation.
pub type Entries = BTreeMap<String, String>;

pub fn parse_config_text(text: &str, origin: &Path) -> Result<Entries, ConfigError> {
    let mut out = Entries::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: origin.to_owned(),
                line: i + 1,
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                path: origin.to_owned(),
                line: i + 1,
            });
        }
        out.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Entries, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_config_text(&text, path)
}

fn parse<T: FromStr>(key: &'static str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError::Invalid {
        key,
        message: format!("{raw:?}: {e}"),
    })
}

fn parse_bool(key: &'static str, raw: &str) -> Result<bool, ConfigError> {
    match raw {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::Invalid {
            key,
            message: format!("{raw:?} is not a boolean"),
        }),
    }
}

fn check(key: &'static str, ok: bool, message: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            key,
            message: message(),
        })
    }
}

impl PipelineConfig {
    /// Builds a validated config from raw entries, falling back to defaults
    /// for absent keys.
    pub fn from_entries(entries: &Entries) -> Result<Self, ConfigError> {
        let mut cfg = PipelineConfig::default();
        for (key, raw) in entries {
            let Some(&key) = KEYS.iter().find(|k| **k == key.as_str()) else {
                return Err(ConfigError::UnknownKey(key.clone()));
            };
            match key {
                "input_path" => cfg.input_path = Some(PathBuf::from(raw)),
                "input_format" => {
                    cfg.input_format = match raw.as_str() {
                        "auto" => None,
                        _ => Some(parse(key, raw)?),
                    }
                }
                "top_n" => cfg.top_n = parse(key, raw)?,
                "gap_scope" => cfg.gap_scope = parse(key, raw)?,
                "keep_digits" => cfg.keep_digits = parse_bool(key, raw)?,
                "min_articles" => cfg.min_articles = parse(key, raw)?,
                "n_bins" => cfg.n_bins = parse(key, raw)?,
                "max_spacing" => cfg.max_spacing = parse(key, raw)?,
                "percentile" => cfg.percentile = parse(key, raw)?,
                "percentile_method" => cfg.percentile_method = parse(key, raw)?,
                "poly_degree" => cfg.poly_degree = parse(key, raw)?,
                "emd_enabled" => cfg.emd_enabled = parse_bool(key, raw)?,
                "min_fit_samples" => {
                    cfg.min_fit_samples = match raw.as_str() {
                        "auto" => None,
                        _ => Some(parse(key, raw)?),
                    }
                }
                "threads" => cfg.threads = parse(key, raw)?,
                "output_dir" => cfg.output_dir = PathBuf::from(raw),
                "dump_histograms" => cfg.dump_histograms = parse(key, raw)?,
                "dump_unfolded" => cfg.dump_unfolded = parse(key, raw)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check("top_n", (1..=10_000_000).contains(&self.top_n), || {
            format!("{} is outside 1..=10000000", self.top_n)
        })?;
        check("min_articles", self.min_articles >= 2, || {
            format!("{} is below 2", self.min_articles)
        })?;
        check("n_bins", (1..=100_000).contains(&self.n_bins), || {
            format!("{} is outside 1..=100000", self.n_bins)
        })?;
        check(
            "max_spacing",
            self.max_spacing.is_finite() && self.max_spacing > 0.0 && self.max_spacing <= 1000.0,
            || format!("{} is outside (0, 1000]", self.max_spacing),
        )?;
        check(
            "percentile",
            self.percentile > 0.0 && self.percentile < 100.0,
            || format!("{} is outside (0, 100)", self.percentile),
        )?;
        check(
            "poly_degree",
            (3..=19).contains(&self.poly_degree) && self.poly_degree % 2 == 1,
            || format!("{} is not an odd degree in 3..=19", self.poly_degree),
        )?;
        check("threads", (1..=1024).contains(&self.threads), || {
            format!("{} is outside 1..=1024", self.threads)
        })?;
        if let Some(m) = self.min_fit_samples {
            check("min_fit_samples", m >= 1, || "must be at least 1".into())?;
        }
        Ok(())
    }

    /// Canonical `key -> value` echo, suitable for a config file.
    pub fn to_entries(&self) -> Entries {
        let mut e = Entries::new();
        let mut put = |k: &str, v: String| {
            e.insert(k.to_owned(), v);
        };
        if let Some(p) = &self.input_path {
            put("input_path", p.display().to_string());
        }
        put(
            "input_format",
            self.input_format.map_or("auto".into(), |f| f.to_string()),
        );
        put("top_n", self.top_n.to_string());
        put("gap_scope", self.gap_scope.to_string());
        put("keep_digits", self.keep_digits.to_string());
        put("min_articles", self.min_articles.to_string());
        put("n_bins", self.n_bins.to_string());
        put("max_spacing", self.max_spacing.to_string());
        put("percentile", self.percentile.to_string());
        put("percentile_method", self.percentile_method.to_string());
        put("poly_degree", self.poly_degree.to_string());
        put("emd_enabled", self.emd_enabled.to_string());
        put(
            "min_fit_samples",
            self.min_fit_samples
                .map_or("auto".into(), |m| m.to_string()),
        );
        put("threads", self.threads.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("dump_histograms", self.dump_histograms.to_string());
        put("dump_unfolded", self.dump_unfolded.to_string());
        e
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig {
            keep_digits: self.keep_digits,
            ..TokenizerConfig::default()
        }
    }

    pub fn effective_min_fit_samples(&self) -> usize {
        self.min_fit_samples
            .unwrap_or_else(|| self.n_bins.min(self.min_articles - 1))
    }

    pub fn analysis_params(&self) -> AnalysisParams<f64> {
        AnalysisParams {
            min_articles: self.min_articles,
            poly_degree: self.poly_degree,
            emd: self.emd_enabled.then(EmdConfig::default),
            n_bins: self.n_bins,
            max_spacing: self.max_spacing,
            fit: FitOptions {
                min_retained: Some(self.effective_min_fit_samples()),
                ..FitOptions::default()
            },
        }
    }

    pub fn resolved_input(&self) -> Result<(PathBuf, InputFormat), ConfigError> {
        let path = self.input_path.clone().ok_or(ConfigError::NoInput)?;
        if !path.exists() {
            return Err(ConfigError::MissingInput(path));
        }
        let format = self.input_format.unwrap_or(if path.is_dir() {
            InputFormat::TxtDir
        } else {
            InputFormat::Jsonl
        });
        Ok((path, format))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(pairs: &[(&str, &str)]) -> Entries {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn defaults() {
        let c = PipelineConfig::from_entries(&Entries::new()).unwrap();
        assert_eq!(c.top_n, 10_000);
        assert_eq!(c.n_bins, 300);
        assert_eq!(c.max_spacing, 5.0);
        assert_eq!(c.percentile, 10.0);
        assert_eq!(c.poly_degree, 7);
        assert_eq!(c.min_articles, 300);
        assert_eq!(c.gap_scope, GapScope::Article);
        assert!(c.emd_enabled);
        assert_eq!(c.effective_min_fit_samples(), 299);
    }

    #[test]
    fn parses_file_syntax() {
        let text = "# run\ntop_n = 500\n\n gap_scope=sentence \ndump_histograms = the, of ,and\n";
        let e = parse_config_text(text, Path::new("run.conf")).unwrap();
        let c = PipelineConfig::from_entries(&e).unwrap();
        assert_eq!(c.top_n, 500);
        assert_eq!(c.gap_scope, GapScope::Sentence);
        assert_eq!(
            c.dump_histograms,
            WordSelection::Words(vec!["the".into(), "of".into(), "and".into()])
        );
        let err = parse_config_text("top_n 5", Path::new("run.conf")).unwrap_err();
        assert!(err.to_string().contains("run.conf:1"));
    }

    #[test]
    fn rejects_out_of_range_values_naming_the_key() {
        for (k, v) in [
            ("poly_degree", "8"),
            ("poly_degree", "21"),
            ("percentile", "100"),
            ("n_bins", "0"),
            ("max_spacing", "-1"),
            ("top_n", "abc"),
            ("threads", "0"),
            ("emd_enabled", "maybe"),
            ("gap_scope", "paragraph"),
        ] {
            let err = PipelineConfig::from_entries(&entries(&[(k, v)])).unwrap_err();
            assert!(err.to_string().contains(k), "{err}");
        }
        let err = PipelineConfig::from_entries(&entries(&[("bogus", "1")])).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn echo_round_trips() {
        let c = PipelineConfig::from_entries(&entries(&[
            ("input_path", "corpus.jsonl"),
            ("percentile", "12.5"),
            ("emd_enabled", "false"),
            ("min_fit_samples", "40"),
            ("dump_histograms", "flagged"),
        ]))
        .unwrap();
        assert_eq!(PipelineConfig::from_entries(&c.to_entries()).unwrap(), c);
    }
}
