//! Percentile thresholding of fit errors into a stop-word list.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::brody::BrodyFit;
use crate::error::{Error, Result};
use crate::real::Real;

pub const DEFAULT_PERCENTILE: f64 = 10.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PercentileMethod {
    /// Linear interpolation between closest ranks at `h = (n − 1) p / 100`.
    #[default]
    Linear,
    /// Smallest value with at least `p` percent of the data at or below it.
    NearestRank,
}

impl fmt::Display for PercentileMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PercentileMethod::Linear => "linear",
            PercentileMethod::NearestRank => "nearest-rank",
        })
    }
}

impl FromStr for PercentileMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "nearest-rank" => Ok(Self::NearestRank),
            other => Err(Error::InvalidParameter(format!(
                "percentile method must be linear or nearest-rank, got {other:?}"
            ))),
        }
    }
}

pub fn percentile_threshold<T: Real>(values: &[T], p: T, method: PercentileMethod) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput("percentile values"));
    }
    if values.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: values.len(),
        });
    }
    if !(p > T::zero() && p < T::lit(100.0)) {
        return Err(Error::Domain {
            name: "percentile",
            value: p.to_f64_lossy(),
            expected: "(0, 100)",
        });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(
            "NaN among percentile values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = sorted.len();
    let frac = p / T::lit(100.0);
    Ok(match method {
        PercentileMethod::Linear => {
            let h = T::from_count(n - 1) * frac;
            let lo = h.floor();
            let i = lo.to_usize().expect("index in range");
            if i + 1 >= n {
                sorted[n - 1]
            } else {
                sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i])
            }
        }
        PercentileMethod::NearestRank => {
            let rank = (frac * T::from_count(n))
                .ceil()
                .to_usize()
                .unwrap_or(1)
                .max(1);
            sorted[rank.min(n) - 1]
        }
    })
}

/// Per-word bookkeeping carried into the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordStats {
    /// 1-based vocabulary rank.
    pub rank: usize,
    pub n_articles: usize,
    pub n_spacings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow<T> {
    pub word: String,
    pub rank: usize,
    pub n_articles: usize,
    pub n_spacings: usize,
    /// Raw fitted Brody parameter; `None` when the word was not fitted.
    pub beta: Option<T>,
    pub mse: Option<T>,
    pub is_stopword: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopwordReport<T> {
    pub rows: Vec<ReportRow<T>>,
    pub threshold: T,
    pub percentile: T,
    pub method: PercentileMethod,
}

impl<T: Real> StopwordReport<T> {
    /// Flagged words, lowest fit error first.
    pub fn stopwords(&self) -> impl Iterator<Item = &str> {
        self.rows
            .iter()
            .filter(|r| r.is_stopword)
            .map(|r| r.word.as_str())
    }

    pub fn fitted_count(&self) -> usize {
        self.rows.iter().filter(|r| r.mse.is_some()).count()
    }
}

/// Flags every fitted word whose mse lies strictly below the `p`-th
/// percentile of all fit errors.
///
/// Words present in `stats` without a fit are reported unflagged with empty
/// fit fields, after all fitted rows.
pub fn select_stopwords<T: Real>(
    fits: &BTreeMap<String, BrodyFit<T>>,
    stats: &BTreeMap<String, WordStats>,
    p: T,
    method: PercentileMethod,
) -> Result<StopwordReport<T>> {
    if let Some(missing) = fits.keys().find(|w| !stats.contains_key(*w)) {
        return Err(Error::InvalidParameter(format!(
            "fitted word {missing:?} has no statistics"
        )));
    }
    let mses: Vec<T> = fits.values().map(|f| f.mse).collect();
    let threshold = percentile_threshold(&mses, p, method)?;

    let mut rows: Vec<ReportRow<T>> = stats
        .iter()
        .map(|(word, st)| {
            let fit = fits.get(word);
            let mse = fit.map(|f| f.mse);
            ReportRow {
                word: word.clone(),
                rank: st.rank,
                n_articles: st.n_articles,
                n_spacings: st.n_spacings,
                beta: fit.map(|f| f.q),
                mse,
                is_stopword: mse.is_some_and(|m| m < threshold),
            }
        })
        .collect();
    rows.sort_by(row_order);
    Ok(StopwordReport {
        rows,
        threshold,
        percentile: p,
        method,
    })
}

fn row_order<T: Real>(a: &ReportRow<T>, b: &ReportRow<T>) -> Ordering {
    match (a.mse, b.mse) {
        (Some(x), Some(y)) => x
            .partial_cmp(&y)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.word.cmp(&b.word)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.rank.cmp(&b.rank).then_with(|| a.word.cmp(&b.word)),
    }
}
