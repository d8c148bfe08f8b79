//! Per-word composition: standardize, unfold, detrend, histogram, fit.

use crate::brody::{
    fit_brody, make_histogram, BrodyFit, FitOptions, Histogram, DEFAULT_BINS, DEFAULT_MAX_SPACING,
};
use crate::corpus::{SpacingSeries, DEFAULT_MIN_ARTICLES};
use crate::emd::EmdConfig;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{detrend, unfold, weighted_standardize, UnfoldedSeries, DEFAULT_POLY_DEGREE};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams<T> {
    /// Words seen in fewer articles are not analysed.
    pub min_articles: usize,
    pub poly_degree: usize,
    /// `None` disables EMD detrending.
    pub emd: Option<EmdConfig<T>>,
    pub n_bins: usize,
    pub max_spacing: T,
    pub fit: FitOptions<T>,
}

impl<T: Real> Default for AnalysisParams<T> {
    fn default() -> Self {
        Self {
            min_articles: DEFAULT_MIN_ARTICLES,
            poly_degree: DEFAULT_POLY_DEGREE,
            emd: Some(EmdConfig::default()),
            n_bins: DEFAULT_BINS,
            max_spacing: T::lit(DEFAULT_MAX_SPACING),
            fit: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordAnalysis<T> {
    pub unfolded: UnfoldedSeries<T>,
    pub histogram: Histogram<T>,
    pub fit: BrodyFit<T>,
}

pub fn analyze_series<T: Real>(
    series: &SpacingSeries<T>,
    params: &AnalysisParams<T>,
) -> Result<WordAnalysis<T>> {
    let n = series.samples.len();
    if n < params.min_articles {
        return Err(Error::InsufficientSamples {
            needed: params.min_articles,
            got: n,
        });
    }
    let standardized = weighted_standardize(series)?;
    let mut unfolded = unfold(&standardized, params.poly_degree)?;
    if let Some(cfg) = &params.emd {
        unfolded = detrend(&unfolded, cfg);
    }
    let histogram = make_histogram(&unfolded.spacings, params.n_bins, params.max_spacing)?;
    let fit = fit_brody(&histogram, &params.fit)?;
    Ok(WordAnalysis {
        unfolded,
        histogram,
        fit,
    })
}
