//! Corpus-specific stop words from word spacing statistics.
//!
//! For every frequent word the per-article average distance between its
//! consecutive occurrences is collected, standardized with article lengths
//! as weights, unfolded to unit mean spacing and detrended. The resulting
//! nearest-neighbour spacing histogram is fitted with the one-parameter
//! Brody distribution, which interpolates between Poisson (`q = 0`) and
//! Wigner/GOE (`q = 1`) statistics. Words whose fit error falls below a
//! percentile of all fit errors are reported as stop words.
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the quoted
//! tolerances assume.

pub mod analysis;
pub mod brody;
pub mod corpus;
pub mod emd;
pub mod error;
pub mod gamma;
pub mod polyfit;
pub mod real;
pub mod selection;
pub mod spectral;

pub use analysis::{analyze_series, AnalysisParams, WordAnalysis};
pub use brody::{
    brody_b, brody_cdf, brody_inverse_cdf, brody_mse, brody_pdf, fit_brody, make_histogram,
    plot_rows, poisson_pdf, wigner_pdf, BrodyFit, FitOptions, Histogram, PlotRow,
};
pub use corpus::{
    article_gaps, build_series, build_vocabulary, tokenize, Document, GapScope, RankedVocabulary,
    SeriesAccumulator, SpacingSample, SpacingSeries, TokenizerConfig, VocabularyCounter,
};
pub use emd::{emd_decompose, EmdConfig, EmdResult};
pub use error::{Error, Result};
pub use real::Real;
pub use selection::{
    percentile_threshold, select_stopwords, PercentileMethod, ReportRow, StopwordReport, WordStats,
};
pub use spectral::{
    detrend, standardize_weighted, unfold, weighted_standardize, StandardizedSeries, UnfoldedSeries,
};

pub type AnalysisParams64 = AnalysisParams<f64>;
pub type WordAnalysis64 = WordAnalysis<f64>;
pub type BrodyFit64 = BrodyFit<f64>;
pub type FitOptions64 = FitOptions<f64>;
pub type Histogram64 = Histogram<f64>;
pub type SpacingSeries64 = SpacingSeries<f64>;
pub type SpacingSample64 = SpacingSample<f64>;
pub type StandardizedSeries64 = StandardizedSeries<f64>;
pub type UnfoldedSeries64 = UnfoldedSeries<f64>;
pub type EmdConfig64 = EmdConfig<f64>;
pub type EmdResult64 = EmdResult<f64>;
pub type StopwordReport64 = StopwordReport<f64>;
