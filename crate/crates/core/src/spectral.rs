//! Turns a word's spacing series into unfolded nearest-neighbour spacings.
//!
//! The pipeline is: length-weighted standardization, polynomial unfolding of
//! the empirical staircase, then optional removal of the slow trend in the
//! unfolded fluctuations via EMD. Every step ends with spacings rescaled to
//! unit mean.

use crate::corpus::SpacingSeries;
use crate::emd::{emd_decompose, EmdConfig};
use crate::error::{Error, Result};
use crate::polyfit::Polynomial;
use crate::real::Real;

pub const DEFAULT_POLY_DEGREE: usize = 7;

/// Weighted z-scores of a word's per-article average spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedSeries<T> {
    pub word: String,
    pub values: Vec<T>,
    pub weights: Vec<T>,
}

/// Standardizes average spacings using article lengths as weights.
pub fn weighted_standardize<T: Real>(series: &SpacingSeries<T>) -> Result<StandardizedSeries<T>> {
    let values: Vec<T> = series.samples.iter().map(|s| s.avg_spacing).collect();
    let weights: Vec<T> = series
        .samples
        .iter()
        .map(|s| T::from_count(s.article_length))
        .collect();
    standardize_weighted(&series.word, values, weights)
}

/// `(x − μ_w) / σ_w` with weighted mean and weighted population deviation.
pub fn standardize_weighted<T: Real>(
    word: &str,
    values: Vec<T>,
    weights: Vec<T>,
) -> Result<StandardizedSeries<T>> {
    assert_eq!(values.len(), weights.len(), "one weight per value");
    if values.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: values.len(),
        });
    }
    if weights.iter().any(|&w| !w.is_finite() || w <= T::zero()) {
        return Err(Error::InvalidParameter(
            "weights must be positive and finite".into(),
        ));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateSeries);
    }
    let total: T = weights.iter().copied().sum();
    let mean = values.iter().zip(&weights).map(|(&v, &w)| v * w).sum::<T>() / total;
    let var = values
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| w * (v - mean) * (v - mean))
        .sum::<T>()
        / total;
    let sd = var.sqrt();
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if sd.is_nan() || sd <= T::epsilon() * scale {
        return Err(Error::DegenerateSeries);
    }
    Ok(StandardizedSeries {
        word: word.to_owned(),
        values: values.iter().map(|&v| (v - mean) / sd).collect(),
        weights,
    })
}

/// Sorted unfolded levels and their unit-mean nearest-neighbour spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedSeries<T> {
    pub word: String,
    pub unfolded: Vec<T>,
    pub spacings: Vec<T>,
    /// Set when detrending was requested but the series was too short for it.
    pub detrend_skipped: bool,
}

impl<T: Real> UnfoldedSeries<T> {
    /// Sorts `levels` and derives unit-mean spacings from them.
    pub fn from_levels(word: impl Into<String>, mut levels: Vec<T>) -> Result<Self> {
        sort_reals(&mut levels);
        let spacings = unit_mean_spacings(&levels)?;
        Ok(Self {
            word: word.into(),
            unfolded: levels,
            spacings,
            detrend_skipped: false,
        })
    }
}

fn sort_reals<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
}

fn unit_mean_spacings<T: Real>(sorted: &[T]) -> Result<Vec<T>> {
    if sorted.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: sorted.len(),
        });
    }
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite unfolded level".into()));
    }
    let raw: Vec<T> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().copied().sum::<T>() / T::from_count(raw.len());
    if mean.is_nan() || mean <= T::zero() {
        return Err(Error::DegenerateSeries);
    }
    Ok(raw.into_iter().map(|s| s / mean).collect())
}

/// Maps standardized values through a smooth fit of their staircase function.
///
/// The staircase `N(x̂_(i)) = i` (1-based rank of the sorted value) is fitted
/// by a least-squares polynomial of odd `poly_degree`; the unfolded levels
/// are that polynomial evaluated at each value.
pub fn unfold<T: Real>(
    series: &StandardizedSeries<T>,
    poly_degree: usize,
) -> Result<UnfoldedSeries<T>> {
    if poly_degree.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "unfolding degree must be odd, got {poly_degree}"
        )));
    }
    let needed = poly_degree + 2;
    if series.values.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: series.values.len(),
        });
    }
    let mut xs = series.values.clone();
    sort_reals(&mut xs);
    let ranks: Vec<T> = (1..=xs.len()).map(T::from_count).collect();
    let smooth = Polynomial::fit(&xs, &ranks, poly_degree)?;
    let levels: Vec<T> = xs.iter().map(|&x| smooth.eval(x)).collect();
    UnfoldedSeries::from_levels(series.word.clone(), levels)
}

/// Removes the secular trend from the unfolded fluctuations `X_i − i`.
///
/// The trend is the EMD residue of the fluctuation signal. Series shorter
/// than the EMD minimum come back unchanged with `detrend_skipped` set.
pub fn detrend<T: Real>(series: &UnfoldedSeries<T>, config: &EmdConfig<T>) -> UnfoldedSeries<T> {
    let fluct: Vec<T> = series
        .unfolded
        .iter()
        .enumerate()
        .map(|(i, &x)| x - T::from_count(i + 1))
        .collect();
    let skipped = || UnfoldedSeries {
        detrend_skipped: true,
        ..series.clone()
    };
    let Ok(decomposition) = emd_decompose(&fluct, config) else {
        return skipped();
    };
    let levels: Vec<T> = series
        .unfolded
        .iter()
        .zip(&decomposition.residue)
        .map(|(&x, &trend)| x - trend)
        .collect();
    match UnfoldedSeries::from_levels(series.word.clone(), levels) {
        Ok(out) => out,
        Err(_) => skipped(),
    }
}
