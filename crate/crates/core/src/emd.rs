//! Empirical mode decomposition by envelope sifting.
//!
//! Each sift interpolates natural cubic splines through the local maxima and
//! minima (extended past both ends by mirroring the nearest extrema),
//! subtracts the envelope mean, and repeats until the normalized squared
//! change between sifts drops below the threshold and the candidate has
//! matching extrema and zero-crossing counts. Decomposition ends when the
//! remainder has fewer than three extrema or `max_imfs` modes were taken.

use crate::error::{Error, Result};
use crate::real::Real;

pub const MIN_SIGNAL_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EmdConfig<T> {
    pub sift_threshold: T,
    pub max_imfs: usize,
    /// Upper bound on sifting passes per mode.
    pub max_sifts: usize,
}

impl<T: Real> Default for EmdConfig<T> {
    fn default() -> Self {
        Self {
            sift_threshold: T::lit(0.2),
            max_imfs: 10,
            max_sifts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmdResult<T> {
    pub imfs: Vec<Vec<T>>,
    pub residue: Vec<T>,
}

impl<T: Real> EmdResult<T> {
    /// Sum of all modes plus the residue.
    pub fn reconstruct(&self) -> Vec<T> {
        let mut out = self.residue.clone();
        for imf in &self.imfs {
            for (o, &v) in out.iter_mut().zip(imf) {
                *o = *o + v;
            }
        }
        out
    }
}

pub fn emd_decompose<T: Real>(signal: &[T], config: &EmdConfig<T>) -> Result<EmdResult<T>> {
    if signal.len() < MIN_SIGNAL_LEN {
        return Err(Error::SignalTooShort {
            needed: MIN_SIGNAL_LEN,
            got: signal.len(),
        });
    }
    let mut residue = signal.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < config.max_imfs && extrema_count(&residue) >= 3 {
        let Some(imf) = sift(&residue, config) else {
            break;
        };
        for (r, &v) in residue.iter_mut().zip(&imf) {
            *r = *r - v;
        }
        imfs.push(imf);
    }
    Ok(EmdResult { imfs, residue })
}

fn sift<T: Real>(signal: &[T], config: &EmdConfig<T>) -> Option<Vec<T>> {
    let mut h = signal.to_vec();
    for _ in 0..config.max_sifts {
        let (maxima, minima) = extrema(&h);
        let upper = envelope(&h, &maxima)?;
        let lower = envelope(&h, &minima)?;
        let half = T::lit(0.5);
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..h.len() {
            let mean = (upper[i] + lower[i]) * half;
            num = num + mean * mean;
            den = den + h[i] * h[i];
            h[i] = h[i] - mean;
        }
        let sd = if den > T::zero() {
            num / den
        } else {
            T::zero()
        };
        if sd < config.sift_threshold && is_imf_shaped(&h) {
            return Some(h);
        }
    }
    Some(h)
}

fn is_imf_shaped<T: Real>(h: &[T]) -> bool {
    extrema_count(h).abs_diff(zero_crossings(h)) <= 1
}

/// Indices of local maxima and minima. A flat run counts once, at its middle.
pub fn extrema<T: Real>(x: &[T]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let n = x.len();
    if n < 3 {
        return (maxima, minima);
    }
    let mut i = 1;
    while i < n - 1 {
        // extent of the flat run starting at i
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j == n - 1 {
            break;
        }
        let before = x[i - 1];
        let after = x[j + 1];
        let mid = (i + j) / 2;
        if x[i] > before && x[i] > after {
            maxima.push(mid);
        } else if x[i] < before && x[i] < after {
            minima.push(mid);
        }
        i = j + 1;
    }
    (maxima, minima)
}

pub fn extrema_count<T: Real>(x: &[T]) -> usize {
    let (a, b) = extrema(x);
    a.len() + b.len()
}

/// Sign changes between strictly positive and strictly negative samples.
pub fn zero_crossings<T: Real>(x: &[T]) -> usize {
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for &v in x {
        if v == T::zero() {
            continue;
        }
        let pos = v > T::zero();
        if prev.is_some_and(|p| p != pos) {
            count += 1;
        }
        prev = Some(pos);
    }
    count
}

const MIRRORED: usize = 2;

fn envelope<T: Real>(h: &[T], idx: &[usize]) -> Option<Vec<T>> {
    if idx.is_empty() {
        return None;
    }
    let last = T::from_count(h.len() - 1);
    let mut knots: Vec<(T, T)> = Vec::with_capacity(idx.len() + 2 * MIRRORED);
    for &p in idx.iter().take(MIRRORED).rev() {
        if p > 0 {
            knots.push((-T::from_count(p), h[p]));
        }
    }
    knots.extend(idx.iter().map(|&p| (T::from_count(p), h[p])));
    for &p in idx.iter().rev().take(MIRRORED) {
        if p < h.len() - 1 {
            knots.push((last + last - T::from_count(p), h[p]));
        }
    }
    let spline = NaturalSpline::new(&knots)?;
    Some(spline.sample_integers(h.len()))
}

/// Natural cubic spline through strictly increasing knots.
struct NaturalSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> NaturalSpline<T> {
    fn new(knots: &[(T, T)]) -> Option<Self> {
        let n = knots.len();
        if n < 2 {
            return None;
        }
        let xs: Vec<T> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<T> = knots.iter().map(|k| k.1).collect();
        let mut second = vec![T::zero(); n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives
            let two = T::lit(2.0);
            let six = T::lit(6.0);
            let m = n - 2;
            let mut c_prime = vec![T::zero(); m];
            let mut d_prime = vec![T::zero(); m];
            for k in 0..m {
                let i = k + 1;
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let a = h0;
                let b = two * (h0 + h1);
                let c = h1;
                let d = six * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                if k == 0 {
                    c_prime[k] = c / b;
                    d_prime[k] = d / b;
                } else {
                    let denom = b - a * c_prime[k - 1];
                    c_prime[k] = c / denom;
                    d_prime[k] = (d - a * d_prime[k - 1]) / denom;
                }
            }
            for k in (0..m).rev() {
                let next = if k + 1 < m { second[k + 2] } else { T::zero() };
                second[k + 1] = d_prime[k] - c_prime[k] * next;
            }
        }
        Some(Self { xs, ys, second })
    }

    /// Evaluates at 0, 1, ..., len − 1.
    fn sample_integers(&self, len: usize) -> Vec<T> {
        let six = T::lit(6.0);
        let mut seg = 0;
        (0..len)
            .map(|i| {
                let x = T::from_count(i);
                while seg + 2 < self.xs.len() && x > self.xs[seg + 1] {
                    seg += 1;
                }
                let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
                let h = x1 - x0;
                let a = (x1 - x) / h;
                let b = (x - x0) / h;
                a * self.ys[seg]
                    + b * self.ys[seg + 1]
                    + ((a * a * a - a) * self.second[seg] + (b * b * b - b) * self.second[seg + 1])
                        * h
                        * h
                        / six
            })
            .collect()
    }
}
