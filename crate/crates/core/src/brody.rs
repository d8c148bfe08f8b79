//! Brody, Poisson and Wigner spacing laws, plus the binned least-squares fit
//! of the Brody parameter.
//!
//! The Brody density is
//!
//! ```text
//! P_q(x) = (1 + q) B(q) x^q exp(-B(q) x^(1+q)),   B(q) = Γ((2+q)/(1+q))^(1+q)
//! ```
//!
//! which reduces to `exp(-x)` at `q = 0` and to the Wigner surmise
//! `(π/2) x exp(-π x²/4)` at `q = 1`. `B(q)` is what fixes the mean spacing
//! at one for every `q`.

use crate::error::{domain, Error, Result};
use crate::gamma::gamma;
use crate::real::Real;

/// Normalization constant `B(q)`.
pub fn brody_b<T: Real>(q: T) -> Result<T> {
    if !q.is_finite() || q < T::zero() {
        return domain("q", q.to_f64_lossy(), "[0, inf)");
    }
    let one = T::one();
    let arg = (T::lit(2.0) + q) / (one + q);
    Ok(gamma(arg).powf(one + q))
}

/// Brody density with a precomputed `B(q)`. No argument checking.
#[inline]
pub(crate) fn brody_pdf_with_b<T: Real>(x: T, q: T, b: T) -> T {
    if x == T::zero() {
        return if q == T::zero() { T::one() } else { T::zero() };
    }
    let one = T::one();
    (one + q) * b * x.powf(q) * (-b * x.powf(one + q)).exp()
}

pub fn brody_pdf<T: Real>(x: T, q: T) -> Result<T> {
    check_spacing(x)?;
    let b = brody_b(q)?;
    Ok(brody_pdf_with_b(x, q, b))
}

/// Brody cumulative distribution `1 − exp(−B x^(1+q))`.
pub fn brody_cdf<T: Real>(x: T, q: T) -> Result<T> {
    check_spacing(x)?;
    let b = brody_b(q)?;
    Ok(-(-b * x.powf(T::one() + q)).exp_m1())
}

/// Exact inverse of [`brody_cdf`]; maps a uniform draw in `(0, 1)` to a
/// Brody-distributed spacing.
pub fn brody_inverse_cdf<T: Real>(u: T, q: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return domain("u", u.to_f64_lossy(), "(0, 1)");
    }
    let b = brody_b(q)?;
    let tail = -(-u).ln_1p();
    Ok((tail / b).powf(T::one() / (T::one() + q)))
}

/// Poisson (uncorrelated) spacing law `exp(−x)`.
pub fn poisson_pdf<T: Real>(x: T) -> Result<T> {
    check_spacing(x)?;
    Ok((-x).exp())
}

/// Wigner surmise for the Gaussian orthogonal ensemble, `(π/2) x exp(−π x²/4)`.
pub fn wigner_pdf<T: Real>(x: T) -> Result<T> {
    check_spacing(x)?;
    let pi = T::PI();
    Ok(pi / T::lit(2.0) * x * (-pi / T::lit(4.0) * x * x).exp())
}

fn check_spacing<T: Real>(x: T) -> Result<()> {
    if x >= T::zero() && x.is_finite() {
        Ok(())
    } else {
        domain("x", x.to_f64_lossy(), "[0, inf)")
    }
}

/// Uniformly binned spacing density on `[0, max_x]`.
///
/// Densities are normalized by the total number of spacings, including the
/// ones beyond `max_x` that fall outside every bin, so the tail mass is
/// missing from the histogram rather than redistributed over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    pub bin_edges: Vec<T>,
    pub densities: Vec<T>,
    pub total_samples: usize,
    pub retained_samples: usize,
}

impl<T: Real> Histogram<T> {
    pub fn n_bins(&self) -> usize {
        self.densities.len()
    }

    pub fn max_x(&self) -> T {
        *self.bin_edges.last().expect("histogram has edges")
    }

    pub fn bin_width(&self) -> T {
        self.max_x() / T::from_count(self.n_bins())
    }

    pub fn bin_centers(&self) -> Vec<T> {
        let half = T::lit(0.5);
        self.bin_edges
            .windows(2)
            .map(|w| (w[0] + w[1]) * half)
            .collect()
    }

    /// Builds a histogram from precomputed densities on uniform bins.
    pub fn from_densities(
        densities: Vec<T>,
        max_x: T,
        total_samples: usize,
        retained_samples: usize,
    ) -> Result<Self> {
        if densities.is_empty() {
            return Err(Error::EmptyInput("densities"));
        }
        if !max_x.is_finite() || max_x <= T::zero() {
            return domain("max_x", max_x.to_f64_lossy(), "(0, inf)");
        }
        Ok(Self {
            bin_edges: uniform_edges(densities.len(), max_x),
            densities,
            total_samples,
            retained_samples,
        })
    }
}

fn uniform_edges<T: Real>(n_bins: usize, max_x: T) -> Vec<T> {
    let n = T::from_count(n_bins);
    (0..=n_bins).map(|i| max_x * T::from_count(i) / n).collect()
}

pub const DEFAULT_BINS: usize = 300;
pub const DEFAULT_MAX_SPACING: f64 = 5.0;

/// Bins `spacings` into `n_bins` uniform bins on `[0, max_x]`.
pub fn make_histogram<T: Real>(spacings: &[T], n_bins: usize, max_x: T) -> Result<Histogram<T>> {
    if spacings.is_empty() {
        return Err(Error::EmptyInput("spacings"));
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be positive".into()));
    }
    if !max_x.is_finite() || max_x <= T::zero() {
        return domain("max_x", max_x.to_f64_lossy(), "(0, inf)");
    }
    let n = T::from_count(n_bins);
    let mut counts = vec![0usize; n_bins];
    let mut retained = 0;
    for &s in spacings {
        check_spacing(s)?;
        if s > max_x {
            continue;
        }
        let idx = (s / max_x * n)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(n_bins - 1);
        counts[idx] += 1;
        retained += 1;
    }
    let total = spacings.len();
    let width = max_x / n;
    let norm = T::from_count(total) * width;
    Ok(Histogram {
        bin_edges: uniform_edges(n_bins, max_x),
        densities: counts
            .into_iter()
            .map(|c| T::from_count(c) / norm)
            .collect(),
        total_samples: total,
        retained_samples: retained,
    })
}

/// Knobs for [`fit_brody`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions<T> {
    pub q_min: T,
    pub q_max: T,
    pub grid_step: T,
    /// Minimum number of in-window spacings; `None` means "one per bin".
    pub min_retained: Option<usize>,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            q_min: T::zero(),
            q_max: T::lit(1.2),
            grid_step: T::lit(0.01),
            min_retained: None,
        }
    }
}

/// Outcome of a Brody fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BrodyFit<T> {
    /// Raw optimum of the Brody parameter within the search interval.
    pub q: T,
    /// `q` clamped to the physical range `[0, 1]`.
    pub q_clamped: T,
    /// `B(q)` at the reported `q`.
    pub b: T,
    pub mse: T,
    pub n_bins: usize,
    pub max_x: T,
}

/// Mean squared residual between histogram densities and `P_q` at bin centers.
///
/// Every bin enters the mean, empty ones included.
pub fn brody_mse<T: Real>(hist: &Histogram<T>, q: T) -> Result<T> {
    let b = brody_b(q)?;
    Ok(mse_with_centers(&hist.bin_centers(), &hist.densities, q, b))
}

fn mse_with_centers<T: Real>(centers: &[T], densities: &[T], q: T, b: T) -> T {
    let sum: T = centers
        .iter()
        .zip(densities)
        .map(|(&x, &d)| {
            let r = d - brody_pdf_with_b(x, q, b);
            r * r
        })
        .sum();
    sum / T::from_count(densities.len())
}

/// Fits the Brody parameter by minimizing [`brody_mse`].
///
/// A grid scan over `[q_min, q_max]` locates the best grid point, then
/// successive parabolic interpolation refines it inside the neighbouring
/// grid cells.
pub fn fit_brody<T: Real>(hist: &Histogram<T>, opts: &FitOptions<T>) -> Result<BrodyFit<T>> {
    let valid = opts.q_min >= T::zero() && opts.q_max > opts.q_min && opts.grid_step > T::zero();
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "fit interval [{}, {}] with step {}",
            opts.q_min, opts.q_max, opts.grid_step
        )));
    }
    if hist.densities.iter().all(|&d| d == T::zero()) {
        return Err(Error::NoMassInFitWindow);
    }
    let needed = opts.min_retained.unwrap_or(hist.n_bins());
    if hist.retained_samples < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: hist.retained_samples,
        });
    }

    let centers = hist.bin_centers();
    let objective = |q: T| -> T {
        let b = brody_b(q).expect("q within a nonnegative interval");
        mse_with_centers(&centers, &hist.densities, q, b)
    };

    let steps = ((opts.q_max - opts.q_min) / opts.grid_step)
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(2);
    let span = opts.q_max - opts.q_min;
    let grid: Vec<T> = (0..=steps)
        .map(|i| opts.q_min + span * T::from_count(i) / T::from_count(steps))
        .collect();
    let values: Vec<T> = grid.iter().map(|&q| objective(q)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v < values[best] { i } else { best });

    let (q, _) = refine_parabolic(&grid, &values, best, objective);
    let b = brody_b(q)?;
    let mse = mse_with_centers(&centers, &hist.densities, q, b);
    Ok(BrodyFit {
        q,
        q_clamped: q.max(T::zero()).min(T::one()),
        b,
        mse,
        n_bins: hist.n_bins(),
        max_x: hist.max_x(),
    })
}

fn parabola_vertex<T: Real>(a: (T, T), b: (T, T), c: (T, T)) -> Option<T> {
    let (x0, f0) = a;
    let (x1, f1) = b;
    let (x2, f2) = c;
    let p = (x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0);
    let d = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
    if d == T::zero() {
        return None;
    }
    let v = x1 - T::lit(0.5) * p / d;
    v.is_finite().then_some(v)
}

fn refine_parabolic<T: Real>(
    grid: &[T],
    values: &[T],
    best: usize,
    objective: impl Fn(T) -> T,
) -> (T, T) {
    let last = grid.len() - 1;
    let mut bq = grid[best];
    let mut bf = values[best];

    // Minimum on the boundary: try one step into the first interior cell.
    if best == 0 || best == last {
        let (i0, i1, i2) = if best == 0 {
            (0, 1, 2)
        } else {
            (last - 2, last - 1, last)
        };
        let lo = if best == 0 { grid[0] } else { grid[last - 1] };
        let hi = if best == 0 { grid[1] } else { grid[last] };
        if let Some(v) = parabola_vertex(
            (grid[i0], values[i0]),
            (grid[i1], values[i1]),
            (grid[i2], values[i2]),
        ) {
            if v > lo && v < hi {
                let fv = objective(v);
                if fv < bf {
                    bq = v;
                    bf = fv;
                }
            }
        }
        return (bq, bf);
    }

    let (mut a, mut fa) = (grid[best - 1], values[best - 1]);
    let (mut c, mut fc) = (grid[best + 1], values[best + 1]);
    let tol = T::lit(1e-12);
    for _ in 0..60 {
        let Some(v) = parabola_vertex((a, fa), (bq, bf), (c, fc)) else {
            break;
        };
        if !(v > a && v < c) {
            break;
        }
        let fv = objective(v);
        let converged = (v - bq).abs() < tol;
        if fv < bf {
            if v < bq {
                c = bq;
                fc = bf;
            } else {
                a = bq;
                fa = bf;
            }
            bq = v;
            bf = fv;
        } else if v < bq {
            a = v;
            fa = fv;
        } else {
            c = v;
            fc = fv;
        }
        if converged || c - a < tol {
            break;
        }
    }
    (bq, bf)
}

/// One row of a plot dump: histogram density next to the three reference laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRow<T> {
    pub bin_center: T,
    pub density: T,
    pub brody: T,
    pub poisson: T,
    pub goe: T,
}

/// Tabulates `hist` against Brody(`q`), Poisson and Wigner at bin centers.
pub fn plot_rows<T: Real>(hist: &Histogram<T>, q: T) -> Result<Vec<PlotRow<T>>> {
    let b = brody_b(q)?;
    hist.bin_centers()
        .into_iter()
        .zip(&hist.densities)
        .map(|(x, &density)| {
            Ok(PlotRow {
                bin_center: x,
                density,
                brody: brody_pdf_with_b(x, q, b),
                poisson: poisson_pdf(x)?,
                goe: wigner_pdf(x)?,
            })
        })
        .collect()
}
