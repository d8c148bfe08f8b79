//! Least-squares polynomial fit in a Legendre basis.
//!
//! Abscissae are mapped onto `[-1, 1]` before building the design matrix and
//! the system is solved by Householder QR, which keeps degree-19 fits on
//! skewed data well conditioned.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
    center: T,
    half_width: T,
}

impl<T: Real> Polynomial<T> {
    /// Fits a polynomial of `degree` to `(xs[i], ys[i])`.
    pub fn fit(xs: &[T], ys: &[T], degree: usize) -> Result<Self> {
        assert_eq!(
            xs.len(),
            ys.len(),
            "abscissae and ordinates differ in length"
        );
        let m = degree + 1;
        if xs.len() < m {
            return Err(Error::InsufficientSamples {
                needed: m,
                got: xs.len(),
            });
        }
        let (lo, hi) = xs
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if !(hi - lo).is_finite() || hi <= lo {
            return Err(Error::DegenerateSeries);
        }
        let distinct = distinct_count(xs);
        if distinct < m {
            return Err(Error::InsufficientSamples {
                needed: m,
                got: distinct,
            });
        }
        let half = T::lit(0.5);
        let center = (hi + lo) * half;
        let half_width = (hi - lo) * half;

        // column-major design matrix
        let n = xs.len();
        let mut cols = vec![vec![T::zero(); n]; m];
        let mut basis = vec![T::zero(); m];
        for (i, &x) in xs.iter().enumerate() {
            legendre_into((x - center) / half_width, &mut basis);
            for (col, &b) in cols.iter_mut().zip(&basis) {
                col[i] = b;
            }
        }
        let coeffs = least_squares_qr(cols, ys.to_vec())?;
        Ok(Self {
            coeffs,
            center,
            half_width,
        })
    }

    pub fn eval(&self, x: T) -> T {
        let t = (x - self.center) / self.half_width;
        let mut basis = vec![T::zero(); self.coeffs.len()];
        legendre_into(t, &mut basis);
        basis.iter().zip(&self.coeffs).map(|(&b, &c)| b * c).sum()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn distinct_count<T: Real>(xs: &[T]) -> usize {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    sorted.dedup();
    sorted.len()
}

fn legendre_into<T: Real>(t: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    out[0] = T::one();
    if out.len() > 1 {
        out[1] = t;
    }
    for k in 2..out.len() {
        let kf = T::from_count(k);
        out[k] =
            ((T::lit(2.0) * kf - T::one()) * t * out[k - 1] - (kf - T::one()) * out[k - 2]) / kf;
    }
}

fn least_squares_qr<T: Real>(mut cols: Vec<Vec<T>>, mut rhs: Vec<T>) -> Result<Vec<T>> {
    let n = rhs.len();
    let m = cols.len();
    let mut diag = vec![T::zero(); m];
    for j in 0..m {
        let norm = cols[j][j..].iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::DegenerateSeries);
        }
        let alpha = if cols[j][j] > T::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in place of column j
        cols[j][j] = cols[j][j] - alpha;
        let vnorm2: T = cols[j][j..].iter().map(|&v| v * v).sum();
        diag[j] = alpha;
        if vnorm2 == T::zero() {
            continue;
        }
        let (head, tail) = cols.split_at_mut(j + 1);
        let v = &head[j][j..];
        for col in tail.iter_mut() {
            reflect(v, vnorm2, &mut col[j..]);
        }
        reflect(v, vnorm2, &mut rhs[j..n]);
    }
    // back substitution on R c = Q^T y
    let mut coeffs = vec![T::zero(); m];
    for j in (0..m).rev() {
        let mut acc = rhs[j];
        for k in j + 1..m {
            acc = acc - cols[k][j] * coeffs[k];
        }
        coeffs[j] = acc / diag[j];
    }
    Ok(coeffs)
}

#[inline]
fn reflect<T: Real>(v: &[T], vnorm2: T, target: &mut [T]) {
    let dot: T = v.iter().zip(target.iter()).map(|(&a, &b)| a * b).sum();
    let scale = T::lit(2.0) * dot / vnorm2;
    for (t, &a) in target.iter_mut().zip(v) {
        *t = *t - scale * a;
    }
}
