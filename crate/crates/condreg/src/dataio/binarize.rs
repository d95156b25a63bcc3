//! Turning real features into Boolean attributes by thresholding.
//!
//! Thresholds are order statistics of the *training* rows only; the fitted
//! binarizer is then applied to any row set, so test attributes never leak
//! information about test targets. The median scheme emits one indicator
//! per feature, the quartile scheme three (y ≥ Q1, y ≥ Q2, y ≥ Q3).

use crate::error::{Error, Result};
use crate::mat::{BoolMat, RealMat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinarizationScheme {
    Median,
    Quartile,
}

/// Fitted per-feature thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Binarizer<T> {
    scheme: BinarizationScheme,
    thresholds: Vec<Vec<T>>,
}

impl<T: Scalar> Binarizer<T> {
    pub fn fit(train: &RealMat<T>, scheme: BinarizationScheme) -> Result<Self> {
        if train.rows() == 0 || train.cols() == 0 {
            return Err(Error::parameter("cannot fit thresholds on empty data"));
        }
        let quantiles: &[f64] = match scheme {
            BinarizationScheme::Median => &[0.5],
            BinarizationScheme::Quartile => &[0.25, 0.5, 0.75],
        };
        let mut thresholds = Vec::with_capacity(train.cols());
        for col in 0..train.cols() {
            let mut values: Vec<T> = (0..train.rows()).map(|j| train.row(j)[col]).collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::parameter(format!(
                    "feature {} contains a non-finite value",
                    col + 1
                )));
            }
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
            if values.first() == values.last() {
                log::warn!(
                    "feature {} is constant on the training split; its indicator column(s) will be all-true",
                    col + 1
                );
            }
            thresholds.push(quantiles.iter().map(|&q| quantile(&values, q)).collect());
        }
        Ok(Binarizer { scheme, thresholds })
    }

    pub fn scheme(&self) -> BinarizationScheme {
        self.scheme
    }

    pub fn thresholds(&self) -> &[Vec<T>] {
        &self.thresholds
    }

    /// Boolean columns emitted per input feature.
    pub fn output_width(&self) -> usize {
        self.thresholds.iter().map(Vec::len).sum()
    }

    /// Applies the fitted thresholds: per feature, one indicator y ≥ t per
    /// threshold, feature-major column order.
    pub fn transform(&self, y: &RealMat<T>) -> Result<BoolMat> {
        if y.cols() != self.thresholds.len() {
            return Err(Error::parameter(format!(
                "binarizer was fitted on {} features, data has {}",
                self.thresholds.len(),
                y.cols()
            )));
        }
        let width = self.output_width();
        let mut bits = Vec::with_capacity(y.rows() * width);
        for j in 0..y.rows() {
            let row = y.row(j);
            for (value, ts) in row.iter().zip(&self.thresholds) {
                bits.extend(ts.iter().map(|t| *value >= *t));
            }
        }
        BoolMat::from_vec(bits, y.rows(), width)
    }
}

/// Type-7 quantile (the R default): linear interpolation between order
/// statistics at h = (len−1)q. The even-length median comes out as the mean
/// of the two middle values.
fn quantile<T: Scalar>(sorted: &[T], q: f64) -> T {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = T::from_f64_c(h - lo as f64);
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}
