//! Least-squares polynomial fits and log-log slopes for scaling analysis.
//!
//! Timing sweeps put grid counts up to 10^4 on the x axis, so a cubic design
//! matrix spans twelve orders of magnitude. Columns are scaled by
//! `max |x|` and solved with Householder QR instead of normal equations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub degree: usize,
    /// Ascending powers: `y = c[0] + c[1] x + ...`.
    pub coefficients: Vec<f64>,
    /// `1 - SS_res / SS_tot`. Defined as 1 for zero variance with zero
    /// residual and `-inf` for zero variance with a nonzero residual.
    pub r_squared: f64,
}

impl FitResult {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Argument(format!(
            "{} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    let m = xs.len();
    let cols = degree + 1;
    if m < cols {
        return Err(Error::Argument(format!(
            "degree {degree} needs at least {cols} points, got {m}"
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Domain("fit inputs must be finite".into()));
    }
    if degree > 0 && xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::Argument("x values are all identical".into()));
    }

    let coefficients = if ys.iter().all(|&y| y == ys[0]) {
        let mut c = vec![0.0; cols];
        c[0] = ys[0];
        c
    } else {
        solve_scaled(xs, ys, degree)?
    };

    let fit = FitResult {
        degree,
        coefficients,
        r_squared: 0.0,
    };
    let r_squared = r_squared(ys, xs.iter().map(|&x| fit.eval(x)));
    Ok(FitResult { r_squared, ..fit })
}

fn solve_scaled(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = xs.len();
    let cols = degree + 1;
    let scale = xs.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let scale = if scale == 0.0 { 1.0 } else { scale };

    // column-major Vandermonde in t = x / scale
    let mut a = vec![0.0; m * cols];
    for (row, &x) in xs.iter().enumerate() {
        let t = x / scale;
        let mut power = 1.0;
        for col in 0..cols {
            a[col * m + row] = power;
            power *= t;
        }
    }
    let mut b = ys.to_vec();

    // Householder QR, applying each reflection to b as we go.
    for k in 0..cols {
        let norm = (k..m).map(|r| a[k * m + r].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Argument("design matrix is rank deficient".into()));
        }
        let alpha = if a[k * m + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|r| a[k * m + r]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in k..cols {
                let dot: f64 = v.iter().zip(k..m).map(|(vi, r)| vi * a[col * m + r]).sum();
                let f = 2.0 * dot / vnorm2;
                for (vi, r) in v.iter().zip(k..m) {
                    a[col * m + r] -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(k..m).map(|(vi, r)| vi * b[r]).sum();
            let f = 2.0 * dot / vnorm2;
            for (vi, r) in v.iter().zip(k..m) {
                b[r] -= f * vi;
            }
        }
    }

    let largest = (0..cols).map(|k| a[k * m + k].abs()).fold(0.0, f64::max);
    let mut scaled = vec![0.0; cols];
    for k in (0..cols).rev() {
        let diag = a[k * m + k];
        if diag.abs() <= largest * 1e-13 {
            return Err(Error::Argument("design matrix is rank deficient".into()));
        }
        let tail: f64 = (k + 1..cols).map(|c| a[c * m + k] * scaled[c]).sum();
        scaled[k] = (b[k] - tail) / diag;
    }
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect())
}

fn r_squared(ys: &[f64], predicted: impl Iterator<Item = f64>) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = ys.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Least-squares slope of `ln y` against `ln x`; the empirical exponent of a
/// power law.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Argument(
            "need at least two (x, y) pairs of equal length".into(),
        ));
    }
    if xs.iter().chain(ys).any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::Domain(
            "log-log slope needs strictly positive finite values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("x values are all identical".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
