//! Small numerical helpers shared across modules.

/// Pairwise (cascade) summation. All quadratures in the crate go through
/// this so results do not depend on anything but the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope under the weights supplied (or the
    /// residual scatter when unweighted).
    pub slope_stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let w = vec![1.0; x.len()];
    let mut fit = fit_line_weighted(x, y, &w);
    let n = x.len() as f64;
    if x.len() > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| (yi - fit.intercept - fit.slope * xi).powi(2))
            .sum();
        let mean = x.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|xi| (xi - mean).powi(2)).sum();
        fit.slope_stderr = (rss / (n - 2.0) / sxx).sqrt();
    }
    fit
}

/// Weighted least squares with weights `1/sigma^2`; the slope error is the
/// propagated one.
pub fn fit_line_weighted(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    LineFit {
        slope,
        intercept,
        slope_stderr: (sw / det).sqrt(),
    }
}

/// Weighted fit of `y = slope x + intercept + c e^{k x}` with weights
/// `1/sigma^2`. The slope error is the propagated one from the normal
/// equations, so it grows with the freedom given to the extra term.
pub fn fit_line_with_power(x: &[f64], y: &[f64], sigma: &[f64], k: f64) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), sigma.len());
    let design = nalgebra::DMatrix::from_fn(x.len(), 3, |i, j| match j {
        0 => x[i] / sigma[i],
        1 => 1.0 / sigma[i],
        _ => (k * x[i]).exp() / sigma[i],
    });
    let rhs = nalgebra::DVector::from_fn(y.len(), |i, _| y[i] / sigma[i]);
    let normal = design.transpose() * &design;
    let cov = normal.try_inverse().unwrap_or_else(|| nalgebra::DMatrix::from_element(3, 3, f64::NAN));
    let beta = &cov * (design.transpose() * rhs);
    LineFit {
        slope: beta[0],
        intercept: beta[1],
        slope_stderr: cov[(0, 0)].sqrt(),
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
