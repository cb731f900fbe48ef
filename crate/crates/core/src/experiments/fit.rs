use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares line through `(log2 n, log2 value)`; `rate = -slope`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rate: f64,
    pub points: usize,
    /// Exact zeros left out of the fit.
    pub dropped_zeros: usize,
}

pub fn fit_rate(n_values: &[usize], values: &[f64]) -> Result<RateFit> {
    if n_values.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: n_values.len(),
            got: values.len(),
        });
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateInput(format!("value {v} is not a finite nonnegative number")));
    }
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(n, v)| ((*n as f64).log2(), v.log2()))
        .collect();
    let dropped_zeros = values.len() - pts.len();
    if pts.is_empty() && !values.is_empty() {
        return Err(Error::DegenerateInput("identically zero".into()));
    }
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "{} positive points remain after dropping {dropped_zeros} zeros; at least 3 are needed",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all step counts are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    // constant data up to rounding of the mean: a perfect fit
    let flat = ss_tot <= 1e-24 * (1.0 + my * my) * k;
    let r_squared = if flat { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        rate: -slope,
        points: pts.len(),
        dropped_zeros,
    })
}

/// Ordinary least squares `y ~ intercept + sum_j coefficients[j] x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

/// `rows[i]` holds the regressors of observation `i`.
pub fn fit_affine(rows: &[Vec<f64>], y: &[f64]) -> Result<AffineFit> {
    let k = rows.first().map_or(0, |r| r.len());
    if rows.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: y.len(),
        });
    }
    if rows.len() < k + 2 {
        return Err(Error::DegenerateInput(format!(
            "{} observations for {} regressors plus intercept",
            rows.len(),
            k
        )));
    }
    let mut design = DMatrix::zeros(rows.len(), k + 1);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: r.len() });
        }
        design[(i, 0)] = 1.0;
        for j in 0..k {
            design[(i, j + 1)] = r[j];
        }
    }
    let target = DVector::from_column_slice(y);
    let beta = design
        .clone()
        .svd(true, true)
        .solve(&target, 1e-14)
        .map_err(|e| Error::DegenerateInput(e.to_string()))?;
    let fitted = &design * &beta;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = (target - fitted).norm_squared();
    Ok(AffineFit {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        r_squared: if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<usize> {
        (6..=12).map(|k| 1usize << k).collect()
    }

    #[test]
    fn exact_power_law() {
        let ns = grid();
        let v: Vec<f64> = ns.iter().map(|n| 3.0 * (*n as f64).powf(-0.5)).collect();
        let f = fit_rate(&ns, &v).unwrap();
        assert!((f.rate - 0.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let v: Vec<f64> = ns.iter().map(|n| (*n as f64).powf(-0.52)).collect();
        assert!((fit_rate(&ns, &v).unwrap().rate - 0.52).abs() < 1e-12);
    }

    #[test]
    fn constant_values() {
        let ns = grid();
        let f = fit_rate(&ns, &vec![0.3; ns.len()]).unwrap();
        assert!(f.rate.abs() < 1e-14);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn zeros_are_dropped_and_counted() {
        let ns = grid();
        let mut v: Vec<f64> = ns.iter().map(|n| 1.0 / *n as f64).collect();
        v[6] = 0.0;
        let f = fit_rate(&ns, &v).unwrap();
        assert_eq!(f.dropped_zeros, 1);
        assert_eq!(f.points, 6);
        assert!((f.rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_rate(&[2, 4, 8], &[0.0, 0.0, 0.0]), Err(Error::DegenerateInput(_))));
        assert!(matches!(fit_rate(&[2, 4], &[1.0, 0.5]), Err(Error::DegenerateInput(_))));
        assert!(matches!(fit_rate(&[2, 4, 8], &[1.0, -0.5, 0.1]), Err(Error::DegenerateInput(_))));
        assert!(matches!(fit_rate(&[2, 4, 8, 16], &[1.0, 0.0, 0.0, 0.0]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn affine_recovers_plane() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for e in [0.01, 0.05, 0.1, 0.2] {
            for n in grid() {
                let s = (n as f64).powf(-0.5);
                rows.push(vec![e, s]);
                y.push(0.1 + 2.0 * e + 0.7 * s);
            }
        }
        let f = fit_affine(&rows, &y).unwrap();
        assert!((f.intercept - 0.1).abs() < 1e-12);
        assert!((f.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((f.coefficients[1] - 0.7).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }
}
