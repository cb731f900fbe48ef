use std::collections::BTreeMap;

use crate::error::Result;
use crate::linalg::dist;
use crate::model::SdeModel;
use crate::solver::{em_endpoint, BrownianPath};

use super::{check_grid, check_m, check_p, replicate};

pub const DEFAULT_EXPONENT: f64 = 0.45;
/// Values at or below this go to the underflow bin.
pub const UNDERFLOW: f64 = 1e-30;

/// Histogram of `d = (n^exponent |X_2n(1) - X_n(1)|)^p` for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramEntry {
    pub n: usize,
    /// `(b, count)`: bin `b` holds values in `(10^(b/10), 10^((b+1)/10)]`.
    pub bins: Vec<(i32, usize)>,
    pub underflow: usize,
    pub mean: f64,
    /// Order statistic at index `ceil(0.99 m)`.
    pub q99: f64,
    pub min: f64,
    pub max: f64,
}

impl HistogramEntry {
    pub fn total(&self) -> usize {
        self.underflow + self.bins.iter().map(|b| b.1).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramReport {
    pub p: f64,
    pub exponent: f64,
    pub m: usize,
    pub master_seed: u64,
    pub entries: Vec<HistogramEntry>,
}

/// Bin index of a value above [`UNDERFLOW`].
pub(crate) fn bin_of(v: f64) -> i32 {
    let mut b = (10.0 * v.log10()).ceil() as i32 - 1;
    // repair rounding of log10 at bin edges
    if v <= 10f64.powf(b as f64 / 10.0) {
        b -= 1;
    } else if v > 10f64.powf((b + 1) as f64 / 10.0) {
        b += 1;
    }
    b
}

pub fn scaled_diff_histogram(
    model: &SdeModel,
    p: f64,
    n_list: &[usize],
    m: usize,
    exponent: f64,
    master_seed: u64,
) -> Result<HistogramReport> {
    check_p(&[p])?;
    check_m(m)?;
    let big_n = 2 * n_list.iter().copied().max().unwrap_or(0);
    let doubled: Vec<usize> = n_list.iter().map(|n| 2 * n).collect();
    check_grid(&doubled, big_n)?;
    let d = model.dim();
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(m); n_list.len()];
    replicate(
        m,
        |rep| {
            let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
            n_list
                .iter()
                .map(|&n| {
                    let gap = dist(&em_endpoint(model, &path, 2 * n)?, &em_endpoint(model, &path, n)?);
                    Ok(((n as f64).powf(exponent) * gap).powf(p))
                })
                .collect::<Result<Vec<f64>>>()
        },
        |vals| {
            for (s, v) in samples.iter_mut().zip(vals) {
                s.push(v);
            }
        },
    )?;
    let entries = n_list
        .iter()
        .zip(samples)
        .map(|(&n, vals)| summarize(n, vals))
        .collect();
    Ok(HistogramReport {
        p,
        exponent,
        m,
        master_seed,
        entries,
    })
}

fn summarize(n: usize, vals: Vec<f64>) -> HistogramEntry {
    let m = vals.len();
    let mut bins = BTreeMap::new();
    let mut underflow = 0;
    let mut sum = 0.0;
    for &v in &vals {
        sum += v;
        if v <= UNDERFLOW {
            underflow += 1;
        } else {
            *bins.entry(bin_of(v)).or_insert(0usize) += 1;
        }
    }
    let mut sorted = vals;
    sorted.sort_by(f64::total_cmp);
    let q_index = ((0.99 * m as f64).ceil() as usize).clamp(1, m) - 1;
    HistogramEntry {
        n,
        bins: bins.into_iter().collect(),
        underflow,
        mean: sum / m as f64,
        q99: sorted[q_index],
        min: sorted[0],
        max: sorted[m - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example1;

    #[test]
    fn bins_are_left_open() {
        assert_eq!(bin_of(1.0), -1);
        assert_eq!(bin_of(1.0000001), 0);
        assert_eq!(bin_of(10.0), 9);
        assert_eq!(bin_of(10.000001), 10);
        assert_eq!(bin_of(0.01), -21);
        for b in -300..300 {
            let edge = 10f64.powf(b as f64 / 10.0);
            let v = edge * (1.0 + 1e-9);
            assert_eq!(bin_of(v), b, "v = {v}");
        }
    }

    #[test]
    fn quantile_and_counts() {
        let vals: Vec<f64> = (1..=200).map(|k| k as f64).chain([0.0]).collect();
        let e = summarize(4, vals);
        assert_eq!(e.total(), 201);
        assert_eq!(e.underflow, 1);
        // ceil(0.99 * 201) = 199, sorted[198] = 198
        assert_eq!(e.q99, 198.0);
        assert!((e.mean - 20100.0 / 201.0).abs() < 1e-12);
    }

    #[test]
    fn report_counts_sum_to_m() {
        let r = scaled_diff_histogram(&example1(), 2.0, &[8, 32], 300, DEFAULT_EXPONENT, 9).unwrap();
        for e in &r.entries {
            assert_eq!(e.total(), 300);
            assert!(e.min <= e.q99 && e.q99 <= e.max);
        }
    }
}
