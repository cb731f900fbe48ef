use crate::error::Result;
use crate::linalg::dist;
use crate::model::SdeModel;
use crate::solver::{em_discrete, em_endpoint, em_transformed, interpolate_fine, BrownianPath};
use crate::transform::Transform;

use super::fit::{fit_rate, RateFit};
use super::{check_grid, check_m, check_p, replicate};

/// Scheme compared against the fine-grid reference.
#[derive(Clone, Copy, Debug)]
pub enum Scheme<'a> {
    Em,
    EmTransformed(&'a Transform),
}

impl Scheme<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Em => "em",
            Scheme::EmTransformed(_) => "em-transformed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// `|X_N(1) - X_n(1)|`.
    Error,
    /// `|X_2n(1) - X_n(1)|`.
    Difference,
    /// `sup_t |X_N(t) - interpolated X_n(t)|`.
    SupError,
}

/// `entries[i][j] = (mean over replications of dist^p_i at n_j)^(1/p_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTable {
    pub kind: TableKind,
    pub p_values: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Finest grid driving all schemes.
    pub reference_n: usize,
    pub m: usize,
    pub master_seed: u64,
    pub entries: Vec<Vec<f64>>,
}

impl ErrorTable {
    pub fn value(&self, p: f64, n: usize) -> Option<f64> {
        let i = self.p_values.iter().position(|q| *q == p)?;
        let j = self.n_values.iter().position(|k| *k == n)?;
        Some(self.entries[i][j])
    }

    /// Log-log fit across `n` for each `p`.
    pub fn rates(&self) -> Vec<(f64, Result<RateFit>)> {
        self.p_values
            .iter()
            .zip(&self.entries)
            .map(|(p, row)| (*p, fit_rate(&self.n_values, row)))
            .collect()
    }

    pub fn rate(&self, p: f64) -> Option<Result<RateFit>> {
        let i = self.p_values.iter().position(|q| *q == p)?;
        Some(fit_rate(&self.n_values, &self.entries[i]))
    }
}

/// Accumulates `sum dist^p` per `(p, n)` and finishes to p-th means.
fn power_means(
    kind: TableKind,
    p_list: &[f64],
    n_list: &[usize],
    reference_n: usize,
    m: usize,
    master_seed: u64,
    per_rep: impl Fn(u64) -> Result<Vec<f64>> + Sync,
) -> Result<ErrorTable> {
    let mut sums = vec![vec![0.0f64; n_list.len()]; p_list.len()];
    replicate(m, per_rep, |dists| {
        for (row, p) in sums.iter_mut().zip(p_list) {
            for (s, r) in row.iter_mut().zip(&dists) {
                *s += r.powf(*p);
            }
        }
    })?;
    let entries = sums
        .into_iter()
        .zip(p_list)
        .map(|(row, p)| row.into_iter().map(|s| (s / m as f64).powf(1.0 / p)).collect())
        .collect();
    Ok(ErrorTable {
        kind,
        p_values: p_list.to_vec(),
        n_values: n_list.to_vec(),
        reference_n,
        m,
        master_seed,
        entries,
    })
}

/// Empirical `L_p` error at time 1 against EM on the finest grid `big_n`,
/// every step size driven by the same Brownian path per replication.
pub fn empirical_error(
    model: &SdeModel,
    scheme: Scheme<'_>,
    p_list: &[f64],
    n_list: &[usize],
    big_n: usize,
    m: usize,
    master_seed: u64,
) -> Result<ErrorTable> {
    check_p(p_list)?;
    check_grid(n_list, big_n)?;
    check_m(m)?;
    let d = model.dim();
    power_means(TableKind::Error, p_list, n_list, big_n, m, master_seed, |rep| {
        let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
        let reference = em_endpoint(model, &path, big_n)?;
        n_list
            .iter()
            .map(|&n| {
                let x = match scheme {
                    Scheme::Em => em_endpoint(model, &path, n)?,
                    Scheme::EmTransformed(t) => em_transformed(t, &path, n)?,
                };
                Ok(dist(&reference, &x))
            })
            .collect()
    })
}

/// Empirical `L_p` norm of `X_2n(1) - X_n(1)` on a path with `N = 2 max(n)`.
pub fn empirical_diff(
    model: &SdeModel,
    p_list: &[f64],
    n_list: &[usize],
    m: usize,
    master_seed: u64,
) -> Result<ErrorTable> {
    check_p(p_list)?;
    check_m(m)?;
    let big_n = 2 * n_list.iter().copied().max().unwrap_or(0);
    let doubled: Vec<usize> = n_list.iter().map(|n| 2 * n).collect();
    check_grid(&doubled, big_n)?;
    let d = model.dim();
    power_means(TableKind::Difference, p_list, n_list, big_n, m, master_seed, |rep| {
        let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
        n_list
            .iter()
            .map(|&n| Ok(dist(&em_endpoint(model, &path, 2 * n)?, &em_endpoint(model, &path, n)?)))
            .collect()
    })
}

/// Empirical `L_p` norm of the sup over `t = k/N` of the distance between
/// the finest-grid scheme and the piecewise-linear interpolant of `X_n`.
pub fn empirical_sup_error(
    model: &SdeModel,
    p_list: &[f64],
    n_list: &[usize],
    big_n: usize,
    m: usize,
    master_seed: u64,
) -> Result<ErrorTable> {
    check_p(p_list)?;
    check_grid(n_list, big_n)?;
    check_m(m)?;
    let d = model.dim();
    power_means(TableKind::SupError, p_list, n_list, big_n, m, master_seed, |rep| {
        let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
        let reference = em_discrete(model, &path, big_n)?;
        n_list
            .iter()
            .map(|&n| {
                let coarse = em_discrete(model, &path, n)?;
                let block = big_n / n;
                Ok((0..=big_n)
                    .map(|k| dist(reference.at(k), &interpolate_fine(&coarse, k, block)))
                    .fold(0.0, f64::max))
            })
            .collect()
    })
}
