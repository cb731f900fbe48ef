use crate::error::Result;
use crate::model::SdeModel;
use crate::solver::{neighborhood_occupation_multi, occupation_indicator_stat, BrownianPath};

use super::fit::{fit_affine, fit_rate, AffineFit, RateFit};
use super::{check_grid, check_m, replicate};

#[derive(Clone, Debug, PartialEq)]
pub struct OccupationDecay {
    pub n_values: Vec<usize>,
    pub big_n: usize,
    pub m: usize,
    /// Mean indicator statistic per `n`.
    pub means: Vec<f64>,
    pub fit: Result<RateFit>,
}

/// Mean over `m` paths of the straddling-indicator occupation statistic per
/// `n`, with a log-log decay fit.
pub fn occupation_decay(
    model: &SdeModel,
    n_list: &[usize],
    big_n: usize,
    m: usize,
    master_seed: u64,
) -> Result<OccupationDecay> {
    check_grid(n_list, big_n)?;
    check_m(m)?;
    let d = model.dim();
    let mut sums = vec![0.0; n_list.len()];
    replicate(
        m,
        |rep| {
            let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
            n_list
                .iter()
                .map(|&n| occupation_indicator_stat(model, &path, n))
                .collect::<Result<Vec<f64>>>()
        },
        |v| sums.iter_mut().zip(v).for_each(|(s, x)| *s += x),
    )?;
    let means: Vec<f64> = sums.into_iter().map(|s| s / m as f64).collect();
    let fit = fit_rate(n_list, &means);
    Ok(OccupationDecay {
        n_values: n_list.to_vec(),
        big_n,
        m,
        means,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodStudy {
    pub n_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub big_n: usize,
    pub m: usize,
    /// `means[i][j]`: mean time fraction within `eps_j` at `n_i`.
    pub means: Vec<Vec<f64>>,
    /// `mean ~ intercept + a eps + b n^(-1/2)`.
    pub fit: Result<AffineFit>,
}

pub fn neighborhood_study(
    model: &SdeModel,
    n_list: &[usize],
    eps_list: &[f64],
    big_n: usize,
    m: usize,
    master_seed: u64,
) -> Result<NeighborhoodStudy> {
    check_grid(n_list, big_n)?;
    check_m(m)?;
    let d = model.dim();
    let mut sums = vec![vec![0.0; eps_list.len()]; n_list.len()];
    replicate(
        m,
        |rep| {
            let path = BrownianPath::sample(master_seed, rep, big_n, d)?;
            n_list
                .iter()
                .map(|&n| neighborhood_occupation_multi(model, &path, n, eps_list))
                .collect::<Result<Vec<Vec<f64>>>>()
        },
        |v| {
            for (row, vals) in sums.iter_mut().zip(v) {
                row.iter_mut().zip(vals).for_each(|(s, x)| *s += x);
            }
        },
    )?;
    let means: Vec<Vec<f64>> = sums
        .into_iter()
        .map(|row| row.into_iter().map(|s| s / m as f64).collect())
        .collect();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (n, row) in n_list.iter().zip(&means) {
        for (e, v) in eps_list.iter().zip(row) {
            rows.push(vec![*e, (*n as f64).powf(-0.5)]);
            y.push(*v);
        }
    }
    let fit = fit_affine(&rows, &y);
    Ok(NeighborhoodStudy {
        n_values: n_list.to_vec(),
        eps_values: eps_list.to_vec(),
        big_n,
        m,
        means,
        fit,
    })
}
