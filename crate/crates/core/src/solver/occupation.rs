use crate::error::Result;
use crate::linalg::dist;
use crate::model::SdeModel;

use super::brownian::BrownianPath;
use super::em::em_continuous_eval;

/// Average over `t = k/N`, `k < N`, of `1{d(X_s, Theta) <= |X_t - X_s|}` for
/// the time-continuous scheme, `s` the grid point of `1/n` below `t`.
pub fn occupation_indicator_stat(model: &SdeModel, path: &BrownianPath, n: usize) -> Result<f64> {
    let traj = em_continuous_eval(model, path, n)?;
    let surface = model.surface();
    let big_n = path.steps();
    let block = big_n / n;
    let mut hits = 0usize;
    let mut base_dist = 0.0;
    for k in 0..big_n {
        let base = traj.at(k / block);
        if k % block == 0 {
            base_dist = surface.distance(base);
        }
        if base_dist <= dist(traj.fine_at(k).expect("fine values"), base) {
            hits += 1;
        }
    }
    Ok(hits as f64 / big_n as f64)
}

/// Fraction of the times `k/N`, `k < N`, at which the time-continuous scheme
/// lies strictly within `eps` of the surface, for each `eps` in the list.
pub fn neighborhood_occupation_multi(
    model: &SdeModel,
    path: &BrownianPath,
    n: usize,
    eps_list: &[f64],
) -> Result<Vec<f64>> {
    if let Some(e) = eps_list.iter().find(|e| !(**e >= 0.0)) {
        return Err(crate::Error::InvalidParameter(format!("neighborhood radius {e} must be >= 0")));
    }
    let traj = em_continuous_eval(model, path, n)?;
    let surface = model.surface();
    let big_n = path.steps();
    let mut counts = vec![0usize; eps_list.len()];
    for k in 0..big_n {
        let dk = surface.distance(traj.fine_at(k).expect("fine values"));
        for (c, e) in counts.iter_mut().zip(eps_list) {
            if dk < *e {
                *c += 1;
            }
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / big_n as f64).collect())
}

pub fn neighborhood_occupation(model: &SdeModel, path: &BrownianPath, n: usize, eps: f64) -> Result<f64> {
    Ok(neighborhood_occupation_multi(model, path, n, &[eps])?[0])
}
