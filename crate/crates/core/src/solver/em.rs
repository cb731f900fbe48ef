use crate::error::{Error, Result};
use crate::model::SdeModel;
use crate::transform::Transform;

use super::brownian::BrownianPath;

/// Euler–Maruyama values on the grid `i/n`, optionally also at every time
/// `k/N` of the underlying Brownian grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EmTrajectory {
    pub n: usize,
    pub dim: usize,
    pub label: String,
    /// `(n + 1) x d`, row `i` is the value at `i/n`.
    pub values: Vec<f64>,
    /// `(N + 1) x d`, row `k` is the time-continuous scheme at `k/N`.
    pub fine: Option<Vec<f64>>,
}

impl EmTrajectory {
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn endpoint(&self) -> &[f64] {
        self.at(self.n)
    }

    pub fn fine_at(&self, k: usize) -> Option<&[f64]> {
        self.fine.as_ref().map(|f| &f[k * self.dim..(k + 1) * self.dim])
    }

    pub fn fine_len(&self) -> usize {
        self.fine.as_ref().map_or(0, |f| f.len() / self.dim)
    }
}

/// Scratch buffers for coefficient evaluations.
pub(crate) struct Workspace {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub dw: Vec<f64>,
}

impl Workspace {
    pub fn new(d: usize) -> Self {
        Self {
            mu: vec![0.0; d],
            sigma: vec![0.0; d * d],
            dw: vec![0.0; d],
        }
    }
}

/// `out = x + mu h + sigma dw`, the single step shared by every scheme variant.
#[inline]
pub(crate) fn em_step(x: &[f64], h: f64, dw: &[f64], mu: &[f64], sigma: &[f64], out: &mut [f64]) {
    let d = x.len();
    for i in 0..d {
        let mut s = x[i] + mu[i] * h;
        let row = &sigma[i * d..(i + 1) * d];
        for j in 0..d {
            s += row[j] * dw[j];
        }
        out[i] = s;
    }
}

fn check_dims(model: &SdeModel, path: &BrownianPath) -> Result<()> {
    if model.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: path.dim(),
        });
    }
    Ok(())
}

/// Discrete scheme on grid `1/n` driven by the block sums of `path`.
pub fn em_discrete(model: &SdeModel, path: &BrownianPath, n: usize) -> Result<EmTrajectory> {
    check_dims(model, path)?;
    let block = path.block(n)?;
    let d = model.dim();
    let dt = 1.0 / n as f64;
    let mut ws = Workspace::new(d);
    let mut values = vec![0.0; (n + 1) * d];
    values[..d].copy_from_slice(model.x0());
    for i in 0..n {
        let (done, rest) = values.split_at_mut((i + 1) * d);
        let x = &done[i * d..];
        model.drift_into(x, &mut ws.mu);
        model.diffusion_into(x, &mut ws.sigma);
        path.coarse_increment_into(block, i, &mut ws.dw);
        em_step(x, dt, &ws.dw, &ws.mu, &ws.sigma, &mut rest[..d]);
    }
    Ok(EmTrajectory {
        n,
        dim: d,
        label: model.name().to_string(),
        values,
        fine: None,
    })
}

/// Endpoint of [`em_discrete`] without storing the trajectory.
pub fn em_endpoint(model: &SdeModel, path: &BrownianPath, n: usize) -> Result<Vec<f64>> {
    check_dims(model, path)?;
    let block = path.block(n)?;
    let d = model.dim();
    let dt = 1.0 / n as f64;
    let mut ws = Workspace::new(d);
    let mut x = model.x0().to_vec();
    let mut next = vec![0.0; d];
    for i in 0..n {
        model.drift_into(&x, &mut ws.mu);
        model.diffusion_into(&x, &mut ws.sigma);
        path.coarse_increment_into(block, i, &mut ws.dw);
        em_step(&x, dt, &ws.dw, &ws.mu, &ws.sigma, &mut next);
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}

/// Time-continuous scheme `X_t = X_s + mu(X_s)(t - s) + sigma(X_s)(W_t - W_s)`,
/// `s` the last grid point `<= t`, evaluated at every `k/N`. Grid values are
/// bitwise those of [`em_discrete`].
pub fn em_continuous_eval(model: &SdeModel, path: &BrownianPath, n: usize) -> Result<EmTrajectory> {
    check_dims(model, path)?;
    let block = path.block(n)?;
    let d = model.dim();
    let big_n = path.steps();
    let mut ws = Workspace::new(d);
    let mut values = vec![0.0; (n + 1) * d];
    let mut fine = vec![0.0; (big_n + 1) * d];
    values[..d].copy_from_slice(model.x0());
    fine[..d].copy_from_slice(model.x0());
    let mut base = model.x0().to_vec();
    for i in 0..n {
        model.drift_into(&base, &mut ws.mu);
        model.diffusion_into(&base, &mut ws.sigma);
        ws.dw.fill(0.0);
        for j in 1..=block {
            let k = i * block + j;
            for (o, w) in ws.dw.iter_mut().zip(path.increment(k - 1)) {
                *o += w;
            }
            let h = j as f64 / big_n as f64;
            em_step(&base, h, &ws.dw, &ws.mu, &ws.sigma, &mut fine[k * d..(k + 1) * d]);
        }
        let end = (i + 1) * block;
        base.copy_from_slice(&fine[end * d..(end + 1) * d]);
        values[(i + 1) * d..(i + 2) * d].copy_from_slice(&base);
    }
    Ok(EmTrajectory {
        n,
        dim: d,
        label: model.name().to_string(),
        values,
        fine: Some(fine),
    })
}

/// Transformation-based scheme: EM for the SDE with coefficients
/// `(mu_G, sigma_G)` started at `G(x0)`, mapped back by `G^{-1}`.
pub fn em_transformed(transform: &Transform, path: &BrownianPath, n: usize) -> Result<Vec<f64>> {
    let model = transform.model();
    check_dims(model, path)?;
    let block = path.block(n)?;
    let d = model.dim();
    let dt = 1.0 / n as f64;
    let mut dw = vec![0.0; d];
    let mut y = transform.g(model.x0())?.as_slice().to_vec();
    let mut next = vec![0.0; d];
    let mut sigma_rm = vec![0.0; d * d];
    for i in 0..n {
        let (mu_g, sigma_g) = transform.coefficients(&y)?;
        for r in 0..d {
            for c in 0..d {
                sigma_rm[r * d + c] = sigma_g[(r, c)];
            }
        }
        path.coarse_increment_into(block, i, &mut dw);
        em_step(&y, dt, &dw, mu_g.as_slice(), &sigma_rm, &mut next);
        std::mem::swap(&mut y, &mut next);
    }
    Ok(transform.g_inv(&y)?.as_slice().to_vec())
}

/// `(nt - i) X_{(i+1)/n} + (i + 1 - nt) X_{i/n}` for `t` in `[i/n, (i+1)/n]`.
pub fn linear_interpolation(traj: &EmTrajectory, t: f64) -> Vec<f64> {
    let n = traj.n;
    let nt = (n as f64 * t.clamp(0.0, 1.0)).min(n as f64);
    let i = (nt.floor() as usize).min(n - 1);
    let w = nt - i as f64;
    interpolate(traj, i, w)
}

/// Interpolant at the fine time `k/N` with `block = N/n`, using the exact
/// weight `(k mod block) / block`.
pub fn interpolate_fine(traj: &EmTrajectory, k: usize, block: usize) -> Vec<f64> {
    let i = k / block;
    if i >= traj.n {
        return traj.endpoint().to_vec();
    }
    interpolate(traj, i, (k % block) as f64 / block as f64)
}

fn interpolate(traj: &EmTrajectory, i: usize, w: f64) -> Vec<f64> {
    if w == 0.0 {
        return traj.at(i).to_vec();
    }
    traj.at(i)
        .iter()
        .zip(traj.at(i + 1))
        .map(|(a, b)| w * b + (1.0 - w) * a)
        .collect()
}
