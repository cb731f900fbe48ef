use crate::error::{Error, Result};
use crate::linalg::mul_transpose;
use crate::transform::Transform;

use super::brownian::BrownianPath;
use super::em::em_continuous_eval;

pub const HESSIAN_SAMPLES: usize = 10_000;
pub const HESSIAN_SAFETY: f64 = 1.5;

/// Both sides of the pathwise bound
/// `sup_t |G(X_t) - Z_t| <= C int_0^1 |sigma sigma^T(X_s) - sigma sigma^T(X_t)| dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ItoResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// Quadrature allowance `10 sqrt(d) / N`.
    pub slack: f64,
}

impl ItoResidual {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.slack
    }
}

/// Holds the transform and the constant `C = 1.5 * sup max_i |G_i''|_F`.
#[derive(Clone, Debug)]
pub struct ItoDiagnostic<'a> {
    transform: &'a Transform,
    constant: f64,
}

impl<'a> ItoDiagnostic<'a> {
    pub fn new(transform: &'a Transform, seed: u64) -> Result<Self> {
        let sup = transform.hessian_sup(HESSIAN_SAMPLES, seed)?;
        Ok(Self {
            transform,
            constant: HESSIAN_SAFETY * sup,
        })
    }

    pub fn with_constant(transform: &'a Transform, constant: f64) -> Self {
        Self { transform, constant }
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `Z` is assembled by left-point sums on the grid `1/N`:
    /// `dZ = [G'(X_t) mu(X_s) + 1/2 tr(G_i''(X_t) sigma sigma^T(X_s))] dt + G'(X_t) sigma(X_s) dW`,
    /// with the `G''` term dropped where `X_t` lies on the surface.
    pub fn residual(&self, path: &BrownianPath, n: usize) -> Result<ItoResidual> {
        let t = self.transform;
        let model = t.model();
        let traj = em_continuous_eval(model, path, n)?;
        let d = model.dim();
        let big_n = path.steps();
        let block = big_n / n;
        let h = 1.0 / big_n as f64;

        let mut mu = vec![0.0; d];
        let mut sig_s = vec![0.0; d * d];
        let mut sig_t = vec![0.0; d * d];
        let mut cov_s = vec![0.0; d * d];
        let mut cov_t = vec![0.0; d * d];

        let mut z = t.g(model.x0())?.as_slice().to_vec();
        let mut lhs = 0.0f64;
        let mut integral = 0.0;
        for k in 0..big_n {
            let x = traj.fine_at(k).expect("fine values");
            let gx = t.g(x)?;
            lhs = lhs.max(gx.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());

            let base = traj.at(k / block);
            model.drift_into(base, &mut mu);
            model.diffusion_into(base, &mut sig_s);
            model.diffusion_into(x, &mut sig_t);
            mul_transpose(&sig_s, &sig_s, d, &mut cov_s);
            mul_transpose(&sig_t, &sig_t, d, &mut cov_t);
            integral += cov_s.iter().zip(&cov_t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();

            let jac = t.g_jac(x)?;
            let hess = match t.g_hess_all(x) {
                Ok(hs) => Some(hs),
                Err(Error::OnSurface { .. }) => None,
                Err(e) => return Err(e),
            };
            let dw = path.increment(k);
            for i in 0..d {
                let mut drift = 0.0;
                let mut noise = 0.0;
                for j in 0..d {
                    drift += jac[(i, j)] * mu[j];
                    let mut sdw = 0.0;
                    for l in 0..d {
                        sdw += sig_s[j * d + l] * dw[l];
                    }
                    noise += jac[(i, j)] * sdw;
                }
                if let Some(hs) = &hess {
                    let mut tr = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            tr += hs[i][(a, b)] * cov_s[b * d + a];
                        }
                    }
                    drift += 0.5 * tr;
                }
                z[i] += drift * h + noise;
            }
        }
        let gx = t.g(traj.fine_at(big_n).expect("fine values"))?;
        lhs = lhs.max(gx.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
        Ok(ItoResidual {
            lhs,
            rhs: self.constant * integral / big_n as f64,
            slack: 10.0 * (d as f64).sqrt() / big_n as f64,
        })
    }
}

/// One-shot form of [`ItoDiagnostic::residual`].
pub fn ito_residual(transform: &Transform, path: &BrownianPath, n: usize, seed: u64) -> Result<ItoResidual> {
    ItoDiagnostic::new(transform, seed)?.residual(path, n)
}
