//! The near-identity map `G(x) = x + Phi_eps(x) alpha(pr(x))` supported in
//! the tube of radius `eps` around the surface, its derivatives, its inverse
//! and the transformed coefficients `mu_G`, `sigma_G`.
//!
//! `Phi_eps(x) = s lambda^2 phi(lambda/eps)` where `lambda = |x - pr(x)|` and
//! `s` is the side of `x`. `Phi_eps` is `C^1` across the surface with zero
//! gradient there, so `G` fixes the surface pointwise with `G' = I` on it,
//! while its second derivative jumps by exactly the amount that cancels the
//! drift discontinuity in `mu_G`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Uniform;

use crate::error::{Error, Result};
use crate::model::{sample_tube_point, SdeModel};

/// Offsets at or below this are on the surface for second-derivative purposes.
pub const SURFACE_OFFSET_TOL: f64 = 1e-10;

/// `(1 - u^2)^4` on `[-1, 1]`, zero elsewhere.
pub fn bump_phi(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        let w = 1.0 - u * u;
        let w2 = w * w;
        w2 * w2
    } else {
        0.0
    }
}

/// `f_eps(u) = u (1 - u/eps^2)^4`.
pub fn f_eps(u: f64, eps: f64) -> f64 {
    let w = 1.0 - u / (eps * eps);
    let w2 = w * w;
    u * w2 * w2
}

/// `f_eps'(u) = 1 - 8u/eps^2 + 18u^2/eps^4 - 16u^3/eps^6 + 5u^4/eps^8`.
pub fn f_eps_d1(u: f64, eps: f64) -> f64 {
    let v = u / (eps * eps);
    1.0 + v * (-8.0 + v * (18.0 + v * (-16.0 + 5.0 * v)))
}

/// `f_eps''(u) = -8/eps^2 + 36u/eps^4 - 48u^2/eps^6 + 20u^3/eps^8`.
pub fn f_eps_d2(u: f64, eps: f64) -> f64 {
    let e2 = eps * eps;
    let v = u / e2;
    (-8.0 + v * (36.0 + v * (-48.0 + 20.0 * v))) / e2
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformParams {
    /// Tube radius; `None` selects `0.1 * min(reach, 1)`.
    pub eps: Option<f64>,
    /// Relative finite-difference step for derivatives of `alpha o pr`.
    pub fd_step: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub certificate_samples: usize,
    /// Upper bound on the sampled `|Gamma|` required for construction.
    pub certificate_bound: f64,
    pub certificate_seed: u64,
}

impl Default for TransformParams {
    fn default() -> Self {
        Self {
            eps: None,
            fd_step: 1e-5,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            certificate_samples: 10_000,
            certificate_bound: 0.9,
            certificate_seed: 0x5eed_cafe,
        }
    }
}

/// One line of the certificate report.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateRow {
    pub quantity: &'static str,
    pub sampled_sup: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub eps: f64,
    pub samples: usize,
    pub rows: Vec<CertificateRow>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertificateRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Local frame of a point inside the tube.
struct Frame {
    theta: DVector<f64>,
    /// `x - pr(x)`.
    diff: DVector<f64>,
    /// Signed offset `<n, x - pr(x)>`.
    offset: f64,
    r2: f64,
}

#[derive(Clone, Debug)]
pub struct Transform {
    model: SdeModel,
    eps: f64,
    params: TransformParams,
    alpha_sup: f64,
    gamma_sup: f64,
}

impl Transform {
    /// Builds the transform and checks the sampled contraction certificate
    /// `sup |alpha(pr x) Phi'(x) + Phi(x) (alpha o pr)'(x)| < certificate_bound`.
    pub fn new(model: SdeModel, params: TransformParams) -> Result<Self> {
        let t = Self::build(model, params)?;
        if t.gamma_sup >= t.params.certificate_bound {
            return Err(Error::CertificateFailed {
                quantity: "contraction |Gamma|".into(),
                value: t.gamma_sup,
                bound: t.params.certificate_bound,
            });
        }
        Ok(t)
    }

    /// Builds the transform and samples `sup |alpha|` and `sup |Gamma|` without
    /// enforcing the certificate.
    pub fn build(model: SdeModel, params: TransformParams) -> Result<Self> {
        let reach = model.surface().reach();
        let eps = params.eps.unwrap_or(0.1 * reach.min(1.0));
        if !(eps > 0.0 && eps < reach) {
            return Err(Error::InvalidParameter(format!(
                "tube radius {eps} must lie in (0, reach = {reach})"
            )));
        }
        if params.certificate_samples == 0 {
            return Err(Error::InvalidParameter("certificate_samples must be >= 1".into()));
        }
        let mut t = Self {
            model,
            eps,
            params,
            alpha_sup: 0.0,
            gamma_sup: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(t.params.certificate_seed);
        let offset = Uniform::new(-eps, eps).expect("eps > 0");
        let (mut alpha_sup, mut gamma_sup) = (0.0f64, 0.0f64);
        for _ in 0..t.params.certificate_samples {
            let x = sample_tube_point(t.model.surface().as_ref(), &mut rng, &offset)?;
            alpha_sup = alpha_sup.max(t.alpha_pr(&x)?.norm());
            gamma_sup = gamma_sup.max(t.gamma(&x)?.norm());
        }
        t.alpha_sup = alpha_sup;
        t.gamma_sup = gamma_sup;
        Ok(t)
    }

    pub fn model(&self) -> &SdeModel {
        &self.model
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn params(&self) -> &TransformParams {
        &self.params
    }

    /// Sampled `sup |alpha o pr|` over the tube.
    pub fn alpha_sup(&self) -> f64 {
        self.alpha_sup
    }

    /// Sampled `sup |Gamma|` over the tube (Frobenius norm).
    pub fn gamma_sup(&self) -> f64 {
        self.gamma_sup
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn frame(&self, x: &[f64]) -> Result<Option<Frame>> {
        let surface = self.model.surface();
        if surface.distance(x) >= self.eps {
            return Ok(None);
        }
        let theta = surface.project(x)?;
        let normal = surface.normal_at(theta.as_slice())?;
        let diff = DVector::from_column_slice(x) - &theta;
        let offset = normal.dot(&diff);
        let r2 = diff.norm_squared();
        Ok(Some(Frame {
            theta,
            diff,
            offset,
            r2,
        }))
    }

    fn fd_h(&self, x: &[f64]) -> f64 {
        self.params.fd_step * crate::linalg::norm(x).max(1.0)
    }

    /// `Phi_eps(x) = <n(pr x), x - pr x> |x - pr x| phi(|x - pr x| / eps)`.
    pub fn phi(&self, x: &[f64]) -> Result<f64> {
        Ok(match self.frame(x)? {
            None => 0.0,
            Some(f) => {
                let r = f.r2.sqrt();
                f.offset * r * bump_phi(r / self.eps)
            }
        })
    }

    /// Gradient of `Phi_eps`, `s f_eps'(|x - pr x|^2) 2 (x - pr x)`.
    pub fn phi_grad(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(match self.frame(x)? {
            None => DVector::zeros(self.dim()),
            Some(f) => self.phi_grad_in(&f),
        })
    }

    fn phi_grad_in(&self, f: &Frame) -> DVector<f64> {
        if f.offset == 0.0 {
            return DVector::zeros(f.diff.len());
        }
        &f.diff * (side(f.offset) * 2.0 * f_eps_d1(f.r2, self.eps))
    }

    /// Hessian of `Phi_eps` off the surface,
    /// `s [4 f'' (x - pr)(x - pr)^T + 2 f' (I - pr'(x))^T]`.
    pub fn phi_hess(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        match self.frame(x)? {
            None => Ok(DMatrix::zeros(self.dim(), self.dim())),
            Some(f) => self.phi_hess_in(x, &f),
        }
    }

    fn phi_hess_in(&self, x: &[f64], f: &Frame) -> Result<DMatrix<f64>> {
        if f.offset.abs() <= SURFACE_OFFSET_TOL {
            return Err(Error::OnSurface { offset: f.offset });
        }
        let d = self.dim();
        let s = side(f.offset);
        let pr_jac = self.model.surface().projection_jacobian(x)?;
        let outer = &f.diff * f.diff.transpose();
        let tangential = (DMatrix::identity(d, d) - pr_jac).transpose();
        Ok((outer * (4.0 * f_eps_d2(f.r2, self.eps)) + tangential * (2.0 * f_eps_d1(f.r2, self.eps))) * s)
    }

    /// `alpha(pr(x))`; requires `x` inside the reach tube.
    pub fn alpha_pr(&self, x: &[f64]) -> Result<DVector<f64>> {
        let theta = self.model.surface().project(x)?;
        self.model.jump_alpha(theta.as_slice())
    }

    /// Jacobian of `alpha o pr` by central differences; row `i` is the
    /// gradient of component `i`.
    pub fn alpha_pr_jac(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let h = self.fd_h(x);
        self.alpha_pr_jac_with(x, h)
    }

    fn alpha_pr_jac_with(&self, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut jac = DMatrix::zeros(d, d);
        let mut xs = x.to_vec();
        for k in 0..d {
            xs[k] = x[k] + h;
            let ap = self.alpha_pr(&xs)?;
            xs[k] = x[k] - h;
            let am = self.alpha_pr(&xs)?;
            xs[k] = x[k];
            for i in 0..d {
                jac[(i, k)] = (ap[i] - am[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    /// Hessians of the components of `alpha o pr` by nested central
    /// differences, symmetrized.
    pub fn alpha_pr_hess(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        let h = self.fd_h(x);
        let mut hess = vec![DMatrix::zeros(d, d); d];
        let mut xs = x.to_vec();
        for k in 0..d {
            xs[k] = x[k] + h;
            let jp = self.alpha_pr_jac_with(&xs, h)?;
            xs[k] = x[k] - h;
            let jm = self.alpha_pr_jac_with(&xs, h)?;
            xs[k] = x[k];
            for (i, hi) in hess.iter_mut().enumerate() {
                for j in 0..d {
                    hi[(j, k)] = (jp[(i, j)] - jm[(i, j)]) / (2.0 * h);
                }
            }
        }
        for hi in &mut hess {
            let sym = (&*hi + hi.transpose()) * 0.5;
            *hi = sym;
        }
        Ok(hess)
    }

    /// `Gamma(x) = alpha(pr x) Phi'(x) + Phi(x) (alpha o pr)'(x)`, so that
    /// `G'(x) = I + Gamma(x)`.
    pub fn gamma(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let Some(f) = self.frame(x)? else {
            return Ok(DMatrix::zeros(d, d));
        };
        let phi = self.phi_from(&f);
        let grad = self.phi_grad_in(&f);
        if phi == 0.0 && grad.iter().all(|g| *g == 0.0) {
            return Ok(DMatrix::zeros(d, d));
        }
        let alpha = self.model.jump_alpha(f.theta.as_slice())?;
        let mut gamma = &alpha * grad.transpose();
        if phi != 0.0 {
            gamma += self.alpha_pr_jac(x)? * phi;
        }
        Ok(gamma)
    }

    fn phi_from(&self, f: &Frame) -> f64 {
        let r = f.r2.sqrt();
        f.offset * r * bump_phi(r / self.eps)
    }

    pub fn g(&self, x: &[f64]) -> Result<DVector<f64>> {
        let xv = DVector::from_column_slice(x);
        let Some(f) = self.frame(x)? else {
            return Ok(xv);
        };
        let phi = self.phi_from(&f);
        if phi == 0.0 {
            return Ok(xv);
        }
        Ok(xv + self.model.jump_alpha(f.theta.as_slice())? * phi)
    }

    pub fn g_jac(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        Ok(DMatrix::identity(d, d) + self.gamma(x)?)
    }

    /// Second derivative of component `i` of `G` off the surface.
    pub fn g_hess(&self, x: &[f64], i: usize) -> Result<DMatrix<f64>> {
        if i >= self.dim() {
            return Err(Error::InvalidParameter(format!("component {i} out of range")));
        }
        Ok(self.g_hess_all(x)?.swap_remove(i))
    }

    /// Second derivatives of all components of `G`:
    /// `a_i^T Phi' + alpha_i Phi'' + Phi'^T a_i + Phi H_i` with `a_i` the
    /// gradient and `H_i` the Hessian of `alpha_i o pr`.
    pub fn g_hess_all(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        let Some(f) = self.frame(x)? else {
            return Ok(vec![DMatrix::zeros(d, d); d]);
        };
        let phi_hess = self.phi_hess_in(x, &f)?;
        let phi = self.phi_from(&f);
        let grad = self.phi_grad_in(&f);
        let alpha = self.model.jump_alpha(f.theta.as_slice())?;
        let a_jac = self.alpha_pr_jac(x)?;
        let a_hess = if phi != 0.0 { Some(self.alpha_pr_hess(x)?) } else { None };
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            let a_i = a_jac.row(i).transpose();
            let mut h = &a_i * grad.transpose() + &grad * a_i.transpose() + &phi_hess * alpha[i];
            if let Some(ah) = &a_hess {
                h += &ah[i] * phi;
            }
            out.push(h);
        }
        Ok(out)
    }

    /// Distance beyond which `G^{-1}` is the identity.
    fn identity_radius(&self) -> f64 {
        self.eps + self.eps * self.eps * self.alpha_sup * 1.1
    }

    /// Newton inversion of `G` started at `y`.
    pub fn g_inv(&self, y: &[f64]) -> Result<DVector<f64>> {
        let yv = DVector::from_column_slice(y);
        if self.model.surface().distance(y) >= self.identity_radius() {
            return Ok(yv);
        }
        let mut x = yv.clone();
        let mut residual = f64::INFINITY;
        for _ in 0..=self.params.newton_max_iter {
            let r = self.g(x.as_slice())? - &yv;
            residual = r.norm();
            if residual <= self.params.newton_tol {
                return Ok(x);
            }
            let jac = self.g_jac(x.as_slice())?;
            let step = jac.lu().solve(&r).ok_or(Error::NoConvergence {
                iterations: 0,
                residual,
            })?;
            x -= step;
        }
        Err(Error::NoConvergence {
            iterations: self.params.newton_max_iter,
            residual,
        })
    }

    /// `mu_G` and `sigma_G` evaluated at the preimage `x = G^{-1}(y)`.
    pub fn coefficients_at_preimage(&self, x: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let d = self.dim();
        let mu = self.model.drift_eval(x);
        let sigma = self.model.diffusion_eval(x);
        let Some(f) = self.frame(x)? else {
            return Ok((mu, sigma));
        };
        if f.offset.abs() <= SURFACE_OFFSET_TOL {
            return Err(Error::OnSurfacePoint { offset: f.offset });
        }
        let jac = self.g_jac(x)?;
        let cov = &sigma * sigma.transpose();
        let hess = self.g_hess_all(x)?;
        let mut mu_g = &jac * mu;
        for i in 0..d {
            mu_g[i] += 0.5 * (&hess[i] * &cov).trace();
        }
        Ok((mu_g, jac * sigma))
    }

    pub fn mu_g(&self, y: &[f64]) -> Result<DVector<f64>> {
        let x = self.g_inv(y)?;
        Ok(self.coefficients_at_preimage(x.as_slice())?.0)
    }

    pub fn sigma_g(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let x = self.g_inv(y)?;
        Ok(self.g_jac(x.as_slice())? * self.model.diffusion_eval(x.as_slice()))
    }

    /// `(mu_G(y), sigma_G(y))`. A preimage on the surface is nudged by `1e-9`
    /// to its own side (the outer side when the offset is exactly zero);
    /// `mu_G` is continuous, so this is the one-sided limit up to `O(1e-9)`.
    pub fn coefficients(&self, y: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let x = self.g_inv(y)?;
        match self.coefficients_at_preimage(x.as_slice()) {
            Err(Error::OnSurfacePoint { offset }) => {
                let surface = self.model.surface();
                let theta = surface.project(x.as_slice())?;
                let normal = surface.normal_at(theta.as_slice())?;
                let nudged = theta + normal * (side(offset) * 1e-9);
                log::debug!("transformed drift on the surface at {:?}; using nudged preimage", x.as_slice());
                let (mu_g, _) = self.coefficients_at_preimage(nudged.as_slice())?;
                Ok((mu_g, self.g_jac(x.as_slice())? * self.model.diffusion_eval(x.as_slice())))
            }
            other => other,
        }
    }

    /// Sampled `max_i |G_i''|_F` over the tube, skipping on-surface samples.
    pub fn hessian_sup(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = Uniform::new(-self.eps, self.eps).expect("eps > 0");
        let mut sup = 0.0f64;
        for _ in 0..samples {
            let x = sample_tube_point(self.model.surface().as_ref(), &mut rng, &offset)?;
            match self.g_hess_all(&x) {
                Ok(hs) => {
                    for h in hs {
                        sup = sup.max(h.norm());
                    }
                }
                Err(Error::OnSurface { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(sup)
    }

    /// Full sampled report: bounds on `Phi`, `Phi'`, the contraction, `G'` on
    /// the surface and the inversion round trip.
    pub fn certificate_report(&self) -> Result<CertificateReport> {
        let n = self.params.certificate_samples;
        let eps = self.eps;
        let surface = self.model.surface().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.certificate_seed ^ 0x9e37_79b9_7f4a_7c15);
        let tube = Uniform::new(-eps, eps).expect("eps > 0");
        let wide = Uniform::new(-2.0 * eps, 2.0 * eps).expect("eps > 0");
        let (mut phi_sup, mut grad_sup) = (0.0f64, 0.0f64);
        let (mut jac_dev, mut fix_dev, mut roundtrip) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..n {
            let x = sample_tube_point(surface.as_ref(), &mut rng, &tube)?;
            phi_sup = phi_sup.max(self.phi(&x)?.abs());
            grad_sup = grad_sup.max(self.phi_grad(&x)?.norm());

            let theta = surface.sample_point(&mut rng);
            let d = self.dim();
            jac_dev = jac_dev.max((self.g_jac(theta.as_slice())? - DMatrix::identity(d, d)).amax());
            fix_dev = fix_dev.max((self.g(theta.as_slice())? - &theta).amax());

            if 2.0 * eps < surface.reach() {
                let z = sample_tube_point(surface.as_ref(), &mut rng, &wide)?;
                let back = self.g_inv(self.g(&z)?.as_slice())?;
                roundtrip = roundtrip.max((back - DVector::from_column_slice(&z)).norm());
            }
        }
        let row = |quantity, sampled_sup: f64, bound: f64, strict: bool| CertificateRow {
            quantity,
            sampled_sup,
            bound,
            pass: if strict { sampled_sup < bound } else { sampled_sup <= bound },
        };
        Ok(CertificateReport {
            eps,
            samples: n,
            rows: vec![
                row("contraction |Gamma|", self.gamma_sup, self.params.certificate_bound, true),
                row("|Phi|", phi_sup, eps * eps, false),
                row("|Phi'|", grad_sup, 96.0 * eps, false),
                row("|G'(theta) - I| on surface", jac_dev, 1e-8, false),
                row("|G(theta) - theta| on surface", fix_dev, 0.0, false),
                row("|G^-1(G(x)) - x|", roundtrip, 1e-10, false),
                row("|alpha o pr|", self.alpha_sup, f64::INFINITY, true),
            ],
        })
    }
}

#[inline]
fn side(offset: f64) -> f64 {
    if offset < 0.0 {
        -1.0
    } else {
        1.0
    }
}
