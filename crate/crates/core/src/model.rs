//! SDE models `dX = mu(X) dt + sigma(X) dW` with a drift that is smooth on
//! each connected component of the complement of a hypersurface and may jump
//! across it.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::geometry::{Hypersurface, PointSet1d, Sphere};
use crate::linalg::{frobenius, norm};
use crate::transform::bump_phi;

/// Offsets at or below this magnitude are treated as lying on the surface.
pub const ON_SURFACE_EVAL_TOL: f64 = 1e-12;

/// Threshold below which a sampled nondegeneracy minimum triggers a warning.
pub const NONDEGENERACY_WARN: f64 = 1e-6;

/// `f(x, out)` writes a vector in `R^d`.
pub type VectorFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// `f(x, out)` writes a row-major `d x d` matrix.
pub type MatrixFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// Maps a point off the surface to a piece index.
pub type RegionFn = Arc<dyn Fn(&[f64]) -> usize + Send + Sync>;

/// Drift of the form `f_0 1_Theta + sum_i f_i 1_{K_i}`.
///
/// Pieces are indexed by region. Unless a custom classifier is supplied the
/// regions are those of [`Hypersurface::region_of`]; a single piece means the
/// drift is smooth everywhere.
#[derive(Clone)]
pub struct PiecewiseDrift {
    surface: Arc<dyn Hypersurface>,
    pieces: Vec<VectorFn>,
    on_surface: Option<VectorFn>,
    classifier: Option<RegionFn>,
}

impl PiecewiseDrift {
    pub fn new(surface: Arc<dyn Hypersurface>, pieces: Vec<VectorFn>) -> Result<Self> {
        if pieces.len() != 1 && pieces.len() != surface.region_count() {
            return Err(Error::InvalidParameter(format!(
                "expected 1 or {} drift pieces, got {}",
                surface.region_count(),
                pieces.len()
            )));
        }
        Ok(Self {
            surface,
            pieces,
            on_surface: None,
            classifier: None,
        })
    }

    /// A drift without a jump.
    pub fn smooth(surface: Arc<dyn Hypersurface>, f: VectorFn) -> Self {
        Self {
            surface,
            pieces: vec![f],
            on_surface: None,
            classifier: None,
        }
    }

    /// Value used on the surface itself.
    pub fn with_on_surface(mut self, f0: VectorFn) -> Self {
        self.on_surface = Some(f0);
        self
    }

    /// Replaces the surface's region numbering; indices must address `pieces`.
    pub fn with_classifier(mut self, classifier: RegionFn) -> Self {
        self.classifier = Some(classifier);
        self
    }

    pub fn surface(&self) -> &Arc<dyn Hypersurface> {
        &self.surface
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn classify(&self, x: &[f64]) -> usize {
        if self.pieces.len() == 1 {
            return 0;
        }
        match &self.classifier {
            Some(c) => c(x),
            None => self.surface.region_of(x),
        }
    }

    pub fn eval_piece(&self, piece: usize, x: &[f64], out: &mut [f64]) {
        (self.pieces[piece])(x, out)
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        if self.pieces.len() > 1 && self.surface.distance(x) <= ON_SURFACE_EVAL_TOL {
            match &self.on_surface {
                Some(f0) => f0(x, out),
                None => {
                    let piece = self.outer_piece(x);
                    self.eval_piece(piece, x, out)
                }
            }
            return;
        }
        let piece = self.classify(x);
        self.eval_piece(piece, x, out)
    }

    fn probe_step(&self) -> f64 {
        (0.25 * self.surface.reach()).min(1e-6)
    }

    /// Pieces on the inner (`-n`) and outer (`+n`) side of a surface point.
    pub fn adjacent_pieces(&self, theta: &[f64]) -> Result<(usize, usize)> {
        let normal = self.surface.normal_at(theta)?;
        let h = self.probe_step();
        let shifted = |s: f64| -> Vec<f64> {
            theta
                .iter()
                .zip(normal.iter())
                .map(|(t, n)| t + s * h * n)
                .collect()
        };
        Ok((self.classify(&shifted(-1.0)), self.classify(&shifted(1.0))))
    }

    fn outer_piece(&self, x: &[f64]) -> usize {
        let outer = self
            .surface
            .project(x)
            .and_then(|theta| self.adjacent_pieces(theta.as_slice()));
        match outer {
            Ok((_, j)) => j,
            Err(_) => self.classify(x),
        }
    }
}

impl fmt::Debug for PiecewiseDrift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseDrift")
            .field("surface", &self.surface.describe())
            .field("pieces", &self.pieces.len())
            .field("on_surface", &self.on_surface.is_some())
            .field("custom_classifier", &self.classifier.is_some())
            .finish()
    }
}

#[derive(Clone)]
pub struct Diffusion {
    sigma: MatrixFn,
}

impl Diffusion {
    pub fn new(sigma: MatrixFn) -> Self {
        Self { sigma }
    }

    /// `sigma(x) = c I`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        Self::new(Arc::new(move |_x: &[f64], out: &mut [f64]| {
            out.fill(0.0);
            for i in 0..dim {
                out[i * dim + i] = c;
            }
        }))
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.sigma)(x, out)
    }
}

impl fmt::Debug for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Diffusion(..)")
    }
}

#[derive(Clone, Debug)]
pub struct SdeModel {
    name: String,
    x0: Vec<f64>,
    drift: PiecewiseDrift,
    diffusion: Diffusion,
}

/// Result of the sampled nondegeneracy check.
#[derive(Clone, Debug, PartialEq)]
pub struct NondegeneracyReport {
    pub min_norm: f64,
    pub samples: usize,
    pub warning: Option<String>,
}

/// Result of the sampled local boundedness check on a tube.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessReport {
    pub sup_drift: f64,
    pub sup_diffusion: f64,
    pub samples: usize,
}

impl SdeModel {
    pub fn new(
        name: impl Into<String>,
        x0: Vec<f64>,
        drift: PiecewiseDrift,
        diffusion: Diffusion,
    ) -> Result<Self> {
        let d = drift.surface().dim();
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x0.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            x0,
            drift,
            diffusion,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x0.len(),
            });
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn surface(&self) -> &Arc<dyn Hypersurface> {
        self.drift.surface()
    }

    pub fn drift(&self) -> &PiecewiseDrift {
        &self.drift
    }

    #[inline]
    pub fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        self.drift.eval(x, out)
    }

    #[inline]
    pub fn diffusion_into(&self, x: &[f64], out: &mut [f64]) {
        self.diffusion.eval(x, out)
    }

    pub fn drift_eval(&self, x: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        self.drift_into(x, out.as_mut_slice());
        out
    }

    pub fn diffusion_eval(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let mut buf = vec![0.0; d * d];
        self.diffusion_into(x, &mut buf);
        DMatrix::from_row_slice(d, d, &buf)
    }

    /// `|sigma(theta)^T n(theta)|`.
    pub fn normal_noise(&self, theta: &[f64]) -> Result<f64> {
        let normal = self.surface().normal_at(theta)?;
        let sigma = self.diffusion_eval(theta);
        Ok((sigma.transpose() * normal).norm())
    }

    /// Jump function `alpha(theta) = (f_inner - f_outer) / (2 |sigma^T n|^2)`
    /// where inner/outer are the pieces on the `-n`/`+n` side of `theta`.
    /// Returns zero without consulting the diffusion when the pieces agree.
    pub fn jump_alpha(&self, theta: &[f64]) -> Result<DVector<f64>> {
        let d = self.dim();
        let (inner, outer) = self.drift.adjacent_pieces(theta)?;
        let mut f_in = vec![0.0; d];
        let mut f_out = vec![0.0; d];
        self.drift.eval_piece(inner, theta, &mut f_in);
        self.drift.eval_piece(outer, theta, &mut f_out);
        let jump = DVector::from_iterator(d, f_in.iter().zip(&f_out).map(|(a, b)| a - b));
        if jump.iter().all(|v| *v == 0.0) {
            return Ok(jump);
        }
        let noise = self.normal_noise(theta)?;
        if noise <= 1e-12 {
            return Err(Error::DegenerateNoise { value: noise });
        }
        Ok(jump / (2.0 * noise * noise))
    }

    /// Sampled `min |n(theta)^T sigma(theta)|` over the surface.
    pub fn check_nondegeneracy(&self, n_samples: usize, seed: u64) -> Result<NondegeneracyReport> {
        if n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_norm = f64::INFINITY;
        for _ in 0..n_samples {
            let theta = self.surface().sample_point(&mut rng);
            min_norm = min_norm.min(self.normal_noise(theta.as_slice())?);
        }
        let warning = (min_norm <= NONDEGENERACY_WARN).then(|| {
            format!("diffusion nearly degenerate in the normal direction: min |n^T sigma| = {min_norm:e}")
        });
        Ok(NondegeneracyReport {
            min_norm,
            samples: n_samples,
            warning,
        })
    }

    /// Monte Carlo sup of `|mu|` and `|sigma|_F` over `theta + lambda n(theta)`,
    /// `lambda ~ U(-eps, eps)`.
    pub fn check_local_boundedness(
        &self,
        eps: f64,
        n_samples: usize,
        seed: u64,
    ) -> Result<BoundednessReport> {
        let reach = self.surface().reach();
        if !(eps > 0.0 && eps < reach) {
            return Err(Error::InvalidParameter(format!(
                "tube radius {eps} must lie in (0, reach = {reach})"
            )));
        }
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = Uniform::new(-eps, eps).expect("eps > 0");
        let mut mu = vec![0.0; d];
        let mut sigma = vec![0.0; d * d];
        let (mut sup_drift, mut sup_diffusion) = (0.0f64, 0.0f64);
        for _ in 0..n_samples {
            let x = sample_tube_point(self.surface().as_ref(), &mut rng, &offset)?;
            self.drift_into(&x, &mut mu);
            self.diffusion_into(&x, &mut sigma);
            sup_drift = sup_drift.max(norm(&mu));
            sup_diffusion = sup_diffusion.max(frobenius(&sigma));
        }
        Ok(BoundednessReport {
            sup_drift,
            sup_diffusion,
            samples: n_samples,
        })
    }

    /// Largest sampled difference quotient of each drift piece on pairs drawn
    /// from the tube of radius `eps` on the piece's own side.
    pub fn empirical_piece_lipschitz(&self, eps: f64, n_pairs: usize, seed: u64) -> Result<Vec<f64>> {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = Uniform::new(-eps, eps)
            .map_err(|_| Error::InvalidParameter(format!("invalid tube radius {eps}")))?;
        let mut best = vec![0.0f64; self.drift.piece_count()];
        let (mut fa, mut fb) = (vec![0.0; d], vec![0.0; d]);
        for _ in 0..n_pairs {
            let a = sample_tube_point(self.surface().as_ref(), &mut rng, &offset)?;
            let b = sample_tube_point(self.surface().as_ref(), &mut rng, &offset)?;
            let (pa, pb) = (self.drift.classify(&a), self.drift.classify(&b));
            if pa != pb {
                continue;
            }
            let gap = crate::linalg::dist(&a, &b);
            if gap < 1e-9 {
                continue;
            }
            self.drift.eval_piece(pa, &a, &mut fa);
            self.drift.eval_piece(pa, &b, &mut fb);
            best[pa] = best[pa].max(crate::linalg::dist(&fa, &fb) / gap);
        }
        Ok(best)
    }
}

pub(crate) fn sample_tube_point(
    surface: &dyn Hypersurface,
    rng: &mut ChaCha8Rng,
    offset: &Uniform<f64>,
) -> Result<Vec<f64>> {
    let theta = surface.sample_point(rng);
    let normal = surface.normal_at(theta.as_slice())?;
    let lambda = offset.sample(rng);
    Ok(theta
        .iter()
        .zip(normal.iter())
        .map(|(t, n)| t + lambda * n)
        .collect())
}

fn bump_diffusion_around_circle() -> Diffusion {
    Diffusion::new(Arc::new(|x: &[f64], out: &mut [f64]| {
        let s = bump_phi(norm(x) - 2.0);
        out.copy_from_slice(&[s, 0.0, 0.0, s]);
    }))
}

fn circle_surface() -> Arc<dyn Hypersurface> {
    Arc::new(Sphere::circle(2.0).expect("valid circle"))
}

/// Two-dimensional model with drift `(1,1) - x` inside the circle of
/// radius 2 and `-x` outside, `sigma(x) = phi(|x| - 2) I`, started at `(0, 2)`.
pub fn example1() -> SdeModel {
    let inner: VectorFn = Arc::new(|x: &[f64], out: &mut [f64]| {
        out[0] = 1.0 - x[0];
        out[1] = 1.0 - x[1];
    });
    let outer: VectorFn = Arc::new(|x: &[f64], out: &mut [f64]| {
        out[0] = -x[0];
        out[1] = -x[1];
    });
    let drift = PiecewiseDrift::new(circle_surface(), vec![inner, outer.clone()])
        .expect("two regions")
        .with_on_surface(outer);
    SdeModel::new("example1", vec![0.0, 2.0], drift, bump_diffusion_around_circle())
        .expect("consistent dimensions")
}

/// Drift `(a, a)` inside the circle of radius 2 and `(b, b) |x|` on and
/// outside it, diffusion as in [`example1`].
pub fn example2(a: f64, b: f64, x0: [f64; 2]) -> SdeModel {
    let inner: VectorFn = Arc::new(move |_x: &[f64], out: &mut [f64]| {
        out[0] = a;
        out[1] = a;
    });
    let outer: VectorFn = Arc::new(move |x: &[f64], out: &mut [f64]| {
        let r = norm(x);
        out[0] = b * r;
        out[1] = b * r;
    });
    let drift = PiecewiseDrift::new(circle_surface(), vec![inner, outer.clone()])
        .expect("two regions")
        .with_on_surface(outer);
    SdeModel::new("example2", x0.to_vec(), drift, bump_diffusion_around_circle())
        .expect("consistent dimensions")
}

/// One-dimensional `dX = scale * sgn(X) dt + dW` with the jump at 0.
pub fn sign1d(scale: f64, x0: f64) -> SdeModel {
    let surface: Arc<dyn Hypersurface> = Arc::new(PointSet1d::new(vec![0.0]).expect("one point"));
    let neg: VectorFn = Arc::new(move |_x: &[f64], out: &mut [f64]| out[0] = -scale);
    let pos: VectorFn = Arc::new(move |_x: &[f64], out: &mut [f64]| out[0] = scale);
    let zero: VectorFn = Arc::new(|_x: &[f64], out: &mut [f64]| out[0] = 0.0);
    let drift = PiecewiseDrift::new(surface, vec![neg, pos])
        .expect("two regions")
        .with_on_surface(zero);
    SdeModel::new("sign1d", vec![x0], drift, Diffusion::scalar(1, 1.0)).expect("1-d")
}

/// Geometric Brownian motion `dX = mu X dt + sigma X dW`; smooth baseline
/// with the nominal surface `{0}`.
pub fn gbm(mu: f64, sigma: f64, x0: f64) -> SdeModel {
    let surface: Arc<dyn Hypersurface> = Arc::new(PointSet1d::new(vec![0.0]).expect("one point"));
    let drift = PiecewiseDrift::smooth(
        surface,
        Arc::new(move |x: &[f64], out: &mut [f64]| out[0] = mu * x[0]),
    );
    let diffusion = Diffusion::new(Arc::new(move |x: &[f64], out: &mut [f64]| {
        out[0] = sigma * x[0]
    }));
    SdeModel::new("gbm", vec![x0], drift, diffusion).expect("1-d")
}

/// Piecewise-constant drift (one constant vector per region of `surface`)
/// with `sigma = noise * I`.
pub fn piecewise_constant(
    surface: Arc<dyn Hypersurface>,
    values: Vec<Vec<f64>>,
    noise: f64,
    x0: Vec<f64>,
) -> Result<SdeModel> {
    let d = surface.dim();
    if let Some(v) = values.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    let pieces: Vec<VectorFn> = values
        .into_iter()
        .map(|v| -> VectorFn { Arc::new(move |_x: &[f64], out: &mut [f64]| out.copy_from_slice(&v)) })
        .collect();
    let drift = PiecewiseDrift::new(surface, pieces)?;
    SdeModel::new("custom", x0, drift, Diffusion::scalar(d, noise))
}

/// Names and one-line descriptions of the built-in models.
pub fn builtin_models() -> Vec<(&'static str, &'static str)> {
    vec![
        ("example1", "2-d, circle |x|=2, mu = (1,1)-x inside / -x outside, sigma = phi(|x|-2) I, x0=(0,2)"),
        ("example2", "2-d, circle |x|=2, mu = (a,a) inside / (b,b)|x| outside, sigma = phi(|x|-2) I; params a, b, x0"),
        ("sign1d", "1-d, mu = scale*sgn(x), sigma = 1, surface {0}; params scale, x0"),
        ("gbm", "1-d geometric Brownian motion, smooth baseline; params mu, sigma, x0"),
        ("custom", "piecewise-constant drift per region of [surface], sigma = noise*I; params pieces, noise, x0"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Hyperplane;
    use rand::Rng;

    fn approx(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn drift_examples() {
        let m = example1();
        assert_eq!(m.drift_eval(&[0.0, 1.0]).as_slice(), &[1.0, 0.0]);
        assert_eq!(m.drift_eval(&[0.0, 3.0]).as_slice(), &[0.0, -3.0]);
        let m2 = example2(-3.0, 0.5, [0.0, 2.0]);
        assert_eq!(m2.drift_eval(&[0.0, 4.0]).as_slice(), &[2.0, 2.0]);
    }

    #[test]
    fn drift_agrees_with_case_formula() {
        let m = example1();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let x = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let r = norm(&x);
            let expected = if r < 2.0 {
                [1.0 - x[0], 1.0 - x[1]]
            } else {
                [-x[0], -x[1]]
            };
            assert_eq!(m.drift_eval(&x).as_slice(), &expected);
        }
    }

    #[test]
    fn on_surface_tie_break_uses_outer_piece() {
        let surface: Arc<dyn Hypersurface> = Arc::new(Sphere::circle(2.0).unwrap());
        let m = piecewise_constant(surface, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0, vec![0.0, 2.0]).unwrap();
        // inside by 1e-13, within the on-surface tolerance
        let x = [0.0, 2.0 - 1e-13];
        assert_eq!(m.drift_eval(&x).as_slice(), &[0.0, 1.0]);
        assert_eq!(m.drift_eval(&[0.0, 1.9]).as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn diffusion_examples() {
        let m = example1();
        assert_eq!(m.diffusion_eval(&[0.0, 2.0]), DMatrix::identity(2, 2));
        assert_eq!(m.diffusion_eval(&[0.0, 4.0]), DMatrix::zeros(2, 2));
        let s = m.diffusion_eval(&[0.0, 2.5]);
        assert!((s[(0, 0)] - 0.31640625).abs() < 1e-15);
        assert!((s[(1, 1)] - 0.31640625).abs() < 1e-15);
        assert_eq!(s[(0, 1)], 0.0);
    }

    #[test]
    fn alpha_examples() {
        let a = example1().jump_alpha(&[0.0, 2.0]).unwrap();
        assert!(approx(a.as_slice(), &[0.5, 0.5], 1e-15));
        let a = example2(-3.0, 1.0, [0.0, 2.0]).jump_alpha(&[2.0, 0.0]).unwrap();
        assert!(approx(a.as_slice(), &[-2.5, -2.5], 1e-15));
        let a = gbm(0.05, 0.2, 1.0).jump_alpha(&[0.0]).unwrap();
        assert_eq!(a.as_slice(), &[0.0]);
    }

    #[test]
    fn alpha_requires_surface_point_and_noise() {
        let m = example1();
        assert!(matches!(m.jump_alpha(&[0.0, 2.5]), Err(Error::NotOnSurface { .. })));
        let surface: Arc<dyn Hypersurface> = Arc::new(Sphere::circle(2.0).unwrap());
        let m = piecewise_constant(surface, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 0.0, vec![0.0, 2.0]).unwrap();
        assert!(matches!(m.jump_alpha(&[0.0, 2.0]), Err(Error::DegenerateNoise { .. })));
    }

    #[test]
    fn alpha_invariant_under_common_continuous_shift() {
        let base = example2(-3.0, 1.0, [0.0, 2.0]);
        let shift = |x: &[f64], out: &mut [f64]| {
            out[0] += x[0].sin() * x[1];
            out[1] += x[0] * x[0] - 0.3 * x[1];
        };
        let inner: VectorFn = Arc::new(move |x: &[f64], out: &mut [f64]| {
            out[0] = -3.0;
            out[1] = -3.0;
            shift(x, out);
        });
        let outer: VectorFn = Arc::new(move |x: &[f64], out: &mut [f64]| {
            let r = norm(x);
            out[0] = r;
            out[1] = r;
            shift(x, out);
        });
        let drift = PiecewiseDrift::new(circle_surface(), vec![inner, outer]).unwrap();
        let shifted = SdeModel::new("shifted", vec![0.0, 2.0], drift, bump_diffusion_around_circle()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let theta = base.surface().sample_point(&mut rng);
            let a = base.jump_alpha(theta.as_slice()).unwrap();
            let b = shifted.jump_alpha(theta.as_slice()).unwrap();
            assert!((a - b).amax() <= 1e-12);
        }
    }

    #[test]
    fn example2_jump_size() {
        for (a, b) in [(-3.0, 1.0), (3.0, -1.0), (1.0, 1.0), (-0.1, 0.1)] {
            let m = example2(a, b, [0.0, 2.0]);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..100 {
                let theta = m.surface().sample_point(&mut rng);
                let (i, j) = m.drift().adjacent_pieces(theta.as_slice()).unwrap();
                let mut fi = [0.0; 2];
                let mut fj = [0.0; 2];
                m.drift().eval_piece(i, theta.as_slice(), &mut fi);
                m.drift().eval_piece(j, theta.as_slice(), &mut fj);
                let jump = crate::linalg::dist(&fi, &fj);
                assert!((jump - 2f64.sqrt() * (a - 2.0 * b).abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nondegeneracy_examples() {
        let r = example1().check_nondegeneracy(1000, 1).unwrap();
        assert!((r.min_norm - 1.0).abs() < 1e-12);
        assert!(r.warning.is_none());

        let surface: Arc<dyn Hypersurface> = Arc::new(Sphere::circle(2.0).unwrap());
        let zero = piecewise_constant(surface, vec![vec![0.0, 0.0]; 2], 0.0, vec![0.0, 0.0]).unwrap();
        let r = zero.check_nondegeneracy(100, 1).unwrap();
        assert_eq!(r.min_norm, 0.0);
        assert!(r.warning.is_some());

        let plane: Arc<dyn Hypersurface> = Arc::new(Hyperplane::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap());
        let drift = PiecewiseDrift::smooth(plane, Arc::new(|_x: &[f64], out: &mut [f64]| out.fill(0.0)));
        let diag = Diffusion::new(Arc::new(|_x: &[f64], out: &mut [f64]| {
            out.copy_from_slice(&[1.0, 0.0, 0.0, 0.0])
        }));
        let m = SdeModel::new("plane", vec![0.0, 1.0], drift, diag).unwrap();
        let r = m.check_nondegeneracy(100, 1).unwrap();
        assert_eq!(r.min_norm, 0.0);
        assert!(r.warning.is_some());
    }

    #[test]
    fn boundedness_examples() {
        let r = example1().check_local_boundedness(0.5, 1000, 2).unwrap();
        assert!(r.sup_drift <= 4.0);
        assert!(r.sup_diffusion <= 2f64.sqrt() + 1e-12);

        let r = example2(-3.0, 1.0, [0.0, 2.0]).check_local_boundedness(0.1, 1000, 2).unwrap();
        assert!(r.sup_drift <= 4.2427);

        let surface: Arc<dyn Hypersurface> = Arc::new(Sphere::circle(2.0).unwrap());
        let m = piecewise_constant(surface, vec![vec![0.0, 0.0]; 2], 0.7, vec![0.0, 0.0]).unwrap();
        let r = m.check_local_boundedness(0.5, 100, 2).unwrap();
        assert_eq!(r.sup_drift, 0.0);
        assert!((r.sup_diffusion - 0.7 * 2f64.sqrt()).abs() < 1e-15);

        assert!(example1().check_local_boundedness(2.5, 10, 0).is_err());
    }

    #[test]
    fn classifier_is_locally_constant_along_normals() {
        let m = example1();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reach = m.surface().reach();
        for _ in 0..200 {
            let theta = m.surface().sample_point(&mut rng);
            let n = m.surface().normal_at(theta.as_slice()).unwrap();
            for s in [-1.0, 1.0] {
                let regions: Vec<usize> = (1..20)
                    .map(|k| {
                        let lambda = s * 0.5 * reach * k as f64 / 20.0;
                        let x: Vec<f64> = theta.iter().zip(n.iter()).map(|(t, v)| t + lambda * v).collect();
                        m.drift().classify(&x)
                    })
                    .collect();
                assert!(regions.windows(2).all(|w| w[0] == w[1]));
            }
        }
    }

    #[test]
    fn piece_lipschitz_constants_are_finite() {
        let l = example1().empirical_piece_lipschitz(0.5, 2000, 3).unwrap();
        assert!(l.iter().all(|v| v.is_finite() && *v <= 1.0 + 1e-12));
    }
}
