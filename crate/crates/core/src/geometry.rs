//! Hypersurfaces of positive reach.
//!
//! Every surface exposes the distance function, the orthogonal projection
//! onto it (inside the reach tube), an oriented unit normal field and the
//! Jacobian of the projection. The complement of a surface splits into
//! finitely many connected regions, numbered by [`Hypersurface::region_of`].

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm};

/// Absolute tolerance of the on-surface test used by [`Hypersurface::normal_at`].
pub const ON_SURFACE_TOL: f64 = 1e-9;

pub trait Hypersurface: Send + Sync + fmt::Debug {
    /// Ambient dimension `d`.
    fn dim(&self) -> usize;

    /// Reach of the surface, `f64::INFINITY` when unbounded.
    fn reach(&self) -> f64;

    fn distance(&self, x: &[f64]) -> f64;

    /// Unique nearest point on the surface. Requires `distance(x) < reach`.
    fn project(&self, x: &[f64]) -> Result<DVector<f64>>;

    /// Oriented unit normal at a point within [`ON_SURFACE_TOL`] of the surface.
    fn normal_at(&self, theta: &[f64]) -> Result<DVector<f64>>;

    /// Index of the connected component of the complement containing `x`.
    /// Points on the surface get the index of one adjacent region.
    fn region_of(&self, x: &[f64]) -> usize;

    fn region_count(&self) -> usize;

    /// Draws a point of the surface from its natural parameterization.
    fn sample_point(&self, rng: &mut dyn RngCore) -> DVector<f64>;

    /// Short human-readable description, e.g. `sphere(center=[0, 0], r=2)`.
    fn describe(&self) -> String;

    /// `<n(pr x), x - pr x>`: positive on the side the normal points to.
    fn signed_offset(&self, x: &[f64]) -> Result<f64> {
        let theta = self.project(x)?;
        let normal = self.normal_at(theta.as_slice())?;
        let diff: Vec<f64> = x.iter().zip(theta.iter()).map(|(a, b)| a - b).collect();
        Ok(dot(normal.as_slice(), &diff))
    }

    /// Jacobian of [`Hypersurface::project`]. The default uses central
    /// differences with step `cbrt(machine eps) * max(1, |x|)`.
    fn projection_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_in_tube(x)?;
        fd_projection_jacobian(self, x)
    }

    fn check_in_tube(&self, x: &[f64]) -> Result<()> {
        let distance = self.distance(x);
        let reach = self.reach();
        if distance >= reach {
            return Err(Error::DistanceExceedsReach { distance, reach });
        }
        Ok(())
    }
}

fn fd_projection_jacobian<S: Hypersurface + ?Sized>(surface: &S, x: &[f64]) -> Result<DMatrix<f64>> {
    let d = x.len();
    let h = f64::EPSILON.cbrt() * norm(x).max(1.0);
    let mut jac = DMatrix::zeros(d, d);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for j in 0..d {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        let fp = surface.project(&xp)?;
        let fm = surface.project(&xm)?;
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
        xp[j] = x[j];
        xm[j] = x[j];
    }
    Ok(jac)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Sphere `{x : |x - center| = radius}` with outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    center: Vec<f64>,
    radius: f64,
}

impl Sphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("sphere center must be non-empty".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sphere radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    /// Circle of radius `radius` around the origin of the plane.
    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0], radius)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Hypersurface for Sphere {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn reach(&self) -> f64 {
        self.radius
    }

    fn distance(&self, x: &[f64]) -> f64 {
        (dist(x, &self.center) - self.radius).abs()
    }

    fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        let rho = dist(x, &self.center);
        if rho == 0.0 {
            return Err(Error::CenterSingularity);
        }
        self.check_in_tube(x)?;
        let scale = self.radius / rho;
        Ok(DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(&self.center)
                .map(|(xi, ci)| ci + scale * (xi - ci)),
        ))
    }

    fn normal_at(&self, theta: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.dim(), theta.len())?;
        let distance = self.distance(theta);
        if distance > ON_SURFACE_TOL {
            return Err(Error::NotOnSurface {
                distance,
                tolerance: ON_SURFACE_TOL,
            });
        }
        let rho = dist(theta, &self.center);
        Ok(DVector::from_iterator(
            theta.len(),
            theta.iter().zip(&self.center).map(|(t, c)| (t - c) / rho),
        ))
    }

    fn region_of(&self, x: &[f64]) -> usize {
        usize::from(dist(x, &self.center) >= self.radius)
    }

    fn region_count(&self) -> usize {
        2
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> DVector<f64> {
        loop {
            let g: Vec<f64> = (0..self.dim())
                .map(|_| StandardNormal.sample(&mut *rng))
                .collect();
            let r = norm(&g);
            if r > 1e-12 {
                return DVector::from_iterator(
                    g.len(),
                    g.iter()
                        .zip(&self.center)
                        .map(|(gi, ci)| ci + self.radius * gi / r),
                );
            }
        }
    }

    fn describe(&self) -> String {
        format!("sphere(center={:?}, r={})", self.center, self.radius)
    }

    fn signed_offset(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let rho = dist(x, &self.center);
        if rho == 0.0 {
            return Err(Error::CenterSingularity);
        }
        self.check_in_tube(x)?;
        Ok(rho - self.radius)
    }

    /// `(r/rho) (I - u u^T)` with `u = (x - c)/rho`. The radial projection is
    /// unique away from the center, so points beyond the reach are accepted.
    fn projection_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        let rho = dist(x, &self.center);
        if rho == 0.0 {
            return Err(Error::CenterSingularity);
        }
        let d = x.len();
        let u = DVector::from_iterator(d, x.iter().zip(&self.center).map(|(a, c)| (a - c) / rho));
        let jac = (DMatrix::identity(d, d) - &u * u.transpose()) * (self.radius / rho);
        Ok(jac)
    }
}

/// Affine hyperplane through `base` with unit normal `normal`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    base: Vec<f64>,
    normal: Vec<f64>,
    tangents: Vec<Vec<f64>>,
    window: f64,
}

impl Hyperplane {
    /// The normal is normalized on construction.
    pub fn new(base: Vec<f64>, normal: Vec<f64>) -> Result<Self> {
        check_dim(base.len(), normal.len())?;
        if base.is_empty() {
            return Err(Error::InvalidParameter("hyperplane base must be non-empty".into()));
        }
        let len = norm(&normal);
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidParameter("hyperplane normal must be non-zero".into()));
        }
        let normal: Vec<f64> = normal.iter().map(|v| v / len).collect();
        let tangents = tangent_basis(&normal);
        Ok(Self {
            base,
            normal,
            tangents,
            window: 4.0,
        })
    }

    /// Half-width of the box of tangent coordinates used by `sample_point`.
    pub fn with_sampling_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    fn level(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.base)
            .zip(&self.normal)
            .map(|((xi, bi), ni)| (xi - bi) * ni)
            .sum()
    }
}

/// Orthonormal basis of the complement of a unit vector (Gram-Schmidt on the
/// standard basis).
fn tangent_basis(normal: &[f64]) -> Vec<Vec<f64>> {
    let d = normal.len();
    let mut basis: Vec<Vec<f64>> = vec![normal.to_vec()];
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            v.iter_mut().for_each(|vi| *vi /= len);
            basis.push(v);
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

impl Hypersurface for Hyperplane {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn reach(&self) -> f64 {
        f64::INFINITY
    }

    fn distance(&self, x: &[f64]) -> f64 {
        self.level(x).abs()
    }

    fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        let l = self.level(x);
        Ok(DVector::from_iterator(
            x.len(),
            x.iter().zip(&self.normal).map(|(xi, ni)| xi - l * ni),
        ))
    }

    fn normal_at(&self, theta: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.dim(), theta.len())?;
        let distance = self.distance(theta);
        if distance > ON_SURFACE_TOL {
            return Err(Error::NotOnSurface {
                distance,
                tolerance: ON_SURFACE_TOL,
            });
        }
        Ok(DVector::from_column_slice(&self.normal))
    }

    fn region_of(&self, x: &[f64]) -> usize {
        usize::from(self.level(x) >= 0.0)
    }

    fn region_count(&self) -> usize {
        2
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> DVector<f64> {
        let coord = Uniform::new(-self.window, self.window).expect("window is positive");
        let mut p = self.base.clone();
        for t in &self.tangents {
            let c: f64 = coord.sample(&mut *rng);
            for (pi, ti) in p.iter_mut().zip(t) {
                *pi += c * ti;
            }
        }
        DVector::from_vec(p)
    }

    fn describe(&self) -> String {
        format!("hyperplane(base={:?}, normal={:?})", self.base, self.normal)
    }

    fn signed_offset(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.level(x))
    }

    fn projection_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        let n = DVector::from_column_slice(&self.normal);
        let d = self.dim();
        Ok(DMatrix::identity(d, d) - &n * n.transpose())
    }
}

/// Finite set of points on the real line. The normal is `+1` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet1d {
    points: Vec<f64>,
}

impl PointSet1d {
    /// Points are sorted on construction and must be distinct.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("point set must be non-empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("point set entries must be finite".into()));
        }
        points.sort_by(f64::total_cmp);
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("point set entries must be distinct".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn nearest(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&p| p < x);
        let mut best = f64::NAN;
        let mut best_d = f64::INFINITY;
        for k in idx.saturating_sub(1)..(idx + 1).min(self.points.len()) {
            let dk = (x - self.points[k]).abs();
            if dk < best_d {
                best_d = dk;
                best = self.points[k];
            }
        }
        best
    }
}

impl Hypersurface for PointSet1d {
    fn dim(&self) -> usize {
        1
    }

    fn reach(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]))
            .fold(f64::INFINITY, f64::min)
    }

    fn distance(&self, x: &[f64]) -> f64 {
        (x[0] - self.nearest(x[0])).abs()
    }

    fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        check_dim(1, x.len())?;
        self.check_in_tube(x)?;
        Ok(DVector::from_element(1, self.nearest(x[0])))
    }

    fn normal_at(&self, theta: &[f64]) -> Result<DVector<f64>> {
        check_dim(1, theta.len())?;
        let distance = self.distance(theta);
        if distance > ON_SURFACE_TOL {
            return Err(Error::NotOnSurface {
                distance,
                tolerance: ON_SURFACE_TOL,
            });
        }
        Ok(DVector::from_element(1, 1.0))
    }

    /// Number of points at or below `x`: region `k` is the interval
    /// `(p_k, p_{k+1})` with `p_0 = -inf`. A point of the set belongs to the
    /// region on its normal (`+1`) side.
    fn region_of(&self, x: &[f64]) -> usize {
        self.points.partition_point(|&p| p <= x[0])
    }

    fn region_count(&self) -> usize {
        self.points.len() + 1
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> DVector<f64> {
        let k = (rng.next_u64() % self.points.len() as u64) as usize;
        DVector::from_element(1, self.points[k])
    }

    fn describe(&self) -> String {
        format!("points1d({:?})", self.points)
    }

    fn signed_offset(&self, x: &[f64]) -> Result<f64> {
        check_dim(1, x.len())?;
        self.check_in_tube(x)?;
        Ok(x[0] - self.nearest(x[0]))
    }
}

/// One line of [`property_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyRow {
    pub property: &'static str,
    pub samples: usize,
    pub failures: usize,
    pub max_error: f64,
    pub pass: bool,
}

/// Sampled checks of the projection, normal and side structure of a surface:
/// idempotence of the projection, `pr(theta + l n) = theta` for `|l| < reach`,
/// `pr'(theta) = I - n n^T` on the surface, unit normals, and that the sign of
/// the offset and the region index follow the side of `theta + l n`.
pub fn property_report(surface: &dyn Hypersurface, samples: usize, seed: u64) -> Result<Vec<PropertyRow>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let reach = surface.reach();
    let span = if reach.is_finite() { 0.99 * reach } else { 10.0 };
    let offsets = Uniform::new(-span, span).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let d = surface.dim();

    struct Acc {
        failures: usize,
        max_error: f64,
        tol: f64,
    }
    impl Acc {
        fn add(&mut self, e: f64) {
            self.max_error = self.max_error.max(e);
            if !(e <= self.tol) {
                self.failures += 1;
            }
        }
    }
    let acc = |tol| Acc {
        failures: 0,
        max_error: 0.0,
        tol,
    };
    let (mut idem, mut round, mut jac, mut unit, mut sign, mut region) =
        (acc(1e-12), acc(1e-10), acc(1e-6), acc(1e-12), acc(0.0), acc(0.0));

    for _ in 0..samples {
        let theta = surface.sample_point(&mut rng);
        let normal = surface.normal_at(theta.as_slice())?;
        unit.add((normal.norm() - 1.0).abs());

        let mut lambda = offsets.sample(&mut rng);
        if lambda == 0.0 {
            lambda = span / 2.0;
        }
        let x = &theta + &normal * lambda;
        let mirror = &theta - &normal * lambda;
        let pr = surface.project(x.as_slice())?;
        round.add((&pr - &theta).amax());
        let again = surface.project(pr.as_slice())?;
        idem.add((&again - &pr).amax());

        let expected = DMatrix::identity(d, d) - &normal * normal.transpose();
        jac.add((surface.projection_jacobian(theta.as_slice())? - expected).amax());

        let off = surface.signed_offset(x.as_slice())?;
        sign.add(if off.signum() == lambda.signum() { 0.0 } else { 1.0 });
        let (rx, rm) = (surface.region_of(x.as_slice()), surface.region_of(mirror.as_slice()));
        region.add(if rx != rm { 0.0 } else { 1.0 });
    }
    let row = |property, a: Acc| PropertyRow {
        property,
        samples,
        failures: a.failures,
        max_error: a.max_error,
        pass: a.failures == 0,
    };
    Ok(vec![
        row("projection idempotent", idem),
        row("projection along normal returns base point", round),
        row("projection jacobian on surface equals I - n n^T", jac),
        row("normal has unit length", unit),
        row("signed offset sign matches side", sign),
        row("opposite sides lie in different regions", region),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle2() -> Sphere {
        Sphere::circle(2.0).unwrap()
    }

    #[test]
    fn reach_values() {
        assert_eq!(circle2().reach(), 2.0);
        let plane = Hyperplane::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(plane.reach().is_infinite());
        let pts = PointSet1d::new(vec![1.0, 0.0, 3.0]).unwrap();
        assert_eq!(pts.reach(), 0.5);
        assert!(PointSet1d::new(vec![0.0]).unwrap().reach().is_infinite());
    }

    #[test]
    fn distance_examples() {
        let s = circle2();
        assert_eq!(s.distance(&[3.0, 0.0]), 1.0);
        assert_eq!(s.distance(&[0.0, 2.0]), 0.0);
        let pts = PointSet1d::new(vec![0.0, 1.0]).unwrap();
        assert!((pts.distance(&[0.4]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn project_examples() {
        let s = circle2();
        let p = s.project(&[3.0, 0.0]).unwrap();
        assert_eq!(p.as_slice(), &[2.0, 0.0]);
        let p = s.project(&[0.0, 2.0]).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 2.0]);
        let plane = Hyperplane::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let p = plane.project(&[5.0, 3.0]).unwrap();
        assert_eq!(p.as_slice(), &[5.0, 0.0]);
    }

    #[test]
    fn project_errors() {
        let s = circle2();
        assert_eq!(s.project(&[0.0, 0.0]), Err(Error::CenterSingularity));
        assert!(matches!(
            s.project(&[0.0, 4.5]),
            Err(Error::DistanceExceedsReach { .. })
        ));
        let pts = PointSet1d::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            pts.project(&[0.5]),
            Err(Error::DistanceExceedsReach { .. })
        ));
    }

    #[test]
    fn normal_examples() {
        let s = circle2();
        assert_eq!(s.normal_at(&[0.0, 2.0]).unwrap().as_slice(), &[0.0, 1.0]);
        let plane = Hyperplane::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(plane.normal_at(&[7.0, 0.0]).unwrap().as_slice(), &[0.0, 1.0]);
        let pts = PointSet1d::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(pts.normal_at(&[0.0]).unwrap().as_slice(), &[1.0]);
        assert!(matches!(
            s.normal_at(&[0.0, 2.1]),
            Err(Error::NotOnSurface { .. })
        ));
    }

    #[test]
    fn signed_offset_examples() {
        let s = circle2();
        assert!((s.signed_offset(&[0.0, 2.3]).unwrap() - 0.3).abs() < 1e-15);
        assert!((s.signed_offset(&[0.0, 1.5]).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(s.signed_offset(&[0.0, 2.0]).unwrap(), 0.0);
        let pts = PointSet1d::new(vec![0.0, 1.0]).unwrap();
        assert!((pts.signed_offset(&[0.8]).unwrap() + 0.2).abs() < 1e-15);
    }

    #[test]
    fn projection_jacobian_examples() {
        let plane = Hyperplane::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let j = plane.projection_jacobian(&[3.0, -1.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let s = circle2();
        let j = s.projection_jacobian(&[0.0, 2.0]).unwrap();
        assert!((j - DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).amax() < 1e-15);
        let j = s.projection_jacobian(&[0.0, 4.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0]));
        assert_eq!(s.projection_jacobian(&[0.0, 0.0]), Err(Error::CenterSingularity));
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let s = Sphere::new(vec![0.5, -0.2, 1.0], 1.5).unwrap();
        let x = [1.1, 0.4, 2.0];
        let analytic = s.projection_jacobian(&x).unwrap();
        let fd = fd_projection_jacobian(&s, &x).unwrap();
        assert!((analytic - fd).amax() < 1e-8);
    }

    #[test]
    fn sampled_points_lie_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let surfaces: Vec<Box<dyn Hypersurface>> = vec![
            Box::new(Sphere::new(vec![1.0, 2.0, 3.0], 0.7).unwrap()),
            Box::new(Hyperplane::new(vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap()),
            Box::new(PointSet1d::new(vec![-1.0, 0.5, 2.0]).unwrap()),
        ];
        for s in &surfaces {
            for _ in 0..200 {
                let p = s.sample_point(&mut rng);
                assert!(s.distance(p.as_slice()) < 1e-12, "{}", s.describe());
            }
        }
    }

    #[test]
    fn regions() {
        let s = circle2();
        assert_eq!(s.region_of(&[0.0, 1.0]), 0);
        assert_eq!(s.region_of(&[0.0, 3.0]), 1);
        let pts = PointSet1d::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(pts.region_count(), 3);
        assert_eq!(pts.region_of(&[-0.5]), 0);
        assert_eq!(pts.region_of(&[0.5]), 1);
        assert_eq!(pts.region_of(&[1.5]), 2);
    }

    #[test]
    fn hyperplane_normal_is_normalized() {
        let plane = Hyperplane::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
        assert!((norm(plane.normal()) - 1.0).abs() < 1e-15);
        assert!(Hyperplane::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn property_report_passes_on_builtin_surfaces() {
        let surfaces: Vec<Box<dyn Hypersurface>> = vec![
            Box::new(Sphere::circle(2.0).unwrap()),
            Box::new(Sphere::new(vec![1.0, -1.0, 0.5], 0.7).unwrap()),
            Box::new(Hyperplane::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap()),
            Box::new(PointSet1d::new(vec![-1.0, 0.0, 2.5]).unwrap()),
        ];
        for s in surfaces {
            for row in property_report(s.as_ref(), 2000, 5).unwrap() {
                assert!(row.pass, "{}: {row:?}", s.describe());
            }
        }
    }
}
