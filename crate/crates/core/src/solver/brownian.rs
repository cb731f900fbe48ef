use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Increments of a `d`-dimensional Brownian motion on the grid `k/N` of `[0, 1]`.
///
/// The stream is a function of `(master_seed, rep_id)` only: ChaCha8 seeded
/// from the master seed with the replication index as stream selector.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    dim: usize,
    steps: usize,
    rep_id: u64,
    master_seed: u64,
    increments: Vec<f64>,
}

impl BrownianPath {
    pub fn sample(master_seed: u64, rep_id: u64, steps: usize, dim: usize) -> Result<Self> {
        if steps == 0 || dim == 0 {
            return Err(Error::InvalidParameter(
                "Brownian path needs at least one step and one dimension".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(rep_id);
        let scale = (1.0 / steps as f64).sqrt();
        let increments = (0..steps * dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
            .collect();
        Ok(Self {
            dim,
            steps,
            rep_id,
            master_seed,
            increments,
        })
    }

    /// Wraps given increments (row `k` holds `W_{(k+1)/N} - W_{k/N}`).
    pub fn from_increments(steps: usize, dim: usize, increments: Vec<f64>) -> Result<Self> {
        if steps == 0 || dim == 0 {
            return Err(Error::InvalidParameter(
                "Brownian path needs at least one step and one dimension".into(),
            ));
        }
        if increments.len() != steps * dim {
            return Err(Error::DimensionMismatch {
                expected: steps * dim,
                got: increments.len(),
            });
        }
        Ok(Self {
            dim,
            steps,
            rep_id: 0,
            master_seed: 0,
            increments,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Finest step count `N`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rep_id(&self) -> u64 {
        self.rep_id
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn increment(&self, k: usize) -> &[f64] {
        &self.increments[k * self.dim..(k + 1) * self.dim]
    }

    /// `N / n`, or `GridMismatch` when `n` does not divide `N`.
    pub fn block(&self, n: usize) -> Result<usize> {
        if n == 0 || !self.steps.is_multiple_of(n) {
            return Err(Error::GridMismatch { n, fine: self.steps });
        }
        Ok(self.steps / n)
    }

    /// Increment over coarse step `i` of grid `1/n`, summed left to right.
    pub fn coarse_increment_into(&self, block: usize, i: usize, out: &mut [f64]) {
        out.fill(0.0);
        for k in i * block..(i + 1) * block {
            for (o, w) in out.iter_mut().zip(self.increment(k)) {
                *o += w;
            }
        }
    }

    /// All increments on grid `1/n` as an `n x d` row-major array.
    pub fn coarse_increments(&self, n: usize) -> Result<Vec<f64>> {
        let block = self.block(n)?;
        let mut out = vec![0.0; n * self.dim];
        for (i, row) in out.chunks_exact_mut(self.dim).enumerate() {
            self.coarse_increment_into(block, i, row);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed_and_rep() {
        let a = BrownianPath::sample(7, 3, 64, 2).unwrap();
        let b = BrownianPath::sample(7, 3, 64, 2).unwrap();
        assert_eq!(a.increments(), b.increments());
        let c = BrownianPath::sample(7, 4, 64, 2).unwrap();
        assert_ne!(a.increments(), c.increments());
    }

    #[test]
    fn distinct_reps_are_uncorrelated() {
        let n = 1 << 12;
        let a = BrownianPath::sample(11, 0, n, 1).unwrap();
        let b = BrownianPath::sample(11, 1, n, 1).unwrap();
        let (sa, sb) = (a.increments(), b.increments());
        let ma = sa.iter().sum::<f64>() / n as f64;
        let mb = sb.iter().sum::<f64>() / n as f64;
        let cov: f64 = sa.iter().zip(sb).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = sa.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = sb.iter().map(|y| (y - mb).powi(2)).sum();
        assert!((cov / (va * vb).sqrt()).abs() <= 0.05);
    }

    #[test]
    fn single_step_variance() {
        let count = 100_000;
        let draws: Vec<f64> = (0..count)
            .map(|r| BrownianPath::sample(5, r, 1, 1).unwrap().increments()[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / count as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        assert!(mean.abs() <= 4.0 / (count as f64).sqrt());
        assert!((var - 1.0).abs() <= 0.05);
    }

    #[test]
    fn fine_grid_moments() {
        let (count, n) = (100_000usize, 4usize);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for r in 0..count as u64 / n as u64 {
            for w in BrownianPath::sample(9, r, n, 1).unwrap().increments() {
                s += w;
                s2 += w * w;
            }
        }
        let m = s / count as f64;
        let v = s2 / count as f64 - m * m;
        assert!(m.abs() <= 4.0 / ((count * n) as f64).sqrt());
        assert!((v * n as f64 - 1.0).abs() <= 0.05);
    }

    #[test]
    fn coarsening_is_nested_block_summation() {
        let p = BrownianPath::sample(1, 0, 32, 2).unwrap();
        let c8 = p.coarse_increments(8).unwrap();
        let c32 = p.coarse_increments(32).unwrap();
        assert_eq!(c32, p.increments());
        for i in 0..8 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 4 * i..4 * i + 4 {
                    s += c32[k * 2 + j];
                }
                assert_eq!(c8[i * 2 + j], s);
            }
        }
        assert!(matches!(p.coarse_increments(12), Err(Error::GridMismatch { n: 12, fine: 32 })));
        let total: f64 = p.coarse_increments(1).unwrap()[0];
        let direct: f64 = (0..32).fold(0.0, |acc, k| acc + p.increment(k)[0]);
        assert_eq!(total, direct);
    }
}
