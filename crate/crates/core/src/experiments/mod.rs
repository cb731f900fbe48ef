//! Monte Carlo studies: empirical strong errors against a fine reference,
//! differences between successive step sizes, sup-norm errors, scaled
//! difference histograms, occupation decay and log-log rate fits.

mod csv;
mod fit;
mod histogram;
mod occupation;
mod tables;

pub use csv::{
    affine_fit_csv, error_table_csv, fmt_real, histogram_csv, neighborhood_csv, occupation_csv, rates_csv,
};
pub use fit::{fit_affine, fit_rate, AffineFit, RateFit};
pub use histogram::{scaled_diff_histogram, HistogramEntry, HistogramReport, DEFAULT_EXPONENT, UNDERFLOW};
pub use occupation::{neighborhood_study, occupation_decay, NeighborhoodStudy, OccupationDecay};
pub use tables::{empirical_diff, empirical_error, empirical_sup_error, ErrorTable, Scheme, TableKind};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Replications handed to the worker pool at a time.
pub const CHUNK: usize = 1024;

/// Runs `work(rep_id)` for `rep_id in 0..m` on the current rayon pool and
/// feeds the results to `merge` in ascending `rep_id` order, so the outcome
/// does not depend on the number of threads.
pub fn replicate<T, W, M>(m: usize, work: W, mut merge: M) -> Result<()>
where
    T: Send,
    W: Fn(u64) -> Result<T> + Sync,
    M: FnMut(T),
{
    let mut start = 0usize;
    while start < m {
        let end = (start + CHUNK).min(m);
        let chunk: Vec<T> = (start..end)
            .into_par_iter()
            .map(|r| work(r as u64))
            .collect::<Result<Vec<T>>>()?;
        chunk.into_iter().for_each(&mut merge);
        start = end;
    }
    Ok(())
}

pub(crate) fn check_grid(n_list: &[usize], fine: usize) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("step-count list is empty".into()));
    }
    match n_list.iter().find(|n| **n == 0 || !fine.is_multiple_of(**n)) {
        Some(&n) => Err(Error::GridMismatch { n, fine }),
        None => Ok(()),
    }
}

pub(crate) fn check_p(p_list: &[f64]) -> Result<()> {
    if p_list.is_empty() {
        return Err(Error::InvalidParameter("moment list is empty".into()));
    }
    match p_list.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        Some(p) => Err(Error::InvalidParameter(format!("moment p = {p} must be >= 1"))),
        None => Ok(()),
    }
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("replication count m must be >= 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicate_merges_in_order_for_any_pool() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut seen = Vec::new();
                replicate(3000, |r| Ok(r * 2), |v| seen.push(v)).unwrap();
                seen
            })
        };
        let a = run(1);
        assert_eq!(a, (0..3000u64).map(|r| r * 2).collect::<Vec<_>>());
        assert_eq!(a, run(3));
    }

    #[test]
    fn replicate_propagates_errors() {
        let r = replicate(10, |r| if r == 7 { Err(Error::DegenerateInput("x".into())) } else { Ok(r) }, |_| {});
        assert!(r.is_err());
    }
}
