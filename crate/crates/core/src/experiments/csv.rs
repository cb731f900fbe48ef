use std::fmt::Write;

use crate::error::Result;

use super::fit::{AffineFit, RateFit};
use super::histogram::HistogramReport;
use super::occupation::{NeighborhoodStudy, OccupationDecay};
use super::tables::ErrorTable;

/// Full-precision scientific notation.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn error_table_csv(t: &ErrorTable) -> String {
    let mut s = String::from("p,n,N,m,value\n");
    for (p, row) in t.p_values.iter().zip(&t.entries) {
        for (n, v) in t.n_values.iter().zip(row) {
            let _ = writeln!(s, "{},{},{},{},{}", fmt_real(*p), n, t.reference_n, t.m, fmt_real(*v));
        }
    }
    s
}

/// Rows whose fit failed carry `nan` and are listed after a `#` note line.
pub fn rates_csv(rates: &[(f64, Result<RateFit>)]) -> String {
    let mut s = String::from("p,slope,rate,intercept,r2\n");
    let mut notes = String::new();
    for (p, fit) in rates {
        match fit {
            Ok(f) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_real(*p),
                    fmt_real(f.slope),
                    fmt_real(f.rate),
                    fmt_real(f.intercept),
                    fmt_real(f.r_squared)
                );
                if f.dropped_zeros > 0 {
                    let _ = writeln!(notes, "# p={p}: dropped {} zero values", f.dropped_zeros);
                }
            }
            Err(e) => {
                let _ = writeln!(s, "{},nan,nan,nan,nan", fmt_real(*p));
                let _ = writeln!(notes, "# p={p}: {e}");
            }
        }
    }
    s + &notes
}

pub fn histogram_csv(r: &HistogramReport) -> String {
    let mut s = String::from("p,n,bin_lo_log10,bin_hi_log10,count,mean_d,q99_d\n");
    for e in &r.entries {
        let (mean, q) = (fmt_real(e.mean), fmt_real(e.q99));
        if e.underflow > 0 {
            let _ = writeln!(s, "{},{},-inf,{},{},{mean},{q}", fmt_real(r.p), e.n, fmt_real(-30.0), e.underflow);
        }
        for (b, c) in &e.bins {
            let _ = writeln!(
                s,
                "{},{},{},{},{c},{mean},{q}",
                fmt_real(r.p),
                e.n,
                fmt_real(*b as f64 / 10.0),
                fmt_real((*b + 1) as f64 / 10.0)
            );
        }
    }
    s
}

pub fn occupation_csv(o: &OccupationDecay) -> String {
    let mut s = String::from("n,m,mean_stat\n");
    for (n, v) in o.n_values.iter().zip(&o.means) {
        let _ = writeln!(s, "{n},{},{}", o.m, fmt_real(*v));
    }
    s
}

pub fn neighborhood_csv(o: &NeighborhoodStudy) -> String {
    let mut s = String::from("n,eps,m,mean_occupation\n");
    for (n, row) in o.n_values.iter().zip(&o.means) {
        for (e, v) in o.eps_values.iter().zip(row) {
            let _ = writeln!(s, "{n},{},{},{}", fmt_real(*e), o.m, fmt_real(*v));
        }
    }
    s
}

pub fn affine_fit_csv(f: &AffineFit, names: &[&str]) -> String {
    let mut s = String::from("term,coefficient\n");
    let _ = writeln!(s, "intercept,{}", fmt_real(f.intercept));
    for (name, c) in names.iter().zip(&f.coefficients) {
        let _ = writeln!(s, "{name},{}", fmt_real(*c));
    }
    let _ = writeln!(s, "r2,{}", fmt_real(f.r_squared));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::TableKind;

    #[test]
    fn error_table_layout() {
        let t = ErrorTable {
            kind: TableKind::Error,
            p_values: vec![1.0],
            n_values: vec![4, 8],
            reference_n: 16,
            m: 3,
            master_seed: 0,
            entries: vec![vec![0.5, 0.25]],
        };
        let csv = error_table_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,n,N,m,value");
        assert_eq!(lines[1], "1.0000000000000000e0,4,16,3,5.0000000000000000e-1");
        assert_eq!(lines.len(), 3);
        let back: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.25);
    }
}
