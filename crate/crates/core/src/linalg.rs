//! Small slice helpers used on the hot simulation paths.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Frobenius norm of a row-major matrix stored in a slice.
#[inline]
pub fn frobenius(a: &[f64]) -> f64 {
    norm(a)
}

/// `out = a * b^T` for a row-major `d x d` matrix `a` (i.e. `a a^T` when `b == a`).
pub fn mul_transpose(a: &[f64], b: &[f64], d: usize, out: &mut [f64]) {
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += a[i * d + k] * b[j * d + k];
            }
            out[i * d + j] = s;
        }
    }
}
