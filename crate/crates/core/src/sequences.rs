//! Low-discrepancy sequences.

use crate::discrepancy::PointSet;
use crate::error::{Error, Result};

/// The first primes, one per Halton coordinate.
pub const HALTON_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

/// Radical inverse of the index `n >= 1` in `base`.
pub fn van_der_corput(n: u64, base: u64) -> Result<f64> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!("base must be at least 2, got {base}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("van der Corput indices start at 1".into()));
    }
    Ok(radical_inverse(n, base))
}

/// Halton points for the indices `1..=n` in dimension `d <= 8`; every
/// coordinate lies in `(0, 1)`.
pub fn halton(n: usize, d: usize) -> Result<PointSet> {
    if d == 0 || d > HALTON_PRIMES.len() {
        return Err(Error::InvalidArgument(format!(
            "halton dimension must be in 1..={}, got {d}",
            HALTON_PRIMES.len()
        )));
    }
    let points = (1..=n as u64)
        .map(|i| HALTON_PRIMES[..d].iter().map(|&b| radical_inverse(i, b)).collect())
        .collect();
    PointSet::new(d, points)
}
