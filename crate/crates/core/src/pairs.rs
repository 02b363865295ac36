//! Canonical ordering of unordered vertex pairs.
//!
//! Pairs `(i, j)` with `i < j < n` are laid out in row-major upper-triangle
//! order, so `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. The same order indexes
//! the columns of difference matrices and the entries of pair distributions.

use crate::error::{invalid, Result};

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Column index of the pair `(i, j)`, `i < j < n`.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j {
        return Err(invalid(format!("pair ({i}, {j}) must satisfy i < j")));
    }
    if j >= n {
        return Err(invalid(format!("pair ({i}, {j}) out of range for n = {n}")));
    }
    Ok(pair_index_unchecked(i, j, n))
}

#[inline]
pub(crate) fn pair_index_unchecked(i: usize, j: usize, n: usize) -> usize {
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Iterator over all pairs `(i, j)`, `i < j`, in canonical order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(k: usize, n: usize) -> Result<(usize, usize)> {
    if k >= pair_count(n) {
        return Err(invalid(format!("pair index {k} out of range for n = {n}")));
    }
    let mut start = 0;
    for i in 0..n - 1 {
        let row = n - i - 1;
        if k < start + row {
            return Ok((i, i + 1 + (k - start)));
        }
        start += row;
    }
    unreachable!("index bounds checked above")
}
